//! Ground facts over a schema with a single null value, and the
//! informativeness lattice that gives them their meaning.
//!
//! A constant is either the null placeholder `⊥` (written `null`), a
//! positive numeral, or a symbol. A fact `p(t1,...,tk)` is *definite* when
//! no argument is null. Fact `a` is at most as informative as `b`
//! (`a ⪯ b`) when they share a predicate and `b` agrees with `a` at every
//! position where `a` is not null; `a ≈ b` holds when the two have a
//! common upper bound. The four closure operators over a set of facts
//! (`down`, `up`, `approx`, `tilde`) are exposed as membership predicates
//! so that the infinite up-sets never have to be materialized.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A domain element. The ordering (null < numerals < symbols) is only used
/// for canonical sorting; the built-in `<=` of integrity constraints is
/// defined between numerals alone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Constant {
    Null,
    Num(u64),
    Sym(Arc<str>),
}

impl Constant {
    pub fn sym(name: impl AsRef<str>) -> Self {
        Constant::Sym(Arc::from(name.as_ref()))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Constant::Null)
    }

    pub fn is_definite(&self) -> bool {
        !self.is_null()
    }

    /// Built-in `<=`: defined between numerals, false everywhere else.
    pub fn num_leq(&self, other: &Constant) -> bool {
        match (self, other) {
            (Constant::Num(a), Constant::Num(b)) => a <= b,
            _ => false,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Null => write!(f, "null"),
            Constant::Num(n) => write!(f, "{n}"),
            Constant::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// Three-valued truth, ordered `False <= Unknown <= True`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truth::False => write!(f, "false"),
            Truth::Unknown => write!(f, "unknown"),
            Truth::True => write!(f, "true"),
        }
    }
}

/// A ground atom: predicate name plus positional arguments.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fact {
    pred: Arc<str>,
    args: Vec<Constant>,
}

impl Fact {
    pub fn new(pred: impl AsRef<str>, args: Vec<Constant>) -> Self {
        Fact { pred: Arc::from(pred.as_ref()), args }
    }

    pub fn from_parts(pred: Arc<str>, args: Vec<Constant>) -> Self {
        Fact { pred, args }
    }

    pub fn pred(&self) -> &str {
        &self.pred
    }

    pub fn pred_arc(&self) -> Arc<str> {
        Arc::clone(&self.pred)
    }

    pub fn args(&self) -> &[Constant] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_definite(&self) -> bool {
        self.args.iter().all(Constant::is_definite)
    }

    pub fn null_count(&self) -> usize {
        self.args.iter().filter(|c| c.is_null()).count()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Constant> {
        self.args.iter()
    }

    /// `self ⪯ other`: same predicate, and `other` agrees with `self`
    /// wherever `self` is definite.
    pub fn leq_info(&self, other: &Fact) -> bool {
        self.pred == other.pred
            && self.args.len() == other.args.len()
            && self
                .args
                .iter()
                .zip(&other.args)
                .all(|(a, b)| a.is_null() || a == b)
    }

    /// Strict part of `⪯`.
    pub fn lt_info(&self, other: &Fact) -> bool {
        self != other && self.leq_info(other)
    }

    /// `self ≈ other`: a common upper bound exists, i.e. the two agree at
    /// every position where both are definite.
    pub fn compatible(&self, other: &Fact) -> bool {
        self.pred == other.pred
            && self.args.len() == other.args.len()
            && self
                .args
                .iter()
                .zip(&other.args)
                .all(|(a, b)| a.is_null() || b.is_null() || a == b)
    }

    /// All definite facts `b ⪰ self` with nulls drawn from `pool`.
    /// Pool constants must be definite.
    pub fn definite_instances(&self, pool: &[Constant]) -> Vec<Fact> {
        let nulls: Vec<usize> = self
            .args
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_null())
            .map(|(i, _)| i)
            .collect();
        if nulls.is_empty() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; nulls.len()];
        if pool.is_empty() {
            return out;
        }
        loop {
            let mut args = self.args.clone();
            for (k, &pos) in nulls.iter().enumerate() {
                args[pos] = pool[idx[k]].clone();
            }
            out.push(Fact { pred: Arc::clone(&self.pred), args });
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < pool.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == nulls.len() {
                    return out;
                }
            }
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Which of the four closure operators of the informativeness lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosureOp {
    Down,
    Up,
    Approx,
    Tilde,
}

/// Membership of `a` in `set^op` without materializing the closure.
pub fn in_closure<'a, I>(set: I, a: &Fact, op: ClosureOp) -> bool
where
    I: IntoIterator<Item = &'a Fact> + Copy,
{
    match op {
        ClosureOp::Down => set.into_iter().any(|b| a.leq_info(b)),
        ClosureOp::Up => set.into_iter().any(|b| b.leq_info(a)),
        ClosureOp::Approx => set.into_iter().any(|b| b.compatible(a)),
        ClosureOp::Tilde => {
            in_closure(set, a, ClosureOp::Approx) && !in_closure(set, a, ClosureOp::Down)
        }
    }
}

/// Materialize `set^op` restricted to a finite universe of facts.
pub fn materialize_closure<'a, I>(set: I, universe: &BTreeSet<Fact>, op: ClosureOp) -> BTreeSet<Fact>
where
    I: IntoIterator<Item = &'a Fact> + Copy,
{
    universe
        .iter()
        .filter(|a| in_closure(set, a, op))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: u64) -> Constant {
        Constant::Num(n)
    }

    fn q(a: Constant, b: Constant) -> Fact {
        Fact::new("q", vec![a, b])
    }

    #[test]
    fn informativeness_examples() {
        // {q(1,null)}^up over {null,1,2} contains q(1,1) and q(1,2)
        assert!(q(c(1), Constant::Null).leq_info(&q(c(1), c(1))));
        assert!(q(c(1), Constant::Null).leq_info(&q(c(1), Constant::Null)));
        assert!(!q(c(1), Constant::Null).lt_info(&q(c(1), Constant::Null)));
        assert!(!q(c(1), Constant::Null).leq_info(&q(c(2), c(1))));
        // different predicates are incomparable
        assert!(!Fact::new("p", vec![c(1)]).leq_info(&Fact::new("r", vec![c(1)])));
    }

    #[test]
    fn compatibility_examples() {
        assert!(q(c(1), Constant::Null).compatible(&q(Constant::Null, c(2))));
        let a = q(c(1), c(2));
        assert!(a.compatible(&a));
        // no s with 1 <= s1 and 2 <= s1
        assert!(!q(c(1), Constant::Null).compatible(&q(c(2), c(2))));
    }

    #[test]
    fn compatible_matches_exhaustive_upper_bound_search() {
        // oracle: enumerate candidate upper bounds over {null,1,2}^2
        let pool = [Constant::Null, c(1), c(2)];
        let mut atoms = Vec::new();
        for x in &pool {
            for y in &pool {
                atoms.push(q(x.clone(), y.clone()));
            }
        }
        for a in &atoms {
            for b in &atoms {
                let oracle = atoms
                    .iter()
                    .any(|s| a.leq_info(s) && b.leq_info(s) && s.is_definite())
                    || {
                        // upper bounds may also lie outside the pool-definite set;
                        // compatibility only needs any common refinement, definite
                        // or not, so check the full pool square too.
                        atoms.iter().any(|s| a.leq_info(s) && b.leq_info(s))
                    };
                assert_eq!(a.compatible(b), oracle, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn closure_membership_examples() {
        let s: BTreeSet<Fact> = [q(c(1), Constant::Null)].into_iter().collect();
        assert!(in_closure(&s, &q(Constant::Null, Constant::Null), ClosureOp::Down));
        assert!(in_closure(&s, &q(c(1), c(2)), ClosureOp::Tilde));
        assert!(in_closure(&s, &q(c(1), c(2)), ClosureOp::Up));
        assert!(!in_closure(&s, &q(c(1), Constant::Null), ClosureOp::Tilde));
        let empty: BTreeSet<Fact> = BTreeSet::new();
        for op in [ClosureOp::Down, ClosureOp::Up, ClosureOp::Approx, ClosureOp::Tilde] {
            assert!(!in_closure(&empty, &q(c(1), c(1)), op));
        }
    }

    #[test]
    fn paper_closure_tables() {
        // Dom = {null,1,2}; D = {q(1,null)}
        let d: BTreeSet<Fact> = [q(c(1), Constant::Null)].into_iter().collect();
        let pool = [Constant::Null, c(1), c(2)];
        let mut universe = BTreeSet::new();
        for x in &pool {
            for y in &pool {
                universe.insert(q(x.clone(), y.clone()));
            }
        }
        let down = materialize_closure(&d, &universe, ClosureOp::Down);
        assert_eq!(
            down,
            [q(c(1), Constant::Null), q(Constant::Null, Constant::Null)].into_iter().collect()
        );
        let up = materialize_closure(&d, &universe, ClosureOp::Up);
        assert_eq!(
            up,
            [q(c(1), Constant::Null), q(c(1), c(1)), q(c(1), c(2))].into_iter().collect()
        );
        let tilde = materialize_closure(&d, &universe, ClosureOp::Tilde);
        assert_eq!(
            tilde,
            [
                q(c(1), c(1)),
                q(c(1), c(2)),
                q(Constant::Null, c(1)),
                q(Constant::Null, c(2))
            ]
            .into_iter()
            .collect()
        );
        // D^approx = (D^up)^down
        let approx = materialize_closure(&d, &universe, ClosureOp::Approx);
        let two_step = materialize_closure(&up, &universe, ClosureOp::Down);
        assert_eq!(approx, two_step);
        assert_eq!(approx.len(), 6);
    }

    #[test]
    fn definite_instances_fill_nulls() {
        let pool = [c(1), c(2)];
        let inst = q(c(1), Constant::Null).definite_instances(&pool);
        assert_eq!(inst.len(), 2);
        let inst = q(Constant::Null, Constant::Null).definite_instances(&pool);
        assert_eq!(inst.len(), 4);
        let inst = q(c(1), c(2)).definite_instances(&pool);
        assert_eq!(inst, vec![q(c(1), c(2))]);
    }
}
