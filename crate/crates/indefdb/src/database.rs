//! The two-set indefinite database `<D,E>` and its closed-world truth
//! definition: a fact is true when it sits below something in `D`, unknown
//! when it is compatible with `D` but neither entailed by `D` nor excluded
//! by an exception in `E`, and false otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::facts::{in_closure, ClosureOp, Constant, Fact, Truth};

/// Predicate declarations split into base (extensional) and derived
/// (intensional) names. The two name sets are disjoint.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Schema {
    base: BTreeMap<Arc<str>, usize>,
    derived: BTreeMap<Arc<str>, usize>,
}

impl Schema {
    pub fn new() -> Self {
        Schema::default()
    }

    pub fn declare_base(&mut self, name: &str, arity: usize) -> Result<(), Error> {
        if self.derived.contains_key(name) || self.base.contains_key(name) {
            return Err(Error::DuplicatePredicate(name.to_string()));
        }
        self.base.insert(Arc::from(name), arity);
        Ok(())
    }

    pub fn declare_derived(&mut self, name: &str, arity: usize) -> Result<(), Error> {
        if self.base.contains_key(name) || self.derived.contains_key(name) {
            return Err(Error::DuplicatePredicate(name.to_string()));
        }
        self.derived.insert(Arc::from(name), arity);
        Ok(())
    }

    pub fn is_base(&self, name: &str) -> bool {
        self.base.contains_key(name)
    }

    pub fn is_derived(&self, name: &str) -> bool {
        self.derived.contains_key(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.base.get(name).or_else(|| self.derived.get(name)).copied()
    }

    pub fn base_preds(&self) -> impl Iterator<Item = (&Arc<str>, usize)> {
        self.base.iter().map(|(n, a)| (n, *a))
    }

    pub fn derived_preds(&self) -> impl Iterator<Item = (&Arc<str>, usize)> {
        self.derived.iter().map(|(n, a)| (n, *a))
    }

    /// Checks that `f` uses a declared predicate at the declared arity.
    pub fn check_fact(&self, f: &Fact) -> Result<(), Error> {
        match self.arity(f.pred()) {
            None => Err(Error::UnknownPredicate(f.pred().to_string())),
            Some(a) if a != f.arity() => Err(Error::ArityMismatch {
                pred: f.pred().to_string(),
                declared: a,
                got: f.arity(),
            }),
            Some(_) => Ok(()),
        }
    }
}

/// The pair `<D,E>`: `D` holds everything true (and, through compatibility,
/// bounds what may be unknown); `E` lists exceptions, facts that would
/// otherwise be unknown but are known false.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IndefiniteDatabase {
    d: BTreeSet<Fact>,
    e: BTreeSet<Fact>,
}

impl IndefiniteDatabase {
    pub fn new(d: BTreeSet<Fact>, e: BTreeSet<Fact>) -> Self {
        IndefiniteDatabase { d, e }
    }

    pub fn empty() -> Self {
        IndefiniteDatabase::default()
    }

    pub fn d_set(&self) -> &BTreeSet<Fact> {
        &self.d
    }

    pub fn e_set(&self) -> &BTreeSet<Fact> {
        &self.e
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        self.d
            .iter()
            .chain(self.e.iter())
            .flat_map(|f| f.constants().cloned())
            .filter(Constant::is_definite)
            .collect()
    }

    /// Truth of `a` per the two-level closed-world reading of `<D,E>`.
    pub fn truth(&self, schema: &Schema, a: &Fact) -> Result<Truth, Error> {
        if !schema.is_base(a.pred()) {
            return Err(Error::UnknownPredicate(a.pred().to_string()));
        }
        schema.check_fact(a)?;
        Ok(self.truth_unchecked(a))
    }

    /// Truth without schema validation; callers guarantee `a` is base.
    pub fn truth_unchecked(&self, a: &Fact) -> Truth {
        if in_closure(&self.d, a, ClosureOp::Down) {
            Truth::True
        } else if in_closure(&self.d, a, ClosureOp::Approx)
            && !in_closure(&self.e, a, ClosureOp::Up)
        {
            Truth::Unknown
        } else {
            Truth::False
        }
    }

    /// The sets `I_t`, `I_u`, `I_f` restricted to a finite universe.
    pub fn truth_partition(
        &self,
        universe: &BTreeSet<Fact>,
    ) -> (BTreeSet<Fact>, BTreeSet<Fact>, BTreeSet<Fact>) {
        let mut t = BTreeSet::new();
        let mut u = BTreeSet::new();
        let mut f = BTreeSet::new();
        for a in universe {
            match self.truth_unchecked(a) {
                Truth::True => t.insert(a.clone()),
                Truth::Unknown => u.insert(a.clone()),
                Truth::False => f.insert(a.clone()),
            };
        }
        (t, u, f)
    }
}

impl fmt::Display for IndefiniteDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{{")?;
        for (i, a) in self.d.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}, {{")?;
        for (i, a) in self.e.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(n: u64) -> Constant {
        Constant::Num(n)
    }

    fn p(a: Constant) -> Fact {
        Fact::new("p", vec![a])
    }

    fn q2(a: Constant, b: Constant) -> Fact {
        Fact::new("q", vec![a, b])
    }

    fn schema_p() -> Schema {
        let mut s = Schema::new();
        s.declare_base("p", 1).unwrap();
        s
    }

    #[test]
    fn truth_of_exception_database() {
        // <{p(null)},{p(1)}>: p(c) holds for some c, and p(1) is false
        let db = IndefiniteDatabase::new(
            [p(Constant::Null)].into_iter().collect(),
            [p(num(1))].into_iter().collect(),
        );
        let s = schema_p();
        assert_eq!(db.truth(&s, &p(num(1))).unwrap(), Truth::False);
        assert_eq!(db.truth(&s, &p(Constant::Null)).unwrap(), Truth::True);
        assert_eq!(db.truth(&s, &p(num(2))).unwrap(), Truth::Unknown);
    }

    #[test]
    fn truth_of_binary_exception_database() {
        // <{q(null,null),q(1,1)},{q(1,null)}>
        let db = IndefiniteDatabase::new(
            [q2(Constant::Null, Constant::Null), q2(num(1), num(1))].into_iter().collect(),
            [q2(num(1), Constant::Null)].into_iter().collect(),
        );
        assert_eq!(db.truth_unchecked(&q2(num(1), num(1))), Truth::True);
        assert_eq!(db.truth_unchecked(&q2(num(1), Constant::Null)), Truth::True);
        assert_eq!(db.truth_unchecked(&q2(Constant::Null, num(1))), Truth::True);
        // definite q(1,d) with d != 1 are false
        assert_eq!(db.truth_unchecked(&q2(num(1), num(2))), Truth::False);
        // other atoms are unknown
        assert_eq!(db.truth_unchecked(&q2(num(2), num(2))), Truth::Unknown);
    }

    #[test]
    fn empty_database_is_all_false() {
        let db = IndefiniteDatabase::empty();
        assert_eq!(db.truth_unchecked(&p(num(1))), Truth::False);
        assert_eq!(db.truth_unchecked(&p(Constant::Null)), Truth::False);
    }

    #[test]
    fn unknown_predicate_is_an_error() {
        let db = IndefiniteDatabase::empty();
        let s = schema_p();
        assert!(db.truth(&s, &Fact::new("r", vec![num(1)])).is_err());
    }

    #[test]
    fn partition_is_exhaustive_and_disjoint() {
        let db = IndefiniteDatabase::new(
            [p(Constant::Null)].into_iter().collect(),
            [p(num(1))].into_iter().collect(),
        );
        let universe: BTreeSet<Fact> =
            [p(Constant::Null), p(num(1)), p(num(2)), p(num(3))].into_iter().collect();
        let (t, u, f) = db.truth_partition(&universe);
        assert_eq!(t.len() + u.len() + f.len(), universe.len());
        assert!(t.intersection(&u).next().is_none());
        assert!(t.intersection(&f).next().is_none());
        assert!(u.intersection(&f).next().is_none());
    }
}
