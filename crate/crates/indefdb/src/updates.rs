//! Update actions over the stored database: application (`I o U`), new
//! constants, request fulfillment, and the change-minimality preorder on
//! updates.

use std::collections::BTreeSet;
use std::fmt;

use crate::database::IndefiniteDatabase;
use crate::error::Error;
use crate::facts::{Constant, Fact, Truth};
use crate::syntax::{Instance, Request};
use crate::views::DdbContext;
use crate::worlds::{build_pool, DomainBudget};

/// Which stored set an action touches.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UpdateTarget {
    DSet,
    ESet,
}

/// Insert or delete.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UpdateSign {
    Insert,
    Delete,
}

/// A signed, target-tagged update action, written `+q(a,b)@d` or
/// `-q(a,b)@e`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UpdateAction {
    pub fact: Fact,
    pub target: UpdateTarget,
    pub sign: UpdateSign,
}

impl UpdateAction {
    pub fn insert_d(fact: Fact) -> Self {
        UpdateAction { fact, target: UpdateTarget::DSet, sign: UpdateSign::Insert }
    }

    pub fn delete_d(fact: Fact) -> Self {
        UpdateAction { fact, target: UpdateTarget::DSet, sign: UpdateSign::Delete }
    }

    pub fn insert_e(fact: Fact) -> Self {
        UpdateAction { fact, target: UpdateTarget::ESet, sign: UpdateSign::Insert }
    }

    pub fn delete_e(fact: Fact) -> Self {
        UpdateAction { fact, target: UpdateTarget::ESet, sign: UpdateSign::Delete }
    }
}

impl fmt::Display for UpdateAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            UpdateSign::Insert => '+',
            UpdateSign::Delete => '-',
        };
        let target = match self.target {
            UpdateTarget::DSet => 'd',
            UpdateTarget::ESet => 'e',
        };
        write!(f, "{sign}{}@{target}", self.fact)
    }
}

/// A contradiction-free set of update actions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Update {
    actions: BTreeSet<UpdateAction>,
}

impl Update {
    pub fn empty() -> Self {
        Update::default()
    }

    /// Builds an update, rejecting insert/delete pairs on the same fact and
    /// target.
    pub fn new(actions: BTreeSet<UpdateAction>) -> Result<Self, Error> {
        for a in &actions {
            if a.sign == UpdateSign::Insert {
                let twin = UpdateAction {
                    fact: a.fact.clone(),
                    target: a.target,
                    sign: UpdateSign::Delete,
                };
                if actions.contains(&twin) {
                    return Err(Error::ContradictoryUpdate(format!(
                        "{a} and {twin} cannot both appear"
                    )));
                }
            }
        }
        Ok(Update { actions })
    }

    pub fn from_actions(actions: impl IntoIterator<Item = UpdateAction>) -> Result<Self, Error> {
        Update::new(actions.into_iter().collect())
    }

    pub fn actions(&self) -> &BTreeSet<UpdateAction> {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Definite constants occurring in the update.
    pub fn constants(&self) -> BTreeSet<Constant> {
        self.actions
            .iter()
            .flat_map(|a| a.fact.constants().cloned())
            .filter(Constant::is_definite)
            .collect()
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        self.actions.iter().map(|a| a.fact.pred().to_string()).collect()
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// `I o U`: `D' = (D u U+^D) \ U-^D` and `E' = (E u U+^E) \ U-^E`.
pub fn apply(db: &IndefiniteDatabase, u: &Update) -> IndefiniteDatabase {
    let mut d = db.d_set().clone();
    let mut e = db.e_set().clone();
    for a in u.actions() {
        match (a.target, a.sign) {
            (UpdateTarget::DSet, UpdateSign::Insert) => {
                d.insert(a.fact.clone());
            }
            (UpdateTarget::ESet, UpdateSign::Insert) => {
                e.insert(a.fact.clone());
            }
            _ => {}
        }
    }
    for a in u.actions() {
        match (a.target, a.sign) {
            (UpdateTarget::DSet, UpdateSign::Delete) => {
                d.remove(&a.fact);
            }
            (UpdateTarget::ESet, UpdateSign::Delete) => {
                e.remove(&a.fact);
            }
            _ => {}
        }
    }
    IndefiniteDatabase::new(d, e)
}

/// Applies an update to the stored database of an instance.
pub fn apply_to_instance(inst: &Instance, u: &Update) -> Instance {
    let mut out = inst.clone();
    out.db = apply(&inst.db, u);
    out
}

/// `NC(D,R,U)`: non-null constants of the update that occur neither in the
/// deductive database nor in the request.
pub fn new_constants(inst: &Instance, u: &Update) -> BTreeSet<Constant> {
    let known = inst.constants();
    u.constants().into_iter().filter(|c| !known.contains(c)).collect()
}

/// A fulfillment check: the updated deductive database is consistent, every
/// fact requested true is true, and every fact requested false is false.
pub fn fulfills(inst: &Instance, u: &Update, budget: &DomainBudget) -> Result<bool, Error> {
    let request = inst.request.as_ref().ok_or(Error::NoRequest)?;
    let updated = apply_to_instance(inst, u);
    let mut extra: BTreeSet<Constant> = u.constants();
    for f in request.want_true.iter().chain(request.want_false.iter()) {
        extra.extend(f.constants().filter(|c| c.is_definite()).cloned());
    }
    let mut ctx = DdbContext::new(&updated.db, &updated.ics, &updated.view, &extra, budget)?;
    if !ctx.consistent()? {
        return Ok(false);
    }
    for a in &request.want_true {
        if !ctx.is_true(a)? {
            return Ok(false);
        }
    }
    for a in &request.want_false {
        if !ctx.is_false(a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The finite test set of base atoms over which the change-minimality
/// preorder quantifies: all base atoms built from the constants of the
/// instance, the request, and the two updates, plus null, plus one fresh
/// representative per numeral gap and one fresh symbol. Atoms outside this
/// set keep identical truth values under both updates.
pub fn comparison_atoms(inst: &Instance, u: &Update, v: &Update) -> Vec<Fact> {
    let mut consts: BTreeSet<Constant> = inst.constants();
    consts.extend(u.constants());
    consts.extend(v.constants());
    let has_symbols =
        consts.iter().any(|c| matches!(c, Constant::Sym(_))) || consts.is_empty();
    let pool = build_pool(
        &consts,
        &DomainBudget {
            fresh_symbols: usize::from(has_symbols),
            fresh_numerals: 1,
            universe_cap: 0,
        },
    );
    let mut with_null = pool.clone();
    with_null.push(Constant::Null);
    let mut out = Vec::new();
    for (pred, arity) in inst.schema.base_preds() {
        let pattern = Fact::from_parts(
            std::sync::Arc::clone(pred),
            vec![Constant::Null; arity],
        );
        if arity == 0 {
            out.push(pattern);
            continue;
        }
        out.extend(pattern.definite_instances(&with_null));
    }
    out.sort();
    out.dedup();
    out
}

/// Truth table of the base comparison atoms for one database state.
fn truth_table(
    inst: &Instance,
    u: Option<&Update>,
    atoms: &[Fact],
    extra: &BTreeSet<Constant>,
    budget: &DomainBudget,
) -> Result<Option<Vec<Truth>>, Error> {
    let updated = match u {
        Some(u) => apply_to_instance(inst, u),
        None => inst.clone(),
    };
    let mut ctx = DdbContext::new(&updated.db, &updated.ics, &updated.view, extra, budget)?;
    if !ctx.consistent()? {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(atoms.len());
    for a in atoms {
        out.push(if ctx.is_true(a)? {
            Truth::True
        } else if ctx.is_false(a)? {
            Truth::False
        } else {
            Truth::Unknown
        });
    }
    Ok(Some(out))
}

/// The change-minimality preorder `u (= v`: strictly fewer new constants,
/// or equal new constants and, atom by atom, `u` changes the original
/// database no more than `v` does.
pub fn leq_update(
    inst: &Instance,
    u: &Update,
    v: &Update,
    budget: &DomainBudget,
) -> Result<bool, Error> {
    let nc_u = new_constants(inst, u);
    let nc_v = new_constants(inst, v);
    if nc_u != nc_v {
        return Ok(nc_u.is_subset(&nc_v));
    }
    let atoms = comparison_atoms(inst, u, v);
    let mut extra: BTreeSet<Constant> = u.constants();
    extra.extend(v.constants());
    let base = truth_table(inst, None, &atoms, &extra, budget)?;
    let tu = truth_table(inst, Some(u), &atoms, &extra, budget)?;
    let tv = truth_table(inst, Some(v), &atoms, &extra, budget)?;
    let (tu, tv) = match (tu, tv) {
        (Some(tu), Some(tv)) => (tu, tv),
        // an inconsistent result state changes everything; only compare
        // through the new-constant sets, already known equal
        _ => return Ok(true),
    };
    let base = match base {
        Some(b) => b,
        None => return Ok(true),
    };
    for (i, _) in atoms.iter().enumerate() {
        let ok = match base[i] {
            Truth::True => tu[i] >= tv[i],
            Truth::False => tv[i] >= tu[i],
            Truth::Unknown => tu[i] == Truth::Unknown || tv[i] == tu[i],
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Strict part of the preorder.
pub fn lt_update(
    inst: &Instance,
    u: &Update,
    v: &Update,
    budget: &DomainBudget,
) -> Result<bool, Error> {
    Ok(leq_update(inst, u, v, budget)? && !leq_update(inst, v, u, budget)?)
}

/// Degenerate fulfillment for instances without a request section: the
/// empty request holds exactly when the database is consistent.
pub fn request_or_default(inst: &Instance) -> Request {
    inst.request.clone().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_instance;

    fn sym(s: &str) -> Constant {
        Constant::sym(s)
    }

    fn example1() -> Instance {
        parse_instance(
            "base q/2, r/3. derived p/1.
             db { q(a,b). }
             view { p(X) :- q(X,Y), r(X,Y,Z). }
             request { true: p(a); }",
        )
        .unwrap()
    }

    #[test]
    fn applies_paper_example_update() {
        let inst = example1();
        let u = Update::from_actions([
            UpdateAction::delete_d(Fact::new("q", vec![sym("a"), sym("b")])),
            UpdateAction::insert_d(Fact::new("q", vec![sym("a"), sym("a")])),
            UpdateAction::insert_d(Fact::new("r", vec![sym("a"), sym("a"), sym("a")])),
        ])
        .unwrap();
        let db2 = apply(&inst.db, &u);
        let expect: BTreeSet<Fact> = [
            Fact::new("q", vec![sym("a"), sym("a")]),
            Fact::new("r", vec![sym("a"), sym("a"), sym("a")]),
        ]
        .into_iter()
        .collect();
        assert_eq!(db2.d_set(), &expect);
        assert!(db2.e_set().is_empty());
        // empty update is the identity
        assert_eq!(apply(&inst.db, &Update::empty()), inst.db);
        // deleting an absent fact changes nothing
        let del = Update::from_actions([UpdateAction::delete_d(Fact::new(
            "r",
            vec![sym("x"), sym("x"), sym("x")],
        ))])
        .unwrap();
        assert_eq!(apply(&inst.db, &del), inst.db);
    }

    #[test]
    fn rejects_contradictory_updates() {
        let f = Fact::new("q", vec![sym("a"), sym("b")]);
        let err = Update::from_actions([
            UpdateAction::insert_d(f.clone()),
            UpdateAction::delete_d(f.clone()),
        ]);
        assert!(err.is_err());
        // same fact on different targets is fine
        let ok = Update::from_actions([
            UpdateAction::insert_d(f.clone()),
            UpdateAction::delete_e(f),
        ]);
        assert!(ok.is_ok());
    }

    #[test]
    fn new_constants_examples() {
        let inst = example1();
        let u = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), Constant::Null],
        ))])
        .unwrap();
        assert!(new_constants(&inst, &u).is_empty());
        let v = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "q",
            vec![sym("c"), sym("d")],
        ))])
        .unwrap();
        let nc = new_constants(&inst, &v);
        assert_eq!(nc, [sym("c"), sym("d")].into_iter().collect());
    }

    #[test]
    fn fulfillment_of_example1_repairs() {
        let inst = example1();
        let budget = DomainBudget { fresh_symbols: 1, fresh_numerals: 0, universe_cap: 22 };
        let null_insert = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), Constant::Null],
        ))])
        .unwrap();
        assert!(fulfills(&inst, &null_insert, &budget).unwrap());
        let definite = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), sym("a")],
        ))])
        .unwrap();
        assert!(fulfills(&inst, &definite, &budget).unwrap());
        assert!(!fulfills(&inst, &Update::empty(), &budget).unwrap());
    }

    #[test]
    fn null_joins_do_not_fulfill() {
        // view t :- p(X), q(X); inserting p(null),q(null) leaves t unknown
        let inst = parse_instance(
            "base p/1, q/1. derived t/0.
             db { }
             view { t :- p(X), q(X). }
             request { true: t; }",
        )
        .unwrap();
        let u = Update::from_actions([
            UpdateAction::insert_d(Fact::new("p", vec![Constant::Null])),
            UpdateAction::insert_d(Fact::new("q", vec![Constant::Null])),
        ])
        .unwrap();
        let budget = DomainBudget { fresh_symbols: 2, fresh_numerals: 0, universe_cap: 22 };
        assert!(!fulfills(&inst, &u, &budget).unwrap());
        // committing to one shared constant does fulfill
        let v = Update::from_actions([
            UpdateAction::insert_d(Fact::new("p", vec![sym("a")])),
            UpdateAction::insert_d(Fact::new("q", vec![sym("a")])),
        ])
        .unwrap();
        assert!(fulfills(&inst, &v, &budget).unwrap());
    }

    #[test]
    fn preorder_on_example1() {
        let inst = example1();
        let budget = DomainBudget { fresh_symbols: 1, fresh_numerals: 0, universe_cap: 22 };
        let null_insert = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), Constant::Null],
        ))])
        .unwrap();
        // reflexive
        assert!(leq_update(&inst, &null_insert, &null_insert, &budget).unwrap());
        // fresh-constant update is strictly above on the NC order
        let fresh = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), sym("zz")],
        ))])
        .unwrap();
        assert!(leq_update(&inst, &null_insert, &fresh, &budget).unwrap());
        assert!(!leq_update(&inst, &fresh, &null_insert, &budget).unwrap());
        assert!(lt_update(&inst, &null_insert, &fresh, &budget).unwrap());
        // needlessly deleting q(a,b) is a strictly bigger change
        let bigger = Update::from_actions([
            UpdateAction::delete_d(Fact::new("q", vec![sym("a"), sym("b")])),
            UpdateAction::insert_d(Fact::new("r", vec![sym("a"), sym("b"), Constant::Null])),
        ])
        .unwrap();
        assert!(lt_update(&inst, &null_insert, &bigger, &budget).unwrap());
    }

    #[test]
    fn incomparable_repairs_of_example1() {
        // {+r(a,b,null)} and {+q(a,a),+r(a,a,null)} change different atoms
        let inst = example1();
        let budget = DomainBudget { fresh_symbols: 1, fresh_numerals: 0, universe_cap: 22 };
        let u = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), Constant::Null],
        ))])
        .unwrap();
        let v = Update::from_actions([
            UpdateAction::insert_d(Fact::new("q", vec![sym("a"), sym("a")])),
            UpdateAction::insert_d(Fact::new("r", vec![sym("a"), sym("a"), Constant::Null])),
        ])
        .unwrap();
        assert!(!leq_update(&inst, &u, &v, &budget).unwrap());
        assert!(!leq_update(&inst, &v, &u, &budget).unwrap());
    }

    #[test]
    fn fulfills_invariant_under_noop_actions() {
        let inst = example1();
        let budget = DomainBudget { fresh_symbols: 1, fresh_numerals: 0, universe_cap: 22 };
        let base = Update::from_actions([UpdateAction::insert_d(Fact::new(
            "r",
            vec![sym("a"), sym("b"), Constant::Null],
        ))])
        .unwrap();
        let padded = Update::from_actions([
            UpdateAction::insert_d(Fact::new("r", vec![sym("a"), sym("b"), Constant::Null])),
            UpdateAction::insert_d(Fact::new("q", vec![sym("a"), sym("b")])), // already present
            UpdateAction::delete_d(Fact::new("q", vec![sym("b"), sym("b")])), // absent
        ])
        .unwrap();
        assert_eq!(
            fulfills(&inst, &base, &budget).unwrap(),
            fulfills(&inst, &padded, &budget).unwrap()
        );
    }
}
