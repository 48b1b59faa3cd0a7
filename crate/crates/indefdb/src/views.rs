//! View evaluation: grounding, least and perfect models, brute-force
//! answer sets, and the deductive-database semantics built on possible
//! worlds (`ddb_consistent`, `ddb_truth`).
//!
//! The deductive database `<I,eta,P>` is consistent when `<I,eta>` is
//! consistent and the program `W u P` has answer sets for every possible
//! world `W`; a fact is true (false) when every answer set of every world
//! models (rejects) it. Horn and stratified views always have exactly one
//! answer set per world, which both gives the consistency fast path and,
//! for Horn views, lets truth be decided on subset-minimal and
//! subset-maximal worlds alone when the universe is too large to
//! enumerate.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::database::IndefiniteDatabase;
use crate::error::Error;
use crate::facts::{in_closure, ClosureOp, Constant, Fact, Truth};
use crate::syntax::{check_acyclic, Atom, Constraint, Instance, ProgramClass, Rule, Term};
use crate::worlds::{prepare, DomainBudget, World, WorldContext};

/// A ground rule; heads are derived facts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroundRule {
    pub head: Fact,
    pub pos: Vec<Fact>,
    pub neg: Vec<Fact>,
}

/// A fully instantiated program.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
}

/// All instantiations of the view rules with variables mapped to pool
/// constants. Safety makes the result finite.
pub fn ground(view: &[Rule], pool: &[Constant]) -> GroundProgram {
    let mut rules = Vec::new();
    for rule in view {
        let vars: Vec<Arc<str>> = {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for a in rule.atoms() {
                for v in a.vars() {
                    if seen.insert(Arc::clone(v)) {
                        out.push(Arc::clone(v));
                    }
                }
            }
            out
        };
        let mut idx = vec![0usize; vars.len()];
        loop {
            let binding: BTreeMap<Arc<str>, Constant> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (Arc::clone(v), pool[idx[i]].clone()))
                .collect();
            rules.push(GroundRule {
                head: subst(&rule.head, &binding),
                pos: rule.body_pos.iter().map(|a| subst(a, &binding)).collect(),
                neg: rule.body_neg.iter().map(|a| subst(a, &binding)).collect(),
            });
            if vars.is_empty() {
                break;
            }
            let mut j = 0;
            loop {
                if pool.is_empty() {
                    return GroundProgram { rules };
                }
                idx[j] += 1;
                if idx[j] < pool.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == vars.len() {
                    return GroundProgram { rules };
                }
            }
        }
    }
    GroundProgram { rules }
}

fn subst(a: &Atom, binding: &BTreeMap<Arc<str>, Constant>) -> Fact {
    Fact::from_parts(
        Arc::clone(&a.pred),
        a.args
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => binding[v].clone(),
            })
            .collect(),
    )
}

/// Least model of a ground positive program joined with the given facts.
fn ground_least_model(rules: &[GroundRule], base: &BTreeSet<Fact>) -> BTreeSet<Fact> {
    let mut model = base.clone();
    loop {
        let mut changed = false;
        for r in rules {
            if r.pos.iter().all(|a| model.contains(a)) && !model.contains(&r.head) {
                model.insert(r.head.clone());
                changed = true;
            }
        }
        if !changed {
            return model;
        }
    }
}

/// All stable models of `g u w`: `M` is an answer set iff `M` equals the
/// least model of the reduct of `g` with respect to `M`, joined with `w`.
/// The Horn fast path skips the subset search.
pub fn answer_sets(
    g: &GroundProgram,
    w: &BTreeSet<Fact>,
    cap: usize,
) -> Result<Vec<BTreeSet<Fact>>, Error> {
    if g.rules.iter().all(|r| r.neg.is_empty()) {
        return Ok(vec![ground_least_model(&g.rules, w)]);
    }
    let heads: Vec<Fact> = {
        let set: BTreeSet<Fact> = g.rules.iter().map(|r| r.head.clone()).collect();
        set.into_iter().collect()
    };
    if heads.len() > cap {
        return Err(Error::BudgetExhausted(format!(
            "{} candidate derived atoms for stable-model search, cap {cap}",
            heads.len()
        )));
    }
    let mut out = Vec::new();
    for k in 0..=heads.len() {
        let mut combo: Vec<usize> = (0..k).collect();
        'combos: loop {
            let mut m = w.clone();
            for &i in &combo {
                m.insert(heads[i].clone());
            }
            if is_stable(g, w, &m) {
                out.push(m);
            }
            // next combination
            if k == 0 {
                break 'combos;
            }
            let n = heads.len();
            let mut i = k;
            loop {
                if i == 0 {
                    break 'combos;
                }
                i -= 1;
                if combo[i] != i + n - k {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    continue 'combos;
                }
            }
        }
    }
    Ok(out)
}

/// Stability: `m` equals the least model of the reduct of `g` wrt `m`.
pub fn is_stable(g: &GroundProgram, w: &BTreeSet<Fact>, m: &BTreeSet<Fact>) -> bool {
    let reduct: Vec<GroundRule> = g
        .rules
        .iter()
        .filter(|r| r.neg.iter().all(|a| !m.contains(a)))
        .map(|r| GroundRule { head: r.head.clone(), pos: r.pos.clone(), neg: Vec::new() })
        .collect();
    &ground_least_model(&reduct, w) == m
}

// ---------------------------------------------------------------------
// non-ground evaluation

/// Assigns each rule a stratum so that negated dependencies strictly
/// descend. Errors when the program is not stratified.
fn stratify(view: &[Rule]) -> Result<Vec<Vec<&Rule>>, Error> {
    let report = check_acyclic(view);
    if report.class == ProgramClass::General {
        return Err(Error::Unsupported("program is not stratified".into()));
    }
    // level per predicate: max over pos deps, +1 over neg deps
    let mut level: BTreeMap<Arc<str>, usize> = BTreeMap::new();
    let mut levels_changed = true;
    let mut guard = 0;
    while levels_changed {
        levels_changed = false;
        guard += 1;
        if guard > view.len() * view.len() + 16 {
            return Err(Error::Unsupported("program is not stratified".into()));
        }
        for r in view {
            let mut lv = 0usize;
            for a in &r.body_pos {
                lv = lv.max(*level.get(&a.pred).unwrap_or(&0));
            }
            for a in &r.body_neg {
                lv = lv.max(*level.get(&a.pred).unwrap_or(&0) + 1);
            }
            let cur = level.get(&r.head.pred).copied().unwrap_or(0);
            if lv > cur {
                level.insert(Arc::clone(&r.head.pred), lv);
                levels_changed = true;
            }
        }
    }
    let max_level = level.values().copied().max().unwrap_or(0);
    let mut strata: Vec<Vec<&Rule>> = vec![Vec::new(); max_level + 1];
    for r in view {
        strata[level.get(&r.head.pred).copied().unwrap_or(0)].push(r);
    }
    Ok(strata)
}

/// Perfect model of a stratified program over the given base facts
/// (the unique answer set; the least model in the Horn case).
pub fn stratified_model(view: &[Rule], base: &BTreeSet<Fact>) -> Result<BTreeSet<Fact>, Error> {
    let strata = stratify(view)?;
    let mut model = base.clone();
    for stratum in strata {
        loop {
            let mut by_pred: BTreeMap<&str, Vec<&Fact>> = BTreeMap::new();
            for f in &model {
                by_pred.entry(f.pred()).or_default().push(f);
            }
            let mut fresh: Vec<Fact> = Vec::new();
            for rule in &stratum {
                apply_rule(rule, &by_pred, &model, &mut fresh);
            }
            let before = model.len();
            model.extend(fresh);
            if model.len() == before {
                break;
            }
        }
    }
    Ok(model)
}

fn apply_rule(
    rule: &Rule,
    by_pred: &BTreeMap<&str, Vec<&Fact>>,
    model: &BTreeSet<Fact>,
    out: &mut Vec<Fact>,
) {
    fn rec(
        rule: &Rule,
        k: usize,
        by_pred: &BTreeMap<&str, Vec<&Fact>>,
        model: &BTreeSet<Fact>,
        binding: &mut BTreeMap<Arc<str>, Constant>,
        out: &mut Vec<Fact>,
    ) {
        if k == rule.body_pos.len() {
            for neg in &rule.body_neg {
                if model.contains(&subst(neg, binding)) {
                    return;
                }
            }
            let head = subst(&rule.head, binding);
            if !model.contains(&head) {
                out.push(head);
            }
            return;
        }
        let atom = &rule.body_pos[k];
        let Some(facts) = by_pred.get(atom.pred.as_ref()) else { return };
        'facts: for f in facts {
            if f.arity() != atom.args.len() {
                continue;
            }
            let mut bound_here: Vec<Arc<str>> = Vec::new();
            for (t, c) in atom.args.iter().zip(f.args()) {
                match t {
                    Term::Const(tc) => {
                        if tc != c {
                            for v in bound_here.drain(..) {
                                binding.remove(&v);
                            }
                            continue 'facts;
                        }
                    }
                    Term::Var(v) => match binding.get(v) {
                        Some(bc) if bc != c => {
                            for v in bound_here.drain(..) {
                                binding.remove(&v);
                            }
                            continue 'facts;
                        }
                        Some(_) => {}
                        None => {
                            binding.insert(Arc::clone(v), c.clone());
                            bound_here.push(Arc::clone(v));
                        }
                    },
                }
            }
            rec(rule, k + 1, by_pred, model, binding, out);
            for v in bound_here {
                binding.remove(&v);
            }
        }
    }
    let mut binding = BTreeMap::new();
    rec(rule, 0, by_pred, model, &mut binding, out);
}

/// Rules whose heads can reach `target` in the dependency graph; grounding
/// and fixpoints for a single query only need this slice.
pub fn slice_for(view: &[Rule], target: &str) -> Vec<Rule> {
    let mut reach: BTreeSet<Arc<str>> = BTreeSet::new();
    reach.insert(Arc::from(target));
    loop {
        let before = reach.len();
        for r in view {
            if reach.contains(&r.head.pred) {
                for a in r.body_pos.iter().chain(r.body_neg.iter()) {
                    reach.insert(Arc::clone(&a.pred));
                }
            }
        }
        if reach.len() == before {
            break;
        }
    }
    view.iter().filter(|r| reach.contains(&r.head.pred)).cloned().collect()
}

/// Answer sets of `P u W` for one world, dispatching on program class.
pub fn answer_sets_for_world(
    view: &[Rule],
    w: &World,
    class: ProgramClass,
    cap: usize,
) -> Result<Vec<BTreeSet<Fact>>, Error> {
    match class {
        ProgramClass::Horn | ProgramClass::Stratified => {
            Ok(vec![stratified_model(view, &w.facts)?])
        }
        ProgramClass::General => {
            let mut consts: BTreeSet<Constant> = BTreeSet::new();
            for f in &w.facts {
                consts.extend(f.constants().cloned());
            }
            for r in view {
                for a in r.atoms() {
                    consts.extend(a.constants().cloned());
                }
            }
            let pool: Vec<Constant> = consts.into_iter().filter(Constant::is_definite).collect();
            let g = ground(view, &pool);
            answer_sets(&g, &w.facts, cap)
        }
    }
}

// ---------------------------------------------------------------------
// deductive database semantics

const STABLE_ATOM_CAP: usize = 22;
const EXTREMAL_WORLD_CAP: usize = 4096;

/// Prepared query context for one deductive database. Caches the world
/// space, the program class, the least model over forced atoms, and the
/// extremal world lists.
pub struct DdbContext {
    pub world_ctx: WorldContext,
    view: Vec<Rule>,
    class: ProgramClass,
    budget: DomainBudget,
    forced_lm: Option<BTreeSet<Fact>>,
    small_worlds: Option<Vec<World>>,
    minimal: Option<Vec<World>>,
    maximal: Option<Vec<World>>,
    consistent: Option<bool>,
}

impl DdbContext {
    pub fn new(
        db: &IndefiniteDatabase,
        ics: &[Constraint],
        view: &[Rule],
        extra: &BTreeSet<Constant>,
        budget: &DomainBudget,
    ) -> Result<Self, Error> {
        let mut extra = extra.clone();
        for r in view {
            for a in r.atoms() {
                extra.extend(a.constants().cloned());
            }
        }
        let world_ctx = prepare(db, ics, &extra, budget)?;
        let class = check_acyclic(view).class;
        Ok(DdbContext {
            world_ctx,
            view: view.to_vec(),
            class,
            budget: *budget,
            forced_lm: None,
            small_worlds: None,
            minimal: None,
            maximal: None,
            consistent: None,
        })
    }

    pub fn for_instance(inst: &Instance, budget: &DomainBudget) -> Result<Self, Error> {
        let mut extra = BTreeSet::new();
        if let Some(req) = &inst.request {
            for f in req.want_true.iter().chain(req.want_false.iter()) {
                extra.extend(f.constants().filter(|c| c.is_definite()).cloned());
            }
        }
        DdbContext::new(&inst.db, &inst.ics, &inst.view, &extra, budget)
    }

    fn small(&self) -> bool {
        self.world_ctx.space.choice_count() <= self.budget.universe_cap
    }

    fn worlds(&mut self) -> Result<&Vec<World>, Error> {
        if self.small_worlds.is_none() {
            self.small_worlds = Some(self.world_ctx.space.enumerate(self.budget.universe_cap)?);
        }
        Ok(self.small_worlds.as_ref().unwrap())
    }

    fn minimal_worlds(&mut self) -> Result<&Vec<World>, Error> {
        if self.minimal.is_none() {
            self.minimal = Some(self.world_ctx.space.minimal_worlds(EXTREMAL_WORLD_CAP)?);
        }
        Ok(self.minimal.as_ref().unwrap())
    }

    fn maximal_worlds(&mut self) -> Result<&Vec<World>, Error> {
        if self.maximal.is_none() {
            self.maximal = Some(self.world_ctx.space.maximal_worlds(EXTREMAL_WORLD_CAP)?);
        }
        Ok(self.maximal.as_ref().unwrap())
    }

    fn forced_lm(&mut self) -> Result<&BTreeSet<Fact>, Error> {
        if self.forced_lm.is_none() {
            let forced = self.world_ctx.space.forced.clone();
            self.forced_lm = Some(stratified_model(&self.view, &forced)?);
        }
        Ok(self.forced_lm.as_ref().unwrap())
    }

    /// Definition of consistency for deductive databases.
    pub fn consistent(&mut self) -> Result<bool, Error> {
        if let Some(c) = self.consistent {
            return Ok(c);
        }
        let c = match self.class {
            // a unique answer set always exists for each world
            ProgramClass::Horn | ProgramClass::Stratified => {
                self.world_ctx.space.some_world().is_some()
            }
            ProgramClass::General => {
                if self.world_ctx.space.some_world().is_none() {
                    false
                } else {
                    let view = self.view.clone();
                    let worlds = self.worlds()?.clone();
                    let mut ok = true;
                    for w in &worlds {
                        if answer_sets_for_world(&view, w, ProgramClass::General, STABLE_ATOM_CAP)?
                            .is_empty()
                        {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
            }
        };
        self.consistent = Some(c);
        Ok(c)
    }

    /// True in the deductive database: every answer set of every world
    /// models the fact. Callers must have checked consistency.
    pub fn is_true(&mut self, a: &Fact) -> Result<bool, Error> {
        if self.view.is_empty() || is_base_atom(&self.view, a) {
            return Ok(self.world_ctx.space.true_in_all(a));
        }
        // sufficient check: derivable from atoms present in every world
        if self.class != ProgramClass::General {
            let lm = self.forced_lm()?;
            if in_closure(lm, a, ClosureOp::Down) && self.class == ProgramClass::Horn {
                return Ok(true);
            }
        }
        if self.small() {
            let view = self.view.clone();
            let class = self.class;
            let worlds = self.worlds()?.clone();
            for w in &worlds {
                for m in answer_sets_for_world(&view, w, class, STABLE_ATOM_CAP)? {
                    if !in_closure(&m, a, ClosureOp::Down) {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        }
        if self.class != ProgramClass::Horn {
            return Err(Error::UniverseCapExceeded {
                size: self.world_ctx.space.choice_count(),
                cap: self.budget.universe_cap,
            });
        }
        let slice = slice_for(&self.view, a.pred());
        let minimal = self.minimal_worlds()?.clone();
        for w in &minimal {
            let lm = stratified_model(&slice, &w.facts)?;
            if !in_closure(&lm, a, ClosureOp::Down) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// False in the deductive database: no answer set of any world models
    /// the fact.
    pub fn is_false(&mut self, a: &Fact) -> Result<bool, Error> {
        if self.view.is_empty() || is_base_atom(&self.view, a) {
            return Ok(self.world_ctx.space.false_in_all(a));
        }
        if self.class == ProgramClass::Horn {
            let lm = self.forced_lm()?;
            if in_closure(lm, a, ClosureOp::Down) {
                return Ok(false);
            }
        }
        if self.small() {
            let view = self.view.clone();
            let class = self.class;
            let worlds = self.worlds()?.clone();
            for w in &worlds {
                for m in answer_sets_for_world(&view, w, class, STABLE_ATOM_CAP)? {
                    if in_closure(&m, a, ClosureOp::Down) {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        }
        if self.class != ProgramClass::Horn {
            return Err(Error::UniverseCapExceeded {
                size: self.world_ctx.space.choice_count(),
                cap: self.budget.universe_cap,
            });
        }
        let slice = slice_for(&self.view, a.pred());
        let maximal = self.maximal_worlds()?.clone();
        for w in &maximal {
            let lm = stratified_model(&slice, &w.facts)?;
            if in_closure(&lm, a, ClosureOp::Down) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn truth(&mut self, a: &Fact) -> Result<Truth, Error> {
        if !self.consistent()? {
            return Err(Error::InconsistentDeductive);
        }
        if self.is_true(a)? {
            Ok(Truth::True)
        } else if self.is_false(a)? {
            Ok(Truth::False)
        } else {
            Ok(Truth::Unknown)
        }
    }
}

/// An atom is base for truth purposes when no rule can derive its
/// predicate.
fn is_base_atom(view: &[Rule], a: &Fact) -> bool {
    view.iter().all(|r| r.head.pred.as_ref() != a.pred())
}

/// Consistency of the full deductive database.
pub fn ddb_consistent(inst: &Instance, budget: &DomainBudget) -> Result<bool, Error> {
    DdbContext::for_instance(inst, budget)?.consistent()
}

/// Truth value of a fact in the deductive database. Errors when the
/// database is inconsistent.
pub fn ddb_truth(inst: &Instance, a: &Fact, budget: &DomainBudget) -> Result<Truth, Error> {
    let mut ctx = DdbContext::for_instance(inst, budget)?;
    ctx.truth(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_instance;

    fn num(n: u64) -> Constant {
        Constant::Num(n)
    }

    #[test]
    fn grounding_counts() {
        let inst = parse_instance(
            "base q/2, r/3. derived p/1.
             view { p(X) :- q(X,Y), r(X,Y,Z). }",
        )
        .unwrap();
        let pool = [Constant::sym("a"), Constant::sym("b")];
        let g = ground(&inst.view, &pool);
        assert_eq!(g.rules.len(), 8);
        let single = parse_instance(
            "base p/1. derived q/1.
             view { q(X) :- p(X). }",
        )
        .unwrap();
        let g = ground(&single.view, &[num(1), num(3)]);
        assert_eq!(g.rules.len(), 2);
        assert!(ground(&[], &pool).rules.is_empty());
    }

    #[test]
    fn answer_sets_of_odd_loop() {
        // t :- p(1), p(2), not t  with w = {p(1),p(2)}: no answer sets
        let inst = parse_instance(
            "base p/1. derived t/0.
             view { t :- p(1), p(2), not t. }",
        )
        .unwrap();
        let g = ground(&inst.view, &[num(1), num(2)]);
        let w: BTreeSet<Fact> =
            [Fact::new("p", vec![num(1)]), Fact::new("p", vec![num(2)])].into_iter().collect();
        assert!(answer_sets(&g, &w, 22).unwrap().is_empty());
        // with w = {p(1)} the body never fires: unique empty-extension set
        let w2: BTreeSet<Fact> = [Fact::new("p", vec![num(1)])].into_iter().collect();
        let sets = answer_sets(&g, &w2, 22).unwrap();
        assert_eq!(sets, vec![w2.clone()]);
    }

    #[test]
    fn horn_fast_path_matches_brute_force() {
        let inst = parse_instance(
            "base p/1. derived q/1.
             view { q(X) :- p(X). }",
        )
        .unwrap();
        let g = ground(&inst.view, &[num(1)]);
        let w: BTreeSet<Fact> = [Fact::new("p", vec![num(1)])].into_iter().collect();
        let sets = answer_sets(&g, &w, 22).unwrap();
        let expect: BTreeSet<Fact> =
            [Fact::new("p", vec![num(1)]), Fact::new("q", vec![num(1)])].into_iter().collect();
        assert_eq!(sets, vec![expect]);
        // empty program returns the world itself
        let empty = GroundProgram::default();
        assert_eq!(answer_sets(&empty, &w, 22).unwrap(), vec![w]);
    }

    #[test]
    fn ddb_consistency_examples() {
        // Example: view {t :- p(1), p(2), not t} over <{p(null)},{}>
        let d = parse_instance(
            "base p/1. derived t/0.
             db { p(null). }
             view { t :- p(1), p(2), not t. }",
        )
        .unwrap();
        let budget = DomainBudget { fresh_symbols: 0, fresh_numerals: 2, universe_cap: 22 };
        assert!(!ddb_consistent(&d, &budget).unwrap());
        // adding the constraint p(1) and p(2) -> false restores consistency
        let d2 = parse_instance(
            "base p/1. derived t/0.
             db { p(null). }
             ic { : p(1), p(2) -> false. }
             view { t :- p(1), p(2), not t. }",
        )
        .unwrap();
        assert!(ddb_consistent(&d2, &budget).unwrap());
        // empty view degenerates to plain consistency
        let d3 = parse_instance("base p/1. derived . db { p(null). }").unwrap();
        assert!(ddb_consistent(&d3, &budget).unwrap());
    }

    #[test]
    fn ddb_truth_example5() {
        // Dom {null,1,2,3}: I=<{p(null)},{}>, eta={p(2)->false}, P={q(X):-p(X)}
        let inst = parse_instance(
            "base p/1. derived q/1.
             db { p(null). }
             ic { : p(2) -> false. }
             view { q(X) :- p(X). }",
        )
        .unwrap();
        // pool needs 1 and 3: 2 occurs in the constraint; add two fresh
        // numerals (gap below 2 gives 1, above gives 3)
        let budget = DomainBudget { fresh_symbols: 0, fresh_numerals: 2, universe_cap: 22 };
        let p = |n| Fact::new("p", vec![num(n)]);
        let q = |n| Fact::new("q", vec![num(n)]);
        let pn = Fact::new("p", vec![Constant::Null]);
        let qn = Fact::new("q", vec![Constant::Null]);
        assert_eq!(ddb_truth(&inst, &pn, &budget).unwrap(), Truth::True);
        assert_eq!(ddb_truth(&inst, &qn, &budget).unwrap(), Truth::True);
        assert_eq!(ddb_truth(&inst, &p(2), &budget).unwrap(), Truth::False);
        assert_eq!(ddb_truth(&inst, &q(2), &budget).unwrap(), Truth::False);
        assert_eq!(ddb_truth(&inst, &p(1), &budget).unwrap(), Truth::Unknown);
        assert_eq!(ddb_truth(&inst, &q(1), &budget).unwrap(), Truth::Unknown);
        assert_eq!(ddb_truth(&inst, &p(3), &budget).unwrap(), Truth::Unknown);
        assert_eq!(ddb_truth(&inst, &q(3), &budget).unwrap(), Truth::Unknown);
    }

    #[test]
    fn stratified_negation_model() {
        let inst = parse_instance(
            "base p/1, r/1. derived s/1.
             view { s(X) :- p(X), not r(X). }",
        )
        .unwrap();
        let base: BTreeSet<Fact> = [
            Fact::new("p", vec![num(1)]),
            Fact::new("p", vec![num(2)]),
            Fact::new("r", vec![num(2)]),
        ]
        .into_iter()
        .collect();
        let m = stratified_model(&inst.view, &base).unwrap();
        assert!(m.contains(&Fact::new("s", vec![num(1)])));
        assert!(!m.contains(&Fact::new("s", vec![num(2)])));
    }
}
