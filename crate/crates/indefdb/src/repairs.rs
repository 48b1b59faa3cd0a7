//! Repair search and classification: weak repairs, relevant weak repairs,
//! change-minimal repairs, and constrained repairs.
//!
//! The searched update space ranges over the stored set `D` (inserting
//! absent facts, deleting present ones) built from the relevant constants,
//! optionally extended with budgeted fresh constants for the weak classes.
//! Exception-set actions remain first-class in the update API and in
//! fulfillment checks, but are not enumerated: an exception insertion can
//! only sharpen an indefinite insertion made by the same update, and
//! admitting such variants floods every example with exception-padded
//! repairs the change order cannot separate.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::Error;
use crate::facts::{Constant, Fact, Truth};
use crate::syntax::{Instance, Rule, Term};
use crate::updates::{
    apply_to_instance, comparison_atoms, fulfills, leq_update, new_constants, Update,
    UpdateAction, UpdateSign, UpdateTarget,
};
use crate::views::DdbContext;
use crate::worlds::{build_pool, DomainBudget};

/// The six repair classes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RepairClass {
    Weak,
    RelevantWeak,
    Repair,
    RelevantRepair,
    ConstrainedWeak,
    ConstrainedRepair,
}

impl RepairClass {
    pub fn relevant_only(self) -> bool {
        !matches!(self, RepairClass::Weak | RepairClass::Repair)
    }

    pub fn constrained(self) -> bool {
        matches!(self, RepairClass::ConstrainedWeak | RepairClass::ConstrainedRepair)
    }

    pub fn minimal(self) -> bool {
        matches!(
            self,
            RepairClass::Repair | RepairClass::RelevantRepair | RepairClass::ConstrainedRepair
        )
    }

    pub fn parse(s: &str) -> Option<RepairClass> {
        match s {
            "weak" => Some(RepairClass::Weak),
            "relevant-weak" => Some(RepairClass::RelevantWeak),
            "repair" => Some(RepairClass::Repair),
            "relevant" => Some(RepairClass::RelevantRepair),
            "constrained-weak" => Some(RepairClass::ConstrainedWeak),
            "constrained" => Some(RepairClass::ConstrainedRepair),
            _ => None,
        }
    }
}

impl fmt::Display for RepairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RepairClass::Weak => "weak",
            RepairClass::RelevantWeak => "relevant-weak",
            RepairClass::Repair => "repair",
            RepairClass::RelevantRepair => "relevant",
            RepairClass::ConstrainedWeak => "constrained-weak",
            RepairClass::ConstrainedRepair => "constrained",
        };
        write!(f, "{s}")
    }
}

/// Bounds for the repair search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_update_size: usize,
    pub domain: DomainBudget,
    pub max_results: usize,
    pub deadline: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_update_size: 2,
            domain: DomainBudget::default(),
            max_results: 64,
            deadline: None,
        }
    }
}

/// Whether a search exhausted its space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SearchStatus {
    Complete,
    BudgetExhausted(String),
}

impl SearchStatus {
    pub fn is_complete(&self) -> bool {
        matches!(self, SearchStatus::Complete)
    }
}

/// One found repair with its certification flag (`None` for classes
/// without a minimality requirement).
#[derive(Clone, Debug)]
pub struct FoundRepair {
    pub update: Update,
    pub certified_minimal: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub repairs: Vec<FoundRepair>,
    pub status: SearchStatus,
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
}

impl Clock {
    fn new(limit: Option<Duration>) -> Self {
        Clock { start: Instant::now(), limit }
    }

    fn expired(&self) -> bool {
        match self.limit {
            Some(d) => self.start.elapsed() > d,
            None => false,
        }
    }
}

/// Predicates occurring in the deductive database or the request.
fn relevant_preds(inst: &Instance) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in inst.db.d_set().iter().chain(inst.db.e_set().iter()) {
        out.insert(f.pred().to_string());
    }
    for ic in &inst.ics {
        for atom in ic.atoms() {
            if let crate::syntax::CAtom::Pred(a) = atom {
                out.insert(a.pred.to_string());
            }
        }
    }
    for r in &inst.view {
        for a in r.atoms() {
            out.insert(a.pred.to_string());
        }
    }
    if let Some(req) = &inst.request {
        for f in req.want_true.iter().chain(req.want_false.iter()) {
            out.insert(f.pred().to_string());
        }
    }
    out
}

/// Relevance: every constant of the update occurs in the instance or is
/// null, and every predicate occurs in the instance or the request.
pub fn is_relevant(inst: &Instance, u: &Update) -> bool {
    let consts = inst.constants();
    let preds = relevant_preds(inst);
    u.constants().iter().all(|c| consts.contains(c))
        && u.predicates().iter().all(|p| preds.contains(p))
}

/// Stored-set candidate actions, canonical (insert absent, delete present),
/// in deterministic order.
fn candidate_actions(inst: &Instance, pool: &[Constant]) -> Vec<UpdateAction> {
    let mut with_null: Vec<Constant> = pool.to_vec();
    with_null.push(Constant::Null);
    with_null.sort();
    let mut out = Vec::new();
    for (pred, arity) in inst.schema.base_preds() {
        let pattern =
            Fact::from_parts(std::sync::Arc::clone(pred), vec![Constant::Null; arity]);
        let facts = if arity == 0 {
            vec![pattern]
        } else {
            pattern.definite_instances(&with_null)
        };
        for f in facts {
            if inst.db.d_set().contains(&f) {
                out.push(UpdateAction::delete_d(f));
            } else {
                out.push(UpdateAction::insert_d(f));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Iterative-deepening enumeration of canonical updates that fulfill the
/// request, by size then lexicographic order; exhaustive within budget.
pub fn find_weak_repairs(
    inst: &Instance,
    budget: &SearchBudget,
    relevant_classes: bool,
) -> Result<SearchOutcome, Error> {
    if inst.request.is_none() {
        return Err(Error::NoRequest);
    }
    let consts = inst.constants();
    let pool = if relevant_classes {
        consts.iter().cloned().collect::<Vec<_>>()
    } else {
        build_pool(&consts, &budget.domain)
    };
    let actions = candidate_actions(inst, &pool);
    let clock = Clock::new(budget.deadline);
    let mut repairs = Vec::new();
    let mut status = SearchStatus::Complete;
    let mut tick = 0usize;

    'outer: for size in 0..=budget.max_update_size {
        if size > actions.len() {
            break;
        }
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            tick += 1;
            if tick % 64 == 0 && clock.expired() {
                status = SearchStatus::BudgetExhausted("deadline".into());
                break 'outer;
            }
            let update = Update::from_actions(combo.iter().map(|&i| actions[i].clone()))
                .expect("canonical actions cannot contradict");
            if fulfills(inst, &update, &budget.domain)? {
                repairs.push(update);
                if repairs.len() >= budget.max_results {
                    status = SearchStatus::BudgetExhausted("max-results".into());
                    break 'outer;
                }
            }
            if size == 0 {
                break;
            }
            // next lexicographic combination
            let n = actions.len();
            let mut i = size;
            let mut done = true;
            while i > 0 {
                i -= 1;
                if combo[i] != i + n - size {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    Ok(SearchOutcome {
        repairs: repairs
            .into_iter()
            .map(|u| FoundRepair { update: u, certified_minimal: None })
            .collect(),
        status,
    })
}

/// Replacement constants for the constrained check: relevant constants,
/// null, gap representatives for every numeral gap, and one fresh symbol.
fn replacement_pool(inst: &Instance, u: &Update) -> Vec<Constant> {
    let mut consts = inst.constants();
    consts.extend(u.constants());
    let numerals = consts.iter().filter(|c| matches!(c, Constant::Num(_))).count();
    let has_symbols =
        consts.iter().any(|c| matches!(c, Constant::Sym(_))) || consts.is_empty();
    let mut pool = build_pool(
        &consts,
        &DomainBudget {
            fresh_symbols: usize::from(has_symbols),
            fresh_numerals: numerals + 1,
            universe_cap: 0,
        },
    );
    pool.push(Constant::Null);
    pool.sort();
    pool
}

/// Occurrences of a constant across the update's actions, in canonical
/// order: (action index in sorted order, argument position).
fn occurrences(u: &Update, c: &Constant) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (ai, action) in u.actions().iter().enumerate() {
        for (pi, arg) in action.fact.args().iter().enumerate() {
            if arg == c {
                out.push((ai, pi));
            }
        }
    }
    out
}

fn rewrite(u: &Update, occs: &[(usize, usize)], mask: u32, with: &Constant) -> Option<Update> {
    let actions: Vec<UpdateAction> = u.actions().iter().cloned().collect();
    let mut rewritten: Vec<UpdateAction> = actions.clone();
    for (k, &(ai, pi)) in occs.iter().enumerate() {
        if mask & (1 << k) != 0 {
            let mut args = rewritten[ai].fact.args().to_vec();
            args[pi] = with.clone();
            rewritten[ai] = UpdateAction {
                fact: Fact::new(rewritten[ai].fact.pred(), args),
                target: rewritten[ai].target,
                sign: rewritten[ai].sign,
            };
        }
    }
    Update::from_actions(rewritten).ok()
}

/// Constrainedness: no nonempty subset of occurrences of any non-null
/// constant can be replaced by a single different constant (null allowed)
/// so that the rewritten update is still a weak repair.
pub fn is_constrained(
    inst: &Instance,
    u: &Update,
    budget: &SearchBudget,
) -> Result<bool, Error> {
    let clock = Clock::new(budget.deadline);
    let pool = replacement_pool(inst, u);
    for c in u.constants() {
        let occs = occurrences(u, &c);
        if occs.is_empty() {
            continue;
        }
        if occs.len() > 20 {
            return Err(Error::BudgetExhausted(format!(
                "{} occurrences of {c} in the update",
                occs.len()
            )));
        }
        for mask in 1..(1u32 << occs.len()) {
            if clock.expired() {
                return Err(Error::BudgetExhausted("deadline".into()));
            }
            for b in &pool {
                if *b == c {
                    continue;
                }
                if let Some(candidate) = rewrite(u, &occs, mask, b) {
                    if fulfills(inst, &candidate, &budget.domain)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Comparator actions for certifying minimality of `u`: canonical
/// stored-set actions over the relevant constants plus `NC(u)` plus null,
/// pre-filtered by the directions the change order allows.
fn comparator_actions(
    inst: &Instance,
    u: &Update,
    base_truth: &dyn Fn(&Fact) -> Truth,
    u_truth: &dyn Fn(&Fact) -> Truth,
) -> Vec<UpdateAction> {
    let mut consts = inst.constants();
    consts.extend(new_constants(inst, u));
    let pool: Vec<Constant> = consts.into_iter().collect();
    let mut out = Vec::new();
    for a in candidate_actions(inst, &pool) {
        match (a.sign, a.target) {
            (UpdateSign::Insert, UpdateTarget::DSet) => {
                // inserting f makes it true in the candidate; the order
                // then demands u also has it true unless it started true
                let f = &a.fact;
                if base_truth(f) == Truth::True || u_truth(f) == Truth::True {
                    out.push(a);
                }
            }
            _ => out.push(a),
        }
    }
    out
}

/// Searches for a strictly smaller member of the same class. Returns
/// `Ok(None)` when `u` is minimal within the certified space.
fn smaller_in_class(
    inst: &Instance,
    u: &Update,
    class: RepairClass,
    budget: &SearchBudget,
    clock: &Clock,
) -> Result<Option<Update>, Error> {
    // truth tables of the original and updated databases over the
    // comparison atoms, reused for the direction filter
    let atoms = comparison_atoms(inst, u, u);
    let mut extra: BTreeSet<Constant> = u.constants();
    extra.extend(inst.constants());
    let mut base_ctx =
        DdbContext::new(&inst.db, &inst.ics, &inst.view, &extra, &budget.domain)?;
    let base_consistent = base_ctx.consistent()?;
    let updated = apply_to_instance(inst, u);
    let mut u_ctx =
        DdbContext::new(&updated.db, &updated.ics, &updated.view, &extra, &budget.domain)?;
    let u_consistent = u_ctx.consistent()?;
    let mut base_map = std::collections::BTreeMap::new();
    let mut u_map = std::collections::BTreeMap::new();
    for a in &atoms {
        let bt = if base_consistent { base_ctx.truth(a)? } else { Truth::Unknown };
        let ut = if u_consistent { u_ctx.truth(a)? } else { Truth::Unknown };
        base_map.insert(a.clone(), bt);
        u_map.insert(a.clone(), ut);
    }
    let base_truth = |f: &Fact| base_map.get(f).copied().unwrap_or(Truth::False);
    let u_truth = |f: &Fact| u_map.get(f).copied().unwrap_or(Truth::False);
    let actions = comparator_actions(inst, u, &base_truth, &u_truth);

    for size in 0..=budget.max_update_size {
        if size > actions.len() {
            break;
        }
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if clock.expired() {
                return Err(Error::BudgetExhausted("deadline".into()));
            }
            let v = Update::from_actions(combo.iter().map(|&i| actions[i].clone()))
                .expect("canonical actions cannot contradict");
            if v != *u && in_class(inst, &v, class, budget)? {
                if crate::updates::lt_update(inst, &v, u, &budget.domain)? {
                    return Ok(Some(v));
                }
            }
            if size == 0 {
                break;
            }
            let n = actions.len();
            let mut i = size;
            let mut done = true;
            while i > 0 {
                i -= 1;
                if combo[i] != i + n - size {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    Ok(None)
}

/// Membership of an update in the non-minimal part of a class.
fn in_class(
    inst: &Instance,
    u: &Update,
    class: RepairClass,
    budget: &SearchBudget,
) -> Result<bool, Error> {
    if !fulfills(inst, u, &budget.domain)? {
        return Ok(false);
    }
    if class.relevant_only() && !is_relevant(inst, u) {
        return Ok(false);
    }
    if class.constrained() && !is_constrained(inst, u, budget)? {
        return Ok(false);
    }
    Ok(true)
}

/// Full per-class search: enumerate weak repairs, filter by relevance and
/// constrainedness, then certify minimality against the comparator space.
pub fn find_repairs(
    inst: &Instance,
    class: RepairClass,
    budget: &SearchBudget,
) -> Result<SearchOutcome, Error> {
    let clock = Clock::new(budget.deadline);
    let stream = find_weak_repairs(inst, budget, class.relevant_only())?;
    let mut out = Vec::new();
    let mut status = stream.status.clone();
    for found in stream.repairs {
        let u = found.update;
        if class.relevant_only() && !is_relevant(inst, &u) {
            continue;
        }
        if class.constrained() && !is_constrained(inst, &u, budget)? {
            continue;
        }
        if class.minimal() {
            if clock.expired() {
                status = SearchStatus::BudgetExhausted("deadline".into());
                break;
            }
            match smaller_in_class(inst, &u, class, budget, &clock) {
                Ok(Some(_)) => continue,
                Ok(None) => {
                    out.push(FoundRepair { update: u, certified_minimal: Some(true) });
                }
                Err(Error::BudgetExhausted(_)) => {
                    out.push(FoundRepair { update: u, certified_minimal: Some(false) });
                    status = SearchStatus::BudgetExhausted("minimality certification".into());
                }
                Err(e) => return Err(e),
            }
        } else {
            out.push(FoundRepair { update: u, certified_minimal: None });
        }
    }
    Ok(SearchOutcome { repairs: out, status })
}

// ---------------------------------------------------------------------
// goal-directed existence search

const EXISTS_CANDIDATE_CAP: usize = 50_000;
const CHOICES_PER_GOAL_CAP: usize = 512;
const DERIVE_DEPTH_CAP: usize = 8;

/// Existence-oriented search for a repair of the class. Returns a witness
/// update if one is found; `complete` reports whether the candidate space
/// was exhausted within budget. The space is goal-directed: per-request
/// insertion patterns chained backward through the (acyclic, negation-free
/// slices of the) view, with deletion and no-edit alternatives, verified by
/// a full fulfillment check.
pub fn exists_repair(
    inst: &Instance,
    class: RepairClass,
    budget: &SearchBudget,
) -> Result<(Option<Update>, SearchStatus), Error> {
    let request = inst.request.as_ref().ok_or(Error::NoRequest)?;
    let clock = Clock::new(budget.deadline);
    // the empty update first
    if fulfills(inst, &Update::empty(), &budget.domain)? {
        return Ok((Some(Update::empty()), SearchStatus::Complete));
    }
    let consts = inst.constants();
    let subst_pool: Vec<Constant> = if class.relevant_only() {
        consts.iter().cloned().collect()
    } else {
        build_pool(&consts, &budget.domain)
    };

    let mut goals: Vec<Fact> = request.want_true.iter().cloned().collect();
    goals.sort_by_key(|g| (goal_rank(inst, g), g.clone()));
    let falsity_goals: Vec<Fact> = request.want_false.iter().cloned().collect();

    let mut searcher = Searcher {
        inst,
        budget,
        clock: &clock,
        subst_pool,
        candidates_tried: 0,
        exhausted_space: true,
    };
    let result = searcher.dfs(&goals, &falsity_goals, 0, &mut BTreeSet::new())?;
    let status = if searcher.exhausted_space {
        SearchStatus::Complete
    } else {
        SearchStatus::BudgetExhausted("existence search space truncated".into())
    };
    match result {
        Some(u) => {
            // by the existence proposition, a minimal member of the class
            // exists whenever any member does; the witness itself is a
            // member of the non-minimal part, which is what existence needs
            if class.relevant_only() && !is_relevant(inst, &u) {
                return Ok((None, status));
            }
            Ok((Some(u), status))
        }
        None => Ok((None, status)),
    }
}

/// Cheaply-true goals first, then base goals, then derived goals by
/// arity (specific before propositional).
fn goal_rank(inst: &Instance, g: &Fact) -> u8 {
    let derived = inst.view.iter().any(|r| r.head.pred.as_ref() == g.pred());
    if !derived {
        if crate::facts::in_closure(inst.db.d_set(), g, crate::facts::ClosureOp::Down) {
            0
        } else {
            1
        }
    } else {
        2
    }
}

struct Searcher<'a> {
    inst: &'a Instance,
    budget: &'a SearchBudget,
    clock: &'a Clock,
    subst_pool: Vec<Constant>,
    candidates_tried: usize,
    exhausted_space: bool,
}

impl<'a> Searcher<'a> {
    fn dfs(
        &mut self,
        goals: &[Fact],
        falsity_goals: &[Fact],
        k: usize,
        committed: &mut BTreeSet<UpdateAction>,
    ) -> Result<Option<Update>, Error> {
        if self.clock.expired() {
            self.exhausted_space = false;
            return Ok(None);
        }
        if k == goals.len() {
            return self.finish(falsity_goals, committed);
        }
        let goal = &goals[k];
        let choices = self.support_choices(goal, committed)?;
        for choice in choices {
            let added: Vec<UpdateAction> =
                choice.into_iter().filter(|a| !committed.contains(a)).collect();
            for a in &added {
                committed.insert(a.clone());
            }
            let r = self.dfs(goals, falsity_goals, k + 1, committed)?;
            for a in &added {
                committed.remove(a);
            }
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    /// Terminal: attach falsity-goal suppression choices, then verify.
    fn finish(
        &mut self,
        falsity_goals: &[Fact],
        committed: &mut BTreeSet<UpdateAction>,
    ) -> Result<Option<Update>, Error> {
        if falsity_goals.is_empty() {
            return self.verify(committed);
        }
        // one layer of suppression alternatives per falsity goal
        let mut alts: Vec<Vec<BTreeSet<UpdateAction>>> = Vec::new();
        for g in falsity_goals {
            let mut options: Vec<BTreeSet<UpdateAction>> = vec![BTreeSet::new()];
            for d in self.inst.db.d_set() {
                if d.pred() == g.pred() && d.compatible(g) {
                    options.push([UpdateAction::delete_d(d.clone())].into_iter().collect());
                }
            }
            alts.push(options);
        }
        fn rec(
            s: &mut Searcher,
            alts: &[Vec<BTreeSet<UpdateAction>>],
            k: usize,
            committed: &mut BTreeSet<UpdateAction>,
        ) -> Result<Option<Update>, Error> {
            if k == alts.len() {
                return s.verify(committed);
            }
            for choice in &alts[k] {
                let added: Vec<UpdateAction> =
                    choice.iter().filter(|a| !committed.contains(*a)).cloned().collect();
                for a in &added {
                    committed.insert(a.clone());
                }
                let r = rec(s, alts, k + 1, committed)?;
                for a in &added {
                    committed.remove(a);
                }
                if r.is_some() {
                    return Ok(r);
                }
            }
            Ok(None)
        }
        rec(self, &alts, 0, committed)
    }

    fn verify(&mut self, committed: &BTreeSet<UpdateAction>) -> Result<Option<Update>, Error> {
        self.candidates_tried += 1;
        if self.candidates_tried > EXISTS_CANDIDATE_CAP {
            self.exhausted_space = false;
            return Ok(None);
        }
        if self.clock.expired() {
            self.exhausted_space = false;
            return Ok(None);
        }
        let u = match Update::new(committed.clone()) {
            Ok(u) => u,
            Err(_) => return Ok(None),
        };
        if fulfills(self.inst, &u, &self.budget.domain)? {
            Ok(Some(u))
        } else {
            Ok(None)
        }
    }

    /// Insertion patterns that can make a goal true in every world,
    /// ordered no-edit first.
    fn support_choices(
        &mut self,
        goal: &Fact,
        committed: &BTreeSet<UpdateAction>,
    ) -> Result<Vec<BTreeSet<UpdateAction>>, Error> {
        let mut out: Vec<BTreeSet<UpdateAction>> = Vec::new();
        let derived = self.inst.view.iter().any(|r| r.head.pred.as_ref() == goal.pred());
        if !derived {
            if self.base_supported(goal, committed) {
                out.push(BTreeSet::new());
            } else {
                out.push([UpdateAction::insert_d(goal.clone())].into_iter().collect());
                // definite instances commit harder but join better
                if !goal.is_definite() {
                    for inst_fact in goal.definite_instances(&self.subst_pool) {
                        out.push([UpdateAction::insert_d(inst_fact)].into_iter().collect());
                        if out.len() >= CHOICES_PER_GOAL_CAP {
                            self.exhausted_space = false;
                            break;
                        }
                    }
                }
            }
            return Ok(dedup_choices(out));
        }
        // derived goal: no-edit first (other goals may provide support)
        out.push(BTreeSet::new());
        let mut supports = Vec::new();
        self.derived_supports(goal, committed, 0, &mut supports)?;
        out.extend(supports);
        Ok(dedup_choices(out))
    }

    /// A base goal already holds in every world when its cone is present in
    /// the stored set after the committed insertions.
    fn base_supported(&self, goal: &Fact, committed: &BTreeSet<UpdateAction>) -> bool {
        if crate::facts::in_closure(
            self.inst.db.d_set(),
            goal,
            crate::facts::ClosureOp::Down,
        ) {
            return true;
        }
        committed.iter().any(|a| {
            a.sign == UpdateSign::Insert
                && a.target == UpdateTarget::DSet
                && goal.leq_info(&a.fact)
        })
    }

    /// Backward chaining through negation-free rules: sets of insertions
    /// that suffice for the goal.
    fn derived_supports(
        &mut self,
        goal: &Fact,
        committed: &BTreeSet<UpdateAction>,
        depth: usize,
        out: &mut Vec<BTreeSet<UpdateAction>>,
    ) -> Result<(), Error> {
        if depth > DERIVE_DEPTH_CAP {
            self.exhausted_space = false;
            return Ok(());
        }
        let rules: Vec<Rule> = self
            .inst
            .view
            .iter()
            .filter(|r| r.head.pred.as_ref() == goal.pred())
            .cloned()
            .collect();
        for rule in rules {
            if !rule.body_neg.is_empty() {
                // negation is left to verification-only candidates
                self.exhausted_space = false;
                continue;
            }
            // unify head with goal; null goal args leave head vars free
            let mut binding: std::collections::BTreeMap<std::sync::Arc<str>, Constant> =
                std::collections::BTreeMap::new();
            let mut matched = true;
            for (t, c) in rule.head.args.iter().zip(goal.args()) {
                match t {
                    Term::Const(tc) => {
                        if tc != c && !c.is_null() {
                            matched = false;
                            break;
                        }
                    }
                    Term::Var(v) => {
                        if c.is_definite() {
                            if let Some(prev) = binding.get(v) {
                                if prev != c {
                                    matched = false;
                                    break;
                                }
                            } else {
                                binding.insert(std::sync::Arc::clone(v), c.clone());
                            }
                        }
                    }
                }
            }
            if !matched {
                continue;
            }
            // count variable uses across the rule to find projection vars
            let mut var_uses: std::collections::BTreeMap<&std::sync::Arc<str>, usize> =
                std::collections::BTreeMap::new();
            for a in rule.body_pos.iter() {
                for v in a.vars() {
                    *var_uses.entry(v).or_default() += 1;
                }
            }
            for v in rule.head.vars() {
                *var_uses.entry(v).or_default() += 1;
            }
            let mut partials: Vec<(
                std::collections::BTreeMap<std::sync::Arc<str>, Constant>,
                BTreeSet<UpdateAction>,
            )> = vec![(binding, BTreeSet::new())];
            for atom in &rule.body_pos {
                let mut next = Vec::new();
                for (b, acts) in &partials {
                    let options =
                        self.body_atom_options(atom, b, &var_uses, committed, depth)?;
                    for (nb, nacts) in options {
                        let mut merged = acts.clone();
                        merged.extend(nacts);
                        next.push((nb, merged));
                        if next.len() > CHOICES_PER_GOAL_CAP {
                            self.exhausted_space = false;
                            break;
                        }
                    }
                }
                partials = next;
                if partials.is_empty() {
                    break;
                }
            }
            for (_, acts) in partials {
                out.push(acts);
            }
        }
        Ok(())
    }

    /// Support options for one positive body atom under a partial binding:
    /// match against present or committed facts, or insert a pattern with
    /// free variables instantiated from null (projection positions only)
    /// and the substitution pool.
    #[allow(clippy::type_complexity)]
    fn body_atom_options(
        &mut self,
        atom: &crate::syntax::Atom,
        binding: &std::collections::BTreeMap<std::sync::Arc<str>, Constant>,
        var_uses: &std::collections::BTreeMap<&std::sync::Arc<str>, usize>,
        committed: &BTreeSet<UpdateAction>,
        depth: usize,
    ) -> Result<
        Vec<(
            std::collections::BTreeMap<std::sync::Arc<str>, Constant>,
            BTreeSet<UpdateAction>,
        )>,
        Error,
    > {
        let mut out = Vec::new();
        let derived = self.inst.view.iter().any(|r| r.head.pred == atom.pred);
        // (i) match against facts present in D or committed inserts
        let mut present: Vec<Fact> = Vec::new();
        if !derived {
            for f in self.inst.db.d_set() {
                if f.pred() == atom.pred.as_ref() {
                    present.push(f.clone());
                }
            }
            for a in committed {
                if a.sign == UpdateSign::Insert
                    && a.target == UpdateTarget::DSet
                    && a.fact.pred() == atom.pred.as_ref()
                {
                    present.push(a.fact.clone());
                }
            }
        }
        'facts: for f in &present {
            if f.arity() != atom.args.len() {
                continue;
            }
            let mut nb = binding.clone();
            for (t, c) in atom.args.iter().zip(f.args()) {
                match t {
                    Term::Const(tc) => {
                        if tc != c {
                            continue 'facts;
                        }
                    }
                    Term::Var(v) => {
                        let uses = var_uses.get(v).copied().unwrap_or(0);
                        if c.is_null() {
                            // a null argument only supports a projection
                            // position: the witness varies per world
                            if uses > 1 || nb.contains_key(v) {
                                continue 'facts;
                            }
                        } else {
                            match nb.get(v) {
                                Some(prev) if prev != c => continue 'facts,
                                Some(_) => {}
                                None => {
                                    nb.insert(std::sync::Arc::clone(v), c.clone());
                                }
                            }
                        }
                    }
                }
            }
            out.push((nb, BTreeSet::new()));
        }
        // (ii) insert a pattern (base atoms) or chain through rules
        let free_vars: Vec<&std::sync::Arc<str>> = {
            let mut seen = BTreeSet::new();
            atom.vars()
                .filter(|v| !binding.contains_key(*v) && seen.insert(std::sync::Arc::clone(v)))
                .collect()
        };
        let mut ranges: Vec<Vec<Constant>> = Vec::new();
        for v in &free_vars {
            let uses = var_uses.get(*v).copied().unwrap_or(0);
            let mut range = Vec::new();
            if uses <= 1 {
                range.push(Constant::Null);
            }
            range.extend(self.subst_pool.iter().cloned());
            ranges.push(range);
        }
        let mut idx = vec![0usize; free_vars.len()];
        loop {
            let mut nb = binding.clone();
            for (i, v) in free_vars.iter().enumerate() {
                let c = ranges[i][idx[i]].clone();
                if c.is_definite() {
                    nb.insert(std::sync::Arc::clone(v), c);
                }
            }
            // build the ground/padded fact for this atom
            let mut args = Vec::with_capacity(atom.args.len());
            let mut ok = true;
            for t in &atom.args {
                match t {
                    Term::Const(c) => args.push(c.clone()),
                    Term::Var(v) => match nb.get(v) {
                        Some(c) => args.push(c.clone()),
                        None => args.push(Constant::Null),
                    },
                }
            }
            if derived {
                let sub = Fact::new(atom.pred.as_ref(), args);
                let mut supports = Vec::new();
                self.derived_supports(&sub, committed, depth + 1, &mut supports)?;
                for s in supports {
                    out.push((nb.clone(), s));
                    if out.len() > CHOICES_PER_GOAL_CAP {
                        self.exhausted_space = false;
                        ok = false;
                        break;
                    }
                }
            } else {
                let fact = Fact::new(atom.pred.as_ref(), args);
                let action = UpdateAction::insert_d(fact);
                out.push((nb, [action].into_iter().collect()));
            }
            if out.len() > CHOICES_PER_GOAL_CAP || !ok {
                self.exhausted_space = false;
                break;
            }
            if free_vars.is_empty() {
                break;
            }
            let mut j = 0;
            loop {
                idx[j] += 1;
                if idx[j] < ranges[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == free_vars.len() {
                    return Ok(out);
                }
            }
        }
        Ok(out)
    }
}

fn dedup_choices(choices: Vec<BTreeSet<UpdateAction>>) -> Vec<BTreeSet<UpdateAction>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in choices {
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

// re-exported for tests and the acceptance suite
pub use crate::updates::lt_update as strictly_less;

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

    fn budget() -> SearchBudget {
        SearchBudget {
            max_update_size: 2,
            domain: DomainBudget { fresh_symbols: 1, fresh_numerals: 0, universe_cap: 22 },
            max_results: 512,
            deadline: None,
        }
    }

    #[test]
    fn weak_repairs_of_example1() {
        let inst = example1();
        let found = find_weak_repairs(&inst, &budget(), false).unwrap();
        assert!(found.status.is_complete());
        let repairs: Vec<String> =
            found.repairs.iter().map(|r| r.update.to_string()).collect();
        assert!(repairs.contains(&"{+r(a,b,null)@d}".to_string()));
        assert!(repairs.contains(&"{+r(a,b,a)@d}".to_string()));
        // fresh-constant repair of shape {+q(a,f)@d, +r(a,f,f)@d}
        assert!(repairs.contains(&"{+q(a,_f1)@d, +r(a,_f1,_f1)@d}".to_string()));
    }

    #[test]
    fn constrained_repair_of_example1_is_unique() {
        let inst = example1();
        let found = find_repairs(&inst, RepairClass::ConstrainedRepair, &budget()).unwrap();
        assert!(found.status.is_complete());
        let repairs: Vec<String> =
            found.repairs.iter().map(|r| r.update.to_string()).collect();
        assert_eq!(repairs, vec!["{+r(a,b,null)@d}".to_string()]);
        assert_eq!(found.repairs[0].certified_minimal, Some(true));
    }

    #[test]
    fn relevance_examples() {
        // I = <{p(1),h(2)},{}>, request {s,t}
        let inst = parse_instance(
            "base p/1, q/1, r/1, h/1. derived t/0, s/0.
             db { p(1). h(2). }
             view { t :- p(X), q(X). s :- r(X). }
             request { true: t, s; }",
        )
        .unwrap();
        let r_null = Update::from_actions([
            UpdateAction::insert_d(Fact::new("q", vec![Constant::Num(1)])),
            UpdateAction::insert_d(Fact::new("r", vec![Constant::Null])),
        ])
        .unwrap();
        assert!(is_relevant(&inst, &r_null));
        let r_3 = Update::from_actions([
            UpdateAction::insert_d(Fact::new("q", vec![Constant::Num(1)])),
            UpdateAction::insert_d(Fact::new("r", vec![Constant::Num(3)])),
        ])
        .unwrap();
        assert!(!is_relevant(&inst, &r_3));
        assert!(is_relevant(&inst, &Update::empty()));
    }

    #[test]
    fn constrained_classification_of_example7() {
        let inst = parse_instance(
            "base p/1, q/1, r/1, h/1. derived t/0, s/0.
             db { p(1). h(2). }
             view { t :- p(X), q(X). s :- r(X). }
             request { true: t, s; }",
        )
        .unwrap();
        let b = SearchBudget {
            max_update_size: 2,
            domain: DomainBudget { fresh_symbols: 0, fresh_numerals: 1, universe_cap: 22 },
            max_results: 512,
            deadline: None,
        };
        let mk = |r_arg: Constant| {
            Update::from_actions([
                UpdateAction::insert_d(Fact::new("q", vec![Constant::Num(1)])),
                UpdateAction::insert_d(Fact::new("r", vec![r_arg])),
            ])
            .unwrap()
        };
        // R_null is constrained
        assert!(is_constrained(&inst, &mk(Constant::Null), &b).unwrap());
        // R_1: replacing the occurrence of 1 in r(1) with 3 stays a weak repair
        assert!(!is_constrained(&inst, &mk(Constant::Num(1)), &b).unwrap());
        assert!(!is_constrained(&inst, &mk(Constant::Num(2)), &b).unwrap());
    }

    #[test]
    fn exists_finds_example1_witness() {
        let inst = example1();
        let (witness, status) = exists_repair(&inst, RepairClass::Weak, &budget()).unwrap();
        assert!(witness.is_some());
        assert!(fulfills(&inst, &witness.unwrap(), &budget().domain).unwrap());
        let _ = status;
    }

    #[test]
    fn empty_update_found_when_request_already_holds() {
        let inst = parse_instance(
            "base q/1. derived p/1.
             db { q(a). }
             view { p(X) :- q(X). }
             request { true: p(a); }",
        )
        .unwrap();
        let found = find_weak_repairs(&inst, &budget(), false).unwrap();
        assert_eq!(found.repairs[0].update, Update::empty());
        let (w, _) = exists_repair(&inst, RepairClass::Weak, &budget()).unwrap();
        assert_eq!(w.unwrap(), Update::empty());
    }

    #[test]
    fn example6_has_repairs_but_no_relevant_ones() {
        // I = <{},{}> , P = {t :- p(X), q(X)}, request true t
        let inst = parse_instance(
            "base p/1, q/1. derived t/0.
             view { t :- p(X), q(X). }
             request { true: t; }",
        )
        .unwrap();
        let b = budget();
        let weak = find_repairs(&inst, RepairClass::Weak, &b).unwrap();
        assert!(!weak.repairs.is_empty());
        let relevant = find_repairs(&inst, RepairClass::RelevantRepair, &b).unwrap();
        assert!(relevant.repairs.is_empty());
        assert!(relevant.status.is_complete());
        let repairs = find_repairs(&inst, RepairClass::Repair, &b).unwrap();
        // the fresh-constant pair {+p(f),+q(f)} survives minimization
        assert!(repairs
            .repairs
            .iter()
            .any(|r| r.update.to_string() == "{+p(_f1)@d, +q(_f1)@d}"));
    }
}
