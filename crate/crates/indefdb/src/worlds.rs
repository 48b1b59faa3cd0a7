//! Possible-world enumeration and decision procedures for `<I,eta>`.
//!
//! A world is a set of definite base facts that explains everything true in
//! the database, contains only true-or-unknown facts, and satisfies every
//! integrity constraint. The engine factors the candidate universe into
//! *forced* atoms (definite members of `D`, present in every world) and
//! *choice* atoms (definite instances of the indefinite members of `D` not
//! excluded by `E`). Constraints ground to clauses over the choice atoms,
//! so consistency and quantified truth become propositional search, while
//! small instances can still be enumerated exhaustively in canonical
//! order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::database::IndefiniteDatabase;
use crate::error::Error;
use crate::facts::{in_closure, ClosureOp, Constant, Fact, Truth};
use crate::syntax::{Atom, BuiltinOp, CAtom, Constraint, Term};

/// A possible world: a finite set of definite base facts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct World {
    pub facts: BTreeSet<Fact>,
}

impl World {
    pub fn new(facts: BTreeSet<Fact>) -> Self {
        World { facts }
    }

    /// `W |= a`, that is `a` is in `W` downward closed.
    pub fn models(&self, a: &Fact) -> bool {
        in_closure(&self.facts, a, ClosureOp::Down)
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.facts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Search budget for the constant pool and the candidate-atom universe.
///
/// Fresh numerals are placed one per gap of the instance numerals (below
/// the minimum, in holes between consecutive values, then consecutively
/// above the maximum), mirroring the shifting argument that makes one
/// representative per gap class sufficient under `=` and `<=`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DomainBudget {
    pub fresh_symbols: usize,
    pub fresh_numerals: usize,
    /// Cap on choice atoms for exhaustive world enumeration.
    pub universe_cap: usize,
}

pub const DEFAULT_UNIVERSE_CAP: usize = 22;
const FRESH_CAP: usize = 6;
/// Hard ceiling on choice atoms for the solver paths.
const SOLVER_ATOM_CAP: usize = 8192;
const EXIST_GROUND_CAP: usize = 200_000;

impl Default for DomainBudget {
    fn default() -> Self {
        DomainBudget { fresh_symbols: 1, fresh_numerals: 1, universe_cap: DEFAULT_UNIVERSE_CAP }
    }
}

impl DomainBudget {
    /// Default budget for a database with constraints: fresh-constant count
    /// is the number of null occurrences in `D` plus the number of
    /// existential variables across the constraints, capped.
    pub fn for_database(db: &IndefiniteDatabase, ics: &[Constraint]) -> Self {
        let nulls: usize = db.d_set().iter().map(Fact::null_count).sum();
        let exists: usize = ics.iter().map(|ic| ic.exist_vars.len()).sum();
        let k = (nulls + exists).clamp(1, FRESH_CAP);
        DomainBudget { fresh_symbols: k, fresh_numerals: k, universe_cap: DEFAULT_UNIVERSE_CAP }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.universe_cap = cap;
        self
    }
}

/// Builds the candidate constant pool: the given definite constants plus
/// budgeted fresh symbols and gap-placed fresh numerals.
pub fn build_pool(consts: &BTreeSet<Constant>, budget: &DomainBudget) -> Vec<Constant> {
    let mut out: BTreeSet<Constant> = consts.iter().filter(|c| c.is_definite()).cloned().collect();
    for i in 1..=budget.fresh_symbols {
        out.insert(Constant::Sym(Arc::from(format!("_f{i}").as_str())));
    }
    let nums: Vec<u64> = out
        .iter()
        .filter_map(|c| match c {
            Constant::Num(n) => Some(*n),
            _ => None,
        })
        .collect();
    let mut gaps: Vec<u64> = Vec::new();
    if let Some(&min) = nums.first() {
        if min > 1 {
            gaps.push(min - 1);
        }
    }
    for w in nums.windows(2) {
        if w[1] > w[0] + 1 {
            gaps.push(w[0] + 1);
        }
    }
    let mut above = nums.last().map(|&m| m + 1).unwrap_or(1);
    let mut placed = 0;
    let mut gi = 0;
    while placed < budget.fresh_numerals {
        if gi < gaps.len() {
            out.insert(Constant::Num(gaps[gi]));
            gi += 1;
        } else {
            out.insert(Constant::Num(above));
            above += 1;
        }
        placed += 1;
    }
    out.into_iter().collect()
}

/// Ground representation of one constraint over the candidate universe.
enum GroundIc {
    /// Universally quantified only: every clause must hold.
    Clauses(Vec<Vec<i32>>),
    /// Existentially quantified: some group must hold entirely.
    Groups(Vec<Vec<Vec<i32>>>),
}

/// The factored world universe of `<I,eta>` over a constant pool.
pub struct WorldSpace {
    pub forced: BTreeSet<Fact>,
    pub choice: Vec<Fact>,
    explanations: Vec<Vec<i32>>,
    ground_ics: Vec<GroundIc>,
    pub statically_unsat: bool,
    pub pool: Vec<Constant>,
}

impl WorldSpace {
    pub fn choice_count(&self) -> usize {
        self.choice.len()
    }

    /// Choice atoms at least as informative as `a` (its definite up-cone in
    /// the universe). Together with the forced cone this decides `W |= a`.
    fn choice_cone(&self, a: &Fact) -> Vec<usize> {
        self.choice
            .iter()
            .enumerate()
            .filter(|(_, b)| a.leq_info(b))
            .map(|(i, _)| i)
            .collect()
    }

    fn forced_models(&self, a: &Fact) -> bool {
        in_closure(&self.forced, a, ClosureOp::Down)
    }
}

/// Builds the world space: forced atoms, choice atoms, explanation clauses,
/// and ground constraint clauses.
pub fn world_space(
    db: &IndefiniteDatabase,
    ics: &[Constraint],
    pool: &[Constant],
) -> Result<WorldSpace, Error> {
    let mut forced = BTreeSet::new();
    let mut indefinite = Vec::new();
    for a in db.d_set() {
        if a.is_definite() {
            forced.insert(a.clone());
        } else {
            indefinite.push(a.clone());
        }
    }
    let mut choice_set: BTreeSet<Fact> = BTreeSet::new();
    for a in &indefinite {
        for inst in a.definite_instances(pool) {
            if !forced.contains(&inst) && !in_closure(db.e_set(), &inst, ClosureOp::Up) {
                choice_set.insert(inst);
            }
        }
    }
    let choice: Vec<Fact> = choice_set.into_iter().collect();
    if choice.len() > SOLVER_ATOM_CAP {
        return Err(Error::UniverseCapExceeded { size: choice.len(), cap: SOLVER_ATOM_CAP });
    }
    let choice_index: BTreeMap<Fact, usize> =
        choice.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();

    let mut statically_unsat = false;
    let mut explanations = Vec::new();
    for a in &indefinite {
        let mut witnessed = false;
        let mut lits = Vec::new();
        for inst in a.definite_instances(pool) {
            if forced.contains(&inst) {
                witnessed = true;
                break;
            }
            if let Some(&i) = choice_index.get(&inst) {
                lits.push(i as i32 + 1);
            }
        }
        if witnessed {
            continue;
        }
        if lits.is_empty() {
            statically_unsat = true;
        } else {
            lits.dedup();
            explanations.push(lits);
        }
    }

    // universe index by predicate for antecedent joins
    let mut by_pred: BTreeMap<&str, Vec<&Fact>> = BTreeMap::new();
    for f in forced.iter().chain(choice.iter()) {
        by_pred.entry(f.pred()).or_default().push(f);
    }

    let mut ground_ics = Vec::new();
    for ic in ics {
        match ground_constraint(ic, pool, &forced, &choice_index, &by_pred)? {
            Some(g) => {
                match &g {
                    GroundIc::Clauses(cs) => {
                        if cs.iter().any(|c| c.is_empty()) {
                            statically_unsat = true;
                        }
                    }
                    GroundIc::Groups(gs) => {
                        if gs.is_empty() {
                            statically_unsat = true;
                        }
                    }
                }
                ground_ics.push(g);
            }
            None => {} // trivially satisfied
        }
    }

    Ok(WorldSpace {
        forced,
        choice,
        explanations,
        ground_ics,
        statically_unsat,
        pool: pool.to_vec(),
    })
}

/// Grounds one constraint. Returns `None` when the constraint is satisfied
/// in every world of the universe.
fn ground_constraint(
    ic: &Constraint,
    pool: &[Constant],
    forced: &BTreeSet<Fact>,
    choice_index: &BTreeMap<Fact, usize>,
    by_pred: &BTreeMap<&str, Vec<&Fact>>,
) -> Result<Option<GroundIc>, Error> {
    if ic.exist_vars.is_empty() {
        let binding = BTreeMap::new();
        match ground_forall(ic, &binding, forced, choice_index, by_pred)? {
            // a dead group at top level is an unsatisfiable constraint,
            // represented as a single empty clause
            None => Ok(Some(GroundIc::Clauses(vec![Vec::new()]))),
            Some(clauses) if clauses.is_empty() => Ok(None),
            Some(clauses) => Ok(Some(GroundIc::Clauses(clauses))),
        }
    } else {
        let mut groups = Vec::new();
        let k = ic.exist_vars.len();
        let total = pool.len().checked_pow(k as u32).unwrap_or(usize::MAX);
        if total > EXIST_GROUND_CAP {
            return Err(Error::BudgetExhausted(format!(
                "existential grounding needs {total} witness bindings"
            )));
        }
        let mut idx = vec![0usize; k];
        loop {
            let mut binding = BTreeMap::new();
            for (i, v) in ic.exist_vars.iter().enumerate() {
                binding.insert(Arc::clone(v), pool[idx[i]].clone());
            }
            if let Some(clauses) = ground_forall(ic, &binding, forced, choice_index, by_pred)? {
                if clauses.is_empty() {
                    // witness satisfies the constraint outright
                    return Ok(None);
                }
                groups.push(clauses);
            }
            let mut j = 0;
            loop {
                if pool.is_empty() {
                    return Ok(Some(GroundIc::Groups(groups)));
                }
                idx[j] += 1;
                if idx[j] < pool.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == k {
                    return Ok(Some(GroundIc::Groups(groups)));
                }
            }
        }
    }
}

/// Grounds the universal part of a constraint under a fixed binding of the
/// existential variables. Returns `None` when some ground instance is
/// already violated by the forced atoms alone (the group is dead).
fn ground_forall(
    ic: &Constraint,
    exist_binding: &BTreeMap<Arc<str>, Constant>,
    forced: &BTreeSet<Fact>,
    choice_index: &BTreeMap<Fact, usize>,
    by_pred: &BTreeMap<&str, Vec<&Fact>>,
) -> Result<Option<Vec<Vec<i32>>>, Error> {
    let base_atoms: Vec<&Atom> = ic
        .antecedent
        .iter()
        .filter_map(|c| match c {
            CAtom::Pred(a) => Some(a),
            CAtom::Builtin(..) => None,
        })
        .collect();
    let builtins: Vec<(&BuiltinOp, &Term, &Term)> = ic
        .antecedent
        .iter()
        .filter_map(|c| match c {
            CAtom::Builtin(op, l, r) => Some((op, l, r)),
            CAtom::Pred(_) => None,
        })
        .collect();

    let mut clauses: BTreeSet<Vec<i32>> = BTreeSet::new();
    let mut dead = false;
    let mut binding = exist_binding.clone();
    join_atoms(&base_atoms, 0, by_pred, &mut binding, &mut |b| {
        if dead {
            return;
        }
        for (op, l, r) in &builtins {
            if !eval_builtin(op, l, r, b) {
                return;
            }
        }
        let mut lits: Vec<i32> = Vec::new();
        for a in &base_atoms {
            let f = subst_atom(a, b);
            if forced.contains(&f) {
                continue;
            }
            match choice_index.get(&f) {
                Some(&i) => lits.push(-(i as i32 + 1)),
                None => unreachable!("joined atom must be in the universe"),
            }
        }
        let mut satisfied = false;
        for c in &ic.consequent {
            match c {
                CAtom::Builtin(op, l, r) => {
                    if eval_builtin(op, l, r, b) {
                        satisfied = true;
                        break;
                    }
                }
                CAtom::Pred(a) => {
                    let f = subst_atom(a, b);
                    if forced.contains(&f) {
                        satisfied = true;
                        break;
                    }
                    if let Some(&i) = choice_index.get(&f) {
                        lits.push(i as i32 + 1);
                    }
                }
            }
        }
        if satisfied {
            return;
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.is_empty() {
            dead = true;
        } else {
            clauses.insert(lits);
        }
    });
    if dead {
        Ok(None)
    } else {
        Ok(Some(clauses.into_iter().collect()))
    }
}

fn subst_term(t: &Term, binding: &BTreeMap<Arc<str>, Constant>) -> Constant {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => binding.get(v).expect("unbound variable in safe constraint").clone(),
    }
}

fn subst_atom(a: &Atom, binding: &BTreeMap<Arc<str>, Constant>) -> Fact {
    Fact::from_parts(
        Arc::clone(&a.pred),
        a.args.iter().map(|t| subst_term(t, binding)).collect(),
    )
}

fn eval_builtin(
    op: &BuiltinOp,
    l: &Term,
    r: &Term,
    binding: &BTreeMap<Arc<str>, Constant>,
) -> bool {
    let lv = subst_term(l, binding);
    let rv = subst_term(r, binding);
    match op {
        BuiltinOp::Eq => lv == rv,
        BuiltinOp::Leq => lv.num_leq(&rv),
    }
}

/// Backtracking join of atom patterns against the universe index.
fn join_atoms(
    atoms: &[&Atom],
    k: usize,
    by_pred: &BTreeMap<&str, Vec<&Fact>>,
    binding: &mut BTreeMap<Arc<str>, Constant>,
    emit: &mut impl FnMut(&BTreeMap<Arc<str>, Constant>),
) {
    if k == atoms.len() {
        emit(binding);
        return;
    }
    let atom = atoms[k];
    let facts = match by_pred.get(atom.pred.as_ref()) {
        Some(v) => v,
        None => return,
    };
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
                    Some(bc) => {
                        if bc != c {
                            for v in bound_here.drain(..) {
                                binding.remove(&v);
                            }
                            continue 'facts;
                        }
                    }
                    None => {
                        binding.insert(Arc::clone(v), c.clone());
                        bound_here.push(Arc::clone(v));
                    }
                },
            }
        }
        join_atoms(atoms, k + 1, by_pred, binding, emit);
        for v in bound_here {
            binding.remove(&v);
        }
    }
}

// ---------------------------------------------------------------------
// direct (non-clausal) evaluation, used by the enumeration path and tests

/// First-order satisfaction of a constraint in a definite world, with the
/// existential witnesses drawn from `pool` (instance constants plus fresh
/// representatives). `<=` between non-numerals evaluates to false.
pub fn eval_constraint(w: &World, ic: &Constraint, pool: &[Constant]) -> bool {
    let mut by_pred: BTreeMap<&str, Vec<&Fact>> = BTreeMap::new();
    for f in &w.facts {
        by_pred.entry(f.pred()).or_default().push(f);
    }
    if ic.exist_vars.is_empty() {
        return forall_holds(w, ic, &BTreeMap::new(), &by_pred);
    }
    let k = ic.exist_vars.len();
    if pool.is_empty() {
        // no candidate witnesses: the universal part must hold vacuously,
        // which it does since antecedent joins over the world bind X too
        return forall_holds(w, ic, &BTreeMap::new(), &by_pred);
    }
    let mut idx = vec![0usize; k];
    loop {
        let mut binding = BTreeMap::new();
        for (i, v) in ic.exist_vars.iter().enumerate() {
            binding.insert(Arc::clone(v), pool[idx[i]].clone());
        }
        if forall_holds(w, ic, &binding, &by_pred) {
            return true;
        }
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] < pool.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
            if j == k {
                return false;
            }
        }
    }
}

fn forall_holds(
    w: &World,
    ic: &Constraint,
    exist_binding: &BTreeMap<Arc<str>, Constant>,
    by_pred: &BTreeMap<&str, Vec<&Fact>>,
) -> bool {
    let base_atoms: Vec<&Atom> = ic
        .antecedent
        .iter()
        .filter_map(|c| match c {
            CAtom::Pred(a) => Some(a),
            CAtom::Builtin(..) => None,
        })
        .collect();
    let builtins: Vec<(&BuiltinOp, &Term, &Term)> = ic
        .antecedent
        .iter()
        .filter_map(|c| match c {
            CAtom::Builtin(op, l, r) => Some((op, l, r)),
            CAtom::Pred(_) => None,
        })
        .collect();
    let mut ok = true;
    let mut binding = exist_binding.clone();
    join_atoms(&base_atoms, 0, by_pred, &mut binding, &mut |b| {
        if !ok {
            return;
        }
        for (op, l, r) in &builtins {
            if !eval_builtin(op, l, r, b) {
                return;
            }
        }
        let mut satisfied = false;
        for c in &ic.consequent {
            match c {
                CAtom::Builtin(op, l, r) => {
                    if eval_builtin(op, l, r, b) {
                        satisfied = true;
                        break;
                    }
                }
                CAtom::Pred(a) => {
                    if w.facts.contains(&subst_atom(a, b)) {
                        satisfied = true;
                        break;
                    }
                }
            }
        }
        if !satisfied {
            ok = false;
        }
    });
    ok
}

/// Definition of a possible world for the bare database (no constraints).
pub fn is_possible_world(w: &World, db: &IndefiniteDatabase) -> bool {
    if !w.facts.iter().all(Fact::is_definite) {
        return false;
    }
    db.d_set().iter().all(|a| w.models(a))
        && w.facts.iter().all(|a| db.truth_unchecked(a) != Truth::False)
}

// ---------------------------------------------------------------------
// propositional engine

struct Solver {
    n_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Solver {
    fn new(n_vars: usize) -> Self {
        Solver { n_vars, clauses: Vec::new() }
    }

    fn add(&mut self, clause: Vec<i32>) {
        self.clauses.push(clause);
    }

    /// DPLL with unit propagation. Branching tries `false` first, so the
    /// first model found is small in its true-set.
    fn solve(&self, assumptions: &[i32]) -> Option<Vec<bool>> {
        let mut assign: Vec<Option<bool>> = vec![None; self.n_vars + 1];
        for &lit in assumptions {
            let v = lit.unsigned_abs() as usize;
            let val = lit > 0;
            match assign[v] {
                Some(x) if x != val => return None,
                _ => assign[v] = Some(val),
            }
        }
        if !self.propagate(&mut assign) {
            return None;
        }
        self.search(&mut assign)
    }

    fn search(&self, assign: &mut Vec<Option<bool>>) -> Option<Vec<bool>> {
        let var = (1..=self.n_vars).find(|&v| assign[v].is_none());
        let var = match var {
            None => return Some(assign.iter().skip(1).map(|x| x.unwrap_or(false)).collect()),
            Some(v) => v,
        };
        for val in [false, true] {
            let mut trial = assign.clone();
            trial[var] = Some(val);
            if self.propagate(&mut trial) {
                if let Some(model) = self.search(&mut trial) {
                    return Some(model);
                }
            }
        }
        None
    }

    fn propagate(&self, assign: &mut Vec<Option<bool>>) -> bool {
        loop {
            let mut changed = false;
            for clause in &self.clauses {
                let mut satisfied = false;
                let mut unassigned: Option<i32> = None;
                let mut n_unassigned = 0;
                for &lit in clause {
                    let v = lit.unsigned_abs() as usize;
                    match assign[v] {
                        None => {
                            n_unassigned += 1;
                            unassigned = Some(lit);
                        }
                        Some(val) => {
                            if val == (lit > 0) {
                                satisfied = true;
                                break;
                            }
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match n_unassigned {
                    0 => return false,
                    1 => {
                        let lit = unassigned.unwrap();
                        assign[lit.unsigned_abs() as usize] = Some(lit > 0);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

impl WorldSpace {
    /// Assembles the propositional encoding: choice vars first, then one
    /// selector var per existential witness group.
    fn build_solver(&self) -> Solver {
        let n_choice = self.choice.len();
        let mut n_vars = n_choice;
        let mut solver = Solver::new(0);
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        for e in &self.explanations {
            clauses.push(e.clone());
        }
        for g in &self.ground_ics {
            match g {
                GroundIc::Clauses(cs) => clauses.extend(cs.iter().cloned()),
                GroundIc::Groups(groups) => {
                    let mut sel_clause = Vec::new();
                    for group in groups {
                        n_vars += 1;
                        let s = n_vars as i32;
                        sel_clause.push(s);
                        for c in group {
                            let mut cl = Vec::with_capacity(c.len() + 1);
                            cl.push(-s);
                            cl.extend_from_slice(c);
                            clauses.push(cl);
                        }
                    }
                    clauses.push(sel_clause);
                }
            }
        }
        solver.n_vars = n_vars;
        solver.clauses = clauses;
        solver
    }

    fn world_from_trues(&self, trues: &BTreeSet<usize>) -> World {
        let mut facts = self.forced.clone();
        for &i in trues {
            facts.insert(self.choice[i].clone());
        }
        World::new(facts)
    }

    /// Some possible world, if one exists.
    pub fn some_world(&self) -> Option<World> {
        if self.statically_unsat {
            return None;
        }
        let solver = self.build_solver();
        let model = solver.solve(&[])?;
        let trues: BTreeSet<usize> =
            (0..self.choice.len()).filter(|&i| model[i]).collect();
        Some(self.world_from_trues(&trues))
    }

    /// True when the fact holds in every possible world. Sound only when a
    /// world exists (check consistency separately).
    pub fn true_in_all(&self, a: &Fact) -> bool {
        if self.forced_models(a) {
            return true;
        }
        if self.statically_unsat {
            return true; // vacuous
        }
        let cone = self.choice_cone(a);
        let solver = self.build_solver();
        let assumptions: Vec<i32> = cone.iter().map(|&i| -(i as i32 + 1)).collect();
        solver.solve(&assumptions).is_none()
    }

    /// True when the fact holds in no possible world.
    pub fn false_in_all(&self, a: &Fact) -> bool {
        if self.forced_models(a) {
            return self.statically_unsat;
        }
        if self.statically_unsat {
            return true; // vacuous
        }
        let cone = self.choice_cone(a);
        if cone.is_empty() {
            return true;
        }
        let mut solver = self.build_solver();
        solver.add(cone.iter().map(|&i| i as i32 + 1).collect());
        solver.solve(&[]).is_none()
    }

    /// Exhaustive enumeration in canonical order: subsets of the choice
    /// atoms by cardinality, then lexicographically by atom index.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<World>, Error> {
        let n = self.choice.len();
        if n > cap {
            return Err(Error::UniverseCapExceeded { size: n, cap });
        }
        let mut out = Vec::new();
        for k in 0..=n {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                let trues: BTreeSet<usize> = combo.iter().copied().collect();
                if self.subset_is_world(&trues) {
                    out.push(self.world_from_trues(&trues));
                }
                if k == 0 {
                    break;
                }
                // next combination in lexicographic order
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if combo[i] != i + n - k {
                        combo[i] += 1;
                        for j in i + 1..k {
                            combo[j] = combo[j - 1] + 1;
                        }
                        break;
                    }
                    if i == 0 {
                        combo.clear();
                        break;
                    }
                }
                if combo.is_empty() {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn subset_is_world(&self, trues: &BTreeSet<usize>) -> bool {
        for e in &self.explanations {
            if !e.iter().any(|&l| trues.contains(&((l - 1) as usize))) {
                return false;
            }
        }
        let holds_clause = |c: &Vec<i32>| {
            c.iter().any(|&l| {
                if l > 0 {
                    trues.contains(&((l - 1) as usize))
                } else {
                    !trues.contains(&((-l - 1) as usize))
                }
            })
        };
        for g in &self.ground_ics {
            match g {
                GroundIc::Clauses(cs) => {
                    if !cs.iter().all(holds_clause) {
                        return false;
                    }
                }
                GroundIc::Groups(groups) => {
                    if !groups.iter().any(|group| group.iter().all(holds_clause)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// All subset-minimal worlds (minimal in their choice-atom set).
    pub fn minimal_worlds(&self, limit: usize) -> Result<Vec<World>, Error> {
        self.extremal_worlds(limit, true)
    }

    /// All subset-maximal worlds.
    pub fn maximal_worlds(&self, limit: usize) -> Result<Vec<World>, Error> {
        self.extremal_worlds(limit, false)
    }

    fn extremal_worlds(&self, limit: usize, minimal: bool) -> Result<Vec<World>, Error> {
        if self.statically_unsat {
            return Ok(Vec::new());
        }
        let n = self.choice.len();
        let base = self.build_solver();
        let mut blocked = base.clauses.clone();
        let mut out = Vec::new();
        loop {
            let solver = Solver { n_vars: base.n_vars, clauses: blocked.clone() };
            let model = match solver.solve(&[]) {
                None => break,
                Some(m) => m,
            };
            let mut trues: BTreeSet<usize> = (0..n).filter(|&i| model[i]).collect();
            // shrink (or grow) to an extremal model over the choice vars
            loop {
                let mut improved = false;
                let flip_candidates: Vec<usize> = if minimal {
                    trues.iter().copied().collect()
                } else {
                    (0..n).filter(|i| !trues.contains(i)).collect()
                };
                for v in flip_candidates {
                    let mut assumptions: Vec<i32> = Vec::with_capacity(n);
                    if minimal {
                        assumptions.push(-(v as i32 + 1));
                        for i in 0..n {
                            if !trues.contains(&i) {
                                assumptions.push(-(i as i32 + 1));
                            }
                        }
                    } else {
                        assumptions.push(v as i32 + 1);
                        for i in &trues {
                            assumptions.push(*i as i32 + 1);
                        }
                    }
                    if let Some(m2) = base.solve(&assumptions) {
                        trues = (0..n).filter(|&i| m2[i]).collect();
                        improved = true;
                        break;
                    }
                }
                if !improved {
                    break;
                }
            }
            out.push(self.world_from_trues(&trues));
            if out.len() > limit {
                return Err(Error::BudgetExhausted(format!(
                    "more than {limit} extremal worlds"
                )));
            }
            let block: Vec<i32> = if minimal {
                trues.iter().map(|&i| -(i as i32 + 1)).collect()
            } else {
                (0..n).filter(|i| !trues.contains(i)).map(|i| i as i32 + 1).collect()
            };
            if block.is_empty() {
                break; // unique extremal world (empty or full)
            }
            blocked.push(block);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------
// public database-with-constraints operations

/// Prepared context: pool plus factored universe.
pub struct WorldContext {
    pub space: WorldSpace,
    pub budget: DomainBudget,
}

/// Builds pool and world space for `<I,eta>`, folding in extra constants
/// (query or update constants) that must be representable in worlds.
pub fn prepare(
    db: &IndefiniteDatabase,
    ics: &[Constraint],
    extra: &BTreeSet<Constant>,
    budget: &DomainBudget,
) -> Result<WorldContext, Error> {
    let mut consts = db.constants();
    for ic in ics {
        consts.extend(ic.constants());
    }
    consts.extend(extra.iter().filter(|c| c.is_definite()).cloned());
    let pool = build_pool(&consts, budget);
    let space = world_space(db, ics, &pool)?;
    Ok(WorldContext { space, budget: *budget })
}

/// Exhaustively enumerates the possible worlds of `<I,eta>` in canonical
/// order (cardinality of the choice part, then lexicographic).
pub fn enumerate_worlds(
    db: &IndefiniteDatabase,
    ics: &[Constraint],
    budget: &DomainBudget,
) -> Result<Vec<World>, Error> {
    let ctx = prepare(db, ics, &BTreeSet::new(), budget)?;
    ctx.space.enumerate(budget.universe_cap)
}

/// Consistency of `<I,eta>`: some possible world exists. Decided by
/// propositional search, no enumeration.
pub fn is_consistent(
    db: &IndefiniteDatabase,
    ics: &[Constraint],
    budget: &DomainBudget,
) -> Result<bool, Error> {
    let ctx = prepare(db, ics, &BTreeSet::new(), budget)?;
    Ok(ctx.space.some_world().is_some())
}

/// Truth of a base fact in `<I,eta>`: quantifies world membership over all
/// possible worlds. Errors when the database is inconsistent.
pub fn dbic_truth(
    db: &IndefiniteDatabase,
    ics: &[Constraint],
    a: &Fact,
    budget: &DomainBudget,
) -> Result<Truth, Error> {
    let mut extra = BTreeSet::new();
    extra.extend(a.constants().cloned());
    let ctx = prepare(db, ics, &extra, budget)?;
    if ctx.space.some_world().is_none() {
        return Err(Error::Inconsistent);
    }
    if ctx.space.true_in_all(a) {
        Ok(Truth::True)
    } else if ctx.space.false_in_all(a) {
        Ok(Truth::False)
    } else {
        Ok(Truth::Unknown)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_instance;

    fn num(n: u64) -> Constant {
        Constant::Num(n)
    }

    fn p(a: Constant) -> Fact {
        Fact::new("p", vec![a])
    }

    fn q(a: Constant) -> Fact {
        Fact::new("q", vec![a])
    }

    #[test]
    fn possible_world_examples() {
        // worlds of <{p(1),p(2),q(null)}, {}>
        let db = IndefiniteDatabase::new(
            [p(num(1)), p(num(2)), q(Constant::Null)].into_iter().collect(),
            BTreeSet::new(),
        );
        let w = World::new([p(num(1)), p(num(2)), q(num(1))].into_iter().collect());
        assert!(is_possible_world(&w, &db));
        // the empty world leaves p(null) unexplained
        let db2 = IndefiniteDatabase::new(
            [p(Constant::Null)].into_iter().collect(),
            BTreeSet::new(),
        );
        assert!(!is_possible_world(&World::default(), &db2));
        let w2 = World::new([p(num(1)), p(num(3))].into_iter().collect());
        assert!(is_possible_world(&w2, &db2));
    }

    #[test]
    fn constraint_evaluation_examples() {
        let inst = parse_instance(
            "base p/1, q/1. derived .
             ic { forall X : q(X) -> p(X). }",
        )
        .unwrap();
        let ic = &inst.ics[0];
        let pool = vec![num(1), num(2), num(3)];
        let w_bad = World::new([p(num(1)), p(num(2)), q(num(3))].into_iter().collect());
        assert!(!eval_constraint(&w_bad, ic, &pool));
        let w_ok = World::new([p(num(1)), p(num(2)), q(num(1))].into_iter().collect());
        assert!(eval_constraint(&w_ok, ic, &pool));
        // vacuous when the antecedent predicate is empty
        let w_vac = World::new([p(num(1))].into_iter().collect());
        assert!(eval_constraint(&w_vac, ic, &pool));
    }

    #[test]
    fn denial_constraint_with_join() {
        let inst = parse_instance(
            "base val/2. derived .
             ic { forall A : val(A,true), val(A,false) -> false. }",
        )
        .unwrap();
        let ic = &inst.ics[0];
        let t = Constant::sym("true");
        let f = Constant::sym("false");
        let a = Constant::sym("a");
        let w = World::new([Fact::new("val", vec![a.clone(), t.clone()])].into_iter().collect());
        assert!(eval_constraint(&w, ic, &[a.clone(), t.clone(), f.clone()]));
        let w2 = World::new(
            [
                Fact::new("val", vec![a.clone(), t.clone()]),
                Fact::new("val", vec![a.clone(), f.clone()]),
            ]
            .into_iter()
            .collect(),
        );
        assert!(!eval_constraint(&w2, ic, &[a, t, f]));
    }

    #[test]
    fn enumerates_worlds_of_paper_examples() {
        // I = <{p(null)},{}>, eta = {p(2) -> false}, pool {1,2,3}
        let inst = parse_instance(
            "base p/1. derived .
             db { p(null). }
             ic { : p(2) -> false. }",
        )
        .unwrap();
        // force pool {1,2,3} by budgeting two fresh numerals beyond the 2
        let consts: BTreeSet<Constant> = [num(1), num(2), num(3)].into_iter().collect();
        let pool = build_pool(&consts, &DomainBudget { fresh_symbols: 0, fresh_numerals: 0, universe_cap: 22 });
        let space = world_space(&inst.db, &inst.ics, &pool).unwrap();
        let worlds = space.enumerate(22).unwrap();
        let expect: Vec<World> = vec![
            World::new([p(num(1))].into_iter().collect()),
            World::new([p(num(3))].into_iter().collect()),
            World::new([p(num(1)), p(num(3))].into_iter().collect()),
        ];
        assert_eq!(worlds, expect);
    }

    #[test]
    fn example3_worlds_and_truth() {
        let inst = parse_instance(
            "base p/1, q/1. derived .
             db { p(1). p(2). q(null). }
             ic { forall X : q(X) -> p(X). }",
        )
        .unwrap();
        let consts: BTreeSet<Constant> = [num(1), num(2), num(3)].into_iter().collect();
        let pool = build_pool(&consts, &DomainBudget { fresh_symbols: 0, fresh_numerals: 0, universe_cap: 22 });
        let space = world_space(&inst.db, &inst.ics, &pool).unwrap();
        // oracle: brute subset enumeration over the 5-atom universe
        let worlds = space.enumerate(22).unwrap();
        assert_eq!(worlds.len(), 3);
        for w in &worlds {
            assert!(w.facts.contains(&p(num(1))) && w.facts.contains(&p(num(2))));
            assert!(!w.facts.contains(&q(num(3))));
        }
        // truth via solver path agrees
        let budget = DomainBudget { fresh_symbols: 0, fresh_numerals: 1, universe_cap: 22 };
        assert_eq!(dbic_truth(&inst.db, &inst.ics, &p(num(1)), &budget).unwrap(), Truth::True);
        assert_eq!(dbic_truth(&inst.db, &inst.ics, &p(num(3)), &budget).unwrap(), Truth::False);
        assert_eq!(dbic_truth(&inst.db, &inst.ics, &q(num(1)), &budget).unwrap(), Truth::Unknown);
        assert_eq!(dbic_truth(&inst.db, &inst.ics, &q(num(2)), &budget).unwrap(), Truth::Unknown);
        assert_eq!(dbic_truth(&inst.db, &inst.ics, &q(num(3)), &budget).unwrap(), Truth::False);
    }

    #[test]
    fn empty_database_has_one_world() {
        let db = IndefiniteDatabase::empty();
        let worlds = enumerate_worlds(&db, &[], &DomainBudget::default()).unwrap();
        assert_eq!(worlds, vec![World::default()]);
    }

    #[test]
    fn inconsistency_detected() {
        let inst = parse_instance(
            "base p/1. derived .
             db { p(1). }
             ic { : p(1) -> false. }",
        )
        .unwrap();
        assert!(!is_consistent(&inst.db, &inst.ics, &DomainBudget::default()).unwrap());
        assert!(matches!(
            dbic_truth(&inst.db, &inst.ics, &p(num(1)), &DomainBudget::default()),
            Err(Error::Inconsistent)
        ));
    }

    #[test]
    fn adding_constraints_never_enlarges_world_set() {
        let inst = parse_instance(
            "base p/1, q/1. derived .
             db { p(1). q(null). }
             ic { forall X : q(X) -> p(X). }",
        )
        .unwrap();
        let budget = DomainBudget { fresh_symbols: 0, fresh_numerals: 2, universe_cap: 22 };
        let without = enumerate_worlds(&inst.db, &[], &budget).unwrap();
        let with = enumerate_worlds(&inst.db, &inst.ics, &budget).unwrap();
        let without_set: BTreeSet<&World> = without.iter().collect();
        assert!(with.iter().all(|w| without_set.contains(w)));
        assert!(with.len() < without.len());
    }

    #[test]
    fn minimal_and_maximal_worlds() {
        let inst = parse_instance(
            "base p/1. derived .
             db { p(null). }",
        )
        .unwrap();
        let consts: BTreeSet<Constant> = [num(1), num(2)].into_iter().collect();
        let pool = build_pool(&consts, &DomainBudget { fresh_symbols: 0, fresh_numerals: 0, universe_cap: 22 });
        let space = world_space(&inst.db, &[], &pool).unwrap();
        let mins = space.minimal_worlds(64).unwrap();
        assert_eq!(mins.len(), 2); // {p(1)} and {p(2)}
        assert!(mins.iter().all(|w| w.facts.len() == 1));
        let maxs = space.maximal_worlds(64).unwrap();
        assert_eq!(maxs.len(), 1); // {p(1),p(2)}
        assert_eq!(maxs[0].facts.len(), 2);
    }

    #[test]
    fn fresh_numerals_fill_gaps() {
        let consts: BTreeSet<Constant> = [num(3), num(6)].into_iter().collect();
        let pool = build_pool(
            &consts,
            &DomainBudget { fresh_symbols: 0, fresh_numerals: 4, universe_cap: 22 },
        );
        let nums: Vec<u64> = pool
            .iter()
            .filter_map(|c| match c {
                Constant::Num(n) => Some(*n),
                _ => None,
            })
            .collect();
        // below-min gap, internal gap, then above max
        assert_eq!(nums, vec![2, 3, 4, 6, 7, 8]);
    }
}
