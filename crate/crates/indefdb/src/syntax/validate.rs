//! Semantic validation of a raw parse: schema construction, fact and rule
//! checks (safety, null occurrences, declaredness), constraint checks, and
//! the predicate dependency report used to classify views.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::database::{IndefiniteDatabase, Schema};
use crate::error::Diagnostic;
use crate::facts::{Constant, Fact};
use crate::syntax::parser::{RawInstance, Spanned};
use crate::syntax::{Atom, BuiltinOp, CAtom, Instance, Request, Rule, Term};

const RESERVED: &[&str] = &[
    "base", "derived", "db", "except", "ic", "view", "request", "forall", "exists", "not",
    "null", "true", "false",
];

pub fn validate(raw: &RawInstance) -> Result<Instance, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut schema = Schema::new();

    for decl in &raw.base_decls {
        check_decl(&mut schema, decl, true, &mut diags);
    }
    for decl in &raw.derived_decls {
        check_decl(&mut schema, decl, false, &mut diags);
    }

    let mut d_set = BTreeSet::new();
    let mut e_set = BTreeSet::new();
    for sp in &raw.d_facts {
        if let Some(f) = check_stored_fact(&schema, sp, &mut diags) {
            d_set.insert(f);
        }
    }
    for sp in &raw.e_facts {
        if let Some(f) = check_stored_fact(&schema, sp, &mut diags) {
            e_set.insert(f);
        }
    }

    let mut ics = Vec::new();
    for sp in &raw.ics {
        check_constraint(&schema, sp, &mut diags);
        ics.push(sp.item.clone());
    }

    let mut view = Vec::new();
    for sp in &raw.rules {
        check_rule(&schema, sp, &mut diags);
        view.push(sp.item.clone());
    }

    let mut want_true = BTreeSet::new();
    let mut want_false = BTreeSet::new();
    for sp in &raw.request_true {
        if let Some(f) = check_request_fact(&schema, sp, &mut diags) {
            want_true.insert(f);
        }
    }
    for sp in &raw.request_false {
        if let Some(f) = check_request_fact(&schema, sp, &mut diags) {
            want_false.insert(f);
        }
    }
    for f in want_true.intersection(&want_false) {
        diags.push(Diagnostic::new(
            1,
            1,
            "request-overlap",
            format!("fact `{f}` requested both true and false"),
        ));
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    let request = if raw.has_request {
        Some(Request { want_true, want_false })
    } else {
        None
    };
    Ok(Instance {
        schema,
        db: IndefiniteDatabase::new(d_set, e_set),
        ics,
        view,
        request,
    })
}

fn check_decl(
    schema: &mut Schema,
    decl: &Spanned<(String, usize)>,
    base: bool,
    diags: &mut Vec<Diagnostic>,
) {
    let (name, arity) = &decl.item;
    if RESERVED.contains(&name.as_str()) {
        diags.push(Diagnostic::new(
            decl.line,
            decl.col,
            "reserved-name",
            format!("`{name}` cannot be used as a predicate name"),
        ));
        return;
    }
    let res = if base {
        schema.declare_base(name, *arity)
    } else {
        schema.declare_derived(name, *arity)
    };
    if res.is_err() {
        diags.push(Diagnostic::new(
            decl.line,
            decl.col,
            "duplicate-predicate",
            format!("predicate `{name}` declared twice"),
        ));
    }
}

fn check_atom_shape(
    schema: &Schema,
    atom: &Atom,
    line: usize,
    col: usize,
    diags: &mut Vec<Diagnostic>,
) -> bool {
    match schema.arity(&atom.pred) {
        None => {
            diags.push(Diagnostic::new(
                line,
                col,
                "undeclared-predicate",
                format!("predicate `{}` is not declared", atom.pred),
            ));
            false
        }
        Some(a) if a != atom.args.len() => {
            diags.push(Diagnostic::new(
                line,
                col,
                "arity-mismatch",
                format!("`{}` declared with arity {a}, used with {}", atom.pred, atom.args.len()),
            ));
            false
        }
        Some(_) => true,
    }
}

fn check_stored_fact(
    schema: &Schema,
    sp: &Spanned<Atom>,
    diags: &mut Vec<Diagnostic>,
) -> Option<Fact> {
    let atom = &sp.item;
    if !check_atom_shape(schema, atom, sp.line, sp.col, diags) {
        return None;
    }
    if !schema.is_base(&atom.pred) {
        diags.push(Diagnostic::new(
            sp.line,
            sp.col,
            "non-base-fact",
            format!("stored facts must use base predicates, `{}` is derived", atom.pred),
        ));
        return None;
    }
    match atom.to_fact() {
        Some(f) => Some(f),
        None => {
            diags.push(Diagnostic::new(
                sp.line,
                sp.col,
                "variable-in-fact",
                "stored facts must be ground",
            ));
            None
        }
    }
}

fn check_request_fact(
    schema: &Schema,
    sp: &Spanned<Atom>,
    diags: &mut Vec<Diagnostic>,
) -> Option<Fact> {
    let atom = &sp.item;
    if !check_atom_shape(schema, atom, sp.line, sp.col, diags) {
        return None;
    }
    match atom.to_fact() {
        Some(f) => Some(f),
        None => {
            diags.push(Diagnostic::new(
                sp.line,
                sp.col,
                "variable-in-fact",
                "request facts must be ground",
            ));
            None
        }
    }
}

fn check_rule(schema: &Schema, sp: &Spanned<Rule>, diags: &mut Vec<Diagnostic>) {
    let rule = &sp.item;
    for atom in rule.atoms() {
        check_atom_shape(schema, atom, sp.line, sp.col, diags);
        if atom.constants().any(|c| c.is_null()) {
            diags.push(Diagnostic::new(
                sp.line,
                sp.col,
                "null-in-view",
                "view rules must not contain null",
            ));
        }
    }
    if schema.is_base(&rule.head.pred) {
        diags.push(Diagnostic::new(
            sp.line,
            sp.col,
            "base-pred-in-rule-head",
            format!("rule head `{}` is a base predicate", rule.head.pred),
        ));
    }
    if !rule.is_safe() {
        diags.push(Diagnostic::new(
            sp.line,
            sp.col,
            "unsafe-rule",
            "every head or negated variable must occur in a positive body atom",
        ));
    }
}

fn check_constraint(schema: &Schema, sp: &Spanned<crate::syntax::Constraint>, diags: &mut Vec<Diagnostic>) {
    let ic = &sp.item;
    let declared: BTreeSet<&Arc<str>> = ic.exist_vars.iter().chain(ic.univ_vars.iter()).collect();
    let exist: BTreeSet<&Arc<str>> = ic.exist_vars.iter().collect();
    for v in &ic.univ_vars {
        if exist.contains(v) {
            diags.push(Diagnostic::new(
                sp.line,
                sp.col,
                "duplicate-variable",
                format!("variable `{v}` quantified twice"),
            ));
        }
    }
    // variables occurring in base antecedent atoms
    let mut grounded: BTreeSet<&Arc<str>> = BTreeSet::new();
    for catom in &ic.antecedent {
        if let CAtom::Pred(a) = catom {
            grounded.extend(a.vars());
        }
    }
    for catom in ic.atoms() {
        match catom {
            CAtom::Pred(a) => {
                check_atom_shape(schema, a, sp.line, sp.col, diags);
                if schema.is_derived(&a.pred) {
                    diags.push(Diagnostic::new(
                        sp.line,
                        sp.col,
                        "non-base-ic-atom",
                        format!("constraints may only use base predicates, `{}` is derived", a.pred),
                    ));
                }
            }
            CAtom::Builtin(op, l, r) => {
                if *op == BuiltinOp::Leq {
                    for t in [l, r] {
                        if let Term::Const(Constant::Sym(s)) = t {
                            diags.push(Diagnostic::new(
                                sp.line,
                                sp.col,
                                "leq-on-symbols",
                                format!("`<=` is defined between numerals, got symbol `{s}`"),
                            ));
                        }
                    }
                }
            }
        }
        for c in catom.constants() {
            if c.is_null() {
                diags.push(Diagnostic::new(
                    sp.line,
                    sp.col,
                    "null-in-ic",
                    "constraints must not contain null",
                ));
            }
        }
        for v in catom.vars() {
            if !declared.contains(v) {
                diags.push(Diagnostic::new(
                    sp.line,
                    sp.col,
                    "unquantified-variable",
                    format!("variable `{v}` is not quantified"),
                ));
            }
        }
    }
    for v in declared {
        if !grounded.contains(v) {
            diags.push(Diagnostic::new(
                sp.line,
                sp.col,
                "unsafe-ic",
                format!("variable `{v}` must occur in a base antecedent atom"),
            ));
        }
    }
}

/// The predicate dependency report for a view program.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DependencyReport {
    /// Strongly connected components in topological order.
    pub sccs: Vec<Vec<String>>,
    pub acyclic: bool,
    pub class: ProgramClass,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProgramClass {
    /// No negation anywhere.
    Horn,
    /// Negation only across strata.
    Stratified,
    /// Negation through a cycle.
    General,
}

/// Builds the dependency graph of the view and reports cyclicity and the
/// program class.
pub fn check_acyclic(view: &[Rule]) -> DependencyReport {
    let mut preds: BTreeSet<Arc<str>> = BTreeSet::new();
    for r in view {
        for a in r.atoms() {
            preds.insert(Arc::clone(&a.pred));
        }
    }
    let index: BTreeMap<Arc<str>, usize> =
        preds.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let n = index.len();
    let mut pos_edges = vec![BTreeSet::new(); n];
    let mut neg_edges = vec![BTreeSet::new(); n];
    let mut has_neg = false;
    for r in view {
        let h = index[&r.head.pred];
        for a in &r.body_pos {
            pos_edges[h].insert(index[&a.pred]);
        }
        for a in &r.body_neg {
            has_neg = true;
            neg_edges[h].insert(index[&a.pred]);
        }
    }
    let mut all_edges = vec![BTreeSet::new(); n];
    for v in 0..n {
        all_edges[v].extend(pos_edges[v].iter().copied());
        all_edges[v].extend(neg_edges[v].iter().copied());
    }
    let sccs_idx = tarjan(n, &all_edges);
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in sccs_idx.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut acyclic = true;
    let mut stratified = true;
    for comp in &sccs_idx {
        if comp.len() > 1 {
            acyclic = false;
        }
    }
    for v in 0..n {
        if all_edges[v].contains(&v) {
            acyclic = false;
        }
        for &w in &neg_edges[v] {
            if comp_of[w] == comp_of[v] {
                stratified = false;
            }
        }
    }
    let names: Vec<Arc<str>> = preds.into_iter().collect();
    let sccs = sccs_idx
        .iter()
        .map(|comp| comp.iter().map(|&v| names[v].to_string()).collect())
        .collect();
    let class = if !has_neg {
        ProgramClass::Horn
    } else if stratified {
        ProgramClass::Stratified
    } else {
        ProgramClass::General
    };
    DependencyReport { sccs, acyclic, class }
}

/// Iterative Tarjan SCC; components come out in reverse topological order
/// and are reversed before returning.
fn tarjan(n: usize, edges: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    #[derive(Clone)]
    struct NodeState {
        index: Option<usize>,
        lowlink: usize,
        on_stack: bool,
    }
    let mut state = vec![NodeState { index: None, lowlink: 0, on_stack: false }; n];
    let mut stack = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if state[root].index.is_some() {
            continue;
        }
        // explicit DFS stack: (node, edge iterator position)
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        call.push((root, edges[root].iter().copied().collect(), 0));
        state[root].index = Some(next_index);
        state[root].lowlink = next_index;
        state[root].on_stack = true;
        stack.push(root);
        next_index += 1;
        while let Some((v, succs, mut i)) = call.pop() {
            let mut descended = false;
            while i < succs.len() {
                let w = succs[i];
                i += 1;
                match state[w].index {
                    None => {
                        state[w].index = Some(next_index);
                        state[w].lowlink = next_index;
                        state[w].on_stack = true;
                        stack.push(w);
                        next_index += 1;
                        call.push((v, succs, i));
                        call.push((w, edges[w].iter().copied().collect(), 0));
                        descended = true;
                        break;
                    }
                    Some(widx) => {
                        if state[w].on_stack {
                            state[v].lowlink = state[v].lowlink.min(widx);
                        }
                    }
                }
            }
            if descended {
                continue;
            }
            if state[v].lowlink == state[v].index.unwrap() {
                let mut comp = Vec::new();
                while let Some(w) = stack.pop() {
                    state[w].on_stack = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                sccs.push(comp);
            }
            if let Some(last) = call.last_mut() {
                let parent = last.0;
                state[parent].lowlink = state[parent].lowlink.min(state[v].lowlink);
            }
        }
    }
    sccs.reverse();
    sccs
}
