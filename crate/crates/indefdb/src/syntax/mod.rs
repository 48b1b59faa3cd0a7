//! Textual instance format: abstract syntax, parser with diagnostics,
//! validator, and canonical pretty-printer.
//!
//! The concrete grammar uses `%` line comments and the sections `base`,
//! `derived`, `db { ... }`, `except { ... }`, `ic { ... }`, `view { ... }`
//! and `request { true: ...; false: ...; }`. Variables are capitalized
//! identifiers, constants are lowercase identifiers or positive integer
//! literals, and the null value is written `null`. Integrity constraints
//! are written `exists X forall Y : a1, a2 -> b1 | b2.` with `-> false`
//! for denial constraints; view rules use `head :- b1, not b2.`.

mod lexer;
mod parser;
mod printer;
mod validate;

pub use parser::parse_instance;
pub use printer::{print_fact, print_instance};
pub use validate::{check_acyclic, DependencyReport, ProgramClass};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::database::{IndefiniteDatabase, Schema};
use crate::facts::{Constant, Fact};

/// A term in a rule or constraint: a constant or a variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Term {
    Const(Constant),
    Var(Arc<str>),
}

impl Term {
    pub fn as_var(&self) -> Option<&Arc<str>> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
        }
    }
}

/// A possibly non-ground atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub pred: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl AsRef<str>, args: Vec<Term>) -> Self {
        Atom { pred: Arc::from(pred.as_ref()), args }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Arc<str>> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn to_fact(&self) -> Option<Fact> {
        let mut args = Vec::with_capacity(self.args.len());
        for t in &self.args {
            match t {
                Term::Const(c) => args.push(c.clone()),
                Term::Var(_) => return None,
            }
        }
        Some(Fact::from_parts(Arc::clone(&self.pred), args))
    }

    pub fn constants(&self) -> impl Iterator<Item = &Constant> {
        self.args.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A Datalog(not) view rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    pub head: Atom,
    pub body_pos: Vec<Atom>,
    pub body_neg: Vec<Atom>,
}

impl Rule {
    /// Safety: every variable in the head or a negated body atom occurs in
    /// a positive body atom.
    pub fn is_safe(&self) -> bool {
        let bound: BTreeSet<&Arc<str>> = self.body_pos.iter().flat_map(Atom::vars).collect();
        self.head.vars().all(|v| bound.contains(v))
            && self.body_neg.iter().flat_map(Atom::vars).all(|v| bound.contains(&v))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body_pos.iter()).chain(self.body_neg.iter())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body_pos.is_empty() || !self.body_neg.is_empty() {
            write!(f, " :- ")?;
            let mut first = true;
            for a in &self.body_pos {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{a}")?;
            }
            for a in &self.body_neg {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "not {a}")?;
            }
        }
        write!(f, ".")
    }
}

/// Built-in comparisons allowed inside integrity constraints.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BuiltinOp {
    Eq,
    Leq,
}

/// An atom of an integrity constraint: a base-predicate atom or a built-in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CAtom {
    Pred(Atom),
    Builtin(BuiltinOp, Term, Term),
}

impl CAtom {
    pub fn vars(&self) -> Vec<&Arc<str>> {
        match self {
            CAtom::Pred(a) => a.vars().collect(),
            CAtom::Builtin(_, l, r) => {
                [l, r].into_iter().filter_map(Term::as_var).collect()
            }
        }
    }

    pub fn constants(&self) -> Vec<&Constant> {
        match self {
            CAtom::Pred(a) => a.constants().collect(),
            CAtom::Builtin(_, l, r) => [l, r]
                .into_iter()
                .filter_map(|t| match t {
                    Term::Const(c) => Some(c),
                    Term::Var(_) => None,
                })
                .collect(),
        }
    }
}

impl fmt::Display for CAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CAtom::Pred(a) => write!(f, "{a}"),
            CAtom::Builtin(BuiltinOp::Eq, l, r) => write!(f, "{l} = {r}"),
            CAtom::Builtin(BuiltinOp::Leq, l, r) => write!(f, "{l} <= {r}"),
        }
    }
}

/// An integrity constraint `exists X (forall Y (ante -> cons))`.
/// An empty consequent is the falsity marker (`-> false`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub exist_vars: Vec<Arc<str>>,
    pub univ_vars: Vec<Arc<str>>,
    pub antecedent: Vec<CAtom>,
    pub consequent: Vec<CAtom>,
}

impl Constraint {
    /// Universal denial `forall vars : ante -> false`.
    pub fn denial(univ_vars: Vec<Arc<str>>, antecedent: Vec<CAtom>) -> Self {
        Constraint { exist_vars: Vec::new(), univ_vars, antecedent, consequent: Vec::new() }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &CAtom> {
        self.antecedent.iter().chain(self.consequent.iter())
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        self.atoms().flat_map(|a| a.constants().into_iter().cloned()).collect()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.exist_vars.is_empty() {
            write!(f, "exists ")?;
            for (i, v) in self.exist_vars.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, " ")?;
        }
        if !self.univ_vars.is_empty() {
            write!(f, "forall ")?;
            for (i, v) in self.univ_vars.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, " ")?;
        }
        write!(f, ": ")?;
        for (i, a) in self.antecedent.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " -> ")?;
        if self.consequent.is_empty() {
            write!(f, "false")?;
        } else {
            for (i, a) in self.consequent.iter().enumerate() {
                if i > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "{a}")?;
            }
        }
        write!(f, ".")
    }
}

/// Disjoint sets of facts requested true and false.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Request {
    pub want_true: BTreeSet<Fact>,
    pub want_false: BTreeSet<Fact>,
}

impl Request {
    pub fn is_empty(&self) -> bool {
        self.want_true.is_empty() && self.want_false.is_empty()
    }
}

/// A full deductive-database instance: schema, data, constraints, view,
/// and an optional view-update request.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    pub schema: Schema,
    pub db: IndefiniteDatabase,
    pub ics: Vec<Constraint>,
    pub view: Vec<Rule>,
    pub request: Option<Request>,
}

impl Instance {
    pub fn empty() -> Self {
        Instance {
            schema: Schema::new(),
            db: IndefiniteDatabase::empty(),
            ics: Vec::new(),
            view: Vec::new(),
            request: None,
        }
    }

    /// All definite constants of the instance, request included.
    pub fn constants(&self) -> BTreeSet<Constant> {
        let mut out = self.db.constants();
        for ic in &self.ics {
            out.extend(ic.constants());
        }
        for r in &self.view {
            for a in r.atoms() {
                out.extend(a.constants().cloned());
            }
        }
        if let Some(req) = &self.request {
            for fact in req.want_true.iter().chain(req.want_false.iter()) {
                out.extend(fact.constants().filter(|c| c.is_definite()).cloned());
            }
        }
        out.retain(Constant::is_definite);
        out
    }

    pub fn uses_leq(&self) -> bool {
        self.ics
            .iter()
            .flat_map(Constraint::atoms)
            .any(|a| matches!(a, CAtom::Builtin(BuiltinOp::Leq, _, _)))
    }

    /// Count of null occurrences in the stored database.
    pub fn null_occurrences(&self) -> usize {
        self.db.d_set().iter().chain(self.db.e_set().iter()).map(Fact::null_count).sum()
    }

    pub fn exist_var_count(&self) -> usize {
        self.ics.iter().map(|ic| ic.exist_vars.len()).sum()
    }
}
