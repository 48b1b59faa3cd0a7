//! Recursive-descent parser producing a raw instance, which the validator
//! turns into a checked `Instance`. Parsing is deterministic and collects
//! diagnostics with statement-level recovery instead of stopping at the
//! first error.

use crate::error::Diagnostic;
use crate::facts::Constant;
use crate::syntax::lexer::{lex, Tok, Token};
use crate::syntax::validate::validate;
use crate::syntax::{Atom, BuiltinOp, CAtom, Constraint, Instance, Rule, Term};

#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub item: T,
    pub line: usize,
    pub col: usize,
}

#[derive(Default, Debug)]
pub struct RawInstance {
    pub base_decls: Vec<Spanned<(String, usize)>>,
    pub derived_decls: Vec<Spanned<(String, usize)>>,
    pub d_facts: Vec<Spanned<Atom>>,
    pub e_facts: Vec<Spanned<Atom>>,
    pub ics: Vec<Spanned<Constraint>>,
    pub rules: Vec<Spanned<Rule>>,
    pub request_true: Vec<Spanned<Atom>>,
    pub request_false: Vec<Spanned<Atom>>,
    pub has_request: bool,
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(text);
    let mut p = Parser { toks, pos: 0, diags: Vec::new() };
    let raw = p.file();
    diags.extend(p.diags);
    if !diags.is_empty() {
        return Err(diags);
    }
    validate(&raw)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }


    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or_else(|| {
            self.toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1))
        })
    }

    fn error(&mut self, msg: impl Into<String>) {
        let (l, c) = self.here();
        self.diags.push(Diagnostic::new(l, c, "syntax", msg));
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> bool {
        if self.eat(tok) {
            true
        } else {
            self.error(format!("expected {what}"));
            false
        }
    }

    /// Skip tokens until after the next `.` or before a `}`.
    fn sync_stmt(&mut self) {
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Dot => {
                    self.pos += 1;
                    return;
                }
                Tok::RBrace => return,
                _ => self.pos += 1,
            }
        }
    }

    fn file(&mut self) -> RawInstance {
        let mut raw = RawInstance::default();
        while let Some(t) = self.peek() {
            let (line, col) = (t.line, t.col);
            match &t.tok {
                Tok::Ident(s) => match s.as_str() {
                    "base" => {
                        self.pos += 1;
                        self.decls(&mut raw, true);
                    }
                    "derived" => {
                        self.pos += 1;
                        self.decls(&mut raw, false);
                    }
                    "db" => {
                        self.pos += 1;
                        self.fact_block(&mut raw, true);
                    }
                    "except" => {
                        self.pos += 1;
                        self.fact_block(&mut raw, false);
                    }
                    "ic" => {
                        self.pos += 1;
                        self.ic_block(&mut raw);
                    }
                    "view" => {
                        self.pos += 1;
                        self.view_block(&mut raw);
                    }
                    "request" => {
                        self.pos += 1;
                        self.request_block(&mut raw);
                    }
                    other => {
                        self.diags.push(Diagnostic::new(
                            line,
                            col,
                            "syntax",
                            format!("expected a section keyword, found `{other}`"),
                        ));
                        self.pos += 1;
                    }
                },
                _ => {
                    self.error("expected a section keyword");
                    self.pos += 1;
                }
            }
        }
        raw
    }

    fn decls(&mut self, raw: &mut RawInstance, base: bool) {
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Dot) => {
                    self.pos += 1;
                    return;
                }
                Some(Tok::Ident(name)) => {
                    let (line, col) = self.here();
                    self.pos += 1;
                    if !self.expect(&Tok::Slash, "`/` and an arity after predicate name") {
                        self.sync_stmt();
                        return;
                    }
                    let arity = match self.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Int(n)) => {
                            self.pos += 1;
                            n as usize
                        }
                        _ => {
                            self.error("expected arity");
                            self.sync_stmt();
                            return;
                        }
                    };
                    let decl = Spanned { item: (name, arity), line, col };
                    if base {
                        raw.base_decls.push(decl);
                    } else {
                        raw.derived_decls.push(decl);
                    }
                    if !self.eat(&Tok::Comma) {
                        self.expect(&Tok::Dot, "`.` after declarations");
                        return;
                    }
                }
                _ => {
                    self.error("expected predicate declaration or `.`");
                    self.sync_stmt();
                    return;
                }
            }
        }
    }

    fn fact_block(&mut self, raw: &mut RawInstance, d_side: bool) {
        if !self.expect(&Tok::LBrace, "`{`") {
            return;
        }
        loop {
            if self.eat(&Tok::RBrace) {
                return;
            }
            if self.peek().is_none() {
                self.error("unterminated block");
                return;
            }
            let (line, col) = self.here();
            match self.atom() {
                Some(a) => {
                    if self.expect(&Tok::Dot, "`.` after fact") {
                        let sp = Spanned { item: a, line, col };
                        if d_side {
                            raw.d_facts.push(sp);
                        } else {
                            raw.e_facts.push(sp);
                        }
                    } else {
                        self.sync_stmt();
                    }
                }
                None => self.sync_stmt(),
            }
        }
    }

    fn ic_block(&mut self, raw: &mut RawInstance) {
        if !self.expect(&Tok::LBrace, "`{`") {
            return;
        }
        loop {
            if self.eat(&Tok::RBrace) {
                return;
            }
            if self.peek().is_none() {
                self.error("unterminated block");
                return;
            }
            let (line, col) = self.here();
            match self.constraint() {
                Some(c) => raw.ics.push(Spanned { item: c, line, col }),
                None => self.sync_stmt(),
            }
        }
    }

    fn constraint(&mut self) -> Option<Constraint> {
        let mut exist_vars = Vec::new();
        let mut univ_vars = Vec::new();
        if let Some(Tok::Ident(s)) = self.peek().map(|t| t.tok.clone()) {
            if s == "exists" {
                self.pos += 1;
                exist_vars = self.var_list()?;
            }
        }
        if let Some(Tok::Ident(s)) = self.peek().map(|t| t.tok.clone()) {
            if s == "forall" {
                self.pos += 1;
                univ_vars = self.var_list()?;
            }
        }
        if !self.expect(&Tok::Colon, "`:` before constraint body") {
            return None;
        }
        let mut antecedent = Vec::new();
        if self.peek().map(|t| &t.tok) != Some(&Tok::Arrow) {
            loop {
                antecedent.push(self.catom()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        if !self.expect(&Tok::Arrow, "`->` in constraint") {
            return None;
        }
        let mut consequent = Vec::new();
        if let Some(Tok::Ident(s)) = self.peek().map(|t| t.tok.clone()) {
            if s == "false" {
                // `-> false` is the falsity marker only when it stands alone
                let ahead = self.toks.get(self.pos + 1).map(|t| t.tok.clone());
                if ahead == Some(Tok::Dot) {
                    self.pos += 1;
                    self.expect(&Tok::Dot, "`.` after constraint");
                    return Some(Constraint { exist_vars, univ_vars, antecedent, consequent });
                }
            }
        }
        loop {
            consequent.push(self.catom()?);
            if !self.eat(&Tok::Pipe) {
                break;
            }
        }
        if !self.expect(&Tok::Dot, "`.` after constraint") {
            return None;
        }
        Some(Constraint { exist_vars, univ_vars, antecedent, consequent })
    }

    fn var_list(&mut self) -> Option<Vec<std::sync::Arc<str>>> {
        let mut vars = Vec::new();
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Var(v)) => {
                    self.pos += 1;
                    vars.push(std::sync::Arc::from(v.as_str()));
                    if !self.eat(&Tok::Comma) {
                        return Some(vars);
                    }
                }
                _ => {
                    self.error("expected variable");
                    return None;
                }
            }
        }
    }

    fn view_block(&mut self, raw: &mut RawInstance) {
        if !self.expect(&Tok::LBrace, "`{`") {
            return;
        }
        loop {
            if self.eat(&Tok::RBrace) {
                return;
            }
            if self.peek().is_none() {
                self.error("unterminated block");
                return;
            }
            let (line, col) = self.here();
            match self.rule() {
                Some(r) => raw.rules.push(Spanned { item: r, line, col }),
                None => self.sync_stmt(),
            }
        }
    }

    fn rule(&mut self) -> Option<Rule> {
        let head = self.atom()?;
        let mut body_pos = Vec::new();
        let mut body_neg = Vec::new();
        if self.eat(&Tok::ColonDash) {
            loop {
                let neg = matches!(self.peek().map(|t| t.tok.clone()), Some(Tok::Ident(s)) if s == "not");
                if neg {
                    self.pos += 1;
                }
                let a = self.atom()?;
                if neg {
                    body_neg.push(a);
                } else {
                    body_pos.push(a);
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        if !self.expect(&Tok::Dot, "`.` after rule") {
            return None;
        }
        Some(Rule { head, body_pos, body_neg })
    }

    fn request_block(&mut self, raw: &mut RawInstance) {
        raw.has_request = true;
        if !self.expect(&Tok::LBrace, "`{`") {
            return;
        }
        loop {
            if self.eat(&Tok::RBrace) {
                return;
            }
            if self.peek().is_none() {
                self.error("unterminated block");
                return;
            }
            let label = match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Ident(s)) if s == "true" || s == "false" => {
                    self.pos += 1;
                    s
                }
                _ => {
                    self.error("expected `true:` or `false:` part");
                    self.sync_request();
                    continue;
                }
            };
            if !self.expect(&Tok::Colon, "`:` after request label") {
                self.sync_request();
                continue;
            }
            // fact list terminated by `;`
            loop {
                if self.eat(&Tok::Semi) {
                    break;
                }
                let (line, col) = self.here();
                match self.atom() {
                    Some(a) => {
                        let sp = Spanned { item: a, line, col };
                        if label == "true" {
                            raw.request_true.push(sp);
                        } else {
                            raw.request_false.push(sp);
                        }
                        if !self.eat(&Tok::Comma) {
                            self.expect(&Tok::Semi, "`;` after request facts");
                            break;
                        }
                    }
                    None => {
                        self.sync_request();
                        break;
                    }
                }
            }
        }
    }

    fn sync_request(&mut self) {
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Semi => {
                    self.pos += 1;
                    return;
                }
                Tok::RBrace => return,
                _ => self.pos += 1,
            }
        }
    }

    fn atom(&mut self) -> Option<Atom> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.term()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    if !self.expect(&Tok::RParen, "`)`") {
                        return None;
                    }
                }
                Some(Atom::new(name, args))
            }
            _ => {
                self.error("expected atom");
                None
            }
        }
    }

    fn term(&mut self) -> Option<Term> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Int(0)) => {
                self.error("numerals are positive integers");
                None
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                if s == "null" {
                    Some(Term::Const(Constant::Null))
                } else {
                    Some(Term::Const(Constant::sym(&s)))
                }
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Some(Term::Var(std::sync::Arc::from(v.as_str())))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Some(Term::Const(Constant::Num(n)))
            }
            _ => {
                self.error("expected term");
                None
            }
        }
    }

    fn catom(&mut self) -> Option<CAtom> {
        // lookahead: a bare term followed by `=`/`<=` is a built-in
        let start = self.pos;
        if let Some(first) = self.term_quiet() {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Eq) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    return Some(CAtom::Builtin(BuiltinOp::Eq, first, rhs));
                }
                Some(Tok::Leq) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    return Some(CAtom::Builtin(BuiltinOp::Leq, first, rhs));
                }
                _ => {
                    self.pos = start;
                }
            }
        } else {
            self.pos = start;
        }
        self.atom().map(CAtom::Pred)
    }

    /// Like `term` but silent on failure (used for built-in lookahead).
    fn term_quiet(&mut self) -> Option<Term> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Int(0)) => None,
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                if s == "null" {
                    Some(Term::Const(Constant::Null))
                } else {
                    Some(Term::Const(Constant::sym(&s)))
                }
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Some(Term::Var(std::sync::Arc::from(v.as_str())))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Some(Term::Const(Constant::Num(n)))
            }
            _ => None,
        }
    }
}
