//! Canonical pretty-printer. `parse_instance(print_instance(i)) == i` on
//! every valid instance: facts print sorted, declarations sorted, rule and
//! constraint order preserved.

use std::fmt::Write as _;

use crate::facts::Fact;
use crate::syntax::Instance;

pub fn print_fact(f: &Fact) -> String {
    f.to_string()
}

pub fn print_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let base: Vec<String> = inst
        .schema
        .base_preds()
        .map(|(n, a)| format!("{n}/{a}"))
        .collect();
    let derived: Vec<String> = inst
        .schema
        .derived_preds()
        .map(|(n, a)| format!("{n}/{a}"))
        .collect();
    let _ = writeln!(out, "base {}.", base.join(", "));
    let _ = writeln!(out, "derived {}.", derived.join(", "));
    let _ = writeln!(out, "db {{");
    for f in inst.db.d_set() {
        let _ = writeln!(out, "  {f}.");
    }
    let _ = writeln!(out, "}}");
    let _ = writeln!(out, "except {{");
    for f in inst.db.e_set() {
        let _ = writeln!(out, "  {f}.");
    }
    let _ = writeln!(out, "}}");
    let _ = writeln!(out, "ic {{");
    for ic in &inst.ics {
        let _ = writeln!(out, "  {ic}");
    }
    let _ = writeln!(out, "}}");
    let _ = writeln!(out, "view {{");
    for r in &inst.view {
        let _ = writeln!(out, "  {r}");
    }
    let _ = writeln!(out, "}}");
    if let Some(req) = &inst.request {
        let _ = writeln!(out, "request {{");
        let ts: Vec<String> = req.want_true.iter().map(Fact::to_string).collect();
        let fs: Vec<String> = req.want_false.iter().map(Fact::to_string).collect();
        let _ = writeln!(out, "  true: {};", ts.join(", "));
        let _ = writeln!(out, "  false: {};", fs.join(", "));
        let _ = writeln!(out, "}}");
    }
    out
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse_instance;

    use super::*;

    const EXAMPLE_1: &str = "
        % view over q and r
        base q/2, r/3.
        derived p/1.
        db { q(a,b). }
        view { p(X) :- q(X,Y), r(X,Y,Z). }
        request { true: p(a); }
    ";

    #[test]
    fn round_trips_example_instance() {
        let inst = parse_instance(EXAMPLE_1).expect("parses");
        assert_eq!(inst.db.d_set().len(), 1);
        assert_eq!(inst.view.len(), 1);
        let printed = print_instance(&inst);
        let again = parse_instance(&printed).expect("printed form parses");
        assert_eq!(inst, again);
    }

    #[test]
    fn round_trips_empty_instance() {
        let inst = parse_instance("base . derived .").expect("parses");
        let printed = print_instance(&inst);
        let again = parse_instance(&printed).expect("reparses");
        assert_eq!(inst, again);
        assert!(inst.request.is_none());
    }

    #[test]
    fn round_trips_constraints_and_request_nulls() {
        let text = "
            base p/1, q/1, v/2.
            derived t/0.
            db { p(null). q(3). }
            except { p(1). }
            ic { forall X : q(X) -> p(X).
                 exists Y forall X : v(X,Y), 2 <= X -> X = Y | p(X).
                 forall C : v(C,C) -> false. }
            view { t :- p(1), q(1), not q(2). }
            request { true: t, p(null); false: q(2); }
        ";
        let inst = parse_instance(text).expect("parses");
        let printed = print_instance(&inst);
        let again = parse_instance(&printed).expect("reparses");
        assert_eq!(inst, again);
    }
}
