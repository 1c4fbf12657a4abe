use super::*;
use crate::frontend::parse_program;
use std::collections::BTreeSet;

const DEFS: &str = r"
/*@ axiomatic Str {
  @   predicate valid_str(char *s) = \valid(s) && (*s == '\0' || valid_str(s + 1));
  @   logic integer strlen(char *s) = *s == '\0' ? 0 : 1 + strlen(s + 1);
  @   logic char *strchrnul(char *s, char c) = *s == c ? s : *s == '\0' ? s : strchrnul(s + 1, c);
  @ }
  @*/
";

fn checked(src: &str) -> Result<TypedUnit, SemaError> {
    check(parse_program(&format!("{DEFS}{src}")).unwrap())
}

const IN_RANGE: &str = r"
/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures s <= strchrnul(s, c) <= s + strlen(s);
  @  @/
  @ void strchrnul_in_range(char *s, char c)
  @ {
  @   if (*s != '\0' && *s != c)
  @     strchrnul_in_range(s + 1, c);
  @ }
  @*/
";

#[test]
fn lemma_body_is_typed_code() {
    let t = checked(IN_RANGE).unwrap();
    let body = t.body("strchrnul_in_range").unwrap();
    let StmtKind::If(c, _, _) = &body[0].kind else { panic!() };
    assert_eq!(c.ty, Some(Ty::Int));
    let ens = &t.contract("strchrnul_in_range").ensures[0];
    assert_eq!(ens.ty, Some(Ty::Bool));
    let e = &t.effects["strchrnul_in_range"];
    assert!(e.is_pure());
}

#[test]
fn logic_function_in_code_is_rejected() {
    let e = checked("size_t f(char *s) { size_t x; x = strlen(s); return x; }").unwrap_err();
    assert!(matches!(e, SemaError::LogicInCode { .. }), "{e}");
}

#[test]
fn logic_only_constructs_in_code() {
    for body in [
        "int x = 0; if (\\valid(s)) x = 1; return x;",
        "integer y = 0; return 0;",
        "if (\\forall integer i; i == i) return 1; return 0;",
        "return valid_str(s) ? 1 : 0;",
    ] {
        let e = checked(&format!("int f(char *s) {{ {body} }}")).unwrap_err();
        assert!(matches!(e, SemaError::LogicInCode { .. }), "{body}: {e}");
    }
}

#[test]
fn ghost_cannot_write_real_state() {
    let e = checked("int g;\n/*@ ghost void h() { g = 1; } */").unwrap_err();
    assert!(matches!(e, SemaError::GhostWritesReal { .. }), "{e}");
    let e = checked("int f(int x) { /*@ ghost x = 1; */ return x; }").unwrap_err();
    assert!(matches!(e, SemaError::GhostWritesReal { .. }), "{e}");
    let e = checked("/*@ ghost void h(char *p) { *p = 'a'; } */").unwrap_err();
    assert!(matches!(e, SemaError::GhostWritesReal { .. }), "{e}");
    checked("/*@ ghost int k; */\nint f(int x) { /*@ ghost k = x; */ return x; }").unwrap();
}

#[test]
fn non_ghost_code_cannot_see_ghost_state() {
    let e = checked("/*@ ghost int k; */\nint f() { return k; }").unwrap_err();
    assert!(matches!(e, SemaError::TypeError { .. }), "{e}");
}

#[test]
fn unresolved_names() {
    let e = checked("int f() { return y; }").unwrap_err();
    assert!(matches!(e, SemaError::UnresolvedName { ref name, .. } if name == "y"));
    let e = checked("/*@ requires nope(x); */ int f(int x) { return x; }").unwrap_err();
    assert!(matches!(e, SemaError::UnresolvedName { ref name, .. } if name == "nope"));
}

#[test]
fn lemma_needs_body_but_may_be_declared_first() {
    let e = checked("/*@ ghost /@ lemma requires \\true; @/ void l(); */").unwrap_err();
    assert!(matches!(e, SemaError::TypeError { .. }));
    checked("/*@ ghost /@ lemma ensures \\true; @/ void l(); */\n/*@ ghost void l() {} */").unwrap();
}

#[test]
fn nullary_logic_symbols_become_applications() {
    let t = checked("/*@ logic integer k = 3; */\n/*@ ensures \\result == k; */ int f() { return 3; }").unwrap();
    let ens = &t.contract("f").ensures[0];
    let ExprKind::Cmp(_, rest) = &ens.kind else { panic!() };
    assert!(matches!(&rest[0].1.kind, ExprKind::Call(n, a) if n == "k" && a.is_empty()));
}

#[test]
fn effect_examples() {
    let t = checked("int g;\nvoid f() { g = 1; }\nvoid h() { f(); }\nvoid p(char *s) { *s = 'a'; }").unwrap();
    assert_eq!(t.effects["f"].writes, BTreeSet::from([Loc::Global("g".into())]));
    assert!(t.effects["h"].writes.contains(&Loc::Global("g".into())));
    assert_eq!(t.effects["p"].writes, BTreeSet::from([Loc::Heap]));
    let t = checked("int g;\n/*@ assigns \\nothing; allocates \\nothing; */ void e();\nvoid q() { e(); }").unwrap();
    assert!(t.effects["q"].is_pure());
}

/// No logic-typed node may sit in an expression evaluated by code.
fn assert_separated(t: &TypedUnit) {
    for (_, f) in t.unit.functions() {
        for s in f.body.iter().flatten() {
            s.walk(&mut |s| {
                let code_exprs: Vec<&Expr> = match &s.kind {
                    StmtKind::While { cond, .. } => vec![cond],
                    _ => s.own_exprs(),
                };
                for e in code_exprs {
                    e.walk(&mut |e| {
                        assert!(!e.ty().is_logic_only(), "{e:?}");
                        assert!(!matches!(
                            e.kind,
                            ExprKind::Quant(..) | ExprKind::Old(_) | ExprKind::Builtin(..) | ExprKind::Call(..)
                        ));
                    });
                }
            });
        }
    }
}

#[test]
fn separation_holds_on_checked_units() {
    let e = checked(&format!("{IN_RANGE}\nvoid bad(char *s) {{ strchrnul_in_range(s, 'a'); }}")).unwrap_err();
    assert!(matches!(e, SemaError::TypeError { .. }), "{e}");
    let t = checked(&format!(
        "{IN_RANGE}\nsize_t len(char *s) {{ char *p = s; /*@ loop invariant s <= p; */ while (*p) p++; //@ ghost strchrnul_in_range(s, 'a');\n return p - s; }}"
    ))
    .unwrap();
    assert_separated(&t);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        /// Transitive writes equal brute-force reachability over the call graph.
        #[test]
        fn effects_match_reachability(
            edges in prop::collection::vec((0usize..6, 0usize..6), 0..12),
            writers in prop::collection::btree_set(0usize..6, 0..3),
        ) {
            let mut src = String::from("int g0; int g1; int g2; int g3; int g4; int g5;\n");
            for f in 0..6 {
                src.push_str(&format!("void f{f}();\n"));
            }
            for f in 0..6 {
                let mut body = String::new();
                if writers.contains(&f) {
                    body.push_str(&format!("g{f} = 1; "));
                }
                for (a, b) in &edges {
                    if *a == f {
                        body.push_str(&format!("f{b}(); "));
                    }
                }
                src.push_str(&format!("void f{f}() {{ {body}}}\n"));
            }
            let t = check(parse_program(&src).unwrap()).unwrap();
            for f in 0..6 {
                // Depth-first search.
                let mut seen = BTreeSet::from([f]);
                let mut stack = vec![f];
                while let Some(x) = stack.pop() {
                    for (a, b) in &edges {
                        if *a == x && seen.insert(*b) {
                            stack.push(*b);
                        }
                    }
                }
                let expect: BTreeSet<Loc> = seen
                    .iter()
                    .filter(|w| writers.contains(w))
                    .map(|w| Loc::Global(format!("g{w}")))
                    .collect();
                prop_assert_eq!(&t.effects[&format!("f{f}")].writes, &expect);
            }
        }
    }
}
