use super::*;
use crate::pipeline::vcgen_source;
use proptest::prelude::*;

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

fn vcs_with(src: &str, opts: VcOptions) -> Vec<FunctionVcs> {
    vcgen_source(src, "t.c", opts).unwrap().1
}

fn vcs_of(src: &str, f: &str) -> Vec<Vc> {
    vcs_with(src, VcOptions::default()).into_iter().find(|v| v.function == f).unwrap().vcs
}

fn of_kind(vcs: &[Vc], k: VcKind) -> Vec<&Vc> {
    vcs.iter().filter(|v| v.kind == k).collect()
}

fn hyps(v: &Vc) -> Vec<String> {
    v.hypotheses.iter().map(|h| h.to_string()).collect()
}

#[test]
fn skip_leaves_the_postcondition_unchanged() {
    let vcs = vcs_of("/*@ requires 0 <= x; ensures 0 <= x; */ void f(int x) { ; }", "f");
    assert_eq!(vcs.len(), 1);
    assert_eq!(vcs[0].name, "f.Post.0");
    assert_eq!(vcs[0].goal.to_string(), "0 <= x");
    assert!(hyps(&vcs[0]).contains(&"0 <= x".to_string()));
}

#[test]
fn conditionals_split_on_the_guard() {
    let src = "/*@ ensures \\result >= 0; */ int f(int x) { if (x > 0) return x; else return 0; }";
    let vcs = vcs_of(src, "f");
    let post = of_kind(&vcs, VcKind::Post);
    assert_eq!(post.len(), 2);
    assert!(hyps(post[0]).contains(&"0 < x".to_string()), "{:?}", hyps(post[0]));
    assert_eq!(post[0].goal.to_string(), "0 <= x");
    assert!(hyps(post[1]).contains(&"not 0 < x".to_string()), "{:?}", hyps(post[1]));
    assert_eq!(post[1].goal.to_string(), "0 <= 0");
}

#[test]
fn in_range_obligations() {
    let vcs = vcs_of(IN_RANGE, "strchrnul_in_range");
    let names: Vec<&str> = vcs.iter().map(|v| v.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "strchrnul_in_range.Post.0",
            "strchrnul_in_range.Post.1",
            "strchrnul_in_range.CallPre.0",
            "strchrnul_in_range.RecDecrease.0",
            "strchrnul_in_range.Safety.0",
            "strchrnul_in_range.Safety.1",
            "strchrnul_in_range.Terminates.0",
        ]
    );
    let rec = of_kind(&vcs, VcKind::RecDecrease)[0];
    assert_eq!(rec.goal.to_string(), "strlen(shift(s, 1), $H, $A) < strlen(s, $H, $A) && 0 <= strlen(s, $H, $A)");
    let h = hyps(rec);
    for want in ["valid_str(s, $H, $A)", "not $H[s] == 0", "not $H[s] == c"] {
        assert!(h.contains(&want.to_string()), "missing {want} in {h:?}");
    }
    assert_eq!(of_kind(&vcs, VcKind::Terminates)[0].goal, Term::Bool(true));
    assert!(of_kind(&vcs, VcKind::Assigns).is_empty());
}

#[test]
fn the_base_case_needs_no_callee_facts() {
    let vcs = vcs_of(IN_RANGE, "strchrnul_in_range");
    let base = &of_kind(&vcs, VcKind::Post)[1];
    assert!(hyps(base).iter().all(|h| !h.contains("shift(s, 1)")));
    assert!(hyps(base).contains(&"not (not $H[s] == 0 && not $H[s] == c)".to_string()));
}

#[test]
fn empty_lemma_has_one_trivial_obligation() {
    let src = "/*@ ghost /@ lemma requires 0 <= n; ensures \\true; @/ void l(int n) { } */";
    let vcs = vcs_of(src, "l");
    assert_eq!(vcs.len(), 1);
    assert_eq!(vcs[0].kind, VcKind::Post);
    assert_eq!(vcs[0].goal, Term::Bool(true));
    assert!(hyps(&vcs[0]).contains(&"0 <= n".to_string()));
}

const GEN: &str = r"
/*@ predicate P(integer v) = 0 <= v * v; */
/*@ ghost
  @ /@ lemma
  @  @ requires v1 <= v < v2;
  @  @ ensures P(v);
  @  @/
  @ void aux(int v1, int v2, int v) { }
  @*/
/*@ ghost
  @ /@ lemma
  @  @ requires v1 <= v2;
  @  @ ensures \forall integer v; v1 <= v < v2 ==> P(v);
  @  @/
  @ void gen(int v1, int v2)
  @ {
  @   /@ loop invariant v1 <= i <= v2;
  @    @ loop invariant \forall integer j; v1 <= j < i ==> P(j);
  @    @ loop variant v2 - i;
  @    @/
  @   for (int i = v1; i < v2; i++)
  @     aux(v1, v2, i);
  @ }
  @*/
";

#[test]
fn generalization_loop_obligations() {
    let vcs = vcs_of(GEN, "gen");
    let init = of_kind(&vcs, VcKind::LoopInvInit);
    assert_eq!(init.len(), 2);
    assert_eq!(init[0].goal.to_string(), "v1 <= v1 && v1 <= v2");
    assert_eq!(init[1].goal.to_string(), "forall j:int. v1 <= j && j < v1 ==> P(j)");
    let keep = of_kind(&vcs, VcKind::LoopInvPreserve);
    assert_eq!(keep.len(), 2);
    // The callee's postcondition is available at the loop's end.
    assert!(keep.iter().all(|v| hyps(v).iter().any(|h| h.starts_with("P(") && !h.contains("forall"))), "{keep:?}");
    assert_eq!(of_kind(&vcs, VcKind::VariantDecrease).len(), 1);
    assert_eq!(of_kind(&vcs, VcKind::VariantNonneg).len(), 1);
    assert_eq!(of_kind(&vcs, VcKind::CallPre).len(), 1);
}

#[test]
fn loops_need_invariants() {
    let src = "void f(int n) { int i = 0; while (i < n) i = i + 1; }";
    let e = vcgen_source(src, "t.c", VcOptions::default()).err().unwrap();
    assert!(e.to_string().contains("no loop invariant"), "{e}");
    let src = "/*@ ghost /@ lemma ensures \\true; @/ void l(int n) { int i = 0; /@ loop invariant 0 <= i; @/ while (i < n) i = i + 1; } */";
    let e = vcgen_source(src, "t.c", VcOptions::default()).err().unwrap();
    assert!(e.to_string().contains("no loop variant"), "{e}");
}

#[test]
fn recursion_needs_a_measure() {
    let src = "void f(int n) { if (n > 0) f(n - 1); }";
    let e = vcgen_source(src, "t.c", VcOptions::default()).err().unwrap();
    assert!(matches!(e, crate::pipeline::PipelineError::Vc(VcError::MissingDecreases { .. })), "{e}");
}

#[test]
fn dereferences_need_valid_pointers() {
    let vcs = vcs_of("char f(char *s) { return *s; }", "f");
    let safety = of_kind(&vcs, VcKind::Safety);
    assert_eq!(safety.len(), 1);
    assert_eq!(safety[0].goal.to_string(), "valid($A, s)");

    assert!(of_kind(&vcs_of("int f() { return 0; }", "f"), VcKind::Safety).is_empty());

    let src = "/*@ requires valid_str(s); */ char f(char *s) { if (*s != '\\0') return s[1]; return 0; }";
    let safety = vcs_of(src, "f").into_iter().filter(|v| v.kind == VcKind::Safety).collect::<Vec<_>>();
    assert_eq!(safety.len(), 2);
    assert_eq!(safety[1].goal.to_string(), "valid($A, shift(s, 1))");
    assert!(hyps(&safety[1]).contains(&"not $H[s] == 0".to_string()));
}

#[test]
fn overflow_checks_follow_the_flag() {
    let src = "int f(int x) { return x + 1; }";
    let on = vcs_with(src, VcOptions { overflow: true });
    let off = vcs_with(src, VcOptions { overflow: false });
    assert_eq!(of_kind(&on[0].vcs, VcKind::Safety).len(), 1);
    assert!(of_kind(&off[0].vcs, VcKind::Safety).is_empty());
}

#[test]
fn assigns_checks_only_for_listed_frames() {
    let src = "int g; int h;\n/*@ assigns g; */ void f() { g = 1; h = 2; }";
    // Writes to listed globals are settled syntactically.
    let vcs = vcs_of(src, "f");
    let assigns = of_kind(&vcs, VcKind::Assigns);
    assert_eq!(assigns.len(), 1);
    assert_eq!(assigns[0].goal, Term::Bool(false));
    let src = "/*@ assigns *p; */ void f(char *p, char *q) { *p = 'a'; *q = 'b'; }";
    let goals: Vec<String> = of_kind(&vcs_of(src, "f"), VcKind::Assigns).iter().map(|v| v.goal.to_string()).collect();
    assert_eq!(goals, ["p == p", "q == p"]);
    let src = "int g;\nvoid f() { g = 1; }";
    assert!(of_kind(&vcs_of(src, "f"), VcKind::Assigns).is_empty());
}

const FRAME: &str = r"
int g;
/*@ assigns \nothing; */ void keep(void);
/*@ assigns g; */ void touch(void);
/*@ requires \valid(s) && *s == 'a' && g == 1;
  @ ensures *s == 'a' && g == 1;
  @*/
void f(char *s) { CALL(); }
";

fn fresh_state(vcs: &[Vc]) -> Vec<String> {
    vcs.iter()
        .flat_map(|v| v.consts.keys())
        .filter(|n| n.starts_with("$H@") || n.starts_with("g@"))
        .cloned()
        .collect()
}

#[test]
fn calls_without_effects_keep_the_state() {
    let vcs = vcs_of(&FRAME.replace("CALL", "keep"), "f");
    assert!(fresh_state(&vcs).is_empty(), "{:?}", fresh_state(&vcs));
    let post = of_kind(&vcs, VcKind::Post)[0];
    assert!(hyps(post).contains(&"$H[s] == 97".to_string()));
    assert!(hyps(post).contains(&"g == 1".to_string()));
    assert_eq!(post.goal.to_string(), "$H[s] == 97 && g == 1");

    let vcs = vcs_of(&FRAME.replace("CALL", "touch"), "f");
    assert!(fresh_state(&vcs).iter().any(|n| n.starts_with("g@")));
    assert!(!fresh_state(&vcs).iter().any(|n| n.starts_with("$H@")));
}

const OTHERS: [&str; 4] = [
    "int other(int y) { return y; }",
    "int other(int y) { if (y > 0) return y; return 0; }",
    "/*@ requires y >= 0; ensures \\result >= 0; */ int other(int y) { return y + 1; }",
    "char other(char *p) { return *p; }",
];

proptest! {
    #[test]
    fn unrelated_edits_keep_names(a in 0..OTHERS.len(), b in 0..OTHERS.len()) {
        let names = |other: &str| -> Vec<String> {
            let src = format!("{other}\n{IN_RANGE}");
            vcs_of(&src, "strchrnul_in_range").into_iter().map(|v| v.name).collect()
        };
        prop_assert_eq!(names(OTHERS[a]), names(OTHERS[b]));
    }
}

#[test]
fn generation_is_deterministic() {
    let a = vcs_with(GEN, VcOptions::default());
    let b = vcs_with(GEN, VcOptions::default());
    assert_eq!(a, b);
    let order: Vec<&str> = a.iter().map(|f| f.function.as_str()).collect();
    assert_eq!(order, ["aux", "gen"]);
}
