use super::*;
use crate::frontend::ast::{Expr, Item};
use crate::pipeline::{check_source, vcgen_source};
use crate::sema::TypedUnit;
use crate::vcgen::VcOptions;
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

const SKIPPED: &str = r"
/*@ lemma strchr_skipped: \forall char *str, char c, size_t i;
  @   valid_str(str) && strchr(str, c) != \null && 0 <= i < strchr(str, c) - str ==> str[i] != c;
  @*/
";

fn unit(src: &str) -> TypedUnit {
    check_source(src, "t.c").unwrap()
}

/// Body of the logic function or predicate `probe`, typed in context.
fn probe(t: &TypedUnit) -> &Expr {
    t.unit
        .decls
        .iter()
        .find_map(|d| match &d.item {
            Item::Logic(l) if l.name == "probe" => l.body.as_ref(),
            Item::Predicate(p) if p.name == "probe" => p.body.as_ref(),
            _ => None,
        })
        .unwrap()
}

fn bytes(s: &[u8]) -> Vec<i128> {
    s.iter().map(|b| *b as i8 as i128).collect()
}

fn eval_at(t: &TypedUnit, block: &[u8], extra: &[(&str, Value)]) -> (Pointer, Result<Value, OracleError>) {
    let mut mem = Memory::default();
    let s = mem.add_block(&bytes(block));
    let mut vars: BTreeMap<String, Value> = extra.iter().map(|(n, v)| (n.to_string(), *v)).collect();
    vars.insert("s".into(), Value::Ptr(s));
    let interp = Interp::new(t);
    let r = interp.eval_logic(probe(t), &Ctx::new(vars, &mem), mem.total_cells() + 1);
    (s, r)
}

fn chr(c: u8) -> Value {
    Value::Int(c as i8 as i128)
}

// Direct byte-slice versions of the prelude definitions, for comparison.
fn native_strlen(b: &[u8]) -> Option<usize> {
    b.iter().position(|x| *x == 0)
}

fn native_strchrnul(b: &[u8], c: u8) -> Option<usize> {
    b.iter().position(|x| *x == c || *x == 0)
}

#[test]
fn strchrnul_stops_at_the_first_match() {
    let t = unit("/*@ logic char *probe(char *s, char c) = strchrnul(s, c); */");
    let (s, r) = eval_at(&t, b"b\0", &[("c", chr(b'b'))]);
    assert_eq!(r, Ok(Value::Ptr(s)));
}

#[test]
fn strchrnul_stops_at_the_terminator() {
    let t = unit("/*@ logic char *probe(char *s, char c) = strchrnul(s, c); */");
    let (s, r) = eval_at(&t, b"a\0", &[("c", chr(b'b'))]);
    let want = native_strchrnul(b"a\0", b'b').unwrap() as i128;
    assert_eq!(r, Ok(Value::Ptr(s.shift(want))));
    assert_eq!(want, 1);
}

#[test]
fn strlen_counts_to_the_terminator() {
    let t = unit("/*@ logic integer probe(char *s) = strlen(s); */");
    assert_eq!(eval_at(&t, b"abc\0", &[]).1, Ok(Value::Int(3)));
}

#[test]
fn unterminated_strings_trap_or_run_dry() {
    let t = unit("/*@ logic integer probe(char *s) = strlen(s); */");
    assert!(eval_at(&t, b"ab", &[]).1.is_err());
}

#[test]
fn in_range_runs_to_completion() {
    let t = unit(IN_RANGE);
    let mut mem = Memory::default();
    let s = mem.add_block(&bytes(b"ab\0"));
    let interp = Interp::new(&t);
    let st = ConcreteState { mem: mem.clone(), vars: BTreeMap::new() };
    let (result, end) = interp.exec("strchrnul_in_range", vec![Value::Ptr(s), chr(b'b')], st).unwrap();
    assert_eq!(result, None);
    assert_eq!(end.mem, mem);
}

#[test]
fn invalid_dereference_traps() {
    let t = unit("char f(char *p) { return *p; }");
    let interp = Interp::new(&t);
    let r = interp.exec("f", vec![Value::Ptr(Pointer::NULL)], ConcreteState::default());
    assert!(matches!(r, Err(OracleError::Trap(_))), "{r:?}");

    let mut mem = Memory::default();
    let p = mem.add_block(&bytes(b"a"));
    let st = ConcreteState { mem, vars: BTreeMap::new() };
    let r = interp.exec("f", vec![Value::Ptr(p.shift(1))], st);
    assert!(matches!(r, Err(OracleError::Trap(_))), "{r:?}");
}

#[test]
fn overflow_traps_only_when_checked() {
    let t = unit("char f(char x) { return x + 1; }");
    let mut interp = Interp::new(&t);
    let r = interp.exec("f", vec![Value::Int(127)], ConcreteState::default());
    assert!(matches!(r, Err(OracleError::Trap(_))), "{r:?}");
    interp.overflow = false;
    assert!(interp.exec("f", vec![Value::Int(127)], ConcreteState::default()).is_ok());
}

#[test]
fn strchr_skipped_has_no_small_counterexample() {
    let t = unit(SKIPPED);
    let space = SearchSpace::new(3, "ab");
    assert_eq!(space.alphabet, vec![0, b'a', b'b']);
    assert_eq!(falsify_lemma(&t, "strchr_skipped", &space), Ok(None));
}

#[test]
fn strengthened_bound_fails_on_the_empty_string() {
    let src = IN_RANGE.replace("<= s + strlen(s)", "< s + strlen(s)");
    let e = vcgen_source(&src, "t.c", VcOptions::default()).unwrap().0;
    let started = std::time::Instant::now();
    let cx = falsify_lemma(&e.typed, "strchrnul_in_range", &SearchSpace::new(4, "abc")).unwrap().unwrap();
    assert!(started.elapsed().as_secs() < 10);
    let s = cx.bindings.iter().find(|(n, _)| n == "s").unwrap().1.ptr().unwrap();
    assert_eq!(cx.mem.size(s.block), 1);
    assert_eq!(cx.mem.read(s).unwrap(), 0);
}

#[test]
fn trivial_formula_is_never_falsified() {
    let t = unit(r"/*@ lemma triv: \true; */");
    assert_eq!(falsify_lemma(&t, "triv", &SearchSpace::default()), Ok(None));
    assert!(falsify_lemma(&t, "missing", &SearchSpace::default()).is_err());
}

#[test]
fn in_range_vcs_agree_with_execution() {
    let (e, fs) = vcgen_source(IN_RANGE, "t.c", VcOptions::default()).unwrap();
    let f = fs.iter().find(|f| f.function == "strchrnul_in_range").unwrap();
    let ag = crosscheck_wp(&e.typed, f, &SearchSpace::new(2, "ab"), true).unwrap();
    assert!(ag.agrees(), "{ag:?}");
    assert!(ag.vc_valid && ag.exec_valid);
    assert!(ag.admitted > 0);
}

#[test]
fn false_postcondition_is_invalid_on_both_sides() {
    let src = "/*@ requires x >= 0; ensures \\false; */ int f(int x) { return x; }";
    let (e, fs) = vcgen_source(src, "t.c", VcOptions::default()).unwrap();
    let f = fs.iter().find(|f| f.function == "f").unwrap();
    let ag = crosscheck_wp(&e.typed, f, &SearchSpace::new(2, "a"), true).unwrap();
    assert!(ag.agrees(), "{ag:?}");
    assert!(!ag.vc_valid && !ag.exec_valid);
    assert!(ag.vc_witness.is_some() && ag.exec_witness.is_some());
}

fn byte_string() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop::sample::select(vec![0u8, b'a', b'b', b'c']), 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn definitions_match_native_string_functions(block in byte_string(), c in prop::sample::select(vec![b'a', b'b', 0u8])) {
        let t = unit("/*@ logic integer probe(char *s) = strlen(s); */");
        match native_strlen(&block) {
            Some(n) => prop_assert_eq!(eval_at(&t, &block, &[]).1, Ok(Value::Int(n as i128))),
            None => prop_assert!(eval_at(&t, &block, &[]).1.is_err()),
        }
        let t = unit("/*@ logic char *probe(char *s, char c) = strchrnul(s, c); */");
        let (s, r) = eval_at(&t, &block, &[("c", chr(c))]);
        match native_strchrnul(&block, c) {
            Some(k) => prop_assert_eq!(r, Ok(Value::Ptr(s.shift(k as i128)))),
            None => prop_assert!(r.is_err()),
        }
    }

    #[test]
    fn strchrnul_lies_within_the_string(block in byte_string(), c in prop::sample::select(vec![b'a', b'b', 0u8])) {
        let t = unit(r"/*@ predicate probe(char *s, char c) =
            valid_str(s) ==> s <= strchrnul(s, c) <= s + strlen(s); */");
        let (_, r) = eval_at(&t, &block, &[("c", chr(c))]);
        prop_assert_eq!(r.map(Value::truthy), Ok(true));
    }

    #[test]
    fn counterexamples_really_falsify(bound in 0i128..4, strict in any::<bool>()) {
        let rel = if strict { "<" } else { "<=" };
        let src = format!(r"/*@ lemma probe_bound: \forall char *s; valid_str(s) ==> strlen(s) {rel} {bound}; */");
        let t = unit(&src);
        let space = SearchSpace::new(3, "a");
        let f = falsify::lemma_formula(&t, "probe_bound").unwrap();
        let limit = if strict { bound - 1 } else { bound };
        match falsify(&t, f, &space) {
            None => prop_assert!(limit >= 3),
            Some(cx) => {
                let vars = cx.bindings.iter().cloned().collect();
                prop_assert_eq!(Interp::new(&t).holds(f, &Ctx::new(vars, &cx.mem)), Ok(false));
                let s = cx.bindings[0].1.ptr().unwrap();
                prop_assert_eq!(cx.mem.size(s.block) - 1, limit + 1);
            }
        }
    }

    #[test]
    fn ghost_code_leaves_real_state_alone(block in byte_string(), x in 0i128..100) {
        let body = "int n = 0; while (p[n] != '\\0') n = n + 1; return n + x;";
        let plain = format!(r"/*@ requires valid_str(p); */ int f(char *p, int x) {{ {} }}",
            body.replace("while", "/*@ loop invariant 0 <= n; loop variant strlen(p) - n; */ while"));
        let ghosted = format!(r"/*@ ghost int k; */
            /*@ requires valid_str(p); */ int f(char *p, int x) {{ /*@ ghost k = x + 1; */ {} }}",
            body.replace("while", "/*@ loop invariant 0 <= n; loop variant strlen(p) - n; */ while"));
        let run = |src: &str, globals: BTreeMap<String, Value>| {
            let t = unit(src);
            let mut mem = Memory::default();
            let p = mem.add_block(&bytes(&block));
            Interp::new(&t)
                .exec("f", vec![Value::Ptr(p), Value::Int(x)], ConcreteState { mem, vars: globals })
                .map(|(r, st)| (r, st.mem, st.vars.into_iter().filter(|(n, _)| n != "k").collect::<Vec<_>>()))
        };
        let a = run(&plain, BTreeMap::new());
        let b = run(&ghosted, [("k".to_string(), Value::Int(0))].into());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn search_space_enumerates_shortest_first() {
    let s = SearchSpace::new(1, "a");
    assert_eq!(s.blocks(), vec![vec![0], vec![97], vec![0, 0], vec![0, 97], vec![97, 0], vec![97, 97]]);
    assert_eq!(s.ints, vec![-1, 0, 1, 2]);
}
