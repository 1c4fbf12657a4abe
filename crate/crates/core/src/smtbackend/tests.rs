use super::*;
use crate::pipeline::vcgen_source;
use crate::vcgen::VcOptions;

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

fn units(src: &str) -> Vec<FunctionVcs> {
    vcgen_source(src, "t.c", VcOptions::default()).unwrap().1
}

fn script(src: &str, vc: &str) -> String {
    let us = units(src);
    let f = us.iter().find(|f| f.vcs.iter().any(|v| v.name == vc)).unwrap();
    encode(f, f.vcs.iter().find(|v| v.name == vc).unwrap()).unwrap()
}

#[test]
fn trivial_goal_is_unsat() {
    let s = script("/*@ ghost /@ lemma ensures \\true; @/ void l(void) { } */", "l.Post.0");
    assert!(s.contains("(assert (not true))"), "{s}");
    let v = run_solver(&s, &SolverConfig { timeout_s: 5.0, ..SolverConfig::default() });
    assert_eq!(v.status, Status::Proved, "{v:?}");
    assert!(v.time_s < 5.0);
}

#[test]
fn falsifiable_goal_is_refuted_with_a_model() {
    let s = script("/*@ ensures \\result > 0; */ int f(int x) { return x; }", "f.Post.0");
    let v = run_solver(&s, &SolverConfig::default());
    assert_eq!(v.status, Status::Refuted, "{v:?}");
    assert!(v.detail.unwrap().contains("define-fun"));
}

#[test]
fn absurd_budgets_time_out() {
    let s = script(IN_RANGE, "strchrnul_in_range.Post.0");
    let v = run_solver(&s, &SolverConfig { timeout_s: 0.001, ..SolverConfig::default() });
    assert_eq!(v.status, Status::Timeout, "{v:?}");
}

#[test]
fn missing_solver_is_an_error() {
    let v = run_solver("(check-sat)", &SolverConfig { command: "no-such-solver-here".into(), timeout_s: 1.0 });
    assert_eq!(v.status, Status::SolverError);
    let v = run_solver("(check-sat)", &SolverConfig { command: "  ".into(), timeout_s: 1.0 });
    assert_eq!(v.status, Status::SolverError);
}

#[test]
fn base_case_is_proved_by_unfolding() {
    let s = script(IN_RANGE, "strchrnul_in_range.Post.1");
    assert!(s.contains("; strchrnul_def"));
    assert_eq!(run_solver(&s, &SolverConfig::default()).status, Status::Proved);
}

#[test]
fn rec_decrease_script_carries_the_length_definition() {
    let s = script(IN_RANGE, "strchrnul_in_range.RecDecrease.0");
    assert!(s.starts_with("; strchrnul_in_range.RecDecrease.0\n"));
    for want in ["(set-logic ALL)", "; strlen_def", "; strlen_nonneg", "(declare-fun strlen (lf.Ptr (Array lf.Ptr Int) (Array Int Int)) Int)"] {
        assert!(s.contains(want), "missing {want}");
    }
    assert!(s.ends_with("(check-sat)\n(get-model)\n"));
    assert_eq!(run_solver(&s, &SolverConfig::default()).status, Status::Proved);
}

#[test]
fn own_axiom_stays_out_of_context() {
    for f in units(IN_RANGE).iter().filter(|f| f.function == "strchrnul_in_range") {
        for vc in &f.vcs {
            let s = encode(f, vc).unwrap();
            assert!(!s.contains("__lf_"), "{}", vc.name);
        }
    }
}

#[test]
fn empty_unit_gives_an_empty_report() {
    let r = discharge_all(&[], &DischargeConfig::default());
    assert!(r.functions.is_empty() && r.all_proved());
    assert_eq!(r.to_json(), "{\n  \"functions\": []\n}");
    assert_eq!(r.to_text(), "0/0 VCs proved\n");
}

#[test]
fn whole_lemma_discharges_and_replays() {
    let us = units(IN_RANGE);
    let r = discharge_all(&us, &DischargeConfig { jobs: 2, ..DischargeConfig::default() });
    assert!(r.all_proved(), "{}", r.to_text());
    let f = r.functions.iter().find(|f| f.name == "strchrnul_in_range").unwrap();
    assert_eq!(f.vcs.len(), 7);
    for v in &f.vcs {
        assert!(v.time_s <= 5.0);
        assert_eq!(run_solver(&v.script, &SolverConfig::default()).status, v.status, "{}", v.name);
    }
}

#[test]
fn mutated_postcondition_fails() {
    let src = IN_RANGE.replace("<= s + strlen(s)", "< s + strlen(s)");
    let solver = SolverConfig { timeout_s: 2.0, ..SolverConfig::default() };
    let r = discharge_all(&units(&src), &DischargeConfig { solver, ..DischargeConfig::default() });
    assert!(!r.all_proved());
    let f = r.functions.iter().find(|f| f.name == "strchrnul_in_range").unwrap();
    assert!(!f.proved());
    assert!(f.vcs.iter().any(|v| v.kind == VcKind::Post && v.status != Status::Proved));
}

#[test]
fn cached_runs_are_byte_identical() {
    let dir = std::env::temp_dir().join(format!("lf-cache-{}", std::process::id()));
    let cfg = DischargeConfig { cache: Some(Cache { dir: dir.clone() }), ..DischargeConfig::default() };
    let us = units(IN_RANGE);
    let a = discharge_all(&us, &cfg).to_json();
    let b = discharge_all(&us, &cfg).to_json();
    assert_eq!(a, b);
    let parsed = parse_json_report(&a).unwrap();
    assert!(parsed.iter().all(|(_, _, s)| *s == Status::Proved));
    assert!(parsed.iter().any(|(f, v, _)| f == "strchrnul_in_range" && v == "strchrnul_in_range.Terminates.0"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn cache_keys_separate_solvers() {
    assert_ne!(Cache::key("z3 -in", "x"), Cache::key("cvc5", "x"));
    assert_ne!(Cache::key("a", "bc"), Cache::key("ab", "c"));
    assert_eq!(Cache::key("a", "b").len(), 64);
}

#[test]
fn text_columns_line_up() {
    let vc = |name: &str| VcResult {
        name: name.into(),
        kind: VcKind::Post,
        status: Status::Proved,
        time_s: 0.25,
        detail: None,
        script: String::new(),
    };
    let r = Report {
        functions: vec![
            FunctionReport { name: "f".into(), vcs: vec![vc("f.Post.0"), vc("f.Safety.12")] },
            FunctionReport { name: "a_rather_long_function_name".into(), vcs: vec![vc("a.Post.0")] },
        ],
    };
    let text = r.to_text();
    let lines: Vec<&str> = text.lines().collect();
    let col = |l: &str| l.find("Proved").unwrap();
    assert!(lines[..5].iter().all(|l| col(l) == col(lines[0])), "{text}");
    assert_eq!(lines[5], "3/3 VCs proved");
}

#[test]
fn preamble_block_bound_matches_the_model() {
    let bound = crate::vcgen::term::MAX_BLOCK.to_string();
    assert!(encode::PREAMBLE.contains(&format!("(<= (select a (lf.blk p)) {bound})")));
}
