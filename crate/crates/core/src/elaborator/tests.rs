use super::*;
use crate::frontend::{parse_program, pretty_print, print_expr};
use crate::sema::check;
use proptest::prelude::*;

const DEFS: &str = r"
/*@ axiomatic Str {
  @   predicate valid_str(char *s) = \valid(s) && (*s == '\0' || valid_str(s + 1));
  @   logic integer strlen(char *s) = *s == '\0' ? 0 : 1 + strlen(s + 1);
  @   logic char *strchrnul(char *s, char c) = *s == c ? s : *s == '\0' ? s : strchrnul(s + 1, c);
  @ }
  @*/
";

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

fn typed(src: &str) -> TypedUnit {
    check(parse_program(&format!("{DEFS}{src}")).unwrap()).unwrap()
}

fn elab(src: &str) -> Result<Elaborated, ElabError> {
    elaborate(&typed(src))
}

fn lemma_fn(name: &str) -> String {
    format!(
        "/*@ ghost /@ lemma requires \\true; ensures \\true; @/ void {name}(void) {{ }} */\n"
    )
}

fn requires_of(e: &Elaborated, f: &str) -> Vec<String> {
    let t = check(e.unit.clone()).unwrap();
    t.contract(f).requires.iter().map(print_expr).collect()
}

fn dummies_of(e: &Elaborated, f: &str) -> Vec<String> {
    requires_of(e, f).into_iter().filter(|r| is_dummy(r)).collect()
}

fn names(e: &Elaborated, f: &str) -> LemmaNames {
    e.lemmas.iter().find(|n| n.function == f).unwrap().clone()
}

#[test]
fn in_range_axiom_matches_the_lemma_statement() {
    let t = typed(IN_RANGE);
    let e = elaborate(&t).unwrap();
    let n = names(&e, "strchrnul_in_range");
    let block = e.unit.decls.iter().find(|d| d.name() == n.block).unwrap();
    let Item::Axiomatic(b) = &block.item else { panic!() };
    assert_eq!(b.items.len(), 2);
    let Item::Axiom(ax) = &b.items[1].item else { panic!() };
    assert_eq!(ax.name, n.axiom);
    assert_eq!(
        print_expr(&ax.formula),
        "\\forall char *s, char c; valid_str(s) ==> s <= strchrnul(s, c) <= s + strlen(s)"
    );
    let Item::Predicate(p) = &b.items[0].item else { panic!() };
    assert_eq!(p.name, n.dummy);
    assert!(p.params.is_empty());
    assert_eq!(p.body.as_ref().unwrap().kind, ExprKind::True);
}

#[test]
fn generated_names_follow_the_scheme() {
    let n = LemmaNames::new("a.c", "lemma1");
    assert_eq!(n.hash.len(), 8);
    assert!(n.hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(n.dummy, format!("__lf_ok_lemma1_{}", n.hash));
    assert_eq!(n.axiom, format!("__lf_ax_lemma1_{}", n.hash));
    assert_eq!(n.block, format!("__lf_lemma1_{}", n.hash));
    let other = LemmaNames::new("b.c", "lemma1");
    assert_ne!(n.hash, other.hash);
    assert_ne!(n.block, other.block);
    assert_eq!(n, LemmaNames::new("a.c", "lemma1"));
}

#[test]
fn vacuous_contract_gives_trivial_axiom() {
    let e = elab(&lemma_fn("triv")).unwrap();
    let n = names(&e, "triv");
    let text = pretty_print(&e.unit);
    assert!(text.contains(&format!("axiom {}: \\true ==> \\true;", n.axiom)), "{text}");
}

#[test]
fn result_is_existentially_bound_and_globals_universally() {
    let src = r"
int g;
/*@ ghost /@ lemma requires g >= 0; ensures \result == g; @/
int ret_g(void) { return g; } */
";
    let e = elab(src).unwrap();
    let t = typed(src);
    let info = &t.symbols.functions["ret_g"];
    let globals = BTreeMap::from([("g".to_string(), Ty::Int)]);
    let ax = generate_lemma_axiom(
        "ret_g",
        "ax",
        &info.ret,
        &info.params,
        &t.contract("ret_g"),
        &globals,
        info.pos,
    );
    assert_eq!(
        print_expr(&ax.statement),
        "\\forall int g; \\exists int __lf_result; g >= 0 ==> __lf_result == g"
    );
    assert_eq!(ax.origin, "ret_g");
    assert_eq!(e.lemmas.len(), 1);
}

#[test]
fn old_is_stripped_and_dummies_dropped() {
    let src = r"
/*@ ghost /@ lemma requires \valid(s); ensures \old(*s) == *s; @/ void a(char *s) { } */
/*@ ghost /@ lemma requires \valid(s); ensures *s == *s; @/ void b(char *s) { a(s); } */
";
    let e = elab(src).unwrap();
    let text = pretty_print(&e.unit);
    let na = names(&e, "a");
    let nb = names(&e, "b");
    assert!(text.contains(&format!("axiom {}: \\forall char *s; \\valid(s) ==> *s == *s;", na.axiom)), "{text}");
    assert!(text.contains(&format!("axiom {}: \\forall char *s; \\valid(s) ==> *s == *s;", nb.axiom)), "{text}");
    assert_eq!(dummies_of(&e, "b"), vec![na.dummy]);
}

#[test]
fn injection_follows_position() {
    let e = elab(&format!("{}int f(int x) {{ return x; }}\n", lemma_fn("l1"))).unwrap();
    let n = names(&e, "l1");
    assert_eq!(dummies_of(&e, "f"), vec![n.dummy.clone()]);
    assert!(dummies_of(&e, "l1").is_empty());

    let e = elab(&format!("int f(int x) {{ return x; }}\n{}", lemma_fn("l1"))).unwrap();
    assert!(dummies_of(&e, "f").is_empty());
    let Item::Function(l1) = &e.unit.decls[2].item else { panic!() };
    assert_eq!(l1.contract.assigns, Some(Locations::Nothing));
}

#[test]
fn block_is_inserted_after_the_lemma_definition() {
    let e = elab(&format!("{}int f(int x) {{ return x; }}\n", lemma_fn("l1"))).unwrap();
    let order: Vec<&str> = e.unit.decls.iter().map(|d| d.name()).collect();
    let n = names(&e, "l1");
    assert_eq!(order, vec!["Str", "l1", n.block.as_str(), "f"]);
}

const MUTUAL: &str = r"
/*@ ghost /@ lemma requires n >= 0; decreases n; ensures \true; @/ void a(int n); */
/*@ ghost /@ lemma requires n >= 0; decreases n; ensures \true; @/
void b(int n) { if (n > 0) a(n - 1); } */
/*@ ghost void a(int n) { if (n > 0) b(n - 1); } */
int f(int x) { return x; }
";

#[test]
fn mutual_recursion_forms_one_component_anchored_at_first_definition() {
    let t = typed(MUTUAL);
    let ord = order_lemma_components(&t).unwrap();
    assert_eq!(ord.components.len(), 1);
    assert_eq!(ord.components[0].members, vec!["a", "b"]);
    assert_eq!(ord.components[0].anchor, t.symbols.functions["b"].def_pos.unwrap());

    let e = elaborate(&t).unwrap();
    assert!(dummies_of(&e, "a").is_empty());
    assert!(dummies_of(&e, "b").is_empty());
    let mut expected = vec![names(&e, "a").dummy, names(&e, "b").dummy];
    expected.sort();
    let mut got = dummies_of(&e, "f");
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn chain_is_ordered_callees_first() {
    let src = r"
/*@ ghost /@ lemma ensures \true; @/ void c(void) { } */
/*@ ghost /@ lemma ensures \true; @/ void b(void) { c(); } */
/*@ ghost /@ lemma ensures \true; @/ void a(void) { b(); } */
";
    let t = typed(src);
    let ord = order_lemma_components(&t).unwrap();
    let members: Vec<Vec<String>> = ord.components.iter().map(|c| c.members.clone()).collect();
    assert_eq!(members, vec![vec!["c"], vec!["b"], vec!["a"]]);
    assert!(ord.components.windows(2).all(|w| w[0].anchor < w[1].anchor));
    let e = elaborate(&t).unwrap();
    assert_eq!(dummies_of(&e, "a").len(), 2);
    assert_eq!(dummies_of(&e, "b").len(), 1);
    assert_eq!(dummies_of(&e, "c").len(), 0);
}

#[test]
fn calling_a_later_lemma_is_rejected() {
    let src = format!("void f(void) {{ /*@ ghost l(); */ }}\n{}", lemma_fn("l"));
    let err = elab(&src).unwrap_err();
    let ElabError::ForwardLemmaUse { caller, callee, call_pos, callee_anchor } = &err else {
        panic!("{err}")
    };
    assert_eq!((caller.as_str(), callee.as_str()), ("f", "l"));
    assert!(call_pos < callee_anchor);

    let src = format!("{}void f(void) {{ /*@ ghost l(); */ }}\n", lemma_fn("l"));
    elab(&src).unwrap();
}

#[test]
fn lemma_proof_cannot_rest_on_a_later_function() {
    // `h` is proved with `l`'s axiom in context, so `l` may not use `h`.
    let src = r"
/*@ ghost /@ ensures \true; @/ void h(void); */
/*@ ghost /@ lemma ensures \true; @/ void l(void) { h(); } */
/*@ ghost void h(void) { } */
";
    let err = elab(src).unwrap_err();
    assert!(matches!(&err, ElabError::ForwardLemmaUse { callee, .. } if callee == "h"), "{err}");
}

#[test]
fn conflicting_clauses() {
    let mut c = Contract { assigns: Some(Locations::Nothing), ..Contract::default() };
    enforce_lemma_clauses("l", Pos::default(), &mut c).unwrap();
    let once = c.clone();
    enforce_lemma_clauses("l", Pos::default(), &mut c).unwrap();
    assert_eq!(c, once);
    assert_eq!(c.allocates, Some(Locations::Nothing));
    assert_eq!(c.terminates.as_ref().unwrap().kind, ExprKind::True);

    let src = r"
int g;
/*@ ghost /@ lemma assigns g; ensures \true; @/ void l(void) { } */
";
    let err = elab(src).unwrap_err();
    assert!(matches!(&err, ElabError::ConflictingClause { clause, .. } if clause == "assigns"), "{err}");
    let src = r"/*@ ghost /@ lemma terminates \false; ensures \true; @/ void l(void) { } */";
    let err = elab(src).unwrap_err();
    assert!(matches!(&err, ElabError::ConflictingClause { clause, .. } if clause == "terminates"), "{err}");
}

#[test]
fn impure_lemma_is_rejected() {
    let src = r"
/*@ ghost int gg; */
/*@ ghost /@ lemma ensures \true; @/ void l(void) { gg = 1; } */
";
    let err = elab(src).unwrap_err();
    assert!(matches!(&err, ElabError::ImpureLemma { detail, .. } if detail.contains("gg")), "{err}");
}

#[test]
fn elaborated_units_are_rejected() {
    let e = elab(IN_RANGE).unwrap();
    let again = check(e.unit.clone()).unwrap();
    let err = elaborate(&again).unwrap_err();
    assert!(matches!(err, ElabError::AlreadyElaborated { .. }), "{err}");
}

#[test]
fn elaboration_is_deterministic() {
    let src = format!("{IN_RANGE}{MUTUAL}");
    let a = pretty_print(&elab(&src).unwrap().unit);
    let b = pretty_print(&elab(&src).unwrap().unit);
    assert_eq!(a, b);
}

#[test]
fn elaborated_output_reparses() {
    let e = elab(&format!("{IN_RANGE}{MUTUAL}")).unwrap();
    let text = pretty_print(&e.unit);
    // Nullary predicate applications reparse as names until checked.
    let mut back = check(parse_program(&text).unwrap()).unwrap().unit;
    let mut orig = e.unit.clone();
    back.erase_positions();
    orig.erase_positions();
    assert!(back == orig, "elaborated text does not reparse to the same unit");
}

#[test]
fn closure_examples() {
    let src = format!("{IN_RANGE}int f(int x) {{ return x; }}\n");
    let t = typed(&src);
    let e = elaborate(&t).unwrap();
    let te = check(e.unit.clone()).unwrap();
    let n = names(&e, "strchrnul_in_range");

    let own = compute_import_closure(&te, "strchrnul_in_range");
    assert!(own.units.contains("Str"));
    assert!(!own.units.contains(&n.block));
    assert!(!own.props.contains(&n.axiom));

    let later = compute_import_closure(&te, "f");
    assert!(later.units.contains(&n.block));
    assert!(later.props.contains(&n.axiom));
    // The axiom mentions strchrnul, which pulls in its definition.
    assert!(later.units.contains("Str"));

    let plain = typed("int f(int x) { return x; }");
    assert!(compute_import_closure(&plain, "f").units.is_empty());
}

#[test]
fn standalone_lemmas_are_imported_by_mention() {
    let src = r"
/*@ logic integer sq(integer x) = x * x; */
/*@ lemma sq_pos: \forall integer x; sq(x) >= 0; */
/*@ requires sq(x) >= 0; */
int f(int x) { return x; }
int h(int x) { return x; }
";
    let t = typed(src);
    let c = compute_import_closure(&t, "f");
    assert!(c.units.contains("sq") && c.units.contains("sq_pos"));
    assert!(c.props.contains("sq_pos"));
    assert!(compute_import_closure(&t, "h").units.is_empty());
}

#[test]
fn callee_contracts_feed_the_closure_without_dummies() {
    let src = format!(
        "{IN_RANGE}/*@ requires valid_str(s); */ void callee(char *s);\nvoid caller(char *s) {{ callee(s); }}\n"
    );
    let e = elab(&src).unwrap();
    let te = check(e.unit.clone()).unwrap();
    let c = compute_import_closure(&te, "caller");
    assert!(c.units.contains("Str"));
    // caller is after the lemma, so it gets the lemma through its own dummy
    let n = names(&e, "strchrnul_in_range");
    assert!(c.units.contains(&n.block));
}

/// Naive oracle: repeatedly scan every unit until nothing changes.
fn naive_closure(units: &[ImportUnit], start: &BTreeSet<String>) -> BTreeSet<String> {
    let mut syms = start.clone();
    let mut got = BTreeSet::new();
    for _ in 0..=units.len() {
        for u in units {
            let hit = if u.defines.is_empty() {
                u.mentions.iter().any(|s| syms.contains(s))
            } else {
                u.defines.iter().any(|s| syms.contains(s))
            };
            if hit && got.insert(u.name.clone()) {
                syms.extend(u.defines.iter().cloned());
                syms.extend(u.mentions.iter().cloned());
            }
        }
    }
    got
}

fn arb_units() -> impl Strategy<Value = (Vec<ImportUnit>, BTreeSet<String>)> {
    let sym = (0u8..8).prop_map(|i| format!("s{i}"));
    let set = || proptest::collection::btree_set((0u8..8).prop_map(|i| format!("s{i}")), 0..3);
    let unit = (set(), set());
    (proptest::collection::vec(unit, 0..8), proptest::collection::btree_set(sym, 0..3)).prop_map(
        |(us, start)| {
            let units = us
                .into_iter()
                .enumerate()
                .map(|(i, (defines, mentions))| ImportUnit {
                    name: format!("u{i}"),
                    props: vec![format!("p{i}")],
                    defines,
                    mentions,
                })
                .collect();
            (units, start)
        },
    )
}

proptest! {
    #[test]
    fn closure_is_the_least_fixpoint((units, start) in arb_units()) {
        let c = imports::closure_from(&units, start.clone());
        prop_assert_eq!(&c.units, &naive_closure(&units, &start));
    }

    #[test]
    fn hygiene_over_random_lemma_chains(edges in proptest::collection::vec((0usize..5, 0usize..5), 0..6)) {
        // Lemma i may call lemma j < i; the callee is always defined earlier.
        let mut src = String::new();
        for i in 0..5 {
            let calls: String = edges
                .iter()
                .filter(|(a, b)| *a == i && *b < i)
                .map(|(_, b)| format!("l{b}(); "))
                .collect();
            src.push_str(&format!(
                "/*@ ghost /@ lemma ensures \\true; @/ void l{i}(void) {{ {calls}}} */\n"
            ));
        }
        src.push_str("int f(int x) { return x; }\n");
        let e = elab(&src).unwrap();
        let te = check(e.unit.clone()).unwrap();
        for (i, n) in e.lemmas.iter().enumerate() {
            let own = compute_import_closure(&te, &n.function);
            prop_assert!(!own.props.contains(&n.axiom));
            for later in e.lemmas.iter().skip(i + 1).map(|l| l.function.as_str()).chain(["f"]) {
                prop_assert!(compute_import_closure(&te, later).props.contains(&n.axiom));
            }
        }
    }
}
