use super::is_dummy;
use crate::frontend::ast::*;
use crate::sema::TypedUnit;
use std::collections::BTreeSet;

/// A unit of on-demand import: an axiomatic block, or a top-level logic
/// declaration standing alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportUnit {
    pub name: String,
    /// Logic symbols defined here.
    pub defines: BTreeSet<String>,
    /// Axioms and lemmas stated here.
    pub props: Vec<String>,
    /// Logic symbols occurring in definitions and formulas.
    pub mentions: BTreeSet<String>,
}

/// What a proof context imports.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Closure {
    pub units: BTreeSet<String>,
    pub symbols: BTreeSet<String>,
    pub props: BTreeSet<String>,
}

pub fn symbols_in(e: &Expr, out: &mut BTreeSet<String>) {
    e.walk(&mut |e| {
        if let ExprKind::Call(f, _) = &e.kind {
            out.insert(f.clone());
        }
    });
}

fn add_item(d: &Decl, u: &mut ImportUnit) {
    match &d.item {
        Item::Logic(l) => {
            u.defines.insert(l.name.clone());
            if let Some(b) = &l.body {
                symbols_in(b, &mut u.mentions);
            }
        }
        Item::Predicate(p) => {
            u.defines.insert(p.name.clone());
            if let Some(b) = &p.body {
                symbols_in(b, &mut u.mentions);
            }
        }
        Item::Lemma(p) | Item::Axiom(p) => {
            u.props.push(p.name.clone());
            symbols_in(&p.formula, &mut u.mentions);
        }
        Item::Axiomatic(a) => a.items.iter().for_each(|d| add_item(d, u)),
        Item::Function(_) | Item::Global(_) => {}
    }
}

pub fn import_units(unit: &SourceUnit) -> Vec<ImportUnit> {
    let mut out = Vec::new();
    for d in &unit.decls {
        if matches!(d.item, Item::Function(_) | Item::Global(_)) {
            continue;
        }
        let mut u = ImportUnit {
            name: d.name().to_string(),
            defines: BTreeSet::new(),
            props: vec![],
            mentions: BTreeSet::new(),
        };
        add_item(d, &mut u);
        out.push(u);
    }
    out
}

/// Least fixpoint: a unit is imported once any symbol it defines occurs in
/// the context; a standalone lemma once any symbol it mentions does.
pub fn closure_from(units: &[ImportUnit], start: BTreeSet<String>) -> Closure {
    let mut c = Closure { symbols: start, ..Closure::default() };
    loop {
        let mut changed = false;
        for u in units {
            if c.units.contains(&u.name) {
                continue;
            }
            let trigger = if u.defines.is_empty() { &u.mentions } else { &u.defines };
            if trigger.iter().any(|s| c.symbols.contains(s)) {
                c.units.insert(u.name.clone());
                c.symbols.extend(u.defines.iter().cloned());
                c.symbols.extend(u.mentions.iter().cloned());
                c.props.extend(u.props.iter().cloned());
                changed = true;
            }
        }
        if !changed {
            return c;
        }
    }
}

/// Symbols a function's proof obligations mention: its own annotations plus
/// the contracts of its direct callees (whose generated predicates are left
/// out, as they are never checked at call sites).
pub fn start_symbols(t: &TypedUnit, name: &str) -> BTreeSet<String> {
    let mut s = BTreeSet::new();
    if let Some(c) = t.contract_ref(name) {
        c.exprs().into_iter().for_each(|e| symbols_in(e, &mut s));
    }
    let mut callees = BTreeSet::new();
    for st in t.body(name).into_iter().flatten() {
        st.walk(&mut |st| match &st.kind {
            StmtKind::While { annot, .. } => {
                annot.invariants.iter().chain(annot.variant.iter()).for_each(|e| symbols_in(e, &mut s));
            }
            StmtKind::Call { func, .. } => {
                callees.insert(func.clone());
            }
            _ => {}
        });
    }
    for callee in callees {
        if let Some(c) = t.contract_ref(&callee) {
            let mut cs = BTreeSet::new();
            c.exprs().into_iter().for_each(|e| symbols_in(e, &mut cs));
            s.extend(cs.into_iter().filter(|x| !is_dummy(x)));
        }
    }
    s
}

pub fn compute_import_closure(t: &TypedUnit, name: &str) -> Closure {
    closure_from(&import_units(&t.unit), start_symbols(t, name))
}
