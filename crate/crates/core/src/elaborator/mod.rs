//! Lemma-function elaboration.
//!
//! Each lemma function's contract becomes an axiom in a fresh axiomatic
//! block together with an identically true predicate. Every function placed
//! after the lemma (by component anchor) requires that predicate, which pulls
//! the block, and with it the axiom, into its proof context. The lemma itself
//! and its recursive peers never see it.

mod imports;
mod order;

use crate::frontend::ast::*;
use crate::sema::{Loc, TypedUnit};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub use imports::{compute_import_closure, import_units, symbols_in, Closure, ImportUnit};
pub use order::{call_sites, order_lemma_components, Component, OrderingGraph};

/// Prefix of every generated identifier.
pub const RESERVED_PREFIX: &str = "__lf_";
pub const DUMMY_PREFIX: &str = "__lf_ok_";
pub const AXIOM_PREFIX: &str = "__lf_ax_";
pub const RESULT_BINDER: &str = "__lf_result";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("{pos}: lemma function `{name}` is not pure: {detail}")]
    ImpureLemma { pos: Pos, name: String, detail: String },
    #[error("{pos}: lemma function `{name}` has a conflicting `{clause}` clause")]
    ConflictingClause { pos: Pos, name: String, clause: String },
    #[error(
        "{call_pos}: `{caller}` calls `{callee}`, whose proof is anchored later at {callee_anchor}"
    )]
    ForwardLemmaUse { caller: String, call_pos: Pos, callee: String, callee_anchor: Pos },
    #[error("{pos}: `{name}` uses the reserved prefix `__lf_`; the unit is already elaborated")]
    AlreadyElaborated { pos: Pos, name: String },
}

impl ElabError {
    pub fn pos(&self) -> Pos {
        match self {
            ElabError::ImpureLemma { pos, .. }
            | ElabError::ConflictingClause { pos, .. }
            | ElabError::AlreadyElaborated { pos, .. } => *pos,
            ElabError::ForwardLemmaUse { call_pos, .. } => *call_pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedAxiom {
    pub name: String,
    pub statement: Expr,
    /// The lemma function it was generated from.
    pub origin: String,
}

/// Generated names for one lemma function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaNames {
    pub function: String,
    pub hash: String,
    pub block: String,
    pub dummy: String,
    pub axiom: String,
}

impl LemmaNames {
    pub fn new(file: &str, function: &str) -> Self {
        let mut h = Sha256::new();
        h.update(file.as_bytes());
        h.update([0u8]);
        h.update(function.as_bytes());
        let digest = h.finalize();
        let hash: String = digest.iter().take(4).map(|b| format!("{b:02x}")).collect();
        LemmaNames {
            function: function.to_string(),
            block: format!("{RESERVED_PREFIX}{function}_{hash}"),
            dummy: format!("{DUMMY_PREFIX}{function}_{hash}"),
            axiom: format!("{AXIOM_PREFIX}{function}_{hash}"),
            hash,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Elaborated {
    pub unit: SourceUnit,
    pub lemmas: Vec<LemmaNames>,
    pub ordering: OrderingGraph,
}

pub fn is_dummy(name: &str) -> bool {
    name.starts_with(DUMMY_PREFIX)
}

fn function_decl_mut(unit: &mut SourceUnit, idx: usize) -> &mut FunctionDecl {
    match &mut unit.decls[idx].item {
        Item::Function(f) => f,
        _ => unreachable!("function index points at a non-function"),
    }
}

fn reject_reserved(unit: &SourceUnit) -> Result<(), ElabError> {
    fn check(d: &Decl) -> Result<(), ElabError> {
        if d.name().starts_with(RESERVED_PREFIX) {
            return Err(ElabError::AlreadyElaborated { pos: d.pos, name: d.name().to_string() });
        }
        if let Item::Axiomatic(a) = &d.item {
            a.items.iter().try_for_each(check)?;
        }
        Ok(())
    }
    unit.decls.iter().try_for_each(check)
}

/// Adds `assigns \nothing`, `allocates \nothing` and `terminates \true`,
/// rejecting user clauses that say otherwise.
pub fn enforce_lemma_clauses(name: &str, pos: Pos, c: &mut Contract) -> Result<(), ElabError> {
    let conflict = |clause: &str| ElabError::ConflictingClause {
        pos,
        name: name.to_string(),
        clause: clause.to_string(),
    };
    for (slot, clause) in [(&mut c.assigns, "assigns"), (&mut c.allocates, "allocates")] {
        match slot {
            None => *slot = Some(Locations::Nothing),
            Some(Locations::Nothing) => {}
            Some(_) => return Err(conflict(clause)),
        }
    }
    match &c.terminates {
        None => c.terminates = Some(Expr::new(ExprKind::True, pos)),
        Some(e) if matches!(e.kind, ExprKind::True) => {}
        Some(_) => return Err(conflict("terminates")),
    }
    Ok(())
}

fn strip_old(e: &mut Expr) {
    e.walk_mut(&mut |e| {
        if let ExprKind::Old(inner) = &mut e.kind {
            let mut inner = std::mem::replace(inner.as_mut(), Expr::new(ExprKind::True, e.pos));
            strip_old(&mut inner);
            *e = inner;
        }
    });
}

/// Globals read by an expression (C globals, not bound names).
fn read_globals(e: &Expr, globals: &BTreeMap<String, Ty>, out: &mut BTreeSet<String>) {
    fn go(e: &Expr, bound: &mut Vec<String>, g: &BTreeMap<String, Ty>, out: &mut BTreeSet<String>) {
        match &e.kind {
            ExprKind::Var(v) if g.contains_key(v) && !bound.contains(v) => {
                out.insert(v.clone());
            }
            ExprKind::Quant(_, bs, body) => {
                let n = bound.len();
                bound.extend(bs.iter().map(|b| b.name.clone()));
                go(body, bound, g, out);
                bound.truncate(n);
            }
            _ => e.children().into_iter().for_each(|c| go(c, bound, g, out)),
        }
    }
    go(e, &mut Vec::new(), globals, out);
}

/// Builds `∀ params, globals; [∃ result;] R ⇒ E` from a lemma contract.
pub fn generate_lemma_axiom(
    name: &str,
    axiom_name: &str,
    ret: &Ty,
    params: &[Param],
    contract: &Contract,
    globals: &BTreeMap<String, Ty>,
    pos: Pos,
) -> GeneratedAxiom {
    let requires: Vec<Expr> =
        contract.requires.iter().filter(|e| !mentions_dummy(e)).cloned().collect();
    let mut ensures: Vec<Expr> = contract.ensures.clone();
    for e in ensures.iter_mut() {
        strip_old(e);
        e.walk_mut(&mut |e| {
            if matches!(e.kind, ExprKind::Result) {
                e.kind = ExprKind::Var(RESULT_BINDER.to_string());
            }
        });
    }
    let mut read = BTreeSet::new();
    for e in requires.iter().chain(ensures.iter()) {
        read_globals(e, globals, &mut read);
    }
    let r = Expr::conj(requires, pos);
    let e = Expr::conj(ensures, pos);
    let mut body = Expr::binary(BinOp::Implies, r, e);
    if *ret != Ty::Void {
        let binder = Param::new(ret.clone(), RESULT_BINDER);
        body = Expr::new(ExprKind::Quant(Quantifier::Exists, vec![binder], Box::new(body)), pos);
    }
    let mut binders: Vec<Param> = params.to_vec();
    binders.extend(read.iter().map(|g| Param::new(globals[g].clone(), g)));
    if !binders.is_empty() {
        body = Expr::new(ExprKind::Quant(Quantifier::Forall, binders, Box::new(body)), pos);
    }
    erase_types(&mut body);
    GeneratedAxiom { name: axiom_name.to_string(), statement: body, origin: name.to_string() }
}

fn erase_types(e: &mut Expr) {
    e.walk_mut(&mut |e| e.ty = None);
}

fn mentions_dummy(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |e| {
        if let ExprKind::Call(f, _) = &e.kind {
            found |= is_dummy(f);
        }
    });
    found
}

/// The fresh axiomatic block holding the dummy predicate and the axiom.
pub fn synthesize_import_block(names: &LemmaNames, ax: &GeneratedAxiom, pos: Pos) -> Decl {
    let dummy = Decl {
        pos,
        item: Item::Predicate(PredicateDecl {
            name: names.dummy.clone(),
            params: vec![],
            body: Some(Expr::new(ExprKind::True, pos)),
        }),
    };
    let axiom = Decl {
        pos,
        item: Item::Axiom(PropDecl { name: ax.name.clone(), formula: ax.statement.clone() }),
    };
    Decl { pos, item: Item::Axiomatic(AxiomaticBlock { name: names.block.clone(), items: vec![dummy, axiom] }) }
}

/// Anchor of a function: its component anchor if it is a lemma function,
/// otherwise its definition (or first declaration when bodiless).
pub fn function_anchor(t: &TypedUnit, ord: &OrderingGraph, name: &str) -> Pos {
    if let Some(&c) = ord.component_of.get(name) {
        return ord.components[c].anchor;
    }
    let f = &t.symbols.functions[name];
    f.def_pos.unwrap_or(f.pos)
}

pub fn elaborate(t: &TypedUnit) -> Result<Elaborated, ElabError> {
    reject_reserved(&t.unit)?;
    let ord = order_lemma_components(t)?;
    let mut unit = t.unit.clone();
    let globals: BTreeMap<String, Ty> =
        t.symbols.globals.iter().map(|(k, g)| (k.clone(), g.ty.clone())).collect();

    let mut lemmas = Vec::new();
    // Blocks to insert after a given decl index.
    let mut inserts: BTreeMap<usize, Vec<Decl>> = BTreeMap::new();
    for comp in &ord.components {
        let anchor_decl = comp
            .members
            .iter()
            .map(|m| t.symbols.functions[m].def.unwrap())
            .min()
            .unwrap();
        let mut members: Vec<&String> = comp.members.iter().collect();
        members.sort_by_key(|m| t.symbols.functions[*m].def_pos);
        for m in members {
            let info = &t.symbols.functions[m];
            let def_pos = info.def_pos.unwrap();
            let cidx = info.contract_decl.unwrap_or(info.def.unwrap());
            let contract = &mut function_decl_mut(&mut unit, cidx).contract;
            enforce_lemma_clauses(m, def_pos, contract)?;
            let eff = &t.effects[m];
            if !eff.is_pure() {
                let detail = eff
                    .writes
                    .iter()
                    .map(|l| match l {
                        Loc::Global(g) => format!("writes `{g}`"),
                        Loc::Heap => "writes memory".to_string(),
                    })
                    .chain(eff.allocates.then(|| "may allocate".to_string()))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(ElabError::ImpureLemma { pos: def_pos, name: m.clone(), detail });
            }
            let file = t.unit.files.get(def_pos.file as usize).map(String::as_str).unwrap_or("");
            let names = LemmaNames::new(file, m);
            let ax = generate_lemma_axiom(m, &names.axiom, &info.ret, &info.params, contract, &globals, def_pos);
            inserts.entry(anchor_decl).or_default().push(synthesize_import_block(&names, &ax, def_pos));
            lemmas.push((comp.anchor, names));
        }
    }

    inject_import_preconditions(t, &ord, &mut unit, &lemmas);

    let mut decls = Vec::with_capacity(unit.decls.len() + lemmas.len());
    for (i, d) in std::mem::take(&mut unit.decls).into_iter().enumerate() {
        decls.push(d);
        if let Some(extra) = inserts.remove(&i) {
            decls.extend(extra);
        }
    }
    unit.decls = decls;
    for d in unit.decls.iter_mut() {
        erase_decl_types(d);
    }
    Ok(Elaborated { unit, lemmas: lemmas.into_iter().map(|(_, n)| n).collect(), ordering: ord })
}

fn erase_decl_types(d: &mut Decl) {
    match &mut d.item {
        Item::Function(f) => {
            f.contract.exprs_mut().into_iter().for_each(erase_types);
            for s in f.body.iter_mut().flatten() {
                s.walk_mut(&mut |s| s.own_exprs_mut().into_iter().for_each(erase_types));
            }
        }
        Item::Global(g) => g.init.iter_mut().for_each(erase_types),
        Item::Logic(l) => l.body.iter_mut().for_each(erase_types),
        Item::Predicate(p) => p.body.iter_mut().for_each(erase_types),
        Item::Lemma(p) | Item::Axiom(p) => erase_types(&mut p.formula),
        Item::Axiomatic(a) => a.items.iter_mut().for_each(erase_decl_types),
    }
}

/// Adds `requires __lf_ok_L` to every function anchored strictly after L's
/// component.
pub fn inject_import_preconditions(
    t: &TypedUnit,
    ord: &OrderingGraph,
    unit: &mut SourceUnit,
    lemmas: &[(Pos, LemmaNames)],
) {
    for f in t.functions_in_order() {
        let anchor = function_anchor(t, ord, &f.name);
        let idx = f.contract_decl.or(f.def).unwrap_or(f.decls[0]);
        let pos = unit.decls[idx].pos;
        let contract = &mut function_decl_mut(unit, idx).contract;
        for (lemma_anchor, names) in lemmas {
            if *lemma_anchor < anchor {
                contract.requires.push(Expr::new(ExprKind::Call(names.dummy.clone(), vec![]), pos));
            }
        }
    }
}

#[cfg(test)]
mod tests;
