//! Verification conditions by weakest precondition over a block/offset
//! memory model.

pub mod split;
pub mod term;
pub mod theory;
pub mod translate;
pub mod wp;

#[cfg(test)]
mod tests;

use crate::elaborator::call_sites;
use crate::frontend::ast::Pos;
use crate::sema::TypedUnit;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub use term::{Sort, Term, VcKind};
pub use theory::{Axiom, FunDecl, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VcError {
    #[error("{pos}: loop in `{function}` has no loop invariant")]
    MissingLoopInvariant { function: String, pos: Pos },
    #[error("{pos}: loop in lemma function `{function}` has no loop variant")]
    MissingLoopVariant { function: String, pos: Pos },
    #[error("{pos}: recursive function `{function}` has no decreases clause")]
    MissingDecreases { function: String, pos: Pos },
}

impl VcError {
    pub fn pos(&self) -> Pos {
        match self {
            VcError::MissingLoopInvariant { pos, .. }
            | VcError::MissingLoopVariant { pos, .. }
            | VcError::MissingDecreases { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vc {
    /// `function.Kind.index`
    pub name: String,
    pub function: String,
    pub kind: VcKind,
    pub index: usize,
    pub pos: Pos,
    /// Free constants with their sorts.
    pub consts: BTreeMap<String, Sort>,
    /// Path facts; the imported axioms live in the function's theory.
    pub hypotheses: Vec<Term>,
    pub goal: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionVcs {
    pub function: String,
    pub theory: Theory,
    pub vcs: Vec<Vc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VcOptions {
    pub overflow: bool,
}

impl Default for VcOptions {
    fn default() -> Self {
        VcOptions { overflow: true }
    }
}

/// For each function, the members of its recursive component (empty when
/// it is not recursive).
pub fn recursion_peers(t: &TypedUnit) -> BTreeMap<String, BTreeSet<String>> {
    let sites = call_sites(t);
    let mut g: DiGraph<&str, ()> = DiGraph::new();
    let idx: BTreeMap<&str, _> = sites.keys().map(|n| (n.as_str(), g.add_node(n.as_str()))).collect();
    let mut self_loop = BTreeSet::new();
    for (f, calls) in &sites {
        for (c, _) in calls {
            if let Some(&to) = idx.get(c.as_str()) {
                g.update_edge(idx[f.as_str()], to, ());
            }
            if c == f {
                self_loop.insert(f.as_str());
            }
        }
    }
    let mut out: BTreeMap<String, BTreeSet<String>> = sites.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for scc in tarjan_scc(&g) {
        let members: BTreeSet<String> = scc.iter().map(|i| g[*i].to_string()).collect();
        if members.len() > 1 || scc.iter().any(|i| self_loop.contains(g[*i])) {
            for m in &members {
                out.insert(m.clone(), members.clone());
            }
        }
    }
    out
}

fn vcs_with_peers(
    t: &TypedUnit,
    function: &str,
    peers: BTreeSet<String>,
    opts: VcOptions,
) -> Result<FunctionVcs, VcError> {
    let f = &t.symbols.functions[function];
    let contract = t.contract(function);
    if !peers.is_empty() && contract.decreases.is_none() {
        return Err(VcError::MissingDecreases { function: function.to_string(), pos: f.pos });
    }
    let w = wp::Wp::new(t, f, peers, opts.overflow);
    let whole = w.function_vc()?;
    let mut counts: BTreeMap<VcKind, usize> = BTreeMap::new();
    let mut vcs: Vec<Vc> = split::split(&whole)
        .into_iter()
        .map(|r| {
            let n = counts.entry(r.kind).or_default();
            let index = *n;
            *n += 1;
            let mut consts = r.goal.free_vars();
            for h in &r.hypotheses {
                consts.extend(h.free_vars());
            }
            Vc {
                name: format!("{function}.{}.{index}", r.kind),
                function: function.to_string(),
                kind: r.kind,
                index,
                pos: r.pos,
                consts,
                hypotheses: r.hypotheses,
                goal: r.goal,
            }
        })
        .collect();
    vcs.sort_by_key(|v| (v.kind, v.index));
    Ok(FunctionVcs { function: function.to_string(), theory: theory::build(t, function), vcs })
}

/// VCs of one function with a body; `None` for bodiless declarations.
pub fn vcs_for_function(t: &TypedUnit, function: &str, opts: VcOptions) -> Result<Option<FunctionVcs>, VcError> {
    if t.body(function).is_none() {
        return Ok(None);
    }
    let peers = recursion_peers(t).remove(function).unwrap_or_default();
    vcs_with_peers(t, function, peers, opts).map(Some)
}

/// All functions with bodies, in source order. Functions are independent
/// and processed in parallel.
pub fn vcs_for_unit(t: &TypedUnit, opts: VcOptions) -> Result<Vec<FunctionVcs>, VcError> {
    use rayon::prelude::*;
    let peers = recursion_peers(t);
    let names: Vec<&str> = t
        .functions_in_order()
        .into_iter()
        .filter(|f| f.def.is_some())
        .map(|f| f.name.as_str())
        .collect();
    names
        .par_iter()
        .map(|n| vcs_with_peers(t, n, peers[*n].clone(), opts))
        .collect()
}
