use super::Symbols;
use crate::frontend::ast::*;
use std::collections::{BTreeMap, BTreeSet};

/// A memory region a function may write.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Loc {
    Global(String),
    Heap,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Effects {
    pub writes: BTreeSet<Loc>,
    pub allocates: bool,
    /// Direct callees.
    pub calls: BTreeSet<String>,
}

impl Effects {
    pub fn is_pure(&self) -> bool {
        self.writes.is_empty() && !self.allocates
    }
}

fn everything(syms: &Symbols) -> BTreeSet<Loc> {
    let mut s: BTreeSet<Loc> = syms.globals.keys().map(|g| Loc::Global(g.clone())).collect();
    s.insert(Loc::Heap);
    s
}

/// Writes declared by an `assigns` clause.
pub fn declared_writes(c: &Contract, syms: &Symbols) -> BTreeSet<Loc> {
    match &c.assigns {
        None | Some(Locations::Everything) => everything(syms),
        Some(Locations::Nothing) => BTreeSet::new(),
        Some(Locations::List(l)) => l
            .iter()
            .map(|e| match &e.kind {
                ExprKind::Var(v) => Loc::Global(v.clone()),
                _ => Loc::Heap,
            })
            .collect(),
    }
}

fn target(e: &Expr, syms: &Symbols, out: &mut BTreeSet<Loc>) {
    match &e.kind {
        ExprKind::Var(v) if syms.globals.contains_key(v) => {
            out.insert(Loc::Global(v.clone()));
        }
        ExprKind::Var(_) => {}
        _ => {
            out.insert(Loc::Heap);
        }
    }
}

fn direct(body: &[Stmt], syms: &Symbols) -> Effects {
    let mut eff = Effects::default();
    for s in body {
        s.walk(&mut |s| match &s.kind {
            StmtKind::Assign(l, _) => target(l, syms, &mut eff.writes),
            StmtKind::Call { lhs, func, .. } => {
                if let Some(l) = lhs {
                    target(l, syms, &mut eff.writes);
                }
                eff.calls.insert(func.clone());
            }
            _ => {}
        });
    }
    eff
}

/// Syntactic effect summaries, closed transitively over the call graph.
pub fn compute(unit: &SourceUnit, syms: &Symbols) -> BTreeMap<String, Effects> {
    let mut out = BTreeMap::new();
    for (name, info) in &syms.functions {
        let fdecl = |i: usize| match &unit.decls[i].item {
            Item::Function(f) => f,
            _ => unreachable!(),
        };
        let eff = match info.def {
            Some(i) => direct(fdecl(i).body.as_deref().unwrap_or(&[]), syms),
            None => {
                let c = info.contract_decl.map(|i| fdecl(i).contract.clone()).unwrap_or_default();
                Effects {
                    writes: declared_writes(&c, syms),
                    allocates: !matches!(c.allocates, Some(Locations::Nothing)),
                    calls: BTreeSet::new(),
                }
            }
        };
        out.insert(name.clone(), eff);
    }
    loop {
        let mut changed = false;
        let names: Vec<String> = out.keys().cloned().collect();
        for n in &names {
            let calls = out[n].calls.clone();
            let mut writes = out[n].writes.clone();
            let mut alloc = out[n].allocates;
            for c in &calls {
                if let Some(e) = out.get(c) {
                    writes.extend(e.writes.iter().cloned());
                    alloc |= e.allocates;
                }
            }
            let e = out.get_mut(n).unwrap();
            if writes != e.writes || alloc != e.allocates {
                e.writes = writes;
                e.allocates = alloc;
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}
