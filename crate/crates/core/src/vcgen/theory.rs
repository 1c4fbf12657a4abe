//! Background theory of a proof context: logic symbols and axioms of the
//! import closure.

use super::term::*;
use super::translate::{sort_of, Translator};
use crate::elaborator::compute_import_closure;
use crate::frontend::ast::*;
use crate::sema::TypedUnit;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Suffix of the limited copy of a recursive definition.
pub const LIMITED: &str = "__lim";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunDecl {
    pub name: String,
    pub args: Vec<Sort>,
    pub ret: Sort,
}

/// `∀ vars {pattern}. body`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub vars: Vec<(String, Sort)>,
    pub pattern: Option<Term>,
    pub body: Term,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    /// Imported units, in source order.
    pub units: Vec<String>,
    pub decls: Vec<FunDecl>,
    pub axioms: Vec<Axiom>,
}

/// Logic definitions that are (mutually) recursive.
pub fn recursive_definitions(t: &TypedUnit) -> BTreeMap<String, BTreeSet<String>> {
    let mut g: DiGraph<&str, ()> = DiGraph::new();
    let idx: BTreeMap<&str, _> = t.symbols.logic.keys().map(|n| (n.as_str(), g.add_node(n.as_str()))).collect();
    let mut self_loop = BTreeSet::new();
    for (n, info) in &t.symbols.logic {
        if let Some(b) = &info.body {
            let mut used = BTreeSet::new();
            crate::elaborator::symbols_in(b, &mut used);
            for u in used {
                if let Some(&to) = idx.get(u.as_str()) {
                    g.update_edge(idx[n.as_str()], to, ());
                    if u == *n {
                        self_loop.insert(n.clone());
                    }
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for scc in tarjan_scc(&g) {
        let members: BTreeSet<String> = scc.iter().map(|i| g[*i].to_string()).collect();
        if members.len() > 1 || members.iter().any(|m| self_loop.contains(m)) {
            for m in &members {
                out.insert(m.clone(), members.clone());
            }
        }
    }
    out
}

fn state_vars() -> Vec<(String, Sort)> {
    vec![(HEAP.to_string(), Sort::Heap), (ALLOC.to_string(), Sort::Alloc)]
}

fn signature(info: &crate::sema::LogicInfo) -> (Vec<(String, Sort)>, Vec<Term>) {
    let mut vars: Vec<(String, Sort)> = info.params.iter().map(|p| (p.name.clone(), sort_of(&p.ty))).collect();
    if info.stateful() {
        vars.extend(state_vars());
    }
    let args = vars.iter().map(|(n, s)| Term::var(n, *s)).collect();
    (vars, args)
}

fn collect<'d>(decls: &'d [Decl], units: &BTreeSet<String>, top: bool, out: &mut Vec<&'d Decl>) {
    for d in decls {
        match &d.item {
            Item::Axiomatic(a) if !top || units.contains(&a.name) => collect(&a.items, units, false, out),
            Item::Function(_) | Item::Global(_) | Item::Axiomatic(_) => {}
            _ if !top || units.contains(d.name()) => out.push(d),
            _ => {}
        }
    }
}

pub fn build(t: &TypedUnit, function: &str) -> Theory {
    let closure = compute_import_closure(t, function);
    let rec = recursive_definitions(t);
    let empty = BTreeMap::new();
    let mut th = Theory {
        units: t.unit.decls.iter().map(|d| d.name().to_string()).filter(|n| closure.units.contains(n)).collect(),
        ..Theory::default()
    };
    let mut items = vec![];
    collect(&t.unit.decls, &closure.units, true, &mut items);
    for d in items {
        let mut tr = Translator::new(&t.symbols, &empty, false);
        match &d.item {
            Item::Logic(LogicDecl { name, .. }) | Item::Predicate(PredicateDecl { name, .. }) => {
                let info = &t.symbols.logic[name];
                let (vars, args) = signature(info);
                let ret = sort_of(&info.ret);
                let decl = FunDecl { name: name.clone(), args: vars.iter().map(|(_, s)| *s).collect(), ret };
                let Some(body) = &info.body else {
                    th.decls.push(decl);
                    continue;
                };
                let body = if info.ret == Ty::Bool { tr.formula(body) } else { tr.term(body) };
                let app = Term::App(name.clone(), args.clone(), ret);
                match rec.get(name) {
                    Some(peers) => {
                        let lim = format!("{name}{LIMITED}");
                        let renames: BTreeMap<String, String> =
                            peers.iter().map(|p| (p.clone(), format!("{p}{LIMITED}"))).collect();
                        th.decls.push(FunDecl { name: lim.clone(), ..decl.clone() });
                        th.decls.push(decl);
                        th.axioms.push(Axiom {
                            name: format!("{name}{LIMITED}_eq"),
                            vars: vars.clone(),
                            pattern: Some(app.clone()),
                            body: Term::eq(app.clone(), Term::App(lim, args, ret)),
                        });
                        th.axioms.push(Axiom {
                            name: format!("{name}_def"),
                            vars,
                            pattern: Some(app.clone()),
                            body: Term::eq(app, body.rename_apps(&renames)),
                        });
                    }
                    None => {
                        th.decls.push(decl);
                        th.axioms.push(Axiom {
                            name: format!("{name}_def"),
                            vars,
                            pattern: Some(app.clone()),
                            body: Term::eq(app, body),
                        });
                    }
                }
            }
            Item::Lemma(p) | Item::Axiom(p) => {
                let f = tr.formula(&p.formula);
                let fv = f.free_vars();
                let vars = state_vars().into_iter().filter(|(n, _)| fv.contains_key(n)).collect();
                th.axioms.push(Axiom { name: p.name.clone(), vars, pattern: None, body: f });
            }
            _ => {}
        }
    }
    // Limited copies of recursive peers outside the closure still need
    // declaring when a body mentions them.
    let declared: BTreeSet<String> = th.decls.iter().map(|d| d.name.clone()).collect();
    let mut used = BTreeSet::new();
    for a in &th.axioms {
        a.body.symbols(&mut used);
    }
    for u in used.difference(&declared) {
        if let Some(base) = u.strip_suffix(LIMITED) {
            let info = &t.symbols.logic[base];
            let (vars, _) = signature(info);
            th.decls.push(FunDecl { name: u.clone(), args: vars.iter().map(|(_, s)| *s).collect(), ret: sort_of(&info.ret) });
        }
    }
    th
}
