use super::ElabError;
use crate::frontend::ast::*;
use crate::sema::TypedUnit;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Lemma functions, sorted by name.
    pub members: Vec<String>,
    /// Definition position of the first-defined member.
    pub anchor: Pos,
}

/// Lemma functions grouped into strongly connected components, in anchor
/// order (callees before callers).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderingGraph {
    pub components: Vec<Component>,
    pub component_of: BTreeMap<String, usize>,
}

/// Direct call sites of each function with a body: (callee, position).
pub fn call_sites(t: &TypedUnit) -> BTreeMap<String, Vec<(String, Pos)>> {
    let mut out = BTreeMap::new();
    for f in t.symbols.functions.values() {
        let mut sites = Vec::new();
        if let Some(body) = t.body(&f.name) {
            for s in body {
                s.walk(&mut |s| {
                    if let StmtKind::Call { func, .. } = &s.kind {
                        sites.push((func.clone(), s.pos));
                    }
                });
            }
        }
        out.insert(f.name.clone(), sites);
    }
    out
}

pub fn order_lemma_components(t: &TypedUnit) -> Result<OrderingGraph, ElabError> {
    let sites = call_sites(t);
    let lemmas: Vec<&String> =
        t.symbols.functions.values().filter(|f| f.lemma).map(|f| &f.name).collect();
    let mut g: DiGraph<&str, ()> = DiGraph::new();
    let idx: BTreeMap<&str, NodeIndex> = lemmas.iter().map(|n| (n.as_str(), g.add_node(n.as_str()))).collect();
    for l in &lemmas {
        for (callee, _) in &sites[l.as_str()] {
            if let Some(&to) = idx.get(callee.as_str()) {
                g.update_edge(idx[l.as_str()], to, ());
            }
        }
    }
    let mut components: Vec<Component> = tarjan_scc(&g)
        .into_iter()
        .map(|scc| {
            let mut members: Vec<String> = scc.iter().map(|n| g[*n].to_string()).collect();
            members.sort();
            let anchor = members.iter().map(|m| t.symbols.functions[m].def_pos.unwrap()).min().unwrap();
            Component { members, anchor }
        })
        .collect();
    components.sort_by_key(|c| c.anchor);
    let component_of: BTreeMap<String, usize> = components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.members.iter().map(move |m| (m.clone(), i)))
        .collect();
    let ord = OrderingGraph { components, component_of };
    check_forward_uses(t, &ord, &sites)?;
    Ok(ord)
}

fn check_forward_uses(
    t: &TypedUnit,
    ord: &OrderingGraph,
    sites: &BTreeMap<String, Vec<(String, Pos)>>,
) -> Result<(), ElabError> {
    let anchor = |n: &str| super::function_anchor(t, ord, n);
    // Any call to a lemma whose component is anchored later.
    let mut callers: Vec<&String> = sites.keys().collect();
    callers.sort_by_key(|c| anchor(c));
    for caller in &callers {
        for (callee, pos) in &sites[caller.as_str()] {
            let Some(&cc) = ord.component_of.get(callee) else { continue };
            if ord.component_of.get(caller.as_str()) == Some(&cc) {
                continue;
            }
            if ord.components[cc].anchor > anchor(caller) {
                return Err(ElabError::ForwardLemmaUse {
                    caller: caller.to_string(),
                    call_pos: *pos,
                    callee: callee.clone(),
                    callee_anchor: ord.components[cc].anchor,
                });
            }
        }
    }
    // A lemma's proof may not rest on any function proved later, since that
    // function sees the lemma's axiom.
    for (ci, comp) in ord.components.iter().enumerate() {
        let mut seen: BTreeSet<&str> = comp.members.iter().map(String::as_str).collect();
        let mut queue: VecDeque<&str> = comp.members.iter().map(String::as_str).collect();
        while let Some(f) = queue.pop_front() {
            for (callee, pos) in &sites[f] {
                if !seen.insert(callee.as_str()) {
                    continue;
                }
                queue.push_back(callee.as_str());
                let info = &t.symbols.functions[callee.as_str()];
                if info.def.is_none() || ord.component_of.get(callee.as_str()) == Some(&ci) {
                    continue;
                }
                if anchor(callee) > comp.anchor {
                    return Err(ElabError::ForwardLemmaUse {
                        caller: f.to_string(),
                        call_pos: *pos,
                        callee: callee.clone(),
                        callee_anchor: anchor(callee),
                    });
                }
            }
        }
    }
    Ok(())
}
