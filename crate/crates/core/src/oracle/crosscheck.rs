//! Agreement between VC validity and concrete execution on a finite space.

use super::falsify::SearchSpace;
use super::interp::{Ctx, Interp};
use super::term_eval::{TVal, TermEval};
use super::{ConcreteState, Memory, OracleError, Pointer, Value};
use crate::frontend::ast::Ty;
use crate::sema::TypedUnit;
use crate::vcgen::term::{ALLOC, HEAP};
use crate::vcgen::{FunctionVcs, Sort, Vc, VcKind};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub function: String,
    pub states: usize,
    /// States satisfying the precondition.
    pub admitted: usize,
    /// Every Post and Safety VC holds on every state.
    pub vc_valid: bool,
    /// Every admitted state runs to a normal end satisfying the
    /// postcondition.
    pub exec_valid: bool,
    pub vc_witness: Option<String>,
    pub exec_witness: Option<String>,
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        self.vc_valid == self.exec_valid
    }
}

fn states(t: &TypedUnit, f: &str, space: &SearchSpace) -> Vec<(Vec<Value>, Memory)> {
    let info = &t.symbols.functions[f];
    let blocks = space.blocks();
    let mut out: Vec<(Vec<Value>, Memory)> = vec![(vec![], Memory::default())];
    for p in &info.params {
        let mut next = vec![];
        for (vals, mem) in &out {
            let mut push = |v: Value, m: Memory| {
                let mut vals = vals.clone();
                vals.push(v);
                next.push((vals, m));
            };
            match &p.ty {
                Ty::CharPtr => {
                    push(Value::Ptr(Pointer::NULL), mem.clone());
                    for b in &blocks {
                        let mut m = mem.clone();
                        let ptr = m.add_block(b);
                        push(Value::Ptr(ptr), m);
                    }
                }
                Ty::Char => space.domain().chars.iter().for_each(|c| push(Value::Int(*c), mem.clone())),
                ty => {
                    let (lo, hi) = ty.range().unwrap_or((i128::MIN, i128::MAX));
                    for v in space.ints.iter().filter(|v| lo <= **v && **v <= hi) {
                        push(Value::Int(*v), mem.clone());
                    }
                }
            }
        }
        out = next;
    }
    out
}

fn to_tval(v: Value) -> TVal {
    match v {
        Value::Int(i) => TVal::Int(i),
        Value::Bool(b) => TVal::Bool(b),
        Value::Ptr(p) => TVal::Ptr(p),
    }
}

/// Whether `vc` holds in the state, for every value of its other
/// constants.
fn vc_holds(ev: &TermEval, vc: &Vc, env: &BTreeMap<String, TVal>) -> Result<bool, OracleError> {
    let extra: Vec<(&String, &Sort)> = vc.consts.iter().filter(|(n, _)| !env.contains_key(*n)).collect();
    fn go(
        ev: &TermEval,
        vc: &Vc,
        env: &mut BTreeMap<String, TVal>,
        extra: &[(&String, &Sort)],
    ) -> Result<bool, OracleError> {
        let Some(((n, s), rest)) = extra.split_first() else {
            for h in &vc.hypotheses {
                if !ev.holds(h, env)? {
                    return Ok(true);
                }
            }
            return ev.holds(&vc.goal, env);
        };
        let values: Vec<TVal> = match s {
            Sort::Int => ev.ints.iter().map(|v| TVal::Int(*v)).collect(),
            Sort::Bool => vec![TVal::Bool(false), TVal::Bool(true)],
            Sort::Ptr => ev.ptrs.iter().map(|p| TVal::Ptr(*p)).collect(),
            _ => return Err(OracleError::Unsupported(format!("free memory constant `{n}`"))),
        };
        for v in values {
            env.insert((*n).clone(), v);
            let ok = go(ev, vc, env, rest)?;
            env.remove(*n);
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
    go(ev, vc, &mut env.clone(), &extra)
}

pub fn crosscheck_wp(
    t: &TypedUnit,
    f: &FunctionVcs,
    space: &SearchSpace,
    overflow: bool,
) -> Result<Agreement, OracleError> {
    let name = f.function.as_str();
    let info = &t.symbols.functions[name];
    let contract = t.contract(name);
    let mut interp = Interp::new(t);
    interp.overflow = overflow;
    interp.domain = space.domain();
    let globals: BTreeMap<String, Value> = t
        .symbols
        .globals
        .iter()
        .map(|(n, g)| (n.clone(), if g.ty == Ty::CharPtr { Value::Ptr(Pointer::NULL) } else { Value::Int(0) }))
        .collect();
    let checked: Vec<&Vc> = f.vcs.iter().filter(|v| matches!(v.kind, VcKind::Post | VcKind::Safety)).collect();
    let mut ag = Agreement {
        function: name.to_string(),
        states: 0,
        admitted: 0,
        vc_valid: true,
        exec_valid: true,
        vc_witness: None,
        exec_witness: None,
    };
    for (args, mem) in states(t, name, space) {
        ag.states += 1;
        let mut vars = globals.clone();
        for (p, v) in info.params.iter().zip(&args) {
            vars.insert(p.name.clone(), *v);
        }
        let show = || format!("{vars:?}\n{mem}");

        let mut env: BTreeMap<String, TVal> = vars.iter().map(|(k, v)| (k.clone(), to_tval(*v))).collect();
        env.insert(HEAP.to_string(), TVal::heap_of(&mem));
        env.insert(ALLOC.to_string(), TVal::alloc_of(&mem));
        let mut ev = TermEval::new(&f.theory);
        ev.ints = space.ints.clone();
        ev.ptrs = mem.pointers();
        for vc in &checked {
            if !vc_holds(&ev, vc, &env)? && ag.vc_valid {
                ag.vc_valid = false;
                ag.vc_witness = Some(format!("{} fails on {}", vc.name, show()));
            }
        }

        let pre = Ctx::new(vars.clone(), &mem);
        let mut admitted = true;
        for r in &contract.requires {
            if !interp.holds(r, &pre).unwrap_or(false) {
                admitted = false;
                break;
            }
        }
        if !admitted {
            continue;
        }
        ag.admitted += 1;
        interp.steps.set(100_000);
        let st = ConcreteState { mem: mem.clone(), vars: globals.clone() };
        let outcome = match interp.exec(name, args.clone(), st) {
            Err(e) => Err(e.to_string()),
            Ok((result, end)) => {
                let mut post_vars = end.vars.clone();
                for (p, v) in info.params.iter().zip(&args) {
                    post_vars.insert(p.name.clone(), *v);
                }
                let mut post = Ctx::new(post_vars, &end.mem);
                post.result = result;
                post.old = Some(&pre);
                let mut ok = Ok(());
                for e in &contract.ensures {
                    match interp.holds(e, &post) {
                        Ok(true) => {}
                        Ok(false) => ok = Err(format!("ensures at {} fails", e.pos)),
                        Err(err) => ok = Err(err.to_string()),
                    }
                }
                ok
            }
        };
        if let Err(why) = outcome {
            if ag.exec_valid {
                ag.exec_valid = false;
                ag.exec_witness = Some(format!("{why} on {}", show()));
            }
        }
    }
    Ok(ag)
}
