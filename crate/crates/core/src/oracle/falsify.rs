//! Exhaustive search for counterexamples to universally quantified
//! formulas over small heaps.

use super::interp::{Ctx, Domain, Interp};
use super::{Memory, Pointer, Value};
use crate::elaborator::AXIOM_PREFIX;
use crate::frontend::ast::*;
use crate::sema::TypedUnit;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpace {
    pub max_len: usize,
    /// Cell values, 0 first.
    pub alphabet: Vec<u8>,
    pub ints: Vec<i128>,
}

impl SearchSpace {
    pub fn new(max_len: usize, alphabet: &str) -> Self {
        let mut a = vec![0u8];
        for b in alphabet.bytes() {
            if !a.contains(&b) {
                a.push(b);
            }
        }
        SearchSpace { max_len, alphabet: a, ints: (-1..=max_len as i128 + 1).collect() }
    }

    /// Block contents: every sequence over the alphabet of length
    /// 1..=max_len+1, shortest first.
    pub fn blocks(&self) -> Vec<Vec<i128>> {
        let mut out = vec![];
        let mut layer: Vec<Vec<i128>> = vec![vec![]];
        for _ in 0..=self.max_len {
            layer = layer
                .iter()
                .flat_map(|p| {
                    self.alphabet.iter().map(move |b| {
                        let mut q = p.clone();
                        q.push(*b as i8 as i128);
                        q
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    pub fn domain(&self) -> Domain {
        Domain { ints: self.ints.clone(), chars: self.alphabet.iter().map(|b| *b as i8 as i128).collect() }
    }
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace::new(4, "abc")
    }
}

/// One candidate value for a top-level binder.
#[derive(Clone, Debug)]
enum Choice {
    Scalar(Value),
    Null,
    Block(Vec<i128>),
}

fn choices(ty: &Ty, space: &SearchSpace, blocks: &[Vec<i128>]) -> Vec<Choice> {
    match ty {
        Ty::CharPtr => std::iter::once(Choice::Null).chain(blocks.iter().cloned().map(Choice::Block)).collect(),
        Ty::Bool => vec![Choice::Scalar(Value::Bool(false)), Choice::Scalar(Value::Bool(true))],
        Ty::Char => space.alphabet.iter().map(|b| Choice::Scalar(Value::Int(*b as i8 as i128))).collect(),
        t => {
            let (lo, hi) = t.range().unwrap_or((i128::MIN, i128::MAX));
            space.ints.iter().filter(|v| lo <= **v && **v <= hi).map(|v| Choice::Scalar(Value::Int(*v))).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub bindings: Vec<(String, Value)>,
    pub mem: Memory,
}

fn show_value(v: Value) -> String {
    match v {
        Value::Int(c @ 32..=126) => format!("{c} ('{}')", c as u8 as char),
        Value::Int(0) => "0 ('\\0')".into(),
        v => v.to_string(),
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in &self.bindings {
            writeln!(f, "{n} = {}", show_value(*v))?;
        }
        write!(f, "{}", self.mem)
    }
}

fn state(binders: &[Param], picks: &[&Choice]) -> Counterexample {
    let mut mem = Memory::default();
    let mut bindings = vec![];
    for (b, c) in binders.iter().zip(picks) {
        let v = match c {
            Choice::Scalar(v) => *v,
            Choice::Null => Value::Ptr(Pointer::NULL),
            Choice::Block(bytes) => Value::Ptr(mem.add_block(bytes)),
        };
        bindings.push((b.name.clone(), v));
    }
    Counterexample { bindings, mem }
}

/// Splits `\forall xs; H ==> C` into its binders and body; other formulas
/// have no binders.
fn binders_of(e: &Expr) -> (Vec<Param>, &Expr) {
    match &e.kind {
        ExprKind::Quant(Quantifier::Forall, bs, body) => {
            let (mut more, inner) = binders_of(body);
            let mut all = bs.clone();
            all.append(&mut more);
            (all, inner)
        }
        _ => (vec![], e),
    }
}

/// First assignment, in canonical enumeration order, under which the
/// formula evaluates to false. States on which evaluation traps or runs
/// out of fuel are skipped.
pub fn falsify(t: &TypedUnit, formula: &Expr, space: &SearchSpace) -> Option<Counterexample> {
    let (binders, body) = binders_of(formula);
    let blocks = space.blocks();
    let domains: Vec<Vec<Choice>> = binders.iter().map(|b| choices(&b.ty, space, &blocks)).collect();
    let total: usize = domains.iter().map(Vec::len).product();
    let check = |mut k: usize| -> Option<Counterexample> {
        let mut picks = vec![];
        for d in domains.iter().rev() {
            picks.push(&d[k % d.len()]);
            k /= d.len();
        }
        picks.reverse();
        let cx = state(&binders, &picks);
        let mut interp = Interp::new(t);
        interp.domain = space.domain();
        let vars: BTreeMap<String, Value> = cx.bindings.iter().cloned().collect();
        match interp.holds(body, &Ctx::new(vars, &cx.mem)) {
            Ok(false) => Some(cx),
            _ => None,
        }
    };
    (0..total).into_par_iter().find_map_first(check)
}

/// The formula a name stands for: a logic lemma or axiom, or the
/// generated axiom of a lemma function.
pub fn lemma_formula<'u>(t: &'u TypedUnit, name: &str) -> Option<&'u Expr> {
    fn find<'d>(decls: &'d [Decl], want: &dyn Fn(&str) -> bool) -> Option<&'d Expr> {
        decls.iter().find_map(|d| match &d.item {
            Item::Lemma(p) | Item::Axiom(p) if want(&p.name) => Some(&p.formula),
            Item::Axiomatic(a) => find(&a.items, want),
            _ => None,
        })
    }
    find(&t.unit.decls, &|n| n == name).or_else(|| {
        find(&t.unit.decls, &|n| {
            n.strip_prefix(AXIOM_PREFIX).and_then(|r| r.rsplit_once('_')).is_some_and(|(f, _)| f == name)
        })
    })
}

pub fn falsify_lemma(t: &TypedUnit, name: &str, space: &SearchSpace) -> Result<Option<Counterexample>, String> {
    let f = lemma_formula(t, name).ok_or_else(|| format!("no lemma named `{name}`"))?;
    Ok(falsify(t, f, space))
}
