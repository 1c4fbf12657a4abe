//! Splitting a labelled obligation into individual goals.

use super::term::*;
use crate::frontend::ast::{Pos, Quantifier};

pub struct RawVc {
    pub kind: VcKind,
    pub pos: Pos,
    pub hypotheses: Vec<Term>,
    pub goal: Term,
}

fn push_hyp(h: &Term, hyps: &mut Vec<Term>) -> usize {
    let before = hyps.len();
    match h {
        Term::Op(Op::And, parts) => parts.iter().for_each(|p| {
            push_hyp(p, hyps);
        }),
        Term::Bool(true) => {}
        _ => hyps.push(h.clone()),
    }
    before
}

fn go(t: &Term, hyps: &mut Vec<Term>, out: &mut Vec<RawVc>) {
    match t {
        Term::Op(Op::And, parts) => parts.iter().for_each(|p| go(p, hyps, out)),
        Term::Op(Op::Implies, args) if args[1].has_label() => {
            let k = push_hyp(&args[0], hyps);
            go(&args[1], hyps, out);
            hyps.truncate(k);
        }
        // Binders are named apart, so they become free constants.
        Term::Quant(Quantifier::Forall, _, body) if body.has_label() => go(body, hyps, out),
        Term::Label(kind, pos, goal) => {
            out.push(RawVc { kind: *kind, pos: *pos, hypotheses: hyps.clone(), goal: (**goal).clone() })
        }
        _ => {}
    }
}

/// Obligations in order of appearance.
pub fn split(t: &Term) -> Vec<RawVc> {
    let mut out = vec![];
    go(t, &mut vec![], &mut out);
    out
}
