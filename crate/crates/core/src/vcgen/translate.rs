//! Translation of typed expressions into terms.

use super::term::*;
use crate::frontend::ast::*;
use crate::sema::Symbols;
use std::collections::BTreeMap;

pub fn sort_of(t: &Ty) -> Sort {
    match t {
        Ty::CharPtr => Sort::Ptr,
        Ty::Bool => Sort::Bool,
        _ => Sort::Int,
    }
}

pub fn char_value(c: u8) -> i128 {
    c as i8 as i128
}

/// Range guard for a variable of a machine type, `true` otherwise.
pub fn range_fact(t: Term, ty: &Ty) -> Term {
    match ty.range() {
        Some((lo, hi)) => Term::in_range(t, lo, hi),
        None => Term::Bool(true),
    }
}

/// How names and memory resolve in one program state.
#[derive(Clone, Debug)]
pub struct State {
    pub subst: BTreeMap<String, Term>,
    /// Unmapped names resolve to their `@old` copies.
    pub old_names: bool,
    pub heap: Term,
    pub alloc: Term,
}

impl State {
    pub fn current() -> State {
        State { subst: BTreeMap::new(), old_names: false, heap: Term::heap(), alloc: Term::alloc() }
    }

    pub fn entry() -> State {
        State {
            subst: BTreeMap::new(),
            old_names: true,
            heap: Term::var(&old_name(HEAP), Sort::Heap),
            alloc: Term::var(&old_name(ALLOC), Sort::Alloc),
        }
    }
}

pub struct Translator<'a> {
    pub syms: &'a Symbols,
    /// Program variables in scope with their declared types.
    pub types: &'a BTreeMap<String, Ty>,
    pub cur: State,
    pub old: State,
    pub result: Option<Term>,
    /// Emit range obligations for code arithmetic.
    pub overflow: bool,
    bound: Vec<(String, Sort)>,
    in_old: bool,
}

impl<'a> Translator<'a> {
    pub fn new(syms: &'a Symbols, types: &'a BTreeMap<String, Ty>, overflow: bool) -> Self {
        Translator {
            syms,
            types,
            cur: State::current(),
            old: State::entry(),
            result: None,
            overflow,
            bound: vec![],
            in_old: false,
        }
    }

    fn state(&self) -> &State {
        if self.in_old {
            &self.old
        } else {
            &self.cur
        }
    }

    fn var(&self, n: &str, ty: &Ty) -> Term {
        if let Some((_, s)) = self.bound.iter().rev().find(|(b, _)| b == n) {
            return Term::var(n, *s);
        }
        let st = self.state();
        if let Some(t) = st.subst.get(n) {
            return t.clone();
        }
        let ty = self.types.get(n).unwrap_or(ty);
        if st.old_names {
            Term::var(&old_name(n), sort_of(ty))
        } else {
            Term::var(n, sort_of(ty))
        }
    }

    fn app(&mut self, f: &str, args: &[Expr]) -> Term {
        let info = &self.syms.logic[f];
        let stateful = info.stateful();
        let ret = sort_of(&info.ret);
        let params: Vec<Ty> = info.params.iter().map(|p| p.ty.clone()).collect();
        let mut a: Vec<Term> = args
            .iter()
            .zip(&params)
            .map(|(e, p)| if *p == Ty::Bool { self.formula(e) } else { self.term(e) })
            .collect();
        if stateful {
            a.push(self.state().heap.clone());
            a.push(self.state().alloc.clone());
        }
        Term::App(f.to_string(), a, ret)
    }

    /// A value-level translation.
    pub fn term(&mut self, e: &Expr) -> Term {
        let ty = e.ty();
        if *ty == Ty::Bool {
            return self.formula(e);
        }
        match &e.kind {
            ExprKind::Int(v) => Term::Int(*v),
            ExprKind::Char(c) => Term::Int(char_value(*c)),
            ExprKind::Null => Term::null(),
            ExprKind::Result => self.result.clone().expect("result outside postcondition"),
            ExprKind::Var(n) => self.var(n, ty),
            ExprKind::Unary(UnOp::Neg, a) => Term::op(Op::Neg, vec![self.term(a)]),
            ExprKind::Unary(UnOp::Deref, p) => {
                let p = self.term(p);
                Term::select(self.state().heap.clone(), p)
            }
            ExprKind::Index(p, i) => {
                let p = self.term(p);
                let i = self.term(i);
                Term::select(self.state().heap.clone(), Term::shift(p, i))
            }
            ExprKind::Binary(op @ (BinOp::Add | BinOp::Sub | BinOp::Mul), a, b) => {
                let (ta, tb) = (a.ty().clone(), b.ty().clone());
                let x = self.term(a);
                let y = self.term(b);
                match (op, ta == Ty::CharPtr, tb == Ty::CharPtr) {
                    (BinOp::Add, true, false) => Term::shift(x, y),
                    (BinOp::Add, false, true) => Term::shift(y, x),
                    (BinOp::Sub, true, false) => Term::shift(x, Term::op(Op::Neg, vec![y])),
                    (BinOp::Sub, true, true) => Term::sub(Term::off(x), Term::off(y)),
                    (BinOp::Add, _, _) => Term::add(x, y),
                    (BinOp::Sub, _, _) => Term::sub(x, y),
                    _ => Term::op(Op::Mul, vec![x, y]),
                }
            }
            ExprKind::Call(f, args) => self.app(f, args),
            ExprKind::Cond(c, a, b) => {
                let c = self.formula(c);
                Term::ite(c, self.term(a), self.term(b))
            }
            ExprKind::Old(a) => {
                let saved = std::mem::replace(&mut self.in_old, true);
                let t = self.term(a);
                self.in_old = saved;
                t
            }
            ExprKind::Builtin(Builtin::Offset, a) => Term::off(self.term(&a[0])),
            ExprKind::Builtin(Builtin::BlockLength, a) => {
                let p = self.term(&a[0]);
                Term::op(Op::Size, vec![self.state().alloc.clone(), Term::blk(p)])
            }
            // Code-level booleans are ints.
            _ => {
                let f = self.formula(e);
                Term::ite(f, Term::Int(1), Term::Int(0))
            }
        }
    }

    fn compare(&mut self, op: RelOp, a: Term, b: Term) -> Term {
        let ptr = a.sort() == Sort::Ptr;
        let ordered = |lt: bool, x: Term, y: Term| {
            let o = if lt { Term::lt(Term::off(x.clone()), Term::off(y.clone())) } else { Term::le(Term::off(x.clone()), Term::off(y.clone())) };
            Term::and(vec![Term::eq(Term::blk(x), Term::blk(y)), o])
        };
        match op {
            RelOp::Eq => Term::eq(a, b),
            RelOp::Ne => Term::not(Term::eq(a, b)),
            RelOp::Lt if ptr => ordered(true, a, b),
            RelOp::Le if ptr => ordered(false, a, b),
            RelOp::Gt if ptr => ordered(true, b, a),
            RelOp::Ge if ptr => ordered(false, b, a),
            RelOp::Lt => Term::lt(a, b),
            RelOp::Le => Term::le(a, b),
            RelOp::Gt => Term::lt(b, a),
            RelOp::Ge => Term::le(b, a),
        }
    }

    /// A truth-level translation.
    pub fn formula(&mut self, e: &Expr) -> Term {
        match &e.kind {
            ExprKind::True => Term::Bool(true),
            ExprKind::False => Term::Bool(false),
            ExprKind::Unary(UnOp::Not, a) => Term::not(self.formula(a)),
            ExprKind::Binary(BinOp::And, a, b) => Term::and(vec![self.formula(a), self.formula(b)]),
            ExprKind::Binary(BinOp::Or, a, b) => Term::or(vec![self.formula(a), self.formula(b)]),
            ExprKind::Binary(BinOp::Implies, a, b) => Term::implies(self.formula(a), self.formula(b)),
            ExprKind::Binary(BinOp::Iff, a, b) => Term::op(Op::Iff, vec![self.formula(a), self.formula(b)]),
            ExprKind::Cmp(first, rest) => {
                let mut prev = self.term(first);
                let mut parts = vec![];
                for (op, x) in rest {
                    let t = self.term(x);
                    parts.push(self.compare(*op, prev, t.clone()));
                    prev = t;
                }
                Term::and(parts)
            }
            ExprKind::Builtin(Builtin::Valid, a) => {
                let p = self.term(&a[0]);
                Term::valid(self.state().alloc.clone(), p)
            }
            ExprKind::Quant(q, binders, body) => {
                let k = self.bound.len();
                let vars: Vec<(String, Sort)> = binders.iter().map(|b| (b.name.clone(), sort_of(&b.ty))).collect();
                self.bound.extend(vars.iter().cloned());
                let body = self.formula(body);
                self.bound.truncate(k);
                let guard = Term::and(
                    binders.iter().map(|b| range_fact(Term::var(&b.name, sort_of(&b.ty)), &b.ty)).collect(),
                );
                match q {
                    Quantifier::Forall => Term::forall(vars, Term::implies(guard, body)),
                    Quantifier::Exists => Term::exists(vars, Term::and(vec![guard, body])),
                }
            }
            ExprKind::Old(a) => {
                let saved = std::mem::replace(&mut self.in_old, true);
                let t = self.formula(a);
                self.in_old = saved;
                t
            }
            ExprKind::Call(f, args) if self.syms.logic[f.as_str()].ret == Ty::Bool => self.app(f, args),
            ExprKind::Cond(c, a, b) if *e.ty() == Ty::Bool => {
                let c = self.formula(c);
                Term::ite(c, self.formula(a), self.formula(b))
            }
            ExprKind::Var(n) if *e.ty() == Ty::Bool => self.var(n, &Ty::Bool),
            _ => {
                let t = self.term(e);
                match t.sort() {
                    Sort::Bool => t,
                    Sort::Ptr => Term::not(Term::eq(t, Term::null())),
                    _ => Term::not(Term::eq(t, Term::Int(0))),
                }
            }
        }
    }

    /// Runtime-error obligations for evaluating a code expression, guarded
    /// by the short-circuit conditions under which each part is evaluated.
    pub fn safety(&mut self, e: &Expr) -> Term {
        let here = |g: Term| Term::label(VcKind::Safety, e.pos, g);
        match &e.kind {
            ExprKind::Int(_) | ExprKind::Char(_) | ExprKind::Null | ExprKind::Var(_) => Term::Bool(true),
            ExprKind::Unary(op, a) => {
                let mut parts = vec![self.safety(a)];
                match op {
                    UnOp::Deref => {
                        let p = self.term(a);
                        parts.push(here(Term::valid(self.cur.alloc.clone(), p)));
                    }
                    UnOp::Neg if self.overflow => parts.push(self.overflow_check(e)),
                    _ => {}
                }
                Term::and(parts)
            }
            ExprKind::Index(p, i) => {
                let mut parts = vec![self.safety(p), self.safety(i)];
                let pt = self.term(p);
                let it = self.term(i);
                parts.push(here(Term::valid(self.cur.alloc.clone(), Term::shift(pt, it))));
                Term::and(parts)
            }
            ExprKind::Binary(BinOp::And, a, b) => {
                let c = self.formula(a);
                Term::and(vec![self.safety(a), Term::implies(c, self.safety(b))])
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                let c = self.formula(a);
                Term::and(vec![self.safety(a), Term::implies(Term::not(c), self.safety(b))])
            }
            ExprKind::Binary(op, a, b) => {
                let mut parts = vec![self.safety(a), self.safety(b)];
                let (pa, pb) = (*a.ty() == Ty::CharPtr, *b.ty() == Ty::CharPtr);
                if *op == BinOp::Sub && pa && pb {
                    let (x, y) = (self.term(a), self.term(b));
                    parts.push(here(Term::eq(Term::blk(x), Term::blk(y))));
                }
                if self.overflow && !pa && !pb {
                    parts.push(self.overflow_check(e));
                }
                Term::and(parts)
            }
            ExprKind::Cmp(first, rest) => {
                let mut parts = vec![self.safety(first)];
                let mut prev = first.as_ref();
                for (op, x) in rest {
                    parts.push(self.safety(x));
                    if *prev.ty() == Ty::CharPtr && !matches!(op, RelOp::Eq | RelOp::Ne) {
                        let (p, q) = (self.term(prev), self.term(x));
                        parts.push(here(Term::eq(Term::blk(p), Term::blk(q))));
                    }
                    prev = x;
                }
                Term::and(parts)
            }
            ExprKind::Cond(c, a, b) => {
                let f = self.formula(c);
                Term::and(vec![
                    self.safety(c),
                    Term::implies(f.clone(), self.safety(a)),
                    Term::implies(Term::not(f), self.safety(b)),
                ])
            }
            _ => Term::Bool(true),
        }
    }

    fn overflow_check(&mut self, e: &Expr) -> Term {
        let v = self.term(e);
        let g = range_fact(v, e.ty());
        if g == Term::Bool(true) {
            return g;
        }
        Term::label(VcKind::Safety, e.pos, g)
    }

    /// Range obligation when a value of type `from` is stored at type `to`.
    pub fn conversion(&mut self, e: &Expr, to: &Ty) -> Term {
        if !self.overflow {
            return Term::Bool(true);
        }
        let (Some((lo, hi)), Some((flo, fhi))) = (to.range(), e.ty().range()) else { return Term::Bool(true) };
        if lo <= flo && fhi <= hi {
            return Term::Bool(true);
        }
        let v = self.term(e);
        if matches!(v, Term::Int(k) if lo <= k && k <= hi) {
            return Term::Bool(true);
        }
        Term::label(VcKind::Safety, e.pos, Term::in_range(v, lo, hi))
    }
}
