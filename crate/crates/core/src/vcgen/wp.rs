//! Weakest preconditions with normal, return and break continuations.

use super::term::*;
use super::translate::{range_fact, sort_of, State, Translator};
use super::VcError;
use crate::elaborator::is_dummy;
use crate::frontend::ast::*;
use crate::sema::{FunctionInfo, Loc, TypedUnit};
use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone)]
struct Cont {
    normal: Term,
    ret: Term,
    brk: Term,
}

impl Cont {
    fn with_normal(&self, normal: Term) -> Cont {
        Cont { normal, ret: self.ret.clone(), brk: self.brk.clone() }
    }
}

pub struct Wp<'a> {
    t: &'a TypedUnit,
    f: &'a FunctionInfo,
    types: BTreeMap<String, Ty>,
    /// Parameters and locals; everything else named is a global.
    locals: BTreeSet<String>,
    overflow: bool,
    counter: Cell<usize>,
    /// Functions in the same recursive component as `f`.
    peers: BTreeSet<String>,
    contract: Contract,
}

fn collect_locals(body: &[Stmt], out: &mut BTreeMap<String, Ty>) {
    for s in body {
        s.walk(&mut |s| {
            if let StmtKind::Local { ty, name, .. } = &s.kind {
                out.insert(name.clone(), ty.clone());
            }
        });
    }
}

impl<'a> Wp<'a> {
    pub fn new(t: &'a TypedUnit, f: &'a FunctionInfo, peers: BTreeSet<String>, overflow: bool) -> Self {
        let mut types: BTreeMap<String, Ty> = t.symbols.globals.iter().map(|(n, g)| (n.clone(), g.ty.clone())).collect();
        let mut own = BTreeMap::new();
        for p in &f.params {
            own.insert(p.name.clone(), p.ty.clone());
        }
        collect_locals(t.body(&f.name).map(Vec::as_slice).unwrap_or(&[]), &mut own);
        let locals = own.keys().cloned().collect();
        types.extend(own);
        Wp { t, f, types, locals, overflow, counter: Cell::new(0), peers, contract: t.contract(&f.name) }
    }

    fn fresh(&self, base: &str) -> String {
        let k = self.counter.get() + 1;
        self.counter.set(k);
        format!("{base}@{k}")
    }

    fn tr(&self) -> Translator<'_> {
        Translator::new(&self.t.symbols, &self.types, self.overflow)
    }

    fn is_global(&self, n: &str) -> bool {
        !self.locals.contains(n) && self.t.symbols.globals.contains_key(n)
    }

    fn sort(&self, n: &str) -> Sort {
        sort_of(&self.types[n])
    }

    /// The whole obligation `requires ⇒ wp(body, ensures)` over current
    /// names, before splitting.
    pub fn function_vc(&self) -> Result<Term, VcError> {
        let body = self.t.body(&self.f.name).cloned().unwrap_or_default();
        let mut hyps = vec![];
        let mut globals: Vec<(&String, &Ty)> = self.t.symbols.globals.iter().map(|(n, g)| (n, &g.ty)).collect();
        globals.retain(|(n, _)| !self.locals.contains(*n));
        for p in &self.f.params {
            hyps.push(range_fact(Term::var(&p.name, sort_of(&p.ty)), &p.ty));
        }
        for (n, ty) in &globals {
            hyps.push(range_fact(Term::var(n, sort_of(ty)), ty));
        }
        {
            let mut tr = self.tr();
            for r in &self.contract.requires {
                hyps.push(tr.formula(r));
            }
        }
        let ret_sort = sort_of(&self.f.ret);
        let post = {
            let mut tr = self.tr();
            for p in &self.f.params {
                tr.cur.subst.insert(p.name.clone(), Term::var(&old_name(&p.name), sort_of(&p.ty)));
            }
            tr.result = Some(Term::var(RESULT, ret_sort));
            Term::and(
                self.contract.ensures.iter().map(|e| Term::label(VcKind::Post, e.pos, tr.formula(e))).collect(),
            )
        };
        let normal = if self.f.ret == Ty::Void {
            post.clone()
        } else {
            let r = self.fresh("result");
            Term::forall(
                vec![(r.clone(), ret_sort)],
                Term::implies(
                    range_fact(Term::var(&r, ret_sort), &self.f.ret),
                    post.subst1(RESULT, Term::var(&r, ret_sort)),
                ),
            )
        };
        let k = Cont { normal, ret: post, brk: Term::Bool(true) };
        let w = self.stmts(&body, &k)?;
        let vc = Term::implies(Term::and(hyps), w);
        // The entry state is the initial state.
        let mut back = BTreeMap::new();
        for p in &self.f.params {
            back.insert(old_name(&p.name), Term::var(&p.name, sort_of(&p.ty)));
        }
        for (n, ty) in &globals {
            back.insert(old_name(n), Term::var(n, sort_of(ty)));
        }
        back.insert(old_name(HEAP), Term::heap());
        back.insert(old_name(ALLOC), Term::alloc());
        Ok(vc.subst(&back))
    }

    fn stmts(&self, ss: &[Stmt], k: &Cont) -> Result<Term, VcError> {
        let mut q = k.normal.clone();
        for s in ss.iter().rev() {
            q = self.stmt(s, &k.with_normal(q))?;
        }
        Ok(q)
    }

    fn stmt(&self, s: &Stmt, k: &Cont) -> Result<Term, VcError> {
        match &s.kind {
            StmtKind::Skip => Ok(k.normal.clone()),
            StmtKind::Block(b) | StmtKind::Ghost(b) => self.stmts(b, k),
            StmtKind::Local { ty, name, init: Some(e) } => {
                let mut tr = self.tr();
                let v = tr.term(e);
                Ok(Term::and(vec![tr.safety(e), tr.conversion(e, ty), k.normal.subst1(name, v)]))
            }
            StmtKind::Local { ty, name, init: None } => {
                let x = self.fresh(name);
                let s = sort_of(ty);
                Ok(Term::forall(
                    vec![(x.clone(), s)],
                    Term::implies(range_fact(Term::var(&x, s), ty), k.normal.subst1(name, Term::var(&x, s))),
                ))
            }
            StmtKind::Assign(lhs, rhs) => {
                let mut tr = self.tr();
                let v = tr.term(rhs);
                let mut parts = vec![tr.safety(rhs), tr.conversion(rhs, lhs.ty())];
                match &lhs.kind {
                    ExprKind::Var(x) => {
                        if self.is_global(x) {
                            parts.push(self.write_global(x, lhs.pos));
                        }
                        parts.push(k.normal.subst1(x, v));
                    }
                    _ => {
                        let (p, safe) = self.lvalue(&mut tr, lhs);
                        parts.push(safe);
                        parts.push(self.write_heap(p.clone(), lhs.pos));
                        let h = Term::op(Op::Store, vec![Term::heap(), p, v]);
                        parts.push(k.normal.subst1(HEAP, h));
                    }
                }
                Ok(Term::and(parts))
            }
            StmtKind::If(c, a, b) => {
                let mut tr = self.tr();
                let f = tr.formula(c);
                let wa = self.stmt(a, k)?;
                let wb = match b {
                    Some(b) => self.stmt(b, k)?,
                    None => k.normal.clone(),
                };
                Ok(Term::and(vec![tr.safety(c), Term::implies(f.clone(), wa), Term::implies(Term::not(f), wb)]))
            }
            StmtKind::Return(e) => match e {
                None => Ok(k.ret.clone()),
                Some(e) => {
                    let mut tr = self.tr();
                    let v = tr.term(e);
                    Ok(Term::and(vec![tr.safety(e), tr.conversion(e, &self.f.ret), k.ret.subst1(RESULT, v)]))
                }
            },
            StmtKind::Break => Ok(k.brk.clone()),
            StmtKind::While { annot, cond, body } => self.while_loop(s.pos, annot, cond, body, k),
            StmtKind::Call { lhs, func, args } => self.call(s.pos, lhs.as_ref(), func, args, k),
        }
    }

    /// Address of a heap lvalue and its validity obligation.
    fn lvalue(&self, tr: &mut Translator, lhs: &Expr) -> (Term, Term) {
        let (p, mut parts) = match &lhs.kind {
            ExprKind::Unary(UnOp::Deref, p) => (tr.term(p), vec![tr.safety(p)]),
            ExprKind::Index(p, i) => (Term::shift(tr.term(p), tr.term(i)), vec![tr.safety(p), tr.safety(i)]),
            _ => unreachable!("non-lvalue accepted by the checker"),
        };
        parts.push(Term::label(VcKind::Safety, lhs.pos, Term::valid(Term::alloc(), p.clone())));
        (p, Term::and(parts))
    }

    fn assigns_list(&self) -> Option<&[Expr]> {
        match &self.contract.assigns {
            Some(Locations::List(l)) => Some(l),
            Some(Locations::Nothing) => Some(&[]),
            _ => None,
        }
    }

    fn write_global(&self, g: &str, pos: Pos) -> Term {
        match self.assigns_list() {
            None => Term::Bool(true),
            Some(l) => {
                let ok = l.iter().any(|e| matches!(&e.kind, ExprKind::Var(v) if v == g));
                if ok {
                    Term::Bool(true)
                } else {
                    Term::label(VcKind::Assigns, pos, Term::Bool(false))
                }
            }
        }
    }

    /// Addresses named by heap locations of an assigns list, in the state
    /// of `tr`.
    fn heap_locs(tr: &mut Translator, l: &[Expr]) -> Vec<Term> {
        l.iter()
            .filter_map(|e| match &e.kind {
                ExprKind::Unary(UnOp::Deref, p) => Some(tr.term(p)),
                ExprKind::Index(p, i) => Some(Term::shift(tr.term(p), tr.term(i))),
                _ => None,
            })
            .collect()
    }

    fn write_heap(&self, p: Term, pos: Pos) -> Term {
        match self.assigns_list() {
            None => Term::Bool(true),
            Some(l) => {
                let mut tr = self.tr();
                tr.cur = State::entry();
                let locs = Self::heap_locs(&mut tr, l);
                Term::label(VcKind::Assigns, pos, Term::or(locs.into_iter().map(|q| Term::eq(p.clone(), q)).collect()))
            }
        }
    }

    fn modified(&self, body: &Stmt) -> (BTreeSet<String>, bool, bool) {
        let mut vars = BTreeSet::new();
        let (mut heap, mut alloc) = (false, false);
        body.walk(&mut |s| {
            let mut target = |e: &Expr| match &e.kind {
                ExprKind::Var(x) => {
                    vars.insert(x.clone());
                }
                _ => heap = true,
            };
            match &s.kind {
                StmtKind::Assign(l, _) => target(l),
                StmtKind::Local { name, .. } => {
                    vars.insert(name.clone());
                }
                StmtKind::Call { lhs, func, .. } => {
                    if let Some(l) = lhs {
                        target(l);
                    }
                    if let Some(e) = self.t.effects.get(func) {
                        for w in &e.writes {
                            match w {
                                Loc::Global(g) => {
                                    vars.insert(g.clone());
                                }
                                Loc::Heap => heap = true,
                            }
                        }
                        alloc |= e.allocates;
                    }
                }
                _ => {}
            }
        });
        (vars, heap, alloc)
    }

    fn while_loop(&self, pos: Pos, annot: &LoopAnnot, cond: &Expr, body: &Stmt, k: &Cont) -> Result<Term, VcError> {
        if annot.invariants.is_empty() {
            return Err(VcError::MissingLoopInvariant { function: self.f.name.clone(), pos });
        }
        if self.f.lemma && annot.variant.is_none() {
            return Err(VcError::MissingLoopVariant { function: self.f.name.clone(), pos });
        }
        let mut tr = self.tr();
        let invs: Vec<(Pos, Term)> = annot.invariants.iter().map(|i| (i.pos, tr.formula(i))).collect();
        let init = Term::and(invs.iter().map(|(p, t)| Term::label(VcKind::LoopInvInit, *p, t.clone())).collect());
        let mut preserve: Vec<Term> =
            invs.iter().map(|(p, t)| Term::label(VcKind::LoopInvPreserve, *p, t.clone())).collect();
        let c = tr.formula(cond);
        let cond_safe = tr.safety(cond);
        let taken = match &annot.variant {
            Some(v) => {
                let vt = tr.term(v);
                let v0 = self.fresh("variant");
                let v0t = Term::var(&v0, Sort::Int);
                preserve.push(Term::label(VcKind::VariantDecrease, v.pos, Term::lt(vt.clone(), v0t.clone())));
                let inner = self.stmt(body, &Cont { normal: Term::and(preserve), ret: k.ret.clone(), brk: k.normal.clone() })?;
                Term::and(vec![
                    Term::label(VcKind::VariantNonneg, v.pos, Term::le(Term::Int(0), vt.clone())),
                    Term::forall(vec![(v0, Sort::Int)], Term::implies(Term::eq(v0t, vt), inner)),
                ])
            }
            None => self.stmt(body, &Cont { normal: Term::and(preserve), ret: k.ret.clone(), brk: k.normal.clone() })?,
        };
        let step = Term::and(vec![cond_safe, Term::implies(c.clone(), taken), Term::implies(Term::not(c), k.normal.clone())]);

        let (vars, heap, alloc) = self.modified(body);
        let mut binders = vec![];
        let mut facts = vec![];
        let mut map = BTreeMap::new();
        for v in &vars {
            let s = self.sort(v);
            let x = self.fresh(v);
            facts.push(range_fact(Term::var(&x, s), &self.types[v]));
            map.insert(v.clone(), Term::var(&x, s));
            binders.push((x, s));
        }
        for (on, name, s) in [(heap, HEAP, Sort::Heap), (alloc, ALLOC, Sort::Alloc)] {
            if on {
                let x = self.fresh(name);
                map.insert(name.to_string(), Term::var(&x, s));
                binders.push((x, s));
            }
        }
        facts.extend(invs.into_iter().map(|(_, t)| t));
        let havoc = Term::forall(binders, Term::implies(Term::and(facts), step).subst(&map));
        Ok(Term::and(vec![init, havoc]))
    }

    fn call(&self, pos: Pos, lhs: Option<&Expr>, func: &str, args: &[Expr], k: &Cont) -> Result<Term, VcError> {
        let callee = &self.t.symbols.functions[func];
        let cc = self.t.contract(func);
        let mut tr = self.tr();
        let mut parts = vec![];
        let mut argv = vec![];
        for (a, p) in args.iter().zip(&callee.params) {
            parts.push(tr.safety(a));
            parts.push(tr.conversion(a, &p.ty));
            argv.push(tr.term(a));
        }
        let ctypes: BTreeMap<String, Ty> = self
            .t
            .symbols
            .globals
            .iter()
            .map(|(n, g)| (n.clone(), g.ty.clone()))
            .chain(callee.params.iter().map(|p| (p.name.clone(), p.ty.clone())))
            .collect();
        let bind: BTreeMap<String, Term> =
            callee.params.iter().map(|p| p.name.clone()).zip(argv.iter().cloned()).collect();
        let mut pre_tr = Translator::new(&self.t.symbols, &ctypes, self.overflow);
        pre_tr.cur.subst = bind.clone();
        // Callee globals resolve to the caller's current values.
        for r in cc.requires.iter().filter(|r| !matches!(&r.kind, ExprKind::Call(f, _) if is_dummy(f))) {
            parts.push(Term::label(VcKind::CallPre, pos, pre_tr.formula(r)));
        }
        if self.peers.contains(func) {
            let (Some(dc), Some(df)) = (&cc.decreases, &self.contract.decreases) else {
                let name = if self.contract.decreases.is_none() { &self.f.name } else { func };
                return Err(VcError::MissingDecreases { function: name.to_string(), pos });
            };
            let lower = pre_tr.term(dc);
            let mut etr = self.tr();
            etr.cur = State::entry();
            let upper = etr.term(df);
            parts.push(Term::label(
                VcKind::RecDecrease,
                pos,
                Term::and(vec![Term::lt(lower, upper.clone()), Term::le(Term::Int(0), upper)]),
            ));
        }
        if self.contract.terminates.is_some() {
            parts.push(Term::label(VcKind::Terminates, pos, Term::Bool(true)));
        }

        // Post-call state.
        let eff = self.t.effects.get(func).cloned().unwrap_or_default();
        let mut binders = vec![];
        let mut facts = vec![];
        let mut map = BTreeMap::new();
        let mut post_tr = Translator::new(&self.t.symbols, &ctypes, self.overflow);
        post_tr.cur.subst = bind.clone();
        post_tr.old = State::current();
        post_tr.old.subst = bind;
        for w in &eff.writes {
            match w {
                Loc::Global(g) => {
                    let ty = &self.t.symbols.globals[g].ty;
                    let x = self.fresh(g);
                    let xt = Term::var(&x, sort_of(ty));
                    facts.push(range_fact(xt.clone(), ty));
                    post_tr.cur.subst.insert(g.clone(), xt.clone());
                    map.insert(g.clone(), xt);
                    binders.push((x, sort_of(ty)));
                    if self.is_global(g) {
                        parts.push(self.write_global(g, pos));
                    }
                }
                Loc::Heap => {
                    let x = self.fresh(HEAP);
                    let h2 = Term::var(&x, Sort::Heap);
                    post_tr.cur.heap = h2.clone();
                    map.insert(HEAP.to_string(), h2.clone());
                    binders.push((x, Sort::Heap));
                    let callee_locs = match &cc.assigns {
                        Some(Locations::List(l)) => Some(Self::heap_locs(&mut pre_tr, l)),
                        _ => None,
                    };
                    if let Some(locs) = &callee_locs {
                        let q = self.fresh("q");
                        let qt = Term::var(&q, Sort::Ptr);
                        let outside = Term::and(locs.iter().map(|l| Term::not(Term::eq(qt.clone(), l.clone()))).collect());
                        let same = Term::eq(Term::select(h2.clone(), qt.clone()), Term::select(Term::heap(), qt));
                        facts.push(Term::forall(vec![(q, Sort::Ptr)], Term::implies(outside, same)));
                    }
                    if self.assigns_list().is_some() {
                        let covered = match callee_locs {
                            Some(locs) => {
                                Term::and(locs.into_iter().map(|l| self.write_heap(l, pos)).collect())
                            }
                            None => Term::label(VcKind::Assigns, pos, Term::Bool(false)),
                        };
                        parts.push(covered);
                    }
                }
            }
        }
        if eff.allocates {
            let x = self.fresh(ALLOC);
            let a2 = Term::var(&x, Sort::Alloc);
            post_tr.cur.alloc = a2.clone();
            map.insert(ALLOC.to_string(), a2);
            binders.push((x, Sort::Alloc));
        }
        let rs = sort_of(&callee.ret);
        let result = (callee.ret != Ty::Void).then(|| {
            let x = self.fresh("result");
            let rt = Term::var(&x, rs);
            facts.push(range_fact(rt.clone(), &callee.ret));
            binders.push((x, rs));
            rt
        });
        post_tr.result = result.clone();
        for e in &cc.ensures {
            facts.push(post_tr.formula(e));
        }
        let mut after = k.normal.clone();
        if let (Some(l), Some(r)) = (lhs, &result) {
            match &l.kind {
                ExprKind::Var(x) => {
                    if self.is_global(x) {
                        parts.push(self.write_global(x, l.pos));
                    }
                    after = after.subst1(x, r.clone());
                }
                _ => {
                    // The address is evaluated after the call returns.
                    let mut ltr = self.tr();
                    let (p, safe) = self.lvalue(&mut ltr, l);
                    let h = Term::op(Op::Store, vec![Term::heap(), p.clone(), r.clone()]);
                    after = Term::and(vec![safe, self.write_heap(p, l.pos), after.subst1(HEAP, h)]);
                }
            }
        }
        let after = after.subst(&map);
        parts.push(Term::forall(binders, Term::implies(Term::and(facts), after)));
        Ok(Term::and(parts))
    }
}
