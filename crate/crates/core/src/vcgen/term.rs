//! First-order terms over integers, booleans, pointers, heaps and
//! allocation tables. This is the language VCs are stated in.

use crate::frontend::ast::{Pos, Quantifier};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sort {
    Int,
    Bool,
    Ptr,
    /// Pointer → cell value.
    Heap,
    /// Block → size.
    Alloc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Lt,
    Le,
    Add,
    Sub,
    Mul,
    Neg,
    /// `select(H, p)`
    Select,
    /// `store(H, p, v)`
    Store,
    /// `A[b]`
    Size,
    /// `ptr(b, o)`
    MkPtr,
    Blk,
    Off,
    /// `shift(p, i)`
    Shift,
    /// `valid(A, p)`
    Valid,
}

/// Proof obligation kinds, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VcKind {
    Post,
    LoopInvInit,
    LoopInvPreserve,
    VariantDecrease,
    VariantNonneg,
    CallPre,
    RecDecrease,
    Assigns,
    Safety,
    Terminates,
}

impl VcKind {
    pub const ALL: [VcKind; 10] = [
        VcKind::Post,
        VcKind::LoopInvInit,
        VcKind::LoopInvPreserve,
        VcKind::VariantDecrease,
        VcKind::VariantNonneg,
        VcKind::CallPre,
        VcKind::RecDecrease,
        VcKind::Assigns,
        VcKind::Safety,
        VcKind::Terminates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VcKind::Post => "Post",
            VcKind::LoopInvInit => "LoopInvInit",
            VcKind::LoopInvPreserve => "LoopInvPreserve",
            VcKind::VariantDecrease => "VariantDecrease",
            VcKind::VariantNonneg => "VariantNonneg",
            VcKind::CallPre => "CallPre",
            VcKind::RecDecrease => "RecDecrease",
            VcKind::Assigns => "Assigns",
            VcKind::Safety => "Safety",
            VcKind::Terminates => "Terminates",
        }
    }
}

impl fmt::Display for VcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Int(i128),
    Bool(bool),
    Var(String, Sort),
    /// Application of a logic symbol, with its result sort.
    App(String, Vec<Term>, Sort),
    Op(Op, Vec<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
    Quant(Quantifier, Vec<(String, Sort)>, Box<Term>),
    /// A goal to be split off as its own VC.
    Label(VcKind, Pos, Box<Term>),
}

pub const HEAP: &str = "$H";
pub const ALLOC: &str = "$A";
pub const RESULT: &str = "$result";
/// Largest block size, in cells, of any valid pointer (PTRDIFF_MAX).
pub const MAX_BLOCK: i128 = i64::MAX as i128;

pub fn old_name(n: &str) -> String {
    format!("{n}@old")
}

impl Term {
    pub fn var(n: &str, s: Sort) -> Term {
        Term::Var(n.to_string(), s)
    }
    pub fn heap() -> Term {
        Term::var(HEAP, Sort::Heap)
    }
    pub fn alloc() -> Term {
        Term::var(ALLOC, Sort::Alloc)
    }
    pub fn null() -> Term {
        Term::Op(Op::MkPtr, vec![Term::Int(0), Term::Int(0)])
    }
    pub fn op(o: Op, args: Vec<Term>) -> Term {
        Term::Op(o, args)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        match t {
            Term::Bool(b) => Term::Bool(!b),
            Term::Op(Op::Not, mut a) => a.pop().unwrap(),
            t => Term::Op(Op::Not, vec![t]),
        }
    }
    pub fn and(parts: Vec<Term>) -> Term {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Term::Bool(true) => {}
                Term::Bool(false) => return Term::Bool(false),
                Term::Op(Op::And, inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Term::Bool(true),
            1 => out.pop().unwrap(),
            _ => Term::Op(Op::And, out),
        }
    }
    pub fn or(parts: Vec<Term>) -> Term {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Term::Bool(false) => {}
                Term::Bool(true) => return Term::Bool(true),
                Term::Op(Op::Or, inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Term::Bool(false),
            1 => out.pop().unwrap(),
            _ => Term::Op(Op::Or, out),
        }
    }
    pub fn implies(h: Term, g: Term) -> Term {
        match (&h, &g) {
            (Term::Bool(true), _) => g,
            (Term::Bool(false), _) | (_, Term::Bool(true)) => Term::Bool(true),
            _ => Term::Op(Op::Implies, vec![h, g]),
        }
    }
    pub fn eq(a: Term, b: Term) -> Term {
        Term::Op(Op::Eq, vec![a, b])
    }
    pub fn lt(a: Term, b: Term) -> Term {
        Term::Op(Op::Lt, vec![a, b])
    }
    pub fn le(a: Term, b: Term) -> Term {
        Term::Op(Op::Le, vec![a, b])
    }
    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Term, b: Term) -> Term {
        Term::Op(Op::Add, vec![a, b])
    }
    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Term, b: Term) -> Term {
        Term::Op(Op::Sub, vec![a, b])
    }
    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        Term::Ite(Box::new(c), Box::new(a), Box::new(b))
    }
    pub fn select(h: Term, p: Term) -> Term {
        Term::Op(Op::Select, vec![h, p])
    }
    pub fn valid(a: Term, p: Term) -> Term {
        Term::Op(Op::Valid, vec![a, p])
    }
    pub fn blk(p: Term) -> Term {
        Term::Op(Op::Blk, vec![p])
    }
    pub fn off(p: Term) -> Term {
        Term::Op(Op::Off, vec![p])
    }
    pub fn shift(p: Term, i: Term) -> Term {
        match i {
            Term::Int(0) => p,
            i => Term::Op(Op::Shift, vec![p, i]),
        }
    }
    pub fn forall(vars: Vec<(String, Sort)>, body: Term) -> Term {
        if vars.is_empty() || body == Term::Bool(true) {
            return body;
        }
        Term::Quant(Quantifier::Forall, vars, Box::new(body))
    }
    pub fn exists(vars: Vec<(String, Sort)>, body: Term) -> Term {
        if vars.is_empty() {
            return body;
        }
        Term::Quant(Quantifier::Exists, vars, Box::new(body))
    }
    pub fn label(k: VcKind, pos: Pos, goal: Term) -> Term {
        Term::Label(k, pos, Box::new(goal))
    }
    /// `lo <= t <= hi`
    pub fn in_range(t: Term, lo: i128, hi: i128) -> Term {
        Term::and(vec![Term::le(Term::Int(lo), t.clone()), Term::le(t, Term::Int(hi))])
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Int(_) => Sort::Int,
            Term::Bool(_) | Term::Quant(..) | Term::Label(..) => Sort::Bool,
            Term::Var(_, s) | Term::App(_, _, s) => *s,
            Term::Ite(_, a, _) => a.sort(),
            Term::Op(o, args) => match o {
                Op::Not | Op::And | Op::Or | Op::Implies | Op::Iff | Op::Eq | Op::Lt | Op::Le | Op::Valid => {
                    Sort::Bool
                }
                Op::Add | Op::Sub | Op::Mul | Op::Neg | Op::Select | Op::Size | Op::Blk | Op::Off => Sort::Int,
                Op::MkPtr | Op::Shift => Sort::Ptr,
                Op::Store => args[0].sort(),
            },
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Int(_) | Term::Bool(_) | Term::Var(..) => vec![],
            Term::App(_, a, _) | Term::Op(_, a) => a.iter().collect(),
            Term::Ite(c, a, b) => vec![c, a, b],
            Term::Quant(_, _, b) | Term::Label(_, _, b) => vec![b],
        }
    }

    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeMap<String, Sort>) {
            match t {
                Term::Var(n, s) if !bound.contains(n) => {
                    out.insert(n.clone(), *s);
                }
                Term::Quant(_, vs, b) => {
                    let k = bound.len();
                    bound.extend(vs.iter().map(|(n, _)| n.clone()));
                    go(b, bound, out);
                    bound.truncate(k);
                }
                _ => t.children().into_iter().for_each(|c| go(c, bound, out)),
            }
        }
        let mut out = BTreeMap::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Logic symbols applied anywhere in the term.
    pub fn symbols(&self, out: &mut BTreeSet<String>) {
        if let Term::App(f, _, _) = self {
            out.insert(f.clone());
        }
        self.children().into_iter().for_each(|c| c.symbols(out));
    }

    pub fn has_label(&self) -> bool {
        matches!(self, Term::Label(..)) || self.children().into_iter().any(Term::has_label)
    }

    /// Capture-avoiding simultaneous substitution of variables.
    pub fn subst(&self, map: &BTreeMap<String, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        let mut fv = BTreeSet::new();
        for t in map.values() {
            fv.extend(t.free_vars().into_keys());
        }
        self.subst_inner(map, &fv)
    }

    fn subst_inner(&self, map: &BTreeMap<String, Term>, fv: &BTreeSet<String>) -> Term {
        match self {
            Term::Var(n, _) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Term::Int(_) | Term::Bool(_) => self.clone(),
            Term::App(f, a, s) => Term::App(f.clone(), a.iter().map(|x| x.subst_inner(map, fv)).collect(), *s),
            Term::Op(o, a) => Term::Op(*o, a.iter().map(|x| x.subst_inner(map, fv)).collect()),
            Term::Ite(c, a, b) => Term::ite(c.subst_inner(map, fv), a.subst_inner(map, fv), b.subst_inner(map, fv)),
            Term::Label(k, p, g) => Term::Label(*k, *p, Box::new(g.subst_inner(map, fv))),
            Term::Quant(q, vs, body) => {
                let mut inner = map.clone();
                let mut vars = Vec::with_capacity(vs.len());
                for (n, s) in vs {
                    inner.remove(n);
                    if fv.contains(n) {
                        let mut k = 0;
                        let fresh = loop {
                            let c = format!("{n}@q{k}");
                            if !fv.contains(&c) && !body.free_vars().contains_key(&c) {
                                break c;
                            }
                            k += 1;
                        };
                        inner.insert(n.clone(), Term::Var(fresh.clone(), *s));
                        vars.push((fresh, *s));
                    } else {
                        vars.push((n.clone(), *s));
                    }
                }
                let mut fv2 = fv.clone();
                fv2.extend(vars.iter().map(|(n, _)| n.clone()));
                Term::Quant(*q, vars, Box::new(body.subst_inner(&inner, &fv2)))
            }
        }
    }

    pub fn subst1(&self, name: &str, by: Term) -> Term {
        self.subst(&BTreeMap::from([(name.to_string(), by)]))
    }

    /// Replaces applications of the named symbols.
    pub fn rename_apps(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::App(f, a, s) => Term::App(
                map.get(f).cloned().unwrap_or_else(|| f.clone()),
                a.iter().map(|x| x.rename_apps(map)).collect(),
                *s,
            ),
            Term::Int(_) | Term::Bool(_) | Term::Var(..) => self.clone(),
            Term::Op(o, a) => Term::Op(*o, a.iter().map(|x| x.rename_apps(map)).collect()),
            Term::Ite(c, a, b) => Term::ite(c.rename_apps(map), a.rename_apps(map), b.rename_apps(map)),
            Term::Quant(q, vs, b) => Term::Quant(*q, vs.clone(), Box::new(b.rename_apps(map))),
            Term::Label(k, p, g) => Term::Label(*k, *p, Box::new(g.rename_apps(map))),
        }
    }
}

fn prec(t: &Term) -> u8 {
    match t {
        Term::Quant(..) | Term::Label(..) => 0,
        Term::Op(Op::Iff | Op::Implies, _) => 1,
        Term::Op(Op::Or, _) => 2,
        Term::Op(Op::And, _) => 3,
        Term::Op(Op::Not, _) => 4,
        Term::Op(Op::Eq | Op::Lt | Op::Le, _) => 5,
        Term::Op(Op::Add | Op::Sub, _) => 6,
        Term::Op(Op::Mul, _) => 7,
        Term::Op(Op::Neg, _) => 8,
        Term::Ite(..) => 0,
        _ => 9,
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "int",
            Sort::Bool => "bool",
            Sort::Ptr => "ptr",
            Sort::Heap => "heap",
            Sort::Alloc => "alloc",
        })
    }
}

/// Readable infix rendering used for `--emit-vcs`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |f: &mut fmt::Formatter<'_>, t: &Term, min: u8| -> fmt::Result {
            if prec(t) < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        let list = |f: &mut fmt::Formatter<'_>, args: &[Term]| -> fmt::Result {
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            Ok(())
        };
        match self {
            Term::Int(v) => write!(f, "{v}"),
            Term::Bool(b) => write!(f, "{b}"),
            Term::Var(n, _) => f.write_str(n),
            Term::App(n, a, _) => {
                write!(f, "{n}(")?;
                list(f, a)?;
                f.write_str(")")
            }
            Term::Ite(c, a, b) => write!(f, "if {c} then {a} else {b}"),
            Term::Quant(q, vs, b) => {
                f.write_str(if *q == Quantifier::Forall { "forall " } else { "exists " })?;
                for (i, (n, s)) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}:{s}")?;
                }
                write!(f, ". {b}")
            }
            Term::Label(k, _, g) => write!(f, "[{k}] {g}"),
            Term::Op(o, a) => {
                let p = prec(self);
                let infix = |f: &mut fmt::Formatter<'_>, sym: &str| -> fmt::Result {
                    for (i, x) in a.iter().enumerate() {
                        if i > 0 {
                            write!(f, " {sym} ")?;
                        }
                        sub(f, x, p + 1)?;
                    }
                    Ok(())
                };
                match o {
                    Op::Not => {
                        f.write_str("not ")?;
                        sub(f, &a[0], p)
                    }
                    Op::Neg => {
                        f.write_str("-")?;
                        sub(f, &a[0], p + 1)
                    }
                    Op::And => infix(f, "&&"),
                    Op::Or => infix(f, "||"),
                    Op::Implies => infix(f, "==>"),
                    Op::Iff => infix(f, "<==>"),
                    Op::Eq => infix(f, "=="),
                    Op::Lt => infix(f, "<"),
                    Op::Le => infix(f, "<="),
                    Op::Add => infix(f, "+"),
                    Op::Sub => infix(f, "-"),
                    Op::Mul => infix(f, "*"),
                    Op::Select => write!(f, "{}[{}]", a[0], a[1]),
                    Op::Store => write!(f, "{}[{} := {}]", a[0], a[1], a[2]),
                    Op::Size => write!(f, "{}[{}]", a[0], a[1]),
                    Op::MkPtr => write!(f, "ptr({}, {})", a[0], a[1]),
                    Op::Blk => write!(f, "blk({})", a[0]),
                    Op::Off => write!(f, "off({})", a[0]),
                    Op::Shift => write!(f, "shift({}, {})", a[0], a[1]),
                    Op::Valid => write!(f, "valid({}, {})", a[0], a[1]),
                }
            }
        }
    }
}
