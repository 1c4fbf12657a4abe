//! Evaluation of VC terms under a concrete interpretation, with logic
//! symbols given by the defining equations of a theory.

use super::{Memory, OracleError, Pointer};
use crate::frontend::ast::Quantifier;
use crate::vcgen::term::{Op, Sort, Term, MAX_BLOCK};
use crate::vcgen::theory::LIMITED;
use crate::vcgen::Theory;
use std::collections::BTreeMap;
use std::rc::Rc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TVal {
    Int(i128),
    Bool(bool),
    Ptr(Pointer),
    /// Cells not listed read as 0.
    Heap(Rc<BTreeMap<(i128, i128), i128>>),
    Alloc(Rc<BTreeMap<i128, i128>>),
}

impl TVal {
    fn int(&self) -> Result<i128, OracleError> {
        match self {
            TVal::Int(v) => Ok(*v),
            _ => Err(OracleError::Unsupported(format!("expected an integer, got {self:?}"))),
        }
    }

    fn bool(&self) -> Result<bool, OracleError> {
        match self {
            TVal::Bool(b) => Ok(*b),
            _ => Err(OracleError::Unsupported(format!("expected a boolean, got {self:?}"))),
        }
    }

    fn ptr(&self) -> Result<Pointer, OracleError> {
        match self {
            TVal::Ptr(p) => Ok(*p),
            _ => Err(OracleError::Unsupported(format!("expected a pointer, got {self:?}"))),
        }
    }

    pub fn heap_of(m: &Memory) -> TVal {
        TVal::Heap(Rc::new(m.heap.clone()))
    }

    pub fn alloc_of(m: &Memory) -> TVal {
        TVal::Alloc(Rc::new(m.alloc.clone()))
    }
}

type Def<'a> = (&'a [(String, Sort)], &'a Term);

pub struct TermEval<'a> {
    defs: BTreeMap<&'a str, Def<'a>>,
    /// Values integer binders range over.
    pub ints: Vec<i128>,
    /// Values pointer binders range over.
    pub ptrs: Vec<Pointer>,
    pub fuel: usize,
}

impl<'a> TermEval<'a> {
    pub fn new(theory: &'a Theory) -> Self {
        let mut defs = BTreeMap::new();
        for a in &theory.axioms {
            if let (Some(Term::App(f, ..)), Term::Op(Op::Eq, sides)) = (&a.pattern, &a.body) {
                if a.name == format!("{f}_def") {
                    defs.insert(f.as_str(), (a.vars.as_slice(), &sides[1]));
                }
            }
        }
        TermEval { defs, ints: (-4..=8).collect(), ptrs: vec![Pointer::NULL], fuel: 64 }
    }

    pub fn holds(&self, t: &Term, env: &BTreeMap<String, TVal>) -> Result<bool, OracleError> {
        self.eval(t, env, self.fuel)?.bool()
    }

    pub fn eval(&self, t: &Term, env: &BTreeMap<String, TVal>, fuel: usize) -> Result<TVal, OracleError> {
        let ev = |x: &Term| self.eval(x, env, fuel);
        match t {
            Term::Int(v) => Ok(TVal::Int(*v)),
            Term::Bool(b) => Ok(TVal::Bool(*b)),
            Term::Var(n, _) => {
                env.get(n).cloned().ok_or_else(|| OracleError::Unsupported(format!("unbound constant `{n}`")))
            }
            Term::Label(_, _, g) => ev(g),
            Term::Ite(c, a, b) => {
                if ev(c)?.bool()? {
                    ev(a)
                } else {
                    ev(b)
                }
            }
            Term::App(f, args, _) => {
                let base = f.strip_suffix(LIMITED).unwrap_or(f);
                let Some((vars, body)) = self.defs.get(base) else {
                    return Err(OracleError::Unsupported(format!("`{f}` has no definition")));
                };
                if fuel == 0 {
                    return Err(OracleError::FuelExhausted);
                }
                let mut inner = BTreeMap::new();
                for ((n, _), a) in vars.iter().zip(args) {
                    inner.insert(n.clone(), ev(a)?);
                }
                self.eval(body, &inner, fuel - 1)
            }
            Term::Quant(q, vs, body) => {
                let forall = *q == Quantifier::Forall;
                let found = self.search(vs, body, env, fuel, !forall)?;
                Ok(TVal::Bool(if forall { !found } else { found }))
            }
            Term::Op(op, a) => self.op(*op, a, env, fuel),
        }
    }

    fn search(
        &self,
        vs: &[(String, Sort)],
        body: &Term,
        env: &BTreeMap<String, TVal>,
        fuel: usize,
        want: bool,
    ) -> Result<bool, OracleError> {
        let Some(((n, s), rest)) = vs.split_first() else {
            return Ok(self.eval(body, env, fuel)?.bool()? == want);
        };
        let values: Vec<TVal> = match s {
            Sort::Int => self.ints.iter().map(|v| TVal::Int(*v)).collect(),
            Sort::Bool => vec![TVal::Bool(false), TVal::Bool(true)],
            Sort::Ptr => self.ptrs.iter().map(|p| TVal::Ptr(*p)).collect(),
            _ => return Err(OracleError::Unsupported("quantifier over memories".into())),
        };
        for v in values {
            let mut inner = env.clone();
            inner.insert(n.clone(), v);
            if self.search(rest, body, &inner, fuel, want)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn op(&self, op: Op, a: &[Term], env: &BTreeMap<String, TVal>, fuel: usize) -> Result<TVal, OracleError> {
        let ev = |x: &Term| self.eval(x, env, fuel);
        let int = |x: &Term| ev(x)?.int();
        Ok(match op {
            Op::Not => TVal::Bool(!ev(&a[0])?.bool()?),
            Op::And => {
                for x in a {
                    if !ev(x)?.bool()? {
                        return Ok(TVal::Bool(false));
                    }
                }
                TVal::Bool(true)
            }
            Op::Or => {
                for x in a {
                    if ev(x)?.bool()? {
                        return Ok(TVal::Bool(true));
                    }
                }
                TVal::Bool(false)
            }
            Op::Implies => TVal::Bool(!ev(&a[0])?.bool()? || ev(&a[1])?.bool()?),
            Op::Iff => TVal::Bool(ev(&a[0])?.bool()? == ev(&a[1])?.bool()?),
            Op::Eq => TVal::Bool(ev(&a[0])? == ev(&a[1])?),
            Op::Lt => TVal::Bool(int(&a[0])? < int(&a[1])?),
            Op::Le => TVal::Bool(int(&a[0])? <= int(&a[1])?),
            Op::Add => TVal::Int(a.iter().map(int).sum::<Result<i128, _>>()?),
            Op::Sub => TVal::Int(int(&a[0])? - int(&a[1])?),
            Op::Mul => {
                let mut acc: i128 = 1;
                for x in a {
                    acc = acc.checked_mul(int(x)?).ok_or_else(|| OracleError::Trap("arithmetic blow-up".into()))?;
                }
                TVal::Int(acc)
            }
            Op::Neg => TVal::Int(-int(&a[0])?),
            Op::Select => {
                let TVal::Heap(h) = ev(&a[0])? else { return Err(OracleError::Unsupported("select".into())) };
                let p = ev(&a[1])?.ptr()?;
                TVal::Int(h.get(&(p.block, p.offset)).copied().unwrap_or(0))
            }
            Op::Store => {
                let TVal::Heap(h) = ev(&a[0])? else { return Err(OracleError::Unsupported("store".into())) };
                let p = ev(&a[1])?.ptr()?;
                let v = int(&a[2])?;
                let mut h = (*h).clone();
                h.insert((p.block, p.offset), v);
                TVal::Heap(Rc::new(h))
            }
            Op::Size => {
                let TVal::Alloc(m) = ev(&a[0])? else { return Err(OracleError::Unsupported("size".into())) };
                TVal::Int(m.get(&int(&a[1])?).copied().unwrap_or(0))
            }
            Op::MkPtr => TVal::Ptr(Pointer { block: int(&a[0])?, offset: int(&a[1])? }),
            Op::Blk => TVal::Int(ev(&a[0])?.ptr()?.block),
            Op::Off => TVal::Int(ev(&a[0])?.ptr()?.offset),
            Op::Shift => TVal::Ptr(ev(&a[0])?.ptr()?.shift(int(&a[1])?)),
            Op::Valid => {
                let TVal::Alloc(m) = ev(&a[0])? else { return Err(OracleError::Unsupported("valid".into())) };
                let p = ev(&a[1])?.ptr()?;
                let size = m.get(&p.block).copied().unwrap_or(0);
                TVal::Bool(p.block != 0 && 0 <= p.offset && p.offset < size && size <= MAX_BLOCK)
            }
        })
    }
}
