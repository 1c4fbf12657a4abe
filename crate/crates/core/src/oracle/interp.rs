use super::{ConcreteState, Memory, OracleError, Pointer, Value};
use crate::frontend::ast::*;
use crate::sema::TypedUnit;
use crate::vcgen::translate::char_value;
use std::cell::Cell;
use std::collections::BTreeMap;

/// Values quantifiers range over inside formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub ints: Vec<i128>,
    pub chars: Vec<i128>,
}

impl Default for Domain {
    fn default() -> Self {
        Domain { ints: (-4..=8).collect(), chars: vec![0, b'a' as i128, b'b' as i128, b'c' as i128] }
    }
}

/// An evaluation context: variables, memory, `\result` and the pre-state.
#[derive(Clone)]
pub struct Ctx<'a> {
    pub vars: BTreeMap<String, Value>,
    pub mem: &'a Memory,
    pub result: Option<Value>,
    pub old: Option<&'a Ctx<'a>>,
}

impl<'a> Ctx<'a> {
    pub fn new(vars: BTreeMap<String, Value>, mem: &'a Memory) -> Self {
        Ctx { vars, mem, result: None, old: None }
    }
}

pub struct Interp<'a> {
    pub t: &'a TypedUnit,
    pub overflow: bool,
    pub domain: Domain,
    /// Remaining statement budget for `exec`.
    pub steps: Cell<u64>,
}

enum Flow {
    Normal,
    Return(Option<Value>),
    Break,
}

fn trap<T>(msg: impl Into<String>) -> Result<T, OracleError> {
    Err(OracleError::Trap(msg.into()))
}

impl<'a> Interp<'a> {
    pub fn new(t: &'a TypedUnit) -> Self {
        Interp { t, overflow: true, domain: Domain::default(), steps: Cell::new(100_000) }
    }

    fn in_range(&self, v: i128, ty: &Ty, pos: Pos) -> Result<i128, OracleError> {
        if self.overflow {
            if let Some((lo, hi)) = ty.range() {
                if v < lo || v > hi {
                    return trap(format!("{pos}: {v} overflows {ty}"));
                }
            }
        }
        Ok(v)
    }

    fn binder_values(&self, ty: &Ty, mem: &Memory) -> Vec<Value> {
        match ty {
            Ty::CharPtr => mem.pointers().into_iter().map(Value::Ptr).collect(),
            Ty::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Ty::Char => self.domain.chars.iter().map(|c| Value::Int(*c)).collect(),
            t => {
                let (lo, hi) = t.range().unwrap_or((i128::MIN, i128::MAX));
                self.domain.ints.iter().filter(|v| lo <= **v && **v <= hi).map(|v| Value::Int(*v)).collect()
            }
        }
    }

    /// Evaluates a logic expression; recursion through definitions is
    /// bounded by `fuel`.
    pub fn eval_logic(&self, e: &Expr, ctx: &Ctx, fuel: usize) -> Result<Value, OracleError> {
        self.eval(e, ctx, false, fuel)
    }

    /// A formula's truth value.
    pub fn holds(&self, e: &Expr, ctx: &Ctx) -> Result<bool, OracleError> {
        Ok(self.eval_logic(e, ctx, ctx.mem.total_cells() + 1)?.truthy())
    }

    fn cond(&self, e: &Expr, ctx: &Ctx, code: bool, fuel: usize) -> Result<bool, OracleError> {
        Ok(self.eval(e, ctx, code, fuel)?.truthy())
    }

    fn boolean(e: &Expr, b: bool) -> Value {
        if *e.ty() == Ty::Bool {
            Value::Bool(b)
        } else {
            Value::Int(b as i128)
        }
    }

    fn compare(op: RelOp, a: Value, b: Value, code: bool, pos: Pos) -> Result<bool, OracleError> {
        if let (Value::Ptr(p), Value::Ptr(q)) = (a, b) {
            return match op {
                RelOp::Eq => Ok(p == q),
                RelOp::Ne => Ok(p != q),
                _ if p.block != q.block => {
                    if code {
                        trap(format!("{pos}: comparison of pointers into different blocks"))
                    } else {
                        Ok(false)
                    }
                }
                _ => Self::compare(op, Value::Int(p.offset), Value::Int(q.offset), code, pos),
            };
        }
        let (x, y) = match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => (x as i128, y as i128),
            _ => (a.int()?, b.int()?),
        };
        Ok(match op {
            RelOp::Eq => x == y,
            RelOp::Ne => x != y,
            RelOp::Lt => x < y,
            RelOp::Le => x <= y,
            RelOp::Gt => x > y,
            RelOp::Ge => x >= y,
        })
    }

    fn eval(&self, e: &Expr, ctx: &Ctx, code: bool, fuel: usize) -> Result<Value, OracleError> {
        let ev = |x: &Expr| self.eval(x, ctx, code, fuel);
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Char(c) => Ok(Value::Int(char_value(*c))),
            ExprKind::Null => Ok(Value::Ptr(Pointer::NULL)),
            ExprKind::True => Ok(Value::Bool(true)),
            ExprKind::False => Ok(Value::Bool(false)),
            ExprKind::Result => ctx.result.ok_or_else(|| OracleError::Unsupported("\\result unbound".into())),
            ExprKind::Var(n) => ctx
                .vars
                .get(n)
                .copied()
                .ok_or_else(|| OracleError::Unsupported(format!("unbound variable `{n}`"))),
            ExprKind::Unary(UnOp::Neg, a) => {
                let v = -ev(a)?.int()?;
                if code {
                    self.in_range(v, e.ty(), e.pos)?;
                }
                Ok(Value::Int(v))
            }
            ExprKind::Unary(UnOp::Not, a) => Ok(Self::boolean(e, !ev(a)?.truthy())),
            ExprKind::Unary(UnOp::Deref, p) => Ok(Value::Int(ctx.mem.read(ev(p)?.ptr()?)?)),
            ExprKind::Index(p, i) => {
                let p = ev(p)?.ptr()?;
                let i = ev(i)?.int()?;
                Ok(Value::Int(ctx.mem.read(p.shift(i))?))
            }
            ExprKind::Binary(BinOp::And, a, b) => {
                let v = self.cond(a, ctx, code, fuel)? && self.cond(b, ctx, code, fuel)?;
                Ok(Self::boolean(e, v))
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                let v = self.cond(a, ctx, code, fuel)? || self.cond(b, ctx, code, fuel)?;
                Ok(Self::boolean(e, v))
            }
            ExprKind::Binary(BinOp::Implies, a, b) => {
                let v = !self.cond(a, ctx, code, fuel)? || self.cond(b, ctx, code, fuel)?;
                Ok(Value::Bool(v))
            }
            ExprKind::Binary(BinOp::Iff, a, b) => {
                Ok(Value::Bool(self.cond(a, ctx, code, fuel)? == self.cond(b, ctx, code, fuel)?))
            }
            ExprKind::Binary(op, a, b) => {
                let (x, y) = (ev(a)?, ev(b)?);
                let v = match (op, x, y) {
                    (BinOp::Add, Value::Ptr(p), i) | (BinOp::Add, i, Value::Ptr(p)) => {
                        return Ok(Value::Ptr(p.shift(i.int()?)))
                    }
                    (BinOp::Sub, Value::Ptr(p), Value::Ptr(q)) => {
                        if code && p.block != q.block {
                            return trap(format!("{}: subtraction of pointers into different blocks", e.pos));
                        }
                        p.offset - q.offset
                    }
                    (BinOp::Sub, Value::Ptr(p), i) => return Ok(Value::Ptr(p.shift(-i.int()?))),
                    (BinOp::Add, _, _) => x.int()? + y.int()?,
                    (BinOp::Sub, _, _) => x.int()? - y.int()?,
                    _ => x.int()?.checked_mul(y.int()?).ok_or_else(|| OracleError::Trap("arithmetic blow-up".into()))?,
                };
                if code {
                    self.in_range(v, e.ty(), e.pos)?;
                }
                Ok(Value::Int(v))
            }
            ExprKind::Cmp(first, rest) => {
                let mut prev = ev(first)?;
                for (op, x) in rest {
                    let v = ev(x)?;
                    if !Self::compare(*op, prev, v, code, x.pos)? {
                        return Ok(Self::boolean(e, false));
                    }
                    prev = v;
                }
                Ok(Self::boolean(e, true))
            }
            ExprKind::Call(f, args) => {
                if fuel == 0 {
                    return Err(OracleError::FuelExhausted);
                }
                let info = &self.t.symbols.logic[f.as_str()];
                let Some(body) = &info.body else {
                    return Err(OracleError::Unsupported(format!("`{f}` has no definition")));
                };
                let mut vars = BTreeMap::new();
                for (p, a) in info.params.iter().zip(args) {
                    vars.insert(p.name.clone(), ev(a)?);
                }
                self.eval(body, &Ctx::new(vars, ctx.mem), false, fuel - 1)
            }
            ExprKind::Cond(c, a, b) => {
                if self.cond(c, ctx, code, fuel)? {
                    ev(a)
                } else {
                    ev(b)
                }
            }
            ExprKind::Old(a) => match ctx.old {
                Some(o) => self.eval(a, o, code, fuel),
                None => ev(a),
            },
            ExprKind::Builtin(b, args) => {
                let p = ev(&args[0])?.ptr()?;
                Ok(match b {
                    Builtin::Valid => Value::Bool(ctx.mem.valid(p)),
                    Builtin::Offset => Value::Int(p.offset),
                    Builtin::BlockLength => Value::Int(ctx.mem.size(p.block)),
                })
            }
            ExprKind::Quant(q, binders, body) => {
                let forall = *q == Quantifier::Forall;
                let found = self.search(binders, body, ctx, fuel, !forall)?;
                Ok(Value::Bool(if forall { !found } else { found }))
            }
        }
    }

    /// Whether some assignment of `binders` gives `body` the truth value
    /// `want`.
    fn search(&self, binders: &[Param], body: &Expr, ctx: &Ctx, fuel: usize, want: bool) -> Result<bool, OracleError> {
        let Some((b, rest)) = binders.split_first() else {
            return Ok(self.cond(body, ctx, false, fuel)? == want);
        };
        for v in self.binder_values(&b.ty, ctx.mem) {
            let mut inner = ctx.clone();
            inner.vars.insert(b.name.clone(), v);
            if self.search(rest, body, &inner, fuel, want)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    // ---- code ----

    /// Runs `f` on `args` from `st`; the result and the final state.
    pub fn exec(&self, f: &str, args: Vec<Value>, st: ConcreteState) -> Result<(Option<Value>, ConcreteState), OracleError> {
        let mut st = st;
        let r = self.call(f, args, &mut st)?;
        Ok((r, st))
    }

    fn call(&self, f: &str, args: Vec<Value>, st: &mut ConcreteState) -> Result<Option<Value>, OracleError> {
        let info = &self.t.symbols.functions[f];
        let Some(body) = self.t.body(f) else {
            return Err(OracleError::Unsupported(format!("`{f}` has no body")));
        };
        let mut frame: BTreeMap<String, Value> =
            info.params.iter().map(|p| p.name.clone()).zip(args).collect();
        match self.run(body, &mut frame, st)? {
            Flow::Return(Some(Value::Int(i))) => Ok(Some(Value::Int(self.in_range(i, &info.ret, info.pos)?))),
            Flow::Return(v) => Ok(v),
            _ if info.ret == Ty::Void => Ok(None),
            _ => trap(format!("`{f}` ends without returning a value")),
        }
    }

    fn code_ctx<'m>(frame: &BTreeMap<String, Value>, st: &'m ConcreteState) -> Ctx<'m> {
        let mut vars = st.vars.clone();
        vars.extend(frame.iter().map(|(k, v)| (k.clone(), *v)));
        Ctx::new(vars, &st.mem)
    }

    fn value(&self, e: &Expr, frame: &BTreeMap<String, Value>, st: &ConcreteState) -> Result<Value, OracleError> {
        self.eval(e, &Self::code_ctx(frame, st), true, 0)
    }

    fn store(
        &self,
        lhs: &Expr,
        v: Value,
        frame: &mut BTreeMap<String, Value>,
        st: &mut ConcreteState,
    ) -> Result<(), OracleError> {
        let v = match v {
            Value::Int(i) => Value::Int(self.in_range(i, lhs.ty(), lhs.pos)?),
            v => v,
        };
        match &lhs.kind {
            ExprKind::Var(x) if frame.contains_key(x) => {
                frame.insert(x.clone(), v);
            }
            ExprKind::Var(x) => {
                st.vars.insert(x.clone(), v);
            }
            ExprKind::Unary(UnOp::Deref, p) => {
                let p = self.value(p, frame, st)?.ptr()?;
                st.mem.write(p, v.int()?)?;
            }
            ExprKind::Index(p, i) => {
                let p = self.value(p, frame, st)?.ptr()?;
                let i = self.value(i, frame, st)?.int()?;
                st.mem.write(p.shift(i), v.int()?)?;
            }
            _ => return Err(OracleError::Unsupported("assignment target".into())),
        }
        Ok(())
    }

    fn tick(&self) -> Result<(), OracleError> {
        let n = self.steps.get();
        if n == 0 {
            return Err(OracleError::FuelExhausted);
        }
        self.steps.set(n - 1);
        Ok(())
    }

    fn run(&self, ss: &[Stmt], frame: &mut BTreeMap<String, Value>, st: &mut ConcreteState) -> Result<Flow, OracleError> {
        for s in ss {
            match self.stmt(s, frame, st)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&self, s: &Stmt, frame: &mut BTreeMap<String, Value>, st: &mut ConcreteState) -> Result<Flow, OracleError> {
        self.tick()?;
        match &s.kind {
            StmtKind::Skip => Ok(Flow::Normal),
            StmtKind::Block(b) | StmtKind::Ghost(b) => self.run(b, frame, st),
            StmtKind::Local { ty, name, init } => {
                let v = match init {
                    Some(e) => match self.value(e, frame, st)? {
                        Value::Int(i) => Value::Int(self.in_range(i, ty, e.pos)?),
                        v => v,
                    },
                    None if *ty == Ty::CharPtr => Value::Ptr(Pointer::NULL),
                    None => Value::Int(0),
                };
                frame.insert(name.clone(), v);
                Ok(Flow::Normal)
            }
            StmtKind::Assign(l, r) => {
                let v = self.value(r, frame, st)?;
                self.store(l, v, frame, st)?;
                Ok(Flow::Normal)
            }
            StmtKind::Call { lhs, func, args } => {
                let callee = &self.t.symbols.functions[func.as_str()];
                let mut vals = vec![];
                for (a, p) in args.iter().zip(&callee.params) {
                    vals.push(match self.value(a, frame, st)? {
                        Value::Int(i) => Value::Int(self.in_range(i, &p.ty, a.pos)?),
                        v => v,
                    });
                }
                let r = self.call(func, vals, st)?;
                if let (Some(l), Some(v)) = (lhs, r) {
                    self.store(l, v, frame, st)?;
                }
                Ok(Flow::Normal)
            }
            StmtKind::If(c, a, b) => {
                if self.value(c, frame, st)?.truthy() {
                    self.stmt(a, frame, st)
                } else if let Some(b) = b {
                    self.stmt(b, frame, st)
                } else {
                    Ok(Flow::Normal)
                }
            }
            StmtKind::While { cond, body, .. } => loop {
                self.tick()?;
                if !self.value(cond, frame, st)?.truthy() {
                    return Ok(Flow::Normal);
                }
                match self.stmt(body, frame, st)? {
                    Flow::Normal => {}
                    Flow::Break => return Ok(Flow::Normal),
                    r @ Flow::Return(_) => return Ok(r),
                }
            },
            StmtKind::Return(None) => Ok(Flow::Return(None)),
            StmtKind::Return(Some(e)) => {
                let v = self.value(e, frame, st)?;
                Ok(Flow::Return(Some(v)))
            }
            StmtKind::Break => Ok(Flow::Break),
        }
    }
}
