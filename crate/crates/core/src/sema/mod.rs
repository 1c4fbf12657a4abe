//! Name resolution, typing, code/logic separation and ghost containment.

mod effects;

use crate::frontend::ast::*;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

pub use effects::{Effects, Loc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemaError {
    #[error("{pos}: type error: {msg}")]
    TypeError { pos: Pos, msg: String },
    #[error("{pos}: logic construct in code: {msg}")]
    LogicInCode { pos: Pos, msg: String },
    #[error("{pos}: ghost code writes non-ghost state: {msg}")]
    GhostWritesReal { pos: Pos, msg: String },
    #[error("{pos}: unresolved name `{name}`")]
    UnresolvedName { pos: Pos, name: String },
}

impl SemaError {
    pub fn pos(&self) -> Pos {
        match self {
            SemaError::TypeError { pos, .. }
            | SemaError::LogicInCode { pos, .. }
            | SemaError::GhostWritesReal { pos, .. }
            | SemaError::UnresolvedName { pos, .. } => *pos,
        }
    }
}

type SResult<T> = Result<T, SemaError>;

fn type_err<T>(pos: Pos, msg: impl Into<String>) -> SResult<T> {
    Err(SemaError::TypeError { pos, msg: msg.into() })
}

fn logic_in_code<T>(pos: Pos, msg: impl Into<String>) -> SResult<T> {
    Err(SemaError::LogicInCode { pos, msg: msg.into() })
}

/// A C function, merged over its declarations and definition.
#[derive(Clone, Debug)]
pub struct FunctionInfo {
    pub name: String,
    pub ret: Ty,
    pub params: Vec<Param>,
    pub ghost: bool,
    pub lemma: bool,
    /// Indices into `SourceUnit::decls`, in textual order.
    pub decls: Vec<usize>,
    pub def: Option<usize>,
    /// The declaration carrying the contract, if any does.
    pub contract_decl: Option<usize>,
    pub pos: Pos,
    pub def_pos: Option<Pos>,
}

#[derive(Clone, Debug)]
pub struct GlobalInfo {
    pub ty: Ty,
    pub ghost: bool,
    pub pos: Pos,
}

/// A logic function or predicate.
#[derive(Clone, Debug)]
pub struct LogicInfo {
    pub name: String,
    pub params: Vec<Param>,
    /// `Bool` for predicates.
    pub ret: Ty,
    pub predicate: bool,
    pub body: Option<Expr>,
    /// Name of the enclosing axiomatic block, if any.
    pub block: Option<String>,
    pub pos: Pos,
}

impl LogicInfo {
    /// Whether the symbol depends on the memory state.
    pub fn stateful(&self) -> bool {
        self.params.iter().any(|p| p.ty == Ty::CharPtr)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Symbols {
    pub functions: BTreeMap<String, FunctionInfo>,
    pub globals: BTreeMap<String, GlobalInfo>,
    pub logic: BTreeMap<String, LogicInfo>,
    /// Logic lemmas and axioms by name.
    pub props: BTreeMap<String, Pos>,
}

/// A checked unit: every expression carries its type and nullary logic
/// symbols appear as zero-argument applications.
#[derive(Clone, Debug)]
pub struct TypedUnit {
    pub unit: SourceUnit,
    pub symbols: Symbols,
    pub effects: BTreeMap<String, Effects>,
}

impl TypedUnit {
    pub fn function(&self, name: &str) -> Option<&FunctionInfo> {
        self.symbols.functions.get(name)
    }

    fn decl_fn(&self, idx: usize) -> &FunctionDecl {
        match &self.unit.decls[idx].item {
            Item::Function(f) => f,
            _ => unreachable!("function index points at a non-function"),
        }
    }

    pub fn contract(&self, name: &str) -> Contract {
        self.function(name)
            .and_then(|f| f.contract_decl)
            .map(|i| self.decl_fn(i).contract.clone())
            .unwrap_or_default()
    }

    pub fn contract_ref(&self, name: &str) -> Option<&Contract> {
        self.function(name).and_then(|f| f.contract_decl).map(|i| &self.decl_fn(i).contract)
    }

    pub fn body(&self, name: &str) -> Option<&Vec<Stmt>> {
        self.function(name).and_then(|f| f.def).and_then(|i| self.decl_fn(i).body.as_ref())
    }

    /// Functions in order of their first declaration.
    pub fn functions_in_order(&self) -> Vec<&FunctionInfo> {
        let mut v: Vec<_> = self.symbols.functions.values().collect();
        v.sort_by_key(|f| f.decls[0]);
        v
    }
}

pub fn check(unit: SourceUnit) -> Result<TypedUnit, SemaError> {
    let symbols = collect(&unit)?;
    let mut unit = unit;
    let mut ck = Checker { syms: &symbols, scopes: vec![], loop_depth: 0 };
    for d in unit.decls.iter_mut() {
        ck.decl(d)?;
    }
    let mut symbols = symbols.clone();
    // Refresh logic bodies with their checked versions.
    for d in &unit.decls {
        refresh_logic(d, &mut symbols);
    }
    let effects = effects::compute(&unit, &symbols);
    Ok(TypedUnit { unit, symbols, effects })
}

fn refresh_logic(d: &Decl, syms: &mut Symbols) {
    match &d.item {
        Item::Logic(l) => {
            if let Some(info) = syms.logic.get_mut(&l.name) {
                info.body = l.body.clone();
            }
        }
        Item::Predicate(p) => {
            if let Some(info) = syms.logic.get_mut(&p.name) {
                info.body = p.body.clone();
            }
        }
        Item::Axiomatic(a) => a.items.iter().for_each(|d| refresh_logic(d, syms)),
        _ => {}
    }
}

fn check_code_type(ty: &Ty, pos: Pos, what: &str) -> SResult<()> {
    if ty.is_logic_only() {
        return logic_in_code(pos, format!("{what} has logic type `{ty}`"));
    }
    Ok(())
}

fn collect(unit: &SourceUnit) -> SResult<Symbols> {
    let mut s = Symbols::default();
    for (idx, d) in unit.decls.iter().enumerate() {
        collect_decl(&mut s, d, idx, None)?;
    }
    for f in s.functions.values() {
        if f.lemma && f.def.is_none() {
            return type_err(f.pos, format!("lemma function `{}` has no body", f.name));
        }
    }
    Ok(s)
}

fn collect_decl(s: &mut Symbols, d: &Decl, idx: usize, block: Option<&str>) -> SResult<()> {
    let pos = d.pos;
    let dup = |s: &Symbols, name: &str| -> SResult<()> {
        if s.logic.contains_key(name) || s.globals.contains_key(name) {
            return type_err(pos, format!("duplicate definition of `{name}`"));
        }
        Ok(())
    };
    match &d.item {
        Item::Function(f) => {
            if s.globals.contains_key(&f.name) {
                return type_err(pos, format!("`{}` is already a global variable", f.name));
            }
            check_code_type(&f.ret, pos, "return value")?;
            for p in &f.params {
                check_code_type(&p.ty, pos, &format!("parameter `{}`", p.name))?;
                if p.ty == Ty::Void {
                    return type_err(pos, format!("parameter `{}` has type void", p.name));
                }
            }
            let has_contract = !f.contract.is_empty();
            match s.functions.get_mut(&f.name) {
                None => {
                    s.functions.insert(
                        f.name.clone(),
                        FunctionInfo {
                            name: f.name.clone(),
                            ret: f.ret.clone(),
                            params: f.params.clone(),
                            ghost: f.ghost,
                            lemma: f.lemma,
                            decls: vec![idx],
                            def: f.body.as_ref().map(|_| idx),
                            contract_decl: has_contract.then_some(idx),
                            pos,
                            def_pos: f.body.as_ref().map(|_| pos),
                        },
                    );
                }
                Some(info) => {
                    let same_sig = info.ret == f.ret
                        && info.params.iter().map(|p| &p.ty).eq(f.params.iter().map(|p| &p.ty));
                    if !same_sig {
                        return type_err(pos, format!("conflicting declarations of `{}`", f.name));
                    }
                    if info.ghost != f.ghost {
                        return type_err(pos, format!("`{}` declared both ghost and non-ghost", f.name));
                    }
                    if f.body.is_some() {
                        if info.def.is_some() {
                            return type_err(pos, format!("redefinition of `{}`", f.name));
                        }
                        info.def = Some(idx);
                        info.def_pos = Some(pos);
                        // Parameter names of the definition are the ones in scope.
                        info.params = f.params.clone();
                    }
                    if has_contract {
                        if info.contract_decl.is_some() {
                            return type_err(pos, format!("`{}` has more than one contract", f.name));
                        }
                        info.contract_decl = Some(idx);
                    }
                    info.lemma |= f.lemma;
                    info.decls.push(idx);
                }
            }
        }
        Item::Global(g) => {
            if s.globals.contains_key(&g.name) || s.functions.contains_key(&g.name) {
                return type_err(pos, format!("duplicate definition of `{}`", g.name));
            }
            dup(s, &g.name)?;
            check_code_type(&g.ty, pos, &format!("global `{}`", g.name))?;
            if g.ty == Ty::Void {
                return type_err(pos, "void global");
            }
            s.globals.insert(g.name.clone(), GlobalInfo { ty: g.ty.clone(), ghost: g.ghost, pos });
        }
        Item::Logic(l) => {
            dup(s, &l.name)?;
            if l.ret == Ty::Void {
                return type_err(pos, "logic function returning void");
            }
            s.logic.insert(
                l.name.clone(),
                LogicInfo {
                    name: l.name.clone(),
                    params: l.params.clone(),
                    ret: l.ret.clone(),
                    predicate: false,
                    body: l.body.clone(),
                    block: block.map(String::from),
                    pos,
                },
            );
        }
        Item::Predicate(p) => {
            dup(s, &p.name)?;
            s.logic.insert(
                p.name.clone(),
                LogicInfo {
                    name: p.name.clone(),
                    params: p.params.clone(),
                    ret: Ty::Bool,
                    predicate: true,
                    body: p.body.clone(),
                    block: block.map(String::from),
                    pos,
                },
            );
        }
        Item::Lemma(p) | Item::Axiom(p) => {
            if s.props.insert(p.name.clone(), pos).is_some() {
                return type_err(pos, format!("duplicate lemma or axiom `{}`", p.name));
            }
        }
        Item::Axiomatic(a) => {
            for it in &a.items {
                collect_decl(s, it, idx, Some(&a.name))?;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarKind {
    Param,
    Local,
    Binder,
}

#[derive(Clone, Debug)]
struct VarInfo {
    ty: Ty,
    ghost: bool,
    kind: VarKind,
}

/// What an expression position admits.
#[derive(Clone, Debug)]
struct Ctx<'a> {
    logic: bool,
    ghost: bool,
    result: Option<&'a Ty>,
    old: bool,
    /// Logic definitions and axioms: no C globals.
    pure_logic: bool,
}

impl<'a> Ctx<'a> {
    fn code(ghost: bool) -> Self {
        Ctx { logic: false, ghost, result: None, old: false, pure_logic: false }
    }

    /// Specifications may mention ghost state.
    fn spec() -> Self {
        Ctx { logic: true, ghost: true, result: None, old: false, pure_logic: false }
    }

    fn pure() -> Self {
        Ctx { logic: true, ghost: true, result: None, old: false, pure_logic: true }
    }
}

struct Checker<'s> {
    syms: &'s Symbols,
    scopes: Vec<HashMap<String, VarInfo>>,
    loop_depth: usize,
}

fn boolish(t: &Ty) -> bool {
    matches!(t, Ty::Bool | Ty::CharPtr) || t.is_integral()
}

impl Checker<'_> {
    fn lookup(&self, name: &str) -> Option<&VarInfo> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn bind(&mut self, name: &str, info: VarInfo, pos: Pos) -> SResult<()> {
        if info.kind != VarKind::Binder {
            if let Some(prev) = self.lookup(name) {
                if prev.kind != VarKind::Binder {
                    return type_err(pos, format!("`{name}` shadows an enclosing variable"));
                }
            }
            if self.syms.globals.contains_key(name) {
                return type_err(pos, format!("`{name}` shadows a global variable"));
            }
        }
        self.scopes.last_mut().unwrap().insert(name.to_string(), info);
        Ok(())
    }

    fn decl(&mut self, d: &mut Decl) -> SResult<()> {
        let pos = d.pos;
        match &mut d.item {
            Item::Function(f) => self.function(f, pos),
            Item::Global(g) => {
                if let Some(init) = &mut g.init {
                    self.scopes.push(HashMap::new());
                    let t = self.expr(init, &Ctx::code(g.ghost))?;
                    self.scopes.pop();
                    assignable(&g.ty, &t, init.pos)?;
                }
                Ok(())
            }
            Item::Logic(l) => {
                self.scopes.push(HashMap::new());
                for p in &l.params {
                    self.bind(&p.name, VarInfo { ty: p.ty.clone(), ghost: true, kind: VarKind::Binder }, pos)?;
                }
                if let Some(b) = &mut l.body {
                    let t = self.expr(b, &Ctx::pure())?;
                    if !compatible_logic(&l.ret, &t) {
                        self.scopes.pop();
                        return type_err(b.pos, format!("body of `{}` has type {t}, expected {}", l.name, l.ret));
                    }
                }
                self.scopes.pop();
                Ok(())
            }
            Item::Predicate(p) => {
                self.scopes.push(HashMap::new());
                for q in &p.params {
                    self.bind(&q.name, VarInfo { ty: q.ty.clone(), ghost: true, kind: VarKind::Binder }, pos)?;
                }
                if let Some(b) = &mut p.body {
                    self.formula(b, &Ctx::pure())?;
                }
                self.scopes.pop();
                Ok(())
            }
            Item::Lemma(p) | Item::Axiom(p) => {
                self.scopes.push(HashMap::new());
                self.formula(&mut p.formula, &Ctx::pure())?;
                self.scopes.pop();
                Ok(())
            }
            Item::Axiomatic(a) => {
                for it in a.items.iter_mut() {
                    self.decl(it)?;
                }
                Ok(())
            }
        }
    }

    fn formula(&mut self, e: &mut Expr, ctx: &Ctx) -> SResult<()> {
        let t = self.expr(e, ctx)?;
        if !boolish(&t) {
            return type_err(e.pos, format!("expected a formula, found {t}"));
        }
        Ok(())
    }

    fn function(&mut self, f: &mut FunctionDecl, pos: Pos) -> SResult<()> {
        self.scopes.push(HashMap::new());
        for p in &f.params {
            let info = VarInfo { ty: p.ty.clone(), ghost: f.ghost, kind: VarKind::Param };
            self.bind(&p.name, info, pos)?;
        }
        let ret = f.ret.clone();
        let c = &mut f.contract;
        let spec = Ctx::spec();
        for r in c.requires.iter_mut() {
            self.formula(r, &spec)?;
        }
        let post = Ctx { result: (ret != Ty::Void).then_some(&ret), old: true, ..spec.clone() };
        for e in c.ensures.iter_mut() {
            self.formula(e, &post)?;
        }
        for l in [&mut c.assigns, &mut c.allocates].into_iter().flatten() {
            if let Locations::List(v) = l {
                for e in v.iter_mut() {
                    self.location(e, &spec)?;
                }
            }
        }
        if let Some(e) = &mut c.decreases {
            let t = self.expr(e, &spec)?;
            if !t.is_integral() {
                return type_err(e.pos, format!("decreases measure has type {t}"));
            }
        }
        if let Some(e) = &mut c.terminates {
            self.formula(e, &spec)?;
        }
        if let Some(body) = &mut f.body {
            self.scopes.push(HashMap::new());
            for s in body.iter_mut() {
                self.stmt(s, f.ghost, &ret)?;
            }
            self.scopes.pop();
        }
        self.scopes.pop();
        Ok(())
    }

    fn location(&mut self, e: &mut Expr, ctx: &Ctx) -> SResult<()> {
        self.expr(e, ctx)?;
        match &e.kind {
            ExprKind::Var(v) if self.syms.globals.contains_key(v) && self.lookup(v).is_none() => Ok(()),
            ExprKind::Unary(UnOp::Deref, _) | ExprKind::Index(..) => Ok(()),
            _ => type_err(e.pos, "assigns location must be a global variable or a dereference"),
        }
    }

    fn stmt(&mut self, s: &mut Stmt, ghost: bool, ret: &Ty) -> SResult<()> {
        let pos = s.pos;
        match &mut s.kind {
            StmtKind::Skip => Ok(()),
            StmtKind::Block(b) => {
                self.scopes.push(HashMap::new());
                for s in b.iter_mut() {
                    self.stmt(s, ghost, ret)?;
                }
                self.scopes.pop();
                Ok(())
            }
            StmtKind::Ghost(b) => {
                if ghost {
                    return type_err(pos, "nested ghost statement");
                }
                for s in b.iter_mut() {
                    self.stmt(s, true, ret)?;
                }
                Ok(())
            }
            StmtKind::Local { ty, name, init } => {
                check_code_type(ty, pos, &format!("local `{name}`"))?;
                if *ty == Ty::Void {
                    return type_err(pos, "void local");
                }
                if let Some(e) = init {
                    let t = self.expr(e, &Ctx::code(ghost))?;
                    assignable(ty, &t, e.pos)?;
                }
                let info = VarInfo { ty: ty.clone(), ghost, kind: VarKind::Local };
                self.bind(name, info, pos)
            }
            StmtKind::Assign(lhs, rhs) => {
                let lt = self.lvalue(lhs, ghost)?;
                let rt = self.expr(rhs, &Ctx::code(ghost))?;
                assignable(&lt, &rt, rhs.pos)
            }
            StmtKind::Call { lhs, func, args } => {
                let Some(callee) = self.syms.functions.get(func.as_str()) else {
                    if self.syms.logic.contains_key(func.as_str()) {
                        return logic_in_code(pos, format!("call to logic function `{func}`"));
                    }
                    return Err(SemaError::UnresolvedName { pos, name: func.clone() });
                };
                if ghost && !callee.ghost {
                    return Err(SemaError::GhostWritesReal {
                        pos,
                        msg: format!("ghost code calls non-ghost function `{func}`"),
                    });
                }
                if !ghost && callee.ghost {
                    return type_err(pos, format!("non-ghost code calls ghost function `{func}`"));
                }
                if callee.params.len() != args.len() {
                    return type_err(
                        pos,
                        format!("`{func}` expects {} arguments, got {}", callee.params.len(), args.len()),
                    );
                }
                for (p, a) in callee.params.iter().zip(args.iter_mut()) {
                    let t = self.expr(a, &Ctx::code(ghost))?;
                    assignable(&p.ty, &t, a.pos)?;
                }
                if let Some(l) = lhs {
                    if callee.ret == Ty::Void {
                        return type_err(pos, format!("`{func}` returns void"));
                    }
                    let lt = self.lvalue(l, ghost)?;
                    assignable(&lt, &callee.ret, pos)?;
                }
                Ok(())
            }
            StmtKind::If(c, t, e) => {
                self.code_cond(c, ghost)?;
                self.scoped_stmt(t, ghost, ret)?;
                if let Some(e) = e {
                    self.scoped_stmt(e, ghost, ret)?;
                }
                Ok(())
            }
            StmtKind::While { annot, cond, body } => {
                let spec = Ctx { old: true, ..Ctx::spec() };
                for inv in annot.invariants.iter_mut() {
                    self.formula(inv, &spec)?;
                }
                if let Some(v) = &mut annot.variant {
                    let t = self.expr(v, &spec)?;
                    if !t.is_integral() {
                        return type_err(v.pos, format!("loop variant has type {t}"));
                    }
                }
                self.code_cond(cond, ghost)?;
                self.loop_depth += 1;
                let r = self.scoped_stmt(body, ghost, ret);
                self.loop_depth -= 1;
                r
            }
            StmtKind::Return(e) => match (e, ret) {
                (None, Ty::Void) => Ok(()),
                (None, _) => type_err(pos, "missing return value"),
                (Some(e), Ty::Void) => type_err(e.pos, "return value in void function"),
                (Some(e), ret) => {
                    let t = self.expr(e, &Ctx::code(ghost))?;
                    assignable(ret, &t, e.pos)
                }
            },
            StmtKind::Break => {
                if self.loop_depth == 0 {
                    return type_err(pos, "`break` outside a loop");
                }
                Ok(())
            }
        }
    }

    fn scoped_stmt(&mut self, s: &mut Stmt, ghost: bool, ret: &Ty) -> SResult<()> {
        self.scopes.push(HashMap::new());
        let r = self.stmt(s, ghost, ret);
        self.scopes.pop();
        r
    }

    fn code_cond(&mut self, c: &mut Expr, ghost: bool) -> SResult<()> {
        let t = self.expr(c, &Ctx::code(ghost))?;
        if !boolish(&t) {
            return type_err(c.pos, format!("condition has type {t}"));
        }
        Ok(())
    }

    /// Checks an assignment target and returns its type.
    fn lvalue(&mut self, e: &mut Expr, ghost: bool) -> SResult<Ty> {
        let pos = e.pos;
        match &e.kind {
            ExprKind::Var(v) => {
                let (ty, var_ghost) = match self.lookup(v) {
                    Some(info) => (info.ty.clone(), info.ghost),
                    None => match self.syms.globals.get(v.as_str()) {
                        Some(g) => (g.ty.clone(), g.ghost),
                        None => return Err(SemaError::UnresolvedName { pos, name: v.clone() }),
                    },
                };
                if ghost && !var_ghost {
                    return Err(SemaError::GhostWritesReal {
                        pos,
                        msg: format!("assignment to non-ghost variable `{v}`"),
                    });
                }
                if !ghost && var_ghost {
                    return type_err(pos, format!("non-ghost code assigns ghost variable `{v}`"));
                }
                e.ty = Some(ty.clone());
                Ok(ty)
            }
            ExprKind::Unary(UnOp::Deref, _) | ExprKind::Index(..) => {
                if ghost {
                    return Err(SemaError::GhostWritesReal { pos, msg: "ghost code writes memory".into() });
                }
                self.expr(e, &Ctx::code(ghost))
            }
            _ => type_err(pos, "not an assignable location"),
        }
    }

    fn expr(&mut self, e: &mut Expr, ctx: &Ctx) -> SResult<Ty> {
        let t = self.expr_inner(e, ctx)?;
        e.ty = Some(t.clone());
        Ok(t)
    }

    fn expr_inner(&mut self, e: &mut Expr, ctx: &Ctx) -> SResult<Ty> {
        let pos = e.pos;
        let logic = ctx.logic;
        let int_ty = |code: Ty| if logic { Ty::Integer } else { code };
        let bool_ty = || if logic { Ty::Bool } else { Ty::Int };
        match &mut e.kind {
            ExprKind::Int(v) => Ok(if logic {
                Ty::Integer
            } else if i32::try_from(*v).is_ok() {
                Ty::Int
            } else if i64::try_from(*v).is_ok() {
                Ty::Long
            } else {
                Ty::SizeT
            }),
            ExprKind::Char(_) => Ok(Ty::Char),
            ExprKind::Null => Ok(Ty::CharPtr),
            ExprKind::True | ExprKind::False => {
                if !logic {
                    return logic_in_code(pos, "boolean constant");
                }
                Ok(Ty::Bool)
            }
            ExprKind::Result => match ctx.result {
                Some(t) => Ok(t.clone()),
                None => type_err(pos, "`\\result` outside a non-void postcondition"),
            },
            ExprKind::Var(name) => {
                if let Some(info) = self.lookup(name) {
                    if !ctx.ghost && info.ghost {
                        return type_err(pos, format!("non-ghost code reads ghost variable `{name}`"));
                    }
                    return Ok(info.ty.clone());
                }
                if let Some(g) = self.syms.globals.get(name.as_str()) {
                    if ctx.pure_logic {
                        return type_err(pos, format!("logic definition reads C global `{name}`"));
                    }
                    if !ctx.ghost && g.ghost {
                        return type_err(pos, format!("non-ghost code reads ghost variable `{name}`"));
                    }
                    return Ok(g.ty.clone());
                }
                if let Some(l) = self.syms.logic.get(name.as_str()) {
                    if !logic {
                        return logic_in_code(pos, format!("logic symbol `{name}`"));
                    }
                    if !l.params.is_empty() {
                        return type_err(pos, format!("`{name}` expects {} arguments", l.params.len()));
                    }
                    let name = std::mem::take(name);
                    e.kind = ExprKind::Call(name, vec![]);
                    return Ok(l.ret.clone());
                }
                Err(SemaError::UnresolvedName { pos, name: name.clone() })
            }
            ExprKind::Unary(op, a) => {
                let t = self.expr(a, ctx)?;
                match op {
                    UnOp::Neg if t.is_integral() => Ok(int_ty(Ty::arith_join(&t, &Ty::Int))),
                    UnOp::Not if boolish(&t) => Ok(bool_ty()),
                    UnOp::Deref if t == Ty::CharPtr => Ok(Ty::Char),
                    _ => type_err(pos, format!("operand of type {t} not allowed here")),
                }
            }
            ExprKind::Binary(op, a, b) => {
                let op = *op;
                if !logic && matches!(op, BinOp::Implies | BinOp::Iff) {
                    return logic_in_code(pos, "logical implication");
                }
                let ta = self.expr(a, ctx)?;
                let tb = self.expr(b, ctx)?;
                match op {
                    BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Iff => {
                        if boolish(&ta) && boolish(&tb) {
                            Ok(bool_ty())
                        } else {
                            type_err(pos, format!("connective over {ta} and {tb}"))
                        }
                    }
                    BinOp::Add | BinOp::Sub | BinOp::Mul => {
                        if ta.is_integral() && tb.is_integral() {
                            return Ok(int_ty(Ty::arith_join(&ta, &tb)));
                        }
                        match (op, &ta, &tb) {
                            (BinOp::Add | BinOp::Sub, Ty::CharPtr, t) if t.is_integral() => Ok(Ty::CharPtr),
                            (BinOp::Add, t, Ty::CharPtr) if t.is_integral() => Ok(Ty::CharPtr),
                            (BinOp::Sub, Ty::CharPtr, Ty::CharPtr) => Ok(int_ty(Ty::Long)),
                            _ => type_err(pos, format!("arithmetic over {ta} and {tb}")),
                        }
                    }
                }
            }
            ExprKind::Cmp(first, rest) => {
                if !logic && rest.len() > 1 {
                    return logic_in_code(pos, "chained comparison");
                }
                let mut prev = self.expr(first, ctx)?;
                for (op, x) in rest.iter_mut() {
                    let t = self.expr(x, ctx)?;
                    let ok = (prev.is_integral() && t.is_integral())
                        || (prev == Ty::CharPtr && t == Ty::CharPtr)
                        || (prev == Ty::Bool && t == Ty::Bool && matches!(op, RelOp::Eq | RelOp::Ne));
                    if !ok {
                        return type_err(x.pos, format!("cannot compare {prev} with {t}"));
                    }
                    prev = t;
                }
                Ok(bool_ty())
            }
            ExprKind::Index(a, i) => {
                let ta = self.expr(a, ctx)?;
                let ti = self.expr(i, ctx)?;
                if ta != Ty::CharPtr || !ti.is_integral() {
                    return type_err(pos, format!("cannot index {ta} by {ti}"));
                }
                Ok(Ty::Char)
            }
            ExprKind::Call(f, args) => {
                if !logic {
                    if self.syms.logic.contains_key(f.as_str()) {
                        return logic_in_code(pos, format!("application of logic function `{f}`"));
                    }
                    if self.syms.functions.contains_key(f.as_str()) {
                        return type_err(pos, format!("call to `{f}` inside an expression"));
                    }
                    return Err(SemaError::UnresolvedName { pos, name: f.clone() });
                }
                let Some(info) = self.syms.logic.get(f.as_str()) else {
                    if self.syms.functions.contains_key(f.as_str()) {
                        return type_err(pos, format!("C function `{f}` used in a specification"));
                    }
                    return Err(SemaError::UnresolvedName { pos, name: f.clone() });
                };
                if info.params.len() != args.len() {
                    return type_err(
                        pos,
                        format!("`{f}` expects {} arguments, got {}", info.params.len(), args.len()),
                    );
                }
                let params: Vec<Ty> = info.params.iter().map(|p| p.ty.clone()).collect();
                let ret = info.ret.clone();
                for (p, a) in params.iter().zip(args.iter_mut()) {
                    let t = self.expr(a, ctx)?;
                    if !compatible_logic(p, &t) {
                        return type_err(a.pos, format!("argument of type {t}, expected {p}"));
                    }
                }
                Ok(ret)
            }
            ExprKind::Cond(c, a, b) => {
                let tc = self.expr(c, ctx)?;
                if !boolish(&tc) {
                    return type_err(c.pos, format!("condition has type {tc}"));
                }
                let ta = self.expr(a, ctx)?;
                let tb = self.expr(b, ctx)?;
                if ta.is_integral() && tb.is_integral() {
                    Ok(int_ty(Ty::arith_join(&ta, &tb)))
                } else if ta == tb {
                    Ok(ta)
                } else if boolish(&ta) && boolish(&tb) && logic && (ta == Ty::Bool || tb == Ty::Bool) {
                    Ok(Ty::Bool)
                } else {
                    type_err(pos, format!("branches have types {ta} and {tb}"))
                }
            }
            ExprKind::Old(a) => {
                if !logic {
                    return logic_in_code(pos, "`\\old`");
                }
                if !ctx.old {
                    return type_err(pos, "`\\old` is only allowed in postconditions and loop invariants");
                }
                self.expr(a, ctx)
            }
            ExprKind::Builtin(b, args) => {
                if !logic {
                    return logic_in_code(pos, b.name());
                }
                let t = self.expr(&mut args[0], ctx)?;
                if t != Ty::CharPtr {
                    return type_err(pos, format!("{} expects a pointer", b.name()));
                }
                Ok(match b {
                    Builtin::Valid => Ty::Bool,
                    Builtin::Offset | Builtin::BlockLength => Ty::Integer,
                })
            }
            ExprKind::Quant(_, binders, body) => {
                if !logic {
                    return logic_in_code(pos, "quantifier");
                }
                self.scopes.push(HashMap::new());
                for b in binders.iter() {
                    if b.ty == Ty::Void {
                        self.scopes.pop();
                        return type_err(pos, "void binder");
                    }
                    let info = VarInfo { ty: b.ty.clone(), ghost: true, kind: VarKind::Binder };
                    self.scopes.last_mut().unwrap().insert(b.name.clone(), info);
                }
                let r = self.formula(body, ctx);
                self.scopes.pop();
                r.map(|_| Ty::Bool)
            }
        }
    }
}

fn compatible_logic(expected: &Ty, t: &Ty) -> bool {
    (expected.is_integral() && t.is_integral())
        || expected == t
        || (*expected == Ty::Bool && boolish(t))
}

fn assignable(target: &Ty, t: &Ty, pos: Pos) -> SResult<()> {
    let ok = (target.is_machine_int() && t.is_machine_int()) || (*target == Ty::CharPtr && *t == Ty::CharPtr);
    if !ok {
        if t.is_logic_only() {
            return logic_in_code(pos, format!("value of logic type {t}"));
        }
        return type_err(pos, format!("cannot assign {t} to {target}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
