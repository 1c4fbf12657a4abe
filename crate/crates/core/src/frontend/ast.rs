//! Abstract syntax for the annotated C subset.
//!
//! Code and logic share one expression tree ([`Expr`]); the checker in
//! [`crate::sema`] decides which constructs are legal in which position and
//! fills in [`Expr::ty`].

use std::fmt;

/// A source position. `file` indexes [`SourceUnit::files`]; file 0 is the
/// built-in prelude when one has been prepended.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub file: u32,
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(file: u32, line: u32, col: u32) -> Self {
        Pos { file, line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Types of both languages. `Integer` and `Bool` are logic-only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Void,
    Char,
    Int,
    Long,
    SizeT,
    CharPtr,
    Integer,
    Bool,
}

impl Ty {
    pub fn is_integral(&self) -> bool {
        matches!(self, Ty::Char | Ty::Int | Ty::Long | Ty::SizeT | Ty::Integer)
    }

    /// Bounded machine integer types.
    pub fn is_machine_int(&self) -> bool {
        matches!(self, Ty::Char | Ty::Int | Ty::Long | Ty::SizeT)
    }

    pub fn is_logic_only(&self) -> bool {
        matches!(self, Ty::Integer | Ty::Bool)
    }

    /// Inclusive value range of a machine integer type.
    pub fn range(&self) -> Option<(i128, i128)> {
        match self {
            Ty::Char => Some((-128, 127)),
            Ty::Int => Some((i32::MIN as i128, i32::MAX as i128)),
            Ty::Long => Some((i64::MIN as i128, i64::MAX as i128)),
            Ty::SizeT => Some((0, u64::MAX as i128)),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Ty::Char => 0,
            Ty::Int => 1,
            Ty::Long => 2,
            Ty::SizeT => 3,
            _ => 4,
        }
    }

    /// Result type of a binary arithmetic operation on two machine integers.
    pub fn arith_join(a: &Ty, b: &Ty) -> Ty {
        let wider = if a.rank() >= b.rank() { a } else { b };
        if wider.rank() < Ty::Int.rank() {
            Ty::Int
        } else {
            wider.clone()
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Ty::Void => "void",
            Ty::Char => "char",
            Ty::Int => "int",
            Ty::Long => "long",
            Ty::SizeT => "size_t",
            Ty::CharPtr => "char *",
            Ty::Integer => "integer",
            Ty::Bool => "boolean",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    Deref,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Implies,
    Iff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// `\valid`, `\offset`, `\block_length`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Valid,
    Offset,
    BlockLength,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Valid => "\\valid",
            Builtin::Offset => "\\offset",
            Builtin::BlockLength => "\\block_length",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
    /// Filled in by the checker.
    pub ty: Option<Ty>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i128),
    Char(u8),
    Null,
    True,
    False,
    Result,
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// A (possibly chained) comparison `a < b <= c`.
    Cmp(Box<Expr>, Vec<(RelOp, Expr)>),
    Index(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Old(Box<Expr>),
    Builtin(Builtin, Vec<Expr>),
    Quant(Quantifier, Vec<Param>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos, ty: None }
    }

    pub fn var(name: &str, pos: Pos) -> Self {
        Expr::new(ExprKind::Var(name.to_string()), pos)
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        let pos = l.pos;
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), pos)
    }

    pub fn cmp(op: RelOp, l: Expr, r: Expr) -> Self {
        let pos = l.pos;
        Expr::new(ExprKind::Cmp(Box::new(l), vec![(op, r)]), pos)
    }

    /// Conjunction of a list; `\true` when empty.
    pub fn conj(mut parts: Vec<Expr>, pos: Pos) -> Expr {
        match parts.len() {
            0 => Expr::new(ExprKind::True, pos),
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, e| Expr::binary(BinOp::And, acc, e))
            }
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Char(_)
            | ExprKind::Null
            | ExprKind::True
            | ExprKind::False
            | ExprKind::Result
            | ExprKind::Var(_) => vec![],
            ExprKind::Unary(_, e) | ExprKind::Old(e) | ExprKind::Quant(_, _, e) => vec![e],
            ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => vec![a, b],
            ExprKind::Cmp(first, rest) => {
                let mut v = vec![first.as_ref()];
                v.extend(rest.iter().map(|(_, e)| e));
                v
            }
            ExprKind::Call(_, args) | ExprKind::Builtin(_, args) => args.iter().collect(),
            ExprKind::Cond(c, a, b) => vec![c, a, b],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            ExprKind::Int(_)
            | ExprKind::Char(_)
            | ExprKind::Null
            | ExprKind::True
            | ExprKind::False
            | ExprKind::Result
            | ExprKind::Var(_) => vec![],
            ExprKind::Unary(_, e) | ExprKind::Old(e) | ExprKind::Quant(_, _, e) => vec![e],
            ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => vec![a, b],
            ExprKind::Cmp(first, rest) => {
                let mut v = vec![first.as_mut()];
                v.extend(rest.iter_mut().map(|(_, e)| e));
                v
            }
            ExprKind::Call(_, args) | ExprKind::Builtin(_, args) => args.iter_mut().collect(),
            ExprKind::Cond(c, a, b) => vec![c, a, b],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        f(self);
        for c in self.children_mut() {
            c.walk_mut(f);
        }
    }

    pub fn ty(&self) -> &Ty {
        self.ty.as_ref().expect("expression not type-checked")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub ty: Ty,
    pub name: String,
}

impl Param {
    pub fn new(ty: Ty, name: &str) -> Self {
        Param { ty, name: name.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Locations {
    Nothing,
    Everything,
    List(Vec<Expr>),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Contract {
    pub requires: Vec<Expr>,
    pub ensures: Vec<Expr>,
    pub assigns: Option<Locations>,
    pub allocates: Option<Locations>,
    pub decreases: Option<Expr>,
    pub terminates: Option<Expr>,
}

impl Contract {
    pub fn is_empty(&self) -> bool {
        self.requires.is_empty()
            && self.ensures.is_empty()
            && self.assigns.is_none()
            && self.allocates.is_none()
            && self.decreases.is_none()
            && self.terminates.is_none()
    }

    pub fn exprs(&self) -> Vec<&Expr> {
        let mut out: Vec<&Expr> = self.requires.iter().chain(self.ensures.iter()).collect();
        for locs in [&self.assigns, &self.allocates].into_iter().flatten() {
            if let Locations::List(l) = locs {
                out.extend(l.iter());
            }
        }
        out.extend(self.decreases.iter());
        out.extend(self.terminates.iter());
        out
    }

    pub fn exprs_mut(&mut self) -> Vec<&mut Expr> {
        let mut out: Vec<&mut Expr> =
            self.requires.iter_mut().chain(self.ensures.iter_mut()).collect();
        for locs in [&mut self.assigns, &mut self.allocates].into_iter().flatten() {
            if let Locations::List(l) = locs {
                out.extend(l.iter_mut());
            }
        }
        out.extend(self.decreases.iter_mut());
        out.extend(self.terminates.iter_mut());
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoopAnnot {
    pub invariants: Vec<Expr>,
    pub variant: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Skip,
    Block(Vec<Stmt>),
    Local {
        ty: Ty,
        name: String,
        init: Option<Expr>,
    },
    Assign(Expr, Expr),
    Call {
        lhs: Option<Expr>,
        func: String,
        args: Vec<Expr>,
    },
    If(Expr, Box<Stmt>, Option<Box<Stmt>>),
    While {
        annot: LoopAnnot,
        cond: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Break,
    /// `/*@ ghost ... */` inside non-ghost code.
    Ghost(Vec<Stmt>),
}

impl Stmt {
    pub fn new(kind: StmtKind, pos: Pos) -> Self {
        Stmt { kind, pos }
    }

    /// Pre-order traversal over statements.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::Block(b) | StmtKind::Ghost(b) => b.iter().for_each(|s| s.walk(f)),
            StmtKind::If(_, t, e) => {
                t.walk(f);
                if let Some(e) = e {
                    e.walk(f);
                }
            }
            StmtKind::While { body, .. } => body.walk(f),
            _ => {}
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Stmt)) {
        f(self);
        match &mut self.kind {
            StmtKind::Block(b) | StmtKind::Ghost(b) => b.iter_mut().for_each(|s| s.walk_mut(f)),
            StmtKind::If(_, t, e) => {
                t.walk_mut(f);
                if let Some(e) = e {
                    e.walk_mut(f);
                }
            }
            StmtKind::While { body, .. } => body.walk_mut(f),
            _ => {}
        }
    }

    /// Expressions owned directly by this statement (not by sub-statements).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Local { init, .. } => init.iter().collect(),
            StmtKind::Assign(l, r) => vec![l, r],
            StmtKind::Call { lhs, args, .. } => lhs.iter().chain(args.iter()).collect(),
            StmtKind::If(c, _, _) => vec![c],
            StmtKind::While { annot, cond, .. } => {
                let mut v: Vec<&Expr> = annot.invariants.iter().collect();
                v.extend(annot.variant.iter());
                v.push(cond);
                v
            }
            StmtKind::Return(e) => e.iter().collect(),
            _ => vec![],
        }
    }

    pub fn own_exprs_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            StmtKind::Local { init, .. } => init.iter_mut().collect(),
            StmtKind::Assign(l, r) => vec![l, r],
            StmtKind::Call { lhs, args, .. } => lhs.iter_mut().chain(args.iter_mut()).collect(),
            StmtKind::If(c, _, _) => vec![c],
            StmtKind::While { annot, cond, .. } => {
                let mut v: Vec<&mut Expr> = annot.invariants.iter_mut().collect();
                v.extend(annot.variant.iter_mut());
                v.push(cond);
                v
            }
            StmtKind::Return(e) => e.iter_mut().collect(),
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub ret: Ty,
    pub params: Vec<Param>,
    pub contract: Contract,
    pub body: Option<Vec<Stmt>>,
    pub ghost: bool,
    pub lemma: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalDecl {
    pub ty: Ty,
    pub name: String,
    pub init: Option<Expr>,
    pub ghost: bool,
}

/// `logic T f(params) = body;` (body absent inside axiomatic blocks).
#[derive(Clone, Debug, PartialEq)]
pub struct LogicDecl {
    pub name: String,
    pub ret: Ty,
    pub params: Vec<Param>,
    pub body: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Option<Expr>,
}

/// A named formula: a logic `lemma` or an `axiom` inside a block.
#[derive(Clone, Debug, PartialEq)]
pub struct PropDecl {
    pub name: String,
    pub formula: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomaticBlock {
    pub name: String,
    pub items: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Function(FunctionDecl),
    Global(GlobalDecl),
    Logic(LogicDecl),
    Predicate(PredicateDecl),
    Lemma(PropDecl),
    Axiom(PropDecl),
    Axiomatic(AxiomaticBlock),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeclKind {
    CodeFunction,
    GhostFunction,
    LemmaFunction,
    AxiomaticBlock,
    LogicFunction,
    Predicate,
    Lemma,
    Axiom,
    GlobalVar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub pos: Pos,
    pub item: Item,
}

impl Decl {
    pub fn kind(&self) -> DeclKind {
        match &self.item {
            Item::Function(f) if f.lemma => DeclKind::LemmaFunction,
            Item::Function(f) if f.ghost => DeclKind::GhostFunction,
            Item::Function(_) => DeclKind::CodeFunction,
            Item::Global(_) => DeclKind::GlobalVar,
            Item::Logic(_) => DeclKind::LogicFunction,
            Item::Predicate(_) => DeclKind::Predicate,
            Item::Lemma(_) => DeclKind::Lemma,
            Item::Axiom(_) => DeclKind::Axiom,
            Item::Axiomatic(_) => DeclKind::AxiomaticBlock,
        }
    }

    pub fn name(&self) -> &str {
        match &self.item {
            Item::Function(f) => &f.name,
            Item::Global(g) => &g.name,
            Item::Logic(l) => &l.name,
            Item::Predicate(p) => &p.name,
            Item::Lemma(p) | Item::Axiom(p) => &p.name,
            Item::Axiomatic(a) => &a.name,
        }
    }
}

/// A parsed translation unit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceUnit {
    /// File names indexed by [`Pos::file`].
    pub files: Vec<String>,
    pub decls: Vec<Decl>,
}

impl SourceUnit {
    /// Name of the file the user supplied (the last one registered).
    pub fn main_file(&self) -> &str {
        self.files.last().map(String::as_str).unwrap_or("")
    }

    /// Clears positions and checker annotations so two units can be compared
    /// structurally.
    pub fn erase_positions(&mut self) {
        fn erase_expr(e: &mut Expr) {
            e.walk_mut(&mut |e| {
                e.pos = Pos::default();
                e.ty = None;
            });
        }
        fn erase_stmt(s: &mut Stmt) {
            s.walk_mut(&mut |s| {
                s.pos = Pos::default();
                for e in s.own_exprs_mut() {
                    erase_expr(e);
                }
            });
        }
        fn erase_decl(d: &mut Decl) {
            d.pos = Pos::default();
            match &mut d.item {
                Item::Function(f) => {
                    f.contract.exprs_mut().into_iter().for_each(erase_expr);
                    if let Some(body) = &mut f.body {
                        body.iter_mut().for_each(erase_stmt);
                    }
                }
                Item::Global(g) => g.init.iter_mut().for_each(erase_expr),
                Item::Logic(l) => l.body.iter_mut().for_each(erase_expr),
                Item::Predicate(p) => p.body.iter_mut().for_each(erase_expr),
                Item::Lemma(p) | Item::Axiom(p) => erase_expr(&mut p.formula),
                Item::Axiomatic(a) => a.items.iter_mut().for_each(erase_decl),
            }
        }
        self.decls.iter_mut().for_each(erase_decl);
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Decl, &FunctionDecl)> {
        self.decls.iter().filter_map(|d| match &d.item {
            Item::Function(f) => Some((d, f)),
            _ => None,
        })
    }
}
