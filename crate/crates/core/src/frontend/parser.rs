use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::FrontendError;

const CONTRACT_KEYWORDS: &[&str] =
    &["requires", "ensures", "assigns", "allocates", "decreases", "terminates"];

/// Parses one file. `file` is the index this file will have in
/// [`SourceUnit::files`].
pub fn parse_file(text: &str, name: &str, file: u32) -> Result<SourceUnit, FrontendError> {
    let toks = lex(text, file)?;
    let mut p = Parser { toks, i: 0 };
    let decls = p.unit()?;
    let mut files = vec![String::new(); file as usize];
    files.push(name.to_string());
    Ok(SourceUnit { files, decls })
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

type PResult<T> = Result<T, FrontendError>;

fn is_type_word(w: &str) -> bool {
    matches!(
        w,
        "void" | "char" | "int" | "long" | "size_t" | "integer" | "boolean" | "const" | "unsigned"
    )
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn at_ident(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(FrontendError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect_punct(&mut self, p: &'static str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&[p])
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn at_type(&self) -> bool {
        matches!(self.peek(), Tok::Ident(w) if is_type_word(w))
    }

    fn ty(&mut self) -> PResult<Ty> {
        let base = self.base_ty()?;
        self.pointer_suffix(base)
    }

    fn base_ty(&mut self) -> PResult<(Ty, Pos)> {
        while self.at_ident("const") || self.at_ident("unsigned") {
            self.bump();
        }
        let pos = self.pos();
        let base = match self.ident()?.as_str() {
            "void" => Ty::Void,
            "char" => Ty::Char,
            "int" => Ty::Int,
            "long" => Ty::Long,
            "size_t" => Ty::SizeT,
            "integer" => Ty::Integer,
            "boolean" => Ty::Bool,
            other => {
                return Err(FrontendError::Syntax {
                    pos,
                    expected: vec!["type".into()],
                    found: format!("`{other}`"),
                })
            }
        };
        while self.at_ident("const") {
            self.bump();
        }
        Ok((base, pos))
    }

    fn pointer_suffix(&mut self, (base, pos): (Ty, Pos)) -> PResult<Ty> {
        if !self.at_punct("*") {
            return Ok(base);
        }
        if base != Ty::Char {
            return Err(FrontendError::Syntax {
                pos,
                expected: vec!["char *".into()],
                found: format!("pointer to {base}"),
            });
        }
        self.bump();
        while self.at_ident("const") {
            self.bump();
        }
        Ok(Ty::CharPtr)
    }

    fn unit(&mut self) -> PResult<Vec<Decl>> {
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(decls),
                Tok::AnnotOpen => {
                    self.bump();
                    self.top_annotation(&mut decls)?;
                }
                _ => decls.push(self.c_decl(Contract::default(), false, false)?),
            }
        }
    }

    fn top_annotation(&mut self, decls: &mut Vec<Decl>) -> PResult<()> {
        match self.peek().clone() {
            Tok::AnnotClose => {
                self.bump();
                Ok(())
            }
            Tok::Ident(w) if w == "ghost" => {
                self.bump();
                while *self.peek() != Tok::AnnotClose {
                    decls.push(self.ghost_decl()?);
                }
                self.bump();
                Ok(())
            }
            Tok::Ident(w) if self.is_logic_decl_start(&w) => {
                while *self.peek() != Tok::AnnotClose {
                    decls.push(self.logic_decl(false)?);
                }
                self.bump();
                Ok(())
            }
            Tok::Ident(w) if w == "lemma" || CONTRACT_KEYWORDS.contains(&w.as_str()) => {
                let (contract, lemma) = self.contract(Tok::AnnotClose)?;
                self.bump();
                decls.push(self.c_decl(contract, lemma, lemma)?);
                Ok(())
            }
            Tok::Ident(w) => {
                Err(FrontendError::UnknownClause { pos: self.pos(), keyword: w })
            }
            _ => self.error(&["annotation keyword"]),
        }
    }

    fn is_logic_decl_start(&self, w: &str) -> bool {
        match w {
            "logic" | "predicate" | "axiomatic" => true,
            "lemma" => {
                matches!(self.peek_at(1), Tok::Ident(_)) && matches!(self.peek_at(2), Tok::Punct(":"))
            }
            _ => false,
        }
    }

    fn ghost_decl(&mut self) -> PResult<Decl> {
        if *self.peek() == Tok::NestedOpen {
            self.bump();
            let (contract, lemma) = self.contract(Tok::NestedClose)?;
            self.bump();
            self.c_decl(contract, true, lemma)
        } else {
            self.c_decl(Contract::default(), true, false)
        }
    }

    /// Parses contract clauses up to (not including) `end`. Returns the
    /// contract and whether the leading `lemma` marker was present.
    fn contract(&mut self, end: Tok) -> PResult<(Contract, bool)> {
        let mut c = Contract::default();
        let mut lemma = false;
        if self.at_ident("lemma") {
            self.bump();
            lemma = true;
        }
        while *self.peek() != end {
            let pos = self.pos();
            let kw = match self.peek().clone() {
                Tok::Ident(w) => w,
                _ => return self.error(&["contract clause"]),
            };
            match kw.as_str() {
                "requires" => {
                    self.bump();
                    c.requires.push(self.expr()?);
                }
                "ensures" => {
                    self.bump();
                    c.ensures.push(self.expr()?);
                }
                "assigns" | "allocates" => {
                    self.bump();
                    let locs = self.locations()?;
                    let slot = if kw == "assigns" { &mut c.assigns } else { &mut c.allocates };
                    *slot = Some(match (slot.take(), locs) {
                        (None, l) => l,
                        (Some(Locations::List(mut a)), Locations::List(b)) => {
                            a.extend(b);
                            Locations::List(a)
                        }
                        (Some(Locations::Nothing), l) | (Some(l), Locations::Nothing) => l,
                        _ => Locations::Everything,
                    });
                }
                "decreases" | "terminates" => {
                    self.bump();
                    let e = self.expr()?;
                    let slot = if kw == "decreases" { &mut c.decreases } else { &mut c.terminates };
                    if slot.is_some() {
                        return Err(FrontendError::Syntax {
                            pos,
                            expected: vec!["at most one clause".into()],
                            found: format!("second `{kw}` clause"),
                        });
                    }
                    *slot = Some(e);
                }
                _ => return Err(FrontendError::UnknownClause { pos, keyword: kw }),
            }
            self.expect_punct(";")?;
        }
        Ok((c, lemma))
    }

    fn locations(&mut self) -> PResult<Locations> {
        match self.peek() {
            Tok::Backslash(w) if w == "nothing" => {
                self.bump();
                Ok(Locations::Nothing)
            }
            Tok::Backslash(w) if w == "everything" => {
                self.bump();
                Ok(Locations::Everything)
            }
            _ => {
                let mut l = vec![self.expr()?];
                while self.eat_punct(",") {
                    l.push(self.expr()?);
                }
                Ok(Locations::List(l))
            }
        }
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut ps = Vec::new();
        if self.at_ident("void") && matches!(self.peek_at(1), Tok::Punct(")")) {
            self.bump();
        }
        if !self.at_punct(")") {
            loop {
                let ty = self.ty()?;
                let name = self.ident()?;
                ps.push(Param { ty, name });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(ps)
    }

    fn c_decl(&mut self, contract: Contract, ghost: bool, lemma: bool) -> PResult<Decl> {
        let pos = self.pos();
        if !self.at_type() {
            return self.error(&["declaration"]);
        }
        let ty = self.ty()?;
        let name = self.ident()?;
        if self.at_punct("(") {
            let params = self.params()?;
            let body = if self.eat_punct(";") {
                None
            } else {
                Some(self.block_body(ghost)?)
            };
            let f = FunctionDecl { name, ret: ty, params, contract, body, ghost: ghost || lemma, lemma };
            return Ok(Decl { pos, item: Item::Function(f) });
        }
        if !contract.is_empty() || lemma {
            return self.error(&["("]);
        }
        let init = if self.eat_punct("=") { Some(self.expr()?) } else { None };
        self.expect_punct(";")?;
        Ok(Decl { pos, item: Item::Global(GlobalDecl { ty, name, init, ghost }) })
    }

    fn logic_decl(&mut self, in_axiomatic: bool) -> PResult<Decl> {
        let pos = self.pos();
        let kw = self.ident()?;
        let item = match kw.as_str() {
            "logic" => {
                let ret = self.ty()?;
                let name = self.ident()?;
                let params = if self.at_punct("(") { self.params()? } else { vec![] };
                let body = if self.eat_punct("=") { Some(self.expr()?) } else { None };
                self.expect_punct(";")?;
                Item::Logic(LogicDecl { name, ret, params, body })
            }
            "predicate" => {
                let name = self.ident()?;
                let params = if self.at_punct("(") { self.params()? } else { vec![] };
                let body = if self.eat_punct("=") { Some(self.expr()?) } else { None };
                self.expect_punct(";")?;
                Item::Predicate(PredicateDecl { name, params, body })
            }
            "lemma" | "axiom" if kw == "lemma" || in_axiomatic => {
                let name = self.ident()?;
                self.expect_punct(":")?;
                let formula = self.expr()?;
                self.expect_punct(";")?;
                let d = PropDecl { name, formula };
                if kw == "lemma" {
                    Item::Lemma(d)
                } else {
                    Item::Axiom(d)
                }
            }
            "axiomatic" if !in_axiomatic => {
                let name = self.ident()?;
                self.expect_punct("{")?;
                let mut items = Vec::new();
                while !self.eat_punct("}") {
                    items.push(self.logic_decl(true)?);
                }
                Item::Axiomatic(AxiomaticBlock { name, items })
            }
            _ => return Err(FrontendError::UnknownClause { pos, keyword: kw }),
        };
        Ok(Decl { pos, item })
    }

    // ---- statements ----

    fn block_body(&mut self, ghost: bool) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        while !self.eat_punct("}") {
            self.stmt_into(ghost, &mut out)?;
        }
        Ok(out)
    }

    fn loop_annot(&mut self, end: Tok, annot: &mut LoopAnnot) -> PResult<()> {
        while *self.peek() != end {
            let pos = self.pos();
            let kw = self.ident()?;
            if kw != "loop" {
                return Err(FrontendError::UnknownClause { pos, keyword: kw });
            }
            let pos = self.pos();
            let kw = self.ident()?;
            match kw.as_str() {
                "invariant" => annot.invariants.push(self.expr()?),
                "variant" => {
                    if annot.variant.is_some() {
                        return Err(FrontendError::Syntax {
                            pos,
                            expected: vec!["at most one loop variant".into()],
                            found: "second `loop variant`".into(),
                        });
                    }
                    annot.variant = Some(self.expr()?)
                }
                _ => return Err(FrontendError::UnknownClause { pos, keyword: format!("loop {kw}") }),
            }
            self.expect_punct(";")?;
        }
        self.bump();
        Ok(())
    }

    /// A single statement; a declaration initialised by a call becomes a
    /// block only here, where it cannot leak scope.
    fn stmt(&mut self, ghost: bool) -> PResult<Stmt> {
        let pos = self.pos();
        let mut out = Vec::new();
        self.stmt_into(ghost, &mut out)?;
        if out.len() == 1 {
            Ok(out.pop().unwrap())
        } else {
            Ok(Stmt::new(StmtKind::Block(out), pos))
        }
    }

    fn stmt_into(&mut self, ghost: bool, out: &mut Vec<Stmt>) -> PResult<()> {
        if self.at_type() {
            out.extend(self.simple_stmt()?);
            return self.expect_punct(";");
        }
        out.push(self.one_stmt(ghost)?);
        Ok(())
    }

    fn one_stmt(&mut self, ghost: bool) -> PResult<Stmt> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::AnnotOpen if !ghost => {
                self.bump();
                let kpos = self.pos();
                match self.peek().clone() {
                    Tok::Ident(w) if w == "loop" => {
                        let mut annot = LoopAnnot::default();
                        self.loop_annot(Tok::AnnotClose, &mut annot)?;
                        while *self.peek() == Tok::AnnotOpen
                            && matches!(self.peek_at(1), Tok::Ident(w) if w == "loop")
                        {
                            self.bump();
                            self.loop_annot(Tok::AnnotClose, &mut annot)?;
                        }
                        self.loop_stmt(annot, ghost)
                    }
                    Tok::Ident(w) if w == "ghost" => {
                        self.bump();
                        let mut body = Vec::new();
                        while *self.peek() != Tok::AnnotClose {
                            self.stmt_into(true, &mut body)?;
                        }
                        self.bump();
                        Ok(Stmt::new(StmtKind::Ghost(body), pos))
                    }
                    Tok::Ident(w) => Err(FrontendError::UnknownClause { pos: kpos, keyword: w }),
                    _ => self.error(&["loop", "ghost"]),
                }
            }
            Tok::NestedOpen if ghost => {
                self.bump();
                let mut annot = LoopAnnot::default();
                self.loop_annot(Tok::NestedClose, &mut annot)?;
                self.loop_stmt(annot, ghost)
            }
            Tok::Punct("{") => Ok(Stmt::new(StmtKind::Block(self.block_body(ghost)?), pos)),
            Tok::Punct(";") => {
                self.bump();
                Ok(Stmt::new(StmtKind::Skip, pos))
            }
            Tok::Ident(w) => match w.as_str() {
                "if" => {
                    self.bump();
                    self.expect_punct("(")?;
                    let c = self.expr()?;
                    self.expect_punct(")")?;
                    let t = self.stmt(ghost)?;
                    let e = if self.at_ident("else") {
                        self.bump();
                        Some(Box::new(self.stmt(ghost)?))
                    } else {
                        None
                    };
                    Ok(Stmt::new(StmtKind::If(c, Box::new(t), e), pos))
                }
                "while" | "for" => self.loop_stmt(LoopAnnot::default(), ghost),
                "return" => {
                    self.bump();
                    let e = if self.at_punct(";") { None } else { Some(self.expr()?) };
                    self.expect_punct(";")?;
                    Ok(Stmt::new(StmtKind::Return(e), pos))
                }
                "break" => {
                    self.bump();
                    self.expect_punct(";")?;
                    Ok(Stmt::new(StmtKind::Break, pos))
                }
                _ => {
                    let s = self.simple_stmt()?.pop().unwrap();
                    self.expect_punct(";")?;
                    Ok(s)
                }
            },
            _ => {
                let s = self.simple_stmt()?.pop().unwrap();
                self.expect_punct(";")?;
                Ok(s)
            }
        }
    }

    fn loop_stmt(&mut self, annot: LoopAnnot, ghost: bool) -> PResult<Stmt> {
        let pos = self.pos();
        if self.at_ident("while") {
            self.bump();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = self.stmt(ghost)?;
            return Ok(Stmt::new(StmtKind::While { annot, cond, body: Box::new(body) }, pos));
        }
        if !self.at_ident("for") {
            return self.error(&["while", "for"]);
        }
        self.bump();
        self.expect_punct("(")?;
        let init = if self.at_punct(";") { vec![] } else { self.simple_stmt()? };
        self.expect_punct(";")?;
        let cond = if self.at_punct(";") {
            Expr::new(ExprKind::Int(1), self.pos())
        } else {
            self.expr()?
        };
        self.expect_punct(";")?;
        let step = if self.at_punct(")") { vec![] } else { self.simple_stmt()? };
        self.expect_punct(")")?;
        let body = self.stmt(ghost)?;
        let body = if step.is_empty() {
            body
        } else {
            let bpos = body.pos;
            let mut stmts = match body.kind {
                StmtKind::Block(b) => b,
                _ => vec![body],
            };
            stmts.extend(step);
            Stmt::new(StmtKind::Block(stmts), bpos)
        };
        let w = Stmt::new(StmtKind::While { annot, cond, body: Box::new(body) }, pos);
        if init.is_empty() {
            return Ok(w);
        }
        let mut stmts = init;
        stmts.push(w);
        Ok(Stmt::new(StmtKind::Block(stmts), pos))
    }

    fn at_call(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct("("))
    }

    fn call_parts(&mut self) -> PResult<(String, Vec<Expr>)> {
        let func = self.ident()?;
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.at_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok((func, args))
    }

    /// Declaration, assignment, increment, or call, without the trailing `;`.
    fn simple_stmt(&mut self) -> PResult<Vec<Stmt>> {
        Ok(match self.simple_stmt_inner()? {
            (s, None) => vec![s],
            (s, Some(t)) => vec![s, t],
        })
    }

    fn simple_stmt_inner(&mut self) -> PResult<(Stmt, Option<Stmt>)> {
        let pos = self.pos();
        if self.at_type() {
            let ty = self.ty()?;
            let name = self.ident()?;
            if !self.eat_punct("=") {
                return Ok((Stmt::new(StmtKind::Local { ty, name, init: None }, pos), None));
            }
            if self.at_call() {
                let cpos = self.pos();
                let (func, args) = self.call_parts()?;
                let lhs = Expr::var(&name, cpos);
                return Ok((
                    Stmt::new(StmtKind::Local { ty, name, init: None }, pos),
                    Some(Stmt::new(StmtKind::Call { lhs: Some(lhs), func, args }, cpos)),
                ));
            }
            let init = self.expr()?;
            return Ok((Stmt::new(StmtKind::Local { ty, name, init: Some(init) }, pos), None));
        }
        if self.at_punct("++") || self.at_punct("--") {
            let op = if self.at_punct("++") { BinOp::Add } else { BinOp::Sub };
            self.bump();
            let lhs = self.unary()?;
            return Ok((incr(lhs, op, pos), None));
        }
        if self.at_call() {
            let (func, args) = self.call_parts()?;
            return Ok((Stmt::new(StmtKind::Call { lhs: None, func, args }, pos), None));
        }
        let lhs = self.unary()?;
        match self.peek().clone() {
            Tok::Punct("=") => {
                self.bump();
                if self.at_call() {
                    let (func, args) = self.call_parts()?;
                    return Ok((Stmt::new(StmtKind::Call { lhs: Some(lhs), func, args }, pos), None));
                }
                let rhs = self.expr()?;
                Ok((Stmt::new(StmtKind::Assign(lhs, rhs), pos), None))
            }
            Tok::Punct(op @ ("+=" | "-=")) => {
                self.bump();
                let rhs = self.expr()?;
                let op = if op == "+=" { BinOp::Add } else { BinOp::Sub };
                let value = Expr::binary(op, lhs.clone(), rhs);
                Ok((Stmt::new(StmtKind::Assign(lhs, value), pos), None))
            }
            Tok::Punct("++") => {
                self.bump();
                Ok((incr(lhs, BinOp::Add, pos), None))
            }
            Tok::Punct("--") => {
                self.bump();
                Ok((incr(lhs, BinOp::Sub, pos), None))
            }
            _ => self.error(&["=", "+=", "-=", "++", "--"]),
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        if matches!(self.peek(), Tok::Backslash(w) if w == "forall" || w == "exists") {
            return self.quant();
        }
        let pos = self.pos();
        let c = self.iff()?;
        if self.eat_punct("?") {
            let a = self.expr()?;
            self.expect_punct(":")?;
            let b = self.expr()?;
            return Ok(Expr::new(ExprKind::Cond(Box::new(c), Box::new(a), Box::new(b)), pos));
        }
        Ok(c)
    }

    fn quant(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let q = match self.bump().tok {
            Tok::Backslash(w) if w == "forall" => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        // C declarator style: `\forall char *s, c;` binds a pointer and a char.
        let mut binders = Vec::new();
        let mut base = self.base_ty()?;
        loop {
            let ty = self.pointer_suffix(base.clone())?;
            let name = self.ident()?;
            binders.push(Param { ty, name });
            if !self.eat_punct(",") {
                break;
            }
            if self.at_type() {
                base = self.base_ty()?;
            }
        }
        self.expect_punct(";")?;
        let body = self.expr()?;
        Ok(Expr::new(ExprKind::Quant(q, binders, Box::new(body)), pos))
    }

    fn iff(&mut self) -> PResult<Expr> {
        let mut l = self.implies()?;
        while self.eat_punct("<==>") {
            let r = self.implies()?;
            l = Expr::binary(BinOp::Iff, l, r);
        }
        Ok(l)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let l = self.or()?;
        if self.eat_punct("==>") {
            let r = if matches!(self.peek(), Tok::Backslash(w) if w == "forall" || w == "exists") {
                self.quant()?
            } else {
                self.implies()?
            };
            return Ok(Expr::binary(BinOp::Implies, l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut l = self.and()?;
        while self.eat_punct("||") {
            let r = self.and()?;
            l = Expr::binary(BinOp::Or, l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut l = self.comparison()?;
        while self.eat_punct("&&") {
            let r = self.comparison()?;
            l = Expr::binary(BinOp::And, l, r);
        }
        Ok(l)
    }

    fn rel_op(&self) -> Option<RelOp> {
        match self.peek() {
            Tok::Punct("==") => Some(RelOp::Eq),
            Tok::Punct("!=") => Some(RelOp::Ne),
            Tok::Punct("<") => Some(RelOp::Lt),
            Tok::Punct("<=") => Some(RelOp::Le),
            Tok::Punct(">") => Some(RelOp::Gt),
            Tok::Punct(">=") => Some(RelOp::Ge),
            _ => None,
        }
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let first = self.additive()?;
        let mut rest = Vec::new();
        while let Some(op) = self.rel_op() {
            self.bump();
            rest.push((op, self.additive()?));
        }
        if rest.is_empty() {
            Ok(first)
        } else {
            Ok(Expr::new(ExprKind::Cmp(Box::new(first), rest), pos))
        }
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut l = self.multiplicative()?;
        loop {
            let op = if self.at_punct("+") {
                BinOp::Add
            } else if self.at_punct("-") {
                BinOp::Sub
            } else {
                return Ok(l);
            };
            self.bump();
            let r = self.multiplicative()?;
            l = Expr::binary(op, l, r);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut l = self.unary()?;
        while self.eat_punct("*") {
            let r = self.unary()?;
            l = Expr::binary(BinOp::Mul, l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let op = match self.peek() {
            Tok::Punct("!") => UnOp::Not,
            Tok::Punct("-") => UnOp::Neg,
            Tok::Punct("*") => UnOp::Deref,
            _ => return self.postfix(),
        };
        self.bump();
        let e = self.unary()?;
        Ok(Expr::new(ExprKind::Unary(op, Box::new(e)), pos))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat_punct("[") {
            let idx = self.expr()?;
            self.expect_punct("]")?;
            let pos = e.pos;
            e = Expr::new(ExprKind::Index(Box::new(e), Box::new(idx)), pos);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(v), pos))
            }
            Tok::Char(c) => {
                self.bump();
                Ok(Expr::new(ExprKind::Char(c), pos))
            }
            Tok::Ident(w) if w == "NULL" => {
                self.bump();
                Ok(Expr::new(ExprKind::Null, pos))
            }
            Tok::Ident(_) if self.at_call() => {
                // A nullary application is indistinguishable from a name.
                let (f, args) = self.call_parts()?;
                if args.is_empty() {
                    return Ok(Expr::new(ExprKind::Var(f), pos));
                }
                Ok(Expr::new(ExprKind::Call(f, args), pos))
            }
            Tok::Ident(w) => {
                self.bump();
                Ok(Expr::new(ExprKind::Var(w), pos))
            }
            Tok::Punct("(") if matches!(self.peek_at(1), Tok::Ident(w) if w == "char")
                && matches!(self.peek_at(2), Tok::Punct("*"))
                && matches!(self.peek_at(3), Tok::Punct(")")) =>
            {
                // `(char *)` casts are no-ops in the single pointer type.
                self.bump_n(4);
                self.unary()
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Backslash(w) => {
                let kind = match w.as_str() {
                    "result" => ExprKind::Result,
                    "null" => ExprKind::Null,
                    "true" => ExprKind::True,
                    "false" => ExprKind::False,
                    "forall" | "exists" => return self.quant(),
                    "old" => {
                        self.bump();
                        self.expect_punct("(")?;
                        let e = self.expr()?;
                        self.expect_punct(")")?;
                        return Ok(Expr::new(ExprKind::Old(Box::new(e)), pos));
                    }
                    "valid" | "offset" | "block_length" => {
                        let b = match w.as_str() {
                            "valid" => Builtin::Valid,
                            "offset" => Builtin::Offset,
                            _ => Builtin::BlockLength,
                        };
                        self.bump();
                        self.expect_punct("(")?;
                        let e = self.expr()?;
                        self.expect_punct(")")?;
                        return Ok(Expr::new(ExprKind::Builtin(b, vec![e]), pos));
                    }
                    _ => return self.error(&["expression"]),
                };
                self.bump();
                Ok(Expr::new(kind, pos))
            }
            _ => self.error(&["expression"]),
        }
    }
}

fn incr(lhs: Expr, op: BinOp, pos: Pos) -> Stmt {
    let one = Expr::new(ExprKind::Int(1), pos);
    let value = Expr::binary(op, lhs.clone(), one);
    Stmt::new(StmtKind::Assign(lhs, value), pos)
}
