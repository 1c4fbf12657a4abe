use super::ast::*;
use std::fmt::Write;

pub fn print_unit(unit: &SourceUnit) -> String {
    let mut p = Printer::default();
    for d in &unit.decls {
        p.decl(d);
    }
    p.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e, 0);
    s
}

/// `char *s` / `int x`.
fn typed_name(ty: &Ty, name: &str) -> String {
    match ty {
        Ty::CharPtr => format!("char *{name}"),
        t => format!("{t} {name}"),
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| typed_name(&p.ty, &p.name)).collect::<Vec<_>>().join(", ")
}

fn char_lit(c: u8) -> String {
    match c {
        0 => "'\\0'".into(),
        b'\n' => "'\\n'".into(),
        b'\t' => "'\\t'".into(),
        b'\r' => "'\\r'".into(),
        b'\'' => "'\\''".into(),
        b'\\' => "'\\\\'".into(),
        0x20..=0x7e => format!("'{}'", c as char),
        _ => format!("'\\x{c:02x}'"),
    }
}

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Quant(..) => 0,
        ExprKind::Cond(..) => 1,
        ExprKind::Binary(op, ..) => match op {
            BinOp::Iff => 2,
            BinOp::Implies => 3,
            BinOp::Or => 4,
            BinOp::And => 5,
            BinOp::Add | BinOp::Sub => 7,
            BinOp::Mul => 8,
        },
        ExprKind::Cmp(..) => 6,
        ExprKind::Unary(..) => 9,
        ExprKind::Int(v) if *v < 0 => 9,
        _ => 10,
    }
}

fn expr(out: &mut String, e: &Expr, min: u8) {
    let lv = level(e);
    if lv < min {
        out.push('(');
        expr(out, e, 0);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Int(v) => write!(out, "{v}").unwrap(),
        ExprKind::Char(c) => out.push_str(&char_lit(*c)),
        ExprKind::Null => out.push_str("\\null"),
        ExprKind::True => out.push_str("\\true"),
        ExprKind::False => out.push_str("\\false"),
        ExprKind::Result => out.push_str("\\result"),
        ExprKind::Var(v) => out.push_str(v),
        ExprKind::Unary(op, a) => {
            out.push_str(match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
                UnOp::Deref => "*",
            });
            let mut inner = String::new();
            expr(&mut inner, a, 9);
            if *op == UnOp::Neg && inner.starts_with('-') {
                out.push(' ');
            }
            out.push_str(&inner);
        }
        ExprKind::Binary(op, a, b) => {
            let (sym, l, r) = match op {
                BinOp::Iff => ("<==>", 2, 3),
                BinOp::Implies => ("==>", 4, 3),
                BinOp::Or => ("||", 4, 5),
                BinOp::And => ("&&", 5, 6),
                BinOp::Add => ("+", 7, 8),
                BinOp::Sub => ("-", 7, 8),
                BinOp::Mul => ("*", 8, 9),
            };
            expr(out, a, l);
            write!(out, " {sym} ").unwrap();
            expr(out, b, r);
        }
        ExprKind::Cmp(first, rest) => {
            expr(out, first, 7);
            for (op, x) in rest {
                write!(out, " {} ", op.symbol()).unwrap();
                expr(out, x, 7);
            }
        }
        ExprKind::Index(a, i) => {
            expr(out, a, 10);
            out.push('[');
            expr(out, i, 0);
            out.push(']');
        }
        ExprKind::Call(f, args) if args.is_empty() => out.push_str(f),
        ExprKind::Call(f, args) => {
            out.push_str(f);
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 0);
            }
            out.push(')');
        }
        ExprKind::Cond(c, a, b) => {
            expr(out, c, 2);
            out.push_str(" ? ");
            expr(out, a, 1);
            out.push_str(" : ");
            expr(out, b, 1);
        }
        ExprKind::Old(a) => {
            out.push_str("\\old(");
            expr(out, a, 0);
            out.push(')');
        }
        ExprKind::Builtin(b, args) => {
            out.push_str(b.name());
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 0);
            }
            out.push(')');
        }
        ExprKind::Quant(q, binders, body) => {
            out.push_str(match q {
                Quantifier::Forall => "\\forall ",
                Quantifier::Exists => "\\exists ",
            });
            out.push_str(&params(binders));
            out.push_str("; ");
            expr(out, body, 0);
        }
    }
}

fn locations(l: &Locations) -> String {
    match l {
        Locations::Nothing => "\\nothing".into(),
        Locations::Everything => "\\everything".into(),
        Locations::List(v) => v.iter().map(print_expr).collect::<Vec<_>>().join(", "),
    }
}

/// Clause lines in canonical order.
fn contract_lines(c: &Contract) -> Vec<String> {
    let mut v = Vec::new();
    v.extend(c.requires.iter().map(|e| format!("requires {};", print_expr(e))));
    v.extend(c.ensures.iter().map(|e| format!("ensures {};", print_expr(e))));
    if let Some(l) = &c.assigns {
        v.push(format!("assigns {};", locations(l)));
    }
    if let Some(l) = &c.allocates {
        v.push(format!("allocates {};", locations(l)));
    }
    if let Some(e) = &c.decreases {
        v.push(format!("decreases {};", print_expr(e)));
    }
    if let Some(e) = &c.terminates {
        v.push(format!("terminates {};", print_expr(e)));
    }
    v
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, s: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn decl(&mut self, d: &Decl) {
        match &d.item {
            Item::Function(f) => self.function(f),
            Item::Global(g) => {
                let mut s = typed_name(&g.ty, &g.name);
                if let Some(e) = &g.init {
                    write!(s, " = {}", print_expr(e)).unwrap();
                }
                s.push(';');
                if g.ghost {
                    self.line(&format!("/*@ ghost {s} */"));
                } else {
                    self.line(&s);
                }
            }
            Item::Axiomatic(a) => {
                self.line(&format!("/*@ axiomatic {} {{", a.name));
                self.indent += 1;
                for it in &a.items {
                    self.logic_item(it);
                }
                self.indent -= 1;
                self.line("} */");
            }
            _ => {
                self.out.push_str("/*@ ");
                let save = self.indent;
                self.indent = 0;
                let start = self.out.len();
                self.logic_item(d);
                // Keep the single item on the opening line.
                let text = self.out.split_off(start);
                self.out.push_str(text.trim_end());
                self.out.push_str(" */\n");
                self.indent = save;
            }
        }
        self.out.push('\n');
    }

    fn logic_item(&mut self, d: &Decl) {
        match &d.item {
            Item::Logic(l) => {
                let mut s = format!("logic {}", typed_name(&l.ret, &l.name));
                if !l.params.is_empty() {
                    write!(s, "({})", params(&l.params)).unwrap();
                }
                if let Some(b) = &l.body {
                    write!(s, " = {}", print_expr(b)).unwrap();
                }
                s.push(';');
                self.line(&s);
            }
            Item::Predicate(p) => {
                let mut s = format!("predicate {}", p.name);
                if !p.params.is_empty() {
                    write!(s, "({})", params(&p.params)).unwrap();
                }
                if let Some(b) = &p.body {
                    write!(s, " = {}", print_expr(b)).unwrap();
                }
                s.push(';');
                self.line(&s);
            }
            Item::Lemma(p) => self.line(&format!("lemma {}: {};", p.name, print_expr(&p.formula))),
            Item::Axiom(p) => self.line(&format!("axiom {}: {};", p.name, print_expr(&p.formula))),
            Item::Axiomatic(a) => {
                self.line(&format!("axiomatic {} {{", a.name));
                self.indent += 1;
                for it in &a.items {
                    self.logic_item(it);
                }
                self.indent -= 1;
                self.line("}");
            }
            Item::Function(_) | Item::Global(_) => self.decl(d),
        }
    }

    fn function(&mut self, f: &FunctionDecl) {
        let clauses = contract_lines(&f.contract);
        let sig = format!("{}({})", typed_name(&f.ret, &f.name), params(&f.params));
        if f.ghost {
            self.line("/*@ ghost");
            if f.lemma || !clauses.is_empty() {
                let mut head = String::from("/@");
                if f.lemma {
                    head.push_str(" lemma");
                }
                self.line(&head);
                for c in &clauses {
                    self.line(&format!("  {c}"));
                }
                self.line("@/");
            }
        } else if !clauses.is_empty() {
            self.line(&format!("/*@ {}", clauses[0]));
            for c in &clauses[1..] {
                self.line(&format!("  @ {c}"));
            }
            self.line("  @*/");
        }
        match &f.body {
            None => self.line(&format!("{sig};")),
            Some(body) => {
                self.line(&sig);
                self.block(body, f.ghost);
            }
        }
        if f.ghost {
            self.line("*/");
        }
    }

    fn block(&mut self, body: &[Stmt], ghost: bool) {
        self.line("{");
        self.indent += 1;
        for s in body {
            self.stmt(s, ghost);
        }
        self.indent -= 1;
        self.line("}");
    }

    fn stmt(&mut self, s: &Stmt, ghost: bool) {
        match &s.kind {
            StmtKind::Skip => self.line(";"),
            StmtKind::Block(b) => self.block(b, ghost),
            StmtKind::Local { ty, name, init } => {
                let mut t = typed_name(ty, name);
                if let Some(e) = init {
                    write!(t, " = {}", print_expr(e)).unwrap();
                }
                t.push(';');
                self.line(&t);
            }
            StmtKind::Assign(l, r) => self.line(&format!("{} = {};", print_expr(l), print_expr(r))),
            StmtKind::Call { lhs, func, args } => {
                let args = args.iter().map(print_expr).collect::<Vec<_>>().join(", ");
                match lhs {
                    Some(l) => self.line(&format!("{} = {func}({args});", print_expr(l))),
                    None => self.line(&format!("{func}({args});")),
                }
            }
            StmtKind::If(c, t, e) => {
                self.line(&format!("if ({})", print_expr(c)));
                self.branch(t, ghost);
                if let Some(e) = e {
                    self.line("else");
                    self.branch(e, ghost);
                }
            }
            StmtKind::While { annot, cond, body } => {
                let mut clauses: Vec<String> = annot
                    .invariants
                    .iter()
                    .map(|e| format!("loop invariant {};", print_expr(e)))
                    .collect();
                if let Some(v) = &annot.variant {
                    clauses.push(format!("loop variant {};", print_expr(v)));
                }
                if !clauses.is_empty() {
                    let (open, cont, close) =
                        if ghost { ("/@", " @", " @/") } else { ("/*@", "  @", "  @*/") };
                    self.line(&format!("{open} {}", clauses[0]));
                    for c in &clauses[1..] {
                        self.line(&format!("{cont} {c}"));
                    }
                    self.line(close);
                }
                self.line(&format!("while ({})", print_expr(cond)));
                self.branch(body, ghost);
            }
            StmtKind::Return(None) => self.line("return;"),
            StmtKind::Return(Some(e)) => self.line(&format!("return {};", print_expr(e))),
            StmtKind::Break => self.line("break;"),
            StmtKind::Ghost(b) => {
                self.line("/*@ ghost");
                self.indent += 1;
                for s in b {
                    self.stmt(s, true);
                }
                self.indent -= 1;
                self.line("*/");
            }
        }
    }

    fn branch(&mut self, s: &Stmt, ghost: bool) {
        if let StmtKind::Block(b) = &s.kind {
            self.block(b, ghost);
        } else {
            self.indent += 1;
            self.stmt(s, ghost);
            self.indent -= 1;
        }
    }
}
