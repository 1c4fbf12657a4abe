//! SMT-LIB2 rendering of VCs.

use crate::frontend::ast::Quantifier;
use crate::vcgen::term::{Op, Sort, Term};
use crate::vcgen::{FunctionVcs, Vc};
use std::collections::BTreeSet;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("unsupported construct in `{vc}`: {what}")]
    UnsupportedConstruct { vc: String, what: String },
}

/// Names that would collide with SMT-LIB keywords or theory symbols.
const RESERVED: &[&str] = &[
    "_", "!", "as", "let", "exists", "forall", "match", "par", "assert", "check-sat", "declare-const",
    "declare-fun", "define-fun", "push", "pop", "true", "false", "not", "and", "or", "xor", "ite", "distinct",
    "select", "store", "div", "mod", "abs", "to_real", "to_int", "is_int", "Int", "Bool", "Real", "Array",
    "BINARY", "DECIMAL", "HEXADECIMAL", "NUMERAL", "STRING",
];

pub(crate) const PREAMBLE: &str = "\
(set-logic ALL)
(declare-datatypes ((lf.Ptr 0)) (((lf.ptr (lf.blk Int) (lf.off Int)))))
(define-fun lf.null () lf.Ptr (lf.ptr 0 0))
(define-fun lf.shift ((p lf.Ptr) (i Int)) lf.Ptr (lf.ptr (lf.blk p) (+ (lf.off p) i)))
(define-fun lf.valid ((a (Array Int Int)) (p lf.Ptr)) Bool
  (and (not (= (lf.blk p) 0)) (<= 0 (lf.off p)) (< (lf.off p) (select a (lf.blk p)))
       (<= (select a (lf.blk p)) 9223372036854775807)))
";

pub fn symbol(n: &str) -> String {
    if RESERVED.contains(&n) {
        format!("u.{n}")
    } else {
        n.to_string()
    }
}

pub fn sort(s: Sort) -> &'static str {
    match s {
        Sort::Int => "Int",
        Sort::Bool => "Bool",
        Sort::Ptr => "lf.Ptr",
        Sort::Heap => "(Array lf.Ptr Int)",
        Sort::Alloc => "(Array Int Int)",
    }
}

fn binders(out: &mut String, vs: &[(String, Sort)]) {
    out.push('(');
    for (i, (n, s)) in vs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} {})", symbol(n), sort(*s));
    }
    out.push(')');
}

fn op_name(o: Op) -> &'static str {
    match o {
        Op::Not => "not",
        Op::And => "and",
        Op::Or => "or",
        Op::Implies => "=>",
        Op::Iff | Op::Eq => "=",
        Op::Lt => "<",
        Op::Le => "<=",
        Op::Add => "+",
        Op::Sub | Op::Neg => "-",
        Op::Mul => "*",
        Op::Select | Op::Size => "select",
        Op::Store => "store",
        Op::MkPtr => "lf.ptr",
        Op::Blk => "lf.blk",
        Op::Off => "lf.off",
        Op::Shift => "lf.shift",
        Op::Valid => "lf.valid",
    }
}

pub fn term(out: &mut String, t: &Term) -> Result<(), String> {
    match t {
        Term::Int(v) if *v < 0 => {
            let _ = write!(out, "(- {})", v.unsigned_abs());
        }
        Term::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Term::Var(n, _) => out.push_str(&symbol(n)),
        Term::App(f, args, _) if args.is_empty() => out.push_str(&symbol(f)),
        Term::App(f, args, _) => {
            let _ = write!(out, "({}", symbol(f));
            for a in args {
                out.push(' ');
                term(out, a)?;
            }
            out.push(')');
        }
        Term::Op(Op::And, a) if a.is_empty() => out.push_str("true"),
        Term::Op(Op::Or, a) if a.is_empty() => out.push_str("false"),
        Term::Op(Op::And | Op::Or | Op::Add | Op::Mul, a) if a.len() == 1 => term(out, &a[0])?,
        Term::Op(o, args) => {
            let _ = write!(out, "({}", op_name(*o));
            for a in args {
                out.push(' ');
                term(out, a)?;
            }
            out.push(')');
        }
        Term::Ite(c, a, b) => {
            out.push_str("(ite ");
            term(out, c)?;
            out.push(' ');
            term(out, a)?;
            out.push(' ');
            term(out, b)?;
            out.push(')');
        }
        Term::Quant(q, vs, body) => {
            let _ = write!(out, "({} ", if *q == Quantifier::Forall { "forall" } else { "exists" });
            binders(out, vs);
            out.push(' ');
            term(out, body)?;
            out.push(')');
        }
        Term::Label(k, _, _) => return Err(format!("unsplit {k} label")),
    }
    Ok(())
}

fn render(t: &Term) -> Result<String, String> {
    let mut s = String::new();
    term(&mut s, t)?;
    Ok(s)
}

/// A self-contained script whose `unsat` answer proves `vc`.
pub fn encode(f: &FunctionVcs, vc: &Vc) -> Result<String, EncodeError> {
    let unsupported = |what: String| EncodeError::UnsupportedConstruct { vc: vc.name.clone(), what };
    let mut out = String::new();
    let _ = writeln!(out, "; {}", vc.name);
    out.push_str(PREAMBLE);
    let declared: BTreeSet<&str> = f.theory.decls.iter().map(|d| d.name.as_str()).collect();
    let mut used = BTreeSet::new();
    for t in vc.hypotheses.iter().chain(std::iter::once(&vc.goal)) {
        t.symbols(&mut used);
    }
    if let Some(missing) = used.iter().find(|u| !declared.contains(u.as_str())) {
        return Err(unsupported(format!("undeclared logic symbol `{missing}`")));
    }
    for d in &f.theory.decls {
        let args: Vec<&str> = d.args.iter().map(|s| sort(*s)).collect();
        let _ = writeln!(out, "(declare-fun {} ({}) {})", symbol(&d.name), args.join(" "), sort(d.ret));
    }
    for a in &f.theory.axioms {
        let body = render(&a.body).map_err(unsupported)?;
        let _ = writeln!(out, "; {}", a.name);
        if a.vars.is_empty() {
            let _ = writeln!(out, "(assert {body})");
            continue;
        }
        let mut q = String::from("(assert (forall ");
        binders(&mut q, &a.vars);
        match &a.pattern {
            Some(p) => {
                let p = render(p).map_err(unsupported)?;
                let _ = writeln!(q, " (! {body} :pattern ({p}))))");
            }
            None => {
                let _ = writeln!(q, " {body}))");
            }
        }
        out.push_str(&q);
    }
    for (n, s) in &vc.consts {
        let _ = writeln!(out, "(declare-const {} {})", symbol(n), sort(*s));
    }
    for h in &vc.hypotheses {
        let _ = writeln!(out, "(assert {})", render(h).map_err(unsupported)?);
    }
    let _ = writeln!(out, "(assert (not {}))", render(&vc.goal).map_err(unsupported)?);
    out.push_str("(check-sat)\n(get-model)\n");
    Ok(out)
}
