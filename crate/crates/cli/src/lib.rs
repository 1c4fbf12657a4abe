//! Driver behind the `lemmaforge` binary: staged runs over input files and
//! the corpus table.

use clap::ValueEnum;
use lemmaforge_core::frontend::ast::{Item, SourceUnit};
use lemmaforge_core::frontend::pretty_print;
use lemmaforge_core::oracle::falsify_lemma;
use lemmaforge_core::pipeline::{self, check_source, elaborate_source, vcgen_source};
use lemmaforge_core::smtbackend::{discharge_all, encode, Cache};
use lemmaforge_core::{DischargeConfig, FunctionVcs, PipelineError, Report, SearchSpace, SolverConfig, Vc, VcOptions};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Check,
    Elaborate,
    Vcgen,
    Prove,
    Falsify,
    /// Prove every corpus file and print the per-function table.
    Corpus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub mode: Mode,
    pub solver: SolverConfig,
    /// 0 means one per core.
    pub jobs: usize,
    pub emit_smt: Option<PathBuf>,
    pub emit_vcs: Option<PathBuf>,
    pub emit_elaborated: Option<PathBuf>,
    pub report: ReportFormat,
    pub overflow: bool,
    pub falsify: Option<String>,
    pub space: SearchSpace,
    pub cache: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: vec![],
            mode: Mode::Check,
            solver: SolverConfig::default(),
            jobs: 0,
            emit_smt: None,
            emit_vcs: None,
            emit_elaborated: None,
            report: ReportFormat::Text,
            overflow: true,
            falsify: None,
            space: SearchSpace::default(),
            cache: None,
        }
    }
}

/// Exit codes: 0 success, 1 a VC not proved or a counterexample found,
/// 2 a usage, input or pipeline error.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(&mut self, code: i32, msg: impl AsRef<str>) {
        self.code = self.code.max(code);
        self.stderr.push_str(msg.as_ref());
        self.stderr.push('\n');
    }
}

fn diagnostic(path: &Path, e: &PipelineError) -> String {
    format!("{}:{e} [{}]", path.display(), e.stage())
}

fn write_file(out: &mut Outcome, dir: &Path, name: &str, text: &str) {
    if let Err(e) = fs::create_dir_all(dir).and_then(|_| fs::write(dir.join(name), text)) {
        out.fail(2, format!("{}: {e}", dir.join(name).display()));
    }
}

/// The declarations of the user's file, printed back as source.
pub fn user_source(unit: &SourceUnit) -> String {
    let user = SourceUnit { files: unit.files.clone(), decls: pipeline::user_decls(unit).cloned().collect() };
    pretty_print(&user)
}

/// Human-readable form of one VC.
pub fn render_vc(f: &FunctionVcs, vc: &Vc) -> String {
    let mut s = format!("{} ({} at {})\n", vc.name, vc.kind, vc.pos);
    if !f.theory.units.is_empty() {
        let _ = writeln!(s, "context: {}", f.theory.units.join(", "));
    }
    for (n, sort) in &vc.consts {
        let _ = writeln!(s, "const {n}: {sort:?}");
    }
    for h in &vc.hypotheses {
        let _ = writeln!(s, "assume {h}");
    }
    let _ = writeln!(s, "prove  {}", vc.goal);
    s
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read(out: &mut Outcome, path: &Path) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(t) => Some(t),
        Err(e) => {
            out.fail(2, format!("{}: {e}", path.display()));
            None
        }
    }
}

fn discharge_config(cfg: &RunConfig) -> DischargeConfig {
    DischargeConfig { solver: cfg.solver.clone(), jobs: cfg.jobs, cache: cfg.cache.clone().map(|dir| Cache { dir }) }
}

fn emit(cfg: &RunConfig, out: &mut Outcome, units: &[FunctionVcs]) {
    for f in units {
        for vc in &f.vcs {
            if let Some(dir) = &cfg.emit_vcs {
                write_file(out, dir, &format!("{}.vc", vc.name), &render_vc(f, vc));
            }
            if let Some(dir) = &cfg.emit_smt {
                match encode(f, vc) {
                    Ok(s) => write_file(out, dir, &format!("{}.smt2", vc.name), &s),
                    Err(e) => out.fail(2, e.to_string()),
                }
            }
        }
    }
}

fn vc_listing(units: &[FunctionVcs], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let functions: Vec<serde_json::Value> = units
                .iter()
                .map(|f| {
                    let vcs: Vec<serde_json::Value> = f
                        .vcs
                        .iter()
                        .map(|v| serde_json::json!({ "name": v.name, "kind": v.kind.name(), "pos": v.pos.to_string() }))
                        .collect();
                    serde_json::json!({ "name": f.function, "vcs": vcs })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&serde_json::json!({ "functions": functions })).unwrap();
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            for f in units {
                let _ = writeln!(s, "{} ({} VCs)", f.function, f.vcs.len());
                for v in &f.vcs {
                    let _ = writeln!(s, "  {}  at {}", v.name, v.pos);
                }
            }
            s
        }
    }
}

fn run_file(cfg: &RunConfig, out: &mut Outcome, path: &Path, report: &mut Report, listed: &mut Vec<FunctionVcs>) {
    let Some(text) = read(out, path) else { return };
    let name = path.to_string_lossy();
    match cfg.mode {
        Mode::Check => match check_source(&text, &name) {
            Ok(t) => {
                let n = pipeline::user_decls(&t.unit).count();
                let _ = writeln!(out.stdout, "{}: ok ({n} declarations)", path.display());
            }
            Err(e) => out.fail(2, diagnostic(path, &e)),
        },
        Mode::Elaborate => match elaborate_source(&text, &name) {
            Ok(e) => {
                let src = user_source(&e.elaborated.unit);
                match &cfg.emit_elaborated {
                    Some(dir) => write_file(out, dir, &format!("{}.c", stem(path)), &src),
                    None => out.stdout.push_str(&src),
                }
            }
            Err(e) => out.fail(2, diagnostic(path, &e)),
        },
        Mode::Vcgen | Mode::Prove => match vcgen_source(&text, &name, VcOptions { overflow: cfg.overflow }) {
            Ok((e, units)) => {
                if let Some(dir) = &cfg.emit_elaborated {
                    write_file(out, dir, &format!("{}.c", stem(path)), &user_source(&e.elaborated.unit));
                }
                emit(cfg, out, &units);
                if cfg.mode == Mode::Prove {
                    report.functions.extend(discharge_all(&units, &discharge_config(cfg)).functions);
                } else {
                    listed.extend(units);
                }
            }
            Err(e) => out.fail(2, diagnostic(path, &e)),
        },
        Mode::Falsify => {
            let Some(lemma) = &cfg.falsify else {
                out.fail(2, "falsify mode needs --falsify NAME");
                return;
            };
            let e = match elaborate_source(&text, &name) {
                Ok(e) => e,
                Err(e) => return out.fail(2, diagnostic(path, &e)),
            };
            match falsify_lemma(&e.typed, lemma, &cfg.space) {
                Err(msg) => out.fail(2, format!("{}: {msg}", path.display())),
                Ok(None) => {
                    let _ = writeln!(
                        out.stdout,
                        "{lemma}: no counterexample (strings up to length {}, alphabet {:?})",
                        cfg.space.max_len,
                        String::from_utf8_lossy(&cfg.space.alphabet[1..])
                    );
                }
                Ok(Some(cx)) => {
                    let _ = writeln!(out.stdout, "{lemma}: counterexample\n{cx}");
                    out.code = out.code.max(1);
                }
            }
        }
        Mode::Corpus => unreachable!("corpus runs are handled separately"),
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let mut out = Outcome::default();
    if cfg.mode == Mode::Corpus {
        return run_corpus(cfg);
    }
    if cfg.inputs.is_empty() {
        out.fail(2, "no input files");
        return out;
    }
    let mut report = Report::default();
    let mut listed = vec![];
    for path in &cfg.inputs {
        run_file(cfg, &mut out, path, &mut report, &mut listed);
    }
    match cfg.mode {
        Mode::Vcgen => out.stdout.push_str(&vc_listing(&listed, cfg.report)),
        Mode::Prove => {
            match cfg.report {
                ReportFormat::Json => {
                    out.stdout.push_str(&report.to_json());
                    out.stdout.push('\n');
                }
                ReportFormat::Text => out.stdout.push_str(&report.to_text()),
            }
            if !report.all_proved() {
                out.code = out.code.max(1);
            }
        }
        _ => {}
    }
    out
}

/// Expected (ghost, lemma) function counts per corpus function.
pub const MANIFEST: [(&str, usize, usize); 8] = [
    ("strlen", 4, 2),
    ("skip_spaces", 1, 3),
    ("strchr", 0, 5),
    ("strchrnul", 0, 5),
    ("strspn", 1, 5),
    ("strcspn", 0, 3),
    ("strnlen", 3, 6),
    ("strpbrk", 0, 2),
];

/// Ghost functions that are not lemma functions, and lemma functions, of
/// the user's file. A separately declared function counts once.
pub fn count_functions(unit: &SourceUnit) -> (usize, usize) {
    let mut ghost = BTreeSet::new();
    let mut lemma = BTreeSet::new();
    for d in pipeline::user_decls(unit) {
        if let Item::Function(f) = &d.item {
            if f.lemma {
                lemma.insert(f.name.clone());
            } else if f.ghost {
                ghost.insert(f.name.clone());
            }
        }
    }
    (ghost.len(), lemma.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusRow {
    pub name: String,
    pub ghost: usize,
    pub lemma: usize,
    pub expected: Option<(usize, usize)>,
    /// `Proved`, `Failed (p/n)` or the failing stage.
    pub status: String,
    pub proved: usize,
    pub vcs: usize,
    pub time_s: f64,
}

impl CorpusRow {
    pub fn matches(&self) -> bool {
        self.expected.is_none_or(|e| e == (self.ghost, self.lemma))
    }
}

/// The per-function table with totals; rows whose counts differ from the
/// manifest are flagged.
pub fn corpus_report(rows: &[CorpusRow]) -> String {
    let w = rows.iter().map(|r| r.name.len()).chain(["Function Name".len(), "Total".len()]).max().unwrap();
    let mut s = format!("{:<w$}  {:>15}  {:>15}  Status\n", "Function Name", "Ghost Functions", "Lemma Functions");
    let mut ghost = 0;
    let mut lemma = 0;
    for r in rows {
        ghost += r.ghost;
        lemma += r.lemma;
        let flag = match r.expected {
            Some((g, l)) if !r.matches() => format!("  MISMATCH (expected {g}/{l})"),
            _ => String::new(),
        };
        let _ = writeln!(s, "{:<w$}  {:>15}  {:>15}  {}{flag}", r.name, r.ghost, r.lemma, r.status);
    }
    let _ = writeln!(s, "{:<w$}  {:>15}  {:>15}", "Total", ghost, lemma);
    s
}

fn corpus_files(out: &mut Outcome, inputs: &[PathBuf]) -> Vec<PathBuf> {
    let mut files = vec![];
    for p in inputs {
        if p.is_dir() {
            match fs::read_dir(p) {
                Ok(rd) => {
                    let mut found: Vec<PathBuf> = rd
                        .filter_map(Result::ok)
                        .map(|e| e.path())
                        .filter(|p| p.extension().is_some_and(|e| e == "c"))
                        .collect();
                    found.sort();
                    files.extend(found);
                }
                Err(e) => out.fail(2, format!("{}: {e}", p.display())),
            }
        } else {
            files.push(p.clone());
        }
    }
    files
}

fn corpus_row(cfg: &RunConfig, path: &Path, expected: Option<(usize, usize)>) -> (CorpusRow, Option<String>) {
    let mut row = CorpusRow {
        name: stem(path),
        ghost: 0,
        lemma: 0,
        expected,
        status: String::new(),
        proved: 0,
        vcs: 0,
        time_s: 0.0,
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            row.status = "unreadable".into();
            return (row, Some(format!("{}: {e}", path.display())));
        }
    };
    let name = path.to_string_lossy();
    match pipeline::load(&text, &name) {
        Ok(u) => (row.ghost, row.lemma) = count_functions(&u),
        Err(e) => {
            row.status = format!("{} error", e.stage());
            return (row, Some(diagnostic(path, &e)));
        }
    }
    match vcgen_source(&text, &name, VcOptions { overflow: cfg.overflow }) {
        Ok((_, units)) => {
            let report = discharge_all(&units, &discharge_config(cfg));
            let all: Vec<_> = report.functions.iter().flat_map(|f| &f.vcs).collect();
            row.vcs = all.len();
            row.proved = all.iter().filter(|v| v.status == lemmaforge_core::Status::Proved).count();
            row.time_s = report.functions.iter().map(|f| f.time_s()).sum();
            row.status = if report.all_proved() {
                format!("Proved ({} VCs, {:.2}s)", row.vcs, row.time_s)
            } else {
                format!("Failed ({}/{} VCs proved)", row.proved, row.vcs)
            };
            (row, None)
        }
        Err(e) => {
            row.status = format!("{} error", e.stage());
            (row, Some(diagnostic(path, &e)))
        }
    }
}

fn run_corpus(cfg: &RunConfig) -> Outcome {
    let mut out = Outcome::default();
    let files = corpus_files(&mut out, &cfg.inputs);
    let mut rows = vec![];
    let mut extra = vec![];
    for (name, g, l) in MANIFEST {
        let Some(path) = files.iter().find(|p| stem(p) == name) else {
            out.fail(1, format!("corpus file for `{name}` is missing"));
            continue;
        };
        let (row, diag) = corpus_row(cfg, path, Some((g, l)));
        if let Some(d) = diag {
            out.fail(2, d);
        }
        rows.push(row);
    }
    for path in files.iter().filter(|p| !MANIFEST.iter().any(|(n, ..)| stem(p) == *n)) {
        let (row, diag) = corpus_row(cfg, path, None);
        if let Some(d) = diag {
            out.fail(2, d);
        }
        extra.push(row);
    }
    out.stdout.push_str(&corpus_report(&rows));
    if !extra.is_empty() {
        out.stdout.push_str("\nOther files\n");
        for r in &extra {
            let _ = writeln!(out.stdout, "{}: {} ghost, {} lemma, {}", r.name, r.ghost, r.lemma, r.status);
        }
    }
    if rows.iter().chain(&extra).any(|r| !r.matches() || r.proved < r.vcs) {
        out.code = out.code.max(1);
    }
    out
}
