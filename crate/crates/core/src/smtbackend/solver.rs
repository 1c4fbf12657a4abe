//! External solver processes.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Proved,
    Unknown,
    Timeout,
    Refuted,
    SolverError,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Proved => "Proved",
            Status::Unknown => "Unknown",
            Status::Timeout => "Timeout",
            Status::Refuted => "Refuted",
            Status::SolverError => "SolverError",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub time_s: f64,
    /// Model text after `sat`, or the solver's complaint.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Program and arguments, whitespace separated; the script goes to
    /// standard input.
    pub command: String,
    pub timeout_s: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { command: "z3 -in".into(), timeout_s: 10.0 }
    }
}

fn classify(out: &str, err: &str, exit_ok: bool) -> (Status, Option<String>) {
    let mut words = out.split_whitespace();
    match words.next() {
        Some("unsat") => (Status::Proved, None),
        Some("sat") => {
            let model = out.trim_start().strip_prefix("sat").unwrap_or("").trim().to_string();
            (Status::Refuted, Some(model))
        }
        Some("unknown") => (Status::Unknown, None),
        Some("timeout") => (Status::Timeout, None),
        _ => {
            let msg = if err.trim().is_empty() { out.trim() } else { err.trim() };
            let msg = if msg.is_empty() && !exit_ok { "solver exited with an error" } else { msg };
            (Status::SolverError, Some(msg.to_string()))
        }
    }
}

/// Runs one script to completion or until the budget is spent.
pub fn run_solver(script: &str, cfg: &SolverConfig) -> Verdict {
    let start = Instant::now();
    let error = |msg: String| Verdict { status: Status::SolverError, time_s: start.elapsed().as_secs_f64(), detail: Some(msg) };
    let mut parts = cfg.command.split_whitespace();
    let Some(prog) = parts.next() else { return error("empty solver command".into()) };
    let mut child = match Command::new(prog)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return error(format!("cannot start `{prog}`: {e}")),
    };
    let mut stdin = child.stdin.take().unwrap();
    let script = script.to_string();
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(script.as_bytes());
    });
    let mut stdout = child.stdout.take().unwrap();
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let mut stderr = child.stderr.take().unwrap();
    let ereader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let budget = Duration::from_secs_f64(cfg.timeout_s.max(0.0));
    let status = loop {
        match child.try_wait() {
            Ok(Some(st)) => break Some(st),
            Ok(None) if start.elapsed() >= budget => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(1)),
            Err(e) => return error(e.to_string()),
        }
    };
    let time_s = start.elapsed().as_secs_f64();
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();
    let err = ereader.join().unwrap_or_default();
    let Some(exit) = status else {
        return Verdict { status: Status::Timeout, time_s, detail: None };
    };
    let (status, detail) = classify(&out, &err, exit.success());
    Verdict { status, time_s, detail }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_uses_the_first_token() {
        assert_eq!(classify("unsat\n(error \"no model\")", "", false).0, Status::Proved);
        assert_eq!(classify("sat\n(model)", "", true), (Status::Refuted, Some("(model)".into())));
        assert_eq!(classify("unknown", "", true).0, Status::Unknown);
        assert_eq!(classify("", "boom", false), (Status::SolverError, Some("boom".into())));
        assert_eq!(classify("(error \"x\")", "", false).0, Status::SolverError);
    }
}
