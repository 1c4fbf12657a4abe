//! SMT-LIB2 encoding, solver dispatch and reports.

pub mod encode;
pub mod solver;

#[cfg(test)]
mod tests;

use crate::vcgen::{FunctionVcs, VcKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

pub use encode::{encode, EncodeError};
pub use solver::{run_solver, SolverConfig, Status, Verdict};

/// Solver verdicts keyed by a digest of command and script.
#[derive(Clone, Debug)]
pub struct Cache {
    pub dir: PathBuf,
}

impl Cache {
    pub fn key(cmd: &str, script: &str) -> String {
        let mut h = Sha256::new();
        h.update(cmd.as_bytes());
        h.update([0u8]);
        h.update(script.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Verdict> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, v: &Verdict) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        std::fs::write(self.path(key), serde_json::to_string(v).expect("verdict serializes"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct DischargeConfig {
    pub solver: SolverConfig,
    pub jobs: usize,
    pub cache: Option<Cache>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VcResult {
    pub name: String,
    #[serde(skip)]
    pub kind: VcKind,
    pub status: Status,
    pub time_s: f64,
    #[serde(skip)]
    pub detail: Option<String>,
    #[serde(skip)]
    pub script: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionReport {
    pub name: String,
    pub vcs: Vec<VcResult>,
}

impl FunctionReport {
    pub fn proved(&self) -> bool {
        self.vcs.iter().all(|v| v.status == Status::Proved)
    }

    pub fn time_s(&self) -> f64 {
        self.vcs.iter().map(|v| v.time_s).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub functions: Vec<FunctionReport>,
}

impl Report {
    pub fn all_proved(&self) -> bool {
        self.functions.iter().all(FunctionReport::proved)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let width = self
            .functions
            .iter()
            .flat_map(|f| f.vcs.iter().map(|v| v.name.len() + 2).chain(std::iter::once(f.name.len())))
            .chain(std::iter::once(8))
            .max()
            .unwrap();
        let mut out = String::new();
        for f in &self.functions {
            let status = if f.proved() { "Proved" } else { "Failed" };
            out.push_str(&format!("{:<width$}  {:<11}  {:>8.3}s\n", f.name, status, f.time_s()));
            for v in &f.vcs {
                out.push_str(&format!("  {:<w$}  {:<11}  {:>8.3}s\n", v.name, v.status.name(), v.time_s, w = width - 2));
            }
        }
        let total: usize = self.functions.iter().map(|f| f.vcs.len()).sum();
        let proved: usize =
            self.functions.iter().flat_map(|f| &f.vcs).filter(|v| v.status == Status::Proved).count();
        out.push_str(&format!("{proved}/{total} VCs proved\n"));
        out
    }
}

fn round_ms(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

/// Encodes and solves every VC. Failures stay local to their VC; results
/// keep the canonical VC order.
pub fn discharge_all(units: &[FunctionVcs], cfg: &DischargeConfig) -> Report {
    let jobs: Vec<(usize, usize)> =
        units.iter().enumerate().flat_map(|(i, f)| (0..f.vcs.len()).map(move |j| (i, j))).collect();
    let run = |&(i, j): &(usize, usize)| -> VcResult {
        let f = &units[i];
        let vc = &f.vcs[j];
        let script = match encode(f, vc) {
            Ok(s) => s,
            Err(e) => {
                return VcResult {
                    name: vc.name.clone(),
                    kind: vc.kind,
                    status: Status::SolverError,
                    time_s: 0.0,
                    detail: Some(e.to_string()),
                    script: String::new(),
                }
            }
        };
        let key = Cache::key(&cfg.solver.command, &script);
        let verdict = match cfg.cache.as_ref().and_then(|c| c.get(&key)) {
            Some(v) => v,
            None => {
                let mut v = run_solver(&script, &cfg.solver);
                v.time_s = round_ms(v.time_s);
                if let Some(c) = &cfg.cache {
                    let _ = c.put(&key, &v);
                }
                v
            }
        };
        VcResult {
            name: vc.name.clone(),
            kind: vc.kind,
            status: verdict.status,
            time_s: verdict.time_s,
            detail: verdict.detail,
            script,
        }
    };
    let results: Vec<VcResult> = match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
        Ok(pool) => pool.install(|| jobs.par_iter().map(run).collect()),
        Err(_) => jobs.iter().map(run).collect(),
    };
    let mut it = results.into_iter();
    Report {
        functions: units
            .iter()
            .map(|f| FunctionReport { name: f.function.clone(), vcs: it.by_ref().take(f.vcs.len()).collect() })
            .collect(),
    }
}

#[derive(Clone, Debug, Deserialize)]
struct JsonVc {
    name: String,
    status: Status,
}

#[derive(Clone, Debug, Deserialize)]
struct JsonFunction {
    name: String,
    vcs: Vec<JsonVc>,
}

#[derive(Clone, Debug, Deserialize)]
struct JsonReport {
    functions: Vec<JsonFunction>,
}

/// `(function, vc, status)` triples of a JSON report.
pub fn parse_json_report(text: &str) -> serde_json::Result<Vec<(String, String, Status)>> {
    let r: JsonReport = serde_json::from_str(text)?;
    Ok(r.functions
        .into_iter()
        .flat_map(|f| {
            let name = f.name;
            f.vcs.into_iter().map(move |v| (name.clone(), v.name, v.status))
        })
        .collect())
}
