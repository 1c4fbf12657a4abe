//! Concrete execution over small finite heaps, used as an independent
//! check on the prover: logic evaluation, code execution, exhaustive
//! falsification and WP cross-checking.

mod crosscheck;
mod falsify;
mod interp;
mod term_eval;

#[cfg(test)]
mod tests;

use crate::vcgen::term::MAX_BLOCK;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub use crosscheck::{crosscheck_wp, Agreement};
pub use falsify::{falsify, falsify_lemma, Counterexample, SearchSpace};
pub use interp::{Ctx, Domain, Interp};
pub use term_eval::{TVal, TermEval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("trap: {0}")]
    Trap(String),
    #[error("cannot evaluate: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pointer {
    pub block: i128,
    pub offset: i128,
}

impl Pointer {
    pub const NULL: Pointer = Pointer { block: 0, offset: 0 };

    pub fn shift(self, i: i128) -> Pointer {
        Pointer { block: self.block, offset: self.offset + i }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i128),
    Bool(bool),
    Ptr(Pointer),
}

impl Value {
    pub fn truthy(self) -> bool {
        match self {
            Value::Int(v) => v != 0,
            Value::Bool(b) => b,
            Value::Ptr(p) => p != Pointer::NULL,
        }
    }

    pub fn int(self) -> Result<i128, OracleError> {
        match self {
            Value::Int(v) => Ok(v),
            Value::Bool(b) => Ok(b as i128),
            Value::Ptr(_) => Err(OracleError::Unsupported("pointer used as integer".into())),
        }
    }

    pub fn ptr(self) -> Result<Pointer, OracleError> {
        match self {
            Value::Ptr(p) => Ok(p),
            _ => Err(OracleError::Unsupported("integer used as pointer".into())),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Ptr(p) if *p == Pointer::NULL => f.write_str("NULL"),
            Value::Ptr(p) => write!(f, "&b{}[{}]", p.block, p.offset),
        }
    }
}

/// Allocation table and cell contents; cells exist exactly at valid
/// locations. Block 0 is never allocated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Memory {
    pub alloc: BTreeMap<i128, i128>,
    pub heap: BTreeMap<(i128, i128), i128>,
}

impl Memory {
    pub fn size(&self, block: i128) -> i128 {
        self.alloc.get(&block).copied().unwrap_or(0)
    }

    pub fn valid(&self, p: Pointer) -> bool {
        p.block != 0 && 0 <= p.offset && p.offset < self.size(p.block) && self.size(p.block) <= MAX_BLOCK
    }

    pub fn read(&self, p: Pointer) -> Result<i128, OracleError> {
        if !self.valid(p) {
            return Err(OracleError::Trap(format!("invalid read at {}", Value::Ptr(p))));
        }
        Ok(self.heap[&(p.block, p.offset)])
    }

    pub fn write(&mut self, p: Pointer, v: i128) -> Result<(), OracleError> {
        if !self.valid(p) {
            return Err(OracleError::Trap(format!("invalid write at {}", Value::Ptr(p))));
        }
        self.heap.insert((p.block, p.offset), v);
        Ok(())
    }

    /// A fresh block holding `bytes`.
    pub fn add_block(&mut self, bytes: &[i128]) -> Pointer {
        let block = self.alloc.keys().next_back().copied().unwrap_or(0) + 1;
        self.alloc.insert(block, bytes.len() as i128);
        for (i, b) in bytes.iter().enumerate() {
            self.heap.insert((block, i as i128), *b);
        }
        Pointer { block, offset: 0 }
    }

    pub fn total_cells(&self) -> usize {
        self.heap.len()
    }

    /// Every pointer into an allocated block, one past each end, and null.
    pub fn pointers(&self) -> Vec<Pointer> {
        let mut out = vec![Pointer::NULL];
        for (&b, &n) in &self.alloc {
            out.extend((0..=n).map(|o| Pointer { block: b, offset: o }));
        }
        out
    }
}

fn show_byte(b: i128) -> String {
    match b {
        0 => "\\0".into(),
        32..=126 => (b as u8 as char).to_string(),
        _ => format!("\\x{:02x}", b as u8),
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&b, &n) in &self.alloc {
            write!(f, "b{b}[{n}]:")?;
            for o in 0..n {
                let v = self.heap.get(&(b, o)).copied().unwrap_or(0);
                write!(f, " {:02x}", v as u8)?;
            }
            let text: String = (0..n).map(|o| show_byte(self.heap.get(&(b, o)).copied().unwrap_or(0))).collect();
            writeln!(f, "  \"{text}\"")?;
        }
        Ok(())
    }
}

/// Program variables and memory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConcreteState {
    pub mem: Memory,
    pub vars: BTreeMap<String, Value>,
}
