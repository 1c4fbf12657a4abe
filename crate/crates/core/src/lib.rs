//! An auto-active deductive verifier for a small annotated C subset. Pure
//! ghost functions marked `lemma` are checked like any other function and
//! their contracts become axioms for everything located after them.

pub mod elaborator;
pub mod frontend;
pub mod oracle;
pub mod pipeline;
pub mod sema;
pub mod smtbackend;
pub mod vcgen;

pub use elaborator::{Elaborated, ElabError, LemmaNames};
pub use frontend::ast::{Pos, SourceUnit};
pub use frontend::FrontendError;
pub use oracle::{Counterexample, SearchSpace};
pub use pipeline::{ElaboratedUnit, PipelineError};
pub use sema::{SemaError, TypedUnit};
pub use smtbackend::{DischargeConfig, Report, SolverConfig, Status, Verdict};
pub use vcgen::{FunctionVcs, Vc, VcError, VcKind, VcOptions};
