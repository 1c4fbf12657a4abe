//! The staged pipeline: prelude and input, checking, elaboration, VCs.

use crate::elaborator::{elaborate, ElabError, Elaborated};
use crate::frontend::ast::{Pos, SourceUnit};
use crate::frontend::{parse_file, FrontendError};
use crate::sema::{check, SemaError, TypedUnit};
use crate::vcgen::{vcs_for_unit, FunctionVcs, VcError, VcOptions};
use thiserror::Error;

/// Built-in string logic, registered as file 0.
pub const PRELUDE: &str = include_str!("prelude.h");
pub const PRELUDE_NAME: &str = "<prelude>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Sema(#[from] SemaError),
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Vc(#[from] VcError),
}

impl PipelineError {
    pub fn pos(&self) -> Pos {
        match self {
            PipelineError::Frontend(e) => e.pos(),
            PipelineError::Sema(e) => e.pos(),
            PipelineError::Elab(e) => e.pos(),
            PipelineError::Vc(e) => e.pos(),
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Frontend(_) => "parse",
            PipelineError::Sema(_) => "check",
            PipelineError::Elab(_) => "elaborate",
            PipelineError::Vc(_) => "vcgen",
        }
    }
}

/// Prelude followed by the user's file.
pub fn load(text: &str, name: &str) -> Result<SourceUnit, PipelineError> {
    let mut unit = parse_file(PRELUDE, PRELUDE_NAME, 0)?;
    let user = parse_file(text, name, 1)?;
    unit.files.push(name.to_string());
    unit.decls.extend(user.decls);
    Ok(unit)
}

pub fn check_source(text: &str, name: &str) -> Result<TypedUnit, PipelineError> {
    Ok(check(load(text, name)?)?)
}

pub struct ElaboratedUnit {
    pub elaborated: Elaborated,
    /// The elaborated unit, checked again.
    pub typed: TypedUnit,
}

pub fn elaborate_source(text: &str, name: &str) -> Result<ElaboratedUnit, PipelineError> {
    let t = check_source(text, name)?;
    let elaborated = elaborate(&t)?;
    let typed = check(elaborated.unit.clone())?;
    Ok(ElaboratedUnit { elaborated, typed })
}

pub fn vcgen_source(text: &str, name: &str, opts: VcOptions) -> Result<(ElaboratedUnit, Vec<FunctionVcs>), PipelineError> {
    let e = elaborate_source(text, name)?;
    let vcs = vcs_for_unit(&e.typed, opts)?;
    Ok((e, vcs))
}

/// Declarations that came from the user's file.
pub fn user_decls(unit: &SourceUnit) -> impl Iterator<Item = &crate::frontend::ast::Decl> {
    unit.decls.iter().filter(|d| d.pos.file != 0)
}
