//! Command line and session service for polytile surfaces.

pub mod cli;
pub mod presets;
pub mod service;

pub use cli::run_cli;

use polytile_core::curvature::CurvatureError;
use polytile_core::embedding::EmbeddingError;
use polytile_core::generators::GeneratorError;
use polytile_core::geodesics::GeodesicError;
use polytile_core::{SpecError, SurfaceError};
use serde::Serialize;

/// A domain failure with a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct CommandError {
    pub code: String,
    pub message: String,
}

impl CommandError {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        CommandError { code: code.into(), message: message.into() }
    }
}

macro_rules! coded {
    ($($t:ty),*) => {$(
        impl From<$t> for CommandError {
            fn from(e: $t) -> Self {
                CommandError::new(e.code(), e.to_string())
            }
        }
    )*};
}

coded!(SurfaceError, SpecError, GeneratorError, GeodesicError, EmbeddingError, CurvatureError);
