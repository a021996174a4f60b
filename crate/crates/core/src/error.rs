use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("inverted cell{} (slot {}){}{}: J = {jacobian:e}",
        cell.map(|c| format!(" {c}")).unwrap_or_default(),
        slot + 1,
        if body.is_empty() { String::new() } else { format!(" in body '{body}'") },
        step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    InvertedCell { body: String, cell: Option<usize>, slot: usize, step: Option<usize>, jacobian: f64 },

    #[error("non-finite state in body '{body}' at step {step}")]
    NonFinite { body: String, step: usize },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("singular matrix")]
    Singular,

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error("initial overlap: fluid node {fluid_node} of '{fluid}' penetrates '{solid}' (psi = {psi:e})")]
    Overlap { fluid: String, fluid_node: usize, solid: String, psi: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Study(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Attach the cell id to an inverted-cell error.
    pub fn in_cell(self, cell_id: usize) -> Self {
        match self {
            Error::InvertedCell { body, slot, step, jacobian, .. } => {
                Error::InvertedCell { body, cell: Some(cell_id), slot, step, jacobian }
            }
            other => other,
        }
    }

    /// Attach the body name and step index to an inverted-cell error.
    pub fn in_body(self, body_name: &str, step_index: usize) -> Self {
        match self {
            Error::InvertedCell { cell, slot, jacobian, .. } => {
                Error::InvertedCell { body: body_name.to_string(), cell, slot, step: Some(step_index), jacobian }
            }
            other => other,
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvertedCell { .. } | Error::NonFinite { .. } | Error::NotPositiveDefinite | Error::Singular
        )
    }
}
