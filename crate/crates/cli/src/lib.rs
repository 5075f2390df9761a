//! File formats, instance generation, the ratio experiment and the command
//! implementations behind the `dissem` binary.

use std::path::Path;

pub mod commands;
pub mod experiment;
pub mod format;
pub mod generate;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] dissem::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{} request(s) not satisfied", .0.len())]
    Unsatisfied(Vec<(usize, usize)>),
    #[error("{path}: {source}")]
    InFile { path: String, source: Box<CliError> },
}

impl CliError {
    pub fn in_file(self, path: &Path) -> Self {
        CliError::InFile {
            path: path.display().to_string(),
            source: Box::new(self),
        }
    }

    /// 0 success, 1 input error, 2 unsolvable, 3 search cap exceeded.
    pub fn exit_code(&self) -> u8 {
        use dissem::Error as E;
        match self {
            CliError::InFile { source, .. } => source.exit_code(),
            CliError::Unsatisfied(_) => 2,
            CliError::Core(
                E::NotOneRoundSolvable { .. }
                | E::NotStronglyConnected
                | E::RoundsTooFew { .. }
                | E::Infeasible { .. }
                | E::NoDecoding { .. },
            ) => 2,
            CliError::Core(E::SearchCapExceeded(_)) => 3,
            _ => 1,
        }
    }
}

/// Runs `$body` with `$F` bound to the scalar type for field order `$q`.
#[macro_export]
macro_rules! with_field {
    ($q:expr, $F:ident => $body:expr) => {
        match $q {
            2 => {
                type $F = dissem::Gf2;
                $body
            }
            3 => {
                type $F = dissem::Gf3;
                $body
            }
            5 => {
                type $F = dissem::Gf5;
                $body
            }
            7 => {
                type $F = dissem::Gf7;
                $body
            }
            11 => {
                type $F = dissem::Gf11;
                $body
            }
            13 => {
                type $F = dissem::Gf13;
                $body
            }
            q => Err($crate::CliError::Core(dissem::Error::UnsupportedField(q))),
        }
    };
}
