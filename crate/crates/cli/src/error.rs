use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Config {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed weight bank: {message}", path.display())]
    Bank { path: PathBuf, message: String },

    #[error("bank {} does not match config: {message}", path.display())]
    Mismatch { path: PathBuf, message: String },

    #[error("max constraint residual {residual:e} is not below {limit:e}")]
    Residual { residual: f64, limit: f64 },

    #[error("no output path: pass --out or set outputs.{key} in the config")]
    MissingOutput { key: &'static str },

    #[error(transparent)]
    Library(#[from] xpol_dm::Error),
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}
