//! Run configuration: a design plus sweep and output settings, stored as JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xpol_dm::io::DesignDocument;
use xpol_dm::DesignSpec;

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bank: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<PathBuf>,
}

impl OutputPaths {
    fn is_empty(&self) -> bool {
        self.bank.is_none() && self.patterns.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub design: DesignDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_step_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "OutputPaths::is_empty")]
    pub outputs: OutputPaths,
}

impl RunConfig {
    pub fn demo() -> Self {
        Self {
            design: DesignDocument::demo(),
            sweep_step_deg: Some(1.0),
            outputs: OutputPaths::default(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Parses and validates; errors carry the line of the offending key.
    pub fn parse(text: &str, origin: &Path) -> Result<(Self, DesignSpec), CliError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_path_buf(),
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        let spec = config.design.to_spec().map_err(|e| {
            let field = match &e {
                xpol_dm::Error::InvalidInput { field, .. } => Some(field.clone()),
                _ => None,
            };
            CliError::Config {
                path: origin.to_path_buf(),
                line: field.as_deref().and_then(|f| locate_field(text, f)),
                message: format!("design.{e}"),
            }
        })?;
        if let Some(step) = config.sweep_step_deg {
            if !(step > 0.0) || !step.is_finite() {
                return Err(CliError::Config {
                    path: origin.to_path_buf(),
                    line: locate_field(text, "sweep_step_deg"),
                    message: format!("invalid sweep_step_deg: {step} must be positive"),
                });
            }
        }
        for (key, p) in [("bank", &config.outputs.bank), ("patterns", &config.outputs.patterns)] {
            if let Some(p) = p {
                let parent = p.parent().filter(|d| !d.as_os_str().is_empty());
                if parent.is_some_and(|d| !d.is_dir()) {
                    return Err(CliError::Config {
                        path: origin.to_path_buf(),
                        line: locate_field(text, key),
                        message: format!("invalid outputs.{key}: directory of {} does not exist", p.display()),
                    });
                }
            }
        }
        Ok((config, spec))
    }

    pub fn load(path: &Path) -> Result<(Self, DesignSpec), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }
}

/// 1-based line of the JSON key named by the first segment of a field path
/// such as `sidelobe[1].theta_deg`.
fn locate_field(text: &str, field: &str) -> Option<usize> {
    let head = field
        .split(['.', '['])
        .next()
        .filter(|h| !h.is_empty())?;
    let needle = format!("\"{head}\"");
    let offset = text.find(&needle)?;
    Some(text[..offset].matches('\n').count() + 1)
}
