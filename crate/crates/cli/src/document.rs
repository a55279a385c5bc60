//! JSON matrix-set documents: real and imaginary parts as separate row arrays.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use spectral_lattice::{make_hermitian, HermitianMatrix, Tolerances, C64};

use crate::error::CliError;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSetDocument {
    pub format_version: String,
    pub dim: usize,
    pub matrices: Vec<NamedMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl NamedMatrix {
    /// `im` is omitted when every imaginary part is zero.
    pub fn from_hermitian(name: impl Into<String>, h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let part = |f: fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(h.get(i, j))).collect()).collect()
        };
        let im = part(|z| z.im);
        NamedMatrix {
            name: name.into(),
            re: part(|z| z.re),
            im: im.iter().flatten().any(|&v| v != 0.0).then_some(im),
        }
    }

    fn to_hermitian(&self, dim: usize, tol: &Tolerances) -> Result<HermitianMatrix, CliError> {
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == dim && rows.iter().all(|r| r.len() == dim);
        if !rows_ok(&self.re) || !self.im.as_ref().is_none_or(rows_ok) {
            return Err(CliError::Input(format!("matrix `{}` is not {dim}x{dim}", self.name)));
        }
        let raw = DMatrix::from_fn(dim, dim, |i, j| {
            C64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        });
        make_hermitian(&raw, tol).map_err(|e| CliError::Input(format!("matrix `{}`: {e}", self.name)))
    }
}

impl MatrixSetDocument {
    pub fn new(dim: usize, matrices: Vec<NamedMatrix>) -> Self {
        MatrixSetDocument {
            format_version: FORMAT_VERSION.into(),
            dim,
            matrices,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents serialize");
        text.push('\n');
        text
    }

    /// Checks the header and names and converts every matrix.
    pub fn matrices(&self, tol: &Tolerances) -> Result<Vec<(String, HermitianMatrix)>, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "unsupported format_version `{}` (expected `{FORMAT_VERSION}`)",
                self.format_version
            )));
        }
        if self.dim == 0 {
            return Err(CliError::Input("dim must be positive".into()));
        }
        let mut seen = HashSet::new();
        self.matrices
            .iter()
            .map(|m| {
                if !seen.insert(m.name.as_str()) {
                    return Err(CliError::Input(format!("duplicate matrix name `{}`", m.name)));
                }
                Ok((m.name.clone(), m.to_hermitian(self.dim, tol)?))
            })
            .collect()
    }
}

/// Picks the named matrices in the given order; all of them if `names` is empty.
pub fn select(
    all: Vec<(String, HermitianMatrix)>,
    names: &[String],
) -> Result<Vec<(String, HermitianMatrix)>, CliError> {
    if names.is_empty() {
        return Ok(all);
    }
    names
        .iter()
        .map(|name| {
            all.iter()
                .find(|(n, _)| n == name)
                .cloned()
                .ok_or_else(|| CliError::Input(format!("no matrix named `{name}`")))
        })
        .collect()
}
