use std::fs;
use std::path::Path;

use inertia_lab::{BipartiteDims, ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Bipartite matrix on disk: row-major real and imaginary parts, each of
/// length `(dim_a * dim_b)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, dims: BipartiteDims) -> Self {
        Self {
            dim_a: dims.m,
            dim_b: dims.n,
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }

    pub fn dims(&self) -> Result<BipartiteDims, CliError> {
        Ok(BipartiteDims::new(self.dim_a, self.dim_b)?)
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let d = self.dims()?.order();
        if self.re.len() != d * d || self.im.len() != d * d {
            return Err(inertia_lab::Error::DimensionMismatch(format!(
                "{}x{} needs {} entries per part, got re={} im={}",
                self.dim_a,
                self.dim_b,
                d * d,
                self.re.len(),
                self.im.len()
            ))
            .into());
        }
        let data = self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        Ok(ComplexMatrix::from_vec(d, d, data)?)
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self).expect("finite matrix entries serialize");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}
