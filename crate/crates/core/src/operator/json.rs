use serde::{Deserialize, Serialize};

use super::{c64, CMatrix, MAX_DIM};
use crate::error::{Error, Result};

/// `{"dim": d, "re": [[...]], "im": [[...]]}` with row-major parts.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDoc {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let re = (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].im).collect()).collect();
        MatrixDoc { dim, re, im: Some(im) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        self.to_matrix_limited(MAX_DIM)
    }

    /// Like [`MatrixDoc::to_matrix`] with a custom dimension cap, used for
    /// superoperator documents whose side is `d²`.
    pub fn to_matrix_limited(&self, limit: usize) -> Result<CMatrix> {
        let d = self.dim;
        if d == 0 || d > limit {
            return Err(Error::Document(format!("dim {d} outside 1..={limit}")));
        }
        check_rows(&self.re, d, "re")?;
        if let Some(im) = &self.im {
            check_rows(im, d, "im")?;
        }
        Ok(CMatrix::from_fn(d, d, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            c64(self.re[i][j], im)
        }))
    }

    pub fn parse(text: &str) -> Result<CMatrix> {
        let doc: MatrixDoc = serde_json::from_str(text)?;
        doc.to_matrix()
    }
}

fn check_rows(rows: &[Vec<f64>], d: usize, name: &str) -> Result<()> {
    if rows.len() != d {
        return Err(Error::Document(format!(
            "\"{name}\" has {} rows, expected {d}",
            rows.len()
        )));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(Error::Document(format!(
            "\"{name}\" row {i} has {} entries, expected {d}",
            row.len()
        )));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Document(format!("\"{name}\" has non-finite entries")));
    }
    Ok(())
}
