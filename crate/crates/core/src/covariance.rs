//! Covariance matrices of zero-mean Gaussian states.
//!
//! Quadratures are stored interleaved as `(X1, P1, X2, P2, ..., XN, PN)` and
//! normalized so that the vacuum has unit variance (`[X, P] = 2i`).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymmetry above this is rejected; below it the input is symmetrized.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

/// A `2N x 2N` real symmetric matrix of quadrature second moments.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape and symmetry, then symmetrizes as `(M + M^T) / 2`.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return Err(Error::MalformedMatrix(format!("{rows}x{cols} is not square")));
        }
        if rows == 0 || rows % 2 != 0 {
            return Err(Error::MalformedMatrix(format!(
                "dimension {rows} is not a positive even number"
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedMatrix("non-finite entry".into()));
        }
        let asym = (&data - data.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE {
            return Err(Error::Asymmetric(asym));
        }
        let data = (&data + data.transpose()) * 0.5;
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::MalformedMatrix(format!(
                "row of length {} in a {n}-row matrix",
                bad.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// The `n_modes`-mode vacuum, i.e. the identity matrix.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            data: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    /// Wraps a matrix produced by an internal computation that preserves
    /// symmetry up to rounding. Symmetrizes without the asymmetry check.
    pub(crate) fn from_computed(data: DMatrix<f64>) -> Self {
        debug_assert!(data.is_square() && data.nrows() % 2 == 0);
        let data = (&data + data.transpose()) * 0.5;
        Self { data }
    }

    pub fn n_modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::IndexOutOfRange {
                index: mode,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }

    pub fn require_modes(&self, n_modes: usize) -> Result<()> {
        if self.n_modes() != n_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * n_modes,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// The 2x2 block of intramodal moments of `mode`.
    pub fn mode_block(&self, mode: usize) -> Result<Matrix2<f64>> {
        self.check_mode(mode)?;
        let b = 2 * mode;
        Ok(self.data.fixed_view::<2, 2>(b, b).into_owned())
    }

    /// Block-diagonal part: all covariances between different modes set to
    /// zero, intramodal X-P covariances kept.
    pub fn local_part(&self) -> Self {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.n_modes() {
            let b = 2 * k;
            out.fixed_view_mut::<2, 2>(b, b)
                .copy_from(&self.data.fixed_view::<2, 2>(b, b));
        }
        Self { data: out }
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        (&self.data - &other.data).amax()
    }

    /// Parses the JSON document `{"n_modes": N, "ordering": "xpxp", "data": [[...]]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: MatrixDocument =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&MatrixDocument::from(self))
            .expect("matrix document always serializes")
    }

    /// Parses a whitespace-delimited matrix, one row per line. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_text(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|_| Error::Format(format!("bad number {tok:?}")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CovarianceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.row_iter() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for CovarianceMatrix {
    type Err = Error;

    /// Accepts either the JSON document or the plain-text format.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json_str(s)
        } else {
            Self::from_text(s)
        }
    }
}

/// On-disk JSON representation of a covariance matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n_modes: usize,
    pub ordering: String,
    pub data: Vec<Vec<f64>>,
}

impl From<&CovarianceMatrix> for MatrixDocument {
    fn from(g: &CovarianceMatrix) -> Self {
        Self {
            n_modes: g.n_modes(),
            ordering: "xpxp".into(),
            data: g.to_rows(),
        }
    }
}

impl TryFrom<MatrixDocument> for CovarianceMatrix {
    type Error = Error;

    fn try_from(doc: MatrixDocument) -> Result<Self> {
        if doc.ordering != "xpxp" {
            return Err(Error::Format(format!(
                "unsupported quadrature ordering {:?}",
                doc.ordering
            )));
        }
        let g = Self::from_rows(&doc.data)?;
        if g.n_modes() != doc.n_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * doc.n_modes,
                found: g.dim(),
            });
        }
        Ok(g)
    }
}

/// The symplectic form `J_N`: `N` copies of `(0 1; -1 0)` on the diagonal.
///
/// Some texts use the opposite sign for the 2x2 block. The symplectic
/// spectrum does not depend on that choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = 2 * self.n_modes;
        let mut j = DMatrix::zeros(d, d);
        for k in 0..self.n_modes {
            j[(2 * k, 2 * k + 1)] = 1.0;
            j[(2 * k + 1, 2 * k)] = -1.0;
        }
        j
    }
}

/// Diagonal sign mask `T_k`: `+1` everywhere except `-1` at `P_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialTransposeMask {
    pub mode: usize,
}

impl PartialTransposeMask {
    pub fn new(mode: usize) -> Self {
        Self { mode }
    }

    pub fn sign(&self, index: usize) -> f64 {
        if index == 2 * self.mode + 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn matrix(&self, n_modes: usize) -> DMatrix<f64> {
        DMatrix::from_fn(2 * n_modes, 2 * n_modes, |i, j| {
            if i == j {
                self.sign(i)
            } else {
                0.0
            }
        })
    }
}
