//! Sparse recovery: exhaustive l0 search, basis pursuit and OMP.
//!
//! All solvers are deterministic in their inputs, and every tie is broken
//! toward the lowest index.

mod bp;
mod l0;
mod omp;
pub mod simplex;

pub use bp::{bp, bp_with_cap};
pub use l0::l0_exhaustive;
pub use omp::omp;

use serde::Serialize;

use crate::keymatrix::MeasurementMatrix;
use crate::linalg::norm2;

/// Relative feasibility tolerance: a fit is feasible when its residual is
/// at most `FEAS_TOL * (1 + ||y||)`.
pub const FEAS_TOL: f64 = 1e-8;

/// Entries with magnitude at or below this are outside the support.
pub const SUPPORT_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Unique,
    Solved,
    Ambiguous,
    Failed,
}

impl Status {
    pub fn is_success(self) -> bool {
        !matches!(self, Status::Failed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    L0,
    Bp,
    Omp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub coefficients: Vec<f64>,
    pub support: Vec<usize>,
    pub residual_l2: f64,
    pub status: Status,
    pub solver: SolverTag,
    /// Solver iterations (OMP selections, simplex pivots, l0 levels scanned).
    pub iterations: usize,
    /// OMP only: residual norm before the first selection and after each one.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residual_history: Vec<f64>,
}

impl RecoveryResult {
    pub(crate) fn new(
        a: &MeasurementMatrix,
        y: &[f64],
        coefficients: Vec<f64>,
        status: Status,
        solver: SolverTag,
    ) -> Self {
        let residual_l2 = residual_norm(a, y, &coefficients);
        let support = support_of(&coefficients);
        RecoveryResult {
            coefficients,
            support,
            residual_l2,
            status,
            solver,
            iterations: 0,
            residual_history: Vec::new(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|v| v.abs()).sum()
    }
}

/// `||y - A x||_2`.
pub fn residual_norm(a: &MeasurementMatrix, y: &[f64], x: &[f64]) -> f64 {
    let ax = a.mul_vec(x).expect("coefficient length matches matrix");
    let r: Vec<f64> = y.iter().zip(&ax).map(|(u, v)| u - v).collect();
    norm2(&r)
}

pub fn support_of(x: &[f64]) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, v)| v.abs() > SUPPORT_EPSILON).map(|(i, _)| i).collect()
}

pub(crate) fn feasibility_bound(y: &[f64]) -> f64 {
    FEAS_TOL * (1.0 + norm2(y))
}

pub(crate) fn check_rhs(a: &MeasurementMatrix, y: &[f64]) -> crate::Result<()> {
    if y.len() != a.rows() {
        return Err(crate::Error::Dimension(format!(
            "matrix has {} rows but ciphertext has length {}",
            a.rows(),
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(crate::Error::Validation("ciphertext has non-finite entries".into()));
    }
    Ok(())
}
