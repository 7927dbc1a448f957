use super::{check_rhs, RecoveryResult, SolverTag, Status};
use crate::error::{Error, Result};
use crate::keymatrix::MeasurementMatrix;
use crate::linalg::{dot, least_squares, norm2};

/// Orthogonal Matching Pursuit.
///
/// Each step picks the column with the largest normalized correlation
/// `|<a_j, r>| / ||a_j||` (lowest index on ties), refits all selected
/// columns by least squares and updates the residual. Stops after `k`
/// selections or once the residual is within `tol * (1 + ||y||)`.
pub fn omp(a: &MeasurementMatrix, y: &[f64], k: usize, tol: f64) -> Result<RecoveryResult> {
    check_rhs(a, y)?;
    let (m, n) = (a.rows(), a.cols());
    if k < 1 || k > m {
        return Err(Error::Domain(format!("omp needs 1 <= k <= m, got k={k} m={m}")));
    }
    let bound = tol * (1.0 + norm2(y));
    let columns: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let norms: Vec<f64> = columns.iter().map(|c| norm2(c)).collect();

    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut coef: Vec<f64> = Vec::new();
    let mut residual = y.to_vec();
    let mut history = vec![norm2(&residual)];
    let mut degenerate = false;

    while support.len() < k && *history.last().unwrap() > bound {
        let mut best = None;
        let mut best_score = -1.0;
        for (j, col) in columns.iter().enumerate() {
            if norms[j] == 0.0 {
                continue;
            }
            let score = dot(col, &residual).abs() / norms[j];
            if score > best_score {
                best_score = score;
                best = Some(j);
            }
        }
        let Some(j) = best else {
            degenerate = true;
            break;
        };
        if support.contains(&j) {
            degenerate = true;
            break;
        }
        support.push(j);
        let sub = a.columns(&support);
        match least_squares(&sub, y) {
            Some(c) => coef = c,
            None => {
                support.pop();
                degenerate = true;
                break;
            }
        }
        residual.copy_from_slice(y);
        for (t, c) in coef.iter().enumerate() {
            for (ri, aij) in residual.iter_mut().zip(sub.col(t)) {
                *ri -= aij * c;
            }
        }
        history.push(norm2(&residual));
    }

    let mut x = vec![0.0; n];
    for (j, c) in support.iter().zip(&coef) {
        x[*j] = *c;
    }
    let final_res = *history.last().unwrap();
    let status = if !degenerate && final_res <= bound { Status::Solved } else { Status::Failed };
    let mut r = RecoveryResult::new(a, y, x, status, SolverTag::Omp);
    r.iterations = history.len() - 1;
    r.residual_history = history;
    Ok(r)
}
