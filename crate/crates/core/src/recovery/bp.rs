use super::simplex::{self, LpStatus, StandardLp};
use super::{check_rhs, feasibility_bound, RecoveryResult, SolverTag, Status};
use crate::error::Result;
use crate::keymatrix::MeasurementMatrix;
use crate::linalg::singular_values;

/// Basis pursuit: `min ||alpha||_1  s.t.  A alpha = y`.
///
/// The LP is posed in split form `alpha = u - v` with `u, v >= 0` and
/// objective `sum(u + v)`, which has the same optimum as the bounded form
/// `min sum(t)` with `-t <= alpha <= t`. Pivot cap defaults to `50 (m + n)`.
pub fn bp(a: &MeasurementMatrix, y: &[f64]) -> Result<RecoveryResult> {
    bp_with_cap(a, y, 50 * (a.rows() + a.cols()))
}

pub fn bp_with_cap(a: &MeasurementMatrix, y: &[f64], cap: usize) -> Result<RecoveryResult> {
    check_rhs(a, y)?;
    let (m, n) = (a.rows(), a.cols());
    if m > n {
        log::warn!("basis pursuit on an overdetermined {m}x{n} system");
    }
    let sv = singular_values(&a.columns(&(0..n).collect::<Vec<_>>()));
    let rank = sv.iter().filter(|s| **s > 1e-10 * sv[0]).count();
    if rank < m {
        log::warn!("basis pursuit matrix is rank deficient (rank {rank} < m = {m})");
    }

    let mut lp_a = vec![0.0; m * 2 * n];
    for i in 0..m {
        for j in 0..n {
            let v = a.get(i, j);
            lp_a[i * 2 * n + j] = v;
            lp_a[i * 2 * n + n + j] = -v;
        }
    }
    let cost = vec![1.0; 2 * n];
    let lp = StandardLp { rows: m, cols: 2 * n, a: &lp_a, b: y, c: &cost };
    let sol = simplex::solve(&lp, feasibility_bound(y), cap)?;

    let alpha: Vec<f64> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    let status = match sol.status {
        LpStatus::Optimal => Status::Solved,
        // the objective is bounded below by 0, so only infeasibility can occur
        LpStatus::Infeasible | LpStatus::Unbounded => Status::Failed,
    };
    let mut r = RecoveryResult::new(a, y, alpha, status, SolverTag::Bp);
    r.iterations = sol.pivots;
    Ok(r)
}
