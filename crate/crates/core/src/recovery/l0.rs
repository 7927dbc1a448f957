use std::ops::ControlFlow;

use super::{check_rhs, feasibility_bound, RecoveryResult, SolverTag, Status};
use crate::error::{Error, Result};
use crate::keymatrix::MeasurementMatrix;
use crate::linalg::{least_squares, norm2};
use crate::subsets::{binomial, for_each_subset, Budget};

/// Exhaustive minimum-l0 search.
///
/// Scans sparsity levels `0..=k_max`; at each level every support is fit by
/// least squares. The first level with a feasible support wins, and its
/// lexicographically smallest feasible support provides the coefficients.
/// Status is `unique` when exactly one support at that level is feasible,
/// `ambiguous` when several are, `failed` when no level up to `k_max` is.
pub fn l0_exhaustive(a: &MeasurementMatrix, y: &[f64], k_max: usize, budget: Budget) -> Result<RecoveryResult> {
    check_rhs(a, y)?;
    let (m, n) = (a.rows(), a.cols());
    if k_max > m {
        return Err(Error::Domain(format!("k_max = {k_max} exceeds the number of rows m = {m}")));
    }
    let bound = feasibility_bound(y);
    let mut spent: u128 = 0;

    for k in 0..=k_max.min(n) {
        spent = spent.saturating_add(binomial(n, k));
        budget.check(spent)?;

        if k == 0 {
            if norm2(y) <= bound {
                let mut r = RecoveryResult::new(a, y, vec![0.0; n], Status::Unique, SolverTag::L0);
                r.iterations = 1;
                return Ok(r);
            }
            continue;
        }

        let mut first: Option<(Vec<usize>, Vec<f64>)> = None;
        let mut feasible = 0usize;
        for_each_subset::<(), _>(n, k, |support| {
            let cols = a.columns(support);
            if let Some(coef) = least_squares(&cols, y) {
                let mut r = y.to_vec();
                for (j, c) in coef.iter().enumerate() {
                    for (ri, aij) in r.iter_mut().zip(cols.col(j)) {
                        *ri -= aij * c;
                    }
                }
                if norm2(&r) <= bound {
                    feasible += 1;
                    if first.is_none() {
                        first = Some((support.to_vec(), coef));
                    }
                }
            }
            ControlFlow::Continue(())
        });

        if let Some((support, coef)) = first {
            let mut x = vec![0.0; n];
            for (j, c) in support.iter().zip(coef) {
                x[*j] = c;
            }
            let status = if feasible == 1 { Status::Unique } else { Status::Ambiguous };
            let mut r = RecoveryResult::new(a, y, x, status, SolverTag::L0);
            r.iterations = k + 1;
            return Ok(r);
        }
    }

    let mut r = RecoveryResult::new(a, y, vec![0.0; n], Status::Failed, SolverTag::L0);
    r.iterations = k_max + 1;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> MeasurementMatrix {
        MeasurementMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn zero_ciphertext_is_zero_sparse() {
        let a = mat(&[&[1.0, 2.0, 3.0], &[0.0, 1.0, 1.0]]);
        let r = l0_exhaustive(&a, &[0.0, 0.0], 2, Budget::default()).unwrap();
        assert_eq!(r.coefficients, vec![0.0; 3]);
        assert!(r.support.is_empty());
        assert_eq!(r.status, Status::Unique);
    }

    #[test]
    fn identity_single_spike() {
        let a = MeasurementMatrix::identity(3);
        let r = l0_exhaustive(&a, &[0.0, 5.0, 0.0], 1, Budget::default()).unwrap();
        assert_eq!(r.coefficients, vec![0.0, 5.0, 0.0]);
        assert_eq!(r.support, vec![1]);
        assert_eq!(r.status, Status::Unique);
    }

    #[test]
    fn only_the_sum_column_fits() {
        // Single-column fits: col 0 and col 1 each leave residual 1, col 2 is exact.
        let a = mat(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]]);
        let r = l0_exhaustive(&a, &[1.0, 1.0], 1, Budget::default()).unwrap();
        assert_eq!(r.support, vec![2]);
        assert!((r.coefficients[2] - 1.0).abs() < 1e-15);
        assert_eq!(r.coefficients[0], 0.0);
        assert_eq!(r.status, Status::Unique);
    }

    #[test]
    fn duplicate_columns_are_ambiguous() {
        let a = mat(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let r = l0_exhaustive(&a, &[2.0, 0.0], 1, Budget::default()).unwrap();
        assert_eq!(r.status, Status::Ambiguous);
        // lexicographically smallest feasible support
        assert_eq!(r.support, vec![0]);
    }

    #[test]
    fn infeasible_up_to_k_max() {
        let a = mat(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]]);
        let r = l0_exhaustive(&a, &[1.0, 2.0], 1, Budget::default()).unwrap();
        assert_eq!(r.status, Status::Failed);
    }

    #[test]
    fn budget_is_enforced() {
        let a = MeasurementMatrix::identity(10);
        let y = vec![1.0; 10];
        let err = l0_exhaustive(&a, &y, 5, Budget(100)).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn k_max_above_rows_is_rejected() {
        let a = mat(&[&[1.0, 0.0, 1.0]]);
        assert!(matches!(l0_exhaustive(&a, &[1.0], 2, Budget::default()), Err(Error::Domain(_))));
    }
}
