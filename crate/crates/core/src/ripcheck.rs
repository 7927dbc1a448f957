//! Exhaustive structural checks on a matrix: restricted isometry constants,
//! spark, and injectivity over a message set.
//!
//! The isometry constant uses the non-squared band
//! `(1 - eps) ||a|| <= ||A a|| <= (1 + eps) ||a||`, so on a support `S`
//! the tightest constant is `max(1 - sigma_min(A_S), sigma_max(A_S) - 1)`.
//! Much of the literature squares the norms instead; the two constants are
//! not interchangeable.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::codec::SparseMessage;
use crate::error::{Error, Result};
use crate::keymatrix::MeasurementMatrix;
use crate::linalg::{norm2, singular_values, ColMatrix};
use crate::subsets::{binomial, for_each_subset, Budget};

/// Relative singular-value threshold for linear dependence.
pub const RANK_TOL: f64 = 1e-10;

/// Minimum ciphertext separation for two messages to count as distinguishable.
pub const INJECTIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipReport {
    pub k: usize,
    pub epsilon_k: f64,
    pub satisfied: bool,
    pub supports_checked: u64,
    pub extremal_support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparkReport {
    /// `n + 1` means every column subset is independent.
    pub spark: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub injective: bool,
    /// Smallest ciphertext distance over pairs of distinct messages;
    /// infinite when there are fewer than two distinct messages.
    pub min_pairwise_distance: f64,
    pub colliding_pair: Option<(usize, usize)>,
}

fn band_deviation(cols: &ColMatrix) -> f64 {
    let sv = singular_values(cols);
    let smax = sv[0];
    let smin = *sv.last().unwrap();
    (1.0 - smin).max(smax - 1.0)
}

fn is_dependent(cols: &ColMatrix) -> bool {
    let sv = singular_values(cols);
    let smax = sv[0];
    smax == 0.0 || *sv.last().unwrap() <= RANK_TOL * smax
}

/// Order-`k` isometry constant by enumerating all `C(n, k)` supports.
/// The reported extremal support is the lexicographically first one that
/// attains the maximum.
pub fn rip_constant(a: &MeasurementMatrix, k: usize, budget: Budget) -> Result<RipReport> {
    let (m, n) = (a.rows(), a.cols());
    if k < 1 || k > m || k > n {
        return Err(Error::Domain(format!("rip order must satisfy 1 <= k <= min(m, n), got k={k} for {m}x{n}")));
    }
    let total = binomial(n, k);
    budget.check(total)?;

    let mut eps = f64::NEG_INFINITY;
    let mut extremal = Vec::new();
    let mut checked = 0u64;
    for_each_subset::<(), _>(n, k, |s| {
        let d = band_deviation(&a.columns(s));
        checked += 1;
        if d > eps {
            eps = d;
            extremal = s.to_vec();
        }
        ControlFlow::Continue(())
    });
    let eps = eps.max(0.0);
    Ok(RipReport { k, epsilon_k: eps, satisfied: eps < 1.0, supports_checked: checked, extremal_support: extremal })
}

/// Worst band deviation of a single vector, `max(1 - r, r - 1)` with
/// `r = ||A a|| / ||a||`.
pub fn sample_deviation(a: &MeasurementMatrix, alpha: &[f64]) -> Result<f64> {
    let r = norm2(&a.mul_vec(alpha)?) / norm2(alpha);
    Ok((1.0 - r).max(r - 1.0))
}

/// First dependent `size`-subset in lexicographic order, if any.
fn first_dependent(a: &MeasurementMatrix, size: usize) -> Option<Vec<usize>> {
    for_each_subset(a.cols(), size, |s| {
        if is_dependent(&a.columns(s)) {
            ControlFlow::Break(s.to_vec())
        } else {
            ControlFlow::Continue(())
        }
    })
}

/// Smallest number of linearly dependent columns, scanning subset sizes
/// upward from 1. Any `m + 1` columns are dependent, so the scan stops
/// there at the latest.
pub fn spark(a: &MeasurementMatrix, budget: Budget) -> Result<SparkReport> {
    let (m, n) = (a.rows(), a.cols());
    let top = (m + 1).min(n);
    let mut spent: u128 = 0;
    for s in 1..=top {
        spent = spent.saturating_add(binomial(n, s));
        budget.check(spent)?;
        if let Some(w) = first_dependent(a, s) {
            return Ok(SparkReport { spark: s, witness: Some(w) });
        }
    }
    Ok(SparkReport { spark: n + 1, witness: None })
}

/// Whether `spark(A) > s`. Dependence is inherited by supersets, so only
/// the `s`-subsets need checking.
pub fn spark_exceeds(a: &MeasurementMatrix, s: usize, budget: Budget) -> Result<bool> {
    let n = a.cols();
    if s == 0 {
        return Ok(true);
    }
    if s > n {
        return Ok(false);
    }
    budget.check(binomial(n, s))?;
    Ok(first_dependent(a, s).is_none())
}

/// Checks that distinct messages map to distinguishable ciphertexts.
/// Exact duplicates in the list are skipped.
pub fn unique_projection_check(a: &MeasurementMatrix, messages: &[SparseMessage]) -> Result<ProjectionReport> {
    let ys = messages.iter().map(|x| a.mul_vec(x.entries())).collect::<Result<Vec<_>>>()?;
    let mut min_d = f64::INFINITY;
    let mut colliding = None;
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            if messages[i].entries() == messages[j].entries() {
                continue;
            }
            let diff: Vec<f64> = ys[i].iter().zip(&ys[j]).map(|(u, v)| u - v).collect();
            let d = norm2(&diff);
            if d < min_d {
                min_d = d;
            }
            if d <= INJECTIVITY_TOL && colliding.is_none() {
                colliding = Some((i, j));
            }
        }
    }
    Ok(ProjectionReport { injective: colliding.is_none(), min_pairwise_distance: min_d, colliding_pair: colliding })
}

/// All messages of dimension `n` with exactly `k` entries equal to `+1` or
/// `-1`; supports in lexicographic order, signs in binary order with `+1`
/// first.
pub fn signed_sparse_messages(n: usize, k: usize) -> Vec<SparseMessage> {
    let mut out = Vec::new();
    for_each_subset::<(), _>(n, k, |s| {
        for mask in 0u32..(1 << k) {
            let mut e = vec![0.0; n];
            for (b, &j) in s.iter().enumerate() {
                e[j] = if mask & (1 << b) == 0 { 1.0 } else { -1.0 };
            }
            out.push(SparseMessage::new(e).expect("finite entries"));
        }
        ControlFlow::Continue(())
    });
    out
}
