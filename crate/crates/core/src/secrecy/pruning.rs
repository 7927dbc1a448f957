//! The norm-band eavesdropper and the audit that decides whether it can
//! ever fire.
//!
//! An eavesdropper who knows an isometry constant `eps` for the key family
//! can discard any candidate plaintext `x'` whose norm puts `||y||` outside
//! `[(1 - eps) ||x'||, (1 + eps) ||x'||]`. Whether that discards a message
//! the sender could actually have used depends on whether the constant is
//! honest for the matrix in use, which is what the audit checks.

use serde::Serialize;

use crate::codec::{Ciphertext, SparseMessage};
use crate::error::{Error, Result};
use crate::keymatrix::MeasurementMatrix;
use crate::linalg::norm2;
use crate::ripcheck::rip_constant;
use crate::subsets::Budget;

/// Relative slack when testing a ciphertext norm against the band.
const BAND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PruneReport {
    /// Indices into the candidate list, in input order.
    pub survivors: Vec<usize>,
    pub eliminated: Vec<usize>,
    /// Admissible plaintext norms `[||y|| / (1 + eps), ||y|| / (1 - eps)]`.
    pub norm_lower: f64,
    pub norm_upper: f64,
}

/// Drops every candidate whose norm lies outside
/// `[||y|| / (1 + eps), ||y|| / (1 - eps)]`, the only norms consistent
/// with the isometry band. Both sides of the band are applied, widened by
/// a relative slack so a message sitting exactly on the extremal support
/// is not lost to rounding in the constant.
pub fn prune_candidates(y: &Ciphertext, epsilon_k: f64, candidates: &[SparseMessage]) -> Result<PruneReport> {
    if !(0.0..1.0).contains(&epsilon_k) {
        return Err(Error::Domain(format!("epsilon must lie in [0, 1), got {epsilon_k}")));
    }
    let ny = y.l2();
    let lower = ny / (1.0 + epsilon_k) * (1.0 - BAND_SLACK);
    let upper = ny / (1.0 - epsilon_k) * (1.0 + BAND_SLACK);
    let (mut survivors, mut eliminated) = (Vec::new(), Vec::new());
    for (i, x) in candidates.iter().enumerate() {
        let nx = x.l2();
        if nx < lower || nx > upper {
            eliminated.push(i);
        } else {
            survivors.push(i);
        }
    }
    Ok(PruneReport { survivors, eliminated, norm_lower: lower, norm_upper: upper })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub k: usize,
    pub epsilon_k: f64,
    pub consistent: bool,
    /// Indices of messages whose own ciphertext leaves the band.
    pub violators: Vec<usize>,
}

/// Checks every message against the band for the stated `epsilon_k`:
/// `(1 - eps) ||x|| <= ||A x|| <= (1 + eps) ||x||`. An honest constant
/// admits no violators; any violator means the matrix does not satisfy
/// the property at that constant.
pub fn rip_premise_audit(
    a: &MeasurementMatrix,
    k: usize,
    epsilon_k: f64,
    messages: &[SparseMessage],
) -> Result<AuditReport> {
    if !(epsilon_k >= 0.0 && epsilon_k.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be non-negative, got {epsilon_k}")));
    }
    let mut violators = Vec::new();
    for (i, x) in messages.iter().enumerate() {
        let l0 = x.l0();
        if l0 > k {
            return Err(Error::Domain(format!("message {i} has {l0} nonzeros, audit order is {k}")));
        }
        let nx = x.l2();
        let ny = norm2(&a.mul_vec(x.entries())?);
        let slack = BAND_SLACK * nx;
        if ny < (1.0 - epsilon_k) * nx - slack || ny > (1.0 + epsilon_k) * nx + slack {
            violators.push(i);
        }
    }
    Ok(AuditReport { k, epsilon_k, consistent: violators.is_empty(), violators })
}

/// [`rip_premise_audit`] at the enumerated constant of `a`.
pub fn audit_against_rip(
    a: &MeasurementMatrix,
    k: usize,
    messages: &[SparseMessage],
    budget: Budget,
) -> Result<AuditReport> {
    let rip = rip_constant(a, k, budget)?;
    rip_premise_audit(a, k, rip.epsilon_k, messages)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(e: &[f64]) -> SparseMessage {
        SparseMessage::new(e.to_vec()).unwrap()
    }

    #[test]
    fn zero_ciphertext_collapses_band() {
        let y = Ciphertext::new(vec![0.0, 0.0]).unwrap();
        let r = prune_candidates(&y, 0.5, &[msg(&[0.0, 0.0]), msg(&[1e-3, 0.0])]).unwrap();
        assert_eq!(r.survivors, vec![0]);
        assert_eq!(r.eliminated, vec![1]);
    }

    #[test]
    fn interval_arithmetic() {
        let y = Ciphertext::new(vec![3.0, 0.0]).unwrap();
        let cands = [msg(&[1.0, 0.0]), msg(&[2.5, 0.0]), msg(&[0.0, 7.0])];
        let r = prune_candidates(&y, 0.5, &cands).unwrap();
        assert!((r.norm_lower - 2.0).abs() < 1e-11 && (r.norm_upper - 6.0).abs() < 1e-11);
        assert_eq!(r.survivors, vec![1]);
        assert_eq!(r.eliminated, vec![0, 2]);
    }

    #[test]
    fn degenerate_band_is_rejected() {
        let y = Ciphertext::new(vec![1.0]).unwrap();
        assert!(matches!(prune_candidates(&y, 1.0, &[]), Err(Error::Domain(_))));
        assert!(matches!(prune_candidates(&y, -0.1, &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_is_always_consistent() {
        let a = MeasurementMatrix::identity(3);
        let r = rip_premise_audit(&a, 3, 0.0, &[msg(&[1.0, -2.0, 0.5]), msg(&[0.0, 0.0, 3.0])]).unwrap();
        assert!(r.consistent);
    }

    #[test]
    fn understated_constant_is_flagged() {
        let a = MeasurementMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let r = rip_premise_audit(&a, 1, 0.4, &[msg(&[1.0, 0.0]), msg(&[0.0, 1.0])]).unwrap();
        assert!(!r.consistent);
        assert_eq!(r.violators, vec![1]);
        // the enumerated constant (1.0) admits both
        assert!(audit_against_rip(&a, 1, &[msg(&[1.0, 0.0]), msg(&[0.0, 1.0])], Budget::default()).unwrap().consistent);
    }

    #[test]
    fn too_dense_message_is_a_domain_error() {
        let a = MeasurementMatrix::identity(2);
        assert!(matches!(rip_premise_audit(&a, 1, 0.1, &[msg(&[1.0, 1.0])]), Err(Error::Domain(_))));
    }
}
