//! Idealized finite key families with uniform cryptogram distributions.

use itertools::Itertools;
use serde::Serialize;

use super::joint::{Block, DiscreteJoint, JointModel};
use super::xlog2x;
use crate::error::{Error, Result};
use crate::linalg::compensated_sum;
use crate::subsets::Budget;

/// Keys with their selection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyEnsemble<K> {
    keys: Vec<K>,
    probs: Vec<f64>,
}

impl<K> KeyEnsemble<K> {
    pub fn uniform(keys: Vec<K>) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::Validation("key ensemble is empty".into()));
        }
        let p = 1.0 / keys.len() as f64;
        let probs = vec![p; keys.len()];
        Ok(Self { keys, probs })
    }

    pub fn with_probs(keys: Vec<K>, probs: Vec<f64>) -> Result<Self> {
        if keys.is_empty() || keys.len() != probs.len() {
            return Err(Error::Validation(format!("{} keys but {} probabilities", keys.len(), probs.len())));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Validation("key probabilities must be non-negative".into()));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("key probabilities sum to {total}, not 1")));
        }
        Ok(Self { keys, probs })
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn entropy_bits(&self) -> f64 {
        -compensated_sum(self.probs.iter().map(|p| xlog2x(*p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyCheck {
    pub ok: bool,
    pub h_k_bits: f64,
    pub h_w_bits: f64,
}

/// Shannon's key-length condition `H(K) >= H(W)` for uniformly distributed
/// messages, so `H(W) = log2(t_messages)`.
pub fn key_entropy_check<K>(keys: &KeyEnsemble<K>, t_messages: usize) -> EntropyCheck {
    let h_k = keys.entropy_bits();
    let h_w = (t_messages as f64).log2();
    EntropyCheck { ok: h_k >= h_w - 1e-12, h_k_bits: h_k, h_w_bits: h_w }
}

fn check_t(t: usize) -> Result<()> {
    if t < 2 {
        Err(Error::Domain(format!("need at least two messages, got t={t}")))
    } else {
        Ok(())
    }
}

/// Zero-fixing permutation model: uniform messages `0..t`, uniform keys over
/// permutations of `1..t` that fix 0, cryptogram `pi(x)`.
///
/// Built analytically as two constant blocks: `p(0,0) = 1/t` and
/// `p(x,y) = 1/(t(t-1))` for `x, y != 0`.
pub fn ideal_t1_joint(t: usize) -> Result<DiscreteJoint> {
    check_t(t)?;
    let tf = t as f64;
    let blocks = vec![
        Block { rows: 0..1, cols: 0..1, p: 1.0 / tf },
        Block { rows: 1..t, cols: 1..t, p: 1.0 / (tf * (tf - 1.0)) },
    ];
    Ok(DiscreteJoint::from_blocks(t, t, blocks)?.with_model(JointModel::IdealT1))
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).try_fold(1u128, |a, b| a.checked_mul(b)).unwrap_or(u128::MAX)
}

/// [`ideal_t1_joint`] by walking all `(t-1)!` keys and counting
/// co-occurrences. Dense storage.
pub fn ideal_t1_joint_enumerated(t: usize, budget: Budget) -> Result<DiscreteJoint> {
    check_t(t)?;
    let keys = factorial(t - 1);
    budget.check(keys)?;
    let mut counts = vec![0u64; t * t];
    counts[0] += keys as u64;
    for perm in (1..t).permutations(t - 1) {
        for (x, y) in (1..t).zip(perm) {
            counts[x * t + y] += 1;
        }
    }
    let denom = t as f64 * keys as f64;
    let probs = counts.iter().map(|c| *c as f64 / denom).collect();
    Ok(DiscreteJoint::dense(t, t, probs)?.with_model(JointModel::IdealT1))
}

/// `log2 T - ((T-1)/T) log2(T-1)`, the mutual information of the
/// zero-fixing permutation model.
pub fn t1_closed_form(t: usize) -> Result<f64> {
    check_t(t)?;
    let tf = t as f64;
    Ok(tf.log2() - (tf - 1.0) / tf * (tf - 1.0).log2())
}

/// One-time-pad model: uniform messages `0..t` (none of them null), keys
/// uniform over the `t` cyclic shifts, cryptogram `x + k mod t`. Every cell
/// has probability `1/t^2`.
pub fn ideal_t2_joint(t: usize) -> Result<DiscreteJoint> {
    check_t(t)?;
    let tf = t as f64;
    let blocks = vec![Block { rows: 0..t, cols: 0..t, p: 1.0 / (tf * tf) }];
    Ok(DiscreteJoint::from_blocks(t, t, blocks)?.with_model(JointModel::IdealT2))
}

/// [`ideal_t2_joint`] by applying each shift. Dense storage.
pub fn ideal_t2_joint_enumerated(t: usize) -> Result<DiscreteJoint> {
    check_t(t)?;
    let mut counts = vec![0u64; t * t];
    for shift in 0..t {
        for x in 0..t {
            counts[x * t + (x + shift) % t] += 1;
        }
    }
    let denom = (t * t) as f64;
    let probs = counts.iter().map(|c| *c as f64 / denom).collect();
    Ok(DiscreteJoint::dense(t, t, probs)?.with_model(JointModel::IdealT2))
}

/// The `t` shift keys of the one-time-pad model, uniformly weighted.
pub fn ideal_t2_keys(t: usize) -> Result<KeyEnsemble<usize>> {
    check_t(t)?;
    KeyEnsemble::uniform((0..t).collect())
}
