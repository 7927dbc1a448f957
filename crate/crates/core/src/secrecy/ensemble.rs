use std::collections::HashMap;

use super::ideal::KeyEnsemble;
use super::joint::{DiscreteJoint, JointModel};
use crate::codec::SparseMessage;
use crate::error::{Error, Result};
use crate::keymatrix::{compose, derive_matrix, Dictionary, SecretKey};

/// Cap on the number of distinct quantized cryptograms.
pub const MAX_CRYPTOGRAM_CELLS: usize = 1_000_000;

/// Exact joint of (message, quantized ciphertext) over a key ensemble and a
/// uniformly distributed message list.
///
/// Each ciphertext coordinate is binned as `floor(y_i / bin_width)`.
/// Cryptogram indices are assigned in first-seen order, iterating keys in
/// the outer loop and messages in the inner one.
pub fn cs_ensemble_joint(
    keys: &KeyEnsemble<SecretKey>,
    messages: &[SparseMessage],
    psi: &Dictionary,
    bin_width: f64,
) -> Result<DiscreteJoint> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Domain(format!("bin_width must be positive, got {bin_width}")));
    }
    if messages.is_empty() {
        return Err(Error::Validation("message list is empty".into()));
    }
    let (m, n) = (keys.keys()[0].m, keys.keys()[0].n);
    if let Some(i) = keys.keys().iter().position(|k| k.m != m || k.n != n) {
        return Err(Error::Dimension(format!("key {i} is {}x{}, key 0 is {m}x{n}", keys.keys()[i].m, keys.keys()[i].n)));
    }
    if let Some(i) = messages.iter().position(|x| x.n() != n) {
        return Err(Error::Dimension(format!("message {i} has length {}, keys expect {n}", messages[i].n())));
    }
    for i in 0..messages.len() {
        for j in 0..i {
            if messages[i].entries() == messages[j].entries() {
                return Err(Error::Validation(format!("messages {j} and {i} are identical")));
            }
        }
    }

    let t_x = messages.len();
    let msg_p = 1.0 / t_x as f64;
    let mut registry: HashMap<Vec<i64>, usize> = HashMap::new();
    // (message, cryptogram, probability) contributions in canonical order
    let mut mass: Vec<(usize, usize, f64)> = Vec::with_capacity(keys.len() * t_x);

    for (key, kp) in keys.keys().iter().zip(keys.probs()) {
        let a = compose(&derive_matrix(key)?, psi)?;
        for (xi, x) in messages.iter().enumerate() {
            let y = a.mul_vec(x.entries())?;
            let cell = y
                .iter()
                .map(|v| {
                    let q = (v / bin_width).floor();
                    if q.abs() < i64::MAX as f64 {
                        Ok(q as i64)
                    } else {
                        Err(Error::Validation(format!("ciphertext value {v} out of range for bin width {bin_width}")))
                    }
                })
                .collect::<Result<Vec<i64>>>()?;
            let next = registry.len();
            let yi = *registry.entry(cell).or_insert(next);
            if registry.len() > MAX_CRYPTOGRAM_CELLS {
                return Err(Error::Budget { needed: registry.len() as u128, budget: MAX_CRYPTOGRAM_CELLS as u64 });
            }
            mass.push((xi, yi, kp * msg_p));
        }
    }

    let t_y = registry.len();
    let mut probs = vec![0.0; t_x * t_y];
    for (x, y, p) in mass {
        probs[x * t_y + y] += p;
    }
    Ok(DiscreteJoint::dense(t_x, t_y, probs)?.with_model(JointModel::CsEnsemble))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secrecy::exact_mi;

    #[test]
    fn single_key_leaks_everything() {
        let keys = KeyEnsemble::uniform(vec![SecretKey::new(5, 4, 8).unwrap()]).unwrap();
        let msgs: Vec<SparseMessage> = (0..4)
            .map(|j| {
                let mut e = vec![0.0; 8];
                e[j] = 1.0;
                SparseMessage::new(e).unwrap()
            })
            .collect();
        let j = cs_ensemble_joint(&keys, &msgs, &Dictionary::identity(8), 1e-3).unwrap();
        assert_eq!(j.t_y(), 4);
        assert!((exact_mi(&j).mi_bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_duplicates_and_bad_width() {
        let keys = KeyEnsemble::uniform(vec![SecretKey::new(5, 2, 4).unwrap()]).unwrap();
        let x = SparseMessage::zeros(4);
        let psi = Dictionary::identity(4);
        assert!(cs_ensemble_joint(&keys, &[x.clone(), x.clone()], &psi, 1.0).is_err());
        assert!(matches!(cs_ensemble_joint(&keys, &[x], &psi, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_mixed_key_shapes() {
        let keys =
            KeyEnsemble::uniform(vec![SecretKey::new(1, 2, 4).unwrap(), SecretKey::new(2, 3, 4).unwrap()]).unwrap();
        let err = cs_ensemble_joint(&keys, &[SparseMessage::zeros(4)], &Dictionary::identity(4), 1.0).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }
}
