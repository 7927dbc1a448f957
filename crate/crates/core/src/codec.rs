//! Encryption `y = A alpha` and keyed decryption by sparse recovery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keymatrix::{compose, derive_matrix, Dictionary, MeasurementMatrix, SecretKey};
use crate::recovery::{self, RecoveryResult, Status, FEAS_TOL};
use crate::subsets::Budget;

/// Largest ambient dimension for which automatic decryption falls back to
/// exhaustive l0 search when OMP fails.
pub const L0_FALLBACK_MAX_N: usize = 24;

/// Plaintext (or its coefficient vector in the dictionary basis).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMessage {
    entries: Vec<f64>,
    declared_k: Option<usize>,
}

impl SparseMessage {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("message must have at least one entry".into()));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("entries[{i}] is not finite")));
        }
        Ok(Self { entries, declared_k: None })
    }

    /// Message with a declared sparsity bound; `l0 <= k` is enforced.
    pub fn with_sparsity(entries: Vec<f64>, k: usize) -> Result<Self> {
        let mut msg = Self::new(entries)?;
        let l0 = msg.l0();
        if l0 > k {
            return Err(Error::Validation(format!("message has {l0} nonzeros, declared sparsity is {k}")));
        }
        msg.declared_k = Some(k);
        Ok(msg)
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: vec![0.0; n], declared_k: None }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn declared_k(&self) -> Option<usize> {
        self.declared_k
    }

    /// Number of entries that are exactly nonzero.
    pub fn l0(&self) -> usize {
        self.entries.iter().filter(|v| **v != 0.0).count()
    }

    pub fn l2(&self) -> f64 {
        crate::linalg::norm2(&self.entries)
    }

    pub fn to_json(&self) -> String {
        VectorFile { n: self.n(), entries: self.entries.clone() }.to_json()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f = VectorFile::from_json(s)?;
        Self::new(f.entries)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext {
    entries: Vec<f64>,
}

impl Ciphertext {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("entries[{i}] is not finite")));
        }
        Ok(Self { entries })
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn l2(&self) -> f64 {
        crate::linalg::norm2(&self.entries)
    }

    pub fn to_json(&self) -> String {
        VectorFile { n: self.m(), entries: self.entries.clone() }.to_json()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f = VectorFile::from_json(s)?;
        Self::new(f.entries)
    }
}

/// `{"n": <int>, "entries": [...]}`; used for both messages and
/// ciphertexts, with `n` holding the vector length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub n: usize,
    pub entries: Vec<f64>,
}

impl VectorFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("vector serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: VectorFile = serde_json::from_str(s).map_err(|e| Error::Validation(format!("vector file: {e}")))?;
        if f.entries.len() != f.n {
            return Err(Error::Validation(format!(
                "vector file: n is {} but entries has {} values",
                f.n,
                f.entries.len()
            )));
        }
        Ok(f)
    }
}

/// `y = A alpha`.
pub fn encrypt(a: &MeasurementMatrix, alpha: &SparseMessage) -> Result<Ciphertext> {
    Ciphertext::new(a.mul_vec(alpha.entries())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    Omp,
    Bp,
    L0,
    /// OMP, then exhaustive l0 when OMP fails and `n <= 24`.
    #[default]
    Auto,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omp" => Ok(SolverChoice::Omp),
            "bp" => Ok(SolverChoice::Bp),
            "l0" => Ok(SolverChoice::L0),
            "auto" => Ok(SolverChoice::Auto),
            other => Err(Error::Validation(format!("solver: unknown solver {other:?} (expected omp|bp|l0|auto)"))),
        }
    }
}

/// Decrypted plaintext plus the recovery details behind it.
#[derive(Debug, Clone)]
pub struct Decrypted {
    pub message: SparseMessage,
    pub recovery: RecoveryResult,
}

/// Re-derives `Phi` from the key, forms `A = Phi Psi`, recovers a
/// `k`-sparse coefficient vector and returns `x = Psi alpha`.
pub fn decrypt(key: &SecretKey, psi: &Dictionary, y: &Ciphertext, k: usize, solver: SolverChoice) -> Result<Decrypted> {
    decrypt_with_budget(key, psi, y, k, solver, Budget::default())
}

pub fn decrypt_with_budget(
    key: &SecretKey,
    psi: &Dictionary,
    y: &Ciphertext,
    k: usize,
    solver: SolverChoice,
    budget: Budget,
) -> Result<Decrypted> {
    if y.m() != key.m {
        return Err(Error::Dimension(format!(
            "key has m = {} measurements but the ciphertext has length {}",
            key.m,
            y.m()
        )));
    }
    if k < 1 || k > key.m {
        return Err(Error::Domain(format!("sparsity k must be in 1..={}, got {k}", key.m)));
    }
    if 2 * k > key.m {
        log::warn!("k = {k} exceeds m/2 = {}; the sparse solution may not be unique", key.m / 2);
    }
    let phi = derive_matrix(key)?;
    let a = compose(&phi, psi)?;
    let y = y.entries();

    let rec = match solver {
        SolverChoice::Omp => recovery::omp(&a, y, k, FEAS_TOL)?,
        SolverChoice::Bp => recovery::bp(&a, y)?,
        SolverChoice::L0 => recovery::l0_exhaustive(&a, y, k, budget)?,
        SolverChoice::Auto => {
            let r = recovery::omp(&a, y, k, FEAS_TOL)?;
            if r.status == Status::Failed && a.cols() <= L0_FALLBACK_MAX_N {
                recovery::l0_exhaustive(&a, y, k, budget)?
            } else {
                r
            }
        }
    };
    if rec.status == Status::Failed {
        return Err(Error::Recovery { residual: rec.residual_l2 });
    }
    let x = psi.synthesize(&rec.coefficients)?;
    Ok(Decrypted { message: SparseMessage::new(x)?, recovery: rec })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> MeasurementMatrix {
        MeasurementMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn hand_product() {
        let a = mat(&[&[1.0, 0.0, 2.0], &[0.0, 1.0, -1.0]]);
        let y = encrypt(&a, &SparseMessage::new(vec![3.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(y.entries(), &[5.0, -1.0]);
    }

    #[test]
    fn zero_message_encrypts_to_zero() {
        let a = derive_matrix(&SecretKey::new(4, 3, 6).unwrap()).unwrap();
        let y = encrypt(&a, &SparseMessage::zeros(6)).unwrap();
        assert_eq!(y.entries(), &[0.0; 3]);
    }

    #[test]
    fn encrypt_dimension_mismatch() {
        let a = MeasurementMatrix::identity(3);
        assert!(matches!(encrypt(&a, &SparseMessage::zeros(4)), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_ciphertext_decrypts_to_zero_for_every_solver() {
        let key = SecretKey::new(9, 6, 12).unwrap();
        let y = Ciphertext::new(vec![0.0; 6]).unwrap();
        for s in [SolverChoice::Omp, SolverChoice::Bp, SolverChoice::L0, SolverChoice::Auto] {
            let d = decrypt(&key, &Dictionary::identity(12), &y, 2, s).unwrap();
            assert_eq!(d.message.entries(), &[0.0; 12], "{s:?}");
        }
    }

    #[test]
    fn decrypt_rejects_length_mismatch() {
        let key = SecretKey::new(9, 6, 12).unwrap();
        let y = Ciphertext::new(vec![0.0; 5]).unwrap();
        let err = decrypt(&key, &Dictionary::identity(12), &y, 2, SolverChoice::Omp).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        assert!(err.to_string().contains("length 5"));
    }

    #[test]
    fn declared_sparsity_enforced() {
        assert!(SparseMessage::with_sparsity(vec![1.0, 0.0, 2.0], 1).is_err());
        assert_eq!(SparseMessage::with_sparsity(vec![1.0, 0.0, 2.0], 2).unwrap().declared_k(), Some(2));
    }

    #[test]
    fn vector_file_checks_length() {
        assert!(VectorFile::from_json(r#"{"n":3,"entries":[1.0,2.0]}"#).is_err());
        let v = SparseMessage::from_json(r#"{"n":2,"entries":[0.1,-2.5]}"#).unwrap();
        assert_eq!(v.to_json(), r#"{"n":2,"entries":[0.1,-2.5]}"#);
    }

    #[test]
    fn solver_names() {
        assert_eq!("omp".parse::<SolverChoice>().unwrap(), SolverChoice::Omp);
        assert!("cosamp".parse::<SolverChoice>().is_err());
    }
}
