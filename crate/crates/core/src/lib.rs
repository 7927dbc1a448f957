//! Compressed-sensing encryption with exact secrecy audits.
//!
//! A [`SecretKey`] (64-bit seed plus dimensions) derives a Gaussian
//! measurement matrix; sparse messages are encrypted as `y = Phi Psi alpha`
//! and decrypted by sparse recovery with the same key. Around that
//! pipeline the crate provides the exhaustive machinery needed to check
//! secrecy arguments at small scale: restricted isometry constants and
//! spark by support enumeration, exact mutual information over finite joint
//! distributions, idealized key families, and the norm-band eavesdropper.
//!
//! The generator behind key derivation is a reproducibility contract
//! (SplitMix64 seeding xoshiro256++, Box–Muller normals), not a
//! cryptographically secure source.

pub mod cli;
pub mod codec;
pub mod error;
pub mod keymatrix;
pub mod linalg;
pub mod prng;
pub mod recovery;
pub mod ripcheck;
pub mod secrecy;
pub mod subsets;

pub use codec::{decrypt, encrypt, Ciphertext, SolverChoice, SparseMessage};
pub use error::{Error, Result};
pub use keymatrix::{compose, derive_matrix, suggest_m, Dictionary, MeasurementMatrix, SecretKey};
pub use recovery::{RecoveryResult, Status};
pub use ripcheck::{rip_constant, spark, unique_projection_check, RipReport, SparkReport};
pub use subsets::Budget;
