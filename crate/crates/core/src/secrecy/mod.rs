//! Exact information-theoretic secrecy measurements on finite ensembles.
//!
//! Two tracks are kept apart. The ideal models realize the perfect-secrecy
//! arguments with finite key families (permutations fixing zero, cyclic
//! shifts) whose cryptogram distributions are uniform by construction. The
//! compressed-sensing track quantizes real ciphertexts from a set of seeded
//! matrices and measures whatever leakage that actually produces; it makes
//! no secrecy claim of its own.
//!
//! All entropies are in bits.

mod ensemble;
mod ideal;
mod joint;
mod pruning;

pub use ensemble::{cs_ensemble_joint, MAX_CRYPTOGRAM_CELLS};
pub use ideal::{
    ideal_t1_joint, ideal_t1_joint_enumerated, ideal_t2_joint, ideal_t2_joint_enumerated, ideal_t2_keys,
    key_entropy_check, t1_closed_form, EntropyCheck, KeyEnsemble,
};
pub use joint::{exact_mi, Block, DiscreteJoint, JointModel, MiReport};
pub use pruning::{audit_against_rip, prune_candidates, rip_premise_audit, AuditReport, PruneReport};

/// `x log2 x` with the convention `0 log 0 = 0`.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}
