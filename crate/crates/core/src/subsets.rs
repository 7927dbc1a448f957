//! Lexicographic enumeration of column supports and the enumeration budget.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Default cap on the number of submatrix factorizations per call.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "CS_SECRECY_BUDGET";

/// Cap on the number of supports an exhaustive routine may evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Reads `CS_SECRECY_BUDGET`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(Budget)
                .map_err(|_| Error::Validation(format!("{BUDGET_ENV}: not an unsigned integer: {v:?}"))),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Fails with a budget error when `needed` exceeds the cap.
    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::Budget { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Visits every size-`k` subset of `0..n` in lexicographic order until the
/// visitor breaks.
pub fn for_each_subset<B, F>(n: usize, k: usize, mut visit: F) -> Option<B>
where
    F: FnMut(&[usize]) -> ControlFlow<B>,
{
    if k > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let ControlFlow::Break(b) = visit(&idx) {
            return Some(b);
        }
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return None;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
