//! Log-evenly spaced rank subsets.
//!
//! Fitting a rank-frequency plot on every rank lets the long tail dominate
//! the objective. Sampling ranks geometrically keeps the head and the tail
//! comparably weighted.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Default number of leading ranks that are always kept.
pub const DEFAULT_HEAD: u32 = 10;

/// Default geometric expansion factor.
pub const DEFAULT_BASE: f64 = 1.05;

/// Returns the sorted, de-duplicated union of `1..=min(head, r_max)` and
/// `round(head * base^k)` for `k >= 1`, stopping once the rounded value
/// exceeds `r_max`. Rounding is half-away-from-zero.
pub fn log_even_ranks(r_max: u32, head: u32, base: f64) -> Result<Vec<u32>> {
    if r_max < 1 {
        return Err(Error::InvalidInput("r_max must be >= 1".into()));
    }
    if head < 1 {
        return Err(Error::InvalidInput("head must be >= 1".into()));
    }
    if !(base > 1.0) || !base.is_finite() {
        return Err(Error::InvalidInput(format!(
            "base must be a finite real > 1, got {base}"
        )));
    }
    let mut ranks: BTreeSet<u32> = (1..=head.min(r_max)).collect();
    let mut k = 1;
    loop {
        let value = (f64::from(head) * base.powi(k)).round();
        if value > f64::from(r_max) {
            break;
        }
        ranks.insert(value as u32);
        k += 1;
    }
    Ok(ranks.into_iter().collect())
}

/// `log_even_ranks` with the default head and base.
pub fn log_even_ranks_default(r_max: u32) -> Result<Vec<u32>> {
    log_even_ranks(r_max, DEFAULT_HEAD, DEFAULT_BASE)
}
