//! An explicit discrete measure whose tail scales like `2^{-n}` while its
//! point masses do not: masses `(3/2) 4^{-(n+1)}` at `2^{-2n}` and
//! `(7/2) 8^{-(n+1)}` at `2^{-(2n+1)}`.
//!
//! Every mass, support point and tail is a dyadic rational, so the statistics
//! below are exact in `f64` over the usable range.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplicitMeasure {
    /// `ξ_k = 2^{-(k-1)}`, decreasing.
    pub support: Vec<f64>,
    pub masses: Vec<f64>,
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Mass at `ξ_k = 2^{-(k-1)}`.
fn mass(k: usize) -> f64 {
    let n = ((k - 1) / 2) as i32;
    if k % 2 == 1 {
        1.5 * pow2(-2 * (n + 1))
    } else {
        3.5 * pow2(-3 * (n + 1))
    }
}

impl ExplicitMeasure {
    pub fn new(k: usize) -> Self {
        ExplicitMeasure {
            support: (1..=k).map(|i| pow2(1 - i as i32)).collect(),
            masses: (1..=k).map(mass).collect(),
        }
    }

    /// `μ([0, ξ_n]) = Σ_{k>=n} μ({ξ_k})` in closed form.
    pub fn mass_up_to(&self, n: usize) -> f64 {
        // odd atoms from index 2m+1 on: 2·4^{-(m+1)}; even atoms from 2m+2 on: 4·8^{-(m+1)}
        let first_odd = ((n as i32) - 1 + 1) / 2;
        let first_even = ((n as i32) - 2 + 1).max(0) / 2;
        2.0 * pow2(-2 * (first_odd + 1)) + 4.0 * pow2(-3 * (first_even + 1))
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_up_to(1)
    }
}

/// Scaled tails and scaled point masses of the explicit measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Remark1Stats {
    pub k: usize,
    pub total_mass: f64,
    /// `(n, μ([0, ξ_n]) 2^n)` for `1 <= n <= K`.
    pub tail_scaled: Vec<(usize, f64)>,
    /// Inclusive range over which the tail window is measured.
    pub tail_window_range: (usize, usize),
    /// max/min of `tail_scaled` over `tail_window_range`.
    pub tail_window_ratio: f64,
    /// `μ({ξ_k}) 2^k` for odd `k`.
    pub odd_scaled: Vec<f64>,
    /// `μ({ξ_k}) 2^k` for even `k`.
    pub even_scaled: Vec<f64>,
}

impl Remark1Stats {
    /// Odd scaled masses all `3/4`, even ones halving, tail window within `window`.
    pub fn holds(&self, window: f64) -> bool {
        self.total_mass == 1.0
            && self.tail_window_ratio <= window
            && self.odd_scaled.iter().all(|v| *v == 0.75)
            && self.even_scaled.windows(2).all(|w| w[1] == 0.5 * w[0])
    }
}

/// Statistics of the explicit measure truncated to its first `k` atoms.
pub fn remark1_fixture_stats(k: usize) -> Result<Remark1Stats> {
    if k < 6 {
        return Err(Error::Precondition(format!("need K >= 6, got {k}")));
    }
    let m = ExplicitMeasure::new(k);
    let tail_scaled: Vec<(usize, f64)> = (1..=k).map(|n| (n, m.mass_up_to(n) * pow2(n as i32))).collect();
    let tail_window_range = (5, k);
    let window = &tail_scaled[tail_window_range.0 - 1..];
    let hi = window.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = window.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let scaled = |i: usize| m.masses[i - 1] * pow2(i as i32);
    Ok(Remark1Stats {
        k,
        total_mass: m.total_mass(),
        tail_scaled,
        tail_window_range,
        tail_window_ratio: hi / lo,
        odd_scaled: (1..=k).step_by(2).map(scaled).collect(),
        even_scaled: (2..=k).step_by(2).map(scaled).collect(),
    })
}
