//! Product linearization `R_n R_m = Σ_k g(n, m, k) R_k`.
//!
//! The coefficients are generated by induction on `n` from the three-term
//! recurrence. In floating point this induction amplifies rounding by roughly
//! `h(n)` and loses every digit by `n ≈ 20`, so it is carried out in exact
//! rational arithmetic on the (exact) binary values of `α_n` and `γ_n`; only
//! the final coefficients are rounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::coefficients::RecurrenceCoefficients;
use crate::error::Result;

/// `g(n, m, k)` for `0 <= k <= n + m` (zero outside `|n - m| <= k`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearizationTable {
    pub n: usize,
    pub m: usize,
    pub values: Vec<f64>,
}

impl LinearizationTable {
    pub fn g(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn row_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values[self.n.abs_diff(self.m)..]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coefficient")
}

struct ExactCoefficients {
    alpha: Vec<BigRational>,
    gamma: Vec<BigRational>,
    beta: Vec<BigRational>,
}

impl ExactCoefficients {
    fn new(coeffs: &RecurrenceCoefficients, len: usize) -> Result<Self> {
        coeffs.ensure_index(len)?;
        let alpha: Vec<_> = (0..len).map(|i| rational(coeffs.alpha(i))).collect();
        let gamma: Vec<_> = (0..len).map(|i| rational(coeffs.gamma(i))).collect();
        let beta = (0..len)
            .map(|i| {
                let shift = if i == 0 {
                    rational(coeffs.beta0_shift())
                } else {
                    alpha[i].clone()
                };
                shift + &gamma[i]
            })
            .collect();
        Ok(ExactCoefficients { alpha, gamma, beta })
    }

    /// Coefficients of `x · Σ_j c_j R_j` in the `R` basis.
    fn times_x(&self, c: &[BigRational]) -> Vec<BigRational> {
        let len = c.len() + 1;
        let mut out = vec![BigRational::zero(); len];
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            // x R_j = -γ_j R_{j+1} + β_j R_j - α_j R_{j-1}
            out[j + 1] -= cj * &self.gamma[j];
            out[j] += cj * &self.beta[j];
            if j > 0 {
                out[j - 1] -= cj * &self.alpha[j];
            }
        }
        out
    }
}

/// Exact `g(n, m, ·)` for `n = 0..=n_max` at fixed `m`.
pub fn linearization_exact(coeffs: &RecurrenceCoefficients, n_max: usize, m: usize) -> Result<Vec<Vec<BigRational>>> {
    let exact = ExactCoefficients::new(coeffs, n_max + m + 2)?;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n_max + 1);
    let mut first = vec![BigRational::zero(); m + 1];
    first[m] = BigRational::from_integer(BigInt::from(1));
    rows.push(first);
    for n in 0..n_max {
        // R_{n+1} R_m = (β_n R_n R_m - x R_n R_m - α_n R_{n-1} R_m) / γ_n
        let cur = &rows[n];
        let mut next = exact.times_x(cur);
        for v in next.iter_mut() {
            *v = -&*v;
        }
        for (k, c) in cur.iter().enumerate() {
            next[k] += c * &exact.beta[n];
        }
        if n > 0 {
            for (k, c) in rows[n - 1].iter().enumerate() {
                next[k] -= c * &exact.alpha[n];
            }
        }
        for v in next.iter_mut() {
            *v /= &exact.gamma[n];
        }
        rows.push(next);
    }
    Ok(rows)
}

fn to_table(n: usize, m: usize, row: &[BigRational]) -> LinearizationTable {
    LinearizationTable {
        n,
        m,
        values: row.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
    }
}

/// `g(n, m, ·)` for `n = 0..=n_max` at fixed `m`.
pub fn linearization_rows(coeffs: &RecurrenceCoefficients, n_max: usize, m: usize) -> Result<Vec<LinearizationTable>> {
    Ok(linearization_exact(coeffs, n_max, m)?
        .iter()
        .enumerate()
        .map(|(n, row)| to_table(n, m, row))
        .collect())
}

/// `g(n, m, ·)`.
pub fn linearization(coeffs: &RecurrenceCoefficients, n: usize, m: usize) -> Result<LinearizationTable> {
    let rows = linearization_exact(coeffs, n, m)?;
    Ok(to_table(n, m, &rows[n]))
}
