#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qmeasure::{Beta0Mode, RecurrenceCoefficients};

pub fn example() -> RecurrenceCoefficients {
    RecurrenceCoefficients::example_family(0.3, 0.25, Beta0Mode::GammaOnly).unwrap()
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact coefficients of the family `α_n = (9/100) 4^{-n}`, `γ_n = 4^{-n}`.
pub struct ExactFamily {
    pub alpha: Vec<BigRational>,
    pub gamma: Vec<BigRational>,
    pub beta: Vec<BigRational>,
}

impl ExactFamily {
    pub fn new(len: usize, alpha_plus_gamma_beta0: bool) -> Self {
        let a2 = ratio(9, 100);
        let q = ratio(1, 4);
        let mut alpha = Vec::new();
        let mut gamma = Vec::new();
        let mut qn = BigRational::one();
        for n in 0..len {
            alpha.push(if n == 0 { BigRational::zero() } else { &a2 * &qn });
            gamma.push(qn.clone());
            qn = &qn * &q;
        }
        let beta = (0..len)
            .map(|n| {
                if n == 0 {
                    if alpha_plus_gamma_beta0 {
                        &a2 + &gamma[0]
                    } else {
                        gamma[0].clone()
                    }
                } else {
                    &alpha[n] + &gamma[n]
                }
            })
            .collect();
        ExactFamily { alpha, gamma, beta }
    }

    /// Number of eigenvalues of the leading `n × n` block strictly below `tau`.
    pub fn sturm_count(&self, n: usize, tau: &BigRational) -> usize {
        let mut count = 0;
        let mut prev: Option<BigRational> = None;
        for k in 0..n {
            let mut d = &self.beta[k] - tau;
            if let Some(p) = &prev {
                let lambda2 = &self.alpha[k] * &self.gamma[k - 1];
                d -= lambda2 / p;
            }
            if d.is_zero() {
                // tau is an eigenvalue of a leading block; nudge to the negative side
                d = -ratio(1, 1_000_000_000_000_000_000);
            }
            if d < BigRational::zero() {
                count += 1;
            }
            prev = Some(d);
        }
        count
    }

    /// Monomial coefficients of `R_0, …, R_n` (ascending powers of `x`).
    pub fn monomial_polys(&self, n: usize) -> Vec<Vec<BigRational>> {
        let mut polys: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
        for k in 0..n {
            // R_{k+1} = ((β_k - x) R_k - α_k R_{k-1}) / γ_k
            let cur = &polys[k];
            let mut next = vec![BigRational::zero(); k + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i] += c * &self.beta[k];
                next[i + 1] -= c.clone();
            }
            if k > 0 {
                for (i, c) in polys[k - 1].iter().enumerate() {
                    next[i] -= c * &self.alpha[k];
                }
            }
            for v in next.iter_mut() {
                *v /= &self.gamma[k];
            }
            polys.push(next);
        }
        polys
    }
}

pub fn to_rational(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}
