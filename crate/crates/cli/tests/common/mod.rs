#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_rational(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// Exact coefficients of `α_n = (9/100) 4^{-n}`, `γ_n = 4^{-n}`, `β₀ = γ₀`.
pub struct ExactFamily {
    pub alpha: Vec<BigRational>,
    pub gamma: Vec<BigRational>,
    pub beta: Vec<BigRational>,
}

impl ExactFamily {
    pub fn new(len: usize) -> Self {
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
        let beta = (0..len).map(|n| &alpha[n] + &gamma[n]).collect();
        ExactFamily { alpha, gamma, beta }
    }

    /// Number of eigenvalues of the leading `n × n` block strictly below `tau`.
    pub fn sturm_count(&self, n: usize, tau: &BigRational) -> usize {
        let mut count = 0;
        let mut prev: Option<BigRational> = None;
        for k in 0..n {
            let mut d = &self.beta[k] - tau;
            if let Some(p) = &prev {
                d -= &self.alpha[k] * &self.gamma[k - 1] / p;
            }
            if d.is_zero() {
                d = -ratio(1, 1_000_000_000_000_000_000);
            }
            if d < BigRational::zero() {
                count += 1;
            }
            prev = Some(d);
        }
        count
    }

    /// True if the `idx`-th eigenvalue (ascending) of the `n × n` block lies
    /// in `[x(1 - rel), x(1 + rel)]`.
    pub fn certifies(&self, n: usize, idx: usize, x: f64, rel: f64) -> bool {
        let below = to_rational(x * (1.0 - rel));
        let above = to_rational(x * (1.0 + rel));
        self.sturm_count(n, &below) <= idx && self.sturm_count(n, &above) > idx
    }

    /// Monomial coefficients of `R_0, …, R_n`.
    pub fn monomial_polys(&self, n: usize) -> Vec<Vec<BigRational>> {
        let mut polys: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
        for k in 0..n {
            let mut next = vec![BigRational::zero(); k + 2];
            for (i, c) in polys[k].iter().enumerate() {
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

    /// `g(n, m, ·)` by expanding `R_n R_m` in monomials and peeling off
    /// `R_k` from the top degree down.
    pub fn linearization(&self, n: usize, m: usize) -> Vec<BigRational> {
        let polys = self.monomial_polys(n + m);
        let mut product = vec![BigRational::zero(); n + m + 1];
        for (i, a) in polys[n].iter().enumerate() {
            for (j, b) in polys[m].iter().enumerate() {
                product[i + j] += a * b;
            }
        }
        let mut g = vec![BigRational::zero(); n + m + 1];
        for k in (0..=n + m).rev() {
            let coef = &product[k] / &polys[k][k];
            for (i, c) in polys[k].iter().enumerate() {
                product[i] -= &coef * c;
            }
            g[k] = coef;
        }
        g
    }
}
