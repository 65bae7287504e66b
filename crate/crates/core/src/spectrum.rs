//! Zeros of `p_N`, Gauss quadrature and reconstruction of the orthogonality
//! measure from truncated Jacobi matrices.
//!
//! Eigenvalues are computed by bisection on the inertia of `J_N - τI`, where
//! the inertia comes from a shifted `LDLᵀ` factorization derived from the
//! bidiagonal factor `J_N = UᵀU`. Every quantity in that factorization is
//! formed without subtraction, so eigenvalues of size `q^N` keep full relative
//! accuracy even though they sit far below `ε‖J‖`.

use serde::{Deserialize, Serialize};

use crate::coefficients::{Beta0Mode, RecurrenceCoefficients};
use crate::error::{Error, Result};
use crate::polyeval::eval_on_support;
use crate::scaled::ScaledReal;

/// Default largest truncation tried by [`support_points`] and [`measure`].
pub const DEFAULT_N_MAX: usize = 400;
/// Default stabilization tolerance between successive truncations.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Christoffel and eigenvector weights must agree to this relative tolerance.
const WEIGHT_AGREEMENT: f64 = 1e-6;
/// Eigenvector weights below this are underflow-dominated and not compared.
const WEIGHT_CHECK_FLOOR: f64 = 1e-280;

/// Leading `N × N` block of the Jacobi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedJacobi {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TruncatedJacobi {
    pub fn new(coeffs: &RecurrenceCoefficients, n: usize) -> Result<Self> {
        check_size(n)?;
        coeffs.ensure_index(n)?;
        Ok(TruncatedJacobi {
            diag: (0..n).map(|i| coeffs.beta(i)).collect(),
            offdiag: (0..n - 1).map(|i| coeffs.lambda(i)).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `y = J x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Upper bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_upper(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
                self.diag[i] + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Upper bidiagonal `U` with `diag` on the diagonal and `superdiag` above it.
#[derive(Clone, Debug, PartialEq)]
pub struct BidiagonalFactor {
    pub diag: Vec<f64>,
    pub superdiag: Vec<f64>,
}

impl BidiagonalFactor {
    /// The factor `S` with diagonal `√γ_i` and superdiagonal `√α_{i+1}`.
    ///
    /// `SᵀS = J_N` in the default mode; with `β₀ = α₀⁺ + γ₀` the `(0,0)` entry
    /// differs by `α₀⁺`.
    pub fn from_coefficients(coeffs: &RecurrenceCoefficients, n: usize) -> Result<Self> {
        check_size(n)?;
        coeffs.ensure_index(n)?;
        Ok(BidiagonalFactor {
            diag: (0..n).map(|i| coeffs.gamma(i).sqrt()).collect(),
            superdiag: (1..n).map(|i| coeffs.alpha(i).sqrt()).collect(),
        })
    }

    /// Exact Cholesky factor `UᵀU = J_N` in either `β₀` mode.
    ///
    /// Pivots follow `d_i = γ_i + e_i`, `e_0 = β₀ - γ₀`,
    /// `e_i = α_i e_{i-1} / d_{i-1}`; in the default mode this is `S` itself.
    pub fn cholesky(coeffs: &RecurrenceCoefficients, n: usize) -> Result<Self> {
        let pivots = cholesky_pivots(coeffs, n)?;
        Ok(BidiagonalFactor {
            diag: pivots.iter().map(|d| d.sqrt()).collect(),
            superdiag: (0..n - 1)
                .map(|i| (coeffs.alpha(i + 1) * (coeffs.gamma(i) / pivots[i])).sqrt())
                .collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `UᵀU` assembled as a tridiagonal matrix.
    pub fn gram(&self) -> TruncatedJacobi {
        let n = self.size();
        TruncatedJacobi {
            diag: (0..n)
                .map(|i| {
                    let above = if i > 0 { self.superdiag[i - 1].powi(2) } else { 0.0 };
                    self.diag[i].powi(2) + above
                })
                .collect(),
            offdiag: (0..n - 1).map(|i| self.diag[i] * self.superdiag[i]).collect(),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            name: "N",
            value: 0.0,
            range: "N >= 1",
        });
    }
    Ok(())
}

fn cholesky_pivots(coeffs: &RecurrenceCoefficients, n: usize) -> Result<Vec<f64>> {
    check_size(n)?;
    coeffs.ensure_index(n)?;
    let mut d = Vec::with_capacity(n);
    let mut e = coeffs.beta0_shift();
    for i in 0..n {
        if i > 0 {
            e = coeffs.alpha(i) * (e / d[i - 1]);
        }
        d.push(coeffs.gamma(i) + e);
    }
    Ok(d)
}

/// `J_N = L D Lᵀ` with unit lower bidiagonal `L`, stored as pivots and multipliers.
struct Ldl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl Ldl {
    fn new(coeffs: &RecurrenceCoefficients, n: usize) -> Result<Self> {
        let d = cholesky_pivots(coeffs, n)?;
        let l = (0..n - 1).map(|i| coeffs.lambda(i) / d[i]).collect();
        Ok(Ldl { d, l })
    }

    /// Number of eigenvalues strictly below `tau` (stationary qd transform).
    fn negcount(&self, tau: f64) -> usize {
        let n = self.d.len();
        let mut count = 0;
        let mut s = -tau;
        for i in 0..n - 1 {
            let mut dplus = self.d[i] + s;
            if dplus == 0.0 {
                dplus = -(f64::EPSILON * self.d[i]).max(f64::MIN_POSITIVE);
            }
            if dplus < 0.0 {
                count += 1;
            }
            let lplus = self.d[i] * self.l[i] / dplus;
            s = lplus * self.l[i] * s - tau;
        }
        if self.d[n - 1] + s < 0.0 {
            count += 1;
        }
        count
    }

    /// Eigenvalue with ascending index `idx`, given `hi` above it.
    fn eigenvalue(&self, idx: usize, mut hi: f64) -> f64 {
        // walk down geometrically to a lower bracket
        let mut lo = hi;
        loop {
            lo /= 16.0;
            if lo < f64::MIN_POSITIVE {
                lo = 0.0;
                break;
            }
            if self.negcount(lo) > idx {
                hi = lo;
            } else {
                break;
            }
        }
        loop {
            let mid = if lo > 0.0 && hi > 2.0 * lo {
                lo.sqrt() * hi.sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.negcount(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The `count` largest eigenvalues of `J_N`, in decreasing order.
fn top_eigenvalues(coeffs: &RecurrenceCoefficients, n: usize, count: usize) -> Result<Vec<f64>> {
    let count = count.min(n);
    if n == 1 {
        return Ok(vec![coeffs.beta(0)]);
    }
    let ldl = Ldl::new(coeffs, n)?;
    let upper = TruncatedJacobi::new(coeffs, n)?.gershgorin_upper() * (1.0 + 4.0 * f64::EPSILON);
    let mut out = Vec::with_capacity(count);
    let mut hi = upper;
    for idx in (n - count..n).rev() {
        if ldl.negcount(hi) <= idx {
            hi = upper;
        }
        let v = ldl.eigenvalue(idx, hi);
        out.push(v);
        hi = v;
    }
    Ok(out)
}

/// All zeros of `p_N` (eigenvalues of `J_N`), ascending.
pub fn truncated_zeros(coeffs: &RecurrenceCoefficients, n: usize) -> Result<Vec<f64>> {
    check_size(n)?;
    let mut z = top_eigenvalues(coeffs, n, n)?;
    z.reverse();
    Ok(z)
}

/// Gauss rule with nodes at the zeros of `p_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// Ascending nodes `x_{N,1} < … < x_{N,N}`.
    pub nodes: Vec<f64>,
    /// Christoffel numbers `(Σ_{j<N} p_j(x)²)⁻¹`.
    pub weights: Vec<f64>,
    /// Squared first eigenvector components by inverse iteration, the
    /// independent cross-check.
    pub eigenvector_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_i x_i^m`, ascending node order.
    pub fn moment(&self, m: u32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(m as i32))
            .sum()
    }

    /// Largest relative disagreement between the two weight formulas over
    /// nodes where the eigenvector weight is representable.
    pub fn max_weight_discrepancy(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.eigenvector_weights)
            .filter(|(_, e)| **e >= WEIGHT_CHECK_FLOOR)
            .map(|(w, e)| (w - e).abs() / w.max(*e))
            .fold(0.0, f64::max)
    }
}

/// Christoffel number of `J_N` at its eigenvalue `x`.
fn christoffel_weight(coeffs: &RecurrenceCoefficients, x: f64, n: usize) -> Result<ScaledReal> {
    let e = eval_on_support(coeffs, n - 1, x, n)?;
    Ok(e.sum_p_squared(n - 1).recip())
}

impl Ldl {
    /// Squared first component of the unit eigenvector for eigenvalue `sigma`,
    /// by two steps of inverse iteration on the shifted factorization
    /// `LDLᵀ - σI = L⁺D⁺L⁺ᵀ`, which keeps relative accuracy for tiny `sigma`
    /// where elimination on the assembled `J - σI` does not.
    fn eigenvector_weight(&self, sigma: f64) -> f64 {
        let n = self.d.len();
        if n == 1 {
            return 1.0;
        }
        let mut dplus = vec![0.0; n];
        let mut lplus = vec![0.0; n - 1];
        let mut s = -sigma;
        for i in 0..n - 1 {
            dplus[i] = self.d[i] + s;
            if dplus[i] == 0.0 {
                dplus[i] = -(f64::EPSILON * self.d[i]).max(f64::MIN_POSITIVE);
            }
            lplus[i] = self.d[i] * self.l[i] / dplus[i];
            s = lplus[i] * self.l[i] * s - sigma;
        }
        dplus[n - 1] = self.d[n - 1] + s;
        if dplus[n - 1] == 0.0 {
            dplus[n - 1] = f64::EPSILON * self.d[n - 1];
        }
        let mut v = vec![1.0; n];
        for _ in 0..2 {
            for i in 0..n - 1 {
                v[i + 1] -= lplus[i] * v[i];
            }
            for i in 0..n {
                v[i] /= dplus[i];
            }
            for i in (0..n - 1).rev() {
                v[i] -= lplus[i] * v[i + 1];
            }
            let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            v.iter_mut().for_each(|x| *x /= max);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v[0] * v[0]
    }
}

fn checked_weight(coeffs: &RecurrenceCoefficients, ldl: &Ldl, x: f64, index: usize) -> Result<(f64, f64)> {
    let n = ldl.d.len();
    let w = christoffel_weight(coeffs, x, n)?.to_f64();
    let e = ldl.eigenvector_weight(x);
    if e >= WEIGHT_CHECK_FLOOR {
        let discrepancy = (w - e).abs() / w.max(e);
        if !(discrepancy <= WEIGHT_AGREEMENT) {
            return Err(Error::NumericalConsistency {
                size: n,
                index,
                discrepancy,
            });
        }
    }
    Ok((w, e))
}

/// Gauss quadrature of size `N` with cross-checked weights.
pub fn quadrature(coeffs: &RecurrenceCoefficients, n: usize) -> Result<QuadratureRule> {
    let nodes = truncated_zeros(coeffs, n)?;
    let ldl = Ldl::new(coeffs, n)?;
    let mut weights = Vec::with_capacity(n);
    let mut eigenvector_weights = Vec::with_capacity(n);
    for (i, &x) in nodes.iter().enumerate() {
        let (w, e) = checked_weight(coeffs, &ldl, x, i + 1)?;
        weights.push(w);
        eigenvector_weights.push(e);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        eigenvector_weights,
    })
}

/// Top of the spectrum at one truncation: decreasing nodes and, optionally,
/// their Christoffel numbers.
fn top_of(coeffs: &RecurrenceCoefficients, n: usize, k: usize, with_weights: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = top_eigenvalues(coeffs, n, k)?;
    let weights = if with_weights {
        nodes
            .iter()
            .map(|&x| christoffel_weight(coeffs, x, n).map(ScaledReal::to_f64))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok((nodes, weights))
}

fn max_rel_change(prev: &[f64], cur: &[f64], worst: &mut (usize, f64)) {
    for (i, (a, b)) in prev.iter().zip(cur).enumerate() {
        let change = if a == b { 0.0 } else { (a - b).abs() / b.abs() };
        if !(change <= worst.1) {
            *worst = (i + 1, change);
        }
    }
}

/// Grows `N` until the top `k` eigenvalues (and weights) stabilize.
fn stabilize(
    coeffs: &RecurrenceCoefficients,
    k: usize,
    rel_tol: f64,
    n_max: usize,
    with_weights: bool,
) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(Error::Domain {
            name: "K",
            value: 0.0,
            range: "K >= 1",
        });
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Domain {
            name: "rel_tol",
            value: rel_tol,
            range: "(0, inf)",
        });
    }
    let mut n = k.max(2);
    if n > n_max {
        return Err(Error::Convergence {
            k,
            n_max,
            worst_index: k,
            change: f64::INFINITY,
        });
    }
    let mut prev = top_of(coeffs, n, k, with_weights)?;
    loop {
        let mut next = (2 * n).max(n + k);
        if next > n_max {
            if n >= n_max {
                let cur = top_of(coeffs, n, k, with_weights)?;
                let mut worst = (0, 0.0);
                max_rel_change(&prev.0, &cur.0, &mut worst);
                return Err(Error::Convergence {
                    k,
                    n_max,
                    worst_index: worst.0,
                    change: worst.1,
                });
            }
            next = n_max;
        }
        let cur = top_of(coeffs, next, k, with_weights)?;
        let mut worst = (0, 0.0);
        max_rel_change(&prev.0, &cur.0, &mut worst);
        max_rel_change(&prev.1, &cur.1, &mut worst);
        if worst.1 <= rel_tol {
            return Ok((next, cur.0, cur.1));
        }
        if next >= n_max {
            return Err(Error::Convergence {
                k,
                n_max,
                worst_index: worst.0,
                change: worst.1,
            });
        }
        prev = cur;
        n = next;
    }
}

/// The `k` largest support points `ξ_1 > … > ξ_k` and the truncation used.
pub fn support_points(coeffs: &RecurrenceCoefficients, k: usize, rel_tol: f64) -> Result<(Vec<f64>, usize)> {
    support_points_with_limit(coeffs, k, rel_tol, DEFAULT_N_MAX)
}

pub fn support_points_with_limit(
    coeffs: &RecurrenceCoefficients,
    k: usize,
    rel_tol: f64,
    n_max: usize,
) -> Result<(Vec<f64>, usize)> {
    let (n, nodes, _) = stabilize(coeffs, k, rel_tol, n_max, false)?;
    Ok((nodes, n))
}

/// Top of the orthogonality measure: `k` support points with their masses,
/// plus a bound on the mass left in `[0, ξ_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    /// Decreasing support points `ξ_1 > ξ_2 > …`.
    pub support: Vec<f64>,
    pub masses: Vec<f64>,
    /// Mass of the unresolved part of the support, below `ξ_K`.
    pub tail_bound: f64,
    pub truncation_size: usize,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `ξ_n`, 1-based.
    pub fn xi(&self, n: usize) -> f64 {
        self.support[n - 1]
    }

    /// `μ([0, ξ_n])` for `1 <= n <= K`, summed from the small end.
    pub fn mass_up_to(&self, n: usize) -> f64 {
        self.masses[n - 1..]
            .iter()
            .rev()
            .fold(self.tail_bound, |acc, m| acc + m)
    }

    /// `μ([0, x))`: resolved masses below `x` plus the whole tail.
    pub fn mass_below(&self, x: f64) -> f64 {
        self.support
            .iter()
            .zip(&self.masses)
            .rev()
            .filter(|(xi, _)| **xi < x)
            .fold(self.tail_bound, |acc, (_, m)| acc + m)
    }

    /// Resolved masses plus tail; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.mass_up_to(1)
    }

    /// `Σ ξ_k^m μ({ξ_k})`, ascending in `ξ`.
    pub fn moment(&self, m: u32) -> f64 {
        self.support
            .iter()
            .zip(&self.masses)
            .rev()
            .map(|(x, w)| w * x.powi(m as i32))
            .sum()
    }
}

/// Reconstructs the top `k` atoms of the orthogonality measure.
pub fn measure(coeffs: &RecurrenceCoefficients, k: usize, rel_tol: f64) -> Result<DiscreteMeasure> {
    measure_with_limit(coeffs, k, rel_tol, DEFAULT_N_MAX)
}

pub fn measure_with_limit(
    coeffs: &RecurrenceCoefficients,
    k: usize,
    rel_tol: f64,
    n_max: usize,
) -> Result<DiscreteMeasure> {
    let (n, support, _) = stabilize(coeffs, k, rel_tol, n_max, true)?;
    // all nodes of the final truncation; the ones below the top k make up the tail
    let nodes = top_eigenvalues(coeffs, n, n)?;
    let ldl = Ldl::new(coeffs, n)?;
    let mut weights = Vec::with_capacity(n);
    for (i, &x) in nodes.iter().enumerate() {
        weights.push(checked_weight(coeffs, &ldl, x, n - i)?.0);
    }
    let tail_bound = weights[k..].iter().rev().sum();
    weights.truncate(k);
    Ok(DiscreteMeasure {
        support,
        masses: weights,
        tail_bound,
        truncation_size: n,
    })
}

/// `(J_N^m)_{00}`, the `m`-th moment of the orthogonality measure.
pub fn moment(coeffs: &RecurrenceCoefficients, m: usize, n: usize) -> Result<f64> {
    if n < m + 2 {
        return Err(Error::Precondition(format!(
            "moment of order {m} needs N >= {}, got {n}",
            m + 2
        )));
    }
    let jacobi = TruncatedJacobi::new(coeffs, n)?;
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    for _ in 0..m {
        v = jacobi.apply(&v);
    }
    Ok(v[0])
}

/// Largest `d` with `ξ_j - ξ_{j+1} >= d ξ_{j+1}` over consecutive points of a
/// decreasing sequence.
pub fn separation_constant(support: &[f64]) -> f64 {
    support
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[1])
        .fold(f64::INFINITY, f64::min)
}

/// Whether the factored path reproduces `J_N` exactly (default mode) or up to
/// the rank-one `(0,0)` correction.
pub fn factor_is_exact(coeffs: &RecurrenceCoefficients) -> bool {
    coeffs.beta0_mode() == Beta0Mode::GammaOnly
}
