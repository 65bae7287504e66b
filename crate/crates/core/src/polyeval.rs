//! Evaluation of `R_n` and the orthonormal `p_n = √h(n) R_n`, and of the
//! Dirichlet kernel `K_n(x, y) = Σ_{k≤n} p_k(x) p_k(y)`.
//!
//! Two evaluators are provided. [`eval_r`] runs the recurrence forward and is
//! correct wherever the wanted solution is the dominant one (off the support,
//! and at 0). On the support of the measure the sequence `R_k(ξ)` is the
//! minimal solution, which forward recurrence cannot follow; [`eval_on_support`]
//! computes it as the normalized eigenvector of a truncated Jacobi matrix with
//! a two-sided (twisted) ratio recurrence.

use crate::coefficients::RecurrenceCoefficients;
use crate::error::{Error, Result};
use crate::scaled::ScaledReal;

/// Default relative separation below which the kernel is summed directly.
pub const DEFAULT_THETA: f64 = 1e-6;

/// `R_0(x), …, R_n(x)` and `p_0(x), …, p_n(x)` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySequenceEval {
    pub x: f64,
    pub values_r: Vec<ScaledReal>,
    pub values_p: Vec<ScaledReal>,
}

impl PolySequenceEval {
    fn from_r(coeffs: &RecurrenceCoefficients, x: f64, values_r: Vec<ScaledReal>) -> Self {
        let h = coeffs.h_sequence(values_r.len() - 1);
        let values_p = values_r.iter().zip(&h).map(|(r, h)| *r * h.sqrt()).collect();
        PolySequenceEval { x, values_r, values_p }
    }

    /// Highest degree evaluated.
    pub fn degree(&self) -> usize {
        self.values_r.len() - 1
    }

    pub fn r(&self, k: usize) -> f64 {
        self.values_r[k].to_f64()
    }

    pub fn p(&self, k: usize) -> ScaledReal {
        self.values_p[k]
    }

    /// `Σ_{k≤n} p_k(x)²`.
    pub fn sum_p_squared(&self, n: usize) -> ScaledReal {
        self.values_p[..=n].iter().map(|p| p.square()).sum()
    }
}

fn check_point(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
            range: "finite reals",
        })
    }
}

/// Forward recurrence `R_{k+1} = ((β_k - x) R_k - α_k R_{k-1}) / γ_k`.
///
/// Run in difference form `D_{k+1} = -(x/γ_k) R_k + (α_k/γ_k) D_k`,
/// `R_{k+1} = R_k + D_{k+1}`, which is the same recurrence with `β_k = α_k + γ_k`
/// substituted; it keeps `R_k(0) = 1` exact and avoids cancellation for small `x`.
pub fn eval_r(coeffs: &RecurrenceCoefficients, n: usize, x: f64) -> Result<PolySequenceEval> {
    check_point(x)?;
    coeffs.ensure_index(n)?;
    let xs = ScaledReal::from_f64(x);
    let mut r = Vec::with_capacity(n + 1);
    r.push(ScaledReal::ONE);
    if n >= 1 {
        let gamma0 = ScaledReal::from_f64(coeffs.gamma(0));
        let mut d = (ScaledReal::from_f64(coeffs.beta0_shift()) - xs) / gamma0;
        r.push(ScaledReal::ONE + d);
        for k in 1..n {
            let gamma = ScaledReal::from_f64(coeffs.gamma(k));
            let alpha = ScaledReal::from_f64(coeffs.alpha(k));
            d = -(xs / gamma) * r[k] + (alpha / gamma) * d;
            r.push(r[k] + d);
        }
    }
    Ok(PolySequenceEval::from_r(coeffs, x, r))
}

/// `p_0(x), …, p_n(x)` by forward recurrence.
pub fn eval_p(coeffs: &RecurrenceCoefficients, n: usize, x: f64) -> Result<Vec<ScaledReal>> {
    Ok(eval_r(coeffs, n, x)?.values_p)
}

fn nonzero(v: f64) -> f64 {
    if v == 0.0 {
        f64::MIN_POSITIVE
    } else {
        v
    }
}

/// `R_0, …, R_{m-1}` at an eigenvalue `x` of the `m × m` truncated Jacobi
/// matrix, normalized to `R_0 = 1`.
fn twisted_eigenvector(coeffs: &RecurrenceCoefficients, x: f64, m: usize) -> Vec<ScaledReal> {
    if m == 1 {
        return vec![ScaledReal::ONE];
    }
    // forward: R_j / R_{j-1} = 1 - eps[j]
    let mut eps = vec![0.0; m];
    eps[1] = (x - coeffs.beta0_shift()) / coeffs.gamma(0);
    for j in 1..m - 1 {
        let g = coeffs.gamma(j);
        eps[j + 1] = x / g + (coeffs.alpha(j) / g) * (eps[j] / nonzero(1.0 - eps[j]));
    }
    // backward: t[j] = R_{j+1} / R_j, with R_m = 0
    let mut t = vec![0.0; m];
    t[m - 2] = coeffs.alpha(m - 1) / nonzero(coeffs.beta(m - 1) - x);
    for j in (1..m - 1).rev() {
        t[j - 1] = coeffs.alpha(j) / nonzero(coeffs.beta(j) - x - coeffs.gamma(j) * t[j]);
    }
    // twist where the row residual of the glued vector is smallest
    let mut twist = 0;
    let mut best = f64::INFINITY;
    for r in 0..m {
        let mut g = if r == 0 {
            coeffs.beta(0) - x
        } else {
            coeffs.gamma(r) - x - coeffs.alpha(r) * eps[r] / nonzero(1.0 - eps[r])
        };
        if r + 1 < m {
            g -= coeffs.gamma(r) * t[r];
        }
        let g = g.abs();
        if g < best {
            best = g;
            twist = r;
        }
    }
    let mut v = vec![ScaledReal::ZERO; m];
    v[twist] = ScaledReal::ONE;
    for j in (1..=twist).rev() {
        v[j - 1] = v[j] / ScaledReal::from_f64(nonzero(1.0 - eps[j]));
    }
    for j in twist..m - 1 {
        v[j + 1] = v[j] * ScaledReal::from_f64(t[j]);
    }
    let norm = v[0];
    v.iter().map(|r| *r / norm).collect()
}

/// `R_k(x)` and `p_k(x)` for `k ≤ n` at a point `x` of the support.
///
/// The sequence is the eigenvector of the truncated Jacobi matrix of size
/// `max(n + 1, truncation)`; `x` should be one of its eigenvalues (a converged
/// support point, or a Gauss node of that size).
pub fn eval_on_support(
    coeffs: &RecurrenceCoefficients,
    n: usize,
    x: f64,
    truncation: usize,
) -> Result<PolySequenceEval> {
    check_point(x)?;
    let m = truncation.max(n + 1);
    coeffs.ensure_index(m)?;
    let mut r = twisted_eigenvector(coeffs, x, m);
    r.truncate(n + 1);
    Ok(PolySequenceEval::from_r(coeffs, x, r))
}

/// How a kernel value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelPath {
    Direct,
    ChristoffelDarboux,
}

/// `Σ_{k≤n} p_k(x) p_k(y)`, ascending `k`.
pub fn kernel_direct(ex: &PolySequenceEval, ey: &PolySequenceEval, n: usize) -> ScaledReal {
    let (ex, ey) = canonical(ex, ey);
    (0..=n).map(|k| ex.values_p[k] * ey.values_p[k]).sum()
}

/// `Σ_{k≤n} |p_k(x) p_k(y)|`, the natural scale of the kernel sum.
pub fn kernel_scale(ex: &PolySequenceEval, ey: &PolySequenceEval, n: usize) -> ScaledReal {
    (0..=n).map(|k| (ex.values_p[k] * ey.values_p[k]).abs()).sum()
}

/// Christoffel–Darboux form `λ_n (p_n(x) p_{n+1}(y) - p_{n+1}(x) p_n(y)) / (x - y)`.
///
/// Needs both evaluations to reach degree `n + 1` and `x ≠ y`.
pub fn kernel_christoffel_darboux(
    coeffs: &RecurrenceCoefficients,
    ex: &PolySequenceEval,
    ey: &PolySequenceEval,
    n: usize,
) -> ScaledReal {
    let (ex, ey) = canonical(ex, ey);
    let cross = ex.values_p[n] * ey.values_p[n + 1] - ex.values_p[n + 1] * ey.values_p[n];
    cross * ScaledReal::from_f64(coeffs.lambda(n)) / ScaledReal::from_f64(ex.x - ey.x)
}

/// Kernel with the direct/Christoffel–Darboux switch: direct when
/// `|x - y| <= theta * max(|x|, |y|, 1)` or when the evaluations stop at degree `n`.
pub fn kernel_from_evals(
    coeffs: &RecurrenceCoefficients,
    ex: &PolySequenceEval,
    ey: &PolySequenceEval,
    n: usize,
    theta: f64,
) -> (ScaledReal, KernelPath) {
    let sep = (ex.x - ey.x).abs();
    let scale = ex.x.abs().max(ey.x.abs()).max(1.0);
    let has_next = ex.degree() > n && ey.degree() > n;
    if sep <= theta * scale || !has_next {
        (kernel_direct(ex, ey, n), KernelPath::Direct)
    } else {
        (
            kernel_christoffel_darboux(coeffs, ex, ey, n),
            KernelPath::ChristoffelDarboux,
        )
    }
}

/// `K_n(x, y)` at arbitrary points, using forward evaluation.
pub fn dirichlet_kernel(coeffs: &RecurrenceCoefficients, n: usize, x: f64, y: f64) -> Result<f64> {
    let ex = eval_r(coeffs, n + 1, x)?;
    let ey = eval_r(coeffs, n + 1, y)?;
    Ok(kernel_from_evals(coeffs, &ex, &ey, n, DEFAULT_THETA).0.to_f64())
}

fn canonical<'a>(ex: &'a PolySequenceEval, ey: &'a PolySequenceEval) -> (&'a PolySequenceEval, &'a PolySequenceEval) {
    if ey.x < ex.x {
        (ey, ex)
    } else {
        (ex, ey)
    }
}
