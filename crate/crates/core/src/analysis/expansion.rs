//! Fourier expansions, Dirichlet-kernel integrals and Lebesgue constants over
//! a reconstructed measure.
//!
//! Every integral is a finite sum over the resolved atoms plus an explicit
//! remainder for the unresolved mass below `ξ_K`, bounded with `|R_k| <= 1` on
//! the support.

use serde::Serialize;

use crate::coefficients::RecurrenceCoefficients;
use crate::error::{Error, Result};
use crate::polyeval::{eval_on_support, eval_r, kernel_from_evals, PolySequenceEval, DEFAULT_THETA};
use crate::scaled::ScaledReal;
use crate::spectrum::DiscreteMeasure;

/// Default bound on any tail remainder before a precision error is raised.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;

/// Kernel evaluation route used inside Lebesgue-function sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelChoice {
    /// Christoffel–Darboux unless the points are closer than `theta`.
    Switched(f64),
    /// Always the direct sum.
    Direct,
}

impl Default for KernelChoice {
    fn default() -> Self {
        KernelChoice::Switched(DEFAULT_THETA)
    }
}

/// `a_k(f)` with the bound on the contribution of the unresolved tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierCoefficient {
    pub value: f64,
    pub remainder: f64,
}

/// Coefficients and values of a partial sum `s_n(f, ·)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionResult {
    pub degree: usize,
    /// `a_0(f), …, a_n(f)`.
    pub coefficients: Vec<f64>,
    pub points: Vec<f64>,
    /// `s_n(f, x)` at each point.
    pub values: Vec<f64>,
    /// `f(x)` at each point.
    pub targets: Vec<f64>,
    pub sup_error: f64,
    /// Bound on `|a_k(f)|` error from the tail, for every `k`.
    pub coefficient_remainder: f64,
    /// Bound on the resulting error in any `s_n(f, x)`.
    pub value_remainder: f64,
}

/// `Λ_n(x)` split into the resolved sum and the tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LebesgueValue {
    pub x: f64,
    pub head: f64,
    pub tail_term: f64,
    pub value: f64,
}

/// `R_k` and `p_k` up to a fixed degree at `0` and at every resolved support
/// point, shared by all expansion and kernel computations.
///
/// Point index `0` is `x = 0`; index `j >= 1` is `ξ_j`.
pub struct SupportBasis<'a> {
    coeffs: &'a RecurrenceCoefficients,
    measure: &'a DiscreteMeasure,
    points: Vec<PolySequenceEval>,
    h: Vec<ScaledReal>,
    tolerance: f64,
}

impl<'a> SupportBasis<'a> {
    pub fn new(coeffs: &'a RecurrenceCoefficients, measure: &'a DiscreteMeasure, degree: usize) -> Result<Self> {
        let mut points = Vec::with_capacity(measure.len() + 1);
        points.push(eval_r(coeffs, degree, 0.0)?);
        for &xi in &measure.support {
            points.push(eval_on_support(coeffs, degree, xi, measure.truncation_size)?);
        }
        Ok(SupportBasis {
            coeffs,
            measure,
            points,
            h: coeffs.h_sequence(degree),
            tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    /// Largest tail remainder accepted before a precision error.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn degree(&self) -> usize {
        self.h.len() - 1
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        self.measure
    }

    /// Number of evaluation points, `K + 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        self.points[j].x
    }

    pub fn eval(&self, j: usize) -> &PolySequenceEval {
        &self.points[j]
    }

    /// Index of `x` among `{0} ∪ support`, by exact match.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.points.iter().position(|e| e.x == x)
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.degree() {
            return Err(Error::Precondition(format!(
                "degree {n} exceeds the precomputed degree {}",
                self.degree()
            )));
        }
        Ok(())
    }

    fn check_remainder(&self, remainder: f64) -> Result<()> {
        if remainder > self.tolerance {
            return Err(Error::Precision {
                remainder,
                tolerance: self.tolerance,
            });
        }
        Ok(())
    }

    /// `a_k(f) = Σ_j f(ξ_j) R_k(ξ_j) μ({ξ_j})`, ascending `j`; `values` are
    /// indexed like the basis points.
    fn raw_coefficient(&self, values: &[f64], k: usize) -> f64 {
        values[1..]
            .iter()
            .zip(&self.measure.masses)
            .zip(&self.points[1..])
            .map(|((f, m), e)| f * e.r(k) * m)
            .sum()
    }

    /// `f` sampled at every basis point.
    pub fn values_of(&self, f: &dyn Fn(f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|e| f(e.x)).collect()
    }

    /// `R_m` at every basis point, from the stable evaluation.
    pub fn r_values(&self, m: usize) -> Vec<f64> {
        self.points.iter().map(|e| e.r(m)).collect()
    }

    fn sup_abs(values: &[f64]) -> f64 {
        values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn fourier_coefficient(&self, f: &dyn Fn(f64) -> f64, k: usize) -> Result<FourierCoefficient> {
        self.coefficient_of_values(&self.values_of(f), k)
    }

    /// `a_k` of the function with the given samples.
    pub fn coefficient_of_values(&self, values: &[f64], k: usize) -> Result<FourierCoefficient> {
        self.check_degree(k)?;
        let remainder = Self::sup_abs(values) * self.measure.tail_bound;
        self.check_remainder(remainder)?;
        Ok(FourierCoefficient {
            value: self.raw_coefficient(values, k),
            remainder,
        })
    }

    /// `s_n(f, x) = Σ_{k≤n} a_k(f) R_k(x) h(k)` at every point of `{0} ∪ support`.
    pub fn partial_sum(&self, f: &dyn Fn(f64) -> f64, n: usize) -> Result<ExpansionResult> {
        self.expand(&self.values_of(f), n)
    }

    /// Partial sum of the function with the given samples, at every basis point.
    pub fn expand(&self, values: &[f64], n: usize) -> Result<ExpansionResult> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.expand_at(values, n, &all)
    }

    /// As [`expand`](Self::expand), reported only at the given point indices.
    pub fn expand_at(&self, values: &[f64], n: usize, indices: &[usize]) -> Result<ExpansionResult> {
        self.check_degree(n)?;
        let coefficient_remainder = Self::sup_abs(values) * self.measure.tail_bound;
        let h_sum: ScaledReal = self.h[..=n].iter().copied().sum();
        let value_remainder = (ScaledReal::from_f64(coefficient_remainder) * h_sum).to_f64();
        self.check_remainder(value_remainder)?;
        let coefficients: Vec<f64> = (0..=n).map(|k| self.raw_coefficient(values, k)).collect();
        let scaled: Vec<ScaledReal> = coefficients
            .iter()
            .zip(&self.h)
            .map(|(a, h)| ScaledReal::from_f64(*a) * *h)
            .collect();
        let mut points = Vec::with_capacity(indices.len());
        let mut sums = Vec::with_capacity(indices.len());
        let mut targets = Vec::with_capacity(indices.len());
        let mut sup_error: f64 = 0.0;
        for &j in indices {
            let e = &self.points[j];
            let s: ScaledReal = scaled.iter().zip(&e.values_r).map(|(c, r)| *c * *r).sum();
            let s = s.to_f64();
            sup_error = sup_error.max((s - values[j]).abs());
            points.push(e.x);
            sums.push(s);
            targets.push(values[j]);
        }
        Ok(ExpansionResult {
            degree: n,
            coefficients,
            points,
            values: sums,
            targets,
            sup_error,
            coefficient_remainder,
            value_remainder,
        })
    }

    /// `sup_error` of `s_n(f)` for each requested degree.
    pub fn sup_errors(&self, f: &dyn Fn(f64) -> f64, degrees: &[usize]) -> Result<Vec<f64>> {
        degrees.iter().map(|&n| Ok(self.partial_sum(f, n)?.sup_error)).collect()
    }

    /// `Σ_{k≤n} a_k(f)² h(k)` and its bound `Σ_j f(ξ_j)² μ({ξ_j}) + |f|²_∞ tail`.
    pub fn parseval(&self, f: &dyn Fn(f64) -> f64, n: usize) -> Result<(f64, f64)> {
        self.check_degree(n)?;
        let values = self.values_of(f);
        let lhs: ScaledReal = (0..=n)
            .map(|k| ScaledReal::from_f64(self.raw_coefficient(&values, k)).square() * self.h[k])
            .sum();
        let sup = Self::sup_abs(&values);
        let rhs = values[1..]
            .iter()
            .zip(&self.measure.masses)
            .map(|(f, m)| f * f * m)
            .sum::<f64>()
            + sup * sup * self.measure.tail_bound;
        Ok((lhs.to_f64(), rhs))
    }

    /// `K_n(x_i, x_j)` between two basis points.
    pub fn kernel(&self, n: usize, i: usize, j: usize, choice: KernelChoice) -> f64 {
        let (ei, ej) = (&self.points[i], &self.points[j]);
        match choice {
            KernelChoice::Switched(theta) => kernel_from_evals(self.coeffs, ei, ej, n, theta).0,
            KernelChoice::Direct => crate::polyeval::kernel_direct(ei, ej, n),
        }
        .to_f64()
    }

    /// `Λ_n(x) = Σ_j |K_n(x, ξ_j)| μ({ξ_j}) + tail · Σ_{k≤n} p_k(0)²` at point index `i`.
    pub fn lebesgue_function(&self, n: usize, i: usize, choice: KernelChoice) -> Result<LebesgueValue> {
        self.check_degree(n)?;
        let head: f64 = self
            .measure
            .masses
            .iter()
            .enumerate()
            .map(|(j, m)| self.kernel(n, i, j + 1, choice).abs() * m)
            .sum();
        let k00 = self.points[0].sum_p_squared(n);
        let tail_term = (ScaledReal::from_f64(self.measure.tail_bound) * k00).to_f64();
        self.check_remainder(tail_term)?;
        Ok(LebesgueValue {
            x: self.points[i].x,
            head,
            tail_term,
            value: head + tail_term,
        })
    }

    /// `max Λ_n` over `{0} ∪ support`.
    pub fn lebesgue_constant(&self, n: usize, choice: KernelChoice) -> Result<f64> {
        let mut best: f64 = 0.0;
        for i in 0..self.len() {
            best = best.max(self.lebesgue_function(n, i, choice)?.value);
        }
        Ok(best)
    }

    /// Lebesgue constants for `n = 0..=n_max`.
    pub fn lebesgue_constants(&self, n_max: usize, choice: KernelChoice) -> Result<Vec<f64>> {
        (0..=n_max).map(|n| self.lebesgue_constant(n, choice)).collect()
    }
}

/// `a_k(f)` over a reconstructed measure.
pub fn fourier_coefficient(
    measure: &DiscreteMeasure,
    coeffs: &RecurrenceCoefficients,
    f: &dyn Fn(f64) -> f64,
    k: usize,
) -> Result<FourierCoefficient> {
    SupportBasis::new(coeffs, measure, k)?.fourier_coefficient(f, k)
}

/// `s_n(f, x)` at points drawn from `{0} ∪ support`.
pub fn partial_sum(
    measure: &DiscreteMeasure,
    coeffs: &RecurrenceCoefficients,
    f: &dyn Fn(f64) -> f64,
    n: usize,
    points: &[f64],
) -> Result<ExpansionResult> {
    let basis = SupportBasis::new(coeffs, measure, n)?;
    let indices = points
        .iter()
        .map(|&x| {
            basis
                .index_of(x)
                .ok_or_else(|| Error::Precondition(format!("{x} is neither 0 nor a computed support point")))
        })
        .collect::<Result<Vec<_>>>()?;
    basis.expand_at(&basis.values_of(f), n, &indices)
}

/// `Λ_n(x)` for `x` in `{0} ∪ support`.
pub fn lebesgue_function(measure: &DiscreteMeasure, coeffs: &RecurrenceCoefficients, n: usize, x: f64) -> Result<f64> {
    let basis = SupportBasis::new(coeffs, measure, n + 1)?;
    let i = basis
        .index_of(x)
        .ok_or_else(|| Error::Precondition(format!("{x} is neither 0 nor a computed support point")))?;
    Ok(basis.lebesgue_function(n, i, KernelChoice::default())?.value)
}

/// `sup Λ_n` over `{0} ∪ support`.
pub fn lebesgue_constant(measure: &DiscreteMeasure, coeffs: &RecurrenceCoefficients, n: usize) -> Result<f64> {
    SupportBasis::new(coeffs, measure, n + 1)?.lebesgue_constant(n, KernelChoice::default())
}

/// Fixed continuous test functions on the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `√y`
    Sqrt,
    /// `|y - ξ_5|`
    AbsXi5,
    /// `1 / (1 + y)`
    InvOnePlus,
    /// `y^{3/2}`
    PowThreeHalves,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [
        TestFunction::Sqrt,
        TestFunction::AbsXi5,
        TestFunction::InvOnePlus,
        TestFunction::PowThreeHalves,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Sqrt => "sqrt",
            TestFunction::AbsXi5 => "abs-xi5",
            TestFunction::InvOnePlus => "inv-one-plus",
            TestFunction::PowThreeHalves => "pow-three-halves",
        }
    }

    /// The function, with `ξ_5` taken from `measure` (or `0` if it has fewer points).
    pub fn bind(self, measure: &DiscreteMeasure) -> Box<dyn Fn(f64) -> f64> {
        match self {
            TestFunction::Sqrt => Box::new(f64::sqrt),
            TestFunction::AbsXi5 => {
                let xi5 = measure.support.get(4).copied().unwrap_or(0.0);
                Box::new(move |y| (y - xi5).abs())
            }
            TestFunction::InvOnePlus => Box::new(|y| 1.0 / (1.0 + y)),
            TestFunction::PowThreeHalves => Box::new(|y| y * y.sqrt()),
        }
    }
}

impl std::fmt::Display for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TestFunction {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        TestFunction::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            format!("unknown test function `{s}` (expected one of sqrt, abs-xi5, inv-one-plus, pow-three-halves)")
        })
    }
}
