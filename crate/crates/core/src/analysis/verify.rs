//! Numerical checks of the spectral bounds and scalings of the support and of
//! the Tchebyshev–Markov–Stieltjes bracketing of Christoffel numbers.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coefficients::{HypothesisReport, RecurrenceCoefficients};
use crate::error::{Error, Result};
use crate::spectrum::{quadrature, DiscreteMeasure};

/// Index ranges and thresholds for [`verify_theorem1`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem1Options {
    /// Inclusive `n` range for the two-sided bound on `ξ_n`; default
    /// `[max(N_est, 2), K - 2]`.
    pub bound_range: Option<(usize, usize)>,
    /// Inclusive `n` range for both scaling windows; default as `bound_range`.
    pub scaling_range: Option<(usize, usize)>,
    /// Largest admissible max/min ratio of a scaled sequence.
    pub window: f64,
    /// Added to the ratio bound `(1 + q - c q²) / c`.
    pub ratio_slack: f64,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Theorem1Options {
            bound_range: None,
            scaling_range: None,
            window: 10.0,
            ratio_slack: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    /// First failing index, or the extreme index of a failing window.
    pub witness: Option<usize>,
    pub range: (usize, usize),
    /// Smallest slack (bounds) or max/min ratio (windows).
    pub statistic: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub c: f64,
    pub q_est: f64,
    pub s_est: f64,
    /// `(1 + q - c q²) / c`.
    pub ratio_bound: f64,
    pub checks: BTreeMap<String, CheckOutcome>,
}

impl Theorem1Report {
    pub fn all_hold(&self) -> bool {
        self.checks.values().all(|c| c.holds)
    }
}

/// `max / min` of the values, with the index of the extreme farther from 1.
fn window_ratio(values: &[(usize, f64)]) -> (f64, usize) {
    let (mut lo, mut hi) = (values[0], values[0]);
    for &v in values {
        if v.1 < lo.1 {
            lo = v;
        }
        if v.1 > hi.1 {
            hi = v;
        }
    }
    let witness = if hi.1.ln().abs() >= lo.1.ln().abs() { hi.0 } else { lo.0 };
    (hi.1 / lo.1, witness)
}

fn window_check(values: Vec<(usize, f64)>, range: (usize, usize), window: f64, what: &str) -> CheckOutcome {
    if values.is_empty() {
        return CheckOutcome {
            holds: false,
            witness: None,
            range,
            statistic: f64::NAN,
            detail: format!("{what}: empty index range"),
        };
    }
    let (ratio, witness) = window_ratio(&values);
    let holds = ratio <= window && values.iter().all(|v| v.1 > 0.0 && v.1.is_finite());
    CheckOutcome {
        holds,
        witness: (!holds).then_some(witness),
        range,
        statistic: ratio,
        detail: format!("{what}: max/min = {ratio:.6} (window {window})"),
    }
}

fn clamp_range(range: (usize, usize), lo: usize, hi: usize) -> (usize, usize) {
    (range.0.max(lo), range.1.min(hi))
}

/// Checks, at `c` = midpoint of the feasible interval:
/// `c β_n <= ξ_n <= β_{n-1} + β_n - c β_{n+1}`, window-boundedness of
/// `ξ_n q^{-n}` and `μ([0, ξ_n]) s^n`, and `ξ_{n+1} / ξ_n <= (1 + q - c q²) / c`.
pub fn verify_theorem1(
    coeffs: &RecurrenceCoefficients,
    report: &HypothesisReport,
    measure: &DiscreteMeasure,
    options: &Theorem1Options,
) -> Result<Theorem1Report> {
    let c = report
        .c_mid()
        .ok_or_else(|| Error::Precondition("hypotheses not satisfied: empty c-interval".into()))?;
    let k = measure.len();
    if k < 4 {
        return Err(Error::Precondition(format!("need at least 4 support points, got {k}")));
    }
    let (q, s) = (report.q_est, report.s_est);
    let n_est = report.n_est.unwrap_or(1);
    let bound_range = clamp_range(options.bound_range.unwrap_or((n_est.max(2), k - 2)), 1, k - 1);
    let scaling_range = clamp_range(options.scaling_range.unwrap_or(bound_range), 1, k);
    let ratio_range = clamp_range((n_est.max(1), k - 1), 1, k - 1);
    let mut checks = BTreeMap::new();

    let mut slack = f64::INFINITY;
    let mut witness = None;
    for n in bound_range.0..=bound_range.1 {
        let xi = measure.xi(n);
        let lower = c * coeffs.beta(n);
        let upper = coeffs.beta(n - 1) + coeffs.beta(n) - c * coeffs.beta(n + 1);
        let margin = ((xi - lower) / xi).min((upper - xi) / xi);
        if margin < slack {
            slack = margin;
        }
        if margin < 0.0 && witness.is_none() {
            witness = Some(n);
        }
    }
    checks.insert(
        "spectral_bounds".to_string(),
        CheckOutcome {
            holds: witness.is_none(),
            witness,
            range: bound_range,
            statistic: slack,
            detail: format!(
                "c beta_n <= xi_n <= beta_(n-1) + beta_n - c beta_(n+1); smallest relative slack {slack:.6e}"
            ),
        },
    );

    let support_scaled = (scaling_range.0..=scaling_range.1)
        .map(|n| (n, measure.xi(n) * q.powi(-(n as i32))))
        .collect();
    checks.insert(
        "support_scaling".to_string(),
        window_check(support_scaled, scaling_range, options.window, "xi_n q^-n"),
    );

    let tail_scaled = (scaling_range.0..=scaling_range.1)
        .map(|n| (n, measure.mass_up_to(n) * s.powi(n as i32)))
        .collect();
    checks.insert(
        "tail_scaling".to_string(),
        window_check(tail_scaled, scaling_range, options.window, "mu([0, xi_n]) s^n"),
    );

    let ratio_bound = (1.0 + q - c * q * q) / c;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for n in ratio_range.0..=ratio_range.1 {
        let ratio = measure.xi(n + 1) / measure.xi(n);
        worst = worst.max(ratio);
        if ratio > ratio_bound + options.ratio_slack && witness.is_none() {
            witness = Some(n);
        }
    }
    checks.insert(
        "ratio_bound".to_string(),
        CheckOutcome {
            holds: witness.is_none(),
            witness,
            range: ratio_range,
            statistic: worst,
            detail: format!("max xi_(n+1)/xi_n = {worst:.6} against bound {ratio_bound:.6}"),
        },
    );

    Ok(Theorem1Report {
        c,
        q_est: q,
        s_est: s,
        ratio_bound,
        checks,
    })
}

/// Both sides of `μ_{N,1} <= μ([0, x_{N,2}))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TmsCheck {
    pub n: usize,
    /// Christoffel number at the smallest zero of `p_N`.
    pub lhs: f64,
    /// Resolved masses below the second-smallest zero plus the tail.
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Compares the smallest Christoffel number of `p_N` with the measure of
/// `[0, x_{N,2})`; needs the resolved support to reach below `x_{N,2}`.
pub fn verify_tms(coeffs: &RecurrenceCoefficients, measure: &DiscreteMeasure, n: usize) -> Result<TmsCheck> {
    if n < 3 {
        return Err(Error::Precondition(format!("TMS comparison needs N >= 3, got {n}")));
    }
    let rule = quadrature(coeffs, n)?;
    let x2 = rule.nodes[1];
    let last = *measure.support.last().expect("non-empty measure");
    if last >= x2 {
        return Err(Error::Precision {
            remainder: measure.tail_bound,
            tolerance: 0.0,
        });
    }
    let lhs = rule.weights[0];
    let rhs = measure.mass_below(x2);
    Ok(TmsCheck {
        n,
        lhs,
        rhs,
        margin: rhs - lhs,
        holds: lhs <= rhs,
    })
}
