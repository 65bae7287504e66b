//! Finite-range checks of the structural hypotheses on a coefficient system.
//!
//! Every condition is asymptotic, so a verdict only speaks for `n <= n_max`.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::{ls_slope, RecurrenceCoefficients, Source};

/// Ids of the checked conditions, in report order.
pub const CONDITION_IDS: [&str; 7] = [
    "decay",
    "alpha_gamma_ratio",
    "h_growth",
    "offdiag_bound",
    "beta_start",
    "beta_tail",
    "offdiag_gap",
];

const WINDOW: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Index at which the condition was seen to fail (or the binding index).
    pub witness: Option<usize>,
    pub detail: String,
}

impl Verdict {
    fn new(status: VerdictStatus, witness: Option<usize>, detail: impl Into<String>) -> Self {
        Verdict {
            status,
            witness,
            detail: detail.into(),
        }
    }

    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::Holds
    }
}

/// Interval of admissible `c`, with per-end openness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
    lo_index: Option<usize>,
    hi_index: Option<usize>,
}

impl CInterval {
    fn open(lo: f64, hi: f64) -> Self {
        CInterval {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
            lo_index: None,
            hi_index: None,
        }
    }

    fn cap_above(&mut self, bound: f64, index: usize) {
        if bound < self.hi || bound.is_nan() {
            self.hi = bound;
            self.hi_open = false;
            self.hi_index = Some(index);
        }
    }

    fn cap_below(&mut self, bound: f64, index: usize) {
        if bound > self.lo || bound.is_nan() {
            self.lo = bound;
            self.lo_open = false;
            self.lo_index = Some(index);
        }
    }

    fn mark_infeasible(&mut self, index: usize) {
        self.hi = f64::NEG_INFINITY;
        self.hi_index = Some(index);
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi || (self.lo == self.hi && !self.lo_open && !self.hi_open))
    }

    pub fn contains(&self, c: f64) -> bool {
        let above = if self.lo_open { c > self.lo } else { c >= self.lo };
        let below = if self.hi_open { c < self.hi } else { c <= self.hi };
        above && below
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn binding_index(&self) -> Option<usize> {
        self.hi_index.or(self.lo_index)
    }
}

/// Closed-form quantities available only for the example family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExampleClosedForm {
    /// `a / (1 + a²)`.
    pub feasibility_lhs: f64,
    /// `√q (1 - q) / (1 + q²)`; a feasible `c` exists iff lhs < rhs.
    pub feasibility_rhs: f64,
    /// `a⁻²`, the growth rate printed alongside the family.
    pub s_printed: f64,
    /// `(a² q)⁻¹`, the growth rate of `h(n)` by direct product.
    pub s_direct: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub n_max: usize,
    /// Fitted decay rate of `γ_n`.
    pub q_est: f64,
    /// Fitted decay rate of `α_n`.
    pub q_alpha_est: f64,
    /// Fitted growth rate of `h(n)`.
    pub s_est: f64,
    /// `max(1, sup α_n / γ_n)` over the checked range.
    pub kappa_est: f64,
    pub c_interval: CInterval,
    pub n_est: Option<usize>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub closed_form: Option<ExampleClosedForm>,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn verdict(&self, id: &str) -> &Verdict {
        &self.verdicts[id]
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.values().all(Verdict::holds)
    }

    pub fn any_fails(&self) -> bool {
        self.verdicts.values().any(|v| v.status == VerdictStatus::Fails)
    }

    /// Feasible `c` used downstream: the interval midpoint.
    pub fn c_mid(&self) -> Option<f64> {
        (!self.c_interval.is_empty()).then(|| self.c_interval.midpoint())
    }
}

impl Serialize for HypothesisReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            n_max: usize,
            q_est: f64,
            q_alpha_est: f64,
            s_est: f64,
            kappa_est: f64,
            c_lo: f64,
            c_hi: f64,
            c_lo_open: bool,
            c_hi_open: bool,
            c_empty: bool,
            #[serde(rename = "N_est")]
            n_est: Option<usize>,
            verdicts: &'a BTreeMap<String, Verdict>,
            closed_form: &'a Option<ExampleClosedForm>,
            notes: &'a [String],
        }
        Json {
            n_max: self.n_max,
            q_est: self.q_est,
            q_alpha_est: self.q_alpha_est,
            s_est: self.s_est,
            kappa_est: self.kappa_est,
            c_lo: self.c_interval.lo,
            c_hi: self.c_interval.hi,
            c_lo_open: self.c_interval.lo_open,
            c_hi_open: self.c_interval.hi_open,
            c_empty: self.c_interval.is_empty(),
            n_est: self.n_est,
            verdicts: &self.verdicts,
            closed_form: &self.closed_form,
            notes: &self.notes,
        }
        .serialize(serializer)
    }
}

/// Spread `max - min` of a sequence of logs, with the index of the extreme
/// farthest from the first value.
fn log_spread(values: impl Iterator<Item = (usize, f64)>) -> (f64, usize) {
    let mut lo = (f64::INFINITY, 0);
    let mut hi = (f64::NEG_INFINITY, 0);
    for (n, v) in values {
        if v < lo.0 {
            lo = (v, n);
        }
        if v > hi.0 {
            hi = (v, n);
        }
    }
    (hi.0 - lo.0, hi.1.max(lo.1))
}

/// Checks the decay, ratio, growth, off-diagonal and β conditions on `n <= n_max`.
///
/// `n_max` below 10 is raised to 10. Tables shorter than `n_max + 1` rows
/// without a tail are checked on the rows they have.
pub fn check_hypotheses(coeffs: &RecurrenceCoefficients, n_max: usize, c_grid_resolution: f64) -> HypothesisReport {
    let mut notes = Vec::new();
    let mut n_max = n_max.max(10);
    if let Some(len) = coeffs.available() {
        if len < n_max + 1 {
            notes.push(format!(
                "table has {len} rows; checked range truncated to n <= {}",
                len - 1
            ));
            n_max = len - 1;
        }
    }
    notes.push(format!("verdicts cover the finite range n <= {n_max} only"));

    let alpha: Vec<f64> = (0..=n_max).map(|n| coeffs.alpha(n)).collect();
    let gamma: Vec<f64> = (0..=n_max).map(|n| coeffs.gamma(n)).collect();
    let beta: Vec<f64> = (0..=n_max).map(|n| coeffs.beta(n)).collect();
    let lambda: Vec<f64> = (0..n_max).map(|n| coeffs.lambda(n)).collect();
    let h = coeffs.h_sequence(n_max);

    let upper = (n_max / 2).max(1)..=n_max;
    let fit = |f: &dyn Fn(usize) -> f64| {
        let pts: Vec<(f64, f64)> = upper.clone().map(|n| (n as f64, f(n))).collect();
        ls_slope(&pts).exp()
    };
    let q_est = fit(&|n| gamma[n].ln());
    let q_alpha_est = fit(&|n| alpha[n].ln());
    let s_est = fit(&|n| h[n].ln());

    let mut verdicts = BTreeMap::new();

    // decay: α_n ≈ qⁿ, γ_n ≈ qⁿ with 0 < q < 1
    let decay = if !(q_est > 0.0 && q_est < 1.0 && q_alpha_est > 0.0 && q_alpha_est < 1.0) {
        let witness = (0..n_max)
            .find(|&n| gamma[n + 1] >= gamma[n] || (n >= 1 && alpha[n + 1] >= alpha[n]))
            .unwrap_or(n_max);
        Verdict::new(
            VerdictStatus::Fails,
            Some(witness),
            format!("fitted rates q_gamma={q_est}, q_alpha={q_alpha_est} not in (0,1)"),
        )
    } else if (q_alpha_est.ln() / q_est.ln() - 1.0).abs() > 0.05 {
        Verdict::new(
            VerdictStatus::Fails,
            None,
            format!("alpha and gamma decay at different rates ({q_alpha_est} vs {q_est})"),
        )
    } else {
        let lq = q_est.ln();
        let (sg, wg) = log_spread((0..=n_max).map(|n| (n, gamma[n].ln() - n as f64 * lq)));
        let (sa, wa) = log_spread((1..=n_max).map(|n| (n, alpha[n].ln() - n as f64 * lq)));
        if sg > WINDOW.ln() || sa > WINDOW.ln() {
            Verdict::new(
                VerdictStatus::Fails,
                Some(if sg > sa { wg } else { wa }),
                "coefficient / q^n ratio leaves a factor-10 window",
            )
        } else {
            Verdict::new(VerdictStatus::Holds, None, format!("q_est = {q_est}"))
        }
    };
    verdicts.insert("decay".to_string(), decay);

    // α_n ≤ κ γ_n with 1 ≤ κ < 1/q + q - 1
    let (ratio_max, ratio_at) = (1..=n_max)
        .map(|n| (alpha[n] / gamma[n], n))
        .fold((f64::NEG_INFINITY, 0), |acc, v| if v.0 > acc.0 { v } else { acc });
    let kappa_est = ratio_max.max(1.0);
    let kappa_cap = 1.0 / q_est + q_est - 1.0;
    let ratio = if kappa_est < kappa_cap {
        Verdict::new(
            VerdictStatus::Holds,
            None,
            format!("kappa_est = {kappa_est} < {kappa_cap}"),
        )
    } else {
        Verdict::new(
            VerdictStatus::Fails,
            Some(ratio_at),
            format!("kappa_est = {kappa_est} >= {kappa_cap}"),
        )
    };
    verdicts.insert("alpha_gamma_ratio".to_string(), ratio);

    // h(n) ~ sⁿ with s > 1
    let growth = if !(s_est > 1.0) {
        let witness = (0..n_max).find(|&n| h[n + 1] < h[n]).unwrap_or(n_max);
        Verdict::new(
            VerdictStatus::Fails,
            Some(witness),
            format!("fitted growth s_est = {s_est} <= 1"),
        )
    } else {
        let ls = s_est.ln();
        let (spread, at) = log_spread((0..=n_max).map(|n| (n, h[n].ln() - n as f64 * ls)));
        if spread > WINDOW.ln() {
            Verdict::new(VerdictStatus::Fails, Some(at), "h(n) / s^n leaves a factor-10 window")
        } else {
            Verdict::new(VerdictStatus::Holds, None, format!("s_est = {s_est}"))
        }
    };
    verdicts.insert("h_growth".to_string(), growth);

    // λ_n ≤ β_{n+1} - c β_{n+2} on ((1+q)/(1+q²), 1/q)
    let base = CInterval::open((1.0 + q_est) / (1.0 + q_est * q_est), 1.0 / q_est);
    let mut offdiag = base;
    for n in 0..=n_max - 2 {
        offdiag.cap_above((beta[n + 1] - lambda[n]) / beta[n + 2], n);
    }
    let width_verdict = |iv: &CInterval, what: &str| {
        if iv.is_empty() {
            Verdict::new(
                VerdictStatus::Fails,
                iv.binding_index(),
                format!("no admissible c for {what}"),
            )
        } else if iv.width() < c_grid_resolution {
            Verdict::new(
                VerdictStatus::Inconclusive,
                iv.binding_index(),
                format!("admissible c interval narrower than resolution {c_grid_resolution}"),
            )
        } else {
            Verdict::new(VerdictStatus::Holds, None, format!("c in ({}, {}]", iv.lo, iv.hi))
        }
    };
    verdicts.insert(
        "offdiag_bound".to_string(),
        width_verdict(&offdiag, "the off-diagonal bound"),
    );

    // β₁ ≤ β₀
    verdicts.insert(
        "beta_start".to_string(),
        if beta[1] <= beta[0] {
            Verdict::new(
                VerdictStatus::Holds,
                None,
                format!("beta1 = {} <= beta0 = {}", beta[1], beta[0]),
            )
        } else {
            Verdict::new(
                VerdictStatus::Fails,
                Some(1),
                format!("beta1 = {} > beta0 = {}", beta[1], beta[0]),
            )
        },
    );

    // β_n - cβ_{n+1} ≥ β_{n+1} - cβ_{n+2} for n ≥ N
    let start = if offdiag.is_empty() { base } else { offdiag };
    let tail_interval = |first: usize| {
        let mut iv = start;
        for n in first..=n_max - 2 {
            let d = beta[n + 1] - beta[n + 2];
            let r = beta[n] - beta[n + 1];
            if d > 0.0 {
                iv.cap_above(r / d, n);
            } else if d < 0.0 {
                iv.cap_below(r / d, n);
            } else if r < 0.0 {
                iv.mark_infeasible(n);
            }
        }
        iv
    };
    let search_end = (n_max / 2).max(1);
    let found = (1..=search_end)
        .map(|first| (first, tail_interval(first)))
        .find(|(_, iv)| !iv.is_empty());
    let (n_est, joint) = match found {
        Some((first, iv)) => (Some(first), iv),
        None => (None, tail_interval(search_end)),
    };
    verdicts.insert(
        "beta_tail".to_string(),
        match n_est {
            Some(first) => {
                let mut v = width_verdict(&joint, "the beta condition");
                if v.holds() {
                    v.detail = format!("N_est = {first}, {}", v.detail);
                }
                v
            }
            None => width_verdict(&joint, "the beta condition"),
        },
    );

    // λ_n ≤ β_{n+1} - β_{n+2}, checked directly
    let gap_fail = (0..=n_max - 2).find(|&n| lambda[n] > beta[n + 1] - beta[n + 2]);
    verdicts.insert(
        "offdiag_gap".to_string(),
        match gap_fail {
            None => Verdict::new(VerdictStatus::Holds, None, "lambda_n <= beta_{n+1} - beta_{n+2}"),
            Some(n) => Verdict::new(
                VerdictStatus::Fails,
                Some(n),
                format!(
                    "lambda_{n} = {} > beta_{} - beta_{} = {}",
                    lambda[n],
                    n + 1,
                    n + 2,
                    beta[n + 1] - beta[n + 2]
                ),
            ),
        },
    );

    let c_interval = if offdiag.is_empty() { offdiag } else { joint };

    let closed_form = match coeffs.source {
        Source::Example { a, q } => {
            let cf = ExampleClosedForm {
                feasibility_lhs: a / (1.0 + a * a),
                feasibility_rhs: q.sqrt() * (1.0 - q) / (1.0 + q * q),
                s_printed: 1.0 / (a * a),
                s_direct: 1.0 / (a * a * q),
            };
            if ((s_est - cf.s_printed) / cf.s_printed).abs() > 1e-6 {
                notes.push(format!(
                    "fitted s_est = {s_est} differs from a^-2 = {}; h(n) = (a^2 q)^-n gives {}",
                    cf.s_printed, cf.s_direct
                ));
            }
            Some(cf)
        }
        Source::Table { .. } => None,
    };

    HypothesisReport {
        n_max,
        q_est,
        q_alpha_est,
        s_est,
        kappa_est,
        c_interval,
        n_est,
        verdicts,
        closed_form,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{Beta0Mode, TableRow, TailExtension};
    use approx::assert_relative_eq;

    fn report(a: f64, q: f64) -> HypothesisReport {
        let c = RecurrenceCoefficients::example_family(a, q, Beta0Mode::GammaOnly).unwrap();
        check_hypotheses(&c, 60, 1e-4)
    }

    #[test]
    fn example_family_all_hold() {
        let r = report(0.3, 0.25);
        for id in CONDITION_IDS {
            assert!(r.verdict(id).holds(), "{id}: {:?}", r.verdict(id));
        }
        assert_eq!(r.kappa_est, 1.0);
        assert!(r.kappa_est < 1.0 / 0.25 + 0.25 - 1.0);
        assert_relative_eq!(r.q_est, 0.25, max_relative = 1e-12);
        assert_relative_eq!(r.s_est, 1.0 / (0.09 * 0.25), max_relative = 1e-10);
        // endpoints (1+q)/(1+q²) and (1 - a√q/((1+a²)q))/q
        assert_relative_eq!(r.c_interval.lo, 1.25 / 1.0625, max_relative = 1e-12);
        assert!(r.c_interval.lo_open);
        assert_relative_eq!(r.c_interval.hi, (1.0 - 0.15 / 0.2725) / 0.25, max_relative = 1e-12);
        assert!(!r.c_interval.hi_open);
        assert_relative_eq!(r.c_interval.lo, 1.17647, epsilon = 1e-5);
        assert_relative_eq!(r.c_interval.hi, 1.79817, epsilon = 1e-5);
        assert_eq!(r.n_est, Some(1));
        assert!(r.notes.iter().any(|n| n.contains("a^-2")));
    }

    #[test]
    fn interval_endpoints_certify_constraints() {
        let c = RecurrenceCoefficients::example_family(0.3, 0.25, Beta0Mode::GammaOnly).unwrap();
        let r = check_hypotheses(&c, 60, 1e-4);
        let n0 = r.n_est.unwrap();
        for cc in [r.c_interval.lo + 1e-9, r.c_interval.midpoint(), r.c_interval.hi] {
            for n in 0..=58 {
                let rhs = c.beta(n + 1) - cc * c.beta(n + 2);
                assert!(c.lambda(n) <= rhs * (1.0 + 1e-12), "c={cc} n={n}");
                if n >= n0 {
                    let l = c.beta(n) - cc * c.beta(n + 1);
                    assert!(l >= rhs * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn near_unit_a_fails_offdiag_bound() {
        let r = report(0.99, 0.25);
        let cf = r.closed_form.unwrap();
        assert_relative_eq!(cf.feasibility_lhs, 0.49997, epsilon = 1e-5);
        assert_relative_eq!(cf.feasibility_rhs, 0.35294, epsilon = 1e-5);
        assert_eq!(r.verdict("offdiag_bound").status, VerdictStatus::Fails);
        assert!(r.verdict("offdiag_bound").witness.is_some());
        assert!(r.c_interval.is_empty());
        assert!(r.any_fails());
    }

    #[test]
    fn constant_coefficients_fail_decay() {
        let rows: Vec<TableRow> = (0..=60)
            .map(|n| TableRow {
                n,
                alpha: if n == 0 { 0.0 } else { 1.0 },
                gamma: 1.0,
            })
            .collect();
        let c = RecurrenceCoefficients::from_table(&rows, TailExtension::None, Beta0Mode::GammaOnly).unwrap();
        let r = check_hypotheses(&c, 60, 1e-4);
        let v = r.verdict("decay");
        assert_eq!(v.status, VerdictStatus::Fails);
        assert_eq!(v.witness, Some(0));
    }

    #[test]
    fn serializes_named_fields() {
        let r = report(0.3, 0.25);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["q_est", "s_est", "kappa_est", "c_lo", "c_hi", "N_est", "verdicts"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["verdicts"]["decay"]["status"], "holds");
    }
}
