//! `verify`: runs the selected checks and writes `verify.json`, plus the
//! hypothesis, measure and Lebesgue artifacts it computes on the way.

use std::collections::BTreeMap;

use qmeasure::analysis::{
    remark1_fixture_stats, verify_theorem1, verify_tms, KernelChoice, SupportBasis, TestFunction, Theorem1Options,
};
use qmeasure::io;
use qmeasure::polyeval::eval_on_support;
use qmeasure::spectrum::{moment, quadrature, DiscreteMeasure};
use qmeasure::{check_hypotheses, HypothesisReport, RecurrenceCoefficients};
use serde::Serialize;

use crate::commands::{
    build_coefficients, build_measure, linearization_summary, linearization_tables, write_artifact, write_hypotheses,
    write_lebesgue, write_measure, ConfigEcho,
};
use crate::config::{RunConfig, Suite};
use crate::{CliError, EXIT_FAIL, EXIT_OK};

pub const SKIP_NOTE: &str = "hypotheses not satisfied";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub status: Status,
    pub statistic: Option<f64>,
    pub detail: String,
}

impl SuiteCheck {
    fn verdict(holds: bool, statistic: f64, detail: impl Into<String>) -> Self {
        SuiteCheck {
            status: if holds { Status::Holds } else { Status::Fails },
            statistic: Some(statistic),
            detail: detail.into(),
        }
    }

    fn error(err: impl std::fmt::Display) -> Self {
        SuiteCheck {
            status: Status::Fails,
            statistic: None,
            detail: err.to_string(),
        }
    }

    fn skipped() -> Self {
        SuiteCheck {
            status: Status::Skipped,
            statistic: None,
            detail: SKIP_NOTE.to_string(),
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: BTreeMap<String, SuiteCheck>,
    pub all_hold: bool,
}

impl Serialize for Suite {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

fn hypotheses_check(report: &HypothesisReport) -> SuiteCheck {
    let failing: Vec<&str> = report
        .verdicts
        .iter()
        .filter(|(_, v)| !v.holds())
        .map(|(id, _)| id.as_str())
        .collect();
    let c = &report.c_interval;
    let holds = failing.is_empty() && !c.is_empty();
    let detail = if holds {
        format!("c in ({}, {}]", c.lo, c.hi)
    } else if failing.is_empty() {
        "empty c-interval".to_string()
    } else {
        format!("not holding: {}", failing.join(", "))
    };
    SuiteCheck::verdict(holds, c.width(), detail)
}

fn quadrature_check(coeffs: &RecurrenceCoefficients) -> SuiteCheck {
    let run = || -> qmeasure::Result<(f64, f64)> {
        let mut weight_gap = 0.0f64;
        let mut moment_gap = 0.0f64;
        for n in 1..=30 {
            let rule = quadrature(coeffs, n)?;
            weight_gap = weight_gap.max(rule.max_weight_discrepancy());
            if n <= 15 {
                for m in 0..2 * n {
                    let exact = moment(coeffs, m, m + 2)?;
                    moment_gap = moment_gap.max((rule.moment(m as u32) - exact).abs() / exact);
                }
            }
        }
        Ok((weight_gap, moment_gap))
    };
    match run() {
        Ok((w, m)) => SuiteCheck::verdict(
            w <= 1e-8 && m <= 1e-9,
            w,
            format!("N <= 30 weight discrepancy {w:e}; N <= 15 moment error {m:e}"),
        ),
        Err(e) => SuiteCheck::error(e),
    }
}

fn theorem1_checks(
    coeffs: &RecurrenceCoefficients,
    report: &HypothesisReport,
    measure: &DiscreteMeasure,
    out: &mut BTreeMap<String, SuiteCheck>,
) {
    let k = measure.len();
    let mut options = Theorem1Options::default();
    if k >= 7 {
        options.bound_range = Some((2, 25.min(k - 2)));
        options.scaling_range = Some((5, 20.min(k - 2)));
    }
    match verify_theorem1(coeffs, report, measure, &options) {
        Ok(t) => {
            for (id, c) in t.checks {
                let detail = format!("n in [{}, {}]: {}", c.range.0, c.range.1, c.detail);
                out.insert(
                    format!("theorem1/{id}"),
                    SuiteCheck::verdict(c.holds, c.statistic, detail),
                );
            }
        }
        Err(e) => {
            out.insert("theorem1".into(), SuiteCheck::error(e));
        }
    }
}

fn boundedness_check(coeffs: &RecurrenceCoefficients, measure: &DiscreteMeasure) -> SuiteCheck {
    let n_max = measure.len();
    let points = measure.len().min(20);
    let mut worst = 0.0f64;
    for k in 1..=points {
        match eval_on_support(coeffs, n_max, measure.xi(k), measure.truncation_size) {
            Ok(e) => worst = (0..=n_max).map(|n| e.r(n).abs()).fold(worst, f64::max),
            Err(e) => return SuiteCheck::error(e),
        }
    }
    SuiteCheck::verdict(
        worst <= 1.0 + 1e-10,
        worst,
        format!("max |R_n(xi_k)| over n <= {n_max}, k <= {points}"),
    )
}

fn linearization_check(coeffs: &RecurrenceCoefficients, lin_max: usize) -> SuiteCheck {
    match linearization_tables(coeffs, lin_max) {
        Ok(tables) => {
            let (min_rel, row_err) = linearization_summary(&tables);
            SuiteCheck::verdict(
                min_rel >= -1e-10 && row_err <= 1e-10,
                min_rel,
                format!("n, m <= {lin_max}: min g/max|g| = {min_rel:e}, max |row sum - 1| = {row_err:e}"),
            )
        }
        Err(e) => SuiteCheck::error(e),
    }
}

fn lebesgue_checks(
    config: &RunConfig,
    coeffs: &RecurrenceCoefficients,
    measure: &DiscreteMeasure,
    out: &mut BTreeMap<String, SuiteCheck>,
) -> Result<(), CliError> {
    let degree = config.degree;
    let basis = match SupportBasis::new(coeffs, measure, degree + 1) {
        Ok(b) => b,
        Err(e) => {
            out.insert("lebesgue".into(), SuiteCheck::error(e));
            return Ok(());
        }
    };
    let computed = basis.lebesgue_constants(degree, KernelChoice::default());
    if let Ok(c) = &computed {
        write_lebesgue(config, c)?;
    }
    let constants = match computed {
        Ok(c) if c.len() > 1 => {
            let mut sorted = c[1..].to_vec();
            sorted.sort_by(f64::total_cmp);
            let ratio = sorted[sorted.len() - 1] / sorted[sorted.len() / 2];
            SuiteCheck::verdict(ratio <= 3.0, ratio, format!("max/median over 1 <= n <= {degree}"))
        }
        Ok(_) => SuiteCheck::error("needs degree >= 1"),
        Err(e) => SuiteCheck::error(e),
    };
    out.insert("lebesgue/constants".into(), constants);

    let top = degree.min(20);
    let mut worst = 0.0f64;
    let mut failure = None;
    'outer: for n in 0..=top {
        for m in 0..=n {
            match basis.expand(&basis.r_values(m), n) {
                Ok(e) => worst = worst.max(e.sup_error),
                Err(e) => {
                    failure = Some(e);
                    break 'outer;
                }
            }
        }
    }
    let projection = match failure {
        Some(e) => SuiteCheck::error(e),
        None => SuiteCheck::verdict(
            worst <= 1e-9,
            worst,
            format!("sup |s_n(R_m) - R_m| over m <= n <= {top}"),
        ),
    };
    out.insert("lebesgue/projection".into(), projection);

    let degrees: Vec<usize> = [5, 10, 20, 40].into_iter().filter(|&n| n <= degree).collect();
    let sqrt = match basis.sup_errors(&*TestFunction::Sqrt.bind(measure), &degrees) {
        Ok(errs) => {
            let monotone = errs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let detail = degrees
                .iter()
                .zip(&errs)
                .map(|(n, e)| format!("n={n}: {e:e}"))
                .collect::<Vec<_>>()
                .join(", ");
            SuiteCheck::verdict(monotone, errs.last().copied().unwrap_or(f64::NAN), detail)
        }
        Err(e) => SuiteCheck::error(e),
    };
    out.insert("lebesgue/sqrt_errors".into(), sqrt);
    Ok(())
}

fn tms_check(coeffs: &RecurrenceCoefficients, measure: &DiscreteMeasure) -> SuiteCheck {
    let mut min_margin = f64::INFINITY;
    for n in 3..=30 {
        match verify_tms(coeffs, measure, n) {
            Ok(t) if t.holds && t.margin > 0.0 => min_margin = min_margin.min(t.margin),
            Ok(t) => {
                return SuiteCheck::verdict(false, t.margin, format!("fails at N={n}: {} > {}", t.lhs, t.rhs));
            }
            Err(e) => return SuiteCheck::error(format!("N={n}: {e}")),
        }
    }
    SuiteCheck::verdict(true, min_margin, "mu_{N,1} < mu([0, x_{N,2})) for 3 <= N <= 30")
}

fn remark1_check(k: usize) -> SuiteCheck {
    match remark1_fixture_stats(k.max(6)) {
        Ok(s) => SuiteCheck::verdict(
            s.holds(4.0),
            s.tail_window_ratio,
            format!(
                "total mass {}, tail*2^n window {} over n in [{}, {}]",
                s.total_mass, s.tail_window_ratio, s.tail_window_range.0, s.tail_window_range.1
            ),
        ),
        Err(e) => SuiteCheck::error(e),
    }
}

/// Runs `suite` on the configured family.
pub fn run_suite(config: &RunConfig) -> Result<VerifyReport, CliError> {
    let wants = |s: Suite| config.suite == Suite::All || config.suite == s;
    let mut checks = BTreeMap::new();

    if wants(Suite::Remark1) {
        checks.insert("remark1".to_string(), remark1_check(config.k));
    }
    if config.suite != Suite::Remark1 {
        let coeffs = build_coefficients(config)?;
        let report = check_hypotheses(&coeffs, config.k, config.c_grid);
        write_hypotheses(config, &report)?;
        let hypotheses = hypotheses_check(&report);
        let gated = !hypotheses.holds();
        checks.insert("hypotheses".to_string(), hypotheses);

        if wants(Suite::Quadrature) {
            checks.insert("quadrature".into(), quadrature_check(&coeffs));
        }
        let needs_measure = [Suite::Theorem1, Suite::Boundedness, Suite::Lebesgue, Suite::Tms]
            .into_iter()
            .any(|s| wants(s) && !(gated && s != Suite::Tms));
        let measure = if needs_measure {
            Some(build_measure(config, &coeffs)?)
        } else {
            None
        };
        if let Some(m) = &measure {
            write_measure(config, m)?;
        }
        let m = measure.as_ref();
        if wants(Suite::Theorem1) {
            match (gated, m) {
                (false, Some(m)) => theorem1_checks(&coeffs, &report, m, &mut checks),
                _ => {
                    checks.insert("theorem1".into(), SuiteCheck::skipped());
                }
            }
        }
        if wants(Suite::Boundedness) {
            let c = match (gated, m) {
                (false, Some(m)) => boundedness_check(&coeffs, m),
                _ => SuiteCheck::skipped(),
            };
            checks.insert("boundedness".into(), c);
        }
        if wants(Suite::Linearization) {
            let c = if gated {
                SuiteCheck::skipped()
            } else {
                linearization_check(&coeffs, config.lin_max)
            };
            checks.insert("linearization".into(), c);
        }
        if wants(Suite::Lebesgue) {
            match (gated, m) {
                (false, Some(m)) => lebesgue_checks(config, &coeffs, m, &mut checks)?,
                _ => {
                    checks.insert("lebesgue".into(), SuiteCheck::skipped());
                }
            }
        }
        if wants(Suite::Tms) {
            if let Some(m) = m {
                checks.insert("tms".into(), tms_check(&coeffs, m));
            }
        }
    }

    let all_hold = checks.values().all(SuiteCheck::holds);
    Ok(VerifyReport {
        suite: config.suite,
        checks,
        all_hold,
    })
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    config: ConfigEcho,
    #[serde(flatten)]
    report: &'a VerifyReport,
}

pub fn cmd_verify(config: &RunConfig) -> Result<i32, CliError> {
    let report = run_suite(config)?;
    let json = VerifyJson {
        config: ConfigEcho::new(config),
        report: &report,
    };
    write_artifact(config, "verify.json", &io::to_json_string(&json))?;
    for (name, check) in &report.checks {
        let status = match check.status {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Skipped => "SKIPPED",
        };
        println!("{name:<28} {status:<8} {}", check.detail);
    }
    Ok(if report.all_hold { EXIT_OK } else { EXIT_FAIL })
}
