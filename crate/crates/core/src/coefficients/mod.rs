//! Recurrence coefficient systems `x R_n = -γ_n R_{n+1} + β_n R_n - α_n R_{n-1}`.
//!
//! A [`RecurrenceCoefficients`] value describes the whole infinite sequence:
//! either the closed-form family `α_n = a² qⁿ, γ_n = qⁿ`, or a finite table
//! optionally extended by a fitted geometric tail. Derived quantities follow
//! `β_n = α_n + γ_n`, `λ_n = √(α_{n+1} γ_n)` and `h(n) = Πγ_j / Πα_j`.

mod hypotheses;

pub use hypotheses::{
    check_hypotheses, CInterval, ExampleClosedForm, HypothesisReport, Verdict, VerdictStatus, CONDITION_IDS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaled::ScaledReal;

/// How `β₀` is formed. The recurrence always uses `α₀ = 0`; the two modes
/// differ only in whether the formal `n = 0` value of the α sequence is
/// folded into `β₀`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Beta0Mode {
    /// `β₀ = γ₀`, so `R_n(0) = 1` for every `n`.
    #[default]
    GammaOnly,
    /// `β₀ = α₀⁺ + γ₀` with `α₀⁺` the formal `n = 0` value of the α formula.
    AlphaPlusGamma,
}

impl std::str::FromStr for Beta0Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma-only" | "gamma" => Ok(Beta0Mode::GammaOnly),
            "alpha-plus-gamma" | "alpha+gamma" => Ok(Beta0Mode::AlphaPlusGamma),
            _ => Err(Error::Table(format!("unknown beta0 mode `{s}`"))),
        }
    }
}

impl std::fmt::Display for Beta0Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Beta0Mode::GammaOnly => "gamma-only",
            Beta0Mode::AlphaPlusGamma => "alpha-plus-gamma",
        })
    }
}

/// What to do with indices past the end of a coefficient table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TailExtension {
    /// Requests beyond the table are errors.
    #[default]
    None,
    /// Continue each sequence geometrically with the ratio fitted on the
    /// upper half of the table.
    Geometric,
}

/// One row `(n, α_n, γ_n)` of a coefficient table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct GeometricTail {
    alpha_ratio: f64,
    gamma_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Source {
    Example {
        a: f64,
        q: f64,
    },
    Table {
        alpha: Vec<f64>,
        gamma: Vec<f64>,
        tail: Option<GeometricTail>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCoefficients {
    source: Source,
    beta0_mode: Beta0Mode,
}

impl RecurrenceCoefficients {
    /// The family `α_n = a² qⁿ` (n ≥ 1), `γ_n = qⁿ` with `0 < a, q < 1`.
    pub fn example_family(a: f64, q: f64, beta0_mode: Beta0Mode) -> Result<Self> {
        for (name, value) in [("a", a), ("q", q)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::Domain {
                    name,
                    value,
                    range: "(0, 1)",
                });
            }
        }
        Ok(RecurrenceCoefficients {
            source: Source::Example { a, q },
            beta0_mode,
        })
    }

    /// Builds a system from explicit rows, which must run contiguously from `n = 0`.
    pub fn from_table(rows: &[TableRow], tail: TailExtension, beta0_mode: Beta0Mode) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Table("empty coefficient table".into()));
        }
        let mut alpha = Vec::with_capacity(rows.len());
        let mut gamma = Vec::with_capacity(rows.len());
        for (expected, row) in rows.iter().enumerate() {
            if row.n != expected {
                return Err(Error::IndexGap { expected, found: row.n });
            }
            if !(row.gamma > 0.0) || !row.gamma.is_finite() {
                return Err(Error::NonPositive {
                    name: "gamma",
                    index: row.n,
                });
            }
            let alpha_ok = if row.n == 0 { row.alpha >= 0.0 } else { row.alpha > 0.0 };
            if !alpha_ok || !row.alpha.is_finite() {
                return Err(Error::NonPositive {
                    name: "alpha",
                    index: row.n,
                });
            }
            alpha.push(row.alpha);
            gamma.push(row.gamma);
        }
        let tail = match tail {
            TailExtension::None => None,
            TailExtension::Geometric => {
                if rows.len() < 3 {
                    return Err(Error::Table(
                        "geometric tail needs at least two rows with n >= 1".into(),
                    ));
                }
                Some(GeometricTail {
                    alpha_ratio: fitted_ratio(&alpha[1..], 1),
                    gamma_ratio: fitted_ratio(&gamma, 0),
                })
            }
        };
        Ok(RecurrenceCoefficients {
            source: Source::Table { alpha, gamma, tail },
            beta0_mode,
        })
    }

    pub fn beta0_mode(&self) -> Beta0Mode {
        self.beta0_mode
    }

    pub fn with_beta0_mode(mut self, mode: Beta0Mode) -> Self {
        self.beta0_mode = mode;
        self
    }

    /// `(a, q)` when this is the closed-form example family.
    pub fn example_params(&self) -> Option<(f64, f64)> {
        match self.source {
            Source::Example { a, q } => Some((a, q)),
            Source::Table { .. } => None,
        }
    }

    /// Number of indices with defined values, `None` if unbounded.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Example { .. } => None,
            Source::Table { gamma, tail: None, .. } => Some(gamma.len()),
            Source::Table { .. } => None,
        }
    }

    /// Fails unless every index `0..=n` is defined and representable as a
    /// normal float.
    pub fn ensure_index(&self, n: usize) -> Result<()> {
        if let Some(len) = self.available() {
            if n >= len {
                return Err(Error::TailRequired {
                    requested: n,
                    available: len,
                });
            }
        }
        if self.gamma(n) < f64::MIN_POSITIVE || (n > 0 && self.alpha(n) < f64::MIN_POSITIVE) {
            return Err(Error::Underflow { index: n });
        }
        Ok(())
    }

    /// `α_n` as used in the recurrence; `α₀ = 0`.
    ///
    /// Panics for table indices past the end without a tail; operations call
    /// [`ensure_index`](Self::ensure_index) first.
    pub fn alpha(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.alpha_formula(n)
    }

    /// Formal `n = 0` value of the α sequence (`a²` for the example family).
    pub fn alpha0_formal(&self) -> f64 {
        self.alpha_formula(0)
    }

    fn alpha_formula(&self, n: usize) -> f64 {
        match &self.source {
            Source::Example { a, q } => a * a * q.powi(n as i32),
            Source::Table { alpha, tail, .. } => table_value(alpha, tail.as_ref().map(|t| t.alpha_ratio), n),
        }
    }

    pub fn gamma(&self, n: usize) -> f64 {
        match &self.source {
            Source::Example { q, .. } => q.powi(n as i32),
            Source::Table { gamma, tail, .. } => table_value(gamma, tail.as_ref().map(|t| t.gamma_ratio), n),
        }
    }

    /// The `α` value folded into `β₀` (zero in `GammaOnly` mode).
    pub fn beta0_shift(&self) -> f64 {
        match self.beta0_mode {
            Beta0Mode::GammaOnly => 0.0,
            Beta0Mode::AlphaPlusGamma => self.alpha0_formal(),
        }
    }

    pub fn beta(&self, n: usize) -> f64 {
        if n == 0 {
            return self.beta0_shift() + self.gamma(0);
        }
        self.alpha(n) + self.gamma(n)
    }

    pub fn lambda(&self, n: usize) -> f64 {
        let (a, g) = (self.alpha(n + 1), self.gamma(n));
        let prod = a * g;
        if prod >= f64::MIN_POSITIVE {
            prod.sqrt()
        } else {
            a.sqrt() * g.sqrt()
        }
    }

    /// `h(n) = γ₀⋯γ_{n-1} / (α₁⋯α_n)` in scaled arithmetic.
    pub fn h(&self, n: usize) -> ScaledReal {
        self.h_sequence(n)[n]
    }

    /// `h(0), …, h(n)`.
    pub fn h_sequence(&self, n: usize) -> Vec<ScaledReal> {
        let mut out = Vec::with_capacity(n + 1);
        let mut h = ScaledReal::ONE;
        out.push(h);
        for k in 0..n {
            h = h * ScaledReal::from_f64(self.gamma(k)) / ScaledReal::from_f64(self.alpha(k + 1));
            out.push(h);
        }
        out
    }
}

/// `make_example_family` under its operation name.
pub fn make_example_family(a: f64, q: f64, beta0_mode: Beta0Mode) -> Result<RecurrenceCoefficients> {
    RecurrenceCoefficients::example_family(a, q, beta0_mode)
}

/// `make_table_coefficients` under its operation name.
pub fn make_table_coefficients(
    rows: &[TableRow],
    tail: TailExtension,
    beta0_mode: Beta0Mode,
) -> Result<RecurrenceCoefficients> {
    RecurrenceCoefficients::from_table(rows, tail, beta0_mode)
}

fn table_value(values: &[f64], ratio: Option<f64>, n: usize) -> f64 {
    if let Some(v) = values.get(n) {
        return *v;
    }
    match ratio {
        Some(r) => {
            let last = values.len() - 1;
            values[last] * r.powi((n - last) as i32)
        }
        None => panic!(
            "coefficient index {n} past table end ({} rows, no tail extension)",
            values.len()
        ),
    }
}

/// Least-squares slope of `(n, y_n)`.
pub(crate) fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    sxy / sxx
}

/// Geometric ratio fitted on the upper half of `values` (indices offset by `first`).
fn fitted_ratio(values: &[f64], first: usize) -> f64 {
    let start = values.len() / 2;
    let start = start.min(values.len() - 2);
    let pts: Vec<(f64, f64)> = values[start..]
        .iter()
        .enumerate()
        .map(|(i, v)| ((first + start + i) as f64, v.ln()))
        .collect();
    ls_slope(&pts).exp()
}
