//! Run configuration: defaults, a flat `key=value` seed file, and flag
//! overrides applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmeasure::analysis::TestFunction;
use qmeasure::{Beta0Mode, TailExtension};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    /// `α_n = a² qⁿ`, `γ_n = qⁿ`.
    Example { a: f64, q: f64 },
    /// Coefficients read from a `n,alpha,gamma` CSV file.
    Table { path: PathBuf, tail: TailExtension },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionSelection {
    One(TestFunction),
    All,
}

impl FunctionSelection {
    pub fn functions(self) -> Vec<TestFunction> {
        match self {
            FunctionSelection::One(f) => vec![f],
            FunctionSelection::All => TestFunction::ALL.to_vec(),
        }
    }
}

impl fmt::Display for FunctionSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSelection::One(t) => write!(f, "{t}"),
            FunctionSelection::All => f.write_str("all"),
        }
    }
}

impl FromStr for FunctionSelection {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "all" {
            return Ok(FunctionSelection::All);
        }
        s.parse()
            .map(FunctionSelection::One)
            .map_err(|_| CliError::Config(format!("unknown test function `{s}`")))
    }
}

/// Which checks `verify` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    All,
    Hypotheses,
    Quadrature,
    Theorem1,
    Boundedness,
    Linearization,
    Lebesgue,
    Tms,
    Remark1,
}

impl Suite {
    pub const NAMES: [(&'static str, Suite); 9] = [
        ("all", Suite::All),
        ("hypotheses", Suite::Hypotheses),
        ("quadrature", Suite::Quadrature),
        ("theorem1", Suite::Theorem1),
        ("boundedness", Suite::Boundedness),
        ("linearization", Suite::Linearization),
        ("lebesgue", Suite::Lebesgue),
        ("tms", Suite::Tms),
        ("remark1", Suite::Remark1),
    ];

    pub fn name(self) -> &'static str {
        Suite::NAMES.iter().find(|(_, s)| *s == self).unwrap().0
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::NAMES
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, suite)| *suite)
            .ok_or_else(|| CliError::Config(format!("unknown suite `{s}`")))
    }
}

fn tail_name(tail: TailExtension) -> &'static str {
    match tail {
        TailExtension::None => "none",
        TailExtension::Geometric => "geometric",
    }
}

pub fn parse_tail(s: &str) -> Result<TailExtension, CliError> {
    match s {
        "none" => Ok(TailExtension::None),
        "geometric" => Ok(TailExtension::Geometric),
        _ => Err(CliError::Config(format!("unknown tail rule `{s}` (none|geometric)"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub beta0_mode: Beta0Mode,
    /// Number of resolved support points; also the checked hypothesis range.
    pub k: usize,
    /// Largest truncation tried while stabilizing the measure.
    pub n_max: usize,
    pub rel_tol: f64,
    pub c_grid: f64,
    /// Largest expansion degree / Lebesgue index.
    pub degree: usize,
    /// Largest `n, m` for product linearization.
    pub lin_max: usize,
    pub function: FunctionSelection,
    pub suite: Suite,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: FamilySpec::Example { a: 0.3, q: 0.25 },
            beta0_mode: Beta0Mode::GammaOnly,
            k: 60,
            n_max: qmeasure::spectrum::DEFAULT_N_MAX,
            rel_tol: qmeasure::spectrum::DEFAULT_REL_TOL,
            c_grid: 1e-4,
            degree: 40,
            lin_max: 25,
            function: FunctionSelection::One(TestFunction::Sqrt),
            suite: Suite::All,
            out: PathBuf::from("out"),
        }
    }
}

/// Optional overrides, one per config key. Both the seed file and the
/// command-line flags are first turned into this.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub a: Option<f64>,
    pub q: Option<f64>,
    pub table: Option<PathBuf>,
    pub tail: Option<TailExtension>,
    pub beta0_mode: Option<Beta0Mode>,
    pub k: Option<usize>,
    pub n_max: Option<usize>,
    pub rel_tol: Option<f64>,
    pub c_grid: Option<f64>,
    pub degree: Option<usize>,
    pub lin_max: Option<usize>,
    pub function: Option<FunctionSelection>,
    pub suite: Option<Suite>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl Overrides {
    /// Parses a seed file: one `key=value` per line, `#` comments, blank
    /// lines ignored, each key at most once.
    pub fn parse_seed(text: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            seen.push(key);
            match key {
                "a" => o.a = Some(parse_value(key, value)?),
                "q" => o.q = Some(parse_value(key, value)?),
                "table" => o.table = Some(PathBuf::from(value)),
                "tail" => o.tail = Some(parse_tail(value)?),
                "beta0_mode" => {
                    o.beta0_mode = Some(
                        value
                            .parse()
                            .map_err(|e: qmeasure::Error| CliError::Config(e.to_string()))?,
                    )
                }
                "k" => o.k = Some(parse_value(key, value)?),
                "nmax" => o.n_max = Some(parse_value(key, value)?),
                "rel_tol" => o.rel_tol = Some(parse_value(key, value)?),
                "c_grid" => o.c_grid = Some(parse_value(key, value)?),
                "degree" => o.degree = Some(parse_value(key, value)?),
                "lin_max" => o.lin_max = Some(parse_value(key, value)?),
                "function" => o.function = Some(value.parse()?),
                "suite" => o.suite = Some(value.parse()?),
                "out" => o.out = Some(PathBuf::from(value)),
                _ => return Err(CliError::Config(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        Ok(o)
    }

    /// Applies the set fields to `config`. Giving `a` or `q` selects the
    /// example family; giving a table selects the table.
    pub fn apply(&self, config: &mut RunConfig) -> Result<(), CliError> {
        if self.table.is_some() && (self.a.is_some() || self.q.is_some()) {
            return Err(CliError::Config("`table` conflicts with `a`/`q`".into()));
        }
        if let Some(path) = &self.table {
            let tail = match &config.family {
                FamilySpec::Table { tail, .. } => *tail,
                FamilySpec::Example { .. } => TailExtension::None,
            };
            config.family = FamilySpec::Table {
                path: path.clone(),
                tail,
            };
        }
        if self.a.is_some() || self.q.is_some() {
            let (a0, q0) = match config.family {
                FamilySpec::Example { a, q } => (a, q),
                FamilySpec::Table { .. } => (0.3, 0.25),
            };
            config.family = FamilySpec::Example {
                a: self.a.unwrap_or(a0),
                q: self.q.unwrap_or(q0),
            };
        }
        if let Some(t) = self.tail {
            match &mut config.family {
                FamilySpec::Table { tail, .. } => *tail = t,
                FamilySpec::Example { .. } => {
                    return Err(CliError::Config("`tail` only applies to a coefficient table".into()))
                }
            }
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    config.$field = v.clone();
                }
            )*};
        }
        set!(beta0_mode, k, n_max, rel_tol, c_grid, degree, lin_max, function, suite, out);
        Ok(())
    }
}

impl RunConfig {
    /// Defaults, then the seed file (if any), then the flags.
    pub fn resolve(seed: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut config = RunConfig::default();
        if let Some(path) = seed {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Overrides::parse_seed(&text)?.apply(&mut config)?;
        }
        flags.apply(&mut config)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("`{name}` must be positive, got {v}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("c_grid", self.c_grid)?;
        if self.k == 0 {
            return Err(CliError::Config("`k` must be at least 1".into()));
        }
        if self.n_max < 2 {
            return Err(CliError::Config("`nmax` must be at least 2".into()));
        }
        if let FamilySpec::Example { a, q } = self.family {
            for (name, v) in [("a", a), ("q", q)] {
                if !(v > 0.0 && v < 1.0) {
                    return Err(CliError::Config(format!("`{name}` = {v} outside (0, 1)")));
                }
            }
        }
        Ok(())
    }

    /// Canonical `key=value` lines. Parsing them back yields an equal config.
    pub fn canonical(&self) -> String {
        self.lines(true).iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Canonical pairs; `out` is left out when `with_out` is false so that
    /// artifacts do not depend on where they are written.
    pub fn lines(&self, with_out: bool) -> Vec<(&'static str, String)> {
        let mut lines = Vec::new();
        match &self.family {
            FamilySpec::Example { a, q } => {
                lines.push(("a", a.to_string()));
                lines.push(("q", q.to_string()));
            }
            FamilySpec::Table { path, tail } => {
                lines.push(("table", path.display().to_string()));
                lines.push(("tail", tail_name(*tail).to_string()));
            }
        }
        lines.extend([
            ("beta0_mode", self.beta0_mode.to_string()),
            ("k", self.k.to_string()),
            ("nmax", self.n_max.to_string()),
            ("rel_tol", self.rel_tol.to_string()),
            ("c_grid", self.c_grid.to_string()),
            ("degree", self.degree.to_string()),
            ("lin_max", self.lin_max.to_string()),
            ("function", self.function.to_string()),
            ("suite", self.suite.to_string()),
        ]);
        if with_out {
            lines.push(("out", self.out.display().to_string()));
        }
        lines
    }

    pub fn from_canonical(text: &str) -> Result<Self, CliError> {
        let mut config = RunConfig::default();
        Overrides::parse_seed(text)?.apply(&mut config)?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_canonical(&c.canonical()).unwrap(), c);
    }

    #[test]
    fn table_config_round_trips() {
        let c = RunConfig {
            family: FamilySpec::Table {
                path: "coeffs.csv".into(),
                tail: TailExtension::Geometric,
            },
            rel_tol: 1e-13,
            function: FunctionSelection::All,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_canonical(&c.canonical()).unwrap(), c);
    }

    #[test]
    fn flags_win_over_seed() {
        let seed = Overrides::parse_seed("a = 0.5\nq=0.2 # comment\nk=12\n").unwrap();
        let flags = Overrides {
            a: Some(0.4),
            ..Overrides::default()
        };
        let mut c = RunConfig::default();
        seed.apply(&mut c).unwrap();
        flags.apply(&mut c).unwrap();
        assert_eq!(c.family, FamilySpec::Example { a: 0.4, q: 0.2 });
        assert_eq!(c.k, 12);
    }

    #[test]
    fn rejects_bad_seeds() {
        for text in ["k=1\nk=2", "bogus=1", "k", "rel_tol=abc", "suite=nope"] {
            assert!(Overrides::parse_seed(text).is_err(), "{text}");
        }
        let c = RunConfig {
            rel_tol: 0.0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
