//! `check`, `measure`, `expand`, `lebesgue` and `linearize`.

use std::fs;
use std::path::{Path, PathBuf};

use qmeasure::analysis::{linearization_rows, KernelChoice, LinearizationTable, SupportBasis};
use qmeasure::io::{self, Cell};
use qmeasure::spectrum::{measure_with_limit, DiscreteMeasure};
use qmeasure::{check_hypotheses, HypothesisReport, RecurrenceCoefficients};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::config::{FamilySpec, RunConfig};
use crate::{CliError, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK};

/// The configuration as echoed into artifacts: canonical keys in order,
/// without the output directory.
pub struct ConfigEcho(Vec<(&'static str, String)>);

impl ConfigEcho {
    pub fn new(config: &RunConfig) -> Self {
        ConfigEcho(config.lines(false))
    }
}

impl Serialize for ConfigEcho {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

pub fn build_coefficients(config: &RunConfig) -> Result<RecurrenceCoefficients, CliError> {
    match &config.family {
        FamilySpec::Example { a, q } => {
            RecurrenceCoefficients::example_family(*a, *q, config.beta0_mode).map_err(CliError::Ingest)
        }
        FamilySpec::Table { path, tail } => {
            let rows = io::read_table_file(path).map_err(CliError::Ingest)?;
            RecurrenceCoefficients::from_table(&rows, *tail, config.beta0_mode).map_err(CliError::Ingest)
        }
    }
}

pub fn build_measure(config: &RunConfig, coeffs: &RecurrenceCoefficients) -> Result<DiscreteMeasure, CliError> {
    Ok(measure_with_limit(coeffs, config.k, config.rel_tol, config.n_max)?)
}

/// Writes `contents` to `name` inside the output directory.
pub fn write_artifact(config: &RunConfig, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(&config.out).map_err(io_err(&config.out))?;
    let path = config.out.join(name);
    fs::write(&path, contents).map_err(io_err(&path))?;
    Ok(path)
}

#[derive(Serialize)]
struct HypothesesJson<'a> {
    config: ConfigEcho,
    #[serde(flatten)]
    report: &'a HypothesisReport,
}

pub fn hypotheses_exit_code(report: &HypothesisReport) -> i32 {
    if report.any_fails() {
        EXIT_FAIL
    } else if report.all_hold() {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    }
}

pub fn write_hypotheses(config: &RunConfig, report: &HypothesisReport) -> Result<(), CliError> {
    let json = HypothesesJson {
        config: ConfigEcho::new(config),
        report,
    };
    write_artifact(config, "hypotheses.json", &io::to_json_string(&json))?;
    Ok(())
}

pub fn cmd_check(config: &RunConfig) -> Result<i32, CliError> {
    let coeffs = build_coefficients(config)?;
    let report = check_hypotheses(&coeffs, config.k, config.c_grid);
    write_hypotheses(config, &report)?;
    for (id, verdict) in &report.verdicts {
        println!("{id:<18} {:?}", verdict.status);
    }
    let c = &report.c_interval;
    if c.is_empty() {
        println!("c-interval: empty");
    } else {
        println!(
            "c-interval: {}{}, {}{}",
            if c.lo_open { "(" } else { "[" },
            c.lo,
            c.hi,
            if c.hi_open { ")" } else { "]" }
        );
    }
    if let Some(cf) = &report.closed_form {
        println!(
            "feasibility: a/(1+a^2) = {} vs sqrt(q)(1-q)/(1+q^2) = {}",
            cf.feasibility_lhs, cf.feasibility_rhs
        );
    }
    Ok(hypotheses_exit_code(&report))
}

#[derive(Serialize)]
struct MeasureJson<'a> {
    config: ConfigEcho,
    #[serde(flatten)]
    measure: &'a DiscreteMeasure,
    total_mass: f64,
}

/// `measure.json` and `support.csv`.
pub fn write_measure(config: &RunConfig, m: &DiscreteMeasure) -> Result<(), CliError> {
    let json = MeasureJson {
        config: ConfigEcho::new(config),
        measure: m,
        total_mass: m.total_mass(),
    };
    write_artifact(config, "measure.json", &io::to_json_string(&json))?;
    write_artifact(config, "support.csv", &io::support_csv(m))?;
    Ok(())
}

pub fn write_lebesgue(config: &RunConfig, constants: &[f64]) -> Result<(), CliError> {
    let rows: Vec<(usize, f64)> = constants.iter().copied().enumerate().collect();
    write_artifact(config, "lebesgue.csv", &io::sequence_csv("lambda", &rows))?;
    Ok(())
}

pub fn cmd_measure(config: &RunConfig) -> Result<i32, CliError> {
    let coeffs = build_coefficients(config)?;
    let m = build_measure(config, &coeffs)?;
    write_measure(config, &m)?;
    println!(
        "{} support points from truncation N={}; their mass {}, tail bound {:e}",
        m.len(),
        m.truncation_size,
        m.masses.iter().sum::<f64>(),
        m.tail_bound
    );
    Ok(EXIT_OK)
}

pub fn cmd_expand(config: &RunConfig) -> Result<i32, CliError> {
    let coeffs = build_coefficients(config)?;
    let m = build_measure(config, &coeffs)?;
    let basis = SupportBasis::new(&coeffs, &m, config.degree)?;
    let degrees: Vec<usize> = (0..=config.degree).collect();
    for tf in config.function.functions() {
        let f = tf.bind(&m);
        let errors = basis.sup_errors(&*f, &degrees)?;
        let rows: Vec<(usize, f64)> = degrees.iter().copied().zip(errors.iter().copied()).collect();
        write_artifact(
            config,
            &format!("expansion_{tf}.csv"),
            &io::sequence_csv("sup_error", &rows),
        )?;
        println!("{tf}: sup error {:e} at n={}", errors[config.degree], config.degree);
    }
    Ok(EXIT_OK)
}

pub fn cmd_lebesgue(config: &RunConfig) -> Result<i32, CliError> {
    let coeffs = build_coefficients(config)?;
    let m = build_measure(config, &coeffs)?;
    let basis = SupportBasis::new(&coeffs, &m, config.degree + 1)?;
    let consts = basis.lebesgue_constants(config.degree, KernelChoice::default())?;
    write_lebesgue(config, &consts)?;
    let max = consts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("max Lebesgue constant for n <= {}: {max}", config.degree);
    Ok(EXIT_OK)
}

/// All `g(n, m, ·)` with `n, m <= lin_max`, ordered by `(n, m)`.
pub fn linearization_tables(
    coeffs: &RecurrenceCoefficients,
    lin_max: usize,
) -> Result<Vec<LinearizationTable>, CliError> {
    let mut tables = Vec::with_capacity((lin_max + 1) * (lin_max + 1));
    for m in 0..=lin_max {
        tables.extend(linearization_rows(coeffs, lin_max, m)?);
    }
    tables.sort_by_key(|t| (t.n, t.m));
    Ok(tables)
}

/// Most negative `g / max|g|` over all tables, and largest `|row sum - 1|`.
pub fn linearization_summary(tables: &[LinearizationTable]) -> (f64, f64) {
    let min_rel = tables
        .iter()
        .map(|t| t.min() / t.max_abs())
        .fold(f64::INFINITY, f64::min);
    let row_err = tables.iter().map(|t| (t.row_sum() - 1.0).abs()).fold(0.0, f64::max);
    (min_rel, row_err)
}

pub fn cmd_linearize(config: &RunConfig) -> Result<i32, CliError> {
    let coeffs = build_coefficients(config)?;
    let tables = linearization_tables(&coeffs, config.lin_max)?;
    let rows: Vec<Vec<Cell>> = tables
        .iter()
        .flat_map(|t| {
            t.values
                .iter()
                .enumerate()
                .map(move |(k, g)| vec![Cell::Index(t.n), Cell::Index(t.m), Cell::Index(k), Cell::Float(*g)])
        })
        .collect();
    write_artifact(
        config,
        "linearization.csv",
        &io::to_csv_string(&["n", "m", "k", "g"], &rows),
    )?;
    let (min_rel, row_err) = linearization_summary(&tables);
    println!(
        "n, m <= {}: min g/max|g| = {min_rel:e}, max |row sum - 1| = {row_err:e}",
        config.lin_max
    );
    Ok(EXIT_OK)
}
