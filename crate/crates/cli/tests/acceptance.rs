//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

// oracle values are kept at the precision they were computed
#![allow(clippy::excessive_precision)]

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use common::ExactFamily;
use num_traits::ToPrimitive;
use qmeasure::analysis::{
    linearization, linearization_rows, remark1_fixture_stats, verify_theorem1, verify_tms, KernelChoice, SupportBasis,
    Theorem1Options,
};
use qmeasure::polyeval::eval_on_support;
use qmeasure::spectrum::{measure, moment, quadrature, truncated_zeros, DiscreteMeasure};
use qmeasure::{check_hypotheses, Beta0Mode, HypothesisReport, RecurrenceCoefficients};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn example() -> RecurrenceCoefficients {
    RecurrenceCoefficients::example_family(0.3, 0.25, Beta0Mode::GammaOnly).unwrap()
}

fn report() -> &'static HypothesisReport {
    static R: OnceLock<HypothesisReport> = OnceLock::new();
    R.get_or_init(|| check_hypotheses(&example(), 60, 1e-4))
}

fn measure60() -> &'static DiscreteMeasure {
    static M: OnceLock<DiscreteMeasure> = OnceLock::new();
    M.get_or_init(|| measure(&example(), 60, 1e-10).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn feasibility() -> Outcome {
    let q: f64 = 0.25;
    let pass = report();
    ensure!(pass.all_hold(), "a=0.3: {:?}", pass.verdicts);
    let cf = pass.closed_form.unwrap();
    ensure!(
        rel(cf.feasibility_lhs, 0.27523) < 1e-4 && rel(cf.feasibility_rhs, 0.35294) < 1e-4,
        "a=0.3 thresholds {} vs {}",
        cf.feasibility_lhs,
        cf.feasibility_rhs
    );
    ensure!(cf.feasibility_lhs < cf.feasibility_rhs, "a=0.3 feasibility test");
    let c = pass.c_interval;
    let (lo, hi) = ((1.0 + q) / (1.0 + q * q), 1.0 / q);
    ensure!(
        !c.is_empty() && c.lo >= lo && c.hi < hi,
        "c-interval ({}, {}]",
        c.lo,
        c.hi
    );

    let coeffs = RecurrenceCoefficients::example_family(0.99, q, Beta0Mode::GammaOnly).unwrap();
    let fail = check_hypotheses(&coeffs, 60, 1e-4);
    let cf = fail.closed_form.unwrap();
    ensure!(
        rel(cf.feasibility_lhs, 0.49997) < 1e-4 && cf.feasibility_lhs >= cf.feasibility_rhs,
        "a=0.99 thresholds {} vs {}",
        cf.feasibility_lhs,
        cf.feasibility_rhs
    );
    ensure!(fail.any_fails() && fail.c_interval.is_empty(), "a=0.99 should fail");
    ensure!(!fail.verdict("offdiag_bound").holds(), "a=0.99 offdiag_bound");
    Ok(format!("c in ({:.5}, {:.5}]; a=0.99 fails offdiag_bound", c.lo, c.hi))
}

fn small_n_spectrum() -> Outcome {
    let coeffs = example();
    // eigenvalues of [[1, 0.15], [0.15, 0.2725]]: (tr ∓ √(tr² - 4 det)) / 2
    let closed = [0.242_785_818_021_512_916_26, 1.029_714_181_978_487_083_7];
    let two = truncated_zeros(&coeffs, 2).map_err(|e| e.to_string())?;
    for (z, c) in two.iter().zip(closed) {
        ensure!(rel(*z, c) <= 1e-12, "N=2: {z} vs {c}");
    }
    let family = ExactFamily::new(14);
    for n in 1..=12 {
        let zeros = truncated_zeros(&coeffs, n).map_err(|e| e.to_string())?;
        for (idx, &x) in zeros.iter().enumerate() {
            ensure!(
                family.certifies(n, idx, x, 1e-10),
                "N={n} idx={idx} x={x:e} not bracketed"
            );
        }
    }
    Ok(format!(
        "N=2 zeros {:.15}, {:.15}; N<=12 certified by exact Sturm counts",
        two[0], two[1]
    ))
}

fn quadrature_duality() -> Outcome {
    let coeffs = example();
    let mut worst_w = 0.0f64;
    let mut worst_m = 0.0f64;
    for n in 1..=30 {
        let rule = quadrature(&coeffs, n).map_err(|e| e.to_string())?;
        worst_w = worst_w.max(rule.max_weight_discrepancy());
        if n <= 15 {
            for m in 0..2 * n {
                let exact = moment(&coeffs, m, m + 2).map_err(|e| e.to_string())?;
                worst_m = worst_m.max(rel(rule.moment(m as u32), exact));
            }
        }
    }
    ensure!(worst_w <= 1e-8, "weight discrepancy {worst_w:e}");
    ensure!(worst_m <= 1e-9, "moment error {worst_m:e}");
    Ok(format!("weight discrepancy {worst_w:.2e}, moment error {worst_m:.2e}"))
}

fn theorem1_bounds() -> Outcome {
    let coeffs = example();
    let r = report();
    let m = measure60();
    let c = r.c_mid().ok_or("empty c-interval")?;
    let q = r.q_est;
    for n in 2..=25 {
        let x = m.xi(n);
        ensure!(c * coeffs.beta(n) <= x, "lower bound at n={n}");
        ensure!(
            x <= coeffs.beta(n - 1) + coeffs.beta(n) - c * coeffs.beta(n + 1),
            "upper bound at n={n}"
        );
    }
    let bound = (1.0 + q - c * q * q) / c;
    let start = r.n_est.ok_or("no N_est")?.max(1);
    let mut worst = 0.0f64;
    for n in start..m.len() {
        worst = worst.max(m.xi(n + 1) / m.xi(n));
    }
    ensure!(worst <= bound, "ratio {worst} > {bound}");
    let at_15 = (1.0 + q - 1.5 * q * q) / 1.5;
    ensure!((at_15 - 0.770_833_333_333_333).abs() < 1e-12, "bound at c=1.5: {at_15}");
    Ok(format!("c={c:.5}, max ratio {worst:.6} <= {bound:.6}"))
}

fn theorem1_scalings() -> Outcome {
    let options = Theorem1Options {
        bound_range: Some((2, 25)),
        scaling_range: Some((5, 20)),
        ..Theorem1Options::default()
    };
    let t = verify_theorem1(&example(), report(), measure60(), &options).map_err(|e| e.to_string())?;
    let support = &t.checks["support_scaling"];
    let tail = &t.checks["tail_scaling"];
    ensure!(
        support.holds && support.statistic <= 10.0,
        "support scaling {}",
        support.detail
    );
    ensure!(tail.holds && tail.statistic <= 10.0, "tail scaling {}", tail.detail);
    let cf = report().closed_form.unwrap();
    Ok(format!(
        "windows {:.4} and {:.4}; s_est={:.4} (a^-2={:.4}, (a^2 q)^-1={:.4})",
        support.statistic, tail.statistic, t.s_est, cf.s_printed, cf.s_direct
    ))
}

fn boundedness() -> Outcome {
    let coeffs = example();
    let m = measure60();
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let e = eval_on_support(&coeffs, 60, m.xi(k), m.truncation_size).map_err(|e| e.to_string())?;
        for n in 0..=60 {
            worst = worst.max(e.r(n).abs());
        }
    }
    ensure!(worst <= 1.0 + 1e-10, "max |R_n(xi_k)| = {worst}");
    Ok(format!("max |R_n(xi_k)| = {worst}"))
}

fn nonnegative_linearization() -> Outcome {
    let coeffs = example();
    let mut min_rel = f64::INFINITY;
    let mut row_err = 0.0f64;
    for m in 0..=25 {
        for t in linearization_rows(&coeffs, 25, m).map_err(|e| e.to_string())? {
            min_rel = min_rel.min(t.min() / t.max_abs());
            row_err = row_err.max((t.row_sum() - 1.0).abs());
        }
    }
    ensure!(min_rel >= -1e-10, "min g/max|g| = {min_rel:e}");
    ensure!(row_err <= 1e-10, "row sum error {row_err:e}");
    let family = ExactFamily::new(14);
    for n in 0..=6 {
        for m in 0..=6 {
            let table = linearization(&coeffs, n, m).map_err(|e| e.to_string())?;
            let scale = table.max_abs();
            for (k, g) in family.linearization(n, m).iter().enumerate() {
                let g = g.to_f64().unwrap();
                ensure!(
                    (table.g(k) - g).abs() <= 1e-12 * scale,
                    "g({n},{m},{k}) = {} vs {g}",
                    table.g(k)
                );
            }
        }
    }
    Ok(format!(
        "min g/max|g| = {min_rel:e}, row sum error {row_err:.1e}, n,m<=6 match oracle"
    ))
}

fn lebesgue_proxy() -> Outcome {
    let coeffs = example();
    let m = measure60();
    let basis = SupportBasis::new(&coeffs, m, 41).map_err(|e| e.to_string())?;
    let consts = basis
        .lebesgue_constants(40, KernelChoice::default())
        .map_err(|e| e.to_string())?;
    let mut sorted = consts[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let ratio = sorted[sorted.len() - 1] / sorted[sorted.len() / 2];
    ensure!(ratio <= 3.0, "max/median = {ratio}");

    let mut proj = 0.0f64;
    for n in 0..=20 {
        for k in 0..=n {
            let e = basis.expand(&basis.r_values(k), n).map_err(|e| e.to_string())?;
            proj = proj.max(e.sup_error);
        }
    }
    ensure!(proj <= 1e-9, "projection error {proj:e}");

    let errs = basis
        .sup_errors(&f64::sqrt, &[5, 10, 20, 40])
        .map_err(|e| e.to_string())?;
    ensure!(errs.windows(2).all(|w| w[1] <= w[0]), "sqrt errors {errs:?}");
    Ok(format!(
        "max/median {ratio:.4}, projection error {proj:.1e}, sqrt errors {:.2e} .. {:.2e}",
        errs[0], errs[3]
    ))
}

fn tms() -> Outcome {
    let coeffs = example();
    let mut min_margin = f64::INFINITY;
    for n in 3..=30 {
        let t = verify_tms(&coeffs, measure60(), n).map_err(|e| e.to_string())?;
        ensure!(t.holds && t.margin > 0.0, "N={n}: {} vs {}", t.lhs, t.rhs);
        min_margin = min_margin.min(t.margin);
    }
    Ok(format!("smallest margin {min_margin:e}"))
}

fn remark1() -> Outcome {
    let s = remark1_fixture_stats(40).map_err(|e| e.to_string())?;
    ensure!(s.total_mass == 1.0, "total mass {}", s.total_mass);
    ensure!(s.tail_window_ratio <= 4.0, "tail window {}", s.tail_window_ratio);
    ensure!(s.odd_scaled.iter().all(|v| *v == 0.75), "odd {:?}", s.odd_scaled);
    ensure!(
        s.even_scaled.windows(2).all(|w| w[1] == w[0] / 2.0),
        "even {:?}",
        s.even_scaled
    );
    Ok(format!("tail window {:.4}", s.tail_window_ratio))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for name in ["first", "second"] {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qmeasure"))
            .args(["verify", "--a", "0.3", "--q", "0.25", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            status.status.code() == Some(0),
            "verify exited with {:?}",
            status.status.code()
        );
        runs.push(read_dir_sorted(&out));
    }
    ensure!(!runs[0].is_empty(), "no artifacts written");
    ensure!(runs[0] == runs[1], "artifacts differ between runs");
    let bytes: usize = runs[0].iter().map(|(_, b)| b.len()).sum();
    Ok(format!("{} artifact(s), {bytes} bytes identical", runs[0].len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("hypothesis feasibility", feasibility),
        ("small-N spectral oracle", small_n_spectrum),
        ("quadrature dual weights and exactness", quadrature_duality),
        ("two-sided support bound and ratio", theorem1_bounds),
        ("support and tail scalings", theorem1_scalings),
        ("boundedness on the support", boundedness),
        ("nonnegative linearization", nonnegative_linearization),
        ("Lebesgue constants and projection", lebesgue_proxy),
        ("Tchebyshev-Markov-Stieltjes bracketing", tms),
        ("explicit measure fixture", remark1),
        ("reproducible verify artifacts", reproducibility),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
