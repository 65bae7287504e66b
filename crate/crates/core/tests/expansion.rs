// oracle values are kept at the precision they were computed
#![allow(clippy::excessive_precision)]

mod common;

use approx::assert_relative_eq;
use common::example;
use qmeasure::analysis::{
    fourier_coefficient, lebesgue_constant, lebesgue_function, partial_sum, remark1_fixture_stats, verify_theorem1,
    verify_tms, KernelChoice, SupportBasis, TestFunction, Theorem1Options,
};
use qmeasure::polyeval::{eval_on_support, eval_r, kernel_christoffel_darboux, kernel_direct, kernel_scale};
use qmeasure::spectrum::{measure, DiscreteMeasure};
use qmeasure::{check_hypotheses, Error};
use std::sync::OnceLock;

fn measure60() -> &'static DiscreteMeasure {
    static M: OnceLock<DiscreteMeasure> = OnceLock::new();
    M.get_or_init(|| measure(&example(), 60, 1e-10).unwrap())
}

#[test]
fn sqrt_expansion_golden_errors() {
    // mpmath oracle, sup over {0} ∪ top-60 support (attained at 0)
    let golden = [
        (5, 0.018_755_288_570_485_789_408),
        (10, 0.000_585_895_795_753_182_741_93),
        (20, 5.721_636_654_144_126_090_6e-7),
    ];
    let coeffs = example();
    let basis = SupportBasis::new(&coeffs, measure60(), 40).unwrap();
    for (n, g) in golden {
        let e = basis.partial_sum(&f64::sqrt, n).unwrap().sup_error;
        // round-off floor of the sum is ~1e-16 absolute
        assert!((e - g).abs() <= 1e-10 * g + 1e-15, "n={n}: {e} vs {g}");
    }
    let e40 = basis.partial_sum(&f64::sqrt, 40).unwrap().sup_error;
    assert!((e40 - 5.456_577_924_864_045_5e-13).abs() < 1e-15);
}

#[test]
fn battery_errors_non_increasing() {
    let coeffs = example();
    let m = measure60();
    let basis = SupportBasis::new(&coeffs, m, 40).unwrap();
    for tf in TestFunction::ALL {
        let f = tf.bind(m);
        let errs = basis.sup_errors(&*f, &[5, 10, 20, 40]).unwrap();
        assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{tf}: {errs:?}");
    }
}

#[test]
fn coefficients_of_basis_polynomials() {
    let coeffs = example();
    let m = measure60();
    let one = fourier_coefficient(m, &coeffs, &|_| 1.0, 0).unwrap();
    assert!((one.value - 1.0).abs() <= one.remainder + 1e-14);
    let basis = SupportBasis::new(&coeffs, m, 8).unwrap();
    let r1 = basis.r_values(1);
    assert_relative_eq!(
        basis.coefficient_of_values(&r1, 1).unwrap().value,
        0.0225,
        max_relative = 1e-13
    );
    for k in [0, 2, 3, 7] {
        let a = basis.coefficient_of_values(&r1, k).unwrap();
        assert!(a.value.abs() <= a.remainder + 1e-10, "k={k}");
    }
}

#[test]
fn projection_reproduces_basis_polynomials() {
    let coeffs = example();
    let basis = SupportBasis::new(&coeffs, measure60(), 20).unwrap();
    for n in 0..=20 {
        for m in 0..=n {
            let e = basis.expand(&basis.r_values(m), n).unwrap();
            assert!(e.sup_error <= 1e-9, "n={n} m={m}: {}", e.sup_error);
        }
    }
    // degree below m: orthogonality kills every retained term
    let r3 = basis.r_values(3);
    let e = basis.expand(&r3, 2).unwrap();
    assert!(e.values.iter().all(|v| v.abs() <= 1e-12));
    let max_r3 = r3.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!((e.sup_error - max_r3).abs() <= 1e-12);
}

#[test]
fn partial_sum_rejects_points_off_the_support() {
    let coeffs = example();
    let m = measure60();
    let ok = partial_sum(m, &coeffs, &f64::sqrt, 5, &[0.0, m.xi(3)]).unwrap();
    assert_eq!(ok.points.len(), 2);
    assert!(matches!(
        partial_sum(m, &coeffs, &f64::sqrt, 5, &[0.5]),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn coarse_measure_raises_precision_error() {
    let coeffs = example();
    let m = measure(&coeffs, 2, 1e-10).unwrap();
    assert!(matches!(
        fourier_coefficient(&m, &coeffs, &|_| 1.0, 0),
        Err(Error::Precision { .. })
    ));
}

#[test]
fn parseval_bound() {
    let coeffs = example();
    let m = measure60();
    let basis = SupportBasis::new(&coeffs, m, 40).unwrap();
    for tf in TestFunction::ALL {
        let f = tf.bind(m);
        for n in [0, 5, 20, 40] {
            let (lhs, rhs) = basis.parseval(&*f, n).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12), "{tf} n={n}");
        }
    }
}

#[test]
fn lebesgue_constants_golden_and_bounded() {
    let golden = [
        1.0,
        1.621_655_259_340_9,
        1.851_681_135_544_28,
        1.916_591_079_572_63,
        1.933_016_237_519_59,
        1.937_114_104_256_05,
        1.938_137_570_577_49,
        1.938_393_372_309_16,
        1.938_457_318_847_85,
        1.938_473_305_246_26,
        1.938_477_301_831_31,
    ];
    let coeffs = example();
    let basis = SupportBasis::new(&coeffs, measure60(), 41).unwrap();
    let consts = basis.lebesgue_constants(40, KernelChoice::default()).unwrap();
    for (c, g) in consts.iter().zip(golden) {
        assert_relative_eq!(*c, g, max_relative = 1e-12);
    }
    assert_relative_eq!(consts[40], 1.938_478_634_025_04, max_relative = 1e-12);
    let mut sorted = consts[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    assert!(sorted.last().unwrap() / median <= 3.0);
}

#[test]
fn lebesgue_paths_agree_and_bound_diagonal_term() {
    let coeffs = example();
    let m = measure60();
    let basis = SupportBasis::new(&coeffs, m, 21).unwrap();
    for i in 0..basis.len() {
        let switched = basis.lebesgue_function(20, i, KernelChoice::default()).unwrap();
        let direct = basis.lebesgue_function(20, i, KernelChoice::Direct).unwrap();
        assert!((switched.value - direct.value).abs() <= 1e-8 * direct.value);
        if i > 0 {
            let diag = basis.kernel(20, i, i, KernelChoice::Direct) * m.masses[i - 1];
            assert!(diag <= 1.0 + 1e-12);
            assert!(switched.value >= diag);
        }
        // single-term lower bound
        for j in [1, 2, 7] {
            let single = (basis.kernel(20, i, j, KernelChoice::Direct) * m.masses[j - 1]).abs();
            assert!(switched.value >= single);
        }
    }
    let l0 = lebesgue_function(m, &coeffs, 0, m.xi(4)).unwrap();
    assert_relative_eq!(l0, 1.0, max_relative = 1e-12);
    assert_relative_eq!(lebesgue_constant(m, &coeffs, 0).unwrap(), 1.0, max_relative = 1e-12);
}

#[test]
fn kernel_paths_agree_on_support() {
    let coeffs = example();
    let m = measure60();
    for n in [1, 10, 25, 40] {
        for (i, j) in [(1, 2), (1, 5), (3, 4), (2, 9)] {
            let ex = eval_on_support(&coeffs, n + 1, m.xi(i), m.truncation_size).unwrap();
            let ey = eval_on_support(&coeffs, n + 1, m.xi(j), m.truncation_size).unwrap();
            let direct = kernel_direct(&ex, &ey, n);
            let cd = kernel_christoffel_darboux(&coeffs, &ex, &ey, n);
            let scale = kernel_scale(&ex, &ey, n);
            assert!(((direct - cd).abs() / scale).to_f64() <= 1e-9, "n={n} ({i},{j})");
        }
    }
}

#[test]
fn basis_bounded_by_one_on_support() {
    let coeffs = example();
    let m = measure60();
    for k in 1..=20 {
        let e = eval_on_support(&coeffs, 60, m.xi(k), m.truncation_size).unwrap();
        for n in 0..=60 {
            assert!(e.r(n).abs() <= 1.0 + 1e-10, "k={k} n={n}");
            assert!(e.p(n).abs() <= coeffs.h(n).sqrt() * (1.0 + 1e-10).into());
        }
    }
}

#[test]
fn no_sign_change_above_largest_support_point() {
    let coeffs = example();
    let xi1 = measure60().xi(1);
    for n in 1..=30 {
        let sign = eval_r(&coeffs, n, xi1 * 1.001).unwrap().values_r[n].is_sign_negative();
        for step in 1..=50 {
            let x = xi1 * (1.0 + 0.02 * step as f64);
            let r = eval_r(&coeffs, n, x).unwrap().values_r[n];
            assert_eq!(r.is_sign_negative(), sign, "n={n} x={x}");
        }
    }
}

#[test]
fn at_most_one_sign_change_between_support_points() {
    let coeffs = example();
    let m = measure60();
    for n in 1..=20 {
        for k in 1..=12 {
            let (hi, lo) = (m.xi(k), m.xi(k + 1));
            let signs: Vec<bool> = (1..20)
                .map(|i| {
                    let t = i as f64 / 20.0;
                    let x = lo * (hi / lo).powf(t);
                    eval_r(&coeffs, n, x).unwrap().values_r[n].is_sign_negative()
                })
                .collect();
            let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            assert!(changes <= 1, "n={n} k={k}");
        }
    }
}

#[test]
fn theorem1_checks_hold_on_example() {
    let coeffs = example();
    let report = check_hypotheses(&coeffs, 60, 1e-4);
    let t = verify_theorem1(&coeffs, &report, measure60(), &Theorem1Options::default()).unwrap();
    assert!(t.all_hold(), "{t:?}");
    let narrow = Theorem1Options {
        bound_range: Some((2, 25)),
        scaling_range: Some((5, 20)),
        ..Theorem1Options::default()
    };
    let t = verify_theorem1(&coeffs, &report, measure60(), &narrow).unwrap();
    assert!(t.all_hold());
    assert_eq!(t.checks["spectral_bounds"].range, (2, 25));
    // at c = 1.5 the ratio bound is 0.770833...
    let q: f64 = 0.25;
    assert_relative_eq!(
        (1.0 + q - 1.5 * q * q) / 1.5,
        0.770_833_333_333_333_3,
        max_relative = 1e-15
    );
}

#[test]
fn theorem1_requires_feasible_interval() {
    let coeffs = qmeasure::RecurrenceCoefficients::example_family(0.99, 0.25, qmeasure::Beta0Mode::GammaOnly).unwrap();
    let report = check_hypotheses(&coeffs, 60, 1e-4);
    assert!(report.c_interval.is_empty());
    let err = verify_theorem1(&coeffs, &report, measure60(), &Theorem1Options::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(msg) if msg.contains("hypotheses not satisfied")));
}

#[test]
fn tms_holds_with_positive_margin() {
    let coeffs = example();
    for n in 3..=30 {
        let t = verify_tms(&coeffs, measure60(), n).unwrap();
        assert!(t.holds && t.margin > 0.0, "N={n}");
    }
    assert!(matches!(
        verify_tms(&coeffs, measure60(), 2),
        Err(Error::Precondition(_))
    ));
    let coarse = measure(&coeffs, 5, 1e-10).unwrap();
    assert!(matches!(verify_tms(&coeffs, &coarse, 10), Err(Error::Precision { .. })));
}

#[test]
fn remark1_statistics() {
    let s = remark1_fixture_stats(40).unwrap();
    assert_eq!(s.total_mass, 1.0);
    assert!(s.tail_window_ratio <= 4.0);
    assert!(s.odd_scaled.iter().all(|v| *v == 0.75));
    assert!(s.even_scaled.windows(2).all(|w| w[1] == w[0] / 2.0));
    assert!(s.holds(4.0));
}
