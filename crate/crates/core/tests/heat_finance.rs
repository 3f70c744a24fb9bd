use std::f64::consts::PI;

use quadbench::heat::{default_t_grid, default_x_grid};
use quadbench::{
    bias_profile, finance_f, integrate_contour, mode, phi_exact, Complex, FinanceParams, FourierSeries, HeatConfig,
    IntegrandVariant, PrecisionContext, QuarticParams, RuleId, Tolerances,
};

fn config(variant: IntegrandVariant, rule: RuleId, delta: f64, modes: u32) -> HeatConfig {
    HeatConfig::new(0.1, modes, rule, variant, QuarticParams::new(delta).unwrap()).unwrap()
}

fn clean(modes: u32) -> FourierSeries {
    FourierSeries::compute(&config(IntegrandVariant::QuarticHighPrec, RuleId::Gk15, 100000.0, modes)).unwrap()
}

#[test]
fn coefficients_follow_the_cubic_envelope() {
    // phi''(+-1) = 8 gives |A_n| -> 16 / m^3 with m = (2n - 1) pi / 2, and the
    // next term 48 / m^5 only pulls |A_n| below that for n >= 2
    let series = clean(50);
    for (i, &a) in series.coefficients.iter().enumerate().skip(3) {
        let m = (2 * i + 1) as f64 * PI / 2.0;
        let envelope = 16.0 / m.powi(3);
        assert!(a.abs() <= envelope + 1e-13, "n={}: {a:e} above {envelope:e}", i + 1);
        assert!(a.abs() >= 0.9 * envelope, "n={}: {a:e} far below {envelope:e}", i + 1);
    }
}

#[test]
fn coefficients_match_the_closed_form() {
    let series = clean(50);
    for (i, &a) in series.coefficients.iter().enumerate() {
        let m = (2 * i + 1) as f64 * PI / 2.0;
        let closed = -16.0 / m.powi(3) + 48.0 / m.powi(5);
        assert!((a - closed).abs() <= 1e-13, "n={}: {a} vs {closed}", i + 1);
    }
}

#[test]
fn high_precision_rules_agree_on_coefficients() {
    let gk = clean(10);
    let lob = FourierSeries::compute(&config(
        IntegrandVariant::QuarticHighPrec,
        RuleId::AdaptiveLobatto,
        100000.0,
        10,
    ))
    .unwrap();
    for (n, (a, b)) in gk.coefficients.iter().zip(&lob.coefficients).enumerate() {
        assert!((a - b).abs() <= 1e-12, "n={}: {a} vs {b}", n + 1);
    }
}

#[test]
fn solution_vanishes_on_the_boundary() {
    let series = clean(50);
    let total: f64 = series.coefficients.iter().map(|a| a.abs()).sum();
    for t in default_t_grid() {
        for x in [-1.0, 1.0] {
            assert!(series.evaluate(t, x).abs() <= 1e-12 * total, "t={t} x={x}");
        }
    }
}

#[test]
fn sup_norm_decays_in_time() {
    let series = clean(50);
    let x = default_x_grid();
    let sups: Vec<f64> = [0.0, 0.25, 0.5, 1.0]
        .iter()
        .map(|&t| x.iter().map(|&x| series.evaluate(t, x).abs()).fold(0.0, f64::max))
        .collect();
    assert!(sups.windows(2).all(|w| w[0] >= w[1]), "{sups:?}");
}

#[test]
fn single_mode_series_is_the_mode() {
    let series = clean(1);
    let a1 = series.coefficients[0];
    for t in [0.0, 0.3, 1.0] {
        for x in [-0.7, 0.0, 0.4] {
            assert_eq!(series.evaluate(t, x), mode(1, t, x, a1, 0.1));
        }
    }
}

#[test]
fn collapsed_initial_condition_gives_a_zero_solution() {
    let series =
        FourierSeries::compute(&config(IntegrandVariant::QuarticDouble, RuleId::Gk15, 250000.0, 20)).unwrap();
    assert!(series.coefficients.iter().all(|&a| a == 0.0));
    let grid = series.grid(&[0.0, 0.5, 1.0], &default_x_grid()).unwrap();
    assert!(grid.u.iter().flatten().all(|&u| u == 0.0));
}

#[test]
fn bias_is_largest_at_the_start() {
    let t = default_t_grid();
    let x = default_x_grid();
    let good = clean(50).grid(&t, &x).unwrap();
    let bad = FourierSeries::compute(&config(IntegrandVariant::QuarticDouble, RuleId::Gk15, 100000.0, 50))
        .unwrap()
        .grid(&t, &x)
        .unwrap();
    let profile = bias_profile(&good, &bad).unwrap();
    assert!(profile[0].1 > profile[100].1, "{:?} vs {:?}", profile[0], profile[100]);
    let t0_error = x
        .iter()
        .zip(bad.row(0))
        .map(|(&x, &u)| (u - phi_exact(x)).abs())
        .fold(0.0, f64::max);
    assert!(t0_error > 0.1);
}

#[test]
fn contour_is_stable_under_more_digits() {
    let p = FinanceParams::reference(1e-3);
    let tol = Tolerances::default();
    let run = |digits| {
        integrate_contour(&p, 100.0, RuleId::Gk15, &PrecisionContext::high_precision(digits).unwrap(), tol)
            .unwrap()
            .value()
    };
    let r32 = run(32);
    let r64 = run(64);
    assert!((r32 - r64).abs() <= 1e-13 * r32.abs(), "{r32} vs {r64}");
}

#[test]
fn vanishing_jump_intensity_is_continuous() {
    let tol = Tolerances::default();
    let ctx = PrecisionContext::double();
    let mut off = FinanceParams::reference(1e-3);
    off.lambda = 0.0;
    let mut tiny = off;
    tiny.lambda = 1e-12;
    let a = integrate_contour(&off, 100.0, RuleId::Gk15, &ctx, tol).unwrap();
    let b = integrate_contour(&tiny, 100.0, RuleId::Gk15, &ctx, tol).unwrap();
    let scale = tol.target(a.value().abs());
    assert!((a.value() - b.value()).abs() <= scale, "{} vs {}", a.value(), b.value());
}

#[test]
fn degenerate_jumps_match_direct_evaluation() {
    // sigma_J = 0: the jump size transform is exp(i mu_J k), so the whole
    // jump factor at -k is exp(lambda tau (exp(-i mu_J k) - 1) + i lambda beta k tau)
    let mut p = FinanceParams::reference(1e-3);
    p.sigma_j = 0.0;
    let mut no_jumps = p;
    no_jumps.lambda = 0.0;
    let ctx = PrecisionContext::double();
    let beta = p.mu_j.exp() - 1.0;
    for u in [0.5, 3.0, 20.0] {
        let k = Complex::new(-u, -0.5);
        let i = Complex::new(0.0, 1.0);
        let jump_size = (i * k).scale(p.mu_j).exp();
        let lt = p.lambda * p.tau;
        let factor = ((jump_size - Complex::new(1.0, 0.0)).scale(lt) - (i * k).scale(lt * beta)).exp();
        let with = finance_f(u, &p, &ctx).unwrap();
        let without = finance_f(u, &no_jumps, &ctx).unwrap();
        let direct = without * factor;
        assert!((with - direct).abs() <= 1e-12 * direct.abs(), "u={u}: {with} vs {direct}");
    }
}
