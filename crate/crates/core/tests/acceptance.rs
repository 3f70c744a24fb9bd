//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p quadbench --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quadbench::heat::{default_t_grid, default_x_grid, SolutionGrid};
use quadbench::quadrature::gk15_rule;
use quadbench::{
    basis_g, bias_profile, fourier_coefficient, integrate, integrate_contour, noise_floor, phi_exact,
    FinanceParams, FourierSeries, HeatConfig, HpReal, IntegrandVariant, PrecisionContext, Quartic, QuarticParams,
    Real, Recommendation, RuleId, Tolerances, Warning,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIXTEEN_FIFTEENTHS: f64 = 16.0 / 15.0;
const DELTAS: [f64; 4] = [1000.0, 10000.0, 100000.0, 250000.0];
const DIGITS: u32 = 32;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn quartic(variant: IntegrandVariant, delta: f64) -> Quartic {
    Quartic::new(variant, QuarticParams::new(delta).unwrap(), DIGITS).unwrap()
}

fn trapz(step: f64) -> RuleId {
    RuleId::trapezoid(step).unwrap()
}

fn all_rules() -> [RuleId; 4] {
    [RuleId::Gk15, RuleId::AdaptiveSimpson, RuleId::AdaptiveLobatto, trapz(0.01)]
}

/// Composite trapezoid of `(x^2 - 1)^2` on `x_i = -1 + i / 100` in integer arithmetic:
/// `(x_i^2 - 1)^2 = ((i - 100)^2 - 10^4)^2 / 10^8`.
fn trapezoid_rational_oracle() -> f64 {
    let mut twice_sum: i128 = 0;
    for i in 0..=200i128 {
        let j = i - 100;
        let term = (j * j - 10_000).pow(2);
        twice_sum += if i == 0 || i == 200 { term } else { 2 * term };
    }
    // value = twice_sum / 2 / 10^8 / 100
    twice_sum as f64 / 2e10
}

/// `A_n` of `(x^2 - 1)^2` by integrating by parts with `s = x + 1`:
/// `-16 / m^3 + 48 / m^5`, `m = (2n - 1) pi / 2`.
fn coefficient_oracle(n: u32) -> f64 {
    let m = (2 * n - 1) as f64 * PI / 2.0;
    -16.0 / m.powi(3) + 48.0 / m.powi(5)
}

fn exact_values() -> Outcome {
    let oracle = trapezoid_rational_oracle();
    let tol = Tolerances::default();
    let mut worst_adaptive = 0.0f64;
    let mut worst_trapz = 0.0f64;
    let mut cases = 0;
    let mut integrands = vec![quartic(IntegrandVariant::QuarticExact, 1.0)];
    integrands.extend(DELTAS.iter().map(|&d| quartic(IntegrandVariant::QuarticHighPrec, d)));
    for q in &integrands {
        for rule in all_rules() {
            let r = integrate(rule, q, -1.0, 1.0, tol).map_err(|e| e.to_string())?;
            let label = || format!("{rule} on {} delta={}", q.variant(), q.params().delta());
            ensure(r.warnings.is_empty(), || format!("{} warned {:?}", label(), r.warnings))?;
            if rule.is_adaptive() {
                let dev = (r.value - SIXTEEN_FIFTEENTHS).abs();
                worst_adaptive = worst_adaptive.max(dev);
                ensure(dev <= 1e-12, || format!("{} = {} (dev {dev:e})", label(), r.value))?;
            } else {
                let dev = (r.value - SIXTEEN_FIFTEENTHS).abs();
                let own = (r.value - oracle).abs();
                worst_trapz = worst_trapz.max(own);
                ensure(dev <= 1e-4, || format!("{} = {} (dev {dev:e})", label(), r.value))?;
                ensure(own <= 1e-9, || format!("{} = {} vs rational sum {oracle}", label(), r.value))?;
            }
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} runs; adaptive max dev {worst_adaptive:.1e}; trapz vs rational sum {worst_trapz:.1e}"
    ))
}

fn fourier_coefficients() -> Outcome {
    let want = [(1, 0.891088548280465), (2, -0.132240669593892)];
    let mut detail = Vec::new();
    for (n, published) in want {
        let oracle = coefficient_oracle(n);
        ensure((oracle - published).abs() <= 1e-14, || {
            format!("closed form A{n} = {oracle} disagrees with {published}")
        })?;
        let gk = HeatConfig::new(
            0.1,
            2,
            RuleId::Gk15,
            IntegrandVariant::QuarticHighPrec,
            QuarticParams::new(100000.0).unwrap(),
        )
        .unwrap();
        let lob = HeatConfig {
            coeff_rule: RuleId::AdaptiveLobatto,
            ..gk.clone()
        };
        let (a_gk, _) = fourier_coefficient(n, &gk).map_err(|e| e.to_string())?;
        let (a_lob, _) = fourier_coefficient(n, &lob).map_err(|e| e.to_string())?;
        ensure((a_gk - published).abs() <= 1e-14, || format!("GK15 A{n} = {a_gk}"))?;
        ensure((a_lob - a_gk).abs() <= 1e-12, || format!("Lobatto A{n} = {a_lob} vs GK15 {a_gk}"))?;
        detail.push(format!("A{n} = {a_gk:.15}"));
    }
    Ok(detail.join(", "))
}

fn zero_collapse() -> Outcome {
    let double = quartic(IntegrandVariant::QuarticDouble, 250000.0);
    for rule in all_rules() {
        let r = integrate(rule, &double, -1.0, 1.0, Tolerances::default()).map_err(|e| e.to_string())?;
        ensure(r.value == 0.0 && r.value.is_sign_positive(), || format!("{rule} returned {}", r.value))?;
        ensure(r.warnings.is_empty(), || format!("{rule} warned {:?}", r.warnings))?;
    }
    let hiprec = quartic(IntegrandVariant::QuarticHighPrec, 250000.0);
    let report = noise_floor(&double, &hiprec, -1.0, 1.0, 129, 1e-10).map_err(|e| e.to_string())?;
    ensure(report.collapse && report.recommendation == Recommendation::Collapsed, || {
        format!("noise floor reported {report:?}")
    })?;
    Ok("four rules return +0.0 silently; diagnostics report collapsed".into())
}

fn failure_phenomenology() -> Outcome {
    let double = quartic(IntegrandVariant::QuarticDouble, 100000.0);
    let tol = Tolerances::default();
    let expected = [
        (RuleId::Gk15, Warning::MaxIntervals),
        (RuleId::AdaptiveSimpson, Warning::MaxFevals),
        (RuleId::AdaptiveLobatto, Warning::MaxFevals),
    ];
    let mut detail = Vec::new();
    for (rule, warning) in expected {
        let r = integrate(rule, &double, -1.0, 1.0, tol).map_err(|e| e.to_string())?;
        ensure(r.warnings.contains(&warning), || format!("{rule} warnings {:?}", r.warnings))?;
        if warning == Warning::MaxFevals {
            ensure(r.fevals >= 2000, || format!("{rule} used {} fevals", r.fevals))?;
        }
        let dev = (r.value - SIXTEEN_FIFTEENTHS).abs();
        ensure(dev > 4e-3, || format!("{rule} = {} deviates only {dev:e}", r.value))?;
        detail.push(format!("{rule} {:.9} ({} fevals)", r.value, r.fevals));
    }
    let t = integrate(trapz(0.01), &double, -1.0, 1.0, tol).map_err(|e| e.to_string())?;
    let published = 1.071_808_512;
    ensure((t.value - published).abs() <= 1e-9, || {
        format!(
            "{}; trapz-0.01 = {:.15}, expected {published:.15} within 1e-9",
            detail.join(", "),
            t.value
        )
    })?;
    detail.push(format!("trapz-0.01 {:.15}", t.value));
    Ok(detail.join(", "))
}

fn monotone_corruption() -> Outcome {
    let mut devs = Vec::new();
    for delta in [1000.0, 10000.0, 100000.0] {
        let double = quartic(IntegrandVariant::QuarticDouble, delta);
        let hiprec = quartic(IntegrandVariant::QuarticHighPrec, delta);
        let report = noise_floor(&double, &hiprec, -1.0, 1.0, 129, 1e-10).map_err(|e| e.to_string())?;
        // the high-precision reference must itself agree with the simplified form
        let oracle_dev = noise_floor(&double, &phi_exact, -1.0, 1.0, 129, 1e-10).map_err(|e| e.to_string())?;
        ensure((oracle_dev.max_abs_dev - report.max_abs_dev).abs() <= 1e-15, || {
            format!(
                "delta={delta}: reference disagrees with phi_exact ({} vs {})",
                report.max_abs_dev, oracle_dev.max_abs_dev
            )
        })?;
        devs.push(report.max_abs_dev);
    }
    ensure(devs.windows(2).all(|w| w[0] <= w[1]), || format!("not monotone: {devs:?}"))?;
    ensure(devs[2] > 1e-4, || format!("max_abs_dev at 1e5 is {}", devs[2]))?;
    Ok(format!("max_abs_dev {:.2e} <= {:.2e} <= {:.2e}", devs[0], devs[1], devs[2]))
}

fn orthonormality() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=10u32 {
        for m in 1..=10u32 {
            let f = move |x: f64| basis_g(n, x) * basis_g(m, x);
            let r = integrate(RuleId::Gk15, &f, -1.0, 1.0, Tolerances::default()).map_err(|e| e.to_string())?;
            let want = if n == m { 1.0 } else { 0.0 };
            let dev = (r.value - want).abs();
            worst = worst.max(dev);
            ensure(dev <= 1e-12, || format!("<g{n}, g{m}> = {}", r.value))?;
        }
    }
    Ok(format!("100 pairs, max dev {worst:.1e}"))
}

/// `sum_{n > modes} |A_n|` with the closed-form coefficients; bounds the
/// truncation error of the clean series at `t = 0` since `|g_n| <= 1`.
fn tail_bound(modes: u32) -> f64 {
    let mut sum = 0.0;
    let last = 2_000_000u32;
    for n in (modes + 1..=last).rev() {
        sum += coefficient_oracle(n).abs();
    }
    // remaining tail ~ 16 / m^3 summed beyond `last`
    let m = (2 * last + 1) as f64 * PI / 2.0;
    sum + 16.0 / (PI * m * m)
}

fn sup_error_at_t0(grid: &SolutionGrid) -> f64 {
    grid.x
        .iter()
        .zip(grid.row(0))
        .fold(0.0f64, |acc, (&x, &u)| acc.max((u - phi_exact(x)).abs()))
}

fn heat_bias() -> Outcome {
    let params = QuarticParams::new(100000.0).unwrap();
    let config = |variant, modes| HeatConfig::new(0.1, modes, RuleId::Gk15, variant, params).unwrap();
    let t = default_t_grid();
    let x = default_x_grid();

    let clean = FourierSeries::compute(&config(IntegrandVariant::QuarticHighPrec, 50)).map_err(|e| e.to_string())?;
    let corrupted500 =
        FourierSeries::compute(&config(IntegrandVariant::QuarticDouble, 500)).map_err(|e| e.to_string())?;
    let corrupted50 = corrupted500.truncated(50);

    let clean_grid = clean.grid(&t, &x).map_err(|e| e.to_string())?;
    let grid50 = corrupted50.grid(&t, &x).map_err(|e| e.to_string())?;
    let grid500 = corrupted500.grid(&t, &x).map_err(|e| e.to_string())?;

    let bound = tail_bound(50);
    let clean_err = sup_error_at_t0(&clean_grid);
    let err50 = sup_error_at_t0(&grid50);
    let err500 = sup_error_at_t0(&grid500);
    ensure(bound <= 2e-3, || format!("tail bound {bound:e} exceeds 2e-3"))?;
    // coefficient quadrature error is at most 50 * 1e-12 on top of truncation
    ensure(clean_err <= bound + 1e-10, || {
        format!("clean t=0 error {clean_err:e} above tail bound {bound:e}")
    })?;
    ensure(err50 > 10.0 * clean_err, || {
        format!("corrupted t=0 error {err50:e} not 10x clean {clean_err:e}")
    })?;
    ensure(err500 > 0.8 * err50, || {
        format!("N=500 reduced corrupted error from {err50:e} to {err500:e}")
    })?;
    let profile = bias_profile(&clean_grid, &grid50).map_err(|e| e.to_string())?;
    Ok(format!(
        "clean {clean_err:.1e} (bound {bound:.1e}); corrupted N=50 {err50:.3}, N=500 {err500:.3}; bias t=1 {:.3}",
        profile.last().map(|p| p.1).unwrap_or(f64::NAN)
    ))
}

fn finance_phenomenology() -> Outcome {
    let p = FinanceParams::reference(1e-5);
    let tol = Tolerances::default();
    let run = |ctx: PrecisionContext| integrate_contour(&p, 100.0, RuleId::Gk15, &ctx, tol);
    let double = run(PrecisionContext::double()).map_err(|e| e.to_string())?;
    let hp32 = run(PrecisionContext::high_precision(32).unwrap()).map_err(|e| e.to_string())?;
    let hp64 = run(PrecisionContext::high_precision(64).unwrap()).map_err(|e| e.to_string())?;
    let (fd, fh) = (double.result.fevals, hp32.result.fevals);
    ensure(fd >= 10 * fh, || format!("double used {fd} fevals, high precision {fh}"))?;
    let reference = hp32.value();
    let diff = (double.value() - reference).abs();
    ensure(diff > tol.rel_tol() * reference.abs(), || {
        format!("double and high precision differ by only {diff:e}")
    })?;
    let drift = (hp64.value() - reference).abs() / reference.abs();
    ensure(drift <= 1e-13, || format!("32 vs 64 digits relative drift {drift:e}"))?;
    Ok(format!(
        "fevals double {fd} vs hiprec {fh}; |diff| {diff:.2e}; 32/64-digit drift {drift:.1e}"
    ))
}

/// Integral of `sum c_k x^k` over [-1, 1] at 256 bits, rounded to double.
fn polynomial_integral(coeffs: &[f64]) -> f64 {
    let bits = 256;
    let mut sum = HpReal::from_f64(0.0, bits);
    for (k, &c) in coeffs.iter().enumerate() {
        if k % 2 == 0 {
            let term = HpReal::from_f64(2.0 * c, bits) / HpReal::from_f64((k + 1) as f64, bits);
            sum = sum + term;
        }
    }
    sum.to_f64()
}

fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        f64::from_bits(1)
    } else {
        f64::from_bits(a.to_bits() + 1) - a
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn exactness_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_9a55);
    let tol = Tolerances::default();
    let mut worst_gk = 0.0f64;
    for _ in 0..100 {
        let degree = rng.gen_range(0..=22);
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let exact = polynomial_integral(&coeffs);
        let f = |x: f64| horner(&coeffs, x);
        // a single 15-point panel, no subdivision
        let (kronrod, _) = gk15_rule(&f, -1.0, 1.0);
        // rounding error scales with the weighted sum of |p| at the nodes,
        // not with the possibly cancelled integral itself
        let (magnitude, _) = gk15_rule(&|x: f64| f(x).abs(), -1.0, 1.0);
        let ulps = (kronrod - exact).abs() / ulp(magnitude.max(exact.abs()));
        worst_gk = worst_gk.max(ulps);
        ensure(ulps <= 8.0, || format!("degree {degree}: {kronrod} vs {exact} ({ulps} ulp)"))?;
    }

    let mut worst_low = 0.0f64;
    let low_order = [
        (RuleId::AdaptiveSimpson, 3usize),
        (RuleId::AdaptiveLobatto, 5),
        (trapz(0.5), 1),
    ];
    for (rule, degree) in low_order {
        for _ in 0..100 {
            let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let exact = polynomial_integral(&coeffs);
            let f = |x: f64| horner(&coeffs, x);
            let r = integrate(rule, &f, -1.0, 1.0, tol).map_err(|e| e.to_string())?;
            let magnitude = integrate(rule, &|x: f64| f(x).abs(), -1.0, 1.0, tol)
                .map_err(|e| e.to_string())?
                .value;
            let ulps = (r.value - exact).abs() / ulp(magnitude.max(exact.abs()));
            worst_low = worst_low.max(ulps);
            ensure(ulps <= 8.0, || format!("{rule} degree {degree}: {} vs {exact}", r.value))?;
        }
    }
    let linear = |x: f64| x;
    for rule in [RuleId::AdaptiveSimpson, trapz(0.5)] {
        let r = integrate(rule, &linear, 0.0, 1.0, tol).map_err(|e| e.to_string())?;
        ensure(r.value == 0.5, || format!("{rule} on x over [0, 1] gave {}", r.value))?;
    }
    Ok(format!(
        "GK15 worst {worst_gk:.1} ulp over 100 polynomials; Simpson/Lobatto/trapz worst {worst_low:.1} ulp"
    ))
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "exact-value reproduction",
            limit: Duration::from_secs(10),
            check: exact_values,
        },
        Criterion {
            name: "fourier coefficients",
            limit: Duration::from_secs(5),
            check: fourier_coefficients,
        },
        Criterion {
            name: "zero collapse",
            limit: Duration::from_secs(5),
            check: zero_collapse,
        },
        Criterion {
            name: "failure phenomenology",
            limit: Duration::from_secs(60),
            check: failure_phenomenology,
        },
        Criterion {
            name: "delta-monotone corruption",
            limit: Duration::from_secs(5),
            check: monotone_corruption,
        },
        Criterion {
            name: "orthonormality",
            limit: Duration::from_secs(10),
            check: orthonormality,
        },
        Criterion {
            name: "heat-solution bias",
            limit: Duration::from_secs(120),
            check: heat_bias,
        },
        Criterion {
            name: "finance phenomenology",
            limit: Duration::from_secs(300),
            check: finance_phenomenology,
        },
        Criterion {
            name: "exactness suite",
            limit: Duration::from_secs(10),
            check: exactness_suite,
        },
    ];

    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took longer than {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:<28} {:>7.2}s  {detail}", c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<28} {:>7.2}s  {why}", c.name, elapsed.as_secs_f64());
            }
        }
    }
    println!("\n{} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
