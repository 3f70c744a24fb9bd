use std::time::Instant;

use super::{check_bounds, Integrand, Meter, QuadValue, QuadratureResult, Tolerances, Warning};
use crate::error::QuadratureError;

// Gander & Gautschi's adaptlob constants.
const ALPHA: f64 = 0.816_496_580_927_726_032_732_428_024_901_963_8; // sqrt(2/3)
const BETA: f64 = 0.447_213_595_499_957_939_281_834_733_746_255_2; // 1/sqrt(5)
const X1: f64 = 0.942_882_415_695_480;
const X2: f64 = 0.641_853_342_345_781;
const X3: f64 = 0.236_383_199_662_150;
const W13: [f64; 7] = [
    0.015_827_191_973_480_2,
    0.094_273_840_218_850_0,
    0.155_071_987_336_585,
    0.188_821_573_960_182,
    0.199_773_405_226_859,
    0.224_926_465_333_340,
    0.242_611_071_901_408,
];

struct Panel<V> {
    a: f64,
    b: f64,
    fa: V,
    fb: V,
    prior: V,
}

/// Adaptive Gauss–Lobatto after Gander and Gautschi.
///
/// On each panel the 4-point Lobatto value is compared with its 7-point
/// Kronrod extension; the extension is accepted once `|K7 - L4|` is within the
/// panel's width share of `max(abs_tol, rel_tol * |running estimate|)`. Failed
/// panels are split into the six sub-panels delimited by the Kronrod nodes, so
/// every evaluation is reused. The first pass uses a 13-point rule to seed the
/// running estimate. `max_fevals` is a hard budget: once it is spent, pending
/// panels are closed with the two-point Lobatto rule on their end points.
pub fn adaptive_lobatto<I: Integrand + ?Sized>(
    f: &I,
    a: f64,
    b: f64,
    tol: Tolerances,
    max_fevals: u64,
) -> Result<QuadratureResult<I::Value>, QuadratureError> {
    check_bounds(a, b)?;
    let start = Instant::now();
    let mut m = Meter::new(f);
    let width = b - a;

    let mid = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let xs = [
        a,
        mid - X1 * h,
        mid - ALPHA * h,
        mid - X2 * h,
        mid - BETA * h,
        mid - X3 * h,
        mid,
        mid + X3 * h,
        mid + BETA * h,
        mid + X2 * h,
        mid + ALPHA * h,
        mid + X1 * h,
        b,
    ];
    let ys: Vec<I::Value> = xs.iter().map(|&x| m.eval(x)).collect();
    let mut seed = ys[6] * W13[6];
    for j in 0..6 {
        seed = seed + (ys[j] + ys[12 - j]) * W13[j];
    }
    let seed = seed * h;

    let mut accepted = I::Value::zero();
    let mut pending = seed;
    let mut error = 0.0;
    let mut capped = m.fevals >= max_fevals;
    let mut stack = vec![Panel {
        a,
        b,
        fa: ys[0],
        fb: ys[12],
        prior: seed,
    }];

    while let Some(p) = stack.pop() {
        pending = pending - p.prior;
        let h = 0.5 * (p.b - p.a);
        let mid = 0.5 * (p.a + p.b);
        let mll = mid - ALPHA * h;
        let ml = mid - BETA * h;
        let mr = mid + BETA * h;
        let mrr = mid + ALPHA * h;
        let splittable = p.a < mll && mll < ml && ml < mid && mid < mr && mr < mrr && mrr < p.b;
        if !splittable || capped || m.non_finite {
            // too narrow to refine, or out of budget: two-point Lobatto
            accepted = accepted + (p.fa + p.fb) * h;
            continue;
        }
        let fmll = m.eval(mll);
        let fml = m.eval(ml);
        let fm = m.eval(mid);
        let fmr = m.eval(mr);
        let fmrr = m.eval(mrr);
        let lobatto = (p.fa + p.fb + (fml + fmr) * 5.0) * (h / 6.0);
        let kronrod = ((p.fa + p.fb) * 77.0 + (fmll + fmrr) * 432.0 + (fml + fmr) * 625.0 + fm * 672.0)
            * (h / 1470.0);
        let local_err = (kronrod - lobatto).error_norm();
        let estimate = accepted + pending + kronrod;
        let share = tol.target(estimate.magnitude()) * ((p.b - p.a) / width);

        if m.fevals >= max_fevals {
            capped = true;
        }
        if local_err <= share || capped || m.non_finite {
            accepted = accepted + kronrod;
            error += local_err;
            continue;
        }
        pending = pending + kronrod;
        let nodes = [p.a, mll, ml, mid, mr, mrr, p.b];
        let values = [p.fa, fmll, fml, fm, fmr, fmrr, p.fb];
        let scale = 1.0 / (p.b - p.a);
        for j in (0..6).rev() {
            stack.push(Panel {
                a: nodes[j],
                b: nodes[j + 1],
                fa: values[j],
                fb: values[j + 1],
                prior: kronrod * ((nodes[j + 1] - nodes[j]) * scale),
            });
        }
    }

    let mut warnings = m.warnings();
    if capped {
        warnings.insert(Warning::MaxFevals);
    }
    Ok(QuadratureResult {
        value: accepted,
        error_estimate: error,
        fevals: m.fevals,
        warnings,
        elapsed: start.elapsed(),
    })
}
