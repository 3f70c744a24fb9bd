use std::time::Instant;

use super::{check_bounds, Integrand, Meter, QuadValue, QuadratureResult, Tolerances, Warning};
use crate::error::QuadratureError;

struct Panel<V> {
    a: f64,
    b: f64,
    fa: V,
    fm: V,
    fb: V,
    whole: V,
}

fn simpson<V: QuadValue>(a: f64, b: f64, fa: V, fm: V, fb: V) -> V {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

/// Recursive adaptive Simpson with Richardson correction.
///
/// Each panel is accepted once `|S(left) + S(right) - S(whole)| / 15` falls
/// below its width share of `max(abs_tol, rel_tol * |running estimate|)`.
/// Panels are refined depth first, left to right. `max_fevals` is a hard
/// budget: once it is spent, pending panels are accepted with the Simpson
/// value they already carry and the run is flagged [`Warning::MaxFevals`].
pub fn adaptive_simpson<I: Integrand + ?Sized>(
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

    let fa = m.eval(a);
    let fm = m.eval(0.5 * (a + b));
    let fb = m.eval(b);
    let whole = simpson(a, b, fa, fm, fb);

    let mut accepted = I::Value::zero();
    let mut pending = whole;
    let mut error = 0.0;
    let mut capped = false;
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
    }];

    while let Some(p) = stack.pop() {
        let mid = 0.5 * (p.a + p.b);
        let ql = 0.5 * (p.a + mid);
        let qr = 0.5 * (mid + p.b);
        let splittable = p.a < ql && ql < mid && mid < qr && qr < p.b;
        pending = pending - p.whole;

        if !splittable || capped || m.non_finite {
            accepted = accepted + p.whole;
            continue;
        }
        let fl = m.eval(ql);
        let fr = m.eval(qr);
        let left = simpson(p.a, mid, p.fa, fl, p.fm);
        let right = simpson(mid, p.b, p.fm, fr, p.fb);
        let diff = left + right - p.whole;
        let local_err = diff.error_norm() / 15.0;
        let estimate = accepted + pending + left + right;
        let share = tol.target(estimate.magnitude()) * ((p.b - p.a) / width);

        if m.fevals >= max_fevals {
            capped = true;
        }
        if local_err <= share || capped || m.non_finite {
            accepted = accepted + left + right + diff * (1.0 / 15.0);
            error += local_err;
        } else {
            pending = pending + left + right;
            stack.push(Panel {
                a: mid,
                b: p.b,
                fa: p.fm,
                fm: fr,
                fb: p.fb,
                whole: right,
            });
            stack.push(Panel {
                a: p.a,
                b: mid,
                fa: p.fa,
                fm: fl,
                fb: p.fm,
                whole: left,
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
