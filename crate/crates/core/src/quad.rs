//! Adaptive Gauss-Kronrod quadrature for the weight-theory integrals.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae/weights on [-1, 1] with the embedded 7-point
// Gauss rule; standard tabulated values.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 7-15 panel; returns (estimate, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Adaptive bisection on [a, b] down to `rel_tol` (with a small absolute floor).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut stack = vec![(a, b)];
    let mut total = 0.0_f64;
    let (coarse, _) = gk15(f, a, b);
    let scale = coarse.abs().max(1e-300);
    let mut depth_guard = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        depth_guard += 1;
        let (val, err) = gk15(f, lo, hi);
        if err <= rel_tol * scale.max(total.abs()) + 1e-305
            || hi - lo < 1e-12
            || depth_guard > 100_000
        {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid));
            stack.push((mid, hi));
        }
    }
    total
}

/// Integral of an eventually-decaying positive integrand over [0, inf).
///
/// Panels [0,50], [50,100], [100,200], ... are accumulated until a panel
/// falls below `rel_tol` of the running total. A panel sequence that stops
/// decreasing signals divergence.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: &F, rel_tol: f64) -> Result<f64> {
    let mut total = integrate(f, 0.0, 50.0, rel_tol);
    let mut lo = 50.0;
    let mut hi = 100.0;
    let mut prev_panel = f64::INFINITY;
    loop {
        let panel = integrate(f, lo, hi, rel_tol);
        total += panel;
        if panel.abs() <= rel_tol * total.abs().max(1e-300) {
            return Ok(total);
        }
        if panel.abs() >= prev_panel && hi > 400.0 {
            return Err(Error::NotAdmissible(format!(
                "integral over [0,inf) does not converge: panel [{lo},{hi}] = {panel:.3e}"
            )));
        }
        prev_panel = panel.abs();
        lo = hi;
        hi *= 2.0;
        if hi > 1e7 {
            return Err(Error::NotAdmissible(
                "integral over [0,inf) still not converged at x = 1e7".into(),
            ));
        }
    }
}
