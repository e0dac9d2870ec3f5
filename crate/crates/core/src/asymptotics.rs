//! Far-field asymptotic profile of solutions with peakon-class decay.
//!
//! For data controlled by psi(x) = e^{|x|/2} (1+|x|)^{1/2} (log(e+|x|))^d,
//! d > 1/2, the solution behaves like
//!
//! ```text
//! z(t) = z0 + e^{-x} t (Phi+(t) + eps1, eps2),   x -> +infinity
//! z(t) = z0 - e^{ x} t (Phi-(t) + eps1, eps2),   x -> -infinity
//! ```
//!
//! with Phi+-(t) = (1/2) int e^{+-y} h(y,t) dy and h the time average of the
//! source F = u^2 + u_x^2/2 + rho^2/2. This module evaluates the profile
//! functionals from stored snapshots, extracts the far-field coefficient and
//! its residual directly from the fields, checks the rho remainder, and
//! verifies infinite propagation speed for compactly supported data.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::persistence::envelope;
use crate::spectral::Window;
use crate::weights::{self, WeightSpec};

/// Sign of the far-field side under analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarSide {
    Right,
    Left,
}

/// The decay-condition weight psi with logarithmic exponent `d`.
pub fn psi_weight(d: f64) -> Result<WeightSpec> {
    if d.is_nan() || d <= 0.5 {
        return Err(Error::Precondition(format!(
            "condition weight requires d > 1/2, got d = {d}"
        )));
    }
    WeightSpec::new(0.5, 1.0, 0.5, d)
}

/// Result of the weighted-envelope condition scan.
#[derive(Debug, Clone, Copy)]
pub struct ConditionReport {
    /// Grid max of psi times the five-term envelope over the window.
    pub sup: f64,
    /// False when the weighted envelope grows toward the window edge,
    /// i.e. the sup is a window artifact and the true value is infinite.
    pub bounded: bool,
}

/// sup over the window of psi(x) (|u| + |u_x| + |u_xx| + |rho| + |rho_x|).
pub fn check_condition(s: &crate::dynamics::State, d: f64) -> Result<ConditionReport> {
    let psi = psi_weight(d)?;
    let grid = s.grid();
    let idx = Window::standard(grid).indices(grid)?;
    let env = envelope(s);
    let env_max = idx.clone().map(|j| env[j]).fold(0.0_f64, f64::max);
    let floor = 1e-12 * env_max;
    let mut xs = Vec::new();
    let mut weighted = Vec::new();
    let mut sup = 0.0_f64;
    for j in idx {
        if env[j] > floor && env[j] > 0.0 {
            let x = grid.x(j);
            let w = psi.eval_unchecked(x) * env[j];
            xs.push(x);
            weighted.push(w);
            sup = sup.max(w);
        }
    }
    let bounded = weights::growing_tail(&xs, &weighted).is_none();
    Ok(ConditionReport { sup, bounded })
}

/// Value of a profile functional, with a flag for the t -> 0 limit.
#[derive(Debug, Clone, Copy)]
pub struct PhiValue {
    pub value: f64,
    /// True when t = 0 was requested and the analytic limit (the
    /// instantaneous functional of F(u0, rho0)) was returned.
    pub limit_flag: bool,
}

fn snapshot_index(traj: &Trajectory, t: f64) -> Result<usize> {
    traj.snapshots
        .iter()
        .position(|s| (s.state.t - t).abs() <= 1e-9)
        .ok_or_else(|| Error::Domain(format!("t = {t} is not a snapshot time")))
}

fn exp_moment(traj: &Trajectory, h: &[f64], side: FarSide) -> f64 {
    let grid = traj.initial().grid();
    let idx = Window::standard(grid)
        .indices(grid)
        .expect("standard window");
    let dx = grid.dx();
    let mut acc = 0.0;
    for j in idx {
        let x = grid.x(j);
        let e = match side {
            FarSide::Right => x.exp(),
            FarSide::Left => (-x).exp(),
        };
        acc += e * h[j];
    }
    0.5 * acc * dx
}

/// Phi(t) = (1/2) int e^{+-y} h(y,t) dy with h(x,t) = (1/t) int_0^t F(x,s) ds,
/// the time integral taken by the trapezoid rule over stored snapshots.
///
/// For t = 0 the analytic limit (time average of the single instant) is
/// returned with `limit_flag` set.
pub fn profile_phi(traj: &Trajectory, t: f64, side: FarSide) -> Result<PhiValue> {
    let i = snapshot_index(traj, t)?;
    let n = traj.initial().grid().len();
    if i == 0 {
        let f0 = traj.snapshots[0].source.values();
        return Ok(PhiValue {
            value: exp_moment(traj, f0, side),
            limit_flag: true,
        });
    }
    let mut h = vec![0.0_f64; n];
    for w in traj.snapshots[..=i].windows(2) {
        let dt = w[1].state.t - w[0].state.t;
        let a = w[0].source.values();
        let b = w[1].source.values();
        for (acc, (&fa, &fb)) in h.iter_mut().zip(a.iter().zip(b)) {
            *acc += 0.5 * dt * (fa + fb);
        }
    }
    let inv_t = 1.0 / (traj.snapshots[i].state.t - traj.snapshots[0].state.t);
    for v in h.iter_mut() {
        *v *= inv_t;
    }
    Ok(PhiValue {
        value: exp_moment(traj, &h, side),
        limit_flag: false,
    })
}

// Per-sample estimates of the profile coefficient: on the right the
// correction is +e^{-x} t (Phi+ + eps), on the left -e^{x} t (Phi- + eps),
// so the left difference is negated to make both estimates positive.
fn far_values(traj: &Trajectory, i: usize, side: FarSide, window: Window) -> Result<Vec<f64>> {
    let grid = traj.initial().grid();
    let idx = window.indices(grid)?;
    let t = traj.snapshots[i].state.t;
    let u0 = traj.initial().u.values();
    let u = traj.snapshots[i].state.u.values();
    Ok(idx
        .map(|j| {
            let x = grid.x(j);
            match side {
                FarSide::Right => (u[j] - u0[j]) * x.exp() / t,
                FarSide::Left => (u0[j] - u[j]) * (-x).exp() / t,
            }
        })
        .collect())
}

/// Far-field coefficient over an explicit window: the mean of
/// (u(x,t) - u0(x)) e^{+-x} / t, and the max deviation from that mean.
pub fn extract_far_field_in(
    traj: &Trajectory,
    t: f64,
    side: FarSide,
    window: Window,
) -> Result<(f64, f64)> {
    let i = snapshot_index(traj, t)?;
    if i == 0 {
        return Err(Error::Precondition(
            "far-field extraction needs t > 0".into(),
        ));
    }
    let diff_sup = traj.snapshots[i]
        .state
        .u
        .zip_with(&traj.initial().u, |a, b| a - b)
        .max_abs();
    if diff_sup == 0.0 {
        return Ok((0.0, 0.0));
    }
    let window = match side {
        FarSide::Right => window,
        FarSide::Left => Window::new(-window.hi, -window.lo),
    };
    let vals = far_values(traj, i, side, window)?;
    if vals.len() < 4 {
        return Err(Error::Window(format!(
            "window [{}, {}] holds {} samples; too few for a mean",
            window.lo,
            window.hi,
            vals.len()
        )));
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let residual = vals
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0_f64, f64::max);
    Ok((mean, residual))
}

// Innermost abscissa of the far-field fit region.
const FAR_FIELD_LO: f64 = 10.0;
// The e^{-x} t Phi signal must clear this level for a sample to be usable.
const FAR_FIELD_SIGNAL: f64 = 1e-11;

/// Window where the far-field signal e^{-x} t Phi stays above the noise
/// threshold: [10, min(ln(t Phi / 1e-11), L - 10)].
pub fn far_field_window(traj: &Trajectory, t: f64, side: FarSide) -> Result<Window> {
    let phi = profile_phi(traj, t, side)?.value;
    let grid = traj.initial().grid();
    let l = grid.half_width();
    if phi <= 0.0 {
        return Err(Error::Window(format!(
            "profile functional {phi:.3e} leaves no signal above {FAR_FIELD_SIGNAL:.0e}"
        )));
    }
    let hi = ((t * phi / FAR_FIELD_SIGNAL).ln()).min(l - 10.0);
    if hi <= FAR_FIELD_LO {
        return Err(Error::Window(format!(
            "signal e^-x t Phi falls below {FAR_FIELD_SIGNAL:.0e} before x = {FAR_FIELD_LO}"
        )));
    }
    Ok(Window::new(FAR_FIELD_LO, hi))
}

/// [`extract_far_field_in`] over the automatic signal window.
pub fn extract_far_field(traj: &Trajectory, t: f64, side: FarSide) -> Result<(f64, f64)> {
    let i = snapshot_index(traj, t)?;
    if i > 0 {
        let diff_sup = traj.snapshots[i]
            .state
            .u
            .zip_with(&traj.initial().u, |a, b| a - b)
            .max_abs();
        if diff_sup == 0.0 {
            return Ok((0.0, 0.0));
        }
    }
    let window = far_field_window(traj, t, side)?;
    extract_far_field_in(traj, t, side, window)
}

/// sup over the window of |rho(x,t) - rho0(x)| e^{+-x} / t.
pub fn rho_remainder_in(traj: &Trajectory, t: f64, side: FarSide, window: Window) -> Result<f64> {
    let i = snapshot_index(traj, t)?;
    if i == 0 {
        return Err(Error::Precondition("rho remainder needs t > 0".into()));
    }
    let window = match side {
        FarSide::Right => window,
        FarSide::Left => Window::new(-window.hi, -window.lo),
    };
    let grid = traj.initial().grid();
    let idx = window.indices(grid)?;
    let r0 = traj.initial().rho.values();
    let r = traj.snapshots[i].state.rho.values();
    Ok(idx
        .map(|j| {
            let x = grid.x(j);
            let e = match side {
                FarSide::Right => x.exp(),
                FarSide::Left => (-x).exp(),
            };
            ((r[j] - r0[j]) * e / t).abs()
        })
        .fold(0.0_f64, f64::max))
}

/// [`rho_remainder_in`] over the automatic signal window.
pub fn rho_remainder(traj: &Trajectory, t: f64, side: FarSide) -> Result<f64> {
    let window = far_field_window(traj, t, side)?;
    rho_remainder_in(traj, t, side, window)
}

/// Outcome of the infinite-propagation-speed check on a compactly
/// supported datum.
#[derive(Debug, Clone, Copy)]
pub struct PropagationReport {
    /// True when u exceeds 1e-10 outside the initial support at the first
    /// positive output time.
    pub detected: f64,
    /// Fitted exponential decay rate of the emitted right tail.
    pub fitted_rate: f64,
    pub pass: bool,
    /// Zero datum: nothing is claimed.
    pub vacuous: bool,
}

const PROPAGATION_LEVEL: f64 = 1e-10;

/// Check that a compactly supported datum instantly develops an
/// e^{-x}-shaped right tail beyond its support.
pub fn infinite_propagation_check(traj: &Trajectory) -> Result<PropagationReport> {
    let grid = traj.initial().grid();
    let u0 = traj.initial().u.values();
    if u0.iter().all(|&v| v == 0.0) {
        return Ok(PropagationReport {
            detected: 0.0,
            fitted_rate: f64::NAN,
            pass: true,
            vacuous: true,
        });
    }
    let support_hi = grid
        .points()
        .iter()
        .zip(u0)
        .filter(|(_, &v)| v != 0.0)
        .map(|(&x, _)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    if traj.snapshots.len() < 2 {
        return Err(Error::Precondition(
            "propagation check needs one positive output time".into(),
        ));
    }
    let s1 = &traj.snapshots[1].state;
    let beyond = Window::new(support_hi + 1.0, grid.half_width() - 5.0);
    let idx = beyond.indices(grid)?;
    let detected = idx.map(|j| s1.u.values()[j].abs()).fold(0.0_f64, f64::max);

    // log-linear fit of the emitted tail over one decade of x
    let fit_window = Window::new(
        support_hi + 3.0,
        (support_hi + 13.0).min(grid.half_width() - 10.0),
    );
    let pts: Vec<(f64, f64)> = fit_window
        .indices(grid)?
        .filter(|&j| s1.u.values()[j].abs() > 1e-13)
        .map(|j| (grid.x(j), s1.u.values()[j].abs().ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::Window(
            "emitted tail below the noise floor over the fit window".into(),
        ));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let fitted_rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    let pass = detected > PROPAGATION_LEVEL && (fitted_rate - 1.0).abs() <= 0.05;
    Ok(PropagationReport {
        detected,
        fitted_rate,
        pass,
        vacuous: false,
    })
}

/// One row of the profile report.
#[derive(Debug, Clone, Copy)]
pub struct ProfileRow {
    pub t: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub extracted_plus: f64,
    pub extracted_minus: f64,
    pub residual_plus: f64,
    pub residual_minus: f64,
    pub rho_rem_plus: f64,
    pub rho_rem_minus: f64,
}

/// Profile functionals and far-field extractions at every positive
/// snapshot time, plus the run-wide bounds c1 <= Phi <= c2.
#[derive(Debug, Clone)]
pub struct ProfileReport {
    pub rows: Vec<ProfileRow>,
    pub c1: f64,
    pub c2: f64,
}

impl ProfileReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# c1={:.16e}\n# c2={:.16e}\n", self.c1, self.c2));
        out.push_str(
            "t,Phi_plus,Phi_minus,extracted_plus,extracted_minus,residual_plus,residual_minus,rho_rem_plus,rho_rem_minus\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.t,
                r.phi_plus,
                r.phi_minus,
                r.extracted_plus,
                r.extracted_minus,
                r.residual_plus,
                r.residual_minus,
                r.rho_rem_plus,
                r.rho_rem_minus
            ));
        }
        out
    }
}

/// Build the profile report at the given snapshot times (all positive
/// snapshot times when `times` is empty). Far-field extraction failures
/// from vanishing signal are recorded as NaN rather than aborting the row.
pub fn profile_report(traj: &Trajectory, times: &[f64]) -> Result<ProfileReport> {
    let all: Vec<f64> = if times.is_empty() {
        traj.times().into_iter().filter(|&t| t > 0.0).collect()
    } else {
        times.to_vec()
    };
    let mut rows = Vec::with_capacity(all.len());
    let mut c1 = f64::INFINITY;
    let mut c2 = f64::NEG_INFINITY;
    for &t in &all {
        let phi_plus = profile_phi(traj, t, FarSide::Right)?.value;
        let phi_minus = profile_phi(traj, t, FarSide::Left)?.value;
        c1 = c1.min(phi_plus).min(phi_minus);
        c2 = c2.max(phi_plus).max(phi_minus);
        let (ep, rp) = extract_far_field(traj, t, FarSide::Right).unwrap_or((f64::NAN, f64::NAN));
        let (em, rm) = extract_far_field(traj, t, FarSide::Left).unwrap_or((f64::NAN, f64::NAN));
        let rrp = rho_remainder(traj, t, FarSide::Right).unwrap_or(f64::NAN);
        let rrm = rho_remainder(traj, t, FarSide::Left).unwrap_or(f64::NAN);
        rows.push(ProfileRow {
            t,
            phi_plus,
            phi_minus,
            extracted_plus: ep,
            extracted_minus: em,
            residual_plus: rp,
            residual_minus: rm,
            rho_rem_plus: rrp,
            rho_rem_minus: rrm,
        });
    }
    Ok(ProfileReport { rows, c1, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{bump_state, evolve, sech_state, EvolveOptions, State};
    use crate::spectral::Grid;
    use std::sync::Arc;

    fn grid(l: f64, n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(l, n).unwrap())
    }

    fn sech_traj(t_end: f64, stride: f64) -> Trajectory {
        let g = grid(60.0, 4096);
        let s = sech_state(g, 0.5, 0.3);
        evolve(
            &s,
            t_end,
            &EvolveOptions {
                output_stride: stride,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn condition_zero_state() {
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let rep = check_condition(&s, 1.0).unwrap();
        assert_eq!(rep.sup, 0.0);
        assert!(rep.bounded);
    }

    #[test]
    fn condition_sech_finite() {
        let g = grid(60.0, 2048);
        let s = sech_state(g, 0.5, 0.3);
        let rep = check_condition(&s, 1.0).unwrap();
        assert!(rep.bounded);
        assert!(rep.sup.is_finite() && rep.sup > 0.0);
    }

    #[test]
    fn condition_slow_decay_flagged() {
        let g = grid(60.0, 2048);
        let s = State::from_fn(g, |x: f64| (-x.abs() / 4.0).exp(), |_| 0.0);
        let rep = check_condition(&s, 1.0).unwrap();
        assert!(!rep.bounded);
    }

    #[test]
    fn condition_requires_d_above_half() {
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        assert!(check_condition(&s, 0.5).is_err());
    }

    #[test]
    fn phi_zero_trajectory() {
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let traj = evolve(
            &s,
            0.2,
            &EvolveOptions {
                output_stride: 0.01,
                ..Default::default()
            },
        )
        .unwrap();
        let v = profile_phi(&traj, 0.1, FarSide::Right).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(!v.limit_flag);
    }

    #[test]
    fn phi_limit_at_time_zero() {
        let traj = sech_traj(0.1, 0.01);
        let v = profile_phi(&traj, 0.0, FarSide::Right).unwrap();
        assert!(v.limit_flag);
        // equals the instantaneous functional of F(u0, rho0)
        let grid = traj.initial().grid();
        let idx = Window::standard(grid).indices(grid).unwrap();
        let f0 = traj.snapshots[0].source.values();
        let oracle: f64 = 0.5 * idx.map(|j| grid.x(j).exp() * f0[j]).sum::<f64>() * grid.dx();
        assert!((v.value - oracle).abs() <= 1e-12 * oracle.abs());
        // even data: both limits agree (up to e^{|x|}-amplified round-off
        // in the far tail of F)
        let w = profile_phi(&traj, 0.0, FarSide::Left).unwrap();
        assert!((v.value - w.value).abs() <= 1e-7 * v.value.abs());
    }

    #[test]
    fn phi_positive_and_bounded_for_nonzero_data() {
        let traj = sech_traj(0.5, 0.01);
        let rep = profile_report(&traj, &[]).unwrap();
        assert!(rep.c1 > 0.0);
        assert!(rep.c2.is_finite());
        for row in &rep.rows {
            assert!(row.phi_plus > 0.0 && row.phi_minus > 0.0);
        }
    }

    #[test]
    fn phi_matches_refined_quadrature() {
        // independent oracle: Simpson in time on re-derived F, over a run
        // with a finer snapshot stride
        let g = grid(60.0, 4096);
        let s = sech_state(g, 0.5, 0.3);
        let traj = evolve(
            &s,
            0.5,
            &EvolveOptions {
                output_stride: 0.0025,
                ..Default::default()
            },
        )
        .unwrap();
        let v = profile_phi(&traj, 0.5, FarSide::Right).unwrap().value;

        let grid = traj.initial().grid();
        let idx = Window::standard(grid).indices(grid).unwrap();
        let n_snap = traj.snapshots.len();
        assert_eq!(n_snap % 2, 1);
        // re-derive F from the fields (masked factors, same definition)
        let f_of = |i: usize| -> Vec<f64> {
            let st = &traj.snapshots[i].state;
            let (ux, _) = crate::spectral::denoised_derivatives(&st.u);
            (0..st.grid().len())
                .map(|j| {
                    let u = st.u.values()[j];
                    let uxj = ux.values()[j];
                    let r = st.rho.values()[j];
                    u * u + 0.5 * uxj * uxj + 0.5 * r * r
                })
                .collect()
        };
        let dt = traj.snapshots[1].state.t;
        let mut h = vec![0.0_f64; grid.len()];
        for i in 0..n_snap {
            let w = if i == 0 || i == n_snap - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            for (acc, v) in h.iter_mut().zip(f_of(i)) {
                *acc += w * v;
            }
        }
        let scale = dt / 3.0 / 0.5;
        let oracle: f64 =
            0.5 * idx.map(|j| grid.x(j).exp() * h[j] * scale).sum::<f64>() * grid.dx();
        assert!(
            (v - oracle).abs() <= 1e-6 * oracle.abs(),
            "phi = {v:.9e}, oracle = {oracle:.9e}, rel {}",
            (v - oracle).abs() / oracle.abs()
        );
    }

    #[test]
    fn far_field_zero_trajectory() {
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let traj = evolve(
            &s,
            0.2,
            &EvolveOptions {
                output_stride: 0.01,
                ..Default::default()
            },
        )
        .unwrap();
        let (c, r) = extract_far_field(&traj, 0.1, FarSide::Right).unwrap();
        assert_eq!((c, r), (0.0, 0.0));
    }

    #[test]
    fn far_field_coefficient_positive_and_matches_phi() {
        let traj = sech_traj(0.5, 0.01);
        for side in [FarSide::Right, FarSide::Left] {
            let (coeff, _res) = extract_far_field(&traj, 0.5, side).unwrap();
            let phi = profile_phi(&traj, 0.5, side).unwrap().value;
            assert!(coeff > 0.0);
            let rel = (coeff - phi).abs() / phi;
            assert!(
                rel < 0.10,
                "side {side:?}: coeff {coeff:.6e} vs phi {phi:.6e} (rel {rel:.3})"
            );
        }
    }

    #[test]
    fn far_field_residual_shrinks_outward() {
        let traj = sech_traj(1.0, 0.01);
        let windows = [
            Window::new(8.0, 11.0),
            Window::new(11.0, 14.0),
            Window::new(14.0, 17.0),
        ];
        let mut last = f64::INFINITY;
        for w in windows {
            let (_c, r) = extract_far_field_in(&traj, 1.0, FarSide::Right, w).unwrap();
            assert!(
                r < last,
                "residual {r:.3e} did not shrink (prev {last:.3e})"
            );
            last = r;
        }
    }

    #[test]
    fn rho_remainder_zero_for_ch_reduction() {
        let g = grid(60.0, 4096);
        let s = State::from_fn(g, |x: f64| 0.5 / x.cosh(), |_| 0.0);
        let traj = evolve(
            &s,
            0.2,
            &EvolveOptions {
                output_stride: 0.01,
                ..Default::default()
            },
        )
        .unwrap();
        let r = rho_remainder_in(&traj, 0.2, FarSide::Right, Window::new(12.0, 16.0)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn rho_remainder_monotone_across_windows() {
        let traj = sech_traj(0.5, 0.01);
        let mut last = f64::INFINITY;
        for w in [
            Window::new(12.0, 16.0),
            Window::new(16.0, 20.0),
            Window::new(20.0, 24.0),
        ] {
            let r = rho_remainder_in(&traj, 0.5, FarSide::Right, w).unwrap();
            assert!(
                r < last,
                "remainder {r:.3e} did not decrease (prev {last:.3e})"
            );
            last = r;
        }
    }

    #[test]
    fn propagation_zero_datum_vacuous() {
        let g = grid(30.0, 1024);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let traj = evolve(
            &s,
            0.05,
            &EvolveOptions {
                output_stride: 0.05,
                ..Default::default()
            },
        )
        .unwrap();
        let rep = infinite_propagation_check(&traj).unwrap();
        assert!(rep.vacuous && rep.pass);
    }

    #[test]
    fn propagation_bump_emits_unit_rate_tail() {
        let g = grid(30.0, 16384);
        let s = bump_state(g, 1.0, 0.5);
        let traj = evolve(
            &s,
            0.05,
            &EvolveOptions {
                output_stride: 0.05,
                ..Default::default()
            },
        )
        .unwrap();
        let rep = infinite_propagation_check(&traj).unwrap();
        assert!(!rep.vacuous);
        assert!(rep.detected > 1e-10, "tail level {:.3e}", rep.detected);
        assert!(
            (rep.fitted_rate - 1.0).abs() <= 0.05,
            "rate {}",
            rep.fitted_rate
        );
        assert!(rep.pass);
    }

    #[test]
    fn condition_controlled_by_persistence_bound() {
        // the condition functional at time t stays below e^{CMt} times its
        // initial value, with the traced C of the psi weight at p = inf
        use crate::persistence::gronwall_constant;
        use crate::weights::{certify, DEFAULT_SAMPLES, DEFAULT_SAMPLE_BOX};
        let traj = sech_traj(0.5, 0.01);
        let psi = psi_weight(1.0).unwrap();
        let cert = certify(&psi, DEFAULT_SAMPLE_BOX, DEFAULT_SAMPLES).unwrap();
        let c = gronwall_constant(&cert);
        let m = traj.m_sup();
        let cond0 = check_condition(&traj.snapshots[0].state, 1.0).unwrap().sup;
        for snap in &traj.snapshots {
            let cond = check_condition(&snap.state, 1.0).unwrap();
            assert!(cond.bounded);
            let bound = (c * m * snap.state.t).exp() * cond0;
            assert!(
                cond.sup <= bound * (1.0 + 1e-9),
                "t={}: {} > {}",
                snap.state.t,
                cond.sup,
                bound
            );
        }
    }

    #[test]
    fn profile_csv_shape() {
        let traj = sech_traj(0.1, 0.01);
        let rep = profile_report(&traj, &[0.05, 0.1]).unwrap();
        let csv = rep.to_csv();
        assert!(csv.contains("t,Phi_plus,Phi_minus"));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
    }
}
