//! Time evolution of the 2CH system in nonlocal form.
//!
//! Right-hand side: du/dt = -u u_x + P(D) F with F = u^2 + u_x^2/2 + rho^2/2,
//! drho/dt = -u rho_x - rho u_x. Quadratic products are dealiased with the
//! 2/3 rule applied to the inputs: every factor is band-limited to
//! |k| <= (2/3) k_max before multiplying, so all aliased contributions land
//! strictly above the cut and are removed again at the next masking. The
//! products themselves are kept in physical space; in particular the rho
//! equation never pushes the state through a transform, which keeps the
//! exponentially small tails of rho clean enough for far-field analysis.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{self, Field, Grid};

const DEALIAS_FRAC: f64 = 2.0 / 3.0;
const CFL_NUMBER: f64 = 0.3;
const CFL_RECHECK: usize = 10;
const BLOWUP_SLOPE: f64 = 1e4;
const TAIL_LIMIT: f64 = 1e-12;
const SPECTRAL_TAIL_LIMIT: f64 = 1e-10;
// Relative spectral content just below the dealiasing cut that marks loss
// of resolution. A breaking front saturates |u_x| near ||u|| k_cut, which
// on desk-scale grids stays below the slope threshold, so breakdown is also
// detected by energy reaching the cut.
const RESOLUTION_LOSS: f64 = 1e-9;

/// Solution pair (u, rho) at one time instant.
#[derive(Debug, Clone)]
pub struct State {
    pub u: Field,
    pub rho: Field,
    pub t: f64,
}

impl State {
    pub fn new(u: Field, rho: Field, t: f64) -> Result<State> {
        if !u.same_grid(&rho) {
            return Err(Error::ShapeMismatch("u and rho must share one grid".into()));
        }
        if !u.is_valid() || !rho.is_valid() {
            return Err(Error::Domain("state contains non-finite samples".into()));
        }
        Ok(State { u, rho, t })
    }

    pub fn from_fn<F, G>(grid: Arc<Grid>, f_u: F, f_rho: G) -> State
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        State {
            u: Field::from_fn(grid.clone(), f_u),
            rho: Field::from_fn(grid, f_rho),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }
}

/// Per-snapshot scalar diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    /// ||u||_inf + ||u_x||_inf + ||u_xx||_inf + ||rho||_inf + ||rho_x||_inf.
    pub m_t: f64,
    /// H1 = (1/2) int (u m + rho^2) dx with m = u - u_xx.
    pub h1: f64,
    /// H2 = (1/2) int (u rho^2 + u^3 + u u_x^2) dx.
    pub h2: f64,
    /// min of m = u - u_xx; wave-breaking indicator.
    pub min_m: f64,
    /// max of |u|, |rho| over the outer 5% of the domain.
    pub tail_max: f64,
}

/// Compute all diagnostics for a state; derivatives are spectral with
/// sub-noise modes dropped.
pub fn diagnostics(s: &State) -> Diagnostics {
    let (ux, uxx) = spectral::denoised_derivatives(&s.u);
    let (rx, _) = spectral::denoised_derivatives(&s.rho);
    let m_t = s.u.max_abs() + ux.max_abs() + uxx.max_abs() + s.rho.max_abs() + rx.max_abs();

    let grid = s.grid();
    let dx = grid.dx();
    let mut h1 = 0.0;
    let mut h2 = 0.0;
    let mut min_m = f64::INFINITY;
    let mut tail_max = 0.0_f64;
    let tail_edge = 0.95 * grid.half_width();
    for j in 0..grid.len() {
        let u = s.u.values()[j];
        let r = s.rho.values()[j];
        let uxj = ux.values()[j];
        let m = u - uxx.values()[j];
        h1 += u * m + r * r;
        h2 += u * r * r + u * u * u + u * uxj * uxj;
        min_m = min_m.min(m);
        if grid.x(j).abs() >= tail_edge {
            tail_max = tail_max.max(u.abs()).max(r.abs());
        }
    }
    Diagnostics {
        m_t,
        h1: 0.5 * h1 * dx,
        h2: 0.5 * h2 * dx,
        min_m,
        tail_max,
    }
}

// Band-limited copies of a field and its derivative from one forward
// transform: f_cut = IFFT(mask f^), f_x_cut = IFFT(mask ik f^).
fn masked_pair(f: &Field) -> (Field, Field) {
    let grid = f.grid().clone();
    let cut = DEALIAS_FRAC * grid.k_max();
    let spec = f.spectrum();
    let n = grid.len();
    let mut plain = vec![Complex64::new(0.0, 0.0); n];
    let mut deriv = vec![Complex64::new(0.0, 0.0); n];
    for (j, &c) in spec.iter().enumerate() {
        let k = grid.wavenumbers()[j];
        if k.abs() <= cut && j != n / 2 {
            plain[j] = c;
            deriv[j] = c * Complex64::new(0.0, k);
        } else if k.abs() <= cut {
            plain[j] = c;
        }
    }
    (inverse_real(&grid, plain), inverse_real(&grid, deriv))
}

fn inverse_real(grid: &Arc<Grid>, mut buf: Vec<Complex64>) -> Field {
    grid.ifft(&mut buf);
    Field::new(grid.clone(), buf.iter().map(|c| c.re).collect()).expect("length preserved")
}

/// True when the relative spectrum of `f` in the band [0.60, 0.667] k_max
/// exceeds the resolution-loss threshold.
fn resolution_lost(f: &Field) -> bool {
    let grid = f.grid();
    let kmax = grid.k_max();
    let spec = f.spectrum();
    let mut peak = 0.0_f64;
    let mut band = 0.0_f64;
    for (j, c) in spec.iter().enumerate() {
        let ka = grid.wavenumbers()[j].abs();
        let mag = c.norm();
        peak = peak.max(mag);
        if ka >= 0.60 * kmax && ka <= DEALIAS_FRAC * kmax {
            band = band.max(mag);
        }
    }
    peak > 0.0 && band / peak > RESOLUTION_LOSS
}

/// Dealiased right-hand side of the nonlocal system, plus sup |u_x| for
/// breakdown detection.
pub fn rhs_with_slope(s: &State) -> (Field, Field, f64) {
    let (ub, uxb) = masked_pair(&s.u);
    let (rb, rxb) = masked_pair(&s.rho);
    let sup_ux = uxb.max_abs();

    // F = u^2 + u_x^2/2 + rho^2/2 from band-limited factors
    let mut f_vals = Vec::with_capacity(ub.values().len());
    for j in 0..ub.values().len() {
        let u = ub.values()[j];
        let ux = uxb.values()[j];
        let r = rb.values()[j];
        f_vals.push(u * u + 0.5 * ux * ux + 0.5 * r * r);
    }
    let f = Field::new(ub.grid().clone(), f_vals).expect("length preserved");
    // P(D) applies a transform anyway; mask there to keep u band-limited.
    let pd = apply_pd_masked(&f);

    let du = pd.zip_with(&ub.zip_with(&uxb, |a, b| a * b), |p, adv| p - adv);
    let drho = ub
        .zip_with(&rxb, |a, b| a * b)
        .zip_with(&rb.zip_with(&uxb, |a, b| a * b), |x, y| -x - y);
    (du, drho, sup_ux)
}

/// du/dt and drho/dt for a state.
pub fn rhs(s: &State) -> (Field, Field) {
    let (du, drho, _) = rhs_with_slope(s);
    (du, drho)
}

fn apply_pd_masked(f: &Field) -> Field {
    let grid = f.grid().clone();
    let cut = DEALIAS_FRAC * grid.k_max();
    let spec = f.spectrum();
    let n = grid.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (j, &c) in spec.iter().enumerate() {
        let k = grid.wavenumbers()[j];
        if k.abs() <= cut && j != n / 2 {
            buf[j] = c * Complex64::new(0.0, -k / (1.0 + k * k));
        }
    }
    inverse_real(&grid, buf)
}

fn axpy(y: &Field, a: f64, x: &Field) -> Field {
    y.zip_with(x, |yv, xv| yv + a * xv)
}

/// One classical RK4 step; NaN in any stage is reported as blow-up at the
/// step's starting time.
pub fn step_rk4(s: &State, dt: f64) -> Result<State> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Domain(format!(
            "dt = {dt} must be positive and finite"
        )));
    }
    let (k1u, k1r, slope) = rhs_with_slope(s);
    if slope > BLOWUP_SLOPE {
        return Err(Error::BlowUp { t: s.t });
    }
    let mid_u = axpy(&s.u, 0.5 * dt, &k1u);
    let mid_r = axpy(&s.rho, 0.5 * dt, &k1r);
    let (k2u, k2r) = rhs(&State {
        u: mid_u,
        rho: mid_r,
        t: s.t,
    });
    let mid_u = axpy(&s.u, 0.5 * dt, &k2u);
    let mid_r = axpy(&s.rho, 0.5 * dt, &k2r);
    let (k3u, k3r) = rhs(&State {
        u: mid_u,
        rho: mid_r,
        t: s.t,
    });
    let end_u = axpy(&s.u, dt, &k3u);
    let end_r = axpy(&s.rho, dt, &k3r);
    let (k4u, k4r) = rhs(&State {
        u: end_u,
        rho: end_r,
        t: s.t,
    });

    let c = dt / 6.0;
    let u =
        s.u.zip_with(&k1u, |uv, k1| uv + c * k1)
            .zip_with(&k2u, |uv, k2| uv + 2.0 * c * k2)
            .zip_with(&k3u, |uv, k3| uv + 2.0 * c * k3)
            .zip_with(&k4u, |uv, k4| uv + c * k4);
    let rho = s
        .rho
        .zip_with(&k1r, |rv, k1| rv + c * k1)
        .zip_with(&k2r, |rv, k2| rv + 2.0 * c * k2)
        .zip_with(&k3r, |rv, k3| rv + 2.0 * c * k3)
        .zip_with(&k4r, |rv, k4| rv + c * k4);
    if !u.is_valid() || !rho.is_valid() {
        return Err(Error::BlowUp { t: s.t });
    }
    Ok(State {
        u,
        rho,
        t: s.t + dt,
    })
}

/// One stored snapshot: the state plus the source term
/// F = u^2 + u_x^2/2 + rho^2/2, kept so the profile functionals can
/// time-average F without re-deriving it from the fields.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub state: State,
    pub source: Field,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    /// Gradient blow-up or NaN before T_end; the trajectory holds every
    /// snapshot recorded up to the breakdown time.
    BlowUp {
        t: f64,
    },
}

/// Run parameters recorded with a trajectory.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub preset: String,
    pub l: f64,
    pub n: usize,
    pub t_end: f64,
    pub output_stride: f64,
    pub amplitude_u: f64,
    pub amplitude_rho: f64,
    pub filter: bool,
}

impl Default for RunMeta {
    fn default() -> Self {
        RunMeta {
            preset: "custom".into(),
            l: 0.0,
            n: 0,
            t_end: 0.0,
            output_stride: 0.0,
            amplitude_u: 0.0,
            amplitude_rho: 0.0,
            filter: false,
        }
    }
}

/// Ordered snapshots plus per-snapshot diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
    pub meta: RunMeta,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.state.t).collect()
    }

    /// Run-wide sup of the instantaneous M_t over stored snapshots.
    pub fn m_sup(&self) -> f64 {
        self.diagnostics.iter().fold(0.0_f64, |m, d| m.max(d.m_t))
    }

    pub fn initial(&self) -> &State {
        &self.snapshots[0].state
    }

    /// Largest gap between consecutive snapshot times.
    pub fn max_stride(&self) -> f64 {
        self.snapshots
            .windows(2)
            .map(|w| w[1].state.t - w[0].state.t)
            .fold(0.0_f64, f64::max)
    }
}

/// Evolution controls; `Default` gives the standard policy.
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Time between stored snapshots; must divide T_end.
    pub output_stride: f64,
    /// Optional hard cap on dt in addition to the CFL policy.
    pub dt_cap: Option<f64>,
    /// Apply the exponential spectral filter each step (stressed runs only).
    pub filter: bool,
    /// Skip the initial-datum smoothness check (test hook; the check is on
    /// by default).
    pub skip_smoothness_check: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            output_stride: 0.01,
            dt_cap: None,
            filter: false,
            skip_smoothness_check: false,
        }
    }
}

fn spectral_filter(f: &Field) -> Field {
    let kmax = f.grid().k_max();
    let grid = f.grid().clone();
    let buf: Vec<Complex64> = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let r = grid.wavenumbers()[j].abs() / kmax;
            c * (-36.0 * r.powi(36)).exp()
        })
        .collect();
    inverse_real(&grid, buf)
}

fn source_field(s: &State) -> Field {
    let (ub, uxb) = masked_pair(&s.u);
    let (rb, _) = masked_pair(&s.rho);
    let vals = (0..ub.values().len())
        .map(|j| {
            let u = ub.values()[j];
            let ux = uxb.values()[j];
            let r = rb.values()[j];
            u * u + 0.5 * ux * ux + 0.5 * r * r
        })
        .collect();
    Field::new(s.grid().clone(), vals).expect("length preserved")
}

/// Integrate from `initial` to `t_end`, storing snapshots every
/// `output_stride`.
///
/// Terminates early with a blow-up outcome when the gradient threshold or a
/// NaN fires; aborts with a domain-too-small error when solution mass
/// reaches the outer 5% of the domain (tail above 1e-12).
pub fn evolve(initial: &State, t_end: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::Domain(format!(
            "T_end = {t_end} must be nonnegative"
        )));
    }
    if !opts.skip_smoothness_check {
        let tail = initial.u.spectral_tail();
        if tail > SPECTRAL_TAIL_LIMIT {
            return Err(Error::Precondition(format!(
                "initial u not smooth at grid resolution: spectral tail {tail:.3e} > {SPECTRAL_TAIL_LIMIT:.0e} \
                 in the top decade of wavenumbers"
            )));
        }
    }

    let stride = opts.output_stride;
    let n_out = if t_end == 0.0 {
        0
    } else {
        if stride.is_nan() || stride <= 0.0 {
            return Err(Error::Domain(format!(
                "output stride {stride} must be positive"
            )));
        }
        let n = (t_end / stride).round();
        if (n * stride - t_end).abs() > 1e-9 * t_end.max(1.0) {
            return Err(Error::Domain(format!(
                "output stride {stride} does not divide T_end = {t_end}"
            )));
        }
        n as usize
    };

    let mut traj = Trajectory {
        snapshots: Vec::with_capacity(n_out + 1),
        diagnostics: Vec::with_capacity(n_out + 1),
        meta: RunMeta::default(),
        outcome: Outcome::Completed,
    };
    let record = |traj: &mut Trajectory, s: &State| -> Result<()> {
        if resolution_lost(&s.u) {
            return Err(Error::BlowUp { t: s.t });
        }
        let d = diagnostics(s);
        if d.tail_max >= TAIL_LIMIT {
            return Err(Error::DomainTooSmall {
                t: s.t,
                tail: d.tail_max,
                limit: TAIL_LIMIT,
            });
        }
        traj.snapshots.push(Snapshot {
            state: s.clone(),
            source: source_field(s),
        });
        traj.diagnostics.push(d);
        Ok(())
    };

    let mut state = State::new(initial.u.clone(), initial.rho.clone(), initial.t)?;
    if resolution_lost(&state.u) {
        return Err(Error::Precondition(
            "initial u carries spectral content at the dealiasing cut".into(),
        ));
    }
    record(&mut traj, &state)?;

    let dx = state.grid().dx();
    let cfl_dt = |s: &State| -> f64 {
        let mut dt = CFL_NUMBER * dx / s.u.max_abs().max(1.0);
        if let Some(cap) = opts.dt_cap {
            dt = dt.min(cap);
        }
        dt
    };
    let mut dt_policy = cfl_dt(&state);
    let mut steps_since_recheck = 0usize;

    for i in 1..=n_out {
        let t_target = initial.t + i as f64 * stride;
        while state.t < t_target - 1e-12 {
            if steps_since_recheck >= CFL_RECHECK {
                if resolution_lost(&state.u) {
                    traj.outcome = Outcome::BlowUp { t: state.t };
                    return Ok(traj);
                }
                dt_policy = cfl_dt(&state);
                steps_since_recheck = 0;
            }
            let dt = dt_policy.min(t_target - state.t);
            match step_rk4(&state, dt) {
                Ok(next) => {
                    state = next;
                    if opts.filter {
                        state = State {
                            u: spectral_filter(&state.u),
                            rho: spectral_filter(&state.rho),
                            t: state.t,
                        };
                    }
                }
                Err(Error::BlowUp { t }) => {
                    traj.outcome = Outcome::BlowUp { t };
                    return Ok(traj);
                }
                Err(e) => return Err(e),
            }
            steps_since_recheck += 1;
        }
        state.t = t_target; // absorb round-off in the time accumulator
        match record(&mut traj, &state) {
            Ok(()) => {}
            Err(Error::BlowUp { t }) => {
                traj.outcome = Outcome::BlowUp { t };
                return Ok(traj);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

/// sech-shaped datum: u = A_u sech(x), rho = A_rho sech(x).
pub fn sech_state(grid: Arc<Grid>, amp_u: f64, amp_rho: f64) -> State {
    State::from_fn(grid, move |x| amp_u / x.cosh(), move |x| amp_rho / x.cosh())
}

/// Gaussian datum: u = A_u e^{-x^2}, rho = A_rho e^{-x^2}.
pub fn gaussian_state(grid: Arc<Grid>, amp_u: f64, amp_rho: f64) -> State {
    State::from_fn(
        grid,
        move |x| amp_u * (-x * x).exp(),
        move |x| amp_rho * (-x * x).exp(),
    )
}

/// Compactly supported bump exp(-1/(1-x^2)) on |x| < 1, zero elsewhere.
pub fn bump_state(grid: Arc<Grid>, amp_u: f64, amp_rho: f64) -> State {
    let bump = |x: f64| {
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    };
    State::from_fn(grid, move |x| amp_u * bump(x), move |x| amp_rho * bump(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(l: f64, n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(l, n).unwrap())
    }

    #[test]
    fn rhs_of_zero_state() {
        let g = grid(30.0, 256);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let (du, dr) = rhs(&s);
        assert_eq!(du.max_abs(), 0.0);
        assert_eq!(dr.max_abs(), 0.0);
    }

    #[test]
    fn constant_rho_is_steady() {
        // F constant, P(D) annihilates constants, rho advection vanishes
        let g = grid(30.0, 256);
        let s = State::from_fn(g, |_| 0.0, |_| 0.7);
        let (du, dr) = rhs(&s);
        assert!(du.max_abs() < 1e-14);
        assert!(dr.max_abs() < 1e-14);
        let stepped = step_rk4(&s, 0.01).unwrap();
        for (&a, &b) in stepped.rho.values().iter().zip(s.rho.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn ch_reduction_rhs_matches_quadrature() {
        // rho = 0 reduces the first equation to the one-component form
        // u_t = -u u_x - dG/dx * (u^2 + u_x^2/2); independent kernel
        // quadrature with analytic u = sech^2 and u_x.
        let g = grid(60.0, 4096);
        let sech2 = |x: f64| {
            let c = x.cosh();
            1.0 / (c * c)
        };
        let s = State::from_fn(g, sech2, |_| 0.0);
        let (du, dr) = rhs(&s);
        assert_eq!(dr.max_abs(), 0.0);

        let ux = |x: f64| {
            let c = x.cosh();
            -2.0 * x.tanh() / (c * c)
        };
        let f_src = |y: f64| sech2(y) * sech2(y) + 0.5 * ux(y) * ux(y);
        // dG/dx(x - y) with explicit one-sided limits at y = x
        let dgdx_left = |z: f64| -0.5 * (-z).exp(); // x - y > 0
        let dgdx_right = |z: f64| 0.5 * z.exp(); // x - y < 0
        let span = 80.0;
        let oracle = |x: f64| {
            let simpson = |lo: f64, hi: f64, kern: &dyn Fn(f64) -> f64| -> f64 {
                let m = 24000usize;
                let h = (hi - lo) / m as f64;
                let mut acc = kern(x - lo) * f_src(lo) + kern(x - hi) * f_src(hi);
                for i in 1..m {
                    let y = lo + i as f64 * h;
                    acc += if i % 2 == 1 { 4.0 } else { 2.0 } * kern(x - y) * f_src(y);
                }
                acc * h / 3.0
            };
            -sech2(x) * ux(x) - (simpson(-span, x, &dgdx_left) + simpson(x, span, &dgdx_right))
        };
        for &x in &[-15.0, -3.0, 0.0, 1.5, 7.5, 18.0] {
            let j = du.grid().points().partition_point(|&p| p < x - 1e-12);
            assert_abs_diff_eq!(du.values()[j], oracle(du.grid().x(j)), epsilon = 1e-8);
        }
    }

    #[test]
    fn rk4_step_on_zero_state() {
        let g = grid(30.0, 256);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let next = step_rk4(&s, 0.05).unwrap();
        assert_eq!(next.u.max_abs(), 0.0);
        assert_eq!(next.rho.max_abs(), 0.0);
        assert_abs_diff_eq!(next.t, 0.05);
    }

    #[test]
    fn rk4_temporal_order() {
        // one-step Richardson on the sech datum
        let g = grid(60.0, 1024);
        let s = sech_state(g, 0.5, 0.3);
        let coarse = step_rk4(&s, 1e-2).unwrap();
        let mid = {
            let a = step_rk4(&s, 5e-3).unwrap();
            step_rk4(&a, 5e-3).unwrap()
        };
        let fine = {
            let mut st = s.clone();
            for _ in 0..4 {
                st = step_rk4(&st, 2.5e-3).unwrap();
            }
            st
        };
        let err1 = coarse.u.zip_with(&mid.u, |a, b| a - b).max_abs();
        let err2 = mid.u.zip_with(&fine.u, |a, b| a - b).max_abs();
        let order = (err1 / err2).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn evolve_zero_horizon() {
        let g = grid(60.0, 1024);
        let s = sech_state(g, 0.5, 0.3);
        let traj = evolve(&s, 0.0, &EvolveOptions::default()).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.outcome, Outcome::Completed);
    }

    #[test]
    fn evolve_zero_state() {
        let g = grid(30.0, 256);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        let traj = evolve(
            &s,
            1.0,
            &EvolveOptions {
                output_stride: 0.25,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(traj.snapshots.len(), 5);
        for snap in &traj.snapshots {
            assert_eq!(snap.state.u.max_abs(), 0.0);
            assert_eq!(snap.state.rho.max_abs(), 0.0);
        }
    }

    #[test]
    fn rho_zero_is_invariant() {
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |x: f64| 0.4 / x.cosh(), |_| 0.0);
        let traj = evolve(
            &s,
            0.5,
            &EvolveOptions {
                output_stride: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        for snap in &traj.snapshots {
            assert_eq!(snap.state.rho.max_abs(), 0.0);
        }
    }

    #[test]
    fn diagnostics_zero_and_rho_only() {
        let g = grid(30.0, 512);
        let z = State::from_fn(g.clone(), |_| 0.0, |_| 0.0);
        let d = diagnostics(&z);
        assert_eq!(d.m_t, 0.0);
        assert_eq!(d.h1, 0.0);
        assert_eq!(d.h2, 0.0);

        let s = State::from_fn(g.clone(), |_| 0.0, |x: f64| (-x * x).exp());
        let d = diagnostics(&s);
        let oracle: f64 = 0.5
            * g.points()
                .iter()
                .map(|&x| (-2.0 * x * x).exp())
                .sum::<f64>()
            * g.dx();
        assert_abs_diff_eq!(d.h1, oracle, epsilon = 1e-12);
        assert_eq!(d.h2, 0.0);
    }

    #[test]
    fn h1_matches_integrated_by_parts_quadrature() {
        // int u m = int u^2 + int u_x^2 after integrating by parts
        let g = grid(60.0, 4096);
        let s = sech_state(g.clone(), 0.5, 0.3);
        let d = diagnostics(&s);
        let sech = |x: f64| 1.0 / x.cosh();
        let sech_x = |x: f64| -x.tanh() / x.cosh();
        let oracle: f64 = 0.5
            * g.points()
                .iter()
                .map(|&x| {
                    let u = 0.5 * sech(x);
                    let ux = 0.5 * sech_x(x);
                    let r = 0.3 * sech(x);
                    u * u + ux * ux + r * r
                })
                .sum::<f64>()
            * g.dx();
        assert_abs_diff_eq!(d.h1, oracle, epsilon = 1e-10);
    }

    #[test]
    fn hamiltonian_drift_short_run() {
        let g = grid(60.0, 2048);
        let s = sech_state(g, 0.5, 0.3);
        let traj = evolve(
            &s,
            0.5,
            &EvolveOptions {
                output_stride: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        let h1_0 = traj.diagnostics[0].h1;
        let h2_0 = traj.diagnostics[0].h2;
        for d in &traj.diagnostics {
            assert!(
                (d.h1 - h1_0).abs() / h1_0.abs() < 1e-7,
                "H1 drift {}",
                (d.h1 - h1_0) / h1_0
            );
            assert!(
                (d.h2 - h2_0).abs() / h2_0.abs() < 1e-6,
                "H2 drift {}",
                (d.h2 - h2_0) / h2_0
            );
        }
    }

    #[test]
    fn reflection_symmetry() {
        // x -> -x, u -> -u leaves the system invariant
        let g = grid(60.0, 2048);
        let s = State::from_fn(
            g.clone(),
            |x: f64| 0.4 / (x - 1.0).cosh(),
            |x: f64| 0.2 / (x + 0.5).cosh(),
        );
        let opts = EvolveOptions {
            output_stride: 0.1,
            ..Default::default()
        };
        let fwd = evolve(&s, 0.3, &opts).unwrap();
        let mirrored = State::new(s.u.reflect().map(|v| -v), s.rho.reflect(), 0.0).unwrap();
        let bwd = evolve(&mirrored, 0.3, &opts).unwrap();
        let last_f = &fwd.snapshots.last().unwrap().state;
        let last_b = &bwd.snapshots.last().unwrap().state;
        let du = last_b
            .u
            .zip_with(&last_f.u.reflect().map(|v| -v), |a, b| a - b);
        let dr = last_b.rho.zip_with(&last_f.rho.reflect(), |a, b| a - b);
        assert!(du.max_abs() < 1e-10, "u asymmetry {}", du.max_abs());
        assert!(dr.max_abs() < 1e-10, "rho asymmetry {}", dr.max_abs());
    }

    #[test]
    fn rough_datum_rejected() {
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |x: f64| if x.abs() < 1.0 { 0.3 } else { 0.0 }, |_| 0.0);
        assert!(matches!(
            evolve(&s, 0.1, &EvolveOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fat_tail_rejected_as_domain_too_small() {
        // spectrally smooth (gaussian + constant) but nonzero at the edges
        let g = grid(60.0, 1024);
        let s = State::from_fn(g, |x: f64| 0.3 * (-x * x).exp() + 1e-6, |_| 0.0);
        assert!(matches!(
            evolve(&s, 0.1, &EvolveOptions::default()),
            Err(Error::DomainTooSmall { t, .. }) if t == 0.0
        ));
    }

    #[test]
    fn steep_datum_blows_up() {
        // antisymmetric datum with large negative slope: wave breaking
        let g = grid(60.0, 2048);
        let s = State::from_fn(g, |x: f64| -3.0 * x * (-0.5 * x * x).exp(), |_| 0.0);
        let traj = evolve(
            &s,
            3.0,
            &EvolveOptions {
                output_stride: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        match traj.outcome {
            Outcome::BlowUp { t } => assert!(t < 3.0),
            Outcome::Completed => panic!("expected breakdown"),
        }
    }

    #[test]
    fn stride_must_divide_t_end() {
        let g = grid(30.0, 256);
        let s = State::from_fn(g, |_| 0.0, |_| 0.0);
        assert!(evolve(
            &s,
            1.0,
            &EvolveOptions {
                output_stride: 0.3,
                ..Default::default()
            }
        )
        .is_err());
    }
}
