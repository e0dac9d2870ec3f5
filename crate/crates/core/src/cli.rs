//! Experiment runner: plain-text configs, presets, verification checks and
//! CSV artifact emission.
//!
//! Configs are `key=value` lines with `#` comments. Every run writes a
//! trajectory directory (`meta`, `snap_<index>.csv`, `diag.csv`), one CSV
//! per requested check and a `summary.txt` with verdicts. The pipeline is
//! deterministic: identical configs byte-reproduce all outputs.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{self, check_condition, profile_report, rho_remainder_in, FarSide};
use crate::dynamics::{
    bump_state, evolve, gaussian_state, sech_state, EvolveOptions, Outcome, RunMeta, State,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::persistence::{
    decay_preservation_check, verify_corollary1, verify_differential_inequalities, verify_theorem1,
    DecayKind,
};
use crate::spectral::{Field, Grid, NormOrder, Window};
use crate::weights::{
    certify, parse_weight_spec, weighted_young_check_with, Side, Smoothing, WeightSpec,
    DEFAULT_SAMPLES, DEFAULT_SAMPLE_BOX,
};

/// Initial datum presets.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Zero,
    Sech,
    Gaussian,
    Bump,
    CustomFile(PathBuf),
}

impl Preset {
    fn name(&self) -> String {
        match self {
            Preset::Zero => "zero".into(),
            Preset::Sech => "sech".into(),
            Preset::Gaussian => "gaussian".into(),
            Preset::Bump => "bump".into(),
            Preset::CustomFile(p) => format!("custom-file:{}", p.display()),
        }
    }
}

/// Verification checks selectable per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Theorem1,
    DiffIneq,
    Corollary1,
    Corollary2,
    Decay,
    Propagation,
    Young,
}

impl Check {
    pub fn parse(s: &str) -> Result<Check> {
        match s.trim() {
            "theorem1" => Ok(Check::Theorem1),
            "diffineq" => Ok(Check::DiffIneq),
            "corollary1" => Ok(Check::Corollary1),
            "corollary2" => Ok(Check::Corollary2),
            "decay" => Ok(Check::Decay),
            "propagation" => Ok(Check::Propagation),
            "young" => Ok(Check::Young),
            other => Err(Error::Domain(format!("unknown check `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Check::Theorem1 => "theorem1",
            Check::DiffIneq => "diffineq",
            Check::Corollary1 => "corollary1",
            Check::Corollary2 => "corollary2",
            Check::Decay => "decay",
            Check::Propagation => "propagation",
            Check::Young => "young",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Decay-check configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayConfig {
    Algebraic(f64),
    OneSided(f64),
}

/// A full run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: Preset,
    pub amplitude_u: f64,
    pub amplitude_rho: f64,
    pub l: f64,
    pub n: usize,
    pub t_end: f64,
    pub output_stride: f64,
    pub weight: WeightSpec,
    pub p: NormOrder,
    pub checks: BTreeSet<Check>,
    pub decay: DecayConfig,
    pub cond_d: f64,
    pub seed: u64,
    pub filter: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: Preset::Sech,
            amplitude_u: 0.5,
            amplitude_rho: 0.3,
            l: 60.0,
            n: 4096,
            t_end: 2.0,
            output_stride: 0.01,
            weight: WeightSpec::new(0.0, 0.0, 2.0, 0.0).expect("valid default weight"),
            p: NormOrder::Infinity,
            checks: BTreeSet::new(),
            decay: DecayConfig::OneSided(0.9),
            cond_d: 1.0,
            seed: 7,
            filter: false,
        }
    }
}

impl RunConfig {
    /// Parse a key=value config; `#` starts a comment.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut l_set = false;
        let mut n_set = false;
        let mut weight_side = Side::Both;
        let mut weight_smoothing: Option<Smoothing> = None;
        let (mut wa, mut wb, mut wc, mut wd) = (0.0, 0.0, 2.0, 0.0);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno,
                message: format!("expected key=value, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("`{v}` is not a number"),
                })
            };
            match key {
                "preset" => {
                    cfg.preset = match value {
                        "zero" => Preset::Zero,
                        "sech" => Preset::Sech,
                        "gaussian" => Preset::Gaussian,
                        "bump" => Preset::Bump,
                        "custom-file" => Preset::CustomFile(PathBuf::new()),
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!("unknown preset `{other}`"),
                            })
                        }
                    }
                }
                "custom_file" => cfg.preset = Preset::CustomFile(PathBuf::from(value)),
                "amplitude_u" => cfg.amplitude_u = num(value)?,
                "amplitude_rho" => cfg.amplitude_rho = num(value)?,
                "L" => {
                    cfg.l = num(value)?;
                    l_set = true;
                }
                "N" => {
                    cfg.n = num(value)? as usize;
                    n_set = true;
                }
                "T_end" => cfg.t_end = num(value)?,
                "output_stride" => cfg.output_stride = num(value)?,
                "p" => {
                    cfg.p = NormOrder::parse(value).map_err(|e| Error::Parse {
                        line: lineno,
                        message: e.to_string(),
                    })?
                }
                "a" => wa = num(value)?,
                "b" => wb = num(value)?,
                "c" => wc = num(value)?,
                "d" => wd = num(value)?,
                "side" => {
                    weight_side = match value {
                        "both" => Side::Both,
                        "right" => Side::RightOnly,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!("side must be both|right, got `{other}`"),
                            })
                        }
                    }
                }
                "smoothing" => {
                    weight_smoothing = Some(match value {
                        "exact" => Smoothing::Exact,
                        "regularized" => Smoothing::Regularized,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!(
                                    "smoothing must be exact|regularized, got `{other}`"
                                ),
                            })
                        }
                    })
                }
                "checks" => {
                    cfg.checks.clear();
                    for part in value.split(',').filter(|s| !s.trim().is_empty()) {
                        cfg.checks
                            .insert(Check::parse(part).map_err(|e| Error::Parse {
                                line: lineno,
                                message: e.to_string(),
                            })?);
                    }
                }
                "decay_kind" => {
                    cfg.decay = match value {
                        "algebraic" => DecayConfig::Algebraic(match cfg.decay {
                            DecayConfig::Algebraic(r) | DecayConfig::OneSided(r) => r,
                        }),
                        "one_sided" => DecayConfig::OneSided(match cfg.decay {
                            DecayConfig::Algebraic(r) | DecayConfig::OneSided(r) => r,
                        }),
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!(
                                    "decay_kind must be algebraic|one_sided, got `{other}`"
                                ),
                            })
                        }
                    }
                }
                "decay_rate" => {
                    let r = num(value)?;
                    cfg.decay = match cfg.decay {
                        DecayConfig::Algebraic(_) => DecayConfig::Algebraic(r),
                        DecayConfig::OneSided(_) => DecayConfig::OneSided(r),
                    };
                }
                "cond_d" => cfg.cond_d = num(value)?,
                "seed" => {
                    cfg.seed = value.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("`{value}` is not an integer seed"),
                    })?
                }
                "filter" => {
                    cfg.filter = match value {
                        "on" => true,
                        "off" => false,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!("filter must be on|off, got `{other}`"),
                            })
                        }
                    }
                }
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("unknown config key `{other}`"),
                    })
                }
            }
        }
        let mut w = WeightSpec::new(wa, wb, wc, wd)
            .map_err(|e| Error::Precondition(format!("weight block invalid: {e}")))?;
        if weight_side == Side::RightOnly {
            w = w.right_only();
        }
        if let Some(s) = weight_smoothing {
            w = w.with_smoothing(s);
        }
        cfg.weight = w;
        // the bump needs a tighter, finer grid to be smooth at resolution
        if cfg.preset == Preset::Bump {
            if !l_set {
                cfg.l = 30.0;
            }
            if !n_set {
                cfg.n = 16384;
            }
        }
        Ok(cfg)
    }

    fn initial_state(&self) -> Result<State> {
        let grid = Arc::new(Grid::new(self.l, self.n)?);
        Ok(match &self.preset {
            Preset::Zero => State::from_fn(grid, |_| 0.0, |_| 0.0),
            Preset::Sech => sech_state(grid, self.amplitude_u, self.amplitude_rho),
            Preset::Gaussian => gaussian_state(grid, self.amplitude_u, self.amplitude_rho),
            Preset::Bump => bump_state(grid, self.amplitude_u, self.amplitude_rho),
            Preset::CustomFile(path) => load_custom_state(path, grid)?,
        })
    }
}

/// Read a two- or three-column CSV (x,u[,rho]) and resample onto the run
/// grid by trigonometric interpolation.
fn load_custom_state(path: &Path, grid: Arc<Grid>) -> Result<State> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut rs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if idx == 0 && cols[0].parse::<f64>().is_err() {
            continue; // header row
        }
        if cols.len() < 2 || cols.len() > 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 or 3 columns, got {}", cols.len()),
            });
        }
        let parse = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("`{v}` is not a number"),
            })
        };
        xs.push(parse(cols[0])?);
        us.push(parse(cols[1])?);
        rs.push(if cols.len() == 3 {
            parse(cols[2])?
        } else {
            0.0
        });
    }
    if xs.len() < 16 {
        return Err(Error::Precondition(format!(
            "custom datum has {} samples; need at least 16",
            xs.len()
        )));
    }
    let dx = xs[1] - xs[0];
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs() {
            return Err(Error::Precondition(
                "custom datum grid is not uniform".into(),
            ));
        }
    }
    let u = resample_trig(&xs, &us, &grid);
    let rho = resample_trig(&xs, &rs, &grid);
    State::new(Field::new(grid.clone(), u)?, Field::new(grid, rho)?, 0.0)
}

// Trigonometric interpolation of uniform samples onto the run grid.
fn resample_trig(xs: &[f64], vals: &[f64], grid: &Arc<Grid>) -> Vec<f64> {
    let m = xs.len();
    let period = (xs[1] - xs[0]) * m as f64;
    let x0 = xs[0];
    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let mut coeffs: Vec<Complex64> = vals.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut coeffs);
    let two_pi = std::f64::consts::TAU;
    grid.points()
        .iter()
        .map(|&x| {
            let theta = two_pi * (x - x0) / period;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &c) in coeffs.iter().enumerate() {
                let freq = if j <= m / 2 {
                    j as f64
                } else {
                    j as f64 - m as f64
                };
                if m.is_multiple_of(2) && j == m / 2 {
                    // unmatched half-frequency mode enters as a cosine
                    acc += c * Complex64::new((freq * theta).cos(), 0.0);
                } else {
                    acc += c * Complex64::new(0.0, freq * theta).exp();
                }
            }
            acc.re / m as f64
        })
        .collect()
}

/// One check's verdict, with a short human-readable detail.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: Check,
    pub pass: bool,
    pub detail: String,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcomes: Vec<CheckOutcome>,
    pub blow_up: Option<f64>,
    pub out_dir: PathBuf,
}

impl RunSummary {
    /// 0 all pass; 1 some check failed; 3 blow-up before T_end.
    pub fn exit_code(&self) -> i32 {
        if self.blow_up.is_some() {
            3
        } else if self.outcomes.iter().all(|o| o.pass) {
            0
        } else {
            1
        }
    }
}

/// Exit code for errors surfaced before or during a run: 2 for
/// precondition/admissibility/parse violations, 4 for i/o failures.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 4,
        Error::BlowUp { .. } => 3,
        _ => 2,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_trajectory(traj: &Trajectory, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let m = &traj.meta;
    let outcome = match traj.outcome {
        Outcome::Completed => "completed".to_string(),
        Outcome::BlowUp { t } => format!("blow-up at t={t:.6}"),
    };
    let meta = format!(
        "preset={}\nL={}\nN={}\nT_end={}\noutput_stride={}\namplitude_u={}\namplitude_rho={}\nfilter={}\ncfl=0.3\ncfl_recheck=10\noutcome={}\n",
        m.preset,
        m.l,
        m.n,
        m.t_end,
        m.output_stride,
        m.amplitude_u,
        m.amplitude_rho,
        if m.filter { "on" } else { "off" },
        outcome
    );
    write_file(&dir.join("meta"), &meta)?;

    let mut diag = String::from("t,M,H1,H2,min_m,tail_max\n");
    for (snap, d) in traj.snapshots.iter().zip(&traj.diagnostics) {
        diag.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            snap.state.t, d.m_t, d.h1, d.h2, d.min_m, d.tail_max
        ));
    }
    write_file(&dir.join("diag.csv"), &diag)?;

    for (i, snap) in traj.snapshots.iter().enumerate() {
        let grid = snap.state.grid();
        let mut csv = String::from("x,u,rho\n");
        for j in 0..grid.len() {
            csv.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                grid.x(j),
                snap.state.u.values()[j],
                snap.state.rho.values()[j]
            ));
        }
        write_file(&dir.join(format!("snap_{i}.csv")), &csv)?;
    }
    Ok(())
}

// ---- individual checks -------------------------------------------------

fn check_theorem1(cfg: &RunConfig, traj: &Trajectory, out: &Path) -> Result<CheckOutcome> {
    let rep = verify_theorem1(traj, &cfg.weight, cfg.p)?;
    write_file(&out.join("theorem1.csv"), &rep.to_csv())?;
    let worst = rep
        .margin
        .iter()
        .zip(&rep.bound)
        .map(|(m, b)| if *b != 0.0 { m / b } else { 0.0 })
        .fold(f64::INFINITY, f64::min);
    Ok(CheckOutcome {
        check: Check::Theorem1,
        pass: rep.verdict,
        detail: format!(
            "C={:.3}, M={:.3}, min margin/bound={:.3e}",
            rep.c_used, rep.m, worst
        ),
    })
}

fn check_diffineq(cfg: &RunConfig, traj: &Trajectory, out: &Path) -> Result<CheckOutcome> {
    let rep = verify_differential_inequalities(traj, &cfg.weight, cfg.p)?;
    let mut csv = String::from("component,worst_rel,at_t\n");
    for (k, name) in crate::persistence::INEQUALITY_NAMES.iter().enumerate() {
        csv.push_str(&format!(
            "{name},{:.16e},{:.16e}\n",
            rep.worst_rel[k], rep.worst_time[k]
        ));
    }
    write_file(&out.join("diffineq.csv"), &csv)?;
    let worst = rep
        .worst_rel
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CheckOutcome {
        check: Check::DiffIneq,
        pass: rep.verdict,
        detail: format!("worst relative violation {worst:.3e}"),
    })
}

fn check_corollary1(cfg: &RunConfig, traj: &Trajectory, out: &Path) -> Result<CheckOutcome> {
    let rep = verify_corollary1(traj, &cfg.weight, cfg.p)?;
    write_file(&out.join("corollary1.csv"), &rep.to_csv())?;
    Ok(CheckOutcome {
        check: Check::Corollary1,
        pass: rep.verdict,
        detail: format!("tier sups {:.3e} / {:.3e}", rep.tier1_sup, rep.tier2_sup),
    })
}

fn check_corollary2(cfg: &RunConfig, traj: &Trajectory, out: &Path) -> Result<CheckOutcome> {
    // quartile snapshot times
    let times: Vec<f64> = [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| f * cfg.t_end)
        .filter(|&t| traj.times().iter().any(|&s| (s - t).abs() <= 1e-9))
        .collect();
    if times.is_empty() {
        return Err(Error::Precondition(
            "no quartile snapshot times available for the profile check".into(),
        ));
    }
    let rep = profile_report(traj, &times)?;
    write_file(&out.join("corollary2.csv"), &rep.to_csv())?;

    let mut pass = rep.c1 > 0.0 && rep.c2.is_finite();
    let mut notes = Vec::new();
    for row in &rep.rows {
        if !(row.phi_plus > 0.0 && row.phi_minus > 0.0) {
            pass = false;
            notes.push(format!("Phi not positive at t={}", row.t));
        }
        if row.extracted_plus.is_nan()
            || (row.extracted_plus - row.phi_plus).abs() > 0.10 * row.phi_plus
        {
            pass = false;
            notes.push(format!("coefficient mismatch at t={}", row.t));
        }
    }
    // rho remainder across outward windows, where the domain allows
    let l = traj.initial().grid().half_width();
    if l >= 34.0 {
        for &t in &times {
            let mut last = f64::INFINITY;
            for w in [
                Window::new(12.0, 16.0),
                Window::new(16.0, 20.0),
                Window::new(20.0, 24.0),
            ] {
                let r = rho_remainder_in(traj, t, FarSide::Right, w)?;
                if r >= last {
                    pass = false;
                    notes.push(format!("rho remainder not decreasing at t={t}"));
                }
                last = r;
            }
        }
    }
    // the condition functional must stay finite along the run
    for snap in &traj.snapshots {
        let cond = check_condition(&snap.state, cfg.cond_d)?;
        if !cond.bounded || !cond.sup.is_finite() {
            pass = false;
            notes.push(format!("condition unbounded at t={}", snap.state.t));
            break;
        }
    }
    let detail = if notes.is_empty() {
        format!(
            "c1={:.3e}, c2={:.3e} over {} times",
            rep.c1,
            rep.c2,
            rep.rows.len()
        )
    } else {
        notes.join("; ")
    };
    Ok(CheckOutcome {
        check: Check::Corollary2,
        pass,
        detail,
    })
}

fn check_decay(cfg: &RunConfig, traj: &Trajectory, out: &Path) -> Result<CheckOutcome> {
    let kind = match cfg.decay {
        DecayConfig::Algebraic(c) => DecayKind::Algebraic { c },
        DecayConfig::OneSided(a) => DecayKind::OneSidedExponential { a },
    };
    let rep = decay_preservation_check(traj, kind)?;
    let mut csv = String::from("t,rate\n");
    for (t, r) in rep.times.iter().zip(&rep.rates) {
        csv.push_str(&format!("{:.16e},{:.16e}\n", t, r));
    }
    write_file(&out.join("decay.csv"), &csv)?;
    Ok(CheckOutcome {
        check: Check::Decay,
        pass: rep.verdict,
        detail: if rep.vacuous {
            "vacuous (no signal)".into()
        } else {
            format!("initial rate {:.3}", rep.initial_rate)
        },
    })
}

fn check_propagation(_cfg: &RunConfig, traj: &Trajectory, out: &Path) -> Result<CheckOutcome> {
    let rep = asymptotics::infinite_propagation_check(traj)?;
    let csv = format!(
        "detected,fitted_rate,pass\n{:.16e},{:.16e},{}\n",
        rep.detected, rep.fitted_rate, rep.pass
    );
    write_file(&out.join("propagation.csv"), &csv)?;
    Ok(CheckOutcome {
        check: Check::Propagation,
        pass: rep.pass,
        detail: if rep.vacuous {
            "vacuous (zero datum)".into()
        } else {
            format!("tail {:.3e}, rate {:.4}", rep.detected, rep.fitted_rate)
        },
    })
}

/// Number of random function pairs per Young check.
pub const YOUNG_DRAWS: usize = 200;

/// Draw a smooth rapidly-decaying random function: a few Gaussian bumps
/// with bounded centers and widths.
pub fn random_smooth_field(grid: &Arc<Grid>, rng: &mut impl Rng) -> Field {
    let mut bumps = Vec::new();
    for _ in 0..3 {
        let amp: f64 = rng.gen_range(-1.0..1.0);
        let center: f64 = rng.gen_range(-8.0..8.0);
        let width: f64 = rng.gen_range(0.6..2.5);
        bumps.push((amp, center, width));
    }
    Field::from_fn(grid.clone(), move |x| {
        bumps
            .iter()
            .map(|&(a, c, w)| a * (-((x - c) * (x - c)) / (2.0 * w * w)).exp())
            .sum()
    })
}

fn check_young(cfg: &RunConfig, out: &Path) -> Result<CheckOutcome> {
    // convolution lattice independent of the run grid
    let grid = Arc::new(Grid::new(32.0, 1024)?);
    let cert = certify(&cfg.weight, DEFAULT_SAMPLE_BOX, DEFAULT_SAMPLES)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("draw,lhs,rhs,holds\n");
    let mut failures = 0usize;
    for draw in 0..YOUNG_DRAWS {
        let f1 = random_smooth_field(&grid, &mut rng);
        let f2 = random_smooth_field(&grid, &mut rng);
        let chk = weighted_young_check_with(&f1, &f2, &cfg.weight, cfg.p, cert.c_mod)?;
        if !chk.holds {
            failures += 1;
        }
        csv.push_str(&format!(
            "{draw},{:.16e},{:.16e},{}\n",
            chk.lhs, chk.rhs, chk.holds
        ));
    }
    write_file(&out.join("young.csv"), &csv)?;
    Ok(CheckOutcome {
        check: Check::Young,
        pass: failures == 0,
        detail: format!("{failures} of {YOUNG_DRAWS} draws violated"),
    })
}

// ---- run orchestration ---------------------------------------------------

/// Integrate the configured run and return the trajectory with its
/// metadata filled in.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory> {
    let initial = cfg.initial_state()?;
    let opts = EvolveOptions {
        output_stride: cfg.output_stride,
        dt_cap: None,
        filter: cfg.filter,
        skip_smoothness_check: false,
    };
    let mut traj = evolve(&initial, cfg.t_end, &opts)?;
    traj.meta = RunMeta {
        preset: cfg.preset.name(),
        l: cfg.l,
        n: cfg.n,
        t_end: cfg.t_end,
        output_stride: cfg.output_stride,
        amplitude_u: cfg.amplitude_u,
        amplitude_rho: cfg.amplitude_rho,
        filter: cfg.filter,
    };
    Ok(traj)
}

/// Execute a configured run: simulate, write the trajectory, run every
/// requested check, write `summary.txt`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    // admissibility is a precondition for the checks that need the weight
    if cfg.checks.contains(&Check::Theorem1)
        || cfg.checks.contains(&Check::DiffIneq)
        || cfg.checks.contains(&Check::Young)
    {
        certify(&cfg.weight, DEFAULT_SAMPLE_BOX, DEFAULT_SAMPLES)?;
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;

    let traj = simulate(cfg)?;
    write_trajectory(&traj, &out_dir.join("traj"))?;

    let blow_up = match traj.outcome {
        Outcome::BlowUp { t } => Some(t),
        Outcome::Completed => None,
    };

    let mut outcomes = Vec::new();
    if blow_up.is_none() {
        for check in &cfg.checks {
            let outcome = match check {
                Check::Theorem1 => check_theorem1(cfg, &traj, out_dir)?,
                Check::DiffIneq => check_diffineq(cfg, &traj, out_dir)?,
                Check::Corollary1 => check_corollary1(cfg, &traj, out_dir)?,
                Check::Corollary2 => check_corollary2(cfg, &traj, out_dir)?,
                Check::Decay => check_decay(cfg, &traj, out_dir)?,
                Check::Propagation => check_propagation(cfg, &traj, out_dir)?,
                Check::Young => check_young(cfg, out_dir)?,
            };
            outcomes.push(outcome);
        }
    }

    let mut summary = String::new();
    for o in &outcomes {
        summary.push_str(&format!(
            "check {}: {} ({})\n",
            o.check,
            if o.pass { "pass" } else { "fail" },
            o.detail
        ));
    }
    match blow_up {
        Some(t) => summary.push_str(&format!("outcome: blow-up at t={t:.6}\n")),
        None => summary.push_str("outcome: completed\n"),
    }
    let result = RunSummary {
        outcomes,
        blow_up,
        out_dir: out_dir.to_path_buf(),
    };
    summary.push_str(&format!("exit: {}\n", result.exit_code()));
    write_file(&out_dir.join("summary.txt"), &summary)?;
    Ok(result)
}

/// Certificate dump for `weights-check`: certificate fields plus the traced
/// Gronwall constant.
pub fn weights_check_text(spec_text: &str) -> Result<String> {
    let spec = parse_weight_spec(spec_text)?;
    let cert = certify(&spec, DEFAULT_SAMPLE_BOX, DEFAULT_SAMPLES)?;
    let c = crate::persistence::gronwall_constant(&cert);
    Ok(format!(
        "c_mod={:.12e}\nA={:.12e}\nv_integral={:.12e}\ndGv_l1={:.12e}\nGv_l1={:.12e}\nsample_box={}\nC={:.12e}\n",
        cert.c_mod, cert.a_bound, cert.v_integral, cert.dgv_l1, cert.gv_l1, cert.sample_box, c
    ))
}

/// Run several configs concurrently, each into `out_root/<name>`.
///
/// Returns the per-run exit codes in input order; errors are mapped
/// through [`exit_code_for_error`].
pub fn sweep(configs: &[(String, RunConfig)], out_root: &Path, jobs: usize) -> Vec<(String, i32)> {
    let jobs = jobs.max(1);
    let mut results: Vec<(String, i32)> = configs.iter().map(|(n, _)| (n.clone(), 0)).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results_mx = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let (name, cfg) = &configs[i];
                let code = match run(cfg, &out_root.join(name)) {
                    Ok(summary) => summary.exit_code(),
                    Err(e) => {
                        eprintln!("{name}: {e}");
                        exit_code_for_error(&e)
                    }
                };
                results_mx.lock().unwrap()[i] = (name.clone(), code);
            });
        }
    });
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_parse() {
        let cfg = RunConfig::parse(
            "# comment\npreset=sech\nT_end=0.5\noutput_stride=0.05\nchecks=theorem1,young\np=2\na=0\nb=0\nc=2\nd=0\n",
        )
        .unwrap();
        assert_eq!(cfg.preset, Preset::Sech);
        assert_eq!(cfg.t_end, 0.5);
        assert_eq!(cfg.p, NormOrder::Finite(2.0));
        assert!(cfg.checks.contains(&Check::Theorem1));
        assert!(cfg.checks.contains(&Check::Young));
        assert_eq!(cfg.weight, WeightSpec::new(0.0, 0.0, 2.0, 0.0).unwrap());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(matches!(
            RunConfig::parse("bogus=1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("preset=sech\nchecks=wat\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn bump_preset_defaults() {
        let cfg = RunConfig::parse("preset=bump\n").unwrap();
        assert_eq!(cfg.l, 30.0);
        assert_eq!(cfg.n, 16384);
        let cfg2 = RunConfig::parse("preset=bump\nL=20\nN=8192\n").unwrap();
        assert_eq!(cfg2.l, 20.0);
        assert_eq!(cfg2.n, 8192);
    }

    #[test]
    fn weights_check_unit_constant() {
        let text = weights_check_text("a=0\nb=0\nc=0\nd=0\n").unwrap();
        assert!(text.contains("C=1.4"), "{text}");
        assert!(text.contains("c_mod=1.0"), "{text}");
    }

    #[test]
    fn weights_check_rejects_saturated() {
        assert!(matches!(
            weights_check_text("a=1\nb=1\n"),
            Err(Error::NotAdmissible(_))
        ));
        let ok = weights_check_text("a=0.5\nb=1\n").unwrap();
        assert!(ok.contains("v_integral"));
    }

    #[test]
    fn resample_round_trip() {
        // source samples on one grid, resampled to a refined grid
        let coarse = Arc::new(Grid::new(30.0, 256).unwrap());
        let xs: Vec<f64> = coarse.points().to_vec();
        let vals: Vec<f64> = xs.iter().map(|&x| (-x * x / 4.0).exp()).collect();
        let fine = Arc::new(Grid::new(30.0, 512).unwrap());
        let out = resample_trig(&xs, &vals, &fine);
        for (j, &v) in out.iter().enumerate() {
            let x = fine.x(j);
            assert!((v - (-x * x / 4.0).exp()).abs() < 1e-10, "x={x}: {v}");
        }
    }
}
