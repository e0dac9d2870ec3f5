//! Moderate weight functions and their certification.
//!
//! The working family is phi_{a,b,c,d}(x) = e^{a|x|^b} (1+|x|)^c (log(e+|x|))^d,
//! optionally restricted to the right half-line (phi = 1 for x < 0) and
//! optionally with the |x| in the exponential factor regularized to keep the
//! logarithmic derivative bounded. A weight is admissible when a >= 0,
//! 0 <= b <= 1 and ab < 1; certification estimates the moderateness constant
//! c_mod with respect to a sub-multiplicative companion v, the a.e. bound A
//! on |phi'/phi|, and the kernel integrals that feed the Gronwall constant.

use crate::error::{Error, Result};
use crate::quad;
use crate::spectral::{Field, NormOrder};

/// Which side of the line the weight acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Even weight phi(|x|).
    Both,
    /// phi on x >= 0, identically 1 on x < 0.
    RightOnly,
}

/// Treatment of |x| inside the exponential factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    /// Literal |x|^b; the logarithmic derivative is unbounded near 0
    /// unless b is 0 or 1.
    Exact,
    /// |x| replaced by sqrt(1+x^2) - 1 in the exponential factor only,
    /// preserving the large-x asymptotics.
    Regularized,
}

/// Parametric weight e^{a s(x)^b} (1+|x|)^c (log(e+|x|))^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub side: Side,
    pub smoothing: Smoothing,
}

/// Certified moderateness data for one weight/companion pair.
#[derive(Debug, Clone, Copy)]
pub struct ModerateCertificate {
    /// Sampled sup of phi(x+y) / (v(x) phi(y)).
    pub c_mod: f64,
    /// A.e. bound on |phi'/phi| (termwise supremum over the family formula).
    pub a_bound: f64,
    /// Integral of v(x) e^{-|x|} over the line.
    pub v_integral: f64,
    /// L1 norm of (d/dx G) v = half of `v_integral`.
    pub dgv_l1: f64,
    /// L1 norm of G v = half of `v_integral`.
    pub gv_l1: f64,
    /// Half-width of the lattice used for the c_mod estimate.
    pub sample_box: f64,
}

// Natural-log threshold beyond which e^x is no longer a normal f64.
const LOG_RANGE: f64 = 700.0;

impl WeightSpec {
    /// Build a two-sided weight; smoothing defaults to exact for b in {0, 1}
    /// and to the regularized form otherwise.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            return Err(Error::Domain("weight parameters must be finite".into()));
        }
        if a < 0.0 {
            return Err(Error::Domain(format!("exponential amplitude a = {a} < 0")));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Domain(format!(
                "exponential power b = {b} not in [0,1]"
            )));
        }
        let smoothing = if b == 0.0 || b == 1.0 {
            Smoothing::Exact
        } else {
            Smoothing::Regularized
        };
        Ok(WeightSpec {
            a,
            b,
            c,
            d,
            side: Side::Both,
            smoothing,
        })
    }

    /// The constant weight phi == 1.
    pub fn unit() -> Self {
        WeightSpec {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            side: Side::Both,
            smoothing: Smoothing::Exact,
        }
    }

    /// One-sided variant: family value for x >= 0, 1 for x < 0.
    pub fn right_only(mut self) -> Self {
        self.side = Side::RightOnly;
        self
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.smoothing = smoothing;
        self
    }

    /// a >= 0, 0 <= b <= 1 and ab < 1.
    pub fn is_admissible(&self) -> bool {
        self.a >= 0.0 && (0.0..=1.0).contains(&self.b) && self.a * self.b < 1.0
    }

    /// phi^{1/2}, staying inside the family.
    pub fn sqrt(&self) -> WeightSpec {
        WeightSpec {
            a: 0.5 * self.a,
            b: self.b,
            c: 0.5 * self.c,
            d: 0.5 * self.d,
            side: self.side,
            smoothing: self.smoothing,
        }
    }

    /// The |x| surrogate used in the exponential factor.
    fn exp_arg(&self, absx: f64) -> f64 {
        match self.smoothing {
            Smoothing::Exact => absx,
            // sqrt(1+x^2) - 1, written to avoid cancellation for small |x|
            Smoothing::Regularized => absx * absx / ((1.0 + absx * absx).sqrt() + 1.0),
        }
    }

    /// log phi(x); always finite for finite parameters.
    pub fn log_eval(&self, x: f64) -> f64 {
        if self.side == Side::RightOnly && x < 0.0 {
            return 0.0;
        }
        let absx = x.abs();
        let e = if self.a == 0.0 || self.b == 0.0 {
            self.a * f64::from(self.b == 0.0) // |x|^0 = 1 by convention
        } else {
            self.a * self.exp_arg(absx).powf(self.b)
        };
        e + self.c * absx.ln_1p() + self.d * (std::f64::consts::E + absx).ln().ln()
    }

    /// phi(x) without range checking; may overflow to inf for extreme x.
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        self.log_eval(x).exp()
    }

    /// phi(x), signalling a range error instead of silently returning
    /// infinity or a flushed-to-zero value.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let lv = self.log_eval(x);
        if lv.abs() > LOG_RANGE {
            return Err(Error::Range { x, log_value: lv });
        }
        Ok(lv.exp())
    }

    /// Serialize as the key=value block understood by [`parse_weight_spec`].
    pub fn serialize(&self) -> String {
        format!(
            "a={}\nb={}\nc={}\nd={}\nside={}\nsmoothing={}\n",
            self.a,
            self.b,
            self.c,
            self.d,
            match self.side {
                Side::Both => "both",
                Side::RightOnly => "right",
            },
            match self.smoothing {
                Smoothing::Exact => "exact",
                Smoothing::Regularized => "regularized",
            }
        )
    }
}

/// Parse a plain-text weight block: `a=`, `b=`, `c=`, `d=`,
/// `side=both|right`, `smoothing=exact|regularized`, `#` comments.
pub fn parse_weight_spec(text: &str) -> Result<WeightSpec> {
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = 0.0;
    let mut d = 0.0;
    let mut side = Side::Both;
    let mut smoothing: Option<Smoothing> = None;
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
        let parse_num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{v}` is not a number"),
            })
        };
        match key {
            "a" => a = parse_num(value)?,
            "b" => b = parse_num(value)?,
            "c" => c = parse_num(value)?,
            "d" => d = parse_num(value)?,
            "side" => {
                side = match value {
                    "both" => Side::Both,
                    "right" => Side::RightOnly,
                    _ => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("side must be both|right, got `{value}`"),
                        })
                    }
                }
            }
            "smoothing" => {
                smoothing = Some(match value {
                    "exact" => Smoothing::Exact,
                    "regularized" => Smoothing::Regularized,
                    _ => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("smoothing must be exact|regularized, got `{value}`"),
                        })
                    }
                })
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unknown weight key `{key}`"),
                })
            }
        }
    }
    let mut spec = WeightSpec::new(a, b, c, d)?;
    if side == Side::RightOnly {
        spec = spec.right_only();
    }
    if let Some(s) = smoothing {
        spec = spec.with_smoothing(s);
    }
    Ok(spec)
}

/// A weight function: either a family member or its pointwise truncation.
#[derive(Debug, Clone, Copy)]
pub enum Weight {
    Family(WeightSpec),
    /// min(phi, n); bounded by n, inherits c_mod and A.
    Truncated(WeightSpec, f64),
}

impl Weight {
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            Weight::Family(s) => s.eval_unchecked(x),
            Weight::Truncated(s, n) => s.eval_unchecked(x).min(*n),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Weight::Family(s) => s.eval(x),
            Weight::Truncated(s, n) => match s.eval(x) {
                Ok(v) => Ok(v.min(*n)),
                // overflow only happens above the cap, so the min saturates
                Err(Error::Range { log_value, .. }) if log_value > 0.0 => Ok(*n),
                Err(e) => Err(e),
            },
        }
    }
}

impl From<WeightSpec> for Weight {
    fn from(s: WeightSpec) -> Self {
        Weight::Family(s)
    }
}

/// Pointwise truncation phi_n = min(phi, n).
pub fn truncate(spec: WeightSpec, n: f64) -> Result<Weight> {
    if n.is_nan() || n <= 0.0 {
        return Err(Error::Domain(format!(
            "truncation level n = {n} must be positive"
        )));
    }
    Ok(Weight::Truncated(spec, n))
}

/// Standard sub-multiplicative companion: same exponential factor,
/// absolute values on the polynomial and logarithmic exponents.
///
/// Sub-multiplicative exactly when the exponential argument is |x| (b = 1 or
/// a = 0); the regularized argument costs a bounded factor that is absorbed
/// into c_mod.
pub fn companion_v(spec: &WeightSpec) -> Result<WeightSpec> {
    if !spec.is_admissible() {
        return Err(Error::NotAdmissible(format!(
            "companion requested for a = {}, b = {} with ab = {} >= 1",
            spec.a,
            spec.b,
            spec.a * spec.b
        )));
    }
    Ok(WeightSpec {
        a: spec.a,
        b: spec.b,
        c: spec.c.abs(),
        d: spec.d.abs(),
        side: Side::Both,
        smoothing: spec.smoothing,
    })
}

/// Sampled sup of phi(x+y) / (v(x) phi(y)) on a `samples` x `samples`
/// lattice over [-box, box]^2, evaluated in log space.
pub fn moderateness_constant(
    spec: &WeightSpec,
    v: &WeightSpec,
    sample_box: f64,
    samples: usize,
) -> f64 {
    let n = samples.max(3);
    let step = 2.0 * sample_box / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| -sample_box + i as f64 * step).collect();
    let log_phi: Vec<f64> = xs.iter().map(|&x| spec.log_eval(x)).collect();
    let log_v: Vec<f64> = xs.iter().map(|&x| v.log_eval(x)).collect();
    let mut sup = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            let log_ratio = spec.log_eval(x + y) - log_v[i] - log_phi[j];
            if log_ratio > sup {
                sup = log_ratio;
            }
        }
    }
    sup.exp()
}

/// Termwise essential supremum of |phi'/phi| for the family.
///
/// Errors when no finite a.e. bound exists: the exact |x|^b factor with
/// 0 < b < 1, and the regularized factor with 0 < b < 1/2, both have an
/// unbounded logarithmic derivative at the origin.
pub fn derivative_bound(spec: &WeightSpec) -> Result<f64> {
    let exp_term = if spec.a == 0.0 || spec.b == 0.0 {
        0.0
    } else {
        match spec.smoothing {
            Smoothing::Exact => {
                if spec.b == 1.0 {
                    spec.a
                } else {
                    return Err(Error::UnboundedDerivative(format!(
                        "exact |x|^b with b = {} in (0,1): |phi'/phi| ~ |x|^(b-1) near 0",
                        spec.b
                    )));
                }
            }
            Smoothing::Regularized => {
                if spec.b < 0.5 {
                    return Err(Error::UnboundedDerivative(format!(
                        "regularized power b = {} < 1/2: |phi'/phi| ~ |x|^(2b-1) near 0",
                        spec.b
                    )));
                }
                // d/dx [ a r(x)^b ] with r = sqrt(1+x^2) - 1; bounded for
                // b >= 1/2, maximum located by dense log-spaced sampling.
                let term = |x: f64| {
                    let r = x * x / ((1.0 + x * x).sqrt() + 1.0);
                    let rp = x / (1.0 + x * x).sqrt();
                    spec.a * spec.b * r.powf(spec.b - 1.0) * rp
                };
                let mut sup: f64 = 0.0;
                let mut x = 1e-9;
                while x < 1e7 {
                    sup = sup.max(term(x));
                    x *= 1.01;
                }
                sup
            }
        }
    };
    // |c|/(1+|x|) <= |c| at 0; |d| / ((e+|x|) log(e+|x|)) <= |d|/e at 0.
    Ok(exp_term + spec.c.abs() + spec.d.abs() / std::f64::consts::E)
}

/// Certify a weight: moderateness constant, derivative bound and the
/// kernel integrals against the standard companion.
pub fn certify(spec: &WeightSpec, sample_box: f64, samples: usize) -> Result<ModerateCertificate> {
    if sample_box.is_nan() || sample_box <= 0.0 {
        return Err(Error::Domain(format!(
            "sample box {sample_box} must be positive"
        )));
    }
    if !spec.is_admissible() {
        return Err(Error::NotAdmissible(format!(
            "a = {}, b = {}: the companion integral of v(x) e^-|x| diverges for ab = {} >= 1",
            spec.a,
            spec.b,
            spec.a * spec.b
        )));
    }
    let v = companion_v(spec)?;
    let c_mod = moderateness_constant(spec, &v, sample_box, samples);
    let a_bound = derivative_bound(spec)?;
    // v is even, so integrate twice the half-line value.
    let v_integral = 2.0 * quad::integrate_half_line(&|x| (v.log_eval(x) - x).exp(), 1e-14)?;
    Ok(ModerateCertificate {
        c_mod,
        a_bound,
        v_integral,
        // |dG/dx| = G = (1/2) e^-|x| a.e., so both L1 norms are v_integral / 2
        dgv_l1: 0.5 * v_integral,
        gv_l1: 0.5 * v_integral,
        sample_box,
    })
}

/// Outcome of one weighted Young inequality evaluation.
#[derive(Debug, Clone, Copy)]
pub struct YoungCheck {
    /// || (f1 * f2) phi ||_p over the extended convolution lattice.
    pub lhs: f64,
    /// c_mod ||f1 v||_1 ||f2 phi||_p.
    pub rhs: f64,
    pub c_mod: f64,
    pub holds: bool,
}

/// Evaluate both sides of the weighted Young inequality
/// ||(f1*f2) phi||_p <= c ||f1 v||_1 ||f2 phi||_p by direct quadrature
/// convolution, with `c_mod` supplied by a prior certification.
pub fn weighted_young_check_with(
    f1: &Field,
    f2: &Field,
    spec: &WeightSpec,
    p: NormOrder,
    c_mod: f64,
) -> Result<YoungCheck> {
    if !f1.same_grid(f2) {
        return Err(Error::ShapeMismatch(
            "young check requires both functions on one grid".into(),
        ));
    }
    let grid = f1.grid();
    let n = grid.len();
    let dx = grid.dx();
    let v = companion_v(spec)?;

    // Linear (open-line) convolution: samples treated as a function that
    // vanishes off the grid; the result lives on a 2N-1 point lattice.
    let a = f1.values();
    let b = f2.values();
    let mut conv = vec![0.0_f64; 2 * n - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            conv[i + j] += ai * bj;
        }
    }
    let x0 = 2.0 * grid.x(0);
    let lhs = match p {
        NormOrder::Infinity => conv
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if c == 0.0 {
                    0.0
                } else {
                    (c * dx).abs() * spec.eval_unchecked(x0 + k as f64 * dx)
                }
            })
            .fold(0.0_f64, f64::max),
        NormOrder::Finite(q) => {
            let mut acc = 0.0;
            for (k, &c) in conv.iter().enumerate() {
                if c != 0.0 {
                    let w = spec.eval_unchecked(x0 + k as f64 * dx);
                    acc += ((c * dx).abs() * w).powf(q) * dx;
                }
            }
            acc.powf(1.0 / q)
        }
    };

    let norm1 = a
        .iter()
        .zip(grid.points())
        .map(|(&f, &x)| {
            if f == 0.0 {
                0.0
            } else {
                f.abs() * v.eval_unchecked(x)
            }
        })
        .sum::<f64>()
        * dx;
    let normp = match p {
        NormOrder::Infinity => b
            .iter()
            .zip(grid.points())
            .map(|(&f, &x)| {
                if f == 0.0 {
                    0.0
                } else {
                    f.abs() * spec.eval_unchecked(x)
                }
            })
            .fold(0.0_f64, f64::max),
        NormOrder::Finite(q) => {
            let mut acc = 0.0;
            for (&f, &x) in b.iter().zip(grid.points()) {
                if f != 0.0 {
                    acc += (f.abs() * spec.eval_unchecked(x)).powf(q) * dx;
                }
            }
            acc.powf(1.0 / q)
        }
    };
    let rhs = c_mod * norm1 * normp;
    Ok(YoungCheck {
        lhs,
        rhs,
        c_mod,
        holds: lhs <= rhs * (1.0 + 1e-8),
    })
}

/// [`weighted_young_check_with`] with c_mod certified on the default lattice.
pub fn weighted_young_check(
    f1: &Field,
    f2: &Field,
    spec: &WeightSpec,
    p: NormOrder,
) -> Result<YoungCheck> {
    let cert = certify(spec, DEFAULT_SAMPLE_BOX, DEFAULT_SAMPLES)?;
    weighted_young_check_with(f1, f2, spec, p, cert.c_mod)
}

/// Default lattice for c_mod estimation: 801 x 801 points over [-40, 40]^2.
pub const DEFAULT_SAMPLE_BOX: f64 = 40.0;
pub const DEFAULT_SAMPLES: usize = 801;

/// Window-restricted check that the weighted envelope of sampled data does
/// not grow toward the window edges; used to flag norms that diverge on the
/// full line even though every truncated sum is finite. Returns the side
/// and fitted log-slope when growth is detected.
pub(crate) fn growing_tail(xs: &[f64], g: &[f64]) -> Option<(&'static str, f64)> {
    debug_assert_eq!(xs.len(), g.len());
    let m = xs.len();
    if m < 16 {
        return None;
    }
    let region = (m / 8).max(8);
    let slope = |pairs: &mut dyn Iterator<Item = (f64, f64)>| -> Option<f64> {
        let pts: Vec<(f64, f64)> = pairs
            .filter(|&(_, y)| y > 1e-280)
            .map(|(x, y)| (x, y.ln()))
            .collect();
        if pts.len() < 8 {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-14 {
            return None;
        }
        Some((n * sxy - sx * sy) / denom)
    };
    // right edge: growth in +x; left edge: growth in -x
    let right = slope(
        &mut xs[m - region..]
            .iter()
            .copied()
            .zip(g[m - region..].iter().copied()),
    );
    let left = slope(
        &mut xs[..region]
            .iter()
            .copied()
            .zip(g[..region].iter().copied()),
    );
    if let Some(s) = right {
        if s > 0.02 {
            return Some(("right", s));
        }
    }
    if let Some(s) = left {
        if s < -0.02 {
            return Some(("left", -s));
        }
    }
    None
}
