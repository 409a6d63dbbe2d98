//! Closed-form constants.
//!
//! Every Gamma ratio is evaluated as `exp` of a difference of [`log_gamma`]
//! values so that moderate dimensions and exponents never overflow.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos coefficients for g = 671/128, 14 terms.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199_8,
    0.339_946_499_848_118_886_9e-4,
    0.465_236_289_270_485_756_6e-4,
    -0.983_744_753_048_795_646_8e-4,
    0.158_088_703_224_912_488_8e-3,
    -0.210_264_441_724_104_883_2e-3,
    0.217_439_618_115_212_643_2e-3,
    -0.164_318_106_536_763_890_2e-3,
    0.844_182_239_838_527_432_9e-4,
    -0.261_908_384_015_814_086_7e-4,
    0.368_991_826_595_316_227_0e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Radius of the power series used around the zeros of `ln Γ` at 1 and 2.
const SERIES_RADIUS: f64 = 0.3;
const ZETA_TERMS: usize = 40;

/// `ζ(k) − 1` for `k = 0..ZETA_TERMS` (entries 0 and 1 unused).
fn zeta_minus_one() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; ZETA_TERMS];
        let m = 1000.0_f64;
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            // Euler-Maclaurin tail beyond n = m, then the head summed small-to-large.
            let mut sum = m.powf(1.0 - kf) / (kf - 1.0) - 0.5 * m.powf(-kf)
                + kf / 12.0 * m.powf(-kf - 1.0)
                - kf * (kf + 1.0) * (kf + 2.0) / 720.0 * m.powf(-kf - 3.0);
            for n in (2..1000).rev() {
                sum += (n as f64).powf(-kf);
            }
            *slot = sum + m.powf(-kf);
        }
        table
    })
}

/// `Σ_{k≥2} (−1)^k (ζ(k) − 1) z^k / k`, valid for `|z| < 1`.
fn zeta_tail_series(z: f64) -> f64 {
    let table = zeta_minus_one();
    // zk carries (−z)^k = (−1)^k z^k.
    let mut zk = -z;
    let mut sum = 0.0;
    for (k, zm1) in table.iter().enumerate().skip(2) {
        zk *= -z;
        let term = zm1 * zk / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Natural logarithm of the Gamma function for positive arguments.
///
/// Near the zeros at 1 and 2 the Taylor series of `ln Γ(1 + z)` is used so
/// that the result stays accurate in the relative sense; elsewhere a
/// 14-term Lanczos sum.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "log_gamma requires a finite x > 0, got {x}"
        )));
    }
    let z1 = x - 1.0;
    if z1.abs() < SERIES_RADIUS {
        return Ok(-EULER_GAMMA * z1 + (z1 - z1.ln_1p()) + zeta_tail_series(z1));
    }
    let z2 = x - 2.0;
    if z2.abs() < SERIES_RADIUS {
        // ln Γ(2 + z) = ln(1 + z) + ln Γ(1 + z); the logarithms cancel.
        return Ok((1.0 - EULER_GAMMA) * z2 + zeta_tail_series(z2));
    }
    let tmp = x + LANCZOS_G;
    let mut ser = 0.999_999_999_999_997_1;
    for (j, c) in LANCZOS.iter().enumerate() {
        ser += c / (x + 1.0 + j as f64);
    }
    Ok((x + 0.5) * tmp.ln() - tmp + (SQRT_2PI * ser / x).ln())
}

fn lgamma(x: f64) -> f64 {
    log_gamma(x).expect("positive Gamma argument")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Geometry {
    /// Volume of the unit ball in `R^n`.
    BallVolume,
    /// Area of the unit sphere `S^{n−1}` bounding that ball.
    SphereArea,
}

pub fn geometry_constant(kind: Geometry, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(
            "geometry constants need dimension n >= 1".into(),
        ));
    }
    let half = n as f64 / 2.0;
    Ok(match kind {
        Geometry::BallVolume => (half * PI.ln() - lgamma(half + 1.0)).exp(),
        Geometry::SphereArea => 2.0 * (half * PI.ln() - lgamma(half)).exp(),
    })
}

pub fn ball_volume(n: usize) -> f64 {
    geometry_constant(Geometry::BallVolume, n).expect("n >= 1")
}

pub fn sphere_area(n: usize) -> f64 {
    geometry_constant(Geometry::SphereArea, n).expect("n >= 1")
}

/// Dimension, fractional order and integrability exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: f64,
    pub p: f64,
}

impl Params {
    pub fn new(n: usize, s: f64, p: f64) -> Result<Self> {
        let params = Params { n, s, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!(
                "requires N >= 2, got N = {}",
                self.n
            )));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Parameter(format!(
                "requires 0 < s < 1, got s = {}",
                self.s
            )));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!(
                "requires finite p >= 1, got p = {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn require_p_gt_one(&self) -> Result<()> {
        if self.p > 1.0 {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "requires p > 1, got p = {}",
                self.p
            )))
        }
    }

    pub fn require_sp_gt_one(&self) -> Result<()> {
        if self.sp() > 1.0 {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "requires sp > 1, got s*p = {}",
                self.sp()
            )))
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} s={} p={}", self.n, self.s, self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstantKind {
    Potential,
    SphereMoment,
    BbmConj,
    BbmClassical,
    HardyClassical,
    WeightedHardy,
    TraceConjW1p,
    GagliardoControl,
    FractionalConj,
    ConjToHardy,
    ConjFromGagliardoPart,
    ConjFromHardyPart,
    UspenskiiComposite,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 13] = [
        ConstantKind::Potential,
        ConstantKind::SphereMoment,
        ConstantKind::BbmConj,
        ConstantKind::BbmClassical,
        ConstantKind::HardyClassical,
        ConstantKind::WeightedHardy,
        ConstantKind::TraceConjW1p,
        ConstantKind::GagliardoControl,
        ConstantKind::FractionalConj,
        ConstantKind::ConjToHardy,
        ConstantKind::ConjFromGagliardoPart,
        ConstantKind::ConjFromHardyPart,
        ConstantKind::UspenskiiComposite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstantKind::Potential => "POTENTIAL",
            ConstantKind::SphereMoment => "SPHERE_MOMENT",
            ConstantKind::BbmConj => "BBM_CONJ",
            ConstantKind::BbmClassical => "BBM_CLASSICAL",
            ConstantKind::HardyClassical => "HARDY_CLASSICAL",
            ConstantKind::WeightedHardy => "WEIGHTED_HARDY",
            ConstantKind::TraceConjW1p => "TRACE_CONJ_W1P",
            ConstantKind::GagliardoControl => "GAGLIARDO_CONTROL",
            ConstantKind::FractionalConj => "FRACTIONAL_CONJ",
            ConstantKind::ConjToHardy => "CONJ_TO_HARDY",
            ConstantKind::ConjFromGagliardoPart => "CONJ_FROM_GAGLIARDO_PART",
            ConstantKind::ConjFromHardyPart => "CONJ_FROM_HARDY_PART",
            ConstantKind::UspenskiiComposite => "USPENSKII_COMPOSITE",
        }
    }

    /// Admissibility beyond the base [`Params`] invariants.
    pub fn check_admissible(&self, params: &Params) -> Result<()> {
        params.validate()?;
        match self {
            ConstantKind::HardyClassical => params.require_p_gt_one(),
            ConstantKind::FractionalConj => params.require_sp_gt_one(),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ConstantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstantKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown constant kind '{s}'")))
    }
}

/// `∫_{S^{d−1}} |w_1|^p dw = 2π^{(d−1)/2} Γ((p+1)/2) / Γ((d+p)/2)`, for `d >= 1`.
pub fn sphere_moment(d: usize, p: f64) -> Result<f64> {
    if d < 1 || !(p > 0.0) {
        return Err(Error::Parameter(format!(
            "sphere moment needs d >= 1, p > 0 (d = {d}, p = {p})"
        )));
    }
    let df = d as f64;
    Ok(2.0 * (0.5 * (df - 1.0) * PI.ln() + lgamma(0.5 * (p + 1.0)) - lgamma(0.5 * (df + p))).exp())
}

/// Constant of the whole-space limit `(1−s)·Gagliardo → K·∫|Du|^p` in `R^d`.
pub fn bbm_classical(d: usize, p: f64) -> Result<f64> {
    Ok(sphere_moment(d, p)? / p)
}

/// `∫_{R^{N−1}} (1 + |z|²)^{−(N+sp)/2} dz`, the boundary potential per unit `x_N^{−(sp+1)}`.
fn potential(params: &Params) -> f64 {
    let n = params.nf();
    let sp = params.sp();
    (0.5 * (n - 1.0) * PI.ln() + lgamma(0.5 * (sp + 1.0)) - lgamma(0.5 * (n + sp))).exp()
}

/// `∫_0^∞ (1 + t²)^{−(N+sp)/2} dt`.
fn vertical_potential(params: &Params) -> f64 {
    let a = 0.5 * (params.nf() + params.sp());
    0.5 * (0.5 * PI.ln() + lgamma(a - 0.5) - lgamma(a)).exp()
}

fn gagliardo_control(params: &Params) -> f64 {
    let n = params.nf();
    let sp = params.sp();
    let log = 2f64.ln() + (2.0 * n - 1.0 + sp) * 3f64.ln() + lgamma(0.5 * (n + 2.0))
        - sp * 4f64.ln()
        - 0.5 * PI.ln()
        - lgamma(0.5 * (n + 1.0));
    log.exp()
}

/// The same constant written with ball volumes instead of Gamma values.
pub fn gagliardo_control_ball_form(params: &Params) -> f64 {
    let n = params.nf();
    let sp = params.sp();
    2.0 * 3f64.powf(2.0 * n - 1.0 + sp) * ball_volume(params.n - 1)
        / (4f64.powf(sp) * ball_volume(params.n))
}

fn conj_to_hardy(params: &Params) -> f64 {
    let n = params.nf();
    let sp = params.sp();
    let p = params.p;
    let a =
        3f64.powf(n - 1.0) * 4f64.powf(sp + 1.0) * ball_volume(params.n - 1) / 5f64.powf(n + sp);
    let b =
        2f64.powf(p - 1.0) * 3f64.powf(n - 1.0 + sp) / ((n - 1.0 + sp) * 4f64.powf(n - 1.0 + sp));
    (2f64.powf(p - 1.0) * gagliardo_control(params) + b) / a
}

/// Closed-form value of a constant. Fails when `params` are inadmissible for `kind`.
pub fn paper_constant(kind: ConstantKind, params: &Params) -> Result<f64> {
    kind.check_admissible(params)?;
    let n = params.nf();
    let s = params.s;
    let p = params.p;
    let value = match kind {
        ConstantKind::Potential => potential(params),
        ConstantKind::SphereMoment => sphere_moment(params.n, p)?,
        ConstantKind::BbmConj => sphere_moment(params.n, p)? / (2.0 * p),
        ConstantKind::BbmClassical => sphere_moment(params.n, p)? / p,
        ConstantKind::HardyClassical => (p * ((p / (p - 1.0)).ln())).exp(),
        ConstantKind::WeightedHardy => (n / s).powf(p),
        ConstantKind::TraceConjW1p => potential(params) * (n / s).powf(p),
        ConstantKind::GagliardoControl => gagliardo_control(params),
        ConstantKind::FractionalConj => optimal_lambda(params)?.constant,
        ConstantKind::ConjToHardy => conj_to_hardy(params),
        ConstantKind::ConjFromGagliardoPart => 2f64.powf(p - 1.0) * vertical_potential(params),
        ConstantKind::ConjFromHardyPart => 2f64.powf(p - 1.0) * potential(params),
        ConstantKind::UspenskiiComposite => {
            gagliardo_control(params) * potential(params) * (n / s).powf(p)
        }
    };
    debug_assert!(
        value.is_finite() && value > 0.0,
        "{kind} at {params}: {value}"
    );
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaOptimum {
    pub lambda: f64,
    pub constant: f64,
    /// Upper end of the admissible interval, where the denominator vanishes (capped at 1).
    pub lambda_max: f64,
}

/// Upper end of `{λ ∈ (0,1) : 2^{1−p} − Nλ^{sp−1}/(N−1+sp) > 0}`.
pub fn lambda_max(params: &Params) -> Result<f64> {
    params.validate()?;
    params.require_sp_gt_one()?;
    let n = params.nf();
    let sp = params.sp();
    let root = (2f64.powf(1.0 - params.p) * (n - 1.0 + sp) / n).powf(1.0 / (sp - 1.0));
    Ok(root.min(1.0))
}

/// The proof constant `C(λ)` of the fractional conjunction estimate, or
/// `None` outside the admissible interval.
pub fn fractional_constant_at(params: &Params, lambda: f64) -> Option<f64> {
    let n = params.nf();
    let sp = params.sp();
    if !(lambda > 0.0 && lambda < 1.0) {
        return None;
    }
    let denom = 2f64.powf(1.0 - params.p) - n * lambda.powf(sp - 1.0) / (n - 1.0 + sp);
    if !(denom > 0.0) {
        return None;
    }
    let ratio = 2.0 * ball_volume(params.n - 1) / ball_volume(params.n);
    let log = ratio.ln() + (2.0 * n - 1.0 + sp) * lambda.ln_1p()
        - n * lambda.ln()
        - (n - 1.0) * (-lambda).ln_1p()
        - denom.ln();
    Some(log.exp())
}

/// Minimises the fractional conjunction proof constant over `λ`.
///
/// `ln C` is convex in `ln λ` on the admissible interval, so a golden-section
/// search on `ln λ` converges to the unique minimiser.
pub fn optimal_lambda(params: &Params) -> Result<LambdaOptimum> {
    let lam_max = lambda_max(params)?;
    assert!(
        lam_max > 0.0,
        "admissible interval is non-empty when sp > 1"
    );
    let cost = |t: f64| fractional_constant_at(params, t.exp()).map_or(f64::INFINITY, f64::ln);

    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = 1e-8f64.ln();
    let mut hi = (lam_max * (1.0 - 1e-8)).ln();
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let mut fc = cost(c);
    let mut fd = cost(d);
    for _ in 0..500 {
        if hi.exp() - lo.exp() < 1e-9 {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = cost(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = cost(d);
        }
    }
    let lambda = (0.5 * (lo + hi)).exp();
    let constant = fractional_constant_at(params, lambda)
        .ok_or_else(|| Error::Parameter("lambda search left the admissible interval".into()))?;
    Ok(LambdaOptimum {
        lambda,
        constant,
        lambda_max: lam_max,
    })
}
