use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::{ball_volume, sphere_area};

use super::rng::StratumRng;
use super::{EnergyEstimate, Method, QuadSpec};

/// `F(x, y)` of a pair integral.
pub type Numerator<'a> = &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync);

/// Share of outer samples spent on the far region `|x| > pad·R`.
const FAR_SHARE: f64 = 0.05;
/// Share of near-region samples drawn from the support ball rather than the padded ball.
const SUPPORT_SHARE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// `x ∈ ∂R^N_+` (passed as an `N`-vector with `x_N = 0`), `y ∈ R^N_+`.
    BoundaryHalfspace,
    HalfspaceHalfspace,
    /// Both variables in `R^{N−1}`; `dim` is `N − 1`.
    BoundaryBoundary,
    /// Both variables in `R^d`.
    FullFull,
}

/// Radial density used for the inner variable `r = |y − x|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialSampling {
    /// Numerator `~ r^p` at the diagonal: density `r^{p + D − κ − 1}`.
    Lipschitz,
    /// Numerator bounded away from zero: density `r^{D − κ − 1}`; needs `r` bounded below.
    Kernel,
    /// Plain uniform `r`.
    Uniform,
}

pub struct PairProblem<'a> {
    pub kind: PairKind,
    /// Dimension of the space of `y`.
    pub dim: usize,
    pub numerator: Numerator<'a>,
    /// `(x, ω) ↦ lim_{r→0} F(x, x + rω)/r^p`, used below `r_min`.
    pub diagonal: Option<Numerator<'a>>,
    pub kernel_power: f64,
    pub p: f64,
    /// `F(x, y) = 0` whenever both `|x|` and `|y|` exceed this radius.
    pub support_radius: f64,
    pub grad_bound: f64,
    pub hessian_bound: f64,
    /// Restricts `y_N > cutoff` for half-space kinds.
    pub cutoff: f64,
    pub sampling: RadialSampling,
}

/// `∫_Y F(y) / |y − c|^κ dy` for a fixed centre `c`.
pub struct PointProblem<'a> {
    pub center: &'a [f64],
    /// `Y` is `{y_N > cutoff}` when true, the whole space otherwise.
    pub half_space: bool,
    pub cutoff: f64,
    pub numerator: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    /// `ω ↦ lim_{r→0} F(c + rω)/r^p`.
    pub diagonal: Option<&'a (dyn Fn(&[f64]) -> f64 + Sync)>,
    pub kernel_power: f64,
    pub p: f64,
    /// `F` is constant outside the ball of this radius (centred at the origin).
    pub support_radius: f64,
    pub grad_bound: f64,
    pub hessian_bound: f64,
    pub sampling: RadialSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeDomain {
    HalfSpace,
    Flat,
}

/// `∫ g(x)·x_N^β dx` over the half-space (or `∫ g` over `R^d`).
pub struct VolumeProblem<'a> {
    pub domain: VolumeDomain,
    pub dim: usize,
    pub integrand: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub weight_exponent: f64,
    /// `g` vanishes outside `[−R, R]^{N−1} × (0, R]` apart from the optional tail.
    pub support_radius: f64,
    /// `x' ↦ ∫_R^∞ g(x', t) t^β dt`, called with `x_N = R`.
    pub tail: Option<&'a (dyn Fn(&[f64]) -> f64 + Sync)>,
    /// `x ↦` replacement for `g` when `x_N < r_min` (e.g. a boundary derivative).
    pub near_boundary: Option<&'a (dyn Fn(&[f64]) -> f64 + Sync)>,
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }
}

/// Runs `sample` on every stratum and reduces in stratum order, so the result
/// does not depend on how rayon schedules the strata.
fn run_strata<S, F>(
    spec: &QuadSpec,
    init: impl Fn() -> S + Sync,
    sample: F,
) -> Result<(f64, f64, u64)>
where
    S: Send,
    F: Fn(&mut StratumRng, &mut S) -> f64 + Sync,
{
    spec.validate()?;
    let batch = if spec.target_rel_err > 0.0 {
        (spec.samples / 8).max(1000).min(spec.samples)
    } else {
        spec.samples
    };
    let mut states: Vec<(StratumRng, S, Welford)> = (0..spec.strata)
        .map(|i| {
            (
                StratumRng::new(spec.seed, i as u64),
                init(),
                Welford::default(),
            )
        })
        .collect();
    let mut done = 0usize;
    loop {
        let todo = batch.min(spec.samples - done);
        states.par_iter_mut().for_each(|(rng, scratch, acc)| {
            for _ in 0..todo {
                let v = sample(rng, scratch);
                acc.push(v);
            }
        });
        done += todo;
        let mut total = Welford::default();
        for (_, _, acc) in &states {
            total.merge(acc);
        }
        if !total.mean.is_finite() || !total.m2.is_finite() {
            return Err(Error::NonIntegrable(
                "Monte Carlo samples produced a non-finite value".into(),
            ));
        }
        let stderr = if total.n > 1 {
            (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt()
        } else {
            0.0
        };
        let converged =
            spec.target_rel_err > 0.0 && stderr <= spec.target_rel_err * total.mean.abs();
        if done >= spec.samples || converged {
            return Ok((total.mean, stderr, total.n));
        }
    }
}

/// `∫_lo^hi r^{e−1} dr` for `e ≠ 0`, allowing `hi = ∞` when `e < 0`.
fn power_integral(e: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if hi.is_infinite() {
        return -lo.powf(e) / e;
    }
    (hi.powf(e) - lo.powf(e)) / e
}

/// Draws `r` on `[lo, hi]` from the density `∝ r^{e−1}`; returns `(r, Z)` with
/// `Z = ∫_lo^hi r^{e−1}`.
fn sample_power(rng: &mut StratumRng, e: f64, lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (lo.powf(e), hi.powf(e));
    let r = (a + rng.uniform() * (b - a)).powf(1.0 / e).clamp(lo, hi);
    (r, (b - a) / e)
}

struct Inner<'a> {
    dim: usize,
    kappa: f64,
    half_space: bool,
    cutoff: f64,
    r_min: f64,
    support_radius: f64,
    exponent: f64,
    sampling: RadialSampling,
    numerator: &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync),
    diagonal: Option<&'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync)>,
}

impl Inner<'_> {
    fn new_exponent(sampling: RadialSampling, p: f64, dim: usize, kappa: f64) -> Result<f64> {
        let d = dim as f64;
        let e = match sampling {
            RadialSampling::Lipschitz => p + d - kappa,
            RadialSampling::Kernel => d - kappa,
            RadialSampling::Uniform => 1.0,
        };
        if sampling == RadialSampling::Lipschitz && !(e > 0.0) {
            return Err(Error::NonIntegrable(format!(
                "radial exponent p + D - kernel = {e} must be positive"
            )));
        }
        if e == 0.0 {
            return Err(Error::Parameter("degenerate radial exponent 0".into()));
        }
        Ok(e)
    }

    /// `∫_0^∞ F(x, x + rω) r^{D−1−κ} dr` restricted to admissible `r`, estimated
    /// with one radial sample.
    fn along_ray(&self, rng: &mut StratumRng, x: &[f64], w: &[f64], y: &mut [f64]) -> f64 {
        let n = self.dim;
        let mut lo = 0.0f64;
        let mut hi = f64::INFINITY;
        if self.half_space {
            let xn = x[n - 1];
            let wn = w[n - 1];
            if wn > 0.0 {
                lo = ((self.cutoff - xn) / wn).max(0.0);
            } else if wn < 0.0 {
                hi = (xn - self.cutoff) / -wn;
            } else if xn <= self.cutoff {
                return 0.0;
            }
            if hi <= lo {
                return 0.0;
            }
        }
        let d = n as f64;
        let kernel_e = d - self.kappa;
        let norm_x = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let r_max = norm_x + self.support_radius;
        let point = |r: f64, y: &mut [f64]| {
            for i in 0..n {
                y[i] = x[i] + r * w[i];
            }
        };

        let mut total = 0.0;
        let mut seg_lo = lo;
        let seg_hi = hi.min(r_max);
        if seg_hi > seg_lo {
            if self.sampling == RadialSampling::Lipschitz && seg_lo < self.r_min {
                let cut = self.r_min.min(seg_hi);
                if let Some(diag) = self.diagonal {
                    total += diag(x, w) * power_integral(self.exponent, seg_lo, cut);
                }
                seg_lo = cut;
            }
            if self.sampling == RadialSampling::Kernel && seg_lo <= 0.0 {
                // Rejected up front in the public entry points.
                return f64::NAN;
            }
            if seg_hi > seg_lo {
                let (r, z) = sample_power(rng, self.exponent, seg_lo, seg_hi);
                point(r, y);
                let f = (self.numerator)(x, y);
                if f != 0.0 {
                    total += f * r.powf(kernel_e - self.exponent) * z;
                }
            }
        }
        let tail_lo = lo.max(r_max);
        if hi > tail_lo {
            point(tail_lo, y);
            let f = (self.numerator)(x, y);
            if f != 0.0 {
                total += f * power_integral(kernel_e, tail_lo, hi);
            }
        }
        total
    }
}

struct Scratch {
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            x: vec![0.0; n],
            y: vec![0.0; n],
            w: vec![0.0; n],
        }
    }
}

fn check_common(
    kappa: f64,
    p: f64,
    support: f64,
    sampling: RadialSampling,
    cutoff: f64,
    half: bool,
) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("invalid kernel power {kappa}")));
    }
    if !(p >= 0.0) {
        return Err(Error::Parameter(format!("invalid numerator order {p}")));
    }
    if !(support > 0.0) || !support.is_finite() {
        return Err(Error::Parameter(format!(
            "pair integrals need a finite positive support radius, got {support}"
        )));
    }
    if !(cutoff >= 0.0) {
        return Err(Error::Parameter(format!(
            "cutoff must be >= 0, got {cutoff}"
        )));
    }
    if sampling == RadialSampling::Kernel && !(half && cutoff > 0.0) {
        return Err(Error::Parameter(
            "kernel radial sampling needs a positive normal cutoff".into(),
        ));
    }
    Ok(())
}

fn diag_bias(
    sampling: RadialSampling,
    has_diag: bool,
    e: f64,
    p: f64,
    r_min: f64,
    grad: f64,
    hess: f64,
) -> f64 {
    if sampling != RadialSampling::Lipschitz {
        return 0.0;
    }
    // Both F and the model are at most L^p r^p below r_min.
    let crude = grad.powf(p) * r_min.powf(e) / e;
    if has_diag && hess.is_finite() {
        // |F − diag·r^p| <= p (L r + H r²/2)^{p−1} H r²/2 for a C² difference.
        let lead = p * (grad + hess * r_min).powf((p - 1.0).max(0.0)) * 0.5 * hess;
        crude.min(lead * r_min.powf(e + 1.0) / (e + 1.0))
    } else {
        crude
    }
}

/// Monte Carlo estimate of `∬ F(x, y) / |x − y|^κ dy dx`.
///
/// `x` is drawn from a mixture concentrated on the padded support ball with a
/// Pareto tail outside it; `y = x + rω` is drawn with `r` from the
/// [`RadialSampling`] density. Contributions from `r` beyond the support are
/// integrated in closed form, and for Lipschitz numerators the piece `r < r_min`
/// uses the first-order model `problem.diagonal`.
pub fn pair_integral_mc(problem: &PairProblem<'_>, spec: &QuadSpec) -> Result<EnergyEstimate> {
    let kind = problem.kind;
    let half = matches!(
        kind,
        PairKind::BoundaryHalfspace | PairKind::HalfspaceHalfspace
    );
    check_common(
        problem.kernel_power,
        problem.p,
        problem.support_radius,
        problem.sampling,
        problem.cutoff,
        half,
    )?;
    spec.validate()?;
    let n = problem.dim;
    let min_dim = if kind == PairKind::FullFull || kind == PairKind::BoundaryBoundary {
        1
    } else {
        2
    };
    if n < min_dim {
        return Err(Error::Parameter(format!(
            "dimension {n} too small for {kind:?}"
        )));
    }
    let e = Inner::new_exponent(problem.sampling, problem.p, n, problem.kernel_power)?;
    let kappa = problem.kernel_power;
    let big_r = problem.support_radius;
    let rho = spec.pad_factor * big_r;

    // Dimension, sphere area and unit-ball volume of the x-domain.
    let (dx, x_sphere, x_ball) = match kind {
        PairKind::BoundaryHalfspace => (n - 1, sphere_area(n - 1), ball_volume(n - 1)),
        PairKind::HalfspaceHalfspace => (n, 0.5 * sphere_area(n), 0.5 * ball_volume(n)),
        _ => (n, sphere_area(n), ball_volume(n)),
    };
    let dxf = dx as f64;
    if !(kappa > dxf) {
        return Err(Error::NonIntegrable(format!(
            "kernel power {kappa} must exceed the outer dimension {dx}"
        )));
    }
    let (y_sphere, y_ball) = match kind {
        PairKind::BoundaryHalfspace => (0.5 * sphere_area(n), 0.5 * ball_volume(n)),
        PairKind::HalfspaceHalfspace => (sphere_area(n), 0.5 * ball_volume(n)),
        _ => (sphere_area(n), ball_volume(n)),
    };
    let vol_support = x_ball * big_r.powf(dxf);
    let vol_pad = x_ball * rho.powf(dxf);
    let y_vol = y_ball * big_r.powf(n as f64);
    let far_norm = (kappa - dxf) * rho.powf(kappa - dxf) / x_sphere;

    let inner = Inner {
        dim: n,
        kappa,
        half_space: half,
        cutoff: problem.cutoff,
        r_min: spec.r_min,
        support_radius: big_r,
        exponent: e,
        sampling: problem.sampling,
        numerator: problem.numerator,
        diagonal: problem.diagonal,
    };

    let sample_x_dir = |rng: &mut StratumRng, x: &mut [f64]| match kind {
        PairKind::BoundaryHalfspace => {
            rng.direction(&mut x[..n - 1]);
            x[n - 1] = 0.0;
        }
        PairKind::HalfspaceHalfspace => {
            rng.direction(x);
            x[n - 1] = x[n - 1].abs();
        }
        _ => rng.direction(x),
    };

    let (mean, stderr, used) = run_strata(
        spec,
        || Scratch::new(n),
        |rng, s| {
            let Scratch { x, y, w } = s;
            if rng.uniform() < FAR_SHARE {
                // Pareto radius ∝ t^{dx − 1 − κ} on (ρ, ∞).
                let t = rho * rng.uniform_pos().powf(-1.0 / (kappa - dxf));
                sample_x_dir(rng, x);
                x.iter_mut().for_each(|c| *c *= t);
                let pdf = FAR_SHARE * far_norm * t.powf(-kappa);
                rng.in_ball(y);
                if half {
                    y[n - 1] = y[n - 1].abs();
                    if y[n - 1] <= problem.cutoff {
                        return 0.0;
                    }
                }
                y.iter_mut().for_each(|c| *c *= big_r);
                let f = (problem.numerator)(x, y);
                if f == 0.0 {
                    return 0.0;
                }
                let dist2: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                return f * dist2.powf(-0.5 * kappa) * y_vol / pdf;
            }
            let radius = if rng.uniform() < SUPPORT_SHARE {
                big_r
            } else {
                rho
            };
            match kind {
                PairKind::BoundaryHalfspace => {
                    rng.in_ball(&mut x[..n - 1]);
                    x[n - 1] = 0.0;
                }
                PairKind::HalfspaceHalfspace => {
                    rng.in_ball(x);
                    x[n - 1] = x[n - 1].abs();
                }
                _ => rng.in_ball(x),
            }
            x.iter_mut().for_each(|c| *c *= radius);
            let norm2: f64 = x.iter().map(|c| c * c).sum();
            let mut pdf = (1.0 - SUPPORT_SHARE) / vol_pad;
            if norm2 <= big_r * big_r {
                pdf += SUPPORT_SHARE / vol_support;
            }
            pdf *= 1.0 - FAR_SHARE;
            rng.direction(w);
            if kind == PairKind::BoundaryHalfspace {
                w[n - 1] = w[n - 1].abs();
            }
            y_sphere * inner.along_ray(rng, x, w, y) / pdf
        },
    )?;

    let bias = diag_bias(
        problem.sampling,
        problem.diagonal.is_some(),
        e,
        problem.p,
        spec.r_min,
        problem.grad_bound,
        problem.hessian_bound,
    ) * y_sphere
        * vol_support;
    Ok(EnergyEstimate {
        value: mean.max(0.0),
        stderr,
        samples_used: used,
        method: method_for(problem.sampling),
        bias_bound: bias,
    })
}

fn method_for(sampling: RadialSampling) -> Method {
    match sampling {
        RadialSampling::Uniform => Method::McUniform,
        _ => Method::McImportance,
    }
}

/// Monte Carlo estimate of `∫_Y F(y) / |y − c|^κ dy` in polar coordinates around `c`.
pub fn point_integral_mc(problem: &PointProblem<'_>, spec: &QuadSpec) -> Result<EnergyEstimate> {
    check_common(
        problem.kernel_power,
        problem.p,
        problem.support_radius,
        problem.sampling,
        problem.cutoff,
        problem.half_space,
    )?;
    spec.validate()?;
    let n = problem.center.len();
    if n < 1 {
        return Err(Error::Parameter("empty centre".into()));
    }
    if problem.half_space && problem.center[n - 1] < 0.0 {
        return Err(Error::Domain("centre lies below the half-space".into()));
    }
    let e = Inner::new_exponent(problem.sampling, problem.p, n, problem.kernel_power)?;
    let upper_only = problem.half_space && problem.center[n - 1] <= problem.cutoff;
    let y_sphere = if upper_only { 0.5 } else { 1.0 } * sphere_area(n);

    let numerator = |_: &[f64], y: &[f64]| (problem.numerator)(y);
    let diagonal = |_: &[f64], w: &[f64]| problem.diagonal.map_or(0.0, |d| d(w));
    let inner = Inner {
        dim: n,
        kappa: problem.kernel_power,
        half_space: problem.half_space,
        cutoff: problem.cutoff,
        r_min: spec.r_min,
        support_radius: problem.support_radius,
        exponent: e,
        sampling: problem.sampling,
        numerator: &numerator,
        diagonal: problem
            .diagonal
            .map(|_| &diagonal as &(dyn Fn(&[f64], &[f64]) -> f64 + Sync)),
    };
    let center = problem.center;
    let (mean, stderr, used) = run_strata(
        spec,
        || Scratch::new(n),
        |rng, s| {
            let Scratch { y, w, .. } = s;
            rng.direction(w);
            if upper_only {
                w[n - 1] = w[n - 1].abs();
            }
            y_sphere * inner.along_ray(rng, center, w, y)
        },
    )?;
    let bias = diag_bias(
        problem.sampling,
        problem.diagonal.is_some(),
        e,
        problem.p,
        spec.r_min,
        problem.grad_bound,
        problem.hessian_bound,
    ) * y_sphere;
    Ok(EnergyEstimate {
        value: mean.max(0.0),
        stderr,
        samples_used: used,
        method: method_for(problem.sampling),
        bias_bound: bias,
    })
}

/// `∫_{R^d} F(z) (h² + |z|²)^{−κ/2} dz`: a kernel seen from a point at height `h`
/// above a `d`-dimensional hyperplane. `F` must be bounded; `support_radius` may
/// be infinite.
pub fn hyperplane_potential_mc(
    d: usize,
    height: f64,
    numerator: &(dyn Fn(&[f64]) -> f64 + Sync),
    kernel_power: f64,
    support_radius: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    spec.validate()?;
    if d < 1 || !(height > 0.0) {
        return Err(Error::Parameter("need d >= 1 and height > 0".into()));
    }
    let df = d as f64;
    if !(kernel_power > df) {
        return Err(Error::NonIntegrable(format!(
            "kernel power {kernel_power} must exceed the dimension {d}"
        )));
    }
    let b = if support_radius.is_finite() {
        height.max(support_radius)
    } else {
        height
    };
    let inside_pdf = 0.5 / (ball_volume(d) * b.powf(df));
    let tail_norm = 0.5 * (kernel_power - df) * b.powf(kernel_power - df) / sphere_area(d);
    let (mean, stderr, used) = run_strata(
        spec,
        || vec![0.0; d],
        |rng, z| {
            let pdf = if rng.uniform() < 0.5 {
                rng.in_ball(z);
                z.iter_mut().for_each(|c| *c *= b);
                inside_pdf
            } else {
                let t = b * rng.uniform_pos().powf(-1.0 / (kernel_power - df));
                rng.direction(z);
                z.iter_mut().for_each(|c| *c *= t);
                tail_norm * t.powf(-kernel_power)
            };
            let f = numerator(z);
            if f == 0.0 {
                return 0.0;
            }
            let r2: f64 = z.iter().map(|c| c * c).sum();
            f * (height * height + r2).powf(-0.5 * kernel_power) / pdf
        },
    )?;
    Ok(EnergyEstimate {
        value: mean.max(0.0),
        stderr,
        samples_used: used,
        method: Method::McImportance,
        bias_bound: 0.0,
    })
}

/// Monte Carlo estimate of a weighted volume integral over the padded support box.
pub fn volume_integral_mc(problem: &VolumeProblem<'_>, spec: &QuadSpec) -> Result<EnergyEstimate> {
    spec.validate()?;
    let n = problem.dim;
    let big_r = problem.support_radius;
    if n < 1 || !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::Parameter(
            "volume integrals need dim >= 1 and a finite positive support radius".into(),
        ));
    }
    let beta = match problem.domain {
        VolumeDomain::Flat => 0.0,
        VolumeDomain::HalfSpace => problem.weight_exponent,
    };
    if !(beta > -1.0) {
        return Err(Error::NonIntegrable(format!(
            "boundary weight exponent {beta} <= -1 is not integrable"
        )));
    }
    let importance = problem.domain == VolumeDomain::HalfSpace && beta < 0.0;
    let half = problem.domain == VolumeDomain::HalfSpace;
    let tangential = if half { n - 1 } else { n };
    let box_area = (2.0 * big_r).powi(tangential as i32);
    let normal_mass = big_r.powf(beta + 1.0) / (beta + 1.0);
    let r_min = spec.r_min;
    let (mean, stderr, used) = run_strata(
        spec,
        || vec![0.0; n],
        |rng, x| {
            for c in x.iter_mut().take(tangential) {
                *c = big_r * (2.0 * rng.uniform() - 1.0);
            }
            if !half {
                return (problem.integrand)(x) * box_area;
            }
            let mut total = 0.0;
            if let Some(tail) = problem.tail {
                x[n - 1] = big_r;
                total += tail(x) * box_area;
            }
            let t = if importance {
                big_r * rng.uniform_pos().powf(1.0 / (beta + 1.0))
            } else {
                big_r * rng.uniform_pos()
            };
            x[n - 1] = t;
            let g = match problem.near_boundary {
                Some(h) if t < r_min => h(x),
                _ => (problem.integrand)(x),
            };
            if g != 0.0 {
                total += if importance {
                    g * box_area * normal_mass
                } else {
                    g * t.powf(beta) * box_area * big_r
                };
            }
            total
        },
    )?;
    Ok(EnergyEstimate {
        value: mean.max(0.0),
        stderr,
        samples_used: used,
        method: if importance {
            Method::McImportance
        } else {
            Method::McUniform
        },
        bias_bound: 0.0,
    })
}
