//! The functionals, each a configured call into [`crate::quad`].
//!
//! Orders are passed explicitly: a Gagliardo-type integral on a
//! `d`-dimensional domain of order `σ` uses the kernel `|x − y|^{d + σp}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{BoundaryField, Domain, Field, ScalarField, MAX_DIM};
use crate::quad::{
    pair_integral_mc, point_integral_mc, volume_integral_mc, EnergyEstimate, Method, PairKind,
    PairProblem, PointProblem, QuadSpec, RadialSampling, VolumeDomain, VolumeProblem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnergyKind {
    GagliardoBoundary,
    Conjunction,
    Hardy,
    WeightedGradient,
    GradientHalfspace,
    FractionalHalfspace,
    HardyProofLhs,
    HardyProofRhs,
    BoundaryGradient,
    FullspaceGagliardo,
}

/// Exponent `e` with `conjunction(u_λ) = λ^e · conjunction(u)` for `u_λ(x) = u(λx)`.
pub fn conjunction_scaling_exponent(n: usize, sigma: f64, p: f64) -> f64 {
    sigma * p + 1.0 - n as f64
}

/// Same for the Gagliardo integral of order `σ` on `R^d`.
pub fn gagliardo_scaling_exponent(d: usize, sigma: f64, p: f64) -> f64 {
    sigma * p - d as f64
}

/// Same for the half-space Gagliardo integral.
pub fn fractional_halfspace_scaling_exponent(n: usize, s: f64, p: f64) -> f64 {
    gagliardo_scaling_exponent(n, s, p)
}

/// Same for the Hardy integral `∫ |v − u|^p / x_N^{sp+1}`.
pub fn hardy_scaling_exponent(n: usize, s: f64, p: f64) -> f64 {
    s * p + 1.0 - n as f64
}

/// Same for `∫ |Du|^p z_N^{(1−s)p−1}`.
pub fn weighted_gradient_scaling_exponent(n: usize, s: f64, p: f64) -> f64 {
    s * p + 1.0 - n as f64
}

fn check_order(sigma: f64, p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("requires p >= 1, got {p}")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Parameter(format!(
            "order must lie in (0, 1), got {sigma}"
        )));
    }
    Ok(())
}

fn check_field(u: &Field, domain: Domain, dim: usize, what: &str) -> Result<()> {
    if u.domain() != domain || u.dim() != dim {
        return Err(Error::Parameter(format!(
            "{what} must be a {domain:?} field of dimension {dim}, got {:?} of dimension {}",
            u.domain(),
            u.dim()
        )));
    }
    Ok(())
}

fn check_compact(u: &Field) -> Result<()> {
    if u.support_radius.is_finite() || u.constant.is_some() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{} is not compactly supported",
            u.label
        )))
    }
}

fn support(fields: &[&Field]) -> f64 {
    let r = fields
        .iter()
        .filter(|f| f.constant.is_none())
        .map(|f| f.support_radius)
        .fold(0.0, f64::max);
    if r > 0.0 {
        r
    } else {
        1.0
    }
}

fn directional_power(u: &Field, x: &[f64], w: &[f64], p: f64) -> f64 {
    let mut g = [0.0; MAX_DIM];
    u.grad(x, &mut g[..x.len()]);
    g.iter()
        .zip(w)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs()
        .powf(p)
}

fn grad_power(u: &Field, x: &[f64], p: f64) -> f64 {
    let mut g = [0.0; MAX_DIM];
    u.grad(x, &mut g[..x.len()]);
    g[..x.len()]
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .powf(0.5 * p)
}

fn flat_gagliardo(
    kind: PairKind,
    v: &Field,
    w: &Field,
    sigma: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    check_order(sigma, p)?;
    check_compact(v)?;
    check_compact(w)?;
    if v.constant.is_some() && v.constant == w.constant {
        return Ok(EnergyEstimate::zero(Method::McImportance));
    }
    let d = v.dim();
    let numerator = |x: &[f64], y: &[f64]| (v.eval(x) - w.eval(y)).abs().powf(p);
    let diagonal = |x: &[f64], om: &[f64]| directional_power(v, x, om, p);
    pair_integral_mc(
        &PairProblem {
            kind,
            dim: d,
            numerator: &numerator,
            diagonal: Some(&diagonal),
            kernel_power: d as f64 + sigma * p,
            p,
            support_radius: support(&[v, w]),
            grad_bound: v.grad_bound.max(w.grad_bound),
            hessian_bound: v.hessian_bound.max(w.hessian_bound),
            cutoff: 0.0,
            sampling: RadialSampling::Lipschitz,
        },
        spec,
    )
}

/// `∬_{R^{N−1} × R^{N−1}} |v(x) − v(y)|^p / |x − y|^{N−1+σp}`.
pub fn gagliardo_boundary(
    v: &BoundaryField,
    sigma: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    check_field(v, Domain::Flat, v.dim(), "boundary data")?;
    flat_gagliardo(PairKind::BoundaryBoundary, v, v, sigma, p, spec)
}

/// `∬ |v(x) − w(y)|^p / |x − y|^{N−1+σp}`; finite only when `v = w`.
pub fn cross_gagliardo(
    v: &BoundaryField,
    w: &BoundaryField,
    sigma: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    check_field(v, Domain::Flat, v.dim(), "boundary data")?;
    check_field(w, Domain::Flat, v.dim(), "boundary data")?;
    flat_gagliardo(PairKind::BoundaryBoundary, v, w, sigma, p, spec)
}

/// `∬_{R^d × R^d} |u(x) − u(y)|^p / |x − y|^{d+sp}`.
pub fn full_space_gagliardo(u: &Field, s: f64, p: f64, spec: &QuadSpec) -> Result<EnergyEstimate> {
    check_field(u, Domain::Flat, u.dim(), "whole-space field")?;
    flat_gagliardo(PairKind::FullFull, u, u, s, p, spec)
}

/// `∫_{∂R^N_+} ∫_{R^N_+} |v(x) − u(y)|^p / |x − y|^{N+sp} dy dx`.
pub fn conjunction(
    v: &BoundaryField,
    u: &ScalarField,
    s: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    conjunction_with_order(v, u, s, p, spec, 0.0)
}

/// The conjunction integral restricted to `y_N > inner_cutoff`.
pub fn conjunction_cutoff(
    v: &BoundaryField,
    u: &ScalarField,
    s: f64,
    p: f64,
    spec: &QuadSpec,
    inner_cutoff: f64,
) -> Result<EnergyEstimate> {
    conjunction_with_order(v, u, s, p, spec, inner_cutoff)
}

/// Conjunction integral with kernel `|x − y|^{N+σp}` for an arbitrary order `σ`.
///
/// Without a cutoff the numerator is assumed to vanish on the diagonal
/// (`v = tr u`); otherwise the integral is infinite and the estimate meaningless.
pub fn conjunction_with_order(
    v: &BoundaryField,
    u: &ScalarField,
    sigma: f64,
    p: f64,
    spec: &QuadSpec,
    inner_cutoff: f64,
) -> Result<EnergyEstimate> {
    check_order(sigma, p)?;
    let n = u.dim();
    check_field(u, Domain::HalfSpace, n, "interior field")?;
    check_field(v, Domain::Flat, n - 1, "boundary data")?;
    check_compact(u)?;
    check_compact(v)?;
    if !(inner_cutoff >= 0.0 && inner_cutoff.is_finite()) {
        return Err(Error::Parameter(format!(
            "inner cutoff must be >= 0, got {inner_cutoff}"
        )));
    }
    if u.constant.is_some() && u.constant == v.constant {
        return Ok(EnergyEstimate::zero(Method::McImportance));
    }
    let numerator = |x: &[f64], y: &[f64]| (v.eval(&x[..n - 1]) - u.eval(y)).abs().powf(p);
    let diagonal = |x: &[f64], om: &[f64]| directional_power(u, x, om, p);
    let sampling = if inner_cutoff > 0.0 {
        RadialSampling::Kernel
    } else {
        RadialSampling::Lipschitz
    };
    pair_integral_mc(
        &PairProblem {
            kind: PairKind::BoundaryHalfspace,
            dim: n,
            numerator: &numerator,
            diagonal: Some(&diagonal),
            kernel_power: n as f64 + sigma * p,
            p,
            support_radius: support(&[u, v]),
            grad_bound: u.grad_bound,
            hessian_bound: u.hessian_bound,
            cutoff: inner_cutoff,
            sampling,
        },
        spec,
    )
}

/// `∫_{R^N_+} |v(x') − u(x)|^p / x_N^{sp+1} dx`.
///
/// The normal coordinate is sampled from `x_N^{(1−s)p−1}` after dividing the
/// numerator by `x_N^p`, which stays bounded when `v = tr u`.
pub fn hardy_integral(
    v: &BoundaryField,
    u: &ScalarField,
    s: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    check_order(s, p)?;
    let n = u.dim();
    check_field(u, Domain::HalfSpace, n, "interior field")?;
    check_field(v, Domain::Flat, n - 1, "boundary data")?;
    check_compact(u)?;
    check_compact(v)?;
    if u.constant.is_some() && u.constant == v.constant {
        return Ok(EnergyEstimate::zero(Method::McImportance));
    }
    let sp = s * p;
    let big_r = support(&[u, v]);
    let g = |x: &[f64]| {
        let t = x[n - 1];
        ((v.eval(&x[..n - 1]) - u.eval(x)).abs() / t).powf(p)
    };
    let near = |x: &[f64]| {
        let mut grad = [0.0; MAX_DIM];
        u.grad(x, &mut grad[..n]);
        grad[n - 1].abs().powf(p)
    };
    let tail = |x: &[f64]| v.eval(&x[..n - 1]).abs().powf(p) * big_r.powf(-sp) / sp;
    volume_integral_mc(
        &VolumeProblem {
            domain: VolumeDomain::HalfSpace,
            dim: n,
            integrand: &g,
            weight_exponent: (1.0 - s) * p - 1.0,
            support_radius: big_r,
            tail: Some(&tail),
            near_boundary: Some(&near),
        },
        spec,
    )
}

fn gradient_volume(
    u: &ScalarField,
    p: f64,
    weight: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("requires p >= 1, got {p}")));
    }
    let n = u.dim();
    check_field(u, Domain::HalfSpace, n, "interior field")?;
    if u.constant.is_some() {
        return Ok(EnergyEstimate::zero(Method::McUniform));
    }
    check_compact(u)?;
    let g = |x: &[f64]| grad_power(u, x, p);
    volume_integral_mc(
        &VolumeProblem {
            domain: VolumeDomain::HalfSpace,
            dim: n,
            integrand: &g,
            weight_exponent: weight,
            support_radius: u.support_radius,
            tail: None,
            near_boundary: None,
        },
        spec,
    )
}

/// `∫_{R^N_+} |Du(z)|^p / z_N^{1−(1−s)p} dz`.
pub fn weighted_gradient_energy(
    u: &ScalarField,
    s: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    check_order(s, p)?;
    gradient_volume(u, p, (1.0 - s) * p - 1.0, spec)
}

/// `∫_{R^N_+} |Du|^p`.
pub fn gradient_energy_halfspace(
    u: &ScalarField,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    gradient_volume(u, p, 0.0, spec)
}

/// `∬_{R^N_+ × R^N_+} |u(y) − u(z)|^p / |y − z|^{N+sp}`.
pub fn fractional_energy_halfspace(
    u: &ScalarField,
    s: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    check_order(s, p)?;
    let n = u.dim();
    check_field(u, Domain::HalfSpace, n, "interior field")?;
    if u.constant.is_some() {
        return Ok(EnergyEstimate::zero(Method::McImportance));
    }
    check_compact(u)?;
    let numerator = |x: &[f64], y: &[f64]| (u.eval(x) - u.eval(y)).abs().powf(p);
    let diagonal = |x: &[f64], om: &[f64]| directional_power(u, x, om, p);
    pair_integral_mc(
        &PairProblem {
            kind: PairKind::HalfspaceHalfspace,
            dim: n,
            numerator: &numerator,
            diagonal: Some(&diagonal),
            kernel_power: n as f64 + s * p,
            p,
            support_radius: u.support_radius,
            grad_bound: u.grad_bound,
            hessian_bound: u.hessian_bound,
            cutoff: 0.0,
            sampling: RadialSampling::Lipschitz,
        },
        spec,
    )
}

/// Both sides of the weighted Hardy inequality at the boundary point `0`:
/// `∫ |u(x) − u(0)|^p / |x|^{N+sp}` and `∫ |Du(x)|^p x_N^p / |x|^{N+sp}`.
pub fn hardy_proof_pair(
    u: &ScalarField,
    s: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<(EnergyEstimate, EnergyEstimate)> {
    check_order(s, p)?;
    let n = u.dim();
    check_field(u, Domain::HalfSpace, n, "interior field")?;
    if u.constant.is_some() {
        let zero = EnergyEstimate::zero(Method::McImportance);
        return Ok((zero, zero));
    }
    check_compact(u)?;
    if !u.smooth {
        return Err(Error::Unsupported(format!("{} is not C¹", u.label)));
    }
    let origin = vec![0.0; n];
    let u0 = u.eval(&origin);
    let g0 = u.grad_vec(&origin);
    let kappa = n as f64 + s * p;

    let lhs_num = |y: &[f64]| (u.eval(y) - u0).abs().powf(p);
    let lhs_diag = |w: &[f64]| {
        g0.iter()
            .zip(w)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs()
            .powf(p)
    };
    let lhs = point_integral_mc(
        &PointProblem {
            center: &origin,
            half_space: true,
            cutoff: 0.0,
            numerator: &lhs_num,
            diagonal: Some(&lhs_diag),
            kernel_power: kappa,
            p,
            support_radius: u.support_radius,
            grad_bound: u.grad_bound,
            hessian_bound: u.hessian_bound,
            sampling: RadialSampling::Lipschitz,
        },
        spec,
    )?;

    let g0_norm = g0.iter().map(|c| c * c).sum::<f64>().powf(0.5 * p);
    let rhs_num = |y: &[f64]| grad_power(u, y, p) * y[n - 1].powf(p);
    let rhs_diag = |w: &[f64]| g0_norm * w[n - 1].abs().powf(p);
    let rhs = point_integral_mc(
        &PointProblem {
            center: &origin,
            half_space: true,
            cutoff: 0.0,
            numerator: &rhs_num,
            diagonal: Some(&rhs_diag),
            kernel_power: kappa,
            p,
            support_radius: u.support_radius,
            // |Du(y)|^p y_N^p <= L^p r^p; its first-order model has no simple Hessian bound.
            grad_bound: u.grad_bound,
            hessian_bound: f64::INFINITY,
            sampling: RadialSampling::Lipschitz,
        },
        spec,
    )?;
    Ok((lhs, rhs))
}

/// `∫_{∂R^N_+} |Du(x', 0)|^p dx'` with the full gradient, normal component included.
pub fn boundary_gradient_energy(
    u: &ScalarField,
    p: f64,
    spec: &QuadSpec,
) -> Result<EnergyEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("requires p >= 1, got {p}")));
    }
    let n = u.dim();
    check_field(u, Domain::HalfSpace, n, "interior field")?;
    if u.constant.is_some() {
        return Ok(EnergyEstimate::zero(Method::McUniform));
    }
    check_compact(u)?;
    if !u.smooth {
        return Err(Error::Unsupported(format!("{} is not C¹", u.label)));
    }
    let g = |x: &[f64]| {
        let mut z = [0.0; MAX_DIM];
        z[..n - 1].copy_from_slice(x);
        grad_power(u, &z[..n], p)
    };
    volume_integral_mc(
        &VolumeProblem {
            domain: VolumeDomain::Flat,
            dim: n - 1,
            integrand: &g,
            weight_exponent: 0.0,
            support_radius: u.support_radius,
            tail: None,
            near_boundary: None,
        },
        spec,
    )
}

/// `∫_{R^d} |Dv|^p` for a field on a flat space.
pub fn flat_gradient_energy(v: &Field, p: f64, spec: &QuadSpec) -> Result<EnergyEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("requires p >= 1, got {p}")));
    }
    check_field(v, Domain::Flat, v.dim(), "flat field")?;
    if v.constant.is_some() {
        return Ok(EnergyEstimate::zero(Method::McUniform));
    }
    check_compact(v)?;
    let g = |x: &[f64]| grad_power(v, x, p);
    volume_integral_mc(
        &VolumeProblem {
            domain: VolumeDomain::Flat,
            dim: v.dim(),
            integrand: &g,
            weight_exponent: 0.0,
            support_radius: v.support_radius,
            tail: None,
            near_boundary: None,
        },
        spec,
    )
}
