//! Analytic test functions with exact gradients.
//!
//! A [`Field`] lives either on the closed half-space `{x_N >= 0}` or on a flat
//! space `R^d` (boundary data, or whole-space functions for the classical
//! limit). Every field carries a support radius about the origin and
//! analytic bounds on its gradient and Hessian.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Largest supported dimension; keeps evaluation free of heap allocation.
pub const MAX_DIM: usize = 16;

/// `sup |φ'|` for the profile `φ(ρ) = exp(−1/(1 − ρ²))`, rounded up.
pub const PROFILE_SLOPE: f64 = 0.7985;
/// `sup max(|φ''|, |φ'(ρ)/ρ|)`, the Hessian norm of `x ↦ φ(|x|)`, rounded up.
pub const PROFILE_CURVATURE: f64 = 7.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    HalfSpace,
    Flat,
}

#[derive(Clone)]
pub struct Field {
    dim: usize,
    domain: Domain,
    eval: EvalFn,
    grad: GradFn,
    /// The field vanishes outside the ball of this radius about the origin.
    pub support_radius: f64,
    pub grad_bound: f64,
    /// `f64::INFINITY` for fields that are not `C²`.
    pub hessian_bound: f64,
    /// `C¹` up to the boundary.
    pub smooth: bool,
    pub constant: Option<f64>,
    pub label: String,
}

/// A field on the closed half-space.
pub type ScalarField = Field;
/// A field on the boundary hyperplane `R^{N−1}`.
pub type BoundaryField = Field;

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("support_radius", &self.support_radius)
            .field("grad_bound", &self.grad_bound)
            .field("smooth", &self.smooth)
            .finish()
    }
}

/// `φ(ρ) = exp(−1/(1 − ρ²))` and `φ'(ρ)/ρ`, both zero for `ρ >= 1`.
fn profile(rho2: f64) -> (f64, f64) {
    if rho2 >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - rho2;
    let phi = (-1.0 / q).exp();
    (phi, -2.0 * phi / (q * q))
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl Field {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        (self.grad)(x, out)
    }

    pub fn grad_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        self.grad(x, &mut g);
        g
    }

    pub fn is_zero(&self) -> bool {
        self.constant == Some(0.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn new(
        dim: usize,
        domain: Domain,
        eval: EvalFn,
        grad: GradFn,
        support_radius: f64,
        grad_bound: f64,
        hessian_bound: f64,
        smooth: bool,
        label: String,
    ) -> Self {
        Field {
            dim,
            domain,
            eval,
            grad,
            support_radius,
            grad_bound,
            hessian_bound,
            smooth,
            constant: None,
            label,
        }
    }

    pub fn constant(dim: usize, domain: Domain, c: f64) -> Self {
        let mut f = Field::new(
            dim,
            domain,
            Arc::new(move |_| c),
            Arc::new(|_, g| g.fill(0.0)),
            if c == 0.0 { 0.0 } else { f64::INFINITY },
            0.0,
            0.0,
            true,
            format!("CONSTANT({c})"),
        );
        f.constant = Some(c);
        f
    }

    pub fn zero(dim: usize, domain: Domain) -> Self {
        Field::constant(dim, domain, 0.0)
    }

    /// `amplitude · φ(|x − c| / r)`.
    pub fn bump(
        dim: usize,
        domain: Domain,
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    ) -> Result<Self> {
        check_radius(radius)?;
        check_center(&center, dim)?;
        let support = norm(&center) + radius;
        let inv_r2 = 1.0 / (radius * radius);
        let c1 = center.clone();
        let c2 = center.clone();
        let label = format!("BUMP(center={center:?},radius={radius},amplitude={amplitude})");
        Ok(Field::new(
            dim,
            domain,
            Arc::new(move |x| amplitude * profile(dist2(x, &c1) * inv_r2).0),
            Arc::new(move |x, g| {
                let slope = amplitude * profile(dist2(x, &c2) * inv_r2).1 * inv_r2;
                for i in 0..g.len() {
                    g[i] = slope * (x[i] - c2[i]);
                }
            }),
            support,
            amplitude.abs() * PROFILE_SLOPE / radius,
            amplitude.abs() * PROFILE_CURVATURE * inv_r2,
            true,
            label,
        ))
    }

    /// `amplitude · x_N · χ(x − c)` with `χ(z) = e·φ(|z|/R)`, so `χ(0) = 1`.
    pub fn linear_normal_cutoff(
        dim: usize,
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    ) -> Result<Self> {
        check_radius(radius)?;
        check_center(&center, dim)?;
        let e = std::f64::consts::E;
        let inv_r2 = 1.0 / (radius * radius);
        let n = dim - 1;
        let c1 = center.clone();
        let c2 = center.clone();
        let label = format!(
            "LINEAR_NORMAL_CUTOFF(center={center:?},radius={radius},amplitude={amplitude})"
        );
        // On the support x_N <= |c| + R, so |x_N ∇χ| <= (|c| + R)·e·M1/R.
        let reach = (norm(&center) + radius) / radius;
        Ok(Field::new(
            dim,
            Domain::HalfSpace,
            Arc::new(move |x| amplitude * x[n] * e * profile(dist2(x, &c1) * inv_r2).0),
            Arc::new(move |x, g| {
                let (phi, slope) = profile(dist2(x, &c2) * inv_r2);
                let chi = e * phi;
                let s = e * slope * inv_r2 * amplitude * x[n];
                for i in 0..g.len() {
                    g[i] = s * (x[i] - c2[i]);
                }
                g[n] += amplitude * chi;
            }),
            norm(&center) + radius,
            amplitude.abs() * (1.0 + reach * e * PROFILE_SLOPE),
            amplitude.abs() * e * (2.0 * PROFILE_SLOPE + reach * PROFILE_CURVATURE) / radius,
            true,
            label,
        ))
    }

    /// `amplitude · cos(k x_1) · χ(x − c)`.
    pub fn tangential_wave_cutoff(
        dim: usize,
        domain: Domain,
        center: Vec<f64>,
        frequency: f64,
        radius: f64,
        amplitude: f64,
    ) -> Result<Self> {
        check_radius(radius)?;
        check_center(&center, dim)?;
        if !frequency.is_finite() {
            return Err(Error::FieldSpec("frequency must be finite".into()));
        }
        let e = std::f64::consts::E;
        let inv_r2 = 1.0 / (radius * radius);
        let k = frequency;
        let c1 = center.clone();
        let c2 = center.clone();
        let label = format!(
            "TANGENTIAL_WAVE_CUTOFF(center={center:?},frequency={frequency},radius={radius},amplitude={amplitude})"
        );
        let lip = e * PROFILE_SLOPE / radius;
        let curv = e * PROFILE_CURVATURE * inv_r2;
        Ok(Field::new(
            dim,
            domain,
            Arc::new(move |x| amplitude * (k * x[0]).cos() * e * profile(dist2(x, &c1) * inv_r2).0),
            Arc::new(move |x, g| {
                let (phi, slope) = profile(dist2(x, &c2) * inv_r2);
                let (sin, cos) = (k * x[0]).sin_cos();
                let s = amplitude * cos * e * slope * inv_r2;
                for i in 0..g.len() {
                    g[i] = s * (x[i] - c2[i]);
                }
                g[0] -= amplitude * k * sin * e * phi;
            }),
            norm(&center) + radius,
            amplitude.abs() * (k.abs() + lip),
            amplitude.abs() * (k * k + 2.0 * k.abs() * lip + curv),
            true,
            label,
        ))
    }

    /// `amplitude · max(0, 1 − |x − c| / r)`: Lipschitz but not `C¹`.
    pub fn hat(
        dim: usize,
        domain: Domain,
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    ) -> Result<Self> {
        check_radius(radius)?;
        check_center(&center, dim)?;
        let c1 = center.clone();
        let c2 = center.clone();
        let label = format!("HAT(center={center:?},radius={radius},amplitude={amplitude})");
        Ok(Field::new(
            dim,
            domain,
            Arc::new(move |x| amplitude * (1.0 - dist2(x, &c1).sqrt() / radius).max(0.0)),
            Arc::new(move |x, g| {
                let d = dist2(x, &c2).sqrt();
                if d >= radius || d == 0.0 {
                    g.fill(0.0);
                    return;
                }
                for i in 0..g.len() {
                    g[i] = -amplitude * (x[i] - c2[i]) / (d * radius);
                }
            }),
            norm(&center) + radius,
            amplitude.abs() / radius,
            f64::INFINITY,
            false,
            label,
        ))
    }

    /// Indicator of the box `[lo, hi]`.
    pub fn box_probe(dim: usize, domain: Domain, bounds: &BoxSpec, amplitude: f64) -> Result<Self> {
        bounds.check(dim)?;
        let b = bounds.clone();
        Ok(Field::new(
            dim,
            domain,
            Arc::new(move |x| if b.contains(x) { amplitude } else { 0.0 }),
            Arc::new(|_, g| g.fill(0.0)),
            bounds.radius(),
            0.0,
            f64::INFINITY,
            false,
            format!("BOX_PROBE(lo={:?},hi={:?})", bounds.lo, bounds.hi),
        ))
    }

    /// `amplitude · x_N`; unbounded, so only useful after [`Field::restricted`].
    pub fn normal_ramp(dim: usize, amplitude: f64) -> Self {
        let n = dim - 1;
        Field::new(
            dim,
            Domain::HalfSpace,
            Arc::new(move |x| amplitude * x[n]),
            Arc::new(move |_, g| {
                g.fill(0.0);
                g[n] = amplitude;
            }),
            f64::INFINITY,
            amplitude.abs(),
            0.0,
            true,
            format!("NORMAL_RAMP(amplitude={amplitude})"),
        )
    }

    /// `t · u`.
    pub fn scaled(&self, t: f64) -> Field {
        let (eval, grad) = (self.eval.clone(), self.grad.clone());
        Field {
            eval: Arc::new(move |x| t * eval(x)),
            grad: Arc::new(move |x, g| {
                grad(x, g);
                g.iter_mut().for_each(|c| *c *= t);
            }),
            support_radius: if t == 0.0 { 0.0 } else { self.support_radius },
            grad_bound: t.abs() * self.grad_bound,
            hessian_bound: if t == 0.0 {
                0.0
            } else {
                t.abs() * self.hessian_bound
            },
            constant: self.constant.map(|c| t * c),
            label: format!("{t}*{}", self.label),
            ..self.clone()
        }
    }

    /// `x ↦ u(x − shift)`; for half-space fields the shift must be tangential.
    pub fn shifted(&self, shift: &[f64]) -> Result<Field> {
        if shift.len() != self.dim {
            return Err(Error::FieldSpec(format!(
                "shift has length {}, field dimension is {}",
                shift.len(),
                self.dim
            )));
        }
        if self.domain == Domain::HalfSpace && shift[self.dim - 1] != 0.0 {
            return Err(Error::FieldSpec(
                "half-space shifts must be tangential".into(),
            ));
        }
        let s1: Vec<f64> = shift.to_vec();
        let s2 = s1.clone();
        let (eval, grad) = (self.eval.clone(), self.grad.clone());
        Ok(Field {
            eval: Arc::new(move |x| {
                let mut z = [0.0; MAX_DIM];
                z.iter_mut()
                    .zip(x.iter().zip(&s1))
                    .for_each(|(z, (a, b))| *z = a - b);
                eval(&z[..x.len()])
            }),
            grad: Arc::new(move |x, g| {
                let mut z = [0.0; MAX_DIM];
                z.iter_mut()
                    .zip(x.iter().zip(&s2))
                    .for_each(|(z, (a, b))| *z = a - b);
                grad(&z[..x.len()], g)
            }),
            support_radius: self.support_radius + norm(shift),
            label: format!("shift({shift:?})∘{}", self.label),
            ..self.clone()
        })
    }

    /// `x ↦ u(λx)`.
    pub fn dilated(&self, lambda: f64) -> Result<Field> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::FieldSpec(format!(
                "dilation factor must be > 0, got {lambda}"
            )));
        }
        let (eval, grad) = (self.eval.clone(), self.grad.clone());
        Ok(Field {
            eval: Arc::new(move |x| {
                let mut z = [0.0; MAX_DIM];
                z.iter_mut().zip(x).for_each(|(z, c)| *z = lambda * c);
                eval(&z[..x.len()])
            }),
            grad: Arc::new(move |x, g| {
                let mut z = [0.0; MAX_DIM];
                z.iter_mut().zip(x).for_each(|(z, c)| *z = lambda * c);
                grad(&z[..x.len()], g);
                g.iter_mut().for_each(|c| *c *= lambda);
            }),
            support_radius: self.support_radius / lambda,
            grad_bound: lambda * self.grad_bound,
            hessian_bound: lambda * lambda * self.hessian_bound,
            label: format!("{}∘dilate({lambda})", self.label),
            ..self.clone()
        })
    }

    /// `u · 1_box`; the result is not `C¹`.
    pub fn restricted(&self, bounds: &BoxSpec) -> Result<Field> {
        bounds.check(self.dim)?;
        let b1 = bounds.clone();
        let b2 = bounds.clone();
        let (eval, grad) = (self.eval.clone(), self.grad.clone());
        let radius = bounds.radius().min(self.support_radius);
        // Bounds of u on the box are not tracked; the gradient bound stays that of u.
        Ok(Field {
            eval: Arc::new(move |x| if b1.contains(x) { eval(x) } else { 0.0 }),
            grad: Arc::new(move |x, g| {
                if b2.contains(x) {
                    grad(x, g)
                } else {
                    g.fill(0.0)
                }
            }),
            support_radius: radius,
            hessian_bound: f64::INFINITY,
            smooth: false,
            constant: None,
            label: format!("{}|box(lo={:?},hi={:?})", self.label, bounds.lo, bounds.hi),
            ..self.clone()
        })
    }

    /// `self + c · other` on the same domain.
    pub fn plus_scaled(&self, c: f64, other: &Field) -> Result<Field> {
        if self.dim != other.dim || self.domain != other.domain {
            return Err(Error::FieldSpec("fields live on different domains".into()));
        }
        if c == 0.0 {
            return Ok(self.clone());
        }
        let (e1, g1) = (self.eval.clone(), self.grad.clone());
        let (e2, g2) = (other.eval.clone(), other.grad.clone());
        let constant = match (self.constant, other.constant) {
            (Some(a), Some(b)) => Some(a + c * b),
            _ => None,
        };
        Ok(Field {
            dim: self.dim,
            domain: self.domain,
            eval: Arc::new(move |x| e1(x) + c * e2(x)),
            grad: Arc::new(move |x, g| {
                g1(x, g);
                let mut h = [0.0; MAX_DIM];
                g2(x, &mut h[..g.len()]);
                g.iter_mut().zip(h).for_each(|(a, b)| *a += c * b);
            }),
            support_radius: match constant {
                Some(0.0) => 0.0,
                _ => self.support_radius.max(other.support_radius),
            },
            grad_bound: self.grad_bound + c.abs() * other.grad_bound,
            hessian_bound: self.hessian_bound + c.abs() * other.hessian_bound,
            smooth: self.smooth && other.smooth,
            constant,
            label: format!("{}+{c}*{}", self.label, other.label),
        })
    }

    /// `x' ↦ u(x', 0)`.
    pub fn trace(&self) -> Result<BoundaryField> {
        if self.domain != Domain::HalfSpace {
            return Err(Error::Unsupported(
                "trace of a field that is not on the half-space".into(),
            ));
        }
        if !self.smooth {
            return Err(Error::Unsupported(format!(
                "trace is undefined for the non-smooth field {}",
                self.label
            )));
        }
        let n = self.dim;
        let (eval, grad) = (self.eval.clone(), self.grad.clone());
        Ok(Field {
            dim: n - 1,
            domain: Domain::Flat,
            eval: Arc::new(move |x| {
                let mut z = [0.0; MAX_DIM];
                z[..n - 1].copy_from_slice(x);
                eval(&z[..n])
            }),
            grad: Arc::new(move |x, g| {
                let mut z = [0.0; MAX_DIM];
                z[..n - 1].copy_from_slice(x);
                let mut full = [0.0; MAX_DIM];
                grad(&z[..n], &mut full[..n]);
                g.copy_from_slice(&full[..n - 1]);
            }),
            support_radius: self.support_radius,
            grad_bound: self.grad_bound,
            hessian_bound: self.hessian_bound,
            smooth: true,
            constant: self.constant,
            label: format!("tr {}", self.label),
        })
    }
}

/// `v + c · window`: boundary data that differs from `v` where the window is nonzero.
pub fn offset_boundary(v: &BoundaryField, c: f64, window: &BoundaryField) -> Result<BoundaryField> {
    if !window.support_radius.is_finite() {
        return Err(Error::FieldSpec(
            "offset window must have compact support".into(),
        ));
    }
    v.plus_scaled(c, window)
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::FieldSpec(format!(
            "radius must be positive, got {radius}"
        )))
    }
}

fn check_center(center: &[f64], dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::FieldSpec(format!(
            "dimension {dim} exceeds {MAX_DIM}"
        )));
    }
    if center.len() != dim {
        return Err(Error::FieldSpec(format!(
            "center has {} coordinates, expected {dim}",
            center.len()
        )));
    }
    if center.iter().any(|c| !c.is_finite()) {
        return Err(Error::FieldSpec("center must be finite".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxSpec {
    fn check(&self, dim: usize) -> Result<()> {
        if self.lo.len() != dim || self.hi.len() != dim {
            return Err(Error::FieldSpec(format!(
                "box corners must have {dim} coordinates"
            )));
        }
        if self
            .lo
            .iter()
            .zip(&self.hi)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b))
        {
            return Err(Error::FieldSpec(
                "box needs finite lo < hi in every axis".into(),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| *a <= *c && *c <= *b)
    }

    /// Radius of the smallest origin-centred ball containing the box.
    pub fn radius(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FieldKind {
    Bump,
    LinearNormalCutoff,
    TangentialWaveCutoff,
    Constant,
    BoxProbe,
    Hat,
    NormalRamp,
}

/// Serializable description of a corpus field.
///
/// `center` may be shorter than the dimension; it is padded with leading
/// zeros, so `[0.5]` in `N = 2` is the point `(0, 0.5)` at height 0.5. A
/// `box` on any kind other than `BOX_PROBE` restricts the field to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub kind: FieldKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoxSpec>,
}

impl FieldSpec {
    pub fn new(kind: FieldKind) -> Self {
        FieldSpec {
            kind,
            center: Vec::new(),
            radius: None,
            amplitude: None,
            frequency: None,
            bounds: None,
        }
    }

    pub fn bump(center: Vec<f64>, radius: f64, amplitude: f64) -> Self {
        FieldSpec {
            center,
            radius: Some(radius),
            amplitude: Some(amplitude),
            ..FieldSpec::new(FieldKind::Bump)
        }
    }

    pub fn linear_normal_cutoff(radius: f64, amplitude: f64) -> Self {
        FieldSpec {
            radius: Some(radius),
            amplitude: Some(amplitude),
            ..FieldSpec::new(FieldKind::LinearNormalCutoff)
        }
    }

    pub fn tangential_wave_cutoff(frequency: f64, radius: f64) -> Self {
        FieldSpec {
            frequency: Some(frequency),
            radius: Some(radius),
            ..FieldSpec::new(FieldKind::TangentialWaveCutoff)
        }
    }

    pub fn constant(c: f64) -> Self {
        FieldSpec {
            amplitude: Some(c),
            ..FieldSpec::new(FieldKind::Constant)
        }
    }

    pub fn box_probe(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        FieldSpec {
            bounds: Some(BoxSpec { lo, hi }),
            ..FieldSpec::new(FieldKind::BoxProbe)
        }
    }

    /// The three smooth fields of the default corpus.
    pub fn default_corpus() -> Vec<FieldSpec> {
        vec![
            FieldSpec::bump(vec![0.5], 1.0, 1.0),
            FieldSpec::linear_normal_cutoff(1.0, 1.0),
            FieldSpec::tangential_wave_cutoff(2.0, 1.0),
        ]
    }

    fn padded_center(&self, dim: usize) -> Result<Vec<f64>> {
        if self.center.len() > dim {
            return Err(Error::FieldSpec(format!(
                "center has {} coordinates but the field dimension is {dim}",
                self.center.len()
            )));
        }
        let mut c = vec![0.0; dim - self.center.len()];
        c.extend_from_slice(&self.center);
        Ok(c)
    }
}

/// Builds a half-space field in `R^N_+`.
pub fn make_field(spec: &FieldSpec, dim: usize) -> Result<ScalarField> {
    if dim < 2 {
        return Err(Error::FieldSpec(format!(
            "half-space fields need N >= 2, got {dim}"
        )));
    }
    build(spec, dim, Domain::HalfSpace)
}

/// Builds a field on `R^d` (boundary data or a whole-space function).
pub fn make_flat_field(spec: &FieldSpec, dim: usize) -> Result<Field> {
    if dim < 1 {
        return Err(Error::FieldSpec("flat fields need d >= 1".into()));
    }
    match spec.kind {
        FieldKind::LinearNormalCutoff | FieldKind::NormalRamp => Err(Error::FieldSpec(format!(
            "{:?} needs a normal coordinate and is only defined on the half-space",
            spec.kind
        ))),
        _ => build(spec, dim, Domain::Flat),
    }
}

fn build(spec: &FieldSpec, dim: usize, domain: Domain) -> Result<Field> {
    if dim > MAX_DIM {
        return Err(Error::FieldSpec(format!(
            "dimension {dim} exceeds {MAX_DIM}"
        )));
    }
    let radius = spec.radius.unwrap_or(1.0);
    let amplitude = spec.amplitude.unwrap_or(1.0);
    if !amplitude.is_finite() {
        return Err(Error::FieldSpec("amplitude must be finite".into()));
    }
    let center = spec.padded_center(dim)?;
    let field = match spec.kind {
        FieldKind::Bump => Field::bump(dim, domain, center, radius, amplitude)?,
        FieldKind::LinearNormalCutoff => {
            Field::linear_normal_cutoff(dim, center, radius, amplitude)?
        }
        FieldKind::TangentialWaveCutoff => Field::tangential_wave_cutoff(
            dim,
            domain,
            center,
            spec.frequency.unwrap_or(2.0),
            radius,
            amplitude,
        )?,
        FieldKind::Constant => Field::constant(dim, domain, amplitude),
        FieldKind::Hat => Field::hat(dim, domain, center, radius, amplitude)?,
        FieldKind::NormalRamp => Field::normal_ramp(dim, amplitude),
        FieldKind::BoxProbe => {
            let bounds = spec
                .bounds
                .as_ref()
                .ok_or_else(|| Error::FieldSpec("BOX_PROBE needs a box".into()))?;
            return Field::box_probe(dim, domain, bounds, amplitude);
        }
    };
    match &spec.bounds {
        Some(bounds) => field.restricted(bounds),
        None => Ok(field),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_examples() {
        let u = make_field(&FieldSpec::bump(vec![0.0, 0.5], 0.4, 1.0), 2).unwrap();
        assert_eq!(u.eval(&[0.0, 0.5]), (-1.0f64).exp());
        assert_eq!(u.eval(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn constant_field() {
        let u = make_field(&FieldSpec::constant(3.0), 3).unwrap();
        assert_eq!(u.eval(&[0.1, 0.2, 0.3]), 3.0);
        assert_eq!(u.grad_vec(&[0.1, 0.2, 0.3]), vec![0.0; 3]);
        assert_eq!(u.trace().unwrap().eval(&[5.0, 1.0]), 3.0);
    }

    #[test]
    fn center_is_left_padded() {
        let u = make_field(&FieldSpec::bump(vec![0.5], 1.0, 1.0), 3).unwrap();
        assert_eq!(u.eval(&[0.0, 0.0, 0.5]), (-1.0f64).exp());
    }

    #[test]
    fn trace_rejects_probe() {
        let u = make_field(&FieldSpec::box_probe(vec![0.0, 0.0], vec![1.0, 1.0]), 2).unwrap();
        assert!(matches!(u.trace(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bad_specs() {
        assert!(make_field(&FieldSpec::bump(vec![], 0.0, 1.0), 2).is_err());
        assert!(make_field(&FieldSpec::bump(vec![1.0, 2.0, 3.0], 1.0, 1.0), 2).is_err());
        assert!(make_field(&FieldSpec::box_probe(vec![1.0, 0.0], vec![0.0, 1.0]), 2).is_err());
        assert!(make_field(&FieldSpec::new(FieldKind::BoxProbe), 2).is_err());
        assert!(make_flat_field(&FieldSpec::linear_normal_cutoff(1.0, 1.0), 2).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"kind":"BUMP","center":[0.5],"radius":1.0,"amplitude":2.0}"#;
        let spec: FieldSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec, FieldSpec::bump(vec![0.5], 1.0, 2.0));
        let probe: FieldSpec =
            serde_json::from_str(r#"{"kind":"BOX_PROBE","box":{"lo":[0,0],"hi":[1,1]}}"#).unwrap();
        assert!(probe.bounds.is_some());
    }
}
