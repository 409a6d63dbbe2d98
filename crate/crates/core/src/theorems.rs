//! Inequality harness, vector-field diagnostics for the weighted Hardy
//! argument, and the divergence test for wrong boundary data.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::energies::{
    conjunction, conjunction_cutoff, conjunction_with_order, cross_gagliardo,
    fractional_energy_halfspace, gagliardo_boundary, gradient_energy_halfspace, hardy_integral,
    hardy_proof_pair, weighted_gradient_energy,
};
use crate::error::{Error, Result};
use crate::fields::{BoundaryField, Domain, Field, ScalarField};
use crate::quad::{EnergyEstimate, QuadSpec};
use crate::specfun::{paper_constant, ConstantKind, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    HardyClassical,
    TraceConjW1p,
    WeightedHardy,
    FractionalConj,
    ConjToGagliardo,
    ThreePoint,
    ConjToHardy,
    HardyGagliardoToConj,
    Uspenskii,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::HardyClassical,
        TheoremId::TraceConjW1p,
        TheoremId::WeightedHardy,
        TheoremId::FractionalConj,
        TheoremId::ConjToGagliardo,
        TheoremId::ThreePoint,
        TheoremId::ConjToHardy,
        TheoremId::HardyGagliardoToConj,
        TheoremId::Uspenskii,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::HardyClassical => "HARDY_CLASSICAL",
            TheoremId::TraceConjW1p => "TRACE_CONJ_W1P",
            TheoremId::WeightedHardy => "WEIGHTED_HARDY",
            TheoremId::FractionalConj => "FRACTIONAL_CONJ",
            TheoremId::ConjToGagliardo => "CONJ_TO_GAGLIARDO",
            TheoremId::ThreePoint => "THREE_POINT",
            TheoremId::ConjToHardy => "CONJ_TO_HARDY",
            TheoremId::HardyGagliardoToConj => "HARDY_GAGLIARDO_TO_CONJ",
            TheoremId::Uspenskii => "USPENSKII",
        }
    }

    /// Admissibility beyond the base [`Params`] invariants, as a constraint message.
    pub fn check_admissible(&self, params: &Params) -> Result<()> {
        params.validate()?;
        match self {
            TheoremId::HardyClassical
            | TheoremId::TraceConjW1p
            | TheoremId::WeightedHardy
            | TheoremId::Uspenskii => params.require_p_gt_one(),
            TheoremId::FractionalConj => params.require_sp_gt_one(),
            _ => Ok(()),
        }
    }

    /// The classical Hardy inequality has no free order: it is the case `sp + 1 = p`.
    pub fn effective_params(&self, params: &Params) -> Params {
        match self {
            TheoremId::HardyClassical => Params {
                s: 1.0 - 1.0 / params.p,
                ..*params
            },
            _ => *params,
        }
    }

    /// Whether the constant is taken from a proof rather than a statement.
    pub fn proof_derived_constant(&self) -> bool {
        matches!(
            self,
            TheoremId::FractionalConj | TheoremId::ConjToHardy | TheoremId::HardyGagliardoToConj
        )
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown theorem id '{s}'")))
    }
}

/// The functions an inequality is checked on.
#[derive(Debug, Clone)]
pub struct FieldBundle {
    pub u: ScalarField,
    pub v: BoundaryField,
    /// Second boundary datum of the three-point estimate; defaults to `v`.
    pub w: Option<BoundaryField>,
}

impl FieldBundle {
    pub fn from_interior(u: ScalarField) -> Result<Self> {
        let v = u.trace()?;
        Ok(FieldBundle { u, v, w: None })
    }
}

/// One side of an inequality, as reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub value: f64,
    pub stderr: f64,
    pub bias: f64,
}

impl From<&EnergyEstimate> for Side {
    fn from(e: &EnergyEstimate) -> Self {
        Side {
            value: e.value,
            stderr: e.stderr,
            bias: e.bias_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: TheoremId,
    pub params: Params,
    pub field: String,
    pub lhs: Side,
    pub rhs: Side,
    pub constant: f64,
    pub proof_derived_constant: bool,
    pub ratio: f64,
    pub margin: f64,
    pub pass: bool,
    pub seed: u64,
    pub samples: u64,
    pub wall_ms: u64,
}

/// `lhs/(C·rhs)` with `0/0 = 0`.
pub fn ratio(lhs: f64, constant: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / (constant * rhs)
    }
}

/// Relative three-sigma noise of both sides, bias bounds added in quadrature.
pub fn margin(lhs: &EnergyEstimate, rhs: &EnergyEstimate) -> f64 {
    let rel = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    let terms = [
        rel(3.0 * lhs.stderr, lhs.value),
        rel(lhs.bias_bound, lhs.value),
        rel(3.0 * rhs.stderr, rhs.value),
        rel(rhs.bias_bound, rhs.value),
    ];
    terms.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn seeded(spec: &QuadSpec, k: u64) -> QuadSpec {
    QuadSpec {
        seed: spec.seed.wrapping_add(k),
        ..spec.clone()
    }
}

/// Estimates both sides of theorem `id` and compares them.
pub fn check_inequality(
    id: TheoremId,
    fields: &FieldBundle,
    params: &Params,
    spec: &QuadSpec,
) -> Result<InequalityReport> {
    id.check_admissible(params)?;
    let params = id.effective_params(params);
    let FieldBundle { u, v, w } = fields;
    let n = params.n;
    if u.domain() != Domain::HalfSpace || u.dim() != n {
        return Err(Error::Parameter(format!(
            "interior field has dimension {} but N = {n}",
            u.dim()
        )));
    }
    if v.domain() != Domain::Flat || v.dim() != n - 1 {
        return Err(Error::Parameter(
            "boundary field must live on R^{N-1}".into(),
        ));
    }
    let (s, p) = (params.s, params.p);
    let start = Instant::now();
    let s0 = seeded(spec, 0);
    let s1 = seeded(spec, 1);
    let s2 = seeded(spec, 2);
    let (lhs, rhs, constant) = match id {
        TheoremId::HardyClassical => (
            hardy_integral(v, u, s, p, &s0)?,
            gradient_energy_halfspace(u, p, &s1)?,
            paper_constant(ConstantKind::HardyClassical, &params)?,
        ),
        TheoremId::TraceConjW1p => (
            conjunction(v, u, s, p, &s0)?,
            weighted_gradient_energy(u, s, p, &s1)?,
            paper_constant(ConstantKind::TraceConjW1p, &params)?,
        ),
        TheoremId::WeightedHardy => {
            let (l, r) = hardy_proof_pair(u, s, p, &s0)?;
            (l, r, paper_constant(ConstantKind::WeightedHardy, &params)?)
        }
        TheoremId::FractionalConj => (
            conjunction_with_order(v, u, s - 1.0 / p, p, &s0, 0.0)?,
            fractional_energy_halfspace(u, s, p, &s1)?,
            paper_constant(ConstantKind::FractionalConj, &params)?,
        ),
        TheoremId::ConjToGagliardo => (
            gagliardo_boundary(v, s, p, &s0)?,
            conjunction(v, u, s, p, &s1)?,
            paper_constant(ConstantKind::GagliardoControl, &params)?,
        ),
        TheoremId::ThreePoint => {
            let w = w.as_ref().unwrap_or(v);
            let lhs = cross_gagliardo(v, w, s, p, &s0)?;
            let rhs = conjunction(v, u, s, p, &s1)?.plus(&conjunction(w, u, s, p, &s2)?);
            (
                lhs,
                rhs,
                paper_constant(ConstantKind::GagliardoControl, &params)?,
            )
        }
        TheoremId::ConjToHardy => (
            hardy_integral(v, u, s, p, &s0)?,
            conjunction(v, u, s, p, &s1)?,
            paper_constant(ConstantKind::ConjToHardy, &params)?,
        ),
        TheoremId::HardyGagliardoToConj => {
            let c1 = paper_constant(ConstantKind::ConjFromGagliardoPart, &params)?;
            let c2 = paper_constant(ConstantKind::ConjFromHardyPart, &params)?;
            let rhs = gagliardo_boundary(v, s, p, &s1)?
                .scaled(c1)
                .plus(&hardy_integral(v, u, s, p, &s2)?.scaled(c2));
            (conjunction(v, u, s, p, &s0)?, rhs, 1.0)
        }
        TheoremId::Uspenskii => (
            gagliardo_boundary(v, s, p, &s0)?,
            weighted_gradient_energy(u, s, p, &s1)?,
            paper_constant(ConstantKind::UspenskiiComposite, &params)?,
        ),
    };
    let r = ratio(lhs.value, constant, rhs.value);
    let m = margin(&lhs, &rhs);
    Ok(InequalityReport {
        id,
        params,
        field: u.label.clone(),
        lhs: Side::from(&lhs),
        rhs: Side::from(&rhs),
        constant,
        proof_derived_constant: id.proof_derived_constant(),
        ratio: r,
        margin: m,
        pass: r <= 1.0 + m,
        seed: spec.seed,
        samples: lhs.samples_used + rhs.samples_used,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// `ξ(x) = x_N e_N/|x|^{N+sp} − (1 + N/(sp)) x_N² x/|x|^{N+sp+2}`.
pub fn xi_field(params: &Params, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let sp = params.sp();
    let r2: f64 = x.iter().map(|c| c * c).sum();
    let k = params.nf() + sp;
    let xn = x[n - 1];
    let lead = xn * r2.powf(-0.5 * k);
    let c = (1.0 + params.nf() / sp) * xn * xn * r2.powf(-0.5 * k - 1.0);
    for i in 0..n {
        out[i] = -c * x[i];
    }
    out[n - 1] += lead;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiPoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub div_fd: f64,
    pub div_exact: f64,
    pub div_rel_err: f64,
    pub norm: f64,
    pub norm_bound: f64,
    pub dot: f64,
    pub dot_exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiReport {
    pub params: Params,
    pub h: f64,
    pub points: Vec<XiPoint>,
    pub max_div_rel_err: f64,
    /// `max (|ξ| − bound)/bound`; non-positive up to rounding.
    pub max_norm_excess: f64,
    pub max_dot_rel_err: f64,
    /// `sp <= N`. Otherwise `|ξ|² = x_N²/|x|^{2(N+sp)} − (1 − (N/sp)²) x_N⁴/|x|^{2(N+sp+1)}`
    /// exceeds the bound near the tangential directions, and the sharp factor is 1.
    pub norm_bound_applies: bool,
}

impl XiReport {
    pub fn passes(&self, div_tol: f64, exact_tol: f64) -> bool {
        let norm_ok = !self.norm_bound_applies || self.max_norm_excess <= exact_tol;
        self.max_div_rel_err <= div_tol && norm_ok && self.max_dot_rel_err <= exact_tol
    }
}

/// Checks the divergence identity by central differences, and the norm bound
/// and radial identity of `ξ` in floating point, at each point.
pub fn xi_diagnostics(params: &Params, points: &[Vec<f64>], h: f64) -> Result<XiReport> {
    params.validate()?;
    if !(1e-7..=1e-4).contains(&h) {
        return Err(Error::Parameter(format!(
            "step h must lie in [1e-7, 1e-4], got {h}"
        )));
    }
    let n = params.n;
    let sp = params.sp();
    let k = params.nf() + sp;
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != n {
            return Err(Error::Domain(format!("point {x:?} is not in R^{n}")));
        }
        let xn = x[n - 1];
        if !(xn > h) {
            return Err(Error::Domain(format!("point {x:?} is not interior")));
        }
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let mut xi = vec![0.0; n];
        xi_field(params, x, &mut xi);
        let mut div = 0.0;
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        let mut z = x.clone();
        for i in 0..n {
            z[i] = x[i] + h;
            xi_field(params, &z, &mut plus);
            z[i] = x[i] - h;
            xi_field(params, &z, &mut minus);
            z[i] = x[i];
            div += (plus[i] - minus[i]) / (2.0 * h);
        }
        let div_exact = r2.powf(-0.5 * k);
        let norm = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
        let norm_bound = params.nf() / sp * xn * r2.powf(-0.5 * k);
        let dot: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
        let dot_exact = -params.nf() * xn * xn / (sp * r2.powf(0.5 * k));
        out.push(XiPoint {
            x: x.clone(),
            xi,
            div_fd: div,
            div_exact,
            div_rel_err: ((div - div_exact) / div_exact).abs(),
            norm,
            norm_bound,
            dot,
            dot_exact,
        });
    }
    let max = |f: &dyn Fn(&XiPoint) -> f64| out.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(XiReport {
        params: *params,
        h,
        max_div_rel_err: max(&|q| q.div_rel_err),
        max_norm_excess: max(&|q| (q.norm - q.norm_bound) / q.norm_bound),
        max_dot_rel_err: max(&|q| ((q.dot - q.dot_exact) / q.dot_exact).abs()),
        norm_bound_applies: sp <= params.nf(),
        points: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub s: f64,
    pub p: f64,
    pub epsilons: Vec<f64>,
    pub values: Vec<Side>,
    pub slope: f64,
    pub intercept: f64,
    pub expected_slope: f64,
}

impl DivergenceReport {
    /// `|value(ε_min) − value(ε_max)|` against its combined tolerance.
    pub fn spread(&self) -> (f64, f64) {
        let first = self.values.first().expect("at least three values");
        let last = self.values.last().expect("at least three values");
        let tol = 3.0 * first.stderr.hypot(last.stderr) + first.bias + last.bias;
        ((last.value - first.value).abs(), tol)
    }
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Default pair for the divergence test in `R^N_+`: `u` a small bump at
/// height 0.5 (zero trace, vanishing for `x_N < 0.1`) and a boundary window
/// supported under it. With `w = tr u` the truncated integrals are then
/// independent of `ε ≤ 0.1`, and with `w ≠ tr u` the `ε^{−sp}` term
/// dominates already at `ε = 0.1`.
pub fn divergence_probe(n: usize) -> Result<(ScalarField, BoundaryField)> {
    if n < 2 {
        return Err(Error::Parameter(format!("N must be >= 2, got {n}")));
    }
    let mut center = vec![0.0; n];
    center[n - 1] = 0.5;
    let u = Field::bump(n, Domain::HalfSpace, center, 0.4, 0.25)?;
    let window = Field::bump(n - 1, Domain::Flat, vec![0.0; n - 1], 0.3, 1.0)?;
    Ok((u, window))
}

/// Conjunction integral of `(w, u)` over `y_N > ε` for each `ε`, with the
/// slope of `ln value` against `ln ε`. Wrong boundary data make the full
/// integral diverge like `ε^{−sp}`.
pub fn trace_divergence_diagnostic(
    u: &ScalarField,
    w: &BoundaryField,
    s: f64,
    p: f64,
    epsilons: &[f64],
    spec: &QuadSpec,
) -> Result<DivergenceReport> {
    if epsilons.len() < 3 {
        return Err(Error::Parameter(format!(
            "need at least 3 cutoffs, got {}",
            epsilons.len()
        )));
    }
    if epsilons.windows(2).any(|e| !(e[1] < e[0])) {
        return Err(Error::Parameter(
            "cutoffs must be strictly decreasing".into(),
        ));
    }
    if epsilons.iter().any(|&e| !(e >= 10.0 * spec.r_min)) {
        return Err(Error::Parameter("cutoffs must be at least 10·r_min".into()));
    }
    let mut values = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        values.push(conjunction_cutoff(w, u, s, p, spec, eps)?);
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = values
        .iter()
        .map(|v| v.value.max(f64::MIN_POSITIVE).ln())
        .collect();
    let (intercept, slope) = linear_fit(&xs, &ys);
    Ok(DivergenceReport {
        s,
        p,
        epsilons: epsilons.to_vec(),
        values: values.iter().map(Side::from).collect(),
        slope,
        intercept,
        expected_slope: -s * p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_spot_value() {
        let params = Params::new(2, 0.5, 2.0).unwrap();
        let mut xi = [0.0; 2];
        xi_field(&params, &[0.0, 1.0], &mut xi);
        assert_eq!(xi, [0.0, -2.0]);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 3.0, 0.0), 0.0);
        assert_eq!(ratio(1.0, 3.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(3.0, 3.0, 2.0), 0.5);
    }

    #[test]
    fn fit_recovers_line() {
        let (a, b) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn diagnostic_input_checks() {
        let params = Params::new(2, 0.5, 2.0).unwrap();
        assert!(xi_diagnostics(&params, &[vec![1.0, 0.0]], 1e-6).is_err());
        assert!(xi_diagnostics(&params, &[vec![0.0, 0.0]], 1e-6).is_err());
        assert!(xi_diagnostics(&params, &[vec![0.0, 1.0]], 1e-2).is_err());
    }

    #[test]
    fn admissibility_messages_name_the_constraint() {
        let params = Params::new(2, 0.5, 2.0).unwrap();
        let err = TheoremId::FractionalConj
            .check_admissible(&params)
            .unwrap_err();
        assert!(err.to_string().contains("sp > 1"));
        let p1 = Params::new(2, 0.5, 1.0).unwrap();
        assert!(TheoremId::WeightedHardy.check_admissible(&p1).is_err());
        assert!(TheoremId::ConjToGagliardo.check_admissible(&p1).is_ok());
    }
}
