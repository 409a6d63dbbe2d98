//! Reference problems with known values for the Monte Carlo estimators.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    hyperplane_potential_mc, point_integral_mc, volume_integral_mc, volume_integral_tensor,
    EnergyEstimate, PairKind, PairProblem, PointProblem, QuadSpec, RadialSampling, VolumeDomain,
    VolumeProblem,
};
use crate::error::Result;
use crate::fields::{Domain, Field, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationCase {
    /// `F ≡ 0` on the boundary–half-space pair.
    PairZero,
    /// `∫_{B_1 ∩ R²_+} |y|² / |y|³ dy = π` around a boundary point.
    PairHalfBall,
    /// `∫_R (1 + z²)^{−3/2} dz = 2` from height 1.
    PairHyperplane,
    /// `g ≡ 0`.
    VolumeZero,
    /// `∫_{[0,1]²} x_N^p / x_N^{sp+1}` at `s = 1/2`, `p = 2`: the unit box area.
    VolumeBox,
    /// `∫_{R²_+} |D bump|²` against the tensor rule on a 200² grid.
    VolumeGradBump,
}

impl CalibrationCase {
    pub const ALL: [CalibrationCase; 6] = [
        CalibrationCase::PairZero,
        CalibrationCase::PairHalfBall,
        CalibrationCase::PairHyperplane,
        CalibrationCase::VolumeZero,
        CalibrationCase::VolumeBox,
        CalibrationCase::VolumeGradBump,
    ];

    fn bump() -> Field {
        Field::bump(2, Domain::HalfSpace, vec![0.0, 0.5], 1.0, 1.0).expect("valid bump")
    }

    /// Known value; the last case is a deterministic tensor-rule reference.
    pub fn reference(&self) -> Result<f64> {
        Ok(match self {
            CalibrationCase::PairZero | CalibrationCase::VolumeZero => 0.0,
            CalibrationCase::PairHalfBall => PI,
            CalibrationCase::PairHyperplane => 2.0,
            CalibrationCase::VolumeBox => 1.0,
            CalibrationCase::VolumeGradBump => {
                let u = Self::bump();
                let g = |x: &[f64]| {
                    let mut d = [0.0; MAX_DIM];
                    u.grad(x, &mut d[..2]);
                    d[0] * d[0] + d[1] * d[1]
                };
                volume_integral_tensor(2, g, 0.0, u.support_radius, 200)?.value
            }
        })
    }

    pub fn estimate(&self, spec: &QuadSpec) -> Result<EnergyEstimate> {
        match self {
            CalibrationCase::PairZero => {
                let zero = |_: &[f64], _: &[f64]| 0.0;
                super::pair_integral_mc(
                    &PairProblem {
                        kind: PairKind::BoundaryHalfspace,
                        dim: 2,
                        numerator: &zero,
                        diagonal: None,
                        kernel_power: 3.0,
                        p: 2.0,
                        support_radius: 1.0,
                        grad_bound: 0.0,
                        hessian_bound: 0.0,
                        cutoff: 0.0,
                        sampling: RadialSampling::Lipschitz,
                    },
                    spec,
                )
            }
            CalibrationCase::PairHalfBall => {
                let numerator = |y: &[f64]| {
                    let r2 = y[0] * y[0] + y[1] * y[1];
                    if r2 < 1.0 {
                        r2
                    } else {
                        0.0
                    }
                };
                let diagonal = |_: &[f64]| 1.0;
                point_integral_mc(
                    &PointProblem {
                        center: &[0.0, 0.0],
                        half_space: true,
                        cutoff: 0.0,
                        numerator: &numerator,
                        diagonal: Some(&diagonal),
                        kernel_power: 3.0,
                        p: 2.0,
                        support_radius: 1.5,
                        grad_bound: 1.0,
                        hessian_bound: 0.0,
                        sampling: RadialSampling::Lipschitz,
                    },
                    spec,
                )
            }
            CalibrationCase::PairHyperplane => {
                hyperplane_potential_mc(1, 1.0, &|_: &[f64]| 1.0, 3.0, f64::INFINITY, spec)
            }
            CalibrationCase::VolumeZero => volume_integral_mc(
                &VolumeProblem {
                    domain: VolumeDomain::HalfSpace,
                    dim: 2,
                    integrand: &|_: &[f64]| 0.0,
                    weight_exponent: 0.0,
                    support_radius: 1.0,
                    tail: None,
                    near_boundary: None,
                },
                spec,
            ),
            CalibrationCase::VolumeBox => {
                // x_N^p / x_N^{sp+1} = x_N^{(1−s)p−1} is the sampled weight; the integrand is the box.
                let g = |x: &[f64]| {
                    if (0.0..=1.0).contains(&x[0]) && x[1] <= 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                };
                let (s, p) = (0.5, 2.0);
                volume_integral_mc(
                    &VolumeProblem {
                        domain: VolumeDomain::HalfSpace,
                        dim: 2,
                        integrand: &g,
                        weight_exponent: (1.0 - s) * p - 1.0,
                        support_radius: 2f64.sqrt(),
                        tail: None,
                        near_boundary: None,
                    },
                    spec,
                )
            }
            CalibrationCase::VolumeGradBump => {
                let u = Self::bump();
                let g = |x: &[f64]| {
                    let mut d = [0.0; MAX_DIM];
                    u.grad(x, &mut d[..2]);
                    d[0] * d[0] + d[1] * d[1]
                };
                volume_integral_mc(
                    &VolumeProblem {
                        domain: VolumeDomain::HalfSpace,
                        dim: 2,
                        integrand: &g,
                        weight_exponent: 0.0,
                        support_radius: u.support_radius,
                        tail: None,
                        near_boundary: None,
                    },
                    spec,
                )
            }
        }
    }

    /// Whether `estimate` reproduces `reference` within `3·stderr + biasBound`,
    /// plus `rel_slack` of the reference for the tensor-rule case.
    pub fn agrees(&self, est: &EnergyEstimate, reference: f64) -> bool {
        let slack = match self {
            CalibrationCase::VolumeGradBump => 1e-6 * reference.abs(),
            _ => 0.0,
        };
        (est.value - reference).abs() <= est.tolerance() + slack
    }
}
