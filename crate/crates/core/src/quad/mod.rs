//! Quadrature engine.
//!
//! Pair integrals `∬ F(x, y) / |x − y|^κ` are estimated by Monte Carlo with
//! the inner variable written in polar coordinates around `x`, so the
//! kernel singularity is absorbed into the radial density. Volume integrals
//! with a power weight in the normal coordinate sample that coordinate from
//! the weight. A deterministic adaptive Gauss-Kronrod rule handles 1-D
//! reduced integrals, and a tensor Gauss-Legendre rule serves as a dense
//! reference in low dimension.

pub mod calibration;
mod mc;
mod radial;
mod rng;
mod tensor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mc::{
    hyperplane_potential_mc, pair_integral_mc, point_integral_mc, volume_integral_mc, Numerator,
    PairKind, PairProblem, PointProblem, RadialSampling, VolumeDomain, VolumeProblem,
};
pub use radial::{radial_quadrature, RadialOptions};
pub use rng::{sphere_direction, stratum_seed, StratumRng};
pub use tensor::{gauss_legendre, volume_integral_tensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSpec {
    /// Samples per stratum.
    pub samples: usize,
    pub strata: usize,
    pub seed: u64,
    /// The outer domain is sampled densely up to `pad_factor · supportRadius`.
    pub pad_factor: f64,
    /// Radial cutoff below which the integrand is replaced by its first-order model.
    pub r_min: f64,
    /// When positive, sampling stops once the relative standard error falls below it.
    pub target_rel_err: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            samples: 62_500,
            strata: 16,
            seed: 0x5EED,
            pad_factor: 4.0,
            r_min: 1e-12,
            target_rel_err: 0.0,
        }
    }
}

impl QuadSpec {
    pub fn with_total_samples(total: usize, strata: usize, seed: u64) -> Self {
        QuadSpec {
            samples: total.div_ceil(strata.max(1)),
            strata,
            seed,
            ..QuadSpec::default()
        }
    }

    pub fn total_samples(&self) -> usize {
        self.samples * self.strata
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(Error::Parameter(format!(
                "quad spec needs samples >= 1000 per stratum, got {}",
                self.samples
            )));
        }
        if self.strata < 1 {
            return Err(Error::Parameter("quad spec needs strata >= 1".into()));
        }
        if !(self.pad_factor >= 1.0 && self.pad_factor.is_finite()) {
            return Err(Error::Parameter(format!(
                "quad spec needs pad_factor >= 1, got {}",
                self.pad_factor
            )));
        }
        if !(self.r_min > 0.0 && self.r_min < 1.0) {
            return Err(Error::Parameter(format!(
                "quad spec needs 0 < r_min < 1, got {}",
                self.r_min
            )));
        }
        if !(self.target_rel_err >= 0.0) {
            return Err(Error::Parameter("target_rel_err must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    McImportance,
    McUniform,
    DetRadial,
    DetTensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples_used: u64,
    pub method: Method,
    pub bias_bound: f64,
}

impl EnergyEstimate {
    pub fn zero(method: Method) -> Self {
        EnergyEstimate {
            value: 0.0,
            stderr: 0.0,
            samples_used: 0,
            method,
            bias_bound: 0.0,
        }
    }

    pub fn exact(value: f64, method: Method) -> Self {
        EnergyEstimate {
            value,
            ..EnergyEstimate::zero(method)
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        EnergyEstimate {
            value: c * self.value,
            stderr: c.abs() * self.stderr,
            bias_bound: c.abs() * self.bias_bound,
            ..*self
        }
    }

    /// Sum of independent estimates.
    pub fn plus(&self, other: &EnergyEstimate) -> Self {
        EnergyEstimate {
            value: self.value + other.value,
            stderr: self.stderr.hypot(other.stderr),
            samples_used: self.samples_used + other.samples_used,
            method: self.method,
            bias_bound: self.bias_bound + other.bias_bound,
        }
    }

    /// `3·stderr + biasBound`, the tolerance used by every calibration check.
    pub fn tolerance(&self) -> f64 {
        3.0 * self.stderr + self.bias_bound
    }

    pub fn rel_stderr(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.stderr / self.value.abs()
        }
    }
}
