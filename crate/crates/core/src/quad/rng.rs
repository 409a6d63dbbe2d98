use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// `splitmix64(seed ^ index·φ)`: the seed of stratum `index`.
pub fn stratum_seed(seed: u64, index: u64) -> u64 {
    SplitMix64::seed_from_u64(seed ^ index.wrapping_mul(GOLDEN)).next_u64()
}

/// Counter-based generator owned by one stratum.
pub struct StratumRng(SplitMix64);

impl StratumRng {
    pub fn new(seed: u64, index: u64) -> Self {
        StratumRng(SplitMix64::seed_from_u64(stratum_seed(seed, index)))
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform on `(0, 1]`, safe to raise to negative powers.
    pub fn uniform_pos(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Fills `out` with a uniform point of the unit sphere.
    pub fn direction(&mut self, out: &mut [f64]) {
        sphere_direction(&mut self.0, out);
    }

    /// Fills `out` with a uniform point of the unit ball.
    pub fn in_ball(&mut self, out: &mut [f64]) {
        self.direction(out);
        let r = self.uniform().powf(1.0 / out.len() as f64);
        out.iter_mut().for_each(|c| *c *= r);
    }
}

pub fn sphere_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for c in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *c = g;
            norm2 += g * g;
        }
        if norm2 > 1e-200 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|c| *c *= inv);
            return;
        }
    }
}
