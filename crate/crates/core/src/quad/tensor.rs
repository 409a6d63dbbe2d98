use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::{EnergyEstimate, Method};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫ g(x) x_N^β dx` over `[−R, R]^{N−1} × (0, R]` by a tensor Gauss-Legendre
/// rule with `points` nodes per axis. The weight is removed by
/// `x_N = R·t^{1/(β+1)}`.
pub fn volume_integral_tensor<G: Fn(&[f64]) -> f64>(
    dim: usize,
    g: G,
    weight_exponent: f64,
    support_radius: f64,
    points: usize,
) -> Result<EnergyEstimate> {
    if !(weight_exponent > -1.0) {
        return Err(Error::NonIntegrable(format!(
            "boundary weight exponent {weight_exponent} <= -1"
        )));
    }
    if dim < 1 || points < 1 || !(support_radius > 0.0) {
        return Err(Error::Parameter(
            "tensor rule needs dim, points >= 1 and R > 0".into(),
        ));
    }
    let r = support_radius;
    let (nodes, weights) = gauss_legendre(points);
    let q = 1.0 / (weight_exponent + 1.0);
    let normal_scale = r.powf(weight_exponent + 1.0) * q;
    let mut x = vec![0.0; dim];
    let mut index = vec![0usize; dim];
    let mut total = 0.0;
    let count = points.pow(dim as u32);
    for _ in 0..count {
        let mut w = 1.0;
        for axis in 0..dim - 1 {
            x[axis] = r * nodes[index[axis]];
            w *= r * weights[index[axis]];
        }
        let t = 0.5 * (nodes[index[dim - 1]] + 1.0);
        x[dim - 1] = r * t.powf(q);
        w *= 0.5 * weights[index[dim - 1]] * normal_scale;
        total += w * g(&x);
        for slot in index.iter_mut() {
            *slot += 1;
            if *slot < points {
                break;
            }
            *slot = 0;
        }
    }
    Ok(EnergyEstimate {
        value: total,
        stderr: 0.0,
        samples_used: count as u64,
        method: Method::DetTensor,
        bias_bound: 0.0,
    })
}
