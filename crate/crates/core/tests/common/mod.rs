//! Independent oracles: deterministic quadrature written here, sharing no
//! code with the crate's quadrature engine. Fields are only evaluated.
#![allow(dead_code, clippy::excessive_precision, clippy::approx_constant)]

use std::f64::consts::PI;

use trace_conjunction_core::fields::Field;

/// `ln Γ(x)` from mpmath at 40 digits.
pub const LOG_GAMMA_TABLE: [(f64, f64); 29] = [
    (1e-08, 18.420680738180208884),
    (0.001, 6.9071788853838536617),
    (0.1, 2.252712651734205902),
    (0.25, 1.2880225246980774574),
    (0.5, 0.57236494292470008707),
    (0.75, 0.20328095143129537148),
    (0.9, 0.066376239734742954426),
    (0.999, 0.00057803853289138023817),
    (1.0, 0.0),
    (1.001, -0.00057639359828330615152),
    (1.1, -0.049872441259839761785),
    (1.3, -0.10817480950786047846),
    (1.5, -0.12078223763524522235),
    (1.75, -0.084401121020485555958),
    (1.999, -0.00042246180069210728418),
    (2.0, 0.0),
    (2.2, 0.096947466790638873178),
    (2.5, 0.28468287047291915963),
    (3.0, 0.69314718055994530942),
    (3.7, 1.4280723266653881292),
    (5.0, 3.1780538303479456196),
    (7.25, 7.0521854507385394449),
    (10.0, 12.801827480081469611),
    (15.5, 26.536914491115613624),
    (33.3, 82.603723581654943008),
    (100.0, 359.13420536957539878),
    (171.5, 709.14316303092824227),
    (1000.0, 5905.2204232091812118),
    (100000.0, 1051287.7089736568949),
];

/// Gauss-Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels.
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for k in 0..panels {
            let lo = a + k as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Rule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let d = 0.5 * (b - a);
    let eval = |t: f64| {
        let u = 0.5 * PI * t.sinh();
        let x = u.tanh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        // Distance to the nearer endpoint, kept exact for tiny values.
        let gap = d / (u.abs().exp() * u.abs().cosh());
        let point = if x < 0.0 { a + gap } else { b - gap };
        if gap <= 0.0 || !(point > a && point < b) {
            0.0
        } else {
            d * w * f(point)
        }
    };
    let mut h = 0.5;
    let mut total = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = eval(t) + eval(-t);
        total += term;
        if t > 4.5 {
            break;
        }
        k += 1;
    }
    let mut prev = total * h;
    for _ in 0..8 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > 4.5 {
                break;
            }
            add += eval(t) + eval(-t);
            k += 2;
        }
        total += add;
        let cur = total * h;
        if (cur - prev).abs() <= 1e-14 * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `|S^{k}|` for `k = 0, 1, 2`.
pub fn small_sphere(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => panic!("unsupported sphere S^{k}"),
    }
}

/// `|S^{N−2}| ∫₀^∞ r^{N−2} (1 + r²)^{−(N+sp)/2} dr`, written on `θ = arctan r`.
pub fn potential_oracle(n: usize, sp: f64) -> f64 {
    let nf = n as f64;
    small_sphere(n - 2) * tanh_sinh(|t| t.sin().powf(nf - 2.0) * t.cos().powf(sp), 0.0, 0.5 * PI)
}

/// `∫_{S^{d−1}} |ω₁|^p dω`.
pub fn sphere_moment_oracle(d: usize, p: f64) -> f64 {
    if d == 1 {
        return 2.0;
    }
    let df = d as f64;
    let f = |t: f64| t.cos().abs().powf(p) * t.sin().powf(df - 2.0);
    small_sphere(d - 2) * (tanh_sinh(f, 0.0, 0.5 * PI) + tanh_sinh(f, 0.5 * PI, PI))
}

/// Tensor Gauss-Legendre integral of `g` over `[x0, x1] × [y0, y1]`.
pub fn tensor_2d(g: impl Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), panels: usize) -> f64 {
    let rx = Rule::new(x.0, x.1, panels, 8);
    let ry = Rule::new(y.0, y.1, panels, 8);
    let mut total = 0.0;
    for (xi, wx) in rx.nodes.iter().zip(&rx.weights) {
        for (yi, wy) in ry.nodes.iter().zip(&ry.weights) {
            total += wx * wy * g(*xi, *yi);
        }
    }
    total
}

/// `∫_{R²_+} |Du|^p y^β` for a field supported in the ball `B(c, R)`.
pub fn weighted_gradient_oracle(
    u: &Field,
    center: [f64; 2],
    radius: f64,
    p: f64,
    beta: f64,
) -> f64 {
    let top = center[1] + radius;
    let bottom = (center[1] - radius).max(0.0);
    // Grade the normal axis toward the boundary when the weight is singular there.
    let m = if beta < 0.0 { 4.0 } else { 1.0 };
    let span = top - bottom;
    tensor_2d(
        |x, t| {
            let y = bottom + span * t.powf(m);
            let jac = span * m * t.powf(m - 1.0);
            let g = u.grad_vec(&[x, y]);
            (g[0] * g[0] + g[1] * g[1]).powf(0.5 * p) * y.powf(beta) * jac
        },
        (center[0] - radius, center[0] + radius),
        (0.0, 1.0),
        40,
    )
}

/// The ray `x + r ω` meets the open ball `B(c, R)` for `r` in the returned interval.
fn ray_ball(x: [f64; 2], om: [f64; 2], c: [f64; 2], radius: f64) -> Option<(f64, f64)> {
    let d = [x[0] - c[0], x[1] - c[1]];
    let b = d[0] * om[0] + d[1] * om[1];
    let q = d[0] * d[0] + d[1] * d[1] - radius * radius;
    let disc = b * b - q;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (r0, r1) = ((-b - sq).max(0.0), -b + sq);
    (r1 > r0).then_some((r0, r1))
}

/// Conjunction integral in `N = 2` for `u` supported in `B(c, R)`, computed
/// as an outer integral over the boundary point and polar coordinates in `y`.
pub fn conjunction_oracle(
    v: &Field,
    u: &Field,
    center: [f64; 2],
    radius: f64,
    s: f64,
    p: f64,
) -> f64 {
    let sp = s * p;
    let half = (radius * radius - center[1] * center[1]).max(0.0).sqrt();
    let theta = Rule::new(0.0, PI, 24, 8);
    let radial = Rule::new(0.0, 1.0, 8, 8);
    let inner = |x0: f64| {
        let x = [x0, 0.0];
        let vx = v.eval(&[x0]);
        theta.integrate(|t| {
            let om = [t.cos(), t.sin()];
            let Some((r0, r1)) = ray_ball(x, om, center, radius) else {
                return 0.0;
            };
            // Graded substitution r = r0 + (r1 − r0) τ² near the start of the chord.
            let chord = radial.integrate(|tau| {
                let r = r0 + (r1 - r0) * tau * tau;
                if r == 0.0 {
                    return 0.0;
                }
                let uy = u.eval(&[x[0] + r * om[0], r * om[1]]);
                (vx - uy).abs().powf(p) * r.powf(-1.0 - sp) * 2.0 * tau * (r1 - r0)
            });
            // Before the chord u vanishes, and so does v unless r0 = 0.
            chord + vx.abs().powf(p) * r1.powf(-sp) / sp
        })
    };
    // Boundary points under the support, then the two tails mapped to (0, 1).
    let mid = Rule::new(center[0] - half, center[0] + half, 40, 8).integrate(inner);
    let far = Rule::new(0.0, 1.0, 40, 8);
    let tail = |sign: f64| {
        far.integrate(|t| {
            let off = t / (1.0 - t);
            let x0 = center[0] + sign * (half + off);
            inner(x0) / ((1.0 - t) * (1.0 - t))
        })
    };
    mid + tail(1.0) + tail(-1.0)
}

/// `∬_{R²_+ × R²_+} |u(x) − u(y)|^p / |x − y|^{2+sp}` for `u` supported in `B(c, R)`.
pub fn fractional_halfspace_oracle(
    u: &Field,
    center: [f64; 2],
    radius: f64,
    s: f64,
    p: f64,
) -> f64 {
    let sp = s * p;
    let theta = Rule::new(0.0, 2.0 * PI, 48, 8);
    let radial = Rule::new(0.0, 1.0, 8, 8);
    let m = 4.0;
    let inner = |x: [f64; 2]| {
        let ux = u.eval(&x);
        // Points outside the support are covered by the doubled far term.
        if ux == 0.0 {
            return 0.0;
        }
        theta.integrate(|t| {
            let om = [t.cos(), t.sin()];
            let exit = if om[1] < 0.0 {
                x[1] / -om[1]
            } else {
                f64::INFINITY
            };
            let (_, r1) = ray_ball(x, om, center, radius).unwrap_or((0.0, 0.0));
            let r_in = r1.min(exit);
            let near = radial.integrate(|tau| {
                let r = r_in * tau.powf(m);
                if r == 0.0 {
                    return 0.0;
                }
                let uy = u.eval(&[x[0] + r * om[0], x[1] + r * om[1]]);
                (ux - uy).abs().powf(p) * r.powf(-1.0 - sp) * m * tau.powf(m - 1.0) * r_in
            });
            let far = if exit > r_in {
                2.0 * ux.abs().powf(p) * (r_in.powf(-sp) - exit.powf(-sp)) / sp
            } else {
                0.0
            };
            near + far
        })
    };
    let lo = (center[1] - radius).max(0.0);
    tensor_2d(
        |a, b| inner([a, b]),
        (center[0] - radius, center[0] + radius),
        (lo, center[1] + radius),
        10,
    )
}

/// `∬_{R × R} |h(x) − h(y)|² / |x − y|²` for the hat `h(x) = max(0, 1 − |x|)`.
pub fn hat_gagliardo_half_order() -> f64 {
    let h = |x: f64| (1.0 - x.abs()).max(0.0);
    let piece = |a: f64, b: f64, x: f64| {
        if b <= a {
            return 0.0;
        }
        Rule::new(a, b, 4, 16).integrate(|y| {
            let d = x - y;
            if d == 0.0 {
                0.0
            } else {
                (h(x) - h(y)).powi(2) / (d * d)
            }
        })
    };
    let inner = |x: f64| {
        let mut cuts = [-1.0, 0.0, 1.0, x];
        cuts.sort_by(f64::total_cmp);
        let within: f64 = cuts.windows(2).map(|w| piece(w[0], w[1], x)).sum();
        within + h(x).powi(2) * (1.0 / (1.0 - x) + 1.0 / (1.0 + x))
    };
    let core = Rule::new(-1.0, 0.0, 32, 16).integrate(inner)
        + Rule::new(0.0, 1.0, 32, 16).integrate(inner);
    let outside = 2.0 * Rule::new(-1.0, 1.0, 32, 16).integrate(|y| h(y).powi(2) / (1.0 - y));
    core + outside
}
