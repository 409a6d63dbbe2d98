use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    /// Requested relative accuracy.
    pub tol: f64,
    /// Declared behaviour `g(r) ~ (r − a)^α` at the lower end, `α > −1`.
    pub alpha_lo: Option<f64>,
    /// Declared behaviour `g(r) ~ (b − r)^α` at a finite upper end.
    pub alpha_hi: Option<f64>,
    pub max_depth: u32,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            tol: 1e-10,
            alpha_lo: None,
            alpha_hi: None,
            max_depth: 60,
        }
    }
}

impl RadialOptions {
    pub fn with_tol(tol: f64) -> Self {
        RadialOptions {
            tol,
            ..RadialOptions::default()
        }
    }

    pub fn singular_lo(mut self, alpha: f64) -> Self {
        self.alpha_lo = Some(alpha);
        self
    }

    pub fn singular_hi(mut self, alpha: f64) -> Self {
        self.alpha_hi = Some(alpha);
        self
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

/// Globally adaptive Gauss-Kronrod (7, 15) on a finite interval.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<(f64, f64)> {
    let (value, error) = kronrod(f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    }];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Accuracy {
                message: "integrand produced a non-finite value".into(),
                estimate: total,
                error: err,
            });
        }
        if err <= tol * total.abs() || err <= f64::MIN_POSITIVE {
            return Ok((total, err));
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        if seg.depth >= max_depth || segments.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy {
                message: format!("no convergence after subdivision depth {}", seg.depth),
                estimate: total,
                error: err,
            });
        }
        let mid = 0.5 * (seg.a + seg.b);
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let (value, error) = kronrod(f, lo, hi);
            segments.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
                depth: seg.depth + 1,
            });
        }
    }
}

fn finite_with_singularities<F: Fn(f64) -> f64>(
    g: &F,
    a: f64,
    b: f64,
    alpha_lo: Option<f64>,
    alpha_hi: Option<f64>,
    opts: &RadialOptions,
) -> Result<f64> {
    for alpha in [alpha_lo, alpha_hi].into_iter().flatten() {
        if !(alpha > -1.0) {
            return Err(Error::NonIntegrable(format!(
                "endpoint exponent {alpha} is not integrable"
            )));
        }
    }
    if alpha_lo.is_none() && alpha_hi.is_none() {
        return Ok(adaptive(g, a, b, opts.tol, opts.max_depth)?.0);
    }
    // Split at the midpoint and remove each declared power by r − a = (m − a)·t^k.
    let m = 0.5 * (a + b);
    let mut total = 0.0;
    match alpha_lo {
        Some(alpha) => {
            let k = 1.0 / (alpha + 1.0);
            let w = m - a;
            let h = |t: f64| g(a + w * t.powf(k)) * w * k * t.powf(k - 1.0);
            total += adaptive(&h, 0.0, 1.0, opts.tol, opts.max_depth)?.0;
        }
        None => total += adaptive(g, a, m, opts.tol, opts.max_depth)?.0,
    }
    match alpha_hi {
        Some(alpha) => {
            let k = 1.0 / (alpha + 1.0);
            let w = b - m;
            let h = |t: f64| g(b - w * t.powf(k)) * w * k * t.powf(k - 1.0);
            total += adaptive(&h, 0.0, 1.0, opts.tol, opts.max_depth)?.0;
        }
        None => total += adaptive(g, m, b, opts.tol, opts.max_depth)?.0,
    }
    Ok(total)
}

/// `∫_a^b g(r) dr` by adaptive Gauss-Kronrod.
///
/// `b` may be `+∞`, handled by `r = a + t/(1 − t)`. Power singularities at the
/// ends must be declared in `opts`; they are removed by a substitution before
/// the adaptive rule runs.
pub fn radial_quadrature<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    opts: RadialOptions,
) -> Result<f64> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter("radial quadrature needs tol > 0".into()));
    }
    if a.is_nan() || b.is_nan() || !a.is_finite() || b < a {
        return Err(Error::Parameter(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if b == f64::INFINITY {
        let h = |t: f64| {
            let u = 1.0 - t;
            g(a + t / u) / (u * u)
        };
        return finite_with_singularities(&h, 0.0, 1.0, opts.alpha_lo, None, &opts);
    }
    finite_with_singularities(&g, a, b, opts.alpha_lo, opts.alpha_hi, &opts)
}
