use proptest::prelude::*;
use trace_conjunction_core::fields::{
    make_field, offset_boundary, Domain, Field, FieldSpec, MAX_DIM,
};
use trace_conjunction_core::quad::{EnergyEstimate, Method, QuadSpec};
use trace_conjunction_core::specfun::{gagliardo_control_ball_form, log_gamma, sphere_moment};
use trace_conjunction_core::theorems::{linear_fit, margin, ratio, xi_diagnostics};
use trace_conjunction_core::{paper_constant, ConstantKind, Params};

fn corpus_field(kind: usize, n: usize) -> Field {
    make_field(&FieldSpec::default_corpus()[kind], n).unwrap()
}

fn point(n: usize, coords: &[f64]) -> Vec<f64> {
    let mut x = coords[..n].to_vec();
    x[n - 1] = x[n - 1].abs();
    x
}

fn params() -> impl Strategy<Value = Params> {
    (2usize..=5, 0.05f64..0.95, 1.0f64..4.0).prop_map(|(n, s, p)| Params::new(n, s, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn log_gamma_recurrence(x in 0.01f64..50.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn gagliardo_control_forms_agree(params in params()) {
        let a = paper_constant(ConstantKind::GagliardoControl, &params).unwrap();
        let b = gagliardo_control_ball_form(&params);
        prop_assert!(((a - b) / b).abs() < 1e-12);
    }

    #[test]
    fn sphere_moment_recurrence(d in 1usize..8, p in 0.5f64..5.0) {
        // ∫|ω₁|^{p+2} = ∫|ω₁|^p · (p+1)/(d+p).
        let a = sphere_moment(d, p + 2.0).unwrap();
        let b = sphere_moment(d, p).unwrap() * (p + 1.0) / (d as f64 + p);
        prop_assert!(((a - b) / b).abs() < 1e-12);
    }

    #[test]
    fn constants_are_positive_and_finite(params in params()) {
        for kind in ConstantKind::ALL {
            if let Ok(c) = paper_constant(kind, &params) {
                prop_assert!(c.is_finite() && c > 0.0, "{kind}: {c}");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences(
        kind in 0usize..3,
        n in 2usize..=4,
        coords in prop::collection::vec(-1.2f64..1.2, 4),
    ) {
        let u = corpus_field(kind, n);
        let x = point(n, &coords);
        let h = 1e-6;
        let g = u.grad_vec(&x);
        let mut y = x.clone();
        for i in 0..n {
            y[i] = x[i] + h;
            let up = u.eval(&y);
            y[i] = x[i] - h;
            let down = u.eval(&y);
            y[i] = x[i];
            let fd = (up - down) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "axis {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn gradient_and_support_bounds_hold(
        kind in 0usize..3,
        n in 2usize..=4,
        coords in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let u = corpus_field(kind, n);
        let x = point(n, &coords);
        let g = u.grad_vec(&x);
        let norm = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!(norm <= u.grad_bound * (1.0 + 1e-12));
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r >= u.support_radius {
            prop_assert_eq!(u.eval(&x), 0.0);
        }
    }

    #[test]
    fn trace_is_restriction(kind in 0usize..3, a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let u = corpus_field(kind, 3);
        let v = u.trace().unwrap();
        prop_assert_eq!(v.eval(&[a, b]), u.eval(&[a, b, 0.0]));
    }

    #[test]
    fn zero_offset_is_identity(a in -2.0f64..2.0) {
        let v = corpus_field(0, 2).trace().unwrap();
        let window = Field::bump(1, Domain::Flat, vec![0.0], 0.5, 1.0).unwrap();
        let same = offset_boundary(&v, 0.0, &window).unwrap();
        prop_assert_eq!(same.eval(&[a]), v.eval(&[a]));
        let zero = Field::zero(1, Domain::Flat);
        let bumped = offset_boundary(&zero, 1.0, &window).unwrap();
        prop_assert_eq!(bumped.eval(&[a]), window.eval(&[a]));
    }

    #[test]
    fn xi_bound_and_radial_identity(params in params(), coords in prop::collection::vec(-3.0f64..3.0, 5), h in 0.01f64..3.0) {
        let mut x = coords[..params.n].to_vec();
        x[params.n - 1] = h;
        let report = xi_diagnostics(&params, &[x.clone()], 1e-6).unwrap();
        if params.sp() <= params.nf() {
            prop_assert!(report.norm_bound_applies);
            prop_assert!(report.max_norm_excess <= 1e-12);
        } else {
            // Sharp factor max(1, N/(sp)) = 1 when sp > N.
            let q = &report.points[0];
            prop_assert!(q.norm <= q.norm_bound * params.sp() / params.nf() * (1.0 + 1e-12));
        }
        prop_assert!(report.max_dot_rel_err <= 1e-12);
    }

    #[test]
    fn ratio_and_margin_are_nonnegative(l in 0.0f64..10.0, r in 0.0f64..10.0, c in 0.1f64..100.0, sl in 0.0f64..1.0, sr in 0.0f64..1.0) {
        prop_assert!(ratio(l, c, r) >= 0.0);
        let est = |v: f64, s: f64| EnergyEstimate { value: v, stderr: s, samples_used: 1, method: Method::McUniform, bias_bound: 0.0 };
        prop_assert!(margin(&est(l, sl), &est(r, sr)) >= 0.0);
    }

    #[test]
    fn linear_fit_recovers_lines(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let xs = [0.02, 0.04, 0.06, 0.08, 0.1];
        let ys: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
        let (fa, fb) = linear_fit(&xs, &ys);
        prop_assert!((fa - a).abs() < 1e-9 && (fb - b).abs() < 1e-7);
    }

    #[test]
    fn quad_spec_round_trips(samples in 1000usize..100_000, strata in 1usize..64, seed in any::<u64>()) {
        let spec = QuadSpec { samples, strata, seed, ..QuadSpec::default() };
        let back: QuadSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn max_dim_is_enforced() {
    let center = vec![0.0; MAX_DIM + 1];
    assert!(Field::bump(MAX_DIM + 1, Domain::Flat, center, 1.0, 1.0).is_err());
}
