use minirat::{
    eval_d2, eval_d2_oracle, eval_d2_weights, filter_nodes, gradient, lawson_update,
    weighted_arnoldi, Complex, SampleSet, SimplexWeights,
};
use proptest::prelude::*;

type C64 = Complex<f64>;

fn disc_point() -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r.sqrt(), t))
}

/// Random samples in the unit disc, random complex data, interior weights.
fn instance(max_m: usize) -> impl Strategy<Value = (SampleSet, SimplexWeights, usize, usize)> {
    (0usize..=3, 0usize..=3).prop_flat_map(move |(n1, n2)| {
        let lo = n1 + n2 + 2;
        (lo..=max_m).prop_flat_map(move |m| {
            (
                prop::collection::vec(disc_point(), m),
                prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m),
                prop::collection::vec(0.05..1.0f64, m),
            )
                .prop_filter_map("distinct nodes", move |(x, f, w)| {
                    let f = f.into_iter().map(|(a, b)| C64::new(a, b)).collect();
                    let s = SampleSet::new(x, f).ok()?;
                    Some((s, SimplexWeights::from_unnormalized(w).unwrap(), n1, n2))
                })
        })
    })
}

fn simplex(m: usize) -> impl Strategy<Value = SimplexWeights> {
    prop::collection::vec(0.0..1.0f64, m)
        .prop_filter_map("nonzero", |w| SimplexWeights::from_unnormalized(w).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_duality((s, w, n1, n2) in instance(30)) {
        let ev = eval_d2(&s, &w, n1, n2).unwrap();
        prop_assert!(ev.sqrt_d2() <= ev.max_err() * (1.0 + 1e-10));
    }

    #[test]
    fn normalization((s, w, n1, n2) in instance(30)) {
        let ev = eval_d2(&s, &w, n1, n2).unwrap();
        prop_assert!((ev.hat_b.norm() - 1.0).abs() <= 1e-12);
        let c: f64 = w.weights().iter().zip(&ev.q_vals).map(|(a, q)| a * q.norm_sqr()).sum();
        prop_assert!((c - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn scale_invariance((s, w, n1, n2) in instance(30), tau in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let d = eval_d2(&s, &w, n1, n2).unwrap().d2;
        let scaled: Vec<f64> = w.weights().iter().map(|v| v * tau).collect();
        let ds = eval_d2_weights(&s, &scaled, n1, n2).unwrap().d2;
        prop_assert!((d - ds).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn matches_oracle((s, w, n1, n2) in instance(40)) {
        let d = eval_d2(&s, &w, n1, n2).unwrap().d2;
        let o = eval_d2_oracle(&s, &w, n1, n2).unwrap().d2;
        prop_assert!((d - o).abs() <= 1e-10 * d.max(1.0), "{} vs {}", d, o);
    }

    #[test]
    fn euler_identity((s, w, n1, n2) in instance(30)) {
        let ev = eval_d2(&s, &w, n1, n2).unwrap();
        let g = gradient(&ev, &w).unwrap();
        let e: f64 = g.values.iter().zip(w.weights()).map(|(a, b)| a * b).sum();
        prop_assert!(e.abs() <= 1e-12 * ev.d2.max(1.0));
    }

    /// No feasible pair beats the recovered one.
    #[test]
    fn recovered_pair_is_optimal(
        (s, w, n1, n2) in instance(20),
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 12),
    ) {
        let ev = eval_d2(&s, &w, n1, n2).unwrap();
        let x = s.x();
        let poly = |c: &[(f64, f64)], z: C64| {
            c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &(a, b)| acc * z + C64::new(a, b))
        };
        let (ca, cb) = coeffs.split_at(6);
        let p: Vec<C64> = x.iter().map(|&z| poly(&ca[..=n1], z)).collect();
        let q: Vec<C64> = x.iter().map(|&z| poly(&cb[..=n2], z)).collect();
        let norm: f64 = w.weights().iter().zip(&q).map(|(a, v)| a * v.norm_sqr()).sum();
        prop_assume!(norm > 1e-8);
        let obj: f64 = (0..s.len())
            .map(|j| w.weights()[j] * (s.f()[j] * q[j] - p[j]).norm_sqr())
            .sum::<f64>() / norm;
        prop_assert!(obj >= ev.d2 - 1e-10);
    }

    #[test]
    fn lawson_update_stays_on_simplex(
        w in simplex(12),
        r in prop::collection::vec(0.0..10.0f64, 12),
        beta in 0.01..=1.0f64,
    ) {
        let u = lawson_update(&w, &r, beta);
        prop_assert!(u.weights.simplex_defect() <= 1e-14);
        for j in 0..12 {
            prop_assert!(u.weights.weights()[j] >= 0.0);
            if w.weights()[j] == 0.0 {
                prop_assert_eq!(u.weights.weights()[j], 0.0);
            }
        }
    }

    #[test]
    fn filter_stays_on_simplex(w in simplex(12), eps in 0.0..0.2f64, floor in 0usize..12) {
        let f = filter_nodes(&w, eps, floor);
        prop_assert!(f.simplex_defect() <= 1e-14);
        if f != w {
            prop_assert!(f.active().len() >= floor);
            prop_assert!(f.active().iter().all(|&j| w.weights()[j] >= eps));
        }
    }

    #[test]
    fn arnoldi_basis_is_orthonormal_and_replayable(
        x in prop::collection::vec(disc_point(), 8..40),
        n in 0usize..8,
    ) {
        let s: Vec<f64> = (0..x.len()).map(|j| 1.0 + (j % 3) as f64).collect();
        let b = weighted_arnoldi(&x, &s, n).unwrap();
        let q = b.q();
        let gram = q.adjoint() * q;
        let k = b.rank();
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - C64::new(target, 0.0)).norm() <= 1e-12);
            }
        }
        let l = b.reevaluate(&x);
        for r in 0..x.len() {
            for c in 0..k {
                let lhs = l[(r, c)] * s[r] / b.seed_norm();
                prop_assert!((lhs - q[(r, c)]).norm() <= 1e-10 * (1.0 + q[(r, c)].norm()));
            }
        }
    }
}
