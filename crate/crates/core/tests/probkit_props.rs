use proptest::prelude::*;
use selcov::probkit::{
    entropy, kl_divergence, log_det_scaled, tv_distance, FiniteDistribution, SymmetricMatrix,
};

fn weights(len: usize, min: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(min..1.0f64, len)
}

fn normalized(w: &[f64]) -> FiniteDistribution {
    let total: f64 = w.iter().sum();
    FiniteDistribution::from_probs(w.iter().map(|x| x / total).collect()).unwrap()
}

fn psd_2x2() -> impl Strategy<Value = SymmetricMatrix> {
    (prop::array::uniform4(-3.0..3.0f64)).prop_map(|[a, b, c, d]| {
        // B Bᵀ for B = [[a, b], [c, d]].
        SymmetricMatrix::new(vec![
            vec![a * a + b * b, a * c + b * d],
            vec![a * c + b * d, c * c + d * d],
        ])
        .unwrap()
    })
}

fn psd(max_dim: usize) -> impl Strategy<Value = SymmetricMatrix> {
    (1..=max_dim)
        .prop_flat_map(|q| prop::collection::vec(-2.0..2.0f64, q * q).prop_map(move |b| (q, b)))
        .prop_map(|(q, b)| {
            let mut m = vec![vec![0.0; q]; q];
            for i in 0..q {
                for j in 0..q {
                    m[i][j] = (0..q).map(|k| b[i * q + k] * b[j * q + k]).sum();
                }
            }
            for i in 0..q {
                for j in 0..i {
                    m[i][j] = m[j][i];
                }
            }
            SymmetricMatrix::new(m).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tv_is_a_metric(
        (a, b, c) in (1usize..8).prop_flat_map(|k| (weights(k, 1e-9), weights(k, 1e-9), weights(k, 1e-9)))
    ) {
        let (p, q, r) = (normalized(&a), normalized(&b), normalized(&c));
        let pq = tv_distance(&p, &q).unwrap();
        prop_assert_eq!(pq, tv_distance(&q, &p).unwrap());
        prop_assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        prop_assert!((0.0..=1.0).contains(&pq));
        let pr = tv_distance(&p, &r).unwrap();
        let rq = tv_distance(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + 1e-15);
        if pq == 0.0 {
            for (x, y) in p.probs().iter().zip(q.probs()) {
                prop_assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pinsker_on_full_support_pairs((a, b) in (1usize..10).prop_flat_map(|k| (weights(k, 0.01), weights(k, 0.01)))) {
        let p = normalized(&a);
        let q = normalized(&b);
        let tv = tv_distance(&p, &q).unwrap();
        let kl = kl_divergence(&p, &q).unwrap();
        prop_assert!(kl >= 0.0);
        prop_assert!(tv <= (kl / 2.0).sqrt() + 1e-12);
    }

    #[test]
    fn entropy_range_and_permutation(w in prop::collection::vec(0.0..1.0f64, 1..12), shift in 0usize..12) {
        prop_assume!(w.iter().sum::<f64>() > 0.0);
        let p = normalized(&w);
        let h = entropy(&p);
        let k = w.len();
        prop_assert!(h >= 0.0 && h <= (k as f64).ln());
        // Reference value -Σ p log p, written out directly.
        let direct: f64 = -p.probs().iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>();
        prop_assert!((h - direct).abs() < 1e-12);
        let mut rotated = w.clone();
        rotated.rotate_left(shift % k);
        prop_assert!((entropy(&normalized(&rotated)) - h).abs() < 1e-12);
    }

    #[test]
    fn log_det_matches_2x2_eigenvalues(sigma in psd_2x2(), tau in 0.05..10.0f64) {
        let (a, b, c) = (sigma.get(0, 0), sigma.get(0, 1), sigma.get(1, 1));
        let mean = 0.5 * (a + c);
        let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let (l1, l2) = ((mean + radius).max(0.0), (mean - radius).max(0.0));
        let t2 = tau * tau;
        let want = (l1 / t2).ln_1p() + (l2 / t2).ln_1p();
        let got = log_det_scaled(&sigma, tau).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * want.max(1.0), "got {got}, want {want}");
    }

    #[test]
    fn log_det_nonincreasing_in_tau(sigma in psd(6)) {
        let taus = [0.05, 0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 20.0, 100.0];
        let values: Vec<f64> = taus.iter().map(|&t| log_det_scaled(&sigma, t).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        prop_assert!(values.iter().all(|&v| v >= 0.0));
    }
}
