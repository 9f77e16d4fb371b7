use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use reqmine::acquisition::{acquisition_scores, eta_normalize, Strategy as Pick};
use reqmine::gp::{GpPosterior, Kernel, Prediction};
use reqmine::stl::{robustness, satisfies, Comparator, Formula, Signal};

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = (prop::bool::ANY, prop::bool::ANY, -3.0..3.0f64).prop_map(|(x, lt, c)| {
        Formula::pred(
            if x { "x" } else { "y" },
            if lt { Comparator::Lt } else { Comparator::Ge },
            c,
        )
    });
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (0..3u32, 1..4u32, inner.clone()).prop_map(|(a, w, p)| Formula::finally(
                a as f64 * 0.5,
                (a + w) as f64 * 0.5,
                p
            )),
            (0..3u32, 1..4u32, inner).prop_map(|(a, w, p)| Formula::globally(
                a as f64 * 0.5,
                (a + w) as f64 * 0.5,
                p
            )),
        ]
    })
}

fn signal() -> impl Strategy<Value = Signal> {
    (
        prop::collection::vec(-4.0..4.0f64, 30),
        prop::collection::vec(-4.0..4.0f64, 30),
    )
        .prop_map(|(x, y)| {
            Signal::from_columns(vec![("x".into(), x), ("y".into(), y)], 0.0, 0.5).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sign_agrees_with_boolean_semantics(phi in formula(), s in signal()) {
        let r = robustness(&s, &phi, 0.0).unwrap();
        if r.abs() > 1e-9 {
            prop_assert_eq!(satisfies(&s, &phi, 0.0).unwrap(), r > 0.0);
        }
    }

    #[test]
    fn negation_flips_robustness(phi in formula(), s in signal()) {
        let r = robustness(&s, &phi, 0.0).unwrap();
        prop_assert_eq!(robustness(&s, &Formula::not(phi), 0.0).unwrap(), -r);
    }

    #[test]
    fn globally_is_dual_of_finally(phi in formula(), s in signal(), a in 0..3u32, w in 1..4u32) {
        let (lo, hi) = (a as f64 * 0.5, (a + w) as f64 * 0.5);
        let g = robustness(&s, &Formula::globally(lo, hi, phi.clone()), 0.0).unwrap();
        let f = robustness(&s, &Formula::not(Formula::finally(lo, hi, Formula::not(phi))), 0.0).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn shifting_the_signal_shifts_the_evaluation(phi in formula(), s in signal()) {
        let at_one = robustness(&s, &phi, 0.5);
        let mut cols = Vec::new();
        for name in ["x", "y"] {
            let ch = s.channel_index(name).unwrap();
            cols.push((name.to_string(), s.channel(ch).skip(1).collect::<Vec<_>>()));
        }
        let shifted = Signal::from_columns(cols, 0.5, 0.5).unwrap();
        prop_assert_eq!(at_one.ok(), robustness(&shifted, &phi, 0.5).ok());
    }
}

fn dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    (1..4usize, 1..20usize).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(prop::collection::vec(0.0..1.0f64, d), n),
            prop::collection::vec(-3.0..3.0f64, n),
            prop::collection::vec(0.0..1.0f64, d),
        )
    })
}

fn dense(kernel: &Kernel, noise: f64, xs: &[Vec<f64>], ys: &[f64], q: &[f64]) -> Prediction {
    let n = xs.len();
    let mut k = DMatrix::from_fn(n, n, |i, j| kernel.eval(&xs[i], &xs[j]).unwrap());
    for i in 0..n {
        k[(i, i)] += noise;
    }
    let inv = k.try_inverse().unwrap();
    let kq = DVector::from_fn(n, |i, _| kernel.eval(&xs[i], q).unwrap());
    let y = DVector::from_column_slice(ys);
    let mean = (kq.transpose() * &inv * y)[0];
    let variance = 1.0 - (kq.transpose() * &inv * &kq)[0];
    Prediction {
        mean,
        variance,
        clipped: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn posterior_variance_never_exceeds_the_prior((xs, ys, q) in dataset(), matern in prop::bool::ANY) {
        let kernel = if matern { Kernel::matern(0.3, 2.5).unwrap() } else { Kernel::gaussian(0.3).unwrap() };
        let gp = GpPosterior::fit(kernel, 0.05, xs, ys).unwrap();
        let p = gp.predict(&q).unwrap();
        prop_assert!(p.variance >= 0.0 && p.variance <= 1.0 + 1e-12);
    }

    #[test]
    fn posterior_matches_dense_inverse((xs, ys, q) in dataset(), matern in prop::bool::ANY) {
        let kernel = if matern { Kernel::matern(0.5, 1.5).unwrap() } else { Kernel::gaussian(0.5).unwrap() };
        let gp = GpPosterior::fit(kernel, 0.1, xs.clone(), ys.clone()).unwrap();
        let p = gp.predict(&q).unwrap();
        let o = dense(&kernel, 0.1, &xs, &ys, &q);
        prop_assert!((p.mean - o.mean).abs() < 1e-8, "{} vs {}", p.mean, o.mean);
        prop_assert!((p.variance - o.variance.max(0.0)).abs() < 1e-8);
    }

    #[test]
    fn incremental_updates_equal_a_batch_fit((xs, ys, q) in dataset()) {
        let kernel = Kernel::matern(0.4, 0.5).unwrap();
        let mut gp = GpPosterior::new(kernel, 0.025).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            gp = gp.update(x, *y).unwrap();
        }
        let batch = GpPosterior::fit(kernel, 0.025, xs, ys).unwrap();
        let (a, b) = (gp.predict(&q).unwrap(), batch.predict(&q).unwrap());
        prop_assert!((a.mean - b.mean).abs() < 1e-9 && (a.variance - b.variance).abs() < 1e-9);
    }

    #[test]
    fn eta_lies_in_unit_interval(means in prop::collection::vec(-1e3..1e3f64, 1..50)) {
        let eta = eta_normalize(&means);
        prop_assert!(eta.iter().all(|e| (0.0..=1.0).contains(e)));
        let top = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (m, e) in means.iter().zip(&eta) {
            if *m == top {
                prop_assert_eq!(*e, 1.0);
            }
        }
    }

    #[test]
    fn adaptive_bonus_is_at_most_the_ucb_bonus(
        stats in prop::collection::vec((-5.0..5.0f64, 0.0..2.0f64), 1..40),
        beta in 0.1..30.0f64,
    ) {
        let preds: Vec<Prediction> =
            stats.iter().map(|&(m, s)| Prediction { mean: m, variance: s * s, clipped: 0.0 }).collect();
        let eta = eta_normalize(&stats.iter().map(|s| s.0).collect::<Vec<_>>());
        let acb = acquisition_scores(Pick::GpAcb, &preds, beta, &eta);
        let ucb = acquisition_scores(Pick::GpUcb, &preds, beta, &eta);
        for (a, u) in acb.iter().zip(&ucb) {
            prop_assert!(*a <= *u + 1e-12);
        }
    }
}
