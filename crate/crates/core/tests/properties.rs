use cdiscord::channels::apply_to_b;
use cdiscord::sampling::{random_channel, random_joint};
use cdiscord::zero_discord::fixed_point_residual;
use cdiscord::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn joint_strategy() -> impl Strategy<Value = JointDistribution> {
    (1usize..5, 1usize..5).prop_flat_map(|(da, db)| {
        prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0], da * db)
            .prop_filter("needs mass", |v| v.iter().sum::<f64>() > 1e-3)
            .prop_map(move |v| {
                let s: f64 = v.iter().sum();
                JointDistribution::new(DMatrix::from_row_slice(da, db, &v).map(|x| x / s)).unwrap()
            })
    })
}

fn joint_and_channel() -> impl Strategy<Value = (JointDistribution, StochasticChannel, StochasticChannel)> {
    (joint_strategy(), any::<u64>()).prop_map(|(p, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = p.dim_b();
        (p, random_channel(&mut rng, d), random_channel(&mut rng, d))
    })
}

/// `H(A|B)` as the sum over `b` of `p(b) H(A | B = b)`.
fn conditional_entropy_expanded(p: &JointDistribution) -> f64 {
    let pb = p.marginal_b();
    let mut h = 0.0;
    for (j, &w) in pb.iter().enumerate() {
        if w > 0.0 {
            for i in 0..p.dim_a() {
                let c = p.get(i, j) / w;
                if c > 0.0 {
                    h -= w * c * c.log2();
                }
            }
        }
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conditional_entropy_forms_agree(p in joint_strategy()) {
        let h = p.conditional_entropy_a_given_b().value();
        prop_assert!((h - conditional_entropy_expanded(&p)).abs() <= 1e-10);
        prop_assert!(h >= -1e-10);
        prop_assert!(h <= (p.dim_a() as f64).log2() + 1e-10);
        let hb = p.conditional_entropy_b_given_a().value();
        prop_assert!((hb - conditional_entropy_expanded(&p.transpose())).abs() <= 1e-10);
    }

    #[test]
    fn mutual_information_identities(p in joint_strategy()) {
        let i = p.mutual_information().value();
        let ha = p.entropy_a().value();
        let hb = p.entropy_b().value();
        prop_assert!((i - (ha - p.conditional_entropy_a_given_b().value())).abs() <= 1e-10);
        prop_assert!((i - (hb - p.conditional_entropy_b_given_a().value())).abs() <= 1e-10);
        prop_assert!(i >= -1e-9);
        prop_assert!(i <= ha.min(hb) + 1e-9);
    }

    #[test]
    fn product_states_have_no_information(
        a in prop::collection::vec(0.01f64..1.0, 1..5),
        b in prop::collection::vec(0.01f64..1.0, 1..5),
    ) {
        let sa: f64 = a.iter().sum();
        let sb: f64 = b.iter().sum();
        let a: Vec<f64> = a.iter().map(|x| x / sa).collect();
        let b: Vec<f64> = b.iter().map(|x| x / sb).collect();
        let p = JointDistribution::product(&a, &b).unwrap();
        prop_assert!(p.mutual_information().value().abs() <= 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(a.len() as u64 * 31 + b.len() as u64);
        let m = random_channel(&mut rng, b.len());
        prop_assert!(classical_discord(&p, &m).unwrap().discord.value().abs() <= 1e-10);
    }

    #[test]
    fn purity_agrees_with_entropies(p in joint_strategy()) {
        let structural = is_conditionally_pure(&p, 0.0).conditionally_pure;
        let entropic = p.conditional_entropy_a_given_b().value().abs() <= 1e-12
            && p.conditional_entropy_b_given_a().value().abs() <= 1e-12;
        prop_assert_eq!(structural, entropic);
    }

    #[test]
    fn noise_on_b_keeps_a_and_composes((p, m1, m2) in joint_and_channel()) {
        let once = apply_to_b(&p, &m1).unwrap();
        for (x, y) in once.marginal_a().iter().zip(p.marginal_a()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        let twice = apply_to_b(&once, &m2).unwrap();
        let composed = apply_to_b(&p, &m2.after(&m1).unwrap()).unwrap();
        prop_assert!(twice.max_abs_diff(&composed) <= 1e-12);
        prop_assert!(m2.after(&m1).unwrap().column_sum_error() <= 1e-12);
        prop_assert!(m1.tensor(&m2).column_sum_error() <= 1e-12);
    }

    #[test]
    fn data_processing((p, m, _) in joint_and_channel()) {
        let r = classical_discord(&p, &m).unwrap();
        prop_assert!(r.measured.value() <= r.mutual_information.value() + 1e-9);
        prop_assert!(r.discord.value() >= -1e-9);
        prop_assert!((r.discord.value() - (r.mutual_information.value() - r.measured.value())).abs() <= 1e-12);
    }

    #[test]
    fn fixed_point_forms_agree((p, m, _) in joint_and_channel()) {
        let direct = is_zero_discord(&p, &m, 1e-10).unwrap();
        let flattened = fixed_point_residual(&p, &m).unwrap() <= 1e-10;
        prop_assert_eq!(direct, flattened);
    }

    #[test]
    fn unvec_inverts_vec(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(rows, cols, |_, _| rand::Rng::random_range(&mut rng, -5.0..5.0));
        prop_assert_eq!(unvec(&vec(&m), rows, cols).unwrap(), m.clone());
        let back = cdiscord::reshape::unvec_rows(&vec_rows(&m), rows, cols).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn joint_json_round_trip(p in joint_strategy()) {
        let s = cdiscord::json::to_string(&p).unwrap();
        let back: JointDistribution = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn zero_discord_states_are_fixed_points_of_flattened_channel() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for d in [2, 3, 4] {
        for _ in 0..50 {
            let m = random_channel(&mut rng, d);
            let family = stationary_family(&m).unwrap();
            let weights: Vec<Vec<f64>> = {
                let w = cdiscord::sampling::simplex_point(&mut rng, 3 * family.rank());
                w.chunks(family.rank()).map(<[f64]>::to_vec).collect()
            };
            let p = make_zero_discord_state(&family, &weights).unwrap();
            assert!(fixed_point_residual(&p, &m).unwrap() <= 1e-10);
            let big = kron(&DMatrix::identity(3, 3), m.matrix());
            let v: DVector<f64> = vec_rows(p.probs());
            assert!((&big * &v - &v).amax() <= 1e-10);
            // generic states are not fixed points
            let q = random_joint(&mut rng, 3, d);
            assert!(fixed_point_residual(&q, &m).unwrap() > 1e-10);
        }
    }
}
