use conductor_core::rewards::{eval_reward, final_reward, normalize_batch};
use conductor_core::RawMetricVector;
use proptest::prelude::*;

fn batch_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..6, 2usize..10).prop_flat_map(|(dim, n)| prop::collection::vec(prop::collection::vec(-50.0f64..50.0, dim), n))
}

fn raw(batch: &[Vec<f64>]) -> Vec<RawMetricVector> {
    batch.iter().cloned().map(RawMetricVector).collect()
}

proptest! {
    #[test]
    fn normalization_ignores_positive_affine_maps(batch in batch_strategy(), scale in 0.5f64..20.0, shift in -100.0f64..100.0) {
        let a = normalize_batch(&raw(&batch)).unwrap();
        let moved: Vec<Vec<f64>> = batch.iter().map(|v| v.iter().map(|x| x * scale + shift).collect()).collect();
        let b = normalize_batch(&raw(&moved)).unwrap();
        for (x, y) in a.vectors.iter().flatten().zip(b.vectors.iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn normalized_values_lie_in_unit_interval(batch in batch_strategy()) {
        let a = normalize_batch(&raw(&batch)).unwrap();
        prop_assert!(a.vectors.iter().flatten().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn constant_coordinate_normalizes_to_zero(mut batch in batch_strategy(), c in -10.0f64..10.0) {
        for v in &mut batch {
            v[0] = c;
        }
        let a = normalize_batch(&raw(&batch)).unwrap();
        prop_assert!(a.vectors.iter().all(|v| v[0] == 0.0));
    }

    #[test]
    fn reward_is_linear_in_preference(v in prop::collection::vec(0.0f64..1.0, 6), p in prop::collection::vec(0.0f64..1.0, 6), k in 0.0f64..5.0) {
        let scaled: Vec<f64> = p.iter().map(|x| x * k).collect();
        let r = final_reward(&v, &p, true).unwrap();
        let rk = final_reward(&v, &scaled, true).unwrap();
        prop_assert!((rk - k * r).abs() < 1e-9);
        prop_assert_eq!(final_reward(&v, &p, false).unwrap(), 0.0);
    }

    #[test]
    fn cheaper_runs_never_score_lower(base in prop::collection::vec(0.0f64..20.0, 6), cost in 0.0f64..5.0, cut in 0.0f64..1.0) {
        let mut p = vec![0.0; 6];
        p[4] = 1.0;
        let mut expensive = base.clone();
        expensive[4] = cost;
        let mut cheap = base.clone();
        cheap[4] = cost * cut;
        let hi = eval_reward(&cheap, &base, &p, true).unwrap();
        let lo = eval_reward(&expensive, &base, &p, true).unwrap();
        prop_assert!(hi >= lo);
    }
}
