use proptest::prelude::*;
use wembed::WeightedEmbedding;

fn embeddings() -> impl Strategy<Value = WeightedEmbedding> {
    (1usize..6, 2usize..12).prop_flat_map(|(dim, n)| {
        (
            prop::collection::vec(-50.0f64..50.0, n * dim),
            prop::collection::vec(0.05f64..100.0, n),
        )
            .prop_map(move |(p, w)| WeightedEmbedding::new(dim, p, w).unwrap())
    })
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn distance_is_symmetric(e in embeddings()) {
        for u in 0..e.node_count() {
            for v in 0..e.node_count() {
                prop_assert_eq!(e.weighted_distance(u, v), e.weighted_distance(v, u));
            }
        }
    }

    #[test]
    fn distance_is_positively_homogeneous(e in embeddings(), s in 0.001f64..1000.0) {
        let scaled = e.scaled(s);
        for u in 0..e.node_count() {
            for v in u + 1..e.node_count() {
                let a = scaled.weighted_distance(u, v);
                let b = s * e.weighted_distance(u, v);
                prop_assert!((a - b).abs() <= 1e-12 * b.max(f64::MIN_POSITIVE), "{} vs {}", a, b);
            }
        }
        // powers of two scale without rounding
        let exact = e.scaled(8.0);
        for u in 1..e.node_count() {
            prop_assert_eq!(exact.weighted_distance(0, u), 8.0 * e.weighted_distance(0, u));
        }
    }

    #[test]
    fn unit_weights_give_euclidean_distance(e in embeddings()) {
        let unit = WeightedEmbedding::new(e.dim(), e.positions().to_vec(), vec![1.0; e.node_count()]).unwrap();
        for u in 0..e.node_count() {
            for v in 0..e.node_count() {
                prop_assert_eq!(unit.weighted_distance(u, v), euclid(unit.position(u), unit.position(v)));
            }
        }
    }

    #[test]
    fn heavier_node_is_closer(e in embeddings(), factor in 1.01f64..10.0) {
        let mut weights = e.weights().to_vec();
        weights[0] *= factor;
        let heavier = WeightedEmbedding::new(e.dim(), e.positions().to_vec(), weights).unwrap();
        for v in 1..e.node_count() {
            if e.euclidean_distance(0, v) > 0.0 {
                prop_assert!(heavier.weighted_distance(0, v) < e.weighted_distance(0, v));
            }
        }
    }
}
