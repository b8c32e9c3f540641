mod common;

use amgkit::amg::{
    approx_max_weight_matching, build_hierarchy, build_weight_graph, AggregationConfig, AggregationKind,
};
use amgkit::sparse::{CsrMatrix, SparseMatrix};
use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn config(kind: u8, sweeps: usize, smooth: bool) -> AggregationConfig {
    let base = if kind == 0 {
        AggregationConfig::vmb(0.05)
    } else {
        AggregationConfig::matching(sweeps)
    };
    AggregationConfig {
        smooth_prolongator: smooth,
        coarse_size_target: 4,
        ..base
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coarse_levels_are_galerkin_and_spd(seed in any::<u64>(), n in 10usize..70, kind in 0u8..2, sweeps in 1usize..4, smooth in any::<bool>()) {
        let mut r = rng(seed);
        let a = random_sparse_spd(&mut r, n);
        let h = build_hierarchy(&SparseMatrix::new(a), &config(kind, sweeps, smooth)).unwrap();
        prop_assert!(h.operator_complexity() >= 1.0);
        for l in 0..h.n_levels() {
            let al = dense(&h.level(l).matrix().to_csr());
            prop_assert!(SymmetricEigen::new(al.clone()).eigenvalues.min() > 0.0);
            if let Some(p) = h.level(l).prolongator() {
                let pd = dense(p.matrix());
                let want: DMatrix<f64> = pd.transpose() * &al * &pd;
                let got = dense(&h.level(l + 1).matrix().to_csr());
                prop_assert!((&got - &want).amax() <= 1e-12 * want.amax());
                prop_assert_eq!(p.is_smoothed(), smooth);
                prop_assert!(h.level(l + 1).size() < h.level(l).size());
            }
        }
    }

    #[test]
    fn matching_aggregates_are_bounded(seed in any::<u64>(), n in 8usize..80, sweeps in 1usize..4) {
        let mut r = rng(seed);
        let a = random_sparse_spd(&mut r, n);
        let h = build_hierarchy(&SparseMatrix::new(a), &config(1, sweeps, false)).unwrap();
        for lv in &h.levels()[..h.n_levels() - 1] {
            let agg = lv.aggregation().unwrap();
            prop_assert!(agg.max_aggregate_size() <= 1 << sweeps);
            prop_assert_eq!(agg.aggregate_sizes().iter().sum::<usize>(), agg.n_fine());
            let p_hat = lv.prolongator().unwrap().tentative();
            let ptp = p_hat.transpose().matmul(p_hat).unwrap();
            let off = ptp.add_scaled(1.0, &CsrMatrix::identity(ptp.n_rows()), -1.0).unwrap();
            prop_assert!(max_abs(off.values()) <= 1e-14);
        }
    }

    #[test]
    fn greedy_matching_is_half_optimal(seed in any::<u64>(), n in 2usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let m = approx_max_weight_matching(&g);
        let mut seen = vec![false; n];
        let mut total = 0.0;
        for (u, v) in m {
            prop_assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
            total += g.weight(u, v).unwrap();
        }
        prop_assert!(total >= 0.5 * brute_force_matching_weight(&g) - 1e-12);
    }
}

#[test]
fn weight_graph_is_symmetric_in_its_arguments() {
    let mut r = rng(11);
    let a = random_sparse_spd(&mut r, 30);
    let w = vec![1.0; 30];
    let g = build_weight_graph(&a, &w);
    for e in g.edges() {
        assert_eq!(g.weight(e.u, e.v), g.weight(e.v, e.u));
    }
}

#[test]
fn hierarchy_is_deterministic() {
    let mut r = rng(12);
    let a = SparseMatrix::new(random_sparse_spd(&mut r, 60));
    for kind in [AggregationKind::Vmb, AggregationKind::Matching] {
        let cfg = AggregationConfig {
            kind,
            coarse_size_target: 4,
            ..AggregationConfig::default()
        };
        let h1 = build_hierarchy(&a, &cfg).unwrap();
        let h2 = build_hierarchy(&a, &cfg).unwrap();
        assert_eq!(h1.level_sizes(), h2.level_sizes());
        for l in 0..h1.n_levels() {
            assert_eq!(*h1.level(l).matrix().to_csr(), *h2.level(l).matrix().to_csr());
        }
    }
}
