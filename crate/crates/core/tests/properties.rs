use mixed_cmi::data::{build_dataset, Column, ColumnKind, Dataset, MixedValue, RoleAssignment};
use mixed_cmi::estimators::{
    estimate, estimate_ksg_mi, estimate_mi_proposed, EstimateParams, EstimatorKind,
};
use mixed_cmi::knn::{count_within, knn_radius, mixed_distance, neighbor_profile, batch_profiles, CountMode, SearchStrategy};
use mixed_cmi::numerics::digamma;
use mixed_cmi::simulators::synthetic;
use proptest::prelude::*;

fn mixed() -> impl Strategy<Value = (Dataset, RoleAssignment)> {
    (4usize..60, any::<u64>()).prop_map(|(n, seed)| synthetic::random_mixed(n, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn metric_axioms((ds, _) in mixed(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), c in any::<prop::sample::Index>()) {
        let n = ds.n_rows();
        let (i, j, l) = (a.index(n), b.index(n), c.index(n));
        let dij = mixed_distance(&ds, i, j);
        prop_assert!(dij >= 0.0);
        prop_assert_eq!(dij, mixed_distance(&ds, j, i));
        prop_assert_eq!(mixed_distance(&ds, i, i), 0.0);
        let via = mixed_distance(&ds, i, l) + mixed_distance(&ds, l, j);
        prop_assert!(dij <= via * (1.0 + 1e-15));
    }

    #[test]
    fn counts_are_monotone((ds, roles) in mixed(), row in any::<prop::sample::Index>(), r1 in 0.0f64..1.5, r2 in 0.0f64..1.5) {
        let i = row.index(ds.n_rows());
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for mode in [CountMode::Inclusive, CountMode::Strict] {
            prop_assert!(count_within(&ds, i, lo, mode) <= count_within(&ds, i, hi, mode));
        }
        prop_assert!(count_within(&ds, i, lo, CountMode::Strict) <= count_within(&ds, i, lo, CountMode::Inclusive));
        prop_assert_eq!(count_within(&ds, i, 0.0, CountMode::Strict), 0);
        // projections never increase the max-norm distance
        let joint = count_within(&ds, i, hi, CountMode::Inclusive);
        for cols in [roles.xz(), roles.yz(), roles.x().to_vec()] {
            prop_assert!(count_within(&ds.project(&cols).unwrap(), i, hi, CountMode::Inclusive) >= joint);
        }
    }

    #[test]
    fn radius_is_an_order_statistic((ds, _) in mixed(), row in any::<prop::sample::Index>(), kk in any::<prop::sample::Index>()) {
        let n = ds.n_rows();
        let i = row.index(n);
        let k = 1 + kk.index(n - 1);
        let rho = knn_radius(&ds, i, k).unwrap();
        prop_assert!(count_within(&ds, i, rho, CountMode::Strict) < k);
        prop_assert!(count_within(&ds, i, rho, CountMode::Inclusive) >= k);
        if k == n - 1 {
            let far = (0..n).map(|j| mixed_distance(&ds, i, j)).fold(0.0, f64::max);
            prop_assert_eq!(rho, far);
        }
    }

    #[test]
    fn batch_matches_per_row((ds, roles) in mixed(), kk in any::<prop::sample::Index>()) {
        let k = 1 + kk.index((ds.n_rows() - 1).min(8));
        let batch = batch_profiles(&ds, &roles, k, SearchStrategy::Auto).unwrap();
        for (i, p) in batch.iter().enumerate() {
            prop_assert_eq!(*p, neighbor_profile(&ds, &roles, i, k).unwrap());
        }
    }

    #[test]
    fn projections_compose((ds, _) in mixed()) {
        let d = ds.n_cols();
        let all: Vec<usize> = (0..d).collect();
        prop_assert_eq!(ds.project(&all).unwrap(), ds.clone());
        if d >= 2 {
            let without_first = ds.project(&all[1..]).unwrap();
            let again = without_first.project(&(0..d - 2).collect::<Vec<_>>());
            if d >= 3 {
                prop_assert_eq!(again.unwrap(), ds.project(&all[1..d - 1]).unwrap());
            }
            let single = ds.project(&[0]).unwrap();
            prop_assert_eq!(single.n_rows(), ds.n_rows());
            for r in 0..ds.n_rows() {
                prop_assert_eq!(single.value(r, 0), ds.value(r, 0));
            }
        }
    }

    #[test]
    fn built_cells_round_trip(cells in prop::collection::vec((-1e6f64..1e6, 0u8..4, 0u8..3), 1..40)) {
        let columns = vec![
            ("c".to_string(), ColumnKind::Continuous),
            ("d".to_string(), ColumnKind::DiscreteNumeric),
            ("s".to_string(), ColumnKind::Categorical),
        ];
        let rows: Vec<Vec<String>> = cells
            .iter()
            .map(|(c, d, s)| vec![c.to_string(), d.to_string(), format!("sym{s}")])
            .collect();
        let ds = build_dataset(&columns, &rows).unwrap();
        for (r, (c, d, s)) in cells.iter().enumerate() {
            prop_assert_eq!(ds.value(r, 0), MixedValue::Numeric(*c));
            prop_assert_eq!(ds.value(r, 1), MixedValue::Numeric(f64::from(*d)));
            prop_assert_eq!(ds.value(r, 2), MixedValue::Symbol(format!("sym{s}")));
        }
    }

    #[test]
    fn overlapping_roles_are_rejected(x in 0usize..4, y in 0usize..4, z in 0usize..4) {
        let ok = RoleAssignment::new(vec![x], vec![y], vec![z], 4).is_ok();
        prop_assert_eq!(ok, x != y && x != z && y != z);
        prop_assert!(RoleAssignment::new(vec![], vec![y], vec![], 4).is_err());
        prop_assert!(RoleAssignment::new(vec![x], vec![], vec![], 4).is_err());
    }

    #[test]
    fn digamma_recurrence(x in 1e-3f64..1e3) {
        let step = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
        prop_assert!((step - 1.0 / x).abs() <= 1e-12 * (1.0 + 1.0 / x));
        let p = digamma(x).unwrap();
        prop_assert!(x.ln() - 1.0 / x <= p && p <= x.ln());
    }

    #[test]
    fn mi_is_cmi_with_empty_z(n in 10usize..80, seed in any::<u64>()) {
        let (ds, roles) = synthetic::independent_uniform(n, false, seed).unwrap();
        let params = EstimateParams::with_k(3).unclamped();
        let a = estimate_mi_proposed(&ds, &roles, params).unwrap();
        let b = estimate(EstimatorKind::Proposed, &ds, &roles, params).unwrap();
        prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        prop_assert!(a.n == n);
    }
}

#[test]
fn gaussian_mutual_information() {
    let rho = 0.8f64;
    let exact = -0.5 * (1.0 - rho * rho).ln();
    let params = EstimateParams::default().unclamped();
    let mut ksg = 0.0;
    let mut proposed = 0.0;
    for seed in 0..10 {
        let (ds, roles) = synthetic::gaussian_pair(1000, rho, seed).unwrap();
        ksg += estimate_ksg_mi(&ds, &roles, params).unwrap().estimate / 10.0;
        proposed += estimate_mi_proposed(&ds, &roles, params).unwrap().estimate / 10.0;
    }
    assert!((ksg - exact).abs() < 0.03, "{ksg} vs {exact}");
    assert!((proposed - exact).abs() < 0.05, "{proposed} vs {exact}");
}

#[test]
fn independent_data_has_small_cmi() {
    let params = EstimateParams::default().unclamped();
    let mut total = 0.0;
    for seed in 0..10 {
        let (ds, roles) = synthetic::independent_uniform(800, true, 100 + seed).unwrap();
        total += estimate(EstimatorKind::Proposed, &ds, &roles, params).unwrap().estimate / 10.0;
    }
    assert!(total.abs() < 0.03, "{total}");
}

#[test]
fn categorical_values_use_zero_one_distance() {
    let ds = Dataset::from_columns(vec![
        Column::categorical("c", &["a", "b", "a"]).unwrap(),
        Column::numeric("v", ColumnKind::Continuous, vec![0.0, 0.25, 3.0]).unwrap(),
    ])
    .unwrap();
    assert_eq!(mixed_distance(&ds, 0, 1), 1.0);
    assert_eq!(mixed_distance(&ds, 0, 2), 3.0);
    let cat = ds.project(&[0]).unwrap();
    assert_eq!(mixed_distance(&cat, 0, 2), 0.0);
}
