mod common;

use cdlab_core::multiindex::{
    enumerate_layer, verify_grid, verify_layer_inequality, verify_offset_induction,
    verify_offset_inequality, InequalityKind, LemmaGrid, MultiIndex,
};
use common::index_factorial;

fn brute_layer(m: usize, l: u32, k: u32, eta: &[u32]) -> (u64, u64) {
    let beta: Vec<u32> = eta.iter().map(|&e| k + 1 + l - e).collect();
    let rhs = index_factorial(&common::add(&beta, eta));
    let mut checked = 0;
    let mut bad = 0;
    for alpha in common::indices_up_to(m, l)
        .into_iter()
        .filter(|a| a.iter().sum::<u32>() == l && a.as_slice() != eta)
    {
        checked += 1;
        if index_factorial(&common::add(&beta, &alpha)) <= rhs {
            bad += 1;
        }
    }
    (checked, bad)
}

fn brute_offset(m: usize, l: u32, k: u32, eta: &[u32], extra: u32) -> (u64, u64) {
    let beta = vec![k + 1 + l; m];
    let rhs = index_factorial(&beta);
    let mut checked = 0;
    let mut bad = 0;
    for alpha in common::indices_up_to(m, l + extra)
        .into_iter()
        .filter(|a| a.iter().sum::<u32>() >= l && a.as_slice() != eta)
    {
        checked += 1;
        let v: Vec<u32> = (0..m).map(|i| beta[i] + alpha[i] - eta[i]).collect();
        if index_factorial(&v) <= rhs {
            bad += 1;
        }
    }
    (checked, bad)
}

#[test]
fn default_grid_has_no_counterexamples_and_matches_brute_force() {
    let grid = LemmaGrid::default();
    let report = verify_grid(&grid).unwrap();
    assert!(report.passed());
    let mut layer_total = 0;
    let mut offset_total = 0;
    for &m in &grid.dimensions {
        for &l in &grid.layers {
            for &k in &grid.ks {
                for eta in enumerate_layer(m, l) {
                    let (c, b) = brute_layer(m, l, k, eta.entries());
                    assert_eq!(b, 0);
                    layer_total += c;
                    let (c, b) = brute_offset(m, l, k, eta.entries(), grid.max_extra_degree);
                    assert_eq!(b, 0);
                    offset_total += c;
                }
            }
        }
    }
    assert_eq!(report.checked_for(InequalityKind::Layer), layer_total);
    assert_eq!(report.checked_for(InequalityKind::Offset), offset_total);
    assert!(report.checked_for(InequalityKind::OffsetInduction) > 0);
    assert!(report.total_checked > 10_000, "{}", report.total_checked);
}

#[test]
fn single_point_grid() {
    let eta = MultiIndex::new(vec![1, 0]).unwrap();
    let v = verify_layer_inequality(2, 1, 1, &eta).unwrap();
    assert!(v.passed());
    assert_eq!(v.checked_count, 1);
    assert!(verify_offset_inequality(2, 1, 1, &eta, 3).unwrap().passed());
    assert!(verify_offset_induction(2, 1, 1, &eta, 3).unwrap().passed());
}

#[test]
fn one_variable_is_vacuous() {
    let eta = MultiIndex::new(vec![3]).unwrap();
    assert_eq!(verify_layer_inequality(1, 3, 2, &eta).unwrap().checked_count, 0);
}

#[test]
fn mismatched_eta_is_rejected() {
    let eta = MultiIndex::new(vec![2, 0]).unwrap();
    assert!(verify_layer_inequality(2, 1, 1, &eta).is_err());
    assert!(verify_layer_inequality(3, 2, 1, &eta).is_err());
}

#[test]
fn balanced_anchor_is_load_bearing() {
    // The checks pass because β + η is a multiple of ε. Dropping the −η
    // from β breaks the strict inequality already at m = 2, l = 1, k = 1.
    let beta = [3u32, 3];
    let eta = [1u32, 0];
    let rhs = index_factorial(&common::add(&beta, &eta));
    let lhs = index_factorial(&common::add(&beta, &[0, 1]));
    assert!(lhs <= rhs);
}
