use weyl_core::spectral::*;
use weyl_core::{BoundaryCondition, WeylError, ZeroCache};

#[test]
fn spectrum_sums_to_the_count() {
    let cache = ZeroCache::in_memory();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        for mu in [3.0, 17.5, 64.0] {
            let total: u64 = spectrum_below(&cache, mu, bc).unwrap().iter().map(|z| z.1).sum();
            assert_eq!(total, count_eigs_with(&cache, mu, bc).unwrap(), "{bc:?} {mu}");
        }
    }
}

#[test]
fn neumann_dominates_dirichlet() {
    let cache = ZeroCache::in_memory();
    for i in 1..100 {
        let mu = 0.7 * i as f64;
        let d = count_eigs_with(&cache, mu, BoundaryCondition::Dirichlet).unwrap();
        let n = count_eigs_with(&cache, mu, BoundaryCondition::Neumann).unwrap();
        assert!(n >= d, "mu = {mu}: {n} < {d}");
    }
}

#[test]
fn first_eigenvalues() {
    let cache = ZeroCache::in_memory();
    // j_{0,1} = 2.4048, j_{1,1} = 3.8317 (double)
    assert_eq!(count_eigs_with(&cache, 2.4, BoundaryCondition::Dirichlet).unwrap(), 0);
    assert_eq!(count_eigs_with(&cache, 2.41, BoundaryCondition::Dirichlet).unwrap(), 1);
    assert_eq!(count_eigs_with(&cache, 3.84, BoundaryCondition::Dirichlet).unwrap(), 3);
    // constant mode, then j'_{1,1} = 1.8412 (double)
    assert_eq!(count_eigs_with(&cache, 1.0, BoundaryCondition::Neumann).unwrap(), 1);
    assert_eq!(count_eigs_with(&cache, 1.85, BoundaryCondition::Neumann).unwrap(), 3);
}

#[test]
fn remainder_record() {
    let cache = ZeroCache::in_memory();
    let r = weyl_remainder_with(&cache, 20.0, BoundaryCondition::Dirichlet).unwrap();
    assert_eq!(r.count, 92);
    assert_eq!(r.remainder, 92.0 - 100.0 + 10.0);
    let n = weyl_remainder_with(&cache, 20.0, BoundaryCondition::Neumann).unwrap();
    assert_eq!(n.remainder, n.count as f64 - 100.0 - 10.0);
}

#[test]
fn sta_gap_is_small_inside_the_cone() {
    let cache = ZeroCache::in_memory();
    for (n, k) in [(0, 5), (3, 10), (20, 20), (50, 40)] {
        let g = sta_gap_with(&cache, n, k).unwrap();
        assert!(g.abs() < 0.1 / f64::from(n + k + 1).sqrt(), "({n}, {k}): {g}");
    }
    // j_{100,1} is near 108.8, below 1.2 * 100
    assert!(matches!(sta_gap_with(&cache, 100, 1), Err(WeylError::Precondition(_))));
}

#[test]
fn comparison_bound_and_guards() {
    let r = compare_counts(50.0, COMPARE_C).unwrap();
    assert!(r.holds(), "{r:?}");
    assert!(matches!(compare_counts(5.0, COMPARE_C), Err(WeylError::Precondition(_))));
    assert!(matches!(count_eigs(2e5, BoundaryCondition::Dirichlet), Err(WeylError::Guard { .. })));
    assert!(count_eigs(0.0, BoundaryCondition::Dirichlet).is_err());
}
