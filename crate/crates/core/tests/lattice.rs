use proptest::prelude::*;
use weyl_core::lattice::*;
use weyl_core::WeylError;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_count_matches_bruteforce(mu in 0.1f64..80.0, a in -1.0f64..1.0, b in -1.0f64..0.5) {
        let s = LatticeShift::new(a, b);
        prop_assert_eq!(count(mu, s).unwrap(), count_bruteforce(mu, s).unwrap());
    }

    #[test]
    fn count_is_monotone(mu in 1.0f64..300.0, step in 0.0f64..2.0) {
        let s = LatticeShift::DIRICHLET;
        prop_assert!(count(mu, s).unwrap() <= count(mu + step, s).unwrap());
    }
}

#[test]
fn jumps_are_where_the_count_changes() {
    let s = LatticeShift::DIRICHLET;
    let js = jumps(20.0, 40.0, s).unwrap();
    assert!(js.windows(2).all(|w| w[0] <= w[1]));
    // merge near-ties so the one-sided probes below straddle a single jump
    let mut distinct = js.clone();
    distinct.dedup_by(|b, a| *b - *a < 1e-8);
    for w in distinct.windows(2) {
        // constant strictly between jumps
        let mid = 0.5 * (w[0] + w[1]);
        let after = count(w[0] + 1e-9, s).unwrap();
        assert_eq!(after, count(mid, s).unwrap());
        assert!(count(w[0] - 1e-9, s).unwrap() < after);
    }
    let total = count(40.0, s).unwrap() - count(20.0, s).unwrap();
    assert_eq!(total as usize, js.iter().filter(|&&z| z > 20.0 && z <= 40.0).count());
}

#[test]
fn record_fields() {
    let r = remainder(40.0, LatticeShift::DIRICHLET).unwrap();
    assert_eq!(r.count, 380);
    assert_eq!(r.area_term, 400.0);
    assert_eq!(r.remainder, -20.0);
    assert_eq!(r.q, 0.0);
    assert_eq!(area_omega(), AREA_OMEGA);
}

#[test]
fn large_mu_stays_near_the_area() {
    let mu = 1e5;
    let r = remainder(mu, LatticeShift::DIRICHLET).unwrap();
    assert!(r.q.abs() <= mu.powf(2.0 / 3.0), "{r:?}");
}

#[test]
fn guards_and_domain() {
    assert!(matches!(count(2e6, LatticeShift::DIRICHLET), Err(WeylError::Guard { .. })));
    assert!(matches!(count_bruteforce(600.0, LatticeShift::DIRICHLET), Err(WeylError::Guard { .. })));
    assert!(count(-1.0, LatticeShift::DIRICHLET).is_err());
    assert_eq!(count(0.0, LatticeShift::DIRICHLET).unwrap(), 0);
}
