use weyl_core::geometry::gauss_inverse;
use weyl_core::oscillatory::*;
use weyl_core::WeylError;

fn dir(ratio: f64) -> weyl_core::ConeDirection {
    let n = ratio.hypot(1.0);
    gauss_inverse(ratio / n, 1.0 / n).unwrap()
}

#[test]
fn flipped_phase_is_the_conjugate() {
    let d = dir(0.3);
    let a = i_eval(250.0, d.xi()).unwrap();
    let b = i_eval_with(250.0, d.xi(), QuadratureOptions { flip_phase: true, ..Default::default() }).unwrap();
    assert!((a.value - b.value.conj()).norm() <= 1e-12);
}

#[test]
fn homogeneous_in_the_direction() {
    // I(mu, l xi) = l I(l mu, xi)
    let d = dir(0.6);
    let l = 2.5;
    let a = i_eval(40.0, [l * d.xi1, l * d.xi2]).unwrap().value;
    let b = i_eval(l * 40.0, d.xi()).unwrap().value * l;
    assert!((a - b).norm() <= 1e-11, "{a} vs {b}");
}

#[test]
fn refinement_agrees_with_the_estimate() {
    for ratio in [0.05, 0.5, 0.95] {
        let d = dir(ratio);
        let a = i_eval(3e3, d.xi()).unwrap();
        let b = i_eval_with(3e3, d.xi(), QuadratureOptions { width_scale: 0.5, ..Default::default() }).unwrap();
        assert!((a.value - b.value).norm() <= a.est_error.max(1e-13), "{a:?} {b:?}");
        assert!(b.panels > a.panels);
    }
}

#[test]
fn stationary_phase_error_within_budget() {
    for ratio in [0.2, 0.5, 0.8] {
        let d = dir(ratio);
        for mu in [1e3, 1e4] {
            let i = i_eval(mu, d.xi()).unwrap().value;
            let p = stationary_prediction(mu, &d).unwrap();
            assert!((i - p.leading).norm() <= p.error_budget, "ratio {ratio} mu {mu}: {} > {}", (i - p.leading).norm(), p.error_budget);
        }
    }
}

#[test]
fn regime_table_bounds_hold_on_its_grid() {
    let d = direction_at_angle(0.01 * std::f64::consts::PI).unwrap();
    let grid: Vec<f64> = (0..12).map(|i| 10.0 * 10f64.powf(i as f64 / 3.0)).collect();
    let t = regime_check(&d, &grid).unwrap();
    for r in &t.rows {
        if r.mu <= t.k_cubed {
            assert!(r.abs_i <= r.bound_small * (1.0 + 1e-12));
        } else {
            assert!(r.abs_i <= r.bound_large * (1.0 + 1e-12));
        }
    }
    assert!(matches!(regime_check(&dir(0.5), &grid), Err(WeylError::Precondition(_))));
}

#[test]
fn poisson_sum_is_deterministic_and_settles() {
    let a = poisson_sum_partial(30.0, 0.2, 10.0).unwrap();
    let b = poisson_sum_partial(30.0, 0.2, 10.0).unwrap();
    assert_eq!(a, b);
    let c = poisson_sum_partial(30.0, 0.2, 20.0).unwrap();
    assert!((c - a).abs() < 0.1 * a.abs().max(1.0), "{a} vs {c}");
}

#[test]
fn guards() {
    assert!(matches!(i_eval(2e5, [0.3, 0.9]), Err(WeylError::Guard { .. })));
    assert!(i_eval(10.0, [1.0, 0.5]).is_err());
    assert!(poisson_sum_partial(-1.0, 0.1, 5.0).is_err());
}
