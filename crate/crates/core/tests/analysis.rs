use weyl_core::analysis::*;
use weyl_core::{BoundaryCondition, WeylError, ZeroCache};

#[test]
fn lattice_samples_match_recomputation() {
    let cache = ZeroCache::in_memory();
    let s = sample_series(SeriesKind::LatticeQ, 1.0, 10.0, 10).unwrap();
    assert_eq!(s.samples.len(), 12 + 2 * s.policy.jumps);
    assert!(s.samples.windows(2).all(|w| w[0].0 <= w[1].0));
    for &(mu, v) in &s.samples {
        let direct = remainder_at(&cache, SeriesKind::LatticeQ, BoundaryCondition::Dirichlet, mu).unwrap();
        assert_eq!(v, direct, "mu = {mu}");
    }
}

#[test]
fn spectral_samples_match_recomputation() {
    let cache = ZeroCache::in_memory();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let s = sample_series_with(&cache, SeriesKind::SpectralR, bc, 1.0, 20.0, 25, 17).unwrap();
        for &(mu, v) in &s.samples {
            let direct = remainder_at(&cache, SeriesKind::SpectralR, bc, mu).unwrap();
            assert_eq!(v, direct, "{bc:?} mu = {mu}");
        }
    }
}

#[test]
fn jumps_are_bracketed() {
    let cache = ZeroCache::in_memory();
    let s = sample_series(SeriesKind::LatticeQ, 5.0, 30.0, 0).unwrap();
    let jumps = weyl_core::lattice::jumps(5.0, 30.0, weyl_core::LatticeShift::DIRICHLET).unwrap();
    assert_eq!(s.policy.jumps, jumps.len());
    assert_eq!(s.samples.len(), 2 + 2 * jumps.len());
    let q = |mu: f64| remainder_at(&cache, SeriesKind::LatticeQ, BoundaryCondition::Dirichlet, mu).unwrap();
    for &z in &jumps {
        assert!(q(z + JUMP_OFFSET) - q(z - JUMP_OFFSET) >= 1.0 - 1e-6, "jump at {z}");
    }
}

#[test]
fn degenerate_ranges() {
    let s = sample_series(SeriesKind::LatticeQ, 7.0, 7.0, 5).unwrap();
    assert_eq!(s.samples.len(), 1);
    assert!(matches!(dyadic_fit(&s), Err(WeylError::DegenerateFit(_))));
    assert!(matches!(sample_series(SeriesKind::SpectralR, 1.0, 3e4, 5), Err(WeylError::Guard { .. })));
    assert!(matches!(sample_series(SeriesKind::LatticeQ, 1.0, 9e4, 5), Err(WeylError::Budget(_))));
}

#[test]
fn empty_window_is_degenerate() {
    let mut samples: Vec<(f64, f64)> = (0..100).map(|i| (16.0 + i as f64 * 0.1, 1.0 + i as f64)).collect();
    samples.extend((0..100).map(|i| (100.0 + i as f64 * 2.0, 1.0)));
    let s = RemainderSeries {
        kind: SeriesKind::LatticeQ,
        mu_min: 16.0,
        mu_max: 298.0,
        samples,
        policy: SamplingPolicy { n_random: 0, seed: 0, jump_offset: 0.0, jumps: 0, boundary: BoundaryCondition::Dirichlet },
    };
    // [32, 64] has no samples
    assert!(matches!(dyadic_fit(&s), Err(WeylError::DegenerateFit(_))));
}

#[test]
fn sampled_and_exact_suprema_agree() {
    let exact = lattice_dyadic_exact(4, 8).unwrap();
    let s = sample_series(SeriesKind::LatticeQ, 16.0, 256.0, 200).unwrap();
    let sampled = dyadic_fit(&s).unwrap();
    assert_eq!(exact.windows.len(), sampled.windows.len());
    for (a, b) in exact.windows.iter().zip(&sampled.windows) {
        assert_eq!((a.lo, a.hi), (b.lo, b.hi));
        assert!((a.sup_abs - b.sup_abs).abs() < 1e-6, "{a:?} {b:?}");
    }
    let cache = ZeroCache::in_memory();
    let exact = spectral_dyadic_exact(&cache, BoundaryCondition::Dirichlet, 3, 7).unwrap();
    let s = sample_series_with(&cache, SeriesKind::SpectralR, BoundaryCondition::Dirichlet, 8.0, 128.0, 100, 17).unwrap();
    let sampled = dyadic_fit(&s).unwrap();
    for (a, b) in exact.windows.iter().zip(&sampled.windows) {
        assert!((a.sup_abs - b.sup_abs).abs() < 1e-6, "{a:?} {b:?}");
    }
}

#[test]
fn exact_rms_matches_dense_sampling() {
    let exact = lattice_dyadic_exact(3, 7).unwrap();
    let cache = ZeroCache::in_memory();
    for w in &exact.windows {
        let n = 20000;
        let h = (w.hi - w.lo) / n as f64;
        let sq: f64 = (0..n)
            .map(|i| {
                let v = remainder_at(&cache, SeriesKind::LatticeQ, BoundaryCondition::Dirichlet, w.lo + (i as f64 + 0.5) * h).unwrap();
                v * v
            })
            .sum::<f64>()
            / n as f64;
        assert!((sq.sqrt() - w.rms).abs() < 2e-3 * w.rms, "{w:?} vs {}", sq.sqrt());
    }
}

#[test]
fn ept_matches_quadrature() {
    let cache = ZeroCache::in_memory();
    let mu = 100.0;
    let exact = ept_average_with(&cache, mu).unwrap();
    // midpoint rule on the remainder, walking the sorted spectrum
    let spectrum = weyl_core::spectral::spectrum_below(&cache, 2.0 * mu, BoundaryCondition::Dirichlet).unwrap();
    let jumps: Vec<(f64, f64)> = spectrum.into_iter().filter(|z| z.0 >= mu).map(|z| (z.0, z.1 as f64)).collect();
    let mut count = weyl_core::spectral::count_eigs_with(&cache, mu, BoundaryCondition::Dirichlet).unwrap() as f64;
    let n = 400_000;
    let h = mu / n as f64;
    let mut acc = 0.0;
    let mut k = 0;
    for i in 0..n {
        let tau = mu + (i as f64 + 0.5) * h;
        while k < jumps.len() && jumps[k].0 < tau {
            count += jumps[k].1;
            k += 1;
        }
        acc += count - 0.25 * tau * tau + 0.5 * tau;
    }
    let direct = weyl_core::spectral::count_eigs_with(&cache, 2.0 * mu, BoundaryCondition::Dirichlet).unwrap();
    assert_eq!(count as u64, direct);
    let quad = acc * h / mu;
    assert!((quad - exact).abs() < 1e-3 * exact.abs().max(1.0), "{quad} vs {exact}");
    assert!(matches!(ept_average(0.0), Err(WeylError::Precondition(_))));
}

#[test]
fn ept_average_tends_to_one_sixth() {
    let cache = ZeroCache::in_memory();
    for mu in [250.0, 500.0, 1000.0] {
        let v = ept_average_with(&cache, mu).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 0.02, "mu = {mu}: {v}");
    }
}

#[test]
fn theorem12_residual_is_bounded_and_oscillates() {
    let grid: Vec<f64> = (0..800).map(|i| 64.0 * 256f64.powf(i as f64 / 799.0)).collect();
    let rows = theorem12_residual(&grid).unwrap();
    assert!(rows.iter().all(|r| r.normalized.abs() <= THEOREM12_FIXTURE));
    assert!(sign_changes(rows.iter().map(|r| r.q)) >= 1);
    let one = theorem12_residual(&[1.0]).unwrap();
    assert_eq!(one[0].q, 0.25);
}
