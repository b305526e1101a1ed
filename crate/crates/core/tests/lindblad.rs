use faer::{c64, Mat};
use tchm::effective::solve_realization;
use tchm::lindblad::*;
use tchm::model::{ghz_to_angular, sample_disorder, Element, Realization, SystemParams};

fn number_op(space: &TruncatedSpace, n: usize) -> CsrMatrix {
    let a = space.annihilation(n);
    a.adjoint().matmul(&a)
}

fn expectation(op: &CsrMatrix, rho: &Mat<c64>) -> c64 {
    op.triplets().map(|(r, c, v)| v * rho[(c, r)]).sum()
}

fn projector(d: usize, i: usize) -> Mat<c64> {
    let mut rho = Mat::<c64>::zeros(d, d);
    rho[(i, i)] = c64::new(1.0, 0.0);
    rho
}

#[test]
fn vacuum_rabi_oscillation_with_equal_losses() {
    // ⟨a†a⟩ = cos²(gt) e^{−κt} for one photon, one emitter, κ = γ.
    let g = ghz_to_angular(5.0);
    let kappa = ghz_to_angular(2.0);
    let params = SystemParams::new(1, 1).with_losses(kappa, kappa);
    let real = Realization::resonant(params);
    let space = TruncatedSpace::new(1, 1, 2).unwrap();
    let l = build_liouvillian(&real, space, 0, 0.0).unwrap();
    let start = space.index_of(&[1, 0]);
    let rho0 = projector(space.dimension(), start);
    let n = number_op(&space, 0);
    let dt = 0.004;
    for integrator in [Integrator::default(), Integrator::Rk4 { dt: Some(dt / 20.0) }] {
        let traj = evolve(&l, &rho0, dt, 100, integrator).unwrap();
        for (k, rho) in traj.iter().enumerate() {
            let t = k as f64 * dt;
            let expect = (g * t).cos().powi(2) * (-kappa * t).exp();
            assert!((expectation(&n, rho).re - expect).abs() < 1e-9, "t = {t}");
        }
    }
}

#[test]
fn pumped_cavity_steady_state_matches_long_time_limit() {
    let params = SystemParams::new(1, 0);
    let real = Realization::resonant(params);
    let space = TruncatedSpace::new(1, 0, 4).unwrap();
    let l = build_liouvillian(&real, space, 0, ghz_to_angular(0.01)).unwrap();
    let ss = steady_state(&l).unwrap();
    let n = number_op(&space, 0);
    let rho0 = projector(space.dimension(), 0);
    // 40 cavity lifetimes
    let kappa = params.kappa;
    let traj = evolve(&l, &rho0, 40.0 / kappa / 200.0, 200, Integrator::default()).unwrap();
    let late = expectation(&n, traj.last().unwrap()).re;
    let stationary = ss.expectation(&n).re;
    assert!((late - stationary).abs() < 1e-6, "{late} vs {stationary}");
    // untruncated value 2P/(κ − 2P)
    let p = ghz_to_angular(0.01);
    assert!((stationary - 2.0 * p / (kappa - 2.0 * p)).abs() < 1e-6);
}

#[test]
fn two_by_two_steady_state_contract() {
    let params = SystemParams::new(2, 2);
    let real = sample_disorder(&params.with_delta_in_collective_units(0.25), 4).unwrap();
    let space = TruncatedSpace::new(2, 2, 2).unwrap();
    assert_eq!(space.dimension(), 144);
    let l = build_liouvillian(&real, space, 0, ghz_to_angular(0.01)).unwrap();
    let ss = steady_state(&l).unwrap();
    let tr: c64 = (0..144).map(|i| ss.rho[(i, i)]).sum();
    assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12);
    assert!(ss.min_eigenvalue >= -1e-9);
    assert!(ss.residual <= 1e-8);
    assert!((&ss.rho - ss.rho.adjoint()).norm_l2() < 1e-14);
}

#[test]
fn no_pump_steady_state_is_vacuum() {
    let real = Realization::resonant(SystemParams::new(2, 1));
    let l = build_liouvillian(&real, TruncatedSpace::new(2, 1, 1).unwrap(), 1, 0.0).unwrap();
    let ss = steady_state(&l).unwrap();
    assert!((ss.rho[(0, 0)].re - 1.0).abs() < 1e-12);
    assert!((&ss.rho - projector(l.dimension(), 0)).norm_l2() < 1e-10);
}

#[test]
fn identity_probe_correlation_is_flat() {
    let real = Realization::resonant(SystemParams::new(2, 1));
    let space = TruncatedSpace::new(2, 1, 2).unwrap();
    let l = build_liouvillian(&real, space, 0, ghz_to_angular(0.05)).unwrap();
    let ss = steady_state(&l).unwrap();
    let id = CsrMatrix::identity(space.dimension());
    let opts = CorrelationOptions {
        tau_max: Some(0.5),
        decay_threshold: 0.0,
        ..Default::default()
    };
    let corr = correlation(&l, &ss.rho, &id, &opts).unwrap();
    for g in &corr.values {
        assert!((g - c64::new(1.0, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn pumped_cavity_field_correlation_decays_at_half_kappa() {
    let params = SystemParams::new(1, 0);
    let real = Realization::resonant(params);
    let space = TruncatedSpace::new(1, 0, 3).unwrap();
    let l = build_liouvillian(&real, space, 0, ghz_to_angular(0.01)).unwrap();
    let ss = steady_state(&l).unwrap();
    let a = space.annihilation(0);
    let corr = correlation(&l, &ss.rho, &a, &CorrelationOptions::default()).unwrap();
    let g0 = corr.values[0];
    let expect_g0 = expectation(&number_op(&space, 0), &ss.rho);
    assert!((g0 - expect_g0).norm() < 1e-14);
    // Gain 2P and loss κ: the field decays at (κ − 2P)/2, close to κ/2.
    let (kappa, p) = (params.kappa, ghz_to_angular(0.01));
    for (j, g) in corr.values.iter().enumerate().step_by(7).take(40) {
        let t = j as f64 * corr.dt;
        let ratio = g.norm() / g0.norm();
        let exact = (-(kappa - 2.0 * p) * t / 2.0).exp();
        assert!((ratio - exact).abs() < 1e-3 * exact, "τ = {t}: {ratio} vs {exact}");
        let rough = (-kappa * t / 2.0).exp();
        assert!((ratio - rough).abs() < 0.05 * rough);
    }
}

#[test]
fn krylov_and_rk4_correlations_agree() {
    let params = SystemParams::new(2, 1).with_j_over_g(0.5);
    let real = sample_disorder(&params.with_delta_in_collective_units(0.5), 9).unwrap();
    let space = TruncatedSpace::new(2, 1, 2).unwrap();
    let l = build_liouvillian(&real, space, 0, ghz_to_angular(0.01)).unwrap();
    let ss = steady_state(&l).unwrap();
    let probe = space.lowering(Element::Emitter(1, 0));
    let base = CorrelationOptions {
        tau_max: Some(2.0),
        decay_threshold: 0.0,
        ..Default::default()
    };
    let krylov = correlation(&l, &ss.rho, &probe, &base).unwrap();
    let rk4 = correlation(
        &l,
        &ss.rho,
        &probe,
        &CorrelationOptions {
            integrator: Integrator::Rk4 { dt: None },
            ..base
        },
    )
    .unwrap();
    let scale = krylov.values[0].norm();
    for (a, b) in krylov.values.iter().zip(&rk4.values) {
        assert!((a - b).norm() < 1e-7 * scale);
    }
}

#[test]
fn dimension_guard_refuses_large_spaces() {
    let real = Realization::resonant(SystemParams::new(3, 3));
    let err = emission_spectra(&real, 0, &[Element::Cavity(0)], &EmissionOptions::default()).unwrap_err();
    match err {
        tchm::Error::SpaceTooLarge { dimension, limit } => {
            assert_eq!(dimension, 27 * 512);
            assert_eq!(limit, 10_000);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cutoff_doubling_leaves_spectrum_unchanged() {
    let params = SystemParams::new(2, 1).with_j_over_g(1.0);
    let real = sample_disorder(&params.with_delta_in_collective_units(0.5), 2).unwrap();
    let probes = [Element::Cavity(0), Element::Emitter(1, 0)];
    let spectra = |cutoff: usize| {
        let opts = EmissionOptions {
            fock_cutoff: cutoff,
            ..Default::default()
        };
        emission_spectra(&real, 0, &probes, &opts).unwrap()
    };
    let low = spectra(2);
    let high = spectra(4);
    for (a, b) in low.iter().zip(&high) {
        let max = a.spectrum.max_intensity();
        let diff = a
            .spectrum
            .intensity
            .iter()
            .zip(&b.spectrum.intensity)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-3 * max, "relative change {}", diff / max);
    }
}

#[test]
fn weakly_coupled_dimer_shows_polariton_pair() {
    let g = ghz_to_angular(5.0);
    let params = SystemParams::new(2, 2).with_delta(1e-3 * g);
    let real = sample_disorder(&params, 1).unwrap();
    let t = std::time::Instant::now();
    let traces = emission_spectra(&real, 0, &[Element::Cavity(0)], &EmissionOptions::default()).unwrap();
    eprintln!("two-by-two single trace: {:?}", t.elapsed());
    let s = &traces[0].spectrum;
    let floor = s.intensity.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(floor >= -1e-3 * s.max_intensity(), "floor {floor}");
    let mut peaks = s.peaks(0.05);
    peaks.sort_by(|a, b| b.height.partial_cmp(&a.height).unwrap());
    assert!(peaks.len() >= 2);
    let energies: Vec<f64> = solve_realization(&real).unwrap().iter().map(|e| e.energy.re).collect();
    let split = g * 2f64.sqrt();
    let mut top: Vec<f64> = peaks[..2].iter().map(|p| p.omega).collect();
    top.sort_by(f64::total_cmp);
    assert!((top[0] + split).abs() < 0.1 * split, "{top:?}");
    assert!((top[1] - split).abs() < 0.1 * split, "{top:?}");
    for p in &peaks[..2] {
        let nearest = energies.iter().map(|e| (e - p.omega).abs()).fold(f64::INFINITY, f64::min);
        assert!(nearest <= p.fwhm / 2.0, "peak {p:?} nearest {nearest}");
    }
}
