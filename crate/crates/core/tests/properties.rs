use faer::{c64, Mat};
use proptest::prelude::*;
use tchm::analytic::{cca_band, open_momenta, periodic_momenta, polariton_bands, polariton_eigenvector};
use tchm::effective::{build_h_eff, solve_realization};
use tchm::lindblad::{build_liouvillian, TruncatedSpace};
use tchm::model::{sample_disorder, Boundary, Realization, SystemParams};

/// Greedy nearest matching of two eigenvalue lists.
fn max_mismatch(a: &[c64], b: &[c64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn energies(real: &Realization) -> Vec<c64> {
    solve_realization(real).unwrap().iter().map(|s| s.energy).collect()
}

fn params() -> impl Strategy<Value = SystemParams> {
    (1usize..7, 0usize..5, 0.0f64..3.0, 0.0f64..1.5).prop_map(|(n, m, j, d)| {
        SystemParams::new(n, m).with_j_over_g(j).with_delta_in_collective_units(d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupancies_are_normalized_and_linewidths_bounded(p in params(), seed in any::<u64>()) {
        let real = sample_disorder(&p, seed).unwrap();
        for s in solve_realization(&real).unwrap() {
            prop_assert!((s.occupancies.total() - 1.0).abs() < 1e-10);
            if p.emitters_per_cavity > 0 {
                let (lo, hi) = (p.kappa.max(p.gamma) / 2.0, p.kappa.min(p.gamma) / 2.0);
                prop_assert!(s.energy.im >= -lo - 1e-9 && s.energy.im <= -hi + 1e-9, "{}", s.energy);
            }
        }
    }

    #[test]
    fn equal_losses_shift_the_lossless_spectrum(p in params(), seed in any::<u64>(), loss in 0.1f64..100.0) {
        let lossless = sample_disorder(&p.lossless(), seed).unwrap();
        let lossy = Realization::from_frequencies(p.with_losses(loss, loss), lossless.emitter_frequencies().to_vec(), seed).unwrap();
        let shifted: Vec<c64> = energies(&lossless).iter().map(|e| e - c64::new(0.0, loss / 2.0)).collect();
        let got = energies(&lossy);
        let scale = got.iter().map(|e| e.norm()).fold(1.0, f64::max);
        prop_assert!(max_mismatch(&got, &shifted) < 1e-9 * scale);
    }

    #[test]
    fn permuting_emitters_within_a_node_keeps_the_spectrum(p in params(), seed in any::<u64>(), node in 0usize..7, shift in 1usize..5) {
        prop_assume!(p.emitters_per_cavity >= 2);
        let real = sample_disorder(&p, seed).unwrap();
        let (n, m) = (node % p.n_cavities, p.emitters_per_cavity);
        let mut omega = real.emitter_frequencies().to_vec();
        omega[n * m..(n + 1) * m].rotate_left(shift % m);
        let permuted = Realization::from_frequencies(p, omega, seed).unwrap();
        let a = energies(&real);
        let scale = a.iter().map(|e| e.norm()).fold(1.0, f64::max);
        prop_assert!(max_mismatch(&a, &energies(&permuted)) < 1e-9 * scale);
    }

    #[test]
    fn uncoupled_nodes_repeat_the_single_node_spectrum(n in 1usize..7, m in 1usize..5) {
        let p = SystemParams::new(n, m).with_j_over_g(0.0).lossless();
        let got = energies(&Realization::resonant(p));
        let split = p.g * (m as f64).sqrt();
        let mut expect = Vec::new();
        for _ in 0..n {
            expect.push(c64::new(-split, 0.0));
            expect.push(c64::new(split, 0.0));
            expect.extend(std::iter::repeat(c64::new(0.0, 0.0)).take(m - 1));
        }
        prop_assert!(max_mismatch(&got, &expect) < 1e-9 * split);
    }

    #[test]
    fn hermitian_split_of_the_effective_matrix(p in params(), seed in any::<u64>()) {
        let real = sample_disorder(&p, seed).unwrap();
        let h = build_h_eff(&real);
        let lossless = build_h_eff(&Realization::from_frequencies(p.lossless(), real.emitter_frequencies().to_vec(), seed).unwrap());
        let d = h.dimension();
        for r in 0..d {
            for c in 0..d {
                let sum = h.entry(r, c) + h.entry(c, r).conj();
                prop_assert!((sum - lossless.entry(r, c) * 2.0).norm() < 1e-12 * (1.0 + sum.norm()));
                let diff = h.entry(r, c) - h.entry(c, r).conj();
                let loss = if r < p.n_cavities { p.kappa } else { p.gamma };
                let expect = if r == c { c64::new(0.0, -loss) } else { c64::new(0.0, 0.0) };
                prop_assert!((diff - expect).norm() < 1e-12 * (1.0 + loss));
            }
        }
    }

    #[test]
    fn liouvillian_preserves_trace_and_hermiticity(
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36 * 36),
        pump in 0.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let p = SystemParams::new(2, 1).with_j_over_g(0.5).with_delta_in_collective_units(0.5);
        let real = sample_disorder(&p, seed).unwrap();
        let space = TruncatedSpace::new(2, 1, 2).unwrap();
        let l = build_liouvillian(&real, space, 1, pump).unwrap();
        let d = space.dimension();
        let a = Mat::<c64>::from_fn(d, d, |r, c| { let (x, y) = entries[r * d + c]; c64::new(x, y) });
        let rho = &a * a.adjoint();
        let out = l.apply(&rho);
        let norm = rho.norm_l2();
        let tr: c64 = (0..d).map(|i| out[(i, i)]).sum();
        prop_assert!(tr.norm() < 1e-10 * norm * l.hamiltonian().norm_one());
        prop_assert!((&out - out.adjoint()).norm_l2() < 1e-10 * norm * l.hamiltonian().norm_one());
    }
}

#[test]
fn open_chain_bands_match_the_closed_form() {
    for n in 1..=20 {
        for m in 1..=5 {
            for j_over_g in [0.1, 1.0, 10.0] {
                let p = SystemParams::new(n, m).with_j_over_g(j_over_g).lossless();
                let states = solve_realization(&Realization::resonant(p)).unwrap();
                let mut lower: Vec<(f64, (f64, f64))> = Vec::new();
                let mut upper = Vec::new();
                for k in open_momenta(n) {
                    let (em, ep) = polariton_bands(k, 0.0, p.j_hop, p.g, m);
                    let (wm, wp) = polariton_eigenvector(k, p.j_hop, p.g, m).unwrap();
                    lower.push((em, wm));
                    upper.push((ep, wp));
                }
                lower.sort_by(|a, b| a.0.total_cmp(&b.0));
                upper.sort_by(|a, b| a.0.total_cmp(&b.0));
                let band: Vec<_> = lower.iter().chain(&upper).collect();
                let numeric: Vec<_> = states[..n].iter().chain(&states[states.len() - n..]).collect();
                for ((e, (photon, emitter)), s) in band.iter().zip(numeric) {
                    assert!((s.energy.re - e).abs() <= 1e-9 * e.abs().max(p.g), "N={n} M={m}");
                    // isolated levels only: a shared energy mixes weights
                    let isolated = band.iter().filter(|b| (b.0 - e).abs() < 1e-6 * p.g).count() == 1;
                    if isolated {
                        assert!((s.occupancies.total_photon() - photon).abs() < 1e-6);
                        assert!((s.occupancies.total_emitter() - emitter).abs() < 1e-6);
                    }
                }
                // the flat band sits exactly at the emitter frequency
                for s in &states[n..states.len() - n] {
                    assert!(s.energy.norm() < 1e-9 * p.g);
                }
            }
        }
    }
}

#[test]
fn periodic_ring_without_emitters_matches_the_cosine_band() {
    for n in 1..=16 {
        let p = SystemParams::new(n, 0).with_j_over_g(0.7).lossless().with_boundary(Boundary::Periodic);
        let got = energies(&Realization::resonant(p));
        let expect: Vec<c64> = periodic_momenta(n).iter().map(|&k| c64::new(cca_band(k, 0.0, p.j_hop), 0.0)).collect();
        assert!(max_mismatch(&got, &expect) < 1e-9 * p.j_hop * 2.0, "N={n}");
    }
}
