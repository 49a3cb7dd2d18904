use altu_core::agp::Regularizer;
use altu_core::alternating::{apply_parallel_step, effective_time};
use altu_core::bench::{read_records, top_k, write_records, Method, RunRecord};
use altu_core::linalg::{evolve, fidelity, populations, spectral_decompose, HermitianOperator, StateVector, C64};
use altu_core::models::{pspin_family, two_level_family, ParameterVector};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for r in 0..dim {
        m[(r, r)] = C64::new(rng.random_range(-2.0..2.0), 0.0);
        for c in r + 1..dim {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

fn random_state(dim: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    StateVector::normalized(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectral_decomposition_reconstructs(dim in 1usize..12, seed in any::<u64>()) {
        let h = random_hermitian(dim, seed);
        let d = spectral_decompose(&h);
        prop_assert!((d.reconstruct() - h.matrix()).camax() < 1e-10);
        prop_assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn evolution_is_unitary_and_composes(dim in 1usize..10, seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let h = random_hermitian(dim, seed);
        let psi = random_state(dim, seed ^ 0x5eed);
        let once = evolve(&h, a + b, &psi).unwrap();
        let twice = evolve(&h, b, &evolve(&h, a, &psi).unwrap()).unwrap();
        prop_assert!((once.norm() - 1.0).abs() < 1e-12);
        prop_assert!((once.amplitudes() - twice.amplitudes()).camax() < 1e-10);
    }

    #[test]
    fn populations_sum_to_one(dim in 1usize..12, seed in any::<u64>()) {
        let d = spectral_decompose(&random_hermitian(dim, seed));
        let p = populations(&d, &random_state(dim, seed.wrapping_add(1))).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn pspin_family_is_affine(n in 2usize..12, p in 2u32..4, a in 0.0f64..1.0, b in 0.0f64..1.0, t in 0.0f64..1.0) {
        let f = pspin_family(n, p, 1.0, 1.0).unwrap();
        let h = |x: f64| f.hamiltonian_at(&ParameterVector::scalar(x)).unwrap();
        let mixed = h(a).scaled(1.0 - t).add_scaled(&h(b), t).unwrap();
        prop_assert!(h((1.0 - t) * a + t * b).max_deviation(&mixed) < 1e-10);
    }

    #[test]
    fn parallel_step_preserves_norm(s in 0.05f64..0.95, delta in -0.1f64..0.1, eta in 0.05f64..2.0, steps in 2usize..40) {
        let f = two_level_family(0.2, 1.0).unwrap();
        let lambda = ParameterVector::new(vec![0.2 * (std::f64::consts::PI * s).sin(), (std::f64::consts::PI * s).cos()]).unwrap();
        let dl = ParameterVector::new(vec![delta, -delta]).unwrap();
        let psi = random_state(2, steps as u64);
        let out = apply_parallel_step(&f, &lambda, &dl, Regularizer::new(eta).unwrap(), steps, &psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_time_grows_with_slices(eta in 0.01f64..5.0, m in 2u64..10_000, l in 1u64..20) {
        prop_assert!(effective_time(eta, m, l + 1) > effective_time(eta, m, l));
        let per_slice = effective_time(eta, m, l) / l as f64;
        prop_assert!((per_slice - effective_time(eta, m, 1)).abs() < 1e-9 * per_slice);
    }

    #[test]
    fn top_k_is_a_sorted_prefix(fs in prop::collection::vec((0.0f64..1.0, 0.0f64..500.0), 0..40), k in 0usize..50) {
        let records: Vec<RunRecord> = fs.iter().enumerate().map(|(i, &(f, t))| record(i as i64, f, t)).collect();
        let top = top_k(&records, k);
        prop_assert_eq!(top.len(), k.min(records.len()));
        prop_assert!(top.windows(2).all(|w| w[0].fidelity >= w[1].fidelity));
        let longer = top_k(&records, k + 3);
        prop_assert_eq!(&longer[..top.len()], &top[..]);
        if let (Some(last), true) = (top.last(), top.len() < records.len()) {
            prop_assert!(records.iter().filter(|r| !top.contains(r)).all(|r| r.fidelity <= last.fidelity));
        }
    }

    #[test]
    fn records_round_trip_through_csv(fs in prop::collection::vec((0.0f64..=1.0, 0.0f64..1e4, any::<bool>()), 0..20)) {
        let records: Vec<RunRecord> = fs
            .iter()
            .enumerate()
            .map(|(i, &(f, t, adiabatic))| {
                let mut r = record(i as i64, f, t);
                if adiabatic {
                    r = RunRecord { method: Method::Adiabatic, j: -1, k: -1, slices: -1, eta: None, steps: -1, ..r };
                }
                r
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        write_records(&records, &path, None).unwrap();
        prop_assert_eq!(read_records(&path, None).unwrap(), records);
    }
}

fn record(i: i64, fidelity: f64, time: f64) -> RunRecord {
    RunRecord {
        method: Method::Alternating,
        j: i % 6,
        k: i / 6,
        slices: 2,
        eta: Some(0.5),
        steps: 100,
        time,
        fidelity,
        slice_populations: None,
    }
}

#[test]
fn fidelity_is_symmetric_and_bounded() {
    for seed in 0..20 {
        let a = random_state(7, seed);
        let b = random_state(7, seed + 100);
        let f = fidelity(&a, &b).unwrap();
        assert!((0.0..=1.0).contains(&f));
        assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-15);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }
}
