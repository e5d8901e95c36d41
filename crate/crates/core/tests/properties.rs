mod common;

use common::*;
use fermion_split::entanglement::{is_slater, purity, schmidt_spectrum, RANK_THRESHOLD};
use fermion_split::linalg::{self, CMatrix};
use fermion_split::oracle::{particle_bipartition_svd, to_first_quantized};
use fermion_split::scenario::multiset_distance;
use fermion_split::transforms::{counting_statistics, lift_unitary, make_split};
use fermion_split::{binomial, FockVector, OrbitalBasis};
use num_complex::Complex64;
use proptest::prelude::*;

fn basis_for(internal_dim: usize) -> OrbitalBasis {
    OrbitalBasis::double_well(internal_dim).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // <w| f†_k |v> = <f_k w | v>
    #[test]
    fn creation_and_annihilation_are_adjoint(seed in any::<u64>(), n in 0usize..4, k in 0usize..6) {
        let b = basis_for(3);
        let mut r = rng(seed);
        let v = random_state(&mut r, &b, n);
        let w = random_state(&mut r, &b, n + 1);
        let lhs = w.inner_product(&v.apply_creation(k).unwrap()).unwrap();
        let rhs = w.apply_annihilation(k).unwrap().inner_product(&v).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn first_quantization_is_isometric(seed in any::<u64>(), n in 1usize..4) {
        let b = basis_for(2);
        let mut r = rng(seed);
        let v = random_state(&mut r, &b, n);
        let w = random_state(&mut r, &b, n);
        let tv = to_first_quantized(&v).unwrap();
        let tw = to_first_quantized(&w).unwrap();
        prop_assert!((tw.inner_product(&tv).unwrap() - w.inner_product(&v).unwrap()).norm() < 1e-12);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        prop_assert!(tv.antisymmetrize().scale(1.0 / fact).max_abs_diff(&tv).unwrap() < 1e-12);
    }

    #[test]
    fn lifting_preserves_inner_products(seed in any::<u64>(), n in 1usize..4) {
        let b = basis_for(2);
        let mut r = rng(seed);
        let u = random_single_particle(&mut r, &b);
        let v = random_state(&mut r, &b, n);
        let w = random_state(&mut r, &b, n);
        let before = w.inner_product(&v).unwrap();
        let after = lift_unitary(&u, &w).unwrap().inner_product(&lift_unitary(&u, &v).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn lifting_is_a_representation(seed in any::<u64>(), n in 1usize..4) {
        let b = basis_for(2);
        let mut r = rng(seed);
        let u = random_single_particle(&mut r, &b);
        let w = random_single_particle(&mut r, &b);
        let v = random_state(&mut r, &b, n);
        let two_steps = lift_unitary(&w, &lift_unitary(&u, &v).unwrap()).unwrap();
        let one_step = lift_unitary(&w.compose(&u).unwrap(), &v).unwrap();
        prop_assert!(two_steps.approx_eq(&one_step, 1e-12));
        let back = lift_unitary(&u.inverse(), &lift_unitary(&u, &v).unwrap()).unwrap();
        prop_assert!(back.approx_eq(&v, 1e-12));
    }

    // amplitude of |T> in U|S> equals det U[T, S]
    #[test]
    fn lifting_matches_determinant_minors(seed in any::<u64>(), n in 1usize..4) {
        let b = basis_for(3);
        let mut r = rng(seed);
        let u = random_single_particle(&mut r, &b);
        let sector = b.sector(n);
        let s = sector[(seed as usize) % sector.len()];
        let lifted = lift_unitary(&u, &FockVector::slater(&b, &s.to_vec()).unwrap()).unwrap();
        let cols = s.to_vec();
        for t in &sector {
            let rows = t.to_vec();
            let minor = CMatrix::from_fn(n, n, |i, j| u.matrix()[(rows[i], cols[j])]);
            prop_assert!((lifted.amplitude(*t) - minor.determinant()).norm() < 1e-12);
        }
    }

    #[test]
    fn lifting_matches_first_quantized_tensor_power(seed in any::<u64>(), n in 1usize..4) {
        let b = basis_for(2);
        let mut r = rng(seed);
        let u = random_single_particle(&mut r, &b);
        let v = random_state(&mut r, &b, n);
        let direct = to_first_quantized(&lift_unitary(&u, &v).unwrap()).unwrap();
        let via_tensor = to_first_quantized(&v).unwrap().apply_single_particle(u.matrix()).unwrap();
        prop_assert!(direct.max_abs_diff(&via_tensor).unwrap() < 1e-12);
    }

    #[test]
    fn counting_statistics_match_oracle(seed in any::<u64>(), n in 1usize..4) {
        let b = basis_for(2);
        let mut r = rng(seed);
        let v = random_state(&mut r, &b, n);
        let counts = counting_statistics(&v).unwrap();
        let oracle = to_first_quantized(&v).unwrap().mode_counting(&b).unwrap();
        prop_assert!((counts.total() - 1.0).abs() < 1e-12);
        for ((na, nb), p) in counts.iter() {
            let q = oracle.get(&vec![na, nb]).copied().unwrap_or(0.0);
            prop_assert!((p - q).abs() < 1e-12);
        }
        let oracle_total: f64 = oracle.values().sum();
        prop_assert!((oracle_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_spectrum_matches_oracle_svd(seed in any::<u64>(), n in 2usize..5, m_frac in 0.0f64..1.0) {
        let b = basis_for(2);
        let m = 1 + ((m_frac * (n - 1) as f64) as usize).min(n - 2);
        let mut r = rng(seed);
        let v = random_state(&mut r, &b, n);
        let fock = schmidt_spectrum(&v, m).unwrap();
        let sv = particle_bipartition_svd(&to_first_quantized(&v).unwrap(), m).unwrap();
        prop_assert!(multiset_distance(&fock, &sv, RANK_THRESHOLD) < 1e-10);
        let p: f64 = fock.iter().map(|x| x.powi(4)).sum();
        prop_assert!((purity(&v, m).unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn random_unitaries_keep_slater_status(seed in any::<u64>(), n in 2usize..4) {
        let b = basis_for(3);
        let mut r = rng(seed);
        let v = random_slater(&mut r, &b, n);
        prop_assert!(is_slater(&v, 1, 1e-10).unwrap());
        for m in 1..n {
            let k = binomial(n, m);
            let s = schmidt_spectrum(&v, m).unwrap();
            prop_assert_eq!(linalg::numerical_rank(&s, RANK_THRESHOLD), k);
        }
        let u = random_single_particle(&mut r, &b);
        let entangled = v.add(&random_slater(&mut r, &b, n)).unwrap().normalized();
        let lifted = lift_unitary(&u, &entangled).unwrap();
        prop_assert_eq!(is_slater(&entangled, 1, 1e-10).unwrap(), is_slater(&lifted, 1, 1e-10).unwrap());
        prop_assert!((purity(&entangled, 1).unwrap() - purity(&lifted, 1).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn split_probabilities_follow_matrix_entries(p in 0.0f64..=1.0, level in 0usize..2) {
        let b = basis_for(2);
        let u = make_split(&b, p, true).unwrap();
        let a = b.orbital(0, level).unwrap();
        let v = lift_unitary(&u, &FockVector::slater(&b, &[a]).unwrap()).unwrap();
        let c = counting_statistics(&v).unwrap();
        prop_assert!((c.get(1, 0) - (1.0 - p)).abs() < 1e-12);
        prop_assert!((c.get(0, 1) - p).abs() < 1e-12);
        let back = lift_unitary(&make_split(&b, p, false).unwrap(), &v).unwrap();
        prop_assert!((back.amplitude(fermion_split::OccupationState::from_orbitals(&[a]).unwrap()) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 0usize..5) {
        let b = basis_for(2);
        let v = random_state(&mut rng(seed), &b, n);
        let back = FockVector::from_json(&v.to_json()).unwrap();
        prop_assert!(back.approx_eq(&v, 0.0));
    }
}

#[test]
fn balanced_split_twice_matches_squared_matrix() {
    let b = basis_for(2);
    let u = make_split(&b, 0.5, true).unwrap();
    let u2 = u.compose(&u).unwrap();
    for level in 0..2 {
        let a = b.orbital(0, level).unwrap();
        let v = FockVector::slater(&b, &[a]).unwrap();
        let twice = lift_unitary(&u, &lift_unitary(&u, &v).unwrap()).unwrap();
        let c = counting_statistics(&twice).unwrap();
        let to_a = u2.matrix()[(a, a)].norm_sqr();
        let to_b = u2.matrix()[(b.orbital(1, level).unwrap(), a)].norm_sqr();
        assert!((c.get(1, 0) - to_a).abs() < 1e-12);
        assert!((c.get(0, 1) - to_b).abs() < 1e-12);
    }
}
