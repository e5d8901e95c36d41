mod common;

use common::*;
use fermion_split::concurrence::{concurrence_mixed, concurrence_pure};
use fermion_split::detector::{build_coupling, interact, readout, trace_out_detector, JointState};
use fermion_split::entanglement::linear_entropy_single;
use fermion_split::linalg::{self, CMatrix};
use fermion_split::pipeline::final_state;
use fermion_split::transforms::project_mode_count;
use fermion_split::{FockVector, OrbitalBasis, SectorDensity};

#[test]
fn generator_is_hermitian_and_exponentiates_to_the_shift() {
    for d in 2..=7 {
        for tau in [0.5, 1.0, 2.0] {
            let c = build_coupling(d, tau).unwrap();
            assert!(linalg::hermiticity_defect(c.generator()) < 1e-12);
            let u = c.evolution(tau);
            assert!(linalg::unitarity_defect(&u) < 1e-10);
            let diff = (&u - c.shift(1))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "D={d} tau={tau}: {diff}");
        }
    }
}

#[test]
fn repeated_interaction_counts_cyclically() {
    let c = build_coupling(5, 1.0).unwrap();
    for k in 0..8 {
        let diff = (c.evolution(k as f64) - c.shift(k % 5))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9);
    }
}

#[test]
fn interaction_is_unitary_and_reversible() {
    let b = OrbitalBasis::double_well(2).unwrap();
    let mut r = rng(11);
    let c = build_coupling(4, 1.0).unwrap();
    for n in 1..=3 {
        let v = random_state(&mut r, &b, n);
        let j = interact(&v, &c, 0).unwrap();
        assert!((j.norm_sqr() - 1.0).abs() < 1e-12);
        let back = j.evolve(&c, -1.0).unwrap();
        let start = JointState::product(&v, 4, 0).unwrap();
        for (k, l, a) in start.iter() {
            assert!((back.amplitude(k, l) - a).norm() < 1e-10);
        }
    }
}

#[test]
fn readout_probabilities_are_binomial() {
    let b = OrbitalBasis::double_well(2).unwrap();
    let c = build_coupling(3, 1.0).unwrap();
    for p in [0.0, 0.25, 0.6, 1.0] {
        let j = interact(&final_state(&b, 2, p).unwrap(), &c, 0).unwrap();
        let expected = [p * p, 2.0 * p * (1.0 - p), (1.0 - p) * (1.0 - p)];
        for (level, e) in expected.iter().enumerate() {
            assert!((readout(&j, level).unwrap().1 - e).abs() < 1e-10);
        }
    }
}

#[test]
fn discarding_the_detector_leaves_a_block_diagonal_mixture() {
    let b = OrbitalBasis::double_well(2).unwrap();
    let c = build_coupling(3, 1.0).unwrap();
    let mut r = rng(5);
    for _ in 0..10 {
        let v = random_state(&mut r, &b, 2);
        let rho = trace_out_detector(&interact(&v, &c, 0).unwrap());
        rho.validate(1e-10).unwrap();
        let mut mix = CMatrix::zeros(6, 6);
        for n in 0..=2 {
            let (proj, prob) = project_mode_count(&v, "A", n).unwrap();
            if prob > 0.0 {
                mix += SectorDensity::pure(&proj).matrix * num_complex::Complex64::new(prob, 0.0);
            }
        }
        let diff = (&rho.matrix - mix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }
}

#[test]
fn measured_pipeline_matches_direct_projection() {
    let b = OrbitalBasis::double_well(2).unwrap();
    let c = build_coupling(3, 1.0).unwrap();
    for p in [0.2, 0.5, 0.8] {
        let v = final_state(&b, 2, p).unwrap();
        let j = interact(&v, &c, 0).unwrap();
        let rho = trace_out_detector(&j);
        assert!(concurrence_mixed(&rho).unwrap().abs() < 1e-9);
        let (psi, _) = readout(&j, 1).unwrap();
        assert!((concurrence_pure(&psi).unwrap() - 1.0).abs() < 1e-10);
        let (proj, _) = project_mode_count(&v, "A", 1).unwrap();
        assert!((psi.fidelity(&proj).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn too_few_levels_is_rejected() {
    let b = OrbitalBasis::double_well(2).unwrap();
    let v = FockVector::slater(&b, &[0, 1]).unwrap();
    assert!(interact(&v, &build_coupling(2, 1.0).unwrap(), 0).is_err());
    assert!(build_coupling(1, 1.0).is_err());
    assert!(build_coupling(3, 0.0).is_err());
    let j = interact(&v, &build_coupling(3, 1.0).unwrap(), 0).unwrap();
    assert!(readout(&j, 3).is_err());
}

// Two fermions can never be in a product state: the one-body linear entropy is bounded below by 1/2.
#[test]
fn two_fermion_linear_entropy_is_at_least_one_half() {
    let mut r = rng(2024);
    let mut min = f64::INFINITY;
    for d in [2, 3] {
        let b = OrbitalBasis::double_well(d).unwrap();
        for _ in 0..300 {
            let s = linear_entropy_single(&random_state(&mut r, &b, 2)).unwrap();
            assert!(s >= 0.5 - 1e-12);
            min = min.min(s);
        }
        for _ in 0..20 {
            let s = linear_entropy_single(&random_slater(&mut r, &b, 2)).unwrap();
            assert!((s - 0.5).abs() < 1e-10);
        }
    }
    assert!(min < 0.75);
}
