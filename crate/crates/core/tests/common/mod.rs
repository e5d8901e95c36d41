#![allow(dead_code)]

use fermion_split::linalg::CMatrix;
use fermion_split::{FockVector, OccupationState, OrbitalBasis, SingleParticleUnitary};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-ish unitary from the Q factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    gaussian_matrix(rng, n, n).qr().q()
}

pub fn random_single_particle(rng: &mut impl Rng, basis: &OrbitalBasis) -> SingleParticleUnitary {
    SingleParticleUnitary::new(basis, random_unitary(rng, basis.dim()), 1e-10).unwrap()
}

/// Normalized state with Gaussian amplitudes over the whole N-particle sector.
pub fn random_state(rng: &mut impl Rng, basis: &OrbitalBasis, n: usize) -> FockVector {
    let entries: Vec<(OccupationState, Complex64)> = basis
        .sector(n)
        .into_iter()
        .map(|k| (k, gaussian(rng)))
        .collect();
    FockVector::from_amplitudes(basis, n, entries)
        .unwrap()
        .normalized()
}

/// Random normalized state with exactly one fermion in each well.
pub fn random_one_per_well(rng: &mut impl Rng, internal_dim: usize) -> FockVector {
    let basis = OrbitalBasis::double_well(internal_dim).unwrap();
    let mut entries = Vec::new();
    for i in 0..internal_dim {
        for j in 0..internal_dim {
            let a = basis.orbital(0, i).unwrap();
            let b = basis.orbital(1, j).unwrap();
            entries.push((
                OccupationState::from_orbitals(&[a, b]).unwrap(),
                gaussian(rng),
            ));
        }
    }
    FockVector::from_amplitudes(&basis, 2, entries)
        .unwrap()
        .normalized()
}

/// Random Slater determinant: a random unitary applied to a random occupation.
pub fn random_slater(rng: &mut impl Rng, basis: &OrbitalBasis, n: usize) -> FockVector {
    let u = random_single_particle(rng, basis);
    let sector = basis.sector(n);
    let ket = sector[rng.gen_range(0..sector.len())];
    let v = FockVector::slater(basis, &ket.to_vec()).unwrap();
    fermion_split::transforms::lift_unitary(&u, &v).unwrap()
}
