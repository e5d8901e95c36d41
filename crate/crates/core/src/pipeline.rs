//! The split-then-detect pipeline on a double well.

use crate::basis::OrbitalBasis;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::transforms::{lift_unitary, make_split, project_mode_count};

/// `f†_{A_0} ... f†_{A_{N-1}} |0>`: all particles in the first well.
pub fn initial_state(basis: &OrbitalBasis, n_particles: usize) -> Result<FockVector> {
    if n_particles > basis.internal_dim() {
        return Err(Error::InvalidArgument(format!(
            "{n_particles} particles do not fit in {} internal levels of one well",
            basis.internal_dim()
        )));
    }
    let orbitals: Vec<usize> = (0..n_particles)
        .map(|l| basis.orbital(0, l))
        .collect::<Result<_>>()?;
    FockVector::slater(basis, &orbitals)
}

/// Splits the initial state with tunneling probability `p`.
pub fn final_state(basis: &OrbitalBasis, n_particles: usize, p: f64) -> Result<FockVector> {
    let u = make_split(basis, p, true)?;
    lift_unitary(&u, &initial_state(basis, n_particles)?)
}

/// Final state projected on `m` particles in the first well, with its probability.
pub fn projected_state(
    basis: &OrbitalBasis,
    n_particles: usize,
    m: usize,
    p: f64,
) -> Result<(FockVector, f64)> {
    let fin = final_state(basis, n_particles, p)?;
    let label = basis.spatial_modes()[0].clone();
    project_mode_count(&fin, &label, m)
}
