//! Fermionic concurrence for two fermions over a four-dimensional
//! single-particle space.
//!
//! In the six-dimensional two-particle sector, with kets `|ij>` (`i < j`)
//! in canonical order, the dual of `w` is `w~_ij = sum_{k<l} eps_ijkl conj(w_kl)`.
//! The pure-state concurrence is `|<w~|w>| / <w|w>`, twice the Pfaffian
//! magnitude of the normalized coefficient matrix. Mixed states use the
//! Wootters construction with the same dualization.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::OccupationState;
use crate::density::SectorDensity;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{self, CMatrix};
use crate::oracle::permutation_sign;

/// Tolerance used when validating density matrices for the mixed concurrence.
pub const DENSITY_TOL: f64 = 1e-9;

const SECTOR: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// `D[(ij), (kl)] = eps_ijkl` on the canonical two-particle kets of four orbitals.
pub fn dual_matrix() -> DMatrix<f64> {
    let mut d = DMatrix::zeros(6, 6);
    for (r, ij) in SECTOR.iter().enumerate() {
        for (c, kl) in SECTOR.iter().enumerate() {
            let p = [ij[0], ij[1], kl[0], kl[1]];
            let mut sorted = p;
            sorted.sort();
            if sorted == [0, 1, 2, 3] {
                d[(r, c)] = permutation_sign(&p);
            }
        }
    }
    d
}

fn check_pair(v: &FockVector) -> Result<()> {
    if v.n_particles() != 2 || v.basis().dim() != 4 {
        return Err(Error::Unsupported(format!(
            "concurrence needs N=2, d=4 (got N={}, d={})",
            v.n_particles(),
            v.basis().dim()
        )));
    }
    Ok(())
}

fn coefficients(v: &FockVector) -> Vec<Complex64> {
    SECTOR
        .iter()
        .map(|ij| v.amplitude(OccupationState::from_orbitals(ij).expect("valid pair")))
        .collect()
}

fn dual_form(d: &DMatrix<f64>, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::default();
    for r in 0..6 {
        for c in 0..6 {
            if d[(r, c)] != 0.0 {
                acc += a[r] * b[c] * d[(r, c)];
            }
        }
    }
    acc
}

/// Pure-state concurrence in `[0, 1]`; zero exactly on Slater determinants.
pub fn concurrence_pure(v: &FockVector) -> Result<f64> {
    check_pair(v)?;
    let norm = v.norm_sqr();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("zero state".into()));
    }
    let w = coefficients(v);
    Ok(dual_form(&dual_matrix(), &w, &w).norm() / norm)
}

/// Mixed-state concurrence `max(0, mu_1 - mu_2 - ... - mu_6)`.
///
/// `mu_k` are the square roots of the eigenvalues of `rho rho~`, computed
/// as the singular values of `tau = Phi^T D Phi` where the columns of
/// `Phi` are the eigenvectors of `rho` scaled by the square roots of their
/// eigenvalues.
pub fn concurrence_mixed(rho: &SectorDensity) -> Result<f64> {
    if rho.n_particles != 2 || rho.basis.dim() != 4 || rho.dim() != 6 {
        return Err(Error::InvalidDensityMatrix(format!(
            "expected a 6x6 two-fermion density matrix over four orbitals (got {}x{})",
            rho.dim(),
            rho.dim()
        )));
    }
    rho.validate(DENSITY_TOL)?;
    let mu = wootters_values(&rho.matrix);
    let rest: f64 = mu[1..].iter().sum();
    Ok((mu[0] - rest).max(0.0))
}

/// Descending `mu_k` of a 6x6 two-fermion density matrix.
pub fn wootters_values(rho: &CMatrix) -> Vec<f64> {
    let (vals, vecs) = linalg::hermitian_eigen(rho);
    let mut phi = CMatrix::zeros(6, 6);
    for (k, &lam) in vals.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        for r in 0..6 {
            phi[(r, k)] = vecs[(r, k)] * s;
        }
    }
    let d = dual_matrix().map(|x| Complex64::new(x, 0.0));
    let tau = phi.transpose() * d * &phi;
    let mut mu = linalg::singular_values(&tau);
    mu.resize(6, 0.0);
    mu
}
