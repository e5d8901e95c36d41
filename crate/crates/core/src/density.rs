use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{OccupationState, OrbitalBasis};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{self, CMatrix};

/// Dense operator on a fixed-particle-number sector, indexed by canonical kets.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDensity {
    pub basis: OrbitalBasis,
    pub n_particles: usize,
    pub states: Vec<OccupationState>,
    pub matrix: CMatrix,
}

impl SectorDensity {
    /// `|v><v|` over the full `N`-particle sector.
    pub fn pure(v: &FockVector) -> Self {
        let states = v.basis().sector(v.n_particles());
        let col = DMatrix::from_iterator(states.len(), 1, states.iter().map(|k| v.amplitude(*k)));
        Self {
            basis: v.basis().clone(),
            n_particles: v.n_particles(),
            matrix: &col * col.adjoint(),
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, ket: OccupationState) -> Option<usize> {
        self.states.binary_search(&ket).ok()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn purity(&self) -> f64 {
        linalg::purity(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn entry(&self, row: OccupationState, col: OccupationState) -> Complex64 {
        match (self.index_of(row), self.index_of(col)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::default(),
        }
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let h = linalg::hermiticity_defect(&self.matrix);
        if h > tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {h:e})"
            )));
        }
        let tr = linalg::trace(&self.matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}
