//! Toy particle counter: a cyclic `D`-level detector whose level advances by
//! one for every fermion found in the first well.
//!
//! The single-fermion generator `h` is the principal-branch logarithm of the
//! cyclic shift, so `exp(-i h tau)` is exactly `|n> -> |n+1 mod D>`. The
//! N-fermion interaction sums one copy of `|A><A| ⊗ h` per particle, which
//! on a ket with `n_A` particles in the first well acts as `n_A h`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{OccupationState, OrbitalBasis};
use crate::density::SectorDensity;
use crate::error::{Error, Result};
use crate::fock::{BasisDescriptor, FockVector, KetAmplitude, PRUNE_TOL};
use crate::linalg::{self, CMatrix};

/// Hermitian detector generator and interaction time.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorCoupling {
    levels: usize,
    tau: f64,
    generator: CMatrix,
}

impl DetectorCoupling {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }

    /// `exp(-i h t)` evaluated with a general matrix exponential.
    pub fn evolution(&self, t: f64) -> CMatrix {
        (&self.generator * Complex64::new(0.0, -t)).exp()
    }

    /// The cyclic shift by `k` levels.
    pub fn shift(&self, k: usize) -> CMatrix {
        let d = self.levels;
        let mut s = CMatrix::zeros(d, d);
        for n in 0..d {
            s[((n + k) % d, n)] = Complex64::new(1.0, 0.0);
        }
        s
    }
}

/// Builds `h` with `exp(-i h tau) = shift`.
///
/// The shift has eigenvectors `f_k = sum_n e^{-2 pi i k n / D} |n> / sqrt(D)`
/// with eigenvalues `e^{2 pi i k / D}`; the phase is taken in `(-pi, pi]`.
pub fn build_coupling(levels: usize, tau: f64) -> Result<DetectorCoupling> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "detector needs at least 2 levels, got {levels}"
        )));
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "interaction time must be positive, got {tau}"
        )));
    }
    let d = levels;
    let mut h = CMatrix::zeros(d, d);
    let norm = 1.0 / d as f64;
    for k in 0..d {
        let mut phase = 2.0 * PI * k as f64 / d as f64;
        if phase > PI {
            phase -= 2.0 * PI;
        }
        let energy = -phase / tau;
        for a in 0..d {
            for b in 0..d {
                // |f_k><f_k| entry (a, b)
                let angle =
                    -2.0 * PI * (k * a) as f64 / d as f64 + 2.0 * PI * (k * b) as f64 / d as f64;
                h[(a, b)] += Complex64::from_polar(energy * norm, angle);
            }
        }
    }
    // exact Hermitian symmetrization removes rounding asymmetry
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DetectorCoupling {
        levels,
        tau,
        generator: h,
    })
}

/// Fermion ⊗ detector amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    basis: OrbitalBasis,
    n_particles: usize,
    levels: usize,
    amplitudes: BTreeMap<(OccupationState, usize), Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAmplitude {
    #[serde(flatten)]
    pub ket: KetAmplitude,
    pub detector: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointStateJson {
    pub basis: BasisDescriptor,
    pub n_particles: usize,
    pub detector_levels: usize,
    pub amplitudes: Vec<JointAmplitude>,
}

impl JointState {
    /// `v ⊗ |level>`.
    pub fn product(v: &FockVector, levels: usize, level: usize) -> Result<Self> {
        if level >= levels {
            return Err(Error::InvalidArgument(format!(
                "detector level {level} out of range for {levels} levels"
            )));
        }
        Ok(Self {
            basis: v.basis().clone(),
            n_particles: v.n_particles(),
            levels,
            amplitudes: v.iter().map(|(k, a)| ((k, level), a)).collect(),
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn amplitude(&self, ket: OccupationState, level: usize) -> Complex64 {
        self.amplitudes
            .get(&(ket, level))
            .copied()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (OccupationState, usize, Complex64)> + '_ {
        self.amplitudes.iter().map(|((k, l), a)| (*k, *l, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `exp(-i H_int t)`; negative `t` runs the interaction backwards.
    pub fn evolve(&self, coupling: &DetectorCoupling, t: f64) -> Result<Self> {
        if coupling.levels != self.levels {
            return Err(Error::DimensionMismatch {
                expected: self.levels,
                found: coupling.levels,
            });
        }
        let mask = self.basis.mode_mask(0);
        let mut propagators: BTreeMap<usize, CMatrix> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for ((ket, level), a) in &self.amplitudes {
            let count = ket.count_in(mask);
            let u = propagators
                .entry(count)
                .or_insert_with(|| coupling.evolution(t * count as f64));
            for k in 0..self.levels {
                let c = u[(k, *level)] * a;
                *out.entry((*ket, k)).or_insert(Complex64::default()) += c;
            }
        }
        out.retain(|_, a: &mut Complex64| a.norm() >= PRUNE_TOL);
        Ok(Self {
            amplitudes: out,
            ..self.clone()
        })
    }

    pub fn to_json_value(&self) -> JointStateJson {
        let mut amplitudes: Vec<JointAmplitude> = self
            .iter()
            .map(|(k, l, a)| JointAmplitude {
                ket: KetAmplitude {
                    occupied: k.to_vec(),
                    re: a.re,
                    im: a.im,
                },
                detector: l,
            })
            .collect();
        amplitudes.sort_by(|a, b| {
            a.ket
                .occupied
                .cmp(&b.ket.occupied)
                .then(a.detector.cmp(&b.detector))
        });
        JointStateJson {
            basis: BasisDescriptor {
                spatial_modes: self.basis.spatial_modes().to_vec(),
                internal_dim: self.basis.internal_dim(),
            },
            n_particles: self.n_particles,
            detector_levels: self.levels,
            amplitudes,
        }
    }
}

/// Couples `v` to a detector prepared in `initial_level` for one interaction time.
pub fn interact(
    v: &FockVector,
    coupling: &DetectorCoupling,
    initial_level: usize,
) -> Result<JointState> {
    if v.basis().num_modes() != 2 {
        return Err(Error::Unsupported(
            "detector model needs two spatial modes".into(),
        ));
    }
    if coupling.levels < v.n_particles() + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} detector levels cannot count {} particles without wraparound",
            coupling.levels,
            v.n_particles()
        )));
    }
    JointState::product(v, coupling.levels, initial_level)?.evolve(coupling, coupling.tau)
}

/// Reduced fermion state after discarding the detector.
pub fn trace_out_detector(j: &JointState) -> SectorDensity {
    let states = j.basis.sector(j.n_particles);
    let d = states.len();
    let mut rho = CMatrix::zeros(d, d);
    for level in 0..j.levels {
        let col: Vec<Complex64> = states.iter().map(|k| j.amplitude(*k, level)).collect();
        if col.iter().all(|a| *a == Complex64::default()) {
            continue;
        }
        for r in 0..d {
            if col[r] == Complex64::default() {
                continue;
            }
            for c in 0..d {
                rho[(r, c)] += col[r] * col[c].conj();
            }
        }
    }
    let tr = linalg::trace(&rho).re;
    if tr > 0.0 {
        rho /= Complex64::new(tr, 0.0);
    }
    SectorDensity {
        basis: j.basis.clone(),
        n_particles: j.n_particles,
        states,
        matrix: rho,
    }
}

/// Projects the detector on `level`: normalized fermion state and Born probability.
pub fn readout(j: &JointState, level: usize) -> Result<(FockVector, f64)> {
    if level >= j.levels {
        return Err(Error::InvalidArgument(format!(
            "detector level {level} out of range for {} levels",
            j.levels
        )));
    }
    let v = FockVector::from_amplitudes(
        &j.basis,
        j.n_particles,
        j.iter()
            .filter(|(_, l, _)| *l == level)
            .map(|(k, _, a)| (k, a)),
    )?;
    let total = j.norm_sqr();
    let prob = if total == 0.0 {
        0.0
    } else {
        v.norm_sqr() / total
    };
    Ok((v.normalized(), prob))
}
