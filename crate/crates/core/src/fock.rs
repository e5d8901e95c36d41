//! Antisymmetric N-fermion states in occupation-number form.
//!
//! The canonical ket for an occupied set `S` is `f†_{s1} f†_{s2} ... |0>` with
//! `s1 < s2 < ...`. Creating orbital `i` on such a ket therefore picks up
//! `(-1)^{#occupied below i}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{OccupationState, OrbitalBasis};
use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-14;

/// Absolute tolerance for complex equality checks.
pub const EQ_TOL: f64 = 1e-10;

/// Sparse complex amplitudes over the `N`-particle kets of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    basis: OrbitalBasis,
    n_particles: usize,
    amplitudes: BTreeMap<OccupationState, Complex64>,
}

impl FockVector {
    pub fn zero(basis: &OrbitalBasis, n_particles: usize) -> Self {
        Self {
            basis: basis.clone(),
            n_particles,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn vacuum(basis: &OrbitalBasis) -> Self {
        let mut v = Self::zero(basis, 0);
        v.amplitudes
            .insert(OccupationState::VACUUM, Complex64::new(1.0, 0.0));
        v
    }

    /// Builds a vector from `(ket, amplitude)` pairs; repeated kets accumulate.
    pub fn from_amplitudes(
        basis: &OrbitalBasis,
        n_particles: usize,
        entries: impl IntoIterator<Item = (OccupationState, Complex64)>,
    ) -> Result<Self> {
        let mut v = Self::zero(basis, n_particles);
        for (ket, amp) in entries {
            if ket.len() != n_particles {
                return Err(Error::ParticleNumberMismatch {
                    expected: n_particles,
                    found: ket.len(),
                });
            }
            if let Some(top) = ket.orbitals().last() {
                basis.check_orbital(top)?;
            }
            *v.amplitudes.entry(ket).or_default() += amp;
        }
        v.prune();
        Ok(v)
    }

    /// `f†_{i1} ... f†_{iN} |0>` in the given creation order.
    pub fn slater(basis: &OrbitalBasis, orbitals: &[usize]) -> Result<Self> {
        let mut seen = OccupationState::VACUUM;
        for &o in orbitals {
            basis.check_orbital(o)?;
            if seen.contains(o) {
                return Err(Error::DuplicateOrbital(o));
            }
            seen = seen.with(o);
        }
        let mut v = Self::vacuum(basis);
        for &o in orbitals.iter().rev() {
            v = v.apply_creation(o)?;
        }
        Ok(v)
    }

    pub fn basis(&self) -> &OrbitalBasis {
        &self.basis
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn amplitude(&self, ket: OccupationState) -> Complex64 {
        self.amplitudes.get(&ket).copied().unwrap_or_default()
    }

    /// Nonzero amplitudes in canonical ket order.
    pub fn iter(&self) -> impl Iterator<Item = (OccupationState, Complex64)> + '_ {
        self.amplitudes.iter().map(|(k, a)| (*k, *a))
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy; the zero vector stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut v = self.clone();
        for a in v.amplitudes.values_mut() {
            *a *= factor;
        }
        v.prune();
        v
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut v = self.clone();
        for (k, a) in other.iter() {
            *v.amplitudes.entry(k).or_default() += a;
        }
        v.prune();
        Ok(v)
    }

    /// Keeps only the kets accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(OccupationState) -> bool) -> Self {
        let mut v = Self::zero(&self.basis, self.n_particles);
        v.amplitudes = self
            .amplitudes
            .iter()
            .filter(|(k, _)| keep(**k))
            .map(|(k, a)| (*k, *a))
            .collect();
        v
    }

    pub fn apply_creation(&self, orbital: usize) -> Result<Self> {
        self.basis.check_orbital(orbital)?;
        let mut out = Self::zero(&self.basis, self.n_particles + 1);
        for (k, a) in self.iter() {
            if k.contains(orbital) {
                continue;
            }
            let amp = if k.count_below(orbital) % 2 == 0 {
                a
            } else {
                -a
            };
            out.amplitudes.insert(k.with(orbital), amp);
        }
        Ok(out)
    }

    pub fn apply_annihilation(&self, orbital: usize) -> Result<Self> {
        self.basis.check_orbital(orbital)?;
        if self.n_particles == 0 {
            return Err(Error::InvalidArgument(
                "cannot annihilate a particle from the vacuum sector".into(),
            ));
        }
        let mut out = Self::zero(&self.basis, self.n_particles - 1);
        for (k, a) in self.iter() {
            if !k.contains(orbital) {
                continue;
            }
            let amp = if k.count_below(orbital) % 2 == 0 {
                a
            } else {
                -a
            };
            out.amplitudes.insert(k.without(orbital), amp);
        }
        Ok(out)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let (small, large, conj_small) = if self.support_len() <= other.support_len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::default();
        for (k, a) in small.iter() {
            if let Some(b) = large.amplitudes.get(&k) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    /// `|<u|v>|^2 / (|u|^2 |v|^2)`; zero if either vector vanishes.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let ip = self.inner_product(other)?;
        let den = self.norm_sqr() * other.norm_sqr();
        Ok(if den == 0.0 { 0.0 } else { ip.norm_sqr() / den })
    }

    /// Componentwise equality within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.basis != other.basis || self.n_particles != other.n_particles {
            return false;
        }
        let keys = self.amplitudes.keys().chain(other.amplitudes.keys());
        keys.into_iter()
            .all(|k| (self.amplitude(*k) - other.amplitude(*k)).norm() <= tol)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        if self.n_particles != other.n_particles {
            return Err(Error::ParticleNumberMismatch {
                expected: self.n_particles,
                found: other.n_particles,
            });
        }
        Ok(())
    }

    /// Number of particles each ket places in `mode`, if that number is the same for all kets.
    pub fn definite_mode_count(&self, mode: usize) -> Option<usize> {
        let mask = self.basis.mode_mask(mode);
        let mut counts = self.amplitudes.keys().map(|k| k.count_in(mask));
        let first = counts.next()?;
        counts.all(|c| c == first).then_some(first)
    }

    pub(crate) fn insert_raw(&mut self, ket: OccupationState, amp: Complex64) {
        *self.amplitudes.entry(ket).or_default() += amp;
    }

    pub(crate) fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_TOL);
    }

    pub fn to_json_value(&self) -> FockVectorJson {
        FockVectorJson {
            basis: BasisDescriptor {
                spatial_modes: self.basis.spatial_modes().to_vec(),
                internal_dim: self.basis.internal_dim(),
            },
            n_particles: self.n_particles,
            amplitudes: self
                .iter()
                .map(|(k, a)| KetAmplitude {
                    occupied: k.to_vec(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }

    /// Canonical JSON: amplitudes sorted lexicographically by occupied orbitals.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("FockVector serializes")
    }

    pub fn from_json_value(j: &FockVectorJson) -> Result<Self> {
        let basis = OrbitalBasis::new(j.basis.spatial_modes.iter().cloned(), j.basis.internal_dim)?;
        let entries = j
            .amplitudes
            .iter()
            .map(|e| {
                Ok((
                    OccupationState::from_orbitals(&e.occupied)?,
                    Complex64::new(e.re, e.im),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_amplitudes(&basis, j.n_particles, entries)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: FockVectorJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::from_json_value(&j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub spatial_modes: Vec<String>,
    pub internal_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetAmplitude {
    pub occupied: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVectorJson {
    pub basis: BasisDescriptor,
    pub n_particles: usize,
    pub amplitudes: Vec<KetAmplitude>,
}
