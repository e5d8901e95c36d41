//! Particle-bipartition analysis of N-fermion states: reduced density
//! matrices, Schmidt decomposition, the Slater test and the effective
//! distinguishable-party states.
//!
//! The (M : N-M) cut of a canonical ket `|K>` splits as
//! `|K> = C(N,M)^{-1/2} sum_{S ⊂ K, |S| = M} sign(S, K\S) |S> ⊗ |K\S>`
//! where `|S>`, `|K\S>` are normalized Slater determinants of the smaller
//! systems and `sign` is the parity of merging the two ascending lists.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{binomial, OccupationState};
use crate::density::SectorDensity;
use crate::error::{Error, Result};
use crate::fock::{FockVector, FockVectorJson, PRUNE_TOL};
use crate::linalg::{self, CMatrix};

/// Singular values below this count as zero when computing Schmidt ranks.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Coefficient matrix of a state across the (M : N-M) particle cut, stored sparsely.
#[derive(Debug, Clone)]
pub struct ParticleCut {
    pub m: usize,
    pub left: Vec<OccupationState>,
    pub right: Vec<OccupationState>,
    pub entries: BTreeMap<(usize, usize), Complex64>,
}

impl ParticleCut {
    pub fn new(v: &FockVector, m: usize) -> Result<Self> {
        let n = v.n_particles();
        if m == 0 || m >= n {
            return Err(Error::BipartitionOutOfRange { n, m });
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "zero state has no reduced density".into(),
            ));
        }
        let scale = 1.0 / ((binomial(n, m) as f64).sqrt() * norm);
        let mut raw: BTreeMap<(OccupationState, OccupationState), Complex64> = BTreeMap::new();
        for (ket, a) in v.iter() {
            for s in ket.subsets(m) {
                let t = OccupationState::from_mask(ket.mask() & !s.mask());
                *raw.entry((s, t)).or_default() += a * (s.merge_sign(t) * scale);
            }
        }
        let mut left: Vec<_> = raw.keys().map(|(s, _)| *s).collect();
        left.sort();
        left.dedup();
        let mut right: Vec<_> = raw.keys().map(|(_, t)| *t).collect();
        right.sort();
        right.dedup();
        let entries = raw
            .into_iter()
            .filter(|(_, a)| a.norm() >= PRUNE_TOL)
            .map(|((s, t), a)| {
                let i = left.binary_search(&s).expect("collected");
                let j = right.binary_search(&t).expect("collected");
                ((i, j), a)
            })
            .collect();
        Ok(Self {
            m,
            left,
            right,
            entries,
        })
    }

    pub fn dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.left.len(), self.right.len());
        for ((i, j), a) in &self.entries {
            out[(*i, *j)] = *a;
        }
        out
    }

    /// Connected blocks of the bipartite row/column graph, as (rows, cols).
    fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let nl = self.left.len();
        let mut parent: Vec<usize> = (0..nl + self.right.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, j) in self.entries.keys() {
            let (a, b) = (find(&mut parent, *i), find(&mut parent, nl + *j));
            if a != b {
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (i, j) in self.entries.keys() {
            let root = find(&mut parent, *i);
            let g = groups.entry(root).or_default();
            g.0.push(*i);
            g.1.push(*j);
        }
        groups
            .into_values()
            .map(|(mut r, mut c)| {
                r.sort();
                r.dedup();
                c.sort();
                c.dedup();
                (r, c)
            })
            .collect()
    }
}

/// One term `lambda |left> ⊗ |right>` of a Schmidt decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtEntry {
    pub lambda: f64,
    /// Particles of the left factor in the first spatial mode, when definite.
    pub n: Option<usize>,
    pub left: FockVector,
    pub right: FockVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtResult {
    pub m: usize,
    pub entries: Vec<SchmidtEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtEntryJson {
    pub n: Option<usize>,
    pub lambda: f64,
    pub left: FockVectorJson,
    pub right: FockVectorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtResultJson {
    pub m: usize,
    pub entries: Vec<SchmidtEntryJson>,
}

impl SchmidtResult {
    /// Coefficients, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.entries.iter().map(|e| e.lambda).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn rank(&self, threshold: f64) -> usize {
        linalg::numerical_rank(&self.spectrum(), threshold)
    }

    /// Entries sorted by `(n, lambda descending, labels)`.
    pub fn to_json_value(&self) -> SchmidtResultJson {
        let mut entries: Vec<SchmidtEntryJson> = self
            .entries
            .iter()
            .map(|e| SchmidtEntryJson {
                n: e.n,
                lambda: e.lambda,
                left: e.left.to_json_value(),
                right: e.right.to_json_value(),
            })
            .collect();
        let label = |f: &FockVectorJson| -> Vec<Vec<usize>> {
            f.amplitudes.iter().map(|a| a.occupied.clone()).collect()
        };
        entries.sort_by(|a, b| {
            a.n.unwrap_or(usize::MAX)
                .cmp(&b.n.unwrap_or(usize::MAX))
                .then(b.lambda.total_cmp(&a.lambda))
                .then_with(|| label(&a.left).cmp(&label(&b.left)))
                .then_with(|| label(&a.right).cmp(&label(&b.right)))
        });
        SchmidtResultJson { m: self.m, entries }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("SchmidtResult serializes")
    }
}

/// Schmidt decomposition across the (M : N-M) particle cut.
///
/// The cut matrix is split into its connected blocks before the SVD, so
/// each left factor is supported on kets that share one sector.
pub fn schmidt_decomposition(v: &FockVector, m: usize) -> Result<SchmidtResult> {
    let cut = ParticleCut::new(v, m)?;
    let basis = v.basis();
    let n_right = v.n_particles() - m;
    let mut entries = Vec::new();
    for (rows, cols) in cut.blocks() {
        let mut block = CMatrix::zeros(rows.len(), cols.len());
        for (bi, &i) in rows.iter().enumerate() {
            for (bj, &j) in cols.iter().enumerate() {
                if let Some(a) = cut.entries.get(&(i, j)) {
                    block[(bi, bj)] = *a;
                }
            }
        }
        let svd = block.svd(true, true);
        let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        for (k, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma < PRUNE_TOL {
                continue;
            }
            let left = FockVector::from_amplitudes(
                basis,
                m,
                rows.iter()
                    .enumerate()
                    .map(|(bi, &i)| (cut.left[i], u[(bi, k)])),
            )?;
            let right = FockVector::from_amplitudes(
                basis,
                n_right,
                cols.iter()
                    .enumerate()
                    .map(|(bj, &j)| (cut.right[j], vt[(k, bj)])),
            )?;
            entries.push(SchmidtEntry {
                lambda: sigma,
                n: left.definite_mode_count(0),
                left,
                right,
            });
        }
    }
    entries.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    Ok(SchmidtResult { m, entries })
}

/// Schmidt coefficients across the (M : N-M) particle cut, descending.
pub fn schmidt_spectrum(v: &FockVector, m: usize) -> Result<Vec<f64>> {
    Ok(schmidt_decomposition(v, m)?.spectrum())
}

/// M-particle reduced density matrix on the full `C(d, M)`-dimensional sector.
pub fn m_particle_rdm(v: &FockVector, m: usize) -> Result<SectorDensity> {
    let cut = ParticleCut::new(v, m)?;
    let states = v.basis().sector(m);
    let mut phi = CMatrix::zeros(states.len(), cut.right.len());
    for ((i, j), a) in &cut.entries {
        let row = states
            .binary_search(&cut.left[*i])
            .expect("left ket in sector");
        phi[(row, *j)] = *a;
    }
    Ok(SectorDensity {
        basis: v.basis().clone(),
        n_particles: m,
        matrix: &phi * phi.adjoint(),
        states,
    })
}

/// `Tr rho_M^2`.
pub fn purity(v: &FockVector, m: usize) -> Result<f64> {
    // Tr (Phi Phi†)^2 = Tr (Phi† Phi)^2; the cut matrix is usually the smaller object
    let phi = ParticleCut::new(v, m)?.dense();
    let gram = phi.adjoint() * &phi;
    Ok(linalg::purity(&gram))
}

/// Pure-state Slater test: `Tr rho_M^2 = 1 / C(N, M)` within `tol`.
pub fn is_slater(v: &FockVector, m: usize, tol: f64) -> Result<bool> {
    let bound = 1.0 / binomial(v.n_particles(), m) as f64;
    Ok((purity(v, m)? - bound).abs() <= tol)
}

/// `1 - Tr rho_1^2`.
pub fn linear_entropy_single(v: &FockVector) -> Result<f64> {
    Ok(1.0 - purity(v, 1)?)
}

/// Alice (first mode, internal levels) x Bob (second mode) coefficient matrix
/// of a two-fermion state with one particle per well.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveBipartiteState {
    pub coefficients: CMatrix,
}

impl EffectiveBipartiteState {
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        linalg::singular_values(&self.coefficients)
    }

    /// `1 - sum_i lambda_i^2` with `lambda_i` the squared Schmidt coefficients.
    pub fn linear_entropy(&self) -> f64 {
        let a = &self.coefficients;
        1.0 - linalg::purity(&(a * a.adjoint()))
    }

    /// `|<other|self>|^2` for unit-norm coefficient matrices.
    pub fn fidelity(&self, other: &CMatrix) -> f64 {
        let ip: Complex64 = self
            .coefficients
            .iter()
            .zip(other.iter())
            .map(|(a, b)| b.conj() * a)
            .sum();
        ip.norm_sqr()
    }
}

fn require_two_modes(v: &FockVector) -> Result<()> {
    if v.basis().num_modes() != 2 {
        return Err(Error::Unsupported(
            "effective states need two spatial modes".into(),
        ));
    }
    Ok(())
}

/// `c_ij` with `|psi> = sum c_ij f†_{A_i} f†_{B_j} |0>`.
pub fn effective_state(v: &FockVector) -> Result<EffectiveBipartiteState> {
    require_two_modes(v)?;
    if v.n_particles() != 2 {
        return Err(Error::ParticleNumberMismatch {
            expected: 2,
            found: v.n_particles(),
        });
    }
    let general = effective_state_general(v, 1)?;
    let n = v.basis().internal_dim();
    let mut c = DMatrix::zeros(n, n);
    for ((alice, bob), a) in &general.amplitudes {
        c[(alice[0], bob[0])] = *a;
    }
    Ok(EffectiveBipartiteState { coefficients: c })
}

/// Amplitudes over (Alice's M internal labels : Bob's N-M internal labels).
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGeneralState {
    pub m: usize,
    pub amplitudes: BTreeMap<(Vec<usize>, Vec<usize>), Complex64>,
}

impl EffectiveGeneralState {
    /// Purity of Alice's reduced state; Alice's and Bob's label sets index
    /// orthonormal Slater states of their own wells.
    pub fn alice_purity(&self) -> f64 {
        let mut alice: Vec<&Vec<usize>> = self.amplitudes.keys().map(|(a, _)| a).collect();
        alice.sort();
        alice.dedup();
        let mut bob: Vec<&Vec<usize>> = self.amplitudes.keys().map(|(_, b)| b).collect();
        bob.sort();
        bob.dedup();
        let mut c = CMatrix::zeros(alice.len(), bob.len());
        for ((a, b), amp) in &self.amplitudes {
            let i = alice.binary_search(&a).expect("present");
            let j = bob.binary_search(&b).expect("present");
            c[(i, j)] = *amp;
        }
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        linalg::purity(&(&c * c.adjoint())) / (norm * norm)
    }
}

/// Relabels a state with exactly `M` particles in the first well as a
/// distinguishable-party state: `f†_{A_S} f†_{B_T}|0>` becomes `|S>_A ⊗ |T>_B`.
pub fn effective_state_general(v: &FockVector, m: usize) -> Result<EffectiveGeneralState> {
    require_two_modes(v)?;
    let basis = v.basis();
    let mask_a = basis.mode_mask(0);
    let mut amplitudes = BTreeMap::new();
    for (ket, a) in v.iter() {
        if ket.count_in(mask_a) != m {
            return Err(Error::WrongSector(format!(
                "{ket} does not have {m} particle(s) in mode {}",
                basis.spatial_modes()[0]
            )));
        }
        let mut alice = Vec::new();
        let mut bob = Vec::new();
        for o in ket.orbitals() {
            let (mode, level) = basis.split(o)?;
            if mode == 0 {
                alice.push(level);
            } else {
                bob.push(level);
            }
        }
        amplitudes.insert((alice, bob), a);
    }
    Ok(EffectiveGeneralState { m, amplitudes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::OrbitalBasis;
    use crate::transforms::{lift_unitary, make_split, project_mode_count};

    fn ket(o: &[usize]) -> OccupationState {
        OccupationState::from_orbitals(o).unwrap()
    }

    fn psi_proj() -> FockVector {
        let b = OrbitalBasis::double_well(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        FockVector::from_amplitudes(
            &b,
            2,
            [
                (ket(&[0, 3]), Complex64::new(s, 0.0)),
                (ket(&[1, 2]), Complex64::new(-s, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn slater_rdm_is_flat() {
        let b = OrbitalBasis::double_well(3).unwrap();
        let v = FockVector::slater(&b, &[4, 0, 2, 5]).unwrap();
        for m in 1..4 {
            let k = binomial(4, m) as f64;
            let rho = m_particle_rdm(&v, m).unwrap();
            rho.validate(1e-12).unwrap();
            let ev = rho.eigenvalues();
            assert!(ev[..k as usize].iter().all(|e| (e - 1.0 / k).abs() < 1e-12));
            assert!(ev[k as usize..].iter().all(|e| e.abs() < 1e-12));
            assert!(is_slater(&v, m, 1e-10).unwrap());
        }
    }

    #[test]
    fn projected_two_electron_state() {
        let v = psi_proj();
        let s = schmidt_spectrum(&v, 1).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|x| (x - 0.5).abs() < 1e-12));
        let rho = m_particle_rdm(&v, 1).unwrap();
        assert!(rho.eigenvalues().iter().all(|e| (e - 0.25).abs() < 1e-12));
        assert!(!is_slater(&v, 1, 1e-10).unwrap());
        assert!((linear_entropy_single(&v).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn final_state_is_slater() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let init = FockVector::slater(&b, &[0, 1]).unwrap();
        for p in [0.0, 0.3, 0.5, 1.0] {
            let fin = lift_unitary(&make_split(&b, p, true).unwrap(), &init).unwrap();
            assert!(is_slater(&fin, 1, 1e-10).unwrap());
            assert!((linear_entropy_single(&fin).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn superposition_of_two_slaters_is_not_slater() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let v = FockVector::slater(&b, &[0, 1])
            .unwrap()
            .add(&FockVector::slater(&b, &[2, 3]).unwrap())
            .unwrap()
            .normalized();
        assert!(!is_slater(&v, 1, 1e-10).unwrap());
    }

    #[test]
    fn bipartition_range_checked() {
        let v = psi_proj();
        assert!(schmidt_spectrum(&v, 0).is_err());
        assert!(schmidt_spectrum(&v, 2).is_err());
        assert!(m_particle_rdm(&v, 2).is_err());
    }

    #[test]
    fn effective_state_is_singlet() {
        let e = effective_state(&psi_proj()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        // rows: Alice level (0 = down, 1 = up); cols: Bob level
        assert!((e.coefficients[(0, 1)].re - s).abs() < 1e-15);
        assert!((e.coefficients[(1, 0)].re + s).abs() < 1e-15);
        assert!((e.linear_entropy() - 0.5).abs() < 1e-12);
        let full = linear_entropy_single(&psi_proj()).unwrap();
        assert!((full - (1.0 + e.linear_entropy()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn effective_state_of_product_slater() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let v = FockVector::slater(&b, &[0, 3]).unwrap();
        let e = effective_state(&v).unwrap();
        assert_eq!(e.coefficients[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(e.coefficients.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert!(e.linear_entropy().abs() < 1e-15);
    }

    #[test]
    fn effective_state_rejects_wrong_sector() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let v = FockVector::slater(&b, &[0, 1]).unwrap();
        assert!(matches!(effective_state(&v), Err(Error::WrongSector(_))));
    }

    #[test]
    fn effective_general_matches_two_particle_case() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let init = FockVector::slater(&b, &[0, 1]).unwrap();
        let fin = lift_unitary(&make_split(&b, 0.4, true).unwrap(), &init).unwrap();
        let (proj, _) = project_mode_count(&fin, "A", 1).unwrap();
        let g = effective_state_general(&proj, 1).unwrap();
        let e = effective_state(&proj).unwrap();
        for ((a, bb), amp) in &g.amplitudes {
            assert!((e.coefficients[(a[0], bb[0])] - amp).norm() < 1e-15);
        }
        assert!((g.alice_purity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schmidt_json_is_sorted() {
        let r = schmidt_decomposition(&psi_proj(), 1).unwrap();
        let j = r.to_json_value();
        assert_eq!(j.entries.len(), 4);
        let ns: Vec<_> = j.entries.iter().map(|e| e.n).collect();
        assert_eq!(ns, vec![Some(0), Some(0), Some(1), Some(1)]);
        let total: f64 = j.entries.iter().map(|e| e.lambda * e.lambda).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
