//! Single-particle unitaries lifted to Fock space, mode-count projection and
//! counting statistics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::OrbitalBasis;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{self, CMatrix};

/// `d x d` unitary on the single-particle space.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleUnitary {
    basis: OrbitalBasis,
    matrix: CMatrix,
}

impl SingleParticleUnitary {
    pub fn new(basis: &OrbitalBasis, matrix: CMatrix, tol: f64) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        let defect = linalg::unitarity_defect(&matrix);
        if defect > tol {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self {
            basis: basis.clone(),
            matrix,
        })
    }

    pub fn identity(basis: &OrbitalBasis) -> Self {
        let d = basis.dim();
        Self {
            basis: basis.clone(),
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn basis(&self) -> &OrbitalBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if self.basis != first.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix * &first.matrix,
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Double-well splitter acting identically on every internal level:
/// `|A,s> -> sqrt(1-p)|A,s> + sqrt(p)|B,s>`, `|B,s> -> sqrt(1-p)|B,s> - sqrt(p)|A,s>`.
///
/// `forward = false` gives the inverse splitter.
pub fn make_split(basis: &OrbitalBasis, p: f64, forward: bool) -> Result<SingleParticleUnitary> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "splitting probability {p} outside [0, 1]"
        )));
    }
    if basis.num_modes() != 2 {
        return Err(Error::Unsupported(
            "splitter needs exactly two spatial modes".into(),
        ));
    }
    let d = basis.dim();
    let (stay, hop) = ((1.0 - p).sqrt(), p.sqrt());
    let mut m = CMatrix::zeros(d, d);
    for level in 0..basis.internal_dim() {
        let a = basis.orbital(0, level)?;
        let b = basis.orbital(1, level)?;
        m[(a, a)] = Complex64::new(stay, 0.0);
        m[(b, a)] = Complex64::new(hop, 0.0);
        m[(b, b)] = Complex64::new(stay, 0.0);
        m[(a, b)] = Complex64::new(-hop, 0.0);
    }
    if !forward {
        m = m.transpose();
    }
    Ok(SingleParticleUnitary {
        basis: basis.clone(),
        matrix: m,
    })
}

/// Replaces every creation operator `f†_k` by `sum_j u[j,k] f†_j` and re-expands.
pub fn lift_unitary(u: &SingleParticleUnitary, v: &FockVector) -> Result<FockVector> {
    if u.basis != *v.basis() {
        return Err(Error::DimensionMismatch {
            expected: v.basis().dim(),
            found: u.basis.dim(),
        });
    }
    let d = u.basis.dim();
    let mut out = FockVector::zero(v.basis(), v.n_particles());
    for (ket, amp) in v.iter() {
        // build f'†_{k1} ... f'†_{kN} |0>, innermost operator first
        let mut acc = FockVector::vacuum(v.basis()).scale(amp);
        for k in ket.to_vec().into_iter().rev() {
            let mut next = FockVector::zero(v.basis(), acc.n_particles() + 1);
            for j in 0..d {
                let c = u.matrix[(j, k)];
                if c.norm() < crate::fock::PRUNE_TOL {
                    continue;
                }
                next = next.add(&acc.apply_creation(j)?.scale(c))?;
            }
            acc = next;
        }
        for (k, a) in acc.iter() {
            out.insert_raw(k, a);
        }
    }
    out.prune();
    Ok(out)
}

/// Keeps the kets with exactly `count` particles in `mode`.
///
/// Returns the normalized projected state and the Born probability (relative
/// to the norm of `v`). A zero-probability outcome yields the zero vector.
pub fn project_mode_count(v: &FockVector, mode: &str, count: usize) -> Result<(FockVector, f64)> {
    let mode = v.basis().mode_index(mode)?;
    project_mode_index_count(v, mode, count)
}

pub fn project_mode_index_count(
    v: &FockVector,
    mode: usize,
    count: usize,
) -> Result<(FockVector, f64)> {
    if mode >= v.basis().num_modes() {
        return Err(Error::UnknownMode(mode.to_string()));
    }
    let mask = v.basis().mode_mask(mode);
    let kept = v.filter(|k| k.count_in(mask) == count);
    let total = v.norm_sqr();
    let prob = if total == 0.0 {
        0.0
    } else {
        kept.norm_sqr() / total
    };
    Ok((kept.normalized(), prob))
}

/// Probability of each `(n_A, n_B)` outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingDistribution {
    probabilities: BTreeMap<(usize, usize), f64>,
}

impl CountingDistribution {
    pub fn from_map(probabilities: BTreeMap<(usize, usize), f64>) -> Self {
        Self { probabilities }
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        self.probabilities.get(&(n_a, n_b)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.probabilities.iter().map(|(k, v)| (*k, *v))
    }

    /// Both particles of a pair in the first mode, second mode, or one each.
    pub fn pair_probabilities(&self) -> (f64, f64, f64) {
        (self.get(2, 0), self.get(0, 2), self.get(1, 1))
    }
}

pub fn counting_statistics(v: &FockVector) -> Result<CountingDistribution> {
    let basis = v.basis();
    if basis.num_modes() != 2 {
        return Err(Error::Unsupported(
            "counting statistics need two spatial modes".into(),
        ));
    }
    let (ma, mb) = (basis.mode_mask(0), basis.mode_mask(1));
    let total = v.norm_sqr();
    let mut probs = BTreeMap::new();
    for (k, a) in v.iter() {
        *probs.entry((k.count_in(ma), k.count_in(mb))).or_insert(0.0) += a.norm_sqr() / total;
    }
    Ok(CountingDistribution::from_map(probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::OccupationState;

    fn ket(o: &[usize]) -> OccupationState {
        OccupationState::from_orbitals(o).unwrap()
    }

    #[test]
    fn split_limits() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let id = make_split(&b, 0.0, true).unwrap();
        assert!((id.matrix() - CMatrix::identity(4, 4)).norm() < 1e-15);
        let swap = make_split(&b, 1.0, true).unwrap();
        // A0 -> B0, B0 -> -A0
        assert_eq!(swap.matrix()[(2, 0)].re, 1.0);
        assert_eq!(swap.matrix()[(0, 2)].re, -1.0);
        assert_eq!(swap.matrix()[(0, 0)].re, 0.0);
        assert!(make_split(&b, 1.5, true).is_err());
        assert!(make_split(&b, -0.1, true).is_err());
        assert!(make_split(&b, f64::NAN, true).is_err());
    }

    #[test]
    fn split_is_orthogonal_and_backward_inverts() {
        let b = OrbitalBasis::double_well(3).unwrap();
        for p in [0.0, 0.2, 0.5, 0.9] {
            let u = make_split(&b, p, true).unwrap();
            assert!(linalg::unitarity_defect(u.matrix()) < 1e-14);
            let back = make_split(&b, p, false).unwrap();
            let id = back.compose(&u).unwrap();
            assert!((id.matrix() - CMatrix::identity(6, 6)).norm() < 1e-14);
        }
    }

    #[test]
    fn balanced_split_twice() {
        // 2x2 block [[c, -s], [s, c]] with c = s = 1/sqrt2; squared = [[0, -1], [1, 0]]
        let b = OrbitalBasis::double_well(1).unwrap();
        let u = make_split(&b, 0.5, true).unwrap();
        let v = FockVector::slater(&b, &[0]).unwrap();
        let out = lift_unitary(&u, &lift_unitary(&u, &v).unwrap()).unwrap();
        let (_, pa) = project_mode_count(&out, "A", 1).unwrap();
        let (_, pb) = project_mode_count(&out, "B", 1).unwrap();
        assert!(pa.abs() < 1e-15);
        assert!((pb - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_identity_is_noop() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let v = FockVector::from_amplitudes(
            &b,
            2,
            [
                (ket(&[0, 3]), Complex64::new(0.6, 0.0)),
                (ket(&[1, 2]), Complex64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        let w = lift_unitary(&SingleParticleUnitary::identity(&b), &v).unwrap();
        assert!(w.approx_eq(&v, 1e-15));
    }

    #[test]
    fn lift_rejects_mismatched_basis() {
        let b2 = OrbitalBasis::double_well(2).unwrap();
        let b3 = OrbitalBasis::double_well(3).unwrap();
        let v = FockVector::slater(&b2, &[0]).unwrap();
        let u = SingleParticleUnitary::identity(&b3);
        assert!(lift_unitary(&u, &v).is_err());
        assert!(SingleParticleUnitary::new(&b2, CMatrix::identity(3, 3), 1e-10).is_err());
        let mut m = CMatrix::identity(4, 4);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(SingleParticleUnitary::new(&b2, m, 1e-10).is_err());
    }

    #[test]
    fn two_electron_final_state_amplitudes() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let init = FockVector::slater(&b, &[0, 1]).unwrap();
        for p in [0.0, 0.25, 0.7, 1.0] {
            let fin = lift_unitary(&make_split(&b, p, true).unwrap(), &init).unwrap();
            let q = (p * (1.0 - p)).sqrt();
            let expect = [
                (vec![0, 1], 1.0 - p),
                (vec![0, 3], q),
                (vec![1, 2], -q),
                (vec![2, 3], p),
            ];
            for (o, a) in expect {
                assert!(
                    (fin.amplitude(ket(&o)) - Complex64::new(a, 0.0)).norm() < 1e-12,
                    "p={p} {o:?}"
                );
            }
            assert!((fin.amplitude(ket(&[0, 2])).norm()) < 1e-12);
            assert!((fin.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_outcomes() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let init = FockVector::slater(&b, &[0, 1]).unwrap();
        let (same, prob) = project_mode_count(&init, "A", 2).unwrap();
        assert!(same.approx_eq(&init, 1e-15));
        assert_eq!(prob, 1.0);
        let (zero, prob) = project_mode_count(&init, "A", 1).unwrap();
        assert!(zero.is_zero());
        assert_eq!(prob, 0.0);
        assert!(project_mode_count(&init, "Z", 1).is_err());
    }

    #[test]
    fn counting_of_initial_state() {
        let b = OrbitalBasis::double_well(2).unwrap();
        let init = FockVector::slater(&b, &[0, 1]).unwrap();
        let c = counting_statistics(&init).unwrap();
        assert_eq!(c.get(2, 0), 1.0);
        assert_eq!(c.iter().count(), 1);
    }
}
