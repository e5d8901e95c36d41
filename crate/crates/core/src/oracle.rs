//! Dense first-quantized tensors: a brute-force oracle for the Fock-space code.
//!
//! A tensor of `N` particles over a `d`-dimensional single-particle space is
//! stored row-major with particle 0 as the most significant index. Nothing in
//! here reuses the sign bookkeeping of [`crate::fock`]; antisymmetry comes from
//! explicit sums over permutations.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::basis::OrbitalBasis;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{self, CMatrix};

pub const MAX_ORACLE_PARTICLES: usize = 5;
pub const MAX_ORACLE_DIM: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FirstQuantizedTensor {
    n_particles: usize,
    dim: usize,
    data: Vec<Complex64>,
}

/// All permutations of `0..n` with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), permutation_sign(prefix)));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Sign of a permutation by inversion count.
pub fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl FirstQuantizedTensor {
    pub fn zeros(n_particles: usize, dim: usize) -> Result<Self> {
        if n_particles > MAX_ORACLE_PARTICLES || dim > MAX_ORACLE_DIM {
            return Err(Error::OracleTooLarge {
                n: n_particles,
                d: dim,
            });
        }
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "single-particle dimension must be positive".into(),
            ));
        }
        Ok(Self {
            n_particles,
            dim,
            data: vec![Complex64::default(); dim.pow(n_particles as u32)],
        })
    }

    /// `|k1> ⊗ |k2> ⊗ ...` for basis indices `kets`.
    pub fn product_of_basis(kets: &[usize], dim: usize) -> Result<Self> {
        let mut t = Self::zeros(kets.len(), dim)?;
        let idx = t.flat_index(kets)?;
        t.data[idx] = Complex64::new(1.0, 0.0);
        Ok(t)
    }

    /// Tensor product of single-particle vectors.
    pub fn product(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let dim = vectors.first().map(|v| v.len()).unwrap_or(1);
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidArgument("factor dimensions differ".into()));
        }
        let mut t = Self::zeros(vectors.len(), dim)?;
        for flat in 0..t.data.len() {
            let idx = t.multi_index(flat);
            t.data[flat] = idx.iter().zip(vectors).map(|(&i, v)| v[i]).product();
        }
        Ok(t)
    }

    pub fn from_entries(
        n_particles: usize,
        dim: usize,
        entries: &[(Vec<usize>, Complex64)],
    ) -> Result<Self> {
        let mut t = Self::zeros(n_particles, dim)?;
        for (idx, a) in entries {
            if idx.len() != n_particles {
                return Err(Error::ParticleNumberMismatch {
                    expected: n_particles,
                    found: idx.len(),
                });
            }
            let f = t.flat_index(idx)?;
            t.data[f] += a;
        }
        Ok(t)
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.flat_index(idx)
            .map(|f| self.data[f])
            .unwrap_or_default()
    }

    fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        idx.iter().try_fold(0usize, |acc, &i| {
            if i >= self.dim {
                Err(Error::OrbitalOutOfRange {
                    index: i,
                    dim: self.dim,
                })
            } else {
                Ok(acc * self.dim + i)
            }
        })
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n_particles];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|z| *z *= s);
        t
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n_particles != other.n_particles || self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.data.len(),
                found: other.data.len(),
            });
        }
        Ok(())
    }

    /// Tensor with particle slots permuted: `out[i_0..i_{N-1}] = t[i_{p(0)}..i_{p(N-1)}]`.
    pub fn permute_particles(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for flat in 0..self.data.len() {
            let idx = self.multi_index(flat);
            let src: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            out.data[flat] = self.data[self.flat_index(&src).expect("in range")];
        }
        out
    }

    /// Unnormalized antisymmetrizer: sum over all `N!` slot permutations weighted by sign.
    pub fn antisymmetrize(&self) -> Self {
        let mut out = self.scale(0.0);
        for (perm, sign) in signed_permutations(self.n_particles) {
            let p = self.permute_particles(&perm);
            for (o, x) in out.data.iter_mut().zip(&p.data) {
                *o += x * sign;
            }
        }
        out
    }

    /// `U ⊗ U ⊗ ... ⊗ U` applied to every particle slot.
    pub fn apply_single_particle(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.nrows(),
            });
        }
        let mut cur = self.clone();
        let d = self.dim;
        for slot in 0..self.n_particles {
            let stride = d.pow((self.n_particles - 1 - slot) as u32);
            let mut next = cur.scale(0.0);
            for flat in 0..cur.data.len() {
                let a = cur.data[flat];
                if a == Complex64::default() {
                    continue;
                }
                let i = (flat / stride) % d;
                let base = flat - i * stride;
                for j in 0..d {
                    next.data[base + j * stride] += u[(j, i)] * a;
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// `d^M x d^(N-M)` matrix over the (first M particles : rest) cut.
    pub fn bipartition_matrix(&self, m: usize) -> Result<CMatrix> {
        if m == 0 || m >= self.n_particles {
            return Err(Error::BipartitionOutOfRange {
                n: self.n_particles,
                m,
            });
        }
        let rows = self.dim.pow(m as u32);
        let cols = self.dim.pow((self.n_particles - m) as u32);
        Ok(CMatrix::from_row_slice(rows, cols, &self.data))
    }

    /// Probability of each count of particles per spatial mode.
    pub fn mode_counting(&self, basis: &OrbitalBasis) -> Result<BTreeMap<Vec<usize>, f64>> {
        if basis.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: self.dim,
            });
        }
        let total = self.norm_sqr();
        let mut out = BTreeMap::new();
        for flat in 0..self.data.len() {
            let w = self.data[flat].norm_sqr();
            if w == 0.0 {
                continue;
            }
            let mut counts = vec![0; basis.num_modes()];
            for i in self.multi_index(flat) {
                counts[basis.mode_of(i)] += 1;
            }
            *out.entry(counts).or_insert(0.0) += w / total;
        }
        Ok(out)
    }
}

/// First-quantized image of a Fock vector: `|S> -> (1/sqrt(N!)) A(|s1, ..., sN>)`, `s1 < ... < sN`.
pub fn to_first_quantized(v: &FockVector) -> Result<FirstQuantizedTensor> {
    let n = v.n_particles();
    let mut t = FirstQuantizedTensor::zeros(n, v.basis().dim())?;
    let perms = signed_permutations(n);
    let norm = factorial(n).sqrt();
    for (ket, a) in v.iter() {
        let orbs = ket.to_vec();
        for (perm, sign) in &perms {
            let idx: Vec<usize> = perm.iter().map(|&p| orbs[p]).collect();
            let f = t.flat_index(&idx)?;
            t.data[f] += a * (sign / norm);
        }
    }
    Ok(t)
}

/// Singular values of the (first M : remaining) particle cut, descending.
pub fn particle_bipartition_svd(t: &FirstQuantizedTensor, m: usize) -> Result<Vec<f64>> {
    Ok(linalg::singular_values(&t.bipartition_matrix(m)?))
}

/// Reduced state of the first `M` particle slots.
pub fn reduced_density_firstq(t: &FirstQuantizedTensor, m: usize) -> Result<CMatrix> {
    let r = t.bipartition_matrix(m)?;
    Ok(&r * r.adjoint())
}
