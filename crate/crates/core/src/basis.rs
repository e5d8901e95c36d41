//! Single-particle orbital basis and occupation-number kets.
//!
//! Orbitals are ordered mode-major: orbital `mode * internal_dim + level`.
//! Every fermionic sign in the crate is computed against this ordering.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest single-particle dimension representable by an [`OccupationState`].
pub const MAX_ORBITALS: usize = 64;

/// Orbitals = (spatial mode) x (internal level), mode-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitalBasis {
    spatial_modes: Vec<String>,
    internal_dim: usize,
}

impl OrbitalBasis {
    pub fn new<S: Into<String>>(
        spatial_modes: impl IntoIterator<Item = S>,
        internal_dim: usize,
    ) -> Result<Self> {
        let spatial_modes: Vec<String> = spatial_modes.into_iter().map(Into::into).collect();
        if spatial_modes.is_empty() || internal_dim == 0 {
            return Err(Error::InvalidArgument(
                "basis needs at least one mode and one internal level".into(),
            ));
        }
        for (i, m) in spatial_modes.iter().enumerate() {
            if spatial_modes[..i].contains(m) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate mode label `{m}`"
                )));
            }
        }
        let dim = spatial_modes.len() * internal_dim;
        if dim > MAX_ORBITALS {
            return Err(Error::InvalidArgument(format!(
                "basis dimension {dim} exceeds {MAX_ORBITALS}"
            )));
        }
        Ok(Self {
            spatial_modes,
            internal_dim,
        })
    }

    /// The double-well basis `{A, B} x {0..internal_dim}`.
    pub fn double_well(internal_dim: usize) -> Result<Self> {
        Self::new(["A", "B"], internal_dim)
    }

    /// Total orbital count `d`.
    pub fn dim(&self) -> usize {
        self.spatial_modes.len() * self.internal_dim
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn num_modes(&self) -> usize {
        self.spatial_modes.len()
    }

    pub fn spatial_modes(&self) -> &[String] {
        &self.spatial_modes
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.spatial_modes
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn orbital(&self, mode: usize, level: usize) -> Result<usize> {
        if mode >= self.num_modes() || level >= self.internal_dim {
            return Err(Error::OrbitalOutOfRange {
                index: mode * self.internal_dim + level,
                dim: self.dim(),
            });
        }
        Ok(mode * self.internal_dim + level)
    }

    /// `(mode, level)` of an orbital index.
    pub fn split(&self, orbital: usize) -> Result<(usize, usize)> {
        self.check_orbital(orbital)?;
        Ok((orbital / self.internal_dim, orbital % self.internal_dim))
    }

    pub fn mode_of(&self, orbital: usize) -> usize {
        orbital / self.internal_dim
    }

    pub fn check_orbital(&self, orbital: usize) -> Result<()> {
        if orbital >= self.dim() {
            Err(Error::OrbitalOutOfRange {
                index: orbital,
                dim: self.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// Bitmask of the orbitals belonging to one spatial mode.
    pub fn mode_mask(&self, mode: usize) -> u64 {
        let n = self.internal_dim;
        let ones = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        ones << (mode * n)
    }

    pub fn orbital_label(&self, orbital: usize) -> String {
        let (m, l) = (orbital / self.internal_dim, orbital % self.internal_dim);
        format!("{}{}", self.spatial_modes[m], l)
    }

    /// All `N`-particle kets in canonical (lexicographic) order.
    pub fn sector(&self, n_particles: usize) -> Vec<OccupationState> {
        let d = self.dim();
        let all = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
        OccupationState::from_mask(all).subsets(n_particles)
    }
}

/// Set of occupied orbitals, stored as a bitmask.
///
/// Ordering is lexicographic on the ascending list of occupied orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OccupationState(u64);

impl OccupationState {
    pub const VACUUM: Self = Self(0);

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn from_orbitals(orbitals: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &o in orbitals {
            if o >= MAX_ORBITALS {
                return Err(Error::OrbitalOutOfRange {
                    index: o,
                    dim: MAX_ORBITALS,
                });
            }
            if mask & (1 << o) != 0 {
                return Err(Error::DuplicateOrbital(o));
            }
            mask |= 1 << o;
        }
        Ok(Self(mask))
    }

    fn from_sorted_unchecked(orbitals: &[usize]) -> Self {
        Self(orbitals.iter().fold(0, |m, &o| m | (1 << o)))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, orbital: usize) -> bool {
        orbital < MAX_ORBITALS && self.0 & (1 << orbital) != 0
    }

    /// Occupied orbitals strictly below `orbital`.
    pub fn count_below(self, orbital: usize) -> usize {
        let below = if orbital >= 64 {
            u64::MAX
        } else {
            (1u64 << orbital) - 1
        };
        (self.0 & below).count_ones() as usize
    }

    pub fn with(self, orbital: usize) -> Self {
        Self(self.0 | (1 << orbital))
    }

    pub fn without(self, orbital: usize) -> Self {
        Self(self.0 & !(1 << orbital))
    }

    pub fn count_in(self, mask: u64) -> usize {
        (self.0 & mask).count_ones() as usize
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn orbitals(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.orbitals().collect()
    }

    /// All subsets of this set with `k` elements, in lexicographic order.
    pub fn subsets(self, k: usize) -> Vec<Self> {
        let orbs = self.to_vec();
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(k);
        fn rec(
            orbs: &[usize],
            start: usize,
            k: usize,
            pick: &mut Vec<usize>,
            out: &mut Vec<OccupationState>,
        ) {
            if pick.len() == k {
                out.push(OccupationState::from_sorted_unchecked(pick));
                return;
            }
            for i in start..orbs.len() {
                if orbs.len() - i < k - pick.len() {
                    break;
                }
                pick.push(orbs[i]);
                rec(orbs, i + 1, k, pick, out);
                pick.pop();
            }
        }
        rec(&orbs, 0, k, &mut pick, &mut out);
        out
    }

    /// Sign of `f†_{self} f†_{other} |0>` relative to the canonical ket of
    /// their union: `(-1)^{#{(s, t) : s > t}}`. Sets must be disjoint.
    pub fn merge_sign(self, other: Self) -> f64 {
        let swaps: usize = other.orbitals().map(|t| self.count_above(t)).sum();
        if swaps.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    fn count_above(self, orbital: usize) -> usize {
        if orbital >= 63 {
            return 0;
        }
        (self.0 >> (orbital + 1)).count_ones() as usize
    }
}

impl Ord for OccupationState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.orbitals().cmp(other.orbitals())
    }
}

impl PartialOrd for OccupationState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{{")?;
        for (i, o) in self.orbitals().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "}}>")
    }
}

/// Binomial coefficient.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
