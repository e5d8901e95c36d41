//! Closed-form spectra, ranks and purities for the split-and-projected
//! N-fermion state, in exact rational arithmetic.
//!
//! Two families live here. The `predicted_*` functions evaluate the
//! multinomial formulas that count one Schmidt term per label partition.
//! The `projected_*` functions give the values a direct Schmidt
//! decomposition of the projected state actually yields. The two agree for `M = 1` and differ for `M >= 2`: for
//! fixed `n` and fixed set of right-hand labels, the `C(M, n)` left Slater
//! factors all pair with the same right-hand vector, so those terms merge
//! into one Schmidt term of weight `C(M, n)` times larger.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn big(n: u128) -> BigInt {
    BigInt::from(n)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn check(n: usize, m: usize) -> Result<()> {
    if m == 0 || 2 * m > n || n > 30 {
        return Err(Error::BipartitionOutOfRange { n, m });
    }
    Ok(())
}

/// `N! / (n! (M-n)! (N-M)!)`: ways to split `N` labels into sets of size `n`, `M-n`, `N-M`.
pub fn partition_count(n_total: usize, m: usize, n: usize) -> u128 {
    factorial(n_total) / (factorial(n) * factorial(m - n) * factorial(n_total - m))
}

/// A multiplicity together with an exact squared Schmidt coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumLevel {
    pub n: usize,
    pub multiplicity: u128,
    pub weight: BigRational,
}

impl SpectrumLevel {
    pub fn weight_f64(&self) -> f64 {
        self.weight.to_f64().unwrap_or(f64::NAN)
    }
}

/// Squared Schmidt coefficients `C(N-M, M-n) / C(N, M)^2` with multiplicity
/// `N!/(n!(M-n)!(N-M)!)`, one level per `n = 0..=M`.
pub fn predicted_spectrum(n_total: usize, m: usize) -> Result<Vec<SpectrumLevel>> {
    check(n_total, m)?;
    let c = binom(n_total, m);
    Ok((0..=m)
        .map(|n| SpectrumLevel {
            n,
            multiplicity: partition_count(n_total, m, n),
            weight: BigRational::new(big(binom(n_total - m, m - n)), big(c * c)),
        })
        .collect())
}

/// `sum_n N!/(n!(M-n)!(N-M)!) C(N-M, M-n)^2 C(N, M)^{-4}`.
pub fn predicted_purity(n_total: usize, m: usize) -> Result<BigRational> {
    check(n_total, m)?;
    let c = big(binom(n_total, m));
    let den = &c * &c * &c * &c;
    let num = (0..=m).fold(BigInt::zero(), |acc, n| {
        let b = big(binom(n_total - m, m - n));
        acc + big(partition_count(n_total, m, n)) * &b * &b
    });
    Ok(BigRational::new(num, den))
}

/// `sum_n N!/(n!(M-n)!(N-M)!)`, equal to `2^M C(N, M)`.
pub fn predicted_rank(n_total: usize, m: usize) -> Result<u128> {
    check(n_total, m)?;
    Ok((0..=m).map(|n| partition_count(n_total, m, n)).sum())
}

/// Schmidt levels of the projected state as obtained by direct decomposition:
/// `C(N, M)` terms per `n`, each of weight `C(M, n) C(N-M, M-n) / C(N, M)^2`.
pub fn projected_spectrum(n_total: usize, m: usize) -> Result<Vec<SpectrumLevel>> {
    check(n_total, m)?;
    let c = binom(n_total, m);
    Ok((0..=m)
        .map(|n| SpectrumLevel {
            n,
            multiplicity: c,
            weight: BigRational::new(big(binom(m, n) * binom(n_total - m, m - n)), big(c * c)),
        })
        .collect())
}

/// `(M + 1) C(N, M)`.
pub fn projected_rank(n_total: usize, m: usize) -> Result<u128> {
    check(n_total, m)?;
    Ok((m as u128 + 1) * binom(n_total, m))
}

/// `sum_n C(M, n)^2 C(N-M, M-n)^2 / C(N, M)^3`.
pub fn projected_purity(n_total: usize, m: usize) -> Result<BigRational> {
    let levels = projected_spectrum(n_total, m)?;
    Ok(levels.iter().fold(BigRational::zero(), |acc, l| {
        acc + BigRational::from_integer(big(l.multiplicity)) * &l.weight * &l.weight
    }))
}

/// `1 / C(N, M)`: purity of the M-particle reduction of any Slater determinant.
pub fn slater_purity(n_total: usize, m: usize) -> Result<BigRational> {
    if m == 0 || m >= n_total {
        return Err(Error::BipartitionOutOfRange { n: n_total, m });
    }
    Ok(BigRational::new(BigInt::one(), big(binom(n_total, m))))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
