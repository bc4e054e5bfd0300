//! Residue arithmetic and Chinese-remainder reconstruction into the band.

use alloc::format;
use alloc::vec::Vec;

use crate::band::{band_max, band_min};
use crate::primes::pairwise_coprime;
use crate::{Error, Result};

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::Domain(format!("modulus {m} must be at least 2")));
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// `omega mod m` in `[0, m)`, for negative frequencies too.
pub fn residue(omega: i64, m: u64) -> u64 {
    (omega as i128).rem_euclid(m as i128) as u64
}

/// Residues paired with pairwise-coprime moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueVector {
    residues: Vec<u64>,
    moduli: Vec<u64>,
}

impl ResidueVector {
    pub fn new(residues: Vec<u64>, moduli: Vec<u64>) -> Result<Self> {
        if residues.len() != moduli.len() || moduli.is_empty() {
            return Err(Error::Domain("residues and moduli must be non-empty and equally long".into()));
        }
        if let Some((r, m)) = residues.iter().zip(&moduli).find(|(&r, &m)| m == 0 || r >= m) {
            return Err(Error::Range(format!("residue {r} is not reduced modulo {m}")));
        }
        if !pairwise_coprime(&moduli) {
            return Err(Error::Domain("moduli are not pairwise coprime".into()));
        }
        Ok(Self { residues, moduli })
    }

    /// The residues of `omega` modulo each of `moduli`.
    pub fn of(omega: i64, moduli: &[u64]) -> Result<Self> {
        Self::new(moduli.iter().map(|&m| residue(omega, m)).collect(), moduli.to_vec())
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }
}

/// Garner reconstruction against a fixed modulus list.
///
/// Mixed-radix digits are accumulated only until the partial product reaches
/// the bandwidth. The band then holds at most one candidate, which is checked
/// against the remaining residues.
#[derive(Debug, Clone)]
pub struct Garner {
    moduli: Vec<u64>,
    /// `(m_0·…·m_{i-1})^{-1} mod m_i`.
    prefix_inverse: Vec<u64>,
}

impl Garner {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(Error::Domain("moduli must be positive and non-empty".into()));
        }
        let mut prefix_inverse = Vec::with_capacity(moduli.len());
        for (i, &m) in moduli.iter().enumerate() {
            if m == 1 {
                prefix_inverse.push(0);
                continue;
            }
            let mut prefix = 1u64;
            for &p in &moduli[..i] {
                prefix = ((prefix as u128 * (p % m) as u128) % m as u128) as u64;
            }
            prefix_inverse.push(mod_inverse(prefix, m)?);
        }
        Ok(Self { moduli: moduli.to_vec(), prefix_inverse })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Product of the moduli, saturating at `u128::MAX`.
    pub fn product(&self) -> u128 {
        self.moduli.iter().fold(1u128, |acc, &m| acc.saturating_mul(m as u128))
    }

    /// The unique in-band `ω` with the given residues, if any.
    ///
    /// Requires the modulus product to be at least `n`; residues must be
    /// reduced.
    pub fn reconstruct(&self, residues: &[u64], n: u64) -> Option<i64> {
        debug_assert_eq!(residues.len(), self.moduli.len());
        let mut value: u128 = 0;
        let mut product: u128 = 1;
        let mut used = 0;
        for (i, &m) in self.moduli.iter().enumerate() {
            if product >= n as u128 {
                break;
            }
            let current = (value % m as u128) as u64;
            let diff = (residues[i] + m - current) % m;
            let digit = ((diff as u128 * self.prefix_inverse[i] as u128) % m as u128) as u64;
            value += digit as u128 * product;
            product *= m as u128;
            used = i + 1;
        }
        let omega = if value <= band_max(n) as u128 {
            value as i64
        } else {
            let shifted = value as i128 - product as i128;
            if shifted < band_min(n) as i128 {
                return None;
            }
            shifted as i64
        };
        let consistent = self.moduli[used..]
            .iter()
            .zip(&residues[used..])
            .all(|(&m, &r)| residue(omega, m) == r);
        consistent.then_some(omega)
    }
}

/// Reconstructs `ω` in `(-ceil(N/2), floor(N/2)]` from its residues.
///
/// `Ok(None)` means the unique solution modulo the product has no in-band
/// representative.
pub fn crt_reconstruct(rv: &ResidueVector, n: u64) -> Result<Option<i64>> {
    let garner = Garner::new(rv.moduli())?;
    if garner.product() < n as u128 {
        return Err(Error::Domain(format!(
            "modulus product {} is below the bandwidth {n}",
            garner.product()
        )));
    }
    if n > i64::MAX as u64 {
        return Err(Error::Overflow(format!("bandwidth {n} exceeds the signed 64-bit range")));
    }
    Ok(garner.reconstruct(rv.residues(), n))
}
