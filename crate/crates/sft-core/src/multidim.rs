//! Reduction of `D`-variate recovery to one dimension.
//!
//! The signal is restricted to the line `x ↦ (Ñ/P_1·x, …, Ñ/P_D·x)` with
//! pairwise coprime `P_d`. Lattice frequencies then land on distinct
//! one-dimensional frequencies through `g(x) = Σ (Ñ/P_d)·x_d mod Ñ`, and the
//! tensor algorithm runs on the restricted signal with bandwidth `Ñ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::crt::{mod_inverse, residue};
use crate::measurement::{MeasurementPlan, DETERMINISTIC_C};
use crate::primes::next_prime;
use crate::recovery::{fourier_approximate_2, Params, Recovery};
use crate::sampling::{FastMod, SignalOracle};
use crate::{Error, Result};

/// Centered representative of `v mod p` in `(-p/2, p/2]`.
fn centered(v: u64, p: u64) -> i64 {
    if 2 * v as u128 > p as u128 {
        v as i64 - p as i64
    } else {
        v as i64
    }
}

/// The per-axis moduli and the bijection `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyMap {
    p: Vec<u64>,
    n_tilde: u64,
    m: u64,
    /// `Ñ/P_d`.
    cofactors: Vec<u64>,
    /// `(Ñ/P_d)^{-1} mod P_d`.
    inverses: Vec<u64>,
}

/// Greedily groups consecutive primes, closing a group as soon as its
/// product exceeds `threshold`.
pub fn partition_primes(threshold: u64, groups: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(groups);
    let mut p = 2;
    while out.len() < groups {
        let mut product: u128 = 1;
        while product <= threshold as u128 {
            product *= p as u128;
            p = next_prime(p + 1);
        }
        out.push(u64::try_from(product).unwrap_or(u64::MAX));
    }
    out
}

/// `P_d` per axis, each the first consecutive-prime product above `M·D`.
pub fn select_dimension_moduli(m: u64, d: usize) -> Result<FrequencyMap> {
    if m < 1 || d < 1 {
        return Err(Error::Domain("M and D must be positive".into()));
    }
    let threshold = m
        .checked_mul(d as u64)
        .ok_or_else(|| Error::Overflow(format!("M·D = {m}·{d}")))?;
    let p = partition_primes(threshold, d);
    FrequencyMap::new(p, m)
}

impl FrequencyMap {
    /// Map from explicit pairwise-coprime moduli.
    pub fn new(p: Vec<u64>, m: u64) -> Result<Self> {
        if p.is_empty() || !crate::primes::pairwise_coprime(&p) {
            return Err(Error::Domain("axis moduli must be non-empty and pairwise coprime".into()));
        }
        let mut product: u128 = 1;
        for &v in &p {
            product = product.saturating_mul(v as u128);
        }
        if product > i64::MAX as u128 {
            return Err(Error::Overflow(format!("Ñ = ∏ P_d exceeds the signed 64-bit range ({p:?})")));
        }
        let n_tilde = product as u64;
        let cofactors: Vec<u64> = p.iter().map(|&v| n_tilde / v).collect();
        let inverses = p
            .iter()
            .zip(&cofactors)
            .map(|(&v, &cof)| if v == 1 { Ok(0) } else { mod_inverse(cof % v, v) })
            .collect::<Result<_>>()?;
        Ok(Self { p, n_tilde, m, cofactors, inverses })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.p
    }

    pub fn n_tilde(&self) -> u64 {
        self.n_tilde
    }

    pub fn bandwidth(&self) -> u64 {
        self.m
    }

    pub fn dimension(&self) -> usize {
        self.p.len()
    }

    /// `Ñ/P_d` per axis.
    pub fn cofactors(&self) -> &[u64] {
        &self.cofactors
    }

    /// `g(x) = Σ (Ñ/P_d)·x_d mod Ñ`, centered.
    pub fn g_map(&self, lattice: &[i64]) -> Result<i64> {
        if lattice.len() != self.p.len() {
            return Err(Error::Range(format!("expected {} coordinates", self.p.len())));
        }
        let mut acc: i128 = 0;
        for ((&x, &p), &cof) in lattice.iter().zip(&self.p).zip(&self.cofactors) {
            let twice = 2 * x as i128;
            if twice <= -(p as i128) || twice > p as i128 {
                return Err(Error::Range(format!("coordinate {x} is outside (-{p}/2, {p}/2]")));
            }
            acc = (acc + cof as i128 * x as i128).rem_euclid(self.n_tilde as i128);
        }
        Ok(centered(acc as u64, self.n_tilde))
    }

    /// `g^{-1}(ω)_d = ω·(Ñ/P_d)^{-1} mod P_d`, centered per axis.
    pub fn g_inverse(&self, omega: i64) -> Vec<i64> {
        self.p
            .iter()
            .zip(&self.inverses)
            .map(|(&p, &inv)| {
                let r = (residue(omega, p) as u128 * inv as u128 % p as u128) as u64;
                centered(r, p)
            })
            .collect()
    }
}

/// `f_new(x) = f(Ñ/P_1·x, …, Ñ/P_D·x)`, evaluated with exact phases.
pub struct FlattenedOracle<'a> {
    inner: &'a dyn SignalOracle,
    map: &'a FrequencyMap,
}

/// The one-dimensional restriction of `f` along the map's line.
pub fn flatten_oracle<'a>(f: &'a dyn SignalOracle, map: &'a FrequencyMap) -> Result<FlattenedOracle<'a>> {
    if f.dimension() != map.dimension() {
        return Err(Error::Domain(format!(
            "oracle has dimension {} but the map has {}",
            f.dimension(),
            map.dimension()
        )));
    }
    Ok(FlattenedOracle { inner: f, map })
}

impl FlattenedOracle<'_> {
    fn lift(&self, nums: &[u64], den: u64) -> Vec<u64> {
        let scales: Vec<u64> = self.map.cofactors.iter().map(|&c| c % den).collect();
        let mut out = Vec::with_capacity(nums.len() * scales.len());
        match FastMod::new(den) {
            Some(fm) => {
                for &l in nums {
                    out.extend(scales.iter().map(|&s| fm.mul(s, l)));
                }
            }
            None => {
                for &l in nums {
                    out.extend(scales.iter().map(|&s| (s as u128 * l as u128 % den as u128) as u64));
                }
            }
        }
        out
    }
}

impl SignalOracle for FlattenedOracle<'_> {
    fn dimension(&self) -> usize {
        1
    }

    fn declared_bandwidth(&self) -> Option<u64> {
        Some(self.map.n_tilde)
    }

    fn evaluate(&self, num: &[u64], den: u64) -> Result<Complex64> {
        self.inner.evaluate(&self.lift(num, den), den)
    }

    fn evaluate_batch(&self, nums: &[u64], den: u64, out: &mut [Complex64]) -> Result<()> {
        self.inner.evaluate_batch(&self.lift(nums, den), den, out)
    }
}

/// Deterministic or seeded randomized recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Deterministic,
    Randomized { sigma: f64, seed: u64 },
}

/// Recovered lattice coefficients with the one-dimensional run behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct MultidimRecovery {
    pub map: FrequencyMap,
    pub plan: MeasurementPlan,
    pub flat: Recovery,
    pub entries: BTreeMap<Vec<i64>, Complex64>,
}

/// Plan used by [`multidim_approximate`], exposed for sizing and reporting.
pub fn multidim_plan(map: &FrequencyMap, k: u64, epsilon_inv: u64, mode: Mode) -> Result<MeasurementPlan> {
    let n = map.n_tilde();
    let ratio = k.saturating_mul(epsilon_inv);
    match mode {
        Mode::Deterministic => {
            if ratio < 2 || (ratio as u128) * (ratio as u128) >= n as u128 {
                return Err(Error::Domain(format!("need Ñ = {n} > (k/ε)² >= 4 with k/ε = {ratio}")));
            }
            MeasurementPlan::tensor(k, epsilon_inv, n, DETERMINISTIC_C)
        }
        Mode::Randomized { sigma, seed } => {
            if ratio < 2 || ratio >= n {
                return Err(Error::Domain(format!("need Ñ = {n} > k/ε >= 2 with k/ε = {ratio}")));
            }
            MeasurementPlan::tensor_randomized(k, epsilon_inv, n, sigma, n, seed)
        }
    }
}

/// Recovers a `D`-variate signal bandlimited to `([-M/2, M/2] ∩ ℤ)^D`.
pub fn multidim_approximate(
    f: &dyn SignalOracle,
    m: u64,
    k: u64,
    epsilon_inv: u64,
    mode: Mode,
) -> Result<MultidimRecovery> {
    let map = select_dimension_moduli(m, f.dimension())?;
    let plan = multidim_plan(&map, k, epsilon_inv, mode)?;
    let flat_oracle = flatten_oracle(f, &map)?;
    let flat = fourier_approximate_2(&flat_oracle, Params::new(k, epsilon_inv, map.n_tilde()), &plan)?;
    let entries = flat.spectrum.entries().iter().map(|(&w, &c)| (map.g_inverse(w), c)).collect();
    Ok(MultidimRecovery { map, plan, flat, entries })
}
