//! Dense reference transforms and error-bound verification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::band;
use crate::dft::DftPlan;
use crate::recovery::SparseSpectrum;
use crate::sampling::SignalOracle;
use crate::{Error, Result};

/// Largest bandwidth [`dense_dft`] accepts.
pub const DENSE_CAP: u64 = 1 << 20;

/// `f̂_ω = (1/N)·Σ_l f(2πl/N)·e^{-2πiωl/N}` over the band, band-ordered.
pub fn dense_dft(oracle: &dyn SignalOracle, n: u64) -> Result<Vec<Complex64>> {
    if oracle.dimension() != 1 {
        return Err(Error::Domain("dense_dft needs a one-dimensional oracle".into()));
    }
    if n == 0 || n > DENSE_CAP {
        return Err(Error::Domain(format!("bandwidth {n} is outside [1, {DENSE_CAP}]")));
    }
    let nums: Vec<u64> = (0..n).collect();
    let mut grid = vec![Complex64::default(); n as usize];
    oracle.evaluate_batch(&nums, n, &mut grid)?;
    DftPlan::new(n as usize).forward(&mut grid);
    Ok(band::frequencies(n).map(|w| grid[crate::crt::residue(w, n) as usize]).collect())
}

/// Fourier coefficients of a `D`-variate oracle on the lattice
/// `([-M/2, M/2] ∩ ℤ)^D`, exact when the oracle is bandlimited to it.
pub fn dense_dft_lattice(oracle: &dyn SignalOracle, m: u64) -> Result<BTreeMap<Vec<i64>, Complex64>> {
    let d = oracle.dimension();
    let half = (m / 2) as i64;
    let q = (2 * half + 1) as usize;
    let total = q
        .checked_pow(d as u32)
        .filter(|&t| t as u64 <= DENSE_CAP)
        .ok_or_else(|| Error::Domain(format!("lattice of {q}^{d} points exceeds the dense cap")))?;
    let mut nums = Vec::with_capacity(total * d);
    for idx in 0..total {
        let mut rest = idx;
        let mut point = vec![0u64; d];
        for slot in point.iter_mut().rev() {
            *slot = (rest % q) as u64;
            rest /= q;
        }
        nums.extend_from_slice(&point);
    }
    let mut grid = vec![Complex64::default(); total];
    oracle.evaluate_batch(&nums, q as u64, &mut grid)?;
    // Separable transform: axis `a` has stride q^(d-1-a).
    let plan = DftPlan::new(q);
    let mut line = vec![Complex64::default(); q];
    for axis in 0..d {
        let stride = q.pow((d - 1 - axis) as u32);
        for start in 0..total {
            if !(start / stride).is_multiple_of(q) {
                continue;
            }
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = grid[start + i * stride];
            }
            plan.forward(&mut line);
            for (i, &v) in line.iter().enumerate() {
                grid[start + i * stride] = v;
            }
        }
    }
    let mut out = BTreeMap::new();
    for (idx, &v) in grid.iter().enumerate() {
        let mut rest = idx;
        let mut omega = vec![0i64; d];
        for slot in omega.iter_mut().rev() {
            let r = (rest % q) as i64;
            *slot = if r > half { r - q as i64 } else { r };
            rest /= q;
        }
        out.insert(omega, v);
    }
    Ok(out)
}

/// Best `j`-term support of a vector and the residual norms off it.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalTerms {
    /// Indices in ascending order.
    pub support: Vec<usize>,
    pub residual_l1: f64,
    pub residual_l2: f64,
}

/// The `j` largest magnitudes; ties go to the smaller index.
pub fn optimal_terms(v: &[Complex64], j: usize) -> OptimalTerms {
    assert!(j <= v.len(), "cannot keep {j} of {} terms", v.len());
    let magnitudes: Vec<f64> = v.iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| magnitudes[b].total_cmp(&magnitudes[a]));
    let mut support = order[..j].to_vec();
    support.sort_unstable();
    let mut residual_l1 = 0.0;
    let mut residual_sq = 0.0;
    for &i in &order[j..] {
        residual_l1 += magnitudes[i];
        residual_sq += magnitudes[i] * magnitudes[i];
    }
    OptimalTerms { support, residual_l1, residual_l2: libm::sqrt(residual_sq) }
}

/// Measured error against the instance-optimal bound
/// `‖f̂−f̂_k‖₂ + 22ε‖f̂−f̂_{k/ε}‖₁/√k + 22√k·tail`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l2_error: f64,
    /// `‖f̂ − f̂^opt_k‖₂`.
    pub opt_k_l2: f64,
    /// `‖f̂ − f̂^opt_{k/ε}‖₁`.
    pub opt_keps_l1: f64,
    /// `‖f̂ − f̄̂‖₁`, the out-of-band mass.
    pub tail_l1: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl ErrorReport {
    /// Assembles the report from a reference vector and a measured error.
    pub fn new(reference: &[Complex64], l2_error: f64, k: u64, epsilon_inv: u64, tail_l1: f64) -> Self {
        let len = reference.len();
        let opt_k_l2 = optimal_terms(reference, (k as usize).min(len)).residual_l2;
        let keps = (k.saturating_mul(epsilon_inv) as usize).min(len);
        let opt_keps_l1 = optimal_terms(reference, keps).residual_l1;
        let sqrt_k = libm::sqrt(k as f64);
        let rhs = opt_k_l2 + 22.0 * opt_keps_l1 / (epsilon_inv as f64 * sqrt_k) + 22.0 * sqrt_k * tail_l1;
        let satisfied = l2_error <= rhs + 1e-9 * (1.0 + rhs);
        Self { l2_error, opt_k_l2, opt_keps_l1, tail_l1, rhs, satisfied }
    }

    /// Contribution of the `ε`-weighted `ℓ1` term to the bound.
    pub fn epsilon_term(&self, k: u64, epsilon_inv: u64) -> f64 {
        22.0 * self.opt_keps_l1 / (epsilon_inv as f64 * libm::sqrt(k as f64))
    }

    /// Contribution of the out-of-band term to the bound.
    pub fn tail_term(&self, k: u64) -> f64 {
        22.0 * libm::sqrt(k as f64) * self.tail_l1
    }
}

/// Compares a recovered spectrum with the band-ordered reference.
pub fn verify_bound(
    result: &SparseSpectrum,
    reference: &[Complex64],
    k: u64,
    epsilon_inv: u64,
    tail_l1: f64,
) -> ErrorReport {
    let n = reference.len() as u64;
    let mut sq = 0.0;
    for (i, &r) in reference.iter().enumerate() {
        let w = band::band_frequency(i, n);
        sq += (r - result.get(w)).norm_sqr();
    }
    for (&w, &c) in result.entries() {
        if !band::in_band(w, n) {
            sq += c.norm_sqr();
        }
    }
    ErrorReport::new(reference, libm::sqrt(sq), k, epsilon_inv, tail_l1)
}

/// [`verify_bound`] against a reference given by its nonzero entries, for
/// bands too wide to hold densely.
pub fn verify_bound_sparse(
    result: &SparseSpectrum,
    reference: &BTreeMap<i64, Complex64>,
    k: u64,
    epsilon_inv: u64,
    tail_l1: f64,
) -> ErrorReport {
    report_from_maps(result.entries(), reference, k, epsilon_inv, tail_l1)
}

/// Lattice version of [`verify_bound`] with no out-of-band term.
pub fn verify_bound_lattice(
    result: &BTreeMap<Vec<i64>, Complex64>,
    reference: &BTreeMap<Vec<i64>, Complex64>,
    k: u64,
    epsilon_inv: u64,
) -> ErrorReport {
    report_from_maps(result, reference, k, epsilon_inv, 0.0)
}

fn report_from_maps<K: Ord>(
    result: &BTreeMap<K, Complex64>,
    reference: &BTreeMap<K, Complex64>,
    k: u64,
    epsilon_inv: u64,
    tail_l1: f64,
) -> ErrorReport {
    let mut sq = 0.0;
    for (x, &r) in reference {
        sq += (r - result.get(x).copied().unwrap_or_default()).norm_sqr();
    }
    for (x, &c) in result {
        if !reference.contains_key(x) {
            sq += c.norm_sqr();
        }
    }
    let values: Vec<Complex64> = reference.values().copied().collect();
    ErrorReport::new(&values, libm::sqrt(sq), k, epsilon_inv, tail_l1)
}
