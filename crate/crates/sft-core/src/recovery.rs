//! Median coefficient estimation, CRT frequency identification and top-`2k`
//! selection.
//!
//! [`fourier_approximate_1`] estimates every frequency in the band from a flat
//! plan. [`fourier_approximate_2`] uses a tensor plan to identify a short
//! candidate list first and estimates only those.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::band;
use crate::crt::Garner;
use crate::measurement::{MeasurementPlan, DETERMINISTIC_C, RANDOMIZED_C};
use crate::sampling::{fast_multiply, AliasedSpectra, SignalOracle};
use crate::{Error, Result};

/// Problem parameters shared by both algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub k: u64,
    pub epsilon_inv: u64,
    pub n: u64,
}

impl Params {
    pub fn new(k: u64, epsilon_inv: u64, n: u64) -> Self {
        Self { k, epsilon_inv, n }
    }

    fn check(&self, plan: &MeasurementPlan) -> Result<()> {
        let s = plan.s();
        if (s.k(), s.epsilon_inv(), s.bandwidth()) != (self.k, self.epsilon_inv, self.n) {
            return Err(Error::Domain(format!(
                "plan was built for (k, 1/ε, N) = ({}, {}, {}), not {:?}",
                s.k(),
                s.epsilon_inv(),
                s.bandwidth(),
                (self.k, self.epsilon_inv, self.n)
            )));
        }
        let c_needed = if plan.is_randomized() { RANDOMIZED_C } else { DETERMINISTIC_C };
        if s.c() < c_needed {
            return Err(Error::Domain(format!("plan uses c = {} but needs c >= {c_needed}", s.c())));
        }
        Ok(())
    }
}

/// Recovered frequency/coefficient pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpectrum {
    entries: BTreeMap<i64, Complex64>,
    k: u64,
    n: u64,
}

impl SparseSpectrum {
    pub fn new(k: u64, n: u64) -> Self {
        Self { entries: BTreeMap::new(), k, n }
    }

    pub fn from_entries(k: u64, n: u64, entries: BTreeMap<i64, Complex64>) -> Self {
        Self { entries, k, n }
    }

    pub fn entries(&self) -> &BTreeMap<i64, Complex64> {
        &self.entries
    }

    pub fn get(&self, omega: i64) -> Complex64 {
        self.entries.get(&omega).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn bandwidth(&self) -> u64 {
        self.n
    }

    /// Frequencies whose coefficient magnitude exceeds `threshold`.
    pub fn support_above(&self, threshold: f64) -> Vec<i64> {
        self.entries.iter().filter(|(_, c)| c.norm() > threshold).map(|(&w, _)| w).collect()
    }

    /// The dense band-ordered vector.
    pub fn to_band_vector(&self) -> Vec<Complex64> {
        let mut v = alloc::vec![Complex64::default(); self.n as usize];
        for (&w, &c) in &self.entries {
            v[band::band_index(w, self.n)] = c;
        }
        v
    }
}

/// Work counters for one recovery.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecoveryStats {
    /// Distinct oracle evaluations.
    pub samples: u64,
    /// Frequencies whose coefficient was estimated by a median.
    pub estimated: u64,
    /// Iterations of a loop over the full band (zero for tensor plans).
    pub band_scan: u64,
    /// `(j, h)` pairs passed to CRT reconstruction.
    pub reconstructions: u64,
    /// Distinct frequencies passing the majority tally.
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub spectrum: SparseSpectrum,
    pub stats: RecoveryStats,
}

/// Median of `values` in place; the mean of the middle pair for even sizes.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty multiset");
    let n = values.len();
    let mid = n / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().max_by(f64::total_cmp).expect("n >= 2");
        0.5 * (lower + upper)
    }
}

/// Reusable scratch space for median estimates.
#[derive(Debug, Default)]
struct Estimator {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Estimator {
    fn estimate(&mut self, spectra: &AliasedSpectra, omega: i64, plan: &MeasurementPlan) -> Complex64 {
        self.re.clear();
        self.im.clear();
        let t = plan.t().map(|t| t.values()).unwrap_or(&[]);
        for &(s, mult) in plan.rows() {
            let mut push = |u: u64| {
                let h = crate::crt::residue(omega, u);
                let v = spectra.entry(u, h).expect("plan length was sampled");
                for _ in 0..mult {
                    self.re.push(v.re);
                    self.im.push(v.im);
                }
            };
            push(s);
            for &ti in t {
                push(ti * s);
            }
        }
        Complex64::new(median(&mut self.re), median(&mut self.im))
    }
}

/// Median estimate of `f̂_ω` over every plan row that contains `omega`.
///
/// Duplicated moduli count with their multiplicity. Tensor plans contribute
/// the flat entry and all `λ` product entries per modulus.
pub fn median_estimate(spectra: &AliasedSpectra, omega: i64, plan: &MeasurementPlan) -> Complex64 {
    Estimator::default().estimate(spectra, omega, plan)
}

/// Orders by magnitude descending, then `|ω|` ascending, negatives first.
fn selection_order(a: &(i64, Complex64, f64), b: &(i64, Complex64, f64)) -> Ordering {
    b.2.total_cmp(&a.2)
        .then(a.0.unsigned_abs().cmp(&b.0.unsigned_abs()))
        .then(a.0.cmp(&b.0))
}

/// Keeps the `2k` largest nonzero estimates.
fn top_2k(k: u64, n: u64, estimates: Vec<(i64, Complex64)>) -> SparseSpectrum {
    let mut ranked: Vec<(i64, Complex64, f64)> = estimates
        .into_iter()
        .filter(|(_, c)| *c != Complex64::default())
        .map(|(w, c)| (w, c, c.norm()))
        .collect();
    let keep = (2 * k) as usize;
    if ranked.len() > keep {
        ranked.select_nth_unstable_by(keep, selection_order);
        ranked.truncate(keep);
    }
    SparseSpectrum::from_entries(k, n, ranked.into_iter().map(|(w, c, _)| (w, c)).collect())
}

/// Estimation and selection stages of the flat algorithm on precomputed
/// spectra.
pub fn recover_flat(spectra: &AliasedSpectra, params: Params, plan: &MeasurementPlan) -> Result<Recovery> {
    params.check(plan)?;
    if plan.is_tensor() {
        return Err(Error::Domain("the flat algorithm needs a plan without t moduli".into()));
    }
    let mut estimator = Estimator::default();
    let estimates: Vec<(i64, Complex64)> = band::frequencies(params.n)
        .map(|w| (w, estimator.estimate(spectra, w, plan)))
        .collect();
    let stats = RecoveryStats {
        samples: spectra.sample_count(),
        estimated: params.n,
        band_scan: params.n,
        ..RecoveryStats::default()
    };
    Ok(Recovery { spectrum: top_2k(params.k, params.n, estimates), stats })
}

/// Estimates every frequency in the band and keeps the `2k` largest.
pub fn fourier_approximate_1(oracle: &dyn SignalOracle, params: Params, plan: &MeasurementPlan) -> Result<Recovery> {
    params.check(plan)?;
    let spectra = fast_multiply(oracle, plan)?;
    recover_flat(&spectra, params, plan)
}

/// Reconstruction counts per frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentificationTally {
    counts: BTreeMap<i64, u64>,
    row_count: u64,
    reconstructions: u64,
}

impl IdentificationTally {
    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.counts
    }

    pub fn count(&self, omega: i64) -> u64 {
        self.counts.get(&omega).copied().unwrap_or(0)
    }

    /// A frequency proceeds when its count exceeds half the row multiset.
    pub fn threshold(&self) -> f64 {
        self.row_count as f64 / 2.0
    }

    pub fn passes(&self, omega: i64) -> bool {
        2 * self.count(omega) > self.row_count
    }

    /// Frequencies tallied more than [`threshold`](Self::threshold) times.
    pub fn candidates(&self) -> impl Iterator<Item = i64> + '_ {
        self.counts.iter().filter(|(_, &c)| 2 * c > self.row_count).map(|(&w, _)| w)
    }
}

/// Locates each residue class's dominant frequency by comparing the flat
/// entry against the `t_i` refinements, then tallies CRT reconstructions.
pub fn identify_frequencies(spectra: &AliasedSpectra, plan: &MeasurementPlan) -> Result<IdentificationTally> {
    let t = plan
        .t()
        .ok_or_else(|| Error::Domain("frequency identification needs a tensor plan".into()))?;
    let n = plan.bandwidth();
    let t = t.values();
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut reconstructions = 0;
    let mut residues = alloc::vec![0u64; t.len() + 1];
    let missing = |u: u64| Error::Domain(format!("spectra lack length {u}"));
    for &(s, mult) in plan.rows() {
        let mut moduli = Vec::with_capacity(t.len() + 1);
        moduli.push(s);
        moduli.extend_from_slice(t);
        let garner = Garner::new(&moduli)?;
        let flat = spectra.spectrum(s).ok_or_else(|| missing(s))?;
        let refined: Vec<&[Complex64]> = t
            .iter()
            .map(|&ti| spectra.spectrum(ti * s).ok_or_else(|| missing(ti * s)))
            .collect::<Result<_>>()?;
        for (h, &e) in flat.iter().enumerate() {
            residues[0] = h as u64;
            for (i, (&ti, g)) in t.iter().zip(&refined).enumerate() {
                let mut best = 0;
                let mut best_dist = f64::INFINITY;
                for b in 0..ti as usize {
                    let dist = (e - g[h + b * s as usize]).norm_sqr();
                    if dist < best_dist {
                        best_dist = dist;
                        best = b;
                    }
                }
                residues[i + 1] = (h as u64 + best as u64 * s) % ti;
            }
            reconstructions += 1;
            if let Some(omega) = garner.reconstruct(&residues, n) {
                *counts.entry(omega).or_insert(0) += mult as u64;
            }
        }
    }
    Ok(IdentificationTally { counts, row_count: plan.row_count(), reconstructions })
}

/// Identification, estimation and selection stages of the tensor algorithm on
/// precomputed spectra.
pub fn recover_tensor(spectra: &AliasedSpectra, params: Params, plan: &MeasurementPlan) -> Result<Recovery> {
    params.check(plan)?;
    let tally = identify_frequencies(spectra, plan)?;
    let mut estimator = Estimator::default();
    let estimates: Vec<(i64, Complex64)> =
        tally.candidates().map(|w| (w, estimator.estimate(spectra, w, plan))).collect();
    let stats = RecoveryStats {
        samples: spectra.sample_count(),
        estimated: estimates.len() as u64,
        band_scan: 0,
        reconstructions: tally.reconstructions,
        candidates: estimates.len() as u64,
    };
    Ok(Recovery { spectrum: top_2k(params.k, params.n, estimates), stats })
}

/// Identifies candidate frequencies with a tensor plan, estimates only those
/// and keeps the `2k` largest.
pub fn fourier_approximate_2(oracle: &dyn SignalOracle, params: Params, plan: &MeasurementPlan) -> Result<Recovery> {
    params.check(plan)?;
    if !plan.is_tensor() {
        return Err(Error::Domain("the tensor algorithm needs t moduli".into()));
    }
    let spectra = fast_multiply(oracle, plan)?;
    recover_tensor(&spectra, params, plan)
}
