//! Implicit measurement plans.
//!
//! A row is a residue class `(u, h)`: it selects every frequency congruent to
//! `h` modulo `u`. Plans only record the moduli, their multiplicities and
//! the optional `t_i` factors; rows are never materialized.
//!
//! A small subset of rows that works for every input exists, but nobody knows
//! how to construct it. Randomized plans draw rows uniformly with replacement
//! instead.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::primes::{self, SModuli, TModuli};
use crate::{Error, Result};

/// Modulus constant required by the randomized construction.
pub const RANDOMIZED_C: u64 = 14;

/// Modulus constant of the deterministic algorithms.
pub const DETERMINISTIC_C: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    s: SModuli,
    /// Distinct `s_j` in ascending order with their multiplicities.
    rows: Vec<(u64, u32)>,
    t: Option<TModuli>,
    rng_seed: Option<u64>,
}

impl MeasurementPlan {
    /// Every `s_j` once.
    pub fn deterministic(s: SModuli) -> Self {
        let rows = s.values().iter().map(|&v| (v, 1)).collect();
        Self { s, rows, t: None, rng_seed: None }
    }

    /// `M_{s1,K}` for the given parameters.
    pub fn flat(k: u64, epsilon_inv: u64, n: u64, c: u64) -> Result<Self> {
        Ok(Self::deterministic(primes::select_s_moduli(k, epsilon_inv, n, c)?))
    }

    /// Flat randomized plan: `c = 14` moduli, `l` draws sized for the whole band.
    pub fn flat_randomized(k: u64, epsilon_inv: u64, n: u64, sigma: f64, seed: u64) -> Result<Self> {
        let s = primes::select_s_moduli(k, epsilon_inv, n, RANDOMIZED_C)?;
        subsample_moduli(&s, sigma, n, seed)
    }

    /// Deterministic tensor plan `M_{s1,K} ⊛ N_{λ,s1}`.
    ///
    /// The prime run for `s_j` starts at the smallest prime `>= k/ε` that
    /// admits the `t_i` construction, which for small `k/ε` is larger than
    /// `k/ε` itself.
    pub fn tensor(k: u64, epsilon_inv: u64, n: u64, c: u64) -> Result<Self> {
        let floor = primes::tensor_s1_floor(k, epsilon_inv, n)?;
        let s = primes::select_s_moduli_from(k, epsilon_inv, n, c, floor)?;
        let t = primes::select_t_moduli(n, &s)?;
        Self::deterministic(s).with_t(t)
    }

    /// Randomized tensor plan: rows drawn from the `c = 14` moduli, `t_i`
    /// chosen from the smallest of them.
    pub fn tensor_randomized(
        k: u64,
        epsilon_inv: u64,
        n: u64,
        sigma: f64,
        set_size: u64,
        seed: u64,
    ) -> Result<Self> {
        let floor = primes::tensor_s1_floor(k, epsilon_inv, n)?;
        let s = primes::select_s_moduli_from(k, epsilon_inv, n, RANDOMIZED_C, floor)?;
        let t = primes::select_t_moduli(n, &s)?;
        subsample_moduli(&s, sigma, set_size, seed)?.with_t(t)
    }

    /// Attaches `t_i` moduli, checking they suit the `s_j` in use.
    pub fn with_t(mut self, t: TModuli) -> Result<Self> {
        let s1 = self.s.s1();
        if t.values().iter().any(|&v| v >= s1) {
            return Err(Error::Infeasible(format!("every t_i must be below s1 = {s1}")));
        }
        let mut all: Vec<u64> = t.values().to_vec();
        all.extend(self.rows.iter().map(|&(v, _)| v));
        if !primes::pairwise_coprime(&all) {
            return Err(Error::Infeasible("t and s moduli are not pairwise coprime".into()));
        }
        let product = t.values().iter().fold(1u128, |acc, &v| acc.saturating_mul(v as u128));
        if product.saturating_mul(s1 as u128) < self.s.bandwidth() as u128 {
            return Err(Error::Infeasible("∏ t_i·s1 is below the bandwidth".into()));
        }
        self.t = Some(t);
        Ok(self)
    }

    pub fn s(&self) -> &SModuli {
        &self.s
    }

    pub fn t(&self) -> Option<&TModuli> {
        self.t.as_ref()
    }

    pub fn rng_seed(&self) -> Option<u64> {
        self.rng_seed
    }

    pub fn is_randomized(&self) -> bool {
        self.rng_seed.is_some()
    }

    pub fn is_tensor(&self) -> bool {
        self.t.is_some()
    }

    /// Distinct moduli with multiplicities, ascending.
    pub fn rows(&self) -> &[(u64, u32)] {
        &self.rows
    }

    /// Multiset size: `K` for deterministic plans, `l` for randomized ones.
    pub fn row_count(&self) -> u64 {
        self.rows.iter().map(|&(_, m)| m as u64).sum()
    }

    /// True when `count` is a strict majority of the multiset.
    pub fn is_majority(&self, count: u64) -> bool {
        2 * count > self.row_count()
    }

    pub fn bandwidth(&self) -> u64 {
        self.s.bandwidth()
    }

    /// `m = Σ s_j` over the distinct moduli in use.
    pub fn m(&self) -> u64 {
        self.rows.iter().map(|&(v, _)| v).sum()
    }

    /// All DFT lengths the plan needs, ascending.
    pub fn lengths(&self) -> Vec<u64> {
        match &self.t {
            Some(_) => tensor_moduli(self).expect("tensor plan"),
            None => self.rows.iter().map(|&(v, _)| v).collect(),
        }
    }

    /// Upper bound on distinct samples for this plan.
    pub fn sample_budget(&self) -> u64 {
        let distinct = self.rows.len() as u64;
        match &self.t {
            None => self.m() - (distinct - 1),
            Some(t) => {
                let lambda = t.lambda() as u64;
                self.m() * t.row_count() - (lambda * distinct + distinct - 1)
            }
        }
    }
}

/// `l = ⌈21·ln(set_size/(1−σ))⌉`.
pub fn draw_count(sigma: f64, set_size: u64) -> Result<u64> {
    if !(2.0 / 3.0..1.0).contains(&sigma) {
        return Err(Error::Domain(format!("σ = {sigma} is outside [2/3, 1)")));
    }
    if set_size == 0 {
        return Err(Error::Domain("set size must be positive".into()));
    }
    Ok(primes::guarded_ceil(21.0 * libm::log(set_size as f64 / (1.0 - sigma))))
}

/// Draws `l` moduli uniformly with replacement from `s`.
pub fn subsample_moduli(s: &SModuli, sigma: f64, set_size: u64, seed: u64) -> Result<MeasurementPlan> {
    if s.c() < RANDOMIZED_C {
        return Err(Error::Domain(format!(
            "randomized plans need c >= {RANDOMIZED_C}, got {}",
            s.c()
        )));
    }
    let draws = draw_count(sigma, set_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
    for _ in 0..draws {
        let v = s.values()[rng.gen_range(0..s.count())];
        *counts.entry(v).or_insert(0) += 1;
    }
    Ok(MeasurementPlan {
        s: s.clone(),
        rows: counts.into_iter().collect(),
        t: None,
        rng_seed: Some(seed),
    })
}

/// Every distinct `s_j` plus every product `t_i·s_j`, ascending.
pub fn tensor_moduli(plan: &MeasurementPlan) -> Result<Vec<u64>> {
    let t = plan.t().ok_or_else(|| Error::Domain("plan has no t moduli".into()))?;
    let mut out: Vec<u64> = Vec::new();
    for &(s, _) in plan.rows() {
        out.push(s);
        out.extend(t.values().iter().map(|&ti| ti * s));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Dense row evaluation, kept as a reference for tests.
#[cfg(any(test, feature = "dense-rows"))]
pub mod dense {
    use num_complex::Complex64;

    use crate::band;

    /// `Σ_{n ≡ h mod u} x_n` over indices `n ∈ [0, N)`.
    pub fn row_apply(u: u64, h: u64, x: &[Complex64]) -> Complex64 {
        assert!(h < u, "residue must be reduced");
        x.iter().skip(h as usize).step_by(u as usize).sum()
    }

    /// `Σ_{ω ≡ h mod u} x_ω` for a band-ordered vector of width `x.len()`.
    pub fn row_apply_band(u: u64, h: u64, x: &[Complex64]) -> Complex64 {
        assert!(h < u, "residue must be reduced");
        let n = x.len() as u64;
        band::frequencies(n)
            .zip(x)
            .filter(|(w, _)| crate::crt::residue(*w, u) == h)
            .map(|(_, &v)| v)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn row_apply_examples() {
        assert_eq!(dense::row_apply(2, 0, &[c(1.0), c(2.0), c(3.0), c(4.0)]), c(4.0));
        let mut e1 = vec![c(0.0); 6];
        e1[1] = c(1.0);
        assert_eq!(dense::row_apply(3, 1, &e1), c(1.0));
    }

    #[test]
    fn row_apply_matches_explicit_row() {
        let x: Vec<Complex64> = (0..50).map(|i| Complex64::new(i as f64, (i * i % 7) as f64)).collect();
        let row: Vec<f64> = (0..50).map(|n| if n % 5 == 2 { 1.0 } else { 0.0 }).collect();
        let dot: Complex64 = x.iter().zip(&row).map(|(v, r)| v * r).sum();
        assert_eq!(dense::row_apply(5, 2, &x), dot);
    }

    #[test]
    fn draw_counts() {
        assert_eq!(draw_count(0.9, 1024), Ok(194));
        assert_eq!(draw_count(2.0 / 3.0, 1), Ok(24));
        assert!(draw_count(0.5, 10).is_err());
        assert!(draw_count(1.0, 10).is_err());
    }

    #[test]
    fn subsampling_is_seeded() {
        let s = primes::select_s_moduli(2, 2, 1024, 14).unwrap();
        let a = subsample_moduli(&s, 0.9, 1024, 11).unwrap();
        let b = subsample_moduli(&s, 0.9, 1024, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.row_count(), 194);
        assert!(a.rows().iter().all(|&(v, m)| m >= 1 && s.values().contains(&v)));
        let small = primes::select_s_moduli(2, 2, 1024, 4).unwrap();
        assert!(subsample_moduli(&small, 0.9, 1024, 11).is_err());
    }

    #[test]
    fn tensor_lengths() {
        let five = primes::select_s_moduli_from(2, 1, 1000, 2, 5).unwrap();
        let plan = |values: &[u64]| MeasurementPlan {
            s: five.clone(),
            rows: values.iter().map(|&v| (v, 1)).collect(),
            t: Some(TModuli::new(vec![2, 3]).unwrap()),
            rng_seed: None,
        };
        assert_eq!(tensor_moduli(&plan(&[5])).unwrap(), [5, 10, 15]);
        assert_eq!(tensor_moduli(&plan(&[5, 7])).unwrap(), [5, 7, 10, 14, 15, 21]);
    }

    #[test]
    fn flat_budget_and_tensor_plan() {
        let p = MeasurementPlan::flat(2, 1, 8, 4).unwrap();
        assert_eq!(p.m(), 1060);
        assert_eq!(p.sample_budget(), 1060 - 24);
        let p = MeasurementPlan::tensor(4, 2, 1 << 16, 4).unwrap();
        assert_eq!(p.s().s1(), 41);
        assert_eq!(p.t().unwrap().lambda(), 12);
    }
}
