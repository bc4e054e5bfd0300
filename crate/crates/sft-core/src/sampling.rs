//! Sampling on coprime equispaced grids and aliased spectra.
//!
//! Every sample point is a rational multiple of `2π`. Oracles receive the
//! exact numerators and the shared denominator, so argument reduction is
//! integer arithmetic rather than floating-point `mod 2π`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dft::DftPlan;
use crate::measurement::MeasurementPlan;
use crate::primes::gcd;
use crate::{Error, Result};

/// A periodic function on `[0, 2π]^D`, the only access to the input.
pub trait SignalOracle: Sync {
    fn dimension(&self) -> usize;

    /// Per-axis bandwidth the caller promises, if known.
    fn declared_bandwidth(&self) -> Option<u64> {
        None
    }

    /// Value at the point whose coordinate `d` is `2π·num[d]/den`, with every
    /// `num[d] < den`.
    fn evaluate(&self, num: &[u64], den: u64) -> Result<Complex64>;

    /// Values at `nums.len() / D` points packed axis-minor into `nums`.
    fn evaluate_batch(&self, nums: &[u64], den: u64, out: &mut [Complex64]) -> Result<()> {
        let d = self.dimension();
        for (point, slot) in nums.chunks_exact(d).zip(out.iter_mut()) {
            *slot = self.evaluate(point, den)?;
        }
        Ok(())
    }
}

impl<T: SignalOracle + ?Sized> SignalOracle for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn declared_bandwidth(&self) -> Option<u64> {
        (**self).declared_bandwidth()
    }

    fn evaluate(&self, num: &[u64], den: u64) -> Result<Complex64> {
        (**self).evaluate(num, den)
    }

    fn evaluate_batch(&self, nums: &[u64], den: u64, out: &mut [Complex64]) -> Result<()> {
        (**self).evaluate_batch(nums, den, out)
    }
}

/// Oracle backed by a closure over real coordinates.
pub struct FnOracle<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Complex64 + Sync> FnOracle<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: Fn(&[f64]) -> Complex64 + Sync> SignalOracle for FnOracle<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, num: &[u64], den: u64) -> Result<Complex64> {
        let mut x = [0.0f64; 8];
        if num.len() > x.len() {
            let coords: Vec<f64> = num.iter().map(|&a| 2.0 * PI * (a as f64) / (den as f64)).collect();
            return Ok((self.f)(&coords));
        }
        for (slot, &a) in x.iter_mut().zip(num) {
            *slot = 2.0 * PI * (a as f64) / (den as f64);
        }
        Ok((self.f)(&x[..num.len()]))
    }
}

/// A finite trigonometric polynomial `Σ c·exp(i⟨ω, x⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dimension: usize,
    frequencies: Vec<i64>,
    coefficients: Vec<Complex64>,
    bandwidth: Option<u64>,
}

impl TrigPolynomial {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension >= 1, "dimension must be positive");
        Self { dimension, frequencies: Vec::new(), coefficients: Vec::new(), bandwidth: None }
    }

    /// One-dimensional polynomial from `(ω, c)` pairs.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let mut p = Self::new(1);
        for &(w, c) in terms {
            p.push(&[w], c);
        }
        p
    }

    pub fn with_bandwidth(mut self, bandwidth: u64) -> Self {
        self.bandwidth = Some(bandwidth);
        self
    }

    pub fn push(&mut self, frequency: &[i64], coefficient: Complex64) {
        assert_eq!(frequency.len(), self.dimension, "frequency has the wrong dimension");
        self.frequencies.extend_from_slice(frequency);
        self.coefficients.push(coefficient);
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `(frequency, coefficient)` pairs in insertion order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.frequencies.chunks_exact(self.dimension).zip(self.coefficients.iter().copied())
    }

    /// Frequencies reduced modulo `den`, one row of `D` per term.
    fn reduced(&self, den: u64) -> Vec<u64> {
        self.frequencies.iter().map(|&w| crate::crt::residue(w, den)).collect()
    }
}

/// Barrett reduction by a fixed modulus below `2^32`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FastMod {
    d: u64,
    m: u64,
}

impl FastMod {
    pub(crate) fn new(d: u64) -> Option<Self> {
        (1..1 << 32).contains(&d).then(|| Self { d, m: u64::MAX / d })
    }

    #[inline]
    pub(crate) fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.m as u128) >> 64) as u64;
        let mut r = x - q * self.d;
        while r >= self.d {
            r -= self.d;
        }
        r
    }

    /// `a·b mod d` for reduced `a`, `b`.
    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }
}

#[inline]
fn mul_mod_wide(a: u64, b: u64, d: u64) -> u64 {
    (a as u128 * b as u128 % d as u128) as u64
}

/// `exp(2πi·r/den)`.
fn cis_fraction(r: u64, den: u64) -> Complex64 {
    let (s, c) = libm::sincos(2.0 * PI * (r as f64) / (den as f64));
    Complex64::new(c, s)
}

/// `exp(2πi·r/den)` for every `r < den`, as products of a coarse and a fine
/// table of directly evaluated roots.
fn cis_table(den: u64) -> Vec<Complex64> {
    let block = (libm::sqrt(den as f64) as u64).max(1);
    let fine: Vec<Complex64> = (0..block).map(|r| cis_fraction(r, den)).collect();
    let mut out = Vec::with_capacity(den as usize);
    let mut base = 0;
    while base < den {
        let coarse = cis_fraction(base, den);
        for f in fine.iter().take((den - base).min(block) as usize) {
            out.push(coarse * f);
        }
        base += block;
    }
    out
}

impl SignalOracle for TrigPolynomial {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn declared_bandwidth(&self) -> Option<u64> {
        self.bandwidth
    }

    fn evaluate(&self, num: &[u64], den: u64) -> Result<Complex64> {
        let mut out = [Complex64::new(0.0, 0.0)];
        self.evaluate_batch(num, den, &mut out)?;
        Ok(out[0])
    }

    fn evaluate_batch(&self, nums: &[u64], den: u64, out: &mut [Complex64]) -> Result<()> {
        let d = self.dimension;
        if nums.len() != out.len() * d {
            return Err(Error::Oracle(format!(
                "{} coordinates do not describe {} points of dimension {d}",
                nums.len(),
                out.len()
            )));
        }
        let reduced = self.reduced(den);
        let work = out.len() * self.len();
        // A per-denominator table pays off once it is reused enough.
        let table: Option<Vec<Complex64>> = (work as u64 >= den && den <= 1 << 26).then(|| cis_table(den));
        let root = |r: u64| match &table {
            Some(t) => t[r as usize],
            None => cis_fraction(r, den),
        };
        match FastMod::new(den) {
            Some(fm) => {
                for (point, slot) in nums.chunks_exact(d).zip(out.iter_mut()) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (w, &c) in reduced.chunks_exact(d).zip(&self.coefficients) {
                        let mut r = 0;
                        for (&wd, &a) in w.iter().zip(point) {
                            r = fm.reduce(r + fm.mul(wd, a));
                        }
                        acc += c * root(r);
                    }
                    *slot = acc;
                }
            }
            None => {
                for (point, slot) in nums.chunks_exact(d).zip(out.iter_mut()) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (w, &c) in reduced.chunks_exact(d).zip(&self.coefficients) {
                        let mut r: u128 = 0;
                        for (&wd, &a) in w.iter().zip(point) {
                            r += mul_mod_wide(wd, a, den) as u128;
                        }
                        acc += c * root((r % den as u128) as u64);
                    }
                    *slot = acc;
                }
            }
        }
        Ok(())
    }
}

/// Per-length DFTs of equispaced samples.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasedSpectra {
    spectra: BTreeMap<u64, Vec<Complex64>>,
    sample_count: u64,
}

impl AliasedSpectra {
    /// Entry `h` of the length-`u` spectrum.
    pub fn entry(&self, u: u64, h: u64) -> Option<Complex64> {
        self.spectra.get(&u).and_then(|s| s.get(h as usize).copied())
    }

    pub fn spectrum(&self, u: u64) -> Option<&[Complex64]> {
        self.spectra.get(&u).map(Vec::as_slice)
    }

    pub fn lengths(&self) -> impl Iterator<Item = u64> + '_ {
        self.spectra.keys().copied()
    }

    /// Distinct evaluation points used to build every spectrum.
    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// `mask[l]` is true when `gcd(l, u) = 1`.
fn coprime_mask(u: u64) -> Vec<bool> {
    let mut mask = vec![true; u as usize];
    if u == 1 {
        return mask;
    }
    for p in prime_factors(u) {
        for l in (0..u).step_by(p as usize) {
            mask[l as usize] = false;
        }
    }
    mask
}

/// Samples the length-`u` grid, evaluating only points whose reduced
/// denominator is `u` and reading the rest from `shared`.
fn sample_grid(
    oracle: &dyn SignalOracle,
    u: u64,
    shared: &BTreeMap<u64, Vec<Complex64>>,
) -> Result<(Vec<Complex64>, u64)> {
    let mask = coprime_mask(u);
    let fresh: Vec<u64> = (0..u).filter(|&l| mask[l as usize]).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); fresh.len()];
    oracle.evaluate_batch(&fresh, u, &mut values)?;
    let mut grid = Vec::with_capacity(u as usize);
    let mut next = values.into_iter();
    for l in 0..u {
        if mask[l as usize] {
            grid.push(next.next().expect("one value per fresh point"));
        } else {
            let g = gcd(l, u);
            let coarse = &shared[&(u / g)];
            grid.push(coarse[(l / g) as usize]);
        }
    }
    Ok((grid, fresh.len() as u64))
}

#[cfg(feature = "parallel")]
fn map_lengths<F>(lengths: &[u64], f: F) -> Vec<Result<(Vec<Complex64>, u64)>>
where
    F: Fn(u64) -> Result<(Vec<Complex64>, u64)> + Sync + Send,
{
    use rayon::prelude::*;
    lengths.par_iter().map(|&u| f(u)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_lengths<F>(lengths: &[u64], f: F) -> Vec<Result<(Vec<Complex64>, u64)>>
where
    F: Fn(u64) -> Result<(Vec<Complex64>, u64)>,
{
    lengths.iter().map(|&u| f(u)).collect()
}

/// Samples a one-dimensional oracle on each length-`u` grid and transforms.
///
/// A point `2π·l/u` is evaluated once, under its reduced denominator, no
/// matter how many grids contain it.
pub fn alias_grids(oracle: &dyn SignalOracle, lengths: &[u64]) -> Result<AliasedSpectra> {
    if oracle.dimension() != 1 {
        return Err(Error::Domain(format!(
            "aliasing needs a one-dimensional oracle, got dimension {}",
            oracle.dimension()
        )));
    }
    let targets: BTreeSet<u64> = lengths.iter().copied().collect();
    if targets.contains(&0) {
        return Err(Error::Domain("grid lengths must be positive".into()));
    }
    // Grids that are proper divisors of some target are built first and kept.
    let mut shared_lengths = BTreeSet::new();
    for &u in &targets {
        shared_lengths.extend(divisors(u).into_iter().filter(|&d| d != u));
    }
    let mut shared: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
    let mut spectra = BTreeMap::new();
    let mut sample_count = 0;
    for &d in &shared_lengths {
        let (grid, fresh) = sample_grid(oracle, d, &shared)?;
        sample_count += fresh;
        if targets.contains(&d) {
            let mut spectrum = grid.clone();
            DftPlan::new(d as usize).forward(&mut spectrum);
            spectra.insert(d, spectrum);
        }
        shared.insert(d, grid);
    }
    let rest: Vec<u64> = targets.iter().copied().filter(|u| !shared_lengths.contains(u)).collect();
    let shared_ref = &shared;
    let results = map_lengths(&rest, |u| {
        let (mut grid, fresh) = sample_grid(oracle, u, shared_ref)?;
        DftPlan::new(u as usize).forward(&mut grid);
        Ok((grid, fresh))
    });
    for (u, result) in rest.into_iter().zip(results) {
        let (spectrum, fresh) = result?;
        sample_count += fresh;
        spectra.insert(u, spectrum);
    }
    Ok(AliasedSpectra { spectra, sample_count })
}

/// Samples `oracle` on every DFT length of `plan` and transforms each grid.
pub fn fast_multiply(oracle: &dyn SignalOracle, plan: &MeasurementPlan) -> Result<AliasedSpectra> {
    alias_grids(oracle, &plan.lengths())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    fn z() -> Complex64 {
        c(0.0, 0.0)
    }

    #[test]
    fn single_tone_aliasing() {
        let f = TrigPolynomial::from_terms(&[(3, c(1.0, 0.0))]);
        let s = alias_grids(&f, &[5]).unwrap();
        assert!(close(s.spectrum(5).unwrap(), &[z(), z(), z(), c(1.0, 0.0), z()]));

        let f = TrigPolynomial::from_terms(&[(7, c(1.0, 0.0))]);
        let s = alias_grids(&f, &[5]).unwrap();
        assert!(close(s.spectrum(5).unwrap(), &[z(), z(), c(1.0, 0.0), z(), z()]));

        let f = TrigPolynomial::from_terms(&[(2, c(2.0, 0.0)), (-1, c(1.0, 0.0))]);
        let s = alias_grids(&f, &[3]).unwrap();
        assert!(close(s.spectrum(3).unwrap(), &[z(), z(), c(3.0, 0.0)]));
    }

    #[test]
    fn shared_points_are_counted_once() {
        let f = TrigPolynomial::from_terms(&[(1, c(1.0, 0.0))]);
        // Coprime grids share only x = 0.
        let s = alias_grids(&f, &[5, 7, 11]).unwrap();
        assert_eq!(s.sample_count(), 5 + 7 + 11 - 2);
        // Nested grids: 5 | 10 | 30, 3 | 15 | 30, 2 | 10.
        let s = alias_grids(&f, &[5, 10, 15, 30]).unwrap();
        assert_eq!(s.sample_count(), 30);
    }

    #[test]
    fn closure_oracle_matches_polynomial() {
        let g = FnOracle::new(1, |x: &[f64]| Complex64::from_polar(2.0, 5.0 * x[0]) + 0.5);
        let p = TrigPolynomial::from_terms(&[(5, c(2.0, 0.0)), (0, c(0.5, 0.0))]);
        let a = alias_grids(&g, &[13, 16]).unwrap();
        let b = alias_grids(&p, &[13, 16]).unwrap();
        for u in [13, 16] {
            assert!(close(a.spectrum(u).unwrap(), b.spectrum(u).unwrap()));
        }
    }

    #[test]
    fn rejects_multivariate_oracle() {
        let f = TrigPolynomial::new(2);
        assert!(alias_grids(&f, &[5]).is_err());
    }
}
