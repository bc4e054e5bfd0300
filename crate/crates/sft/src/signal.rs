//! Line-oriented signal descriptions.
//!
//! ```text
//! # three tones and some clutter
//! dim 1
//! band 4096
//! term 17 1.0 0.0
//! term -301 0.0 -2.5
//! noise 8 0.5 7
//! oob 5000 0.01 0.0
//! ```
//!
//! `term` and `oob` take `dim` frequencies then the real and imaginary parts.
//! `noise <count> <l1> <seed>` adds `count` in-band spikes whose magnitudes
//! sum to `l1`. For `dim > 1`, `band M` bounds every axis to `[-M/2, M/2]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sft_core::band;
use sft_core::sampling::TrigPolynomial;
use sft_core::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub count: usize,
    pub l1: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub dim: usize,
    /// `N` for one dimension, `M` otherwise.
    pub band: u64,
    pub terms: Vec<(Vec<i64>, Complex64)>,
    pub noise: Option<Noise>,
    pub out_of_band: Vec<(Vec<i64>, Complex64)>,
}

/// The signal as an oracle plus its exact in-band coefficients.
#[derive(Debug, Clone)]
pub struct Materialized {
    pub oracle: TrigPolynomial,
    pub reference: BTreeMap<Vec<i64>, Complex64>,
    pub tail_l1: f64,
}

impl SignalSpec {
    pub fn in_band(&self, freq: &[i64]) -> bool {
        if self.dim == 1 {
            band::in_band(freq[0], self.band)
        } else {
            let half = (self.band / 2) as i64;
            freq.iter().all(|&w| (-half..=half).contains(&w))
        }
    }

    /// `‖f̂ − f̄̂‖₁`, the declared out-of-band mass.
    pub fn tail_l1(&self) -> f64 {
        self.out_of_band.iter().fold(0.0, |acc, (_, c)| acc + c.norm())
    }

    /// Number of in-band lattice points.
    fn band_points(&self) -> u128 {
        if self.dim == 1 {
            self.band as u128
        } else {
            ((2 * (self.band / 2) + 1) as u128).saturating_pow(self.dim as u32)
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<i64> {
        if self.dim == 1 {
            vec![rng.gen_range(band::band_min(self.band)..=band::band_max(self.band))]
        } else {
            let half = (self.band / 2) as i64;
            (0..self.dim).map(|_| rng.gen_range(-half..=half)).collect()
        }
    }

    /// Expands noise and builds the oracle.
    pub fn materialize(&self) -> Materialized {
        let mut reference: BTreeMap<Vec<i64>, Complex64> = self.terms.iter().cloned().collect();
        if let Some(noise) = self.noise {
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            let mut used: BTreeSet<Vec<i64>> = reference.keys().cloned().collect();
            let mut spikes: Vec<(Vec<i64>, f64, f64)> = Vec::with_capacity(noise.count);
            while spikes.len() < noise.count {
                let p = self.random_point(&mut rng);
                if used.insert(p.clone()) {
                    let weight: f64 = rng.gen_range(0.5..1.5);
                    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    spikes.push((p, weight, phase));
                }
            }
            let total: f64 = spikes.iter().map(|s| s.1).sum();
            for (p, weight, phase) in spikes {
                reference.insert(p, Complex64::from_polar(noise.l1 * weight / total, phase));
            }
        }
        let mut oracle = TrigPolynomial::new(self.dim);
        for (w, &c) in reference.iter().chain(self.out_of_band.iter().map(|(w, c)| (w, c))) {
            oracle.push(w, c);
        }
        let oracle = oracle.with_bandwidth(self.band);
        Materialized { oracle, reference, tail_l1: self.tail_l1() }
    }

    /// `k` unit-coefficient tones at distinct random in-band points.
    pub fn random_tones(dim: usize, band: u64, k: usize, seed: u64) -> Result<Self, ParseError> {
        let mut spec = SignalSpec { dim, band, terms: Vec::new(), noise: None, out_of_band: Vec::new() };
        if (k as u128) > spec.band_points() {
            return Err(ParseError { line: 0, message: format!("cannot place {k} distinct tones in the band") });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        while spec.terms.len() < k {
            let p = spec.random_point(&mut rng);
            if seen.insert(p.clone()) {
                spec.terms.push((p, Complex64::new(1.0, 0.0)));
            }
        }
        Ok(spec)
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut dim: Option<usize> = None;
        let mut band: Option<u64> = None;
        let mut pending: Vec<(usize, &str, Vec<&str>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let keyword = fields.next().expect("non-empty line");
            let args: Vec<&str> = fields.collect();
            let err = |message: String| ParseError { line, message };
            match keyword {
                "dim" | "band" => {
                    let [value] = args[..] else {
                        return Err(err(format!("`{keyword}` takes one value")));
                    };
                    let value: u64 = value.parse().map_err(|_| err(format!("bad {keyword} `{value}`")))?;
                    if value == 0 {
                        return Err(err(format!("{keyword} must be positive")));
                    }
                    let slot_taken = if keyword == "dim" {
                        dim.replace(value as usize).is_some()
                    } else {
                        band.replace(value).is_some()
                    };
                    if slot_taken {
                        return Err(err(format!("`{keyword}` given twice")));
                    }
                }
                "term" | "oob" | "noise" => pending.push((line, keyword, args)),
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let missing = |what: &str| ParseError { line: 0, message: format!("missing `{what}` header") };
        let dim = dim.ok_or_else(|| missing("dim"))?;
        let band = band.ok_or_else(|| missing("band"))?;
        let mut spec = SignalSpec { dim, band, terms: Vec::new(), noise: None, out_of_band: Vec::new() };
        let mut seen = BTreeSet::new();
        for (line, keyword, args) in pending {
            let err = |message: String| ParseError { line, message };
            if keyword == "noise" {
                let [count, l1, seed] = args[..] else {
                    return Err(err("`noise` takes <count> <l1> <seed>".into()));
                };
                let count: usize = count.parse().map_err(|_| err(format!("bad count `{count}`")))?;
                let l1: f64 = l1.parse().map_err(|_| err(format!("bad l1 `{l1}`")))?;
                let seed: u64 = seed.parse().map_err(|_| err(format!("bad seed `{seed}`")))?;
                if !(l1.is_finite() && l1 >= 0.0) {
                    return Err(err("noise l1 must be finite and non-negative".into()));
                }
                if spec.noise.replace(Noise { count, l1, seed }).is_some() {
                    return Err(err("`noise` given twice".into()));
                }
                continue;
            }
            if args.len() != dim + 2 {
                return Err(err(format!("`{keyword}` takes {dim} frequencies then re im")));
            }
            let freq = args[..dim]
                .iter()
                .map(|a| a.parse::<i64>().map_err(|_| err(format!("bad frequency `{a}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let re: f64 = args[dim].parse().map_err(|_| err(format!("bad real part `{}`", args[dim])))?;
            let im: f64 = args[dim + 1].parse().map_err(|_| err(format!("bad imaginary part `{}`", args[dim + 1])))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(err("coefficients must be finite".into()));
            }
            if !seen.insert(freq.clone()) {
                return Err(err(format!("frequency {freq:?} appears twice")));
            }
            let c = Complex64::new(re, im);
            if keyword == "term" {
                if !spec.in_band(&freq) {
                    return Err(err(format!("term {freq:?} is outside the band")));
                }
                spec.terms.push((freq, c));
            } else {
                if spec.in_band(&freq) {
                    return Err(err(format!("oob {freq:?} lies inside the band")));
                }
                spec.out_of_band.push((freq, c));
            }
        }
        if let Some(noise) = spec.noise {
            let free = spec.band_points().saturating_sub(spec.terms.len() as u128);
            if noise.count as u128 > free {
                return Err(ParseError { line: 0, message: format!("no room for {} noise spikes", noise.count) });
            }
        }
        Ok(spec)
    }
}
