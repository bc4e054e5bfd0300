//! One pipeline run: plan, sample, recover, verify.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sft_core::band;
use sft_core::measurement::{MeasurementPlan, DETERMINISTIC_C, RANDOMIZED_C};
use sft_core::multidim::{flatten_oracle, multidim_plan, select_dimension_moduli, Mode};
use sft_core::oracle::{verify_bound_lattice, verify_bound_sparse, ErrorReport};
use sft_core::recovery::{recover_flat, recover_tensor, Params, Recovery, RecoveryStats};
use sft_core::sampling::{fast_multiply, AliasedSpectra};
use sft_core::Complex64;

use crate::signal::{Materialized, SignalSpec};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Fast multiply only: aliased spectra checked against exact row sums.
    Alg1,
    /// Flat recovery, deterministic plan.
    Alg2det,
    /// Flat recovery, randomized plan.
    Alg2rand,
    /// Tensor recovery, deterministic plan.
    Alg3det,
    /// Tensor recovery, randomized plan.
    Alg3rand,
    /// `D`-variate recovery through the flattened tensor pipeline.
    Multidim,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Alg1 => "alg1",
            Self::Alg2det => "alg2det",
            Self::Alg2rand => "alg2rand",
            Self::Alg3det => "alg3det",
            Self::Alg3rand => "alg3rand",
            Self::Multidim => "multidim",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        <Self as clap::ValueEnum>::from_str(s, true).ok()
    }

    pub fn is_randomized(self, mode: MultidimMode) -> bool {
        match self {
            Self::Alg2rand | Self::Alg3rand => true,
            Self::Multidim => mode == MultidimMode::Rand,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MultidimMode {
    #[default]
    Det,
    Rand,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub k: u64,
    pub epsilon_inv: u64,
    /// Modulus constant; deterministic default 4, randomized plans fix 14.
    pub c: Option<u64>,
    pub sigma: f64,
    pub seed: u64,
    pub mode: MultidimMode,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, k: u64, epsilon_inv: u64) -> Self {
        Self { algorithm, k, epsilon_inv, c: None, sigma: 0.9, seed: 0, mode: MultidimMode::Det }
    }

    fn effective_c(&self) -> Result<u64> {
        if self.algorithm.is_randomized(self.mode) {
            match self.c {
                None | Some(RANDOMIZED_C) => Ok(RANDOMIZED_C),
                Some(c) => bail!("randomized plans use c = {RANDOMIZED_C}, got --c {c}"),
            }
        } else {
            let c = self.c.unwrap_or(DETERMINISTIC_C);
            if c < DETERMINISTIC_C {
                bail!("deterministic plans need c >= {DETERMINISTIC_C}, got {c}");
            }
            Ok(c)
        }
    }
}

/// Serializable copy of [`ErrorReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub l2_error: f64,
    pub opt_k_l2: f64,
    pub opt_keps_l1: f64,
    pub tail_l1: f64,
    pub epsilon_term: f64,
    pub tail_term: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl BoundReport {
    fn new(r: &ErrorReport, k: u64, epsilon_inv: u64) -> Self {
        Self {
            l2_error: r.l2_error,
            opt_k_l2: r.opt_k_l2,
            opt_keps_l1: r.opt_keps_l1,
            tail_l1: r.tail_l1,
            epsilon_term: r.epsilon_term(k, epsilon_inv),
            tail_term: r.tail_term(k),
            rhs: r.rhs,
            satisfied: r.satisfied,
        }
    }
}

/// Largest deviation of any aliased entry from its exact in-band row sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AliasingReport {
    pub max_deviation: f64,
    pub tail_l1: f64,
    pub entries: u64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub algorithm: Algorithm,
    pub dims: usize,
    /// `N`, or `M` for multidim runs.
    pub bandwidth: u64,
    /// Flattened bandwidth `Ñ` for multidim runs.
    pub flat_bandwidth: u64,
    pub k: u64,
    pub epsilon_inv: u64,
    pub c: u64,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub moduli: usize,
    pub s1: u64,
    pub rows: u64,
    pub lambda: Option<usize>,
    pub samples: u64,
    pub sample_budget: u64,
    pub sampling_ms: f64,
    pub recovery_ms: f64,
    pub estimated: u64,
    pub band_scan: u64,
    pub reconstructions: u64,
    pub candidates: u64,
    pub bound: Option<BoundReport>,
    pub aliasing: Option<AliasingReport>,
    pub satisfied: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub table: Table,
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn plan_for(cfg: &RunConfig, n: u64, c: u64) -> Result<MeasurementPlan> {
    let (k, e) = (cfg.k, cfg.epsilon_inv);
    let plan = match cfg.algorithm {
        Algorithm::Alg1 | Algorithm::Alg2det => MeasurementPlan::flat(k, e, n, c),
        Algorithm::Alg2rand => MeasurementPlan::flat_randomized(k, e, n, cfg.sigma, cfg.seed),
        Algorithm::Alg3det => MeasurementPlan::tensor(k, e, n, c),
        Algorithm::Alg3rand => MeasurementPlan::tensor_randomized(k, e, n, cfg.sigma, n, cfg.seed),
        Algorithm::Multidim => unreachable!("multidim plans are built from the frequency map"),
    };
    Ok(plan?)
}

fn base_report(cfg: &RunConfig, spec: &SignalSpec, plan: &MeasurementPlan, c: u64) -> Report {
    let randomized = plan.is_randomized();
    let mut warnings = Vec::new();
    if plan.s().exceeds_band() {
        warnings.push(format!(
            "k/ε + K = {} reaches the bandwidth {}; the row-count analysis does not cover this regime",
            plan.s().ratio() + plan.s().count() as u64,
            plan.bandwidth()
        ));
    }
    Report {
        algorithm: cfg.algorithm,
        dims: spec.dim,
        bandwidth: spec.band,
        flat_bandwidth: plan.bandwidth(),
        k: cfg.k,
        epsilon_inv: cfg.epsilon_inv,
        c,
        sigma: randomized.then_some(cfg.sigma),
        seed: randomized.then_some(cfg.seed),
        moduli: plan.s().count(),
        s1: plan.s().s1(),
        rows: plan.row_count(),
        lambda: plan.t().map(|t| t.lambda()),
        samples: 0,
        sample_budget: plan.sample_budget(),
        sampling_ms: 0.0,
        recovery_ms: 0.0,
        estimated: 0,
        band_scan: 0,
        reconstructions: 0,
        candidates: 0,
        bound: None,
        aliasing: None,
        satisfied: false,
        warnings,
    }
}

fn record_stats(report: &mut Report, stats: &RecoveryStats) {
    report.estimated = stats.estimated;
    report.band_scan = stats.band_scan;
    report.reconstructions = stats.reconstructions;
    report.candidates = stats.candidates;
}

fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Runs `cfg` on `spec`.
pub fn run(cfg: &RunConfig, spec: &SignalSpec) -> Result<Outcome> {
    if cfg.k == 0 || cfg.epsilon_inv == 0 {
        bail!("k and 1/ε must be positive");
    }
    let c = cfg.effective_c()?;
    let signal = spec.materialize();
    match cfg.algorithm {
        Algorithm::Multidim => run_multidim(cfg, spec, &signal, c),
        _ if spec.dim != 1 => bail!("{} needs a one-dimensional signal, got dim {}", cfg.algorithm.name(), spec.dim),
        _ => run_flat(cfg, spec, &signal, c),
    }
}

fn run_flat(cfg: &RunConfig, spec: &SignalSpec, signal: &Materialized, c: u64) -> Result<Outcome> {
    let n = spec.band;
    let plan = plan_for(cfg, n, c).with_context(|| format!("building the {} plan", cfg.algorithm.name()))?;
    let mut report = base_report(cfg, spec, &plan, c);
    let start = Instant::now();
    let spectra = fast_multiply(&signal.oracle, &plan)?;
    report.sampling_ms = millis(start);
    report.samples = spectra.sample_count();
    let reference: BTreeMap<i64, Complex64> = signal.reference.iter().map(|(w, &c)| (w[0], c)).collect();

    if cfg.algorithm == Algorithm::Alg1 {
        let (aliasing, table) = check_aliasing(&spectra, &plan, &reference, signal.tail_l1);
        report.satisfied = aliasing.satisfied;
        report.aliasing = Some(aliasing);
        return Ok(Outcome { report, table });
    }

    let params = Params::new(cfg.k, cfg.epsilon_inv, n);
    let start = Instant::now();
    let recovery = if plan.is_tensor() {
        recover_tensor(&spectra, params, &plan)?
    } else {
        recover_flat(&spectra, params, &plan)?
    };
    report.recovery_ms = millis(start);
    record_stats(&mut report, &recovery.stats);
    let bound = verify_bound_sparse(&recovery.spectrum, &reference, cfg.k, cfg.epsilon_inv, signal.tail_l1);
    report.bound = Some(BoundReport::new(&bound, cfg.k, cfg.epsilon_inv));
    report.satisfied = bound.satisfied;
    Ok(Outcome { report, table: spectrum_table(&recovery) })
}

fn spectrum_table(recovery: &Recovery) -> Table {
    let mut table = Table::new(["omega", "re", "im"]);
    for (&w, c) in recovery.spectrum.entries() {
        table.push([w.to_string(), format_float(c.re), format_float(c.im)]);
    }
    table
}

fn check_aliasing(
    spectra: &AliasedSpectra,
    plan: &MeasurementPlan,
    reference: &BTreeMap<i64, Complex64>,
    tail_l1: f64,
) -> (AliasingReport, Table) {
    let n = plan.bandwidth();
    let mut table = Table::new(["u", "h", "re", "im"]);
    let mut max_deviation: f64 = 0.0;
    let mut entries = 0;
    for u in plan.lengths() {
        let mut exact = vec![Complex64::new(0.0, 0.0); u as usize];
        for (&w, &c) in reference {
            if band::in_band(w, n) {
                exact[w.rem_euclid(u as i64) as usize] += c;
            }
        }
        let got = spectra.spectrum(u).expect("plan length was sampled");
        for (h, (&g, &e)) in got.iter().zip(&exact).enumerate() {
            max_deviation = max_deviation.max((g - e).norm());
            table.push([u.to_string(), h.to_string(), format_float(g.re), format_float(g.im)]);
            entries += 1;
        }
    }
    // Sampling and the DFT carry rounding of order 1e-12 per unit of signal.
    let scale: f64 = 1.0 + reference.values().map(|c| c.norm()).sum::<f64>() + tail_l1;
    let satisfied = max_deviation <= tail_l1 + 1e-10 * scale;
    (AliasingReport { max_deviation, tail_l1, entries, satisfied }, table)
}

fn run_multidim(cfg: &RunConfig, spec: &SignalSpec, signal: &Materialized, c: u64) -> Result<Outcome> {
    let map = select_dimension_moduli(spec.band, spec.dim)?;
    let mode = match cfg.mode {
        MultidimMode::Det => Mode::Deterministic,
        MultidimMode::Rand => Mode::Randomized { sigma: cfg.sigma, seed: cfg.seed },
    };
    if mode == Mode::Deterministic && c != DETERMINISTIC_C {
        bail!("multidim deterministic plans use c = {DETERMINISTIC_C}, got --c {c}");
    }
    let plan = multidim_plan(&map, cfg.k, cfg.epsilon_inv, mode)?;
    let mut report = base_report(cfg, spec, &plan, c);
    if signal.tail_l1 > 0.0 {
        report.warnings.push("out-of-band terms fall outside the multidimensional guarantee".into());
    }
    let flat = flatten_oracle(&signal.oracle, &map)?;
    let start = Instant::now();
    let spectra = fast_multiply(&flat, &plan)?;
    report.sampling_ms = millis(start);
    report.samples = spectra.sample_count();
    let start = Instant::now();
    let recovery = recover_tensor(&spectra, Params::new(cfg.k, cfg.epsilon_inv, map.n_tilde()), &plan)?;
    let entries: BTreeMap<Vec<i64>, Complex64> =
        recovery.spectrum.entries().iter().map(|(&w, &c)| (map.g_inverse(w), c)).collect();
    report.recovery_ms = millis(start);
    record_stats(&mut report, &recovery.stats);
    let bound = verify_bound_lattice(&entries, &signal.reference, cfg.k, cfg.epsilon_inv);
    report.bound = Some(BoundReport::new(&bound, cfg.k, cfg.epsilon_inv));
    report.satisfied = bound.satisfied;

    let mut header: Vec<String> = (1..=spec.dim).map(|d| format!("omega_{d}")).collect();
    header.extend(["re".to_string(), "im".to_string()]);
    let mut table = Table::new(header);
    for (x, c) in &entries {
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.extend([format_float(c.re), format_float(c.im)]);
        table.push(row);
    }
    Ok(Outcome { report, table })
}
