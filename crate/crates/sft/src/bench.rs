//! Parameter sweeps.
//!
//! A grid file has one case per line, `<algorithm> <n> <k> <epsilon_inv>`,
//! optionally followed by `seed=`, `c=`, `sigma=`, `dims=` or `mode=`
//! settings. For `multidim`, `n` is the per-axis bandwidth `M`. Each case
//! runs on `k` random unit tones drawn from its seed.

use anyhow::{Context, Result};

use crate::run::{run, Algorithm, MultidimMode, RunConfig};
use crate::signal::{ParseError, SignalSpec};
use crate::table::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub config: RunConfig,
    pub n: u64,
    pub dims: usize,
}

pub const COLUMNS: [&str; 9] =
    ["algorithm", "n", "k", "epsilon_inv", "seed", "samples", "sampling_ms", "recovery_ms", "success"];

pub fn parse_grid(text: &str) -> Result<Vec<BenchCase>, ParseError> {
    let mut cases = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ParseError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(err("expected <algorithm> <n> <k> <epsilon_inv>".into()));
        }
        let algorithm = Algorithm::parse(fields[0]).ok_or_else(|| err(format!("unknown algorithm `{}`", fields[0])))?;
        let number = |name: &str, s: &str| s.parse::<u64>().map_err(|_| err(format!("bad {name} `{s}`")));
        let n = number("n", fields[1])?;
        let k = number("k", fields[2])?;
        let epsilon_inv = number("epsilon_inv", fields[3])?;
        let mut config = RunConfig::new(algorithm, k, epsilon_inv);
        let mut dims = if algorithm == Algorithm::Multidim { 2 } else { 1 };
        for setting in &fields[4..] {
            let (key, value) = setting.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{setting}`")))?;
            match key {
                "seed" => config.seed = number("seed", value)?,
                "c" => config.c = Some(number("c", value)?),
                "sigma" => config.sigma = value.parse().map_err(|_| err(format!("bad sigma `{value}`")))?,
                "dims" => dims = number("dims", value)? as usize,
                "mode" => {
                    config.mode = <MultidimMode as clap::ValueEnum>::from_str(value, true)
                        .map_err(|_| err(format!("bad mode `{value}`")))?
                }
                other => return Err(err(format!("unknown setting `{other}`"))),
            }
        }
        cases.push(BenchCase { config, n, dims });
    }
    Ok(cases)
}

/// Runs every case in order; a case that fails to run is reported as
/// unsuccessful rather than aborting the sweep.
pub fn bench(cases: &[BenchCase]) -> Result<Table> {
    let mut table = Table::new(COLUMNS);
    for case in cases {
        let cfg = &case.config;
        let spec = SignalSpec::random_tones(case.dims, case.n, cfg.k as usize, cfg.seed)
            .with_context(|| format!("case {} n={} k={}", cfg.algorithm.name(), case.n, cfg.k))?;
        let (samples, sampling, recovery, success) = match run(cfg, &spec) {
            Ok(outcome) => {
                let r = outcome.report;
                (r.samples.to_string(), format!("{:.3}", r.sampling_ms), format!("{:.3}", r.recovery_ms), r.satisfied)
            }
            Err(e) => {
                eprintln!("warning: {} n={} k={}: {e:#}", cfg.algorithm.name(), case.n, cfg.k);
                (String::new(), String::new(), String::new(), false)
            }
        };
        table.push([
            cfg.algorithm.name().to_string(),
            case.n.to_string(),
            cfg.k.to_string(),
            cfg.epsilon_inv.to_string(),
            cfg.seed.to_string(),
            samples,
            sampling,
            recovery,
            success.to_string(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let cases = parse_grid("# sweep\nalg3det 4096 2 2\n\nalg2rand 1024 1 2 seed=9 sigma=0.8\nmultidim 8 2 1 dims=3 mode=rand\n").unwrap();
        assert_eq!(cases.len(), 3);
        assert_eq!(cases[1].config.seed, 9);
        assert_eq!(cases[1].config.sigma, 0.8);
        assert_eq!(cases[2].dims, 3);
        assert_eq!(cases[2].config.mode, MultidimMode::Rand);
        assert!(parse_grid("alg9 1 2 3").is_err());
        assert!(parse_grid("alg1 64 1").is_err());
        assert!(parse_grid("alg1 64 1 2 speed=3").is_err());
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let table = bench(&parse_grid("# nothing\n").unwrap()).unwrap();
        assert_eq!(table.to_csv(), COLUMNS.join(",") + "\n");
    }
}
