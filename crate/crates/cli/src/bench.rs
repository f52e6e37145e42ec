use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use ggmid::bench::{n_for_success_level, run_bench_with, AlphaRule, BenchAlgorithm, BenchConfig, BenchRow};
use ggmid::synth::Family;

use crate::identify::Mode;

const HEADER: [&str; 12] = [
    "algorithm", "p", "k", "ell", "n", "trials", "successes", "success_rate", "mean_queries", "wall_ms", "alpha",
    "beta",
];

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    /// degree, strong-sep or fvs.
    #[arg(long, default_value = "strong-sep")]
    pub algorithm: BenchAlgorithm,
    #[arg(long, default_value = "chain")]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub ell: usize,
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_list: Vec<usize>,
    /// `exact` runs the exact oracle; `sample` draws --n-list samples per trial.
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Comma-separated sample sizes (sample mode).
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed threshold for every trial.
    #[arg(long, conflicts_with = "alpha_rule")]
    pub alpha: Option<f64>,
    /// beta-half (alpha = beta/2 of each trial's model) or default (the
    /// data-only heuristic).
    #[arg(long, default_value = "beta-half")]
    pub alpha_rule: String,
    /// Pick n as the smallest --n-list entry reaching --target-rate at this
    /// p, then sweep --p-list at that n only.
    #[arg(long)]
    pub calibrate_p: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    pub target_rate: f64,
    /// Run trials one at a time.
    #[arg(long)]
    pub sequential: bool,
    /// CSV output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn alpha_rule(args: &BenchArgs) -> Result<AlphaRule> {
    if let Some(a) = args.alpha {
        if !(a > 0.0 && a.is_finite()) {
            bail!("--alpha must be a positive number, got {a}");
        }
        return Ok(AlphaRule::Fixed(a));
    }
    match args.alpha_rule.as_str() {
        "beta-half" => Ok(AlphaRule::BetaHalf),
        "default" => Ok(AlphaRule::Default { delta: 0.05, c: 1.0 }),
        other => bail!("unknown --alpha-rule '{other}' (expected beta-half or default)"),
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn record(r: &BenchRow) -> [String; 12] {
    [
        r.algorithm.to_string(),
        r.p.to_string(),
        r.k.to_string(),
        r.ell.to_string(),
        opt(r.n),
        r.trials.to_string(),
        r.successes.to_string(),
        r.success_rate.to_string(),
        r.mean_queries.to_string(),
        format!("{:.3}", r.wall_ms),
        opt(r.alpha),
        r.beta.to_string(),
    ]
}

pub fn run(args: &BenchArgs) -> Result<()> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let n_list: Vec<Option<usize>> = match args.mode {
        Mode::Exact => {
            if !args.n_list.is_empty() || args.calibrate_p.is_some() {
                bail!("--n-list and --calibrate-p apply only to --mode sample");
            }
            vec![None]
        }
        Mode::Sample => {
            if args.n_list.is_empty() {
                bail!("--mode sample needs --n-list");
            }
            if let Some(&bad) = args.n_list.iter().find(|&&n| n == 0) {
                bail!("sample sizes must be positive, got {bad}");
            }
            args.n_list.iter().copied().map(Some).collect()
        }
    };
    let mut cfg = BenchConfig {
        algorithm: args.algorithm,
        family: args.family,
        k: args.k,
        ell: args.ell,
        p_list: args.p_list.clone(),
        n_list,
        trials: args.trials,
        seed: args.seed,
        alpha_rule: alpha_rule(args)?,
        parallel: !args.sequential,
    };
    if let Some(p0) = args.calibrate_p {
        match n_for_success_level(&cfg, p0, &args.n_list, args.target_rate)? {
            Some(n) => {
                log::info!("n = {n} reaches success rate {} at p = {p0}", args.target_rate);
                cfg.n_list = vec![Some(n)];
            }
            None => bail!("no n in {:?} reaches success rate {} at p = {p0}", args.n_list, args.target_rate),
        }
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    w.flush()?;
    let mut write_error = None;
    run_bench_with(&cfg, |row| {
        if write_error.is_none() {
            if let Err(e) = w.write_record(record(row)).map_err(anyhow::Error::from).and_then(|_| Ok(w.flush()?)) {
                write_error = Some(e);
            }
        }
    })?;
    match write_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
