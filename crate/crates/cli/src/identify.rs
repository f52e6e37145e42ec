use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use ggmid::oracle::default_alpha;
use ggmid::{
    identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable, CachedOracle, CiOracle,
    EmpiricalOracle, ExactOracle, Graph, Options, ScatterData,
};
use serde::Serialize;

use crate::io;
use crate::report::{
    ConfigEcho, FvsDoc, IdentifyDoc, Interpretation, OracleSummary, TruthComparison, ALPHA_FROM_BETA, ALPHA_FROM_DEFAULT,
    ALPHA_FROM_FLAG,
};

const DEFAULT_ALPHA_DELTA: f64 = 0.05;
const DEFAULT_ALPHA_C: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Decisions from a known covariance matrix.
    Exact,
    /// Decisions from samples (or a scatter matrix) against a threshold.
    Sample,
}

#[derive(Clone, Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Covariance matrix file (exact mode) or scatter matrix file (sample
    /// mode, together with --n).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Samples file (sample mode).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Sample count behind a scatter matrix given with --input.
    #[arg(long)]
    pub n: Option<usize>,
    /// Independence threshold for sample mode.
    #[arg(long, conflicts_with = "beta")]
    pub alpha: Option<f64>,
    /// Dependence margin; sample mode then uses alpha = beta / 2.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Zero tolerance of the exact oracle [default: 1e-8 * max diagonal].
    #[arg(long)]
    pub epsilon_zero: Option<f64>,
    /// Subtract column means from the samples before use.
    #[arg(long)]
    pub center: bool,
    /// Evaluate nodes, pairs and candidate sets on all cores.
    #[arg(long)]
    pub parallel: bool,
    /// Edge list of the true graph; the report then compares recovered
    /// edges against it.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Built {
    Exact(CachedOracle<ExactOracle<f64>>),
    Empirical(CachedOracle<EmpiricalOracle<f64>>),
}

struct Prepared {
    oracle: Built,
    truth: Option<Graph>,
    echo: ConfigEcho,
    alpha_source: Option<&'static str>,
}

fn positive(name: &str, x: Option<f64>) -> Result<()> {
    match x {
        Some(v) if !(v > 0.0 && v.is_finite()) => bail!("--{name} must be a positive number, got {v}"),
        _ => Ok(()),
    }
}

fn prepare(args: &OracleArgs, k: usize, ell: Option<usize>, cap: usize) -> Result<Prepared> {
    positive("alpha", args.alpha)?;
    positive("beta", args.beta)?;
    positive("epsilon-zero", args.epsilon_zero)?;
    let mut echo = ConfigEcho {
        mode: match args.mode {
            Mode::Exact => "exact",
            Mode::Sample => "sample",
        },
        k,
        ell,
        alpha: None,
        alpha_source: None,
        beta: args.beta,
        epsilon_zero: None,
        input: args.input.as_ref().map(|p| p.display().to_string()),
        samples: args.samples.as_ref().map(|p| p.display().to_string()),
        n: None,
        center: args.center,
        parallel: args.parallel,
    };
    match args.mode {
        Mode::Exact => {
            if args.samples.is_some() || args.n.is_some() || args.center {
                bail!("--samples, --n and --center apply only to --mode sample");
            }
            if args.alpha.is_some() || args.beta.is_some() {
                bail!("--alpha and --beta apply only to --mode sample");
            }
            let Some(path) = &args.input else { bail!("--mode exact needs --input <covariance file>") };
            let sigma = io::read_matrix(path)?;
            let eps = args.epsilon_zero.unwrap_or_else(|| ggmid::oracle::default_eps_zero(&sigma));
            echo.epsilon_zero = Some(eps);
            let o = ExactOracle::new(sigma, eps).context("cannot build the exact oracle")?;
            Ok(Prepared { oracle: Built::Exact(CachedOracle::new(o)), truth: None, echo, alpha_source: None })
        }
        Mode::Sample => {
            if args.epsilon_zero.is_some() {
                bail!("--epsilon-zero applies only to --mode exact");
            }
            let data = match (&args.samples, &args.input, args.n) {
                (Some(path), None, None) => ScatterData::from_samples(&io::read_samples(path)?, args.center)
                    .with_context(|| format!("{}: unusable samples", path.display()))?,
                (None, Some(path), Some(n)) => {
                    if args.center {
                        bail!("--center needs raw samples (--samples)");
                    }
                    ScatterData::new(io::read_matrix(path)?, n)?
                }
                _ => bail!("--mode sample needs either --samples <file> or --input <scatter file> with --n"),
            };
            echo.n = Some(data.n());
            let (alpha, source) = match (args.alpha, args.beta) {
                (Some(a), _) => (a, ALPHA_FROM_FLAG),
                (None, Some(b)) => (b / 2.0, ALPHA_FROM_BETA),
                (None, None) => {
                    let a = default_alpha(data.dim(), data.n(), cap, DEFAULT_ALPHA_DELTA, DEFAULT_ALPHA_C)?;
                    log::warn!("no --alpha or --beta given; using the heuristic default alpha = {a}");
                    (a, ALPHA_FROM_DEFAULT)
                }
            };
            echo.alpha = Some(alpha);
            echo.alpha_source = Some(source);
            let o = EmpiricalOracle::new(data, alpha)?;
            Ok(Prepared { oracle: Built::Empirical(CachedOracle::new(o)), truth: None, echo, alpha_source: Some(source) })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Degree,
    StrongSep,
    Fvs { ell: usize },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Degree => "check-degree",
            Command::StrongSep => "check-strong-sep",
            Command::Fvs { .. } => "find-fvs",
        }
    }
}

fn summary<O: CiOracle<Scalar = f64>>(o: &CachedOracle<O>, threshold: f64, queries: u64) -> OracleSummary {
    OracleSummary { kind: o.kind(), queries, distinct_queries: o.cached_entries(), threshold }
}

fn execute<O>(cmd: Command, o: &CachedOracle<O>, threshold: f64, k: usize, p: &Prepared, opts: Options) -> Result<(String, bool)>
where
    O: CiOracle<Scalar = f64> + Sync,
{
    let interp = Interpretation::new(o.kind(), p.alpha_source);
    fn render<T: Serialize>(doc: &T) -> Result<String> {
        Ok(serde_json::to_string_pretty(doc)? + "\n")
    }
    match cmd {
        Command::Fvs { ell } => {
            let r = identify_generalized_fvs(o, k, ell, opts)?;
            let doc = FvsDoc::new(p.echo.clone(), &r, summary(o, threshold, r.stats.queries), interp);
            Ok((render(&doc)?, doc.verdict))
        }
        _ => {
            let r = if cmd == Command::Degree {
                identify_degree_bounded(o, k, opts)?
            } else {
                identify_strongly_separable(o, k, opts)?
            };
            let mut doc = IdentifyDoc::new(cmd.name(), p.echo.clone(), &r, summary(o, threshold, r.stats.queries), interp);
            if let Some(truth) = &p.truth {
                doc.truth = Some(TruthComparison::new(&r.recovered_edges, r.verdict, truth));
            }
            Ok((render(&doc)?, doc.verdict))
        }
    }
}

/// Runs one identification command; returns whether the verdict holds.
pub fn run(cmd: Command, k: usize, args: &OracleArgs) -> Result<bool> {
    let (ell, cap) = match cmd {
        Command::Fvs { ell } => (Some(ell), k + ell),
        _ => (None, k),
    };
    let mut prepared = prepare(args, k, ell, cap)?;
    if let Some(path) = &args.truth {
        if ell.is_some() {
            bail!("--truth is not supported by find-fvs");
        }
        let p = match &prepared.oracle {
            Built::Exact(o) => o.dim(),
            Built::Empirical(o) => o.dim(),
        };
        prepared.truth = Some(io::read_edges(path, p)?);
    }
    let opts = Options { parallel: args.parallel, ..Options::default() };
    let (json, verdict) = match &prepared.oracle {
        Built::Exact(o) => execute(cmd, o, o.inner().eps_zero(), k, &prepared, opts)?,
        Built::Empirical(o) => execute(cmd, o, o.inner().alpha(), k, &prepared, opts)?,
    };
    match &args.out {
        Some(path) => io::write_file(path, &json)?,
        None => print!("{json}"),
    }
    Ok(verdict)
}
