//! Sample-complexity sweeps: repeated identification runs on synthetic
//! models, scored against the brute-force certifiers.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_degree_bounded, is_generalized_fvs, is_strongly_k_separable, Graph};
use crate::identify::{
    identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable, Options,
};
use crate::linalg::IndexSet;
use crate::oracle::{default_alpha, CachedOracle, CiOracle, EmpiricalOracle, ExactOracle};
use crate::synth::{build_model, sample_gaussian, Family, GroundTruthModel, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchAlgorithm {
    Degree,
    StrongSep,
    Fvs,
}

impl fmt::Display for BenchAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchAlgorithm::Degree => "degree",
            BenchAlgorithm::StrongSep => "strong-sep",
            BenchAlgorithm::Fvs => "fvs",
        })
    }
}

impl FromStr for BenchAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" | "check-degree" => Ok(BenchAlgorithm::Degree),
            "strong-sep" | "check-strong-sep" => Ok(BenchAlgorithm::StrongSep),
            "fvs" | "find-fvs" => Ok(BenchAlgorithm::Fvs),
            other => Err(Error::InvalidParameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// How the empirical threshold is chosen in sample mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaRule {
    /// `α = β / 2` with `β` the model's dependence margin.
    BetaHalf,
    Fixed(f64),
    /// [`default_alpha`] with the largest conditioning size of the run.
    Default { delta: f64, c: f64 },
}

impl fmt::Display for AlphaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaRule::BetaHalf => write!(f, "beta-half"),
            AlphaRule::Fixed(a) => write!(f, "fixed:{a}"),
            AlphaRule::Default { delta, c } => write!(f, "default:{delta}:{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algorithm: BenchAlgorithm,
    pub family: Family,
    pub k: usize,
    pub ell: usize,
    pub p_list: Vec<usize>,
    /// `None` runs the exact oracle.
    pub n_list: Vec<Option<usize>>,
    pub trials: usize,
    pub seed: u64,
    pub alpha_rule: AlphaRule,
    /// Run trials of a row concurrently.
    pub parallel: bool,
}

impl BenchConfig {
    /// Largest conditioning size any query of the run uses.
    pub fn conditioning_cap(&self) -> usize {
        match self.algorithm {
            BenchAlgorithm::Fvs => self.k + self.ell,
            _ => self.k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: BenchAlgorithm,
    pub family: String,
    pub p: usize,
    pub k: usize,
    pub ell: usize,
    /// Empty for exact-oracle rows.
    pub n: Option<usize>,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub wall_ms: f64,
    /// Mean threshold over trials; empty for exact rows.
    pub alpha: Option<f64>,
    /// Mean dependence margin over trial models.
    pub beta: f64,
    pub failed_runs: usize,
}

/// What the generating model says the algorithm should output.
#[derive(Clone, Debug, PartialEq)]
pub enum Truth {
    Verdict { holds: bool, edges: Vec<(usize, usize)> },
    Fvs(Vec<(IndexSet, Vec<(usize, usize)>)>),
}

pub fn ground_truth(g: &Graph, algorithm: BenchAlgorithm, k: usize, ell: usize) -> Truth {
    match algorithm {
        BenchAlgorithm::Degree => Truth::Verdict { holds: is_degree_bounded(g, k), edges: g.edges() },
        BenchAlgorithm::StrongSep => {
            Truth::Verdict { holds: is_strongly_k_separable(g, k), edges: g.edges() }
        }
        BenchAlgorithm::Fvs => Truth::Fvs(
            (0..g.node_count())
                .combinations(ell)
                .map(IndexSet::new)
                .filter(|f| is_generalized_fvs(g, f, k))
                .map(|f| {
                    let edges = g.edges_within(&f.complement(g.node_count()));
                    (f, edges)
                })
                .collect(),
        ),
    }
}

/// Runs one identification and compares it with `truth`. Returns whether
/// the output agrees exactly and how many queries were issued.
pub fn score_run<O: CiOracle + Sync>(
    o: &O,
    algorithm: BenchAlgorithm,
    k: usize,
    ell: usize,
    truth: &Truth,
) -> Result<(bool, u64)> {
    let before = o.query_count();
    let ok = match (algorithm, truth) {
        (BenchAlgorithm::Fvs, Truth::Fvs(expected)) => {
            let r = identify_generalized_fvs(o, k, ell, Options::default())?;
            let got: Vec<(IndexSet, Vec<(usize, usize)>)> =
                r.qualifying.into_iter().map(|c| (c.fvs, c.residual_edges)).collect();
            &got == expected
        }
        (_, Truth::Verdict { holds, edges }) => {
            let r = if algorithm == BenchAlgorithm::Degree {
                identify_degree_bounded(o, k, Options::default())?
            } else {
                identify_strongly_separable(o, k, Options::default())?
            };
            r.verdict == *holds && (!holds || &r.recovered_edges == edges)
        }
        _ => return Err(Error::InvalidParameter("truth does not match algorithm".into())),
    };
    Ok((ok, o.query_count() - before))
}

fn mix(parts: &[u64]) -> u64 {
    // splitmix64 over the parts
    parts.iter().fold(0x853C_49E6_748F_EA9B, |acc, &x| {
        let mut z = acc ^ x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}

pub fn model_seed(seed: u64, p: usize, trial: usize) -> u64 {
    mix(&[seed, p as u64, trial as u64])
}

pub fn sample_seed(seed: u64, p: usize, trial: usize, n: usize) -> u64 {
    mix(&[seed, p as u64, trial as u64, n as u64, 0x5A17])
}

/// Threshold for one trial under `rule`.
pub fn choose_alpha(rule: AlphaRule, model: &GroundTruthModel<f64>, n: usize, cap: usize) -> Result<f64> {
    match rule {
        AlphaRule::BetaHalf => Ok(model.beta / 2.0),
        AlphaRule::Fixed(a) => Ok(a),
        AlphaRule::Default { delta, c } => default_alpha(model.p(), n, cap, delta, c),
    }
}

struct TrialOutcome {
    success: bool,
    errored: bool,
    queries: u64,
    alpha: Option<f64>,
    beta: f64,
}

struct PreparedModel {
    model: GroundTruthModel<f64>,
    truth: Truth,
}

fn prepare_models(cfg: &BenchConfig, p: usize) -> Result<Vec<PreparedModel>> {
    let build = |trial: usize| -> Result<PreparedModel> {
        let spec = ModelSpec::new(cfg.family, p, model_seed(cfg.seed, p, trial));
        let model = build_model::<f64>(&spec, cfg.conditioning_cap())?;
        let truth = ground_truth(&model.graph, cfg.algorithm, cfg.k, cfg.ell);
        Ok(PreparedModel { model, truth })
    };
    if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(build).collect()
    } else {
        (0..cfg.trials).map(build).collect()
    }
}

fn run_trial(cfg: &BenchConfig, prepared: &PreparedModel, p: usize, trial: usize, n: Option<usize>) -> TrialOutcome {
    let PreparedModel { model, truth } = prepared;
    let beta = model.beta;
    let failed = |alpha| TrialOutcome { success: false, errored: true, queries: 0, alpha, beta };
    match n {
        None => {
            let Ok(inner) = ExactOracle::new(model.sigma.clone(), model.eps_zero) else {
                return failed(None);
            };
            let o = CachedOracle::new(inner);
            match score_run(&o, cfg.algorithm, cfg.k, cfg.ell, truth) {
                Ok((success, queries)) => TrialOutcome { success, errored: false, queries, alpha: None, beta },
                Err(_) => failed(None),
            }
        }
        Some(n) => {
            let alpha = match choose_alpha(cfg.alpha_rule, model, n, cfg.conditioning_cap()) {
                Ok(a) => a,
                Err(_) => return failed(None),
            };
            let data = match sample_gaussian(model, n, sample_seed(cfg.seed, p, trial, n)) {
                Ok(d) => d,
                Err(_) => return failed(Some(alpha)),
            };
            let Ok(inner) = EmpiricalOracle::new(data, alpha) else {
                return failed(Some(alpha));
            };
            let o = CachedOracle::new(inner);
            match score_run(&o, cfg.algorithm, cfg.k, cfg.ell, truth) {
                Ok((success, queries)) => TrialOutcome { success, errored: false, queries, alpha: Some(alpha), beta },
                // Singular conditioning blocks or too few samples count as failures.
                Err(_) => failed(Some(alpha)),
            }
        }
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Runs every `(p, n)` row of the sweep. Rows come back sorted by `(p, n)`
/// with exact rows first; `on_row` sees each row as soon as it completes.
pub fn run_bench_with(cfg: &BenchConfig, mut on_row: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut p_list = cfg.p_list.clone();
    p_list.sort_unstable();
    p_list.dedup();
    let mut n_list = cfg.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();

    let mut rows = Vec::new();
    for &p in &p_list {
        let models = prepare_models(cfg, p)?;
        for &n in &n_list {
            let start = Instant::now();
            let outcomes: Vec<TrialOutcome> = if cfg.parallel {
                (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, &models[t], p, t, n)).collect()
            } else {
                (0..cfg.trials).map(|t| run_trial(cfg, &models[t], p, t, n)).collect()
            };
            let successes = outcomes.iter().filter(|o| o.success).count();
            let row = BenchRow {
                algorithm: cfg.algorithm,
                family: cfg.family.to_string(),
                p,
                k: cfg.k,
                ell: cfg.ell,
                n,
                trials: cfg.trials,
                successes,
                success_rate: successes as f64 / cfg.trials as f64,
                mean_queries: mean(outcomes.iter().map(|o| o.queries as f64)),
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                alpha: n.map(|_| mean(outcomes.iter().filter_map(|o| o.alpha))),
                beta: mean(outcomes.iter().map(|o| o.beta)),
                failed_runs: outcomes.iter().filter(|o| o.errored).count(),
            };
            on_row(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    run_bench_with(cfg, |_| {})
}

/// Smallest `n` in `grid` whose success rate at `p` reaches `target`.
pub fn n_for_success_level(cfg: &BenchConfig, p: usize, grid: &[usize], target: f64) -> Result<Option<usize>> {
    let mut sorted = grid.to_vec();
    sorted.sort_unstable();
    for n in sorted {
        let probe = BenchConfig { p_list: vec![p], n_list: vec![Some(n)], ..cfg.clone() };
        if run_bench(&probe)?[0].success_rate >= target {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_list: Vec<Option<usize>>) -> BenchConfig {
        BenchConfig {
            algorithm: BenchAlgorithm::StrongSep,
            family: Family::Tree,
            k: 1,
            ell: 0,
            p_list: vec![6],
            n_list,
            trials: 4,
            seed: 3,
            alpha_rule: AlphaRule::Fixed(0.05),
            parallel: false,
        }
    }

    #[test]
    fn exact_rows_always_succeed() {
        let rows = run_bench(&cfg(vec![None])).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].success_rate, 1.0);
        assert!(rows[0].alpha.is_none());
    }

    #[test]
    fn single_sample_rows_fail_without_crashing() {
        let rows = run_bench(&cfg(vec![Some(1)])).unwrap();
        assert_eq!(rows[0].successes, 0);
    }

    #[test]
    fn rows_are_sorted_and_reproducible() {
        let mut c = cfg(vec![Some(400), None, Some(200)]);
        c.p_list = vec![7, 5];
        c.parallel = true;
        let a = run_bench(&c).unwrap();
        let key: Vec<(usize, Option<usize>)> = a.iter().map(|r| (r.p, r.n)).collect();
        assert_eq!(key, vec![(5, None), (5, Some(200)), (5, Some(400)), (7, None), (7, Some(200)), (7, Some(400))]);
        let b = run_bench(&c).unwrap();
        let strip = |rows: &[BenchRow]| rows.iter().map(|r| (r.successes, r.alpha.map(f64::to_bits))).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn algorithm_names_parse() {
        for a in [BenchAlgorithm::Degree, BenchAlgorithm::StrongSep, BenchAlgorithm::Fvs] {
            assert_eq!(a.to_string().parse::<BenchAlgorithm>().unwrap(), a);
        }
    }
}
