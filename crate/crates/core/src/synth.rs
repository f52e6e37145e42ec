//! Reproducible synthetic models: structured random graphs, diagonally
//! dominant precision matrices with a known support, and Gaussian sampling.
//!
//! All randomness comes from [`RNG_NAME`] seeded with a 64-bit seed; graph,
//! weight and sample draws use separate streams of the same seed.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{cond_cov, eigenvalue_bounds, invert_pd, Cholesky, IndexSet, SymMatrix};
use crate::oracle::{default_eps_zero, ScatterData};
use crate::scalar::Scalar;

/// Identity of the generator, recorded in model metadata.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), streams: graph=0 weights=1 samples=2";

const GRAPH_STREAM: u64 = 0;
const WEIGHT_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;
const MAX_BETA_RETRIES: u32 = 16;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Family {
    /// Uniform random recursive tree with shuffled labels.
    Tree,
    /// Path `0 - 1 - ... - (p-1)`.
    Chain,
    Cycle,
    /// Star centred at node 0.
    Star,
    /// Random graph with maximum degree at most `k`.
    DegreeBounded { k: usize },
    /// Edge `(0, 1)` plus `(u, 0)`, `(u, 1)` for every `u >= 2`.
    Example1,
    /// Path on the first `p - 2` nodes plus two non-adjacent hubs joined to
    /// every path node.
    Example2,
    /// Strongly `k`-separable base on `p - ell` nodes plus `ell` hubs (the
    /// last `ell` labels), each joined to at least three base nodes.
    BasePlusFvs { k: usize, ell: usize },
}

impl Family {
    /// Hub nodes planted by the construction.
    pub fn hubs(&self, p: usize) -> Vec<usize> {
        match *self {
            Family::Example2 => vec![p - 2, p - 1],
            Family::BasePlusFvs { ell, .. } => (p - ell..p).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Tree => write!(f, "tree"),
            Family::Chain => write!(f, "chain"),
            Family::Cycle => write!(f, "cycle"),
            Family::Star => write!(f, "star"),
            Family::DegreeBounded { k } => write!(f, "degree_bounded:{k}"),
            Family::Example1 => write!(f, "example1"),
            Family::Example2 => write!(f, "example2"),
            Family::BasePlusFvs { k, ell } => write!(f, "base_plus_fvs:{k}:{ell}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts the `Display` form, e.g. `tree`, `degree_bounded:3`,
    /// `base_plus_fvs:1:2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidSpec(format!("family '{s}' is missing a parameter")))?
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad parameter in family '{s}'")))
        };
        let fam = match parts[0] {
            "tree" => Family::Tree,
            "chain" | "path" => Family::Chain,
            "cycle" => Family::Cycle,
            "star" => Family::Star,
            "degree_bounded" => Family::DegreeBounded { k: num(1)? },
            "example1" => Family::Example1,
            "example2" => Family::Example2,
            "base_plus_fvs" => Family::BasePlusFvs { k: num(1)?, ell: num(2)? },
            other => return Err(Error::InvalidSpec(format!("unknown family '{other}'"))),
        };
        let arity = match fam {
            Family::DegreeBounded { .. } => 2,
            Family::BasePlusFvs { .. } => 3,
            _ => 1,
        };
        if parts.len() != arity {
            return Err(Error::InvalidSpec(format!("family '{s}' takes {} parameter(s)", arity - 1)));
        }
        Ok(fam)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelSpec {
    pub p: usize,
    pub family: Family,
    /// Range `[lo, hi]` of absolute edge weights.
    pub weight_range: (f64, f64),
    pub seed: u64,
}

pub const DEFAULT_WEIGHT_RANGE: (f64, f64) = (0.2, 0.4);

impl ModelSpec {
    pub fn new(family: Family, p: usize, seed: u64) -> Self {
        ModelSpec { p, family, weight_range: DEFAULT_WEIGHT_RANGE, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.weight_range;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::InvalidSpec(format!("weight range [{lo}, {hi}] must satisfy 0 < lo <= hi < 1")));
        }
        if self.p < 2 {
            return Err(Error::InvalidSpec(format!("need p >= 2, got {}", self.p)));
        }
        let p = self.p;
        match self.family {
            Family::Cycle if p < 3 => Err(Error::InvalidSpec("cycle needs p >= 3".into())),
            Family::Example1 | Family::Example2 if p < 3 => {
                Err(Error::InvalidSpec(format!("{} needs p >= 3", self.family)))
            }
            Family::DegreeBounded { k: 0 } => Err(Error::InvalidSpec("degree bound must be >= 1".into())),
            Family::BasePlusFvs { k, ell } => {
                if k == 0 {
                    Err(Error::InvalidSpec("base_plus_fvs needs k >= 1".into()))
                } else if ell == 0 || p < ell + 3 {
                    Err(Error::InvalidSpec(format!(
                        "base_plus_fvs needs ell >= 1 and at least 3 base nodes (p={p}, ell={ell})"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

fn random_tree(n: usize, r: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(r);
    (1..n).map(|i| (labels[r.random_range(0..i)], labels[i])).collect()
}

fn random_degree_bounded(n: usize, k: usize, r: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    pairs.shuffle(r);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if degree[u] < k && degree[v] < k && r.random_bool(0.5) {
            degree[u] += 1;
            degree[v] += 1;
            edges.push((u, v));
        }
    }
    edges
}

/// A cycle on a random subset of at least three nodes with the remaining
/// nodes hung off as random trees; strongly 2-separable.
fn ring_of_trees(n: usize, r: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(r);
    let ring = r.random_range(3..=n);
    let mut edges: Vec<(usize, usize)> = (0..ring).map(|i| (labels[i], labels[(i + 1) % ring])).collect();
    for i in ring..n {
        edges.push((labels[r.random_range(0..i)], labels[i]));
    }
    edges
}

/// Deterministic graph for `(family, p, seed)`.
pub fn generate_graph(spec: &ModelSpec) -> Result<Graph> {
    spec.validate()?;
    let p = spec.p;
    let mut r = rng(spec.seed, GRAPH_STREAM);
    let edges: Vec<(usize, usize)> = match spec.family {
        Family::Tree => random_tree(p, &mut r),
        Family::Chain => (1..p).map(|i| (i - 1, i)).collect(),
        Family::Cycle => (0..p).map(|i| (i, (i + 1) % p)).collect(),
        Family::Star => (1..p).map(|i| (0, i)).collect(),
        Family::DegreeBounded { k } => random_degree_bounded(p, k, &mut r),
        Family::Example1 => std::iter::once((0, 1)).chain((2..p).flat_map(|u| [(u, 0), (u, 1)])).collect(),
        Family::Example2 => {
            let base = p - 2;
            (1..base)
                .map(|i| (i - 1, i))
                .chain([p - 2, p - 1].into_iter().flat_map(|h| (0..base).map(move |u| (h, u))))
                .collect()
        }
        Family::BasePlusFvs { k, ell } => {
            let base = p - ell;
            let mut edges = match k {
                1 => random_tree(base, &mut r),
                2 => ring_of_trees(base, &mut r),
                _ => {
                    if r.random_bool(0.5) {
                        ring_of_trees(base, &mut r)
                    } else {
                        random_degree_bounded(base, k, &mut r)
                    }
                }
            };
            for hub in base..p {
                let mut targets: Vec<usize> = (0..base).collect();
                targets.shuffle(&mut r);
                let count = r.random_range(3..=base);
                edges.extend(targets[..count].iter().map(|&t| (hub, t)));
            }
            edges
        }
    };
    Graph::from_edges(p, edges)
}

/// A Gaussian model with known precision graph.
#[derive(Clone, Debug)]
pub struct GroundTruthModel<F> {
    pub graph: Graph,
    pub omega: SymMatrix<F>,
    pub sigma: SymMatrix<F>,
    /// Smallest `|Σ(u, v | S)|` over dependent queries with `|S| <= beta_cap`.
    pub beta: F,
    pub beta_cap: usize,
    /// Exact-zero tolerance used to call a query dependent when scanning `β`.
    pub eps_zero: F,
    /// Seed the weights were finally drawn with.
    pub weight_seed: u64,
    /// Re-draws needed to reach `β > 10 ε_zero`.
    pub retries: u32,
}

impl<F: Scalar> GroundTruthModel<F> {
    /// `(λ_min, λ_max)` of `Σ`.
    pub fn eigenvalue_bounds(&self) -> (F, F) {
        eigenvalue_bounds(&self.sigma)
    }

    pub fn p(&self) -> usize {
        self.graph.node_count()
    }
}

/// Smallest `|Σ(u, v | S)| >= eps_zero` over all pairs and `|S| <= cap`.
/// Returns `+∞` when no query is dependent.
pub fn dependence_margin<F: Scalar>(sigma: &SymMatrix<F>, cap: usize, eps_zero: F) -> Result<F> {
    let p = sigma.dim();
    let mut beta = F::infinity();
    for (u, v) in (0..p).tuple_combinations() {
        let pool: Vec<usize> = (0..p).filter(|&i| i != u && i != v).collect();
        for size in 0..=cap.min(pool.len()) {
            for s in pool.iter().copied().combinations(size) {
                let c = cond_cov(sigma, u, v, &IndexSet::new(s))?.abs();
                if c >= eps_zero && c < beta {
                    beta = c;
                }
            }
        }
    }
    Ok(beta)
}

/// Precision with support exactly `g`: off-diagonal weights of random sign
/// and magnitude uniform in `weight_range`, diagonal `1 + Σ_v |Ω_uv|`.
pub fn precision_from_graph<F: Scalar>(
    g: &Graph,
    weight_range: (f64, f64),
    seed: u64,
    beta_cap: usize,
) -> Result<GroundTruthModel<F>> {
    let (lo, hi) = weight_range;
    if !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(Error::InvalidSpec(format!("weight range [{lo}, {hi}] must satisfy 0 < lo <= hi < 1")));
    }
    let p = g.node_count();
    let mut r = rng(seed, WEIGHT_STREAM);
    let mut omega = SymMatrix::<F>::identity(p);
    let mut row_abs = vec![0.0f64; p];
    for (u, v) in g.edges() {
        let mag = if lo == hi { lo } else { r.random_range(lo..=hi) };
        let w = if r.random_bool(0.5) { mag } else { -mag };
        omega.set(u, v, F::lit(w));
        row_abs[u] += mag;
        row_abs[v] += mag;
    }
    for (u, extra) in row_abs.iter().enumerate() {
        omega.set(u, u, F::lit(1.0 + extra));
    }
    let sigma = invert_pd(&omega)?;
    let eps_zero = default_eps_zero(&sigma);
    let beta = dependence_margin(&sigma, beta_cap, eps_zero)?;
    Ok(GroundTruthModel { graph: g.clone(), omega, sigma, beta, beta_cap, eps_zero, weight_seed: seed, retries: 0 })
}

/// Generates the graph for `spec` and draws weights until the dependence
/// margin exceeds `10 ε_zero` (at most 16 re-draws; the last draw is kept and
/// a warning logged otherwise).
pub fn build_model<F: Scalar>(spec: &ModelSpec, beta_cap: usize) -> Result<GroundTruthModel<F>> {
    let g = generate_graph(spec)?;
    let mut attempt = 0u32;
    loop {
        let seed = spec.seed.wrapping_add(u64::from(attempt).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut model = precision_from_graph::<F>(&g, spec.weight_range, seed, beta_cap)?;
        model.retries = attempt;
        let ok = model.beta > F::lit(10.0) * model.eps_zero;
        if ok || attempt >= MAX_BETA_RETRIES {
            if attempt > 0 {
                log::info!("model {} p={} seed={}: {attempt} weight re-draw(s)", spec.family, spec.p, spec.seed);
            }
            if !ok {
                log::warn!("model {} p={} seed={}: margin {} below 10*eps_zero", spec.family, spec.p, spec.seed, model.beta);
            }
            return Ok(model);
        }
        attempt += 1;
    }
}

/// `n` i.i.d. draws from `N(0, Σ)` as `x = L z` with `Σ = L Lᵀ`.
pub fn sample_rows<F: Scalar>(sigma: &SymMatrix<F>, n: usize, seed: u64) -> Result<Vec<Vec<F>>> {
    let chol = Cholesky::factor(sigma)?;
    let p = sigma.dim();
    let mut r = rng(seed, SAMPLE_STREAM);
    let mut z = vec![F::zero(); p];
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = F::lit(r.sample::<f64, _>(StandardNormal));
        }
        let x: Vec<F> = (0..p)
            .map(|i| (0..=i).map(|j| chol.factor_entry(i, j) * z[j]).sum())
            .collect();
        rows.push(x);
    }
    Ok(rows)
}

/// Scatter matrix of `n` fresh samples from the model.
pub fn sample_gaussian<F: Scalar>(model: &GroundTruthModel<F>, n: usize, seed: u64) -> Result<ScatterData<F>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    ScatterData::from_samples(&sample_rows(&model.sigma, n, seed)?, false)
}
