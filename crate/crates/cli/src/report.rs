//! JSON report documents. Every node label here is 1-based; the layout is
//! described by `docs/report.schema.json`.

use ggmid::identify::{FvsReport, IdentificationReport, PairClassification, PairStatus, WitnessKind};
use ggmid::oracle::OracleKind;
use ggmid::{Graph, IndexSet};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub mode: &'static str,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    pub alpha: Option<f64>,
    pub alpha_source: Option<&'static str>,
    pub beta: Option<f64>,
    pub epsilon_zero: Option<f64>,
    pub input: Option<String>,
    pub samples: Option<String>,
    pub n: Option<usize>,
    pub center: bool,
    pub parallel: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSummary {
    pub kind: OracleKind,
    /// Queries answered during the run, cache hits included.
    pub queries: u64,
    /// Distinct `(u, v, S)` queries evaluated numerically.
    pub distinct_queries: usize,
    /// `ε_zero` for the exact oracle, `α` for the empirical one.
    pub threshold: f64,
}

/// How ambiguous passages of the source algorithms were resolved.
#[derive(Clone, Debug, Serialize)]
pub struct Interpretation {
    pub psi_conditioning: &'static str,
    pub separator_size_bound: &'static str,
    pub lambda_size_bound: &'static str,
    pub fvs_size_bound: &'static str,
    pub sample_mode_caveat: Option<&'static str>,
}

impl Interpretation {
    pub fn new(mode: OracleKind, alpha_source: Option<&'static str>) -> Self {
        let sample_mode_caveat = match (mode, alpha_source) {
            (OracleKind::Exact, _) => None,
            (OracleKind::Empirical, Some(ALPHA_FROM_DEFAULT)) => Some(
                "alpha comes from a data-only heuristic; guarantees require alpha = beta/2 with beta the true dependence margin",
            ),
            (OracleKind::Empirical, _) => Some(
                "sample-mode verdicts are correct only with high probability and only when alpha is below half the dependence margin",
            ),
        };
        Interpretation {
            psi_conditioning: "S+v: the Lambda_3 test uses Sigma(u,h | S+v) = 0",
            separator_size_bound: "|S| <= k for non-neighbour separators",
            lambda_size_bound: "|S| <= k-1 for neighbour witnesses",
            fvs_size_bound: "size bounds apply to S\\F; conditioning sets are F-augmented",
            sample_mode_caveat,
        }
    }
}

pub const ALPHA_FROM_FLAG: &str = "alpha";
pub const ALPHA_FROM_BETA: &str = "beta/2";
pub const ALPHA_FROM_DEFAULT: &str = "default_alpha(delta=0.05,c=1)";

pub type Pair = [usize; 2];

fn pair(u: usize, v: usize) -> Pair {
    [u + 1, v + 1]
}

fn labels(s: &IndexSet) -> Vec<usize> {
    s.iter().map(|i| i + 1).collect()
}

fn edges(es: &[(usize, usize)]) -> Vec<Pair> {
    es.iter().map(|&(u, v)| pair(u, v)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PairEntry {
    /// `[u, v]` with `u > v`.
    pub pair: Pair,
    pub status: PairStatus,
    pub witness: Option<Vec<usize>>,
    pub witness_kind: Option<WitnessKind>,
}

impl From<&PairClassification> for PairEntry {
    fn from(c: &PairClassification) -> Self {
        PairEntry {
            pair: pair(c.pair.0, c.pair.1),
            status: c.status,
            witness: c.witness.as_ref().map(labels),
            witness_kind: c.witness_kind,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Neighborhood {
    pub node: usize,
    /// `null` when no degree witness exists for the node.
    pub neighbors: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentifyDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: ConfigEcho,
    pub p: usize,
    pub verdict: bool,
    /// Empty unless `verdict`.
    pub edges: Vec<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighborhoods: Option<Vec<Neighborhood>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unbounded_nodes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PairEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unresolved_pairs: Option<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthComparison>,
    pub oracle: OracleSummary,
    pub elapsed_ms: f64,
    pub interpretation: Interpretation,
}

/// Recovered edges against a reference edge list.
#[derive(Clone, Debug, Serialize)]
pub struct TruthComparison {
    /// Verdict holds and the edge sets are equal.
    pub edges_match: bool,
    pub missing: Vec<Pair>,
    pub extra: Vec<Pair>,
}

impl TruthComparison {
    pub fn new(recovered: &[(usize, usize)], verdict: bool, truth: &Graph) -> Self {
        let expected = truth.edges();
        let missing: Vec<Pair> =
            expected.iter().filter(|e| !recovered.contains(e)).map(|&(u, v)| pair(u, v)).collect();
        let extra: Vec<Pair> =
            recovered.iter().filter(|e| !expected.contains(e)).map(|&(u, v)| pair(u, v)).collect();
        TruthComparison { edges_match: verdict && missing.is_empty() && extra.is_empty(), missing, extra }
    }
}

impl IdentifyDoc {
    pub fn new(
        command: &'static str,
        config: ConfigEcho,
        r: &IdentificationReport,
        oracle: OracleSummary,
        interpretation: Interpretation,
    ) -> Self {
        let degree = command == "check-degree";
        IdentifyDoc {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            p: r.p,
            verdict: r.verdict,
            edges: edges(&r.recovered_edges),
            neighborhoods: degree.then(|| {
                r.neighborhoods
                    .iter()
                    .enumerate()
                    .map(|(u, n)| Neighborhood { node: u + 1, neighbors: n.as_ref().map(labels) })
                    .collect()
            }),
            unbounded_nodes: degree.then(|| r.unbounded_nodes().into_iter().map(|u| u + 1).collect()),
            pairs: (!degree).then(|| r.classifications.iter().map(PairEntry::from).collect()),
            unresolved_pairs: (!degree).then(|| r.unresolved_pairs().into_iter().map(|(u, v)| pair(u, v)).collect()),
            truth: None,
            oracle,
            elapsed_ms: r.stats.elapsed.as_secs_f64() * 1e3,
            interpretation,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QualifyingSet {
    pub fvs: Vec<usize>,
    pub residual_edges: Vec<Pair>,
    pub pairs: Vec<PairEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RejectedSet {
    pub fvs: Vec<usize>,
    /// First pair outside the set that could not be classified.
    pub unresolved_pair: Pair,
}

#[derive(Clone, Debug, Serialize)]
pub struct FvsDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: ConfigEcho,
    pub p: usize,
    pub verdict: bool,
    pub qualifying: Vec<QualifyingSet>,
    pub rejected: Vec<RejectedSet>,
    pub oracle: OracleSummary,
    pub elapsed_ms: f64,
    pub interpretation: Interpretation,
}

impl FvsDoc {
    pub fn new(config: ConfigEcho, r: &FvsReport, oracle: OracleSummary, interpretation: Interpretation) -> Self {
        FvsDoc {
            schema_version: SCHEMA_VERSION,
            command: "find-fvs",
            config,
            p: r.p,
            verdict: !r.qualifying.is_empty(),
            qualifying: r
                .qualifying
                .iter()
                .map(|c| QualifyingSet {
                    fvs: labels(&c.fvs),
                    residual_edges: edges(&c.residual_edges),
                    pairs: c.classifications.iter().map(PairEntry::from).collect(),
                })
                .collect(),
            rejected: r
                .rejected
                .iter()
                .map(|x| RejectedSet { fvs: labels(&x.fvs), unresolved_pair: pair(x.unresolved.0, x.unresolved.1) })
                .collect(),
            oracle,
            elapsed_ms: r.stats.elapsed.as_secs_f64() * 1e3,
            interpretation,
        }
    }
}
