use std::time::Duration;

use serde::Serialize;

use crate::linalg::IndexSet;
use crate::oracle::OracleKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    DegreeBounded,
    StronglySeparable,
    GeneralizedFvs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    NonNeighbor,
    Neighbor,
    Unresolved,
}

/// Which criterion a witness set satisfied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// Faithful separator of a non-adjacent pair.
    Separator,
    Lambda1,
    Lambda2,
    Lambda3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairClassification {
    /// `(u, v)` with `u > v`.
    pub pair: (usize, usize),
    pub status: PairStatus,
    pub witness: Option<IndexSet>,
    pub witness_kind: Option<WitnessKind>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleStats {
    /// Queries issued to the oracle during the run.
    pub queries: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentificationReport {
    pub algorithm: Algorithm,
    pub verdict: bool,
    pub k: usize,
    pub p: usize,
    /// Recovered edges `(u, v)` with `u < v`; meaningful only when `verdict`.
    pub recovered_edges: Vec<(usize, usize)>,
    /// Per-node neighbourhoods (degree-bounded run only); `None` for a node
    /// without any witness.
    pub neighborhoods: Vec<Option<IndexSet>>,
    /// Pair classifications (strong-separability run only), ordered by
    /// `(u, v)` with `u > v`.
    pub classifications: Vec<PairClassification>,
    pub oracle: OracleKind,
    pub stats: OracleStats,
}

impl IdentificationReport {
    pub fn unresolved_pairs(&self) -> Vec<(usize, usize)> {
        self.classifications
            .iter()
            .filter(|c| c.status == PairStatus::Unresolved)
            .map(|c| c.pair)
            .collect()
    }

    /// Nodes for which no degree witness exists.
    pub fn unbounded_nodes(&self) -> Vec<usize> {
        self.neighborhoods
            .iter()
            .enumerate()
            .filter_map(|(u, n)| n.is_none().then_some(u))
            .collect()
    }
}

/// A node set whose removal leaves a strongly k-separable residual graph.
#[derive(Clone, Debug, PartialEq)]
pub struct FvsCandidate {
    pub fvs: IndexSet,
    /// Edges `(u, v)`, `u < v`, among nodes outside `fvs`.
    pub residual_edges: Vec<(usize, usize)>,
    pub classifications: Vec<PairClassification>,
}

/// A rejected node set with the first pair that could not be classified.
#[derive(Clone, Debug, PartialEq)]
pub struct FvsRejection {
    pub fvs: IndexSet,
    pub unresolved: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FvsReport {
    pub k: usize,
    pub ell: usize,
    pub p: usize,
    pub qualifying: Vec<FvsCandidate>,
    pub rejected: Vec<FvsRejection>,
    pub oracle: OracleKind,
    pub stats: OracleStats,
}

impl FvsReport {
    pub fn qualifying_sets(&self) -> Vec<IndexSet> {
        self.qualifying.iter().map(|c| c.fvs.clone()).collect()
    }
}
