use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;

use super::report::{
    Algorithm, FvsCandidate, FvsRejection, FvsReport, IdentificationReport, OracleStats,
    PairClassification, PairStatus, WitnessKind,
};
use super::witnesses::{classify_pair, s_deg_witnesses_ordered};
use crate::error::{Error, Result};
use crate::linalg::IndexSet;
use crate::oracle::CiOracle;

/// Evaluation knobs. Neither changes verdicts or recovered edges; only the
/// stored witnesses may differ with `reverse_enumeration`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Evaluate nodes / pairs / candidate sets on the rayon pool.
    pub parallel: bool,
    /// Enumerate conditioning sets largest-first in reverse lexicographic order.
    pub reverse_enumeration: bool,
}

impl Options {
    pub fn parallel() -> Self {
        Options { parallel: true, ..Options::default() }
    }
}

/// Maps `f` over `items` sequentially or in parallel, returning results in
/// input order and the first error by position.
fn map_ordered<T, R, F>(items: Vec<T>, parallel: bool, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync + Send,
{
    if parallel {
        items.into_par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
    } else {
        items.into_iter().map(f).collect()
    }
}

/// Decides whether every node has at most `k` neighbours. When it does, each
/// neighbourhood is the intersection of all sets that render the node
/// independent of everything else.
pub fn identify_degree_bounded<O>(o: &O, k: usize, opts: Options) -> Result<IdentificationReport>
where
    O: CiOracle + Sync + ?Sized,
{
    let start = Instant::now();
    let before = o.query_count();
    let p = o.dim();

    let neighborhoods = map_ordered((0..p).collect(), opts.parallel, |u| {
        let witnesses = s_deg_witnesses_ordered(o, u, k, opts.reverse_enumeration)?;
        Ok(witnesses.into_iter().reduce(|acc, s| acc.intersection(&s)))
    })?;

    let verdict = neighborhoods.iter().all(Option::is_some);
    let recovered_edges = if verdict {
        let mut edges: Vec<(usize, usize)> = neighborhoods
            .iter()
            .enumerate()
            .flat_map(|(u, n)| n.iter().flat_map(|s| s.iter()).map(move |v| (u.min(v), u.max(v))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    } else {
        Vec::new()
    };

    Ok(IdentificationReport {
        algorithm: Algorithm::DegreeBounded,
        verdict,
        k,
        p,
        recovered_edges,
        neighborhoods,
        classifications: Vec::new(),
        oracle: o.kind(),
        stats: OracleStats { queries: o.query_count() - before, elapsed: start.elapsed() },
    })
}

fn classification(
    pair: (usize, usize),
    (witness, kind): (Option<IndexSet>, Option<WitnessKind>),
) -> PairClassification {
    let status = match kind {
        None => PairStatus::Unresolved,
        Some(WitnessKind::Separator) => PairStatus::NonNeighbor,
        Some(_) => PairStatus::Neighbor,
    };
    PairClassification { pair, status, witness, witness_kind: kind }
}

/// Pairs `(u, v)`, `u > v`, both outside `excluded`.
fn pairs_outside(p: usize, excluded: &IndexSet) -> Vec<(usize, usize)> {
    (0..p)
        .filter(|&u| !excluded.contains(u))
        .flat_map(|u| (0..u).filter(|&v| !excluded.contains(v)).map(move |v| (u, v)))
        .collect()
}

fn neighbor_edges(classes: &[PairClassification]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = classes
        .iter()
        .filter(|c| c.status == PairStatus::Neighbor)
        .map(|c| (c.pair.1, c.pair.0))
        .collect();
    edges.sort_unstable();
    edges
}

/// Decides whether the graph is strongly `k`-separable, classifying every
/// pair as non-neighbours (a faithful separator of size `<= k` exists),
/// neighbours (a `Λ` witness of size `<= k - 1` exists) or unresolved.
pub fn identify_strongly_separable<O>(o: &O, k: usize, opts: Options) -> Result<IdentificationReport>
where
    O: CiOracle + Sync + ?Sized,
{
    if k == 0 {
        return Err(Error::InvalidParameter("strong separability needs k >= 1".into()));
    }
    let start = Instant::now();
    let before = o.query_count();
    let p = o.dim();
    let base = IndexSet::empty();

    let classifications = map_ordered(pairs_outside(p, &base), opts.parallel, |(u, v)| {
        Ok(classification((u, v), classify_pair(o, &base, u, v, k, opts.reverse_enumeration)?))
    })?;
    let verdict = classifications.iter().all(|c| c.status != PairStatus::Unresolved);
    let recovered_edges = if verdict { neighbor_edges(&classifications) } else { Vec::new() };

    Ok(IdentificationReport {
        algorithm: Algorithm::StronglySeparable,
        verdict,
        k,
        p,
        recovered_edges,
        neighborhoods: Vec::new(),
        classifications,
        oracle: o.kind(),
        stats: OracleStats { queries: o.query_count() - before, elapsed: start.elapsed() },
    })
}

/// Runs the pair loop for one candidate set, stopping at the first
/// unresolved pair.
fn evaluate_candidate<O>(
    o: &O,
    fvs: &IndexSet,
    k: usize,
    reverse: bool,
) -> Result<std::result::Result<FvsCandidate, FvsRejection>>
where
    O: CiOracle + Sync + ?Sized,
{
    let mut classes = Vec::new();
    for (u, v) in pairs_outside(o.dim(), fvs) {
        let c = classification((u, v), classify_pair(o, fvs, u, v, k, reverse)?);
        if c.status == PairStatus::Unresolved {
            return Ok(Err(FvsRejection { fvs: fvs.clone(), unresolved: (u, v) }));
        }
        classes.push(c);
    }
    Ok(Ok(FvsCandidate {
        fvs: fvs.clone(),
        residual_edges: neighbor_edges(&classes),
        classifications: classes,
    }))
}

/// Finds every node set `F` of size `ℓ` such that the model conditioned on
/// `X_F` has a strongly `k`-separable graph, and recovers that residual graph.
///
/// Witness searches for pairs outside `F` use conditioning sets `F ∪ T`, with
/// the size budgets (`k` for separators, `k - 1` for `Λ`) applied to `T`.
pub fn identify_generalized_fvs<O>(o: &O, k: usize, ell: usize, opts: Options) -> Result<FvsReport>
where
    O: CiOracle + Sync + ?Sized,
{
    let p = o.dim();
    if k == 0 {
        return Err(Error::InvalidParameter("generalized FVS search needs k >= 1".into()));
    }
    if ell + 2 > p {
        return Err(Error::InvalidParameter(format!(
            "FVS size {ell} leaves no pair among {p} nodes"
        )));
    }
    let start = Instant::now();
    let before = o.query_count();

    let candidates: Vec<IndexSet> = (0..p).combinations(ell).map(IndexSet::new).collect();
    let outcomes = map_ordered(candidates, opts.parallel, |f| {
        evaluate_candidate(o, &f, k, opts.reverse_enumeration)
    })?;
    let (qualifying, rejected): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(|r| r.is_ok());

    Ok(FvsReport {
        k,
        ell,
        p,
        qualifying: qualifying.into_iter().filter_map(|r| r.ok()).collect(),
        rejected: rejected.into_iter().filter_map(|r| r.err()).collect(),
        oracle: o.kind(),
        stats: OracleStats { queries: o.query_count() - before, elapsed: start.elapsed() },
    })
}
