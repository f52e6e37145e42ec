//! Structure identification from conditional-independence queries.
//!
//! Three procedures are provided, each answering whether the precision graph
//! of a Gaussian model has a given sparsity property and, when it does,
//! recovering the graph:
//!
//! * [`identify_degree_bounded`]: every node has at most `k` neighbours.
//! * [`identify_strongly_separable`]: every pair, adjacent or not, is cut by
//!   at most `k - δ_uv` nodes once a direct edge between them is ignored.
//! * [`identify_generalized_fvs`]: some `ℓ` nodes can be removed so that the
//!   rest is strongly `k`-separable.
//!
//! All of them rest on the faithfulness test in [`is_faithful`]: an
//! independence `X_u ⊥ X_v | X_S` reflects a genuine vertex separator exactly
//! when `u` and `v` fall in different connected components of the graph of
//! conditional dependences given `S`.

mod algorithms;
mod report;
mod witnesses;

use std::collections::VecDeque;

pub use algorithms::{
    identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable, Options,
};
pub use report::{
    Algorithm, FvsCandidate, FvsReport, FvsRejection, IdentificationReport, OracleStats,
    PairClassification, PairStatus, WitnessKind,
};
pub use witnesses::{lambda_membership, lambda_witnesses, s_deg_witnesses, s_sep_witnesses};

use crate::error::Result;
use crate::graph::{connected_components, Graph};
use crate::linalg::IndexSet;
use crate::oracle::CiOracle;

/// Graph of conditional dependences given a conditioning set.
#[derive(Clone, Debug, PartialEq)]
pub struct DependenceGraph {
    /// `V \ (conditioning ∪ exclude)`.
    pub active: IndexSet,
    pub conditioning: IndexSet,
    /// Edges join active nodes only; node labels are those of the model.
    pub graph: Graph,
}

impl DependenceGraph {
    pub fn components(&self) -> Vec<IndexSet> {
        connected_components(&self.graph, &self.active)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }
}

/// Queries every active pair given `s`.
pub fn dependence_graph<O: CiOracle + ?Sized>(
    o: &O,
    s: &IndexSet,
    exclude: &IndexSet,
) -> Result<DependenceGraph> {
    let p = o.dim();
    s.check_bounds(p)?;
    exclude.check_bounds(p)?;
    let active: IndexSet = (0..p).filter(|&i| !s.contains(i) && !exclude.contains(i)).collect();
    let mut graph = Graph::empty(p);
    let nodes = active.as_slice();
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            if !o.independent(i, j, s)? {
                graph.add_edge(i, j)?;
            }
        }
    }
    Ok(DependenceGraph { active, conditioning: s.clone(), graph })
}

/// Component of `start` in the dependence graph given `s`, restricted to
/// nodes outside `s`. Explores lazily and stops early once `stop_at` is
/// reached, in which case the returned set is partial but contains it.
pub(crate) fn dependence_component<O: CiOracle + ?Sized>(
    o: &O,
    s: &IndexSet,
    start: usize,
    stop_at: Option<usize>,
) -> Result<IndexSet> {
    let p = o.dim();
    let mut seen = vec![false; p];
    for i in s.iter() {
        seen[i] = true;
    }
    seen[start] = true;
    let mut members = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in 0..p {
            if seen[y] || o.independent(x, y, s)? {
                continue;
            }
            seen[y] = true;
            members.push(y);
            if Some(y) == stop_at {
                return Ok(IndexSet::new(members));
            }
            queue.push_back(y);
        }
    }
    Ok(IndexSet::new(members))
}

/// Whether `u` and `v` lie in different components of the dependence graph
/// given `s`. The caller is expected to have observed `X_u ⊥ X_v | X_S`.
pub fn is_faithful<O: CiOracle + ?Sized>(o: &O, u: usize, v: usize, s: &IndexSet) -> Result<bool> {
    let comp = dependence_component(o, s, u, Some(v))?;
    Ok(!comp.contains(v))
}
