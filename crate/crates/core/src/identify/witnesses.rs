//! Witness sets: conditioning sets that certify a node's neighbourhood, a
//! non-edge, or a strongly separable edge.

use itertools::Itertools;

use super::report::WitnessKind;
use super::{dependence_component, is_faithful};
use crate::error::Result;
use crate::linalg::IndexSet;
use crate::oracle::CiOracle;

/// `base ∪ T` for every `T ⊆ pool` with `|T| <= max_size`, smallest first and
/// lexicographic within a size; `reverse` yields the exact opposite order.
pub(crate) fn candidate_sets(
    pool: &[usize],
    base: &IndexSet,
    max_size: usize,
    reverse: bool,
) -> Vec<IndexSet> {
    let top = max_size.min(pool.len());
    let mut sets: Vec<IndexSet> = (0..=top)
        .flat_map(|size| pool.iter().copied().combinations(size))
        .map(|t| base.union(&IndexSet::new(t)))
        .collect();
    if reverse {
        sets.reverse();
    }
    sets
}

fn pool_excluding(p: usize, skip: &[usize], base: &IndexSet) -> Vec<usize> {
    (0..p).filter(|i| !skip.contains(i) && !base.contains(*i)).collect()
}

/// `X_u ⊥ X_w | X_S` for every `w ∉ S ∪ {u}`.
pub(crate) fn is_deg_witness<O: CiOracle + ?Sized>(o: &O, u: usize, s: &IndexSet) -> Result<bool> {
    for w in 0..o.dim() {
        if w != u && !s.contains(w) && !o.independent(u, w, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sets `S ⊆ V \ {u}`, `|S| <= k`, that make `u` independent of every other
/// node outside `S`.
pub fn s_deg_witnesses<O: CiOracle + ?Sized>(o: &O, u: usize, k: usize) -> Result<Vec<IndexSet>> {
    s_deg_witnesses_ordered(o, u, k, false)
}

pub(crate) fn s_deg_witnesses_ordered<O: CiOracle + ?Sized>(
    o: &O,
    u: usize,
    k: usize,
    reverse: bool,
) -> Result<Vec<IndexSet>> {
    let pool = pool_excluding(o.dim(), &[u], &IndexSet::empty());
    let mut out = Vec::new();
    for s in candidate_sets(&pool, &IndexSet::empty(), k, reverse) {
        if is_deg_witness(o, u, &s)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// `X_u ⊥ X_v | X_S` and the relation is faithful.
pub(crate) fn is_sep_witness<O: CiOracle + ?Sized>(
    o: &O,
    u: usize,
    v: usize,
    s: &IndexSet,
) -> Result<bool> {
    Ok(o.independent(u, v, s)? && is_faithful(o, u, v, s)?)
}

/// Faithful separators of `u` and `v` of size at most `k`.
pub fn s_sep_witnesses<O: CiOracle + ?Sized>(
    o: &O,
    u: usize,
    v: usize,
    k: usize,
) -> Result<Vec<IndexSet>> {
    let pool = pool_excluding(o.dim(), &[u, v], &IndexSet::empty());
    let mut out = Vec::new();
    for s in candidate_sets(&pool, &IndexSet::empty(), k, false) {
        if is_sep_witness(o, u, v, &s)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// Is `X_a ⊥ X_h | X_{S+b}` for every `h ∉ S ∪ {a, b}`?
fn all_independent_given<O: CiOracle + ?Sized>(
    o: &O,
    a: usize,
    b: usize,
    s: &IndexSet,
    rest: &[usize],
) -> Result<bool> {
    let cond = s.with(b);
    for &h in rest {
        if !o.independent(a, h, &cond)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides whether `s` certifies `(u, v)` as a strongly separable edge and,
/// if so, through which of the three criteria (checked in order).
///
/// * `Lambda1`: conditioning on `S+v` cuts some `h` off from `u` faithfully,
///   conditioning on `S+u` cuts some `h` off from `v` faithfully, and the
///   component of `v` given `S+u` is disjoint from the component of `u` given
///   `S+v`.
/// * `Lambda2`: `v` is independent of every remaining node given `S+u`.
/// * `Lambda3`: `u` is independent of every remaining node given `S+v`.
pub fn lambda_membership<O: CiOracle + ?Sized>(
    o: &O,
    u: usize,
    v: usize,
    s: &IndexSet,
) -> Result<Option<WitnessKind>> {
    let rest: Vec<usize> = (0..o.dim()).filter(|&h| h != u && h != v && !s.contains(h)).collect();

    let s_v = s.with(v);
    let s_u = s.with(u);
    let comp_u = dependence_component(o, &s_v, u, None)?;
    let comp_v = dependence_component(o, &s_u, v, None)?;
    let mut gamma_u = false;
    for &h in &rest {
        if !comp_u.contains(h) && o.independent(u, h, &s_v)? {
            gamma_u = true;
            break;
        }
    }
    if gamma_u {
        let mut gamma_v = false;
        for &h in &rest {
            if !comp_v.contains(h) && o.independent(v, h, &s_u)? {
                gamma_v = true;
                break;
            }
        }
        // Endpoints are excluded from both components before the test.
        let disjoint = comp_v.iter().filter(|&x| x != u && x != v).all(|x| !comp_u.contains(x));
        if gamma_v && disjoint {
            return Ok(Some(WitnessKind::Lambda1));
        }
    }
    if all_independent_given(o, v, u, s, &rest)? {
        return Ok(Some(WitnessKind::Lambda2));
    }
    if all_independent_given(o, u, v, s, &rest)? {
        return Ok(Some(WitnessKind::Lambda3));
    }
    Ok(None)
}

/// Sets `S ⊆ V \ {u, v}`, `|S| <= k - 1`, certifying `(u, v)` as an edge
/// that becomes separated by `S` once removed.
pub fn lambda_witnesses<O: CiOracle + ?Sized>(
    o: &O,
    u: usize,
    v: usize,
    k: usize,
) -> Result<Vec<IndexSet>> {
    let Some(budget) = k.checked_sub(1) else {
        return Ok(Vec::new());
    };
    let pool = pool_excluding(o.dim(), &[u, v], &IndexSet::empty());
    let mut out = Vec::new();
    for s in candidate_sets(&pool, &IndexSet::empty(), budget, false) {
        if lambda_membership(o, u, v, &s)?.is_some() {
            out.push(s);
        }
    }
    Ok(out)
}

/// First witness classifying `(u, v)` with every conditioning set forced to
/// contain `base`. The size budgets apply to `S \ base`.
pub(crate) fn classify_pair<O: CiOracle + ?Sized>(
    o: &O,
    base: &IndexSet,
    u: usize,
    v: usize,
    k: usize,
    reverse: bool,
) -> Result<(Option<IndexSet>, Option<WitnessKind>)> {
    let pool = pool_excluding(o.dim(), &[u, v], base);
    for s in candidate_sets(&pool, base, k, reverse) {
        if is_sep_witness(o, u, v, &s)? {
            return Ok((Some(s), Some(WitnessKind::Separator)));
        }
    }
    if let Some(budget) = k.checked_sub(1) {
        for s in candidate_sets(&pool, base, budget, reverse) {
            if let Some(kind) = lambda_membership(o, u, v, &s)? {
                return Ok((Some(s), Some(kind)));
            }
        }
    }
    Ok((None, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{invert_pd, SymMatrix};
    use crate::oracle::ExactOracle;

    fn oracle_for_edges(p: usize, edges: &[(usize, usize)], w: f64) -> ExactOracle<f64> {
        let mut omega = SymMatrix::identity(p);
        for &(a, b) in edges {
            omega.set(a, b, w);
            let da = omega.get(a, a) + w.abs();
            omega.set(a, a, da);
            let db = omega.get(b, b) + w.abs();
            omega.set(b, b, db);
        }
        ExactOracle::with_default_tolerance(invert_pd(&omega).unwrap()).unwrap()
    }

    #[test]
    fn candidate_order_is_size_then_lexicographic() {
        let sets = candidate_sets(&[0, 2, 3], &IndexSet::empty(), 2, false);
        let as_vec: Vec<Vec<usize>> = sets.into_iter().map(IndexSet::into_vec).collect();
        assert_eq!(
            as_vec,
            vec![vec![], vec![0], vec![2], vec![3], vec![0, 2], vec![0, 3], vec![2, 3]]
        );
        let with_base = candidate_sets(&[0, 2], &[5].into(), 1, false);
        assert_eq!(with_base, vec![IndexSet::from([5]), [0, 5].into(), [2, 5].into()]);
    }

    #[test]
    fn deg_witnesses_interior_path_node() {
        let o = oracle_for_edges(3, &[(0, 1), (1, 2)], 0.3);
        let w = s_deg_witnesses(&o, 1, 2).unwrap();
        assert_eq!(w, vec![IndexSet::from([0, 2])]);
    }

    #[test]
    fn deg_witnesses_star_centre_needs_all_leaves() {
        let o = oracle_for_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], 0.3);
        assert!(s_deg_witnesses(&o, 0, 3).unwrap().is_empty());
        assert_eq!(s_deg_witnesses(&o, 0, 4).unwrap(), vec![IndexSet::from([1, 2, 3, 4])]);
    }

    #[test]
    fn sep_witnesses_chain_and_neighbours() {
        let o = oracle_for_edges(3, &[(0, 1), (1, 2)], 0.4);
        assert_eq!(s_sep_witnesses(&o, 0, 2, 1).unwrap(), vec![IndexSet::from([1])]);
        assert!(s_sep_witnesses(&o, 0, 1, 1).unwrap().is_empty());
    }

    #[test]
    fn sep_witnesses_reject_unfaithful_marginal() {
        let omega = SymMatrix::from_rows(&[
            vec![1.0, 0.3, 0.09],
            vec![0.3, 1.0, 0.3],
            vec![0.09, 0.3, 1.0],
        ])
        .unwrap();
        let o = ExactOracle::with_default_tolerance(invert_pd(&omega).unwrap()).unwrap();
        assert!(s_sep_witnesses(&o, 0, 2, 0).unwrap().is_empty());
    }

    #[test]
    fn lambda_on_tree_edge_accepts_empty_set() {
        let o = oracle_for_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)], 0.3);
        for (u, v) in [(0, 1), (1, 2), (1, 3), (3, 4)] {
            assert_eq!(lambda_witnesses(&o, u, v, 1).unwrap(), vec![IndexSet::empty()]);
        }
    }

    #[test]
    fn lambda_on_example1_hub_pair_is_empty() {
        let mut edges = vec![(0, 1)];
        for u in 2..6 {
            edges.push((0, u));
            edges.push((1, u));
        }
        let o = oracle_for_edges(6, &edges, 0.2);
        assert!(lambda_witnesses(&o, 0, 1, 3).unwrap().is_empty());
    }

    #[test]
    fn lambda_on_six_cycle_edge() {
        let edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let o = oracle_for_edges(6, &edges, 0.3);
        let w = lambda_witnesses(&o, 0, 1, 2).unwrap();
        // Any node of the complementary arc 2..5 cuts the cycle once (0,1) is gone.
        assert_eq!(w, vec![IndexSet::from([2]), [3].into(), [4].into(), [5].into()]);
    }
}
