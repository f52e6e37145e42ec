//! Exact-oracle runs must agree with the brute-force graph certifiers.

mod common;

use common::{exact, model, residual_edges, Picker};
use ggmid::graph::{self, is_degree_bounded, is_generalized_fvs, is_strongly_k_separable};
use ggmid::identify::{lambda_witnesses, s_deg_witnesses};
use ggmid::synth::Family;
use ggmid::{identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable, IndexSet, Options};
use itertools::Itertools;

fn family_for(pick: &mut Picker, k: usize) -> Family {
    match pick.next(6) {
        0 => Family::Tree,
        1 => Family::Cycle,
        2 => Family::DegreeBounded { k: 1 + pick.next(4) },
        3 => Family::Star,
        4 => Family::Example1,
        _ => Family::BasePlusFvs { k, ell: 1 },
    }
}

#[test]
fn degree_bounded_matches_certifier_on_bounded_graphs() {
    let mut pick = Picker::new(1);
    for seed in 0..100 {
        let p = 4 + pick.next(7);
        let m = model(Family::DegreeBounded { k: 3 }, p, seed, 3);
        let o = exact(&m);
        let r = identify_degree_bounded(&o, 3, Options::default()).unwrap();
        assert!(is_degree_bounded(&m.graph, 3));
        assert!(r.verdict, "seed {seed}");
        assert_eq!(r.recovered_edges, m.graph.edges(), "seed {seed}");
        for u in 0..p {
            assert_eq!(r.neighborhoods[u].as_ref(), Some(&m.graph.neighbor_set(u)));
        }
    }
}

#[test]
fn leaf_witnesses_all_contain_the_neighbour() {
    for seed in 0..20 {
        let m = model(Family::Tree, 7, seed, 1);
        let o = exact(&m);
        for u in (0..7).filter(|&u| m.graph.degree(u) == 1) {
            let w = s_deg_witnesses(&o, u, 1).unwrap();
            let nb = m.graph.neighbor_set(u);
            assert!(!w.is_empty());
            assert!(w.iter().all(|s| nb.is_subset(s)));
            let meet = w.iter().skip(1).fold(w[0].clone(), |a, s| a.intersection(s));
            assert_eq!(meet, nb);
        }
    }
}

#[test]
fn strongly_separable_matches_certifier() {
    let mut pick = Picker::new(2);
    for seed in 0..100 {
        let k = 1 + pick.next(3);
        let p = 4 + pick.next(6);
        let fam = family_for(&mut pick, k);
        let m = model(fam, p, seed, k);
        let o = exact(&m);
        let r = identify_strongly_separable(&o, k, Options::default()).unwrap();
        let truth = is_strongly_k_separable(&m.graph, k);
        assert_eq!(r.verdict, truth, "seed {seed} {fam} p={p} k={k} {:?}", m.graph);
        if truth {
            assert_eq!(r.recovered_edges, m.graph.edges(), "seed {seed}");
        } else {
            let bad = graph::strongly_inseparable_pairs(&m.graph, k);
            assert_eq!(r.unresolved_pairs(), bad, "seed {seed}");
        }
    }
}

#[test]
fn lambda_witnesses_are_separators_after_edge_removal() {
    let mut pick = Picker::new(3);
    for seed in 0..40 {
        let k = 1 + pick.next(3);
        let p = 4 + pick.next(5);
        let fam = family_for(&mut pick, k);
        let m = model(fam, p, seed, k);
        let o = exact(&m);
        for (u, v) in (0..p).tuple_combinations() {
            for s in lambda_witnesses(&o, u, v, k).unwrap() {
                assert!(s.len() < k);
                assert!(
                    graph::separates_without_edge(&m.graph, &s, u, v).unwrap(),
                    "seed {seed} pair ({u},{v}) S={s:?}"
                );
            }
        }
    }
}

#[test]
fn generalized_fvs_matches_certifier() {
    let mut pick = Picker::new(4);
    for seed in 0..30 {
        let k = 1 + pick.next(2);
        let ell = 1 + pick.next(2);
        let p = (ell + 4 + pick.next(4)).min(9);
        let m = model(Family::BasePlusFvs { k, ell }, p, seed, k + ell);
        let o = exact(&m);
        let r = identify_generalized_fvs(&o, k, ell, Options::default()).unwrap();
        let truth: Vec<IndexSet> = (0..p)
            .combinations(ell)
            .map(IndexSet::new)
            .filter(|f| is_generalized_fvs(&m.graph, f, k))
            .collect();
        assert_eq!(r.qualifying_sets(), truth, "seed {seed} p={p} k={k} ell={ell}");
        for c in &r.qualifying {
            assert_eq!(c.residual_edges, residual_edges(&m.graph, &c.fvs));
        }
    }
}
