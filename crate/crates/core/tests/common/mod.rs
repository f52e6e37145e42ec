#![allow(dead_code)]

use ggmid::synth::{build_model, Family, ModelSpec};
use ggmid::{CachedOracle, ExactOracle, Graph, IndexSet, ModelF64};

pub fn model(family: Family, p: usize, seed: u64, cap: usize) -> ModelF64 {
    build_model(&ModelSpec::new(family, p, seed), cap).expect("model")
}

pub fn exact(model: &ModelF64) -> CachedOracle<ExactOracle<f64>> {
    CachedOracle::new(ExactOracle::new(model.sigma.clone(), model.eps_zero).unwrap())
}

/// Small deterministic LCG for picking test parameters.
pub struct Picker(u64);

impl Picker {
    pub fn new(seed: u64) -> Self {
        Picker(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn next(&mut self, n: usize) -> usize {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 33) % n as u64) as usize
    }
}

pub fn residual_edges(g: &Graph, f: &IndexSet) -> Vec<(usize, usize)> {
    g.edges_within(&f.complement(g.node_count()))
}
