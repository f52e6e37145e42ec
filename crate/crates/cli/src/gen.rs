use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use ggmid::synth::{build_model, sample_rows, Family, ModelSpec, RNG_NAME};
use serde::Serialize;

use crate::io;

#[derive(Clone, Debug, Args)]
pub struct GenArgs {
    /// Graph family: tree, chain, cycle, star, degree_bounded:K, example1,
    /// example2 or base_plus_fvs:K:L.
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Separation parameter the bundle is meant for; with --ell it sets the
    /// conditioning-size cap of the recorded margin.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub ell: usize,
    /// Output directory for edges.txt, covariance.txt, precision.txt and meta.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Meta {
    family: String,
    p: usize,
    seed: u64,
    weight_range: [f64; 2],
    weight_seed: u64,
    weight_retries: u32,
    edge_count: usize,
    hubs: Vec<usize>,
    beta: f64,
    beta_cap: usize,
    epsilon_zero: f64,
    lambda_min: f64,
    lambda_max: f64,
    rng: &'static str,
}

pub fn run(args: &GenArgs) -> Result<()> {
    let spec = ModelSpec::new(args.family, args.p, args.seed);
    let m = build_model::<f64>(&spec, args.k + args.ell)?;
    let (lambda_min, lambda_max) = m.eigenvalue_bounds();
    let meta = Meta {
        family: args.family.to_string(),
        p: args.p,
        seed: args.seed,
        weight_range: [spec.weight_range.0, spec.weight_range.1],
        weight_seed: m.weight_seed,
        weight_retries: m.retries,
        edge_count: m.graph.edge_count(),
        hubs: args.family.hubs(args.p).into_iter().map(|h| h + 1).collect(),
        beta: m.beta,
        beta_cap: m.beta_cap,
        epsilon_zero: m.eps_zero,
        lambda_min,
        lambda_max,
        rng: RNG_NAME,
    };
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    io::write_file(&args.out.join("edges.txt"), &io::format_edges(&m.graph))?;
    io::write_file(&args.out.join("covariance.txt"), &io::format_matrix(&m.sigma))?;
    io::write_file(&args.out.join("precision.txt"), &io::format_matrix(&m.omega))?;
    io::write_file(&args.out.join("meta.json"), &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    Ok(())
}

#[derive(Clone, Debug, Args)]
pub struct SampleArgs {
    /// Covariance matrix file.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of samples to draw.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples file to write.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn sample(args: &SampleArgs) -> Result<()> {
    if args.n == 0 {
        anyhow::bail!("--n must be at least 1");
    }
    let sigma = io::read_matrix(&args.input)?;
    let rows = sample_rows(&sigma, args.n, args.seed)
        .with_context(|| format!("{}: cannot sample from this matrix", args.input.display()))?;
    io::write_file(&args.out, &io::format_samples(&rows))
}
