//! Identification of sparse Gaussian graphical models.
//!
//! Given a covariance matrix (or a scatter matrix of zero-mean samples), the
//! routines in [`identify`] decide whether the precision graph is
//! `k`-degree bounded, strongly `k`-separable, or has a `k`-generalized
//! feedback vertex set of size `ℓ`, and recover the graph when it is.
//!
//! The numerical layers are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the double-precision instantiation used by the CLI.
//!
//! Node indices are zero-based throughout the library.

// Index loops mirror the matrix formulas; `!(x > 0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod graph;
pub mod identify;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use graph::Graph;
pub use identify::{
    identify_degree_bounded, identify_generalized_fvs, identify_strongly_separable, FvsReport,
    IdentificationReport, Options, PairStatus,
};
pub use linalg::{IndexSet, SymMatrix};
pub use oracle::{CachedOracle, CiDecision, CiOracle, EmpiricalOracle, ExactOracle, ScatterData};
pub use scalar::Scalar;
pub use synth::{Family, GroundTruthModel, ModelSpec};

pub type SymMatrixF64 = SymMatrix<f64>;
pub type SymMatrixF32 = SymMatrix<f32>;
pub type ExactOracleF64 = ExactOracle<f64>;
pub type ExactOracleF32 = ExactOracle<f32>;
pub type EmpiricalOracleF64 = EmpiricalOracle<f64>;
pub type ScatterDataF64 = ScatterData<f64>;
pub type ModelF64 = GroundTruthModel<f64>;
