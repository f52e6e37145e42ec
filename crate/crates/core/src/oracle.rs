//! Conditional-independence oracles.
//!
//! A [`CiOracle`] answers "is `X_u ⊥ X_v | X_S`?". The exact realization reads
//! conditional covariances off a known covariance matrix; the empirical one
//! thresholds sample conditional covariances computed from a scatter matrix.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{partial_cross, IndexSet, SymMatrix};
use crate::scalar::Scalar;

/// Outcome of a single conditional-independence query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CiDecision<F> {
    pub independent: bool,
    /// The (sample) conditional covariance the decision was based on.
    pub statistic: F,
    pub threshold: F,
}

impl<F: Scalar> CiDecision<F> {
    pub fn from_statistic(statistic: F, threshold: F) -> Self {
        CiDecision { independent: statistic.abs() < threshold, statistic, threshold }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Exact,
    Empirical,
}

pub trait CiOracle {
    type Scalar: Scalar;

    /// Number of variables `p`.
    fn dim(&self) -> usize;

    fn query(&self, u: usize, v: usize, s: &IndexSet) -> Result<CiDecision<Self::Scalar>>;

    /// Largest conditioning set the oracle can evaluate.
    fn max_conditioning_size(&self) -> usize;

    /// Number of queries evaluated so far.
    fn query_count(&self) -> u64;

    fn kind(&self) -> OracleKind;

    fn independent(&self, u: usize, v: usize, s: &IndexSet) -> Result<bool> {
        Ok(self.query(u, v, s)?.independent)
    }
}

impl<O: CiOracle + ?Sized> CiOracle for &O {
    type Scalar = O::Scalar;

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn query(&self, u: usize, v: usize, s: &IndexSet) -> Result<CiDecision<O::Scalar>> {
        (**self).query(u, v, s)
    }

    fn max_conditioning_size(&self) -> usize {
        (**self).max_conditioning_size()
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }

    fn kind(&self) -> OracleKind {
        (**self).kind()
    }
}

/// Decides independence from the true covariance: `|Σ(u, v | S)| < ε_zero`.
#[derive(Debug)]
pub struct ExactOracle<F> {
    sigma: SymMatrix<F>,
    eps_zero: F,
    count: AtomicU64,
}

impl<F: Scalar> ExactOracle<F> {
    pub fn new(sigma: SymMatrix<F>, eps_zero: F) -> Result<Self> {
        if !(eps_zero > F::zero()) {
            return Err(Error::InvalidParameter(format!("epsilon_zero must be positive, got {eps_zero}")));
        }
        Ok(ExactOracle { sigma, eps_zero, count: AtomicU64::new(0) })
    }

    /// Uses `ε_zero = 1e-8 · max_i Σ_ii`.
    pub fn with_default_tolerance(sigma: SymMatrix<F>) -> Result<Self> {
        let eps = default_eps_zero(&sigma);
        Self::new(sigma, eps)
    }

    pub fn sigma(&self) -> &SymMatrix<F> {
        &self.sigma
    }

    pub fn eps_zero(&self) -> F {
        self.eps_zero
    }
}

/// Default exact-zero tolerance, relative to the largest variance.
pub fn default_eps_zero<F: Scalar>(sigma: &SymMatrix<F>) -> F {
    F::lit(1e-8) * sigma.max_diagonal()
}

impl<F: Scalar> CiOracle for ExactOracle<F> {
    type Scalar = F;

    fn dim(&self) -> usize {
        self.sigma.dim()
    }

    fn query(&self, u: usize, v: usize, s: &IndexSet) -> Result<CiDecision<F>> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let (a, b) = (u.min(v), u.max(v));
        let stat = partial_cross(&self.sigma, a, b, s)?;
        Ok(CiDecision::from_statistic(stat, self.eps_zero))
    }

    fn max_conditioning_size(&self) -> usize {
        self.sigma.dim().saturating_sub(2)
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Exact
    }
}

/// Scatter matrix `Σ_i x_i x_iᵀ` together with the sample count.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterData<F> {
    scatter: SymMatrix<F>,
    n: usize,
}

impl<F: Scalar> ScatterData<F> {
    pub fn new(scatter: SymMatrix<F>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        Ok(ScatterData { scatter, n })
    }

    /// Accumulates the scatter matrix of `samples` (one row per sample).
    /// With `center`, column means are subtracted first; the sample count is
    /// left at `n`.
    pub fn from_samples(samples: &[Vec<F>], center: bool) -> Result<Self> {
        let n = samples.len();
        let p = samples.first().map(Vec::len).unwrap_or(0);
        if n == 0 || p == 0 {
            return Err(Error::InvalidParameter("need at least one non-empty sample".into()));
        }
        if let Some(bad) = samples.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch { expected: p, found: bad.len() });
        }
        let mean: Vec<F> = if center {
            let nf = F::from_usize(n).expect("sample count");
            (0..p).map(|j| samples.iter().map(|r| r[j]).sum::<F>() / nf).collect()
        } else {
            vec![F::zero(); p]
        };
        let mut acc = SymMatrix::zeros(p);
        for row in samples {
            for i in 0..p {
                let xi = row[i] - mean[i];
                for j in i..p {
                    let cur = acc.get(i, j);
                    acc.set(i, j, cur + xi * (row[j] - mean[j]));
                }
            }
        }
        Self::new(acc, n)
    }

    pub fn scatter(&self) -> &SymMatrix<F> {
        &self.scatter
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.scatter.dim()
    }

    /// Sample covariance `S / n`.
    pub fn sample_covariance(&self) -> SymMatrix<F> {
        self.scatter.scaled(F::one() / F::from_usize(self.n).expect("sample count"))
    }
}

/// Sample conditional covariance `(S_uv - S_uS S_S⁻¹ S_Sv) / (n - |S|)`.
pub fn sample_cond_cov<F: Scalar>(d: &ScatterData<F>, u: usize, v: usize, s: &IndexSet) -> Result<F> {
    if s.len() >= d.n {
        return Err(Error::InsufficientSamples { conditioning: s.len(), samples: d.n });
    }
    let num = partial_cross(&d.scatter, u, v, s)?;
    Ok(num / F::from_usize(d.n - s.len()).expect("sample count"))
}

/// Thresholds the sample conditional covariance at `α`.
#[derive(Debug)]
pub struct EmpiricalOracle<F> {
    data: ScatterData<F>,
    alpha: F,
    count: AtomicU64,
}

impl<F: Scalar> EmpiricalOracle<F> {
    pub fn new(data: ScatterData<F>, alpha: F) -> Result<Self> {
        if !(alpha > F::zero()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        Ok(EmpiricalOracle { data, alpha, count: AtomicU64::new(0) })
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn data(&self) -> &ScatterData<F> {
        &self.data
    }
}

impl<F: Scalar> CiOracle for EmpiricalOracle<F> {
    type Scalar = F;

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn query(&self, u: usize, v: usize, s: &IndexSet) -> Result<CiDecision<F>> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let (a, b) = (u.min(v), u.max(v));
        let stat = sample_cond_cov(&self.data, a, b, s)?;
        Ok(CiDecision::from_statistic(stat, self.alpha))
    }

    fn max_conditioning_size(&self) -> usize {
        self.data.dim().saturating_sub(2).min(self.data.n - 1)
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Empirical
    }
}

/// Data-only threshold `C · sqrt(((s + 2) ln p + ln(1/δ)) / n)`, used when the
/// dependence margin is unknown. The constant is a heuristic.
pub fn default_alpha(p: usize, n: usize, s: usize, delta: f64, c: f64) -> Result<f64> {
    if n == 0 || p < 2 || !(delta > 0.0 && delta < 1.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "default_alpha needs n > 0, p >= 2, 0 < delta < 1, C > 0 (got n={n}, p={p}, delta={delta}, C={c})"
        )));
    }
    let num = (s as f64 + 2.0) * (p as f64).ln() + (1.0 / delta).ln();
    Ok(c * (num / n as f64).sqrt())
}

type CacheKey = (usize, usize, IndexSet);

/// Memoizes decisions of an inner oracle, keyed on the unordered pair and
/// the sorted conditioning set. Safe for concurrent queries.
#[derive(Debug)]
pub struct CachedOracle<O: CiOracle> {
    inner: O,
    memo: RwLock<HashMap<CacheKey, CiDecision<O::Scalar>>>,
    requests: AtomicU64,
}

impl<O: CiOracle> CachedOracle<O> {
    pub fn new(inner: O) -> Self {
        CachedOracle { inner, memo: RwLock::new(HashMap::new()), requests: AtomicU64::new(0) }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    pub fn cached_entries(&self) -> usize {
        self.memo.read().expect("cache lock").len()
    }
}

impl<O: CiOracle> CiOracle for CachedOracle<O> {
    type Scalar = O::Scalar;

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn query(&self, u: usize, v: usize, s: &IndexSet) -> Result<CiDecision<O::Scalar>> {
        self.requests.fetch_add(1, Ordering::Relaxed);
        let key = (u.min(v), u.max(v), s.clone());
        if let Some(hit) = self.memo.read().expect("cache lock").get(&key) {
            return Ok(*hit);
        }
        let decision = self.inner.query(key.0, key.1, s)?;
        // A concurrent miss may have inserted the same decision already; the
        // inner oracle is deterministic so either value is fine.
        self.memo.write().expect("cache lock").entry(key).or_insert(decision);
        Ok(decision)
    }

    fn max_conditioning_size(&self) -> usize {
        self.inner.max_conditioning_size()
    }

    /// Total requests, hits included. The inner oracle's count gives misses.
    fn query_count(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    fn kind(&self) -> OracleKind {
        self.inner.kind()
    }
}
