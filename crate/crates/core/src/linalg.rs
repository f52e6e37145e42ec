//! Dense symmetric linear algebra: index sets, principal blocks, Cholesky
//! and LU solves, Schur complements and conditional covariances.
//!
//! Matrices are small (tens of rows) and stored in full row-major form.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A sorted, duplicate-free set of zero-based node indices.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// `{0, 1, ..., dim - 1}`.
    pub fn full(dim: usize) -> Self {
        IndexSet((0..dim).collect())
    }

    /// Wraps a vector that the caller guarantees is strictly increasing.
    pub(crate) fn from_sorted_unchecked(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        IndexSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Returns a copy with `node` inserted.
    pub fn with(&self, node: usize) -> Self {
        match self.0.binary_search(&node) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut v = Vec::with_capacity(self.0.len() + 1);
                v.extend_from_slice(&self.0[..pos]);
                v.push(node);
                v.extend_from_slice(&self.0[pos..]);
                IndexSet(v)
            }
        }
    }

    pub fn union(&self, other: &IndexSet) -> Self {
        IndexSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &IndexSet) -> Self {
        IndexSet(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.iter().all(|i| !other.contains(i))
    }

    /// `{0..dim} \ self`.
    pub fn complement(&self, dim: usize) -> Self {
        IndexSet((0..dim).filter(|&i| !self.contains(i)).collect())
    }

    /// Fails with `InvalidIndex` if any member is `>= dim`.
    pub fn check_bounds(&self, dim: usize) -> Result<()> {
        match self.0.last() {
            Some(&index) if index >= dim => Err(Error::InvalidIndex { index, dim }),
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::new(iter)
    }
}

impl<const N: usize> From<[usize; N]> for IndexSet {
    fn from(a: [usize; N]) -> Self {
        IndexSet::new(a)
    }
}

/// General dense row-major matrix, used for off-diagonal blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        self.data.chunks(self.cols.max(1)).map(<[F]>::to_vec).collect()
    }
}

/// Symmetric `dim x dim` matrix with full storage.
///
/// Every constructor enforces `a[i][j] == a[j][i]` bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Scalar> SymMatrix<F> {
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![F::zero(); dim * dim] }
    }

    pub fn diagonal(diag: &[F]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { F::zero() })
    }

    /// Builds from the upper triangle of `f` (`f(i, j)` is called for `i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from row-major entries. Mirror entries may differ by at most
    /// `tol * max|a_ij|`; they are replaced by their average.
    pub fn from_row_major(dim: usize, data: &[F], tol: F) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        let scale = data.iter().fold(F::zero(), |m, x| m.max(x.abs()));
        let two = F::lit(2.0);
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let a = data[i * dim + j];
                let b = data[j * dim + i];
                if !a.is_finite() || !b.is_finite() || (a - b).abs() > tol * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                m.set(i, j, if a == b { a } else { (a + b) / two });
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let dim = rows.len();
        let mut flat = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
            flat.extend_from_slice(r);
        }
        Self::from_row_major(dim, &flat, F::zero())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.dim + j] = x;
        self.data[j * self.dim + i] = x;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_diagonal(&self) -> F {
        (0..self.dim).fold(F::zero(), |m, i| m.max(self.get(i, i)))
    }

    /// Entry-wise scaling.
    pub fn scaled(&self, c: F) -> Self {
        SymMatrix { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    /// `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &SymMatrix<F>) -> F {
        self.data
            .iter()
            .zip(&other.data)
            .fold(F::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Plain matrix product (not necessarily symmetric).
    pub fn matmul(&self, other: &SymMatrix<F>) -> Matrix<F> {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let s = (0..n).map(|l| self.get(i, l) * other.get(l, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// Principal block `A_I`.
    pub fn principal(&self, idx: &IndexSet) -> Result<SymMatrix<F>> {
        idx.check_bounds(self.dim)?;
        let ix = idx.as_slice();
        Ok(Self::from_fn(ix.len(), |a, b| self.get(ix[a], ix[b])))
    }
}

/// `A_{rows, cols}`.
pub fn submatrix<F: Scalar>(a: &SymMatrix<F>, rows: &IndexSet, cols: &IndexSet) -> Result<Matrix<F>> {
    rows.check_bounds(a.dim())?;
    cols.check_bounds(a.dim())?;
    let mut out = Matrix::zeros(rows.len(), cols.len());
    for (r, i) in rows.iter().enumerate() {
        for (c, j) in cols.iter().enumerate() {
            out.set(r, c, a.get(i, j));
        }
    }
    Ok(out)
}

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
#[derive(Clone, Debug)]
pub struct Cholesky<F> {
    n: usize,
    l: Vec<F>,
}

impl<F: Scalar> Cholesky<F> {
    /// Fails with `NotPositiveDefinite { pivot }` at the first non-positive pivot.
    pub fn factor(a: &SymMatrix<F>) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![F::zero(); n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > F::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn factor_entry(&self, i: usize, j: usize) -> F {
        self.l[i * self.n + j]
    }

    /// Solves `L y = b` in place.
    pub fn forward_substitute(&self, b: &mut [F]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `L^T x = y` in place.
    pub fn backward_substitute(&self, b: &mut [F]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [F]) {
        self.forward_substitute(b);
        self.backward_substitute(b);
    }

    pub fn inverse(&self) -> SymMatrix<F> {
        let n = self.n;
        let mut inv = SymMatrix::zeros(n);
        let mut col = vec![F::zero(); n];
        for j in 0..n {
            col.iter_mut().for_each(|x| *x = F::zero());
            col[j] = F::one();
            self.solve_in_place(&mut col);
            // Keep the lower triangle of each solve; `set` mirrors it.
            for (i, &x) in col.iter().enumerate().skip(j) {
                inv.set(i, j, x);
            }
        }
        inv
    }
}

/// `‖A‖₁ ‖A⁻¹‖₁`.
fn condition_one_norm<F: Scalar>(a: &SymMatrix<F>, inv: &SymMatrix<F>) -> F {
    let norm1 = |m: &SymMatrix<F>| {
        (0..m.dim()).fold(F::zero(), |best, j| {
            best.max((0..m.dim()).map(|i| m.get(i, j).abs()).sum())
        })
    };
    norm1(a) * norm1(inv)
}

/// Factors a conditioning block, rejecting it when it is not positive definite
/// or its condition number exceeds [`Scalar::singular_condition`].
pub fn factor_conditioning_block<F: Scalar>(block: &SymMatrix<F>) -> Result<Cholesky<F>> {
    let size = block.dim();
    let chol = Cholesky::factor(block).map_err(|_| Error::SingularConditioningSet { size })?;
    let cond = condition_one_norm(block, &chol.inverse());
    if !cond.is_finite() || cond > F::singular_condition() {
        return Err(Error::SingularConditioningSet { size });
    }
    Ok(chol)
}

/// Inverse of a symmetric positive-definite matrix.
pub fn invert_pd<F: Scalar>(a: &SymMatrix<F>) -> Result<SymMatrix<F>> {
    Ok(Cholesky::factor(a)?.inverse())
}

/// LU factorization with partial pivoting, for invertible blocks that need not
/// be positive definite.
struct Lu<F> {
    n: usize,
    lu: Vec<F>,
    perm: Vec<usize>,
}

impl<F: Scalar> Lu<F> {
    fn factor(a: &SymMatrix<F>) -> Option<Self> {
        let n = a.dim();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, F::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > F::zero()) {
                return None;
            }
            if piv != k {
                for c in 0..n {
                    lu.swap(k * n + c, piv * n + c);
                }
                perm.swap(k, piv);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for c in k + 1..n {
                    lu[i * n + c] = lu[i * n + c] - f * lu[k * n + c];
                }
            }
        }
        Some(Lu { n, lu, perm })
    }

    fn solve(&self, b: &[F]) -> Vec<F> {
        let n = self.n;
        let mut x: Vec<F> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - self.lu[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] = x[i] - self.lu[i * n + k] * x[k];
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }

    fn inverse(&self) -> SymMatrix<F> {
        // The inverse of a symmetric matrix is symmetric; keep the lower solve
        // and mirror it.
        let n = self.n;
        let mut inv = SymMatrix::zeros(n);
        let mut e = vec![F::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = F::zero());
            e[j] = F::one();
            let col = self.solve(&e);
            for (i, &x) in col.iter().enumerate().skip(j) {
                inv.set(i, j, x);
            }
        }
        inv
    }
}

/// Schur complement of `A_I` in `A`: `A_{I^c} - A_{I^c I} A_I^{-1} A_{I I^c}`,
/// indexed by `I^c` in increasing order.
pub fn schur_complement<F: Scalar>(a: &SymMatrix<F>, idx: &IndexSet) -> Result<SymMatrix<F>> {
    idx.check_bounds(a.dim())?;
    let comp = idx.complement(a.dim());
    let cross = submatrix(a, idx, &comp)?;
    let mut out = a.principal(&comp)?;
    if idx.is_empty() {
        return Ok(out);
    }
    let block = a.principal(idx)?;
    let size = idx.len();
    let lu = Lu::factor(&block).ok_or(Error::SingularConditioningSet { size })?;
    let cond = condition_one_norm(&block, &lu.inverse());
    if !cond.is_finite() || cond > F::singular_condition() {
        return Err(Error::SingularConditioningSet { size });
    }
    // Columns of A_I^{-1} A_{I I^c}.
    let solved: Vec<Vec<F>> = (0..comp.len())
        .map(|c| {
            let rhs: Vec<F> = (0..size).map(|r| cross.get(r, c)).collect();
            lu.solve(&rhs)
        })
        .collect();
    for a_ in 0..comp.len() {
        for b_ in a_..comp.len() {
            let corr: F = (0..size).map(|r| cross.get(r, a_) * solved[b_][r]).sum();
            let x = out.get(a_, b_) - corr;
            out.set(a_, b_, x);
        }
    }
    Ok(out)
}

fn check_query(dim: usize, u: usize, v: usize, s: &IndexSet) -> Result<()> {
    for node in [u, v] {
        if node >= dim {
            return Err(Error::InvalidIndex { index: node, dim });
        }
    }
    s.check_bounds(dim)?;
    if u == v {
        return Err(Error::InvalidPair(u));
    }
    for node in [u, v] {
        if s.contains(node) {
            return Err(Error::InvalidConditioningSet { node });
        }
    }
    Ok(())
}

/// `M_uv - M_uS M_S^{-1} M_Sv` for a positive (semi)definite `M`; shared by
/// the exact and the sample conditional covariance.
pub fn partial_cross<F: Scalar>(m: &SymMatrix<F>, u: usize, v: usize, s: &IndexSet) -> Result<F> {
    check_query(m.dim(), u, v, s)?;
    if s.is_empty() {
        return Ok(m.get(u, v));
    }
    let chol = factor_conditioning_block(&m.principal(s)?)?;
    let mut a: Vec<F> = s.iter().map(|i| m.get(i, u)).collect();
    let mut b: Vec<F> = s.iter().map(|i| m.get(i, v)).collect();
    chol.forward_substitute(&mut a);
    chol.forward_substitute(&mut b);
    let corr: F = a.iter().zip(&b).map(|(&x, &y)| x * y).sum();
    Ok(m.get(u, v) - corr)
}

/// Conditional covariance `Σ(u, v | S)`.
pub fn cond_cov<F: Scalar>(sigma: &SymMatrix<F>, u: usize, v: usize, s: &IndexSet) -> Result<F> {
    partial_cross(sigma, u, v, s)
}

/// Smallest and largest eigenvalue of a symmetric matrix (cyclic Jacobi).
pub fn eigenvalue_bounds<F: Scalar>(a: &SymMatrix<F>) -> (F, F) {
    let n = a.dim();
    let mut m = a.data.clone();
    let two = F::lit(2.0);
    for _sweep in 0..100 {
        let off: F = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: F = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= F::epsilon() * F::epsilon() * diag || off == F::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == F::zero() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).fold((F::infinity(), F::neg_infinity()), |(lo, hi), i| {
        let d = m[i * n + i];
        (lo.min(d), hi.max(d))
    })
}
