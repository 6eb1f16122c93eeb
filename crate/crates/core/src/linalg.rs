//! Dense matrix kernels. Everything determinant-like is in the log domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when validating symmetry of user-supplied matrices.
const SYMMETRY_RTOL: f64 = 1e-9;

/// Tolerance on `max |UᵀU − I|` accepted by [`OrthoMatrix::new`].
pub const ORTHO_TOL: f64 = 1e-10;

/// Dense row-major `rows × cols` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(p: usize) -> Self {
        let mut m = Self::zeros(p, p);
        for i in 0..p {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `max |self − other|` over entries; `∞` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense symmetric `p × p` matrix. `a[i][j] == a[j][i]` holds bitwise.
///
/// Serialises as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    p: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            data: vec![0.0; p * p],
        }
    }

    pub fn identity(p: usize) -> Self {
        Self::scaled_identity(p, 1.0)
    }

    pub fn scaled_identity(p: usize, scale: f64) -> Self {
        Self::diag(&vec![scale; p])
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.p + i] = v;
        }
        m
    }

    /// Builds from the lower triangle of `f(i, j)`, `j <= i`.
    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Validates symmetry (relative tolerance `1e-9`) then averages the two triangles.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_matrix(&Matrix::from_rows(rows)?)
    }

    /// Validates symmetry (relative tolerance `1e-9`) then averages the two triangles.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let p = m.rows();
        let scale = m.as_slice().iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        for i in 0..p {
            for j in 0..i {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                let diff = (a - b).abs();
                if diff > SYMMETRY_RTOL * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff,
                    });
                }
            }
            if !m[(i, i)].is_finite() {
                return Err(Error::NonFinite { row: i, col: i });
            }
        }
        Ok(Self::symmetrize(m))
    }

    /// `(M + Mᵀ) / 2` with no validation.
    pub fn symmetrize(m: &Matrix) -> Self {
        assert_eq!(m.rows(), m.cols(), "symmetrize needs a square matrix");
        Self::from_fn(m.rows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.p + j] = value;
        self.data[j * self.p + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.p).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.p,
            cols: self.p,
            data: self.data.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.p).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix {
            p: self.p,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &SymMatrix, b: f64) -> Result<SymMatrix> {
        self.check_dim(other.p)?;
        Ok(SymMatrix {
            p: self.p,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        if self.p != other.p {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The principal submatrix on `start..start + size`.
    pub fn block(&self, start: usize, size: usize) -> SymMatrix {
        SymMatrix::from_fn(size, |i, j| self.get(start + i, start + j))
    }

    pub fn check_dim(&self, p: usize) -> Result<()> {
        if self.p != p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: p,
            });
        }
        Ok(())
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

/// A square matrix with orthonormal columns (`max |UᵀU − I| ≤ 1e-10`).
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMatrix {
    inner: Matrix,
}

impl OrthoMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let deviation = orthogonality_defect(&m);
        if deviation > ORTHO_TOL {
            return Err(Error::NotOrthogonal(deviation));
        }
        Ok(Self { inner: m })
    }

    pub fn identity(p: usize) -> Self {
        Self {
            inner: Matrix::identity(p),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, k)]).collect()
    }
}

/// `max |UᵀU − I|`.
pub fn orthogonality_defect(u: &Matrix) -> f64 {
    let gram = u
        .transpose()
        .matmul(u)
        .expect("square matrix times its transpose");
    gram.max_abs_diff(&Matrix::identity(u.cols()))
}

/// Lower Cholesky factor `L` with `S = LLᵀ`. Fails on the first pivot that is not `> 0`.
pub fn cholesky(s: &SymMatrix) -> Result<Matrix> {
    let p = s.dim();
    let mut l = Matrix::zeros(p, p);
    for j in 0..p {
        let mut pivot = s.get(j, j);
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        // `!(x > 0)` also rejects NaN.
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "matrix (pivot {j} is {pivot:e})"
            )));
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..p {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// `log Det(S)` through Cholesky.
pub fn cholesky_log_det(s: &SymMatrix) -> Result<f64> {
    let l = cholesky(s)?;
    Ok((0..s.dim()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0)
}

pub fn is_positive_definite(s: &SymMatrix) -> bool {
    cholesky(s).is_ok()
}

/// Solves `S X = B` for positive definite `S`.
pub fn cholesky_solve(s: &SymMatrix, b: &Matrix) -> Result<Matrix> {
    let p = s.dim();
    if b.rows() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: b.rows(),
        });
    }
    let l = cholesky(s)?;
    let mut x = b.clone();
    for c in 0..b.cols() {
        // forward: L y = b
        for i in 0..p {
            let mut v = x[(i, c)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = v / l[(i, i)];
        }
        // backward: Lᵀ x = y
        for i in (0..p).rev() {
            let mut v = x[(i, c)];
            for k in i + 1..p {
                v -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = v / l[(i, i)];
        }
    }
    Ok(x)
}

/// `S⁻¹` for positive definite `S`, re-symmetrised.
pub fn inverse_pd(s: &SymMatrix) -> Result<SymMatrix> {
    let x = cholesky_solve(s, &Matrix::identity(s.dim()))?;
    Ok(SymMatrix::symmetrize(&x))
}

/// `UᵀSU`, re-symmetrised.
pub fn conjugate(u: &OrthoMatrix, s: &SymMatrix) -> Result<SymMatrix> {
    s.check_dim(u.dim())?;
    let su = s.to_matrix().matmul(u.matrix())?;
    let utsu = u.matrix().transpose().matmul(&su)?;
    Ok(SymMatrix::symmetrize(&utsu))
}

/// Empirical covariance of an `n × p` data matrix and its effective sample size.
///
/// With an estimated mean the columns are centred and `S = Σ(zᵢ−z̄)(zᵢ−z̄)ᵀ/(n−1)`,
/// `n_eff = n − 1`; with a known zero mean `S = ZᵀZ/n`, `n_eff = n`.
pub fn sample_covariance(z: &Matrix, mean_known_zero: bool) -> Result<(SymMatrix, usize)> {
    let (n, p) = (z.rows(), z.cols());
    let minimum = if mean_known_zero { 1 } else { 2 };
    if n < minimum {
        return Err(Error::TooFewObservations(format!(
            "{n} row(s); at least {minimum} needed"
        )));
    }
    for i in 0..n {
        for j in 0..p {
            if !z[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    let mean: Vec<f64> = if mean_known_zero {
        vec![0.0; p]
    } else {
        (0..p)
            .map(|j| (0..n).map(|i| z[(i, j)]).sum::<f64>() / n as f64)
            .collect()
    };
    let n_eff = if mean_known_zero { n } else { n - 1 };
    let mut s = SymMatrix::zeros(p);
    for a in 0..p {
        for b in 0..=a {
            let v: f64 = (0..n)
                .map(|i| (z[(i, a)] - mean[a]) * (z[(i, b)] - mean[b]))
                .sum();
            s.set(a, b, v / n_eff as f64);
        }
    }
    Ok((s, n_eff))
}
