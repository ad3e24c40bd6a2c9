//! Dense real linear algebra: vectors, matrices, a cyclic Jacobi symmetric
//! eigensolver, spectrum clustering, Gram–Schmidt and seeded sampling.
//!
//! Everything here is sized for the small operators this crate works with
//! (n <= 64). Matrices are stored row-major.

use std::fmt;
use std::ops::{Add, Deref, DerefMut, Index, IndexMut, Mul, Neg, Sub};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Relative off-diagonal Frobenius threshold at which the eigensolver stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Relative gap used by [`default_cluster_gap`].
pub const CLUSTER_GAP_REL: f64 = 1e-7;

/// Tolerance on `|‖v‖ - 1|` for vectors treated as unit vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// Name of the random stream recorded in reports.
pub const RNG_NAME: &str = "chacha8+box-muller";

/// A real column vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// Standard basis vector `e_i` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Checks `|‖v‖ - 1| <= UNIT_TOL`.
    pub fn ensure_unit(&self) -> Result<()> {
        let deviation = (self.norm() - 1.0).abs();
        if deviation > UNIT_TOL {
            return Err(Error::NotUnit { deviation });
        }
        Ok(())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.axpy(-1.0, rhs)
    }
}

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>10.4} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Builds a matrix from rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, |v| v.dim());
        if let Some(bad) = columns.iter().find(|v| v.dim() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: bad.dim(),
            });
        }
        Ok(Self::from_fn(r, c, |i, j| columns[j][i]))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    fn ensure_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `self += s * other`, in place.
    pub fn add_scaled(&mut self, s: f64, other: &Matrix) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// `self += s * u vᵀ`, in place.
    pub fn add_outer(&mut self, s: f64, u: &[f64], v: &[f64]) {
        debug_assert_eq!(self.rows, u.len());
        debug_assert_eq!(self.cols, v.len());
        for i in 0..self.rows {
            let su = s * u[i];
            if su == 0.0 {
                continue;
            }
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, vj) in row.iter_mut().zip(v) {
                *r += su * vj;
            }
        }
    }

    pub fn outer(u: &[f64], v: &[f64]) -> Matrix {
        Matrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(Vector(
            self.data
                .chunks(self.cols.max(1))
                .take(self.rows)
                .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Trace inner product `tr(Aᵀ B)`.
    pub fn frobenius_dot(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `max |A - B|` elementwise.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |A - Aᵀ|`
    pub fn symmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        r
    }

    /// `max |A + Aᵀ|`
    pub fn skew_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] + self[(j, i)]).abs());
            }
        }
        r
    }

    /// `max |AᵀA - I|`
    pub fn orthogonality_residual(&self) -> f64 {
        let ata = self.transpose().matmul(self).expect("AᵀA is always defined");
        ata.max_abs_diff(&Matrix::identity(self.cols))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r2, c2) = other.shape();
        Matrix::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Block-diagonal matrix with `copies` copies of `self` on the diagonal.
    pub fn block_repeat(&self, copies: usize) -> Matrix {
        Matrix::identity(copies).kron(self)
    }

    /// Block-diagonal matrix from the given square blocks.
    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// `Q self Qᵀ`
    pub fn conjugate_by(&self, q: &Matrix) -> Result<Matrix> {
        q.matmul(self)?.matmul(&q.transpose())
    }

    /// Determinant by partial-pivot elimination.
    pub fn determinant(&self) -> Result<f64> {
        let n = self.ensure_square()?;
        let mut a = self.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .unwrap_or(k);
            if a[(p, k)] == 0.0 {
                return Ok(0.0);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix add shape mismatch");
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sub shape mismatch");
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scaled(-1.0)
    }
}

/// An eigenvalue together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

impl Cluster {
    pub fn new(value: f64, multiplicity: usize) -> Self {
        Cluster {
            value,
            multiplicity,
        }
    }
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: Matrix,
    pub clusters: Vec<Cluster>,
    pub sweeps: usize,
}

impl SymSpectrum {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    pub fn eigenvector(&self, i: usize) -> Vector {
        self.eigenvectors.column(i)
    }
}

/// `1e-7 · (1 + spectral radius)`.
pub fn default_cluster_gap(eigenvalues: &[f64]) -> f64 {
    let radius = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    CLUSTER_GAP_REL * (1.0 + radius)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// `tol` bounds the accepted asymmetry relative to `max(1, max|A|)`, so a
/// matrix of pure round-off is accepted. Eigenvalues are
/// returned ascending; each eigenvector has its largest-magnitude component
/// positive. Clusters use [`default_cluster_gap`].
pub fn symmetric_eigen(a: &Matrix, tol: f64) -> Result<SymSpectrum> {
    let n = a.ensure_square()?;
    let scale = a.max_abs().max(1.0);
    let asym = a.symmetry_residual();
    if asym > tol * scale {
        return Err(Error::NotSymmetric {
            residual: asym,
            tolerance: tol * scale,
        });
    }
    let mut m = Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Matrix::identity(n);
    let target = OFF_DIAGONAL_TOL * m.frobenius();

    let off_norm = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_norm(&m) > target {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // Skip entries already negligible against both diagonal entries.
                if sweeps > 3 && apq.abs() < 1e-18 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut best = 0;
        for k in 0..n {
            if v[(k, src)].abs() > v[(best, src)].abs() + 1e-14 {
                best = k;
            }
        }
        let sign = if v[(best, src)] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            eigenvectors[(k, col)] = sign * v[(k, src)];
        }
    }
    let clusters = cluster_spectrum(&eigenvalues, default_cluster_gap(&eigenvalues));
    Ok(SymSpectrum {
        eigenvalues,
        eigenvectors,
        clusters,
        sweeps,
    })
}

/// Merges consecutive sorted eigenvalues whose difference is at most `gap`.
/// Each cluster is represented by its mean.
pub fn cluster_spectrum(eigenvalues: &[f64], gap: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut sum = 0.0;
    let mut prev = f64::NAN;
    for &l in eigenvalues {
        match out.last_mut() {
            Some(last) if l - prev <= gap => {
                sum += l;
                last.multiplicity += 1;
                last.value = sum / last.multiplicity as f64;
            }
            _ => {
                sum = l;
                out.push(Cluster::new(l, 1));
            }
        }
        prev = l;
    }
    out
}

/// Orthonormalizes `vectors` (modified Gram–Schmidt, two passes).
///
/// Each output vector has its first non-negligible component positive.
pub fn gram_schmidt(vectors: &[Vector]) -> Result<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    let dim = vectors.first().map_or(0, |v| v.dim());
    for (index, v) in vectors.iter().enumerate() {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        let original = v.norm();
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w = w.axpy(-c, q);
            }
        }
        let residual = w.norm();
        if original == 0.0 || residual <= 1e-10 * original {
            return Err(Error::RankDeficient { index, residual });
        }
        let mut w = w.scaled(1.0 / residual);
        if let Some(first) = w.iter().find(|a| a.abs() > 1e-12) {
            if *first < 0.0 {
                w = w.scaled(-1.0);
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// `max |AB - BA|`
pub fn commutator_norm(a: &Matrix, b: &Matrix) -> Result<f64> {
    a.ensure_square()?;
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(a.matmul(b)?.max_abs_diff(&b.matmul(a)?))
}

/// `max |AB + BA|`
pub fn anticommutator_norm(a: &Matrix, b: &Matrix) -> Result<f64> {
    a.ensure_square()?;
    a.ensure_same_shape(b)?;
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    Ok(ab
        .as_slice()
        .iter()
        .zip(ba.as_slice())
        .fold(0.0, |m, (x, y)| m.max((x + y).abs())))
}

/// Seeded generator: ChaCha8 stream with Box–Muller Gaussians.
#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vector {
        Vector((0..n).map(|_| self.gaussian()).collect())
    }
}

/// Uniformly distributed unit vector (normalized i.i.d. Gaussians).
pub fn random_unit(n: usize, rng: &mut SeededRng) -> Result<Vector> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    loop {
        let g = rng.gaussian_vector(n);
        let norm = g.norm();
        if norm > 1e-300 {
            return Ok(g.scaled(1.0 / norm));
        }
    }
}

/// Haar-distributed orthogonal matrix (Gram–Schmidt of Gaussian columns).
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    loop {
        let cols: Vec<Vector> = (0..n).map(|_| rng.gaussian_vector(n)).collect();
        if let Ok(q) = gram_schmidt(&cols) {
            return Matrix::from_columns(&q);
        }
    }
}

/// Random orthonormal `p`-frame in dimension `n`.
pub fn random_frame(n: usize, p: usize, rng: &mut SeededRng) -> Result<Vec<Vector>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if p == 0 || p > n {
        return Err(Error::InvalidArgument(format!(
            "frame size {p} must lie in 1..={n}"
        )));
    }
    loop {
        let vs: Vec<Vector> = (0..p)
            .map(|_| random_unit(n, rng))
            .collect::<Result<_>>()?;
        if let Ok(frame) = gram_schmidt(&vs) {
            return Ok(frame);
        }
    }
}

/// Moore–Penrose pseudoinverse of a symmetric positive semidefinite matrix,
/// dropping eigenvalues below `rel_cutoff · λ_max`.
pub fn psd_pseudoinverse(a: &Matrix, rel_cutoff: f64) -> Result<Matrix> {
    let n = a.ensure_square()?;
    let spec = symmetric_eigen(a, 1e-9)?;
    let cutoff = rel_cutoff * spec.spectral_radius();
    let mut out = Matrix::zeros(n, n);
    for (i, &l) in spec.eigenvalues.iter().enumerate() {
        if l > cutoff && l > 0.0 {
            let v = spec.eigenvector(i);
            out.add_outer(1.0 / l, &v, &v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_from(rng: &mut SeededRng, n: usize) -> Matrix {
        let g = Matrix::from_fn(n, n, |_, _| rng.gaussian());
        let mut s = &g + &g.transpose();
        s = s.scaled(0.5);
        s
    }

    #[test]
    fn identity_eigenvalues() {
        let s = symmetric_eigen(&Matrix::identity(4), 1e-12).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0; 4]);
        assert_eq!(s.clusters, vec![Cluster::new(1.0, 4)]);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let s = symmetric_eigen(&Matrix::diag(&[4.0, 2.0]), 1e-12).unwrap();
        assert_eq!(s.eigenvalues, vec![2.0, 4.0]);
        assert_eq!(s.eigenvector(0).0, vec![0.0, 1.0]);
        assert_eq!(s.eigenvector(1).0, vec![1.0, 0.0]);
    }

    #[test]
    fn eigen_rejects_bad_input() {
        assert!(matches!(
            symmetric_eigen(&Matrix::zeros(2, 3), 1e-12),
            Err(Error::NotSquare { .. })
        ));
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            symmetric_eigen(&a, 1e-12),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eigen_residual_trace_and_reconstruction() {
        let mut rng = SeededRng::new(7);
        for n in [1, 2, 3, 5, 8, 16, 32] {
            let a = sym_from(&mut rng, n);
            let s = symmetric_eigen(&a, 1e-12).unwrap();
            let scale = 1.0 + a.max_abs();
            for i in 0..n {
                let v = s.eigenvector(i);
                let av = a.mul_vec(&v).unwrap();
                let r = av.axpy(-s.eigenvalues[i], &v).max_abs();
                assert!(r <= 1e-10 * scale, "residual {r} at n={n}");
            }
            let tr: f64 = s.eigenvalues.iter().sum();
            assert!((tr - a.trace()).abs() <= 1e-9 * (1.0 + a.trace().abs()));
            let v = &s.eigenvectors;
            let rec = &(v * &Matrix::diag(&s.eigenvalues)) * &v.transpose();
            assert!(rec.max_abs_diff(&a) <= 1e-9);
            assert!(v.orthogonality_residual() <= 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigenvector_sign_convention() {
        let mut rng = SeededRng::new(3);
        let a = sym_from(&mut rng, 6);
        let s = symmetric_eigen(&a, 1e-12).unwrap();
        for i in 0..6 {
            let v = s.eigenvector(i);
            let big = v.iter().fold(0.0_f64, |m, x| if x.abs() > m.abs() { *x } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(
            cluster_spectrum(&[2.0, 2.0 + 1e-12, 4.0], 1e-7),
            vec![Cluster::new(2.0 + 0.5e-12, 2), Cluster::new(4.0, 1)]
        );
        assert_eq!(
            cluster_spectrum(&[6.0; 4], default_cluster_gap(&[6.0; 4])),
            vec![Cluster::new(6.0, 4)]
        );
        let c = cluster_spectrum(&[2.0, 2.0, 4.0, 4.0, 8.0, 8.0], 1e-7);
        assert_eq!(
            c,
            vec![
                Cluster::new(2.0, 2),
                Cluster::new(4.0, 2),
                Cluster::new(8.0, 2)
            ]
        );
        assert!(cluster_spectrum(&[], 1e-7).is_empty());
    }

    #[test]
    fn gram_schmidt_examples() {
        let e1 = Vector(vec![1.0, 0.0]);
        let e12 = Vector(vec![1.0, 1.0]);
        let q = gram_schmidt(&[e1.clone(), e12]).unwrap();
        assert!(q[0].axpy(-1.0, &e1).max_abs() < 1e-15);
        assert!(q[1].axpy(-1.0, &Vector(vec![0.0, 1.0])).max_abs() < 1e-15);

        let frame = vec![
            Vector(vec![0.6, 0.8, 0.0]),
            Vector(vec![-0.8, 0.6, 0.0]).scaled(-1.0),
            Vector(vec![0.0, 0.0, 1.0]),
        ];
        let q = gram_schmidt(&frame).unwrap();
        for (a, b) in q.iter().zip(&frame) {
            assert!(a.axpy(-1.0, b).max_abs() < 1e-14);
        }

        // Same span: compare projectors built from input-derived and output frames.
        let u = Vector(vec![1.0, 1.0, 0.0]);
        let w = Vector(vec![1.0, 0.0, 1.0]);
        let q = gram_schmidt(&[u.clone(), w.clone()]).unwrap();
        let mut p_out = Matrix::zeros(3, 3);
        for v in &q {
            p_out.add_outer(1.0, v, v);
        }
        // Oracle: P = A (AᵀA)⁻¹ Aᵀ with A = [u w], inverse of the 2x2 Gram by hand.
        let (g11, g12, g22) = (u.dot(&u), u.dot(&w), w.dot(&w));
        let det = g11 * g22 - g12 * g12;
        let inv = [[g22 / det, -g12 / det], [-g12 / det, g11 / det]];
        let cols = [&u, &w];
        let p_ref = Matrix::from_fn(3, 3, |i, j| {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    s += cols[a][i] * inv[a][b] * cols[b][j];
                }
            }
            s
        });
        assert!(p_out.max_abs_diff(&p_ref) < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((q[i].dot(&q[j]) - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gram_schmidt_detects_dependence() {
        let v = Vector(vec![1.0, 2.0, 3.0]);
        let err = gram_schmidt(&[v.clone(), v.scaled(2.0)]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { index: 1, .. }));
    }

    #[test]
    fn random_unit_is_deterministic_and_unit() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        let a1 = random_unit(4, &mut a).unwrap();
        let a2 = random_unit(4, &mut a).unwrap();
        let b1 = random_unit(4, &mut b).unwrap();
        let b2 = random_unit(4, &mut b).unwrap();
        assert_eq!(a1, b1);
        assert_eq!(a2, b2);
        assert_ne!(a1, a2);
        assert!((a1.norm() - 1.0).abs() <= 1e-12);

        let one = random_unit(1, &mut a).unwrap();
        assert!((one[0].abs() - 1.0).abs() <= 1e-15);
        assert!(matches!(random_unit(0, &mut a), Err(Error::ZeroDimension)));
    }

    #[test]
    fn random_unit_mean_is_small() {
        let mut rng = SeededRng::new(1);
        let mut mean = Vector::zeros(8);
        let count = 10_000;
        for _ in 0..count {
            mean = mean.axpy(1.0 / count as f64, &random_unit(8, &mut rng).unwrap());
        }
        assert!(mean.norm() <= 0.05, "mean norm {}", mean.norm());
    }

    #[test]
    fn commutator_examples() {
        let mut rng = SeededRng::new(5);
        let b = sym_from(&mut rng, 4);
        assert_eq!(commutator_norm(&Matrix::identity(4), &b).unwrap(), 0.0);
        let d = Matrix::diag(&[1.0, 2.0]);
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        // d·rot = [[0,-1],[2,0]], rot·d = [[0,-2],[1,0]]; difference [[0,1],[1,0]].
        assert_eq!(commutator_norm(&d, &rot).unwrap(), 1.0);
        assert!(matches!(
            commutator_norm(&d, &Matrix::identity(3)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = SeededRng::new(9);
        let q = random_orthogonal(12, &mut rng).unwrap();
        assert!(q.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn determinant_and_kron() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!((a.determinant().unwrap() + 6.0).abs() < 1e-14);
        let k = Matrix::identity(2).kron(&a);
        assert_eq!(k[(2, 3)], 2.0);
        assert_eq!(k[(0, 3)], 0.0);
        assert!((k.determinant().unwrap() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn pseudoinverse_of_rank_one() {
        let p = Matrix::outer(&[1.0, 1.0], &[1.0, 1.0]);
        let pinv = psd_pseudoinverse(&p, 1e-10).unwrap();
        assert!(pinv.max_abs_diff(&p.scaled(0.25)) < 1e-14);
    }
}
