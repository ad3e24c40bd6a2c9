//! Algebraic curvature tensors of the form
//! R = c₀R₀ + Σᵢ cᵢ R_{Ψᵢ} and their Jacobi-type operators.
//!
//! R₀(x,y,z,t) = ⟨x,t⟩⟨y,z⟩ − ⟨x,z⟩⟨y,t⟩ has constant sectional curvature +1,
//! and for a skew-symmetric Ψ
//! R_Ψ(x,y,z,t) = ⟨x,Ψt⟩⟨y,Ψz⟩ − ⟨x,Ψz⟩⟨y,Ψt⟩ − 2⟨x,Ψy⟩⟨z,Ψt⟩.
//!
//! Operators are built from this structured form in O(κn²). The dense n⁴
//! array from [`CurvatureSpec::materialize`] exists as an independent
//! cross-check.

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordFamily;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Tolerance for the matrix invariants of curvature terms and structures.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Largest dimension [`CurvatureSpec::materialize`] accepts.
pub const DENSE_LIMIT: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTerm {
    pub coeff: f64,
    pub psi: Matrix,
}

impl CurvatureTerm {
    pub fn new(coeff: f64, psi: Matrix) -> Self {
        CurvatureTerm { coeff, psi }
    }
}

/// Structured curvature tensor c₀R₀ + Σᵢ cᵢ R_{Ψᵢ}.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSpec {
    dim: usize,
    c0: f64,
    terms: Vec<CurvatureTerm>,
}

/// Checks that `j` is orthogonal with `j² = −id`.
pub fn ensure_complex_structure(what: &str, j: &Matrix, dim: usize) -> Result<()> {
    if j.shape() != (dim, dim) {
        return Err(Error::ShapeMismatch {
            left: j.shape(),
            right: (dim, dim),
        });
    }
    let orth = j.orthogonality_residual();
    if orth > STRUCTURE_TOL {
        return Err(Error::NotComplexStructure {
            what: what.into(),
            detail: format!("orthogonality residual {orth:e}"),
        });
    }
    let sq = (j * j).max_abs_diff(&Matrix::identity(dim).scaled(-1.0));
    if sq > STRUCTURE_TOL {
        return Err(Error::NotComplexStructure {
            what: what.into(),
            detail: format!("J² + id residual {sq:e}"),
        });
    }
    Ok(())
}

fn ensure_dim(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    Ok(())
}

impl CurvatureSpec {
    /// Every Ψᵢ must be a Hermitian almost complex structure (skew, orthogonal)
    /// and every cᵢ nonzero.
    pub fn new(dim: usize, c0: f64, terms: Vec<CurvatureTerm>) -> Result<Self> {
        let spec = Self::with_skew_terms(dim, c0, terms)?;
        for (i, t) in spec.terms.iter().enumerate() {
            ensure_complex_structure(&format!("Psi_{}", i + 1), &t.psi, dim)?;
        }
        Ok(spec)
    }

    /// Relaxed constructor: each Ψᵢ only needs to be skew-symmetric. R_Ψ is an
    /// algebraic curvature tensor for any skew Ψ.
    pub fn with_skew_terms(dim: usize, c0: f64, terms: Vec<CurvatureTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (i, t) in terms.iter().enumerate() {
            if t.psi.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch {
                    left: t.psi.shape(),
                    right: (dim, dim),
                });
            }
            if t.coeff == 0.0 || !t.coeff.is_finite() {
                return Err(Error::ZeroCoefficient { index: i + 1 });
            }
            let skew = t.psi.skew_residual();
            if skew > STRUCTURE_TOL * (1.0 + t.psi.max_abs()) {
                return Err(Error::NotSkew {
                    what: format!("Psi_{}", i + 1),
                    residual: skew,
                });
            }
        }
        if !c0.is_finite() {
            return Err(Error::InvalidArgument("c0 must be finite".into()));
        }
        Ok(CurvatureSpec { dim, c0, terms })
    }

    /// c₀R₀
    pub fn constant(dim: usize, c0: f64) -> Result<Self> {
        Self::new(dim, c0, vec![])
    }

    /// c₀R₀ + Σᵢ cᵢ R_{Jᵢ} over the generators of `family`.
    pub fn from_family(c0: f64, family: &CliffordFamily, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != family.rank() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a family of rank {}",
                coeffs.len(),
                family.rank()
            )));
        }
        let terms = coeffs
            .iter()
            .zip(family.generators())
            .map(|(c, g)| CurvatureTerm::new(*c, g.clone()))
            .collect();
        Self::new(family.dim(), c0, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn terms(&self) -> &[CurvatureTerm] {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    /// Largest coefficient magnitude, used to scale tolerances.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms
            .iter()
            .fold(self.c0.abs(), |m, t| m.max(t.coeff.abs()))
    }

    /// R(x, y, z, t)
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], t: &[f64]) -> Result<f64> {
        for v in [x, y, z, t] {
            ensure_dim(v, self.dim)?;
        }
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };
        let mut r = self.c0 * (dot(x, t) * dot(y, z) - dot(x, z) * dot(y, t));
        for term in &self.terms {
            let pt = term.psi.mul_vec(t)?;
            let pz = term.psi.mul_vec(z)?;
            let py = term.psi.mul_vec(y)?;
            r += term.coeff
                * (dot(x, &pt) * dot(y, &pz) - dot(x, &pz) * dot(y, &pt) - 2.0 * dot(x, &py) * dot(z, &pt));
        }
        Ok(r)
    }

    /// Dense n⁴ array of R on the standard basis.
    pub fn materialize(&self) -> Result<DenseCurvature> {
        let n = self.dim;
        if n > DENSE_LIMIT {
            return Err(Error::DenseGuard {
                dim: n,
                limit: DENSE_LIMIT,
            });
        }
        let mut values = vec![0.0; n * n * n * n];
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut r = self.c0 * (delta(a, d) * delta(b, c) - delta(a, c) * delta(b, d));
                        for term in &self.terms {
                            let p = &term.psi;
                            r += term.coeff
                                * (p[(a, d)] * p[(b, c)] - p[(a, c)] * p[(b, d)] - 2.0 * p[(a, b)] * p[(c, d)]);
                        }
                        values[((a * n + b) * n + c) * n + d] = r;
                    }
                }
            }
        }
        Ok(DenseCurvature { dim: n, values })
    }

    /// Jacobi operator 𝒥_R(x): ⟨𝒥_R(x)y, z⟩ = R(y, x, x, z), for unit x.
    pub fn jacobi(&self, x: &[f64]) -> Result<Matrix> {
        ensure_dim(x, self.dim)?;
        Vector(x.to_vec()).ensure_unit()?;
        Ok(self.jacobi_unchecked(x))
    }

    /// c₀(‖x‖² id − x xᵀ) + Σ 3cᵢ (Ψᵢx)(Ψᵢx)ᵀ without the unit-norm check.
    fn jacobi_unchecked(&self, x: &[f64]) -> Matrix {
        let n = self.dim;
        let xx: f64 = x.iter().map(|a| a * a).sum();
        let mut m = Matrix::identity(n).scaled(self.c0 * xx);
        m.add_outer(-self.c0, x, x);
        for term in &self.terms {
            let px = term.psi.mul_vec(x).expect("dimension checked");
            m.add_outer(3.0 * term.coeff, &px, &px);
        }
        m
    }

    /// Skew-symmetric curvature operator ℛ(x,y): ⟨ℛ(x,y)z, w⟩ = R(x,y,z,w).
    pub fn skew_operator(&self, x: &[f64], y: &[f64]) -> Result<Matrix> {
        ensure_dim(x, self.dim)?;
        ensure_dim(y, self.dim)?;
        // R₀ part: z ↦ x⟨y,z⟩ − y⟨x,z⟩
        let mut m = Matrix::zeros(self.dim, self.dim);
        m.add_outer(self.c0, x, y);
        m.add_outer(-self.c0, y, x);
        for term in &self.terms {
            // z ↦ (Ψx)⟨Ψy,z⟩ − (Ψy)⟨Ψx,z⟩ + 2⟨x,Ψy⟩Ψz
            let px = term.psi.mul_vec(x)?;
            let py = term.psi.mul_vec(y)?;
            let x_psi_y: f64 = x.iter().zip(py.iter()).map(|(a, b)| a * b).sum();
            m.add_outer(term.coeff, &px, &py);
            m.add_outer(-term.coeff, &py, &px);
            m.add_scaled(2.0 * term.coeff * x_psi_y, &term.psi);
        }
        Ok(m)
    }

    /// Higher-order Jacobi operator Σᵢ 𝒥_R(eᵢ) over an orthonormal frame.
    pub fn higher_jacobi(&self, frame: &Frame) -> Result<Matrix> {
        if frame.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: frame.dim(),
            });
        }
        let mut m = Matrix::zeros(self.dim, self.dim);
        for v in frame.vectors() {
            m.add_scaled(1.0, &self.jacobi_unchecked(v));
        }
        Ok(m)
    }

    /// Complex Jacobi operator 𝒥_R(π_x) = 𝒥_R(x) + 𝒥_R(Jx).
    pub fn complex_jacobi(&self, j: &Matrix, x: &[f64]) -> Result<Matrix> {
        ensure_complex_structure("J", j, self.dim)?;
        self.complex_jacobi_trusted(j, x)
    }

    /// [`Self::complex_jacobi`] for a `j` already validated by the caller.
    pub fn complex_jacobi_trusted(&self, j: &Matrix, x: &[f64]) -> Result<Matrix> {
        ensure_dim(x, self.dim)?;
        Vector(x.to_vec()).ensure_unit()?;
        let jx = j.mul_vec(x)?;
        let mut m = self.jacobi_unchecked(x);
        m.add_scaled(1.0, &self.jacobi_unchecked(&jx));
        Ok(m)
    }

    /// Ricci operator: c₀(n−1) id + Σ 3cᵢ ΨᵢΨᵢᵀ.
    pub fn ricci(&self) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::identity(n).scaled(self.c0 * (n as f64 - 1.0));
        for term in &self.terms {
            m.add_scaled(3.0 * term.coeff, &(&term.psi * &term.psi.transpose()));
        }
        m
    }
}

/// Orthonormal p-frame spanning a p-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    vectors: Vec<Vector>,
}

impl Frame {
    pub fn new(vectors: Vec<Vector>) -> Result<Self> {
        let dim = vectors.first().map_or(0, |v| v.dim());
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut residual: f64 = 0.0;
        for (i, a) in vectors.iter().enumerate() {
            ensure_dim(a, dim)?;
            for (j, b) in vectors.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((a.dot(b) - expect).abs());
            }
        }
        if residual > STRUCTURE_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Frame { vectors })
    }

    /// Standard basis frame of ℝⁿ.
    pub fn standard(n: usize) -> Self {
        Frame {
            vectors: (0..n).map(|i| Vector::basis(n, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }
}

/// R on the standard basis, indexed (x, y, z, t).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseCurvature {
    dim: usize,
    values: Vec<f64>,
}

/// Largest residual of each curvature identity and where it occurs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// max |R(x,y,z,t) + R(y,x,z,t)|
    pub antisymmetry: f64,
    /// max |R(x,y,z,t) − R(z,t,x,y)|
    pub pair_symmetry: f64,
    /// max |R(x,y,z,t) + R(y,z,x,t) + R(z,x,y,t)|
    pub bianchi: f64,
    /// Index tuple achieving the overall largest residual.
    pub worst_index: Option<[usize; 4]>,
    pub tolerance: f64,
    pub pass: bool,
}

impl DenseCurvature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        let n = self.dim;
        ((a * n + b) * n + c) * n + d
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.values[self.offset(a, b, c, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let o = self.offset(a, b, c, d);
        self.values[o] = v;
    }

    pub fn max_abs_diff(&self, other: &DenseCurvature) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Checks antisymmetry, pair symmetry and the first Bianchi identity on
    /// every index tuple.
    pub fn verify_symmetries(&self, tol: f64) -> SymmetryReport {
        let n = self.dim;
        let (mut anti, mut pair, mut bianchi) = (0.0_f64, 0.0_f64, 0.0_f64);
        let mut worst = (0.0_f64, None);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.get(a, b, c, d);
                        let ra = (r + self.get(b, a, c, d)).abs();
                        let rp = (r - self.get(c, d, a, b)).abs();
                        let rb = (r + self.get(b, c, a, d) + self.get(c, a, b, d)).abs();
                        anti = anti.max(ra);
                        pair = pair.max(rp);
                        bianchi = bianchi.max(rb);
                        let m = ra.max(rp).max(rb);
                        if m > worst.0 {
                            worst = (m, Some([a, b, c, d]));
                        }
                    }
                }
            }
        }
        SymmetryReport {
            antisymmetry: anti,
            pair_symmetry: pair,
            bianchi,
            worst_index: worst.1,
            tolerance: tol,
            pass: anti <= tol && pair <= tol && bianchi <= tol,
        }
    }
}
