//! Clifford families of Hermitian almost complex structures.
//!
//! A Clifford family of rank κ on ℝⁿ is a tuple J₁..J_κ of orthogonal,
//! skew-symmetric matrices with Jᵢ² = −id and JᵢJⱼ = −JⱼJᵢ for i ≠ j.
//! Canonical generators come from left multiplication by imaginary units of
//! the Cayley–Dickson algebras ℂ, ℍ, 𝕆 and a period-8 tensor step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator_norm, psd_pseudoinverse, random_orthogonal, Matrix, SeededRng,
};

/// Default tolerance for family relations.
pub const FAMILY_TOL: f64 = 1e-10;

/// Adams number ν(n): the maximal rank of a Clifford family on ℝⁿ.
pub fn adams_nu(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let s = n.trailing_zeros() as usize;
    Ok(nu_of_power(s))
}

/// ν(2^s) from ν(1)=0, ν(2)=1, ν(4)=3, ν(8)=7 and ν(16r) = ν(r) + 8.
fn nu_of_power(s: usize) -> usize {
    match s {
        0 => 0,
        1 => 1,
        2 => 3,
        3 => 7,
        _ => nu_of_power(s - 4) + 8,
    }
}

/// Smallest dimension carrying a Clifford family of rank `kappa`.
pub fn min_rep_dim(kappa: usize) -> usize {
    const BASE: [usize; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    16usize.pow((kappa / 8) as u32) * BASE[kappa % 8]
}

/// Product in the Cayley–Dickson algebra of dimension `x.len()` (a power of 2),
/// using (a,b)(c,d) = (ac − d̄b, da + bc̄).
fn cd_mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 1 {
        return vec![x[0] * y[0]];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = cd_mul(a, c);
    let db = cd_mul(&cd_conj(d), b);
    let da = cd_mul(d, a);
    let bc = cd_mul(b, &cd_conj(c));
    let mut out = Vec::with_capacity(n);
    out.extend(ac.iter().zip(&db).map(|(p, q)| p - q));
    out.extend(da.iter().zip(&bc).map(|(p, q)| p + q));
    out
}

fn cd_conj(x: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|v| -v).collect();
    out[0] = x[0];
    out
}

/// Matrix of left multiplication by the unit `e_i` in the algebra of dimension `d`.
fn left_mult(d: usize, i: usize) -> Matrix {
    let mut ei = vec![0.0; d];
    ei[i] = 1.0;
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        let mut ej = vec![0.0; d];
        ej[j] = 1.0;
        let col = cd_mul(&ei, &ej);
        for (r, v) in col.into_iter().enumerate() {
            m[(r, j)] = v;
        }
    }
    m
}

/// Generators of rank `kappa` acting irreducibly on ℝ^{min_rep_dim(kappa)}.
///
/// For κ = 3 the generators satisfy J₁J₂ = J₃ (a quaternion structure).
pub fn canonical_generators(kappa: usize) -> Vec<Matrix> {
    if kappa >= 8 {
        let seven = canonical_generators(7);
        let d8 = seven[0].rows();
        let mut e: Vec<Matrix> = seven
            .iter()
            .map(|l| Matrix::block_diag(&[l.clone(), l.scaled(-1.0)]))
            .collect();
        let swap = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).expect("2x2");
        e.push(swap.kron(&Matrix::identity(d8)));
        let omega = e.iter().skip(1).fold(e[0].clone(), |acc, g| &acc * g);
        let rest = canonical_generators(kappa - 8);
        let d_rest = min_rep_dim(kappa - 8);
        let id_rest = Matrix::identity(d_rest);
        let mut out: Vec<Matrix> = e.iter().map(|g| g.kron(&id_rest)).collect();
        out.extend(rest.iter().map(|f| omega.kron(f)));
        return out;
    }
    let d = min_rep_dim(kappa);
    let mut gens: Vec<Matrix> = (1..=kappa).map(|i| left_mult(d, i)).collect();
    if kappa == 3 {
        let prod = &gens[0] * &gens[1];
        if prod.max_abs_diff(&gens[2].scaled(-1.0)) < 1e-12 {
            gens[2] = gens[2].scaled(-1.0);
        }
    }
    gens
}

/// A tuple of (intended) anticommuting Hermitian almost complex structures.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordFamily {
    dim: usize,
    generators: Vec<Matrix>,
}

/// Which family relation failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Shape,
    Orthogonality,
    Skewness,
    Square,
    Anticommutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyViolation {
    pub kind: ViolationKind,
    pub generators: Vec<usize>,
    pub residual: f64,
}

/// Maximal residuals of the family relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub orthogonality: f64,
    pub skewness: f64,
    pub square: f64,
    pub anticommutation: f64,
    pub tolerance: f64,
    pub violations: Vec<FamilyViolation>,
    pub pass: bool,
}

impl CliffordFamily {
    /// Validated constructor; fails if any relation exceeds [`FAMILY_TOL`].
    pub fn new(dim: usize, generators: Vec<Matrix>) -> Result<Self> {
        let family = Self::from_generators_unchecked(dim, generators);
        let report = family.verify(FAMILY_TOL);
        if !report.pass {
            let v = &report.violations[0];
            return Err(Error::NotComplexStructure {
                what: format!("Clifford family generator(s) {:?}", v.generators),
                detail: format!("{:?} residual {:e}", v.kind, v.residual),
            });
        }
        Ok(family)
    }

    pub fn from_generators_unchecked(dim: usize, generators: Vec<Matrix>) -> Self {
        CliffordFamily { dim, generators }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Matrix {
        &self.generators[i]
    }

    /// Residuals of orthogonality, skewness, Jᵢ² + id and JᵢJⱼ + JⱼJᵢ.
    pub fn verify(&self, tol: f64) -> FamilyReport {
        verify_family(self, tol)
    }

    /// Product of generators in the order given by `word` (empty word is id).
    pub fn word(&self, word: &[usize]) -> Matrix {
        word.iter()
            .fold(Matrix::identity(self.dim), |acc, &i| &acc * &self.generators[i])
    }

    /// `J₁J₂J₃` for a rank-3 family: a symmetric involution.
    pub fn volume_element(&self) -> Result<Matrix> {
        if self.rank() != 3 {
            return Err(Error::WrongRank {
                expected: 3,
                got: self.rank(),
            });
        }
        Ok(self.word(&[0, 1, 2]))
    }

    /// Sign s with J₁J₂J₃ = s·id, if the rank-3 family is of quaternion type.
    pub fn quaternion_sign(&self, tol: f64) -> Option<f64> {
        let v = self.volume_element().ok()?;
        let id = Matrix::identity(self.dim);
        if v.max_abs_diff(&id) <= tol {
            Some(1.0)
        } else if v.max_abs_diff(&id.scaled(-1.0)) <= tol {
            Some(-1.0)
        } else {
            None
        }
    }

    /// `Σⱼ a[j] Jⱼ`
    pub fn combination(&self, a: &[f64]) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (c, g) in a.iter().zip(&self.generators) {
            out.add_scaled(*c, g);
        }
        out
    }

    /// Conjugates every generator by the orthogonal matrix `q`.
    pub fn conjugated(&self, q: &Matrix) -> Result<CliffordFamily> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.conjugate_by(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(CliffordFamily::from_generators_unchecked(self.dim, generators))
    }
}

/// Block-diagonal canonical family: `n / d(κ)` copies of the irreducible
/// generators, no conjugation.
pub fn canonical_family(n: usize, kappa: usize) -> Result<CliffordFamily> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let nu = adams_nu(n)?;
    if kappa > nu {
        return Err(Error::CliffordObstruction { n, kappa, nu });
    }
    let block = min_rep_dim(kappa);
    if n % block != 0 {
        return Err(Error::NotMultiple {
            n,
            kappa,
            block,
            suggestion: n.div_ceil(block) * block,
        });
    }
    let generators = canonical_generators(kappa)
        .into_iter()
        .map(|g| g.block_repeat(n / block))
        .collect();
    Ok(CliffordFamily::from_generators_unchecked(n, generators))
}

/// Clifford family of rank κ on ℝⁿ, conjugated by a seeded random orthogonal
/// matrix. Deterministic in `(n, kappa, seed)`.
pub fn generate_family(n: usize, kappa: usize, seed: u64) -> Result<CliffordFamily> {
    if kappa == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let base = canonical_family(n, kappa)?;
    let mut rng = SeededRng::new(seed);
    let q = random_orthogonal(n, &mut rng)?;
    base.conjugated(&q)
}

/// Rank-3 family that is not a quaternion structure: J₁ = K₁, J₂ = K₂ and
/// J₃ = ∓K₁K₂ on V₊ / V₋, where V₊ is spanned by the first `plus_blocks`
/// quaternion blocks of ℝⁿ. Then J₁J₂J₃ = ±id on V±.
pub fn split_rank3_family(n: usize, plus_blocks: usize) -> Result<CliffordFamily> {
    if n % 4 != 0 || n < 8 {
        return Err(Error::InvalidDimension {
            n,
            reason: "needs n divisible by 4 and at least 8".into(),
        });
    }
    let blocks = n / 4;
    if plus_blocks == 0 || plus_blocks >= blocks {
        return Err(Error::InvalidArgument(format!(
            "plus_blocks must lie in 1..{blocks}"
        )));
    }
    let k = canonical_generators(3);
    let k12 = &k[0] * &k[1];
    let j1 = k[0].block_repeat(blocks);
    let j2 = k[1].block_repeat(blocks);
    let parts: Vec<Matrix> = (0..blocks)
        .map(|b| if b < plus_blocks { k12.scaled(-1.0) } else { k12.clone() })
        .collect();
    let j3 = Matrix::block_diag(&parts);
    CliffordFamily::new(n, vec![j1, j2, j3])
}

/// Checks the family relations, naming each violation.
pub fn verify_family(family: &CliffordFamily, tol: f64) -> FamilyReport {
    let n = family.dim;
    let id = Matrix::identity(n);
    let mut report = FamilyReport {
        orthogonality: 0.0,
        skewness: 0.0,
        square: 0.0,
        anticommutation: 0.0,
        tolerance: tol,
        violations: Vec::new(),
        pass: true,
    };
    let gens = &family.generators;
    for (i, g) in gens.iter().enumerate() {
        if g.shape() != (n, n) {
            report.violations.push(FamilyViolation {
                kind: ViolationKind::Shape,
                generators: vec![i],
                residual: f64::INFINITY,
            });
            continue;
        }
        let orth = g.orthogonality_residual();
        let skew = g.skew_residual();
        let sq = (g * g).max_abs_diff(&id.scaled(-1.0));
        report.orthogonality = report.orthogonality.max(orth);
        report.skewness = report.skewness.max(skew);
        report.square = report.square.max(sq);
        for (kind, r) in [
            (ViolationKind::Orthogonality, orth),
            (ViolationKind::Skewness, skew),
            (ViolationKind::Square, sq),
        ] {
            if !(r <= tol) {
                report.violations.push(FamilyViolation {
                    kind,
                    generators: vec![i],
                    residual: r,
                });
            }
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if gens[i].shape() != (n, n) || gens[j].shape() != (n, n) {
                continue;
            }
            let r = anticommutator_norm(&gens[i], &gens[j]).unwrap_or(f64::INFINITY);
            report.anticommutation = report.anticommutation.max(r);
            if !(r <= tol) {
                report.violations.push(FamilyViolation {
                    kind: ViolationKind::Anticommutation,
                    generators: vec![i, j],
                    residual: r,
                });
            }
        }
    }
    report.pass = report.violations.is_empty();
    report
}

/// J̃ᵢ = Σⱼ A_{ij} Jⱼ for an orthogonal κ×κ matrix A.
pub fn reparametrize(family: &CliffordFamily, a: &Matrix) -> Result<CliffordFamily> {
    let k = family.rank();
    if a.shape() != (k, k) {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: (k, k),
        });
    }
    let residual = a.orthogonality_residual();
    if residual > FAMILY_TOL {
        return Err(Error::NotOrthogonal { residual });
    }
    let generators = (0..k).map(|i| family.combination(&a.row(i))).collect();
    Ok(CliffordFamily::from_generators_unchecked(family.dim, generators))
}

/// Dual structure {J₂J₃, J₃J₁, J₁J₂} of a rank-3 family.
pub fn dual_structure(family: &CliffordFamily) -> Result<CliffordFamily> {
    if family.rank() != 3 {
        return Err(Error::WrongRank {
            expected: 3,
            got: family.rank(),
        });
    }
    let g = &family.generators;
    let generators = vec![&g[1] * &g[2], &g[2] * &g[0], &g[0] * &g[1]];
    Ok(CliffordFamily::from_generators_unchecked(family.dim, generators))
}

/// Least-squares coordinates of a matrix over the words
/// {id, Jᵢ, JᵢJⱼ (i<j), JᵢJⱼJₖ (i<j<k)}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraCoordinates {
    pub words: Vec<Vec<usize>>,
    pub coefficients: Vec<f64>,
    /// ‖M − reconstruction‖_F / ‖M‖_F
    pub residual: f64,
}

impl AlgebraCoordinates {
    pub fn coefficient(&self, word: &[usize]) -> f64 {
        self.words
            .iter()
            .position(|w| w == word)
            .map_or(0.0, |i| self.coefficients[i])
    }
}

/// All increasing words of length ≤ 3 over `rank` generators.
pub fn algebra_words(rank: usize) -> Vec<Vec<usize>> {
    let mut words = vec![vec![]];
    words.extend((0..rank).map(|i| vec![i]));
    for i in 0..rank {
        for j in i + 1..rank {
            words.push(vec![i, j]);
        }
    }
    for i in 0..rank {
        for j in i + 1..rank {
            for k in j + 1..rank {
                words.push(vec![i, j, k]);
            }
        }
    }
    words
}

/// Projects `m` onto the span of `basis` using the trace inner product
/// ⟨A,B⟩ = tr(AᵀB)/n and a pseudoinverse of the Gram matrix.
pub fn project_onto(basis: &[Matrix], m: &Matrix) -> Result<(Vec<f64>, f64)> {
    let n = m.ensure_square()? as f64;
    let k = basis.len();
    let gram = Matrix::from_fn(k, k, |a, b| basis[a].frobenius_dot(&basis[b]) / n);
    let rhs: Vec<f64> = basis.iter().map(|w| w.frobenius_dot(m) / n).collect();
    let coefficients = if k == 0 {
        vec![]
    } else {
        psd_pseudoinverse(&gram, 1e-10)?.mul_vec(&rhs)?.0
    };
    let mut recon = Matrix::zeros(m.rows(), m.cols());
    for (c, w) in coefficients.iter().zip(basis) {
        recon.add_scaled(*c, w);
    }
    let norm = m.frobenius();
    let residual = if norm == 0.0 {
        recon.frobenius()
    } else {
        (m - &recon).frobenius() / norm
    };
    Ok((coefficients, residual))
}

/// Coordinates of `m` in the algebra generated by a family of rank ≤ 3.
pub fn decompose_in_algebra(family: &CliffordFamily, m: &Matrix) -> Result<AlgebraCoordinates> {
    if family.rank() > 3 {
        return Err(Error::InvalidArgument(format!(
            "algebra decomposition supports rank <= 3, got {}",
            family.rank()
        )));
    }
    if m.shape() != (family.dim, family.dim) {
        return Err(Error::ShapeMismatch {
            left: m.shape(),
            right: (family.dim, family.dim),
        });
    }
    let words = algebra_words(family.rank());
    let basis: Vec<Matrix> = words.iter().map(|w| family.word(w)).collect();
    let (coefficients, residual) = project_onto(&basis, m)?;
    Ok(AlgebraCoordinates {
        words,
        coefficients,
        residual,
    })
}
