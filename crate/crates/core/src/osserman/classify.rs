use serde::{Deserialize, Serialize};

use crate::clifford::{decompose_in_algebra, dual_structure, project_onto, CliffordFamily};
use crate::error::{Error, Result};
use crate::linalg::{random_unit, symmetric_eigen, Matrix, SeededRng};

use super::report::VerificationReport;
use super::ComplexModel;

/// Residual below which an algebraic identity between structures is
/// considered to hold.
pub const CLASSIFIER_TOL: f64 = 1e-6;

/// Relative threshold for treating a curvature coefficient as zero or two
/// coefficients as equal.
const COEFF_TOL: f64 = 1e-12;

/// Eigenvalue multiplicity pattern of a complex Osserman model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultiplicityCase {
    Scalar,
    TwoTwo,
    FourFour,
    FourTwoTwo,
    Violation,
}

impl MultiplicityCase {
    pub fn label(self) -> &'static str {
        match self {
            MultiplicityCase::Scalar => "scalar",
            MultiplicityCase::TwoTwo => "(n-2,2)",
            MultiplicityCase::FourFour => "(n-4,4)",
            MultiplicityCase::FourTwoTwo => "(n-4,2,2)",
            MultiplicityCase::Violation => "VIOLATION",
        }
    }
}

/// Sorts the multiplicities of a passing complex Osserman report into the
/// patterns allowed in dimension `n`.
pub fn classify_multiplicities(report: &VerificationReport, n: usize) -> Result<MultiplicityCase> {
    if !report.passed() {
        return Err(Error::InvalidArgument(
            "multiplicities are only defined for a passing report".into(),
        ));
    }
    let mut mult: Vec<usize> = report.spectrum.iter().map(|c| c.multiplicity).collect();
    mult.sort_unstable_by(|a, b| b.cmp(a));
    let total: usize = mult.iter().sum();
    if total != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: total,
        });
    }
    let pattern = |v: &[usize]| {
        let mut v: Vec<usize> = v.iter().copied().filter(|m| *m > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    let case = if mult == pattern(&[n]) {
        MultiplicityCase::Scalar
    } else if n >= 2 && mult == pattern(&[n - 2, 2]) {
        MultiplicityCase::TwoTwo
    } else if n % 4 == 0 && n >= 4 && mult == pattern(&[n - 4, 4]) {
        MultiplicityCase::FourFour
    } else if n % 4 == 0 && n >= 4 && mult == pattern(&[n - 4, 2, 2]) {
        MultiplicityCase::FourTwoTwo
    } else {
        MultiplicityCase::Violation
    };
    Ok(case)
}

/// Coefficient of J on one word of the Clifford algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordCoefficient {
    pub word: String,
    pub coefficient: f64,
}

/// Outcome of the closed-form classification of a rank ≤ 3 model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierVerdict {
    pub rank: usize,
    pub case: String,
    /// `None` when the dimension is below the range where the criterion is
    /// known to be necessary and the sufficient conditions fail.
    pub complex_osserman: Option<bool>,
    /// Rows of the orthogonal matrix A with J̃ᵢ = Σⱼ Aᵢⱼ Jⱼ.
    pub reparametrization: Option<Vec<Vec<f64>>>,
    /// Coefficients c̃ᵢ of R in the reparametrized family.
    pub coefficients: Vec<f64>,
    pub j_coordinates: Vec<WordCoefficient>,
    pub j_residual: f64,
    /// Residual of the identities that decided the case.
    pub residual: f64,
    /// Range of α(x) = ⟨J₁J₂x, Jx⟩ over sampled x (rank 2 only).
    pub alpha_range: Option<[f64; 2]>,
    pub subcase: Option<String>,
}

impl ClassifierVerdict {
    fn new(rank: usize, coefficients: Vec<f64>) -> Self {
        ClassifierVerdict {
            rank,
            case: String::new(),
            complex_osserman: None,
            reparametrization: None,
            coefficients,
            j_coordinates: vec![],
            j_residual: 0.0,
            residual: 0.0,
            alpha_range: None,
            subcase: None,
        }
    }

    fn decide(mut self, case: &str, co: Option<bool>, residual: f64) -> Self {
        self.case = case.into();
        self.complex_osserman = co;
        self.residual = residual;
        self
    }

    fn with_reparam(mut self, a: &Matrix, c: &[f64]) -> Self {
        self.coefficients = reparam_coefficients(a, c);
        self.reparametrization = Some(a.to_rows());
        self
    }
}

/// RMS entry size: ‖M‖_F / √n.
fn rms(m: &Matrix) -> f64 {
    m.frobenius() / (m.rows() as f64).sqrt()
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    &(a * b) - &(b * a)
}

fn anticommutator(a: &Matrix, b: &Matrix) -> Matrix {
    &(a * b) + &(b * a)
}

/// c̃ᵢ = Σⱼ Aᵢⱼ² cⱼ, valid when every row of A lives in one eigenspace of
/// diag(c).
fn reparam_coefficients(a: &Matrix, c: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)] * a[(i, j)] * c[j]).sum())
        .collect()
}

fn coeff_scale(model: &ComplexModel) -> f64 {
    model.spec().coefficient_scale().max(1.0)
}

/// Whether a coefficient vector `a` satisfies (cᵢ − cⱼ)aᵢaⱼ = 0 for i ≠ j.
fn coefficients_compatible(a: &[f64], c: &[f64], scale: f64) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if ((c[i] - c[j]) * a[i] * a[j]).abs() > CLASSIFIER_TOL * scale {
                return false;
            }
        }
    }
    true
}

/// Orthogonal matrix with first row `first` and sign of determinant `det`.
/// When `first` is supported on one class of equal coefficients, Gram–Schmidt
/// on the standard basis keeps every other row inside a single class.
fn complete_rows(first: &[f64], det: f64) -> Result<Matrix> {
    let k = first.len();
    let norm = first.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut rows: Vec<Vec<f64>> = vec![first.iter().map(|x| x / norm).collect()];
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        for r in &rows {
            let d: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(r) {
                *x -= d * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 && rows.len() < k {
            rows.push(v.iter().map(|x| x / norm).collect());
        }
    }
    if rows.len() != k {
        return Err(Error::Model("could not complete reparametrization".into()));
    }
    let mut a = Matrix::from_rows(&rows)?;
    if a.determinant()? * det < 0.0 {
        for j in 0..k {
            a[(k - 1, j)] = -a[(k - 1, j)];
        }
    }
    Ok(a)
}

fn alpha_range(family: &CliffordFamily, j: &Matrix, seed: u64) -> Result<[f64; 2]> {
    let j12 = family.word(&[0, 1]);
    let mut rng = SeededRng::new(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..16 {
        let x = random_unit(family.dim(), &mut rng)?;
        let a = j12.mul_vec(&x)?.dot(&j.mul_vec(&x)?);
        lo = lo.min(a);
        hi = hi.max(a);
    }
    Ok([lo, hi])
}

/// Closed-form decision of whether a model c₀R₀ + Σ cᵢR_{Jᵢ} of rank ≤ 3 is
/// complex Osserman, with the reparametrization that exhibits the normal form.
pub fn classify_clifford_model(model: &ComplexModel) -> Result<ClassifierVerdict> {
    let spec = model.spec();
    let n = model.dim();
    let c0 = spec.c0();
    let c = spec.coefficients();
    if c.is_empty() {
        return Ok(ClassifierVerdict::new(0, vec![]).decide("rank0: R = c0 R0", Some(true), 0.0));
    }
    let family = model
        .family()
        .ok_or_else(|| Error::Model("classification needs the generating Clifford family".into()))?;
    if !model.is_family_generated() {
        return Err(Error::Model(
            "curvature terms are not the generators of the provenance family".into(),
        ));
    }
    let rank = family.rank();
    if rank > 3 {
        return Err(Error::InvalidArgument(format!(
            "closed-form classification covers rank <= 3, got {rank}"
        )));
    }
    let scale = coeff_scale(model);
    let c0_zero = c0.abs() <= COEFF_TOL * scale;
    let j = model.j();

    let coords = decompose_in_algebra(family, j)?;
    let mut verdict = ClassifierVerdict::new(rank, c.clone());
    verdict.j_coordinates = coords
        .words
        .iter()
        .zip(&coords.coefficients)
        .filter(|(_, v)| v.abs() > 1e-9)
        .map(|(w, v)| WordCoefficient {
            word: if w.is_empty() {
                "id".into()
            } else {
                super::sampler::word_name(w)
            },
            coefficient: *v,
        })
        .collect();
    verdict.j_residual = coords.residual;

    Ok(match rank {
        1 => rank_one(verdict, family, j, c0_zero),
        2 => {
            let seed = 0xa1fa;
            verdict.alpha_range = Some(alpha_range(family, j, seed)?);
            rank_two(verdict, family, j, &c, c0_zero, scale, n)?
        }
        _ => rank_three(verdict, family, j, &c, c0_zero, scale, n)?,
    })
}

fn rank_one(v: ClassifierVerdict, family: &CliffordFamily, j: &Matrix, c0_zero: bool) -> ClassifierVerdict {
    let j1 = family.generator(0);
    let comm = rms(&commutator(j, j1));
    let anti = rms(&anticommutator(j, j1));
    let plus = rms(&(j - j1));
    let minus = rms(&(j + j1));
    let tol = CLASSIFIER_TOL;
    if c0_zero {
        if comm <= tol {
            v.decide("rank1(a): JJ1 = J1J", Some(true), comm)
        } else if anti <= tol {
            v.decide("rank1(a): JJ1 = -J1J", Some(true), anti)
        } else {
            v.decide("rank1(a): not complex Osserman", Some(false), comm.min(anti))
        }
    } else if plus <= tol {
        v.decide("rank1(b): J = J1", Some(true), plus)
    } else if minus <= tol {
        v.decide("rank1(b): J = -J1", Some(true), minus)
    } else if anti <= tol {
        v.decide("rank1(b): JJ1 = -J1J", Some(true), anti)
    } else {
        v.decide("rank1(b): not complex Osserman", Some(false), anti.min(plus).min(minus))
    }
}

fn rank_two(
    v: ClassifierVerdict,
    family: &CliffordFamily,
    j: &Matrix,
    c: &[f64],
    c0_zero: bool,
    scale: f64,
    n: usize,
) -> Result<ClassifierVerdict> {
    let tol = CLASSIFIER_TOL;
    let (j1, j2) = (family.generator(0), family.generator(1));
    let equal = (c[0] - c[1]).abs() <= COEFF_TOL * scale * 1e3;

    // (b) J = J̃₁ with J in the span of J₁, J₂.
    let (a, span_res) = project_onto(family.generators(), j)?;
    if span_res <= tol && coefficients_compatible(&a, c, scale) {
        let rot = Matrix::from_rows(&[vec![a[0], a[1]], vec![-a[1], a[0]]])?;
        return Ok(v.with_reparam(&rot, c).decide("rank2(b): J = J~1", Some(true), span_res));
    }
    // (b) J = ±J₁J₂.
    let j12 = j1 * j2;
    for sign in [1.0, -1.0] {
        let res = rms(&(j - &j12.scaled(sign)));
        if res <= tol {
            let a = Matrix::diag(&[1.0, sign]);
            return Ok(v.with_reparam(&a, c).decide("rank2(b): J = J~1J~2", Some(true), res));
        }
    }
    let best_b = span_res.min(rms(&(j - &j12))).min(rms(&(j + &j12)));

    if c0_zero {
        // (a) J commutes with J̃₁ = cos θ J₁ + sin θ J₂ and anticommutes with
        // J̃₂ = −sin θ J₁ + cos θ J₂: minimize the quadratic form in (cos θ, sin θ).
        let (c1m, c2m) = (commutator(j, j1), commutator(j, j2));
        let (a1m, a2m) = (anticommutator(j, j1), anticommutator(j, j2));
        let q = Matrix::from_rows(&[
            vec![
                c1m.frobenius_dot(&c1m) + a2m.frobenius_dot(&a2m),
                c1m.frobenius_dot(&c2m) - a2m.frobenius_dot(&a1m),
            ],
            vec![
                c1m.frobenius_dot(&c2m) - a2m.frobenius_dot(&a1m),
                c2m.frobenius_dot(&c2m) + a1m.frobenius_dot(&a1m),
            ],
        ])?;
        let candidates: Vec<[f64; 2]> = if equal {
            let s = symmetric_eigen(&q, 1e-9)?;
            let e = s.eigenvector(0);
            vec![[e[0], e[1]]]
        } else {
            vec![[1.0, 0.0], [0.0, 1.0]]
        };
        let f = |t: &[f64; 2]| {
            let val = t[0] * t[0] * q[(0, 0)] + 2.0 * t[0] * t[1] * q[(0, 1)] + t[1] * t[1] * q[(1, 1)];
            (val.max(0.0) / n as f64).sqrt()
        };
        let best = candidates
            .iter()
            .min_by(|x, y| f(x).total_cmp(&f(y)))
            .expect("nonempty");
        let res = f(best);
        let mut v = v;
        v.subcase = Some(if equal { "c1 = c2" } else { "c1 != c2" }.into());
        if res <= tol {
            let rot = Matrix::from_rows(&[vec![best[0], best[1]], vec![-best[1], best[0]]])?;
            return Ok(v
                .with_reparam(&rot, c)
                .decide("rank2(a): JJ~1 = J~1J, JJ~2 = -J~2J", Some(true), res));
        }
        return Ok(v.decide("rank2: not complex Osserman", Some(false), res.min(best_b)));
    }
    if n >= 12 {
        Ok(v.decide("rank2: not complex Osserman", Some(false), best_b))
    } else {
        Ok(v.decide("rank2: undecided (c0 != 0, n < 12)", None, best_b))
    }
}

fn rank_three(
    v: ClassifierVerdict,
    family: &CliffordFamily,
    j: &Matrix,
    c: &[f64],
    c0_zero: bool,
    scale: f64,
    n: usize,
) -> Result<ClassifierVerdict> {
    let tol = CLASSIFIER_TOL;
    let quaternion = family.quaternion_sign(tol);
    let (a, gen_res) = project_onto(family.generators(), j)?;
    let dual = dual_structure(family)?;
    let (b, dual_res) = project_onto(dual.generators(), j)?;
    let in_gen = gen_res <= tol && coefficients_compatible(&a, c, scale);
    let in_dual = dual_res <= tol && coefficients_compatible(&b, c, scale);
    let best = gen_res.min(dual_res);

    if c0_zero {
        if let (Some(_), true) = (quaternion, in_gen) {
            let m = complete_rows(&a, 1.0)?;
            return Ok(v.with_reparam(&m, c).decide("rank3(a): J = J~1", Some(true), gen_res));
        }
        if in_dual {
            // The dual structure transforms by det(A)·A, so row 1 of a
            // rotation A is the dual coordinate vector of J.
            let m = complete_rows(&b, 1.0)?;
            return Ok(v
                .with_reparam(&m, c)
                .decide("rank3(a): J = J~2J~3", Some(true), dual_res));
        }
        return Ok(if n >= 12 {
            v.decide("rank3(a): not complex Osserman", Some(false), best)
        } else {
            v.decide("rank3(a): undecided (n < 12)", None, best)
        });
    }
    if let (Some(s), true) = (quaternion, in_gen) {
        // J̃₁J̃₂J̃₃ = det(A)·J₁J₂J₃ = det(A)·s·id.
        let m = complete_rows(&a, s)?;
        return Ok(v
            .with_reparam(&m, c)
            .decide("rank3(b): J = J~1, J~1J~2J~3 = id", Some(true), gen_res));
    }
    Ok(if n >= 16 {
        v.decide("rank3(b): not complex Osserman", Some(false), best)
    } else {
        v.decide("rank3(b): undecided (n < 16)", None, best)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{generate_family, reparametrize};
    use crate::curvature::CurvatureSpec;
    use crate::linalg::Cluster;
    use crate::osserman::report::{SampleCensus, Verdict};
    use crate::osserman::Provenance;

    fn report(spectrum: Vec<Cluster>, pass: bool) -> VerificationReport {
        VerificationReport {
            check: "complex-osserman".into(),
            verdict: Verdict::from_pass(pass),
            max_deviation: 0.0,
            tolerance: 1e-8,
            effective_tolerance: 1e-8,
            spectrum,
            channels: vec![],
            witnesses: vec![],
            census: SampleCensus::default(),
            seed: 0,
        }
    }

    #[test]
    fn multiplicity_examples() {
        let n = 8;
        let m = |s| classify_multiplicities(&report(s, true), n).unwrap();
        assert_eq!(m(vec![Cluster::new(6.0, n)]), MultiplicityCase::Scalar);
        assert_eq!(
            m(vec![Cluster::new(6.0, n - 4), Cluster::new(12.0, 4)]),
            MultiplicityCase::FourFour
        );
        assert_eq!(
            m(vec![Cluster::new(0.0, n - 2), Cluster::new(1.0, 1), Cluster::new(2.0, 1)]),
            MultiplicityCase::Violation
        );
        assert_eq!(
            m(vec![Cluster::new(2.0, 4), Cluster::new(4.0, 2), Cluster::new(8.0, 2)]),
            MultiplicityCase::FourTwoTwo
        );
        // n ≡ 2 mod 4 admits only the first two patterns.
        let six = vec![Cluster::new(1.0, 2), Cluster::new(2.0, 2), Cluster::new(3.0, 2)];
        assert_eq!(
            classify_multiplicities(&report(six, true), 6).unwrap(),
            MultiplicityCase::Violation
        );
        assert!(classify_multiplicities(&report(vec![Cluster::new(1.0, 8)], false), 8).is_err());
    }

    fn model(_n: usize, c0: f64, family: &CliffordFamily, c: &[f64], j: Matrix) -> ComplexModel {
        let spec = CurvatureSpec::from_family(c0, family, c).unwrap();
        ComplexModel::new(spec, j, Some(Provenance::new(family.clone()))).unwrap()
    }

    #[test]
    fn rank_one_cases() {
        let f = generate_family(8, 1, 1).unwrap();
        let j1 = f.generator(0).clone();
        let v = classify_clifford_model(&model(8, 1.0, &f, &[2.0], j1.clone())).unwrap();
        assert_eq!(v.complex_osserman, Some(true));
        assert!(v.case.starts_with("rank1(b)"));

        // J commuting with J₁ but J ≠ ±J₁: J₁ on one half, −J₁ on the other.
        let g = crate::clifford::canonical_family(8, 1).unwrap();
        let g1 = g.generator(0);
        let flip = Matrix::diag(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
        let split = g1 * &flip;
        let v = classify_clifford_model(&model(8, 1.0, &g, &[1.0], split.clone())).unwrap();
        assert_eq!(v.complex_osserman, Some(false));
        let v = classify_clifford_model(&model(8, 0.0, &g, &[1.0], split)).unwrap();
        assert_eq!(v.case, "rank1(a): JJ1 = J1J");
    }

    #[test]
    fn rank_two_reparametrized_span() {
        let f = generate_family(8, 2, 3).unwrap();
        let t = 0.7_f64;
        let j = f.combination(&[t.cos(), t.sin()]);
        let v = classify_clifford_model(&model(8, 1.0, &f, &[1.5, 1.5], j.clone())).unwrap();
        assert_eq!(v.case, "rank2(b): J = J~1");
        let a = Matrix::from_rows(&v.reparametrization.unwrap()).unwrap();
        let g = reparametrize(&f, &a).unwrap();
        assert!(g.generator(0).max_abs_diff(&j) < 1e-10);
        // Unequal coefficients forbid the rotation.
        let v = classify_clifford_model(&model(12, 1.0, &f_at(12), &[1.0, 2.0], j_at(12, t))).unwrap();
        assert_eq!(v.complex_osserman, Some(false));
    }

    fn f_at(n: usize) -> CliffordFamily {
        generate_family(n, 2, 3).unwrap()
    }

    fn j_at(n: usize, t: f64) -> Matrix {
        f_at(n).combination(&[t.cos(), t.sin()])
    }

    #[test]
    fn rank_three_quaternion() {
        let f = generate_family(16, 3, 5).unwrap();
        let j = f.generator(0).clone();
        let v = classify_clifford_model(&model(16, 1.0, &f, &[1.0, 2.0, 3.0], j)).unwrap();
        assert_eq!(v.case, "rank3(b): J = J~1, J~1J~2J~3 = id");
        let a = Matrix::from_rows(&v.reparametrization.unwrap()).unwrap();
        let g = reparametrize(&f, &a).unwrap();
        assert!(g.volume_element().unwrap().max_abs_diff(&Matrix::identity(16)) < 1e-10);
        assert!(g.generator(0).max_abs_diff(f.generator(0)) < 1e-10);
    }

    #[test]
    fn completion_respects_classes() {
        let c = [1.0, 1.0, 2.0];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = complete_rows(&[s, s, 0.0], 1.0).unwrap();
        assert!(a.orthogonality_residual() < 1e-12);
        assert!((a.determinant().unwrap() - 1.0).abs() < 1e-12);
        let r = reparam_coefficients(&a, &c);
        assert!(r.iter().zip([1.0, 1.0, 2.0]).all(|(x, y)| (x - y).abs() < 1e-12));
        let a = complete_rows(&[0.0, 0.0, -1.0], -1.0).unwrap();
        assert!((a.determinant().unwrap() + 1.0).abs() < 1e-12);
        let r = reparam_coefficients(&a, &c);
        assert!((r[0] - 2.0).abs() < 1e-12);
    }
}
