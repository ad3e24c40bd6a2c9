//! Named model constructions with their expected verdicts and spectra.

use crate::clifford::{canonical_family, generate_family, split_rank3_family, CliffordFamily};
use crate::curvature::{CurvatureSpec, CurvatureTerm};
use crate::error::{Error, Result};
use crate::linalg::{Cluster, Matrix, Vector};
use crate::osserman::{ComplexModel, Provenance};

/// Names accepted by [`catalog_entry`].
pub const CATALOG_NAMES: &[&str] = &[
    "constant",
    "complex-space-form",
    "quaternionic",
    "remark35-a",
    "remark35-b",
    "remark35-c",
    "remark35-d",
    "thm36",
    "rank1-split",
];

/// Expected outcome of the verification engines on a catalog model.
#[derive(Clone, Debug, PartialEq)]
pub struct Expected {
    /// `None` when no closed-form answer is recorded.
    pub complex_osserman: Option<bool>,
    pub osserman: Option<bool>,
    /// Spectrum of the complex Jacobi operator, after merging equal values.
    pub spectrum: Option<Vec<Cluster>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<f64>,
    pub seed: u64,
    pub model: ComplexModel,
    pub expected: Expected,
}

/// Choice of complex structure for [`rank_k_generic`].
#[derive(Clone, Debug, PartialEq)]
pub enum JChoice {
    J1,
    J1J2,
    Custom(Matrix),
}

/// Sorted clusters with equal values merged and empty ones dropped.
pub fn merge_clusters(parts: &[(f64, usize)]) -> Vec<Cluster> {
    let scale = parts.iter().fold(1.0_f64, |m, p| m.max(p.0.abs()));
    let mut sorted: Vec<(f64, usize)> = parts.iter().copied().filter(|p| p.1 > 0).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Cluster> = Vec::new();
    for (value, mult) in sorted {
        match out.last_mut() {
            Some(last) if (last.value - value).abs() <= 1e-12 * scale => last.multiplicity += mult,
            _ => out.push(Cluster::new(value, mult)),
        }
    }
    out
}

fn ensure_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidDimension {
            n,
            reason: "needs a positive even dimension".into(),
        });
    }
    Ok(())
}

fn ensure_quaternionic(n: usize) -> Result<()> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::InvalidDimension {
            n,
            reason: "needs a dimension divisible by 4".into(),
        });
    }
    Ok(())
}

fn family_model(c0: f64, family: &CliffordFamily, coeffs: &[f64], j: Matrix) -> Result<ComplexModel> {
    let spec = CurvatureSpec::from_family(c0, family, coeffs)?;
    ComplexModel::new(spec, j, Some(Provenance::new(family.clone())))
}

/// R = c₀R₀ with a seeded complex structure.
pub fn constant_curvature(n: usize, c0: f64, seed: u64) -> Result<CatalogEntry> {
    ensure_even(n)?;
    let j = generate_family(n, 1, seed)?.generator(0).clone();
    let model = ComplexModel::new(CurvatureSpec::constant(n, c0)?, j, None)?;
    Ok(CatalogEntry {
        name: "constant".into(),
        params: vec![c0],
        seed,
        model,
        expected: Expected {
            complex_osserman: Some(true),
            osserman: Some(true),
            spectrum: Some(merge_clusters(&[(c0, 2), (2.0 * c0, n - 2)])),
        },
    })
}

/// R = c₀R₀ + c₁R_J with J the same structure.
pub fn complex_space_form(n: usize, c0: f64, c1: f64, seed: u64) -> Result<CatalogEntry> {
    ensure_even(n)?;
    let family = generate_family(n, 1, seed)?;
    let model = family_model(c0, &family, &[c1], family.generator(0).clone())?;
    Ok(CatalogEntry {
        name: "complex-space-form".into(),
        params: vec![c0, c1],
        seed,
        model,
        expected: Expected {
            complex_osserman: Some(true),
            osserman: Some(true),
            spectrum: Some(merge_clusters(&[(c0 + 3.0 * c1, 2), (2.0 * c0, n - 2)])),
        },
    })
}

/// R = c₀R₀ + Σ cᵢR_{Jᵢ} over a quaternion structure, J = J₁.
pub fn quaternionic_model(n: usize, c0: f64, c: [f64; 3], seed: u64) -> Result<CatalogEntry> {
    ensure_quaternionic(n)?;
    let family = generate_family(n, 3, seed)?;
    let model = family_model(c0, &family, &c, family.generator(0).clone())?;
    Ok(CatalogEntry {
        name: "quaternionic".into(),
        params: vec![c0, c[0], c[1], c[2]],
        seed,
        model,
        expected: Expected {
            complex_osserman: Some(true),
            osserman: Some(true),
            spectrum: Some(merge_clusters(&[
                (c0 + 3.0 * c[0], 2),
                (2.0 * c0 + 3.0 * c[1] + 3.0 * c[2], 2),
                (2.0 * c0, n - 4),
            ])),
        },
    })
}

/// The four multiplicity patterns realized by explicit models: `variant`
/// is one of 'a' (3R₀ + R_J), 'b' (R₀ + R_J), 'c' (3R₀ + 3R_{J₁} + R_{J₂} + R_{J₃})
/// and 'd' (R₀ + R_{J₁} + R_{J₂} + R_{J₃}).
pub fn remark35(n: usize, variant: char, seed: u64) -> Result<CatalogEntry> {
    let mut entry = match variant {
        'a' => complex_space_form(n, 3.0, 1.0, seed)?,
        'b' => complex_space_form(n, 1.0, 1.0, seed)?,
        'c' => quaternionic_model(n, 3.0, [3.0, 1.0, 1.0], seed)?,
        'd' => quaternionic_model(n, 1.0, [1.0, 1.0, 1.0], seed)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown variant '{other}', expected a, b, c or d"
            )))
        }
    };
    entry.name = format!("remark35-{variant}");
    Ok(entry)
}

/// Number of quaternion blocks in V₊ for the split model in dimension `n`.
fn thm36_plus_blocks(n: usize) -> usize {
    n / 8
}

/// Complex Osserman model that is neither Osserman nor Clifford generated:
/// R = R_{J₂} − R_{J₁J₂} − R_{J₃} + R_{J₁J₃} with J = J₁ over a rank-3 family
/// with J₁J₂J₃ = ±id on V±.
pub fn thm36_model(n: usize) -> Result<CatalogEntry> {
    if n % 4 != 0 || n < 8 {
        return Err(Error::InvalidDimension {
            n,
            reason: "needs n divisible by 4 and at least 8".into(),
        });
    }
    let family = split_rank3_family(n, thm36_plus_blocks(n))?;
    let (j1, j2, j3) = (family.generator(0), family.generator(1), family.generator(2));
    let terms = vec![
        CurvatureTerm::new(1.0, j2.clone()),
        CurvatureTerm::new(-1.0, j1 * j2),
        CurvatureTerm::new(-1.0, j3.clone()),
        CurvatureTerm::new(1.0, j1 * j3),
    ];
    let spec = CurvatureSpec::new(n, 0.0, terms)?;
    let model = ComplexModel::new(spec, j1.clone(), Some(Provenance::new(family)))?;
    Ok(CatalogEntry {
        name: "thm36".into(),
        params: vec![],
        seed: 0,
        model,
        expected: Expected {
            complex_osserman: Some(true),
            osserman: Some(false),
            spectrum: Some(vec![Cluster::new(0.0, n)]),
        },
    })
}

/// Unit vectors x₊ ∈ V₊, x₋ ∈ V₋ and x₀ = (x₊ + x₋)/√2 for [`thm36_model`].
pub fn thm36_probes(n: usize) -> Result<[Vector; 3]> {
    if n % 4 != 0 || n < 8 {
        return Err(Error::InvalidDimension {
            n,
            reason: "needs n divisible by 4 and at least 8".into(),
        });
    }
    let plus = Vector::basis(n, 0);
    let minus = Vector::basis(n, 4 * thm36_plus_blocks(n));
    let mixed = (&plus + &minus).scaled(std::f64::consts::FRAC_1_SQRT_2);
    Ok([plus, minus, mixed])
}

/// R = c₀R₀ + c₁R_{J₁} with J = ±J₁ on complementary J₁-invariant halves,
/// so J commutes with J₁ but J ≠ ±J₁.
pub fn rank1_split(n: usize, c0: f64, c1: f64) -> Result<CatalogEntry> {
    ensure_even(n)?;
    if n < 4 {
        return Err(Error::InvalidDimension {
            n,
            reason: "needs two invariant planes".into(),
        });
    }
    let family = canonical_family(n, 1)?;
    let blocks = n / 2;
    let signs: Vec<f64> = (0..n)
        .map(|i| if i / 2 < blocks.div_ceil(2) { 1.0 } else { -1.0 })
        .collect();
    let j = family.generator(0) * &Matrix::diag(&signs);
    let model = family_model(c0, &family, &[c1], j)?;
    let c0_zero = c0 == 0.0;
    Ok(CatalogEntry {
        name: "rank1-split".into(),
        params: vec![c0, c1],
        seed: 0,
        model,
        expected: Expected {
            complex_osserman: Some(c0_zero),
            osserman: Some(true),
            spectrum: None,
        },
    })
}

/// Whether the dimension hypotheses under which rank κ ≥ 4 models are never
/// complex Osserman hold.
pub fn high_rank_hypotheses(n: usize, kappa: usize, c0_zero: bool) -> bool {
    let pow = |k: usize| 1usize.checked_shl(k as u32).unwrap_or(usize::MAX);
    match (kappa, c0_zero) {
        (0..=3, _) => false,
        (4 | 5, true) => n >= pow(kappa),
        (_, true) => n >= kappa * (kappa - 1),
        (4, false) => n >= 32,
        (5..=7, false) => n >= pow(kappa),
        (_, false) => n >= kappa * (kappa - 1),
    }
}

/// R = c₀R₀ + Σ cᵢR_{Jᵢ} over a seeded family of rank κ with the chosen J.
pub fn rank_k_generic(
    n: usize,
    kappa: usize,
    j_choice: JChoice,
    c0: f64,
    coeffs: &[f64],
    seed: u64,
) -> Result<CatalogEntry> {
    let family = generate_family(n, kappa, seed)?;
    let j = match j_choice {
        JChoice::J1 => family.generator(0).clone(),
        JChoice::J1J2 => {
            if kappa < 2 {
                return Err(Error::InvalidArgument("J = J1J2 needs rank at least 2".into()));
            }
            family.word(&[0, 1])
        }
        JChoice::Custom(m) => m,
    };
    let model = family_model(c0, &family, coeffs, j)?;
    let never = high_rank_hypotheses(n, kappa, c0 == 0.0);
    let mut params = vec![c0];
    params.extend_from_slice(coeffs);
    Ok(CatalogEntry {
        name: format!("rank{kappa}"),
        params,
        seed,
        model,
        expected: Expected {
            complex_osserman: never.then_some(false),
            osserman: Some(true),
            spectrum: None,
        },
    })
}

/// Looks up a catalog model by name. `coeffs` overrides the default
/// parameters where the model has any.
pub fn catalog_entry(name: &str, n: usize, coeffs: Option<&[f64]>, seed: u64) -> Result<CatalogEntry> {
    let pick = |default: &[f64]| -> Result<Vec<f64>> {
        match coeffs {
            None => Ok(default.to_vec()),
            Some(c) if c.len() == default.len() => Ok(c.to_vec()),
            Some(c) => Err(Error::InvalidArgument(format!(
                "{name} takes {} coefficients, got {}",
                default.len(),
                c.len()
            ))),
        }
    };
    match name {
        "constant" => constant_curvature(n, pick(&[1.0])?[0], seed),
        "complex-space-form" => {
            let c = pick(&[1.0, 1.0])?;
            complex_space_form(n, c[0], c[1], seed)
        }
        "quaternionic" => {
            let c = pick(&[1.0, 1.0, 1.0, 1.0])?;
            quaternionic_model(n, c[0], [c[1], c[2], c[3]], seed)
        }
        "remark35-a" | "remark35-b" | "remark35-c" | "remark35-d" => {
            pick(&[])?;
            remark35(n, name.chars().last().expect("nonempty"), seed)
        }
        "thm36" => {
            pick(&[])?;
            thm36_model(n)
        }
        "rank1-split" => {
            let c = pick(&[1.0, 1.0])?;
            rank1_split(n, c[0], c[1])
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown catalog model '{other}'; known: {}",
            CATALOG_NAMES.join(", ")
        ))),
    }
}
