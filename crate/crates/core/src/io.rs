//! JSON documents for models and verification reports.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clifford::CliffordFamily;
use crate::curvature::{CurvatureSpec, CurvatureTerm};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, RNG_NAME};
use crate::osserman::{
    check_compatibility, check_complex_osserman, check_einstein, check_osserman, check_p_osserman,
    check_symmetries, classify_clifford_model, classify_multiplicities, ClassifierVerdict,
    ComplexModel, Provenance, VerificationReport, VerifyOptions,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermFile {
    pub c: f64,
    pub psi: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceFile {
    pub rank: usize,
    pub generators: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reparam: Option<Vec<Vec<f64>>>,
}

/// Serialized [`ComplexModel`]. Matrices are nested row-major arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub seed: u64,
    pub rng: String,
    pub c0: f64,
    pub terms: Vec<TermFile>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceFile>,
}

impl ModelFile {
    pub fn from_model(model: &ComplexModel, name: Option<&str>, seed: u64) -> Self {
        let spec = model.spec();
        ModelFile {
            version: FORMAT_VERSION,
            name: name.map(str::to_owned),
            dim: spec.dim(),
            seed,
            rng: RNG_NAME.into(),
            c0: spec.c0(),
            terms: spec
                .terms()
                .iter()
                .map(|t| TermFile {
                    c: t.coeff,
                    psi: t.psi.to_rows(),
                })
                .collect(),
            j: model.j().to_rows(),
            provenance: model.provenance().map(|p| ProvenanceFile {
                rank: p.family.rank(),
                generators: p.family.generators().iter().map(Matrix::to_rows).collect(),
                reparam: p.reparam.as_ref().map(Matrix::to_rows),
            }),
        }
    }

    /// Rebuilds the model, re-validating every matrix invariant.
    pub fn to_model(&self) -> Result<ComplexModel> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported model version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        let n = self.dim;
        let square = |rows: &[Vec<f64>], what: &str| -> Result<Matrix> {
            let m = Matrix::from_rows(rows).map_err(|e| Error::Model(format!("{what}: {e}")))?;
            if m.shape() != (n, n) {
                return Err(Error::Model(format!(
                    "{what}: expected {n}x{n}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            Ok(m)
        };
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| Ok(CurvatureTerm::new(t.c, square(&t.psi, &format!("terms[{i}].psi"))?)))
            .collect::<Result<Vec<_>>>()?;
        let spec = CurvatureSpec::new(n, self.c0, terms)?;
        let j = square(&self.j, "J")?;
        let provenance = match &self.provenance {
            None => None,
            Some(p) => {
                if p.generators.len() != p.rank {
                    return Err(Error::Model(format!(
                        "provenance rank {} but {} generators",
                        p.rank,
                        p.generators.len()
                    )));
                }
                let gens = p
                    .generators
                    .iter()
                    .enumerate()
                    .map(|(i, g)| square(g, &format!("provenance.generators[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let family = CliffordFamily::new(n, gens)?;
                let reparam = match &p.reparam {
                    None => None,
                    Some(rows) => {
                        let a = Matrix::from_rows(rows)?;
                        if a.orthogonality_residual() > 1e-10 {
                            return Err(Error::NotOrthogonal {
                                residual: a.orthogonality_residual(),
                            });
                        }
                        Some(a)
                    }
                };
                Some(Provenance { family, reparam })
            }
        };
        ComplexModel::new(spec, j, provenance)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Hex SHA-256 of the compact JSON encoding.
    pub fn digest(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self).map_err(|e| Error::Serialization(e.to_string()))?;
        Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Output of a verification or classification command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub command: String,
    pub model_digest: String,
    #[serde(flatten)]
    pub report: VerificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity_case: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassifierVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
}

impl ReportFile {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Condition checked by [`verify_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Osserman,
    POsserman(usize),
    ComplexOsserman,
    Einstein,
    Compat,
    Symmetries,
}

impl Check {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "osserman" => Check::Osserman,
            "complex-osserman" => Check::ComplexOsserman,
            "einstein" => Check::Einstein,
            "compat" => Check::Compat,
            "symmetries" => Check::Symmetries,
            other => match other.strip_prefix("p-osserman:") {
                Some(p) => Check::POsserman(p.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad p in '{other}'"))
                })?),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown check '{other}'; expected osserman, p-osserman:<p>, \
                         complex-osserman, einstein, compat or symmetries"
                    )))
                }
            },
        })
    }

    pub fn name(self) -> String {
        match self {
            Check::Osserman => "osserman".into(),
            Check::POsserman(p) => format!("p-osserman:{p}"),
            Check::ComplexOsserman => "complex-osserman".into(),
            Check::Einstein => "einstein".into(),
            Check::Compat => "compat".into(),
            Check::Symmetries => "symmetries".into(),
        }
    }
}

pub fn run_check(model: &ComplexModel, check: Check, opts: &VerifyOptions) -> Result<VerificationReport> {
    let spec = model.spec();
    let sampler = opts.sampler_for(model);
    match check {
        Check::Osserman => check_osserman(spec, &sampler, opts.tol),
        Check::POsserman(p) => check_p_osserman(spec, p, &sampler, opts.tol),
        Check::ComplexOsserman => check_complex_osserman(model, &sampler, opts.tol),
        Check::Einstein => check_einstein(spec, opts.tol),
        Check::Compat => check_compatibility(model, &sampler, opts.tol),
        Check::Symmetries => check_symmetries(spec, opts.tol),
    }
}

/// Runs `check` on the model stored in `file` and wraps the result.
pub fn verify_model(file: &ModelFile, check: Check, opts: &VerifyOptions) -> Result<ReportFile> {
    let model = file.to_model()?;
    let mut report = run_check(&model, check, opts)?;
    report.seed = opts.seed;
    let multiplicity_case = if check == Check::ComplexOsserman && report.passed() {
        Some(classify_multiplicities(&report, model.dim())?.label().to_owned())
    } else {
        None
    };
    Ok(ReportFile {
        version: FORMAT_VERSION,
        command: format!("verify {}", check.name()),
        model_digest: file.digest()?,
        report,
        multiplicity_case,
        classification: None,
        agreement: None,
    })
}

/// Closed-form classification cross-checked against the sampling verifier.
/// `agreement` is `None` when the classifier abstains.
pub fn classify_model(file: &ModelFile, opts: &VerifyOptions) -> Result<ReportFile> {
    let model = file.to_model()?;
    let verdict = classify_clifford_model(&model)?;
    let mut out = verify_model(file, Check::ComplexOsserman, opts)?;
    out.command = "classify".into();
    out.agreement = verdict.complex_osserman.map(|c| c == out.report.passed());
    out.classification = Some(verdict);
    Ok(out)
}
