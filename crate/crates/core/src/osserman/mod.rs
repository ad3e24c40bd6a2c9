//! Verification engines for the Osserman family of curvature conditions and
//! the closed-form classifier for low-rank Clifford models.

mod checks;
mod classify;
mod report;
mod sampler;

pub use checks::{
    check_compatibility, check_complex_osserman, check_einstein, check_osserman, check_p_osserman,
    check_symmetries,
    VerifyOptions, DEFAULT_SPECTRUM_TOL,
};
pub use classify::{
    classify_clifford_model, classify_multiplicities, ClassifierVerdict, MultiplicityCase,
    CLASSIFIER_TOL,
};
pub use report::{spectrum_matches, Channel, SampleCensus, Verdict, VerificationReport, Witness};
pub use sampler::{isotropic_probe, PlaneSampler, Sample, DEFAULT_SAMPLE_COUNT};

use crate::clifford::CliffordFamily;
use crate::curvature::{ensure_complex_structure, CurvatureSpec, STRUCTURE_TOL};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Clifford family a model was built from, with the reparametrization
/// applied to the canonical generators if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub family: CliffordFamily,
    pub reparam: Option<Matrix>,
}

impl Provenance {
    pub fn new(family: CliffordFamily) -> Self {
        Provenance {
            family,
            reparam: None,
        }
    }
}

/// Curvature tensor together with a Hermitian almost complex structure J.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexModel {
    spec: CurvatureSpec,
    j: Matrix,
    provenance: Option<Provenance>,
}

impl ComplexModel {
    pub fn new(spec: CurvatureSpec, j: Matrix, provenance: Option<Provenance>) -> Result<Self> {
        let n = spec.dim();
        if n % 2 != 0 {
            return Err(Error::InvalidDimension {
                n,
                reason: "a complex structure needs even dimension".into(),
            });
        }
        ensure_complex_structure("J", &j, n)?;
        if let Some(p) = &provenance {
            if p.family.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.family.dim(),
                });
            }
            let report = p.family.verify(STRUCTURE_TOL);
            if !report.pass {
                return Err(Error::Model(format!(
                    "provenance family is not a Clifford family: {:?}",
                    report.violations
                )));
            }
        }
        Ok(ComplexModel { spec, j, provenance })
    }

    pub fn spec(&self) -> &CurvatureSpec {
        &self.spec
    }

    pub fn j(&self) -> &Matrix {
        &self.j
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn family(&self) -> Option<&CliffordFamily> {
        self.provenance.as_ref().map(|p| &p.family)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Complex Jacobi operator 𝒥_R(π_x).
    pub fn complex_jacobi(&self, x: &[f64]) -> Result<Matrix> {
        self.spec.complex_jacobi_trusted(&self.j, x)
    }

    /// Whether the curvature terms are exactly c₀R₀ + Σ cᵢR_{Jᵢ} over the
    /// provenance generators, in order.
    pub fn is_family_generated(&self) -> bool {
        let Some(family) = self.family() else {
            return false;
        };
        let terms = self.spec.terms();
        terms.len() == family.rank()
            && terms
                .iter()
                .zip(family.generators())
                .all(|(t, g)| t.psi.max_abs_diff(g) <= STRUCTURE_TOL)
    }
}
