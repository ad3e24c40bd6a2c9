use serde::{Deserialize, Serialize};

use crate::linalg::Cluster;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One sample whose spectrum is reported, either as the representative of a
/// spectrum class or as the location of a residual violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub sample_index: usize,
    pub vector: Vec<f64>,
    pub spectrum: Vec<Cluster>,
    /// Largest eigenvalue deviation from the reference spectrum.
    pub deviation: f64,
    pub reason: String,
}

/// Largest residual of one independent test channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Channel {
    pub fn new(name: &str, max_residual: f64, tolerance: f64) -> Self {
        Channel {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleCensus {
    pub random: usize,
    pub probes: usize,
    pub total: usize,
    /// Number of distinct clustered spectra seen.
    pub spectrum_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub verdict: Verdict,
    /// Largest spectrum deviation from the reference over all samples.
    pub max_deviation: f64,
    /// Relative tolerance requested by the caller.
    pub tolerance: f64,
    /// Absolute tolerance the deviations were compared against.
    pub effective_tolerance: f64,
    pub spectrum: Vec<Cluster>,
    pub channels: Vec<Channel>,
    pub witnesses: Vec<Witness>,
    pub census: SampleCensus,
    pub seed: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn channel(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    /// Witness spectra as lists of (value, multiplicity) pairs.
    pub fn witness_spectra(&self) -> Vec<Vec<(f64, usize)>> {
        self.witnesses
            .iter()
            .map(|w| w.spectrum.iter().map(|c| (c.value, c.multiplicity)).collect())
            .collect()
    }
}

/// Whether two clustered spectra have the same multiplicities and values
/// within `tol`, irrespective of order.
pub fn spectrum_matches(actual: &[Cluster], expected: &[Cluster], tol: f64) -> bool {
    let sorted = |s: &[Cluster]| {
        let mut v = s.to_vec();
        v.sort_by(|a, b| a.value.total_cmp(&b.value));
        v
    };
    let (a, e) = (sorted(actual), sorted(expected));
    a.len() == e.len()
        && a.iter()
            .zip(&e)
            .all(|(x, y)| x.multiplicity == y.multiplicity && (x.value - y.value).abs() <= tol)
}
