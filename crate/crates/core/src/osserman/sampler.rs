use crate::clifford::CliffordFamily;
use crate::curvature::Frame;
use crate::error::Result;
use crate::linalg::{psd_pseudoinverse, random_frame, random_unit, symmetric_eigen, Matrix, SeededRng, Vector};

use super::ComplexModel;

pub const DEFAULT_SAMPLE_COUNT: usize = 64;

/// Cap on the number of involutions whose eigenvectors become probes.
const MAX_PROBE_WORDS: usize = 16;

/// Families of rank 4..=7 get isotropic probes for their 3- and 4-words.
const ISOTROPIC_RANKS: std::ops::RangeInclusive<usize> = 4..=7;

const INVOLUTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub label: String,
    pub vector: Vector,
    pub probe: bool,
}

impl Sample {
    fn probe(label: String, vector: Vector) -> Self {
        Sample {
            label,
            vector,
            probe: true,
        }
    }
}

/// Deterministic set of unit vectors (or p-frames) at which operators are
/// evaluated: structured probes first, then `count` seeded random samples.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSampler {
    pub seed: u64,
    pub count: usize,
    /// Include basis, pair and family-adapted probes.
    pub structured: bool,
    family: Option<CliffordFamily>,
    j: Option<Matrix>,
}

impl PlaneSampler {
    pub fn new(seed: u64, count: usize) -> Self {
        PlaneSampler {
            seed,
            count,
            structured: true,
            family: None,
            j: None,
        }
    }

    /// Random samples only.
    pub fn random_only(seed: u64, count: usize) -> Self {
        PlaneSampler {
            structured: false,
            ..Self::new(seed, count)
        }
    }

    /// Sampler whose probes are adapted to the model's J and provenance family.
    pub fn for_model(model: &ComplexModel, seed: u64, count: usize) -> Self {
        PlaneSampler {
            family: model.family().cloned(),
            j: Some(model.j().clone()),
            ..Self::new(seed, count)
        }
    }

    pub fn with_family(mut self, family: CliffordFamily) -> Self {
        self.family = Some(family);
        self
    }

    pub fn points(&self, n: usize) -> Result<Vec<Sample>> {
        let mut out = if self.structured { self.probes(n)? } else { Vec::new() };
        let mut rng = SeededRng::new(self.seed);
        for i in 0..self.count {
            out.push(Sample {
                label: format!("random[{i}]"),
                vector: random_unit(n, &mut rng)?,
                probe: false,
            });
        }
        Ok(out)
    }

    /// Orthonormal p-frames: a few coordinate frames, then random ones.
    pub fn frames(&self, n: usize, p: usize) -> Result<Vec<(String, Frame, bool)>> {
        let mut out = Vec::new();
        if self.structured {
            for start in [0, n - p] {
                let vectors = (start..start + p).map(|i| Vector::basis(n, i)).collect();
                out.push((format!("coordinate[{start}..{}]", start + p), Frame::new(vectors)?, true));
            }
        }
        let mut rng = SeededRng::new(self.seed);
        for i in 0..self.count {
            out.push((format!("random[{i}]"), Frame::new(random_frame(n, p, &mut rng)?)?, false));
        }
        Ok(out)
    }

    fn probes(&self, n: usize) -> Result<Vec<Sample>> {
        let mut out = Vec::new();
        for i in 0..n {
            out.push(Sample::probe(format!("e[{i}]"), Vector::basis(n, i)));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n.saturating_sub(1) {
            out.push(Sample::probe(format!("pair[{i},{}]", i + 1), pair(n, i, i + 1, s)));
        }
        if n >= 4 {
            let h = n / 2;
            for i in 0..h {
                out.push(Sample::probe(format!("pair[{i},{}]", i + h), pair(n, i, i + h, s)));
            }
        }
        if let Some(family) = &self.family {
            out.extend(self.family_probes(family)?);
        }
        Ok(out)
    }

    fn family_probes(&self, family: &CliffordFamily) -> Result<Vec<Sample>> {
        let n = family.dim();
        let kappa = family.rank();
        let mut involutions: Vec<(String, Matrix)> = Vec::new();
        if let Some(j) = &self.j {
            for (i, g) in family.generators().iter().enumerate() {
                let m = j * g;
                if is_symmetric_involution(&m) {
                    involutions.push((format!("J*J{}", i + 1), m));
                }
            }
        }
        for len in [3, 4] {
            for word in words_of_length(kappa, len) {
                involutions.push((word_name(&word), family.word(&word)));
            }
        }
        involutions.truncate(MAX_PROBE_WORDS);

        let mut out = Vec::new();
        for (name, w) in &involutions {
            let spec = symmetric_eigen(w, 1e-8)?;
            let lo = spec.eigenvalues[0];
            let hi = spec.eigenvalues[n - 1];
            let minus = ((lo + 1.0).abs() < 1e-8).then(|| spec.eigenvector(0));
            let plus = ((hi - 1.0).abs() < 1e-8).then(|| spec.eigenvector(n - 1));
            if let Some(v) = &plus {
                out.push(Sample::probe(format!("fixed+[{name}]"), v.clone()));
            }
            if let Some(v) = &minus {
                out.push(Sample::probe(format!("fixed-[{name}]"), v.clone()));
            }
            if let (Some(p), Some(m)) = (&plus, &minus) {
                let mix = (p + m).scaled(std::f64::consts::FRAC_1_SQRT_2);
                out.push(Sample::probe(format!("mixed[{name}]"), mix));
            }
        }

        if ISOTROPIC_RANKS.contains(&kappa) {
            let fours: Vec<Matrix> = words_of_length(kappa, 4).iter().map(|w| family.word(w)).collect();
            let threes: Vec<Matrix> = words_of_length(kappa, 3).iter().map(|w| family.word(w)).collect();
            let seed = self.seed ^ 0x005e_ed0f_1507;
            if let Some(x) = isotropic_probe(&fours, n, seed) {
                out.push(Sample::probe("isotropic[4-words]".into(), x));
            }
            let both: Vec<Matrix> = threes.into_iter().chain(fours).collect();
            if let Some(x) = isotropic_probe(&both, n, seed.wrapping_add(1)) {
                out.push(Sample::probe("isotropic[3,4-words]".into(), x));
            }
        }
        Ok(out)
    }
}

fn pair(n: usize, i: usize, j: usize, s: f64) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = s;
    v[j] = s;
    v
}

fn is_symmetric_involution(m: &Matrix) -> bool {
    m.symmetry_residual() <= INVOLUTION_TOL
        && (m * m).max_abs_diff(&Matrix::identity(m.rows())) <= INVOLUTION_TOL
}

/// Increasing index tuples of the given length drawn from `0..kappa`.
pub(crate) fn words_of_length(kappa: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, kappa: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..kappa {
            cur.push(i);
            rec(i + 1, kappa, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, kappa, len, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn word_name(word: &[usize]) -> String {
    word.iter().map(|i| format!("J{}", i + 1)).collect()
}

/// Unit vector x with ⟨x, Qx⟩ = 0 for every symmetric `Q`, found by
/// Gauss–Newton with minimum-norm steps from seeded starting points.
pub fn isotropic_probe(quadrics: &[Matrix], n: usize, seed: u64) -> Option<Vector> {
    const ATTEMPTS: usize = 4;
    const ITERATIONS: usize = 60;
    const ACCEPT: f64 = 1e-12;
    if quadrics.len() + 1 >= n {
        return None;
    }
    let mut rng = SeededRng::new(seed);
    for _ in 0..ATTEMPTS {
        let mut x = random_unit(n, &mut rng).ok()?;
        for _ in 0..ITERATIONS {
            let grads: Vec<Vector> = quadrics.iter().map(|q| q.mul_vec(&x).expect("square")).collect();
            let r: Vec<f64> = grads.iter().map(|g| x.dot(g)).collect();
            let worst = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if worst < ACCEPT * 1e-2 {
                break;
            }
            // Rows of the Jacobian are 2Qx; the unit constraint is enforced by
            // renormalizing after each step.
            let m = grads.len();
            let gram = Matrix::from_fn(m, m, |a, b| 4.0 * grads[a].dot(&grads[b]));
            let pinv = psd_pseudoinverse(&gram, 1e-12).ok()?;
            let coeffs = pinv.mul_vec(&r).ok()?;
            let mut step = Vector::zeros(n);
            for (c, g) in coeffs.iter().zip(&grads) {
                step = step.axpy(-2.0 * c, g);
            }
            x = (&x + &step).normalized().ok()?;
        }
        let worst = quadrics
            .iter()
            .map(|q| x.dot(&q.mul_vec(&x).expect("square")).abs())
            .fold(0.0_f64, f64::max);
        if worst < ACCEPT {
            return Some(x);
        }
    }
    None
}
