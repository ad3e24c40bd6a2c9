use rayon::prelude::*;

use crate::curvature::{CurvatureSpec, Frame};
use crate::error::{Error, Result};
use crate::linalg::{
    cluster_spectrum, commutator_norm, random_unit, symmetric_eigen, Cluster, Matrix, SeededRng,
    CLUSTER_GAP_REL,
};

use super::report::{Channel, SampleCensus, Verdict, VerificationReport, Witness};
use super::sampler::PlaneSampler;
use super::ComplexModel;

/// Relative tolerance for spectrum equality across samples.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-8;

/// Witnesses kept per report, one per distinct spectrum class.
const MAX_WITNESSES: usize = 8;

/// Common settings for the sampling checks.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            samples: super::DEFAULT_SAMPLE_COUNT,
            tol: DEFAULT_SPECTRUM_TOL,
        }
    }
}

const SYM_TOL: f64 = 1e-9;

struct Point {
    label: String,
    vector: Vec<f64>,
    probe: bool,
}

/// Per-sample data computed in parallel.
struct Evaluated {
    eigenvalues: Vec<f64>,
    commutator: f64,
}

/// Largest possible |R(x,y,z,t)| on unit vectors, up to a constant.
fn curvature_bound(spec: &CurvatureSpec) -> f64 {
    2.0 * spec.c0().abs() + 4.0 * spec.terms().iter().map(|t| t.coeff.abs()).sum::<f64>()
}

fn eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(m, SYM_TOL)?.eigenvalues)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn same_class(a: &[f64], b: &[f64], ca: &[Cluster], cb: &[Cluster], tol: f64) -> bool {
    ca.len() == cb.len()
        && ca.iter().zip(cb).all(|(p, q)| p.multiplicity == q.multiplicity)
        && max_diff(a, b) <= tol
}

/// Compares the spectra of all samples with the first one and groups them
/// into classes. `commutator_channel` names the optional [𝒥, J] channel.
fn sweep(
    check: &str,
    points: Vec<Point>,
    evaluated: Vec<Evaluated>,
    tol: f64,
    seed: u64,
    commutator_channel: Option<&str>,
) -> VerificationReport {
    let census_random = points.iter().filter(|p| !p.probe).count();
    let census_probes = points.len() - census_random;
    if points.is_empty() {
        return VerificationReport {
            check: check.into(),
            verdict: Verdict::Pass,
            max_deviation: 0.0,
            tolerance: tol,
            effective_tolerance: 0.0,
            spectrum: vec![],
            channels: vec![],
            witnesses: vec![],
            census: SampleCensus::default(),
            seed,
        };
    }
    let reference = &evaluated[0].eigenvalues;
    let radius = reference.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let eff = tol * (1.0 + radius);
    let gap = CLUSTER_GAP_REL * (1.0 + radius);
    let clusters: Vec<Vec<Cluster>> = evaluated
        .iter()
        .map(|e| cluster_spectrum(&e.eigenvalues, gap))
        .collect();

    let mut classes: Vec<usize> = Vec::new();
    let mut max_dev = 0.0_f64;
    let mut worst = 0;
    let mut all_match = true;
    for (i, e) in evaluated.iter().enumerate() {
        let dev = max_diff(&e.eigenvalues, reference);
        if dev > max_dev {
            max_dev = dev;
            worst = i;
        }
        if !same_class(&e.eigenvalues, reference, &clusters[i], &clusters[0], eff) {
            all_match = false;
        }
        let known = classes.iter().any(|&c| {
            same_class(&e.eigenvalues, &evaluated[c].eigenvalues, &clusters[i], &clusters[c], eff)
        });
        if !known {
            classes.push(i);
        }
    }

    let witness = |i: usize, reason: &str| Witness {
        label: points[i].label.clone(),
        sample_index: i,
        vector: points[i].vector.clone(),
        spectrum: clusters[i].clone(),
        deviation: max_diff(&evaluated[i].eigenvalues, reference),
        reason: reason.into(),
    };
    // Family-adapted probes get priority over coordinate and random samples
    // when there are more classes than witness slots.
    let mut chosen: Vec<usize> = classes.clone();
    chosen.sort_by_key(|&i| (i != 0, !is_family_probe(&points[i].label)));
    chosen.truncate(MAX_WITNESSES);
    chosen.sort_unstable();
    let mut witnesses: Vec<Witness> = chosen
        .iter()
        .map(|&i| {
            witness(
                i,
                if i == 0 {
                    "reference spectrum"
                } else {
                    "spectrum differs from reference"
                },
            )
        })
        .collect();
    if !all_match && !witnesses.iter().any(|w| w.sample_index == worst) {
        witnesses.push(witness(worst, "largest deviation from reference"));
    }

    let mut channels = vec![Channel {
        name: "spectrum".into(),
        max_residual: max_dev,
        tolerance: eff,
        pass: all_match,
    }];
    if let Some(name) = commutator_channel {
        let (mut cmax, mut first_bad) = (0.0_f64, None);
        for (i, e) in evaluated.iter().enumerate() {
            cmax = cmax.max(e.commutator);
            if e.commutator > eff && first_bad.is_none() {
                first_bad = Some(i);
            }
        }
        channels.push(Channel::new(name, cmax, eff));
        if let Some(i) = first_bad {
            if !witnesses.iter().any(|w| w.sample_index == i) {
                witnesses.push(witness(i, "operator does not commute with J"));
            }
        }
    }
    let pass = channels.iter().all(|c| c.pass);
    VerificationReport {
        check: check.into(),
        verdict: Verdict::from_pass(pass),
        max_deviation: max_dev,
        tolerance: tol,
        effective_tolerance: eff,
        spectrum: clusters[0].clone(),
        channels,
        witnesses,
        census: SampleCensus {
            random: census_random,
            probes: census_probes,
            total: points.len(),
            spectrum_classes: classes.len(),
        },
        seed,
    }
}

fn is_family_probe(label: &str) -> bool {
    ["fixed", "mixed", "isotropic"].iter().any(|p| label.starts_with(p))
}

fn vector_points(sampler: &PlaneSampler, n: usize) -> Result<Vec<Point>> {
    Ok(sampler
        .points(n)?
        .into_iter()
        .map(|s| Point {
            label: s.label,
            vector: s.vector.0,
            probe: s.probe,
        })
        .collect())
}

/// Constant spectrum of the Jacobi operator over the sampled unit sphere.
pub fn check_osserman(spec: &CurvatureSpec, sampler: &PlaneSampler, tol: f64) -> Result<VerificationReport> {
    let points = vector_points(sampler, spec.dim())?;
    let evaluated = points
        .par_iter()
        .map(|p| {
            Ok(Evaluated {
                eigenvalues: eigenvalues(&spec.jacobi(&p.vector)?)?,
                commutator: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sweep("osserman", points, evaluated, tol, sampler.seed, None))
}

/// Constant spectrum of the higher-order Jacobi operator over sampled p-planes.
pub fn check_p_osserman(
    spec: &CurvatureSpec,
    p: usize,
    sampler: &PlaneSampler,
    tol: f64,
) -> Result<VerificationReport> {
    let n = spec.dim();
    if p == 0 || p >= n {
        return Err(Error::InvalidArgument(format!("p must lie in 1..{n}, got {p}")));
    }
    let frames: Vec<(String, Frame, bool)> = sampler.frames(n, p)?;
    let evaluated = frames
        .par_iter()
        .map(|(_, f, _)| {
            Ok(Evaluated {
                eigenvalues: eigenvalues(&spec.higher_jacobi(f)?)?,
                commutator: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points = frames
        .into_iter()
        .map(|(label, f, probe)| Point {
            label,
            vector: f.vectors().iter().flat_map(|v| v.0.iter().copied()).collect(),
            probe,
        })
        .collect();
    Ok(sweep(&format!("p-osserman:{p}"), points, evaluated, tol, sampler.seed, None))
}

/// Complex Osserman: 𝒥_R(π_x) commutes with J and has a constant spectrum.
pub fn check_complex_osserman(
    model: &ComplexModel,
    sampler: &PlaneSampler,
    tol: f64,
) -> Result<VerificationReport> {
    let points = vector_points(sampler, model.dim())?;
    let j = model.j();
    let evaluated = points
        .par_iter()
        .map(|p| {
            let m = model.complex_jacobi(&p.vector)?;
            Ok(Evaluated {
                commutator: commutator_norm(&m, j)?,
                eigenvalues: eigenvalues(&m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sweep(
        "complex-osserman",
        points,
        evaluated,
        tol,
        sampler.seed,
        Some("commutes-with-J"),
    ))
}

/// Compatibility of R and J through three independent channels:
/// J-invariance of R, [𝒥_R(π_x), J] = 0 and [ℛ(x, Jx), J] = 0.
pub fn check_compatibility(
    model: &ComplexModel,
    sampler: &PlaneSampler,
    tol: f64,
) -> Result<VerificationReport> {
    let spec = model.spec();
    let n = model.dim();
    let j = model.j();
    let eff = tol * (1.0 + curvature_bound(spec));

    let mut rng = SeededRng::new(sampler.seed ^ 0xc0_4a7);
    let quads = (0..sampler.count.max(1))
        .map(|_| {
            Ok([
                random_unit(n, &mut rng)?,
                random_unit(n, &mut rng)?,
                random_unit(n, &mut rng)?,
                random_unit(n, &mut rng)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let invariance = quads
        .par_iter()
        .map(|[x, y, z, t]| {
            let jx = j.mul_vec(x)?;
            let jy = j.mul_vec(y)?;
            let jz = j.mul_vec(z)?;
            let jt = j.mul_vec(t)?;
            Ok((spec.eval(x, y, z, t)? - spec.eval(&jx, &jy, &jz, &jt)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;

    let points = vector_points(sampler, n)?;
    let per_point = points
        .par_iter()
        .map(|p| {
            let jx = j.mul_vec(&p.vector)?;
            let cj = model.complex_jacobi(&p.vector)?;
            let skew = spec.skew_operator(&p.vector, &jx)?;
            Ok((commutator_norm(&cj, j)?, commutator_norm(&skew, j)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let fold = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0_f64, f64::max);
    let channels = vec![
        Channel::new("invariance", fold(&mut invariance.iter().copied()), eff),
        Channel::new("complex-jacobi-commutator", fold(&mut per_point.iter().map(|p| p.0)), eff),
        Channel::new("skew-operator-commutator", fold(&mut per_point.iter().map(|p| p.1)), eff),
    ];
    let pass = channels.iter().all(|c| c.pass);
    let max_dev = channels.iter().fold(0.0_f64, |m, c| m.max(c.max_residual));

    let mut witnesses = Vec::new();
    if let Some(k) = invariance.iter().position(|r| *r > eff) {
        witnesses.push(Witness {
            label: format!("quadruple[{k}]"),
            sample_index: k,
            vector: quads[k][0].0.clone(),
            spectrum: vec![],
            deviation: invariance[k],
            reason: "R(x,y,z,t) differs from R(Jx,Jy,Jz,Jt)".into(),
        });
    }
    if let Some(i) = per_point.iter().position(|r| r.0 > eff || r.1 > eff) {
        let m = model.complex_jacobi(&points[i].vector)?;
        witnesses.push(Witness {
            label: points[i].label.clone(),
            sample_index: i,
            vector: points[i].vector.clone(),
            spectrum: symmetric_eigen(&m, SYM_TOL)?.clusters,
            deviation: per_point[i].0.max(per_point[i].1),
            reason: "operator does not commute with J".into(),
        });
    }
    let random = points.iter().filter(|p| !p.probe).count();
    Ok(VerificationReport {
        check: "compat".into(),
        verdict: Verdict::from_pass(pass),
        max_deviation: max_dev,
        tolerance: tol,
        effective_tolerance: eff,
        spectrum: vec![],
        channels,
        witnesses,
        census: SampleCensus {
            random: random + quads.len(),
            probes: points.len() - random,
            total: points.len() + quads.len(),
            spectrum_classes: 0,
        },
        seed: sampler.seed,
    })
}

/// Einstein: the Ricci operator is a multiple of the identity.
pub fn check_einstein(spec: &CurvatureSpec, tol: f64) -> Result<VerificationReport> {
    let n = spec.dim();
    let ricci = spec.ricci();
    let mean = ricci.trace() / n as f64;
    let dev = ricci.max_abs_diff(&Matrix::identity(n).scaled(mean));
    let s = symmetric_eigen(&ricci, SYM_TOL)?;
    let eff = tol * (1.0 + s.spectral_radius());
    let pass = dev <= eff;
    let witnesses = if pass {
        vec![]
    } else {
        vec![Witness {
            label: "ricci".into(),
            sample_index: 0,
            vector: vec![],
            spectrum: s.clusters.clone(),
            deviation: dev,
            reason: "Ricci operator is not scalar".into(),
        }]
    };
    Ok(VerificationReport {
        check: "einstein".into(),
        verdict: Verdict::from_pass(pass),
        max_deviation: dev,
        tolerance: tol,
        effective_tolerance: eff,
        spectrum: s.clusters,
        channels: vec![Channel::new("ricci-scalar", dev, eff)],
        witnesses,
        census: SampleCensus::default(),
        seed: 0,
    })
}

/// Curvature identities on the materialized tensor.
pub fn check_symmetries(spec: &CurvatureSpec, tol: f64) -> Result<VerificationReport> {
    let dense = spec.materialize()?;
    let eff = tol * (1.0 + curvature_bound(spec));
    let r = dense.verify_symmetries(eff);
    let channels = vec![
        Channel::new("antisymmetry", r.antisymmetry, eff),
        Channel::new("pair-symmetry", r.pair_symmetry, eff),
        Channel::new("bianchi", r.bianchi, eff),
    ];
    let max_dev = r.antisymmetry.max(r.pair_symmetry).max(r.bianchi);
    let witnesses = match (r.pass, r.worst_index) {
        (false, Some(idx)) => vec![Witness {
            label: format!("index{idx:?}"),
            sample_index: 0,
            vector: idx.iter().map(|&i| i as f64).collect(),
            spectrum: vec![],
            deviation: max_dev,
            reason: "curvature identity violated".into(),
        }],
        _ => vec![],
    };
    Ok(VerificationReport {
        check: "symmetries".into(),
        verdict: Verdict::from_pass(r.pass),
        max_deviation: max_dev,
        tolerance: tol,
        effective_tolerance: eff,
        spectrum: vec![],
        channels,
        witnesses,
        census: SampleCensus::default(),
        seed: 0,
    })
}

impl VerifyOptions {
    pub fn sampler_for(&self, model: &ComplexModel) -> PlaneSampler {
        PlaneSampler::for_model(model, self.seed, self.samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::generate_family;
    use crate::curvature::CurvatureTerm;
    use crate::osserman::{spectrum_matches, Provenance};

    fn rank1(n: usize, c0: f64, seed: u64) -> (ComplexModel, Matrix) {
        let f = generate_family(n, 1, seed).unwrap();
        let j1 = f.generator(0).clone();
        let spec = CurvatureSpec::from_family(c0, &f, &[1.0]).unwrap();
        (
            ComplexModel::new(spec, j1.clone(), Some(Provenance::new(f))).unwrap(),
            j1,
        )
    }

    #[test]
    fn constant_curvature_is_everything() {
        let n = 6;
        let f = generate_family(n, 1, 1).unwrap();
        let spec = CurvatureSpec::constant(n, 1.0).unwrap();
        let model = ComplexModel::new(spec.clone(), f.generator(0).clone(), None).unwrap();
        let s = PlaneSampler::new(0, 16);
        let r = check_osserman(&spec, &s, 1e-8).unwrap();
        assert!(r.passed());
        assert!(spectrum_matches(&r.spectrum, &[Cluster::new(0.0, 1), Cluster::new(1.0, n - 1)], 1e-12));
        assert!(check_compatibility(&model, &s, 1e-8).unwrap().passed());
        let c = check_complex_osserman(&model, &s, 1e-8).unwrap();
        assert!(c.passed());
        assert!(spectrum_matches(&c.spectrum, &[Cluster::new(1.0, 2), Cluster::new(2.0, n - 2)], 1e-12));
        let e = check_einstein(&spec, 1e-10).unwrap();
        assert!(e.passed());
        assert!((e.spectrum[0].value - 5.0).abs() < 1e-12);
        assert!(check_symmetries(&spec, 1e-10).unwrap().passed());
    }

    #[test]
    fn compatibility_channels_agree() {
        let (model, _) = rank1(8, 0.0, 2);
        let s = PlaneSampler::for_model(&model, 0, 16);
        let r = check_compatibility(&model, &s, 1e-8).unwrap();
        assert!(r.passed(), "{:?}", r.channels);

        // Generic J: an unrelated conjugate of the same structure.
        let other = generate_family(8, 1, 99).unwrap().generator(0).clone();
        let bad = ComplexModel::new(model.spec().clone(), other, None).unwrap();
        let r = check_compatibility(&bad, &s, 1e-8).unwrap();
        assert!(!r.passed());
        assert!(r.channels.iter().all(|c| !c.pass), "{:?}", r.channels);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn p_osserman_examples() {
        let s = PlaneSampler::new(3, 20);
        let spec = CurvatureSpec::constant(6, 1.0).unwrap();
        assert!(check_p_osserman(&spec, 2, &s, 1e-8).unwrap().passed());
        let (model, _) = rank1(8, 1.0, 4);
        assert!(!check_p_osserman(model.spec(), 2, &s, 1e-8).unwrap().passed());
        // p = 1 agrees with the ordinary check on shared random samples.
        let r = PlaneSampler::random_only(5, 20);
        assert_eq!(
            check_p_osserman(model.spec(), 1, &r, 1e-8).unwrap().verdict,
            check_osserman(model.spec(), &r, 1e-8).unwrap().verdict
        );
        assert!(check_p_osserman(&spec, 6, &s, 1e-8).is_err());
    }

    #[test]
    fn einstein_negative_control() {
        // Two skew terms whose Ψ's share a plane with unequal weights.
        let n = 4;
        let mut p1 = Matrix::zeros(n, n);
        p1[(0, 1)] = 1.0;
        p1[(1, 0)] = -1.0;
        let mut p2 = p1.clone();
        p2[(2, 3)] = 1.0;
        p2[(3, 2)] = -1.0;
        let spec = CurvatureSpec::with_skew_terms(
            n,
            0.0,
            vec![CurvatureTerm::new(1.0, p1), CurvatureTerm::new(2.0, p2)],
        )
        .unwrap();
        // Oracle: ρ = 3 Σ cᵢ ΨᵢΨᵢᵀ = diag(9, 9, 6, 6).
        let expect = Matrix::diag(&[9.0, 9.0, 6.0, 6.0]);
        assert!(spec.ricci().max_abs_diff(&expect) < 1e-14);
        let r = check_einstein(&spec, 1e-10).unwrap();
        assert!(!r.passed());
        assert_eq!(r.witnesses.len(), 1);
        assert!(check_symmetries(&spec, 1e-10).unwrap().passed());
    }

    #[test]
    fn reports_are_identical_across_runs() {
        let (model, _) = rank1(8, 1.0, 6);
        let s = PlaneSampler::for_model(&model, 11, 32);
        let a = check_complex_osserman(&model, &s, 1e-8).unwrap();
        let b = check_complex_osserman(&model, &s, 1e-8).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
        assert_eq!(a.census.total, a.census.random + a.census.probes);
    }
}
