use osserman_core::catalog::{catalog_entry, complex_space_form, CATALOG_NAMES};
use osserman_core::clifford::{adams_nu, generate_family, reparametrize};
use osserman_core::curvature::{CurvatureSpec, CurvatureTerm, Frame};
use osserman_core::linalg::{
    random_frame, random_orthogonal, random_unit, symmetric_eigen, Matrix, SeededRng, Vector,
};
use osserman_core::osserman::{check_complex_osserman, spectrum_matches, PlaneSampler};
use proptest::prelude::*;

fn random_symmetric(n: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed);
    let g = random_unit(n * n, &mut rng).unwrap().0;
    Matrix::from_fn(n, n, |i, j| 3.0 * (g[i * n + j] + g[j * n + i]))
}

fn random_structure(n: usize, rng: &mut SeededRng) -> Matrix {
    let mut j0 = Matrix::zeros(n, n);
    for k in 0..n / 2 {
        j0[(2 * k + 1, 2 * k)] = 1.0;
        j0[(2 * k, 2 * k + 1)] = -1.0;
    }
    let q = random_orthogonal(n, rng).unwrap();
    &(&q * &j0) * &q.transpose()
}

fn random_spec(n: usize, terms: usize, seed: u64) -> CurvatureSpec {
    let mut rng = SeededRng::new(seed);
    let c0 = random_unit(1, &mut rng).unwrap().0[0] * 1.5;
    let terms = (0..terms)
        .map(|k| CurvatureTerm::new(0.4 + 0.9 * k as f64, random_structure(n, &mut rng)))
        .collect();
    CurvatureSpec::new(n, c0, terms).unwrap()
}

fn gram(vs: &[Vector]) -> Matrix {
    Matrix::from_fn(vs.len(), vs.len(), |i, j| vs[i].dot(&vs[j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eigen_decomposition_reconstructs(n in 1usize..12, seed in any::<u64>()) {
        let a = random_symmetric(n, seed);
        let s = symmetric_eigen(&a, 1e-12).unwrap();
        let scale = 1.0 + a.max_abs();
        let mut recon = Matrix::zeros(n, n);
        for (i, &l) in s.eigenvalues.iter().enumerate() {
            let v = s.eigenvector(i);
            let av = a.mul_vec(&v.0).unwrap();
            let resid = av.0.iter().zip(&v.0).fold(0.0_f64, |m, (x, y)| m.max((x - l * y).abs()));
            prop_assert!(resid <= 1e-10 * scale);
            recon.add_outer(l, &v.0, &v.0);
        }
        prop_assert!(recon.max_abs_diff(&a) <= 1e-9);
        let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
        let sum: f64 = s.eigenvalues.iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-9 * (1.0 + trace.abs()));
    }

    #[test]
    fn sample_streams_are_reproducible(seed in any::<u64>(), n in 1usize..20) {
        let a = random_unit(n, &mut SeededRng::new(seed)).unwrap();
        let b = random_unit(n, &mut SeededRng::new(seed)).unwrap();
        prop_assert_eq!(a.0, b.0);
    }

    #[test]
    fn jacobi_is_symmetric_and_kills_x(half in 1usize..=4, k in 0usize..=3, seed in any::<u64>()) {
        let n = 2 * half;
        let spec = random_spec(n, k, seed);
        let x = random_unit(n, &mut SeededRng::new(seed ^ 7)).unwrap();
        let m = spec.jacobi(&x.0).unwrap();
        prop_assert!(m.symmetry_residual() <= 1e-12);
        prop_assert!(m.mul_vec(&x.0).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn higher_jacobi_is_additive_and_basis_free(half in 2usize..=4, p in 1usize..=3, seed in any::<u64>()) {
        let n = 2 * half;
        let spec = random_spec(n, 2, seed);
        let mut rng = SeededRng::new(seed ^ 11);
        let vs = random_frame(n, p + 1, &mut rng).unwrap();
        let whole = spec.higher_jacobi(&Frame::new(vs.clone()).unwrap()).unwrap();
        let first = spec.higher_jacobi(&Frame::new(vs[..p].to_vec()).unwrap()).unwrap();
        let last = spec.higher_jacobi(&Frame::new(vs[p..].to_vec()).unwrap()).unwrap();
        prop_assert!(whole.max_abs_diff(&(&first + &last)) <= 1e-10);

        let q = random_orthogonal(p + 1, &mut rng).unwrap();
        let rotated: Vec<Vector> = (0..=p)
            .map(|i| {
                let mut v = Vector::zeros(n);
                for (j, u) in vs.iter().enumerate() {
                    v = v.axpy(q[(i, j)], u);
                }
                v
            })
            .collect();
        let again = spec.higher_jacobi(&Frame::new(rotated).unwrap()).unwrap();
        prop_assert!(whole.max_abs_diff(&again) <= 1e-10);
    }

    #[test]
    fn clifford_images_are_orthonormal(kappa in 1usize..=7, seed in any::<u64>()) {
        let n = 8;
        let fam = generate_family(n, kappa, seed % 500).unwrap();
        let x = random_unit(n, &mut SeededRng::new(seed)).unwrap();
        let images: Vec<Vector> = fam.generators().iter().map(|g| g.mul_vec(&x.0).unwrap()).collect();
        prop_assert!(gram(&images).max_abs_diff(&Matrix::identity(kappa)) <= 1e-10);
    }

    #[test]
    fn combinations_square_to_minus_norm(kappa in 1usize..=8, seed in any::<u64>()) {
        let n = 16;
        let fam = generate_family(n, kappa, seed % 500).unwrap();
        let a = random_unit(kappa, &mut SeededRng::new(seed)).unwrap().scaled(2.5);
        let m = fam.combination(&a.0);
        let norm2 = a.dot(&a);
        prop_assert!((&m * &m).max_abs_diff(&Matrix::identity(n).scaled(-norm2)) <= 1e-10);
    }

    #[test]
    fn equal_jacobi_operators_give_equal_tensors(kappa in 2usize..=3, seed in any::<u64>()) {
        let n = 8;
        let fam = generate_family(n, kappa, seed % 500).unwrap();
        let a = random_orthogonal(kappa, &mut SeededRng::new(seed)).unwrap();
        let twin = reparametrize(&fam, &a).unwrap();
        let ones = vec![1.0; kappa];
        let r1 = CurvatureSpec::from_family(0.5, &fam, &ones).unwrap();
        let r2 = CurvatureSpec::from_family(0.5, &twin, &ones).unwrap();
        let mut rng = SeededRng::new(seed ^ 3);
        for _ in 0..n * n {
            let x = random_unit(n, &mut rng).unwrap();
            prop_assert!(r1.jacobi(&x.0).unwrap().max_abs_diff(&r2.jacobi(&x.0).unwrap()) <= 1e-10);
        }
        let d = r1.materialize().unwrap().max_abs_diff(&r2.materialize().unwrap());
        prop_assert!(d <= 1e-8);
    }
}

#[test]
fn adams_period_sixteen() {
    for r in 1..=16 {
        assert_eq!(adams_nu(16 * r).unwrap(), adams_nu(r).unwrap() + 8, "r = {r}");
    }
}

#[test]
fn pair_products_have_full_rank() {
    for (n, kappa) in [(8, 3), (16, 4), (32, 5)] {
        assert!(n >= kappa * (kappa - 1));
        let fam = generate_family(n, kappa, 9).unwrap();
        let mut rng = SeededRng::new(2);
        let x = random_unit(n, &mut rng).unwrap();
        let mut images = Vec::new();
        for j in 0..kappa {
            for k in j + 1..kappa {
                images.push(fam.word(&[j, k]).mul_vec(&x.0).unwrap());
            }
        }
        let s = symmetric_eigen(&gram(&images), 1e-12).unwrap();
        let (lo, hi) = (s.eigenvalues[0], s.eigenvalues[s.eigenvalues.len() - 1]);
        assert!(lo > 1e-8, "n={n} kappa={kappa}: smallest Gram eigenvalue {lo:e}");
        println!("n={n} kappa={kappa}: Gram condition number {:.3}", hi / lo);
    }
}

#[test]
fn mismatched_coefficients_are_detected() {
    let fam = generate_family(8, 2, 4).unwrap();
    let r1 = CurvatureSpec::from_family(0.0, &fam, &[1.0, 1.0]).unwrap();
    let r2 = CurvatureSpec::from_family(0.0, &fam, &[1.0, 1.5]).unwrap();
    let x = random_unit(8, &mut SeededRng::new(1)).unwrap();
    assert!(r1.jacobi(&x.0).unwrap().max_abs_diff(&r2.jacobi(&x.0).unwrap()) > 1e-3);
    assert!(r1.materialize().unwrap().max_abs_diff(&r2.materialize().unwrap()) > 1e-3);
}

#[test]
fn scalar_complex_jacobi_for_three_r0_plus_rj() {
    for n in [2, 4, 6, 10] {
        let e = complex_space_form(n, 3.0, 1.0, 1).unwrap();
        let mut rng = SeededRng::new(n as u64);
        for _ in 0..10 {
            let x = random_unit(n, &mut rng).unwrap();
            let m = e.model.complex_jacobi(&x.0).unwrap();
            assert!(m.max_abs_diff(&Matrix::identity(n).scaled(6.0)) <= 1e-12);
        }
    }
}

#[test]
fn catalog_expectations_hold_across_seeds() {
    for seed in 0..10 {
        for name in CATALOG_NAMES {
            let entry = catalog_entry(name, 8, None, seed).unwrap();
            let model = &entry.model;
            let report =
                check_complex_osserman(model, &PlaneSampler::for_model(model, seed, 16), 1e-8).unwrap();
            if let Some(co) = entry.expected.complex_osserman {
                assert_eq!(report.passed(), co, "{name} seed {seed}");
            }
            if let (Some(want), true) = (&entry.expected.spectrum, report.passed()) {
                assert!(spectrum_matches(&report.spectrum, want, 1e-8), "{name} seed {seed}");
            }
        }
    }
}
