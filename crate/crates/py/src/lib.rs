//! Python bindings: `import osserman`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use osserman_core::catalog::{catalog_entry, rank_k_generic, JChoice, CATALOG_NAMES};
use osserman_core::clifford::{self, CliffordFamily};
use osserman_core::io::{classify_model, verify_model, Check, ModelFile};
use osserman_core::linalg::{self, Matrix, CLUSTER_GAP_REL};
use osserman_core::osserman::{ComplexModel, VerifyOptions, DEFAULT_SAMPLE_COUNT, DEFAULT_SPECTRUM_TOL};

type Rows = Vec<Vec<f64>>;

fn err(e: osserman_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Rows) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(err)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn clusters(eigenvalues: &[f64]) -> Vec<(f64, usize)> {
    let rho = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    linalg::cluster_spectrum(eigenvalues, CLUSTER_GAP_REL * (1.0 + rho))
        .into_iter()
        .map(|c| (c.value, c.multiplicity))
        .collect()
}

/// Maximal rank of a Clifford family on R^n.
#[pyfunction]
fn adams_nu(n: usize) -> PyResult<usize> {
    clifford::adams_nu(n).map_err(err)
}

/// Ascending eigenvalues and eigenvectors (as rows) of a symmetric matrix.
#[pyfunction]
#[pyo3(signature = (a, tol = 1e-9))]
fn symmetric_eigen(a: Rows, tol: f64) -> PyResult<(Vec<f64>, Rows)> {
    let s = linalg::symmetric_eigen(&matrix(a)?, tol).map_err(err)?;
    let vectors = (0..s.eigenvalues.len()).map(|i| s.eigenvector(i).0).collect();
    Ok((s.eigenvalues, vectors))
}

/// Groups eigenvalues into (value, multiplicity) clusters.
#[pyfunction]
#[pyo3(signature = (eigenvalues, gap = None))]
fn cluster_spectrum(eigenvalues: Vec<f64>, gap: Option<f64>) -> Vec<(f64, usize)> {
    match gap {
        Some(g) => linalg::cluster_spectrum(&eigenvalues, g)
            .into_iter()
            .map(|c| (c.value, c.multiplicity))
            .collect(),
        None => clusters(&eigenvalues),
    }
}

#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    CATALOG_NAMES.to_vec()
}

/// Anticommuting Hermitian almost complex structures J1..Jk.
#[pyclass(name = "Family", frozen)]
struct PyFamily {
    inner: CliffordFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(generators: Vec<Rows>) -> PyResult<Self> {
        let gens = generators.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        let dim = gens.first().map(Matrix::rows).unwrap_or(0);
        Ok(PyFamily {
            inner: CliffordFamily::new(dim, gens).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, kappa, seed = 0))]
    fn generate(n: usize, kappa: usize, seed: u64) -> PyResult<Self> {
        Ok(PyFamily {
            inner: clifford::generate_family(n, kappa, seed).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn generators(&self) -> Vec<Rows> {
        self.inner.generators().iter().map(Matrix::to_rows).collect()
    }

    /// Product of generators, zero-based indices.
    fn word(&self, indices: Vec<usize>) -> PyResult<Rows> {
        if let Some(&i) = indices.iter().find(|&&i| i >= self.inner.rank()) {
            return Err(PyValueError::new_err(format!("generator index {i} out of range")));
        }
        Ok(self.inner.word(&indices).to_rows())
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn verify(&self, tol: f64) -> bool {
        self.inner.verify(tol).pass
    }

    fn __repr__(&self) -> String {
        format!("Family(dim={}, rank={})", self.inner.dim(), self.inner.rank())
    }
}

/// Curvature model c0 R0 + sum c_i R_{Psi_i} with a complex structure J.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    model: ComplexModel,
    file: ModelFile,
}

impl PyModel {
    fn wrap(model: ComplexModel, name: Option<&str>, seed: u64) -> Self {
        let file = ModelFile::from_model(&model, name, seed);
        PyModel { model, file }
    }

    fn opts(samples: usize, seed: u64, tol: f64) -> VerifyOptions {
        VerifyOptions { seed, samples, tol }
    }
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (name, dim = 8, coeffs = None, seed = 0))]
    fn catalog(name: &str, dim: usize, coeffs: Option<Vec<f64>>, seed: u64) -> PyResult<Self> {
        let e = catalog_entry(name, dim, coeffs.as_deref(), seed).map_err(err)?;
        Ok(Self::wrap(e.model, Some(&e.name), seed))
    }

    /// Model over a seeded family of the given rank; `j` is "j1", "j1j2"
    /// or an explicit matrix.
    #[staticmethod]
    #[pyo3(signature = (dim, coeffs, c0 = 0.0, j = None, seed = 0))]
    fn build(dim: usize, coeffs: Vec<f64>, c0: f64, j: Option<&Bound<'_, PyAny>>, seed: u64) -> PyResult<Self> {
        let choice = match j {
            None => JChoice::J1,
            Some(obj) => match obj.extract::<String>() {
                Ok(s) if s.eq_ignore_ascii_case("j1") => JChoice::J1,
                Ok(s) if s.eq_ignore_ascii_case("j1j2") => JChoice::J1J2,
                Ok(s) => return Err(PyValueError::new_err(format!("unknown J choice '{s}'"))),
                Err(_) => JChoice::Custom(matrix(obj.extract::<Rows>()?)?),
            },
        };
        let e = rank_k_generic(dim, coeffs.len(), choice, c0, &coeffs, seed).map_err(err)?;
        Ok(Self::wrap(e.model, Some(&e.name), seed))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = ModelFile::from_json(text).map_err(err)?;
        let model = file.to_model().map_err(err)?;
        Ok(PyModel { model, file })
    }

    fn to_json(&self) -> PyResult<String> {
        self.file.to_json().map_err(err)
    }

    fn digest(&self) -> PyResult<String> {
        self.file.digest().map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.model.dim()
    }

    #[getter]
    fn c0(&self) -> f64 {
        self.model.spec().c0()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.model.spec().coefficients()
    }

    #[getter]
    #[allow(non_snake_case)]
    fn J(&self) -> Rows {
        self.model.j().to_rows()
    }

    /// R(x, y, z, t).
    fn curvature(&self, x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, t: Vec<f64>) -> PyResult<f64> {
        self.model.spec().eval(&x, &y, &z, &t).map_err(err)
    }

    /// Jacobi operator at a unit vector.
    fn jacobi(&self, x: Vec<f64>) -> PyResult<Rows> {
        Ok(self.model.spec().jacobi(&x).map_err(err)?.to_rows())
    }

    /// J_R(x) + J_R(Jx) at a unit vector.
    fn complex_jacobi(&self, x: Vec<f64>) -> PyResult<Rows> {
        Ok(self.model.complex_jacobi(&x).map_err(err)?.to_rows())
    }

    fn ricci(&self) -> Rows {
        self.model.spec().ricci().to_rows()
    }

    /// Clustered spectrum of the (complex) Jacobi operator at `x`.
    #[pyo3(signature = (x, complex = true))]
    fn spectrum(&self, x: Vec<f64>, complex: bool) -> PyResult<Vec<(f64, usize)>> {
        let m = if complex {
            self.model.complex_jacobi(&x)
        } else {
            self.model.spec().jacobi(&x)
        }
        .map_err(err)?;
        let s = linalg::symmetric_eigen(&m, 1e-9).map_err(err)?;
        Ok(clusters(&s.eigenvalues))
    }

    /// Runs a check and returns the report as a dict.
    #[pyo3(signature = (check = "complex-osserman", samples = DEFAULT_SAMPLE_COUNT, seed = 0, tol = DEFAULT_SPECTRUM_TOL))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        check: &str,
        samples: usize,
        seed: u64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let check = Check::parse(check).map_err(err)?;
        let report = verify_model(&self.file, check, &Self::opts(samples, seed, tol)).map_err(err)?;
        json_to_py(py, &report.to_json().map_err(err)?)
    }

    /// Closed-form classification with a numerical cross-check.
    #[pyo3(signature = (samples = DEFAULT_SAMPLE_COUNT, seed = 0))]
    fn classify<'py>(&self, py: Python<'py>, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let report = classify_model(&self.file, &Self::opts(samples, seed, DEFAULT_SPECTRUM_TOL)).map_err(err)?;
        json_to_py(py, &report.to_json().map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(dim={}, c0={}, coefficients={:?})",
            self.model.dim(),
            self.model.spec().c0(),
            self.model.spec().coefficients()
        )
    }
}

#[pymodule]
fn osserman(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(adams_nu, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PyModel>()?;
    Ok(())
}
