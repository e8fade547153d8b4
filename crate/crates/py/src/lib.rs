//! Python extension module exposing the main types and operations:
//! spectral fields, grids, multiplier evolution, the bump families,
//! kernel scans, the norm estimators and the log-log fitter.
//!
//! Build with `cargo build -p strichartz-py --release` and import the
//! produced `libstrichartz_lab.so` as `strichartz_lab` (see
//! `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyMemoryError, PyValueError};
use pyo3::prelude::*;

use strichartz_core::bump::BumpProfile;
use strichartz_core::error::Error as CoreError;
use strichartz_core::extremizer::{self, AscentOptions, NormProblem};
use strichartz_core::families;
use strichartz_core::kernel;
use strichartz_core::propagator::{self, EvolutionKind};
use strichartz_core::spectral::{self, Dim};

fn to_py_err(e: CoreError) -> PyErr {
    match e {
        CoreError::Config(_) | CoreError::Domain(_) => PyValueError::new_err(e.to_string()),
        CoreError::Degeneracy(_) => PyArithmeticError::new_err(e.to_string()),
        CoreError::Resource(_) | CoreError::Io(_) => PyMemoryError::new_err(e.to_string()),
    }
}

fn parse_dim(dim: &str) -> PyResult<Dim> {
    match dim {
        "1d" | "1" => Ok(Dim::One),
        "2d" | "2" => Ok(Dim::Two),
        other => Err(PyValueError::new_err(format!(
            "dimension must be '1d' or '2d', got {other:?}"
        ))),
    }
}

fn parse_kind(kind: &str) -> PyResult<EvolutionKind> {
    match kind {
        "non-elliptic" | "nonelliptic" => Ok(EvolutionKind::NonElliptic2d),
        "elliptic" => Ok(EvolutionKind::Elliptic2d),
        "line+" => Ok(EvolutionKind::Line1dPlus),
        "line-" => Ok(EvolutionKind::Line1dMinus),
        other => Err(PyValueError::new_err(format!(
            "evolution kind must be one of 'non-elliptic', 'elliptic', 'line+', 'line-'; \
             got {other:?}"
        ))),
    }
}

/// Complex Fourier coefficients on the symmetric lattice {-N..N}^d.
#[pyclass(name = "SpectralField", skip_from_py_object)]
#[derive(Clone)]
struct PySpectralField {
    inner: spectral::SpectralField,
}

#[pymethods]
impl PySpectralField {
    #[staticmethod]
    fn zeros(n: usize, dim: &str) -> PyResult<Self> {
        Ok(PySpectralField {
            inner: spectral::SpectralField::zeros(n, parse_dim(dim)?),
        })
    }

    fn truncation(&self) -> usize {
        self.inner.truncation()
    }

    fn dim(&self) -> &'static str {
        match self.inner.dim() {
            Dim::One => "1d",
            Dim::Two => "2d",
        }
    }

    fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.inner.coeff(m, n)
    }

    fn set_coeff(&mut self, m: i64, n: i64, value: Complex64) {
        self.inner.set_coeff(m, n, value);
    }

    /// Flat coefficient list in lattice order.
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectralField(N={}, dim={})",
            self.inner.truncation(),
            self.dim()
        )
    }
}

/// Discretization: spatial samples per axis and midpoint slices on [0,1].
#[pyclass(name = "GridSpec", skip_from_py_object)]
#[derive(Clone)]
struct PyGridSpec {
    inner: spectral::GridSpec,
}

#[pymethods]
impl PyGridSpec {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }
    #[getter]
    fn m_x(&self) -> usize {
        self.inner.m_x
    }
    #[getter]
    fn m_t(&self) -> usize {
        self.inner.m_t
    }
    fn __repr__(&self) -> String {
        format!(
            "GridSpec(N={}, M_x={}, M_t={})",
            self.inner.n, self.inner.m_x, self.inner.m_t
        )
    }
}

/// Samples on the uniform spatial grid.
#[pyclass(name = "PhysicalField", skip_from_py_object)]
#[derive(Clone)]
struct PyPhysicalField {
    inner: spectral::PhysicalField,
}

#[pymethods]
impl PyPhysicalField {
    fn m_x(&self) -> usize {
        self.inner.m_x()
    }
    fn samples(&self) -> Vec<Complex64> {
        self.inner.samples().to_vec()
    }
}

/// Result of a norm estimation.
#[pyclass(name = "NormEstimate")]
struct PyNormEstimate {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    iterations: u32,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    method: String,
    witness: spectral::SpectralField,
}

#[pymethods]
impl PyNormEstimate {
    fn witness(&self) -> PySpectralField {
        PySpectralField {
            inner: self.witness.clone(),
        }
    }
    fn __repr__(&self) -> String {
        format!(
            "NormEstimate(value={}, method={}, converged={})",
            self.value, self.method, self.converged
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n, oversample=2.0, time_factor=1.0))]
fn make_grid(n: usize, oversample: f64, time_factor: f64) -> PyResult<PyGridSpec> {
    Ok(PyGridSpec {
        inner: spectral::make_grid(n, oversample, time_factor).map_err(to_py_err)?,
    })
}

#[pyfunction]
fn synthesize(field: &PySpectralField, grid: &PyGridSpec) -> PyResult<PyPhysicalField> {
    Ok(PyPhysicalField {
        inner: spectral::synthesize(&field.inner, &grid.inner).map_err(to_py_err)?,
    })
}

#[pyfunction]
fn analyze(samples: &PyPhysicalField, grid: &PyGridSpec) -> PyResult<PySpectralField> {
    Ok(PySpectralField {
        inner: spectral::analyze(&samples.inner, &grid.inner).map_err(to_py_err)?,
    })
}

#[pyfunction]
fn lq_norm(samples: &PyPhysicalField, q: f64) -> PyResult<f64> {
    spectral::lq_norm(&samples.inner, q).map_err(to_py_err)
}

#[pyfunction]
fn hs_norm(field: &PySpectralField, s: f64) -> f64 {
    spectral::hs_norm(&field.inner, s)
}

#[pyfunction]
fn evolve(field: &PySpectralField, t: f64, kind: &str) -> PyResult<PySpectralField> {
    Ok(PySpectralField {
        inner: propagator::evolve(&field.inner, t, parse_kind(kind)?).map_err(to_py_err)?,
    })
}

/// Grid sized for the concentrated family at scale λ (N and M_x exactly
/// proportional to λ).
#[pyfunction]
fn family_grid(lambda: f64) -> PyResult<PyGridSpec> {
    Ok(PyGridSpec {
        inner: families::family_grid(lambda).map_err(to_py_err)?,
    })
}

#[pyfunction]
fn bump_1d(lambda: f64, grid: &PyGridSpec) -> PyResult<PySpectralField> {
    Ok(PySpectralField {
        inner: families::bump_1d(lambda, &BumpProfile::default(), &grid.inner)
            .map_err(to_py_err)?,
    })
}

#[pyfunction]
fn stationary_2d(field: &PySpectralField) -> PySpectralField {
    PySpectralField {
        inner: families::stationary_2d(&field.inner),
    }
}

#[pyfunction]
fn sobolev_ratio(lambda: f64, q: f64, s: f64) -> PyResult<f64> {
    let grid = families::family_grid(lambda).map_err(to_py_err)?;
    families::sobolev_ratio(lambda, q, s, &BumpProfile::default(), &grid).map_err(to_py_err)
}

#[pyfunction]
fn strichartz_ratio_family(lambda: f64, p: f64, q: f64, s: f64) -> PyResult<f64> {
    let grid = families::family_grid(lambda).map_err(to_py_err)?;
    families::strichartz_ratio_family(lambda, p, q, s, &BumpProfile::default(), &grid)
        .map_err(to_py_err)
}

/// sup_z |K₁(t, ·)| of the frequency-localised half-line kernel.
#[pyfunction]
fn kernel_sup_1d(t: f64, h: f64) -> PyResult<f64> {
    let profile = BumpProfile::default();
    let table =
        kernel::kernel_1d(t, h, &profile, kernel::default_zgrid(h)).map_err(to_py_err)?;
    Ok(table.sup_abs())
}

#[pyfunction]
fn kernel_2d_sup(t: f64, h: f64) -> PyResult<f64> {
    kernel::kernel_2d_sup(t, h, &BumpProfile::default()).map_err(to_py_err)
}

/// Decay scan: list of (t, sup|K₁|, |t|^{1/2}·sup|K₁|).
#[pyfunction]
fn dispersive_profile(h: f64, t_points: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
    let recs = kernel::dispersive_profile(h, &t_points, &BumpProfile::default())
        .map_err(to_py_err)?;
    Ok(recs.iter().map(|r| (r.t, r.sup_k1, r.scaled)).collect())
}

fn build_problem(
    p: f64,
    q: f64,
    s: f64,
    n: usize,
    kind: &str,
    oversample: f64,
    time_factor: f64,
    time_window: f64,
) -> PyResult<NormProblem> {
    let grid = spectral::make_grid(n, oversample, time_factor).map_err(to_py_err)?;
    let mut prob = NormProblem::full_box(p, q, s, parse_kind(kind)?, grid);
    prob.time_window = time_window;
    prob.validate().map_err(to_py_err)?;
    Ok(prob)
}

/// Log-ratio objective of the mixed-norm-to-Sobolev quotient at a field.
#[pyfunction]
#[pyo3(signature = (field, p, q, s, kind="non-elliptic", oversample=2.0, time_factor=1.0, time_window=1.0))]
#[allow(clippy::too_many_arguments)]
fn objective(
    field: &PySpectralField,
    p: f64,
    q: f64,
    s: f64,
    kind: &str,
    oversample: f64,
    time_factor: f64,
    time_window: f64,
) -> PyResult<f64> {
    let prob = build_problem(
        p,
        q,
        s,
        field.inner.truncation(),
        kind,
        oversample,
        time_factor,
        time_window,
    )?;
    extremizer::objective(&prob, &field.inner).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (p, q, s, n, draws, seed, kind="non-elliptic", oversample=2.0, time_factor=1.0))]
#[allow(clippy::too_many_arguments)]
fn estimate_random(
    p: f64,
    q: f64,
    s: f64,
    n: usize,
    draws: u32,
    seed: u64,
    kind: &str,
    oversample: f64,
    time_factor: f64,
) -> PyResult<PyNormEstimate> {
    let prob = build_problem(p, q, s, n, kind, oversample, time_factor, 1.0)?;
    let est = extremizer::estimate_random(&prob, draws, seed).map_err(to_py_err)?;
    Ok(PyNormEstimate {
        value: est.value,
        iterations: est.iterations,
        converged: est.converged,
        method: est.method.as_str().to_string(),
        witness: est.witness,
    })
}

#[pyfunction]
#[pyo3(signature = (p, q, s, n, restarts, seed, kind="non-elliptic", oversample=2.0, time_factor=1.0, draws=16, max_iter=150))]
#[allow(clippy::too_many_arguments)]
fn estimate_ascent(
    p: f64,
    q: f64,
    s: f64,
    n: usize,
    restarts: u32,
    seed: u64,
    kind: &str,
    oversample: f64,
    time_factor: f64,
    draws: u32,
    max_iter: u32,
) -> PyResult<PyNormEstimate> {
    let prob = build_problem(p, q, s, n, kind, oversample, time_factor, 1.0)?;
    let opts = AscentOptions {
        init_draws: draws,
        max_iter,
        ..AscentOptions::default()
    };
    let est = extremizer::estimate_ascent(&prob, restarts, seed, &opts).map_err(to_py_err)?;
    Ok(PyNormEstimate {
        value: est.value,
        iterations: est.iterations,
        converged: est.converged,
        method: est.method.as_str().to_string(),
        witness: est.witness,
    })
}

/// OLS fit of ln y against ln x: returns (slope, intercept, stderr).
#[pyfunction]
fn fit_loglog(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let fit = extremizer::fit_loglog(&points).map_err(to_py_err)?;
    Ok((fit.slope, fit.intercept, fit.stderr))
}

#[pymodule]
fn strichartz_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralField>()?;
    m.add_class::<PyGridSpec>()?;
    m.add_class::<PyPhysicalField>()?;
    m.add_class::<PyNormEstimate>()?;
    m.add_function(wrap_pyfunction!(make_grid, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(lq_norm, m)?)?;
    m.add_function(wrap_pyfunction!(hs_norm, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(family_grid, m)?)?;
    m.add_function(wrap_pyfunction!(bump_1d, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_2d, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(strichartz_ratio_family, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_sup_1d, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_2d_sup, m)?)?;
    m.add_function(wrap_pyfunction!(dispersive_profile, m)?)?;
    m.add_function(wrap_pyfunction!(objective, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_random, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_ascent, m)?)?;
    m.add_function(wrap_pyfunction!(fit_loglog, m)?)?;
    Ok(())
}
