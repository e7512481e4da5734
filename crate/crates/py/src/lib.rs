//! Python module `qspec`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use qspec_core::qlaurent::{self, QPoint};
use qspec_core::repcore;
use qspec_core::root_system::{RootSystem, Weight};
use qspec_core::spectral::{self, Kernel, ModelConfig, WeightKind};
use qspec_core::twisted_trace::{self, DenseOperator, DiagonalOperator, ShiftWeights};
use qspec_core::verify::{self, Profile};
use qspec_core::weight_oracle::{self, Twist, DEFAULT_PATTERN_CAP};
use qspec_core::Error;

create_exception!(qspec, ResourceError, PyRuntimeError, "A computational budget was exceeded.");

fn err(e: Error) -> PyErr {
    if e.is_resource() {
        ResourceError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rank_weight(ell: usize, weight: Vec<i64>) -> PyResult<(RootSystem, Weight)> {
    let rs = RootSystem::new(ell).map_err(err)?;
    let w = Weight::new(weight);
    rs.check(&w).map_err(err)?;
    Ok((rs, w))
}

fn weight_kind(name: &str) -> PyResult<WeightKind> {
    match name {
        "qdim" => Ok(WeightKind::Qdim),
        "qdim-inverse" => Ok(WeightKind::QdimInverse),
        "classical" => Ok(WeightKind::Classical),
        "count" => Ok(WeightKind::Count),
        other => Err(PyValueError::new_err(format!("unknown weight {other:?} (qdim, qdim-inverse, classical, count)"))),
    }
}

fn kernel(name: &str) -> PyResult<Kernel> {
    match name {
        "shifted" => Ok(Kernel::Shifted),
        "pure" => Ok(Kernel::Pure),
        other => Err(PyValueError::new_err(format!("unknown kernel {other:?} (shifted, pure)"))),
    }
}

/// Laurent polynomial in q with integer coefficients.
#[pyclass(name = "LaurentPoly", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyLaurentPoly(qlaurent::LaurentPoly);

#[pymethods]
impl PyLaurentPoly {
    /// `(exponent, coefficient)` pairs in ascending exponent order.
    fn terms(&self) -> Vec<(i64, BigInt)> {
        self.0.terms().map(|(e, c)| (e, c.clone())).collect()
    }

    fn eval(&self, q: f64) -> PyResult<f64> {
        Ok(self.0.eval(QPoint::new(q).map_err(err)?))
    }

    fn is_palindromic(&self) -> bool {
        self.0.is_palindromic()
    }

    fn coefficient_sum(&self) -> BigInt {
        self.0.coefficient_sum()
    }

    fn bar(&self) -> Self {
        PyLaurentPoly(self.0.bar())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LaurentPoly({})", self.0)
    }
}

#[pyclass(name = "QuantumDimension", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuantumDimension(repcore::QuantumDimension);

#[pymethods]
impl PyQuantumDimension {
    #[getter]
    fn exact(&self) -> PyLaurentPoly {
        PyLaurentPoly(self.0.exact.clone())
    }

    #[getter]
    fn classical_value(&self) -> BigInt {
        self.0.classical_value.clone()
    }

    fn __repr__(&self) -> String {
        format!("QuantumDimension(exact={}, classical_value={})", self.0.exact, self.0.classical_value)
    }
}

/// `[x] = (q^x − q^{-x}) / (q − q^{-1})`.
#[pyfunction]
fn qnum(x: i64) -> PyResult<PyLaurentPoly> {
    qlaurent::qnum(x).map(PyLaurentPoly).map_err(err)
}

#[pyfunction]
fn quantum_dim(ell: usize, weight: Vec<i64>) -> PyResult<PyQuantumDimension> {
    let (rs, w) = rank_weight(ell, weight)?;
    repcore::quantum_dim(&rs, &w).map(PyQuantumDimension).map_err(err)
}

#[pyfunction]
fn classical_dim(ell: usize, weight: Vec<i64>) -> PyResult<BigInt> {
    let (rs, w) = rank_weight(ell, weight)?;
    repcore::classical_dim(&rs, &w).map_err(err)
}

#[pyfunction]
fn quantum_dim_numeric(ell: usize, weight: Vec<i64>, q: f64) -> PyResult<f64> {
    let (rs, w) = rank_weight(ell, weight)?;
    repcore::quantum_dim_numeric(&rs, &w, QPoint::new(q).map_err(err)?).map_err(err)
}

/// Character at `K_{2ρ}` (or its inverse) from GT-pattern multiplicities.
#[pyfunction]
#[pyo3(signature = (ell, weight, inverse = false))]
fn char_at_k2rho(ell: usize, weight: Vec<i64>, inverse: bool) -> PyResult<PyLaurentPoly> {
    let (rs, w) = rank_weight(ell, weight)?;
    let twist = if inverse { Twist::Inverse } else { Twist::Direct };
    weight_oracle::char_at_k2rho(&rs, &w, twist, DEFAULT_PATTERN_CAP).map(PyLaurentPoly).map_err(err)
}

/// Weight multiplicities as `{weight tuple: multiplicity}`.
#[pyfunction]
#[pyo3(signature = (ell, weight, method = "gt", cap = DEFAULT_PATTERN_CAP))]
fn multiplicities<'py>(
    py: Python<'py>,
    ell: usize,
    weight: Vec<i64>,
    method: &str,
    cap: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let (rs, w) = rank_weight(ell, weight)?;
    let table = match method {
        "gt" => weight_oracle::multiplicities_gt(&rs, &w, cap),
        "freudenthal" => weight_oracle::multiplicities_freudenthal(&rs, &w, cap),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?} (gt, freudenthal)"))),
    }
    .map_err(err)?;
    let d = PyDict::new(py);
    for (k, v) in table.entries {
        d.set_item(PyTuple::new(py, k.into_coords())?, v)?;
    }
    Ok(d)
}

/// `(family slope, [row slopes])` for `(m + c1) ω_1 + n_a ω_a + (m + c2) ω_ℓ`.
#[pyfunction]
#[pyo3(signature = (ell, c1 = 0, c2 = 0, middle = None))]
fn family_slopes(ell: usize, c1: i64, c2: i64, middle: Option<(usize, i64)>) -> PyResult<(i64, Vec<i64>)> {
    let rs = RootSystem::new(ell).map_err(err)?;
    let f = repcore::HighestWeightFamily::projective(&rs, c1, c2, middle).map_err(err)?;
    let rows = (1..=ell).map(|i| repcore::si_slope(&rs, &f, i)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    Ok((repcore::family_slope(&f), rows))
}

/// The `2ℓ`-tower spectral model.
#[pyclass(name = "SpectrumModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpectrumModel(spectral::SpectrumModel);

#[pymethods]
impl PySpectrumModel {
    #[new]
    #[pyo3(signature = (ell, q, twist = 0))]
    fn new(ell: usize, q: f64, twist: i64) -> PyResult<Self> {
        spectral::default_model(ell, twist, q, None).map(PySpectrumModel).map_err(err)
    }

    /// From a JSON model configuration (`ell`, `q`, optional `N` and `towers`).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let cfg: ModelConfig = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        cfg.build().map(PySpectrumModel).map_err(err)
    }

    /// Single tower whose zeta function is `q^{s−2ℓ}/(1 − q^{s−2ℓ})`.
    #[staticmethod]
    fn toy(ell: usize, q: f64) -> PyResult<Self> {
        spectral::toy_model(ell, q).map(PySpectrumModel).map_err(err)
    }

    #[getter]
    fn ell(&self) -> usize {
        self.0.ell
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q
    }

    fn is_toy(&self) -> bool {
        self.0.towers.len() == 1
    }

    #[pyo3(signature = (s, weight = "qdim", kernel = "shifted", tol = spectral::DEFAULT_TOL, max_terms = spectral::DEFAULT_MAX_TERMS))]
    fn zeta<'py>(
        &self,
        py: Python<'py>,
        s: f64,
        weight: &str,
        kernel: &str,
        tol: f64,
        max_terms: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let z = spectral::zeta(&self.0, s, self.weight(weight)?, self.kernel(kernel)?, tol, max_terms).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("value", z.value)?;
        d.set_item("terms_used", z.terms_used)?;
        d.set_item("tail_estimate", z.tail_estimate)?;
        d.set_item("converged", z.converged)?;
        d.set_item("per_tower_ratio", z.per_tower_ratio)?;
        Ok(d)
    }

    #[pyo3(signature = (weight = "qdim", kernel = "shifted"))]
    fn spectral_dimension(&self, weight: &str, kernel: &str) -> PyResult<f64> {
        spectral::spectral_dimension_estimate(&self.0, self.weight(weight)?, self.kernel(kernel)?)
            .map(|e| e.estimate)
            .map_err(err)
    }

    /// `lim (s − p) ζ(s)`; `p` defaults to `2ℓ`.
    #[pyo3(signature = (weight = "qdim", kernel = "pure", p = None, tol = spectral::DEFAULT_TOL))]
    fn residue(&self, weight: &str, kernel: &str, p: Option<f64>, tol: f64) -> PyResult<f64> {
        let p = p.unwrap_or(2.0 * self.0.ell as f64);
        spectral::residue_limit(&self.0, self.weight(weight)?, self.kernel(kernel)?, p, tol)
            .map(|r| r.value)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("SpectrumModel(ell={}, q={}, towers={})", self.0.ell, self.0.q, self.0.towers.len())
    }
}

impl PySpectrumModel {
    // the toy model carries its own weight and kernel
    fn weight(&self, name: &str) -> PyResult<WeightKind> {
        if self.is_toy() {
            Ok(spectral::toy_weight_kind(self.0.ell))
        } else {
            weight_kind(name)
        }
    }

    fn kernel(&self, name: &str) -> PyResult<Kernel> {
        if self.is_toy() {
            Ok(Kernel::Pure)
        } else {
            kernel(name)
        }
    }
}

/// Truncated modular datum for the twisted-trace harness.
#[pyclass(name = "ModularModel", frozen, skip_from_py_object)]
struct PyModularModel(twisted_trace::ModularModel);

#[pymethods]
impl PyModularModel {
    /// Shift model with `D_m = q^{-m}`, `Δ_m = q^{-pm}`; `weights` is
    /// `"geometric"` or `"unit"`.
    #[staticmethod]
    #[pyo3(signature = (size = 120, q = 0.5, p = 4.0, weights = "geometric"))]
    fn shift(size: usize, q: f64, p: f64, weights: &str) -> PyResult<Self> {
        let w = match weights {
            "geometric" => ShiftWeights::Geometric,
            "unit" => ShiftWeights::Unit,
            other => return Err(PyValueError::new_err(format!("unknown weights {other:?} (geometric, unit)"))),
        };
        let q = QPoint::new(q).map_err(err)?;
        twisted_trace::ModularModel::shift(size, q, p, w).map(PyModularModel).map_err(err)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    fn twisted_defect(&self, s: f64) -> PyResult<f64> {
        twisted_trace::twisted_defect(&self.0, s).map_err(err)
    }

    fn defect_scan(&self, s_values: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
        twisted_trace::twisted_defect_scan(&self.0, &s_values).map_err(err)
    }

    /// `(lhs, rhs)` of the twisted trace identity at `s`.
    fn trace_check(&self, s: f64) -> PyResult<(f64, f64)> {
        twisted_trace::twisted_trace_check(&self.0, s).map(|c| (c.lhs, c.rhs)).map_err(err)
    }

    fn weighted_trace(&self, s: f64) -> f64 {
        self.0.weighted_trace(s)
    }

    fn conjugation_bound(&self) -> f64 {
        self.0.conjugation_bound()
    }
}

/// Max-entry defect of the telescoping split of `[(D²+1)^{-s/2}, b]`.
#[pyfunction]
fn commutator_split_defect(d: Vec<f64>, b: Vec<Vec<f64>>, s: f64, k: usize) -> PyResult<f64> {
    let n = b.len();
    if b.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("b must be square"));
    }
    let m = DMatrix::from_fn(n, n, |i, j| b[i][j]);
    let d = DiagonalOperator::new(d).map_err(err)?;
    let b = DenseOperator::new(m).map_err(err)?;
    twisted_trace::commutator_split_defect(&d, &b, s, k).map_err(err)
}

#[pyfunction]
fn holder_exponents(s: f64, k: usize) -> Vec<(f64, f64)> {
    twisted_trace::holder_exponents(s, k)
}

type VerifyRows = Vec<(String, String, String)>;

/// Runs the invariant suite: `(passed, [(name, status, detail), …])`.
#[pyfunction]
#[pyo3(signature = (profile = "quick"))]
fn run_verify(py: Python<'_>, profile: &str) -> PyResult<(bool, VerifyRows)> {
    let profile: Profile = profile.parse().map_err(err)?;
    let report = py.detach(|| verify::run(profile));
    let checks = report
        .checks
        .into_iter()
        .map(|c| {
            let status = if c.passed() { "pass" } else { "fail" };
            (c.name, status.to_string(), c.detail)
        })
        .collect();
    Ok((report.passed, checks))
}

#[pymodule]
fn qspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ResourceError", m.py().get_type::<ResourceError>())?;
    m.add_class::<PyLaurentPoly>()?;
    m.add_class::<PyQuantumDimension>()?;
    m.add_class::<PySpectrumModel>()?;
    m.add_class::<PyModularModel>()?;
    m.add_function(wrap_pyfunction!(qnum, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_dim, m)?)?;
    m.add_function(wrap_pyfunction!(classical_dim, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_dim_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(char_at_k2rho, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicities, m)?)?;
    m.add_function(wrap_pyfunction!(family_slopes, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_split_defect, m)?)?;
    m.add_function(wrap_pyfunction!(holder_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
