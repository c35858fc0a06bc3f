//! Python bindings. Scalars cross the boundary as strings ("3", "-2/5") so
//! exactness survives; plain Python ints are accepted on input.

use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

use cartan_cover::algebra::{Field, Matrix, MatrixSubspace, Scalar};
use cartan_cover::cartan::{classify_subspace, simultaneous_eigenlines};
use cartan_cover::cover::CoverRep;
use cartan_cover::factor::{block_systems_bounded, monodromy_generators, MAX_BLOCK_DEGREE};
use cartan_cover::graph::BaseGraph;
use cartan_cover::io::{
    cmd_classify, cmd_cover_build, cmd_factor, cmd_pushforward, cmd_selftest, error_outcome, parse_field_flag,
    InstanceFile, Options,
};
use cartan_cover::parabolic::{local_flags as flags_model, tameness_check, ParabolicWeight};
use cartan_cover::selftest::SelfTestConfig;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn texts(v: &[Scalar]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn scalar(field: Field, obj: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    if let Ok(n) = obj.extract::<i64>() {
        return Ok(field.int(n));
    }
    let text: String = obj.str()?.extract()?;
    field.parse(&text).map_err(value_err)
}

#[pyclass(name = "Field", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyField(Field);

#[pymethods]
impl PyField {
    /// `Q`, `GF(p)` or a bare prime.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        parse_field_flag(spec).map(PyField).map_err(value_err)
    }

    #[getter]
    fn characteristic(&self) -> u64 {
        self.0.characteristic()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Field('{}')", self.0)
    }
}

#[pyclass(name = "Matrix", frozen, from_py_object)]
#[derive(Clone)]
struct PyMatrix(Matrix);

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(field: &PyField, rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|x| scalar(field.0, x)).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        Matrix::from_rows(field.0, rows).map(PyMatrix).map_err(value_err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.rows(), self.0.cols())
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField(self.0.field())
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0.to_rows().iter().map(|r| texts(r)).collect()
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn min_poly(&self) -> PyResult<String> {
        self.0.min_poly().map(|p| p.to_string()).map_err(value_err)
    }

    fn inverse(&self) -> PyResult<PyMatrix> {
        self.0.inverse().map(PyMatrix).ok_or_else(|| PyZeroDivisionError::new_err("matrix is singular"))
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<PyMatrix> {
        if self.0.cols() != other.0.rows() || self.0.field() != other.0.field() {
            return Err(PyValueError::new_err("incompatible matrices"));
        }
        Ok(PyMatrix(self.0.mul(&other.0)))
    }

    fn __eq__(&self, other: &PyMatrix) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

fn subspace(matrices: &[PyMatrix]) -> PyResult<(MatrixSubspace, usize)> {
    let first = matrices.first().ok_or_else(|| PyValueError::new_err("need at least one matrix"))?;
    let (field, d) = (first.0.field(), first.0.rows());
    let ms: Vec<Matrix> = matrices.iter().map(|m| m.0.clone()).collect();
    let a = MatrixSubspace::new(field, d, &ms).map_err(value_err)?;
    Ok((a, d))
}

/// Returns `(status, verdict)` for the span of `matrices`.
#[pyfunction]
fn classify(matrices: Vec<PyMatrix>) -> PyResult<(String, String)> {
    let (a, d) = subspace(&matrices)?;
    let v = classify_subspace(&a, d).map_err(value_err)?;
    Ok((format!("{:?}", v.status()), v.to_string()))
}

/// Simultaneous eigenlines of a split Cartan span, with the eigenvalue of
/// each canonical basis matrix on each line.
#[pyfunction]
fn eigenlines(matrices: Vec<PyMatrix>) -> PyResult<(Vec<Vec<String>>, Vec<Vec<String>>)> {
    let (a, _) = subspace(&matrices)?;
    let set = simultaneous_eigenlines(&a).map_err(value_err)?;
    Ok((set.lines.iter().map(|l| texts(l)).collect(), set.functionals.iter().map(|l| texts(l)).collect()))
}

/// `(weight, dim F_l)` for `l < b` in the local flag of ramification index
/// `b` and weight `lam` in [0, 1). `F_b` is zero and carries no weight.
#[pyfunction]
fn local_flags(b: usize, lam: &str) -> PyResult<Vec<(String, usize)>> {
    if b == 0 {
        return Err(PyValueError::new_err("ramification index must be positive"));
    }
    let lam = ParabolicWeight::parse(lam).map_err(value_err)?;
    let model = flags_model(b, &lam);
    Ok(model.weights.iter().zip(&model.subspaces).map(|(w, s)| (w.to_string(), s.dim())).collect())
}

/// Whether each weight has a reduced denominator prime to `p`.
#[pyfunction]
fn tameness(weights: Vec<String>, p: u64) -> PyResult<Vec<bool>> {
    let ws = weights.iter().map(|w| ParabolicWeight::parse(w)).collect::<Result<Vec<_>, _>>().map_err(value_err)?;
    Ok(tameness_check(&ws, p))
}

/// Proper block systems of the monodromy of a cover. `sigma` holds one
/// 1-based image list per edge; blocks come back 1-based.
#[pyfunction]
#[pyo3(signature = (vertices, edges, degree, sigma, max_degree = MAX_BLOCK_DEGREE))]
fn block_systems(
    vertices: usize,
    edges: Vec<(usize, usize)>,
    degree: usize,
    sigma: Vec<Vec<usize>>,
    max_degree: usize,
) -> PyResult<Vec<Vec<Vec<usize>>>> {
    let base = BaseGraph::new(vertices, edges).map_err(value_err)?;
    let sigma = sigma
        .into_iter()
        .map(|s| s.into_iter().map(|x| x.checked_sub(1)).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| PyValueError::new_err("fiber labels are 1-based"))?;
    let cover = CoverRep::new(base, degree, sigma).map_err(value_err)?;
    let systems = block_systems_bounded(&monodromy_generators(&cover), max_degree).map_err(value_err)?;
    Ok(systems
        .proper
        .iter()
        .map(|b| b.blocks().iter().map(|blk| blk.iter().map(|x| x + 1).collect()).collect())
        .collect())
}

/// Runs a CLI command on an instance JSON string and returns
/// `(exit_code, machine_report)`.
#[pyfunction]
#[pyo3(signature = (command, instance, field = None, max_degree = MAX_BLOCK_DEGREE))]
fn run(command: &str, instance: &str, field: Option<&str>, max_degree: usize) -> PyResult<(u8, String)> {
    let cmd = match command {
        "classify" => cmd_classify,
        "cover-build" => cmd_cover_build,
        "pushforward" => cmd_pushforward,
        "factor" => cmd_factor,
        other => return Err(PyValueError::new_err(format!("unknown command {other}"))),
    };
    let outcome = field
        .map(parse_field_flag)
        .transpose()
        .and_then(|field| cmd(&InstanceFile::from_json(instance)?, &Options { field, max_degree }))
        .unwrap_or_else(|e| error_outcome(command, &e));
    Ok((outcome.exit.code(), outcome.report.to_machine()))
}

#[pyfunction]
#[pyo3(signature = (seed = 1, count = 10))]
fn selftest(seed: u64, count: u64) -> (u8, String) {
    let outcome = cmd_selftest(&SelfTestConfig::new(seed, count));
    (outcome.exit.code(), outcome.report.to_machine())
}

#[pymodule]
#[pyo3(name = "cartan_cover")]
fn cartan_cover_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(eigenlines, m)?)?;
    m.add_function(wrap_pyfunction!(local_flags, m)?)?;
    m.add_function(wrap_pyfunction!(tameness, m)?)?;
    m.add_function(wrap_pyfunction!(block_systems, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
