//! Python bindings for the blockmodel library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sbm_core::bounds;
use sbm_core::fit::{gibbs_fit as core_gibbs_fit, SamplerConfig};
use sbm_core::harness;
use sbm_core::logit::{self, CovariateTable};
use sbm_core::netcore;
use sbm_core::synth;
use sbm_core::SbmError;

fn err(e: SbmError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Undirected simple graph on nodes `0..n`.
#[pyclass(name = "Graph", module = "sbm", skip_from_py_object)]
#[derive(Clone)]
pub struct PyGraph {
    inner: netcore::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: netcore::Graph::from_edges(n, edges).map_err(err)? })
    }

    /// Reads a whitespace-separated edge list; `#` lines are skipped.
    #[staticmethod]
    #[pyo3(signature = (path, n=None))]
    fn read_edge_list(path: &str, n: Option<usize>) -> PyResult<Self> {
        Ok(Self { inner: harness::read_edge_list(path, n).map_err(err)? })
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.inner.n_nodes() && j < self.inner.n_nodes() && self.inner.has_edge(i, j)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n_nodes={}, edge_count={})", self.inner.n_nodes(), self.inner.edge_count())
    }
}

/// Class labels `0..k` for every node.
#[pyclass(name = "ClassAssignment", module = "sbm", skip_from_py_object)]
#[derive(Clone)]
pub struct PyAssignment {
    inner: netcore::ClassAssignment,
}

#[pymethods]
impl PyAssignment {
    #[new]
    fn new(labels: Vec<usize>, k: usize) -> PyResult<Self> {
        Ok(Self { inner: netcore::ClassAssignment::new(labels, k).map_err(err)? })
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn class_sizes(&self) -> Vec<usize> {
        self.inner.class_sizes()
    }

    fn __len__(&self) -> usize {
        self.inner.n_nodes()
    }

    fn __repr__(&self) -> String {
        format!("ClassAssignment(n_nodes={}, k={})", self.inner.n_nodes(), self.inner.k())
    }
}

/// Edge probabilities `P_ij` for all pairs.
#[pyclass(name = "ProbabilityMatrix", module = "sbm", skip_from_py_object)]
#[derive(Clone)]
pub struct PyProbabilities {
    inner: netcore::ProbabilityMatrix,
}

#[pymethods]
impl PyProbabilities {
    #[staticmethod]
    fn constant(n: usize, p: f64) -> PyResult<Self> {
        Ok(Self { inner: netcore::ProbabilityMatrix::constant(n, p).map_err(err)? })
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.n_nodes();
        if i == j || i >= n || j >= n {
            return Err(PyValueError::new_err(format!("({i}, {j}) is not a pair of distinct nodes below {n}")));
        }
        Ok(self.inner.get(i, j))
    }

    fn expected_edges(&self) -> f64 {
        self.inner.expected_edges()
    }
}

#[pyclass(name = "FitResult", module = "sbm", get_all)]
pub struct PyFitResult {
    best_z: PyAssignment,
    best_profile_loglik: f64,
    trace: Vec<f64>,
    sweeps_run: usize,
}

#[pymethods]
impl PyFitResult {
    fn __repr__(&self) -> String {
        format!("FitResult(best_profile_loglik={}, sweeps_run={})", self.best_profile_loglik, self.sweeps_run)
    }
}

#[pyfunction]
fn bernoulli_kl(p: f64, q: f64) -> PyResult<f64> {
    netcore::bernoulli_kl(p, q).map_err(err)
}

#[pyfunction]
fn kl_confidence_bound(n: usize, k: usize, delta: f64) -> PyResult<f64> {
    bounds::kl_confidence_bound(n, k, delta).map_err(err)
}

/// Returns `(raw, normalized)`.
#[pyfunction]
fn rms_bound_from_kl(epsilon_kl: f64, n: usize) -> PyResult<(f64, f64)> {
    let b = bounds::rms_bound_from_kl(epsilon_kl, n).map_err(err)?;
    Ok((b.raw, b.normalized))
}

#[pyfunction]
fn profile_log_likelihood(g: &PyGraph, z: &PyAssignment) -> PyResult<f64> {
    netcore::profile_log_likelihood(&g.inner, &z.inner).map_err(err)
}

/// Block edge proportions; NaN marks blocks without pairs.
#[pyfunction]
fn theta_hat(g: &PyGraph, z: &PyAssignment) -> PyResult<Vec<Vec<f64>>> {
    Ok(netcore::theta_hat(&netcore::block_stats(&g.inner, &z.inner).map_err(err)?).to_rows())
}

#[pyfunction]
fn observed_kl_error(g: &PyGraph, p: &PyProbabilities, z: &PyAssignment) -> PyResult<f64> {
    bounds::observed_kl_error(&g.inner, &p.inner, &z.inner).map_err(err)
}

#[pyfunction]
fn observed_rms_error(g: &PyGraph, p: &PyProbabilities, z: &PyAssignment) -> PyResult<f64> {
    bounds::observed_rms_error(&g.inner, &p.inner, &z.inner).map_err(err)
}

#[pyfunction]
fn likelihood_error_stat(g: &PyGraph, p: &PyProbabilities, z: &PyAssignment) -> PyResult<f64> {
    harness::likelihood_error_stat(&g.inner, &p.inner, &z.inner).map_err(err)
}

#[pyfunction]
fn misclassification_count(z_true: &PyAssignment, z_est: &PyAssignment) -> PyResult<usize> {
    harness::misclassification_count(&z_true.inner, &z_est.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (g, k, sweeps=None, restarts=5, seed=0))]
fn gibbs_fit(py: Python<'_>, g: &PyGraph, k: usize, sweeps: Option<usize>, restarts: usize, seed: u64) -> PyResult<PyFitResult> {
    let mut cfg = SamplerConfig::new(k, g.inner.n_nodes()).with_restarts(restarts).with_seed(seed);
    if let Some(s) = sweeps {
        cfg = cfg.with_sweeps(s);
    }
    let graph = g.inner.clone();
    let fit = py.detach(move || core_gibbs_fit(&graph, &cfg)).map_err(err)?;
    Ok(PyFitResult {
        best_z: PyAssignment { inner: fit.best_z },
        best_profile_loglik: fit.best_profile_loglik,
        trace: fit.trace,
        sweeps_run: fit.sweeps_run,
    })
}

#[pyfunction]
fn gen_er(n: usize, p: f64, seed: u64) -> PyResult<(PyGraph, PyProbabilities)> {
    let (g, probs) = synth::gen_er(n, p, seed).map_err(err)?;
    Ok((PyGraph { inner: g }, PyProbabilities { inner: probs }))
}

/// Balanced planted model with `alpha + beta` within classes and `beta`
/// between; returns `(graph, probabilities, true classes)`.
#[pyfunction]
fn gen_blockmodel(n: usize, k: usize, alpha: f64, beta: f64, seed: u64) -> PyResult<(PyGraph, PyProbabilities, PyAssignment)> {
    let model = synth::PlantedModel::new(n, k, alpha, beta).map_err(err)?;
    let (g, probs) = synth::gen_blockmodel(&model, seed).map_err(err)?;
    Ok((PyGraph { inner: g }, PyProbabilities { inner: probs }, PyAssignment { inner: model.z_bar }))
}

/// `(alpha, beta)` of the calibrated planted model.
#[pyfunction]
fn calibrate_planted(n: usize, k: usize, target_m: f64, gamma: f64) -> PyResult<(f64, f64)> {
    let m = synth::calibrate_planted(n, k, target_m, gamma).map_err(err)?;
    Ok((m.alpha, m.beta))
}

/// Logit blockmodel fit. `covariates` is a list of per-node level-index
/// lists. Returns a dict with `labels`, `theta_tilde`, `beta`, `loglik`
/// and `bic`.
#[pyfunction]
#[pyo3(signature = (g, k, covariates=Vec::new(), sweeps=None, restarts=5, seed=0))]
fn logit_fit<'py>(
    py: Python<'py>,
    g: &PyGraph,
    k: usize,
    covariates: Vec<Vec<usize>>,
    sweeps: Option<usize>,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let n = g.inner.n_nodes();
    let covs = covariates
        .into_iter()
        .enumerate()
        .map(|(c, levels)| {
            let n_levels = levels.iter().max().map_or(2, |m| (m + 1).max(2));
            logit::Covariate::from_indices(format!("x{c}"), levels, n_levels)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let design = logit::build_pair_design(&CovariateTable::new(n, covs).map_err(err)?);
    let mut sampler = SamplerConfig::new(k, n).with_restarts(restarts).with_seed(seed);
    if let Some(s) = sweeps {
        sampler = sampler.with_sweeps(s);
    }
    let cfg = logit::AlternatingConfig::new(sampler);
    let graph = g.inner.clone();
    let fit = py.detach(|| logit::alternating_fit(&graph, &design, &cfg)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("labels", fit.model.z.labels().to_vec())?;
    out.set_item("theta_tilde", fit.model.theta_tilde.to_rows())?;
    out.set_item("beta", fit.model.beta.clone())?;
    out.set_item("loglik", fit.loglik)?;
    out.set_item("bic", logit::bic_from_loglik(fit.loglik, k, design.dim_beta(), n))?;
    Ok(out)
}

#[pymodule]
fn sbm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyAssignment>()?;
    m.add_class::<PyProbabilities>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(bernoulli_kl, m)?)?;
    m.add_function(wrap_pyfunction!(kl_confidence_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rms_bound_from_kl, m)?)?;
    m.add_function(wrap_pyfunction!(profile_log_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(theta_hat, m)?)?;
    m.add_function(wrap_pyfunction!(observed_kl_error, m)?)?;
    m.add_function(wrap_pyfunction!(observed_rms_error, m)?)?;
    m.add_function(wrap_pyfunction!(likelihood_error_stat, m)?)?;
    m.add_function(wrap_pyfunction!(misclassification_count, m)?)?;
    m.add_function(wrap_pyfunction!(gibbs_fit, m)?)?;
    m.add_function(wrap_pyfunction!(gen_er, m)?)?;
    m.add_function(wrap_pyfunction!(gen_blockmodel, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_planted, m)?)?;
    m.add_function(wrap_pyfunction!(logit_fit, m)?)?;
    Ok(())
}
