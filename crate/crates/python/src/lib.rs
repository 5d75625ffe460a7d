//! Python bindings. Points are lists of floats, centers lists of points, and
//! memberships lists of center indices with `None` for outliers.

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sampclust::datagen::{self, AdversarialSpec, PointFormat, SyntheticSpec};
use sampclust::rng::seeded;
use sampclust::{harness, objective, sampler, selector, subroutines};
use sampclust::{Budget, CandidateSet, CenterSet, FrameworkConfig, Label, ObjectiveKind, SampleBudget, Variant};

fn err(e: sampclust::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn kind(s: &str) -> PyResult<ObjectiveKind> {
    s.parse().map_err(err)
}

fn variant(s: &str) -> PyResult<Variant> {
    s.parse().map_err(err)
}

fn centers(rows: Vec<Vec<f64>>) -> PyResult<CenterSet> {
    CenterSet::from_rows(&rows).map_err(err)
}

/// A point set with optional ground-truth labels.
#[pyclass(name = "Dataset", module = "sampclust")]
struct PyDataset {
    inner: sampclust::Dataset,
}

#[pymethods]
impl PyDataset {
    /// `labels[i]` is a cluster id, or `None` for an outlier.
    #[new]
    #[pyo3(signature = (rows, labels=None, name="data"))]
    fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<Option<u32>>>, name: &str) -> PyResult<Self> {
        let mut inner = sampclust::Dataset::from_rows(name, &rows).map_err(err)?;
        if let Some(ls) = labels {
            inner = inner
                .with_labels(ls.into_iter().map(|l| l.map_or(Label::Outlier, Label::Cluster)).collect())
                .map_err(err)?;
        }
        Ok(PyDataset { inner })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let inner = datagen::load_points(&path, PointFormat::default()).map_err(err)?;
        Ok(PyDataset { inner })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        datagen::save_points(&self.inner, &path).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn point(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.len() {
            return Err(PyIndexError::new_err(format!("point {i} out of range")));
        }
        Ok(self.inner.point(i).to_vec())
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.points().map(<[f64]>::to_vec).collect()
    }

    fn labels(&self) -> Option<Vec<Option<u32>>> {
        self.inner.labels().map(|ls| {
            ls.iter()
                .map(|l| match l {
                    Label::Cluster(c) => Some(*c),
                    Label::Outlier => None,
                })
                .collect()
        })
    }

    fn __repr__(&self) -> String {
        format!("Dataset(name={:?}, n={}, dim={})", self.inner.name(), self.inner.len(), self.inner.dim())
    }
}

/// Centers, memberships and the trimmed objective of a clustering.
#[pyclass(name = "ClusteringResult", module = "sampclust", frozen)]
struct PyClusteringResult {
    inner: sampclust::ClusteringResult,
}

#[pymethods]
impl PyClusteringResult {
    #[getter]
    fn centers(&self) -> Vec<Vec<f64>> {
        self.inner.centers.to_rows()
    }

    #[getter]
    fn memberships(&self) -> Vec<Option<usize>> {
        self.inner.memberships.iter().map(|m| m.center()).collect()
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }

    #[getter]
    fn outlier_count(&self) -> usize {
        self.inner.outlier_count
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    fn outlier_indices(&self) -> Vec<usize> {
        self.inner.outlier_indices()
    }

    fn __repr__(&self) -> String {
        format!(
            "ClusteringResult(kind={}, centers={}, outliers={}, objective={})",
            self.inner.kind,
            self.inner.centers.len(),
            self.inner.outlier_count,
            self.inner.objective
        )
    }
}

fn wrap(inner: sampclust::ClusteringResult) -> PyClusteringResult {
    PyClusteringResult { inner }
}

/// Distance from `p` to its nearest center, and that center's index.
#[pyfunction]
fn dist_to_set(p: Vec<f64>, centers_: Vec<Vec<f64>>) -> PyResult<(f64, usize)> {
    objective::dist_to_set(&p, &centers(centers_)?).map_err(err)
}

#[pyfunction]
fn objective_with_outliers(data: &PyDataset, centers_: Vec<Vec<f64>>, z: usize, kind_: &str) -> PyResult<f64> {
    objective::objective_with_outliers(&data.inner, &centers(centers_)?, z, kind(kind_)?).map_err(err)
}

/// Sum of squared distances to the nearest center.
#[pyfunction]
fn cost(data: &PyDataset, centers_: Vec<Vec<f64>>) -> PyResult<f64> {
    objective::cost(&data.inner, &centers(centers_)?).map_err(err)
}

#[pyfunction]
fn assign_memberships(
    data: &PyDataset,
    centers_: Vec<Vec<f64>>,
    z: usize,
    kind_: &str,
) -> PyResult<PyClusteringResult> {
    objective::assign_memberships(&data.inner, &centers(centers_)?, z, kind(kind_)?).map(wrap).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (data, k, seed=0))]
fn gonzalez_kcenter(data: &PyDataset, k: usize, seed: u64) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let s = subroutines::gonzalez_kcenter(&data.inner, k, &mut seeded(seed)).map_err(err)?;
    Ok((s.centers.to_rows(), s.radius))
}

#[pyfunction]
fn charikar_kcenter_outliers(data: &PyDataset, k: usize, z: usize) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let s = subroutines::charikar_kcenter_outliers(&data.inner, k, z).map_err(err)?;
    Ok((s.centers.to_rows(), s.radius))
}

fn direct_config(
    variant_: &str,
    kind_: &str,
    k: usize,
    z: usize,
    sample_size: usize,
    extra: usize,
    seed: u64,
) -> PyResult<FrameworkConfig> {
    Ok(FrameworkConfig {
        variant: variant(variant_)?,
        kind: kind(kind_)?,
        k,
        z,
        budget: Budget::Direct(SampleBudget { sample_size, extra }),
        iter: Default::default(),
        seed,
    })
}

/// One sample-then-solve run; returns the centers.
#[pyfunction]
#[pyo3(signature = (data, variant, kind, k, z, sample_size, extra, seed=0))]
#[allow(clippy::too_many_arguments)]
fn run_framework(
    data: &PyDataset,
    variant: &str,
    kind: &str,
    k: usize,
    z: usize,
    sample_size: usize,
    extra: usize,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    let cfg = direct_config(variant, kind, k, z, sample_size, extra, seed)?;
    let run = sampler::run_framework(&data.inner, &cfg, &mut seeded(seed)).map_err(err)?;
    Ok(run.centers.to_rows())
}

/// Best of `runs` framework runs, selected in one pass over the data.
#[pyfunction]
#[pyo3(signature = (data, variant, kind, k, z, sample_size, extra, runs=1, seed=0))]
#[allow(clippy::too_many_arguments)]
fn boosted_run(
    data: &PyDataset,
    variant: &str,
    kind: &str,
    k: usize,
    z: usize,
    sample_size: usize,
    extra: usize,
    runs: usize,
    seed: u64,
) -> PyResult<PyClusteringResult> {
    let cfg = direct_config(variant, kind, k, z, sample_size, extra, seed)?;
    let b = selector::boosted_run(&data.inner, &cfg, runs, &mut seeded(seed)).map_err(err)?;
    Ok(wrap(b.result))
}

/// Index of the best candidate and its clustering.
#[pyfunction]
fn one_pass_select(
    data: &PyDataset,
    candidates: Vec<Vec<Vec<f64>>>,
    z: usize,
    kind_: &str,
) -> PyResult<(usize, PyClusteringResult)> {
    let cands = candidates.into_iter().map(centers).collect::<PyResult<Vec<_>>>()?;
    let cands = CandidateSet::new(cands).map_err(err)?;
    let s = selector::one_pass_select(&data.inner, &cands, z, kind(kind_)?).map_err(err)?;
    Ok((s.best_index, wrap(s.result)))
}

fn truth_dict<'py>(py: Python<'py>, t: &datagen::GroundTruth) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("generating_centers", t.generating_centers.to_rows())?;
    d.set_item("cluster_sizes", t.cluster_sizes.clone())?;
    d.set_item("r_bound", t.r_bound.clone())?;
    d.set_item("diameter", t.diameter)?;
    let (e1, e2) = t.realized_epsilons();
    d.set_item("epsilon1", e1)?;
    d.set_item("epsilon2", e2)?;
    Ok(d)
}

/// Gaussian clusters plus uniform outliers outside every cluster ball.
#[pyfunction]
#[pyo3(signature = (k, n, z, dim, side=400.0, sigma=1000f64.sqrt(), min_cluster_frac=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn gen_synthetic<'py>(
    py: Python<'py>,
    k: usize,
    n: usize,
    z: usize,
    dim: usize,
    side: f64,
    sigma: f64,
    min_cluster_frac: Option<f64>,
    seed: u64,
) -> PyResult<(PyDataset, Bound<'py, PyDict>)> {
    let spec = SyntheticSpec {
        k,
        n,
        z,
        dim,
        side,
        sigma,
        min_cluster_frac: min_cluster_frac.unwrap_or(1.0 / k.max(1) as f64),
        seed,
    };
    let (inner, truth) = datagen::gen_synthetic(&spec).map_err(err)?;
    Ok((PyDataset { inner }, truth_dict(py, &truth)?))
}

/// Coincident clusters and isolated outliers spaced `x` apart on one axis.
#[pyfunction]
#[pyo3(signature = (cluster_sizes, z, x, dim=1))]
fn gen_adversarial<'py>(
    py: Python<'py>,
    cluster_sizes: Vec<usize>,
    z: usize,
    x: f64,
    dim: usize,
) -> PyResult<(PyDataset, Bound<'py, PyDict>)> {
    let spec = AdversarialSpec { k: cluster_sizes.len(), cluster_sizes, z, x, dim };
    let (inner, truth) = datagen::gen_adversarial(&spec).map_err(err)?;
    Ok((PyDataset { inner }, truth_dict(py, &truth)?))
}

fn labels_of(data: &PyDataset) -> PyResult<&[Label]> {
    data.inner.labels().ok_or_else(|| PyValueError::new_err("dataset has no labels"))
}

/// Fraction of true outliers the result discards; `None` without true outliers.
#[pyfunction]
fn precision(result: &PyClusteringResult, data: &PyDataset) -> PyResult<Option<f64>> {
    harness::precision(&result.inner, labels_of(data)?).map_err(err)
}

#[pyfunction]
fn purity(result: &PyClusteringResult, data: &PyDataset) -> PyResult<f64> {
    harness::purity(&result.inner, labels_of(data)?).map_err(err)
}

#[pyfunction]
fn sample_size_alg1(k: usize, epsilon1: f64, eta: f64) -> usize {
    sampler::sample_size_alg1(k, epsilon1, eta)
}

#[pyfunction]
fn sample_size_concentration(k: usize, epsilon1: f64, delta: f64, eta: f64) -> usize {
    sampler::sample_size_concentration(k, epsilon1, delta, eta)
}

#[pyfunction]
fn sample_size_means(k: usize, epsilon1: f64, delta: f64, xi: f64, eta: f64) -> usize {
    sampler::sample_size_means(k, epsilon1, delta, xi, eta)
}

#[pyfunction]
fn budget_extra(eta: f64, epsilon2: f64, k: usize, sample_size: usize) -> usize {
    sampler::budget_extra(eta, epsilon2, k, sample_size)
}

#[pymodule]
#[pyo3(name = "sampclust")]
fn sampclust_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyClusteringResult>()?;
    m.add_function(wrap_pyfunction!(dist_to_set, m)?)?;
    m.add_function(wrap_pyfunction!(objective_with_outliers, m)?)?;
    m.add_function(wrap_pyfunction!(cost, m)?)?;
    m.add_function(wrap_pyfunction!(assign_memberships, m)?)?;
    m.add_function(wrap_pyfunction!(gonzalez_kcenter, m)?)?;
    m.add_function(wrap_pyfunction!(charikar_kcenter_outliers, m)?)?;
    m.add_function(wrap_pyfunction!(run_framework, m)?)?;
    m.add_function(wrap_pyfunction!(boosted_run, m)?)?;
    m.add_function(wrap_pyfunction!(one_pass_select, m)?)?;
    m.add_function(wrap_pyfunction!(gen_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(gen_adversarial, m)?)?;
    m.add_function(wrap_pyfunction!(precision, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    m.add_function(wrap_pyfunction!(sample_size_alg1, m)?)?;
    m.add_function(wrap_pyfunction!(sample_size_concentration, m)?)?;
    m.add_function(wrap_pyfunction!(sample_size_means, m)?)?;
    m.add_function(wrap_pyfunction!(budget_extra, m)?)?;
    Ok(())
}
