//! Python bindings for the hit-probability analysis, placement solvers,
//! baselines, and Monte Carlo simulator.
//!
//! Thin wrappers: popularity vectors cross the boundary as plain lists,
//! models and placements as small frozen classes. File and tier indices are
//! 0-based on this surface.

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use hetcache::{
    LatencyParams, ModelError, PlacementError, PopularityProfile, ReferenceOptions, SimConfig,
    TierParams,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn popularity(q: Vec<f64>) -> PyResult<PopularityProfile> {
    PopularityProfile::new(q).map_err(value_err)
}

/// One base-station tier: density (per km²), power (watts), SIR threshold
/// (linear), cache capacity (files).
#[pyclass(frozen)]
#[derive(Clone)]
struct Tier {
    inner: TierParams,
}

#[pymethods]
impl Tier {
    #[new]
    fn new(density: f64, power: f64, sir_threshold: f64, cache_capacity: f64) -> PyResult<Self> {
        TierParams::new(density, power, sir_threshold, cache_capacity)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    /// Tier from logarithmic units: power in dBm, SIR threshold in dB.
    #[staticmethod]
    fn from_db(density: f64, power_dbm: f64, sir_db: f64, cache_capacity: f64) -> PyResult<Self> {
        Self::new(
            density,
            10f64.powf((power_dbm - 30.0) / 10.0),
            10f64.powf(sir_db / 10.0),
            cache_capacity,
        )
    }

    #[getter]
    fn density(&self) -> f64 {
        self.inner.density
    }

    #[getter]
    fn power(&self) -> f64 {
        self.inner.power
    }

    #[getter]
    fn sir_threshold(&self) -> f64 {
        self.inner.sir_threshold
    }

    #[getter]
    fn cache_capacity(&self) -> f64 {
        self.inner.cache_capacity
    }

    fn __repr__(&self) -> String {
        format!(
            "Tier(density={}, power={}, sir_threshold={}, cache_capacity={})",
            self.inner.density,
            self.inner.power,
            self.inner.sir_threshold,
            self.inner.cache_capacity
        )
    }
}

/// A multi-tier network: path-loss exponent plus ordered tiers.
#[pyclass(frozen)]
#[derive(Clone)]
struct NetworkModel {
    inner: hetcache::NetworkModel,
}

#[pymethods]
impl NetworkModel {
    #[new]
    fn new(path_loss_exponent: f64, tiers: Vec<Tier>) -> PyResult<Self> {
        hetcache::NetworkModel::new(
            path_loss_exponent,
            tiers.into_iter().map(|t| t.inner).collect(),
        )
        .map(|inner| Self { inner })
        .map_err(value_err)
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    #[getter]
    fn num_tiers(&self) -> usize {
        self.inner.num_tiers()
    }

    /// Tier weights z_k = density_k * power_k^delta.
    fn tier_weights(&self) -> Vec<f64> {
        self.inner.tier_weights()
    }

    fn __repr__(&self) -> String {
        format!(
            "NetworkModel(alpha={}, K={})",
            self.inner.path_loss_exponent(),
            self.inner.num_tiers()
        )
    }
}

/// M x K placement-probability matrix validated against a model.
#[pyclass(frozen)]
#[derive(Clone)]
struct Placement {
    inner: hetcache::PlacementMatrix,
}

#[pymethods]
impl Placement {
    #[new]
    fn new(rows: Vec<Vec<f64>>, model: &NetworkModel) -> PyResult<Self> {
        hetcache::PlacementMatrix::from_rows(rows, &model.inner)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    #[getter]
    fn num_files(&self) -> usize {
        self.inner.num_files()
    }

    #[getter]
    fn num_tiers(&self) -> usize {
        self.inner.num_tiers()
    }

    fn column_sums(&self) -> Vec<f64> {
        (0..self.inner.num_tiers())
            .map(|k| self.inner.column_sum(k))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Placement({}x{})",
            self.inner.num_files(),
            self.inner.num_tiers()
        )
    }
}

/// Solver outcome: objective, iterations, convergence, optional gaps.
#[pyclass(frozen)]
struct SolverReport {
    inner: hetcache::SolverReport,
}

#[pymethods]
impl SolverReport {
    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn duality_gap(&self) -> Option<f64> {
        self.inner.duality_gap
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverReport(objective={}, iterations={}, converged={})",
            self.inner.objective, self.inner.iterations, self.inner.converged
        )
    }
}

/// Monte Carlo estimate with standard error and 95% interval.
#[pyclass(frozen)]
struct Estimate {
    inner: hetcache::SimEstimate,
}

#[pymethods]
impl Estimate {
    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }

    #[getter]
    fn stderr(&self) -> f64 {
        self.inner.stderr
    }

    #[getter]
    fn trials(&self) -> u64 {
        self.inner.trials
    }

    #[getter]
    fn ci95(&self) -> (f64, f64) {
        self.inner.ci95
    }

    fn contains(&self, value: f64) -> bool {
        self.inner.contains(value)
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(mean={}, stderr={}, trials={})",
            self.inner.mean, self.inner.stderr, self.inner.trials
        )
    }
}

fn check_file_index(placement: &Placement, m: usize) -> PyResult<()> {
    if m >= placement.inner.num_files() {
        return Err(PyIndexError::new_err(format!(
            "file index {m} out of range for {} files",
            placement.inner.num_files()
        )));
    }
    Ok(())
}

fn check_tier_index(model: &NetworkModel, k: usize) -> PyResult<()> {
    if k >= model.inner.num_tiers() {
        return Err(PyIndexError::new_err(format!(
            "tier index {k} out of range for {} tiers",
            model.inner.num_tiers()
        )));
    }
    Ok(())
}

/// Interference function Q(beta) for stations holding the requested file.
#[pyfunction]
fn q_func(beta: f64, delta: f64) -> PyResult<f64> {
    hetcache::q_func(beta, delta).map_err(value_err)
}

/// Series evaluation of Q(beta), the independent cross-check route.
#[pyfunction]
fn q_func_series(beta: f64, delta: f64) -> PyResult<f64> {
    hetcache::q_func_series(beta, delta).map_err(value_err)
}

/// Interference function V(beta) for stations without the file.
#[pyfunction]
fn v_func(beta: f64, delta: f64) -> PyResult<f64> {
    hetcache::v_func(beta, delta).map_err(value_err)
}

/// W(beta) = 1 + Q(beta) - V(beta).
#[pyfunction]
fn w_func(beta: f64, delta: f64) -> PyResult<f64> {
    hetcache::w_func(beta, delta).map_err(value_err)
}

/// Zipf popularity over `num_files` files with the given exponent.
#[pyfunction]
fn zipf_popularity(num_files: usize, exponent: f64) -> PyResult<Vec<f64>> {
    let params = hetcache::ZipfParams::new(num_files, exponent).map_err(value_err)?;
    Ok(hetcache::zipf_popularity(&params).weights().to_vec())
}

/// Probability that a request for file `m` is served by tier `k`.
#[pyfunction]
fn association_probability(
    model: &NetworkModel,
    placement: &Placement,
    m: usize,
    k: usize,
) -> PyResult<f64> {
    check_file_index(placement, m)?;
    check_tier_index(model, k)?;
    hetcache::association_probability(&model.inner, &placement.inner, m, k).map_err(value_err)
}

/// Serving-distance density (distances in km) for file `m` served by tier `k`.
#[pyfunction]
fn serving_distance_pdf(
    model: &NetworkModel,
    placement: &Placement,
    m: usize,
    k: usize,
    r_km: f64,
) -> PyResult<f64> {
    check_file_index(placement, m)?;
    check_tier_index(model, k)?;
    hetcache::serving_distance_pdf(&model.inner, &placement.inner, m, k, r_km).map_err(value_err)
}

/// Conditional hit probability of file `m` under the given placement.
#[pyfunction]
fn conditional_hit_probability(
    model: &NetworkModel,
    placement: &Placement,
    m: usize,
) -> PyResult<f64> {
    check_file_index(placement, m)?;
    if placement.inner.num_tiers() != model.inner.num_tiers() {
        return Err(PyValueError::new_err("placement tier count mismatch"));
    }
    Ok(hetcache::conditional_hit_probability(
        &model.inner,
        &placement.inner,
        m,
    ))
}

/// Total hit probability under the popularity distribution `q`.
#[pyfunction]
fn hit_probability(model: &NetworkModel, placement: &Placement, q: Vec<f64>) -> PyResult<f64> {
    let q = popularity(q)?;
    hetcache::hit_probability(&model.inner, &placement.inner, &q).map_err(value_err)
}

/// Mean backhaul delay in milliseconds for a given hit probability.
#[pyfunction]
fn backhaul_latency(
    hit_prob: f64,
    bs_density: f64,
    gateway_density: f64,
    c1_ms: f64,
    c2_ms: f64,
) -> PyResult<f64> {
    let params =
        LatencyParams::new(bs_density, gateway_density, c1_ms, c2_ms).map_err(value_err)?;
    hetcache::backhaul_latency(hit_prob, &params).map_err(value_err)
}

/// Optimal single-tier placement. Returns (placement list, multiplier,
/// (T0, T1) popularity thresholds).
#[pyfunction]
fn solve_single_tier(
    q: Vec<f64>,
    capacity: f64,
    beta: f64,
    delta: f64,
) -> PyResult<(Vec<f64>, f64, (f64, f64))> {
    let q = popularity(q)?;
    let sol = hetcache::solve_single_tier(&q, capacity, beta, delta).map_err(value_err)?;
    Ok((sol.p, sol.multiplier, sol.thresholds))
}

fn placement_result(
    result: Result<(hetcache::PlacementMatrix, hetcache::SolverReport), PlacementError>,
) -> PyResult<(Placement, SolverReport)> {
    let (matrix, report) = result.map_err(value_err)?;
    Ok((Placement { inner: matrix }, SolverReport { inner: report }))
}

/// Exact optimal placement for uniform SIR thresholds.
#[pyfunction]
fn solve_uniform(model: &NetworkModel, q: Vec<f64>) -> PyResult<(Placement, SolverReport)> {
    let q = popularity(q)?;
    placement_result(hetcache::solve_uniform(&model.inner, &q))
}

/// Per-tier sub-optimal placement for non-uniform SIR thresholds.
#[pyfunction]
fn solve_nonuniform_suboptimal(
    model: &NetworkModel,
    q: Vec<f64>,
) -> PyResult<(Placement, SolverReport)> {
    let q = popularity(q)?;
    placement_result(hetcache::solve_nonuniform_suboptimal(&model.inner, &q))
}

/// Dual-decomposition reference solver for small instances.
#[pyfunction]
#[pyo3(signature = (model, q, seed = 0))]
fn solve_reference(
    py: Python<'_>,
    model: &NetworkModel,
    q: Vec<f64>,
    seed: u64,
) -> PyResult<(Placement, SolverReport)> {
    let q = popularity(q)?;
    let options = ReferenceOptions {
        seed,
        ..ReferenceOptions::default()
    };
    let result = py.detach(|| hetcache::solve_reference(&model.inner, &q, &options));
    placement_result(result)
}

/// Most-popular content placement baseline.
#[pyfunction]
fn mpcp_placement(model: &NetworkModel, num_files: usize) -> PyResult<Placement> {
    hetcache::mpcp_placement(&model.inner, num_files)
        .map(|inner| Placement { inner })
        .map_err(value_err)
}

/// Hybrid content placement baseline (two-tier networks).
#[pyfunction]
fn hcp_placement(model: &NetworkModel, q: Vec<f64>) -> PyResult<Placement> {
    let q = popularity(q)?;
    hetcache::hcp_placement(&model.inner, &q)
        .map(|inner| Placement { inner })
        .map_err(value_err)
}

/// Monte Carlo estimate of the conditional hit probability of file `m`.
#[pyfunction]
#[pyo3(signature = (model, placement, m, region_radius_km, trials, seed = 0))]
fn simulate_conditional_hit(
    py: Python<'_>,
    model: &NetworkModel,
    placement: &Placement,
    m: usize,
    region_radius_km: f64,
    trials: u64,
    seed: u64,
) -> PyResult<Estimate> {
    check_file_index(placement, m)?;
    if placement.inner.num_tiers() != model.inner.num_tiers() {
        return Err(PyValueError::new_err("placement tier count mismatch"));
    }
    let cfg = SimConfig::new(region_radius_km, trials, seed).map_err(value_err)?;
    let inner = py.detach(|| {
        hetcache::simulate_conditional_hit(&model.inner, &placement.inner, m, &cfg)
    });
    Ok(Estimate { inner })
}

/// Stratified Monte Carlo estimate of the total hit probability.
#[pyfunction]
#[pyo3(signature = (model, placement, q, region_radius_km, trials, seed = 0))]
fn simulate_hit(
    py: Python<'_>,
    model: &NetworkModel,
    placement: &Placement,
    q: Vec<f64>,
    region_radius_km: f64,
    trials: u64,
    seed: u64,
) -> PyResult<Estimate> {
    let q = popularity(q)?;
    if q.len() != placement.inner.num_files() {
        return Err(PyValueError::new_err("popularity length mismatch"));
    }
    if placement.inner.num_tiers() != model.inner.num_tiers() {
        return Err(PyValueError::new_err("placement tier count mismatch"));
    }
    let cfg = SimConfig::new(region_radius_km, trials, seed).map_err(value_err)?;
    let inner =
        py.detach(|| hetcache::simulate_hit(&model.inner, &placement.inner, &q, &cfg));
    Ok(Estimate { inner })
}

/// Window radius giving the sparsest tier `min_expected` stations.
#[pyfunction]
#[pyo3(signature = (model, min_expected = 500.0))]
fn suggested_region_radius(model: &NetworkModel, min_expected: f64) -> f64 {
    SimConfig::suggested_region_radius(&model.inner, min_expected)
}

#[allow(unused_variables)]
fn register_model_error(py: Python<'_>) {
    // ModelError maps onto ValueError; nothing to register, kept for clarity.
    let _: Option<ModelError> = None;
}

#[pymodule]
fn _hetcache(py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    register_model_error(py);
    m.add_class::<Tier>()?;
    m.add_class::<NetworkModel>()?;
    m.add_class::<Placement>()?;
    m.add_class::<SolverReport>()?;
    m.add_class::<Estimate>()?;
    m.add_function(wrap_pyfunction!(q_func, m)?)?;
    m.add_function(wrap_pyfunction!(q_func_series, m)?)?;
    m.add_function(wrap_pyfunction!(v_func, m)?)?;
    m.add_function(wrap_pyfunction!(w_func, m)?)?;
    m.add_function(wrap_pyfunction!(zipf_popularity, m)?)?;
    m.add_function(wrap_pyfunction!(association_probability, m)?)?;
    m.add_function(wrap_pyfunction!(serving_distance_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_hit_probability, m)?)?;
    m.add_function(wrap_pyfunction!(hit_probability, m)?)?;
    m.add_function(wrap_pyfunction!(backhaul_latency, m)?)?;
    m.add_function(wrap_pyfunction!(solve_single_tier, m)?)?;
    m.add_function(wrap_pyfunction!(solve_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(solve_nonuniform_suboptimal, m)?)?;
    m.add_function(wrap_pyfunction!(solve_reference, m)?)?;
    m.add_function(wrap_pyfunction!(mpcp_placement, m)?)?;
    m.add_function(wrap_pyfunction!(hcp_placement, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_conditional_hit, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_hit, m)?)?;
    m.add_function(wrap_pyfunction!(suggested_region_radius, m)?)?;
    Ok(())
}
