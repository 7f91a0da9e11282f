//! Python module `transversal`.
//!
//! Structured results cross the boundary as plain dicts and lists: each is
//! serialized on the Rust side and decoded with the `json` module.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyType;
use serde::Serialize;

use transversal_core::cone::{
    self, classify_boundary_direction, cone_convexity_check, enumerate_geometric_permutations, ConvexityOptions,
    OrderedQuery,
};
use transversal_core::flexprobe::{certify_flex_free, FlexProbeOptions};
use transversal_core::geom::{self, random_disjoint_scene, Ball, Direction, MinimaxOptions, SceneRequest};
use transversal_core::polyid::schwartz_zippel_suite;
use transversal_core::sextic::{eval_hessian_sigma, eval_sigma, tangent_lines_for_direction, Triple};
use transversal_core::TransversalError;

fn err(e: TransversalError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn minimax(tol: Option<f64>) -> MinimaxOptions {
    tol.map(MinimaxOptions::with_tol).unwrap_or_default()
}

fn direction(u: Vec<f64>) -> PyResult<Direction> {
    Direction::new(u).map_err(err)
}

fn as3(u: &[f64]) -> PyResult<[f64; 3]> {
    <[f64; 3]>::try_from(u).map_err(|_| PyValueError::new_err(format!("expected 3 components, got {}", u.len())))
}

/// A finite set of closed balls in R^d.
#[pyclass(module = "transversal", frozen)]
#[derive(Clone)]
pub struct Scene {
    inner: geom::Scene,
}

impl Scene {
    fn triple(&self) -> PyResult<Triple> {
        Triple::from_scene(&self.inner).map_err(err)
    }
}

#[pymethods]
impl Scene {
    /// `balls` is a list of `(center, radius)` pairs.
    #[new]
    #[pyo3(signature = (balls, allow_overlap = false))]
    fn new(balls: Vec<(Vec<f64>, f64)>, allow_overlap: bool) -> PyResult<Self> {
        let dim = balls.first().map(|b| b.0.len()).unwrap_or(0);
        let balls = balls
            .into_iter()
            .map(|(c, r)| Ball::new(c, r))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let inner = if allow_overlap {
            geom::Scene::new_allow_overlap(dim, balls)
        } else {
            geom::Scene::new(dim, balls)
        };
        Ok(Self {
            inner: inner.map_err(err)?,
        })
    }

    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: geom::Scene::from_json(text).map_err(err)?,
        })
    }

    /// Seeded random scene of pairwise disjoint balls.
    #[classmethod]
    #[pyo3(signature = (balls, dim = 3, r_min = 0.5, r_max = 1.5, seed = 1, with_transversal = false, extent = None))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        _cls: &Bound<'_, PyType>,
        balls: usize,
        dim: usize,
        r_min: f64,
        r_max: f64,
        seed: u64,
        with_transversal: bool,
        extent: Option<f64>,
    ) -> PyResult<Self> {
        let mut req = SceneRequest::new(balls, dim, r_min, r_max, seed);
        req.with_transversal = with_transversal;
        req.extent = extent;
        Ok(Self {
            inner: random_disjoint_scene(&req).map_err(err)?.scene,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn balls(&self) -> Vec<(Vec<f64>, f64)> {
        self.inner.balls().iter().map(|b| (b.center.clone(), b.radius)).collect()
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn min_gap(&self) -> f64 {
        self.inner.min_gap()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Scene(dimension={}, balls={})", self.inner.dimension(), self.inner.len())
    }

    /// Does a line with direction `u` meet the balls in `order`?
    #[pyo3(signature = (order, u, tol = None))]
    fn feasible<'py>(&self, py: Python<'py>, order: Vec<usize>, u: Vec<f64>, tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let q = OrderedQuery::new(self.inner.clone(), order).map_err(err)?;
        let f = cone::direction_feasible(&q, &direction(u)?, &minimax(tol)).map_err(err)?;
        to_py(py, &f)
    }

    #[pyo3(signature = (samples = 100_000, seed = 1, tol = None))]
    fn geometric_permutations<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        seed: u64,
        tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let c = enumerate_geometric_permutations(&self.inner, samples, seed, &minimax(tol)).map_err(err)?;
        to_py(py, &c)
    }

    #[pyo3(signature = (samples = 100_000, seed = 1, tol = None))]
    fn count_components<'py>(&self, py: Python<'py>, samples: usize, seed: u64, tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let r = cone::count_components(&self.inner, samples, seed, &minimax(tol)).map_err(err)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (order, pairs = 1000, lattice = 20_000, strict_pairs = 200, seed = 1, tol = None))]
    #[allow(clippy::too_many_arguments)]
    fn check_convexity<'py>(
        &self,
        py: Python<'py>,
        order: Vec<usize>,
        pairs: usize,
        lattice: usize,
        strict_pairs: usize,
        seed: u64,
        tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let q = OrderedQuery::new(self.inner.clone(), order).map_err(err)?;
        let opts = ConvexityOptions {
            pairs,
            lattice,
            seed,
            strict_pairs,
            minimax: minimax(tol),
        };
        to_py(py, &cone_convexity_check(&q, &opts).map_err(err)?)
    }

    /// The sextic of a three-ball scene in R^3, at direction `u`.
    fn sigma(&self, u: Vec<f64>) -> PyResult<f64> {
        Ok(eval_sigma(&self.triple()?, &as3(&u)?))
    }

    fn hessian_sigma(&self, u: Vec<f64>) -> PyResult<f64> {
        Ok(eval_hessian_sigma(&self.triple()?, &as3(&u)?))
    }

    /// Common tangent lines with direction `u` (which must lie on the sextic).
    fn tangent_lines<'py>(&self, py: Python<'py>, u: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let t = tangent_lines_for_direction(&self.triple()?, &as3(&u)?).map_err(err)?;
        to_py(py, &t)
    }

    fn classify_boundary<'py>(&self, py: Python<'py>, u: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let c = classify_boundary_direction(&self.triple()?, &as3(&u)?).map_err(err)?;
        to_py(py, &c)
    }

    #[pyo3(signature = (samples = 200, lattice = 4000, seed = 1, refine = false))]
    fn probe_flex<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        lattice: usize,
        seed: u64,
        refine: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = FlexProbeOptions {
            samples,
            lattice,
            seed,
            refine,
            ..FlexProbeOptions::default()
        };
        to_py(py, &certify_flex_free(&self.triple()?, &opts).map_err(err)?)
    }
}

/// Exact randomized checks of the polynomial identities.
#[pyfunction]
#[pyo3(signature = (trials = 100, height = 1000, seed = 1))]
fn verify_identities(py: Python<'_>, trials: usize, height: i64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &schwartz_zippel_suite(trials, height, seed).map_err(err)?)
}

#[pymodule]
fn transversal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scene>()?;
    m.add_function(wrap_pyfunction!(verify_identities, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
