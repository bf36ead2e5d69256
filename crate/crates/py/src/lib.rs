//! Python bindings for the cocycle laboratory. The surface mirrors the Rust
//! core: build a model, wrap elements, evaluate the quadrature cocycle, and
//! run the verification suites (reports come back as JSON strings so Python
//! tooling can parse them directly).

use cocycle_lab::cohomology::CocycleEngine;
use cocycle_lab::element::{GroupElement, MoebiusMatrix, TwistProfile};
use cocycle_lab::geom::{Point, QuadratureConfig};
use cocycle_lab::lab::{run_suite, Scenario};
use cocycle_lab::model::hyperbolic::{gamma_cochain, gw_cocycle, make_h2};
use cocycle_lab::model::{heisenberg_closed_form, make_disk, make_r2n, product_model, ChartModel};
use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

fn err(e: cocycle_lab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn moebius(entries: [f64; 4]) -> PyResult<MoebiusMatrix> {
    MoebiusMatrix::new(entries[0], entries[1], entries[2], entries[3]).map_err(err)
}

/// A symplectic chart with its primitive and basepoint.
#[pyclass(frozen)]
struct Model {
    inner: Arc<ChartModel>,
}

#[pymethods]
impl Model {
    /// Flat chart R^{2n} with the standard form and rotational primitive.
    #[staticmethod]
    fn flat(n: usize) -> PyResult<Model> {
        if n == 0 || n > 8 {
            return Err(PyValueError::new_err("n must be between 1 and 8"));
        }
        Ok(Model {
            inner: Arc::new(make_r2n(n)),
        })
    }

    /// Upper half-plane with the hyperbolic area form.
    #[staticmethod]
    fn half_plane() -> Model {
        Model {
            inner: Arc::new(make_h2()),
        }
    }

    /// Open unit disk acted on by radial twists.
    #[staticmethod]
    fn disk() -> Model {
        Model {
            inner: Arc::new(make_disk()),
        }
    }

    /// Product of two charts with the sum form.
    #[staticmethod]
    fn product(left: &Model, right: &Model) -> Model {
        Model {
            inner: Arc::new(product_model(left.inner.clone(), right.inner.clone())),
        }
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn basepoint(&self) -> Vec<f64> {
        self.inner.basepoint().to_vec()
    }

    /// The same chart anchored at a different basepoint.
    fn with_basepoint(&self, basepoint: Vec<f64>) -> PyResult<Model> {
        Ok(Model {
            inner: Arc::new(
                self.inner
                    .with_basepoint(Point::new(basepoint))
                    .map_err(err)?,
            ),
        })
    }

    fn __repr__(&self) -> String {
        format!("Model({}, dim={})", self.inner.name(), self.inner.dim())
    }
}

/// A symplectomorphism usable as a cocycle argument.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Element {
    inner: GroupElement,
}

#[pymethods]
impl Element {
    #[staticmethod]
    fn identity() -> Element {
        Element {
            inner: GroupElement::Identity,
        }
    }

    /// Translation by the given displacement (flat charts).
    #[staticmethod]
    fn translation(v: Vec<f64>) -> Element {
        Element {
            inner: GroupElement::translation(v),
        }
    }

    /// Moebius map (a z + b)/(c z + d) with positive determinant
    /// (half-plane chart).
    #[staticmethod]
    fn moebius(a: f64, b: f64, c: f64, d: f64) -> PyResult<Element> {
        Ok(Element {
            inner: GroupElement::Moebius(moebius([a, b, c, d])?),
        })
    }

    /// Radius-dependent rotation with the polynomial angle profile
    /// (disk chart).
    #[staticmethod]
    fn twist(coeffs: Vec<f64>) -> Element {
        Element {
            inner: GroupElement::Twist(TwistProfile::new(coeffs)),
        }
    }

    /// Pair acting blockwise on a product chart; `split` is the left
    /// factor's dimension.
    #[staticmethod]
    fn product(left: &Element, right: &Element, split: usize) -> Element {
        Element {
            inner: GroupElement::product(left.inner.clone(), right.inner.clone(), split),
        }
    }

    fn compose(&self, other: &Element) -> Element {
        Element {
            inner: self.inner.compose(&other.inner),
        }
    }

    fn inverse(&self) -> Element {
        Element {
            inner: self.inner.inverse(),
        }
    }

    fn act(&self, x: Vec<f64>) -> Vec<f64> {
        self.inner.act(&Point::new(x)).to_vec()
    }
}

/// Evaluates the quadrature cocycle and the derived bundle quantities on
/// one model.
#[pyclass(frozen)]
struct Engine {
    inner: Arc<CocycleEngine>,
}

#[pymethods]
impl Engine {
    #[new]
    fn new(model: &Model) -> Engine {
        Engine {
            inner: Arc::new(CocycleEngine::new(model.inner.clone())),
        }
    }

    /// C(g1, g2): the primitive's pullback defect integrated from the
    /// basepoint to g2(basepoint).
    fn cocycle(&self, g1: &Element, g2: &Element) -> PyResult<f64> {
        self.inner.cocycle(&g1.inner, &g2.inner).map_err(err)
    }

    /// Fiber shift of the prequantization action of g at x.
    fn fiber_shift(&self, g: &Element, x: Vec<f64>) -> PyResult<f64> {
        self.inner
            .fiber_shift(&g.inner, &Point::new(x))
            .map_err(err)
    }

    /// |(DC)(g1, g2, g3)|: the four-term cocycle identity residual.
    fn cocycle_identity_residual(&self, g1: &Element, g2: &Element, g3: &Element) -> PyResult<f64> {
        self.inner
            .cocycle_identity_residual(&g1.inner, &g2.inner, &g3.inner)
            .map_err(err)
    }
}

/// Closed form of the translation cocycle: half the symplectic pairing of
/// the displacements.
#[pyfunction]
fn heisenberg(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    heisenberg_closed_form(&DVector::from_vec(u), &DVector::from_vec(v)).map_err(err)
}

/// Geodesic-triangle circulation cocycle on the half-plane for two Moebius
/// elements, each given as (a, b, c, d).
#[pyfunction]
fn triangle_cocycle(g1: [f64; 4], g2: [f64; 4]) -> PyResult<f64> {
    let model = make_h2();
    let cfg = QuadratureConfig::default();
    gw_cocycle(&model, &cfg, &moebius(g1)?, &moebius(g2)?).map_err(err)
}

/// Transport 1-cochain gamma(g) on the half-plane: the primitive integrated
/// along the geodesic from the basepoint to g(basepoint).
#[pyfunction]
fn triangle_gamma(g: [f64; 4]) -> PyResult<f64> {
    let model = make_h2();
    let cfg = QuadratureConfig::default();
    gamma_cochain(&model, &cfg, &moebius(g)?).map_err(err)
}

/// Run the verification suite for a model id and return the JSON report.
/// Model ids match the CLI: `r2n:<n>`, `h2`, `disk`, `torus`,
/// `product:<a>,<b>`.
#[pyfunction]
#[pyo3(signature = (model, seed = 0, samples = 50, basepoint = None, tolerances = None))]
fn verify(
    model: &str,
    seed: u64,
    samples: usize,
    basepoint: Option<Vec<f64>>,
    tolerances: Option<HashMap<String, f64>>,
) -> PyResult<String> {
    let scenario = Scenario {
        model: model.to_string(),
        seed,
        samples,
        basepoint,
        tolerances: tolerances.unwrap_or_default().into_iter().collect(),
    };
    Ok(run_suite(&scenario).map_err(err)?.to_json())
}

/// Run the exploratory twist-word experiment and return the JSON report.
#[pyfunction]
#[pyo3(signature = (words = 6, depth = 3, seed = 0))]
fn disk_experiment(words: usize, depth: usize, seed: u64) -> PyResult<String> {
    Ok(cocycle_lab::lab::disk_experiment(words, depth, seed)
        .map_err(err)?
        .to_json())
}

#[pymodule]
fn cocycle_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Element>()?;
    m.add_class::<Engine>()?;
    m.add_function(wrap_pyfunction!(heisenberg, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_cocycle, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(disk_experiment, m)?)?;
    m.add("SCHEMA_VERSION", cocycle_lab::lab::SCHEMA_VERSION)?;
    Ok(())
}
