//! Chart-level differential geometry: points, forms, vector fields, curves,
//! and the quadrature configuration shared by every integral in the crate.
//!
//! Everything works in a single global chart (an open subset of R^d described
//! by coordinates), so forms and fields are plain closures from points to
//! coefficient arrays. Exact derivative data is optional everywhere: when a
//! closure for a Jacobian, gradient, or velocity is supplied it is used,
//! otherwise the operations fall back to central finite differences with
//! documented step sizes.

mod calculus;
mod quad;

pub use calculus::{
    exterior_derivative_at, interior_product, lie_bracket_at, map_jacobian, pullback_form,
    pullback_one_form, symplectic_pullback_residual, top_power_at, top_power_at_brute,
    wedge_top_coefficient, ClosureMap, SmoothMap,
};
pub use quad::{integrate_unit_interval, integrate_unit_square, line_integral, Quadrature};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// A point of a chart. Coordinates are always finite; constructors assert it.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(coords: DVector<f64>) -> Self {
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "point coordinates must be finite, got {coords:?}"
        );
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.as_slice().to_vec()
    }

    /// Scale used for finite-difference steps: h_base * (1 + |x|).
    pub fn fd_scale(&self) -> f64 {
        1.0 + self.coords.norm()
    }

    /// Copy with coordinate `i` shifted by `dx`.
    pub fn shifted(&self, i: usize, dx: f64) -> Point {
        let mut c = self.coords.clone();
        c[i] += dx;
        Point::from_vector(c)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Scalar function on a chart with optional exact gradient and Hessian.
#[derive(Clone)]
pub struct ScalarFunction {
    eval: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    gradient: Option<Arc<dyn Fn(&Point) -> DVector<f64> + Send + Sync>>,
    hessian: Option<Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>>,
}

/// Step for gradient stencils, relative to the point scale.
const GRADIENT_STEP: f64 = 1e-6;

impl ScalarFunction {
    pub fn new(eval: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction {
            eval: Arc::new(eval),
            gradient: None,
            hessian: None,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&Point) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_hessian(
        mut self,
        hessian: impl Fn(&Point) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn at(&self, x: &Point) -> f64 {
        (self.eval)(x)
    }

    pub fn has_exact_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Exact gradient when available, central differences (step 1e-6 scaled)
    /// otherwise.
    pub fn gradient_at(&self, x: &Point) -> DVector<f64> {
        if let Some(g) = &self.gradient {
            return g(x);
        }
        let h = GRADIENT_STEP * x.fd_scale();
        let n = x.dim();
        DVector::from_fn(n, |i, _| {
            (self.at(&x.shifted(i, h)) - self.at(&x.shifted(i, -h))) / (2.0 * h)
        })
    }

    pub fn hessian_at(&self, x: &Point) -> Option<DMatrix<f64>> {
        self.hessian.as_ref().map(|h| h(x))
    }
}

/// One-form on a chart: point -> coefficient covector.
///
/// `potential` is present exactly when the form is known to be exact, in
/// which case it must numerically satisfy d(potential) = eval.
#[derive(Clone)]
pub struct OneForm {
    eval: Arc<dyn Fn(&Point) -> DVector<f64> + Send + Sync>,
    potential: Option<Arc<dyn Fn(&Point) -> f64 + Send + Sync>>,
}

impl OneForm {
    pub fn new(eval: impl Fn(&Point) -> DVector<f64> + Send + Sync + 'static) -> Self {
        OneForm {
            eval: Arc::new(eval),
            potential: None,
        }
    }

    pub fn with_potential(
        mut self,
        potential: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.potential = Some(Arc::new(potential));
        self
    }

    /// The exact differential of a scalar function, with the function kept as
    /// potential.
    pub fn exact(f: &ScalarFunction) -> Self {
        let grad = f.clone();
        let pot = f.clone();
        OneForm {
            eval: Arc::new(move |x| grad.gradient_at(x)),
            potential: Some(Arc::new(move |x| pot.at(x))),
        }
    }

    pub fn at(&self, x: &Point) -> DVector<f64> {
        (self.eval)(x)
    }

    pub fn potential_at(&self, x: &Point) -> Option<f64> {
        self.potential.as_ref().map(|p| p(x))
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    /// Pointwise difference; potentials combine when both sides carry one.
    pub fn sub(&self, other: &OneForm) -> OneForm {
        let a = self.eval.clone();
        let b = other.eval.clone();
        let potential = match (&self.potential, &other.potential) {
            (Some(p), Some(q)) => {
                let (p, q) = (p.clone(), q.clone());
                Some(Arc::new(move |x: &Point| p(x) - q(x))
                    as Arc<dyn Fn(&Point) -> f64 + Send + Sync>)
            }
            _ => None,
        };
        OneForm {
            eval: Arc::new(move |x| a(x) - b(x)),
            potential,
        }
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        let a = self.eval.clone();
        let b = other.eval.clone();
        let potential = match (&self.potential, &other.potential) {
            (Some(p), Some(q)) => {
                let (p, q) = (p.clone(), q.clone());
                Some(Arc::new(move |x: &Point| p(x) + q(x))
                    as Arc<dyn Fn(&Point) -> f64 + Send + Sync>)
            }
            _ => None,
        };
        OneForm {
            eval: Arc::new(move |x| a(x) + b(x)),
            potential,
        }
    }

    /// Residual of the potential against a finite-difference gradient of the
    /// stored potential at `x`; `None` when no potential is stored.
    pub fn potential_residual(&self, x: &Point) -> Option<f64> {
        let p = self.potential.as_ref()?;
        let p = p.clone();
        let f = ScalarFunction::new(move |y| p(y));
        let grad = f.gradient_at(x);
        Some((grad - self.at(x)).amax())
    }
}

/// Two-form on a chart: point -> antisymmetric coefficient matrix.
#[derive(Clone)]
pub struct TwoForm {
    eval: Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>,
}

impl TwoForm {
    pub fn new(eval: impl Fn(&Point) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        TwoForm {
            eval: Arc::new(eval),
        }
    }

    /// Constant-coefficient form.
    pub fn constant(m: DMatrix<f64>) -> Self {
        TwoForm {
            eval: Arc::new(move |_| m.clone()),
        }
    }

    pub fn at(&self, x: &Point) -> DMatrix<f64> {
        (self.eval)(x)
    }

    /// omega(u, v) at x, with the convention omega(u, v) = sum u^i M_ij v^j.
    pub fn apply(&self, x: &Point, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (self.at(x) * v).dot(u)
    }

    /// Max |M + M^T| entry at x; zero for genuinely antisymmetric data.
    pub fn antisymmetry_residual(&self, x: &Point) -> f64 {
        let m = self.at(x);
        (&m + m.transpose()).amax()
    }
}

/// Vector field on a chart with optional exact Jacobian.
#[derive(Clone)]
pub struct VectorField {
    eval: Arc<dyn Fn(&Point) -> DVector<f64> + Send + Sync>,
    jacobian: Option<Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>>,
}

/// Step for Jacobian stencils of vector fields, relative to the point scale.
const FIELD_JACOBIAN_STEP: f64 = 1e-5;

impl VectorField {
    pub fn new(eval: impl Fn(&Point) -> DVector<f64> + Send + Sync + 'static) -> Self {
        VectorField {
            eval: Arc::new(eval),
            jacobian: None,
        }
    }

    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(&Point) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn constant(v: DVector<f64>) -> Self {
        let dim = v.len();
        let val = v.clone();
        VectorField {
            eval: Arc::new(move |_| val.clone()),
            jacobian: Some(Arc::new(move |_| DMatrix::zeros(dim, dim))),
        }
    }

    pub fn at(&self, x: &Point) -> DVector<f64> {
        (self.eval)(x)
    }

    pub fn has_exact_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Exact Jacobian when available, otherwise central differences with step
    /// 1e-5 scaled by the point. Entry (i, j) is the j-th partial of
    /// component i.
    pub fn jacobian_at(&self, x: &Point) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let h = FIELD_JACOBIAN_STEP * x.fd_scale();
        let n = x.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = (self.at(&x.shifted(j, h)) - self.at(&x.shifted(j, -h))) / (2.0 * h);
            m.set_column(j, &col);
        }
        m
    }

    /// The bracket [self, other] as a field. Values use exact Jacobians when
    /// both operands carry them; the result itself never does (that would
    /// need second derivatives), so nested brackets differentiate this field
    /// numerically.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let a = self.clone();
        let b = other.clone();
        VectorField::new(move |x| b.jacobian_at(x) * a.at(x) - a.jacobian_at(x) * b.at(x))
    }
}

/// Smooth curve c: [0, 1] -> chart. Endpoints are cached and returned exactly
/// at t = 0 and t = 1; interior points come from the parametrization closure.
#[derive(Clone)]
pub struct Curve {
    start: Point,
    end: Point,
    param: Arc<dyn Fn(f64) -> Point + Send + Sync>,
    velocity: Option<Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>>,
}

/// Step for velocity stencils in curve parameter t.
const VELOCITY_STEP: f64 = 1e-6;

impl Curve {
    pub fn new(
        start: Point,
        end: Point,
        param: impl Fn(f64) -> Point + Send + Sync + 'static,
    ) -> Self {
        Curve {
            start,
            end,
            param: Arc::new(param),
            velocity: None,
        }
    }

    pub fn with_velocity(
        mut self,
        velocity: impl Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        self.velocity = Some(Arc::new(velocity));
        self
    }

    /// Straight segment from a to b, with exact constant velocity.
    pub fn segment(a: Point, b: Point) -> Self {
        assert_eq!(a.dim(), b.dim(), "segment endpoints must share a dimension");
        let av = a.coords.clone();
        let bv = b.coords.clone();
        let vel = &bv - &av;
        Curve {
            start: a,
            end: b,
            param: Arc::new(move |t| Point::from_vector(&av + (&bv - &av) * t)),
            velocity: Some(Arc::new(move |_| vel.clone())),
        }
    }

    /// Constant curve sitting at p.
    pub fn constant(p: Point) -> Self {
        let dim = p.dim();
        let q = p.clone();
        Curve {
            start: p.clone(),
            end: p,
            param: Arc::new(move |_| q.clone()),
            velocity: Some(Arc::new(move |_| DVector::zeros(dim))),
        }
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn end(&self) -> &Point {
        &self.end
    }

    pub fn at(&self, t: f64) -> Point {
        if t == 0.0 {
            self.start.clone()
        } else if t == 1.0 {
            self.end.clone()
        } else {
            (self.param)(t)
        }
    }

    /// Velocity c'(t): exact closure when present, otherwise a central
    /// difference with step 1e-6 (shrunk near the ends so the stencil stays
    /// inside [0, 1]).
    pub fn velocity_at(&self, t: f64) -> DVector<f64> {
        if let Some(v) = &self.velocity {
            return v(t);
        }
        let mut h = VELOCITY_STEP;
        let slack = t.min(1.0 - t);
        if slack < h {
            h = (slack * 0.5).max(1e-9);
        }
        (self.at(t + h).coords - self.at(t - h).coords) / (2.0 * h)
    }

    /// The same endpoints with an interior bump t(1-t) * dir added; used to
    /// probe path independence. Velocity adjusts exactly when one is stored.
    pub fn perturbed(&self, dir: DVector<f64>) -> Curve {
        assert_eq!(dir.len(), self.start.dim());
        let base = self.clone();
        let d = dir.clone();
        let velocity = self.velocity.as_ref().map(|v| {
            let v = v.clone();
            let d = dir.clone();
            Arc::new(move |t: f64| v(t) + &d * (1.0 - 2.0 * t))
                as Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>
        });
        Curve {
            start: self.start.clone(),
            end: self.end.clone(),
            param: Arc::new(move |t| Point::from_vector(base.at(t).coords + &d * (t * (1.0 - t)))),
            velocity,
        }
    }

    /// Join two curves of equal parameter into a product-chart curve.
    pub fn pair(left: Curve, right: Curve) -> Curve {
        let start = concat_points(left.start(), right.start());
        let end = concat_points(left.end(), right.end());
        let (l, r) = (left.clone(), right.clone());
        let velocity = match (left.velocity.clone(), right.velocity.clone()) {
            (Some(lv), Some(rv)) => Some(Arc::new(move |t: f64| {
                let a = lv(t);
                let b = rv(t);
                DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
            })
                as Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>),
            _ => None,
        };
        Curve {
            start,
            end,
            param: Arc::new(move |t| concat_points(&l.at(t), &r.at(t))),
            velocity,
        }
    }
}

pub fn concat_points(a: &Point, b: &Point) -> Point {
    Point::from_vector(DVector::from_iterator(
        a.dim() + b.dim(),
        a.coords().iter().chain(b.coords().iter()).copied(),
    ))
}

/// Controls for every quadrature in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss-Legendre order per panel.
    pub gauss_order: usize,
    /// Panel-doubling cap. Exceeding it is a hard error.
    pub max_panels: u32,
    /// Successive composite values must agree to this relative tolerance
    /// (with an absolute floor of the same size for values near zero).
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            gauss_order: 16,
            max_panels: 4096,
            rel_tol: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_order < 2 || self.gauss_order > 64 {
            return Err(Error::invalid(format!(
                "gauss_order must lie in 2..=64, got {}",
                self.gauss_order
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::invalid("max_panels must be positive"));
        }
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::invalid(format!(
                "rel_tol must be a positive finite number, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }

    /// Variant with a tighter relative tolerance, used when quadrature values
    /// feed a finite-difference stencil and noise must stay below the step.
    pub fn tightened(&self, rel_tol: f64) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol.min(rel_tol),
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_endpoints_are_exact() {
        let a = Point::new(vec![0.1, 0.2]);
        let b = Point::new(vec![0.7, -0.3]);
        let c = Curve::segment(a.clone(), b.clone());
        assert_eq!(c.at(0.0), a);
        assert_eq!(c.at(1.0), b);
    }

    #[test]
    fn perturbed_curve_keeps_endpoints() {
        let c = Curve::segment(Point::new(vec![0.0, 0.0]), Point::new(vec![1.0, 2.0]));
        let p = c.perturbed(DVector::from_vec(vec![0.3, -0.4]));
        assert_eq!(p.at(0.0), *c.start());
        assert_eq!(p.at(1.0), *c.end());
        let mid = p.at(0.5);
        assert!((mid[0] - (0.5 + 0.25 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn fd_velocity_matches_exact() {
        let c = Curve::new(
            Point::new(vec![1.0]),
            Point::new(vec![(1.0f64).exp()]),
            |t| Point::new(vec![t.exp()]),
        );
        let v = c.velocity_at(0.5);
        assert!((v[0] - (0.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn scalar_function_fd_gradient() {
        let f = ScalarFunction::new(|x: &Point| x[0] * x[0] * x[1]);
        let g = f.gradient_at(&Point::new(vec![2.0, 3.0]));
        assert!((g[0] - 12.0).abs() < 1e-7);
        assert!((g[1] - 4.0).abs() < 1e-7);
    }

    #[test]
    fn exact_one_form_has_consistent_potential() {
        let f = ScalarFunction::new(|x: &Point| (x[0]).sin() * x[1]);
        let form = OneForm::exact(&f);
        let x = Point::new(vec![0.4, 1.3]);
        assert!(form.potential_residual(&x).unwrap() < 1e-6);
    }

    #[test]
    fn config_rejects_bad_values() {
        let mut cfg = QuadratureConfig::default();
        cfg.rel_tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg = QuadratureConfig::default();
        cfg.gauss_order = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    #[should_panic]
    fn points_reject_nan() {
        let _ = Point::new(vec![f64::NAN]);
    }
}
