//! Concrete symplectic chart models and their group actions.
//!
//! A model bundles a chart domain, the symplectic form, a chosen primitive
//! omega_1 with d(omega_1) = omega, a basepoint, and the canonical path rule
//! used by every cocycle integral: straight segments on vector-space charts
//! and the disk, geodesics on the half-plane, factor-wise paths on products.

pub mod hyperbolic;

use crate::element::{GroupElement, TwistProfile};
use crate::error::{Error, Result};
use crate::geom::{concat_points, exterior_derivative_at, Curve, OneForm, Point, TwoForm};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::sync::Arc;

/// What kind of chart a model is; drives path rules and random elements.
#[derive(Clone)]
pub enum ModelKind {
    /// R^{2n} with coordinates (x_1..x_n, y_1..y_n).
    Euclidean { pairs: usize },
    /// Upper half-plane with the hyperbolic area form.
    HalfPlane,
    /// Open unit disk with the standard area form.
    Disk,
    /// Product of two charts, left factor first.
    Product {
        left: Arc<ChartModel>,
        right: Arc<ChartModel>,
    },
}

/// A symplectic chart with a distinguished primitive and basepoint.
#[derive(Clone)]
pub struct ChartModel {
    name: String,
    kind: ModelKind,
    dim: usize,
    domain: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
    omega: TwoForm,
    omega1: OneForm,
    basepoint: Point,
    /// Unit-cube parametrization of a sampling box inside the domain.
    map_unit: Arc<dyn Fn(&[f64]) -> Point + Send + Sync>,
}

impl ChartModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn omega(&self) -> &TwoForm {
        &self.omega
    }

    pub fn omega1(&self) -> &OneForm {
        &self.omega1
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim && (self.domain)(x)
    }

    fn require_inside(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(x.to_vec()))
        }
    }

    /// The canonical integration path between two domain points.
    pub fn canonical_path(&self, from: &Point, to: &Point) -> Result<Curve> {
        self.require_inside(from)?;
        self.require_inside(to)?;
        match &self.kind {
            ModelKind::Euclidean { .. } | ModelKind::Disk => {
                Ok(Curve::segment(from.clone(), to.clone()))
            }
            ModelKind::HalfPlane => Ok(hyperbolic::geodesic(from, to)),
            ModelKind::Product { left, right } => {
                let split = left.dim();
                let (fl, fr) = split_point(from, split);
                let (tl, tr) = split_point(to, split);
                Ok(Curve::pair(
                    left.canonical_path(&fl, &tl)?,
                    right.canonical_path(&fr, &tr)?,
                ))
            }
        }
    }

    /// Same chart with the basepoint moved.
    pub fn with_basepoint(&self, basepoint: Point) -> Result<ChartModel> {
        self.require_inside(&basepoint)?;
        let mut m = self.clone();
        m.basepoint = basepoint;
        Ok(m)
    }

    /// Same chart with the primitive replaced (typically omega_1 + df for a
    /// gauge check). The caller is responsible for d(new) = omega; the
    /// `primitive_residual` helper verifies it numerically.
    pub fn with_primitive(&self, omega1: OneForm, label: &str) -> ChartModel {
        let mut m = self.clone();
        m.omega1 = omega1;
        m.name = format!("{}[{}]", self.name, label);
        m
    }

    /// Max |d(omega_1) - omega| entry over the given points.
    pub fn primitive_residual(&self, points: &[Point]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in points {
            let d = exterior_derivative_at(&self.omega1, x)?;
            worst = worst.max((d - self.omega.at(x)).amax());
        }
        Ok(worst)
    }

    /// Low-discrepancy points in a fixed box inside the domain (Kronecker
    /// sequence); deterministic, used by validation sweeps.
    pub fn sample_points(&self, count: usize) -> Vec<Point> {
        (1..=count as u64)
            .map(|k| {
                let u = kronecker(k, self.dim);
                (self.map_unit)(&u)
            })
            .collect()
    }

    /// A random point of the sampling box.
    pub fn random_point(&self, rng: &mut impl Rng) -> Point {
        let u: Vec<f64> = (0..self.dim).map(|_| rng.random_range(0.0..1.0)).collect();
        (self.map_unit)(&u)
    }

    /// A random group element in the model's action realization.
    pub fn random_element(&self, rng: &mut impl Rng) -> GroupElement {
        match &self.kind {
            ModelKind::Euclidean { .. } => {
                let v: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                GroupElement::translation(v)
            }
            ModelKind::HalfPlane => GroupElement::Moebius(hyperbolic::random_psl_element(rng)),
            ModelKind::Disk => {
                let coeffs: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                GroupElement::Twist(TwistProfile::new(coeffs))
            }
            ModelKind::Product { left, right } => GroupElement::product(
                left.random_element(rng),
                right.random_element(rng),
                left.dim(),
            ),
        }
    }
}

pub(crate) fn split_point(x: &Point, split: usize) -> (Point, Point) {
    let l = Point::from_vector(x.coords().rows(0, split).into_owned());
    let r = Point::from_vector(x.coords().rows(split, x.dim() - split).into_owned());
    (l, r)
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// k-th point of the Kronecker sequence on the unit cube, with square-root
/// irrationals per coordinate.
fn kronecker(k: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "sampling supports dimension <= 16");
    (0..dim)
        .map(|i| {
            let alpha = (PRIMES[i] as f64).sqrt().fract();
            (k as f64 * alpha).fract()
        })
        .collect()
}

/// R^{2n} with omega = sum dx_k ^ dy_k in coordinates (x_1..x_n, y_1..y_n),
/// primitive (1/2) sum (x_k dy_k - y_k dx_k), basepoint at the origin.
pub fn make_r2n(n: usize) -> ChartModel {
    assert!(n >= 1 && 2 * n <= PRIMES.len());
    let dim = 2 * n;
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..n {
        m[(k, n + k)] = 1.0;
        m[(n + k, k)] = -1.0;
    }
    let omega = TwoForm::constant(m);
    let omega1 = OneForm::new(move |p: &Point| {
        let mut a = DVector::zeros(2 * n);
        for k in 0..n {
            a[k] = -0.5 * p[n + k];
            a[n + k] = 0.5 * p[k];
        }
        a
    });
    ChartModel {
        name: format!("r2n:{n}"),
        kind: ModelKind::Euclidean { pairs: n },
        dim,
        domain: Arc::new(|_| true),
        omega,
        omega1,
        basepoint: Point::new(vec![0.0; dim]),
        map_unit: Arc::new(move |u: &[f64]| Point::new(u.iter().map(|v| -1.5 + 3.0 * v).collect())),
    }
}

/// Open unit disk with omega = dx ^ dy, primitive (1/2)(x dy - y dx),
/// basepoint at the origin (every twist fixes it).
pub fn make_disk() -> ChartModel {
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 1)] = 1.0;
    m[(1, 0)] = -1.0;
    ChartModel {
        name: "disk".into(),
        kind: ModelKind::Disk,
        dim: 2,
        domain: Arc::new(|p: &Point| p[0] * p[0] + p[1] * p[1] < 1.0),
        omega: TwoForm::constant(m),
        omega1: OneForm::new(|p: &Point| DVector::from_vec(vec![-0.5 * p[1], 0.5 * p[0]])),
        basepoint: Point::new(vec![0.0, 0.0]),
        map_unit: Arc::new(|u: &[f64]| {
            let r = 0.9 * u[0].sqrt();
            let theta = 2.0 * std::f64::consts::PI * u[1];
            Point::new(vec![r * theta.cos(), r * theta.sin()])
        }),
    }
}

/// Product chart: forms and primitives add block-wise, paths run factor-wise,
/// the basepoint is the pair of factor basepoints.
pub fn product_model(left: Arc<ChartModel>, right: Arc<ChartModel>) -> ChartModel {
    let dim = left.dim() + right.dim();
    let split = left.dim();
    let name = format!("product:{},{}", left.name(), right.name());
    let (ld, rd) = (left.clone(), right.clone());
    let domain = Arc::new(move |p: &Point| {
        let (a, b) = split_point(p, split);
        ld.contains(&a) && rd.contains(&b)
    });
    let (lo, ro) = (left.clone(), right.clone());
    let omega = TwoForm::new(move |p: &Point| {
        let (a, b) = split_point(p, split);
        let mut m = DMatrix::zeros(p.dim(), p.dim());
        m.view_mut((0, 0), (split, split))
            .copy_from(&lo.omega().at(&a));
        m.view_mut((split, split), (p.dim() - split, p.dim() - split))
            .copy_from(&ro.omega().at(&b));
        m
    });
    let (l1, r1) = (left.clone(), right.clone());
    let omega1 = OneForm::new(move |p: &Point| {
        let (a, b) = split_point(p, split);
        let left_cov = l1.omega1().at(&a);
        let right_cov = r1.omega1().at(&b);
        DVector::from_iterator(p.dim(), left_cov.iter().chain(right_cov.iter()).copied())
    });
    let basepoint = concat_points(left.basepoint(), right.basepoint());
    let (lm, rm) = (left.clone(), right.clone());
    let map_unit = Arc::new(move |u: &[f64]| {
        let a = (lm.map_unit)(&u[..split]);
        let b = (rm.map_unit)(&u[split..]);
        concat_points(&a, &b)
    });
    ChartModel {
        name,
        kind: ModelKind::Product { left, right },
        dim,
        domain,
        omega,
        omega1,
        basepoint,
        map_unit,
    }
}

/// Closed form of the translation cocycle on R^{2n} at basepoint 0:
/// C(u, v) = (1/2) sum_k (u_k v_{n+k} - v_k u_{n+k}).
pub fn heisenberg_closed_form(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    if u.len() % 2 != 0 {
        return Err(Error::OddDimension(u.len()));
    }
    let n = u.len() / 2;
    let mut acc = 0.0;
    for k in 0..n {
        acc += u[k] * v[n + k] - v[k] * u[n + k];
    }
    Ok(0.5 * acc)
}
