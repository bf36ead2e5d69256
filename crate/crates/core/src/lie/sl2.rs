//! sl(2, R): traceless 2x2 matrices with a closed-form exponential into the
//! Moebius group, plus the least-squares witness that every two-cocycle on
//! this algebra is a coboundary (so any cocycle obtained by differentiating
//! a group cocycle must fit c(X, Y) = -lambda([X, Y]) for some functional
//! lambda).

use crate::element::{GroupElement, MoebiusMatrix};
use crate::error::{Error, Result};
use crate::lie::LieBracket;
use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;

/// Traceless 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2Element {
    m: Matrix2<f64>,
}

impl Sl2Element {
    /// Wrap a matrix, rejecting any visible trace.
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        let tr = m.trace();
        if tr.abs() > 1e-14 {
            return Err(Error::NotTraceless(tr));
        }
        Ok(Sl2Element { m })
    }

    /// a H + b E + c F, i.e. [[a, b], [c, -a]].
    pub fn from_coords(a: f64, b: f64, c: f64) -> Self {
        Sl2Element {
            m: Matrix2::new(a, b, c, -a),
        }
    }

    /// Coordinates (a, b, c) in the H, E, F basis.
    pub fn coords(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.m[(0, 0)], self.m[(0, 1)], self.m[(1, 0)]])
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.m
    }

    /// H = diag(1, -1).
    pub fn h() -> Self {
        Sl2Element::from_coords(1.0, 0.0, 0.0)
    }

    /// E = upper-triangular nilpotent.
    pub fn e() -> Self {
        Sl2Element::from_coords(0.0, 1.0, 0.0)
    }

    /// F = lower-triangular nilpotent.
    pub fn f() -> Self {
        Sl2Element::from_coords(0.0, 0.0, 1.0)
    }

    pub fn basis() -> [Sl2Element; 3] {
        [Sl2Element::h(), Sl2Element::e(), Sl2Element::f()]
    }

    pub fn scale(&self, s: f64) -> Self {
        Sl2Element { m: self.m * s }
    }

    pub fn add(&self, other: &Self) -> Self {
        Sl2Element {
            m: self.m + other.m,
        }
    }

    /// Matrix commutator, projected back onto the traceless coordinates so
    /// rounding in the diagonal products cannot leak trace.
    pub fn commutator(&self, other: &Self) -> Self {
        let c = self.m * other.m - other.m * self.m;
        Sl2Element::from_coords(c[(0, 0)], c[(0, 1)], c[(1, 0)])
    }

    /// Closed-form exponential exp(t X) as a Moebius transformation. For a
    /// traceless A, A^2 = -det(A) I, so with q = det(tA) the series collapses
    /// to cos(sqrt(q)) I + sinc(sqrt(q)) tA, covering the elliptic (q > 0),
    /// hyperbolic (q < 0), and parabolic (q = 0) cases in one formula.
    pub fn exp_moebius(&self, t: f64) -> Result<MoebiusMatrix> {
        let b = self.m * t;
        let q = b.determinant();
        let (c, s) = cos_sinc(q);
        let e = Matrix2::identity() * c + b * s;
        MoebiusMatrix::new(e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)])
    }

    /// The exponential wrapped as a group element.
    pub fn exp_element(&self, t: f64) -> Result<GroupElement> {
        Ok(GroupElement::Moebius(self.exp_moebius(t)?))
    }
}

impl LieBracket for Sl2Element {
    fn bracket(&self, other: &Self) -> Self {
        self.commutator(other)
    }
}

/// cos(sqrt(q)) and sin(sqrt(q))/sqrt(q) continued through q <= 0, where they
/// become cosh and sinh of sqrt(-q). Near zero both are evaluated by series.
fn cos_sinc(q: f64) -> (f64, f64) {
    if q.abs() < 1e-8 {
        (1.0 - q / 2.0 + q * q / 24.0, 1.0 - q / 6.0 + q * q / 120.0)
    } else if q > 0.0 {
        let r = q.sqrt();
        (r.cos(), r.sin() / r)
    } else {
        let r = (-q).sqrt();
        (r.cosh(), r.sinh() / r)
    }
}

/// Uniform random element with coordinates in [-scale, scale].
pub fn random_sl2(rng: &mut impl Rng, scale: f64) -> Sl2Element {
    Sl2Element::from_coords(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

/// Result of fitting c(X, Y) = -lambda([X, Y]) by least squares.
#[derive(Clone, Debug)]
pub struct WhiteheadFit {
    /// Coefficients of lambda in the H, E, F dual basis.
    pub lambda: DVector<f64>,
    /// Max |c(X, Y) + lambda([X, Y])| over the scored pairs.
    pub max_residual: f64,
    /// Root-mean-square of the same residuals.
    pub rms_residual: f64,
    /// Numerical rank of the design matrix.
    pub rank: usize,
    pub equations: usize,
}

/// Fit a linear functional trivializing the sampled two-cocycle values.
/// Each entry of `pairs` is (X, Y, c(X, Y)); the fit solves
/// coords([X, Y]) . lambda = -c(X, Y) in the least-squares sense.
pub fn whitehead_witness(pairs: &[(Sl2Element, Sl2Element, f64)]) -> Result<WhiteheadFit> {
    if pairs.len() < 3 {
        return Err(Error::invalid(
            "need at least three scored pairs to fit a functional on sl2",
        ));
    }
    let rows = pairs.len();
    let mut design = DMatrix::zeros(rows, 3);
    let mut rhs = DVector::zeros(rows);
    for (r, (x, y, v)) in pairs.iter().enumerate() {
        let br = x.commutator(y).coords();
        design.set_row(r, &br.transpose());
        rhs[r] = -v;
    }
    let svd = design.clone().svd(true, true);
    let max_sv: f64 = svd.singular_values.max();
    let eps = 1e-10 * max_sv.max(1.0);
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let lambda = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let residuals = design * &lambda - &rhs;
    let max_residual = residuals.amax();
    let rms_residual = (residuals.norm_squared() / rows as f64).sqrt();
    Ok(WhiteheadFit {
        lambda,
        max_residual,
        rms_residual,
        rank,
        equations: rows,
    })
}
