//! Displacement-type cocycle on the torus chart [0, 1)^2 with the standard
//! area form. Fields here are a constant drift plus a Hamiltonian part with
//! trigonometric-polynomial Hamiltonian, which keeps gradients and Hessians
//! exact and makes every integral a smooth periodic quadrature.
//!
//! The headline object is b(X, Y) = int omega(X, Y) over the fundamental
//! domain. It vanishes whenever either argument is Hamiltonian, pairs the
//! drift components through omega, and relates to the point cocycle by
//!   b - c_{x0} = - int ( int_{x0}^{p} i_{[X,Y]} omega ) dp
//! and to the primitive product formula by
//!   b = n int alpha_X ^ alpha_Y ^ omega^{n-1}   (n = 1 here).

use crate::error::Result;
use crate::geom::{
    integrate_unit_square, line_integral, Curve, OneForm, Point, QuadratureConfig, ScalarFunction,
    VectorField,
};
use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use std::f64::consts::TAU;

/// Finite sum of a_i cos(2 pi k_i . x + phi_i) with integer wavevectors.
#[derive(Clone, Debug, Default)]
pub struct TrigPoly {
    terms: Vec<(f64, [i32; 2], f64)>,
}

impl TrigPoly {
    pub fn new(terms: Vec<(f64, [i32; 2], f64)>) -> Self {
        TrigPoly { terms }
    }

    pub fn zero() -> Self {
        TrigPoly { terms: Vec::new() }
    }

    fn phase(k: &[i32; 2], phi: f64, x: f64, y: f64) -> f64 {
        TAU * (k[0] as f64 * x + k[1] as f64 * y) + phi
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, k, phi)| a * Self::phase(k, *phi, x, y).cos())
            .sum()
    }

    pub fn gradient(&self, x: f64, y: f64) -> Vector2<f64> {
        let mut g = Vector2::zeros();
        for (a, k, phi) in &self.terms {
            let s = -a * Self::phase(k, *phi, x, y).sin() * TAU;
            g[0] += s * k[0] as f64;
            g[1] += s * k[1] as f64;
        }
        g
    }

    pub fn hessian(&self, x: f64, y: f64) -> Matrix2<f64> {
        let mut h = Matrix2::zeros();
        for (a, k, phi) in &self.terms {
            let c = -a * Self::phase(k, *phi, x, y).cos() * TAU * TAU;
            let (kx, ky) = (k[0] as f64, k[1] as f64);
            h[(0, 0)] += c * kx * kx;
            h[(0, 1)] += c * kx * ky;
            h[(1, 0)] += c * ky * kx;
            h[(1, 1)] += c * ky * ky;
        }
        h
    }

    pub fn to_scalar_function(&self) -> ScalarFunction {
        let a = self.clone();
        let b = self.clone();
        let c = self.clone();
        ScalarFunction::new(move |p: &Point| a.eval(p[0], p[1]))
            .with_gradient(move |p: &Point| {
                DVector::from_iterator(2, b.gradient(p[0], p[1]).iter().cloned())
            })
            .with_hessian(move |p: &Point| {
                let h = c.hessian(p[0], p[1]);
                DMatrix::from_fn(2, 2, |i, j| h[(i, j)])
            })
    }

    /// Random polynomial with nonzero wavevectors bounded by `max_mode`.
    pub fn random(rng: &mut impl Rng, terms: usize, max_mode: i32, scale: f64) -> Self {
        let mut out = Vec::with_capacity(terms);
        while out.len() < terms {
            let k = [
                rng.random_range(-max_mode..=max_mode),
                rng.random_range(-max_mode..=max_mode),
            ];
            if k == [0, 0] {
                continue;
            }
            out.push((
                rng.random_range(-scale..scale),
                k,
                rng.random_range(0.0..TAU),
            ));
        }
        TrigPoly { terms: out }
    }
}

/// Symplectic field on the torus: a constant drift plus the Hamiltonian field
/// of a trigonometric polynomial.
#[derive(Clone, Debug)]
pub struct TorusField {
    pub drift: Vector2<f64>,
    pub ham: TrigPoly,
}

impl TorusField {
    pub fn new(drift: [f64; 2], ham: TrigPoly) -> Self {
        TorusField {
            drift: Vector2::new(drift[0], drift[1]),
            ham,
        }
    }

    pub fn drift_only(drift: [f64; 2]) -> Self {
        TorusField::new(drift, TrigPoly::zero())
    }

    pub fn hamiltonian(ham: TrigPoly) -> Self {
        TorusField::new([0.0, 0.0], ham)
    }

    /// X = drift + (d_y h, -d_x h).
    pub fn value(&self, x: f64, y: f64) -> Vector2<f64> {
        let g = self.ham.gradient(x, y);
        Vector2::new(self.drift[0] + g[1], self.drift[1] - g[0])
    }

    pub fn to_vector_field(&self) -> VectorField {
        let a = self.clone();
        let b = self.clone();
        VectorField::new(move |p: &Point| {
            DVector::from_iterator(2, a.value(p[0], p[1]).iter().cloned())
        })
        .with_jacobian(move |p: &Point| {
            let h = b.ham.hessian(p[0], p[1]);
            // rows of J are the gradients of (d_y h, -d_x h)
            DMatrix::from_row_slice(2, 2, &[h[(1, 0)], h[(1, 1)], -h[(0, 0)], -h[(0, 1)]])
        })
    }

    /// The contraction alpha_X = i_X omega = dh - (drift_2 dx - drift_1 dy),
    /// closed because h is periodic and the drift is constant.
    pub fn alpha(&self) -> OneForm {
        let f = self.clone();
        OneForm::new(move |p: &Point| {
            let g = f.ham.gradient(p[0], p[1]);
            DVector::from_vec(vec![g[0] - f.drift[1], g[1] + f.drift[0]])
        })
    }

    /// omega(X, Y) at a chart point.
    pub fn pair(&self, other: &TorusField, x: f64, y: f64) -> f64 {
        let u = self.value(x, y);
        let v = other.value(x, y);
        u[0] * v[1] - u[1] * v[0]
    }

    pub fn random(rng: &mut impl Rng, terms: usize, max_mode: i32) -> Self {
        TorusField::new(
            [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            TrigPoly::random(rng, terms, max_mode, 0.5),
        )
    }
}

/// Average of omega(X, Y) over the fundamental domain.
pub fn torus_b(x: &TorusField, y: &TorusField, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate_unit_square(|u, v| Ok(x.pair(y, u, v)), cfg)?.value)
}

/// Both sides of the basepoint-average identity
/// b - omega(X, Y)(x0) = - int ( int_{x0}^{p} i_{[X,Y]} omega ) dp.
pub fn basepoint_average_identity(
    x: &TorusField,
    y: &TorusField,
    x0: &Point,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let b = torus_b(x, y, cfg)?;
    let c0 = x.pair(y, x0[0], x0[1]);
    let xf = x.to_vector_field();
    let yf = y.to_vector_field();
    let bracket = xf.bracket(&yf);
    let alpha = OneForm::new(move |p: &Point| {
        let w = bracket.at(p);
        // contraction with the constant area form: (w^i omega_ij) = (-w_2, w_1)
        DVector::from_vec(vec![-w[1], w[0]])
    });
    let inner = |u: f64, v: f64| -> Result<f64> {
        let path = Curve::segment(x0.clone(), Point::new(vec![u, v]));
        Ok(line_integral(&alpha, &path, cfg)?.value)
    };
    let rhs = -integrate_unit_square(inner, cfg)?.value;
    Ok((b - c0, rhs))
}

/// Both sides of the primitive-product identity b = int (alpha_X ^ alpha_Y).
pub fn primitive_product_identity(
    x: &TorusField,
    y: &TorusField,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let b = torus_b(x, y, cfg)?;
    let ax = x.alpha();
    let ay = y.alpha();
    let rhs = integrate_unit_square(
        |u, v| {
            let p = Point::new(vec![u, v]);
            let a = ax.at(&p);
            let bv = ay.at(&p);
            Ok(a[0] * bv[1] - a[1] * bv[0])
        },
        cfg,
    )?
    .value;
    Ok((b, rhs))
}
