//! Small multivariate polynomial engine.
//!
//! Suites use polynomials wherever a test needs exactly differentiable data:
//! Hamiltonians, gauge functions, synthetic vector fields. Keeping derivative
//! bookkeeping symbolic means the comparisons downstream measure quadrature
//! and stencil error, not the error of the test data itself.

use crate::geom::{Point, ScalarFunction, VectorField};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Polynomial in `nvars` variables as a flat list of (coefficient, exponents).
#[derive(Clone, Debug)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        if c == 0.0 {
            return Poly::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(c, vec![0; nvars])],
        }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly {
            nvars,
            terms: vec![(1.0, e)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly {
            nvars: self.nvars,
            terms,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(c, e)| (c * s, e.clone())).collect(),
        }
        .normalized()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, ea) in &self.terms {
            for (cb, eb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                terms.push((ca * cb, e));
            }
        }
        Poly {
            nvars: self.nvars,
            terms,
        }
        .normalized()
    }

    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars);
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[i] > 0)
            .map(|(c, e)| {
                let mut d = e.clone();
                d[i] -= 1;
                (c * e[i] as f64, d)
            })
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
        .normalized()
    }

    fn normalized(mut self) -> Poly {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(f64, Vec<u32>)> = Vec::with_capacity(self.terms.len());
        for (c, e) in self.terms {
            match out.last_mut() {
                Some((lc, le)) if *le == e => *lc += c,
                _ => out.push((c, e)),
            }
        }
        out.retain(|(c, _)| *c != 0.0);
        Poly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn eval_slice(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(c, e)| {
                let mut t = *c;
                for (xi, &ei) in x.iter().zip(e) {
                    for _ in 0..ei {
                        t *= xi;
                    }
                }
                t
            })
            .sum()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.eval_slice(x.coords().as_slice())
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Poisson bracket on a standard chart (x_1..x_n, y_1..y_n) against the
    /// convention {f, g} = sum_k (d_{y_k} f d_{x_k} g - d_{x_k} f d_{y_k} g).
    ///
    /// This matches {f, g} = -omega(X_f, X_g) with i_{X_f} omega = df and
    /// omega = sum dx_k ^ dy_k; see the Lie cohomology module tests.
    pub fn poisson(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        assert_eq!(self.nvars % 2, 0, "Poisson bracket needs paired variables");
        let n = self.nvars / 2;
        let mut acc = Poly::zero(self.nvars);
        for k in 0..n {
            let term = self
                .partial(n + k)
                .mul(&other.partial(k))
                .sub(&self.partial(k).mul(&other.partial(n + k)));
            acc = acc.add(&term);
        }
        acc
    }

    /// ScalarFunction view with exact gradient and Hessian closures.
    pub fn to_scalar_function(&self) -> ScalarFunction {
        let f = self.clone();
        let grad: Vec<Poly> = self.gradient();
        let hess: Vec<Vec<Poly>> = grad.iter().map(|g| g.gradient()).collect();
        let n = self.nvars;
        ScalarFunction::new(move |x: &Point| f.eval(x))
            .with_gradient(move |x: &Point| {
                DVector::from_iterator(n, grad.iter().map(|p| p.eval(x)))
            })
            .with_hessian(move |x: &Point| DMatrix::from_fn(n, n, |i, j| hess[i][j].eval(x)))
    }

    /// Random polynomial with the given degree cap; coefficients in
    /// [-scale, scale]. Exponent tuples are sampled term by term.
    pub fn random(
        rng: &mut impl Rng,
        nvars: usize,
        max_degree: u32,
        terms: usize,
        scale: f64,
    ) -> Poly {
        let mut p = Poly::zero(nvars);
        for _ in 0..terms {
            let mut e = vec![0u32; nvars];
            let mut budget = max_degree;
            for slot in &mut e {
                if budget == 0 {
                    break;
                }
                let d = rng.random_range(0..=budget);
                *slot = d;
                budget -= d;
            }
            let c: f64 = rng.random_range(-scale..scale);
            p = p.add(&Poly {
                nvars,
                terms: vec![(c, e)],
            });
        }
        p
    }
}

/// Polynomial vector field: components plus symbolic Jacobian.
#[derive(Clone, Debug)]
pub struct PolyField {
    pub comps: Vec<Poly>,
}

impl PolyField {
    pub fn new(comps: Vec<Poly>) -> Self {
        assert!(!comps.is_empty());
        let n = comps[0].nvars();
        assert!(comps.iter().all(|c| c.nvars() == n));
        PolyField { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval(&self, x: &Point) -> DVector<f64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.eval(x)))
    }

    pub fn to_vector_field(&self) -> VectorField {
        let comps = self.comps.clone();
        let jac: Vec<Vec<Poly>> = self
            .comps
            .iter()
            .map(|c| (0..c.nvars()).map(|j| c.partial(j)).collect())
            .collect();
        let m = self.comps.len();
        let n = self.comps[0].nvars();
        VectorField::new(move |x: &Point| {
            DVector::from_iterator(m, comps.iter().map(|c| c.eval(x)))
        })
        .with_jacobian(move |x: &Point| DMatrix::from_fn(m, n, |i, j| jac[i][j].eval(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn arithmetic_and_partials() {
        // p = x^2 y + 3 y
        let n = 2;
        let x = Poly::var(n, 0);
        let y = Poly::var(n, 1);
        let p = x.mul(&x).mul(&y).add(&y.scale(3.0));
        let at = Point::new(vec![2.0, 5.0]);
        assert_eq!(p.eval(&at), 4.0 * 5.0 + 15.0);
        assert_eq!(p.partial(0).eval(&at), 2.0 * 2.0 * 5.0);
        assert_eq!(p.partial(1).eval(&at), 4.0 + 3.0);
    }

    #[test]
    fn like_terms_collapse() {
        let n = 1;
        let x = Poly::var(n, 0);
        let p = x.add(&x).sub(&x.scale(2.0));
        assert_eq!(p.terms.len(), 0);
    }

    #[test]
    fn poisson_of_coordinates() {
        // On (x, y) with omega = dx ^ dy: {x, y} = -1 under the stored
        // convention ({f,g} = d_y f d_x g - d_x f d_y g for n = 1).
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let b = x.poisson(&y);
        assert_eq!(b.eval(&Point::new(vec![0.7, -0.3])), -1.0);
    }

    #[test]
    fn scalar_function_view_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let p = Poly::random(&mut rng, 3, 3, 6, 1.0);
        let f = p.to_scalar_function();
        let at = Point::new(vec![0.3, -0.8, 0.5]);
        let g = f.gradient_at(&at);
        for i in 0..3 {
            assert!((g[i] - p.partial(i).eval(&at)).abs() < 1e-15);
        }
        let h = f.hessian_at(&at).unwrap();
        assert!((h[(0, 1)] - p.partial(0).partial(1).eval(&at)).abs() < 1e-15);
    }

    #[test]
    fn field_jacobian_is_exact() {
        let n = 2;
        let x = Poly::var(n, 0);
        let y = Poly::var(n, 1);
        let field = PolyField::new(vec![x.mul(&y), y.mul(&y)]);
        let vf = field.to_vector_field();
        let at = Point::new(vec![1.5, 2.0]);
        let j = vf.jacobian_at(&at);
        assert_eq!(j[(0, 0)], 2.0);
        assert_eq!(j[(0, 1)], 1.5);
        assert_eq!(j[(1, 0)], 0.0);
        assert_eq!(j[(1, 1)], 4.0);
    }
}
