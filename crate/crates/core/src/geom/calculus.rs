//! Pointwise exterior calculus: pullbacks, exterior derivatives, interior
//! products, Lie brackets, and top exterior powers of two-forms.
//!
//! Conventions, fixed once for the whole crate:
//! * two-forms act as omega(u, v) = sum_ij u^i M_ij v^j;
//! * the interior product (i_X omega)_j = sum_i X^i M_ij;
//! * top-power coefficients are reported relative to the Darboux-ordered
//!   volume dx_1 ^ dx_{n+1} ^ dx_2 ^ dx_{n+2} ^ ... (the plain coordinate
//!   volume differs by the parity of n(n-1)/2).

use super::{OneForm, Point, TwoForm, VectorField};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Step for map-Jacobian stencils, relative to the point scale.
const MAP_JACOBIAN_STEP: f64 = 1e-6;
/// Step for exterior-derivative stencils, relative to the point scale.
const EXTERIOR_STEP: f64 = 1e-4;

/// A differentiable chart map. `differential` returns the exact Jacobian
/// when one is known; callers fall back to finite differences otherwise.
pub trait SmoothMap: Send + Sync {
    fn apply(&self, x: &Point) -> Point;
    fn differential(&self, _x: &Point) -> Option<DMatrix<f64>> {
        None
    }
}

/// Ad-hoc map from closures, mostly for tests and user-supplied maps.
pub struct ClosureMap {
    forward: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    jacobian: Option<Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>>,
}

impl ClosureMap {
    pub fn new(forward: impl Fn(&Point) -> Point + Send + Sync + 'static) -> Self {
        ClosureMap {
            forward: Arc::new(forward),
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
}

impl SmoothMap for ClosureMap {
    fn apply(&self, x: &Point) -> Point {
        (self.forward)(x)
    }
    fn differential(&self, x: &Point) -> Option<DMatrix<f64>> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}

/// Jacobian of a map at x: the exact differential when the map carries one,
/// otherwise central differences with step 1e-6 * (1 + |x|). Entry (i, j) is
/// the j-th partial of output component i.
pub fn map_jacobian(map: &dyn SmoothMap, x: &Point) -> Result<DMatrix<f64>> {
    if let Some(j) = map.differential(x) {
        return check_finite_matrix(j, "exact map differential");
    }
    let h = MAP_JACOBIAN_STEP * x.fd_scale();
    let n = x.dim();
    let probe = map.apply(x);
    let m = probe.dim();
    let mut jac = DMatrix::zeros(m, n);
    for j in 0..n {
        let plus = map.apply(&x.shifted(j, h));
        let minus = map.apply(&x.shifted(j, -h));
        let col = (plus.coords() - minus.coords()) / (2.0 * h);
        jac.set_column(j, &col);
    }
    check_finite_matrix(jac, "finite-difference map Jacobian")
}

fn check_finite_matrix(m: DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(m)
    } else {
        Err(Error::NonFinite {
            context: context.into(),
        })
    }
}

/// Pullback (g^* theta)(x) = theta(g(x)) . Dg(x) as a covector at x.
pub fn pullback_one_form(map: &dyn SmoothMap, form: &OneForm, x: &Point) -> Result<DVector<f64>> {
    let jac = map_jacobian(map, x)?;
    let theta = form.at(&map.apply(x));
    let pulled = jac.tr_mul(&theta);
    if pulled.iter().all(|v| v.is_finite()) {
        Ok(pulled)
    } else {
        Err(Error::NonFinite {
            context: "pullback of one-form".into(),
        })
    }
}

/// The pullback g^* theta as a form in its own right. A potential transports
/// contravariantly: if theta = d(phi) then g^* theta = d(phi o g).
pub fn pullback_form(map: Arc<dyn SmoothMap>, form: &OneForm) -> OneForm {
    let f = form.clone();
    let m = map.clone();
    let pulled = OneForm::new(move |x: &Point| {
        pullback_one_form(m.as_ref(), &f, x).expect("pullback evaluation failed")
    });
    if form.has_potential() {
        let f = form.clone();
        let m = map;
        pulled.with_potential(move |x: &Point| {
            f.potential_at(&m.apply(x))
                .expect("potential disappeared under pullback")
        })
    } else {
        pulled
    }
}

/// Max-norm residual of g^* omega - omega over the given points; the figure
/// a symplectomorphism check compares against its tolerance.
pub fn symplectic_pullback_residual(
    map: &dyn SmoothMap,
    omega: &TwoForm,
    points: &[Point],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in points {
        let jac = map_jacobian(map, x)?;
        let target = omega.at(&map.apply(x));
        let pulled = jac.tr_mul(&(target * &jac));
        let residual = (pulled - omega.at(x)).amax();
        if !residual.is_finite() {
            return Err(Error::NonFinite {
                context: "symplectic pullback residual".into(),
            });
        }
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// Exterior derivative of a one-form at x as an antisymmetric matrix,
/// M_ij = d_i a_j - d_j a_i, via fourth-order central differences with step
/// 1e-4 * (1 + |x|). The wide stencil keeps the truncation error harmless
/// even where the form has large higher derivatives (the half-plane
/// primitive near small y).
pub fn exterior_derivative_at(form: &OneForm, x: &Point) -> Result<DMatrix<f64>> {
    let n = x.dim();
    let h = EXTERIOR_STEP * x.fd_scale();
    let mut partials = Vec::with_capacity(n);
    for i in 0..n {
        let p1 = form.at(&x.shifted(i, h));
        let m1 = form.at(&x.shifted(i, -h));
        let p2 = form.at(&x.shifted(i, 2.0 * h));
        let m2 = form.at(&x.shifted(i, -2.0 * h));
        partials.push(((p1 - m1) * 8.0 - (p2 - m2)) / (12.0 * h));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = partials[i][j] - partials[j][i];
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    check_finite_matrix(m, "exterior derivative stencil")
}

/// Interior product i_X omega at x, as the covector with entries
/// sum_i X^i(x) omega_ij(x).
pub fn interior_product(field: &VectorField, omega: &TwoForm, x: &Point) -> DVector<f64> {
    omega.at(x).tr_mul(&field.at(x))
}

/// Lie bracket [X, Y](x) = DY(x) X(x) - DX(x) Y(x); Jacobians are exact when
/// the fields carry them and central-difference otherwise.
pub fn lie_bracket_at(
    x_field: &VectorField,
    y_field: &VectorField,
    x: &Point,
) -> Result<DVector<f64>> {
    let v = y_field.jacobian_at(x) * x_field.at(x) - x_field.jacobian_at(x) * y_field.at(x);
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            context: "Lie bracket".into(),
        })
    }
}

/// Parity sign of the Darboux reordering (1, n+1, 2, n+2, ...): the
/// coefficient against the plain coordinate volume picks up (-1)^(n(n-1)/2).
fn darboux_sign(n: usize) -> f64 {
    if (n * (n - 1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient of omega^n at x against the Darboux-ordered volume
/// dx_1 ^ dx_{n+1} ^ dx_2 ^ dx_{n+2} ^ ..., computed as n! times the
/// Pfaffian of the coefficient matrix (times the reordering parity).
pub fn top_power_at(omega: &TwoForm, x: &Point, n: usize) -> Result<f64> {
    let dim = x.dim();
    if dim != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: dim,
        });
    }
    if dim % 2 != 0 {
        return Err(Error::OddDimension(dim));
    }
    let m = omega.at(x);
    let mut factorial = 1.0;
    for k in 2..=n {
        factorial *= k as f64;
    }
    Ok(factorial * pfaffian(&m) * darboux_sign(n))
}

/// Same coefficient by brute-force antisymmetrization over S_{2n}; kept as an
/// independent oracle for `top_power_at` and exercised against it in tests.
pub fn top_power_at_brute(omega: &TwoForm, x: &Point, n: usize) -> Result<f64> {
    let dim = x.dim();
    if dim != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: dim,
        });
    }
    let m = omega.at(x);
    let mut acc = 0.0;
    permutations_with_sign(dim, &mut |perm, sign| {
        let mut prod = sign;
        for k in 0..n {
            prod *= m[(perm[2 * k], perm[2 * k + 1])];
        }
        acc += prod;
    });
    // Each of the n two-form factors is counted twice per slot ordering.
    Ok(acc / 2f64.powi(n as i32) * darboux_sign(n))
}

/// Coefficient of alpha ^ beta ^ omega^(n-1) at a point against the same
/// Darboux-ordered volume, from the covectors and coefficient matrix.
pub fn wedge_top_coefficient(
    alpha: &DVector<f64>,
    beta: &DVector<f64>,
    omega_matrix: &DMatrix<f64>,
    n: usize,
) -> Result<f64> {
    let dim = omega_matrix.nrows();
    if dim != 2 * n || alpha.len() != dim || beta.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: alpha.len(),
        });
    }
    let mut acc = 0.0;
    permutations_with_sign(dim, &mut |perm, sign| {
        let mut prod = sign * alpha[perm[0]] * beta[perm[1]];
        for k in 1..n {
            prod *= omega_matrix[(perm[2 * k], perm[2 * k + 1])];
        }
        acc += prod;
    });
    Ok(acc / 2f64.powi(n as i32 - 1) * darboux_sign(n))
}

/// Pfaffian of an even antisymmetric matrix by first-row expansion; fine for
/// the small dimensions this crate works in.
fn pfaffian(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    debug_assert_eq!(n % 2, 0);
    if n == 0 {
        return 1.0;
    }
    if n == 2 {
        return m[(0, 1)];
    }
    let mut acc = 0.0;
    let mut sign = 1.0;
    for j in 1..n {
        let a = m[(0, j)];
        if a != 0.0 {
            let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
            let mut sub = DMatrix::zeros(n - 2, n - 2);
            for (r, &kr) in keep.iter().enumerate() {
                for (c, &kc) in keep.iter().enumerate() {
                    sub[(r, c)] = m[(kr, kc)];
                }
            }
            acc += sign * a * pfaffian(&sub);
        }
        sign = -sign;
    }
    acc
}

/// Visit every permutation of 0..n with its sign (Heap's algorithm; the sign
/// flips on each swap).
fn permutations_with_sign(n: usize, visit: &mut impl FnMut(&[usize], f64)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1.0;
    visit(&perm, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            visit(&perm, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
