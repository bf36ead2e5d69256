//! Chevalley-Eilenberg cochains for the Lie algebras in play: vector fields
//! on a chart, sl2, and torus fields. Also the infinitesimal counterparts of
//! the group cocycle: the point-evaluation cocycle omega(X, Y)(x0), the
//! Hamiltonian-field machinery, and the mixed finite difference taking a
//! group two-cochain to a Lie-algebra two-cochain.
//!
//! Sign conventions (fixed crate-wide, exercised by the trace identity):
//! i_{X_f} omega = df, {f, g} = -omega(X_f, X_g), and brackets
//! [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i. With these, f -> X_f intertwines
//! the Poisson bracket with the field bracket and sum_k {x_k, y_k} = -n on
//! the standard chart.

pub mod sl2;
pub mod torus;

use crate::cohomology::GroupCochain;
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::geom::{
    exterior_derivative_at, interior_product, line_integral, top_power_at, wedge_top_coefficient,
    OneForm, Point, QuadratureConfig, ScalarFunction, VectorField,
};
use crate::model::{ChartModel, ModelKind};
use nalgebra::DVector;
use std::sync::Arc;

/// Types carrying a Lie bracket.
pub trait LieBracket: Clone {
    fn bracket(&self, other: &Self) -> Self;
}

impl LieBracket for VectorField {
    fn bracket(&self, other: &Self) -> Self {
        VectorField::bracket(self, other)
    }
}

/// Real-valued Lie-algebra cochain of fixed degree.
#[derive(Clone)]
pub struct LieCochain<T> {
    degree: usize,
    eval: Arc<dyn Fn(&[T]) -> Result<f64> + Send + Sync>,
}

impl<T> LieCochain<T> {
    pub fn new(degree: usize, eval: impl Fn(&[T]) -> Result<f64> + Send + Sync + 'static) -> Self {
        LieCochain {
            degree,
            eval: Arc::new(eval),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, args: &[T]) -> Result<f64> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch {
                degree: self.degree,
                got: args.len(),
            });
        }
        (self.eval)(args)
    }
}

/// Chevalley-Eilenberg coboundary for trivial coefficients:
/// (delta c)(x_1, ..., x_{p+1}) =
///   sum_{i<j} (-1)^{i+j} c([x_i, x_j], x_1, ..., ^x_i, ..., ^x_j, ...).
pub fn ce_coboundary<T: LieBracket>(c: &LieCochain<T>, args: &[T]) -> Result<f64> {
    let p = c.degree();
    if args.len() != p + 1 {
        return Err(Error::ArityMismatch {
            degree: p + 1,
            got: args.len(),
        });
    }
    let mut acc = 0.0;
    for i in 0..args.len() {
        for j in (i + 1)..args.len() {
            // 1-based sign (-1)^{i+j} has the same parity with 0-based indices
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let mut slot = Vec::with_capacity(p);
            slot.push(args[i].bracket(&args[j]));
            for (k, x) in args.iter().enumerate() {
                if k != i && k != j {
                    slot.push(x.clone());
                }
            }
            acc += sign * c.eval(&slot)?;
        }
    }
    Ok(acc)
}

/// Max |c(x, y) + c(y, x)| over sampled argument pairs.
pub fn alternation_residual<T: Clone>(c: &LieCochain<T>, pairs: &[(T, T)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        let fwd = c.eval(&[x.clone(), y.clone()])?;
        let bwd = c.eval(&[y.clone(), x.clone()])?;
        worst = worst.max((fwd + bwd).abs());
    }
    Ok(worst)
}

/// Max entry of d(i_X omega) over the given points; zero exactly when the
/// field is locally Hamiltonian there.
pub fn local_hamiltonian_residual(
    model: &ChartModel,
    field: &VectorField,
    points: &[Point],
) -> Result<f64> {
    let f = field.clone();
    let omega = model.omega().clone();
    let alpha = OneForm::new(move |p: &Point| interior_product(&f, &omega, p));
    let mut worst: f64 = 0.0;
    for x in points {
        worst = worst.max(exterior_derivative_at(&alpha, x)?.amax());
    }
    Ok(worst)
}

/// Tolerance for the local-Hamiltonicity precondition (finite-difference
/// limited).
const LOCALLY_HAMILTONIAN_TOL: f64 = 1e-4;
/// Sample size for precondition checks.
const PRECONDITION_SAMPLES: usize = 8;

/// The point-evaluation two-cochain c_{x0}(X, Y) = omega(X, Y)(x0), after
/// checking both arguments are locally Hamiltonian at a few sample points.
pub fn c_at_basepoint(
    model: &ChartModel,
    x_field: &VectorField,
    y_field: &VectorField,
) -> Result<f64> {
    let probes = model.sample_points(PRECONDITION_SAMPLES);
    for field in [x_field, y_field] {
        let r = local_hamiltonian_residual(model, field, &probes)?;
        if r > LOCALLY_HAMILTONIAN_TOL {
            return Err(Error::NotLocallyHamiltonian { residual: r });
        }
    }
    Ok(point_pairing(model, model.basepoint(), x_field, y_field))
}

/// omega(X, Y) at an arbitrary point, no preconditions.
pub fn point_pairing(model: &ChartModel, x: &Point, xf: &VectorField, yf: &VectorField) -> f64 {
    model.omega().apply(x, &xf.at(x), &yf.at(x))
}

/// The same pairing as a degree-2 cochain at a fixed evaluation point.
/// Preconditions are the caller's business here (the closure is evaluated on
/// brackets of validated fields inside coboundary sums).
pub fn pairing_cochain(model: Arc<ChartModel>, at: Point) -> LieCochain<VectorField> {
    LieCochain::new(2, move |args: &[VectorField]| {
        Ok(point_pairing(&model, &at, &args[0], &args[1]))
    })
}

/// Hamiltonian field of f: the unique X with i_X omega = df, solved pointwise
/// from the (nondegenerate) coefficient matrix. On constant-form charts with
/// an exact Hessian available the Jacobian is exact as well.
pub fn hamiltonian_field(model: &ChartModel, f: &ScalarFunction) -> VectorField {
    let omega = model.omega().clone();
    let func = f.clone();
    let base = VectorField::new(move |x: &Point| {
        let rhs = func.gradient_at(x);
        omega
            .at(x)
            .transpose()
            .lu()
            .solve(&rhs)
            .expect("symplectic form must be nondegenerate")
    });
    let constant_form = matches!(model.kind(), ModelKind::Euclidean { .. } | ModelKind::Disk);
    if constant_form && f.hessian_at(model.basepoint()).is_some() {
        let omega = model.omega().clone();
        let func = f.clone();
        let x0 = model.basepoint().clone();
        base.with_jacobian(move |x: &Point| {
            let hess = func.hessian_at(x).expect("hessian checked above");
            let lu = omega.at(&x0).transpose().lu();
            let n = hess.nrows();
            let mut jac = nalgebra::DMatrix::zeros(n, n);
            for j in 0..n {
                let col = lu
                    .solve(&hess.column(j).into_owned())
                    .expect("symplectic form must be nondegenerate");
                jac.set_column(j, &col);
            }
            jac
        })
    } else {
        base
    }
}

/// Poisson bracket {f, g} = -omega(X_f, X_g) as a scalar function.
pub fn poisson_bracket(
    model: &ChartModel,
    f: &ScalarFunction,
    g: &ScalarFunction,
) -> ScalarFunction {
    let xf = hamiltonian_field(model, f);
    let xg = hamiltonian_field(model, g);
    let omega = model.omega().clone();
    ScalarFunction::new(move |x: &Point| -omega.apply(x, &xf.at(x), &xg.at(x)))
}

/// Max over points of |X_{{f,g}} - [X_f, X_g]| entries; the homomorphism
/// defect of f -> X_f.
pub fn hamiltonian_homomorphism_residual(
    model: &ChartModel,
    f: &ScalarFunction,
    g: &ScalarFunction,
    points: &[Point],
) -> Result<f64> {
    let bracket_fn = poisson_bracket(model, f, g);
    let x_bracket = hamiltonian_field(model, &bracket_fn);
    let xf = hamiltonian_field(model, f);
    let xg = hamiltonian_field(model, g);
    let fields_bracket = xf.bracket(&xg);
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max((x_bracket.at(p) - fields_bracket.at(p)).amax());
    }
    Ok(worst)
}

/// Max over points of the Jacobi cyclic sum {f,{g,h}} + {g,{h,f}} + {h,{f,g}}.
pub fn jacobi_residual(
    model: &ChartModel,
    f: &ScalarFunction,
    g: &ScalarFunction,
    h: &ScalarFunction,
    points: &[Point],
) -> Result<f64> {
    let fgh = poisson_bracket(model, f, &poisson_bracket(model, g, h));
    let ghf = poisson_bracket(model, g, &poisson_bracket(model, h, f));
    let hfg = poisson_bracket(model, h, &poisson_bracket(model, f, g));
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max((fgh.at(p) + ghf.at(p) + hfg.at(p)).abs());
    }
    Ok(worst)
}

/// Both sides of the volume identity
/// omega(X, Y) omega^n = n alpha_X ^ alpha_Y ^ omega^{n-1} at a point
/// (coefficients against the Darboux-ordered volume).
pub fn volume_identity_at(
    model: &ChartModel,
    xf: &VectorField,
    yf: &VectorField,
    x: &Point,
) -> Result<(f64, f64)> {
    let n = model.dim() / 2;
    let lhs = point_pairing(model, x, xf, yf) * top_power_at(model.omega(), x, n)?;
    let alpha_x = interior_product(xf, model.omega(), x);
    let alpha_y = interior_product(yf, model.omega(), x);
    let rhs = n as f64 * wedge_top_coefficient(&alpha_x, &alpha_y, &model.omega().at(x), n)?;
    Ok((lhs, rhs))
}

/// The constant sum_k {f_k, g_k} for a family with sum f_k dg_k a primitive
/// of omega. Verifies the primitive property at the probe points, evaluates
/// the bracket sum there, and errors if it drifts (which would indicate a
/// sign-convention fault); returns the constant, -n on a 2n-chart.
pub fn primitive_family_constant(
    model: &ChartModel,
    pairs: &[(ScalarFunction, ScalarFunction)],
    points: &[Point],
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::invalid("need at least one probe point"));
    }
    // alpha = sum f_k dg_k should satisfy d(alpha) = omega
    let family: Vec<(ScalarFunction, ScalarFunction)> = pairs.to_vec();
    let alpha = OneForm::new(move |p: &Point| {
        let mut acc = DVector::zeros(p.dim());
        for (f, g) in &family {
            acc += g.gradient_at(p) * f.at(p);
        }
        acc
    });
    for p in points {
        let d = exterior_derivative_at(&alpha, p)?;
        let r = (d - model.omega().at(p)).amax();
        if r > 1e-6 {
            return Err(Error::invalid(format!(
                "family is not a primitive of omega (residual {r:.3e})"
            )));
        }
    }
    let mut values = Vec::with_capacity(points.len());
    for p in points {
        let mut acc = 0.0;
        for (f, g) in pairs {
            acc += poisson_bracket(model, f, g).at(p);
        }
        values.push(acc);
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max - min > 1e-9 {
        return Err(Error::invalid(format!(
            "bracket sum is not constant (spread {:.3e}); convention drift",
            max - min
        )));
    }
    Ok(values[0])
}

/// Both sides of the basepoint-dependence identity
/// c_x(X, Y) - c_{x0}(X, Y) = - int_{x0}^{x} i_{[X,Y]} omega
/// along the canonical path.
pub fn basepoint_dependence_at(
    model: &ChartModel,
    cfg: &QuadratureConfig,
    xf: &VectorField,
    yf: &VectorField,
    x: &Point,
) -> Result<(f64, f64)> {
    let x0 = model.basepoint();
    let lhs = point_pairing(model, x, xf, yf) - point_pairing(model, x0, xf, yf);
    let bracket = xf.bracket(yf);
    let omega = model.omega().clone();
    let alpha = OneForm::new(move |p: &Point| interior_product(&bracket, &omega, p));
    let path = model.canonical_path(x0, x)?;
    let rhs = -line_integral(&alpha, &path, cfg)?.value;
    Ok((lhs, rhs))
}

/// Mixed central second difference turning a group two-cochain into a
/// Lie-algebra two-cochain:
///
/// c~(X, Y) = d^2/dtds [ c(exp tX, exp sY) - c(exp sY, exp tX) ] at 0,
///
/// with one Richardson extrapolation step, (4 D(h/2) - D(h)) / 3.
pub fn group_to_algebra<T>(
    c: &GroupCochain,
    exp: impl Fn(&T, f64) -> Result<GroupElement>,
    x: &T,
    y: &T,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let f = |t: f64, s: f64| -> Result<f64> {
        let gx = exp(x, t)?;
        let gy = exp(y, s)?;
        Ok(c.eval(&[gx.clone(), gy.clone()])? - c.eval(&[gy, gx])?)
    };
    let mixed = |h: f64| -> Result<f64> {
        Ok((f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h))
    };
    let coarse = mixed(step)?;
    let fine = mixed(step * 0.5)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Default step for `group_to_algebra`.
pub const GROUP_TO_ALGEBRA_STEP: f64 = 1e-3;

/// Evaluate a Lie cochain on a pair after checking the pair commutes (the
/// bracket vanishes at the probe points). Coboundaries vanish on commuting
/// pairs, so a nonzero value certifies a nontrivial class on any abelian
/// subalgebra containing the pair.
pub fn commuting_pair_witness(
    c: &LieCochain<VectorField>,
    xf: &VectorField,
    yf: &VectorField,
    points: &[Point],
) -> Result<f64> {
    let bracket = xf.bracket(yf);
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max(bracket.at(p).amax());
    }
    if worst > 1e-8 {
        return Err(Error::NonCommuting { residual: worst });
    }
    c.eval(&[xf.clone(), yf.clone()])
}
