//! Upper half-plane chart: hyperbolic area form, geodesics, Moebius action,
//! and the geodesic-triangle cocycle with its angle-defect oracle.
//!
//! Conventions: points are z = (x, y) with y > 0; omega = dx ^ dy / y^2;
//! the primitive is omega_1 = dx / y; the basepoint is i = (0, 1). Geodesics
//! are vertical lines or semicircles centered on the real axis, and Moebius
//! maps carry geodesics to geodesics, which is what makes the circulation
//! around a geodesic triangle computable one side at a time.

use super::{ChartModel, ModelKind};
use crate::element::MoebiusMatrix;
use crate::error::Result;
use crate::geom::{line_integral, Curve, OneForm, Point, QuadratureConfig, TwoForm};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::sync::Arc;

/// Two half-plane points are treated as lying on a common vertical when the
/// real parts agree to this tolerance.
const VERTICAL_EPS: f64 = 1e-12;

/// Pairwise hyperbolic distance below which a triangle counts as degenerate.
const DEGENERATE_EPS: f64 = 1e-6;

/// The upper half-plane model.
pub fn make_h2() -> ChartModel {
    let omega = TwoForm::new(|p: &Point| {
        let q = 1.0 / (p[1] * p[1]);
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = q;
        m[(1, 0)] = -q;
        m
    });
    let omega1 = OneForm::new(|p: &Point| DVector::from_vec(vec![1.0 / p[1], 0.0]));
    ChartModel {
        name: "h2".into(),
        kind: ModelKind::HalfPlane,
        dim: 2,
        domain: Arc::new(|p: &Point| p[1] > 0.0),
        omega,
        omega1,
        basepoint: Point::new(vec![0.0, 1.0]),
        map_unit: Arc::new(|u: &[f64]| {
            // x in [-2, 2]; y log-uniform in [1/4, 4]
            let x = -2.0 + 4.0 * u[0];
            let y = 0.25 * (16.0f64).powf(u[1]);
            Point::new(vec![x, y])
        }),
    }
}

/// Shape of the geodesic through two half-plane points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeodesicShape {
    VerticalLine,
    /// Semicircle centered at (center, 0).
    Arc {
        center: f64,
        radius: f64,
    },
}

pub fn geodesic_shape(z1: &Point, z2: &Point) -> GeodesicShape {
    let dx = z2[0] - z1[0];
    if dx.abs() <= VERTICAL_EPS {
        GeodesicShape::VerticalLine
    } else {
        let n1 = z1[0] * z1[0] + z1[1] * z1[1];
        let n2 = z2[0] * z2[0] + z2[1] * z2[1];
        let center = (n2 - n1) / (2.0 * dx);
        let radius = (z1[0] - center).hypot(z1[1]);
        GeodesicShape::Arc { center, radius }
    }
}

/// The geodesic from z1 to z2 as a parametrized curve.
///
/// Vertical segments are parametrized linearly; arcs by angle. The arc
/// abscissa is evaluated in the product form
/// x(theta) = x1 - 2 r sin((theta + theta1)/2) sin((theta - theta1)/2),
/// which stays accurate when the center is far away (near-vertical pairs).
pub fn geodesic(z1: &Point, z2: &Point) -> Curve {
    assert!(z1[1] > 0.0 && z2[1] > 0.0, "geodesics need Im z > 0");
    match geodesic_shape(z1, z2) {
        GeodesicShape::VerticalLine => Curve::segment(z1.clone(), z2.clone()),
        GeodesicShape::Arc { center, radius } => {
            let theta1 = (z1[1]).atan2(z1[0] - center);
            let theta2 = (z2[1]).atan2(z2[0] - center);
            let dtheta = theta2 - theta1;
            let x1 = z1[0];
            let param = move |t: f64| {
                let theta = theta1 + t * dtheta;
                let x = x1
                    - 2.0
                        * radius
                        * ((theta + theta1) * 0.5).sin()
                        * ((theta - theta1) * 0.5).sin();
                Point::new(vec![x, radius * theta.sin()])
            };
            let vel = move |t: f64| {
                let theta = theta1 + t * dtheta;
                DVector::from_vec(vec![
                    -radius * dtheta * theta.sin(),
                    radius * dtheta * theta.cos(),
                ])
            };
            Curve::new(z1.clone(), z2.clone(), param).with_velocity(vel)
        }
    }
}

/// Hyperbolic distance on the half-plane.
pub fn hyperbolic_distance(z1: &Point, z2: &Point) -> f64 {
    let dx = z1[0] - z2[0];
    let dy = z1[1] - z2[1];
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z1[1] * z2[1]);
    arg.acosh()
}

/// Unit tangent direction at `v` of the geodesic from `v` toward `p`.
fn tangent_toward(v: &Point, p: &Point) -> DVector<f64> {
    match geodesic_shape(v, p) {
        GeodesicShape::VerticalLine => DVector::from_vec(vec![0.0, (p[1] - v[1]).signum()]),
        GeodesicShape::Arc { center, .. } => {
            let tv = (v[1]).atan2(v[0] - center);
            let tp = (p[1]).atan2(p[0] - center);
            let s = (tp - tv).signum();
            DVector::from_vec(vec![-s * tv.sin(), s * tv.cos()])
        }
    }
}

/// Half-plane -> Klein disk, where geodesics become straight chords; used
/// only to decide triangle orientation.
fn to_klein(z: &Point) -> (f64, f64) {
    // Cayley transform to the Poincare disk, then the radial map to Klein.
    let (x, y) = (z[0], z[1]);
    let den = x * x + (y + 1.0) * (y + 1.0);
    let wx = (x * x + y * y - 1.0) / den;
    let wy = (-2.0 * x) / den;
    let norm = 1.0 + wx * wx + wy * wy;
    (2.0 * wx / norm, 2.0 * wy / norm)
}

/// Signed hyperbolic area of the geodesic triangle with the given vertices,
/// by the angle defect pi - (alpha + beta + gamma), signed by the vertex
/// orientation read off in the Klein model. Returns (area, degenerate);
/// triangles with a pair of vertices closer than 1e-6 report (0, true).
pub fn triangle_area_oracle(z1: &Point, z2: &Point, z3: &Point) -> (f64, bool) {
    let dmin = hyperbolic_distance(z1, z2)
        .min(hyperbolic_distance(z2, z3))
        .min(hyperbolic_distance(z1, z3));
    if dmin < DEGENERATE_EPS {
        return (0.0, true);
    }
    let mut angles = 0.0;
    for (v, a, b) in [(z1, z2, z3), (z2, z3, z1), (z3, z1, z2)] {
        let u = tangent_toward(v, a);
        let w = tangent_toward(v, b);
        angles += u.dot(&w).clamp(-1.0, 1.0).acos();
    }
    let k1 = to_klein(z1);
    let k2 = to_klein(z2);
    let k3 = to_klein(z3);
    let cross = (k2.0 - k1.0) * (k3.1 - k1.1) - (k2.1 - k1.1) * (k3.0 - k1.0);
    let orientation = if cross > 0.0 {
        1.0
    } else if cross < 0.0 {
        -1.0
    } else {
        0.0
    };
    (orientation * (std::f64::consts::PI - angles), false)
}

/// Circulation of the model primitive around the geodesic triangle
/// basepoint -> g1(basepoint) -> g1 g2(basepoint) -> basepoint.
///
/// Equals the signed area of that triangle and defines a two-cocycle bounded
/// by pi in absolute value.
pub fn gw_cocycle(
    model: &ChartModel,
    cfg: &QuadratureConfig,
    g1: &MoebiusMatrix,
    g2: &MoebiusMatrix,
) -> Result<f64> {
    let z0 = model.basepoint().clone();
    let v1 = g1.act(&z0);
    let v2 = g1.mul(g2).act(&z0);
    let mut total = 0.0;
    for (a, b) in [(&z0, &v1), (&v1, &v2), (&v2, &z0)] {
        total += line_integral(model.omega1(), &geodesic(a, b), cfg)?.value;
    }
    Ok(total)
}

/// The primitive integrated from the basepoint to g(basepoint) along the
/// geodesic; the 1-cochain whose coboundary links the model cocycle to the
/// triangle circulation.
pub fn gamma_cochain(model: &ChartModel, cfg: &QuadratureConfig, g: &MoebiusMatrix) -> Result<f64> {
    let z0 = model.basepoint().clone();
    let z1 = g.act(&z0);
    Ok(line_integral(model.omega1(), &geodesic(&z0, &z1), cfg)?.value)
}

/// Random element of PSL(2, R) as rotation * diagonal * rotation with
/// stretch factor in [1.1, 3].
pub fn random_psl_element(rng: &mut impl Rng) -> MoebiusMatrix {
    let theta1: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let theta2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let lambda: f64 = rng.random_range(1.1..3.0);
    let k1 = MoebiusMatrix::new(theta1.cos(), -theta1.sin(), theta1.sin(), theta1.cos())
        .expect("rotation is unimodular");
    let k2 = MoebiusMatrix::new(theta2.cos(), -theta2.sin(), theta2.sin(), theta2.cos())
        .expect("rotation is unimodular");
    let a = MoebiusMatrix::new(lambda, 0.0, 0.0, 1.0 / lambda).expect("diagonal is unimodular");
    k1.mul(&a).mul(&k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(vec![x, y])
    }

    #[test]
    fn shape_classification() {
        assert_eq!(
            geodesic_shape(&pt(0.0, 1.0), &pt(0.0, 2.0)),
            GeodesicShape::VerticalLine
        );
        match geodesic_shape(&pt(-1.0, 1.0), &pt(1.0, 1.0)) {
            GeodesicShape::Arc { center, radius } => {
                assert!(center.abs() < 1e-14);
                assert!((radius - (2.0f64).sqrt()).abs() < 1e-14);
            }
            other => panic!("expected arc, got {other:?}"),
        }
    }

    #[test]
    fn geodesic_endpoints_are_exact() {
        let a = pt(-0.7, 0.4);
        let b = pt(1.3, 2.2);
        let g = geodesic(&a, &b);
        assert_eq!(g.at(0.0), a);
        assert_eq!(g.at(1.0), b);
        // interior stays in the upper half-plane
        for k in 1..20 {
            assert!(g.at(k as f64 / 20.0)[1] > 0.0);
        }
    }

    #[test]
    fn primitive_vanishes_on_vertical_geodesics() {
        let m = make_h2();
        let g = geodesic(&pt(0.0, 1.0), &pt(0.0, 2.0));
        let q = line_integral(m.omega1(), &g, &QuadratureConfig::default()).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn distance_is_moebius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let g = random_psl_element(&mut rng);
            let a = pt(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0));
            let b = pt(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0));
            let before = hyperbolic_distance(&a, &b);
            let after = hyperbolic_distance(&g.act(&a), &g.act(&b));
            assert!((before - after).abs() < 1e-9, "{before} vs {after}");
        }
    }

    #[test]
    fn moebius_preserves_area_form() {
        use crate::geom::symplectic_pullback_residual;
        let m = make_h2();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pts = m.sample_points(40);
        for _ in 0..10 {
            let g = crate::element::GroupElement::Moebius(random_psl_element(&mut rng));
            let r = symplectic_pullback_residual(&g, m.omega(), &pts).unwrap();
            assert!(r < 1e-8, "residual {r}");
        }
    }

    #[test]
    fn ideal_triangle_limit_is_pi() {
        // vertices marching toward 0, infinity, and 1 on the boundary; the
        // angle defect approaches pi for the counterclockwise order
        let (area, degenerate) =
            triangle_area_oracle(&pt(0.0, 1e-6), &pt(0.0, 1e6), &pt(1.0, 1e-6));
        assert!(!degenerate);
        assert!((area.abs() - std::f64::consts::PI).abs() < 1e-2);
    }

    #[test]
    fn degenerate_triangles_flagged() {
        let (area, degenerate) =
            triangle_area_oracle(&pt(0.3, 1.0), &pt(0.3, 1.0 + 1e-9), &pt(1.0, 2.0));
        assert_eq!(area, 0.0);
        assert!(degenerate);
    }

    #[test]
    fn orientation_flips_sign() {
        let a = pt(0.0, 1.0);
        let b = pt(1.0, 1.0);
        let c = pt(0.5, 2.0);
        let (abc, _) = triangle_area_oracle(&a, &b, &c);
        let (acb, _) = triangle_area_oracle(&a, &c, &b);
        assert!((abc + acb).abs() < 1e-12);
        assert!(abc.abs() > 0.01);
    }

    #[test]
    fn circulation_matches_angle_defect_oracle() {
        let m = make_h2();
        let cfg = QuadratureConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let g1 = random_psl_element(&mut rng);
            let g2 = random_psl_element(&mut rng);
            let z0 = m.basepoint().clone();
            let v1 = g1.act(&z0);
            let v2 = g1.mul(&g2).act(&z0);
            let circulation = gw_cocycle(&m, &cfg, &g1, &g2).unwrap();
            let (oracle, degenerate) = triangle_area_oracle(&z0, &v1, &v2);
            if !degenerate {
                assert!(
                    (circulation - oracle).abs() < 1e-7,
                    "circulation {circulation} vs oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn rotations_about_basepoint_collapse_the_triangle() {
        // rotations fix i, so every vertex of the triangle coincides
        let m = make_h2();
        let cfg = QuadratureConfig::default();
        let th = 0.7f64;
        let rot = MoebiusMatrix::new(th.cos(), -th.sin(), th.sin(), th.cos()).unwrap();
        let value = gw_cocycle(&m, &cfg, &rot, &rot.inverse()).unwrap();
        assert!(value.abs() < 1e-9);
        // and with a generic second argument the first vertex pair collapses
        let g2 = MoebiusMatrix::new(2.0, 1.0, 0.0, 0.5).unwrap();
        let v = gw_cocycle(&m, &cfg, &rot, &g2).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn gw_bound_holds_on_a_sweep() {
        let m = make_h2();
        let cfg = QuadratureConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..200 {
            let g1 = random_psl_element(&mut rng);
            let g2 = random_psl_element(&mut rng);
            let v = gw_cocycle(&m, &cfg, &g1, &g2).unwrap();
            assert!(v.abs() < std::f64::consts::PI, "|{v}| >= pi");
        }
    }

    #[test]
    fn klein_map_sends_basepoint_to_origin() {
        let (kx, ky) = to_klein(&pt(0.0, 1.0));
        assert!(kx.abs() < 1e-15 && ky.abs() < 1e-15);
    }
}
