//! Composite Gauss-Legendre quadrature with panel doubling.
//!
//! A single rule of fixed order is applied on 1, 2, 4, ... equal panels until
//! two successive composite values agree to the configured relative tolerance
//! (values near zero fall back to the same figure as an absolute floor).
//! Hitting the panel cap without agreement is an error carrying the partial
//! result, so non-convergence is never silently accepted.

use super::{Curve, OneForm, QuadratureConfig};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Converged quadrature result.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    /// Last panel-doubling correction; an achieved-tolerance estimate.
    pub error_estimate: f64,
    /// Number of panels at convergence.
    pub panels: u32,
}

/// Nodes and weights of the Gauss-Legendre rule of the given order on
/// [-1, 1], computed by Newton iteration on the Legendre recurrence and
/// cached per order.
pub(crate) fn gauss_legendre_rule(order: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature rule cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| Arc::new(compute_rule(order)))
        .clone()
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "quadrature order must be at least 2");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        // One more refinement so nodes are converged to full precision.
        let (p, d) = legendre_with_derivative(n, x);
        x -= p / d;
        let dp = legendre_with_derivative(n, x).1;
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// P_n(x) and P_n'(x) from the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn composite_pass(
    f: &impl Fn(f64) -> Result<f64>,
    nodes: &[f64],
    weights: &[f64],
    panels: u32,
) -> Result<f64> {
    let width = 1.0 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let left = p as f64 * width;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let t = left + width * 0.5 * (x + 1.0);
            acc += w * f(t)?;
        }
        total += acc * width * 0.5;
    }
    if !total.is_finite() {
        return Err(Error::NonFinite {
            context: "quadrature accumulation".into(),
        });
    }
    Ok(total)
}

/// Integrate f over [0, 1] with panel doubling per the config.
pub fn integrate_unit_interval(
    f: impl Fn(f64) -> Result<f64>,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    cfg.validate()?;
    let rule = gauss_legendre_rule(cfg.gauss_order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut prev = composite_pass(&f, nodes, weights, 1)?;
    let mut panels = 1u32;
    loop {
        panels = panels.saturating_mul(2);
        let cur = composite_pass(&f, nodes, weights, panels)?;
        let diff = (cur - prev).abs();
        if diff <= cfg.rel_tol * cur.abs().max(1.0) {
            return Ok(Quadrature {
                value: cur,
                error_estimate: diff,
                panels,
            });
        }
        if panels >= cfg.max_panels {
            return Err(Error::QuadratureNotConverged {
                value: cur,
                error_estimate: diff,
                panels,
            });
        }
        prev = cur;
    }
}

/// Line integral of a one-form along a curve.
///
/// Curves with coincident endpoints that are also constant-parametrized are
/// integrated trivially; everything else goes through panel doubling on the
/// pulled-back integrand theta(c(t)) . c'(t).
pub fn line_integral(form: &OneForm, curve: &Curve, cfg: &QuadratureConfig) -> Result<Quadrature> {
    if curve.start() == curve.end() && curve.at(0.5) == *curve.start() {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let integrand = |t: f64| -> Result<f64> {
        let x = curve.at(t);
        let theta = form.at(&x);
        let v = curve.velocity_at(t);
        let val = theta.dot(&v);
        if !val.is_finite() {
            return Err(Error::NonFinite {
                context: format!("line integrand at t = {t}"),
            });
        }
        Ok(val)
    };
    integrate_unit_interval(integrand, cfg)
}

/// Tensor-product quadrature of f over the unit square, doubling the panel
/// grid in both directions until two passes agree per the config tolerance.
pub fn integrate_unit_square(
    f: impl Fn(f64, f64) -> Result<f64>,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    cfg.validate()?;
    let rule = gauss_legendre_rule(cfg.gauss_order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let pass = |panels: u32| -> Result<f64> {
        let width = 1.0 / panels as f64;
        let mut total = 0.0;
        for px in 0..panels {
            for py in 0..panels {
                let lx = px as f64 * width;
                let ly = py as f64 * width;
                let mut acc = 0.0;
                for (xi, wi) in nodes.iter().zip(weights) {
                    let x = lx + width * 0.5 * (xi + 1.0);
                    for (yj, wj) in nodes.iter().zip(weights) {
                        let y = ly + width * 0.5 * (yj + 1.0);
                        acc += wi * wj * f(x, y)?;
                    }
                }
                total += acc * width * width * 0.25;
            }
        }
        if !total.is_finite() {
            return Err(Error::NonFinite {
                context: "square quadrature accumulation".into(),
            });
        }
        Ok(total)
    };
    let mut prev = pass(1)?;
    let mut panels = 1u32;
    // The panel count is per axis, so cost grows by 4x per doubling; cap the
    // grid at the square root of the configured panel budget.
    let cap = (cfg.max_panels as f64).sqrt().max(2.0) as u32;
    loop {
        panels = panels.saturating_mul(2);
        let cur = pass(panels)?;
        let diff = (cur - prev).abs();
        if diff <= cfg.rel_tol * cur.abs().max(1.0) {
            return Ok(Quadrature {
                value: cur,
                error_estimate: diff,
                panels,
            });
        }
        if panels >= cap {
            return Err(Error::QuadratureNotConverged {
                value: cur,
                error_estimate: diff,
                panels,
            });
        }
        prev = cur;
    }
}
