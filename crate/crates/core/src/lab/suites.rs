//! Case inventories per model: what `verify` actually runs. Every case is a
//! closed check — it draws its own inputs from a per-case RNG stream,
//! evaluates one identity (or control), and reports a residual plus the
//! values behind it. Inverted controls encode "this quantity must stay
//! large/small" as `residual = max(0, threshold - actual)` with tolerance 0,
//! so the pass rule `|residual| <= tolerance` covers them too.

use super::report::Report;
use super::{evaluate_case, BuiltModel, Case, CaseOutcome, ModelSpec, Scenario};
use crate::cohomology::fit::{coboundary_fit, synthetic_coboundary, WordSet};
use crate::cohomology::{
    basepoint_shift_cochain, extension_compose, extension_inverse, gauge_shift_cochain,
    group_coboundary, CocycleEngine, ExtensionElement, GroupCochain, PrequantPoint,
};
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::geom::{exterior_derivative_at, OneForm, Point, QuadratureConfig, VectorField};
use crate::lie::sl2::{random_sl2, whitehead_witness, Sl2Element};
use crate::lie::torus::{
    basepoint_average_identity, primitive_product_identity, torus_b, TorusField,
};
use crate::lie::{
    alternation_residual, basepoint_dependence_at, ce_coboundary, commuting_pair_witness,
    group_to_algebra, hamiltonian_homomorphism_residual, jacobi_residual, pairing_cochain,
    primitive_family_constant, volume_identity_at, LieCochain, GROUP_TO_ALGEBRA_STEP,
};
use crate::model::hyperbolic::{
    gamma_cochain, gw_cocycle, random_psl_element, triangle_area_oracle,
};
use crate::model::{heisenberg_closed_form, make_disk, make_r2n, ChartModel, ModelKind};
use crate::poly::Poly;
use nalgebra::DVector;
use rand::Rng;
use std::f64::consts::PI;
use std::sync::Arc;

/// Trial count for a case: the scenario's sample budget, capped so the
/// expensive quadrature-heavy checks stay fast.
fn budget(samples: usize, cap: usize) -> usize {
    samples.min(cap).max(1)
}

pub(crate) fn verify_cases(
    built: &BuiltModel,
    spec: &ModelSpec,
    sc: &Scenario,
) -> Result<Vec<Case>> {
    match built {
        BuiltModel::Torus => Ok(torus_cases(sc)),
        BuiltModel::Chart(model) => {
            let mut cases = chart_cases(model, spec, sc)?;
            match spec {
                ModelSpec::R2n(n) => cases.extend(euclidean_cases(model.clone(), *n, sc)),
                ModelSpec::HalfPlane => cases.extend(hyperbolic_cases(model.clone(), sc)),
                ModelSpec::Disk => cases.extend(disk_cases(sc)),
                ModelSpec::Product(a, b) => cases.extend(product_cases(model.clone(), a, b, sc)?),
                ModelSpec::Torus => unreachable!("torus handled above"),
            }
            Ok(cases)
        }
    }
}

/// The engine's chart: the scenario override wins; otherwise the disk moves
/// its basepoint off the origin (which every twist fixes, collapsing the
/// cocycle there) and the other models keep their default.
fn resolve_chart(
    model: &Arc<ChartModel>,
    spec: &ModelSpec,
    sc: &Scenario,
) -> Result<Arc<ChartModel>> {
    if let Some(bp) = &sc.basepoint {
        return Ok(Arc::new(model.with_basepoint(Point::new(bp.clone()))?));
    }
    if matches!(spec, ModelSpec::Disk) {
        return Ok(Arc::new(model.with_basepoint(Point::new(vec![0.3, 0.0]))?));
    }
    Ok(model.clone())
}

/// Checks shared by every chart model: the primitive, element validation,
/// the cocycle axioms, both shift identities, the extension laws, and the
/// prequantization action.
fn chart_cases(model: &Arc<ChartModel>, spec: &ModelSpec, sc: &Scenario) -> Result<Vec<Case>> {
    let base = resolve_chart(model, spec, sc)?;
    let engine = Arc::new(CocycleEngine::new(base.clone()));
    let samples = sc.samples;
    let mut cases = Vec::new();

    {
        let m = base.clone();
        cases.push(Case::new("geom/primitive", 1e-7, move |_rng| {
            let points = m.sample_points(100);
            let r = m.primitive_residual(&points)?;
            Ok(
                CaseOutcome::new(r, "max |d(omega1) - omega| entry over 100 chart points")
                    .with("points", points.len() as f64),
            )
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        let k = budget(samples, 6);
        cases.push(Case::new("geom/symplectic", 1e-7, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..k {
                worst = worst.max(eng.validate(&m.random_element(rng))?);
            }
            Ok(CaseOutcome::new(
                worst,
                format!("max pullback defect |g* omega - omega| over {k} random elements"),
            )
            .with("elements", k as f64))
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        cases.push(Case::new("cocycle/normalized", 1e-12, move |rng| {
            let probes: Vec<GroupElement> = (0..5).map(|_| m.random_element(rng)).collect();
            let r = eng.cochain().normalization_residual(&probes)?;
            Ok(CaseOutcome::new(
                r,
                "cocycle evaluations with an identity argument, over 5 random elements",
            ))
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        let trials = budget(samples, 60);
        cases.push(Case::new("cocycle/identity", 1e-8, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let g1 = m.random_element(rng);
                let g2 = m.random_element(rng);
                let g3 = m.random_element(rng);
                worst = worst.max(eng.cocycle_identity_residual(&g1, &g2, &g3)?);
            }
            Ok(CaseOutcome::new(
                worst,
                format!("max |(DC)(g1,g2,g3)| over {trials} random triples"),
            )
            .with("triples", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let trials = budget(samples, 10);
        cases.push(Case::new("cocycle/basepoint-shift", 1e-8, move |rng| {
            let x1 = m.basepoint().clone();
            let x2 = m
                .sample_points(7)
                .pop()
                .ok_or_else(|| Error::invalid("no sample points"))?;
            let e1 = Arc::new(CocycleEngine::new(m.clone()));
            let e2 = Arc::new(CocycleEngine::new(Arc::new(m.with_basepoint(x2.clone())?)));
            let a = basepoint_shift_cochain(m.clone(), QuadratureConfig::default(), x1, x2);
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let g1 = m.random_element(rng);
                let g2 = m.random_element(rng);
                let c1 = e1.cocycle(&g1, &g2)?;
                let c2 = e2.cocycle(&g1, &g2)?;
                let da = group_coboundary(&a, &[g1, g2])?;
                worst = worst.max((c1 - c2 - da).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "cocycles at two basepoints differ by the coboundary of the transport \
                     1-cochain; max residual over {trials} pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let trials = budget(samples, 8);
        cases.push(Case::new("cocycle/gauge-shift", 1e-8, move |rng| {
            let p = Poly::random(rng, m.dim(), 2, 4, 0.25);
            let f = p.to_scalar_function();
            let gauged = Arc::new(m.with_primitive(m.omega1().add(&OneForm::exact(&f)), "gauged"));
            let e0 = Arc::new(CocycleEngine::new(m.clone()));
            let e1 = Arc::new(CocycleEngine::new(gauged));
            let h = gauge_shift_cochain(m.clone(), f);
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let g1 = m.random_element(rng);
                let g2 = m.random_element(rng);
                let diff = e1.cocycle(&g1, &g2)? - e0.cocycle(&g1, &g2)?;
                let dh = group_coboundary(&h, &[g1, g2])?;
                worst = worst.max((diff - dh).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "adding an exact form df to the primitive shifts the cocycle by the \
                     coboundary of g -> f(x0) - f(g x0); max residual over {trials} pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        let trials = budget(samples, 12);
        cases.push(Case::new("extension/associativity", 1e-9, move |rng| {
            let f = eng.cochain();
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let u = ExtensionElement::new(m.random_element(rng), rng.random_range(-1.0..1.0));
                let v = ExtensionElement::new(m.random_element(rng), rng.random_range(-1.0..1.0));
                let w = ExtensionElement::new(m.random_element(rng), rng.random_range(-1.0..1.0));
                let left = extension_compose(&extension_compose(&u, &v, &f)?, &w, &f)?;
                let right = extension_compose(&u, &extension_compose(&v, &w, &f)?, &f)?;
                let x = m.random_point(rng);
                let fiber = (left.a - right.a).abs();
                let basedev = (left.g.act(&x).coords() - right.g.act(&x).coords()).amax();
                worst = worst.max(fiber).max(basedev);
            }
            Ok(CaseOutcome::new(
                worst,
                format!("max fiber/base associativity defect over {trials} random triples"),
            )
            .with("triples", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        let trials = budget(samples, 12);
        cases.push(Case::new("extension/inverse", 1e-12, move |rng| {
            let f = eng.cochain();
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let u = ExtensionElement::new(m.random_element(rng), rng.random_range(-1.0..1.0));
                let inv = extension_inverse(&u, &f)?;
                let prod = extension_compose(&u, &inv, &f)?;
                let x = m.random_point(rng);
                let fiber = prod.a.abs();
                let basedev = (prod.g.act(&x).coords() - x.coords()).amax();
                worst = worst.max(fiber).max(basedev);
            }
            Ok(CaseOutcome::new(
                worst,
                format!("(g,a)(g,a)^-1 returns the identity; max deviation over {trials} draws"),
            )
            .with("elements", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        cases.push(Case::new("prequant/connection", 1e-6, move |rng| {
            let points = m.sample_points(5);
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let u = ExtensionElement::new(m.random_element(rng), rng.random_range(-1.0..1.0));
                worst = worst.max(eng.connection_residual(&u, &points)?);
            }
            Ok(CaseOutcome::new(
                worst,
                "max |Phi*(dt + omega1) - (dt + omega1)| entry for 3 random bundle maps \
                 probed at 5 chart points",
            )
            .with("elements", 3.0)
            .with("points", points.len() as f64))
        }));
    }

    {
        let m = base.clone();
        let eng = engine.clone();
        let trials = budget(samples, 6);
        cases.push(Case::new("prequant/composition", 1e-8, move |rng| {
            let mirror = eng.mirrored_cochain();
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let u = ExtensionElement::new(m.random_element(rng), rng.random_range(-0.5..0.5));
                let v = ExtensionElement::new(m.random_element(rng), rng.random_range(-0.5..0.5));
                let p = PrequantPoint {
                    x: m.random_point(rng),
                    t: rng.random_range(-0.5..0.5),
                };
                let two_step = eng.prequant_act(&u, &eng.prequant_act(&v, &p)?)?;
                let one_step = eng.prequant_act(&extension_compose(&u, &v, &mirror)?, &p)?;
                let fiber = (two_step.t - one_step.t).abs();
                let basedev = (two_step.x.coords() - one_step.x.coords()).amax();
                worst = worst.max(fiber).max(basedev);
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "the bundle maps compose as the extension product over the mirrored \
                     cocycle -C; the fiber reflection a -> -a carries this to the \
                     extension over C; max deviation over {trials} pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    Ok(cases)
}

/// Translation-model extras: the closed form, both non-triviality
/// witnesses, the fit controls, and the Lie-algebra checks that want a
/// global vector-space chart.
fn euclidean_cases(base: Arc<ChartModel>, n: usize, sc: &Scenario) -> Vec<Case> {
    let engine = Arc::new(CocycleEngine::new(base.clone()));
    let samples = sc.samples;
    let mut cases = Vec::new();
    let dim = 2 * n;

    {
        let eng = engine.clone();
        let trials = budget(samples, 100);
        cases.push(Case::new("closed-form/agreement", 1e-9, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let u = DVector::from_fn(dim, |_, _| rng.random_range(-1.5..1.5));
                let v = DVector::from_fn(dim, |_, _| rng.random_range(-1.5..1.5));
                let quad = eng.cocycle(
                    &GroupElement::Translation(u.clone()),
                    &GroupElement::Translation(v.clone()),
                )?;
                let closed = heisenberg_closed_form(&u, &v)?;
                worst = worst.max((quad - closed).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "quadrature cocycle vs the closed form (half the symplectic pairing \
                     of the displacements) on {trials} random translation pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    {
        let eng = engine.clone();
        cases.push(Case::new("witness/antisymmetry", 1e-12, move |_rng| {
            let mut e1 = vec![0.0; dim];
            e1[0] = 1.0;
            let mut en1 = vec![0.0; dim];
            en1[n] = 1.0;
            let g = GroupElement::translation(e1);
            let h = GroupElement::translation(en1);
            let w = eng.antisymmetry_witness(&eng.cochain(), &g, &h)?;
            Ok(CaseOutcome::new(
                (w - 1.0).abs(),
                "C(g,h) - C(h,g) = 1 on the commuting unit translations (e1, e_{n+1}); \
                 a coboundary would make it 0",
            )
            .with("witness", w))
        }));
    }

    {
        let m = base.clone();
        cases.push(Case::new("witness/commuting-lie", 1e-9, move |_rng| {
            let c = pairing_cochain(m.clone(), m.basepoint().clone());
            let mut e1 = DVector::zeros(dim);
            e1[0] = 1.0;
            let mut en1 = DVector::zeros(dim);
            en1[n] = 1.0;
            let xf = VectorField::constant(e1);
            let yf = VectorField::constant(en1);
            let v = commuting_pair_witness(&c, &xf, &yf, &m.sample_points(8))?;
            Ok(CaseOutcome::new(
                (v - 1.0).abs(),
                "the point cocycle on the commuting constant fields (e1, e_{n+1}) \
                 equals 1; a coboundary vanishes on commuting pairs",
            )
            .with("witness", v))
        }));
    }

    {
        let eng = engine.clone();
        cases.push(Case::new("lie/group-to-algebra", 1e-10, move |_rng| {
            let mut e1 = DVector::zeros(dim);
            e1[0] = 1.0;
            let mut en1 = DVector::zeros(dim);
            en1[n] = 1.0;
            let c = eng.cochain();
            let ct = group_to_algebra(
                &c,
                |v: &DVector<f64>, t: f64| Ok(GroupElement::Translation(v * t)),
                &e1,
                &en1,
                GROUP_TO_ALGEBRA_STEP,
            )?;
            Ok(CaseOutcome::new(
                (ct - 1.0).abs(),
                "second mixed difference of the alternated cocycle along translation \
                 one-parameter groups recovers omega(e1, e_{n+1}) = 1",
            )
            .with("ctilde", ct))
        }));
    }

    {
        let m = base.clone();
        cases.push(Case::new("lie/trace", 1e-9, move |_rng| {
            let pairs: Vec<_> = (0..n)
                .map(|k| {
                    (
                        Poly::var(dim, k).to_scalar_function(),
                        Poly::var(dim, n + k).to_scalar_function(),
                    )
                })
                .collect();
            let c = primitive_family_constant(&m, &pairs, &m.sample_points(6))?;
            Ok(CaseOutcome::new(
                (c + n as f64).abs(),
                "sum_k {f_k, g_k} over a family with sum f_k dg_k a primitive of omega \
                 is the constant -n",
            )
            .with("constant", c))
        }));
    }

    {
        let eng = engine.clone();
        let m = base.clone();
        cases.push(Case::new("fit/synthetic-positive", 1e-10, move |rng| {
            let gens: Vec<GroupElement> = (0..4).map(|_| m.random_element(rng)).collect();
            let words = WordSet::random_walk(&gens, 3, 6, rng)?;
            let probe = m.random_point(rng);
            let f = synthetic_coboundary(move |g| {
                let y = g.act(&probe);
                y[0] * y[0] - y[1]
            });
            let fit = coboundary_fit(&f, &words)?;
            let _ = &eng; // engine kept alive for symmetry with the negative control
            Ok(CaseOutcome::new(
                fit.normalized_residual,
                "positive control: a synthetic coboundary Db is explained exactly by a \
                 least-squares potential",
            )
            .with("rank", fit.rank as f64)
            .with("equations", fit.equations as f64)
            .with("unknowns", fit.unknowns as f64))
        }));
    }

    {
        let eng = engine.clone();
        let m = base.clone();
        cases.push(Case::new("fit/heisenberg-negative", 0.0, move |rng| {
            let gens: Vec<GroupElement> = (0..4).map(|_| m.random_element(rng)).collect();
            let words = WordSet::random_walk(&gens, 3, 6, rng)?;
            let fit = coboundary_fit(&eng.cochain(), &words)?;
            let r = (0.01 - fit.normalized_residual).max(0.0);
            Ok(CaseOutcome::new(
                r,
                "inverted control: passes while the normalized fit residual stays above \
                 0.01, i.e. no potential explains the translation cocycle",
            )
            .with("normalized_residual", fit.normalized_residual)
            .with("rms_residual", fit.rms_residual)
            .with("rank", fit.rank as f64)
            .with("equations", fit.equations as f64))
        }));
    }

    if n == 1 {
        let m = base.clone();
        cases.push(Case::new("lie/basepoint-dependence", 1e-6, move |rng| {
            let cfg = QuadratureConfig::default();
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let f = Poly::random(rng, 2, 3, 4, 0.4);
                let g = Poly::random(rng, 2, 3, 4, 0.4);
                let xf = crate::lie::hamiltonian_field(&m, &f.to_scalar_function());
                let yf = crate::lie::hamiltonian_field(&m, &g.to_scalar_function());
                for x in m.sample_points(3) {
                    let (lhs, rhs) = basepoint_dependence_at(&m, &cfg, &xf, &yf, &x)?;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            Ok(CaseOutcome::new(
                worst,
                "moving the evaluation point changes the point cocycle by minus the \
                 line integral of the bracket contraction; 3 draws x 3 probe points",
            ))
        }));

        let m = base.clone();
        cases.push(Case::new("lie/point-cochain-closed", 1e-5, move |rng| {
            let x = m.random_point(rng);
            let c = pairing_cochain(m.clone(), x);
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let fields: Vec<VectorField> = (0..3)
                    .map(|_| {
                        let h = Poly::random(rng, 2, 3, 4, 0.4);
                        crate::lie::hamiltonian_field(&m, &h.to_scalar_function())
                    })
                    .collect();
                worst = worst.max(ce_coboundary(&c, &fields)?.abs());
            }
            Ok(CaseOutcome::new(
                worst,
                "Chevalley-Eilenberg coboundary of the point cocycle on polynomial \
                 Hamiltonian triples",
            ))
        }));
    }

    if n == 2 {
        let m = base.clone();
        cases.push(Case::new("lie/volume-identity", 1e-8, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let f = Poly::random(rng, 4, 3, 5, 0.4);
                let g = Poly::random(rng, 4, 3, 5, 0.4);
                let xf = crate::lie::hamiltonian_field(&m, &f.to_scalar_function());
                let yf = crate::lie::hamiltonian_field(&m, &g.to_scalar_function());
                for x in m.sample_points(4) {
                    let (lhs, rhs) = volume_identity_at(&m, &xf, &yf, &x)?;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            Ok(CaseOutcome::new(
                worst,
                "omega(X,Y) omega^n = n alpha_X ^ alpha_Y ^ omega^(n-1) compared as \
                 top-degree coefficients; 3 draws x 4 probe points",
            ))
        }));

        let m = base.clone();
        cases.push(Case::new("lie/jacobi", 1e-5, move |rng| {
            let f = Poly::random(rng, 4, 3, 5, 0.4).to_scalar_function();
            let g = Poly::random(rng, 4, 3, 5, 0.4).to_scalar_function();
            let h = Poly::random(rng, 4, 3, 5, 0.4).to_scalar_function();
            let r = jacobi_residual(&m, &f, &g, &h, &m.sample_points(5))?;
            Ok(CaseOutcome::new(
                r,
                "cyclic Poisson sum {f,{g,h}} + {g,{h,f}} + {h,{f,g}} at 5 probe points",
            ))
        }));

        let m = base.clone();
        cases.push(Case::new("lie/homomorphism", 1e-5, move |rng| {
            let f = Poly::random(rng, 4, 3, 5, 0.4).to_scalar_function();
            let g = Poly::random(rng, 4, 3, 5, 0.4).to_scalar_function();
            let r = hamiltonian_homomorphism_residual(&m, &f, &g, &m.sample_points(5))?;
            Ok(CaseOutcome::new(
                r,
                "X_{{f,g}} = [X_f, X_g]: max entry difference at 5 probe points",
            ))
        }));
    }

    cases
}

/// Half-plane extras: the triangle-circulation cocycle, its oracle, bound,
/// and the induced sl2 chain.
fn hyperbolic_cases(base: Arc<ChartModel>, sc: &Scenario) -> Vec<Case> {
    let engine = Arc::new(CocycleEngine::new(base.clone()));
    let cfg = QuadratureConfig::default();
    let samples = sc.samples;
    let mut cases = Vec::new();

    {
        let m = base.clone();
        let eng = engine.clone();
        let cfg = cfg.clone();
        let trials = budget(samples, 60);
        cases.push(Case::new("gw/master-identity", 1e-7, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let a = random_psl_element(rng);
                let b = random_psl_element(rng);
                let c = eng.cocycle(
                    &GroupElement::Moebius(a.clone()),
                    &GroupElement::Moebius(b.clone()),
                )?;
                let dgamma = gamma_cochain(&m, &cfg, &b)? - gamma_cochain(&m, &cfg, &a.mul(&b))?
                    + gamma_cochain(&m, &cfg, &a)?;
                let gw = gw_cocycle(&m, &cfg, &a, &b)?;
                worst = worst.max((c + dgamma - gw).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "C + D(gamma) equals the geodesic-triangle circulation cocycle; \
                     max residual over {trials} random pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let cfg = cfg.clone();
        let trials = budget(samples, 60);
        cases.push(Case::new("gw/triangle-oracle", 1e-7, move |rng| {
            let z0 = m.basepoint().clone();
            let mut worst: f64 = 0.0;
            let mut used = 0usize;
            for _ in 0..trials {
                let a = random_psl_element(rng);
                let b = random_psl_element(rng);
                let z1 = a.act(&z0);
                let z2 = a.mul(&b).act(&z0);
                let (area, degenerate) = triangle_area_oracle(&z0, &z1, &z2);
                if degenerate {
                    continue;
                }
                used += 1;
                let gw = gw_cocycle(&m, &cfg, &a, &b)?;
                worst = worst.max((gw - area).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "primitive circulation around the geodesic triangle vs the \
                     angle-defect area; {used} non-degenerate pairs"
                ),
            )
            .with("pairs", used as f64))
        }));
    }

    {
        let m = base.clone();
        let cfg = cfg.clone();
        let trials = budget(samples, 25);
        cases.push(Case::new("gw/cocycle-identity", 1e-7, move |rng| {
            let m2 = m.clone();
            let cfg2 = cfg.clone();
            let gwc = GroupCochain::new(2, move |args: &[GroupElement]| {
                let a = moebius_of(&args[0])?;
                let b = moebius_of(&args[1])?;
                gw_cocycle(&m2, &cfg2, &a, &b)
            });
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let g: Vec<GroupElement> = (0..3)
                    .map(|_| GroupElement::Moebius(random_psl_element(rng)))
                    .collect();
                worst = worst.max(group_coboundary(&gwc, &g)?.abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "the triangle circulation is itself a two-cocycle: max \
                     |(D gw)(g1,g2,g3)| over {trials} triples"
                ),
            )
            .with("triples", trials as f64))
        }));
    }

    {
        let m = base.clone();
        let total = samples.saturating_mul(200).max(1000);
        cases.push(Case::new("gw/bound", 0.0, move |rng| {
            let z0 = m.basepoint().clone();
            let mut max_abs: f64 = 0.0;
            for _ in 0..total {
                let a = random_psl_element(rng);
                let b = random_psl_element(rng);
                let z1 = a.act(&z0);
                let z2 = a.mul(&b).act(&z0);
                let (area, degenerate) = triangle_area_oracle(&z0, &z1, &z2);
                if !degenerate {
                    max_abs = max_abs.max(area.abs());
                }
            }
            Ok(CaseOutcome::new(
                (max_abs - PI).max(0.0),
                format!(
                    "inverted bound: passes while max |gw| stays below pi; probed with \
                     the angle-defect oracle on {total} pairs"
                ),
            )
            .with("max_abs", max_abs)
            .with("pairs", total as f64))
        }));
    }

    {
        cases.push(Case::new("sl2/delta-squared", 1e-12, move |rng| {
            let w = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let w2 = w.clone();
            let dlam = LieCochain::new(2, move |args: &[Sl2Element]| {
                Ok(-w2.dot(&args[0].commutator(&args[1]).coords()))
            });
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                let triple: Vec<Sl2Element> = (0..3).map(|_| random_sl2(rng, 1.0)).collect();
                worst = worst.max(ce_coboundary(&dlam, &triple)?.abs());
            }
            Ok(CaseOutcome::new(
                worst,
                "delta(delta(lambda)) on 5 random sl2 triples for a random linear \
                 functional lambda (exercises the Jacobi identity)",
            ))
        }));
    }

    {
        let eng = engine.clone();
        cases.push(Case::new("sl2/ctilde-alternating", 1e-9, move |rng| {
            let c = eng.cochain();
            let ct = LieCochain::new(2, move |args: &[Sl2Element]| {
                group_to_algebra(
                    &c,
                    |e: &Sl2Element, t: f64| e.exp_element(t),
                    &args[0],
                    &args[1],
                    GROUP_TO_ALGEBRA_STEP,
                )
            });
            let pairs: Vec<(Sl2Element, Sl2Element)> = (0..2)
                .map(|_| (random_sl2(rng, 0.8), random_sl2(rng, 0.8)))
                .collect();
            let r = alternation_residual(&ct, &pairs)?;
            Ok(CaseOutcome::new(
                r,
                "the induced algebra cochain vanishes on equal arguments and is \
                 antisymmetric; 2 random pairs",
            ))
        }));
    }

    {
        let eng = engine.clone();
        cases.push(Case::new("sl2/delta-ctilde", 1e-4, move |rng| {
            let c = eng.cochain();
            let ct = LieCochain::new(2, move |args: &[Sl2Element]| {
                group_to_algebra(
                    &c,
                    |e: &Sl2Element, t: f64| e.exp_element(t),
                    &args[0],
                    &args[1],
                    GROUP_TO_ALGEBRA_STEP,
                )
            });
            let mut worst: f64 = 0.0;
            for _ in 0..2 {
                let triple: Vec<Sl2Element> = (0..3).map(|_| random_sl2(rng, 0.8)).collect();
                worst = worst.max(ce_coboundary(&ct, &triple)?.abs());
            }
            Ok(CaseOutcome::new(
                worst,
                "Chevalley-Eilenberg coboundary of the induced algebra cochain on 2 \
                 random sl2 triples (finite-difference noise dominates the tolerance)",
            ))
        }));
    }

    {
        let eng = engine.clone();
        cases.push(Case::new("sl2/whitehead", 1e-3, move |rng| {
            let c = eng.cochain();
            let ct = move |x: &Sl2Element, y: &Sl2Element| -> Result<f64> {
                group_to_algebra(
                    &c,
                    |e: &Sl2Element, t: f64| e.exp_element(t),
                    x,
                    y,
                    GROUP_TO_ALGEBRA_STEP,
                )
            };
            let [h, e, f] = Sl2Element::basis();
            let mut pairs = Vec::new();
            for (x, y) in [(&h, &e), (&h, &f), (&e, &f)] {
                pairs.push((x.clone(), y.clone(), ct(x, y)?));
            }
            for _ in 0..5 {
                let x = random_sl2(rng, 0.7);
                let y = random_sl2(rng, 0.7);
                let v = ct(&x, &y)?;
                pairs.push((x, y, v));
            }
            let fit = whitehead_witness(&pairs)?;
            Ok(CaseOutcome::new(
                fit.max_residual,
                "least-squares primitive lambda with ctilde(X,Y) = -lambda([X,Y]); a \
                 simple algebra has no degree-2 cohomology, so the fit must succeed",
            )
            .with("lambda_h", fit.lambda[0])
            .with("lambda_e", fit.lambda[1])
            .with("lambda_f", fit.lambda[2])
            .with("equations", fit.equations as f64)
            .with("rms_residual", fit.rms_residual))
        }));
    }

    cases
}

fn moebius_of(g: &GroupElement) -> Result<crate::element::MoebiusMatrix> {
    match g {
        GroupElement::Moebius(m) => Ok(m.clone()),
        GroupElement::Composite(parts) => {
            let mut acc = crate::element::MoebiusMatrix::identity();
            for p in parts {
                acc = acc.mul(&moebius_of(p)?);
            }
            Ok(acc)
        }
        _ => Err(Error::invalid("expected a Moebius element")),
    }
}

/// Disk extras: the fixed-point degeneracy that motivates the off-center
/// basepoint used by the shared cases.
fn disk_cases(sc: &Scenario) -> Vec<Case> {
    let samples = sc.samples;
    let mut cases = Vec::new();
    {
        let trials = budget(samples, 25);
        cases.push(Case::new("cocycle/fixed-point", 1e-12, move |rng| {
            let origin = Arc::new(make_disk());
            let eng = CocycleEngine::new(origin.clone());
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let g1 = origin.random_element(rng);
                let g2 = origin.random_element(rng);
                worst = worst.max(eng.cocycle(&g1, &g2)?.abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "every twist fixes the origin, so with the basepoint there the \
                     integration path is trivial and C vanishes; {trials} pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }
    cases
}

/// Product extras: factor restriction and (for translation factors) the
/// comparison against the flat model after interleaving coordinates.
fn product_cases(
    base: Arc<ChartModel>,
    spec_a: &ModelSpec,
    spec_b: &ModelSpec,
    sc: &Scenario,
) -> Result<Vec<Case>> {
    let engine = Arc::new(CocycleEngine::new(base.clone()));
    let samples = sc.samples;
    let mut cases = Vec::new();

    let (left, _right) = match base.kind() {
        ModelKind::Product { left, right } => (left.clone(), right.clone()),
        _ => return Err(Error::invalid("product cases need a product chart")),
    };

    {
        let eng = engine.clone();
        let left = left.clone();
        let trials = budget(samples, 12);
        cases.push(Case::new("product/restriction", 1e-9, move |rng| {
            let el = CocycleEngine::new(left.clone());
            let split = left.dim();
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let g1 = left.random_element(rng);
                let g2 = left.random_element(rng);
                let u1 = GroupElement::product(g1.clone(), GroupElement::Identity, split);
                let u2 = GroupElement::product(g2.clone(), GroupElement::Identity, split);
                let cp = eng.cocycle(&u1, &u2)?;
                let cl = el.cocycle(&g1, &g2)?;
                worst = worst.max((cp - cl).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "elements acting only on the left factor reproduce the left-factor \
                     cocycle; {trials} pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    if let (ModelSpec::R2n(na), ModelSpec::R2n(nb)) = (spec_a, spec_b) {
        let (na, nb) = (*na, *nb);
        let eng = engine.clone();
        let trials = budget(samples, 25);
        cases.push(Case::new("product/vs-flat", 1e-9, move |rng| {
            let interleave = |ua: &DVector<f64>, ub: &DVector<f64>| {
                let n = na + nb;
                let mut w = DVector::zeros(2 * n);
                for k in 0..na {
                    w[k] = ua[k];
                    w[n + k] = ua[na + k];
                }
                for k in 0..nb {
                    w[na + k] = ub[k];
                    w[n + na + k] = ub[nb + k];
                }
                w
            };
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let ua = DVector::from_fn(2 * na, |_, _| rng.random_range(-1.0..1.0));
                let ub = DVector::from_fn(2 * nb, |_, _| rng.random_range(-1.0..1.0));
                let va = DVector::from_fn(2 * na, |_, _| rng.random_range(-1.0..1.0));
                let vb = DVector::from_fn(2 * nb, |_, _| rng.random_range(-1.0..1.0));
                let g = GroupElement::product(
                    GroupElement::Translation(ua.clone()),
                    GroupElement::Translation(ub.clone()),
                    2 * na,
                );
                let h = GroupElement::product(
                    GroupElement::Translation(va.clone()),
                    GroupElement::Translation(vb.clone()),
                    2 * na,
                );
                let cp = eng.cocycle(&g, &h)?;
                let flat = heisenberg_closed_form(&interleave(&ua, &ub), &interleave(&va, &vb))?;
                worst = worst.max((cp - flat).abs());
            }
            Ok(CaseOutcome::new(
                worst,
                format!(
                    "block translations on the product match the flat-model closed form \
                     after interleaving position/momentum blocks; {trials} pairs"
                ),
            )
            .with("pairs", trials as f64))
        }));
    }

    Ok(cases)
}

/// Torus checks: the averaged pairing on vector fields (no global chart, so
/// no group cocycle here).
fn torus_cases(sc: &Scenario) -> Vec<Case> {
    let cfg = QuadratureConfig::default();
    let mut cases = Vec::new();
    let x0 = sc.basepoint.clone().unwrap_or_else(|| vec![0.2, 0.35]);

    {
        let cfg = cfg.clone();
        cases.push(Case::new("torus/b-basis", 1e-10, move |_rng| {
            let x = TorusField::drift_only([1.0, 0.0]);
            let y = TorusField::drift_only([0.0, 1.0]);
            let b = torus_b(&x, &y, &cfg)?;
            Ok(CaseOutcome::new(
                (b - 1.0).abs(),
                "averaged pairing of the two drift directions equals the torus area",
            )
            .with("b", b))
        }));
    }

    {
        let cfg = cfg.clone();
        cases.push(Case::new("torus/b-hamiltonian", 1e-8, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let h = crate::lie::torus::TrigPoly::random(rng, 3, 2, 0.6);
                let x = TorusField::hamiltonian(h);
                let y = TorusField::random(rng, 3, 2);
                worst = worst
                    .max(torus_b(&x, &y, &cfg)?.abs())
                    .max(torus_b(&y, &x, &cfg)?.abs());
            }
            Ok(CaseOutcome::new(
                worst,
                "the averaged pairing vanishes when either argument is Hamiltonian; \
                 3 random draws, both slots",
            ))
        }));
    }

    {
        let cfg = cfg.clone();
        cases.push(Case::new("torus/antisymmetry", 1e-10, move |rng| {
            let x = TorusField::random(rng, 3, 2);
            let y = TorusField::random(rng, 3, 2);
            let r = (torus_b(&x, &y, &cfg)? + torus_b(&y, &x, &cfg)?).abs();
            Ok(CaseOutcome::new(r, "b(X,Y) + b(Y,X) on a random pair"))
        }));
    }

    {
        let cfg = cfg.clone();
        let x0 = Point::new(x0.clone());
        cases.push(Case::new("torus/basepoint-average", 1e-5, move |rng| {
            let x = TorusField::random(rng, 2, 1);
            let y = TorusField::random(rng, 2, 1);
            let (lhs, rhs) = basepoint_average_identity(&x, &y, &x0, &cfg)?;
            Ok(CaseOutcome::new(
                (lhs - rhs).abs(),
                "b differs from the pointwise pairing at the basepoint by the averaged \
                 bracket-contraction transport",
            )
            .with("lhs", lhs)
            .with("rhs", rhs))
        }));
    }

    {
        let cfg = cfg.clone();
        cases.push(Case::new("torus/primitive-product", 1e-5, move |rng| {
            let x = TorusField::random(rng, 2, 2);
            let y = TorusField::random(rng, 2, 2);
            let (lhs, rhs) = primitive_product_identity(&x, &y, &cfg)?;
            Ok(CaseOutcome::new(
                (lhs - rhs).abs(),
                "b equals the integral of alpha_X ^ alpha_Y over the torus",
            )
            .with("lhs", lhs)
            .with("rhs", rhs))
        }));
    }

    {
        cases.push(Case::new("torus/alpha-closed", 1e-6, move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..2 {
                let x = TorusField::random(rng, 3, 2);
                let alpha = x.alpha();
                for p in [
                    Point::new(vec![0.13, 0.77]),
                    Point::new(vec![0.5, 0.25]),
                    Point::new(vec![0.91, 0.08]),
                    Point::new(vec![0.33, 0.62]),
                ] {
                    worst = worst.max(exterior_derivative_at(&alpha, &p)?.amax());
                }
            }
            Ok(CaseOutcome::new(
                worst,
                "the contraction one-form of an area-preserving field is closed; \
                 2 draws x 4 probe points",
            ))
        }));
    }

    cases
}

/// The exploratory twist-map run: least-squares potential fits for the
/// cocycle restricted to random twist words, bracketed by a synthetic
/// positive control and the translation negative control. The twist fits
/// are info-only: twist words act by rotations that fix every circle about
/// the origin, so the restricted cocycle vanishes and a perfect fit is
/// expected — it says nothing about the full symplectomorphism group.
pub fn disk_experiment(words: usize, depth: usize, seed: u64) -> Result<Report> {
    if words < 4 {
        return Err(Error::invalid("the experiment needs at least 4 words"));
    }
    if !(2..=3).contains(&depth) {
        return Err(Error::invalid("word depth must be 2 or 3"));
    }
    let scenario = Scenario {
        model: "disk".to_string(),
        seed,
        samples: words,
        ..Scenario::default()
    };
    let disk = Arc::new(make_disk());
    let mut cases: Vec<Case> = Vec::new();

    {
        let disk = disk.clone();
        cases.push(Case::new("fit/synthetic-positive", 1e-10, move |rng| {
            let gens: Vec<GroupElement> = (0..words).map(|_| disk.random_element(rng)).collect();
            let ws = WordSet::random_walk(&gens, depth, 2 * words, rng)?;
            let probe = Point::new(vec![0.5, 0.1]);
            let f = synthetic_coboundary(move |g| {
                let y = g.act(&probe);
                y[0] * y[0] - y[1]
            });
            let fit = coboundary_fit(&f, &ws)?;
            Ok(CaseOutcome::new(
                fit.normalized_residual,
                "positive control on twist words: a synthetic coboundary Db is \
                 explained exactly by a least-squares potential",
            )
            .with("rank", fit.rank as f64)
            .with("nullity", fit.nullity as f64)
            .with("equations", fit.equations as f64)
            .with("unknowns", fit.unknowns as f64))
        }));
    }

    {
        cases.push(Case::new("fit/heisenberg-negative", 0.0, move |rng| {
            let flat = Arc::new(make_r2n(1));
            let eng = Arc::new(CocycleEngine::new(flat.clone()));
            let gens: Vec<GroupElement> = (0..words).map(|_| flat.random_element(rng)).collect();
            let ws = WordSet::random_walk(&gens, depth, 2 * words, rng)?;
            let fit = coboundary_fit(&eng.cochain(), &ws)?;
            let r = (0.01 - fit.normalized_residual).max(0.0);
            Ok(CaseOutcome::new(
                r,
                "inverted negative control on translation words: passes while the \
                 normalized fit residual stays above 0.01",
            )
            .with("normalized_residual", fit.normalized_residual)
            .with("rank", fit.rank as f64)
            .with("equations", fit.equations as f64))
        }));
    }

    for (k, bp) in [(1usize, (0.3, 0.0)), (2, (0.0, 0.35)), (3, (-0.25, 0.2))] {
        let disk = disk.clone();
        let id = format!("fit/disk-twists@{k}");
        cases.push(Case::new(&id, 0.0, move |rng| {
            let m = Arc::new(disk.with_basepoint(Point::new(vec![bp.0, bp.1]))?);
            let eng = Arc::new(CocycleEngine::new(m.clone()));
            let gens: Vec<GroupElement> = (0..words).map(|_| m.random_element(rng)).collect();
            let ws = WordSet::random_walk(&gens, depth, 2 * words, rng)?;
            let fit = coboundary_fit(&eng.cochain(), &ws)?;
            Ok(CaseOutcome::new(
                fit.normalized_residual,
                "exploratory, info-only: potential fit for the cocycle restricted to \
                 twist words at an off-center basepoint; twists rotate circles about \
                 the origin without moving them, so the restricted cocycle vanishes \
                 and the fit succeeds — no conclusion about the full group",
            )
            .info()
            .with("normalized_residual", fit.normalized_residual)
            .with("rms_residual", fit.rms_residual)
            .with("rank", fit.rank as f64)
            .with("nullity", fit.nullity as f64)
            .with("equations", fit.equations as f64)
            .with("unknowns", fit.unknowns as f64)
            .with("basepoint_x", bp.0)
            .with("basepoint_y", bp.1))
        }));
    }

    cases.sort_by(|a, b| a.id.cmp(&b.id));
    let mut report = Report::new("disk-experiment", "disk", seed, words);
    let rows: Vec<_> = cases
        .iter()
        .map(|case| evaluate_case(case, &scenario))
        .collect();
    report.set_cases(rows);
    Ok(report)
}
