//! Group elements acting on chart models.
//!
//! The realizations match the models in this crate: translations of a vector
//! space, Moebius transformations of the upper half-plane, radial twists of
//! the disk, block products, plus user-supplied maps and free composites of
//! all of the above. Composition is function composition: `a.compose(&b)`
//! acts as x -> a(b(x)), and same-kind pairs collapse to closed forms.

use crate::error::{Error, Result};
use crate::geom::{Point, SmoothMap};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Tolerance for structural identity checks on canonical parameters.
const IDENTITY_EPS: f64 = 1e-14;

/// Element of PSL(2, R) acting on the upper half-plane by fractional linear
/// maps. Stored with determinant normalized to 1 and a canonical sign
/// (a > 0, or a = 0 and b > 0), so a matrix and its negation compare equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MoebiusMatrix {
    /// Build from entries. The determinant must be positive; it is rescaled
    /// to exactly satisfy the PSL normalization before sign canonicalization.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("Moebius entry {name}"),
                });
            }
        }
        let det = a * d - b * c;
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::NotOrientationPreserving(det));
        }
        let s = det.sqrt();
        Ok(MoebiusMatrix {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        }
        .canonicalized())
    }

    fn canonicalized(self) -> Self {
        let flip = self.a < 0.0 || (self.a == 0.0 && self.b < 0.0);
        if flip {
            MoebiusMatrix {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            self
        }
    }

    pub fn identity() -> Self {
        MoebiusMatrix {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &MoebiusMatrix) -> MoebiusMatrix {
        MoebiusMatrix::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
        .expect("product of unimodular matrices stays unimodular")
    }

    pub fn inverse(&self) -> MoebiusMatrix {
        MoebiusMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .canonicalized()
    }

    pub fn is_identity(&self) -> bool {
        (self.a - 1.0).abs() <= IDENTITY_EPS
            && self.b.abs() <= IDENTITY_EPS
            && self.c.abs() <= IDENTITY_EPS
            && (self.d - 1.0).abs() <= IDENTITY_EPS
    }

    /// Action on z = x + iy with y > 0.
    pub fn act(&self, z: &Point) -> Point {
        assert_eq!(z.dim(), 2, "Moebius maps act on half-plane points");
        let (x, y) = (z[0], z[1]);
        assert!(y > 0.0, "Moebius action needs Im z > 0, got {y}");
        let den_re = self.c * x + self.d;
        let den_im = self.c * y;
        let den2 = den_re * den_re + den_im * den_im;
        assert!(den2 > 0.0, "Moebius denominator vanished");
        let num_re = self.a * x + self.b;
        let num_im = self.a * y;
        Point::new(vec![
            (num_re * den_re + num_im * den_im) / den2,
            (num_im * den_re - num_re * den_im) / den2,
        ])
    }

    /// Real differential: the complex derivative 1/(cz+d)^2 as a conformal
    /// 2x2 matrix [[u, -v], [v, u]].
    pub fn differential(&self, z: &Point) -> DMatrix<f64> {
        let (x, y) = (z[0], z[1]);
        let den_re = self.c * x + self.d;
        let den_im = self.c * y;
        // (cz + d)^2
        let sq_re = den_re * den_re - den_im * den_im;
        let sq_im = 2.0 * den_re * den_im;
        let norm = sq_re * sq_re + sq_im * sq_im;
        let u = sq_re / norm;
        let v = -sq_im / norm;
        DMatrix::from_row_slice(2, 2, &[u, -v, v, u])
    }
}

/// Radial twist of the unit disk: rotation by the angle psi(r^2), where psi
/// is a polynomial with the listed coefficients (constant term first). Twists
/// about the origin commute; composition adds profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistProfile {
    pub coeffs: Vec<f64>,
}

impl TwistProfile {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(coeffs.iter().all(|c| c.is_finite()));
        TwistProfile { coeffs }
    }

    fn psi(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    fn psi_prime(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * s + k as f64 * c;
        }
        acc
    }

    pub fn compose(&self, o: &TwistProfile) -> TwistProfile {
        let len = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = vec![0.0; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in o.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        TwistProfile { coeffs }
    }

    pub fn inverse(&self) -> TwistProfile {
        TwistProfile {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= IDENTITY_EPS)
    }

    pub fn act(&self, p: &Point) -> Point {
        assert_eq!(p.dim(), 2, "twists act on disk points");
        let (x, y) = (p[0], p[1]);
        let phi = self.psi(x * x + y * y);
        let (s, c) = phi.sin_cos();
        Point::new(vec![c * x - s * y, s * x + c * y])
    }

    /// Exact differential R(phi) + (J R(phi) p) (2 psi'(r^2) p^T), which has
    /// unit determinant identically.
    pub fn differential(&self, p: &Point) -> DMatrix<f64> {
        let (x, y) = (p[0], p[1]);
        let s2 = x * x + y * y;
        let phi = self.psi(s2);
        let dphi = 2.0 * self.psi_prime(s2);
        let (s, c) = phi.sin_cos();
        // columns of R(phi)
        let rot = [c, s, -s, c];
        // J R(phi) p where J is the counterclockwise quarter turn
        let rx = c * x - s * y;
        let ry = s * x + c * y;
        let jx = -ry;
        let jy = rx;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                rot[0] + jx * dphi * x,
                rot[2] + jx * dphi * y,
                rot[1] + jy * dphi * x,
                rot[3] + jy * dphi * y,
            ],
        )
    }
}

/// User-supplied chart map with its inverse and, optionally, an exact
/// differential. The inverse is required so the element generates a group.
pub struct CustomMap {
    pub name: String,
    forward: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    inverse: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    differential: Option<Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>>,
}

impl CustomMap {
    pub fn new(
        name: impl Into<String>,
        forward: impl Fn(&Point) -> Point + Send + Sync + 'static,
        inverse: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        CustomMap {
            name: name.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            differential: None,
        }
    }

    pub fn with_differential(
        mut self,
        differential: impl Fn(&Point) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.differential = Some(Arc::new(differential));
        self
    }
}

impl std::fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CustomMap({})", self.name)
    }
}

/// A symplectomorphism candidate in one of the supported realizations.
#[derive(Clone, Debug)]
pub enum GroupElement {
    Identity,
    /// x -> x + v on a vector-space chart.
    Translation(DVector<f64>),
    /// Fractional linear map of the upper half-plane.
    Moebius(MoebiusMatrix),
    /// Radial twist of the disk.
    Twist(TwistProfile),
    /// Block action on a product chart; `split` is the left factor dimension.
    Product {
        left: Box<GroupElement>,
        right: Box<GroupElement>,
        split: usize,
    },
    /// User-supplied map with inverse.
    Custom(Arc<CustomMap>),
    /// Composite g_0 o g_1 o ... (rightmost applies first).
    Composite(Vec<GroupElement>),
}

impl GroupElement {
    pub fn translation(v: Vec<f64>) -> Self {
        GroupElement::Translation(DVector::from_vec(v))
    }

    pub fn product(left: GroupElement, right: GroupElement, split: usize) -> Self {
        GroupElement::Product {
            left: Box::new(left),
            right: Box::new(right),
            split,
        }
    }

    /// Function composition self o other (other applies first). Same-kind
    /// pairs stay in closed form; mixed pairs become composites.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        use GroupElement::*;
        match (self, other) {
            (Identity, g) | (g, Identity) => g.clone(),
            (Translation(u), Translation(v)) => Translation(u + v),
            (Moebius(m), Moebius(k)) => Moebius(m.mul(k)),
            (Twist(p), Twist(q)) => Twist(p.compose(q)),
            (
                Product {
                    left: l1,
                    right: r1,
                    split: s1,
                },
                Product {
                    left: l2,
                    right: r2,
                    split: s2,
                },
            ) if s1 == s2 => Product {
                left: Box::new(l1.compose(l2)),
                right: Box::new(r1.compose(r2)),
                split: *s1,
            },
            (a, b) => {
                let mut parts = Vec::new();
                match a {
                    Composite(v) => parts.extend(v.iter().cloned()),
                    other => parts.push(other.clone()),
                }
                match b {
                    Composite(v) => parts.extend(v.iter().cloned()),
                    other => parts.push(other.clone()),
                }
                Composite(parts)
            }
        }
    }

    pub fn inverse(&self) -> GroupElement {
        use GroupElement::*;
        match self {
            Identity => Identity,
            Translation(v) => Translation(-v),
            Moebius(m) => Moebius(m.inverse()),
            Twist(p) => Twist(p.inverse()),
            Product { left, right, split } => Product {
                left: Box::new(left.inverse()),
                right: Box::new(right.inverse()),
                split: *split,
            },
            Custom(map) => {
                let m = map.clone();
                let fwd = map.clone();
                // (g^-1)'(x) = [g'(g^-1 x)]^-1 when the forward differential
                // is known
                let differential = map.differential.as_ref().map(|d| {
                    let d = d.clone();
                    let pre = map.clone();
                    Arc::new(move |x: &Point| {
                        d(&(pre.inverse)(x))
                            .try_inverse()
                            .expect("differential of a diffeomorphism is invertible")
                    }) as Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>
                });
                Custom(Arc::new(CustomMap {
                    name: format!("{}^-1", map.name),
                    forward: Arc::new(move |x| (m.inverse)(x)),
                    inverse: Arc::new(move |x| (fwd.forward)(x)),
                    differential,
                }))
            }
            Composite(parts) => Composite(parts.iter().rev().map(|p| p.inverse()).collect()),
        }
    }

    /// Structural identity test on canonical parameters. Composites and
    /// custom maps conservatively report false.
    pub fn is_identity(&self) -> bool {
        use GroupElement::*;
        match self {
            Identity => true,
            Translation(v) => v.amax() <= IDENTITY_EPS,
            Moebius(m) => m.is_identity(),
            Twist(p) => p.is_identity(),
            Product { left, right, .. } => left.is_identity() && right.is_identity(),
            Custom(_) | Composite(_) => false,
        }
    }

    pub fn act(&self, x: &Point) -> Point {
        use GroupElement::*;
        match self {
            Identity => x.clone(),
            Translation(v) => {
                assert_eq!(v.len(), x.dim(), "translation dimension mismatch");
                Point::from_vector(x.coords() + v)
            }
            Moebius(m) => m.act(x),
            Twist(p) => p.act(x),
            Product { left, right, split } => {
                assert!(*split <= x.dim());
                let xl = Point::from_vector(x.coords().rows(0, *split).into_owned());
                let xr = Point::from_vector(x.coords().rows(*split, x.dim() - split).into_owned());
                crate::geom::concat_points(&left.act(&xl), &right.act(&xr))
            }
            Custom(map) => (map.forward)(x),
            Composite(parts) => {
                let mut p = x.clone();
                for g in parts.iter().rev() {
                    p = g.act(&p);
                }
                p
            }
        }
    }

    /// Exact differential when every constituent has one; None otherwise
    /// (callers then use finite differences on `act`).
    pub fn differential_at(&self, x: &Point) -> Option<DMatrix<f64>> {
        use GroupElement::*;
        match self {
            Identity => Some(DMatrix::identity(x.dim(), x.dim())),
            Translation(v) => {
                debug_assert_eq!(v.len(), x.dim());
                Some(DMatrix::identity(x.dim(), x.dim()))
            }
            Moebius(m) => Some(m.differential(x)),
            Twist(p) => Some(p.differential(x)),
            Product { left, right, split } => {
                let xl = Point::from_vector(x.coords().rows(0, *split).into_owned());
                let xr = Point::from_vector(x.coords().rows(*split, x.dim() - split).into_owned());
                let dl = left.differential_at(&xl)?;
                let dr = right.differential_at(&xr)?;
                let n = x.dim();
                let mut m = DMatrix::zeros(n, n);
                m.view_mut((0, 0), (*split, *split)).copy_from(&dl);
                m.view_mut((*split, *split), (n - split, n - split))
                    .copy_from(&dr);
                Some(m)
            }
            Custom(map) => map.differential.as_ref().map(|d| d(x)),
            Composite(parts) => {
                // chain rule right-to-left
                let mut point = x.clone();
                let mut acc: Option<DMatrix<f64>> = None;
                for g in parts.iter().rev() {
                    let d = g.differential_at(&point)?;
                    acc = Some(match acc {
                        None => d.clone(),
                        Some(prev) => &d * prev,
                    });
                    point = g.act(&point);
                }
                acc.or_else(|| Some(DMatrix::identity(x.dim(), x.dim())))
            }
        }
    }

    /// Structural hash used to key per-element caches and to deduplicate
    /// word lists. Equal parameters hash equal; custom maps hash by pointer.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        self.fingerprint_into(&mut h);
        h.finish()
    }

    fn fingerprint_into(&self, h: &mut Fnv) {
        use GroupElement::*;
        match self {
            Identity => h.byte(0),
            Translation(v) => {
                h.byte(1);
                for c in v.iter() {
                    h.f64(*c);
                }
            }
            Moebius(m) => {
                h.byte(2);
                for c in [m.a, m.b, m.c, m.d] {
                    h.f64(c);
                }
            }
            Twist(p) => {
                h.byte(3);
                for c in &p.coeffs {
                    h.f64(*c);
                }
            }
            Product { left, right, split } => {
                h.byte(4);
                h.u64(*split as u64);
                left.fingerprint_into(h);
                right.fingerprint_into(h);
            }
            Custom(map) => {
                h.byte(5);
                h.u64(Arc::as_ptr(map) as u64);
            }
            Composite(parts) => {
                h.byte(6);
                h.u64(parts.len() as u64);
                for p in parts {
                    p.fingerprint_into(h);
                }
            }
        }
    }
}

impl SmoothMap for GroupElement {
    fn apply(&self, x: &Point) -> Point {
        self.act(x)
    }
    fn differential(&self, x: &Point) -> Option<DMatrix<f64>> {
        self.differential_at(x)
    }
}

/// FNV-1a, enough for cache keys.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }
    fn byte(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x100000001b3);
    }
    fn u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.byte(b);
        }
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn finish(&self) -> u64 {
        self.0
    }
}
