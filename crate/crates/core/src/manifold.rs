//! Riemannian geometry kernel.
//!
//! Three model spaces share one ambient-coordinate representation:
//! Euclidean space `R^n`, the unit sphere `S^n` embedded in `R^{n+1}`, and
//! hyperbolic space `H^n` as the upper sheet of the hyperboloid
//! `<x,x>_L = -1` in Minkowski space `R^{n,1}` (time coordinate first).
//! All maps (distance, exp, log, parallel transport) are closed-form, so no
//! chart bookkeeping is needed; the Fréchet mean is the only iterative
//! operation.

use crate::error::{Error, Result};

/// Dot products of `acos` / `acosh` arguments are clamped into the valid
/// domain to absorb representation drift.
const ANTIPODAL_EPS: f64 = 1e-9;

/// Below this squared-norm defect a stored point is kept bit-identical
/// instead of being renormalized, so file round-trips are exact.
const KEEP_EPS: f64 = 1e-14;

/// Beyond this constraint defect a coordinate array is rejected instead of
/// silently projected back onto the manifold.
const REJECT_EPS: f64 = 1e-6;

/// Tangency defect tolerance for externally constructed vectors.
const TANGENCY_EPS: f64 = 1e-10;

const MEAN_TOLERANCE: f64 = 1e-10;
const MEAN_MAX_ITERATIONS: usize = 200;

/// A model space together with its intrinsic dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Euclidean(usize),
    Sphere(usize),
    Hyperbolic(usize),
}

impl ManifoldKind {
    pub fn intrinsic_dim(&self) -> usize {
        match *self {
            ManifoldKind::Euclidean(d) | ManifoldKind::Sphere(d) | ManifoldKind::Hyperbolic(d) => d,
        }
    }

    /// Length of the coordinate arrays representing points and tangents.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            ManifoldKind::Euclidean(d) => d,
            ManifoldKind::Sphere(d) | ManifoldKind::Hyperbolic(d) => d + 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldKind::Euclidean(_) => "euclidean",
            ManifoldKind::Sphere(_) => "sphere",
            ManifoldKind::Hyperbolic(_) => "hyperbolic",
        }
    }

    /// Inner product of the ambient metric restricted to tangent spaces.
    fn metric(&self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            ManifoldKind::Euclidean(_) | ManifoldKind::Sphere(_) => dot(u, v),
            ManifoldKind::Hyperbolic(_) => minkowski_dot(u, v),
        }
    }
}

impl std::fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.name(), self.intrinsic_dim())
    }
}

/// A point on a manifold, stored in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    kind: ManifoldKind,
    coords: Vec<f64>,
}

impl ManifoldPoint {
    /// Validates the kind's constraint. Small constraint drift is repaired by
    /// renormalization; gross violations are rejected.
    pub fn new(kind: ManifoldKind, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != kind.ambient_dim() {
            return Err(Error::DimensionMismatch {
                kind,
                expected: kind.ambient_dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint {
                kind,
                reason: "non-finite coordinate".into(),
            });
        }
        let mut coords = coords;
        match kind {
            ManifoldKind::Euclidean(_) => {}
            ManifoldKind::Sphere(_) => {
                let nsq = dot(&coords, &coords);
                let defect = (nsq - 1.0).abs();
                if defect > REJECT_EPS {
                    return Err(Error::InvalidPoint {
                        kind,
                        reason: format!("squared norm {nsq} is not 1"),
                    });
                }
                if defect > KEEP_EPS {
                    let inv = nsq.sqrt().recip();
                    coords.iter_mut().for_each(|c| *c *= inv);
                }
            }
            ManifoldKind::Hyperbolic(_) => {
                if coords[0] <= 0.0 {
                    return Err(Error::InvalidPoint {
                        kind,
                        reason: format!("time coordinate {} is not positive", coords[0]),
                    });
                }
                let q = minkowski_dot(&coords, &coords);
                let defect = (q + 1.0).abs();
                if defect > REJECT_EPS {
                    return Err(Error::InvalidPoint {
                        kind,
                        reason: format!("Minkowski square {q} is not -1"),
                    });
                }
                if defect > KEEP_EPS {
                    let inv = (-q).sqrt().recip();
                    coords.iter_mut().for_each(|c| *c *= inv);
                }
            }
        }
        Ok(ManifoldPoint { kind, coords })
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    fn check_same_kind(&self, other: &ManifoldPoint) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch(self.kind, other.kind));
        }
        Ok(())
    }

    /// Geodesic distance.
    pub fn distance(&self, other: &ManifoldPoint) -> Result<f64> {
        self.check_same_kind(other)?;
        let (a, b) = (&self.coords, &other.coords);
        if a == b {
            return Ok(0.0);
        }
        Ok(match self.kind {
            ManifoldKind::Euclidean(_) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            ManifoldKind::Sphere(_) => sphere_arc(a, b).2,
            ManifoldKind::Hyperbolic(_) => hyperbolic_arc(a, b).2,
        })
    }

    /// Riemannian logarithm: the tangent vector at `self` whose geodesic
    /// reaches `target` at time one.
    pub fn log(&self, target: &ManifoldPoint) -> Result<TangentVector> {
        self.check_same_kind(target)?;
        let (a, b) = (&self.coords, &target.coords);
        if a == b {
            return Ok(TangentVector::zero(self.clone()));
        }
        let coords = match self.kind {
            ManifoldKind::Euclidean(_) => b.iter().zip(a).map(|(y, x)| y - x).collect(),
            ManifoldKind::Sphere(_) => {
                if dot(a, b) <= -1.0 + ANTIPODAL_EPS {
                    return Err(Error::Antipodal(self.kind));
                }
                let (u, s, d) = sphere_arc(a, b);
                if s == 0.0 {
                    vec![0.0; a.len()]
                } else {
                    u.iter().map(|x| x * d / s).collect()
                }
            }
            ManifoldKind::Hyperbolic(_) => {
                let (u, s, d) = hyperbolic_arc(a, b);
                if s == 0.0 {
                    vec![0.0; a.len()]
                } else {
                    u.iter().map(|x| x * d / s).collect()
                }
            }
        };
        Ok(TangentVector {
            base: self.clone(),
            coords,
        })
    }

    /// Riemannian exponential. `v` must be based at `self`.
    pub fn exp(&self, v: &TangentVector) -> Result<ManifoldPoint> {
        self.check_same_kind(&v.base)?;
        if !same_coords(&self.coords, &v.base.coords) {
            return Err(Error::StructureMismatch(
                "tangent vector is based at a different point".into(),
            ));
        }
        let a = &self.coords;
        let w = &v.coords;
        match self.kind {
            ManifoldKind::Euclidean(_) => {
                ManifoldPoint::new(self.kind, a.iter().zip(w).map(|(x, y)| x + y).collect())
            }
            ManifoldKind::Sphere(_) => {
                let t = dot(w, w).sqrt();
                if t == 0.0 {
                    return Ok(self.clone());
                }
                let (s, c) = (t.sin() / t, t.cos());
                ManifoldPoint::new(
                    self.kind,
                    a.iter().zip(w).map(|(x, y)| c * x + s * y).collect(),
                )
            }
            ManifoldKind::Hyperbolic(_) => {
                let t = minkowski_dot(w, w).max(0.0).sqrt();
                if t == 0.0 {
                    return Ok(self.clone());
                }
                let (s, c) = (t.sinh() / t, t.cosh());
                ManifoldPoint::new(
                    self.kind,
                    a.iter().zip(w).map(|(x, y)| c * x + s * y).collect(),
                )
            }
        }
    }
}

/// A tangent vector anchored at a base point, in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: ManifoldPoint,
    coords: Vec<f64>,
}

impl TangentVector {
    /// Validates length and tangency at `base`.
    pub fn new(base: ManifoldPoint, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != base.kind.ambient_dim() {
            return Err(Error::DimensionMismatch {
                kind: base.kind,
                expected: base.kind.ambient_dim(),
                got: coords.len(),
            });
        }
        let defect = match base.kind {
            ManifoldKind::Euclidean(_) => 0.0,
            ManifoldKind::Sphere(_) => dot(&coords, &base.coords).abs(),
            ManifoldKind::Hyperbolic(_) => minkowski_dot(&coords, &base.coords).abs(),
        };
        if defect > TANGENCY_EPS {
            return Err(Error::NotTangent { defect });
        }
        Ok(TangentVector { base, coords })
    }

    /// Trusted constructor for vectors produced by the maps in this module.
    pub(crate) fn new_unchecked(base: ManifoldPoint, coords: Vec<f64>) -> Self {
        TangentVector { base, coords }
    }

    pub fn zero(base: ManifoldPoint) -> Self {
        let coords = vec![0.0; base.kind.ambient_dim()];
        TangentVector { base, coords }
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn kind(&self) -> ManifoldKind {
        self.base.kind
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0.0)
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    /// Metric inner product with another vector in the same tangent space.
    pub fn inner(&self, other: &TangentVector) -> Result<f64> {
        if self.kind() != other.kind() {
            return Err(Error::KindMismatch(self.kind(), other.kind()));
        }
        Ok(self.kind().metric(&self.coords, &other.coords))
    }

    /// Riemannian norm. Tangent vectors are spacelike on the hyperboloid, so
    /// the metric square is clamped at zero against roundoff.
    pub fn norm(&self) -> f64 {
        self.kind()
            .metric(&self.coords, &self.coords)
            .max(0.0)
            .sqrt()
    }

    /// Parallel transport along the minimizing geodesic from the vector's
    /// base point to `to`. Transport to the base point itself is the
    /// identity.
    pub fn parallel_transport(&self, to: &ManifoldPoint) -> Result<TangentVector> {
        self.base.check_same_kind(to)?;
        let (a, b, v) = (&self.base.coords, &to.coords, &self.coords);
        if a == b {
            return Ok(TangentVector {
                base: to.clone(),
                coords: v.clone(),
            });
        }
        let coords = match self.kind() {
            ManifoldKind::Euclidean(_) => v.clone(),
            ManifoldKind::Sphere(_) => {
                let c = dot(a, b).clamp(-1.0, 1.0);
                if c <= -1.0 + ANTIPODAL_EPS {
                    return Err(Error::Antipodal(self.kind()));
                }
                // v - <b,v>/(1+<a,b>) (a+b): isometric along the minimizing
                // geodesic, identity when b = a.
                let s = dot(b, v) / (1.0 + c);
                a.iter()
                    .zip(b)
                    .zip(v)
                    .map(|((x, y), w)| w - s * (x + y))
                    .collect()
            }
            ManifoldKind::Hyperbolic(_) => {
                let alpha = (-minkowski_dot(a, b)).max(1.0);
                let s = minkowski_dot(b, v) / (1.0 + alpha);
                a.iter()
                    .zip(b)
                    .zip(v)
                    .map(|((x, y), w)| w + s * (x + y))
                    .collect()
            }
        };
        Ok(TangentVector {
            base: to.clone(),
            coords,
        })
    }
}

/// Weighted Fréchet mean: the fixed point of
/// `m <- exp_m(sum_i w_i log_m(x_i) / sum_i w_i)`, accepted once the tangent
/// mean's norm drops below `1e-10`.
pub fn frechet_mean(points: &[ManifoldPoint], weights: Option<&[f64]>) -> Result<ManifoldPoint> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("mean of an empty point set".into()));
    }
    let kind = points[0].kind();
    for p in points {
        if p.kind() != kind {
            return Err(Error::KindMismatch(kind, p.kind()));
        }
    }
    let total = match weights {
        Some(ws) => {
            if ws.len() != points.len() {
                return Err(Error::InvalidParameter(format!(
                    "{} weights for {} points",
                    ws.len(),
                    points.len()
                )));
            }
            if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::InvalidParameter(
                    "weights must be finite and nonnegative".into(),
                ));
            }
            let t: f64 = ws.iter().sum();
            if t <= 0.0 {
                return Err(Error::InvalidParameter("weights sum to zero".into()));
            }
            t
        }
        None => points.len() as f64,
    };

    let dim = kind.ambient_dim();
    let mut m = points[0].clone();
    let mut residual = f64::INFINITY;
    for _ in 0..MEAN_MAX_ITERATIONS {
        let mut acc = vec![0.0; dim];
        for (i, p) in points.iter().enumerate() {
            let w = weights.map_or(1.0, |ws| ws[i]);
            if w == 0.0 {
                continue;
            }
            let l = m.log(p)?;
            for (a, c) in acc.iter_mut().zip(l.coords()) {
                *a += w * c;
            }
        }
        acc.iter_mut().for_each(|a| *a /= total);
        let step = TangentVector::new_unchecked(m.clone(), acc);
        residual = step.norm();
        if residual < MEAN_TOLERANCE {
            return Ok(m);
        }
        m = m.exp(&step)?;
    }
    Err(Error::MeanNotConverged {
        iterations: MEAN_MAX_ITERATIONS,
        residual,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rejection of `b` from `a` on the sphere, its norm, and the arc length.
/// `atan2` of the rejection norm against the cosine evaluates
/// `acos(clamp(<a,b>))` without the precision cliff at zero separation.
fn sphere_arc(a: &[f64], b: &[f64]) -> (Vec<f64>, f64, f64) {
    let c = dot(a, b);
    let u: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - c * x).collect();
    let s = dot(&u, &u).sqrt();
    (u, s, s.atan2(c))
}

/// Hyperboloid analogue: Minkowski rejection, its norm `sinh(d)`, and the
/// arc length recovered through `asinh`.
fn hyperbolic_arc(a: &[f64], b: &[f64]) -> (Vec<f64>, f64, f64) {
    let alpha = (-minkowski_dot(a, b)).max(1.0);
    let u: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - alpha * x).collect();
    let s = minkowski_dot(&u, &u).max(0.0).sqrt();
    (u, s, s.asinh())
}

/// Minkowski form with signature (-, +, ..., +), time coordinate first.
pub(crate) fn minkowski_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

fn same_coords(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}
