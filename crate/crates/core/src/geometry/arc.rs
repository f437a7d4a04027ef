use std::f64::consts::{PI, TAU};

use nalgebra::Unit;
use serde::{Deserialize, Serialize};

use super::{unit, UnitVec3, Vec3};
use crate::error::{Error, Result};
use crate::tolerance;

/// A minor arc of a great circle on the unit sphere, or a full great circle.
///
/// The arc runs from `a` to `b` turning counter-clockwise about `normal`.
/// For a full circle `a` is a point of the circle and `b == a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreatCircleArc {
    a: UnitVec3,
    b: UnitVec3,
    normal: UnitVec3,
    angle: f64,
    full_circle: bool,
}

fn unit_or_err(v: Vec3, what: &str) -> Result<UnitVec3> {
    unit(v).ok_or_else(|| Error::InvalidArc(format!("{what} is the zero vector")))
}

impl GreatCircleArc {
    /// Minor arc between two non-antipodal points (normalized onto the sphere).
    pub fn new(a: Vec3, b: Vec3) -> Result<Self> {
        let a = unit_or_err(a, "endpoint a")?;
        let b = unit_or_err(b, "endpoint b")?;
        let c = a.cross(&b);
        let s = c.norm();
        let angle = s.atan2(a.dot(&b));
        if angle < tolerance::ON_SET {
            return Err(Error::InvalidArc("coincident endpoints".into()));
        }
        if PI - angle < tolerance::ON_SET || s < tolerance::ON_SET {
            return Err(Error::InvalidArc(
                "antipodal endpoints: the arc plane must be given (use with_normal)".into(),
            ));
        }
        Ok(GreatCircleArc {
            a,
            b,
            normal: Unit::new_unchecked(c / s),
            angle,
            full_circle: false,
        })
    }

    /// Arc from `a` to `b` turning about `normal`; needed for half circles.
    /// The turning angle must lie in `(0, pi]`.
    pub fn with_normal(a: Vec3, b: Vec3, normal: Vec3) -> Result<Self> {
        let a = unit_or_err(a, "endpoint a")?;
        let b = unit_or_err(b, "endpoint b")?;
        let n = unit_or_err(normal, "normal")?;
        if a.dot(&n).abs() > 1e-7 || b.dot(&n).abs() > 1e-7 {
            return Err(Error::InvalidArc(
                "endpoints do not lie on the circle of the given normal".into(),
            ));
        }
        let angle = oriented_angle(&a, &b, &n);
        if angle < tolerance::ON_SET {
            return Err(Error::InvalidArc("coincident endpoints".into()));
        }
        if angle > PI + 1e-9 {
            return Err(Error::InvalidArc(format!(
                "arc turns by {angle:.6} rad > pi; split major arcs"
            )));
        }
        Ok(GreatCircleArc {
            a,
            b,
            normal: n,
            angle: angle.min(PI),
            full_circle: false,
        })
    }

    /// The great circle with the given plane normal.
    pub fn full(normal: Vec3) -> Result<Self> {
        let n = unit_or_err(normal, "normal")?;
        let (e1, _) = super::orthonormal_pair(&n);
        let a = Unit::new_unchecked(e1);
        Ok(GreatCircleArc {
            a,
            b: a,
            normal: n,
            angle: TAU,
            full_circle: true,
        })
    }

    pub fn a(&self) -> &UnitVec3 {
        &self.a
    }

    pub fn b(&self) -> &UnitVec3 {
        &self.b
    }

    pub fn normal(&self) -> &UnitVec3 {
        &self.normal
    }

    pub fn is_full(&self) -> bool {
        self.full_circle
    }

    /// Turning angle: in `(0, pi]` for arcs, `2 pi` for full circles. On the
    /// unit sphere this is also the length.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// H^1 of the arc.
    pub fn length(&self) -> f64 {
        self.angle
    }

    /// Point at turning angle `s` from `a`.
    pub fn point_at(&self, s: f64) -> Vec3 {
        let e2 = self.normal.cross(&self.a);
        self.a.as_ref() * s.cos() + e2 * s.sin()
    }

    /// Unit tangent leaving the arc's start, pointing into the arc.
    pub fn tangent_at_a(&self) -> Vec3 {
        self.normal.cross(&self.a)
    }

    /// Unit tangent leaving the arc's end, pointing into the arc.
    pub fn tangent_at_b(&self) -> Vec3 {
        -self.normal.cross(&self.b)
    }

    /// Turning angle of the projection of `p` measured from `a`, in `[0, 2 pi)`,
    /// or `None` when `p` is parallel to the normal.
    pub fn phase_of(&self, p: &Vec3) -> Option<f64> {
        let pp = p - self.normal.as_ref() * self.normal.dot(p);
        if pp.norm() < 1e-300 {
            return None;
        }
        let e2 = self.normal.cross(&self.a);
        let mut phi = pp.dot(&e2).atan2(pp.dot(&self.a));
        if phi < 0.0 {
            phi += TAU;
        }
        Some(phi)
    }

    /// Euclidean distance in R^3 from `p` to the arc.
    pub fn distance(&self, p: &Vec3) -> f64 {
        let n = self.normal.as_ref();
        let pp = p - n * n.dot(p);
        let pn = pp.norm();
        if pn < 1e-300 {
            return (p.norm_squared() + 1.0).sqrt();
        }
        let q = pp / pn;
        if self.full_circle {
            return (p - q).norm();
        }
        let phi = self.phase_of(p).unwrap_or(0.0);
        if phi <= self.angle {
            (p - q).norm()
        } else {
            (p - self.a.as_ref()).norm().min((p - self.b.as_ref()).norm())
        }
    }

    /// True when `p` (assumed on the sphere) lies on the arc within `tol`.
    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Points along the arc with spacing at most `spacing` (endpoints included).
    pub fn sample(&self, spacing: f64) -> Vec<Vec3> {
        let n = ((self.angle / spacing.max(1e-6)).ceil() as usize).max(1);
        let last = if self.full_circle { n - 1 } else { n };
        (0..=last)
            .map(|i| self.point_at(self.angle * i as f64 / n as f64))
            .collect()
    }

    /// Minimum Euclidean distance between two arcs.
    pub fn distance_to_arc(&self, other: &GreatCircleArc) -> f64 {
        let mut best = f64::INFINITY;
        let c = self.normal.cross(&other.normal);
        if c.norm() < 1e-12 {
            // same great circle: sample one against the other
            for p in self.sample(1e-3) {
                best = best.min(other.distance(&p));
            }
            return best;
        }
        let x = c.normalize();
        for cand in [x, -x] {
            let on_self = self.full_circle || self.phase_of(&cand).is_some_and(|phi| phi <= self.angle + 1e-15);
            let on_other = other.full_circle || other.phase_of(&cand).is_some_and(|phi| phi <= other.angle + 1e-15);
            if on_self && on_other {
                return 0.0;
            }
        }
        if !self.full_circle {
            best = best
                .min(other.distance(self.a.as_ref()))
                .min(other.distance(self.b.as_ref()));
        }
        if !other.full_circle {
            best = best
                .min(self.distance(other.a.as_ref()))
                .min(self.distance(other.b.as_ref()));
        }
        best
    }

    /// The arc after applying a rotation.
    pub fn rotated(&self, r: &super::Frame) -> GreatCircleArc {
        GreatCircleArc {
            a: Unit::new_normalize(r * self.a.as_ref()),
            b: Unit::new_normalize(r * self.b.as_ref()),
            normal: Unit::new_normalize(r * self.normal.as_ref()),
            angle: self.angle,
            full_circle: self.full_circle,
        }
    }
}

/// Counter-clockwise angle from `a` to `b` about `n`, in `[0, 2 pi)`.
fn oriented_angle(a: &Vec3, b: &Vec3, n: &Vec3) -> f64 {
    let mut phi = a.cross(b).dot(n).atan2(a.dot(b));
    if phi < 0.0 {
        phi += TAU;
    }
    phi
}

/// Length (angle in radians) of an arc on the unit sphere.
pub fn arc_length(arc: &GreatCircleArc) -> f64 {
    arc.length()
}
