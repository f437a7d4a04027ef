//! Spherical and Euclidean primitives: vectors, great-circle arcs, spherical
//! graphs, local windows, planar disk clipping and the normalized local
//! Hausdorff distance.

mod arc;
mod graph;
mod hausdorff;
pub mod planar;

pub use arc::{arc_length, GreatCircleArc};
pub use graph::{ArcEnd, GraphJson, SphericalGraph, Vertex, GRAPH_JSON_VERSION};
pub use hausdorff::{local_hausdorff_distance, HausdorffEstimate};

use nalgebra::{Rotation3, Unit, UnitQuaternion, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

pub type Vec3 = Vector3<f64>;
pub type UnitVec3 = Unit<Vector3<f64>>;
/// Proper rotation placing a reference configuration in space.
pub type Frame = Rotation3<f64>;

/// A closed ball `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalWindow {
    pub center: Vec3,
    pub radius: f64,
}

impl LocalWindow {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(param("radius", format!("must be positive and finite, got {radius}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(param("center", "must be finite"));
        }
        Ok(LocalWindow { center, radius })
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (p - self.center).norm_squared() <= self.radius * self.radius
    }

    /// Same window after the similarity `p -> origin + s (p - origin)`.
    pub fn scaled_about(&self, origin: &Vec3, s: f64) -> LocalWindow {
        LocalWindow {
            center: origin + (self.center - origin) * s,
            radius: self.radius * s,
        }
    }
}

/// A set that can be measured against sampled data: exact point distance and
/// a covering sample of its part inside a ball.
pub trait ConeShape {
    /// Euclidean distance from `p` to the closed set.
    fn distance(&self, p: &Vec3) -> f64;

    /// Points of the set inside `ball` whose covering radius (for the part of
    /// the set inside the ball) is at most `spacing`.
    fn sample_in_ball(&self, ball: &LocalWindow, spacing: f64) -> Vec<Vec3>;
}

/// Normalizes `v`, returning `None` for (near) zero vectors.
pub fn unit(v: Vec3) -> Option<UnitVec3> {
    let n = v.norm();
    if n > 1e-300 && n.is_finite() {
        Some(Unit::new_unchecked(v / n))
    } else {
        None
    }
}

/// Two unit vectors completing `n` to a right-handed orthonormal basis.
pub fn orthonormal_pair(n: &UnitVec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.6 {
        Vec3::x()
    } else if n.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (helper - n.as_ref() * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Angle between two vectors in `[0, pi]`, robust near 0 and pi.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Uniformly distributed random rotation (Shoemake's method).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Frame {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let u3: f64 = rng.gen();
    let tau = std::f64::consts::TAU;
    let q = nalgebra::Quaternion::new(
        u1.sqrt() * (tau * u3).cos(),
        (1.0 - u1).sqrt() * (tau * u2).sin(),
        (1.0 - u1).sqrt() * (tau * u2).cos(),
        u1.sqrt() * (tau * u3).sin(),
    );
    UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// Rotation by `angle` about `axis`.
pub fn rotation_about(axis: &Vec3, angle: f64) -> Frame {
    match unit(*axis) {
        Some(a) => Rotation3::from_axis_angle(&a, angle),
        None => Rotation3::identity(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn window_rejects_nonpositive_radius() {
        assert!(LocalWindow::new(Vec3::zeros(), 0.0).is_err());
        assert!(LocalWindow::new(Vec3::zeros(), -1.0).is_err());
        assert!(LocalWindow::new(Vec3::zeros(), f64::NAN).is_err());
        assert!(LocalWindow::new(Vec3::zeros(), 1.0).is_ok());
    }

    #[test]
    fn random_rotations_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            let m = r.matrix();
            assert!((m.determinant() - 1.0).abs() < 1e-12);
            assert!((m.transpose() * m - nalgebra::Matrix3::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn orthonormal_pair_is_orthonormal() {
        for n in [Vec3::x(), Vec3::new(0.3, -0.2, 0.9), Vec3::new(0.0, 1.0, 1e-9)] {
            let n = unit(n).unwrap();
            let (e1, e2) = orthonormal_pair(&n);
            assert!(e1.dot(&n).abs() < 1e-14 && e2.dot(&n).abs() < 1e-14 && e1.dot(&e2).abs() < 1e-14);
            assert!((e1.cross(&e2) - n.as_ref()).norm() < 1e-14);
        }
    }
}
