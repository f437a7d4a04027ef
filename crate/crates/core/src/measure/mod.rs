//! Sampled two-dimensional sets, their Hausdorff measure in balls, density
//! profiles, the near-monotonicity audit and the constant-density detector.

mod density;
mod gauge;
mod io;

pub use density::{
    constant_density_detector, density_profile, monotonicity_audit, ConstantDensityInterval, DensityProfile,
    MonotonicityAudit, MonotonicityViolation, CONE_LIKE_NOTE,
};
pub use gauge::GaugeFunction;
pub use io::{read_csv_points, read_obj, write_csv_points, write_obj};

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::planar::{disk_polygon_area, Vec2};
use crate::geometry::{Frame, LocalWindow, Vec3};
use crate::spatial::KdTree;
use crate::tolerance::snap;

/// How the measure of a sampled set is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Measure is the area of a union of triangles.
    Triangles,
    /// Measure is a sum of point weights.
    Points,
}

#[derive(Clone)]
enum Data {
    Triangles(Vec<[Vec3; 3]>),
    Points { points: Vec<Vec3>, weights: Vec<f64> },
}

/// Discretization of a two-dimensional set: triangles (measure = area) or
/// weighted points (measure = sum of weights), with a nominal sampling gap.
///
/// Distance computations use a point cloud: the points themselves, or a
/// square lattice of step `gap` laid on every triangle plus samples of step
/// `gap` along its edges. The cloud and its kd-tree are built
/// on first use and cached.
#[derive(Clone)]
pub struct SampledSet {
    data: Data,
    gap: f64,
    cloud: OnceLock<Vec<Vec3>>,
    tree: OnceLock<KdTree>,
}

impl fmt::Debug for SampledSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledSet")
            .field("mode", &self.mode())
            .field("elements", &self.len())
            .field("gap", &self.gap)
            .finish()
    }
}

fn check_gap(gap: f64) -> Result<()> {
    if gap > 0.0 && gap.is_finite() {
        Ok(())
    } else {
        Err(param("gap", format!("sampling gap must be positive, got {gap}")))
    }
}

fn finite(p: &Vec3) -> bool {
    p.iter().all(|c| c.is_finite())
}

impl SampledSet {
    pub fn from_triangles(triangles: Vec<[Vec3; 3]>, gap: f64) -> Result<Self> {
        check_gap(gap)?;
        if let Some(i) = triangles.iter().position(|t| !t.iter().all(finite)) {
            return Err(Error::InvalidInput(format!("triangle {i} has a non-finite vertex")));
        }
        Ok(Self::build(Data::Triangles(triangles), gap))
    }

    /// Weighted points; `weights` must be nonnegative and finite.
    pub fn from_points(points: Vec<Vec3>, weights: Vec<f64>, gap: f64) -> Result<Self> {
        check_gap(gap)?;
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !finite(p)) {
            return Err(Error::InvalidInput(format!("point {i} is not finite")));
        }
        if let Some(i) = weights.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(format!("weight {i} is negative or not finite")));
        }
        Ok(Self::build(Data::Points { points, weights }, gap))
    }

    fn build(data: Data, gap: f64) -> Self {
        SampledSet {
            data,
            gap,
            cloud: OnceLock::new(),
            tree: OnceLock::new(),
        }
    }

    pub fn mode(&self) -> SampleMode {
        match self.data {
            Data::Triangles(_) => SampleMode::Triangles,
            Data::Points { .. } => SampleMode::Points,
        }
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Number of triangles or points.
    pub fn len(&self) -> usize {
        match &self.data {
            Data::Triangles(t) => t.len(),
            Data::Points { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triangles(&self) -> Option<&[[Vec3; 3]]> {
        match &self.data {
            Data::Triangles(t) => Some(t),
            Data::Points { .. } => None,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.data {
            Data::Triangles(_) => None,
            Data::Points { weights, .. } => Some(weights),
        }
    }

    pub fn total_measure(&self) -> f64 {
        match &self.data {
            Data::Triangles(t) => t.iter().map(triangle_area).sum(),
            Data::Points { weights, .. } => weights.iter().sum(),
        }
    }

    /// Point cloud used for distance queries.
    pub fn points(&self) -> &[Vec3] {
        self.cloud.get_or_init(|| match &self.data {
            Data::Points { points, .. } => points.clone(),
            Data::Triangles(tris) => {
                let mut out = Vec::new();
                for t in tris {
                    lattice_on_triangle(t, self.gap, &mut out);
                }
                out
            }
        })
    }

    pub fn tree(&self) -> &KdTree {
        self.tree.get_or_init(|| KdTree::new(self.points()))
    }

    /// Cloud points inside the closed window.
    pub fn points_in(&self, w: &LocalWindow) -> Vec<Vec3> {
        let pts = self.points();
        self.tree()
            .within(&w.center, w.radius)
            .into_iter()
            .map(|i| pts[i])
            .collect()
    }

    /// Image under `p -> scale * rotation * p + translation`; weights and
    /// the gap follow the scaling.
    pub fn similarity(&self, rotation: &Frame, scale: f64, translation: &Vec3) -> Result<SampledSet> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(param("scale", format!("must be positive, got {scale}")));
        }
        let map = |p: &Vec3| rotation * p * scale + translation;
        let data = match &self.data {
            Data::Triangles(t) => Data::Triangles(t.iter().map(|t| [map(&t[0]), map(&t[1]), map(&t[2])]).collect()),
            Data::Points { points, weights } => Data::Points {
                points: points.iter().map(map).collect(),
                weights: weights.iter().map(|w| w * scale * scale).collect(),
            },
        };
        Ok(Self::build(data, self.gap * scale))
    }

    /// Union of two sets of the same mode; the gap is the larger one.
    pub fn union(&self, other: &SampledSet) -> Result<SampledSet> {
        let data = match (&self.data, &other.data) {
            (Data::Triangles(a), Data::Triangles(b)) => Data::Triangles(a.iter().chain(b).copied().collect()),
            (Data::Points { points: p, weights: w }, Data::Points { points: q, weights: v }) => Data::Points {
                points: p.iter().chain(q).copied().collect(),
                weights: w.iter().chain(v).copied().collect(),
            },
            _ => return Err(Error::InvalidInput("cannot merge triangle and point samples".into())),
        };
        Ok(Self::build(data, self.gap.max(other.gap)))
    }
}

pub(crate) fn triangle_area(t: &[Vec3; 3]) -> f64 {
    0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).norm()
}

/// Square lattice of step `g` in the plane of the triangle plus edge samples
/// of step `g`. Interior points are within `g / sqrt(2)` of a sample. Counts
/// and inside tests use snapped coordinates in units of `g`, so a dilated
/// triangle sampled at the dilated step gets the same lattice.
fn lattice_on_triangle(t: &[Vec3; 3], g: f64, out: &mut Vec<Vec3>) {
    let e = [t[1] - t[0], t[2] - t[1], t[0] - t[2]];
    for (k, ek) in e.iter().enumerate() {
        let n = snap(ek.norm() / g).ceil().max(1.0) as usize;
        for i in 0..n {
            out.push(t[k] + ek * (i as f64 / n as f64));
        }
    }
    let nrm = e[0].cross(&(t[2] - t[0]));
    let area2 = nrm.norm();
    let l0 = e[0].norm();
    if area2 <= 1e-300 || l0 == 0.0 {
        return;
    }
    let u = e[0] / l0;
    let v = (nrm / area2).cross(&u);
    let p2 = [
        Vec2::zeros(),
        Vec2::new(snap(l0 / g), 0.0),
        Vec2::new(snap((t[2] - t[0]).dot(&u) / g), snap((t[2] - t[0]).dot(&v) / g)),
    ];
    let (xmin, xmax) = (
        p2.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
        p2.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
    );
    let ymax = p2[2].y;
    let inside = |x: f64, y: f64| {
        let q = Vec2::new(x, y);
        (0..3).all(|k| {
            let a = p2[k];
            let b = p2[(k + 1) % 3];
            (b - a).perp(&(q - a)) > 0.0
        })
    };
    let mut j = 1;
    while (j as f64) < ymax {
        let y = j as f64;
        let mut i = xmin.floor() as i64;
        while (i as f64) <= xmax {
            let x = i as f64;
            if inside(x, y) {
                out.push(t[0] + u * (x * g) + v * (y * g));
            }
            i += 1;
        }
        j += 1;
    }
}

/// Measure of `E ∩ ball` and the representation it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallMeasure {
    pub value: f64,
    pub mode: SampleMode,
}

/// `H^2(E ∩ ball)`: exact clipped area for triangles, sum of in-ball weights
/// for points.
pub fn h2_in_ball(e: &SampledSet, ball: &LocalWindow) -> BallMeasure {
    let value = match &e.data {
        Data::Triangles(tris) => tris.iter().map(|t| triangle_ball_area(t, ball)).sum(),
        Data::Points { points, weights } => {
            if points.len() < 64 {
                points
                    .iter()
                    .zip(weights)
                    .filter(|(p, _)| ball.contains(p))
                    .map(|(_, w)| w)
                    .sum()
            } else {
                e.tree()
                    .within(&ball.center, ball.radius)
                    .into_iter()
                    .map(|i| weights[i])
                    .sum()
            }
        }
    };
    BallMeasure { value, mode: e.mode() }
}

/// Exact area of `triangle ∩ ball`: the ball cuts the triangle's plane in a
/// disk, and the planar triangle–disk area is computed in closed form.
pub fn triangle_ball_area(t: &[Vec3; 3], ball: &LocalWindow) -> f64 {
    let r = ball.radius;
    let c = ball.center;
    let r2 = r * r;
    if t.iter().all(|p| (p - c).norm_squared() <= r2) {
        return triangle_area(t);
    }
    let centroid = (t[0] + t[1] + t[2]) / 3.0;
    let reach = t.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    if (centroid - c).norm() >= r + reach {
        return 0.0;
    }
    let e1 = t[1] - t[0];
    let nrm = e1.cross(&(t[2] - t[0]));
    let nn = nrm.norm();
    if nn <= 1e-300 {
        return 0.0;
    }
    let n = nrm / nn;
    let h = (c - t[0]).dot(&n);
    if h.abs() >= r {
        return 0.0;
    }
    let rho = (r2 - h * h).sqrt();
    let u = e1.normalize();
    let v = n.cross(&u);
    let to2 = |p: &Vec3| {
        let d = p - c;
        Vec2::new(d.dot(&u), d.dot(&v))
    };
    let poly = [to2(&t[0]), to2(&t[1]), to2(&t[2])];
    disk_polygon_area(&poly, &Vec2::zeros(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_square() -> SampledSet {
        let a = Vec3::new(0.0, 0.0, 0.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        let c = Vec3::new(1.0, 1.0, 0.0);
        let d = Vec3::new(0.0, 1.0, 0.0);
        SampledSet::from_triangles(vec![[a, b, c], [a, c, d]], 0.05).unwrap()
    }

    #[test]
    fn whole_square_inside_ball() {
        let s = unit_square();
        let m = h2_in_ball(&s, &LocalWindow::new(Vec3::new(0.5, 0.5, 0.0), 10.0).unwrap());
        assert!((m.value - 1.0).abs() < 1e-14);
        assert_eq!(m.mode, SampleMode::Triangles);
    }

    #[test]
    fn disk_fan_in_ball() {
        let n = 720;
        let tris: Vec<_> = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                let b = 2.0 * PI * (i + 1) as f64 / n as f64;
                [
                    Vec3::zeros(),
                    Vec3::new(2.0 * a.cos(), 2.0 * a.sin(), 0.0),
                    Vec3::new(2.0 * b.cos(), 2.0 * b.sin(), 0.0),
                ]
            })
            .collect();
        let s = SampledSet::from_triangles(tris, 0.01).unwrap();
        let r = 1.3;
        let m = h2_in_ball(&s, &LocalWindow::new(Vec3::zeros(), r).unwrap()).value;
        assert!((m - PI * r * r).abs() < 1e-12);
        // off-center ball cut by the plane, fully inside the polygon
        let m = h2_in_ball(&s, &LocalWindow::new(Vec3::new(0.1, 0.2, 0.3), 0.5).unwrap()).value;
        assert!((m - PI * (0.25 - 0.09)).abs() < 1e-12);
    }

    #[test]
    fn half_cut_triangle_matches_monte_carlo() {
        let t = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.2),
            Vec3::new(0.2, 0.9, -0.1),
        ];
        let ball = LocalWindow::new(Vec3::new(0.1, 0.1, 0.0), 0.6).unwrap();
        let exact = triangle_ball_area(&t, &ball);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 400_000;
        let mut hit = 0usize;
        for _ in 0..n {
            let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
            if a + b > 1.0 {
                a = 1.0 - a;
                b = 1.0 - b;
            }
            let p = t[0] + (t[1] - t[0]) * a + (t[2] - t[0]) * b;
            if ball.contains(&p) {
                hit += 1;
            }
        }
        let mc = triangle_area(&t) * hit as f64 / n as f64;
        assert!((exact - mc).abs() / exact < 1e-2, "{exact} vs {mc}");
    }

    #[test]
    fn additive_and_monotone() {
        let s = unit_square();
        let tris = s.triangles().unwrap();
        let ball = LocalWindow::new(Vec3::new(0.3, 0.6, 0.1), 0.45).unwrap();
        let a = SampledSet::from_triangles(vec![tris[0]], 0.05).unwrap();
        let b = SampledSet::from_triangles(vec![tris[1]], 0.05).unwrap();
        let whole = h2_in_ball(&s, &ball).value;
        assert!((whole - h2_in_ball(&a, &ball).value - h2_in_ball(&b, &ball).value).abs() < 1e-14);
        let mut last = 0.0;
        for k in 1..40 {
            let v = h2_in_ball(&s, &LocalWindow::new(ball.center, 0.03 * k as f64).unwrap()).value;
            assert!(v >= last - 1e-15);
            last = v;
        }
    }

    #[test]
    fn point_mode_sums_weights() {
        let pts = vec![Vec3::zeros(), Vec3::new(0.5, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0)];
        let s = SampledSet::from_points(pts, vec![1.0, 2.0, 4.0], 0.1).unwrap();
        let m = h2_in_ball(&s, &LocalWindow::new(Vec3::zeros(), 1.0).unwrap());
        assert_eq!(m.value, 3.0);
        assert_eq!(m.mode, SampleMode::Points);
        assert!(SampledSet::from_points(vec![Vec3::zeros()], vec![-1.0], 0.1).is_err());
        assert!(SampledSet::from_points(vec![Vec3::zeros()], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn triangle_cloud_covers_at_gap() {
        let s = unit_square();
        let pts = s.points();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let q = Vec3::new(rng.gen(), rng.gen(), 0.0);
            let (_, d) = s.tree().nearest(&q).unwrap();
            assert!(d <= s.gap());
        }
        assert!(pts.iter().all(|p| p.z.abs() < 1e-15));
    }

    #[test]
    fn similarity_scales_measure() {
        let s = SampledSet::from_points(vec![Vec3::x()], vec![0.5], 0.1).unwrap();
        let t = s.similarity(&Frame::identity(), 2.0, &Vec3::zeros()).unwrap();
        assert_eq!(t.total_measure(), 2.0);
        assert_eq!(t.gap(), 0.2);
        let sq = unit_square()
            .similarity(&Frame::identity(), 3.0, &Vec3::zeros())
            .unwrap();
        assert!((sq.total_measure() - 9.0).abs() < 1e-12);
    }
}
