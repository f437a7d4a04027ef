//! Federer-Fleming projection of a point sample in a dyadic cube onto the
//! 2-dimensional skeleton of its subcubes.
//!
//! Each subcube `R` of side `2^(k-j)` gets a radial center in its interior,
//! chosen far from the data, and the data in the open subcube is pushed
//! radially onto `∂R`. In three dimensions one stage reaches the faces, so
//! the image lies on the union of the subcube faces. Weights are carried
//! over unchanged; the audit estimates the area inflation from the
//! differential of the radial projection on local tangent planes.

use std::collections::HashMap;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::Vec3;
use crate::measure::SampledSet;
use crate::spatial::KdTree;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicCube {
    pub corner: Vec3,
    /// `2^k`.
    pub side: f64,
    /// Subdivision level `j >= 1`: subcubes have side `2^(k-j)`.
    pub level: u32,
}

const MAX_LEVEL: u32 = 10;

impl DyadicCube {
    pub fn new(corner: Vec3, side: f64, level: u32) -> Result<Self> {
        let c = DyadicCube { corner, side, level };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(param("side", format!("must be positive, got {}", self.side)));
        }
        let k = self.side.log2();
        if k.fract() != 0.0 {
            return Err(param("side", format!("must be a power of two, got {}", self.side)));
        }
        if self
            .corner
            .iter()
            .any(|c| !c.is_finite() || (c / self.side).fract() != 0.0)
        {
            return Err(param("corner", "coordinates must be multiples of the side"));
        }
        if self.level == 0 || self.level > MAX_LEVEL {
            return Err(param(
                "level",
                format!("must lie in 1..={MAX_LEVEL}, got {}", self.level),
            ));
        }
        Ok(())
    }

    /// Subcubes per axis.
    pub fn per_axis(&self) -> usize {
        1 << self.level
    }

    pub fn sub_side(&self) -> f64 {
        self.side / self.per_axis() as f64
    }

    /// Coordinate of grid plane `m` along `axis`; every face coordinate is
    /// computed here so that equal planes compare equal.
    pub fn plane(&self, axis: usize, m: usize) -> f64 {
        self.corner[axis] + self.sub_side() * m as f64
    }

    /// Closed cube test.
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.plane(i, 0) && p[i] <= self.plane(i, self.per_axis()))
    }

    fn on_boundary(&self, p: &Vec3) -> bool {
        self.contains(p) && (0..3).any(|i| p[i] == self.plane(i, 0) || p[i] == self.plane(i, self.per_axis()))
    }

    /// Index along `axis` of the grid cell with `plane(m) <= x < plane(m+1)`
    /// (the last cell is closed).
    fn cell(&self, axis: usize, x: f64) -> usize {
        let n = self.per_axis();
        let mut m = (((x - self.corner[axis]) / self.sub_side()).floor().max(0.0) as usize).min(n - 1);
        while m > 0 && x < self.plane(axis, m) {
            m -= 1;
        }
        while m + 1 < n && x >= self.plane(axis, m + 1) {
            m += 1;
        }
        m
    }

    /// The subcube whose interior contains `p`, `None` when `p` is on a grid
    /// plane or outside the cube.
    pub fn open_subcube(&self, p: &Vec3) -> Option<[usize; 3]> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = [0; 3];
        for i in 0..3 {
            let m = self.cell(i, p[i]);
            if !(p[i] > self.plane(i, m) && p[i] < self.plane(i, m + 1)) {
                return None;
            }
            idx[i] = m;
        }
        Some(idx)
    }

    /// All closed subcubes containing `p`.
    pub fn closed_subcubes(&self, p: &Vec3) -> Vec<[usize; 3]> {
        if !self.contains(p) {
            return Vec::new();
        }
        let n = self.per_axis();
        let mut choices: [Vec<usize>; 3] = Default::default();
        for i in 0..3 {
            let m = self.cell(i, p[i]);
            choices[i].push(m);
            if m > 0 && p[i] == self.plane(i, m) {
                choices[i].push(m - 1);
            }
            if m + 1 < n && p[i] == self.plane(i, m + 1) {
                choices[i].push(m + 1);
            }
        }
        let mut out = Vec::new();
        for &a in &choices[0] {
            for &b in &choices[1] {
                for &c in &choices[2] {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    pub fn subcube_contains(&self, idx: [usize; 3], p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.plane(i, idx[i]) && p[i] <= self.plane(i, idx[i] + 1))
    }

    /// Point of the 2-skeleton of the subdivision or of `∂Q`: inside the
    /// closed cube with at least one coordinate on a grid plane.
    pub fn on_skeleton(&self, p: &Vec3) -> bool {
        self.contains(p)
            && (0..3)
                .any(|i| p[i] == self.plane(i, self.cell(i, p[i])) || p[i] == self.plane(i, self.cell(i, p[i]) + 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FfParams {
    /// Candidate centers drawn per subcube.
    pub samples: usize,
    /// Candidates are drawn from the subcube shrunk by this fraction of its
    /// side on every face.
    pub margin: f64,
    /// A subcube is saturated when no candidate is farther than
    /// `min_clearance * side` from the data.
    pub min_clearance: f64,
    pub seed: u64,
}

impl Default for FfParams {
    fn default() -> Self {
        FfParams {
            samples: 64,
            margin: 1.0 / 16.0,
            min_clearance: 1e-9,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcubeCenter {
    pub index: [usize; 3],
    pub center: Vec3,
    /// Distance from the center to the data in the subcube.
    pub clearance: f64,
    /// No admissible center: data in this subcube is left in place.
    pub saturated: bool,
}

/// Chosen centers for the subcubes that contain data in their interior;
/// the induced map moves nothing else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMap {
    pub cube: DyadicCube,
    /// Sorted by subcube index.
    pub centers: Vec<SubcubeCenter>,
}

impl ProjectionMap {
    fn center_of(&self, idx: [usize; 3]) -> Option<&SubcubeCenter> {
        self.centers
            .binary_search_by_key(&idx, |c| c.index)
            .ok()
            .map(|i| &self.centers[i])
    }

    /// `phi_Q(p)`: radial projection from the center of the open subcube
    /// containing `p` onto its boundary; identity outside `Q`, on the grid
    /// planes and in saturated or center-less subcubes.
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        let Some(idx) = self.cube.open_subcube(p) else {
            return *p;
        };
        match self.center_of(idx) {
            Some(c) if !c.saturated && *p != c.center => radial_to_boundary(&self.cube, idx, &c.center, p),
            _ => *p,
        }
    }

    /// Differential of `apply` at `p` (identity where the map is).
    pub fn differential(&self, p: &Vec3) -> Matrix3<f64> {
        let Some(idx) = self.cube.open_subcube(p) else {
            return Matrix3::identity();
        };
        match self.center_of(idx) {
            Some(c) if !c.saturated && *p != c.center => {
                let q = radial_to_boundary(&self.cube, idx, &c.center, p);
                let d = p - c.center;
                let axis = exit_axis(&self.cube, idx, &c.center, &d);
                let n = Vec3::ith(axis, 1.0);
                let dn = d.dot(&n);
                let s = (q - c.center).dot(&n) / dn;
                (Matrix3::identity() - d * n.transpose() / dn) * s
            }
            _ => Matrix3::identity(),
        }
    }
}

fn exit_axis(cube: &DyadicCube, idx: [usize; 3], c: &Vec3, d: &Vec3) -> usize {
    let mut best = (f64::INFINITY, 0);
    for i in 0..3 {
        if d[i] == 0.0 {
            continue;
        }
        let face = if d[i] > 0.0 {
            cube.plane(i, idx[i] + 1)
        } else {
            cube.plane(i, idx[i])
        };
        let t = (face - c[i]) / d[i];
        if t < best.0 {
            best = (t, i);
        }
    }
    best.1
}

/// Exit point of the ray from `c` through `p` on the boundary of subcube
/// `idx`; the exit coordinate is set to the face plane exactly and the
/// others are clamped into the subcube.
fn radial_to_boundary(cube: &DyadicCube, idx: [usize; 3], c: &Vec3, p: &Vec3) -> Vec3 {
    let d = p - c;
    let axis = exit_axis(cube, idx, c, &d);
    let face = if d[axis] > 0.0 {
        cube.plane(axis, idx[axis] + 1)
    } else {
        cube.plane(axis, idx[axis])
    };
    let t = (face - c[axis]) / d[axis];
    let mut q = c + d * t;
    for i in 0..3 {
        q[i] = q[i].clamp(cube.plane(i, idx[i]), cube.plane(i, idx[i] + 1));
    }
    q[axis] = face;
    q
}

fn weighted_points(f: &SampledSet) -> (Vec<Vec3>, Vec<f64>) {
    let pts = f.points().to_vec();
    let w = match f.weights() {
        Some(w) => w.to_vec(),
        None => vec![f.total_measure() / pts.len().max(1) as f64; pts.len()],
    };
    (pts, w)
}

fn subcube_seed(seed: u64, idx: [usize; 3]) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for v in idx {
        h = (h ^ v as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 31;
    }
    h
}

/// Chooses a center per subcube (best of `samples` seeded uniform draws by
/// distance to the data in that subcube) and projects the data. Weights
/// are transported unchanged; for triangle input each cloud point carries
/// an equal share of the area.
pub fn skeleton_project(f: &SampledSet, cube: &DyadicCube, params: &FfParams) -> Result<(ProjectionMap, SampledSet)> {
    cube.validate()?;
    if params.samples == 0 || !(params.margin >= 0.0 && params.margin < 0.5) || !(params.min_clearance >= 0.0) {
        return Err(param(
            "ff",
            "need samples >= 1, margin in [0, 1/2) and min_clearance >= 0",
        ));
    }
    let (pts, weights) = weighted_points(f);
    let mut groups: HashMap<[usize; 3], Vec<Vec3>> = HashMap::new();
    for p in &pts {
        if let Some(idx) = cube.open_subcube(p) {
            groups.entry(idx).or_default().push(*p);
        }
    }
    let mut keys: Vec<[usize; 3]> = groups.keys().copied().collect();
    keys.sort_unstable();
    let s = cube.sub_side();
    let mut centers = Vec::with_capacity(keys.len());
    for idx in keys {
        let data = &groups[&idx];
        let tree = KdTree::new(data);
        let mut rng = ChaCha8Rng::seed_from_u64(subcube_seed(params.seed, idx));
        let mut best = (Vec3::zeros(), -1.0);
        for _ in 0..params.samples {
            let c = Vec3::from_fn(|i, _| {
                let lo = cube.plane(i, idx[i]) + params.margin * s;
                lo + rng.gen::<f64>() * (1.0 - 2.0 * params.margin) * s
            });
            // Keep the draw strictly inside the open subcube.
            if cube.open_subcube(&c) != Some(idx) {
                continue;
            }
            let d = tree.nearest(&c).map_or(f64::INFINITY, |(_, d)| d);
            if d > best.1 {
                best = (c, d);
            }
        }
        let saturated = best.1 <= params.min_clearance * s;
        centers.push(SubcubeCenter {
            index: idx,
            center: best.0,
            clearance: best.1.max(0.0),
            saturated,
        });
    }
    let map = ProjectionMap { cube: *cube, centers };
    let image: Vec<Vec3> = pts.iter().map(|p| map.apply(p)).collect();
    let img = SampledSet::from_points(image, weights, f.gap())?;
    Ok((map, img))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcubeAudit {
    pub index: [usize; 3],
    pub points: usize,
    pub moved: usize,
    pub weight: f64,
    /// `sum w_i J_i` with `J_i` the area factor of the projection on the
    /// local tangent plane of the data.
    pub image_weight: f64,
    pub inflation: f64,
    pub saturated: bool,
    pub clearance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionAudit {
    /// Every point outside `Q` is fixed.
    pub identity_outside: bool,
    /// Every image of a point of `Q` lies on the 2-skeleton or on `∂Q`
    /// (points of saturated subcubes excepted).
    pub on_skeleton: bool,
    /// Every point stays in each closed subcube that contains it.
    pub subcube_containment: bool,
    pub saturated_subcubes: usize,
    pub max_inflation: f64,
    pub subcubes: Vec<SubcubeAudit>,
}

impl ProjectionAudit {
    pub fn passed(&self) -> bool {
        self.identity_outside && self.on_skeleton && self.subcube_containment && self.max_inflation.is_finite()
    }
}

/// Area factor of `D` restricted to the plane with unit normal `n`, or the
/// product of the two largest singular values when `n` is unknown.
fn area_factor(dm: &Matrix3<f64>, n: Option<Vec3>) -> f64 {
    match n {
        Some(n) => {
            let (a, b) = crate::geometry::orthonormal_pair(&nalgebra::Unit::new_normalize(n));
            (dm * a).cross(&(dm * b)).norm()
        }
        None => {
            let sv = dm.singular_values();
            let mut v = [sv[0], sv[1], sv[2]];
            v.sort_by(|a, b| b.total_cmp(a));
            v[0] * v[1]
        }
    }
}

/// Checks the identity outside `Q`, the skeleton and subcube containment
/// of the image exactly, and estimates the area inflation per subcube.
/// Tangent planes come from the principal axes of the data within three
/// sampling gaps of each moved point.
pub fn projection_audit(map: &ProjectionMap, f: &SampledSet, image: &SampledSet) -> Result<ProjectionAudit> {
    let (pts, weights) = weighted_points(f);
    let img = image.points();
    if img.len() != pts.len() {
        return Err(Error::InvalidInput(format!(
            "image has {} points, input {}",
            img.len(),
            pts.len()
        )));
    }
    let cube = &map.cube;
    let mut identity_outside = true;
    let mut on_skeleton = true;
    let mut subcube_containment = true;
    let mut stats: HashMap<[usize; 3], SubcubeAudit> = HashMap::new();
    let radius = 3.0 * f.gap();
    for (i, (p, q)) in pts.iter().zip(img).enumerate() {
        if !cube.contains(p) {
            identity_outside &= p == q;
            continue;
        }
        for idx in cube.closed_subcubes(p) {
            subcube_containment &= cube.subcube_contains(idx, q);
        }
        let Some(idx) = cube.open_subcube(p) else {
            continue;
        };
        let entry = stats.entry(idx).or_insert_with(|| {
            let c = map.center_of(idx);
            SubcubeAudit {
                index: idx,
                points: 0,
                moved: 0,
                weight: 0.0,
                image_weight: 0.0,
                inflation: 1.0,
                saturated: c.is_some_and(|c| c.saturated),
                clearance: c.map_or(f64::INFINITY, |c| c.clearance),
            }
        });
        if !entry.saturated {
            on_skeleton &= cube.on_skeleton(q) || cube.on_boundary(q);
        }
        entry.points += 1;
        entry.weight += weights[i];
        if p == q {
            entry.image_weight += weights[i];
            continue;
        }
        entry.moved += 1;
        let near: Vec<Vec3> = f.tree().within(p, radius).into_iter().map(|j| pts[j]).collect();
        let normal = (near.len() >= 3).then(|| {
            let c = near.iter().fold(Vec3::zeros(), |a, x| a + x) / near.len() as f64;
            let cov = near
                .iter()
                .fold(Matrix3::zeros(), |a, x| a + (x - c) * (x - c).transpose());
            let e = cov.symmetric_eigen();
            let k = e.eigenvalues.imin();
            e.eigenvectors.column(k).into_owned()
        });
        entry.image_weight += weights[i] * area_factor(&map.differential(p), normal);
    }
    let mut subcubes: Vec<SubcubeAudit> = stats.into_values().collect();
    subcubes.sort_by_key(|s| s.index);
    for s in &mut subcubes {
        s.inflation = if s.weight > 0.0 { s.image_weight / s.weight } else { 1.0 };
    }
    Ok(ProjectionAudit {
        identity_outside,
        on_skeleton,
        subcube_containment,
        saturated_subcubes: map.centers.iter().filter(|c| c.saturated).count(),
        max_inflation: subcubes.iter().map(|s| s.inflation).fold(1.0, f64::max),
        subcubes,
    })
}
