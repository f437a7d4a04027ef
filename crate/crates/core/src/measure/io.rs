//! OBJ triangle meshes and `x,y,z[,w]` point CSV files.

use std::io::{BufRead, Write};

use super::SampledSet;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::spatial::KdTree;

fn parse_err(what: &'static str, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        what,
        line,
        reason: reason.into(),
    }
}

fn bbox_diagonal(points: &[Vec3]) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// Reads `v` and `f` records of an OBJ file; polygons are fan-triangulated,
/// `v/vt/vn` index forms and negative indices are accepted, other records
/// are ignored. Without `gap` the nominal gap is the bounding-box diagonal
/// divided by 500.
pub fn read_obj<R: BufRead>(reader: R, gap: Option<f64>) -> Result<SampledSet> {
    let mut verts: Vec<Vec3> = Vec::new();
    let mut tris = Vec::new();
    for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = ln + 1;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse_err("OBJ", lineno, e.to_string()))?;
                if c.len() != 3 {
                    return Err(parse_err("OBJ", lineno, "vertex needs three coordinates"));
                }
                verts.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in it {
                    let first = tok.split('/').next().unwrap_or("");
                    let k: i64 = first
                        .parse()
                        .map_err(|_| parse_err("OBJ", lineno, format!("bad face index `{tok}`")))?;
                    let n = verts.len() as i64;
                    let k = if k < 0 { n + k } else { k - 1 };
                    if k < 0 || k >= n {
                        return Err(parse_err("OBJ", lineno, format!("face index `{tok}` out of range")));
                    }
                    idx.push(k as usize);
                }
                if idx.len() < 3 {
                    return Err(parse_err("OBJ", lineno, "face needs at least three vertices"));
                }
                for w in 1..idx.len() - 1 {
                    tris.push([verts[idx[0]], verts[idx[w]], verts[idx[w + 1]]]);
                }
            }
            _ => {}
        }
    }
    let gap = match gap {
        Some(g) => g,
        None => {
            let d = bbox_diagonal(&verts);
            if d > 0.0 {
                d / 500.0
            } else {
                1.0
            }
        }
    };
    SampledSet::from_triangles(tris, gap)
}

/// Reads comma separated `x,y,z[,w]` rows. A first row that does not parse
/// as numbers is treated as a header; `#` starts a comment. Without `gap`
/// the gap is the median nearest-neighbour distance; missing weights default
/// to `gap^2`, the cell area of a square lattice of step `gap`.
pub fn read_csv_points<R: BufRead>(reader: R, gap: Option<f64>) -> Result<SampledSet> {
    let mut pts = Vec::new();
    let mut weights: Vec<Option<f64>> = Vec::new();
    let mut seen_row = false;
    for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = ln + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|s| s.parse::<f64>()).collect();
        let vals = match parsed {
            Ok(v) => v,
            Err(e) => {
                if !seen_row {
                    seen_row = true;
                    continue;
                }
                return Err(parse_err("CSV", lineno, e.to_string()));
            }
        };
        seen_row = true;
        match vals.len() {
            3 => weights.push(None),
            4 => weights.push(Some(vals[3])),
            n => return Err(parse_err("CSV", lineno, format!("expected 3 or 4 columns, found {n}"))),
        }
        pts.push(Vec3::new(vals[0], vals[1], vals[2]));
    }
    let gap = match gap {
        Some(g) => g,
        None => median_spacing(&pts).unwrap_or(1.0),
    };
    let w = weights.into_iter().map(|w| w.unwrap_or(gap * gap)).collect();
    SampledSet::from_points(pts, w, gap)
}

fn median_spacing(pts: &[Vec3]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let tree = KdTree::new(pts);
    let step = (pts.len() / 2000).max(1);
    let mut d: Vec<f64> = pts
        .iter()
        .step_by(step)
        .filter_map(|p| nearest_other(&tree, pts, p))
        .collect();
    if d.is_empty() {
        return None;
    }
    d.sort_by(|a, b| a.total_cmp(b));
    let m = d[d.len() / 2];
    (m > 0.0).then_some(m)
}

fn nearest_other(tree: &KdTree, pts: &[Vec3], p: &Vec3) -> Option<f64> {
    // grow a ball until it holds a point other than p itself
    let mut r = 1e-9_f64.max(p.norm() * 1e-12);
    for _ in 0..200 {
        let hits = tree.within(p, r);
        let best = hits
            .iter()
            .map(|&i| (pts[i] - p).norm())
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            return Some(best);
        }
        r *= 2.0;
    }
    None
}

pub fn write_obj<W: Write>(set: &SampledSet, mut out: W) -> Result<()> {
    let tris = set
        .triangles()
        .ok_or_else(|| Error::InvalidInput("OBJ output needs a triangle sample".into()))?;
    for t in tris {
        for v in t {
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
    }
    for i in 0..tris.len() {
        writeln!(out, "f {} {} {}", 3 * i + 1, 3 * i + 2, 3 * i + 3)?;
    }
    Ok(())
}

/// Writes `x,y,z,w` rows; triangle samples are written as their point cloud
/// with weight 0.
pub fn write_csv_points<W: Write>(set: &SampledSet, mut out: W) -> Result<()> {
    writeln!(out, "x,y,z,w")?;
    match set.weights() {
        Some(w) => {
            for (p, w) in set.points().iter().zip(w) {
                writeln!(out, "{},{},{},{}", p.x, p.y, p.z, w)?;
            }
        }
        None => {
            for p in set.points() {
                writeln!(out, "{},{},{},0", p.x, p.y, p.z)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SampleMode;

    #[test]
    fn obj_quad_is_two_triangles() {
        let src = "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 -1//1\n";
        let s = read_obj(src.as_bytes(), Some(0.1)).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.total_measure() - 1.0).abs() < 1e-15);
        assert_eq!(s.mode(), SampleMode::Triangles);
    }

    #[test]
    fn obj_errors_carry_line_numbers() {
        let err = read_obj("v 0 0 0\nf 1 2 3\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = read_obj("v 0 x 0\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn csv_with_header_and_optional_weights() {
        let src = "x,y,z,w\n0,0,0,0.5\n1,0,0,0.25\n";
        let s = read_csv_points(src.as_bytes(), Some(0.1)).unwrap();
        assert_eq!(s.total_measure(), 0.75);
        let s = read_csv_points("0,0,0\n0.5,0,0\n1,0,0\n".as_bytes(), None).unwrap();
        assert!((s.gap() - 0.5).abs() < 1e-12);
        assert!((s.total_measure() - 0.75).abs() < 1e-12);
        let err = read_csv_points("0,0,0\n1,2\n".as_bytes(), Some(0.1)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(read_csv_points("0,0,0,-1\n".as_bytes(), Some(0.1)).is_err());
    }

    #[test]
    fn round_trips() {
        let src = "0,0,0,0.5\n1,2,3,0.25\n";
        let s = read_csv_points(src.as_bytes(), Some(0.1)).unwrap();
        let mut buf = Vec::new();
        write_csv_points(&s, &mut buf).unwrap();
        let back = read_csv_points(buf.as_slice(), Some(0.1)).unwrap();
        assert_eq!(back.points(), s.points());
        let t = read_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n".as_bytes(), Some(0.1)).unwrap();
        let mut buf = Vec::new();
        write_obj(&t, &mut buf).unwrap();
        let back = read_obj(buf.as_slice(), Some(0.1)).unwrap();
        assert_eq!(back.triangles(), t.triangles());
    }
}
