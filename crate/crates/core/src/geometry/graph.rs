use serde::{Deserialize, Serialize};

use super::{GreatCircleArc, Vec3};
use crate::error::{Error, Result};
use crate::tolerance;

/// Current version of the graph JSON document.
pub const GRAPH_JSON_VERSION: u32 = 1;

/// Which end of an arc meets a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcEnd {
    pub arc: usize,
    pub at_start: bool,
}

/// An extremity shared by one or more arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub position: Vec3,
    pub incident: Vec<ArcEnd>,
}

impl Vertex {
    pub fn incidence(&self) -> usize {
        self.incident.len()
    }
}

/// Finite union of great-circle arcs and circles on the unit sphere, with the
/// derived vertex set (arc extremities) and the separation / minimum-length
/// parameters used when validating it as the link of a minimal cone.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGraph {
    arcs: Vec<GreatCircleArc>,
    vertices: Vec<Vertex>,
    pub eta0: f64,
    pub l0: f64,
}

impl SphericalGraph {
    /// Builds the graph, merging arc extremities closer than the global
    /// membership tolerance into shared vertices.
    pub fn new(arcs: Vec<GreatCircleArc>, eta0: f64, l0: f64) -> Result<Self> {
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(Error::MalformedGraph(format!("eta0 must be positive, got {eta0}")));
        }
        if !(l0 > 0.0 && l0.is_finite()) {
            return Err(Error::MalformedGraph(format!("l0 must be positive, got {l0}")));
        }
        let mut vertices: Vec<Vertex> = Vec::new();
        for (i, arc) in arcs.iter().enumerate() {
            if arc.is_full() {
                continue;
            }
            for (p, at_start) in [(arc.a().into_inner(), true), (arc.b().into_inner(), false)] {
                let end = ArcEnd { arc: i, at_start };
                match vertices
                    .iter_mut()
                    .find(|v| (v.position - p).norm() <= tolerance::ON_SET * 10.0)
                {
                    Some(v) => v.incident.push(end),
                    None => vertices.push(Vertex {
                        position: p,
                        incident: vec![end],
                    }),
                }
            }
        }
        Ok(SphericalGraph {
            arcs,
            vertices,
            eta0,
            l0,
        })
    }

    /// Graph with default parameters: `eta0` is half the smallest distance
    /// between arcs that share no extremity (0.25 when every pair shares
    /// one) and `l0` is half the shortest arc.
    pub fn with_default_parameters(arcs: Vec<GreatCircleArc>) -> Result<Self> {
        let probe = SphericalGraph::new(arcs, 1.0, 1.0)?;
        let eta0 = probe.min_nonadjacent_distance().map(|d| 0.5 * d).unwrap_or(0.25);
        let l0 = 0.5 * probe.arcs.iter().map(|a| a.length()).fold(f64::INFINITY, f64::min);
        let l0 = if l0.is_finite() { l0 } else { 1.0 };
        let mut g = probe;
        g.eta0 = eta0.max(1e-12);
        g.l0 = l0;
        Ok(g)
    }

    pub fn arcs(&self) -> &[GreatCircleArc] {
        &self.arcs
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Total length H^1 of the graph.
    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.length()).sum()
    }

    /// Vertex ids that are extremities of both arcs.
    pub fn shared_vertices(&self, i: usize, j: usize) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.incident.iter().any(|e| e.arc == i) && v.incident.iter().any(|e| e.arc == j))
            .map(|(k, _)| k)
            .collect()
    }

    /// Smallest distance between two arcs without a common extremity.
    pub fn min_nonadjacent_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.arcs.len() {
            for j in (i + 1)..self.arcs.len() {
                if !self.shared_vertices(i, j).is_empty() {
                    continue;
                }
                let d = self.arcs[i].distance_to_arc(&self.arcs[j]);
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }

    /// The graph after a rotation of the sphere.
    pub fn rotated(&self, r: &super::Frame) -> SphericalGraph {
        SphericalGraph {
            arcs: self.arcs.iter().map(|a| a.rotated(r)).collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex {
                    position: r * v.position,
                    incident: v.incident.clone(),
                })
                .collect(),
            eta0: self.eta0,
            l0: self.l0,
        }
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            version: GRAPH_JSON_VERSION,
            arcs: self
                .arcs
                .iter()
                .map(|arc| {
                    if arc.is_full() {
                        ArcJson {
                            a: arr(arc.normal().as_ref()),
                            b: arr(arc.normal().as_ref()),
                            full_circle: true,
                            normal: None,
                        }
                    } else {
                        ArcJson {
                            a: arr(arc.a().as_ref()),
                            b: arr(arc.b().as_ref()),
                            full_circle: false,
                            normal: Some(arr(arc.normal().as_ref())),
                        }
                    }
                })
                .collect(),
            eta0: self.eta0,
            l0: self.l0,
        }
    }

    pub fn from_json(doc: &GraphJson) -> Result<Self> {
        if doc.version != GRAPH_JSON_VERSION {
            return Err(Error::MalformedGraph(format!(
                "unsupported graph version {} (expected {GRAPH_JSON_VERSION})",
                doc.version
            )));
        }
        let mut arcs = Vec::with_capacity(doc.arcs.len());
        for (i, a) in doc.arcs.iter().enumerate() {
            let pa = Vec3::from(a.a);
            let wrap = |e: Error| Error::MalformedGraph(format!("arc {i}: {e}"));
            if a.full_circle {
                arcs.push(GreatCircleArc::full(pa).map_err(wrap)?);
                continue;
            }
            let pb = Vec3::from(a.b);
            for (name, p) in [("a", &pa), ("b", &pb)] {
                if (p.norm() - 1.0).abs() > tolerance::ON_SET * 1e3 {
                    return Err(Error::MalformedGraph(format!(
                        "arc {i}: endpoint {name} has norm {} (not on the unit sphere)",
                        p.norm()
                    )));
                }
            }
            let arc = match a.normal {
                Some(n) => GreatCircleArc::with_normal(pa, pb, Vec3::from(n)),
                None => GreatCircleArc::new(pa, pb),
            }
            .map_err(wrap)?;
            arcs.push(arc);
        }
        SphericalGraph::new(arcs, doc.eta0, doc.l0)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(s).map_err(|e| Error::MalformedGraph(e.to_string()))?;
        Self::from_json(&doc)
    }
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// One arc in the graph document. For a full circle `a` carries the plane
/// normal and `b` is ignored. `normal` is needed only for half circles, whose
/// endpoints do not determine the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcJson {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub full_circle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<[f64; 3]>,
}

/// Serialized spherical graph: `{version, arcs:[{a, b, full_circle, normal?}], eta0, l0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default = "default_version")]
    pub version: u32,
    pub arcs: Vec<ArcJson>,
    pub eta0: f64,
    pub l0: f64,
}

fn default_version() -> u32 {
    GRAPH_JSON_VERSION
}
