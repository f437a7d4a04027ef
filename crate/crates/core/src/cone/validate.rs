use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::{angle_between, SphericalGraph};
use crate::tolerance;

/// Which structural rule a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// An extremity is not shared by exactly three arcs.
    Incidence,
    /// Two arcs leaving a common extremity do not make a 120 degree angle.
    Angle,
    /// An arc is shorter than `l0`.
    MinLength,
    /// Two arcs come within `eta0` of each other without a common endpoint
    /// close enough, or a full circle comes within `eta0` of another arc.
    Separation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub arcs: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Incidence count; angle in radians; arc length; smallest offending
    /// distance, depending on the rule.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeValidationReport {
    pub is_valid: bool,
    pub violations: Vec<Violation>,
    pub eta0: f64,
    pub l0: f64,
    pub angle_tol: f64,
}

impl ConeValidationReport {
    pub fn violates(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationParams {
    /// Tolerance on the 120 degree rule, in radians.
    pub angle_tol: f64,
}

impl Default for ValidationParams {
    fn default() -> Self {
        ValidationParams {
            angle_tol: tolerance::ANGLE,
        }
    }
}

/// Checks the structure a link of a two-dimensional minimal cone must have:
/// each extremity is shared by exactly three arcs meeting at 120 degrees,
/// every arc has length at least `l0`, and arcs that come within `eta0` of
/// each other only do so near a common endpoint. An empty graph or a bad
/// tolerance is an error, not a failing report.
pub fn validate_cone_structure(graph: &SphericalGraph, params: &ValidationParams) -> Result<ConeValidationReport> {
    if !(params.angle_tol > 0.0 && params.angle_tol.is_finite()) {
        return Err(param(
            "angle_tol",
            format!("must be positive, got {}", params.angle_tol),
        ));
    }
    if graph.arcs().is_empty() {
        return Err(Error::MalformedGraph("graph has no arcs".into()));
    }
    let arcs = graph.arcs();
    let mut violations = Vec::new();

    for (vi, v) in graph.vertices().iter().enumerate() {
        let arc_ids: Vec<usize> = v.incident.iter().map(|e| e.arc).collect();
        if v.incidence() != 3 {
            violations.push(Violation {
                rule: Rule::Incidence,
                arcs: arc_ids.clone(),
                vertices: vec![vi],
                value: v.incidence() as f64,
            });
        }
        let tangents: Vec<_> = v
            .incident
            .iter()
            .map(|e| {
                let a = &arcs[e.arc];
                if e.at_start {
                    a.tangent_at_a()
                } else {
                    a.tangent_at_b()
                }
            })
            .collect();
        let target = 2.0 * std::f64::consts::PI / 3.0;
        for i in 0..tangents.len() {
            for j in (i + 1)..tangents.len() {
                let ang = angle_between(&tangents[i], &tangents[j]);
                if (ang - target).abs() > params.angle_tol {
                    violations.push(Violation {
                        rule: Rule::Angle,
                        arcs: vec![arc_ids[i], arc_ids[j]],
                        vertices: vec![vi],
                        value: ang,
                    });
                }
            }
        }
    }

    for (i, a) in arcs.iter().enumerate() {
        if a.length() < graph.l0 {
            violations.push(Violation {
                rule: Rule::MinLength,
                arcs: vec![i],
                vertices: vec![],
                value: a.length(),
            });
        }
    }

    let eta0 = graph.eta0;
    let slack = 10.0 * tolerance::ON_SET;
    for i in 0..arcs.len() {
        for j in 0..arcs.len() {
            if i == j {
                continue;
            }
            let (ci, cj) = (&arcs[i], &arcs[j]);
            if ci.is_full() || cj.is_full() {
                if i < j {
                    let d = ci.distance_to_arc(cj);
                    if d <= eta0 {
                        violations.push(Violation {
                            rule: Rule::Separation,
                            arcs: vec![i, j],
                            vertices: vec![],
                            value: d,
                        });
                    }
                }
                continue;
            }
            let shared: Vec<_> = graph
                .shared_vertices(i, j)
                .into_iter()
                .map(|k| (k, graph.vertices()[k].position))
                .collect();
            let step = eta0.min(ci.length()) / 16.0;
            let mut worst: Option<f64> = None;
            for x in ci.sample(step) {
                let d = cj.distance(&x);
                if d > eta0 {
                    continue;
                }
                let ok = shared.iter().any(|(_, e)| (e - x).norm() <= d + slack);
                if !ok {
                    worst = Some(worst.map_or(d, |w: f64| w.min(d)));
                }
            }
            if let Some(d) = worst {
                violations.push(Violation {
                    rule: Rule::Separation,
                    arcs: vec![i, j],
                    vertices: shared.iter().map(|(k, _)| *k).collect(),
                    value: d,
                });
            }
        }
    }

    Ok(ConeValidationReport {
        is_valid: violations.is_empty(),
        violations,
        eta0,
        l0: graph.l0,
        angle_tol: params.angle_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{reference_graph, ConeKind};
    use crate::geometry::{GreatCircleArc, Vec3};

    fn y_with_angles(degs: [f64; 3]) -> SphericalGraph {
        let arcs = degs
            .iter()
            .map(|d| {
                let th = d.to_radians();
                let u = Vec3::new(th.cos(), th.sin(), 0.0);
                GreatCircleArc::with_normal(Vec3::z(), -Vec3::z(), Vec3::z().cross(&u)).unwrap()
            })
            .collect();
        SphericalGraph::new(arcs, 0.25, 0.5).unwrap()
    }

    #[test]
    fn reference_links_are_valid() {
        for k in [ConeKind::Plane, ConeKind::Y, ConeKind::T] {
            let r = validate_cone_structure(&reference_graph(k), &ValidationParams::default()).unwrap();
            assert!(r.is_valid, "{k}: {:?}", r.violations);
        }
    }

    #[test]
    fn forced_dihedral_angle_is_reported() {
        let g = y_with_angles([0.0, 100.0, 230.0]);
        let r = validate_cone_structure(&g, &ValidationParams::default()).unwrap();
        assert!(!r.is_valid);
        let v = r.violations.iter().find(|v| v.rule == Rule::Angle).unwrap();
        assert!(r
            .violations
            .iter()
            .filter(|v| v.rule == Rule::Angle)
            .any(|v| (v.value.to_degrees() - 100.0).abs() < 1e-9));
        assert_eq!(v.vertices.len(), 1);
    }

    #[test]
    fn crossing_circles_violate_separation() {
        let a = GreatCircleArc::full(Vec3::z()).unwrap();
        let b = GreatCircleArc::full(Vec3::x()).unwrap();
        let g = SphericalGraph::new(vec![a, b], 0.1, 0.1).unwrap();
        let r = validate_cone_structure(&g, &ValidationParams::default()).unwrap();
        assert!(r.violates(Rule::Separation));
        assert!(!r.violates(Rule::Angle));
    }

    #[test]
    fn short_arc_is_reported() {
        let mut g = reference_graph(ConeKind::T);
        g.l0 = 2.0;
        let r = validate_cone_structure(&g, &ValidationParams::default()).unwrap();
        assert!(r.violates(Rule::MinLength));
        assert!((r.violations[0].value - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
    }

    #[test]
    fn dangling_arc_breaks_incidence() {
        let arc = GreatCircleArc::new(Vec3::x(), Vec3::y()).unwrap();
        let g = SphericalGraph::new(vec![arc], 0.1, 0.1).unwrap();
        let r = validate_cone_structure(&g, &ValidationParams::default()).unwrap();
        assert!(r.violates(Rule::Incidence));
        assert!(r.violations.iter().all(|v| v.rule == Rule::Incidence));
    }

    #[test]
    fn empty_graph_and_bad_tolerance_are_errors() {
        let g = SphericalGraph::new(vec![], 0.1, 0.1).unwrap();
        assert!(matches!(
            validate_cone_structure(&g, &ValidationParams::default()),
            Err(Error::MalformedGraph(_))
        ));
        let t = reference_graph(ConeKind::T);
        assert!(validate_cone_structure(&t, &ValidationParams { angle_tol: 0.0 }).is_err());
    }
}
