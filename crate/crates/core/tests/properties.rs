//! Invariants checked on random inputs.

use std::f64::consts::PI;

use filmgeom::cone::{cone_density, cone_measure_in_ball, construct_reference_cone, ConeKind, CurveCone, CurveKind};
use filmgeom::ff::{projection_audit, skeleton_project, DyadicCube, FfParams};
use filmgeom::fit::{beta_fit, classify_point, ClassifyThresholds, ConeFamily, FitBudget};
use filmgeom::geometry::{Frame, LocalWindow, Vec3};
use filmgeom::harmonic::{energies, sine_coefficients, BoundaryCurve, QuadRule};
use filmgeom::measure::GaugeFunction;
use filmgeom::steiner::{fermat_point, y_retraction, RetractionTarget};
use filmgeom::synth;
use filmgeom::trace::{trace, TraceParams};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-r..r).prop_map(Vec3::from)
}

fn frame() -> impl Strategy<Value = Frame> {
    vec3(PI).prop_map(Frame::from_scaled_axis)
}

fn kind() -> impl Strategy<Value = ConeKind> {
    prop_oneof![Just(ConeKind::Plane), Just(ConeKind::Y), Just(ConeKind::T)]
}

fn quick() -> FitBudget {
    FitBudget {
        starts: 4,
        random_frames: 32,
        max_evals: 400,
        ..FitBudget::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_at_the_apex_is_density_times_area(k in kind(), apex in vec3(1.0), f in frame(), r in 0.1..3.0f64) {
        let c = construct_reference_cone(k, apex, f);
        let m = cone_measure_in_ball(&c, &LocalWindow::new(apex, r).unwrap(), 1e-10).unwrap();
        prop_assert!((m / (r * r) - cone_density(&c)).abs() < 1e-9);
    }

    #[test]
    fn cone_measure_grows_with_the_ball(k in kind(), f in frame(), x in vec3(1.0), r in 0.1..1.0f64, dr in 0.0..1.0f64) {
        let c = construct_reference_cone(k, Vec3::zeros(), f);
        let m1 = cone_measure_in_ball(&c, &LocalWindow::new(x, r).unwrap(), 1e-10).unwrap();
        let m2 = cone_measure_in_ball(&c, &LocalWindow::new(x, r + dr).unwrap(), 1e-10).unwrap();
        prop_assert!(m1 <= m2 + 1e-9);
        prop_assert!(m2 <= cone_density(&c) * (r + dr) * (r + dr) * 4.0);
    }

    #[test]
    fn fermat_length_ignores_vertex_order(a in vec3(1.0), b in vec3(1.0), c in vec3(1.0)) {
        prop_assume!((a - b).norm() > 1e-3 && (b - c).norm() > 1e-3 && (a - c).norm() > 1e-3);
        let l1 = fermat_point(a, b, c).unwrap().total_length;
        let l2 = fermat_point(c, a, b).unwrap().total_length;
        let l3 = fermat_point(b, a, c).unwrap().total_length;
        prop_assert!((l1 - l2).abs() < 1e-9 && (l1 - l3).abs() < 1e-9);
        // never longer than the two shorter sides of the triangle
        let mut s = [(a - b).norm(), (b - c).norm(), (a - c).norm()];
        s.sort_by(f64::total_cmp);
        prop_assert!(l1 <= s[0] + s[1] + 1e-12);
    }

    #[test]
    fn retraction_is_two_lipschitz_and_idempotent(
        f in frame(), center in vec3(0.2), p in vec3(2.0), q in vec3(2.0), shape in 0usize..3, open in 2.1..3.1f64,
    ) {
        let ball = LocalWindow::new(Vec3::zeros(), 1.0).unwrap();
        let d = |t: f64| f * Vec3::new(t.cos(), t.sin(), 0.0);
        let target = match shape {
            0 => RetractionTarget::y_set(center, [d(0.0), d(2.0 * PI / 3.0), d(4.0 * PI / 3.0)], ball),
            1 => RetractionTarget::half_lines(center, d(0.0), d(open), ball),
            _ => RetractionTarget::line(center, d(0.0), ball),
        }
        .unwrap();
        let (hp, hq) = (y_retraction(&target, &p), y_retraction(&target, &q));
        prop_assert!((hp - hq).norm() <= 2.0 * (p - q).norm() + 1e-12);
        prop_assert!((y_retraction(&target, &hp) - hp).norm() <= 1e-12);
    }

    #[test]
    fn harmonic_energies_sandwich_the_boundary_energy(
        t_max in (PI / 4.0)..PI, coeffs in prop::collection::vec(prop::collection::vec(-0.01..0.01f64, 2), 1..6),
    ) {
        let curve = BoundaryCurve::from_sines(t_max, coeffs).unwrap();
        let exp = sine_coefficients(&curve, 48, &QuadRule::default()).unwrap();
        let en = energies(&exp.beta, t_max, exp.f_prime_l2_sq).unwrap();
        let fp = exp.f_prime_l2_sq;
        prop_assert!(en.harmonic <= en.ratio_bound * en.cone + 1e-12 + exp.tail_bound);
        prop_assert!(0.5 * fp <= en.cone + exp.tail_bound + 1e-15);
        prop_assert!(en.cone <= fp + 1e-15 && en.harmonic <= fp + 1e-15);
        prop_assert!(en.ratio_bound <= 1.0 + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn classification_is_rigid_invariant(k in kind(), f in frame(), shift in vec3(3.0)) {
        let c = construct_reference_cone(k, Vec3::zeros(), Frame::identity());
        let e = synth::cone_fan(&c, 1.1, 0.01).unwrap();
        let radii = [0.05, 0.1, 0.2, 0.4];
        let th = ClassifyThresholds::default();
        let before = classify_point(&e, Vec3::zeros(), &GaugeFunction::Zero, 1.0, &radii, &th).unwrap();
        let moved = e.similarity(&f, 1.0, &shift).unwrap();
        let after = classify_point(&moved, shift, &GaugeFunction::Zero, 1.0, &radii, &th).unwrap();
        prop_assert_eq!(before.label, after.label);
        prop_assert!((before.theta_estimate - after.theta_estimate).abs() < 1e-9);
    }

    #[test]
    fn skeleton_projection_keeps_points_in_their_subcubes(
        center in vec3(0.3), normal in vec3(1.0), level in 1u32..4, seed in 0u64..1000,
    ) {
        prop_assume!(normal.norm() > 0.1);
        let cube = DyadicCube::new(Vec3::zeros(), 1.0, level).unwrap();
        let f = synth::plane_patch_points(center.add_scalar(0.5), normal, 0.7, 0.02).unwrap();
        let params = FfParams { seed, ..FfParams::default() };
        let (map, image) = skeleton_project(&f, &cube, &params).unwrap();
        let audit = projection_audit(&map, &f, &image).unwrap();
        prop_assert!(audit.identity_outside && audit.subcube_containment);
        for (p, q) in f.points().iter().zip(image.points()) {
            for idx in cube.closed_subcubes(p) {
                prop_assert!(cube.subcube_contains(idx, q));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn beta_is_scale_invariant(k in kind(), f in frame(), s in 0.25..4.0f64) {
        let c = construct_reference_cone(k, Vec3::zeros(), f);
        let e = synth::cone_fan(&c, 1.1, 0.01).unwrap();
        let b1 = beta_fit(&e, &LocalWindow::new(Vec3::zeros(), 1.0).unwrap(), ConeFamily::PlanesYT, &quick()).unwrap().beta;
        let es = e.similarity(&Frame::identity(), s, &Vec3::zeros()).unwrap();
        let b2 = beta_fit(&es, &LocalWindow::new(Vec3::zeros(), s).unwrap(), ConeFamily::PlanesYT, &quick()).unwrap().beta;
        prop_assert!((b1 - b2).abs() <= 1e-6, "{} vs {}", b1, b2);
    }

    #[test]
    fn larger_families_fit_at_least_as_well(k in kind(), f in frame(), x in vec3(0.3)) {
        let c = construct_reference_cone(k, Vec3::zeros(), f);
        let e = synth::cone_fan(&c, 1.5, 0.01).unwrap();
        let w = LocalWindow::new(x, 0.8).unwrap();
        let small = beta_fit(&e, &w, ConeFamily::Planes, &quick()).unwrap().beta;
        let large = beta_fit(&e, &w, ConeFamily::PlanesYT, &quick()).unwrap().beta;
        prop_assert!(large <= small, "{} > {}", large, small);
    }

    #[test]
    fn trace_is_deterministic(f in frame(), apex in vec3(0.05)) {
        let cone = CurveCone::new(CurveKind::Propeller, apex, f);
        let e = synth::propeller_points(&cone, 2.1, 4e-3, None).unwrap();
        let w = LocalWindow::new(Vec3::zeros(), 1.0).unwrap();
        let a = trace(&e, &w, &TraceParams::default()).unwrap();
        let b = trace(&e, &w, &TraceParams::default()).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
