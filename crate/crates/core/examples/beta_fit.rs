//! Beta numbers of exact reference cones against planes, Y and T cones.

use std::time::Instant;

use filmgeom::cone::{construct_reference_cone, ConeKind};
use filmgeom::fit::{beta_fit, ConeFamily, FitBudget, FittedCone};
use filmgeom::geometry::{Frame, LocalWindow, Vec3};
use filmgeom::synth;

fn main() -> filmgeom::Result<()> {
    let gap = 1e-3;
    let frame = Frame::from_scaled_axis(Vec3::new(0.4, -0.3, 0.8));
    for kind in [ConeKind::T, ConeKind::Y, ConeKind::Plane] {
        let truth = construct_reference_cone(kind, Vec3::new(0.2, 0.1, -0.3), frame);
        let t0 = Instant::now();
        let e = synth::cone_fan(&truth, 1.1, gap)?;
        let w = LocalWindow::new(truth.apex, 1.0)?;
        let rep = beta_fit(&e, &w, ConeFamily::PlanesYT, &FitBudget::default())?;
        let FittedCone::Surface(fitted) = &rep.cone else {
            unreachable!()
        };
        println!(
            "{kind}: beta {:.2e} (+{:.1e}) fitted {} frame error {:.3} deg, {:.1}s",
            rep.beta,
            rep.estimate.error_bound,
            fitted.kind,
            fitted.frame_discrepancy(&truth).unwrap_or(f64::NAN).to_degrees(),
            t0.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
