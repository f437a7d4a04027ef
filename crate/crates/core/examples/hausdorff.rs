//! Normalized local Hausdorff distance between samples and cones.

use filmgeom::cone::{construct_reference_cone, ConeKind};
use filmgeom::geometry::{local_hausdorff_distance, Frame, LocalWindow, Vec3};
use filmgeom::synth;

fn main() -> filmgeom::Result<()> {
    let gap = 2e-3;
    let plane = construct_reference_cone(ConeKind::Plane, Vec3::zeros(), Frame::identity());
    let y = construct_reference_cone(ConeKind::Y, Vec3::zeros(), Frame::identity());
    let w = LocalWindow::new(Vec3::zeros(), 0.5)?;
    for delta in [0.0, 0.01, 0.05] {
        let e = synth::plane_patch(Vec3::new(0.0, 0.0, delta), Vec3::z(), 0.8, gap)?;
        let d = local_hausdorff_distance(&e, &plane, &w, gap)?;
        println!(
            "plane lifted by {delta}: d = {:.5} (2 delta / r = {:.5}, +-{:.1e})",
            d.value,
            2.0 * delta / 0.5,
            d.error_bound
        );
    }
    let e = synth::cone_fan(&y, 1.0, gap)?;
    let d = local_hausdorff_distance(&e, &plane, &w, gap)?;
    println!(
        "Y sample against a plane: d = {:.4} (E side {:.4}, Z side {:.4})",
        d.value, d.e_side, d.z_side
    );
    Ok(())
}
