//! One-dimensional structure tracing through a wiggled propeller: center,
//! branches, epsilon sequence and tangent certificate.

use filmgeom::cone::{CurveCone, CurveKind};
use filmgeom::geometry::{Frame, LocalWindow, Vec3};
use filmgeom::synth::{propeller_points, Wiggle};
use filmgeom::trace::{tangent_certificate, trace, TraceParams};

fn main() -> filmgeom::Result<()> {
    let cone = CurveCone::new(
        CurveKind::Propeller,
        Vec3::new(0.05, 0.0, 0.02),
        Frame::from_scaled_axis(Vec3::new(0.4, 0.1, -0.3)),
    );
    let e = propeller_points(&cone, 2.0, 1e-3, Some(Wiggle::new(0.05 * 2f64.sqrt())))?;
    let res = trace(&e, &LocalWindow::new(Vec3::zeros(), 1.0)?, &TraceParams::default())?;
    println!(
        "structure {:?}, center {:?}",
        res.structure,
        res.center.map(|c| c.as_slice().to_vec())
    );
    println!("eps_k {:?}", res.epsilon_sequence);
    for (i, b) in res.branches.iter().enumerate() {
        println!("branch {i}: {} vertices", b.len());
    }
    let cert = tangent_certificate(&res);
    println!(
        "center angles {:?}, coplanarity {:?}",
        cert.center_angles_deg, cert.coplanarity_residual
    );
    Ok(())
}
