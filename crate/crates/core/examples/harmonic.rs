//! Cone versus harmonic extension of a graph over a great-circle arc, from
//! sine coefficients and from an ordered sample on the sphere.

use filmgeom::geometry::Vec3;
use filmgeom::harmonic::{great_circle_verdict, harmonic_test, BoundaryCurve, HarmonicParams};

fn main() -> filmgeom::Result<()> {
    let params = HarmonicParams::default();
    for t_max in [1.0, 2.0, 3.0] {
        let curve = BoundaryCurve::from_sines(t_max, vec![vec![0.005, 0.0], vec![0.0, 0.002]])?;
        let rep = harmonic_test(&curve, &params)?;
        println!(
            "T = {t_max:.3}: energies cone {:.3e} harmonic {:.3e}, excess cone {:.3e} harmonic {:.3e}, {}",
            rep.energy_cone(),
            rep.energy_harmonic(),
            rep.area_excess_cone(),
            rep.area_excess_harmonic(),
            rep.verdict
        );
    }
    // an arc of the equator lifted by a small bump
    let pts: Vec<Vec3> = (0..=200)
        .map(|i| {
            let t = 2.0 * i as f64 / 200.0;
            Vec3::new(t.cos(), t.sin(), 0.01 * (std::f64::consts::PI * t / 2.0).sin()).normalize()
        })
        .collect();
    let (rep, _) = great_circle_verdict(&pts, 1e-9, &params)?;
    println!(
        "lifted arc: T = {:.4}, max offset {:.3e}, {}",
        rep.t_max, rep.max_offset, rep.verdict
    );
    Ok(())
}
