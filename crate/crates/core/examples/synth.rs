//! Synthetic fixtures written to a temporary directory as OBJ and CSV.

use std::fs::File;
use std::io::BufWriter;

use filmgeom::cone::{construct_reference_cone, ConeKind, CurveCone, CurveKind};
use filmgeom::geometry::{random_rotation, Vec3};
use filmgeom::measure::{write_csv_points, write_obj};
use filmgeom::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> filmgeom::Result<()> {
    let dir = std::env::temp_dir().join("filmgeom-fixtures");
    std::fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = construct_reference_cone(ConeKind::T, Vec3::zeros(), random_rotation(&mut rng));
    let fan = synth::cone_fan(&t, 1.0, 0.02)?;
    write_obj(&fan, BufWriter::new(File::create(dir.join("t_fan.obj"))?))?;
    let pts = synth::cone_points(&t, 1.0, 0.02)?;
    write_csv_points(&pts, BufWriter::new(File::create(dir.join("t_points.csv"))?))?;
    let prop = CurveCone::new(CurveKind::Propeller, Vec3::zeros(), random_rotation(&mut rng));
    let curve = synth::propeller_points(&prop, 2.0, 0.005, Some(synth::Wiggle::new(0.05)))?;
    write_csv_points(&curve, BufWriter::new(File::create(dir.join("propeller.csv"))?))?;
    let hole = synth::plane_with_annular_hole(0.3, 0.5, 1.0, 64, 0.02)?;
    write_obj(&hole, BufWriter::new(File::create(dir.join("annular_hole.obj"))?))?;
    println!(
        "wrote {}: T fan {} samples (H2 {:.4}), T points {}, propeller {}, annular hole {} samples",
        dir.display(),
        fan.len(),
        fan.total_measure(),
        pts.len(),
        curve.len(),
        hole.len()
    );
    Ok(())
}
