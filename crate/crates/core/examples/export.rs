//! Invariant tables as CSV and focal surfaces as OBJ meshes.

use frontal::analysis::{analyze_curve, focal_meshes};
use frontal::dsl::builtin_surface;
use frontal::export::{write_csv, CSV_COLUMNS};

fn main() -> frontal::Result<()> {
    let dir = std::env::temp_dir().join("frontal-export-example");
    std::fs::create_dir_all(&dir).map_err(|e| frontal::Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;

    let circ = builtin_surface("CIRC")?;
    let (_, rows) = analyze_curve(&circ, (0.0, 0.0), 0.1, 200)?;
    let csv = dir.join("circ.csv");
    write_csv(&rows, &csv)?;
    println!("{} rows x {} columns -> {}", rows.len(), CSV_COLUMNS.len(), csv.display());

    let meshes = focal_meshes(&builtin_surface("SW")?, 32, 32)?;
    for mesh in [&meshes.surface, &meshes.fc, &meshes.hat_fc] {
        let path = dir.join(format!("{}.obj", mesh.name));
        mesh.write_obj(&path)?;
        let holes = mesh.points.iter().filter(|p| p.is_none()).count();
        println!("{} ({holes} holes) -> {}", mesh.name, path.display());
    }
    Ok(())
}
