//! Reconstruct the world-sheet of a 1+1 soliton string, check the equation
//! of motion and write a few time slices as SVG.

use planar_string::scenario::lattice;
use planar_string::worldsheet::LightConeWindow;
use planar_string::{soliton_field, Chirality, ExternalVariables, GridSpec, StringModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::default();
    let model = StringModel::new(
        soliton_field(0.5, 1.0, Chirality::Plus, grid)?,
        soliton_field(0.7, 1.0, Chirality::Minus, grid)?,
        ExternalVariables::new(1.0, 0.4, [0.0, 0.0], 1.0)?,
    )?;

    let xi0 = lattice(-3.0, 3.0, 0.5);
    let xi1 = lattice(-10.0, 10.0, 0.05);
    let sheet = model.reconstruct(&xi0, &xi1)?;
    println!("{} x {} nodes, {} on cusps", xi0.len(), xi1.len(), sheet.cusp_count());

    let (tp, tm) = model.tangents(0.3, -0.2);
    println!("d+X . d-X = {:+.12}", planar_string::worldsheet::minkowski(&tp, &tm));
    println!("PDE residual at (0.3, -0.2): {:.3e}", model.pde_residual(0.3, -0.2, 1e-3)?);

    // the window must stay clear of cusps
    let w = LightConeWindow::new((-20.0, -1.2), (-20.0, -1.2))?;
    println!("integral curvature: {:.10} (edges), {:.10} (area)",
        model.integral_curvature(&w)?, model.integral_curvature_direct(&w, 801)?);

    let path = std::env::temp_dir().join("worldsheet_snapshot.svg");
    std::fs::write(&path, sheet.svg_snapshot(&[0, xi0.len() / 2, xi0.len() - 1]))?;
    println!("wrote {}", path.display());
    Ok(())
}
