//! Synthesize a two-soliton field from imaginary eigenvalues and inspect it.

use planar_string::{synth_nsoliton, Chirality, DiscreteSpectrum, GridSpec};

fn main() -> planar_string::Result<()> {
    // opposite norming signs: a kink and an antikink, net charge zero
    let spec = DiscreteSpectrum::imaginary(Chirality::Plus, &[0.4, 0.8], &[1.0, -1.0])?;
    let grid = GridSpec::covering(&[&spec], 1e-10);
    let field = synth_nsoliton(&spec, grid)?;

    println!("grid: L = {}, N = {}", grid.half_width, grid.samples);
    println!("topological charge: {}", field.topological_charge()?);
    println!("total angle / pi:   {:.12}", field.total_angle() / std::f64::consts::PI);
    // 1/2 int rho^2 equals 2 sum a_n for a reflectionless field
    println!("1/2 int rho^2:      {:.12} (2 sum a = 2.4)", 0.5 * field.rho_squared_integral());
    for xi in [-4.0, -2.0, 0.0, 2.0, 4.0] {
        println!("rho({xi:+.1}) = {:+.6e}", field.rho_at(xi));
    }
    Ok(())
}
