//! Momentum, angular momentum, Hamiltonian and the constraint residual for a
//! two-soliton pair, before and after time evolution.

use planar_string::charges::ChargeSet;
use planar_string::{soliton_field, Chirality, ExternalVariables, GridSpec, StringModel};

fn main() -> planar_string::Result<()> {
    let grid = GridSpec::default();
    let model = StringModel::new(
        soliton_field(0.6, 1.0, Chirality::Plus, grid)?,
        soliton_field(0.9, -0.5, Chirality::Minus, grid)?,
        ExternalVariables::new(1.5, 0.7, [1.0, -2.0], 1.0)?,
    )?;

    let c0 = ChargeSet::compute(&model)?;
    print!("{}", c0.to_json()?);
    let c1 = ChargeSet::compute(&model.evolved(2.5)?)?;
    println!("drift after xi0 = 2.5: H {:.2e}  P1 {:.2e}  P3 {:.2e}  J {:.2e}",
        (c1.h - c0.h).abs(), (c1.p1 - c0.p1).abs(), (c1.p3 - c0.p3).abs(), (c1.j - c0.j).abs());
    Ok(())
}
