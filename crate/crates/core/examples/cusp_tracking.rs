//! Follow cusp world-lines through a mixed-sign configuration where pairs of
//! cusps are created and annihilated.

use planar_string::cusps::{cusp_positions, track, TrackSpec};
use planar_string::{synth_nsoliton, Chirality, DiscreteSpectrum, ExternalVariables, GridSpec, StringModel};

fn main() -> planar_string::Result<()> {
    let plus = DiscreteSpectrum::imaginary(Chirality::Plus, &[0.4, 0.8], &[1.0, -1.0])?;
    let minus = DiscreteSpectrum::imaginary(Chirality::Minus, &[0.6], &[1.0])?;
    let grid = GridSpec::covering(&[&plus, &minus], 1e-10);
    let model = StringModel::new(
        synth_nsoliton(&plus, grid)?,
        synth_nsoliton(&minus, grid)?,
        ExternalVariables::default(),
    )?;

    for p in cusp_positions(&model, 0.0)? {
        println!("xi0 = 0: cusp at xi1 = {:+.8} (branch {})", p.xi1, p.branch_k);
    }

    let t = track(&model, &TrackSpec::new(-6.0, 6.0, 0.1)?)?;
    println!("{} world-lines, branch deviation {:.2e}", t.lines.len(), t.branch_deviation(&model));
    for e in &t.events {
        println!("{:?} at xi0 = {:+.6} of lines {:?}", e.kind, e.xi0, e.line_ids);
    }
    let (lo, hi) = t.counts.iter().fold((usize::MAX, 0), |(lo, hi), &(_, n)| (lo.min(n), hi.max(n)));
    println!("cusp count between {lo} and {hi}");
    Ok(())
}
