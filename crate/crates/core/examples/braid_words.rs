//! Braid words from cusp world-lines: a closed braid for same-sign solitons
//! and a tangle when cusps are born and die.

use planar_string::braid::{braid_word, classify, mirror_depth, tangle, Projection};
use planar_string::cusps::{track, TrackSpec};
use planar_string::{synth_nsoliton, Chirality, DiscreteSpectrum, ExternalVariables, GridSpec, StringModel};

fn model(plus: (&[f64], &[f64]), minus: (&[f64], &[f64])) -> planar_string::Result<StringModel> {
    let p = DiscreteSpectrum::imaginary(Chirality::Plus, plus.0, plus.1)?;
    let m = DiscreteSpectrum::imaginary(Chirality::Minus, minus.0, minus.1)?;
    let grid = GridSpec::covering(&[&p, &m], 1e-10);
    StringModel::new(synth_nsoliton(&p, grid)?, synth_nsoliton(&m, grid)?, ExternalVariables::default())
}

fn main() -> planar_string::Result<()> {
    let spec = TrackSpec::new(-5.0, 5.0, 0.1)?;

    let t = track(&model((&[0.4, 0.8], &[1.0, 1.0]), (&[0.5, 0.9], &[1.0, 2.0]))?, &spec)?;
    let w = braid_word(&t, Projection::X1, 1e-6)?;
    let s = classify(&w);
    println!("closed braid on {} strands, writhe {}", w.n_strands, w.writhe());
    println!("permutation {:?}, cycle type {:?}, reduced length {}", w.permutation, s.cycle_type, s.reduced_length);
    let mirrored = braid_word(&mirror_depth(&t), Projection::X1, 1e-6)?;
    println!("mirror image writhe {}", mirrored.writhe());

    let t = track(&model((&[0.4, 0.8], &[1.0, -1.0]), (&[0.6], &[1.0]))?, &TrackSpec::new(-6.0, 6.0, 0.1)?)?;
    let tg = tangle(&t, Projection::X1, 1e-6)?;
    println!("tangle: {} -> {} strands, {} events", tg.n_strands_start, tg.n_strands_end, tg.n_events);
    print!("{}", tg.to_json()?);
    Ok(())
}
