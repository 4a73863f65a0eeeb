//! Synthesize a field, then recover its eigenvalues and norming constants
//! by forward scattering.

use planar_string::scattering::{find_eigenvalues, lambda_grid, monodromy, SearchSpec};
use planar_string::{synth_nsoliton, Chirality, DiscreteSpectrum, GridSpec};

fn main() -> planar_string::Result<()> {
    let spec = DiscreteSpectrum::imaginary(Chirality::Minus, &[0.3, 0.9], &[1.5, 0.7])?;
    let field = synth_nsoliton(&spec, GridSpec::covering(&[&spec], 1e-10))?;

    let found = find_eigenvalues(&field, &SearchSpec::default())?;
    for (lam, c) in found.eigenvalues().iter().zip(found.norming()) {
        println!("lambda = {lam:.10}  c = {c:.10}");
    }

    // reflectionless: b vanishes on the real axis, |a| = 1
    let m = monodromy(&field, &lambda_grid(-5.0, 5.0, 101))?;
    println!("max |b| on the real axis: {:.3e}", m.max_abs_b());
    println!("max |det - 1|:            {:.3e}", m.max_det_error());
    println!("parity at lambda = 0:     {}", m.parity);
    Ok(())
}
