use num_complex::Complex64;
use rayon::prelude::*;

use super::jost::{apply, cell_step, forward_scatter};
use super::DiscreteSpectrum;
use crate::field::{ChiralField, Chirality};
use crate::{Error, Result};

/// Where and how finely to look for zeros of `a(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpec {
    /// imaginary-axis scan starts here
    pub a_min: f64,
    /// upper end of the scan; `None` picks `max|rho| + 0.5`
    pub a_max: Option<f64>,
    /// scan samples on the imaginary axis
    pub scan_points: usize,
    /// also count symmetric pairs in the first quadrant up to this `Re lambda`
    pub pairs_re_max: Option<f64>,
    /// root tolerance in `lambda`
    pub tolerance: f64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            a_min: 0.02,
            a_max: None,
            scan_points: 400,
            pairs_re_max: None,
            tolerance: 1e-12,
        }
    }
}

fn a_of(field: &ChiralField, lambda: Complex64) -> Result<Complex64> {
    Ok(forward_scatter(field, lambda)?.a)
}

/// Zero of the real function `f` bracketed by `[lo, hi]` (Illinois variant
/// of regula falsi).
fn bracket_root(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
    tolerance: f64,
) -> Result<f64> {
    let mut side = 0;
    for _ in 0..200 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x.is_finite() && x > lo && x < hi {
            x
        } else {
            0.5 * (lo + hi)
        };
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi /= 2.0;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo /= 2.0;
            }
            side = 1;
        }
        if hi - lo < tolerance {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::EigenvalueSearch(format!(
        "bracketed root in [{lo}, {hi}] did not converge"
    )))
}

/// Number of zeros of `a` inside the rectangle, by the argument principle.
fn winding(field: &ChiralField, re: (f64, f64), im: (f64, f64)) -> Result<i64> {
    let mut per_edge = 32;
    loop {
        let corners = [
            Complex64::new(re.0, im.0),
            Complex64::new(re.1, im.0),
            Complex64::new(re.1, im.1),
            Complex64::new(re.0, im.1),
        ];
        let pts: Vec<Complex64> = (0..4)
            .flat_map(|e| {
                let (p, q) = (corners[e], corners[(e + 1) % 4]);
                (0..per_edge).map(move |k| p + (q - p) * (k as f64 / per_edge as f64))
            })
            .collect();
        let vals: Vec<Complex64> = pts
            .par_iter()
            .map(|&l| a_of(field, l))
            .collect::<Result<_>>()?;
        if vals.iter().any(|v| v.norm() < 1e-12) {
            return Err(Error::EigenvalueSearch(
                "zero of a(lambda) on a search contour".into(),
            ));
        }
        let mut total = 0.0;
        let mut max_jump: f64 = 0.0;
        for k in 0..vals.len() {
            let d = (vals[(k + 1) % vals.len()] / vals[k]).arg();
            max_jump = max_jump.max(d.abs());
            total += d;
        }
        if max_jump < 0.5 {
            return Ok((total / (2.0 * std::f64::consts::PI)).round() as i64);
        }
        if per_edge >= 4096 {
            return Err(Error::EigenvalueSearch(
                "argument of a(lambda) not resolved on contour".into(),
            ));
        }
        per_edge *= 2;
    }
}

fn newton(field: &ChiralField, mut z: Complex64, tolerance: f64) -> Result<Complex64> {
    let e = 1e-6;
    for _ in 0..60 {
        let f = a_of(field, z)?;
        let df = (a_of(field, z + e)? - a_of(field, z - e)?) / (2.0 * e);
        let step = f / df;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) || z.im <= 0.0 {
            break;
        }
        if step.norm() < tolerance {
            return Ok(z);
        }
    }
    Err(Error::EigenvalueSearch(format!(
        "Newton did not converge near {z}"
    )))
}

fn quadrant_roots(
    field: &ChiralField,
    re: (f64, f64),
    im: (f64, f64),
    tolerance: f64,
    depth: usize,
    out: &mut Vec<Complex64>,
) -> Result<()> {
    let count = winding(field, re, im)?;
    if count <= 0 {
        return Ok(());
    }
    let size = (re.1 - re.0).max(im.1 - im.0);
    if count == 1 && size < 0.1 {
        let z = newton(
            field,
            Complex64::new(0.5 * (re.0 + re.1), 0.5 * (im.0 + im.1)),
            tolerance,
        )?;
        out.push(z);
        return Ok(());
    }
    if depth > 14 {
        return Err(Error::EigenvalueSearch(format!(
            "could not isolate {count} zeros near {re:?} x {im:?}"
        )));
    }
    let rm = 0.5 * (re.0 + re.1) + 1e-7;
    let im_mid = 0.5 * (im.0 + im.1) + 1e-7;
    for r in [(re.0, rm), (rm, re.1)] {
        for i in [(im.0, im_mid), (im_mid, im.1)] {
            quadrant_roots(field, r, i, tolerance, depth + 1, out)?;
        }
    }
    Ok(())
}

/// Zeros of `a(lambda)` in the upper half-plane with their norming constants.
///
/// The imaginary axis is scanned for sign changes of the real function
/// `a(i s)`; the count found must be at least `|n|` and have the parity of
/// `n`, with `n` the topological charge. Pairs off the axis are added when
/// `pairs_re_max` is set.
pub fn find_eigenvalues(field: &ChiralField, search: &SearchSpec) -> Result<DiscreteSpectrum> {
    let n = field.topological_charge()?;
    let h = field.grid().spacing();
    let rmax = field.samples().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let a_max = search.a_max.unwrap_or(rmax + 0.5).min(0.9 / h);
    if !(search.a_min > 0.0 && a_max > search.a_min && search.scan_points >= 2) {
        return Err(Error::InvalidParameter(format!(
            "search window [{}, {a_max}] with {} points",
            search.a_min, search.scan_points
        )));
    }
    let f = |s: f64| -> Result<f64> { Ok(a_of(field, Complex64::new(0.0, s))?.re) };
    let pts: Vec<f64> = (0..search.scan_points)
        .map(|k| search.a_min + (a_max - search.a_min) * k as f64 / (search.scan_points - 1) as f64)
        .collect();
    let vals: Vec<f64> = pts.par_iter().map(|&s| f(s)).collect::<Result<_>>()?;
    let mut eig = Vec::new();
    for k in 0..pts.len() - 1 {
        if vals[k] == 0.0 {
            eig.push(Complex64::new(0.0, pts[k]));
        } else if vals[k] * vals[k + 1] < 0.0 {
            let s = bracket_root(
                f,
                pts[k],
                pts[k + 1],
                vals[k],
                vals[k + 1],
                search.tolerance,
            )?;
            eig.push(Complex64::new(0.0, s));
        }
    }
    let count = eig.len() as i64;
    if count < n.abs() || (count - n).rem_euclid(2) != 0 {
        return Err(Error::EigenvalueSearch(format!(
            "found {count} imaginary eigenvalues for topological charge {n}; widen the window"
        )));
    }
    if let Some(re_max) = search.pairs_re_max {
        let mut q = Vec::new();
        quadrant_roots(
            field,
            (1e-3, re_max),
            (search.a_min, a_max),
            search.tolerance,
            0,
            &mut q,
        )?;
        for z in q {
            eig.push(z);
            eig.push(-z.conj());
        }
    }
    let gammas: Vec<Complex64> = eig
        .iter()
        .map(|&l| jost_norming_constant(field, l))
        .collect::<Result<_>>()?;
    let mut c: Vec<Complex64> = (0..eig.len())
        .map(|j| norming_from_jost(gammas[j], &eig, j, field.chirality()))
        .collect();
    // impose the reality reduction on the measured constants
    let mut j = 0;
    while j < eig.len() {
        if eig[j].re == 0.0 {
            c[j].im = 0.0;
            j += 1;
        } else {
            c[j + 1] = c[j].conj();
            j += 2;
        }
    }
    DiscreteSpectrum::new(field.chirality(), eig, c)
}

/// `gamma` in `col1(U^[+]) = gamma col2(U^[-])` at the eigenvalue `lambda`,
/// with `U^[+-]` normalized by plane waves at `+-L`. Both columns are
/// integrated towards the node of largest `|rho|`, each from its own end.
pub fn jost_norming_constant(field: &ChiralField, lambda: Complex64) -> Result<Complex64> {
    let g = field.grid();
    let h = g.spacing();
    let s = field.chirality().sign();
    let mid = field
        .samples()
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, r)| {
            if r.abs() > best.1 {
                (i, r.abs())
            } else {
                best
            }
        })
        .0
        .clamp(1, g.samples - 2);
    let norm = |v: &mut [Complex64; 2], log: &mut f64| {
        let n = v[0].norm().max(v[1].norm());
        v[0] /= n;
        v[1] /= n;
        *log += n.ln();
    };
    let (mut v, mut lv) = ([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], 0.0);
    for cell in &field.cells()[..mid] {
        v = apply(&cell_step(cell, lambda, h, s, false), v);
        norm(&mut v, &mut lv);
    }
    let (mut w, mut lw) = ([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 0.0);
    for cell in field.cells()[mid..].iter().rev() {
        w = apply(&cell_step(cell, lambda, h, s, true), w);
        norm(&mut w, &mut lw);
    }
    // both columns start as exp(i lambda L) times a unit vector; the common
    // factor cancels in the ratio
    let k = if v[0].norm() > v[1].norm() { 0 } else { 1 };
    let ratio = w[k] / v[k] * (lw - lv).exp();
    let other = 1 - k;
    if (w[other] / v[other] * (lw - lv).exp() - ratio).norm() > 1e-4 * ratio.norm().max(1.0)
        && v[other].norm() > 1e-3
    {
        return Err(Error::EigenvalueSearch(format!(
            "Jost columns are not proportional at lambda = {lambda}"
        )));
    }
    Ok(ratio)
}

/// `2 lambda_n a'(lambda_n)` for the reflectionless `a`.
fn jost_factor(eig: &[Complex64], n: usize) -> Complex64 {
    let l = eig[n];
    let others: Complex64 = eig
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != n)
        .map(|(_, &mu)| (l - mu) / (l - mu.conj()))
        .product();
    2.0 * l / (l - l.conj()) * others
}

/// Synthesis constant `c_n` from the measured Jost ratio:
/// `gamma_n = -+ 2 c_n lambda_n a'(lambda_n)`, i.e.
/// `-+ c_n 2 lambda_n/(lambda_n - conj lambda_n) prod_{k != n} (lambda_n - lambda_k)/(lambda_n - conj lambda_k)`.
pub fn norming_from_jost(
    gamma: Complex64,
    eigenvalues: &[Complex64],
    n: usize,
    chirality: Chirality,
) -> Complex64 {
    -chirality.sign() * gamma / jost_factor(eigenvalues, n)
}

/// Inverse of [`norming_from_jost`].
pub fn jost_from_norming(
    c: Complex64,
    eigenvalues: &[Complex64],
    n: usize,
    chirality: Chirality,
) -> Complex64 {
    -chirality.sign() * c * jost_factor(eigenvalues, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::scattering::synth_nsoliton;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_soliton_round_trip() {
        for ch in [Chirality::Plus, Chirality::Minus] {
            for cn in [1.0, 2.0, -0.5] {
                let spec = DiscreteSpectrum::imaginary(ch, &[0.5], &[cn]).unwrap();
                let f = synth_nsoliton(&spec, GridSpec::default()).unwrap();
                let g = jost_norming_constant(&f, c(0.0, 0.5)).unwrap();
                assert!((g + ch.sign() * cn).norm() < 1e-7, "{ch} {cn}: {g}");
                let back = find_eigenvalues(&f, &SearchSpec::default()).unwrap();
                assert_eq!(back.len(), 1);
                assert!((back.eigenvalues()[0] - c(0.0, 0.5)).norm() < 1e-9);
                assert!((back.norming()[0] - cn).norm() < 1e-6 * cn.abs());
            }
        }
    }

    #[test]
    fn two_soliton_constants() {
        let spec = DiscreteSpectrum::imaginary(Chirality::Plus, &[0.3, 0.9], &[2.0, -0.5]).unwrap();
        let g = GridSpec::covering(&[&spec], 1e-10);
        let f = synth_nsoliton(&spec, g).unwrap();
        let back = find_eigenvalues(&f, &SearchSpec::default()).unwrap();
        assert_eq!(back.len(), 2);
        for (j, want) in [(0, 0.3), (1, 0.9)] {
            assert!((back.eigenvalues()[j].im - want).abs() < 1e-8);
        }
        for j in 0..2 {
            let rel = (back.norming()[j] - spec.norming()[j]).norm() / spec.norming()[j].norm();
            assert!(rel < 1e-6, "{j}: {}", back.norming()[j]);
        }
    }

    #[test]
    fn breather_pair_is_found() {
        let spec = DiscreteSpectrum::new(
            Chirality::Minus,
            vec![c(0.5, 0.4), c(-0.5, 0.4)],
            vec![c(1.0, 0.5), c(1.0, -0.5)],
        )
        .unwrap();
        let f = synth_nsoliton(&spec, GridSpec::default()).unwrap();
        let search = SearchSpec {
            pairs_re_max: Some(1.5),
            a_max: Some(1.2),
            ..SearchSpec::default()
        };
        let back = find_eigenvalues(&f, &search).unwrap();
        assert_eq!(back.len(), 2);
        assert!((back.eigenvalues()[0] - c(0.5, 0.4)).norm() < 1e-8);
        assert!(
            (back.norming()[0] - c(1.0, 0.5)).norm() < 1e-6,
            "{:?}",
            back.norming()
        );
    }

    #[test]
    fn vacuum_has_no_eigenvalues() {
        let f = ChiralField::vacuum(Chirality::Plus, GridSpec::default());
        assert!(find_eigenvalues(&f, &SearchSpec::default())
            .unwrap()
            .is_empty());
    }
}
