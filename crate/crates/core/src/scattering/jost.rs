use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::export::fmt_f64;
use crate::field::{Cell, ChiralField};
use crate::{tol, Error, Result};

/// Complex 2x2 matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

/// Largest `|lambda| h` (and `max|rho| h`) the per-cell integrator accepts.
pub const MAX_STEP_PHASE: f64 = 1.0;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub(crate) fn apply(a: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

fn det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// `sinh(mu)/mu` and `cosh(mu)` from `mu^2`.
fn cosh_sinhc(mu2: Complex64) -> (Complex64, Complex64) {
    if mu2.norm() < 1e-6 {
        let ch = ONE + mu2 / 2.0 + mu2 * mu2 / 24.0;
        let sc = ONE + mu2 / 6.0 + mu2 * mu2 / 120.0;
        return (ch, sc);
    }
    let mu = mu2.sqrt();
    (mu.cosh(), mu.sinh() / mu)
}

/// Fourth-order Magnus propagator across one cell of
/// `U' = (i lambda sigma3 + s rho K) U`, `K = [[0, 1], [-1, 0]]`; the
/// inverse step when `backward`.
pub(crate) fn cell_step(cell: &Cell, lambda: Complex64, h: f64, s: f64, backward: bool) -> Mat2 {
    let i = Complex64::i();
    let sign = if backward { -1.0 } else { 1.0 };
    let o11 = sign * i * lambda * h;
    let o12 = sign * s * (cell.m0 - 2.0 * i * lambda * cell.m1);
    let o21 = sign * -s * (cell.m0 + 2.0 * i * lambda * cell.m1);
    let (ch, sc) = cosh_sinhc(o11 * o11 + o12 * o21);
    [[ch + sc * o11, sc * o12], [sc * o21, ch - sc * o11]]
}

/// Matrix with a separate real log-scale, `value = exp(log_scale) * m`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledMatrix {
    pub m: Mat2,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.m[r][c] * self.log_scale.exp()
    }
}

fn check_step(field: &ChiralField, lambda: Complex64) -> Result<()> {
    let h = field.grid().spacing();
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda {lambda} is not finite"
        )));
    }
    if lambda.norm() * h > MAX_STEP_PHASE {
        return Err(Error::Integration {
            lambda: lambda.to_string(),
            reason: format!(
                "|lambda| h = {:.3} exceeds {MAX_STEP_PHASE}",
                lambda.norm() * h
            ),
        });
    }
    let rmax = field.samples().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if rmax * h > MAX_STEP_PHASE || !rmax.is_finite() {
        return Err(Error::Integration {
            lambda: lambda.to_string(),
            reason: format!("max|rho| h = {:.3} exceeds {MAX_STEP_PHASE}", rmax * h),
        });
    }
    Ok(())
}

/// `Phi(L, -L)`, the solution at `+L` of the problem started from the
/// identity at `-L`.
pub fn transfer_matrix(field: &ChiralField, lambda: Complex64) -> Result<ScaledMatrix> {
    check_step(field, lambda)?;
    let h = field.grid().spacing();
    let s = field.chirality().sign();
    let mut m = identity();
    let mut log_scale = 0.0;
    for cell in field.cells() {
        m = mul(&cell_step(cell, lambda, h, s, false), &m);
        let n = m.iter().flatten().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if n > 1e100 || n < 1e-100 {
            for z in m.iter_mut().flatten() {
                *z /= n;
            }
            log_scale += n.ln();
        }
    }
    Ok(ScaledMatrix { m, log_scale })
}

/// `Phi(xi_k, -L)` at every node; `lambda` must be real (the solution stays
/// bounded).
pub fn jost_path(field: &ChiralField, lambda: f64) -> Result<Vec<Mat2>> {
    let lam = Complex64::new(lambda, 0.0);
    check_step(field, lam)?;
    let h = field.grid().spacing();
    let s = field.chirality().sign();
    let mut out = Vec::with_capacity(field.grid().samples);
    let mut m = identity();
    out.push(m);
    for cell in field.cells() {
        m = mul(&cell_step(cell, lam, h, s, false), &m);
        out.push(m);
    }
    Ok(out)
}

/// `[[cos I, +-sin I], [-+sin I, cos I]]`, the `lambda = 0` solution
/// normalized to the identity at `-L`.
pub fn rotation_matrix(field: &ChiralField, xi: f64) -> Result<[[f64; 2]; 2]> {
    let angle = field.integral_i(xi)?;
    let (sn, cs) = angle.sin_cos();
    let s = field.chirality().sign();
    Ok([[cs, s * sn], [-s * sn, cs]])
}

/// Scattering coefficients at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringData {
    pub lambda: Complex64,
    /// `a(lambda)`, analytic in the upper half-plane
    pub a: Complex64,
    /// `b(lambda)`, only defined on the real axis
    pub b: Option<Complex64>,
    /// determinant of the transfer matrix (real axis only)
    pub transfer_det: Option<Complex64>,
}

/// Scattering data from the transfer matrix. With
/// `S = exp(-i lambda L sigma3) Phi exp(-i lambda L sigma3)` the monodromy
/// is `S^{-1}`, so `a = S22` and `b = -S12`.
pub fn forward_scatter(field: &ChiralField, lambda: Complex64) -> Result<ScatteringData> {
    if lambda.im < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "a(lambda) needs Im lambda >= 0, got {lambda}"
        )));
    }
    let t = transfer_matrix(field, lambda)?;
    let l = field.grid().half_width;
    let i = Complex64::i();
    let a = t.m[1][1] * (2.0 * i * lambda * l + t.log_scale).exp();
    let (b, transfer_det) = if lambda.im == 0.0 {
        let scale = t.log_scale.exp();
        (Some(-t.m[0][1] * scale), Some(det(&t.m) * scale * scale))
    } else {
        (None, None)
    };
    Ok(ScatteringData {
        lambda,
        a,
        b,
        transfer_det,
    })
}

/// Monodromy at `lambda = 0` as `+-1`, checked against `+-identity`.
pub fn parity_check(field: &ChiralField) -> Result<i32> {
    parity_check_with(field, tol::EPS_TOPO)
}

pub fn parity_check_with(field: &ChiralField, tolerance: f64) -> Result<i32> {
    let t = transfer_matrix(field, Complex64::new(0.0, 0.0))?;
    let scale = t.log_scale.exp();
    let m: Vec<Complex64> = t.m.iter().flatten().map(|z| z * scale).collect();
    let sign = if m[0].re >= 0.0 { 1.0 } else { -1.0 };
    let deviation = (m[0] - sign)
        .norm()
        .max((m[3] - sign).norm())
        .max(m[1].norm())
        .max(m[2].norm());
    if deviation > tolerance {
        return Err(Error::ParityUndefined { deviation });
    }
    Ok(sign as i32)
}

/// `a`, `b` sampled on a real `lambda` grid plus the parity at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyData {
    pub lambda: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub det: Vec<Complex64>,
    pub parity: i32,
}

impl MonodromyData {
    pub fn max_abs_b(&self) -> f64 {
        self.b.iter().fold(0.0, |m, b| m.max(b.norm()))
    }

    pub fn max_det_error(&self) -> f64 {
        self.det.iter().fold(0.0, |m, d| m.max((d - 1.0).norm()))
    }

    /// `lambda,re_a,im_a,re_b,im_b`
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "lambda,re_a,im_a,re_b,im_b")?;
        for k in 0..self.lambda.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(self.lambda[k]),
                fmt_f64(self.a[k].re),
                fmt_f64(self.a[k].im),
                fmt_f64(self.b[k].re),
                fmt_f64(self.b[k].im)
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::export::write_file(path, |w| self.write_csv(w))
    }
}

/// Rows of a monodromy CSV as `(lambda, a, b)`.
pub fn read_monodromy_csv(
    r: impl BufRead,
) -> std::result::Result<Vec<(f64, Complex64, Complex64)>, String> {
    let rows = crate::export::read_numeric_csv(r, &["lambda", "re_a", "im_a", "re_b", "im_b"])?;
    Ok(rows
        .into_iter()
        .map(|v| (v[0], Complex64::new(v[1], v[2]), Complex64::new(v[3], v[4])))
        .collect())
}

/// Scatters on every `lambda` in parallel; order follows the input.
pub fn monodromy(field: &ChiralField, lambdas: &[f64]) -> Result<MonodromyData> {
    let parity = parity_check(field)?;
    let data: Vec<ScatteringData> = lambdas
        .par_iter()
        .map(|&l| forward_scatter(field, Complex64::new(l, 0.0)))
        .collect::<Result<_>>()?;
    Ok(MonodromyData {
        lambda: lambdas.to_vec(),
        a: data.iter().map(|d| d.a).collect(),
        b: data.iter().map(|d| d.b.expect("real lambda")).collect(),
        det: data
            .iter()
            .map(|d| d.transfer_det.expect("real lambda"))
            .collect(),
        parity,
    })
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn lambda_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{soliton_field, Chirality};
    use crate::grid::GridSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_problem() {
        let f = ChiralField::vacuum(Chirality::Plus, GridSpec::default());
        for lam in [c(0.0, 0.0), c(1.3, 0.0), c(-2.0, 0.4)] {
            let d = forward_scatter(&f, lam).unwrap();
            assert!((d.a - 1.0).norm() < 1e-12, "{lam}: {}", d.a);
            if let Some(b) = d.b {
                assert!(b.norm() < 1e-14);
            }
        }
        assert_eq!(parity_check(&f).unwrap(), 1);
        let r = rotation_matrix(&f, 1.0).unwrap();
        assert_eq!(r, [[1.0, 0.0], [-0.0, 1.0]]);
    }

    #[test]
    fn soliton_transmission_is_exact() {
        for ch in [Chirality::Plus, Chirality::Minus] {
            let f = soliton_field(0.5, 2.0, ch, GridSpec::default()).unwrap();
            for lam in [
                c(0.0, 0.5),
                c(0.3, 0.0),
                c(-4.0, 0.0),
                c(0.2, 1.1),
                c(0.0, 0.05),
            ] {
                let d = forward_scatter(&f, lam).unwrap();
                let exact = (lam - c(0.0, 0.5)) / (lam + c(0.0, 0.5));
                assert!(
                    (d.a - exact).norm() < 1e-8,
                    "{ch} {lam}: {} vs {exact}",
                    d.a
                );
                if let Some(b) = d.b {
                    assert!(b.norm() < 1e-9);
                    assert!((d.transfer_det.unwrap() - 1.0).norm() < 1e-12);
                }
            }
            assert_eq!(parity_check(&f).unwrap(), -1);
        }
    }

    #[test]
    fn lambda_zero_path_is_rotation() {
        let f = soliton_field(0.5, 1.0, Chirality::Minus, GridSpec::default()).unwrap();
        let path = jost_path(&f, 0.0).unwrap();
        for k in (0..4096).step_by(97) {
            let r = rotation_matrix(&f, f.grid().node(k)).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((path[k][i][j] - r[i][j]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rejects_lower_half_plane_and_coarse_steps() {
        let f = ChiralField::vacuum(Chirality::Plus, GridSpec::default());
        assert!(forward_scatter(&f, c(0.0, -0.1)).is_err());
        assert!(matches!(
            forward_scatter(&f, c(500.0, 0.0)),
            Err(Error::Integration { .. })
        ));
    }

    #[test]
    fn monodromy_csv_round_trip() {
        let f = soliton_field(0.5, 1.0, Chirality::Plus, GridSpec::default()).unwrap();
        let m = monodromy(&f, &lambda_grid(-1.0, 1.0, 5)).unwrap();
        assert_eq!(m.parity, -1);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let rows = read_monodromy_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 5);
        for (k, (l, a, b)) in rows.iter().enumerate() {
            assert_eq!(*l, m.lambda[k]);
            assert_eq!(*a, m.a[k]);
            assert_eq!(*b, m.b[k]);
        }
    }
}
