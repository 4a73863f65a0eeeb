use num_complex::Complex64;

use super::DiscreteSpectrum;
use crate::field::{ChiralField, FieldProfile};
use crate::grid::GridSpec;
use crate::linalg::ComplexLu;
use crate::{tol, Error, Result};

/// Pivot ratio below which the reflectionless system counts as singular.
const SINGULAR_RATIO: f64 = 1e-13;

/// Exact reflectionless potential of a [`DiscreteSpectrum`].
///
/// With `D = diag(exp(2i lambda_j xi))` and `B_jk = 2 c_j lambda_j /
/// (lambda_j + lambda_k)` the tau matrix is `M = D + iB` and
///
/// ```text
/// rho(xi) = -2 Im tr(M^{-1} 2i Lambda D),    I(xi) = -2 arg det M.
/// ```
///
/// Rows are rescaled by `min(1, |D_j|^{-1})` so that nothing overflows at
/// either end of the line; neither formula changes under row scaling.
#[derive(Debug, Clone)]
pub struct ReflectionlessProfile {
    lambda: Vec<Complex64>,
    c: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl ReflectionlessProfile {
    pub fn new(spec: &DiscreteSpectrum) -> Self {
        Self::from_data(spec.eigenvalues().to_vec(), spec.norming().to_vec())
    }

    fn from_data(lambda: Vec<Complex64>, c: Vec<Complex64>) -> Self {
        let n = lambda.len();
        let mut b = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                b.push(2.0 * c[j] * lambda[j] / (lambda[j] + lambda[k]));
            }
        }
        Self { lambda, c, b }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn norming(&self) -> &[Complex64] {
        &self.c
    }

    /// Scaled tau matrix and the scaled diagonal `D_j`.
    fn system(&self, xi: f64) -> (ComplexLu, Vec<Complex64>) {
        let n = self.len();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        let mut d = Vec::with_capacity(n);
        let i = Complex64::i();
        for j in 0..n {
            let log_mod = -2.0 * self.lambda[j].im * xi;
            let phase = Complex64::from_polar(1.0, 2.0 * self.lambda[j].re * xi);
            let (dj, scale) = if log_mod > 0.0 {
                (phase, (-log_mod).exp())
            } else {
                (phase * log_mod.exp(), 1.0)
            };
            for k in 0..n {
                m[j * n + k] = i * self.b[j * n + k] * scale;
            }
            m[j * n + j] += dj;
            d.push(dj);
        }
        (ComplexLu::new(n, m), d)
    }

    pub fn try_rho(&self, xi: f64) -> Result<f64> {
        let n = self.len();
        if n == 0 {
            return Ok(0.0);
        }
        let (lu, d) = self.system(xi);
        if !(lu.pivot_ratio > SINGULAR_RATIO) {
            return Err(Error::SingularSystem { xi });
        }
        let mut inv = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            inv[j * n + j] = Complex64::new(1.0, 0.0);
        }
        lu.solve_into(&mut inv, n);
        let i = Complex64::i();
        let tr: Complex64 = (0..n)
            .map(|j| inv[j * n + j] * 2.0 * i * self.lambda[j] * d[j])
            .sum();
        Ok(-2.0 * tr.im)
    }

    /// `rho(xi)`; NaN where the system is singular.
    pub fn rho(&self, xi: f64) -> f64 {
        self.try_rho(xi).unwrap_or(f64::NAN)
    }

    /// `-2 arg det M` on the principal branch, an independent route to `I`
    /// modulo `2 pi`.
    pub fn det_phase(&self, xi: f64) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let (lu, _) = self.system(xi);
        -2.0 * lu.determinant().arg()
    }

    /// Profile of `rho(xi + shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let i = Complex64::i();
        let c = self
            .lambda
            .iter()
            .zip(&self.c)
            .map(|(l, c)| c * (-2.0 * i * l * shift).exp())
            .collect();
        Self::from_data(self.lambda.clone(), c)
    }
}

/// Reflectionless N-soliton field of `spec` on `grid`.
pub fn synth_nsoliton(spec: &DiscreteSpectrum, grid: GridSpec) -> Result<ChiralField> {
    synth_nsoliton_with(spec, grid, tol::EPS_DECAY)
}

pub fn synth_nsoliton_with(
    spec: &DiscreteSpectrum,
    grid: GridSpec,
    decay_tol: f64,
) -> Result<ChiralField> {
    if spec.is_empty() {
        return Ok(ChiralField::vacuum(spec.chirality(), grid));
    }
    let profile = ReflectionlessProfile::new(spec);
    let field = ChiralField::from_profile(
        spec.chirality(),
        FieldProfile::Reflectionless(profile.clone()),
        grid,
    );
    if let Some(i) = field.samples().iter().position(|r| !r.is_finite()) {
        return Err(Error::SingularSystem { xi: grid.node(i) });
    }
    if field.cells().iter().any(|c| !c.m0.is_finite()) {
        let k = field
            .cells()
            .iter()
            .position(|c| !c.m0.is_finite())
            .unwrap_or(0);
        return Err(Error::SingularSystem { xi: grid.node(k) });
    }
    field.check_decay(decay_tol)?;
    Ok(field)
}
