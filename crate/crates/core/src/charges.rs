//! Noether charges of the string: momentum `P = (P1, P3)`, the internal
//! angular momentum `J`, `M = M13`, the Hamiltonian and the constraint
//! `Phi = P^2 - gamma J Omega` tying them together.

use rayon::prelude::*;
use serde::Serialize;

use crate::field::ChiralField;
use crate::quad::simpson;
use crate::worldsheet::StringModel;
use crate::{Error, Result};

/// `|F_J|` below which `Omega = F_P / F_J` is treated as undefined.
pub const F_J_MIN: f64 = 1e-12;

/// Nodes and midpoints of the common grid: `2N - 1` points, spacing `h/2`.
fn refined(field: &ChiralField) -> (Vec<f64>, f64) {
    let g = field.grid();
    let n = 2 * g.samples - 1;
    let h = 0.5 * g.spacing();
    let lo = -g.half_width;
    ((0..n).map(|k| lo + k as f64 * h).collect(), h)
}

/// `int [e^{i(2I+ + 2beta)} - e^{-i(2I- - 2beta)}] dxi`: its imaginary
/// part is the `P1` integral, its real part the `P3` one.
fn momentum_integrals(plus: &ChiralField, minus: &ChiralField, beta: f64) -> [f64; 2] {
    let (xs, h) = refined(plus);
    let s1: Vec<f64> = xs
        .iter()
        .map(|&x| (2.0 * plus.angle_at(x) + 2.0 * beta).sin() + (2.0 * minus.angle_at(x) - 2.0 * beta).sin())
        .collect();
    let s3: Vec<f64> = xs
        .iter()
        .map(|&x| (2.0 * plus.angle_at(x) + 2.0 * beta).cos() - (2.0 * minus.angle_at(x) - 2.0 * beta).cos())
        .collect();
    [simpson(&s1, h), simpson(&s3, h)]
}

/// `P = -gamma kappa (int [sin(2I+ + 2beta) + sin(2I- - 2beta)],
///                    int [cos(2I+ + 2beta) - cos(2I- - 2beta)])`.
pub fn momentum(model: &StringModel) -> Result<[f64; 2]> {
    model.charges()?;
    let e = model.externals;
    let [a, b] = momentum_integrals(&model.plus, &model.minus, e.beta);
    let s = -e.gamma * e.kappa;
    Ok([s * a, s * b])
}

/// Same momentum from the closed-form integrals of `de+ + de-`,
/// `P = 2 gamma kappa int (de+ + de-)`.
pub fn momentum_from_delta_e(model: &StringModel) -> Result<[f64; 2]> {
    model.charges()?;
    let e = model.externals;
    let (s2, c2) = (2.0 * e.beta).sin_cos();
    let mut p = [0.0; 2];
    for f in [&model.plus, &model.minus] {
        let (sc, ss) = f.sc_ss_total();
        let sign = f.chirality().sign();
        p[0] += -sc * c2 + sign * ss * s2;
        p[1] += sign * ss * c2 + sc * s2;
    }
    let s = 2.0 * e.gamma * e.kappa;
    Ok([s * p[0], s * p[1]])
}

/// `F_P` as the sum of squares of the two momentum integrals.
pub fn f_p(plus: &ChiralField, minus: &ChiralField, beta: f64) -> f64 {
    let [a, b] = momentum_integrals(plus, minus, beta);
    a * a + b * b
}

/// `F_P = 4 int int sin S(xi) sin S(eta) cos(D(xi) - D(eta))` with
/// `S = I+ + I-`, `D = I+ - I-`; no `beta` anywhere. The kernel splits into
/// `4 |int sin S e^{iD}|^2`.
pub fn f_p_double(plus: &ChiralField, minus: &ChiralField) -> f64 {
    let (xs, h) = refined(plus);
    let (mut re, mut im) = (Vec::with_capacity(xs.len()), Vec::with_capacity(xs.len()));
    for &x in &xs {
        let (p, m) = (plus.angle_at(x), minus.angle_at(x));
        let s = (p + m).sin();
        let (sd, cd) = (p - m).sin_cos();
        re.push(s * cd);
        im.push(s * sd);
    }
    let (a, b) = (simpson(&re, h), simpson(&im, h));
    4.0 * (a * a + b * b)
}

/// `int int eps(e1 - e2) sinI cosI(e1) sin^2 I(e2)` of one field, reduced to
/// `int sinI cosI(e) [2 G(e) - G(inf)]` with `G` the running integral of
/// `sin^2 I`.
fn sign_kernel_single(field: &ChiralField) -> f64 {
    let (xs, h) = refined(field);
    let (_, total) = field.sc_ss_total();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let (s, c) = field.angle_at(x).sin_cos();
            let (_, g) = field.sc_ss_at(x);
            s * c * (2.0 * g - total)
        })
        .collect();
    simpson(&vals, h)
}

/// `F_J = sum over both fields of int int eps(e1 - e2) sinI cosI(e1) sin^2 I(e2)`.
pub fn f_j(plus: &ChiralField, minus: &ChiralField) -> f64 {
    sign_kernel_single(plus) + sign_kernel_single(minus)
}

/// `F_J` by the explicit double sum over grid nodes with the sign kernel
/// (`eps(0) = 0`), parallel over the outer index. Second order in `h`.
pub fn f_j_double_sum(plus: &ChiralField, minus: &ChiralField) -> f64 {
    let h = plus.grid().spacing();
    let one = |field: &ChiralField| {
        let (f, g): (Vec<f64>, Vec<f64>) = field
            .angles()
            .iter()
            .map(|a| {
                let (s, c) = a.sin_cos();
                (s * c, s * s)
            })
            .unzip();
        f.par_iter()
            .enumerate()
            .map(|(i, fi)| {
                let below: f64 = g[..i].iter().sum();
                let above: f64 = g[i + 1..].iter().sum();
                fi * (below - above)
            })
            .sum::<f64>()
            * h
            * h
    };
    one(plus) + one(minus)
}

/// The kernel exactly as it is usually printed,
/// `eps(e1 - e2) sinI+(e1) sinI-(e2) [cosI+(e1) sinI+(e2) + cosI-(e1) sinI-(e2)]`.
/// It is not invariant under relative translations of the two fields and is
/// kept only for comparison.
pub fn f_j_as_printed(plus: &ChiralField, minus: &ChiralField) -> f64 {
    let (xs, h) = refined(plus);
    let mut f1 = Vec::with_capacity(xs.len());
    let mut g1 = Vec::with_capacity(xs.len());
    let mut f2 = Vec::with_capacity(xs.len());
    let mut g2 = Vec::with_capacity(xs.len());
    for &x in &xs {
        let (sp, cp) = plus.angle_at(x).sin_cos();
        let (sm, cm) = minus.angle_at(x).sin_cos();
        f1.push(sp * cp);
        g1.push(sm * sp);
        f2.push(sp * cm);
        g2.push(sm * sm);
    }
    sign_kernel_sampled(&f1, &g1, h) + sign_kernel_sampled(&f2, &g2, h)
}

/// `int int eps(x - y) f(x) g(y)` for uniformly sampled `f`, `g` (trapezoid
/// running integral).
fn sign_kernel_sampled(f: &[f64], g: &[f64], h: f64) -> f64 {
    let mut run = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    run.push(0.0);
    for k in 1..g.len() {
        acc += 0.5 * h * (g[k - 1] + g[k]);
        run.push(acc);
    }
    let vals: Vec<f64> = f
        .iter()
        .zip(&run)
        .map(|(fi, gi)| fi * (2.0 * gi - acc))
        .collect();
    simpson(&vals, h)
}

/// `J = gamma kappa^2 F_J`.
pub fn angular_j(model: &StringModel) -> Result<f64> {
    model.charges()?;
    let e = model.externals;
    Ok(e.gamma * e.kappa * e.kappa * f_j(&model.plus, &model.minus))
}

/// `Phi = P^2 - gamma J Omega` with `Omega = F_P / F_J`.
pub fn constraint_phi(p: [f64; 2], j: f64, gamma: f64, f_p: f64, f_j: f64) -> Result<f64> {
    let p_squared = p[0] * p[0] + p[1] * p[1];
    if !(f_j.abs() >= F_J_MIN) {
        return Err(Error::OmegaUndefined { f_j, p_squared });
    }
    Ok(p_squared - gamma * j * (f_p / f_j))
}

/// `H = (1/2) int (rho+^2 + rho-^2)`.
pub fn hamiltonian(plus: &ChiralField, minus: &ChiralField) -> f64 {
    0.5 * (plus.rho_squared_integral() + minus.rho_squared_integral())
}

/// All charges of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargeSet {
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P3")]
    pub p3: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "F_P")]
    pub f_p: f64,
    #[serde(rename = "F_J")]
    pub f_j: f64,
    /// `None` off-shell, where `F_J` vanishes
    #[serde(rename = "Omega")]
    pub omega: Option<f64>,
    #[serde(rename = "Phi_residual")]
    pub phi_residual: Option<f64>,
    pub n_plus: i64,
    pub n_minus: i64,
}

impl ChargeSet {
    /// Charges of `model`. `F_P` here is the `beta`-free double integral, so
    /// `Phi_residual` compares two independent quadratures.
    pub fn compute(model: &StringModel) -> Result<Self> {
        let (n_plus, n_minus) = model.charges()?;
        let e = model.externals;
        let [p1, p3] = momentum(model)?;
        let f_j = f_j(&model.plus, &model.minus);
        let j = e.gamma * e.kappa * e.kappa * f_j;
        let f_p = f_p_double(&model.plus, &model.minus);
        let (omega, phi_residual) = match constraint_phi([p1, p3], j, e.gamma, f_p, f_j) {
            Ok(phi) => (Some(f_p / f_j), Some(phi)),
            Err(Error::OmegaUndefined { .. }) => (None, None),
            Err(err) => return Err(err),
        };
        Ok(Self {
            p1,
            p3,
            j,
            m: e.z[0] * p3 - e.z[1] * p1 + j,
            h: hamiltonian(&model.plus, &model.minus),
            f_p,
            f_j,
            omega,
            phi_residual,
            n_plus,
            n_minus,
        })
    }

    /// Off-shell configurations have `F_J = 0` and no `Omega`.
    pub fn is_off_shell(&self) -> bool {
        self.omega.is_none()
    }

    /// `|Phi| / (|P|^2 + |gamma J Omega|)`.
    pub fn relative_residual(&self, gamma: f64) -> Option<f64> {
        let phi = self.phi_residual?;
        let p2 = self.p1 * self.p1 + self.p3 * self.p3;
        let scale = p2 + (gamma * self.j * self.omega?).abs();
        Some(if scale > 0.0 { phi.abs() / scale } else { phi.abs() })
    }

    pub fn to_json(&self) -> Result<String> {
        crate::export::to_json(self)
    }
}
