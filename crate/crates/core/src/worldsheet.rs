//! World-sheet `X(xi0, xi1)` in `E(1,2)` built from the two chiral fields.
//!
//! Coordinates are `(X0, X1, X3)` with metric `diag(1, -1, -1)`, the string
//! direction at rest is `n(beta) = (sin 2beta, cos 2beta)` and
//!
//! ```text
//!  d+X = (kappa/2)(b0 - n) + kappa de+,    -d-X = (kappa/2)(b0 + n) + kappa de-,
//!  X_j = Z_j - kappa n_j xi1 + kappa [G+_j(xi+) - G-_j(xi-)],
//! ```
//!
//! with `G` the antiderivative of `de` centered between its two limits.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::export::fmt_f64;
use crate::field::{ChiralField, Chirality, ExternalVariables};
use crate::quad::simpson;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Minkowski product in `diag(1, -1, -1)`.
pub fn minkowski(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

/// `de(xi) = sin I [-cos(I +- 2beta), +-sin(I +- 2beta)]` in the `(X1, X3)` plane.
pub fn delta_e(field: &ChiralField, xi: f64, beta: f64) -> [f64; 2] {
    let angle = field.angle_at(xi);
    let (s, c) = angle.sin_cos();
    combine(field.chirality().sign(), s * c, s * s, beta)
}

/// `de` (or its integral) from `sin I cos I` and `sin^2 I` (or their integrals).
fn combine(sign: f64, sc: f64, ss: f64, beta: f64) -> [f64; 2] {
    let (s2, c2) = (2.0 * beta).sin_cos();
    [-sc * c2 + sign * ss * s2, sign * ss * c2 + sc * s2]
}

/// Value of `phi = -2 ln|cos(I+ + I-)|` or a cusp marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Regular(f64),
    Cusp,
}

impl Phi {
    pub fn value(&self) -> Option<f64> {
        match self {
            Phi::Regular(v) => Some(*v),
            Phi::Cusp => None,
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, Phi::Cusp)
    }
}

/// Coefficients of the two fundamental forms in light-cone coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    /// `I = e_coeff dxi+ dxi-`, i.e. `e_coeff = d+X . d-X`
    pub e_coeff: f64,
    /// `II = ii_pp dxi+^2 + 2 ii_pm dxi+ dxi- + ii_mm dxi-^2`
    pub ii_pp: f64,
    pub ii_mm: f64,
    pub ii_pm: f64,
    /// unit normal used for the projection
    pub normal: [f64; 3],
}

impl FundamentalForms {
    /// Gauss curvature `det II / det I`.
    pub fn gauss_curvature(&self) -> f64 {
        let det_ii = self.ii_pp * self.ii_mm - self.ii_pm * self.ii_pm;
        let det_i = -self.e_coeff * self.e_coeff;
        det_ii / det_i
    }
}

/// Rectangle in light-cone coordinates `xi+ in plus`, `xi- in minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightConeWindow {
    pub plus: (f64, f64),
    pub minus: (f64, f64),
}

impl LightConeWindow {
    pub fn new(plus: (f64, f64), minus: (f64, f64)) -> Result<Self> {
        if !(plus.0 < plus.1 && minus.0 < minus.1) {
            return Err(Error::InvalidParameter(format!(
                "empty window {plus:?} x {minus:?}"
            )));
        }
        Ok(Self { plus, minus })
    }
}

/// The pair of fields with the embedding data: everything the world-sheet
/// depends on.
#[derive(Debug, Clone)]
pub struct StringModel {
    pub plus: ChiralField,
    pub minus: ChiralField,
    pub externals: ExternalVariables,
    pub tolerances: Tolerances,
}

impl StringModel {
    pub fn new(plus: ChiralField, minus: ChiralField, externals: ExternalVariables) -> Result<Self> {
        if plus.chirality() != Chirality::Plus || minus.chirality() != Chirality::Minus {
            return Err(Error::InvalidParameter(
                "fields must be given in (+, -) order".into(),
            ));
        }
        if !plus.grid().same_as(minus.grid()) {
            return Err(Error::GridMismatch(format!(
                "+ field on {:?}, - field on {:?}",
                plus.grid(),
                minus.grid()
            )));
        }
        externals.validate()?;
        Ok(Self {
            plus,
            minus,
            externals: externals.reduced(),
            tolerances: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    /// Both topological charges; errors unless both fields are quantized.
    pub fn charges(&self) -> Result<(i64, i64)> {
        Ok((
            self.plus.topological_charge_with(self.tolerances.topo)?,
            self.minus.topological_charge_with(self.tolerances.topo)?,
        ))
    }

    /// Model whose fields are the profiles at time `xi0`: its string at
    /// `xi0 = 0` is the spatial curve of this one at `xi0`.
    pub fn evolved(&self, xi0: f64) -> Result<Self> {
        Ok(Self {
            plus: self.plus.evolve_with(xi0, self.tolerances.decay)?,
            minus: self.minus.evolve_with(xi0, self.tolerances.decay)?,
            externals: self.externals,
            tolerances: self.tolerances,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.externals.kappa
    }

    /// `theta = I+(xi1 + xi0) + I-(xi1 - xi0)`.
    pub fn theta(&self, xi0: f64, xi1: f64) -> f64 {
        self.plus.angle_at(xi1 + xi0) + self.minus.angle_at(xi1 - xi0)
    }

    /// `theta` as a function of the light-cone coordinates.
    pub fn theta_lc(&self, xp: f64, xm: f64) -> f64 {
        self.plus.angle_at(xp) + self.minus.angle_at(xm)
    }

    pub fn rho_pm(&self, xi0: f64, xi1: f64) -> (f64, f64) {
        (
            self.plus.rho_interp(xi1 + xi0),
            self.minus.rho_interp(xi1 - xi0),
        )
    }

    /// `(d+X, d-X)`.
    pub fn tangents(&self, xi0: f64, xi1: f64) -> ([f64; 3], [f64; 3]) {
        let k = self.kappa();
        let n = self.externals.direction();
        let beta = self.externals.beta;
        let ep = delta_e(&self.plus, xi1 + xi0, beta);
        let em = delta_e(&self.minus, xi1 - xi0, beta);
        (
            [
                0.5 * k,
                -0.5 * k * n[0] + k * ep[0],
                -0.5 * k * n[1] + k * ep[1],
            ],
            [
                -0.5 * k,
                -0.5 * k * n[0] - k * em[0],
                -0.5 * k * n[1] - k * em[1],
            ],
        )
    }

    fn centered(&self, field: &ChiralField, xi: f64) -> [f64; 2] {
        let (sc, ss) = field.sc_ss_at(xi);
        let (tsc, tss) = field.sc_ss_total();
        let sign = field.chirality().sign();
        let beta = self.externals.beta;
        combine(sign, sc - 0.5 * tsc, ss - 0.5 * tss, beta)
    }

    /// Embedding `(X0, X1, X3)`.
    pub fn position(&self, xi0: f64, xi1: f64) -> [f64; 3] {
        let k = self.kappa();
        let n = self.externals.direction();
        let z = self.externals.z;
        let gp = self.centered(&self.plus, xi1 + xi0);
        let gm = self.centered(&self.minus, xi1 - xi0);
        [
            k * xi0,
            z[0] - k * n[0] * xi1 + k * (gp[0] - gm[0]),
            z[1] - k * n[1] * xi1 + k * (gp[1] - gm[1]),
        ]
    }

    /// `phi` or the cusp marker when `|cos theta| < eps_cusp`.
    pub fn phi(&self, xi0: f64, xi1: f64) -> Phi {
        let c = self.theta(xi0, xi1).cos();
        if c.abs() < self.tolerances.cusp {
            Phi::Cusp
        } else {
            Phi::Regular(-2.0 * c.abs().ln())
        }
    }

    fn phi_lc(&self, xp: f64, xm: f64) -> f64 {
        -2.0 * self.theta_lc(xp, xm).cos().abs().ln()
    }

    /// `|d+ d- phi - 2 rho+ rho- e^phi|` with a central mixed difference of
    /// step `delta` in the light-cone coordinates.
    pub fn pde_residual(&self, xi0: f64, xi1: f64, delta: f64) -> Result<f64> {
        let xp = xi1 + xi0;
        let xm = xi1 - xi0;
        for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0), (0.0, 0.0)] {
            let c = self.theta_lc(xp + a * delta, xm + b * delta).cos();
            if c.abs() < self.tolerances.cusp {
                return Err(Error::CuspPoint { xi0, xi1, cos: c });
            }
        }
        let mixed = (self.phi_lc(xp + delta, xm + delta) - self.phi_lc(xp + delta, xm - delta)
            - self.phi_lc(xp - delta, xm + delta)
            + self.phi_lc(xp - delta, xm - delta))
            / (4.0 * delta * delta);
        let rp = self.plus.rho_interp(xp);
        let rm = self.minus.rho_interp(xm);
        let e_phi = 1.0 / self.theta_lc(xp, xm).cos().powi(2);
        Ok((mixed - 2.0 * rp * rm * e_phi).abs())
    }

    /// Fundamental forms at a regular point. The first form comes from `phi`;
    /// the second from 5-point derivatives of the embedding projected on the
    /// Minkowski unit normal, with step `delta` along `xi+` and `xi-`.
    pub fn forms(&self, xi0: f64, xi1: f64, delta: f64) -> Result<FundamentalForms> {
        let theta = self.theta(xi0, xi1);
        let cos = theta.cos();
        if cos.abs() < self.tolerances.cusp {
            return Err(Error::CuspPoint { xi0, xi1, cos });
        }
        let k = self.kappa();
        let e_coeff = -0.5 * k * k * cos * cos;
        // X at (xi+ + i delta, xi- + j delta)
        let at = |i: f64, j: f64| {
            let dp = i * delta;
            let dm = j * delta;
            self.position(xi0 + 0.5 * (dp - dm), xi1 + 0.5 * (dp + dm))
        };
        const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
        const D2: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
        let mut tp = [0.0; 3];
        let mut tm = [0.0; 3];
        let mut xpp = [0.0; 3];
        let mut xmm = [0.0; 3];
        let mut xpm = [0.0; 3];
        for &(o, w) in &D1 {
            let a = at(o, 0.0);
            let b = at(0.0, o);
            for c in 0..3 {
                tp[c] += w * a[c] / (12.0 * delta);
                tm[c] += w * b[c] / (12.0 * delta);
            }
        }
        for &(o, w) in &D2 {
            let a = at(o, 0.0);
            let b = at(0.0, o);
            for c in 0..3 {
                xpp[c] += w * a[c] / (12.0 * delta * delta);
                xmm[c] += w * b[c] / (12.0 * delta * delta);
            }
        }
        for &(oi, wi) in &D1 {
            for &(oj, wj) in &D1 {
                let a = at(oi, oj);
                for c in 0..3 {
                    xpm[c] += wi * wj * a[c] / (144.0 * delta * delta);
                }
            }
        }
        // Minkowski normal: eta applied to the Euclidean cross product
        let cr = [
            tp[1] * tm[2] - tp[2] * tm[1],
            tp[2] * tm[0] - tp[0] * tm[2],
            tp[0] * tm[1] - tp[1] * tm[0],
        ];
        let raw = [cr[0], -cr[1], -cr[2]];
        let norm2 = -minkowski(&raw, &raw);
        if !(norm2 > 0.0) {
            return Err(Error::CuspPoint { xi0, xi1, cos });
        }
        // orientation of the vacuum normal (0, cos 2beta, -sin 2beta); the
        // normalized cross product keeps it across cusps
        let s = -1.0 / norm2.sqrt();
        let normal = [s * raw[0], s * raw[1], s * raw[2]];
        Ok(FundamentalForms {
            e_coeff,
            ii_pp: minkowski(&xpp, &normal),
            ii_mm: minkowski(&xmm, &normal),
            ii_pm: minkowski(&xpm, &normal),
            normal,
        })
    }

    fn window_cusp_check(&self, w: &LightConeWindow, n: usize) -> Result<()> {
        let at = |t: f64, r: (f64, f64)| r.0 + (r.1 - r.0) * t;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            for (xp, xm) in [
                (at(t, w.plus), w.minus.0),
                (at(t, w.plus), w.minus.1),
                (w.plus.0, at(t, w.minus)),
                (w.plus.1, at(t, w.minus)),
            ] {
                if self.theta_lc(xp, xm).cos().abs() < self.tolerances.cusp {
                    return Err(Error::CuspOnBoundary { plus: xp, minus: xm });
                }
            }
        }
        // a sign change of cos theta anywhere inside means a cusp line crosses
        let m = 200;
        let sign0 = self.theta_lc(w.plus.0, w.minus.0).cos().signum();
        for i in 0..=m {
            for j in 0..=m {
                let xp = at(i as f64 / m as f64, w.plus);
                let xm = at(j as f64 / m as f64, w.minus);
                if self.theta_lc(xp, xm).cos().signum() != sign0 {
                    return Err(Error::CuspPoint {
                        xi0: 0.5 * (xp - xm),
                        xi1: 0.5 * (xp + xm),
                        cos: 0.0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Integral curvature `int k dS` of a cusp-free light-cone window. In
    /// light-cone coordinates `k dS = d+ d- phi dxi+ dxi-` (twice that per
    /// unit `dxi0 dxi1`), which reduces to the two `xi-` edges where
    /// `d+ phi = 2 tan(theta) rho+`.
    pub fn integral_curvature(&self, w: &LightConeWindow) -> Result<f64> {
        self.window_cusp_check(w, 2000)?;
        let n = 8001;
        let h = (w.plus.1 - w.plus.0) / (n - 1) as f64;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let xp = w.plus.0 + i as f64 * h;
                let rp = self.plus.rho_interp(xp);
                let top = self.theta_lc(xp, w.minus.1).tan();
                let bottom = self.theta_lc(xp, w.minus.0).tan();
                2.0 * rp * (top - bottom)
            })
            .collect();
        Ok(simpson(&vals, h))
    }

    /// Same window integrated directly: `k dS = 2 rho+ rho- e^phi dxi+ dxi-`
    /// with `k = det II / det I`, by 2D Simpson on `n x n` points.
    pub fn integral_curvature_direct(&self, w: &LightConeWindow, n: usize) -> Result<f64> {
        self.window_cusp_check(w, 2000)?;
        let n = n.max(3);
        let hp = (w.plus.1 - w.plus.0) / (n - 1) as f64;
        let hm = (w.minus.1 - w.minus.0) / (n - 1) as f64;
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xp = w.plus.0 + i as f64 * hp;
                let rp = self.plus.rho_interp(xp);
                let row: Vec<f64> = (0..n)
                    .map(|j| {
                        let xm = w.minus.0 + j as f64 * hm;
                        let c = self.theta_lc(xp, xm).cos();
                        2.0 * rp * self.minus.rho_interp(xm) / (c * c)
                    })
                    .collect();
                simpson(&row, hm)
            })
            .collect();
        Ok(simpson(&rows, hp))
    }

    /// World-sheet on the lattice `xi0 x xi1`; rows are built in parallel.
    pub fn reconstruct(&self, xi0: &[f64], xi1: &[f64]) -> Result<WorldSheet> {
        self.charges()?;
        if xi0.is_empty() || xi1.is_empty() {
            return Err(Error::InvalidParameter("empty world-sheet lattice".into()));
        }
        let rows: Vec<(Vec<[f64; 3]>, Vec<Phi>)> = xi0
            .par_iter()
            .map(|&t| {
                xi1.iter()
                    .map(|&s| (self.position(t, s), self.phi(t, s)))
                    .unzip()
            })
            .collect();
        let mut x = Vec::with_capacity(xi0.len() * xi1.len());
        let mut phi = Vec::with_capacity(xi0.len() * xi1.len());
        for (xr, pr) in rows {
            x.extend(xr);
            phi.extend(pr);
        }
        Ok(WorldSheet {
            xi0: xi0.to_vec(),
            xi1: xi1.to_vec(),
            x,
            phi,
            externals: self.externals,
        })
    }
}

/// Tangent pair at `(xi0, xi1)`.
pub fn tangent(model: &StringModel, xi0: f64, xi1: f64) -> ([f64; 3], [f64; 3]) {
    model.tangents(xi0, xi1)
}

/// Gridded embedding and `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSheet {
    pub xi0: Vec<f64>,
    pub xi1: Vec<f64>,
    /// row-major over `(xi0, xi1)`
    pub x: Vec<[f64; 3]>,
    pub phi: Vec<Phi>,
    pub externals: ExternalVariables,
}

impl WorldSheet {
    pub fn point(&self, i0: usize, i1: usize) -> [f64; 3] {
        self.x[i0 * self.xi1.len() + i1]
    }

    pub fn phi_at(&self, i0: usize, i1: usize) -> Phi {
        self.phi[i0 * self.xi1.len() + i1]
    }

    pub fn row(&self, i0: usize) -> &[[f64; 3]] {
        let n = self.xi1.len();
        &self.x[i0 * n..(i0 + 1) * n]
    }

    pub fn cusp_count(&self) -> usize {
        self.phi.iter().filter(|p| p.is_cusp()).count()
    }

    /// `xi0,xi1,X0,X1,X3,phi_or_CUSP`
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "xi0,xi1,X0,X1,X3,phi_or_CUSP")?;
        for (i0, t) in self.xi0.iter().enumerate() {
            for (i1, s) in self.xi1.iter().enumerate() {
                let p = self.point(i0, i1);
                let phi = match self.phi_at(i0, i1) {
                    Phi::Regular(v) => fmt_f64(v),
                    Phi::Cusp => "CUSP".to_string(),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_f64(*t),
                    fmt_f64(*s),
                    fmt_f64(p[0]),
                    fmt_f64(p[1]),
                    fmt_f64(p[2]),
                    phi
                )?;
            }
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::export::write_file(path, |w| self.write_csv(w))
    }

    /// SVG of the string curves at the given rows, `X1` to the right and
    /// `X3` up; cusp-marked nodes are drawn as dots.
    pub fn svg_snapshot(&self, rows: &[usize]) -> String {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for &r in rows {
            for p in self.row(r) {
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k + 1]);
                    hi[k] = hi[k].max(p[k + 1]);
                }
            }
        }
        if !lo[0].is_finite() {
            lo = [-1.0, -1.0];
            hi = [1.0, 1.0];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let size = 800.0;
        let margin = 20.0;
        let sx = |x: f64| margin + (x - lo[0]) / span * (size - 2.0 * margin);
        let sy = |y: f64| size - margin - (y - lo[1]) / span * (size - 2.0 * margin);
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
        for (k, &r) in rows.iter().enumerate() {
            let pts: Vec<String> = self
                .row(r)
                .iter()
                .map(|p| format!("{:.3},{:.3}", sx(p[1]), sy(p[2])))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"><title>xi0 = {}</title></polyline>\n",
                palette[k % palette.len()],
                pts.join(" "),
                fmt_f64(self.xi0[r])
            ));
            for (i1, p) in self.row(r).iter().enumerate() {
                if self.phi_at(r, i1).is_cusp() {
                    out.push_str(&format!(
                        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"black\"/>\n",
                        sx(p[1]),
                        sy(p[2])
                    ));
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// One row of a world-sheet CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetRow {
    pub xi0: f64,
    pub xi1: f64,
    pub x: [f64; 3],
    pub phi: Phi,
}

pub fn read_worldsheet_csv(r: impl BufRead) -> std::result::Result<Vec<SheetRow>, String> {
    let rows = crate::export::read_csv(r, &["xi0", "xi1", "X0", "X1", "X3", "phi_or_CUSP"])?;
    rows.into_iter()
        .enumerate()
        .map(|(n, cells)| {
            let num = |k: usize| {
                cells[k]
                    .parse::<f64>()
                    .map_err(|e| format!("line {}: column {}: {e}", n + 2, k + 1))
            };
            let phi = if cells[5] == "CUSP" {
                Phi::Cusp
            } else {
                Phi::Regular(num(5)?)
            };
            Ok(SheetRow {
                xi0: num(0)?,
                xi1: num(1)?,
                x: [num(2)?, num(3)?, num(4)?],
                phi,
            })
        })
        .collect()
}
