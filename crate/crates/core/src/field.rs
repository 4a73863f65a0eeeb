//! Chiral fields `rho(xi)`, their angles `I(xi)` and chiral translation.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::quad::{GL4_NODES, GL4_WEIGHTS};
use crate::scattering::ReflectionlessProfile;
use crate::spline::CubicSpline;
use crate::tol;
use crate::{Error, Result};

/// Which light-cone coordinate a field depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chirality {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Chirality::Plus => Chirality::Minus,
            Chirality::Minus => Chirality::Plus,
        }
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chirality::Plus => "+",
            Chirality::Minus => "-",
        })
    }
}

/// Closed-form 1-soliton `rho = -2a sgn(c) sech(2a xi + ln|c|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Soliton {
    pub a: f64,
    pub c: f64,
}

impl Soliton {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "soliton a must be positive, got {a}"
            )));
        }
        if !(c.is_finite() && c != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "soliton c must be nonzero, got {c}"
            )));
        }
        Ok(Self { a, c })
    }

    pub fn rho(&self, xi: f64) -> f64 {
        let arg = 2.0 * self.a * xi + self.c.abs().ln();
        -2.0 * self.a * self.c.signum() / arg.cosh()
    }

    /// `I(xi) = -2 arctan(c e^{2a xi})`, zero at `-inf`.
    pub fn angle(&self, xi: f64) -> f64 {
        -2.0 * (self.c * (2.0 * self.a * xi).exp()).atan()
    }

    /// Profile translated so that the new field at `xi` equals the old one at `xi + shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            a: self.a,
            c: self.c * (2.0 * self.a * shift).exp(),
        }
    }
}

/// Field sampled on a uniform grid and interpolated by a natural cubic spline.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    spline: CubicSpline,
    spacing: f64,
    origin: f64,
}

impl SampledProfile {
    pub fn samples(&self) -> &[f64] {
        self.spline.values()
    }

    fn eval(&self, xi: f64) -> f64 {
        self.spline.eval(xi)
    }
}

/// How `rho` is evaluated between grid nodes.
#[derive(Debug, Clone)]
pub enum FieldProfile {
    /// Superposition of closed-form solitons (empty list is the vacuum).
    Solitons(Vec<Soliton>),
    /// Exact reflectionless N-soliton.
    Reflectionless(ReflectionlessProfile),
    Sampled(SampledProfile),
}

impl FieldProfile {
    pub fn vacuum() -> Self {
        FieldProfile::Solitons(Vec::new())
    }

    pub fn rho(&self, xi: f64) -> f64 {
        match self {
            FieldProfile::Solitons(s) => s.iter().map(|s| s.rho(xi)).sum(),
            FieldProfile::Reflectionless(r) => r.rho(xi),
            FieldProfile::Sampled(s) => s.eval(xi),
        }
    }

    fn shifted(&self, shift: f64, grid: &GridSpec) -> FieldProfile {
        match self {
            FieldProfile::Solitons(s) => {
                FieldProfile::Solitons(s.iter().map(|s| s.shifted(shift)).collect())
            }
            FieldProfile::Reflectionless(r) => FieldProfile::Reflectionless(r.shifted(shift)),
            FieldProfile::Sampled(s) => {
                let y: Vec<f64> = (0..grid.samples)
                    .map(|i| s.eval(grid.node(i) + shift))
                    .collect();
                FieldProfile::Sampled(SampledProfile {
                    spline: CubicSpline::new(s.origin, s.spacing, y),
                    spacing: s.spacing,
                    origin: s.origin,
                })
            }
        }
    }
}

/// Per-cell data: monomial coefficients of the cubic through the Gauss
/// samples of `rho` (in the cell coordinate `u` in `[0, 1]`) and the two
/// moments used by the spectral integrator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell {
    pub(crate) poly: [f64; 4],
    /// `int rho` over the cell
    pub(crate) m0: f64,
    /// `int (t - mid) rho` over the cell
    pub(crate) m1: f64,
}

impl Cell {
    /// `int_0^u rho` in units of the cell (multiply by `h`).
    fn partial(&self, u: f64) -> f64 {
        let p = &self.poly;
        u * (p[0] + u * (p[1] / 2.0 + u * (p[2] / 3.0 + u * p[3] / 4.0)))
    }

    fn rho(&self, u: f64) -> f64 {
        let p = &self.poly;
        p[0] + u * (p[1] + u * (p[2] + u * p[3]))
    }
}

/// Inverse Vandermonde of the Gauss nodes: `poly = V^{-1} rho_gauss`.
fn gauss_to_monomial() -> &'static [[f64; 4]; 4] {
    static INV: OnceLock<[[f64; 4]; 4]> = OnceLock::new();
    INV.get_or_init(|| {
        let mut a = [[0.0; 8]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            for m in 0..4 {
                row[m] = GL4_NODES[i].powi(m as i32);
            }
            row[4 + i] = 1.0;
        }
        for k in 0..4 {
            let p = (k..4)
                .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
                .unwrap();
            a.swap(k, p);
            let piv = a[k][k];
            for v in a[k].iter_mut() {
                *v /= piv;
            }
            for r in 0..4 {
                if r != k {
                    let f = a[r][k];
                    let pivot_row = a[k];
                    for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let mut inv = [[0.0; 4]; 4];
        for m in 0..4 {
            for i in 0..4 {
                inv[m][i] = a[m][4 + i];
            }
        }
        inv
    })
}

/// One chirality's potential `rho(xi)` on `[-L, L]` with cached angle
/// `I(xi) = int_{-L}^{xi} rho` and the antiderivatives needed by the
/// world-sheet (`int sin I cos I`, `int sin^2 I`).
#[derive(Debug, Clone)]
pub struct ChiralField {
    chirality: Chirality,
    grid: GridSpec,
    profile: FieldProfile,
    rho: Vec<f64>,
    angle: Vec<f64>,
    cells: Vec<Cell>,
    cum_sc: Vec<f64>,
    cum_ss: Vec<f64>,
}

impl ChiralField {
    /// Builds the caches without checking decay.
    pub fn from_profile(chirality: Chirality, profile: FieldProfile, grid: GridSpec) -> Self {
        let h = grid.spacing();
        let inv = gauss_to_monomial();
        let rho: Vec<f64> = (0..grid.samples)
            .map(|i| profile.rho(grid.node(i)))
            .collect();
        let mut cells = Vec::with_capacity(grid.cells());
        let mut angle = Vec::with_capacity(grid.samples);
        let mut cum_sc = Vec::with_capacity(grid.samples);
        let mut cum_ss = Vec::with_capacity(grid.samples);
        let (mut acc_i, mut acc_sc, mut acc_ss) = (0.0, 0.0, 0.0);
        angle.push(0.0);
        cum_sc.push(0.0);
        cum_ss.push(0.0);
        for k in 0..grid.cells() {
            let x0 = grid.node(k);
            let g: [f64; 4] = std::array::from_fn(|i| profile.rho(x0 + GL4_NODES[i] * h));
            let mut poly = [0.0; 4];
            for (m, p) in poly.iter_mut().enumerate() {
                *p = (0..4).map(|i| inv[m][i] * g[i]).sum();
            }
            let m0 = h * (0..4).map(|i| GL4_WEIGHTS[i] * g[i]).sum::<f64>();
            let m1 = h
                * h
                * (0..4)
                    .map(|i| GL4_WEIGHTS[i] * (GL4_NODES[i] - 0.5) * g[i])
                    .sum::<f64>();
            let cell = Cell { poly, m0, m1 };
            let (sc, ss) = sc_ss_partial(&cell, acc_i, h, 1.0);
            acc_sc += sc;
            acc_ss += ss;
            acc_i += m0;
            cells.push(cell);
            angle.push(acc_i);
            cum_sc.push(acc_sc);
            cum_ss.push(acc_ss);
        }
        Self {
            chirality,
            grid,
            profile,
            rho,
            angle,
            cells,
            cum_sc,
            cum_ss,
        }
    }

    /// Builds the field and checks `|rho(+-L)| < decay_tol`.
    pub fn new(
        chirality: Chirality,
        profile: FieldProfile,
        grid: GridSpec,
        decay_tol: f64,
    ) -> Result<Self> {
        let f = Self::from_profile(chirality, profile, grid);
        f.check_decay(decay_tol)?;
        Ok(f)
    }

    pub fn vacuum(chirality: Chirality, grid: GridSpec) -> Self {
        Self::from_profile(chirality, FieldProfile::vacuum(), grid)
    }

    /// Field from uniformly spaced samples; the grid is inferred from them.
    pub fn from_samples(
        chirality: Chirality,
        xi: &[f64],
        rho: &[f64],
        decay_tol: f64,
    ) -> Result<Self> {
        if xi.len() != rho.len() || xi.len() < 8 {
            return Err(Error::InvalidParameter(format!(
                "need at least 8 matching (xi, rho) samples, got {} and {}",
                xi.len(),
                rho.len()
            )));
        }
        let n = xi.len();
        let lo = xi[0];
        let hi = xi[n - 1];
        if (lo + hi).abs() > 1e-9 * hi.abs().max(1.0) || hi <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "samples must span a symmetric interval [-L, L], got [{lo}, {hi}]"
            )));
        }
        let grid = GridSpec::new(hi, n)?;
        let h = grid.spacing();
        for (i, &x) in xi.iter().enumerate() {
            if (x - grid.node(i)).abs() > 1e-9 * h.max(1.0) + 1e-6 * h {
                return Err(Error::InvalidParameter(format!(
                    "samples are not uniformly spaced (row {i}, xi = {x})"
                )));
            }
        }
        if let Some(bad) = rho.iter().position(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite rho at row {bad}"
            )));
        }
        let profile = FieldProfile::Sampled(SampledProfile {
            spline: CubicSpline::new(-hi, h, rho.to_vec()),
            spacing: h,
            origin: -hi,
        });
        let mut f = Self::from_profile(chirality, profile, grid);
        // the spline interpolates the nodes; keep them bit-exact
        f.rho = rho.to_vec();
        f.check_decay(decay_tol)?;
        Ok(f)
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn profile(&self) -> &FieldProfile {
        &self.profile
    }

    /// `rho` at the grid nodes.
    pub fn samples(&self) -> &[f64] {
        &self.rho
    }

    /// `I` at the grid nodes.
    pub fn angles(&self) -> &[f64] {
        &self.angle
    }

    pub(crate) fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Exact profile value (zero outside the grid).
    pub fn rho_at(&self, xi: f64) -> f64 {
        if !self.grid.contains(xi) {
            return 0.0;
        }
        self.profile.rho(xi)
    }

    fn locate(&self, xi: f64) -> (usize, f64) {
        let k = self.grid.cell_of(xi);
        let u = (xi - self.grid.node(k)) / self.grid.spacing();
        (k, u.clamp(0.0, 1.0))
    }

    /// `rho` from the cached cell interpolant (zero outside the grid).
    pub fn rho_interp(&self, xi: f64) -> f64 {
        if !self.grid.contains(xi) {
            return 0.0;
        }
        let (k, u) = self.locate(xi);
        self.cells[k].rho(u)
    }

    /// `I(xi)`, extended by its end values outside the grid.
    pub fn angle_at(&self, xi: f64) -> f64 {
        if xi <= -self.grid.half_width {
            return 0.0;
        }
        if xi >= self.grid.half_width {
            return self.total_angle();
        }
        let (k, u) = self.locate(xi);
        self.angle[k] + self.grid.spacing() * self.cells[k].partial(u)
    }

    /// `I(xi)`; errors outside `[-L, L]`.
    pub fn integral_i(&self, xi: f64) -> Result<f64> {
        if !self.grid.contains(xi) {
            return Err(Error::OutOfGrid {
                xi,
                lo: -self.grid.half_width,
                hi: self.grid.half_width,
            });
        }
        Ok(self.angle_at(xi))
    }

    pub fn total_angle(&self) -> f64 {
        *self.angle.last().expect("grid has nodes")
    }

    /// `int rho^2` over the grid, exact for the cubic cell interpolant.
    pub fn rho_squared_integral(&self) -> f64 {
        let h = self.grid.spacing();
        self.cells
            .iter()
            .map(|c| {
                GL4_NODES
                    .iter()
                    .zip(GL4_WEIGHTS.iter())
                    .map(|(u, w)| w * c.rho(*u).powi(2))
                    .sum::<f64>()
            })
            .sum::<f64>()
            * h
    }

    /// `(int_{-L}^{xi} sin I cos I, int_{-L}^{xi} sin^2 I)`, extended by
    /// constants outside the grid.
    pub fn sc_ss_at(&self, xi: f64) -> (f64, f64) {
        let n = self.grid.samples - 1;
        if xi <= -self.grid.half_width {
            return (0.0, 0.0);
        }
        if xi >= self.grid.half_width {
            return (self.cum_sc[n], self.cum_ss[n]);
        }
        let (k, u) = self.locate(xi);
        let (sc, ss) = sc_ss_partial(&self.cells[k], self.angle[k], self.grid.spacing(), u);
        (self.cum_sc[k] + sc, self.cum_ss[k] + ss)
    }

    pub fn sc_ss_total(&self) -> (f64, f64) {
        let n = self.grid.samples - 1;
        (self.cum_sc[n], self.cum_ss[n])
    }

    /// Nearest integer to `I(L)/pi` within [`tol::EPS_TOPO`].
    pub fn topological_charge(&self) -> Result<i64> {
        self.topological_charge_with(tol::EPS_TOPO)
    }

    pub fn topological_charge_with(&self, tolerance: f64) -> Result<i64> {
        let total = self.total_angle();
        let q = total / std::f64::consts::PI;
        let n = q.round();
        let distance = (q - n).abs();
        if distance > tolerance {
            return Err(Error::NotQuantized {
                total,
                distance,
                tolerance,
            });
        }
        Ok(n as i64)
    }

    pub fn check_decay(&self, tolerance: f64) -> Result<()> {
        let n = self.rho.len();
        for &i in &[0, n - 1] {
            if self.rho[i].abs() >= tolerance {
                return Err(Error::DecayViolated {
                    xi: self.grid.node(i),
                    value: self.rho[i].abs(),
                    tolerance,
                });
            }
        }
        Ok(())
    }

    /// Profile at time `xi0`: `rho(xi + xi0)` for `+`, `rho(xi - xi0)` for `-`.
    pub fn evolve(&self, xi0: f64) -> Result<Self> {
        self.evolve_with(xi0, tol::EPS_DECAY)
    }

    pub fn evolve_with(&self, xi0: f64, decay_tol: f64) -> Result<Self> {
        if xi0 == 0.0 {
            return Ok(self.clone());
        }
        let shift = self.chirality.sign() * xi0;
        let profile = self.profile.shifted(shift, &self.grid);
        let f = Self::from_profile(self.chirality, profile, self.grid);
        f.check_decay(decay_tol)
            .map_err(|_| Error::SupportEscaped { shift })?;
        Ok(f)
    }

    /// Writes `xi,rho` CSV.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "xi,rho")?;
        for (i, r) in self.rho.iter().enumerate() {
            writeln!(
                out,
                "{},{}",
                crate::export::fmt_f64(self.grid.node(i)),
                crate::export::fmt_f64(*r)
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    /// Reads an `xi,rho` CSV into a sampled field.
    pub fn load_csv(path: &Path, chirality: Chirality, decay_tol: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let (xi, rho) =
            read_field_csv(std::io::BufReader::new(file)).map_err(|m| Error::parse(path, m))?;
        Self::from_samples(chirality, &xi, &rho, decay_tol)
    }
}

/// Parses `xi,rho` rows.
pub fn read_field_csv(r: impl BufRead) -> std::result::Result<(Vec<f64>, Vec<f64>), String> {
    let mut xi = Vec::new();
    let mut rho = Vec::new();
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "xi,rho" => {}
        Some(Ok(h)) => return Err(format!("line 1: expected header `xi,rho`, got `{h}`")),
        Some(Err(e)) => return Err(e.to_string()),
        None => return Err("empty file".into()),
    }
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |name: &str| -> std::result::Result<f64, String> {
            parts
                .next()
                .ok_or_else(|| format!("line {}: missing {name}", n + 2))?
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: {name}: {e}", n + 2))
        };
        xi.push(next("xi")?);
        rho.push(next("rho")?);
    }
    Ok((xi, rho))
}

/// Integrals of `sin I cos I` and `sin^2 I` over `[0, u]` of a cell whose
/// left node has angle `i0`.
fn sc_ss_partial(cell: &Cell, i0: f64, h: f64, u: f64) -> (f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    let mut sc = 0.0;
    let mut ss = 0.0;
    for (t, w) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
        let angle = i0 + h * cell.partial(t * u);
        let (s, c) = angle.sin_cos();
        sc += w * s * c;
        ss += w * s * s;
    }
    (sc * h * u, ss * h * u)
}

/// Closed-form 1-soliton field on `grid`; errors if it does not decay.
pub fn soliton_field(a: f64, c: f64, chirality: Chirality, grid: GridSpec) -> Result<ChiralField> {
    let s = Soliton::new(a, c)?;
    ChiralField::new(
        chirality,
        FieldProfile::Solitons(vec![s]),
        grid,
        tol::EPS_DECAY,
    )
}

/// Embedding data `kappa`, `beta`, `Z = (Z1, Z3)` and tension `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalVariables {
    pub kappa: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default, rename = "Z")]
    pub z: [f64; 2],
    #[serde(default = "unit")]
    pub gamma: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for ExternalVariables {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            beta: 0.0,
            z: [0.0, 0.0],
            gamma: 1.0,
        }
    }
}

impl ExternalVariables {
    pub fn new(kappa: f64, beta: f64, z: [f64; 2], gamma: f64) -> Result<Self> {
        let e = Self {
            kappa,
            beta,
            z,
            gamma,
        };
        e.validate()?;
        Ok(e.reduced())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !self.beta.is_finite() || !self.z.iter().all(|z| z.is_finite()) {
            return Err(Error::InvalidParameter("beta and Z must be finite".into()));
        }
        Ok(())
    }

    /// Copy with `beta` reduced to `[0, pi)`.
    pub fn reduced(mut self) -> Self {
        self.beta = self.beta.rem_euclid(std::f64::consts::PI);
        self
    }

    /// `n(beta) = (sin 2beta, cos 2beta)` in the `(X1, X3)` plane.
    pub fn direction(&self) -> [f64; 2] {
        let (s, c) = (2.0 * self.beta).sin_cos();
        [s, c]
    }
}
