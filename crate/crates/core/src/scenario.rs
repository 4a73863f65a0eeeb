//! JSON scenario files: sources of the two chiral fields, embedding data,
//! grids, requested outputs and tolerance overrides.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "spectra": {
//!     "plus":  { "solitons": [{ "a": 0.5, "c": 1.0 }] },
//!     "minus": { "field_file": "rho_minus.csv" }
//!   },
//!   "externals": { "kappa": 1.0, "beta": 0.0, "Z": [0.0, 0.0], "gamma": 1.0 },
//!   "grid": { "xi0_min": -5.0, "xi0_max": 5.0, "xi0_step": 0.1 },
//!   "outputs": { "dir": "out" },
//!   "tolerances": { "braid": 1e-6 }
//! }
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::braid::Projection;
use crate::cusps::TrackSpec;
use crate::field::{ChiralField, Chirality, ExternalVariables};
use crate::grid::GridSpec;
use crate::scattering::{synth_nsoliton_with, DiscreteSpectrum};
use crate::tol::Tolerances;
use crate::worldsheet::StringModel;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// `lambda = i a` with real norming constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonRecord {
    pub a: f64,
    pub c: f64,
}

/// General eigenvalue with a complex norming constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenRecord {
    pub re: f64,
    pub im: f64,
    pub c: f64,
    #[serde(default)]
    pub c_im: f64,
}

/// Where one chiral field comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Solitons(Vec<SolitonRecord>),
    Eigenvalues(Vec<EigenRecord>),
    /// `xi,rho` CSV, relative to the scenario file
    FieldFile(PathBuf),
}

impl Default for FieldSource {
    fn default() -> Self {
        FieldSource::Solitons(Vec::new())
    }
}

impl FieldSource {
    /// Discrete data, or `None` for a field file.
    pub fn spectrum(&self, chirality: Chirality) -> Result<Option<DiscreteSpectrum>> {
        match self {
            FieldSource::Solitons(s) => {
                let a: Vec<f64> = s.iter().map(|r| r.a).collect();
                let c: Vec<f64> = s.iter().map(|r| r.c).collect();
                DiscreteSpectrum::imaginary(chirality, &a, &c).map(Some)
            }
            FieldSource::Eigenvalues(e) => DiscreteSpectrum::new(
                chirality,
                e.iter().map(|r| Complex64::new(r.re, r.im)).collect(),
                e.iter().map(|r| Complex64::new(r.c, r.c_im)).collect(),
            )
            .map(Some),
            FieldSource::FieldFile(_) => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spectra {
    #[serde(default)]
    pub plus: FieldSource,
    #[serde(default)]
    pub minus: FieldSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// half-width; absent means "wide enough for the spectra"
    #[serde(rename = "L", default)]
    pub half_width: Option<f64>,
    #[serde(rename = "N", default)]
    pub samples: Option<usize>,
    #[serde(default = "default_xi0_min")]
    pub xi0_min: f64,
    #[serde(default = "default_xi0_max")]
    pub xi0_max: f64,
    #[serde(default = "default_xi0_step")]
    pub xi0_step: f64,
    /// `xi1` extent of the exported world-sheet
    #[serde(default = "default_xi1_range")]
    pub xi1_range: [f64; 2],
    #[serde(default = "default_xi1_step")]
    pub xi1_step: f64,
}

fn default_xi0_min() -> f64 {
    -5.0
}
fn default_xi0_max() -> f64 {
    5.0
}
fn default_xi0_step() -> f64 {
    0.1
}
fn default_xi1_range() -> [f64; 2] {
    [-10.0, 10.0]
}
fn default_xi1_step() -> f64 {
    0.05
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            half_width: None,
            samples: None,
            xi0_min: default_xi0_min(),
            xi0_max: default_xi0_max(),
            xi0_step: default_xi0_step(),
            xi1_range: default_xi1_range(),
            xi1_step: default_xi1_step(),
        }
    }
}

/// Lattice `lo, lo + step, ...` up to `hi` (inclusive within rounding).
pub fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

impl GridSection {
    pub fn xi0_lattice(&self) -> Vec<f64> {
        lattice(self.xi0_min, self.xi0_max, self.xi0_step)
    }

    pub fn xi1_lattice(&self) -> Vec<f64> {
        lattice(self.xi1_range[0], self.xi1_range[1], self.xi1_step)
    }

    pub fn track_spec(&self) -> Result<TrackSpec> {
        TrackSpec::new(self.xi0_min, self.xi0_max, self.xi0_step)
    }
}

fn yes() -> bool {
    true
}

/// Requested artifacts; all on by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub fields: bool,
    #[serde(default = "yes")]
    pub spectrum: bool,
    #[serde(default = "yes")]
    pub worldsheet: bool,
    #[serde(default = "yes")]
    pub charges: bool,
    #[serde(default = "yes")]
    pub cusps: bool,
    #[serde(default = "yes")]
    pub braid: bool,
    #[serde(default = "yes")]
    pub svg: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            fields: true,
            spectrum: true,
            worldsheet: true,
            charges: true,
            cusps: true,
            braid: true,
            svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub spectra: Spectra,
    #[serde(default)]
    pub externals: ExternalVariables,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// crossing axis of the braid
    #[serde(default)]
    pub projection: Projection,
    /// directory that relative paths are resolved against
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub kappa: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub z: Option<[f64; 2]>,
    pub half_width: Option<f64>,
    pub samples: Option<usize>,
    pub xi0_min: Option<f64>,
    pub xi0_max: Option<f64>,
    pub xi0_step: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub projection: Option<Projection>,
}

impl Scenario {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let mut s: Scenario =
            serde_json::from_str(text).map_err(|e| Error::parse(origin, e.to_string()))?;
        s.base_dir = origin
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::export::to_json(self)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let e = &mut self.externals;
        e.kappa = o.kappa.unwrap_or(e.kappa);
        e.beta = o.beta.unwrap_or(e.beta);
        e.gamma = o.gamma.unwrap_or(e.gamma);
        e.z = o.z.unwrap_or(e.z);
        let g = &mut self.grid;
        g.half_width = o.half_width.or(g.half_width);
        g.samples = o.samples.or(g.samples);
        g.xi0_min = o.xi0_min.unwrap_or(g.xi0_min);
        g.xi0_max = o.xi0_max.unwrap_or(g.xi0_max);
        g.xi0_step = o.xi0_step.unwrap_or(g.xi0_step);
        self.projection = o.projection.unwrap_or(self.projection);
        if let Some(d) = &o.out_dir {
            self.outputs.dir = d.clone();
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.externals.validate()?;
        self.tolerances.validate()?;
        let g = &self.grid;
        if let Some(l) = g.half_width {
            if !(l.is_finite() && l > 0.0) {
                return bad(format!("grid.L must be positive, got {l}"));
            }
        }
        if let Some(n) = g.samples {
            if n < 8 || !n.is_power_of_two() {
                return bad(format!("grid.N must be a power of two >= 8, got {n}"));
            }
        }
        if !(g.xi0_step.is_finite() && g.xi0_step > 0.0) {
            return bad(format!("grid.xi0_step must be positive, got {}", g.xi0_step));
        }
        if !(g.xi0_min.is_finite() && g.xi0_max.is_finite() && g.xi0_min <= g.xi0_max) {
            return bad(format!(
                "grid.xi0_min = {} exceeds grid.xi0_max = {}",
                g.xi0_min, g.xi0_max
            ));
        }
        if !(g.xi1_step.is_finite() && g.xi1_step > 0.0) {
            return bad(format!("grid.xi1_step must be positive, got {}", g.xi1_step));
        }
        if !(g.xi1_range[0] < g.xi1_range[1]) {
            return bad(format!("grid.xi1_range {:?} is empty", g.xi1_range));
        }
        for (name, src) in [("plus", &self.spectra.plus), ("minus", &self.spectra.minus)] {
            if let FieldSource::FieldFile(p) = src {
                let p = self.resolve(p);
                if !p.is_file() {
                    return bad(format!(
                        "spectra.{name}: field file {} does not exist",
                        p.display()
                    ));
                }
            }
        }
        self.spectra_pair()?;
        Ok(())
    }

    /// Discrete data of both chiralities (`None` for field files).
    pub fn spectra_pair(&self) -> Result<(Option<DiscreteSpectrum>, Option<DiscreteSpectrum>)> {
        Ok((
            self.spectra.plus.spectrum(Chirality::Plus)?,
            self.spectra.minus.spectrum(Chirality::Minus)?,
        ))
    }

    /// Grid for synthesis: explicit `L`/`N`, else the grid of a field file,
    /// else one that covers the spectra.
    pub fn field_grid(&self) -> Result<GridSpec> {
        let g = &self.grid;
        let (sp, sm) = self.spectra_pair()?;
        let base = if let Some(file) = [&self.spectra.plus, &self.spectra.minus]
            .into_iter()
            .find_map(|s| match s {
                FieldSource::FieldFile(p) => Some(p),
                _ => None,
            }) {
            *ChiralField::load_csv(&self.resolve(file), Chirality::Plus, f64::INFINITY)?.grid()
        } else {
            let specs: Vec<&DiscreteSpectrum> = sp.iter().chain(sm.iter()).collect();
            GridSpec::covering(&specs, self.tolerances.decay)
        };
        GridSpec::new(
            g.half_width.unwrap_or(base.half_width),
            g.samples.unwrap_or(base.samples),
        )
    }

    /// Both chiral fields, synthesized or loaded.
    pub fn fields(&self) -> Result<(ChiralField, ChiralField)> {
        let grid = self.field_grid()?;
        let make = |src: &FieldSource, ch: Chirality| -> Result<ChiralField> {
            match src {
                FieldSource::FieldFile(p) => {
                    ChiralField::load_csv(&self.resolve(p), ch, self.tolerances.decay)
                }
                other => {
                    let spec = other.spectrum(ch)?.expect("discrete source");
                    synth_nsoliton_with(&spec, grid, self.tolerances.decay)
                }
            }
        };
        Ok((
            make(&self.spectra.plus, Chirality::Plus)?,
            make(&self.spectra.minus, Chirality::Minus)?,
        ))
    }

    pub fn model(&self) -> Result<StringModel> {
        let (p, m) = self.fields()?;
        Ok(StringModel::new(p, m, self.externals)?.with_tolerances(self.tolerances))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.resolve(&self.outputs.dir).join(name)
    }
}
