//! Scenario-driven stages: synth, spectrum, worldsheet, charges, cusps and
//! braid. Every artifact is written with pinned float formatting and a fixed
//! ordering, so identical scenarios give identical bytes.

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::braid::{braid_svg, braid_word, tangle};
use crate::charges::ChargeSet;
use crate::cusps::{track, CuspTrack};
use crate::export::{to_json, write_string};
use crate::scattering::{find_eigenvalues, lambda_grid, monodromy, DiscreteSpectrum, SearchSpec};
use crate::scenario::Scenario;
use crate::worldsheet::StringModel;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Scenario,
    Synth,
    Spectrum,
    Worldsheet,
    Charges,
    Cusps,
    Braid,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Scenario => "scenario",
            Stage::Synth => "synth",
            Stage::Spectrum => "spectrum",
            Stage::Worldsheet => "worldsheet",
            Stage::Charges => "charges",
            Stage::Cusps => "cusps",
            Stage::Braid => "braid",
        };
        f.write_str(s)
    }
}

/// Module error tagged with the stage it came from.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

#[derive(Serialize)]
struct StageRecord<'a> {
    stage: Stage,
    kind: &'a str,
    message: String,
}

impl StageError {
    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.source.is_validation() {
            2
        } else {
            3
        }
    }

    /// One-line `{"stage", "kind", "message"}`.
    pub fn to_json(&self) -> String {
        let kind = if self.source.is_validation() {
            "validation"
        } else {
            "numerical"
        };
        serde_json::to_string(&StageRecord {
            stage: self.stage,
            kind,
            message: self.source.to_string(),
        })
        .unwrap_or_default()
    }
}

pub type StageResult<T> = std::result::Result<T, StageError>;

trait Tagged<T> {
    fn at(self, stage: Stage) -> StageResult<T>;
}

impl<T> Tagged<T> for crate::Result<T> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|source| StageError { stage, source })
    }
}

/// Paths written by a run, in write order.
pub type Written = Vec<PathBuf>;

#[derive(Serialize)]
struct SynthSummary {
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    samples: usize,
    n_plus: i64,
    n_minus: i64,
    total_plus: f64,
    total_minus: f64,
}

#[derive(Serialize)]
struct SheetSummary {
    rows: usize,
    cols: usize,
    cusp_nodes: usize,
}

/// Validates the scenario and builds the string model.
pub fn prepare(scenario: &Scenario) -> StageResult<StringModel> {
    scenario.validate().at(Stage::Scenario)?;
    let dir = scenario.out_path("");
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })
        .at(Stage::Scenario)?;
    scenario.model().at(Stage::Synth)
}

fn write_synth(s: &Scenario, model: &StringModel, out: &mut Written) -> StageResult<()> {
    let (n_plus, n_minus) = model.charges().at(Stage::Synth)?;
    for (f, name) in [(&model.plus, "field_plus.csv"), (&model.minus, "field_minus.csv")] {
        let p = s.out_path(name);
        f.save_csv(&p).at(Stage::Synth)?;
        out.push(p);
    }
    let g = model.plus.grid();
    let summary = SynthSummary {
        half_width: g.half_width,
        samples: g.samples,
        n_plus,
        n_minus,
        total_plus: model.plus.total_angle(),
        total_minus: model.minus.total_angle(),
    };
    let p = s.out_path("synth.json");
    write_string(&p, &to_json(&summary).at(Stage::Synth)?).at(Stage::Synth)?;
    out.push(p);
    Ok(())
}

/// Search window wide enough for the scenario's own eigenvalues.
fn search_for(spec: Option<&DiscreteSpectrum>) -> SearchSpec {
    let mut search = SearchSpec::default();
    if let Some(spec) = spec {
        let re = spec.eigenvalues().iter().map(|l| l.re.abs()).fold(0.0, f64::max);
        if re > 0.0 {
            search.pairs_re_max = Some(re + 1.0);
        }
    }
    search
}

fn write_spectrum(s: &Scenario, model: &StringModel, out: &mut Written) -> StageResult<()> {
    let (sp, sm) = s.spectra_pair().at(Stage::Spectrum)?;
    let mut records = Vec::new();
    for (field, given, name) in [
        (&model.plus, sp.as_ref(), "plus"),
        (&model.minus, sm.as_ref(), "minus"),
    ] {
        let found = find_eigenvalues(field, &search_for(given)).at(Stage::Spectrum)?;
        records.extend(found.records());
        let m = monodromy(field, &lambda_grid(-5.0, 5.0, 201)).at(Stage::Spectrum)?;
        let p = s.out_path(&format!("monodromy_{name}.csv"));
        m.save_csv(&p).at(Stage::Spectrum)?;
        out.push(p);
    }
    let p = s.out_path("spectrum.json");
    write_string(&p, &to_json(&records).at(Stage::Spectrum)?).at(Stage::Spectrum)?;
    out.push(p);
    Ok(())
}

fn write_worldsheet(s: &Scenario, model: &StringModel, out: &mut Written) -> StageResult<()> {
    let st = Stage::Worldsheet;
    let xi0 = s.grid.xi0_lattice();
    let xi1 = s.grid.xi1_lattice();
    let ws = model.reconstruct(&xi0, &xi1).at(st)?;
    let p = s.out_path("worldsheet.csv");
    ws.save_csv(&p).at(st)?;
    out.push(p);
    let summary = SheetSummary {
        rows: xi0.len(),
        cols: xi1.len(),
        cusp_nodes: ws.cusp_count(),
    };
    let p = s.out_path("worldsheet.json");
    write_string(&p, &to_json(&summary).at(st)?).at(st)?;
    out.push(p);
    if s.outputs.svg {
        let mut rows = vec![0, xi0.len() / 2, xi0.len() - 1];
        rows.dedup();
        let p = s.out_path("worldsheet.svg");
        write_string(&p, &ws.svg_snapshot(&rows)).at(st)?;
        out.push(p);
    }
    Ok(())
}

fn write_charges(s: &Scenario, model: &StringModel, out: &mut Written) -> StageResult<()> {
    let c = ChargeSet::compute(model).at(Stage::Charges)?;
    let p = s.out_path("charges.json");
    write_string(&p, &c.to_json().at(Stage::Charges)?).at(Stage::Charges)?;
    out.push(p);
    Ok(())
}

fn compute_track(s: &Scenario, model: &StringModel) -> StageResult<CuspTrack> {
    let spec = s.grid.track_spec().at(Stage::Scenario)?;
    track(model, &spec).at(Stage::Cusps)
}

fn write_cusps(s: &Scenario, t: &CuspTrack, out: &mut Written) -> StageResult<()> {
    let p = s.out_path("cusps.csv");
    t.save_csv(&p).at(Stage::Cusps)?;
    out.push(p);
    let p = s.out_path("events.json");
    write_string(&p, &t.events_json().at(Stage::Cusps)?).at(Stage::Cusps)?;
    out.push(p);
    Ok(())
}

/// `braid.json` without events, `tangle.json` with them.
fn write_braid(s: &Scenario, t: &CuspTrack, out: &mut Written) -> StageResult<()> {
    let st = Stage::Braid;
    let (name, text) = if t.has_events() {
        let tg = tangle(t, s.projection, s.tolerances.braid).at(st)?;
        ("tangle.json", tg.to_json().at(st)?)
    } else {
        let w = braid_word(t, s.projection, s.tolerances.braid).at(st)?;
        ("braid.json", w.to_json().at(st)?)
    };
    let p = s.out_path(name);
    write_string(&p, &text).at(st)?;
    out.push(p);
    if s.outputs.svg {
        let p = s.out_path("braid.svg");
        write_string(&p, &braid_svg(t, s.projection)).at(st)?;
        out.push(p);
    }
    Ok(())
}

pub fn run_synth(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let mut out = Vec::new();
    write_synth(s, &model, &mut out)?;
    Ok(out)
}

pub fn run_spectrum(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let mut out = Vec::new();
    write_spectrum(s, &model, &mut out)?;
    Ok(out)
}

pub fn run_worldsheet(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let mut out = Vec::new();
    write_worldsheet(s, &model, &mut out)?;
    Ok(out)
}

pub fn run_charges(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let mut out = Vec::new();
    write_charges(s, &model, &mut out)?;
    Ok(out)
}

pub fn run_cusps(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let t = compute_track(s, &model)?;
    let mut out = Vec::new();
    write_cusps(s, &t, &mut out)?;
    Ok(out)
}

pub fn run_braid(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let t = compute_track(s, &model)?;
    let mut out = Vec::new();
    write_braid(s, &t, &mut out)?;
    Ok(out)
}

/// Every stage enabled in `outputs`, sharing the model and the cusp track.
pub fn run_pipeline(s: &Scenario) -> StageResult<Written> {
    let model = prepare(s)?;
    let o = &s.outputs;
    let mut out = Vec::new();
    if o.fields {
        write_synth(s, &model, &mut out)?;
    }
    if o.spectrum {
        write_spectrum(s, &model, &mut out)?;
    }
    if o.worldsheet {
        write_worldsheet(s, &model, &mut out)?;
    }
    if o.charges {
        write_charges(s, &model, &mut out)?;
    }
    if o.cusps || o.braid {
        let t = compute_track(s, &model)?;
        if o.cusps {
            write_cusps(s, &t, &mut out)?;
        }
        if o.braid {
            write_braid(s, &t, &mut out)?;
        }
    }
    Ok(out)
}
