//! Cusps: zeros of `cos theta`, `theta = I+(xi1 + xi0) + I-(xi1 - xi0)`,
//! on each time slice, and their continuation into world-lines.
//!
//! A cusp on branch `k` sits where `theta = pi/2 + pi k`. Along a line `k`
//! never changes; lines of one branch keep their `xi1` order because two of
//! them can only meet at a tangency, where they annihilate.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::export::fmt_f64;
use crate::worldsheet::StringModel;
use crate::{Error, Result};

use std::f64::consts::{FRAC_PI_2, PI};

/// One root of `cos theta` on a slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspPoint {
    pub xi1: f64,
    pub branch_k: i64,
    /// `(X0, X1, X3)`
    pub x: [f64; 3],
}

/// `k` with `theta = pi/2 + pi k`.
pub fn branch_of(theta: f64) -> i64 {
    ((theta - FRAC_PI_2) / PI).round() as i64
}

/// `xi1` range on which both light-cone arguments stay on the grid.
fn slice_range(model: &StringModel, xi0: f64) -> Option<(f64, f64)> {
    let l = model.plus.grid().half_width;
    let lo = -l + xi0.abs();
    let hi = l - xi0.abs();
    (hi > lo).then_some((lo, hi))
}

/// Roots of one slice plus a flag for roots found in an edge interval.
struct Scan {
    roots: Vec<CuspPoint>,
    edge: Vec<CuspPoint>,
}

fn scan(model: &StringModel, xi0: f64) -> Scan {
    let mut out = Scan {
        roots: Vec::new(),
        edge: Vec::new(),
    };
    let Some((lo, hi)) = slice_range(model, xi0) else {
        return out;
    };
    let h = model.plus.grid().spacing();
    let n = ((hi - lo) / h).ceil().max(2.0) as usize;
    let step = (hi - lo) / n as f64;
    let f = |s: f64| model.theta(xi0, s).cos();
    let tol = model.tolerances.root;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = if i == n { hi } else { lo + i as f64 * step };
        let fb = f(b);
        if fa == 0.0 || fa * fb < 0.0 {
            let s = refine(model, xi0, a, b, fa, tol);
            let p = CuspPoint {
                xi1: s,
                branch_k: branch_of(model.theta(xi0, s)),
                x: model.position(xi0, s),
            };
            if i == 1 || i == n {
                out.edge.push(p);
            } else {
                out.roots.push(p);
            }
        }
        a = b;
        fa = fb;
    }
    out
}

/// Bisection of `cos theta` on `[a, b]` to `tol`, then one Newton polish
/// kept only if it stays in the final bracket.
fn refine(model: &StringModel, xi0: f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    if fa == 0.0 {
        return a;
    }
    let f = |s: f64| model.theta(xi0, s).cos();
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let m = 0.5 * (a + b);
    let theta = model.theta(xi0, m);
    let (rp, rm) = model.rho_pm(xi0, m);
    let slope = -theta.sin() * (rp + rm);
    if slope != 0.0 {
        let next = m - theta.cos() / slope;
        if next >= a && next <= b {
            return next;
        }
    }
    m
}

/// All cusps of the slice `xi0`, ordered in `xi1`.
pub fn cusp_positions(model: &StringModel, xi0: f64) -> Result<Vec<CuspPoint>> {
    model.charges()?;
    let s = scan(model, xi0);
    if let Some(p) = s.edge.first() {
        return Err(Error::RootAtEdge { xi0, xi1: p.xi1 });
    }
    Ok(s.roots)
}

/// Smallest `|cos theta|` at an interior local minimum without a sign change
/// on the slice; below `10 eps_cusp` it flags a near tangency.
pub fn tangency_gap(model: &StringModel, xi0: f64) -> Option<(f64, f64)> {
    let (lo, hi) = slice_range(model, xi0)?;
    let h = model.plus.grid().spacing();
    let n = ((hi - lo) / h).ceil() as usize;
    let v: Vec<f64> = (0..=n)
        .map(|i| model.theta(xi0, lo + (hi - lo) * i as f64 / n as f64).cos())
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for i in 1..n {
        let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
        if b.abs() <= a.abs() && b.abs() <= c.abs() && a * b > 0.0 && b * c > 0.0 {
            let xi1 = lo + (hi - lo) * i as f64 / n as f64;
            if best.map_or(true, |(_, g)| b.abs() < g) {
                best = Some((xi1, b.abs()));
            }
        }
    }
    best
}

/// One accepted point of a world-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspSample {
    pub xi0: f64,
    pub xi1: f64,
    pub x: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspLine {
    pub id: usize,
    pub branch_k: i64,
    pub points: Vec<CuspSample>,
}

impl CuspLine {
    pub fn start(&self) -> f64 {
        self.points[0].xi0
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1].xi0
    }

    /// Point at `xi0` by linear interpolation between samples.
    pub fn at(&self, xi0: f64) -> Option<CuspSample> {
        let k = self.points.partition_point(|p| p.xi0 < xi0);
        if k < self.points.len() && self.points[k].xi0 == xi0 {
            return Some(self.points[k]);
        }
        if k == 0 || k == self.points.len() {
            return None;
        }
        let (a, b) = (self.points[k - 1], self.points[k]);
        let t = (xi0 - a.xi0) / (b.xi0 - a.xi0);
        let lerp = |u: f64, v: f64| u + t * (v - u);
        Some(CuspSample {
            xi0,
            xi1: lerp(a.xi1, b.xi1),
            x: [
                lerp(a.x[0], b.x[0]),
                lerp(a.x[1], b.x[1]),
                lerp(a.x[2], b.x[2]),
            ],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Birth,
    Death,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCause {
    Tangency,
    GridExit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspEvent {
    #[serde(rename = "type")]
    pub kind: EventKind,
    pub xi0: f64,
    pub line_ids: Vec<usize>,
    pub cause: EventCause,
}

/// Continuation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSpec {
    pub xi0_min: f64,
    pub xi0_max: f64,
    pub step: f64,
    /// smallest step used to localize events, as a fraction of `step`
    pub min_fraction: f64,
}

impl TrackSpec {
    pub fn new(xi0_min: f64, xi0_max: f64, step: f64) -> Result<Self> {
        if !(xi0_min.is_finite() && xi0_max.is_finite() && xi0_max >= xi0_min) {
            return Err(Error::InvalidParameter(format!(
                "bad xi0 range [{xi0_min}, {xi0_max}]"
            )));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "xi0 step must be positive, got {step}"
            )));
        }
        Ok(Self {
            xi0_min,
            xi0_max,
            step,
            min_fraction: 1.0 / 256.0,
        })
    }

    fn base_slices(&self) -> Vec<f64> {
        let n = ((self.xi0_max - self.xi0_min) / self.step - 1e-9).ceil().max(0.0) as usize;
        let mut t: Vec<f64> = (0..n)
            .map(|i| self.xi0_min + i as f64 * self.step)
            .collect();
        t.push(self.xi0_max);
        t
    }
}

/// Tracked world-lines with their events and the per-slice cusp counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspTrack {
    pub lines: Vec<CuspLine>,
    pub events: Vec<CuspEvent>,
    /// `(xi0, number of cusps)` at every accepted slice
    pub counts: Vec<(f64, usize)>,
}

impl CuspTrack {
    pub fn count_is_constant(&self) -> bool {
        self.counts.windows(2).all(|w| w[0].1 == w[1].1)
    }

    pub fn has_events(&self) -> bool {
        !self.events.is_empty()
    }

    /// Largest `|theta - (pi/2 + pi k)|` over every accepted point.
    pub fn branch_deviation(&self, model: &StringModel) -> f64 {
        self.lines
            .iter()
            .flat_map(|l| {
                l.points.iter().map(move |p| {
                    (model.theta(p.xi0, p.xi1) - (FRAC_PI_2 + PI * l.branch_k as f64)).abs()
                })
            })
            .fold(0.0, f64::max)
    }

    /// `line_id,branch_k,xi0,xi1,X0,X1,X3`
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "line_id,branch_k,xi0,xi1,X0,X1,X3")?;
        for l in &self.lines {
            for p in &l.points {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    l.id,
                    l.branch_k,
                    fmt_f64(p.xi0),
                    fmt_f64(p.xi1),
                    fmt_f64(p.x[0]),
                    fmt_f64(p.x[1]),
                    fmt_f64(p.x[2])
                )?;
            }
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::export::write_file(path, |w| self.write_csv(w))
    }

    pub fn events_json(&self) -> Result<String> {
        crate::export::to_json(&self.events)
    }
}

/// Lines from a cusp CSV (events are not part of it).
pub fn read_cusp_csv(r: impl BufRead) -> std::result::Result<Vec<CuspLine>, String> {
    let rows = crate::export::read_csv(r, &["line_id", "branch_k", "xi0", "xi1", "X0", "X1", "X3"])?;
    let mut lines: Vec<CuspLine> = Vec::new();
    for (n, cells) in rows.iter().enumerate() {
        let err = |k: usize, e: String| format!("line {}: column {}: {e}", n + 2, k + 1);
        let id: usize = cells[0].parse().map_err(|e: std::num::ParseIntError| err(0, e.to_string()))?;
        let k: i64 = cells[1].parse().map_err(|e: std::num::ParseIntError| err(1, e.to_string()))?;
        let mut v = [0.0; 5];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = cells[j + 2]
                .parse()
                .map_err(|e: std::num::ParseFloatError| err(j + 2, e.to_string()))?;
        }
        let sample = CuspSample {
            xi0: v[0],
            xi1: v[1],
            x: [v[2], v[3], v[4]],
        };
        match lines.last_mut() {
            Some(l) if l.id == id => l.points.push(sample),
            _ => lines.push(CuspLine {
                id,
                branch_k: k,
                points: vec![sample],
            }),
        }
    }
    Ok(lines)
}

/// Outcome of matching one slice to the next.
enum Step {
    /// `next[i]` continues the active line `assign[i]`, if any
    Matched(Vec<Option<usize>>),
    Refine,
}

struct Tracker<'a> {
    model: &'a StringModel,
    lines: Vec<CuspLine>,
    events: Vec<CuspEvent>,
    counts: Vec<(f64, usize)>,
    /// indices into `lines`, one per root of the current slice
    active: Vec<usize>,
    current: Vec<CuspPoint>,
    xi0: f64,
}

impl<'a> Tracker<'a> {
    fn new(model: &'a StringModel, xi0: f64, first: Scan) -> Self {
        let mut t = Self {
            model,
            lines: Vec::new(),
            events: Vec::new(),
            counts: vec![(xi0, first.roots.len())],
            active: Vec::new(),
            current: first.roots.clone(),
            xi0,
        };
        for p in &first.roots {
            let id = t.lines.len();
            t.lines.push(CuspLine {
                id,
                branch_k: p.branch_k,
                points: vec![CuspSample {
                    xi0,
                    xi1: p.xi1,
                    x: p.x,
                }],
            });
            t.active.push(id);
        }
        t
    }

    /// Predicted `xi1` of each current root after `dt`: `theta` constant along
    /// the line gives `dxi1/dxi0 = -(rho+ - rho-)/(rho+ + rho-)`.
    fn speed(&self, p: &CuspPoint) -> f64 {
        let (rp, rm) = self.model.rho_pm(self.xi0, p.xi1);
        let s = rp + rm;
        if s.abs() < 1e-300 {
            0.0
        } else {
            -(rp - rm) / s
        }
    }

    fn try_match(&self, next: &Scan, dt: f64, finest: bool) -> Step {
        let h = self.model.plus.grid().spacing();
        let mut assign = vec![None; next.roots.len()];
        let mut branches: Vec<i64> = self
            .current
            .iter()
            .chain(next.roots.iter())
            .map(|p| p.branch_k)
            .collect();
        branches.sort_unstable();
        branches.dedup();
        let mut clean = next.edge.is_empty();
        for k in branches {
            let old: Vec<usize> = (0..self.current.len())
                .filter(|&i| self.current[i].branch_k == k)
                .collect();
            let new: Vec<usize> = (0..next.roots.len())
                .filter(|&i| next.roots[i].branch_k == k)
                .collect();
            let predicted: Vec<f64> = old
                .iter()
                .map(|&i| self.current[i].xi1 + self.speed(&self.current[i]) * dt)
                .collect();
            if old.len() == new.len() {
                let mut ok = true;
                for (j, (&o, &n)) in old.iter().zip(&new).enumerate() {
                    let v = self.speed(&self.current[o]);
                    let radius = 3.0 * (v * dt).abs() + 4.0 * h + 0.5 * dt;
                    if (next.roots[n].xi1 - predicted[j]).abs() > radius {
                        ok = false;
                    }
                    assign[n] = Some(o);
                }
                if !ok && !finest {
                    return Step::Refine;
                }
            } else {
                clean = false;
                if !finest {
                    return Step::Refine;
                }
                // greedy nearest pairs between prediction and new roots
                let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
                for (j, &o) in old.iter().enumerate() {
                    for &n in &new {
                        pairs.push(((next.roots[n].xi1 - predicted[j]).abs(), o, n));
                    }
                }
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut used_old = vec![false; self.current.len()];
                let mut used_new = vec![false; next.roots.len()];
                for (_, o, n) in pairs {
                    if !used_old[o] && !used_new[n] {
                        used_old[o] = true;
                        used_new[n] = true;
                        assign[n] = Some(o);
                    }
                }
            }
        }
        if !clean && !finest {
            return Step::Refine;
        }
        Step::Matched(assign)
    }

    fn accept(&mut self, xi0: f64, next: Scan, assign: Vec<Option<usize>>) {
        let mid = 0.5 * (self.xi0 + xi0);
        let mut continued = vec![false; self.current.len()];
        let mut active = Vec::with_capacity(next.roots.len());
        let mut born: Vec<(i64, usize)> = Vec::new();
        for (n, p) in next.roots.iter().enumerate() {
            let sample = CuspSample {
                xi0,
                xi1: p.xi1,
                x: p.x,
            };
            match assign[n] {
                Some(o) => {
                    continued[o] = true;
                    let id = self.active[o];
                    self.lines[id].points.push(sample);
                    active.push(id);
                }
                None => {
                    let id = self.lines.len();
                    self.lines.push(CuspLine {
                        id,
                        branch_k: p.branch_k,
                        points: vec![sample],
                    });
                    active.push(id);
                    born.push((p.branch_k, id));
                }
            }
        }
        let exits: Vec<f64> = next.edge.iter().map(|p| p.xi1).collect();
        let mut died: Vec<(i64, usize, bool)> = Vec::new();
        for (o, p) in self.current.iter().enumerate() {
            if !continued[o] {
                let near_edge = exits.iter().any(|&e| p.branch_k == branch_of(self.model.theta(xi0, e)));
                died.push((p.branch_k, self.active[o], near_edge));
            }
        }
        for (kind, group) in [
            (EventKind::Birth, group_by_branch(born.iter().map(|&(k, id)| (k, id, false)))),
            (EventKind::Death, group_by_branch(died.into_iter())),
        ] {
            for (ids, at_edge) in group {
                self.events.push(CuspEvent {
                    kind,
                    xi0: mid,
                    line_ids: ids,
                    cause: if at_edge {
                        EventCause::GridExit
                    } else {
                        EventCause::Tangency
                    },
                });
            }
        }
        self.active = active;
        self.current = next.roots;
        self.xi0 = xi0;
        self.counts.push((xi0, self.current.len()));
    }
}

/// Births (deaths) of one branch at one step form a single event; edge
/// exits stay separate.
fn group_by_branch(items: impl Iterator<Item = (i64, usize, bool)>) -> Vec<(Vec<usize>, bool)> {
    let mut out: Vec<(i64, Vec<usize>, bool)> = Vec::new();
    for (k, id, edge) in items {
        match out.iter_mut().find(|g| g.0 == k && !g.2 && !edge) {
            Some(g) => g.1.push(id),
            None => out.push((k, vec![id], edge)),
        }
    }
    out.into_iter().map(|(_, ids, e)| (ids, e)).collect()
}

/// Tracks every cusp over `[xi0_min, xi0_max]`. Base slices are scanned in
/// parallel; the continuation pass halves the step wherever roots appear,
/// vanish or jump further than their predicted motion allows.
pub fn track(model: &StringModel, spec: &TrackSpec) -> Result<CuspTrack> {
    model.charges()?;
    let times = spec.base_slices();
    let mut scans: Vec<Option<Scan>> = times.par_iter().map(|&t| Some(scan(model, t))).collect();
    let first = scans[0].take().expect("first slice");
    if let Some(p) = first.edge.first() {
        return Err(Error::RootAtEdge {
            xi0: times[0],
            xi1: p.xi1,
        });
    }
    let mut tr = Tracker::new(model, times[0], first);
    let min_dt = spec.step * spec.min_fraction;
    for (i, &target) in times.iter().enumerate().skip(1) {
        let mut pending = scans[i].take();
        while tr.xi0 < target {
            let mut t = target;
            let mut next = match pending.take() {
                Some(s) => s,
                None => scan(model, t),
            };
            loop {
                let dt = t - tr.xi0;
                let finest = dt <= min_dt * 1.000001;
                match tr.try_match(&next, dt, finest) {
                    Step::Matched(assign) => {
                        tr.accept(t, next, assign);
                        break;
                    }
                    Step::Refine => {
                        t = tr.xi0 + 0.5 * dt;
                        next = scan(model, t);
                    }
                }
            }
            if tr.xi0 < target && (target - tr.xi0) < 1e-12 * spec.step {
                break;
            }
        }
    }
    Ok(CuspTrack {
        lines: tr.lines,
        events: tr.events,
        counts: tr.counts,
    })
}
