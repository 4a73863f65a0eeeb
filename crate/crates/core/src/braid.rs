//! Braid words from cusp world-lines, with `X0` as the time axis.
//!
//! Strands are ordered by a crossing coordinate (`X1` by default). Whenever
//! the strands at positions `i` and `i + 1` swap, the generator `sigma_i^s`
//! is emitted, with `s = +1` when the strand entering from the left (smaller
//! crossing coordinate) is deeper, i.e. has the larger depth coordinate.

use serde::{Deserialize, Serialize};

use crate::cusps::{CuspEvent, CuspLine, CuspTrack, EventKind};
use crate::export::fmt_f64;
use crate::{Error, Result};

/// Which embedding axis orders the strands; the other one is the depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Projection {
    #[default]
    X1,
    X3,
}

impl Projection {
    /// `(crossing, depth)` components of `(X0, X1, X3)`.
    fn split(self, x: &[f64; 3]) -> (f64, f64) {
        match self {
            Projection::X1 => (x[1], x[2]),
            Projection::X3 => (x[2], x[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Generator {
    /// 1-based position of the left strand
    pub i: usize,
    pub sign: i32,
    pub xi0: f64,
}

/// Crossing whose depth gap is below the braid tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Degeneracy {
    pub xi0: f64,
    pub i: usize,
    pub line_ids: [usize; 2],
    pub depth_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraidWord {
    pub n_strands: usize,
    pub generators: Vec<Generator>,
    /// `permutation[k]` is the final (1-based) position of the strand that
    /// started at position `k + 1`
    pub permutation: Vec<usize>,
    pub degeneracies: Vec<Degeneracy>,
    /// line ids in their initial order
    pub start_order: Vec<usize>,
}

#[derive(Serialize)]
struct BraidRecord<'a> {
    n_strands: usize,
    word: &'a [Generator],
    permutation: &'a [usize],
    writhe: i64,
    degeneracies: &'a [Degeneracy],
}

impl BraidWord {
    pub fn writhe(&self) -> i64 {
        self.generators.iter().map(|g| g.sign as i64).sum()
    }

    /// Permutation obtained by composing the generators' transpositions
    /// (degenerate crossings included) on the identity.
    pub fn word_permutation(&self) -> Vec<usize> {
        let mut swaps: Vec<(f64, usize)> = self
            .generators
            .iter()
            .map(|g| (g.xi0, g.i))
            .chain(self.degeneracies.iter().map(|d| (d.xi0, d.i)))
            .collect();
        swaps.sort_by(|a, b| a.0.total_cmp(&b.0));
        permutation_of(self.n_strands, swaps.into_iter().map(|s| s.1))
    }

    /// `sigma_i^s -> sigma_{n-i}^s`: the word seen with the strand order
    /// reversed (a half-turn about the time axis).
    pub fn reversed(&self) -> Self {
        let n = self.n_strands;
        let generators = self
            .generators
            .iter()
            .map(|g| Generator { i: n - g.i, ..*g })
            .collect();
        let degeneracies = self
            .degeneracies
            .iter()
            .map(|d| Degeneracy { i: n - d.i, ..*d })
            .collect();
        let permutation = (0..n)
            .map(|k| n + 1 - self.permutation[n - 1 - k])
            .collect();
        let mut start_order = self.start_order.clone();
        start_order.reverse();
        Self {
            n_strands: n,
            generators,
            permutation,
            degeneracies,
            start_order,
        }
    }

    /// Word with every sign flipped (depth axis reflected).
    pub fn mirrored(&self) -> Self {
        let mut w = self.clone();
        for g in &mut w.generators {
            g.sign = -g.sign;
        }
        w
    }

    /// `{n_strands, word: [{i, sign, xi0}], permutation, writhe, degeneracies}`
    pub fn to_json(&self) -> Result<String> {
        crate::export::to_json(&BraidRecord {
            n_strands: self.n_strands,
            word: &self.generators,
            permutation: &self.permutation,
            writhe: self.writhe(),
            degeneracies: &self.degeneracies,
        })
    }
}

fn permutation_of(n: usize, swaps: impl Iterator<Item = usize>) -> Vec<usize> {
    // order[p] = starting position of the strand now at p
    let mut order: Vec<usize> = (0..n).collect();
    for i in swaps {
        order.swap(i - 1, i);
    }
    let mut perm = vec![0; n];
    for (p, &start) in order.iter().enumerate() {
        perm[start] = p + 1;
    }
    perm
}

/// Topology summary of a word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraidSummary {
    pub n_strands: usize,
    /// cycle lengths of the permutation, descending
    pub cycle_type: Vec<usize>,
    pub writhe: i64,
    /// length after cancelling adjacent `sigma_i sigma_i^-1`
    pub reduced_length: usize,
}

pub fn classify(word: &BraidWord) -> BraidSummary {
    let n = word.n_strands;
    let mut seen = vec![false; n];
    let mut cycle_type = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = word.permutation[k] - 1;
            len += 1;
        }
        cycle_type.push(len);
    }
    cycle_type.sort_unstable_by(|a, b| b.cmp(a));
    let mut stack: Vec<(usize, i32)> = Vec::new();
    for g in &word.generators {
        match stack.last() {
            Some(&(i, s)) if i == g.i && s == -g.sign => {
                stack.pop();
            }
            _ => stack.push((g.i, g.sign)),
        }
    }
    BraidSummary {
        n_strands: n,
        cycle_type,
        writhe: word.writhe(),
        reduced_length: stack.len(),
    }
}

/// One entry of a tangle: a crossing or a cusp event, in time order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TangleItem {
    Generator {
        i: usize,
        sign: i32,
        xi0: f64,
        n_strands: usize,
    },
    Degeneracy {
        i: usize,
        xi0: f64,
        line_ids: [usize; 2],
        depth_gap: f64,
    },
    Birth {
        xi0: f64,
        line_ids: Vec<usize>,
    },
    Death {
        xi0: f64,
        line_ids: Vec<usize>,
    },
}

impl TangleItem {
    pub fn xi0(&self) -> f64 {
        match self {
            TangleItem::Generator { xi0, .. }
            | TangleItem::Degeneracy { xi0, .. }
            | TangleItem::Birth { xi0, .. }
            | TangleItem::Death { xi0, .. } => *xi0,
        }
    }
}

/// World-lines with births and deaths: crossings interleaved with events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tangle {
    pub n_strands_start: usize,
    pub n_strands_end: usize,
    pub max_strands: usize,
    pub n_events: usize,
    pub items: Vec<TangleItem>,
}

impl Tangle {
    pub fn generators(&self) -> impl Iterator<Item = &TangleItem> {
        self.items
            .iter()
            .filter(|t| matches!(t, TangleItem::Generator { .. }))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::export::to_json(self)
    }
}

struct Crossing {
    xi0: f64,
    a: usize,
    b: usize,
    /// depth of `a` and `b` at the crossing
    depth: (f64, f64),
}

struct Sweep {
    items: Vec<TangleItem>,
    start_order: Vec<usize>,
    end_order: Vec<usize>,
    max_strands: usize,
}

/// Crossing coordinate of a line at a sample time it has.
fn coord(line: &CuspLine, k: usize, p: Projection) -> (f64, f64) {
    p.split(&line.points[k].x)
}

fn sweep(lines: &[CuspLine], events: &[CuspEvent], projection: Projection, eps: f64) -> Result<Sweep> {
    let mut times: Vec<f64> = lines
        .iter()
        .flat_map(|l| l.points.iter().map(|p| p.xi0))
        .collect();
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup();
    // index of each time in every line, if sampled there
    let index = |l: &CuspLine, t: f64| l.points.binary_search_by(|p| p.xi0.total_cmp(&t)).ok();
    let mut items = Vec::new();
    let mut order: Vec<usize> = Vec::new();
    let insert = |order: &mut Vec<usize>, id: usize, t: f64| {
        let k = index(&lines[id], t).expect("sampled at its start");
        let c = coord(&lines[id], k, projection).0;
        let pos = order
            .iter()
            .position(|&o| {
                let ko = index(&lines[o], t).expect("active line sampled");
                coord(&lines[o], ko, projection).0 > c
            })
            .unwrap_or(order.len());
        order.insert(pos, id);
    };
    if let Some(&t0) = times.first() {
        let mut first: Vec<usize> = (0..lines.len()).filter(|&i| lines[i].start() == t0).collect();
        first.sort_by(|&a, &b| {
            coord(&lines[a], 0, projection)
                .0
                .total_cmp(&coord(&lines[b], 0, projection).0)
        });
        order = first;
    }
    let start_order = order.clone();
    let mut max_strands = order.len();
    for w in times.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        order.retain(|&id| lines[id].end() > ta);
        let mut crossings = Vec::new();
        for x in 0..order.len() {
            for y in x + 1..order.len() {
                // fixed orientation so that an exact touch is counted once
                let (p, q) = (order[x].min(order[y]), order[x].max(order[y]));
                let (Some(pa), Some(pb), Some(qa), Some(qb)) = (
                    index(&lines[p], ta),
                    index(&lines[p], tb),
                    index(&lines[q], ta),
                    index(&lines[q], tb),
                ) else {
                    continue;
                };
                let (cpa, dpa) = coord(&lines[p], pa, projection);
                let (cpb, dpb) = coord(&lines[p], pb, projection);
                let (cqa, dqa) = coord(&lines[q], qa, projection);
                let (cqb, dqb) = coord(&lines[q], qb, projection);
                let (da, db) = (cpa - cqa, cpb - cqb);
                if (da >= 0.0) != (db >= 0.0) {
                    let s = da / (da - db);
                    crossings.push(Crossing {
                        xi0: ta + s * (tb - ta),
                        a: p,
                        b: q,
                        depth: (dpa + s * (dpb - dpa), dqa + s * (dqb - dqa)),
                    });
                }
            }
        }
        crossings.sort_by(|u, v| u.xi0.total_cmp(&v.xi0));
        for c in crossings {
            let pa = order.iter().position(|&o| o == c.a).expect("active");
            let pb = order.iter().position(|&o| o == c.b).expect("active");
            if pa.abs_diff(pb) != 1 {
                return Err(Error::Braid(format!(
                    "strands {} and {} cross at xi0 = {} without being adjacent; reduce the tracking step",
                    c.a, c.b, c.xi0
                )));
            }
            let (left, lpos) = if pa < pb { (c.a, pa) } else { (c.b, pb) };
            let (dl, dr) = if left == c.a { c.depth } else { (c.depth.1, c.depth.0) };
            let gap = (dl - dr).abs();
            if gap < eps {
                items.push(TangleItem::Degeneracy {
                    i: lpos + 1,
                    xi0: c.xi0,
                    line_ids: [order[lpos], order[lpos + 1]],
                    depth_gap: gap,
                });
            } else {
                items.push(TangleItem::Generator {
                    i: lpos + 1,
                    sign: if dl > dr { 1 } else { -1 },
                    xi0: c.xi0,
                    n_strands: order.len(),
                });
            }
            order.swap(lpos, lpos + 1);
        }
        for id in 0..lines.len() {
            if lines[id].start() == tb {
                insert(&mut order, id, tb);
            }
        }
        max_strands = max_strands.max(order.len());
    }
    for e in events {
        items.push(match e.kind {
            EventKind::Birth => TangleItem::Birth {
                xi0: e.xi0,
                line_ids: e.line_ids.clone(),
            },
            EventKind::Death => TangleItem::Death {
                xi0: e.xi0,
                line_ids: e.line_ids.clone(),
            },
        });
    }
    items.sort_by(|a, b| a.xi0().total_cmp(&b.xi0()));
    Ok(Sweep {
        items,
        start_order,
        end_order: order,
        max_strands,
    })
}

/// Braid word of world-lines that all live over the whole window.
pub fn braid_word(track: &CuspTrack, projection: Projection, eps_braid: f64) -> Result<BraidWord> {
    if track.has_events() {
        return Err(Error::Braid(format!(
            "{} birth/death events in the window; use a tangle",
            track.events.len()
        )));
    }
    if let Some(first) = track.lines.first() {
        if track
            .lines
            .iter()
            .any(|l| l.start() != first.start() || l.end() != first.end())
        {
            return Err(Error::Braid(
                "strands do not share a common time interval".into(),
            ));
        }
    }
    let s = sweep(&track.lines, &[], projection, eps_braid)?;
    let n = s.start_order.len();
    let mut generators = Vec::new();
    let mut degeneracies = Vec::new();
    for item in s.items {
        match item {
            TangleItem::Generator { i, sign, xi0, .. } => generators.push(Generator { i, sign, xi0 }),
            TangleItem::Degeneracy {
                i,
                xi0,
                line_ids,
                depth_gap,
            } => degeneracies.push(Degeneracy {
                xi0,
                i,
                line_ids,
                depth_gap,
            }),
            _ => {}
        }
    }
    let mut permutation = vec![0; n];
    for (k, id) in s.start_order.iter().enumerate() {
        permutation[k] = s.end_order.iter().position(|o| o == id).expect("strand kept") + 1;
    }
    Ok(BraidWord {
        n_strands: n,
        generators,
        permutation,
        degeneracies,
        start_order: s.start_order,
    })
}

/// Crossings and events of arbitrary world-lines.
pub fn tangle(track: &CuspTrack, projection: Projection, eps_braid: f64) -> Result<Tangle> {
    let s = sweep(&track.lines, &track.events, projection, eps_braid)?;
    Ok(Tangle {
        n_strands_start: s.start_order.len(),
        n_strands_end: s.end_order.len(),
        max_strands: s.max_strands,
        n_events: track.events.len(),
        items: s.items,
    })
}

/// Copy of the track with every embedding point mapped by `f`.
pub fn map_track(track: &CuspTrack, f: impl Fn([f64; 3]) -> [f64; 3]) -> CuspTrack {
    let mut t = track.clone();
    for l in &mut t.lines {
        for p in &mut l.points {
            p.x = f(p.x);
        }
    }
    t
}

/// `X3 -> -X3`.
pub fn mirror_depth(track: &CuspTrack) -> CuspTrack {
    map_track(track, |x| [x[0], x[1], -x[2]])
}

/// `(X1, X3) -> (-X1, -X3)`.
pub fn half_turn(track: &CuspTrack) -> CuspTrack {
    map_track(track, |x| [x[0], -x[1], -x[2]])
}

/// Braid diagram: crossing coordinate to the right, `X0` up.
pub fn braid_svg(track: &CuspTrack, projection: Projection) -> String {
    let size = (640.0, 800.0);
    let margin = 30.0;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for l in &track.lines {
        for p in &l.points {
            let c = projection.split(&p.x).0;
            lo = [lo[0].min(c), lo[1].min(p.x[0])];
            hi = [hi[0].max(c), hi[1].max(p.x[0])];
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    let sx = |c: f64| margin + (c - lo[0]) / (hi[0] - lo[0]).max(1e-9) * (size.0 - 2.0 * margin);
    let sy = |t: f64| size.1 - margin - (t - lo[1]) / (hi[1] - lo[1]).max(1e-9) * (size.1 - 2.0 * margin);
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        size.0, size.1, size.0, size.1
    );
    for (k, l) in track.lines.iter().enumerate() {
        let pts: Vec<String> = l
            .points
            .iter()
            .map(|p| format!("{:.3},{:.3}", sx(projection.split(&p.x).0), sy(p.x[0])))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"><title>line {} (k = {})</title></polyline>\n",
            palette[k % palette.len()],
            pts.join(" "),
            l.id,
            l.branch_k
        ));
    }
    for e in &track.events {
        for id in &e.line_ids {
            let l = &track.lines[*id];
            let p = if e.kind == EventKind::Birth {
                l.points[0]
            } else {
                l.points[l.points.len() - 1]
            };
            out.push_str(&format!(
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"black\"><title>{:?} at xi0 = {}</title></circle>\n",
                sx(projection.split(&p.x).0),
                sy(p.x[0]),
                e.kind,
                fmt_f64(e.xi0)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}
