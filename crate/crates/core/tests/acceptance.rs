//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria 4 and 10 quote constants that contradict their own defining
//! expressions (`-kappa^2/4` where the tangent algebra gives `-kappa^2/2`,
//! and `H = 0.5` where the quoted integral evaluates to `2a = 1`). Their
//! literal forms are reported as FAIL; the test requires that the literal
//! form indeed fails and that the corrected identity holds.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use planar_string::braid::{braid_word, classify, half_turn, mirror_depth, Projection};
use planar_string::charges::{hamiltonian, ChargeSet};
use planar_string::cusps::{track, CuspTrack};
use planar_string::scattering::{
    find_eigenvalues, jost_path, lambda_grid, monodromy, parity_check, SearchSpec,
};
use planar_string::scenario::Scenario;
use planar_string::worldsheet::minkowski;
use planar_string::{
    soliton_field, synth_nsoliton, ChiralField, Chirality, DiscreteSpectrum, ExternalVariables,
    GridSpec, StringModel,
};
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(name: &str) -> Scenario {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    Scenario::load(&p).unwrap()
}

fn scenario_track(name: &str) -> CuspTrack {
    let s = scenario(name);
    track(&s.model().unwrap(), &s.grid.track_spec().unwrap()).unwrap()
}

fn pair(ap: f64, cp: f64, am: f64, cm: f64, e: ExternalVariables, grid: GridSpec) -> StringModel {
    StringModel::new(
        soliton_field(ap, cp, Chirality::Plus, grid).unwrap(),
        soliton_field(am, cm, Chirality::Minus, grid).unwrap(),
        e,
    )
    .unwrap()
}

fn ext(kappa: f64, beta: f64) -> ExternalVariables {
    ExternalVariables::new(kappa, beta, [0.3, -0.7], 1.0).unwrap()
}

/// Nodes of a 13 x 13 lattice on `[-3, 3]^2` whose neighbourhood is
/// cusp-free.
fn regular_points(m: &StringModel) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 0..13 {
        for j in 0..13 {
            let (t, s) = (-3.0 + 0.5 * i as f64, -3.0 + 0.5 * j as f64);
            if m.theta(t, s).cos().abs() > 0.05 {
                pts.push((t, s));
            }
        }
    }
    pts
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (a, c) = (0.5, 1.0);
    let spec = DiscreteSpectrum::imaginary(Chirality::Plus, &[a], &[c]).unwrap();
    let f = synth_nsoliton(&spec, GridSpec::default()).unwrap();
    let path = jost_path(&f, 0.0).unwrap();
    let mut err = 0.0f64;
    for (k, u) in path.iter().enumerate() {
        let xi = f.grid().node(k);
        if xi.abs() > 10.0 {
            continue;
        }
        let d = (-4.0 * a * xi).exp() + c * c;
        let u11 = ((-4.0 * a * xi).exp() - c * c) / d;
        let u12 = -2.0 * c * (-2.0 * a * xi).exp() / d;
        err = err.max((u[0][0] - u11).norm()).max((u[0][1] - u12).norm());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        err < 1e-8 && secs < 1.0,
        format!("one-soliton rotation at lambda = 0: max error {err:.2e} (tol 1e-8), {secs:.3} s (limit 1 s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut notes = Vec::new();
    for a in [vec![0.5], vec![0.3, 0.9], vec![0.3, 0.6, 0.9]] {
        let c = vec![1.0; a.len()];
        let spec = DiscreteSpectrum::imaginary(Chirality::Minus, &a, &c).unwrap();
        let f = synth_nsoliton(&spec, GridSpec::covering(&[&spec], 1e-10)).unwrap();
        let n = f.topological_charge().unwrap();
        let dist = (f.total_angle() - PI * n as f64).abs();
        let parity = parity_check(&f).unwrap();
        worst = worst.max(dist);
        ok &= dist < 1e-6 && n.unsigned_abs() as usize == a.len() && parity == (-1i32).pow(n.unsigned_abs() as u32);
        notes.push(format!("N={} n={n} parity={parity}", a.len()));
    }
    outcome(
        ok,
        format!("quantization |int rho - pi n| <= {worst:.2e} (tol 1e-6); {}", notes.join(", ")),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut worst_l: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for a in [vec![0.5], vec![0.3, 0.9]] {
        let c = vec![1.0; a.len()];
        let spec = DiscreteSpectrum::imaginary(Chirality::Plus, &a, &c).unwrap();
        let f = synth_nsoliton(&spec, GridSpec::covering(&[&spec], 1e-10)).unwrap();
        let found = find_eigenvalues(&f, &SearchSpec::default()).unwrap();
        ok &= found.len() == a.len();
        for &want in &a {
            let d = found
                .eigenvalues()
                .iter()
                .map(|l| (l.im - want).abs() + l.re.abs())
                .fold(f64::INFINITY, f64::min);
            worst_l = worst_l.max(d);
        }
        let m = monodromy(&f, &lambda_grid(-5.0, 5.0, 401)).unwrap();
        worst_b = worst_b.max(m.max_abs_b());
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= worst_l < 1e-6 && worst_b < 1e-6 && secs < 10.0;
    outcome(
        ok,
        format!("scattering round trip: eigenvalue error {worst_l:.2e}, max|b| {worst_b:.2e} (tol 1e-6), {secs:.2} s (limit 10 s)"),
    )
}

/// Tangents from 5-point differences of the embedding.
fn fd_tangents(m: &StringModel, t: f64, s: f64, d: f64) -> ([f64; 3], [f64; 3]) {
    let w = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    let mut tp = [0.0; 3];
    let mut tm = [0.0; 3];
    for &(o, c) in &w {
        // xi+ = s + t, xi- = s - t
        let a = m.position(t + 0.5 * o * d, s + 0.5 * o * d);
        let b = m.position(t - 0.5 * o * d, s + 0.5 * o * d);
        for k in 0..3 {
            tp[k] += c * a[k] / (12.0 * d);
            tm[k] += c * b[k] / (12.0 * d);
        }
    }
    (tp, tm)
}

/// Returns (literal outcome, corrected identity holds, literal fails as expected).
fn criterion_4() -> (Outcome, bool) {
    let mut null_err: f64 = 0.0;
    let mut gauge_quarter: f64 = 0.0;
    let mut gauge_half: f64 = 0.0;
    for kappa in [0.5, 1.0, 2.0] {
        let m = pair(0.5, 1.0, 0.5, 1.0, ext(kappa, 0.4), GridSpec::default());
        let k2 = kappa * kappa;
        for (t, s) in regular_points(&m) {
            let c2 = m.theta(t, s).cos().powi(2);
            for (tp, tm) in [m.tangents(t, s), fd_tangents(&m, t, s, 1e-3)] {
                null_err = null_err
                    .max(minkowski(&tp, &tp).abs() / k2)
                    .max(minkowski(&tm, &tm).abs() / k2);
                let dot = minkowski(&tp, &tm);
                gauge_quarter = gauge_quarter.max((dot + 0.25 * k2 * c2).abs() / k2);
                gauge_half = gauge_half.max((dot + 0.5 * k2 * c2).abs() / k2);
            }
        }
    }
    let literal = null_err < 1e-8 && gauge_quarter < 1e-8;
    let corrected = null_err < 1e-8 && gauge_half < 1e-8;
    (
        outcome(
            literal,
            format!(
                "light-likeness {null_err:.2e} k^2 (tol 1e-8); d+X.d-X = -(k^2/4)cos^2 off by {gauge_quarter:.2e} k^2; \
                 -(k^2/2)cos^2 holds to {gauge_half:.2e} k^2"
            ),
        ),
        corrected && !literal,
    )
}

fn criterion_5() -> Outcome {
    let m = pair(0.5, 1.0, 0.7, 2.0, ext(1.5, 0.2), GridSpec::default());
    let h = m.plus.grid().spacing();
    let k = m.kappa();
    let (mut pp, mut mm, mut pm): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut count = 0;
    for (t, s) in regular_points(&m) {
        let Ok(f) = m.forms(t, s, h) else { continue };
        let (rp, rm) = m.rho_pm(t, s);
        let scale = k * rp.abs().max(rm.abs()).max(1e-3);
        pp = pp.max((f.ii_pp - k * rp).abs() / scale);
        mm = mm.max((f.ii_mm + k * rm).abs() / scale);
        pm = pm.max(f.ii_pm.abs() / scale);
        count += 1;
    }
    outcome(
        pp <= 1e-4 && mm <= 1e-4 && pm <= 1e-4 && count > 50,
        format!("second form at {count} regular points, N = 4096: II++ {pp:.2e}, II-- {mm:.2e}, II+- {pm:.2e} relative (tol 1e-4)"),
    )
}

fn criterion_6() -> Outcome {
    let coarse = GridSpec::new(32.0, 2048).unwrap();
    let fine = GridSpec::new(32.0, 4096).unwrap();
    let mc = pair(0.5, 1.0, 0.7, 2.0, ext(1.0, 0.0), coarse);
    let mf = pair(0.5, 1.0, 0.7, 2.0, ext(1.0, 0.0), fine);
    let mut orders = Vec::new();
    for (t, s) in regular_points(&mf) {
        let rc = mc.pde_residual(t, s, coarse.spacing()).unwrap();
        let rf = mf.pde_residual(t, s, fine.spacing()).unwrap();
        // skip points where the residual is at round-off level
        if rf > 1e-9 {
            orders.push((rc / rf).log2());
        }
    }
    orders.sort_by(|a, b| a.total_cmp(b));
    let min = orders.first().copied().unwrap_or(f64::NAN);
    let median = orders.get(orders.len() / 2).copied().unwrap_or(f64::NAN);
    outcome(
        min >= 1.8 && orders.len() > 50,
        format!("PDE residual order under grid doubling at {} points: min {min:.3}, median {median:.3} (need >= 1.8)", orders.len()),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for _ in 0..5 {
        let ap = rng.gen_range(0.45..1.2);
        let am = rng.gen_range(0.45..1.2);
        let cp = rng.gen_range(0.5..2.0);
        let cm = rng.gen_range(0.5..2.0);
        let beta = rng.gen_range(0.0..PI);
        let mut residuals = Vec::new();
        for kappa in [0.5, 1.0, 2.0] {
            let m = pair(ap, cp, am, cm, ext(kappa, beta), GridSpec::default());
            let c = ChargeSet::compute(&m).unwrap();
            residuals.push(c.relative_residual(1.0).unwrap());
        }
        worst = residuals.iter().fold(worst, |w, r| w.max(*r));
        let (lo, hi) = residuals
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
        spread = spread.max(hi - lo);
    }
    outcome(
        worst < 1e-6 && spread < 1e-6,
        format!("constraint residual over 5 random pairs x kappa in {{0.5, 1, 2}}: max {worst:.2e}, kappa spread {spread:.2e} (tol 1e-6)"),
    )
}

fn criterion_8() -> Outcome {
    let one = scenario_track("one_plus_one.json");
    let two = scenario_track("two_plus_two.json");
    let mixed = scenario_track("mixed_two_plus_one.json");
    let initial = two.counts[0].1;
    let ok_one = one.count_is_constant() && one.counts[0].1 == 2 && !one.has_events() && one.lines.len() == 2;
    let ok_two = two.count_is_constant() && !two.has_events() && two.lines.len() == 4 && initial == 4;
    let counts: Vec<usize> = mixed.counts.iter().map(|c| c.1).collect();
    let varies = counts.iter().min() != counts.iter().max();
    let ok_mixed = mixed.has_events() && varies && counts[0] == 3;
    outcome(
        ok_one && ok_two && ok_mixed,
        format!(
            "1+1: {} lines, {} events; 2+2: {} lines (initial count {initial}), {} events; mixed 2+1: initial {} lines, {} events, count range {:?}..{:?}",
            one.lines.len(),
            one.events.len(),
            two.lines.len(),
            two.events.len(),
            counts[0],
            mixed.events.len(),
            counts.iter().min().unwrap(),
            counts.iter().max().unwrap()
        ),
    )
}

fn criterion_9() -> Outcome {
    let t = scenario_track("one_plus_one.json");
    let w = braid_word(&t, Projection::X1, 1e-6).unwrap();
    let sign = w.generators.first().map(|g| g.sign).unwrap_or(0);
    let power = w.generators.iter().all(|g| g.i == 1 && g.sign == sign);
    let k = w.generators.len();
    let perm_ok = w.permutation == w.word_permutation();
    let m = braid_word(&mirror_depth(&t), Projection::X1, 1e-6).unwrap();
    let mirror_ok = m.writhe() == -w.writhe() && w.writhe() != 0;
    let r = braid_word(&half_turn(&t), Projection::X1, 1e-6).unwrap();
    let rev = w.reversed();
    let reversal_ok = r.generators == rev.generators && r.permutation == rev.permutation;
    let s = classify(&w);
    outcome(
        w.n_strands == 2 && power && k >= 1 && perm_ok && mirror_ok && reversal_ok && w.degeneracies.is_empty(),
        format!(
            "1+1 braid: {} strands, word sigma_1^({}{k}), permutation {:?}, writhe {} -> {} under X3 mirror, cycle type {:?}",
            w.n_strands,
            if sign < 0 { "-" } else { "+" },
            w.permutation,
            w.writhe(),
            m.writhe(),
            s.cycle_type
        ),
    )
}

fn criterion_10() -> (Outcome, bool) {
    let m = pair(0.5, 1.0, 0.7, 2.0, ext(1.0, 0.3), GridSpec::default());
    let c0 = ChargeSet::compute(&m).unwrap();
    let c3 = ChargeSet::compute(&m.evolved(3.0).unwrap()).unwrap();
    let dh = (c0.h - c3.h).abs();
    let dp = (c0.p1 - c3.p1).abs().max((c0.p3 - c3.p3).abs());
    let dj = (c0.j - c3.j).abs();
    let stable = dh < 1e-8 && dp < 1e-6 && dj < 1e-4;
    let g = GridSpec::default();
    let single = hamiltonian(
        &soliton_field(0.5, 1.0, Chirality::Plus, g).unwrap(),
        &ChiralField::vacuum(Chirality::Minus, g),
    );
    // independent oracle: 1/2 int (2a sech(2a xi))^2 = 2a
    let closed = 2.0 * 0.5;
    let literal = stable && (single - 0.5).abs() < 1e-8;
    let corrected = stable && (single - closed).abs() < 1e-8;
    (
        outcome(
            literal,
            format!(
                "drift over xi0 = 3: H {dh:.2e} (1e-8), P {dp:.2e} (1e-6), J {dj:.2e} (1e-4); \
                 single a=0.5 soliton H = {single:.12} vs quoted 0.5, closed form 2a = {closed}"
            ),
        ),
        corrected && !literal,
    )
}

#[test]
fn acceptance_criteria() {
    let (c4, c4_conflict) = criterion_4();
    let (c10, c10_conflict) = criterion_10();
    let results = vec![
        (1, criterion_1(), false),
        (2, criterion_2(), false),
        (3, criterion_3(), false),
        (4, c4, c4_conflict),
        (5, criterion_5(), false),
        (6, criterion_6(), false),
        (7, criterion_7(), false),
        (8, criterion_8(), false),
        (9, criterion_9(), false),
        (10, c10, c10_conflict),
    ];
    let mut unexplained = Vec::new();
    for (n, o, conflict) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if *conflict {
            " [quoted constant contradicts its own definition; corrected identity verified]"
        } else {
            ""
        };
        println!("{tag} criterion {n:>2}: {}{note}", o.detail);
        if !o.pass && !conflict {
            unexplained.push(*n);
        }
    }
    assert!(c4_conflict, "criterion 4: corrected gauge identity must hold and the quoted one must not");
    assert!(c10_conflict, "criterion 10: H must equal 2a and differ from the quoted 0.5");
    assert!(unexplained.is_empty(), "failing criteria: {unexplained:?}");
}
