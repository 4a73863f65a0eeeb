//! Randomized invariants of fields, geometry, charges, cusps and braids.

use std::f64::consts::PI;

use planar_string::braid::{braid_word, classify, half_turn, mirror_depth, BraidWord, Generator, Projection};
use planar_string::charges::{f_j, hamiltonian, momentum, ChargeSet};
use planar_string::cusps::{cusp_positions, track, TrackSpec};
use planar_string::export::fmt_f64;
use planar_string::worldsheet::minkowski;
use planar_string::{
    soliton_field, synth_nsoliton, Chirality, DiscreteSpectrum, ExternalVariables, GridSpec,
    StringModel,
};
use proptest::prelude::*;

fn model(ap: f64, cp: f64, am: f64, cm: f64, e: ExternalVariables) -> StringModel {
    let g = GridSpec::default();
    StringModel::new(
        soliton_field(ap, cp, Chirality::Plus, g).unwrap(),
        soliton_field(am, cm, Chirality::Minus, g).unwrap(),
        e,
    )
    .unwrap()
}

fn amplitude() -> impl Strategy<Value = f64> {
    0.45f64..1.2
}

fn norming() -> impl Strategy<Value = f64> {
    prop_oneof![0.5f64..2.0, -2.0f64..-0.5]
}

fn externals() -> impl Strategy<Value = ExternalVariables> {
    (0.3f64..3.0, 0.0f64..PI, -2.0f64..2.0, -2.0f64..2.0, 0.5f64..2.0)
        .prop_map(|(k, b, z1, z3, g)| ExternalVariables::new(k, b, [z1, z3], g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solitons_are_quantized(a in 0.3f64..1.5, c in norming(), plus in any::<bool>()) {
        let ch = if plus { Chirality::Plus } else { Chirality::Minus };
        let spec = DiscreteSpectrum::imaginary(ch, &[a], &[c]).unwrap();
        let f = synth_nsoliton(&spec, GridSpec::covering(&[&spec], 1e-10)).unwrap();
        let n = f.topological_charge().unwrap();
        prop_assert_eq!(n.abs(), 1);
        prop_assert!((f.total_angle() - PI * n as f64).abs() < 1e-6);
        // trace identity: 1/2 int rho^2 = 2a
        prop_assert!((0.5 * f.rho_squared_integral() - 2.0 * a).abs() < 1e-8);
    }

    #[test]
    fn tangents_are_null_with_gauge(
        ap in amplitude(), cp in norming(), am in amplitude(), cm in norming(),
        e in externals(), t in -4.0f64..4.0, s in -4.0f64..4.0,
    ) {
        let m = model(ap, cp, am, cm, e);
        let (tp, tm) = m.tangents(t, s);
        let k2 = e.kappa * e.kappa;
        prop_assert!(minkowski(&tp, &tp).abs() < 1e-8 * k2);
        prop_assert!(minkowski(&tm, &tm).abs() < 1e-8 * k2);
        let gauge = -2.0 * minkowski(&tp, &tm) / k2;
        prop_assert!((gauge - m.theta(t, s).cos().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn translation_shifts_the_embedding(
        ap in amplitude(), am in amplitude(), e in externals(),
        dz in (-5.0f64..5.0, -5.0f64..5.0), t in -3.0f64..3.0, s in -6.0f64..6.0,
    ) {
        let m = model(ap, 1.0, am, 1.0, e);
        let mut moved = m.clone();
        moved.externals.z = [e.z[0] + dz.0, e.z[1] + dz.1];
        let (p, q) = (m.position(t, s), moved.position(t, s));
        prop_assert_eq!(p[0], q[0]);
        prop_assert!((q[1] - p[1] - dz.0).abs() < 1e-12);
        prop_assert!((q[2] - p[2] - dz.1).abs() < 1e-12);
    }

    #[test]
    fn momentum_rotates_with_beta(
        ap in amplitude(), cp in norming(), am in amplitude(), cm in norming(),
        beta in 0.0f64..PI, db in 0.0f64..PI,
    ) {
        let e0 = ExternalVariables::new(1.0, beta, [0.0, 0.0], 1.0).unwrap();
        let e1 = ExternalVariables::new(1.0, beta + db, [0.0, 0.0], 1.0).unwrap();
        let p0 = momentum(&model(ap, cp, am, cm, e0)).unwrap();
        let p1 = momentum(&model(ap, cp, am, cm, e1)).unwrap();
        let n0 = p0[0].hypot(p0[1]);
        prop_assert!((n0 - p1[0].hypot(p1[1])).abs() < 1e-8 * n0.max(1.0));
        // rotation by 2 db in the (X1, X3) plane, sense fixed by n(beta)
        let (s, c) = (2.0 * db).sin_cos();
        let want = [c * p0[0] + s * p0[1], -s * p0[0] + c * p0[1]];
        prop_assert!((p1[0] - want[0]).abs() < 1e-8 * n0.max(1.0));
        prop_assert!((p1[1] - want[1]).abs() < 1e-8 * n0.max(1.0));
    }

    #[test]
    fn charges_are_conserved(
        ap in amplitude(), cp in norming(), am in amplitude(), cm in norming(),
        e in externals(), t in -4.0f64..4.0,
    ) {
        let m = model(ap, cp, am, cm, e);
        let c0 = ChargeSet::compute(&m).unwrap();
        let c1 = ChargeSet::compute(&m.evolved(t).unwrap()).unwrap();
        prop_assert!((c0.h - c1.h).abs() < 1e-8);
        prop_assert!((c0.h - 2.0 * (ap + am)).abs() < 1e-8);
        prop_assert!((c0.p1 - c1.p1).abs() < 1e-6 && (c0.p3 - c1.p3).abs() < 1e-6);
        prop_assert!((c0.j - c1.j).abs() < 1e-4 * c0.j.abs().max(1.0));
        prop_assert!(c0.relative_residual(e.gamma).unwrap() < 1e-6);
        // M = Z1 P3 - Z3 P1 + J by construction
        prop_assert_eq!(c0.m, e.z[0] * c0.p3 - e.z[1] * c0.p1 + c0.j);
    }

    #[test]
    fn f_j_symmetric_under_swap(ap in amplitude(), cp in norming(), am in amplitude(), cm in norming()) {
        let g = GridSpec::default();
        let a = f_j(&soliton_field(ap, cp, Chirality::Plus, g).unwrap(), &soliton_field(am, cm, Chirality::Minus, g).unwrap());
        let b = f_j(&soliton_field(am, cm, Chirality::Plus, g).unwrap(), &soliton_field(ap, cp, Chirality::Minus, g).unwrap());
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        let h = hamiltonian(&soliton_field(ap, cp, Chirality::Plus, g).unwrap(), &soliton_field(am, cm, Chirality::Minus, g).unwrap());
        prop_assert!(h > 0.0);
    }

    #[test]
    fn cusps_commute_with_evolution(
        ap in amplitude(), am in amplitude(), cp in 0.5f64..2.0, cm in 0.5f64..2.0, t in -3.0f64..3.0,
    ) {
        let m = model(ap, cp, am, cm, ExternalVariables::default());
        let direct = cusp_positions(&m, t).unwrap();
        let moved = cusp_positions(&m.evolved(t).unwrap(), 0.0).unwrap();
        prop_assert_eq!(direct.len(), moved.len());
        for (a, b) in direct.iter().zip(&moved) {
            prop_assert_eq!(a.branch_k, b.branch_k);
            prop_assert!((a.xi1 - b.xi1).abs() < 1e-8);
        }
        // same-sign pairs: theta sweeps (-2 pi, 0), so exactly two cusps
        prop_assert_eq!(direct.len(), 2);
    }

    #[test]
    fn fmt_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), if v == 0.0 { 0.0 } else { v });
    }

    #[test]
    fn word_bookkeeping(word in prop::collection::vec((1usize..4, prop_oneof![Just(1), Just(-1)]), 0..12)) {
        let generators: Vec<Generator> = word
            .iter()
            .enumerate()
            .map(|(k, &(i, sign))| Generator { i, sign, xi0: k as f64 })
            .collect();
        let mut w = BraidWord {
            n_strands: 4,
            generators,
            permutation: Vec::new(),
            degeneracies: Vec::new(),
            start_order: vec![0, 1, 2, 3],
        };
        w.permutation = w.word_permutation();
        let s = classify(&w);
        prop_assert!(s.reduced_length <= word.len());
        prop_assert_eq!(s.reduced_length % 2, word.len() % 2);
        prop_assert_eq!(s.cycle_type.iter().sum::<usize>(), 4);
        prop_assert_eq!(w.mirrored().writhe(), -w.writhe());
        let r = w.reversed();
        prop_assert_eq!(r.reversed(), w.clone());
        prop_assert_eq!(r.word_permutation(), r.permutation.clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Same-sign pairs keep their cusp count and give a consistent braid.
    #[test]
    fn same_sign_braids_are_consistent(
        ap in 0.45f64..1.0, am in 0.45f64..1.0, cp in 0.5f64..2.0, cm in 0.5f64..2.0,
    ) {
        let m = model(ap, cp, am, cm, ExternalVariables::default());
        let t = track(&m, &TrackSpec::new(-5.0, 5.0, 0.1).unwrap()).unwrap();
        prop_assert!(t.count_is_constant() && !t.has_events());
        prop_assert!(t.branch_deviation(&m) < 1e-8);
        let w = braid_word(&t, Projection::X1, 1e-6).unwrap();
        prop_assert_eq!(w.n_strands, 2);
        prop_assert_eq!(&w.permutation, &w.word_permutation());
        prop_assert!(w.generators.iter().all(|g| g.i == 1));
        let mirrored = braid_word(&mirror_depth(&t), Projection::X1, 1e-6).unwrap();
        prop_assert_eq!(mirrored.writhe(), -w.writhe());
        let turned = braid_word(&half_turn(&t), Projection::X1, 1e-6).unwrap();
        prop_assert_eq!(turned.generators, w.reversed().generators);
    }
}
