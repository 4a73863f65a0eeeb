//! Scenario runs end to end: artifacts, determinism and readers.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use planar_string::braid::{braid_word, Projection};
use planar_string::cusps::{read_cusp_csv, CuspTrack};
use planar_string::export::{fmt_f64, to_json};
use planar_string::field::read_field_csv;
use planar_string::pipeline::{run_pipeline, run_synth, Stage};
use planar_string::scattering::{read_monodromy_csv, SpectrumRecord};
use planar_string::scenario::{Overrides, Scenario};
use planar_string::worldsheet::{read_worldsheet_csv, Phi};
use planar_string::{ChiralField, Chirality, DiscreteSpectrum};

fn scenario(name: &str, out: &Path) -> Scenario {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    let mut s = Scenario::load(&p).unwrap();
    s.apply(&Overrides {
        out_dir: Some(out.to_path_buf()),
        ..Default::default()
    });
    s
}

fn reader(p: &Path) -> BufReader<fs::File> {
    BufReader::new(fs::File::open(p).unwrap())
}

/// Parsing a JSON artifact and printing it again gives the same bytes.
fn json_round_trip(p: &Path) -> serde_json::Value {
    let text = fs::read_to_string(p).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&v).unwrap(), text, "{}", p.display());
    v
}

#[test]
fn one_plus_one_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("one_plus_one.json", dir.path());
    let files = run_pipeline(&s).unwrap();
    assert_eq!(files.len(), 14);
    let model = s.model().unwrap();

    // fields: reading and writing again is the identity on bytes
    for (name, ch) in [("field_plus.csv", Chirality::Plus), ("field_minus.csv", Chirality::Minus)] {
        let p = dir.path().join(name);
        let (xi, rho) = read_field_csv(reader(&p)).unwrap();
        let f = ChiralField::from_samples(ch, &xi, &rho, 1e-10).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(buf, fs::read(&p).unwrap());
        assert_eq!(f.topological_charge().unwrap(), -1);
    }

    let synth = json_round_trip(&dir.path().join("synth.json"));
    assert_eq!((synth["n_plus"].as_i64(), synth["n_minus"].as_i64()), (Some(-1), Some(-1)));

    let text = fs::read_to_string(dir.path().join("spectrum.json")).unwrap();
    let records: Vec<SpectrumRecord> = serde_json::from_str(&text).unwrap();
    let (sp, sm) = DiscreteSpectrum::from_records(&records).unwrap();
    for spec in [sp, sm] {
        assert_eq!(spec.len(), 1);
        assert!((spec.eigenvalues()[0].im - 0.5).abs() < 1e-6);
        assert!((spec.norming()[0].re - 1.0).abs() < 1e-6);
    }

    let mono = read_monodromy_csv(reader(&dir.path().join("monodromy_plus.csv"))).unwrap();
    assert_eq!(mono.len(), 201);
    assert!(mono.iter().all(|(_, _, b)| b.norm() < 1e-6));
    assert!(mono.iter().all(|(_, a, _)| (a.norm() - 1.0).abs() < 1e-6));

    let rows = read_worldsheet_csv(reader(&dir.path().join("worldsheet.csv"))).unwrap();
    assert_eq!(rows.len(), 101 * 401);
    for r in rows.iter().step_by(997) {
        assert_eq!(r.x, model.position(r.xi0, r.xi1));
        assert_eq!(r.phi, model.phi(r.xi0, r.xi1));
        assert!(matches!(r.phi, Phi::Regular(_) | Phi::Cusp));
    }
    json_round_trip(&dir.path().join("worldsheet.json"));

    let charges = json_round_trip(&dir.path().join("charges.json"));
    assert!((charges["H"].as_f64().unwrap() - 2.0).abs() < 1e-8);

    let cusp_csv = dir.path().join("cusps.csv");
    let lines = read_cusp_csv(reader(&cusp_csv)).unwrap();
    assert_eq!(lines.len(), 2);
    let t = CuspTrack {
        lines,
        events: Vec::new(),
        counts: Vec::new(),
    };
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    assert_eq!(buf, fs::read(&cusp_csv).unwrap());
    assert_eq!(fs::read_to_string(dir.path().join("events.json")).unwrap(), "[]\n");

    // the braid of the re-read lines is the exported braid
    let braid = json_round_trip(&dir.path().join("braid.json"));
    let again = braid_word(&t, Projection::X1, 1e-6).unwrap();
    assert_eq!(again.to_json().unwrap(), fs::read_to_string(dir.path().join("braid.json")).unwrap());
    assert_eq!(braid["n_strands"], 2);
    assert!(fs::read_to_string(dir.path().join("braid.svg")).unwrap().starts_with("<svg"));
    assert!(fs::read_to_string(dir.path().join("worldsheet.svg")).unwrap().contains("<polyline"));
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = run_pipeline(&scenario("mixed_two_plus_one.json", a.path())).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let fb = pool
        .install(|| run_pipeline(&scenario("mixed_two_plus_one.json", b.path())))
        .unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn vacuum_run_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&scenario("vacuum.json", dir.path())).unwrap();
    let charges = json_round_trip(&dir.path().join("charges.json"));
    for key in ["P1", "P3", "J", "M", "H", "F_P", "F_J"] {
        assert_eq!(charges[key].as_f64(), Some(0.0), "{key}");
    }
    assert!(charges["Omega"].is_null());
    let braid = json_round_trip(&dir.path().join("braid.json"));
    assert_eq!(braid["n_strands"], 0);
    assert_eq!(braid["word"].as_array().unwrap().len(), 0);
    // every string slice is a straight line along -n(beta) = (0, -1)
    let rows = read_worldsheet_csv(reader(&dir.path().join("worldsheet.csv"))).unwrap();
    assert!(rows.iter().all(|r| r.x[1] == 0.0 && r.x[2] == -r.xi1));
    assert!(rows.iter().all(|r| r.phi == Phi::Regular(0.0)));
}

#[test]
fn mixed_run_writes_a_tangle() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_pipeline(&scenario("mixed_two_plus_one.json", dir.path())).unwrap();
    assert!(files.iter().any(|f| f.ends_with("tangle.json")));
    assert!(!dir.path().join("braid.json").exists());
    let tangle = json_round_trip(&dir.path().join("tangle.json"));
    assert_eq!(tangle["n_strands_start"], 3);
    let kinds: Vec<&str> = tangle["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["type"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"birth") && kinds.contains(&"death"));
    let events = json_round_trip(&dir.path().join("events.json"));
    for e in events.as_array().unwrap() {
        assert_eq!(e["line_ids"].as_array().unwrap().len(), 2);
        assert_eq!(e["cause"], "tangency");
    }
}

#[test]
fn two_plus_two_braid_has_four_strands() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&scenario("two_plus_two.json", dir.path())).unwrap();
    let braid = json_round_trip(&dir.path().join("braid.json"));
    assert_eq!(braid["n_strands"], 4);
    let word = braid["word"].as_array().unwrap();
    assert!(!word.is_empty());
    assert!(word.iter().all(|g| (1..=3).contains(&g["i"].as_i64().unwrap())));
    let writhe: i64 = word.iter().map(|g| g["sign"].as_i64().unwrap()).sum();
    assert_eq!(braid["writhe"].as_i64(), Some(writhe));
}

#[test]
fn empty_spectra_synthesize_zero_fields() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::from_json(
        &format!(r#"{{"schema_version": 1, "outputs": {{"dir": "{}"}}}}"#, dir.path().display()),
        &dir.path().join("s.json"),
    )
    .unwrap();
    run_synth(&s).unwrap();
    let (_, rho) = read_field_csv(reader(&dir.path().join("field_plus.csv"))).unwrap();
    assert!(rho.iter().all(|&r| r == 0.0));
    let synth = json_round_trip(&dir.path().join("synth.json"));
    assert_eq!(synth["n_plus"], 0);
    assert_eq!(synth["total_minus"].as_f64(), Some(0.0));
}

#[test]
fn malformed_scenario_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\n  \"schema_version\": 1,\n  \"grid\": { \"L\": 3.0,, }\n}\n").unwrap();
    let e = Scenario::load(&p).unwrap_err();
    assert!(e.is_validation());
    assert!(e.to_string().contains("line 3"), "{e}");
    let s = Scenario::from_json(r#"{"schema_version": 1, "grid": {"xi0_step": -1}}"#, &p).unwrap();
    let e = run_synth(&s).unwrap_err();
    assert_eq!(e.stage, Stage::Scenario);
    assert_eq!(e.exit_code(), 2);
    assert!(fmt_f64(-1.0).starts_with("-1.0"));
}
