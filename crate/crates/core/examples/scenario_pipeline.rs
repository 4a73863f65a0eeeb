//! Run a full scenario: every artifact goes to a temporary directory.
//!
//! `cargo run --example scenario_pipeline -- path/to/scenario.json`

use std::path::PathBuf;

use planar_string::pipeline::run_pipeline;
use planar_string::scenario::{Overrides, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/two_plus_two.json")
    });
    let mut s = Scenario::load(&path)?;
    let out = std::env::temp_dir().join("planar-string-example");
    s.apply(&Overrides {
        out_dir: Some(out),
        ..Default::default()
    });
    match run_pipeline(&s) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
