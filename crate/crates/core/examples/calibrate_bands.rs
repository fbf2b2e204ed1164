//! Regenerates `bands/bands.txt`.
//!
//! The corollary ids have no a-priori band, so they are calibrated: the suite
//! at m = n = 32, T = 100 is run with a calibration seed and each id's band
//! is set to 1.5x its largest observed ratio. The acceptance run uses a
//! different seed, so it checks the band on fresh draws.
//!
//!     cargo run --release --example calibrate_bands [-- OUTPUT]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use lpqlab::harness::run_config;
use lpqlab::harness::suites::{band_from_max, corollary_suite, CALIBRATED_IDS};

const CALIBRATION_SEED: u64 = 20_241;
const MARGIN: f64 = 1.5;

const FIXED: &str = "\
# Acceptance bands on the measured ratio lhs / rhs_bracket.
main11.max = 3.0
reverse12.min = 0.25
lemma31.max = 3.0
lemma32.max = 3.0
regularity.max = 3.0
weakstrong.max = 2.0
tailcmp.max = 4.0
sudakov.min = 0.2
sudakov.max = 20.0
momclaim.max_over_L = 4.0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("bands/bands.txt"));

    let mut max_by_id: BTreeMap<String, f64> = BTreeMap::new();
    for cfg in corollary_suite(32, 100, CALIBRATION_SEED) {
        for row in run_config(&cfg)? {
            if let Some(reason) = &row.error {
                return Err(format!("{}: {reason}", cfg.experiment_id).into());
            }
            let ratio = row.ratio.unwrap_or(f64::NAN);
            println!(
                "{:<10} {:<20} p={} q={} ratio={ratio:.4}",
                row.inequality_id,
                cfg.experiment_id,
                row.p.unwrap_or(f64::NAN),
                row.q.unwrap_or(f64::NAN)
            );
            let e = max_by_id.entry(row.inequality_id.clone()).or_insert(0.0);
            *e = e.max(ratio);
        }
    }

    let mut text = FIXED.to_string();
    writeln!(
        text,
        "# [DERIVED] calibrated: {MARGIN} x max ratio at m = n = 32, T = 100, seed {CALIBRATION_SEED} (examples/calibrate_bands.rs)."
    )?;
    for id in CALIBRATED_IDS {
        let max = max_by_id[id.as_str()];
        writeln!(
            text,
            "{id}.max = {}  # observed max {max:.4}",
            band_from_max(max, MARGIN)
        )?;
    }
    std::fs::write(&out, &text)?;
    print!("{text}");
    println!("wrote {}", out.display());
    Ok(())
}
