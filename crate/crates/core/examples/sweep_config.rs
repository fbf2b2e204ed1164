//! Runs a configuration file through the harness and prints the CSV rows,
//! then reads them back and applies the shipped acceptance bands.
//!
//!     cargo run --release --example sweep_config [-- CONFIG]

use std::path::PathBuf;

use lpqlab::harness::{
    emit_results, read_results, run_config, Bands, ExperimentConfig, OutputFormat,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/quick_sweep.ini")
        });
    let mut cfg = ExperimentConfig::from_file(&path)?;
    cfg.apply_env()?;
    let out = std::env::temp_dir().join(format!("{}.csv", cfg.experiment_id));

    let rows = run_config(&cfg)?;
    emit_results(&rows, &out, OutputFormat::Csv)?;
    print!("{}", std::fs::read_to_string(&out)?);

    let back = read_results(&out, OutputFormat::Csv)?;
    assert_eq!(back, rows);
    let bands = Bands::shipped();
    let violations: Vec<String> = back.iter().flat_map(|r| bands.violations(r)).collect();
    println!(
        "\n{} rows written to {}; {} band violations",
        rows.len(),
        out.display(),
        violations.len()
    );
    for v in violations {
        println!("  {v}");
    }
    Ok(())
}
