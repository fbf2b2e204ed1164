//! One run of each moment and tail check, with the per-cell table.
//!
//!     cargo run --release --example moments_lab

use lpqlab::ensembles::{EnsembleSpec, Family};
use lpqlab::momentslab::{
    moment_comparison_claim, moment_growth_profile, regularity_constant, sudakov_ratio,
    tail_comparison, weak_strong_constant, MomentReport,
};
use lpqlab::CoeffMatrix;

const T: usize = 50_000;

fn show(report: &MomentReport) {
    println!("== {} on {}", report.check_id, report.spec_summary);
    println!("   {}", report.check_id.statement());
    // long grids (sudakov has one cell per k) show only the attaining cell
    let cells: Vec<_> = if report.cells.len() > 8 {
        report.argmax().into_iter().collect()
    } else {
        report.cells.iter().collect()
    };
    for cell in cells {
        let flag = cell.flag.as_deref().unwrap_or("");
        println!(
            "   param {:>6}  lhs {:>10.5} ± {:<9.5} rhs {:>10.5}  C {:>8.4} {flag}",
            cell.param, cell.lhs, cell.lhs_se, cell.rhs, cell.constant
        );
    }
    for (name, value) in &report.estimates {
        println!("   {name} = {value:.4}");
    }
    for note in &report.notes {
        println!("   note: {note}");
    }
    println!("   constant = {:.4}\n", report.constant);
}

fn main() -> lpqlab::Result<()> {
    let row = |family, n| EnsembleSpec::log_concave(family, CoeffMatrix::ones(1, n).unwrap());

    show(&regularity_constant(
        &row(Family::L1BallUniform, 8)?,
        2.0,
        8.0,
        2.0,
        T,
        1,
    )?);
    show(&weak_strong_constant(
        &row(Family::Laplace, 16)?,
        2.0,
        4.0,
        T,
        4,
        1,
    )?);
    show(&tail_comparison(
        &row(Family::Gaussian, 4)?,
        2.0,
        &[0.5, 1.0, 2.0],
        std::f64::consts::E.powi(2),
        T,
        1,
    )?);

    let a: Vec<f64> = (1..=64).map(|k| 1.0 / k as f64).collect();
    show(&sudakov_ratio(&a, Family::Laplace, T, 1)?);

    let beta = 0.75;
    let grid = [2.0, 4.0, 8.0, 16.0];
    let profile = moment_growth_profile(
        &EnsembleSpec::beta_regular(CoeffMatrix::ones(1, 1)?, beta, 1.0)?,
        &grid,
        T,
        1,
    )?;
    show(&profile);
    show(&moment_comparison_claim(
        beta,
        profile.constant.max(1.0),
        &[0.25; 16],
        &grid,
        T,
        1,
    )?);
    Ok(())
}
