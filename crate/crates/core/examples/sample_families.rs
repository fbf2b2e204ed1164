//! Draws from every row law and checks isotropy of the log-concave ones.
//!
//!     cargo run --release --example sample_families

use lpqlab::ensembles::{
    estimate_covariance, sample_row, EnsembleSpec, Family, MixingLaw, SampleBatch,
};
use lpqlab::harness::derive_substream;
use lpqlab::CoeffMatrix;

fn main() -> lpqlab::Result<()> {
    let n = 8;
    let row = CoeffMatrix::ones(1, n)?;
    println!(
        "{:<14} {:>10} {:>10}   first draw",
        "family", "max |Σ-I|", "max |μ|/SE"
    );
    for family in Family::LOG_CONCAVE {
        let spec = EnsembleSpec::log_concave(family, row.clone())?;
        let cov = estimate_covariance(&spec, 50_000, 1)?;
        let z = cov
            .means
            .iter()
            .zip(&cov.mean_se)
            .map(|(m, s)| m.abs() / s)
            .fold(0.0, f64::max);
        let y = sample_row(&spec, &mut derive_substream(1, 0))?;
        let head: Vec<String> = y.iter().take(4).map(|v| format!("{v:+.3}")).collect();
        println!(
            "{:<14} {:>10.4} {:>10.2}   [{} ...]",
            family.as_str(),
            cov.max_deviation,
            z,
            head.join(", ")
        );
    }

    // structured laws: rows scaled by A, heavy-tailed mixtures, β-regular entries
    let coeff = CoeffMatrix::identity(4, 4)?;
    let specs = [
        EnsembleSpec::log_concave(Family::Laplace, coeff.clone())?,
        EnsembleSpec::gaussian_mixture(coeff.clone(), 1.0, MixingLaw::Rows(Family::Gaussian))?,
        EnsembleSpec::beta_regular(coeff.clone(), 0.5, 2.0)?,
        EnsembleSpec::unconditional(EnsembleSpec::log_concave(Family::BallUniform, coeff)?)?,
    ];
    for spec in specs {
        let x = SampleBatch::new(spec.clone(), 1, 3)?.matrix(0)?;
        println!("\n{}\n{x:.3}", spec.summary());
    }
    Ok(())
}
