//! Canonical experiment grids shared by the examples and the acceptance run.

use crate::bounds::InequalityId;
use crate::ensembles::{Family, MixingLaw};
use crate::harness::config::{ExperimentConfig, Target};

/// `(p, q) ∈ {2, 3, 4}²`
pub const FULL_PQ: [(f64, f64); 9] = [
    (2.0, 2.0),
    (2.0, 3.0),
    (2.0, 4.0),
    (3.0, 2.0),
    (3.0, 3.0),
    (3.0, 4.0),
    (4.0, 2.0),
    (4.0, 3.0),
    (4.0, 4.0),
];

pub const MIXTURE_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const BETA_VALUES: [f64; 3] = [0.5, 1.0, 1.5];
/// Nominal regularity constant recorded with β-regular laws.
pub const BETA_L: f64 = 2.0;

fn ids(list: &[InequalityId]) -> Vec<Target> {
    list.iter().map(|id| Target::Inequality(*id)).collect()
}

/// main11 and reverse12 on shared draws, `A = ones`, over `dims` and [`FULL_PQ`].
pub fn main_sweep(family: Family, dims: &[usize], trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment_id: format!("main-sweep-{family}"),
        targets: ids(&[InequalityId::Main11, InequalityId::Reverse12]),
        family,
        dims: dims.iter().map(|&d| (d, d)).collect(),
        pq: FULL_PQ.to_vec(),
        trials,
        seed,
        ..ExperimentConfig::default()
    }
}

/// cor13, prop15, uncond16, mixture42 and beta52 at `m = n = dim`.
pub fn corollary_suite(dim: usize, trials: usize, seed: u64) -> Vec<ExperimentConfig> {
    let base = ExperimentConfig {
        dims: vec![(dim, dim)],
        pq: FULL_PQ.to_vec(),
        trials,
        seed,
        ..ExperimentConfig::default()
    };
    let mut out = Vec::new();
    for family in Family::LOG_CONCAVE {
        let mut list = vec![InequalityId::Cor13, InequalityId::Prop15];
        if family.is_product() {
            list.push(InequalityId::Uncond16);
        }
        out.push(ExperimentConfig {
            experiment_id: format!("corollaries-{family}"),
            targets: ids(&list),
            family,
            ..base.clone()
        });
    }
    for wrapped in [Family::BallUniform, Family::L1BallUniform] {
        out.push(ExperimentConfig {
            experiment_id: format!("uncond16-wrap-{wrapped}"),
            targets: ids(&[InequalityId::Uncond16]),
            family: Family::UnconditionalWrap,
            base_family: Some(wrapped),
            ..base.clone()
        });
    }
    for gamma in MIXTURE_GAMMAS {
        out.push(ExperimentConfig {
            experiment_id: format!("mixture42-gamma{gamma}"),
            targets: ids(&[InequalityId::Mixture42]),
            family: Family::GaussianMixture,
            mixing: MixingLaw::Rows(Family::Gaussian),
            gamma: Some(gamma),
            ..base.clone()
        });
    }
    for beta in BETA_VALUES {
        out.push(ExperimentConfig {
            experiment_id: format!("beta52-beta{beta}"),
            targets: ids(&[InequalityId::Beta52]),
            family: Family::BetaRegular,
            beta: Some(beta),
            l: Some(BETA_L),
            ..base.clone()
        });
    }
    out
}

/// Ids whose bands come from calibration.
pub const CALIBRATED_IDS: [InequalityId; 5] = [
    InequalityId::Cor13,
    InequalityId::Prop15,
    InequalityId::Uncond16,
    InequalityId::Mixture42,
    InequalityId::Beta52,
];

/// A band above an observed maximum: `margin · max`, rounded up to two significant digits.
pub fn band_from_max(max_ratio: f64, margin: f64) -> f64 {
    let v = max_ratio * margin;
    if !(v > 0.0 && v.is_finite()) {
        return v;
    }
    let scale = 10f64.powi(v.log10().floor() as i32 - 1);
    let band = (v / scale).ceil() * scale;
    // drop the rounding residue of the multiplication
    format!("{band:.1e}")
        .parse()
        .expect("formatted float parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_validate() {
        for cfg in corollary_suite(32, 100, 1) {
            cfg.validate().unwrap();
        }
        main_sweep(Family::Laplace, &[16, 64], 10, 1)
            .validate()
            .unwrap();
    }

    #[test]
    fn band_rounding() {
        assert_eq!(band_from_max(0.1234, 1.25), 0.16);
        assert_eq!(band_from_max(0.2322, 1.5), 0.35);
        assert!((band_from_max(2.0, 1.0) - 2.0).abs() < 1e-12);
        assert!(band_from_max(0.0, 1.25) == 0.0);
    }
}
