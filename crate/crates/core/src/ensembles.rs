//! Samplers for the structured random matrices `X_ij = A_ij · Y_ij`.
//!
//! Five isotropic log-concave row laws are provided (three product laws and
//! two uniform distributions on convex bodies), together with Gaussian
//! mixtures `|Z_ij|^γ B_ij G_ij`, β-regular symmetric entries
//! `ε |g|^{2β} / c_β`, and a sign-randomizing unconditional wrapper.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::harness::stream::derive_substream;
use crate::norms::{mean_and_se, CoeffMatrix};

/// Rows drawn per substream when building large row pools.
pub(crate) const ROW_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Laplace,
    CubeUniform,
    BallUniform,
    L1BallUniform,
    GaussianMixture,
    BetaRegular,
    UnconditionalWrap,
}

impl Family {
    pub const LOG_CONCAVE: [Family; 5] = [
        Family::Gaussian,
        Family::Laplace,
        Family::CubeUniform,
        Family::BallUniform,
        Family::L1BallUniform,
    ];

    pub const ALL: [Family; 8] = [
        Family::Gaussian,
        Family::Laplace,
        Family::CubeUniform,
        Family::BallUniform,
        Family::L1BallUniform,
        Family::GaussianMixture,
        Family::BetaRegular,
        Family::UnconditionalWrap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Laplace => "laplace",
            Family::CubeUniform => "cube_uniform",
            Family::BallUniform => "ball_uniform",
            Family::L1BallUniform => "l1ball_uniform",
            Family::GaussianMixture => "gaussian_mixture",
            Family::BetaRegular => "beta_regular",
            Family::UnconditionalWrap => "unconditional_wrap",
        }
    }

    pub fn is_log_concave(self) -> bool {
        Self::LOG_CONCAVE.contains(&self)
    }

    /// Product laws have independent coordinates within a row.
    pub fn is_product(self) -> bool {
        matches!(
            self,
            Family::Gaussian | Family::Laplace | Family::CubeUniform
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family `{s}`")))
    }
}

/// Scale making the canonical representative of a log-concave family isotropic.
pub fn isotropic_scale(family: Family, n: usize) -> Result<f64> {
    let n = n as f64;
    match family {
        Family::Gaussian => Ok(1.0),
        Family::Laplace => Ok(std::f64::consts::FRAC_1_SQRT_2),
        Family::CubeUniform => Ok(3f64.sqrt()),
        Family::BallUniform => Ok((n + 2.0).sqrt()),
        Family::L1BallUniform => Ok(((n + 1.0) * (n + 2.0) / 2.0).sqrt()),
        other => domain(format!(
            "family `{other}` has no scalar isotropic normalization"
        )),
    }
}

/// `E|g|^s` for a standard Gaussian `g`, `s > −1`.
pub fn gaussian_abs_moment(s: f64) -> f64 {
    (s / 2.0 * std::f64::consts::LN_2 + libm::lgamma((s + 1.0) / 2.0)).exp()
        / std::f64::consts::PI.sqrt()
}

/// `c_β = (E|g|^{4β})^{1/2}`, the normalizer giving `ε|g|^{2β}/c_β` unit variance.
pub fn beta_normalizer(beta: f64) -> f64 {
    gaussian_abs_moment(4.0 * beta).sqrt()
}

/// How the mixing matrix `Z` of a Gaussian mixture is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingLaw {
    /// Independent rows from one of the five log-concave row families.
    Rows(Family),
    /// `Z` uniform on the isotropic Euclidean ball of `ℝ^{mn}`.
    WholeBall,
}

impl fmt::Display for MixingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixingLaw::Rows(fam) => write!(f, "{fam}"),
            MixingLaw::WholeBall => f.write_str("whole_ball"),
        }
    }
}

impl FromStr for MixingLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "whole_ball" {
            return Ok(MixingLaw::WholeBall);
        }
        let fam: Family = s.parse()?;
        if !fam.is_log_concave() {
            return domain(format!("mixing law must be log-concave, got `{s}`"));
        }
        Ok(MixingLaw::Rows(fam))
    }
}

/// Full description of the law of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    family: Family,
    coeff: CoeffMatrix,
    gamma: Option<f64>,
    mixing: MixingLaw,
    beta: Option<f64>,
    l: Option<f64>,
    base: Option<Box<EnsembleSpec>>,
}

impl EnsembleSpec {
    /// One of the five isotropic log-concave row families.
    pub fn log_concave(family: Family, coeff: CoeffMatrix) -> Result<Self> {
        if !family.is_log_concave() {
            return domain(format!("`{family}` is not a log-concave row family"));
        }
        Ok(Self {
            family,
            coeff,
            gamma: None,
            mixing: MixingLaw::Rows(Family::Gaussian),
            beta: None,
            l: None,
            base: None,
        })
    }

    pub fn gaussian_mixture(coeff: CoeffMatrix, gamma: f64, mixing: MixingLaw) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return domain(format!("mixture exponent gamma must be >= 0, got {gamma}"));
        }
        if let MixingLaw::Rows(f) = mixing {
            if !f.is_log_concave() {
                return domain(format!("mixing rows must be log-concave, got `{f}`"));
            }
        }
        Ok(Self {
            family: Family::GaussianMixture,
            coeff,
            gamma: Some(gamma),
            mixing,
            beta: None,
            l: None,
            base: None,
        })
    }

    /// `l` is the nominal regularity constant `L` recorded with the law.
    pub fn beta_regular(coeff: CoeffMatrix, beta: f64, l: f64) -> Result<Self> {
        if !(beta >= 0.5 && beta.is_finite()) {
            return domain(format!("beta must be >= 1/2, got {beta}"));
        }
        if !(l >= 1.0 && l.is_finite()) {
            return domain(format!("L must be >= 1, got {l}"));
        }
        Ok(Self {
            family: Family::BetaRegular,
            coeff,
            gamma: None,
            mixing: MixingLaw::Rows(Family::Gaussian),
            beta: Some(beta),
            l: Some(l),
            base: None,
        })
    }

    /// Multiplies every entry of `base` by an independent random sign.
    pub fn unconditional(base: EnsembleSpec) -> Result<Self> {
        if base.family == Family::UnconditionalWrap {
            return domain("nested unconditional wrappers");
        }
        Ok(Self {
            family: Family::UnconditionalWrap,
            coeff: base.coeff.clone(),
            gamma: None,
            mixing: MixingLaw::Rows(Family::Gaussian),
            beta: None,
            l: None,
            base: Some(Box::new(base)),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coeff(&self) -> &CoeffMatrix {
        &self.coeff
    }

    pub fn m(&self) -> usize {
        self.coeff.m()
    }

    pub fn n(&self) -> usize {
        self.coeff.n()
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn mixing(&self) -> MixingLaw {
        self.mixing
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn l(&self) -> Option<f64> {
        self.l
    }

    pub fn base(&self) -> Option<&EnsembleSpec> {
        self.base.as_deref()
    }

    /// Same law with a different coefficient matrix.
    pub fn with_coeff(&self, coeff: CoeffMatrix) -> Self {
        let mut out = self.clone();
        if let Some(base) = out.base.as_mut() {
            **base = base.with_coeff(coeff.clone());
        }
        out.coeff = coeff;
        out
    }

    /// Short human-readable description used in reports.
    pub fn summary(&self) -> String {
        let dims = format!("{}x{}", self.m(), self.n());
        match self.family {
            Family::GaussianMixture => format!(
                "gaussian_mixture[gamma={},z={}] {dims}",
                self.gamma.unwrap_or(0.0),
                self.mixing
            ),
            Family::BetaRegular => format!(
                "beta_regular[beta={},L={}] {dims}",
                self.beta.unwrap_or(0.5),
                self.l.unwrap_or(1.0)
            ),
            Family::UnconditionalWrap => format!(
                "unconditional_wrap[{}]",
                self.base.as_ref().map_or_else(String::new, |b| b.summary())
            ),
            f => format!("{f} {dims}"),
        }
    }

    /// True when the rows of `X` are independent with `X_i = A_i ∘ R_i` for i.i.d. `R_i`.
    pub fn has_row_law(&self) -> bool {
        match self.family {
            Family::GaussianMixture => matches!(self.mixing, MixingLaw::Rows(_)),
            Family::UnconditionalWrap => self.base.as_ref().is_some_and(|b| b.has_row_law()),
            _ => true,
        }
    }

    /// Fills `out` (length `n`) with one unit-coefficient row `R_i`.
    pub(crate) fn fill_unit_row<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.family {
            Family::Gaussian
            | Family::Laplace
            | Family::CubeUniform
            | Family::BallUniform
            | Family::L1BallUniform => fill_log_concave_row(self.family, rng, out),
            Family::GaussianMixture => {
                let MixingLaw::Rows(z_family) = self.mixing else {
                    unreachable!("whole-ball mixtures have no row law")
                };
                let gamma = self.gamma.unwrap_or(0.0);
                fill_log_concave_row(z_family, rng, out);
                for v in out.iter_mut() {
                    let g: f64 = rng.sample(StandardNormal);
                    *v = v.abs().powf(gamma) * g;
                }
            }
            Family::BetaRegular => {
                let beta = self.beta.unwrap_or(0.5);
                let c = beta_normalizer(beta);
                for v in out.iter_mut() {
                    *v = beta_regular_draw(rng, beta, c);
                }
            }
            Family::UnconditionalWrap => {
                let base = self.base.as_ref().expect("wrapper has a base");
                base.fill_unit_row(rng, out);
                for v in out.iter_mut() {
                    if rng.random::<bool>() {
                        *v = -*v;
                    }
                }
            }
        }
    }

    /// `count × n` pool of unit-coefficient rows, reproducible for a given seed.
    ///
    /// Rows are generated in chunks, chunk `k` from substream `(seed, k)`.
    pub fn sample_row_pool(&self, count: usize, seed: u64) -> Result<Array2<f64>> {
        if !self.has_row_law() {
            return Err(Error::Incompatible(format!(
                "`{}` has no i.i.d. row law",
                self.summary()
            )));
        }
        let n = self.n();
        let chunks = count.div_ceil(ROW_CHUNK);
        let parts: Vec<Vec<f64>> = (0..chunks)
            .into_par_iter()
            .map(|k| {
                let rows = ROW_CHUNK.min(count - k * ROW_CHUNK);
                let mut rng = derive_substream(seed, k as u64);
                let mut buf = vec![0.0; rows * n];
                for row in buf.chunks_mut(n) {
                    self.fill_unit_row(&mut rng, row);
                }
                buf
            })
            .collect();
        let flat: Vec<f64> = parts.into_iter().flatten().collect();
        Array2::from_shape_vec((count, n), flat).map_err(|e| Error::Domain(e.to_string()))
    }
}

fn beta_regular_draw<R: Rng + ?Sized>(rng: &mut R, beta: f64, c: f64) -> f64 {
    let g: f64 = rng.sample(StandardNormal);
    let mag = if beta == 0.5 {
        g.abs()
    } else {
        g.abs().powf(2.0 * beta)
    };
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    sign * mag / c
}

fn fill_log_concave_row<R: Rng + ?Sized>(family: Family, rng: &mut R, out: &mut [f64]) {
    let n = out.len();
    let scale = isotropic_scale(family, n).expect("log-concave family");
    match family {
        Family::Gaussian => {
            for v in out.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
        }
        Family::Laplace => {
            for v in out.iter_mut() {
                let e: f64 = rng.sample(Exp1);
                *v = if rng.random::<bool>() { e } else { -e } * scale;
            }
        }
        Family::CubeUniform => {
            for v in out.iter_mut() {
                *v = rng.random_range(-1.0..=1.0) * scale;
            }
        }
        Family::BallUniform => {
            fill_ball(rng, out);
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
        Family::L1BallUniform => {
            // (E_1..E_n)/Σ_{k≤n+1} E_k is uniform on the simplex corner {x ≥ 0, Σx ≤ 1}
            let mut total = 0.0;
            for v in out.iter_mut() {
                let e: f64 = rng.sample(Exp1);
                *v = e;
                total += e;
            }
            total += rng.sample::<f64, _>(Exp1);
            for v in out.iter_mut() {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                *v = sign * *v / total * scale;
            }
        }
        _ => unreachable!("not a log-concave row family"),
    }
}

/// Uniform point of the unit Euclidean ball: Gaussian direction times `U^{1/n}`.
fn fill_ball<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let n = out.len();
    let mut norm2 = 0.0;
    loop {
        for v in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v = g;
            norm2 += g * g;
        }
        if norm2 > 0.0 {
            break;
        }
    }
    let u: f64 = rng.random();
    let radius = u.powf(1.0 / n as f64) / norm2.sqrt();
    for v in out.iter_mut() {
        *v *= radius;
    }
}

/// One draw `Y_i` of an isotropic log-concave row family.
pub fn sample_row<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Array1<f64>> {
    if !spec.family().is_log_concave() {
        return domain(format!(
            "sample_row needs a log-concave row family, got `{}`",
            spec.family()
        ));
    }
    let mut out = vec![0.0; spec.n()];
    spec.fill_unit_row(rng, &mut out);
    Ok(Array1::from(out))
}

/// One realization of `X`.
pub fn sample_structured_matrix<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let (m, n) = (spec.m(), spec.n());
    if let Some(base) = spec.base() {
        if (base.m(), base.n()) != (m, n) {
            return domain("wrapper and base dimensions differ");
        }
    }
    let a = spec.coeff().entries();
    let mut x = Array2::zeros((m, n));
    if spec.has_row_law() {
        let mut row = vec![0.0; n];
        for i in 0..m {
            spec.fill_unit_row(rng, &mut row);
            for j in 0..n {
                x[[i, j]] = a[[i, j]] * row[j];
            }
        }
        return Ok(x);
    }
    match spec.family() {
        Family::GaussianMixture => {
            let gamma = spec.gamma().unwrap_or(0.0);
            let mut z = vec![0.0; m * n];
            fill_ball(rng, &mut z);
            let scale = ((m * n) as f64 + 2.0).sqrt();
            for (k, zk) in z.iter().enumerate() {
                let g: f64 = rng.sample(StandardNormal);
                let (i, j) = (k / n, k % n);
                x[[i, j]] = (zk * scale).abs().powf(gamma) * a[[i, j]] * g;
            }
        }
        Family::UnconditionalWrap => {
            let base = spec.base().expect("wrapper has a base");
            x = sample_structured_matrix(base, rng)?;
            for v in x.iter_mut() {
                if rng.random::<bool>() {
                    *v = -*v;
                }
            }
        }
        _ => unreachable!("row-law families handled above"),
    }
    Ok(x)
}

/// `T` realizations of `X`, realization `t` drawn from substream `(seed, t)`.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub seed: u64,
}

impl SampleBatch {
    pub fn new(spec: EnsembleSpec, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            return domain("a batch needs at least one trial");
        }
        Ok(Self { spec, trials, seed })
    }

    pub fn matrix(&self, trial: usize) -> Result<Array2<f64>> {
        sample_structured_matrix(&self.spec, &mut derive_substream(self.seed, trial as u64))
    }

    /// Streams the realizations in trial order.
    pub fn iter(&self) -> impl Iterator<Item = Result<Array2<f64>>> + '_ {
        (0..self.trials).map(move |t| self.matrix(t))
    }

    /// All realizations, generated in parallel; identical for any thread count.
    pub fn collect(&self) -> Result<Vec<Array2<f64>>> {
        (0..self.trials)
            .into_par_iter()
            .map(|t| self.matrix(t))
            .collect()
    }
}

/// Empirical covariance of a row family and its distance from the identity.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub covariance: Array2<f64>,
    pub means: Array1<f64>,
    pub mean_se: Array1<f64>,
    /// `max_{jk} |Ĉ_jk − δ_jk|`
    pub max_deviation: f64,
    pub trials: usize,
}

pub fn estimate_covariance(
    spec: &EnsembleSpec,
    trials: usize,
    seed: u64,
) -> Result<CovarianceEstimate> {
    if !spec.family().is_log_concave() {
        return domain("covariance diagnostics need a log-concave row family");
    }
    if trials < 2 {
        return domain("estimate_covariance needs T >= 2");
    }
    let pool = spec.sample_row_pool(trials, seed)?;
    let n = spec.n();
    let mut means = Array1::zeros(n);
    let mut mean_se = Array1::zeros(n);
    for j in 0..n {
        let col = pool.column(j).to_vec();
        let (mu, se) = mean_and_se(&col);
        means[j] = mu;
        mean_se[j] = se;
    }
    let centered = &pool - &means.view().insert_axis(ndarray::Axis(0));
    let covariance = centered.t().dot(&centered) / (trials - 1) as f64;
    let mut max_deviation = 0.0f64;
    for ((j, k), v) in covariance.indexed_iter() {
        let target = if j == k { 1.0 } else { 0.0 };
        max_deviation = max_deviation.max((v - target).abs());
    }
    Ok(CovarianceEstimate {
        covariance,
        means,
        mean_se,
        max_deviation,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_norm;
    use approx::assert_relative_eq;

    fn spec(family: Family, m: usize, n: usize) -> EnsembleSpec {
        EnsembleSpec::log_concave(family, CoeffMatrix::ones(m, n).unwrap()).unwrap()
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("normal".parse::<Family>().is_err());
    }

    #[test]
    fn isotropic_scale_examples() {
        assert_relative_eq!(
            isotropic_scale(Family::CubeUniform, 7).unwrap(),
            1.7320508075688772
        );
        assert_relative_eq!(
            isotropic_scale(Family::Laplace, 1).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2
        );
        assert_relative_eq!(
            isotropic_scale(Family::BallUniform, 3).unwrap(),
            5f64.sqrt()
        );
        assert_relative_eq!(
            isotropic_scale(Family::L1BallUniform, 2).unwrap(),
            6f64.sqrt()
        );
        assert!(isotropic_scale(Family::BetaRegular, 2).is_err());
        assert!(isotropic_scale(Family::GaussianMixture, 2).is_err());
    }

    /// Monte Carlo oracle for the ball normalizations: the raw second moment of
    /// one coordinate (unscaled body) must match the closed form within 3 SE.
    #[test]
    fn ball_second_moments_match_closed_form() {
        let mut rng = derive_substream(2024, 0);
        let trials = 1_000_000;
        let mut buf = [0.0; 3];
        let mut sq = Vec::with_capacity(trials);
        for _ in 0..trials {
            fill_ball(&mut rng, &mut buf);
            sq.push(buf[0] * buf[0]);
        }
        let (mean, se) = mean_and_se(&sq);
        assert!((mean - 1.0 / 5.0).abs() <= 3.0 * se, "ball: {mean} ± {se}");

        let l1 = spec(Family::L1BallUniform, 1, 2);
        let s = isotropic_scale(Family::L1BallUniform, 2).unwrap();
        let mut buf = [0.0; 2];
        let mut sq = Vec::with_capacity(trials);
        for _ in 0..trials {
            l1.fill_unit_row(&mut rng, &mut buf);
            sq.push((buf[0] / s).powi(2));
        }
        let (mean, se) = mean_and_se(&sq);
        assert!(
            (mean - 2.0 / 12.0).abs() <= 3.0 * se,
            "l1 ball: {mean} ± {se}"
        );
    }

    #[test]
    fn gaussian_row_mean_and_variance() {
        let s = spec(Family::Gaussian, 1, 4);
        let t = 100_000;
        let pool = s.sample_row_pool(t, 5).unwrap();
        for j in 0..4 {
            let col = pool.column(j).to_vec();
            let (mean, se) = mean_and_se(&col);
            assert!(mean.abs() <= 3.0 / (t as f64).sqrt(), "mean {mean}");
            let sq: Vec<f64> = col.iter().map(|v| v * v).collect();
            let (var, var_se) = mean_and_se(&sq);
            assert!((var - 1.0).abs() <= 3.0 * var_se, "var {var} ± {var_se}");
            assert!(se > 0.0);
        }
    }

    #[test]
    fn ball_uniform_covariance_is_identity() {
        let est = estimate_covariance(&spec(Family::BallUniform, 1, 5), 1_000_000, 9).unwrap();
        assert!(
            est.max_deviation <= 0.02,
            "max deviation {}",
            est.max_deviation
        );
    }

    #[test]
    fn l1_ball_support() {
        let s = spec(Family::L1BallUniform, 1, 3);
        let radius = isotropic_scale(Family::L1BallUniform, 3).unwrap();
        let mut rng = derive_substream(3, 0);
        for _ in 0..10_000 {
            let y = sample_row(&s, &mut rng).unwrap();
            assert!(lp_norm(y.as_slice().unwrap(), 1.0).unwrap() <= radius * (1.0 + 1e-12));
        }
    }

    #[test]
    fn covariance_examples() {
        let g = estimate_covariance(&spec(Family::Gaussian, 1, 2), 100_000, 1).unwrap();
        assert!(g.max_deviation <= 0.05);
        let b = estimate_covariance(&spec(Family::BallUniform, 1, 8), 100_000, 2).unwrap();
        assert!(b.max_deviation <= 0.05);
        let c = estimate_covariance(&spec(Family::CubeUniform, 1, 1), 10_000, 3).unwrap();
        assert!((c.covariance[[0, 0]] - 1.0).abs() <= 0.05);
        assert!(estimate_covariance(&spec(Family::Gaussian, 1, 2), 1, 3).is_err());
    }

    #[test]
    fn zero_coefficients_annihilate_every_family() {
        let zero = CoeffMatrix::zeros(3, 4).unwrap();
        let mut specs: Vec<EnsembleSpec> = Family::LOG_CONCAVE
            .into_iter()
            .map(|f| EnsembleSpec::log_concave(f, zero.clone()).unwrap())
            .collect();
        specs.push(
            EnsembleSpec::gaussian_mixture(zero.clone(), 1.0, MixingLaw::Rows(Family::Gaussian))
                .unwrap(),
        );
        specs
            .push(EnsembleSpec::gaussian_mixture(zero.clone(), 2.0, MixingLaw::WholeBall).unwrap());
        specs.push(EnsembleSpec::beta_regular(zero.clone(), 1.0, 2.0).unwrap());
        specs.push(EnsembleSpec::unconditional(specs[3].clone()).unwrap());
        let mut rng = derive_substream(0, 0);
        for s in &specs {
            let x = sample_structured_matrix(s, &mut rng).unwrap();
            assert!(x.iter().all(|v| *v == 0.0), "{}", s.summary());
        }
    }

    #[test]
    fn identity_mask_keeps_off_diagonal_zero() {
        let s = EnsembleSpec::log_concave(Family::Gaussian, CoeffMatrix::identity(3, 3).unwrap())
            .unwrap();
        let batch = SampleBatch::new(s, 100_000, 17).unwrap();
        let mut diag = Vec::new();
        for x in batch.iter() {
            let x = x.unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert_eq!(x[[i, j]], 0.0);
                    }
                }
            }
            diag.push(x[[0, 0]] * x[[0, 0]]);
        }
        let (var, se) = mean_and_se(&diag);
        assert!((var - 1.0).abs() <= 3.0 * se);
    }

    #[test]
    fn beta_half_is_a_rademacher_gaussian() {
        assert_relative_eq!(beta_normalizer(0.5), 1.0, max_relative = 1e-14);
        let s = EnsembleSpec::beta_regular(CoeffMatrix::ones(1, 1).unwrap(), 0.5, 1.0).unwrap();
        let pool = s.sample_row_pool(100_000, 4).unwrap();
        let abs: Vec<f64> = pool.iter().map(|v| v.abs()).collect();
        let (mean, se) = mean_and_se(&abs);
        let target = (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean - target).abs() <= 3.0 * se, "{mean} vs {target}");
    }

    #[test]
    fn beta_normalizer_matches_monte_carlo() {
        // c_β² = E|g|^{4β}; cross-check the closed form at β = 1 (E g⁴ = 3) and by simulation at β = 0.75
        assert_relative_eq!(beta_normalizer(1.0), 3f64.sqrt(), max_relative = 1e-13);
        let mut rng = derive_substream(8, 0);
        let draws: Vec<f64> = (0..400_000)
            .map(|_| rng.sample::<f64, _>(StandardNormal).abs().powf(3.0))
            .collect();
        let (mean, se) = mean_and_se(&draws);
        assert!((mean - beta_normalizer(0.75).powi(2)).abs() <= 3.0 * se);
    }

    #[test]
    fn gaussian_abs_moment_closed_forms() {
        assert_relative_eq!(gaussian_abs_moment(2.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gaussian_abs_moment(4.0), 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            gaussian_abs_moment(1.0),
            (2.0 / std::f64::consts::PI).sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn reproducible_batches() {
        let s = EnsembleSpec::unconditional(spec(Family::L1BallUniform, 4, 5)).unwrap();
        let batch = SampleBatch::new(s, 16, 99).unwrap();
        let a = batch.collect().unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| batch.collect().unwrap());
        assert_eq!(a, b);
        let c: Vec<_> = batch.iter().map(|x| x.unwrap()).collect();
        assert_eq!(a, c);
    }

    #[test]
    fn spec_validation() {
        let a = CoeffMatrix::ones(2, 2).unwrap();
        assert!(EnsembleSpec::log_concave(Family::BetaRegular, a.clone()).is_err());
        assert!(EnsembleSpec::gaussian_mixture(a.clone(), -1.0, MixingLaw::WholeBall).is_err());
        assert!(EnsembleSpec::gaussian_mixture(
            a.clone(),
            1.0,
            MixingLaw::Rows(Family::BetaRegular)
        )
        .is_err());
        assert!(EnsembleSpec::beta_regular(a.clone(), 0.4, 1.0).is_err());
        assert!(EnsembleSpec::beta_regular(a.clone(), 1.0, 0.5).is_err());
        let w = EnsembleSpec::unconditional(EnsembleSpec::log_concave(Family::Laplace, a).unwrap())
            .unwrap();
        assert!(EnsembleSpec::unconditional(w).is_err());
        assert_eq!(
            "whole_ball".parse::<MixingLaw>().unwrap(),
            MixingLaw::WholeBall
        );
        assert!("beta_regular".parse::<MixingLaw>().is_err());
    }
}
