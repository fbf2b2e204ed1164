//! Experiment configuration: INI-style `key = value` files with `[experiment]`,
//! `[grid]` and `[params]` sections, environment overrides and CLI overrides.
//!
//! ```text
//! [experiment]
//! id = sweep-main
//! target = main11, reverse12
//! family = gaussian
//! trials = 100
//! seed = 42
//!
//! [grid]
//! dims = 16x16, 64x64
//! pq = 2:2, 3:4
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bounds::InequalityId;
use crate::ensembles::{EnsembleSpec, Family, MixingLaw};
use crate::error::{Error, Result};
use crate::momentslab::CheckId;
use crate::norms::CoeffMatrix;

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "LPQLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Inequality(InequalityId),
    Check(CheckId),
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Inequality(id) => id.as_str(),
            Target::Check(id) => id.as_str(),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<InequalityId>()
            .map(Target::Inequality)
            .or_else(|_| s.parse::<CheckId>().map(Target::Check))
            .map_err(|_| Error::UnknownId(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(Error::Config(format!(
                "unknown output format `{s}` (csv or jsonl)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoeffKind {
    #[default]
    Ones,
    Identity,
}

impl CoeffKind {
    pub fn build(self, m: usize, n: usize) -> Result<CoeffMatrix> {
        match self {
            CoeffKind::Ones => CoeffMatrix::ones(m, n),
            CoeffKind::Identity => CoeffMatrix::identity(m, n),
        }
    }
}

impl FromStr for CoeffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(CoeffKind::Ones),
            "identity" => Ok(CoeffKind::Identity),
            _ => Err(Error::Config(format!(
                "unknown coefficient matrix `{s}` (ones or identity)"
            ))),
        }
    }
}

/// Weights for the Sudakov check.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorKind {
    Ones,
    /// `a_k = 1/k`
    Harmonic,
    /// `ones / √n`
    OnesNormalized,
    /// `e_1`
    First,
    Explicit(Vec<f64>),
}

impl VectorKind {
    pub fn build(&self, len: usize) -> Vec<f64> {
        match self {
            VectorKind::Ones => vec![1.0; len],
            VectorKind::Harmonic => (1..=len).map(|k| 1.0 / k as f64).collect(),
            VectorKind::OnesNormalized => vec![1.0 / (len as f64).sqrt(); len],
            VectorKind::First => (0..len).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
            VectorKind::Explicit(v) => v.clone(),
        }
    }
}

impl FromStr for VectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(VectorKind::Ones),
            "harmonic" => Ok(VectorKind::Harmonic),
            "ones_normalized" => Ok(VectorKind::OnesNormalized),
            "e1" => Ok(VectorKind::First),
            _ => parse_list(s, "vector").map(VectorKind::Explicit),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    /// Ids run on each grid cell; inequality ids share draws.
    pub targets: Vec<Target>,
    pub family: Family,
    /// Wrapped family for `unconditional_wrap`.
    pub base_family: Option<Family>,
    pub mixing: MixingLaw,
    pub coeff: CoeffKind,
    pub dims: Vec<(usize, usize)>,
    pub pq: Vec<(f64, f64)>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub l: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Relative tolerance of the norm engine.
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub improved_exponents: bool,
    pub reverse_threshold: f64,
    /// Fill the `runtime_ms` column (breaks byte-identical reruns).
    pub record_runtime: bool,
    pub norm_p: f64,
    pub u_grid: Vec<f64>,
    pub c4: f64,
    pub r_grid: Vec<f64>,
    pub a: VectorKind,
    pub t: VectorKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment_id: "experiment".into(),
            targets: vec![Target::Inequality(InequalityId::Main11)],
            family: Family::Gaussian,
            base_family: None,
            mixing: MixingLaw::Rows(Family::Gaussian),
            coeff: CoeffKind::Ones,
            dims: vec![(16, 16)],
            pq: vec![(2.0, 2.0)],
            gamma: None,
            beta: None,
            l: None,
            trials: 100,
            seed: 0,
            restarts: 4,
            tol: 1e-9,
            output: None,
            format: OutputFormat::Csv,
            improved_exponents: false,
            reverse_threshold: 0.25,
            record_runtime: false,
            norm_p: 2.0,
            u_grid: vec![0.5, 1.0, 2.0],
            c4: std::f64::consts::E * std::f64::consts::E,
            r_grid: vec![2.0, 4.0, 8.0, 16.0],
            a: VectorKind::Harmonic,
            t: VectorKind::OnesNormalized,
        }
    }
}

fn config_err(key: &str, value: &str, why: impl fmt::Display) -> Error {
    Error::Config(format!("`{key} = {value}`: {why}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| config_err(key, value, e))
}

fn parse_list(value: &str, key: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| parse_num::<f64>(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_err(key, value, "expected true or false")),
    }
}

/// `16x16, 64x32` or `16, 64` (square).
pub fn parse_dims(value: &str) -> Result<Vec<(usize, usize)>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|cell| match cell.split_once(['x', 'X']) {
            Some((m, n)) => Ok((parse_num("dims", m)?, parse_num("dims", n)?)),
            None => {
                let m = parse_num("dims", cell)?;
                Ok((m, m))
            }
        })
        .collect()
}

/// `2:2, 3:4`
pub fn parse_pq(value: &str) -> Result<Vec<(f64, f64)>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|cell| {
            let (p, q) = cell
                .split_once(':')
                .ok_or_else(|| config_err("pq", cell, "expected p:q"))?;
            Ok((parse_num("pq", p)?, parse_num("pq", q)?))
        })
        .collect()
}

const EXPERIMENT_KEYS: &[&str] = &[
    "id",
    "target",
    "family",
    "base",
    "mixing",
    "coeff",
    "trials",
    "seed",
    "restarts",
    "tol",
    "output",
    "format",
    "improved_exponents",
    "reverse_threshold",
    "record_runtime",
];
const GRID_KEYS: &[&str] = &["dims", "pq"];
const PARAM_KEYS: &[&str] = &[
    "gamma", "beta", "L", "norm_p", "u_grid", "c4", "r_grid", "a", "t",
];

impl ExperimentConfig {
    /// Parses a configuration file; relative output paths stay relative to the
    /// working directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses `[section]` headers and `key = value` lines; `#` and `;`
    /// start comments. Later assignments override earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("malformed section header `{line}`")))?
                    .trim();
                if !matches!(name, "experiment" | "grid" | "params") {
                    return Err(at(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
            let key = key.trim();
            let allowed = match section.as_deref() {
                Some("experiment") => EXPERIMENT_KEYS,
                Some("grid") => GRID_KEYS,
                Some(_) => PARAM_KEYS,
                None => return Err(at("keys must appear under a [section]".into())),
            };
            if !allowed.contains(&key) {
                return Err(at(format!(
                    "unknown key `{key}` in [{}]",
                    section.as_deref().unwrap_or("")
                )));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "id" => self.experiment_id = v.to_string(),
            "target" => {
                self.targets = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Target>().map_err(|e| config_err(key, value, e)))
                    .collect::<Result<_>>()?
            }
            "family" => self.family = v.parse().map_err(|e| config_err(key, value, e))?,
            "base" => self.base_family = Some(v.parse().map_err(|e| config_err(key, value, e))?),
            "mixing" => self.mixing = v.parse().map_err(|e| config_err(key, value, e))?,
            "coeff" => self.coeff = v.parse()?,
            "trials" => self.trials = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "restarts" => self.restarts = parse_num(key, v)?,
            "tol" => self.tol = parse_num(key, v)?,
            "output" => self.output = Some(PathBuf::from(v)),
            "format" => self.format = v.parse()?,
            "improved_exponents" => self.improved_exponents = parse_bool(key, v)?,
            "reverse_threshold" => self.reverse_threshold = parse_num(key, v)?,
            "record_runtime" => self.record_runtime = parse_bool(key, v)?,
            "dims" => self.dims = parse_dims(v)?,
            "pq" => self.pq = parse_pq(v)?,
            "gamma" => self.gamma = Some(parse_num(key, v)?),
            "beta" => self.beta = Some(parse_num(key, v)?),
            "L" => self.l = Some(parse_num(key, v)?),
            "norm_p" => self.norm_p = parse_num(key, v)?,
            "u_grid" => self.u_grid = parse_list(v, key)?,
            "c4" => self.c4 = parse_num(key, v)?,
            "r_grid" => self.r_grid = parse_list(v, key)?,
            "a" => self.a = v.parse()?,
            "t" => self.t = v.parse()?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `LPQLAB_SEED` if it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(value) = std::env::var(SEED_ENV) {
            self.seed = parse_num(SEED_ENV, &value)?;
        }
        Ok(())
    }

    /// Static checks of the whole grid.
    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Config("no target".into()));
        }
        if self.trials < 2 {
            return Err(Error::Config(format!(
                "trials must be >= 2, got {}",
                self.trials
            )));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&(m, n)| m == 0 || n == 0) {
            return Err(Error::Config(
                "dims must be a non-empty list of positive sizes".into(),
            ));
        }
        if self.pq.is_empty() {
            return Err(Error::Config("pq grid is empty".into()));
        }
        let has_logs = self.targets.iter().any(|t| {
            matches!(
                t,
                Target::Inequality(
                    InequalityId::Main11
                        | InequalityId::Cor13
                        | InequalityId::Uncond16
                        | InequalityId::Lemma31
                        | InequalityId::Mixture42
                        | InequalityId::Beta52
                )
            )
        });
        if has_logs && self.dims.iter().any(|&(m, _)| m < 2) {
            return Err(Error::Config("m >= 2 required where log m appears".into()));
        }
        if self.family == Family::UnconditionalWrap && self.base_family.is_none() {
            return Err(Error::Config("unconditional_wrap needs `base`".into()));
        }
        if self.family == Family::GaussianMixture && self.gamma.is_none() {
            return Err(Error::Config("gaussian_mixture needs `gamma`".into()));
        }
        if self.family == Family::BetaRegular && (self.beta.is_none() || self.l.is_none()) {
            return Err(Error::Config("beta_regular needs `beta` and `L`".into()));
        }
        Ok(())
    }

    /// The ensemble of one grid cell.
    pub fn spec_for(&self, m: usize, n: usize) -> Result<EnsembleSpec> {
        build_spec(
            self.family,
            self.base_family,
            self.mixing,
            self.coeff.build(m, n)?,
            self.gamma,
            self.beta,
            self.l,
        )
    }
}

fn build_spec(
    family: Family,
    base: Option<Family>,
    mixing: MixingLaw,
    coeff: CoeffMatrix,
    gamma: Option<f64>,
    beta: Option<f64>,
    l: Option<f64>,
) -> Result<EnsembleSpec> {
    let missing = |what: &str| Error::Config(format!("family `{family}` needs `{what}`"));
    match family {
        Family::GaussianMixture => {
            EnsembleSpec::gaussian_mixture(coeff, gamma.ok_or_else(|| missing("gamma"))?, mixing)
        }
        Family::BetaRegular => EnsembleSpec::beta_regular(
            coeff,
            beta.ok_or_else(|| missing("beta"))?,
            l.ok_or_else(|| missing("L"))?,
        ),
        Family::UnconditionalWrap => {
            let base = base.ok_or_else(|| missing("base"))?;
            EnsembleSpec::unconditional(build_spec(base, None, mixing, coeff, gamma, beta, l)?)
        }
        _ => EnsembleSpec::log_concave(family, coeff),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# main sweep
[experiment]
id = demo
target = main11, reverse12
family = laplace
trials = 10
seed = 7

[grid]
dims = 16x16, 64
pq = 2:2, 3:4

[params]
u_grid = 0.5, 1, 2
";

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.experiment_id, "demo");
        assert_eq!(
            cfg.targets,
            vec![
                Target::Inequality(InequalityId::Main11),
                Target::Inequality(InequalityId::Reverse12)
            ]
        );
        assert_eq!(cfg.family, Family::Laplace);
        assert_eq!(cfg.dims, vec![(16, 16), (64, 64)]);
        assert_eq!(cfg.pq, vec![(2.0, 2.0), (3.0, 4.0)]);
        assert_eq!(cfg.u_grid, vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.seed, 7);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(matches!(
            ExperimentConfig::parse("[experiment]\nbogus = 1\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("[other]\nid = 1\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("[grid]\npq = 2-2\n"),
            Err(Error::Config(_))
        ));
        assert!(ExperimentConfig::parse("[experiment]\ntarget = nope\n").is_err());
    }

    #[test]
    fn validation_catches_log_dimension() {
        let cfg = ExperimentConfig {
            dims: vec![(1, 4)],
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            dims: vec![(1, 4)],
            targets: vec![Target::Inequality(InequalityId::Reverse12)],
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn builds_wrapped_specs() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("family", "unconditional_wrap").unwrap();
        cfg.set("base", "ball_uniform").unwrap();
        let spec = cfg.spec_for(3, 4).unwrap();
        assert_eq!(spec.family(), Family::UnconditionalWrap);
        assert_eq!(spec.base().unwrap().family(), Family::BallUniform);
    }

    #[test]
    fn vector_kinds() {
        assert_eq!(
            "harmonic".parse::<VectorKind>().unwrap().build(3),
            vec![1.0, 0.5, 1.0 / 3.0]
        );
        assert_eq!(
            "1, 2".parse::<VectorKind>().unwrap().build(2),
            vec![1.0, 2.0]
        );
        assert_eq!(
            "ones_normalized".parse::<VectorKind>().unwrap().build(16),
            vec![0.25; 16]
        );
    }
}
