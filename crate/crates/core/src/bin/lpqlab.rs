use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lpqlab::bounds::InequalityId;
use lpqlab::ensembles::SampleBatch;
use lpqlab::harness::config::{parse_dims, ExperimentConfig, OutputFormat, Target};
use lpqlab::harness::output::{write_csv, write_jsonl};
use lpqlab::harness::{emit_results, run_config, Bands, ResultRow};
use lpqlab::momentslab::CheckId;
use lpqlab::opnorm::{mc_expected_opnorm_with, PowerIteration};
use lpqlab::{Error, PQParams};

#[derive(Parser)]
#[command(
    name = "lpqlab",
    version,
    about = "Monte Carlo lab for p'->q operator norms of structured random matrices"
)]
struct Cli {
    /// Print the inequality and check registry and exit.
    #[arg(long)]
    list_ids: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Print sampled matrices as CSV.
    Sample(Common),
    /// Estimate the operator norm of a sampled matrix, or its mean over --trials.
    Opnorm(Common),
    /// Check one inequality on a grid.
    Verify {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run one moment check on a grid.
    Moments {
        #[arg(long)]
        check: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a configuration file.
    Sweep(Common),
}

#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    /// Wrapped family for unconditional_wrap.
    #[arg(long)]
    base: Option<String>,
    /// Mixing law for gaussian_mixture: a row family or whole_ball.
    #[arg(long)]
    mixing: Option<String>,
    /// Coefficient matrix: ones or identity.
    #[arg(long)]
    coeff: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Grid of sizes such as "16x16, 64x64" (overridden by --m/--n).
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    improved_exponents: bool,
    /// Exit with status 3 if a row leaves its acceptance band.
    #[arg(long)]
    assert: bool,
    /// Band file used by --assert instead of the shipped one.
    #[arg(long)]
    bands: Option<PathBuf>,
}

impl Common {
    /// File, then LPQLAB_SEED, then flags.
    fn config(&self, target: Option<Target>) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply_env()?;
        if let Some(t) = target {
            cfg.targets = vec![t];
        }
        let text = [
            ("family", &self.family),
            ("base", &self.base),
            ("mixing", &self.mixing),
            ("coeff", &self.coeff),
            ("format", &self.format),
        ];
        for (key, value) in text {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(d) = &self.dims {
            cfg.dims = parse_dims(d)?;
        }
        if self.m.is_some() || self.n.is_some() {
            let (m0, n0) = cfg.dims.first().copied().unwrap_or((16, 16));
            let m = self.m.unwrap_or(m0);
            cfg.dims = vec![(m, self.n.unwrap_or(if self.m.is_some() { m } else { n0 }))];
        }
        if self.p.is_some() || self.q.is_some() {
            let (p0, q0) = cfg.pq.first().copied().unwrap_or((2.0, 2.0));
            cfg.pq = vec![(self.p.unwrap_or(p0), self.q.unwrap_or(q0))];
        }
        cfg.gamma = self.gamma.or(cfg.gamma);
        cfg.beta = self.beta.or(cfg.beta);
        cfg.l = self.l.or(cfg.l);
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.restarts = self.restarts.unwrap_or(cfg.restarts);
        cfg.improved_exponents |= self.improved_exponents;
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok(cfg)
    }
}

enum Failure {
    Config(String),
    Runtime(String),
    Band(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Csv { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn list_ids() {
    println!("inequalities:");
    for id in InequalityId::ALL {
        println!("  {:<11} {}", id.as_str(), id.statement());
    }
    println!("checks:");
    for id in CheckId::ALL {
        println!("  {:<11} {}", id.as_str(), id.statement());
    }
}

fn write_rows(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => emit_results(rows, path, cfg.format)?,
        None => {
            let stdout = io::stdout().lock();
            match cfg.format {
                OutputFormat::Csv => {
                    write_csv(rows, stdout).map_err(|e| Failure::Runtime(e.to_string()))?
                }
                OutputFormat::Jsonl => write_jsonl(rows, stdout)?,
            }
        }
    }
    Ok(())
}

fn run_grid(common: &Common, target: Option<Target>) -> Result<(), Failure> {
    let cfg = common.config(target)?;
    let rows = run_config(&cfg)?;
    write_rows(&cfg, &rows)?;
    if common.assert {
        let bands = match &common.bands {
            Some(path) => Bands::load(path)?,
            None => Bands::shipped(),
        };
        let violations: Vec<String> = rows.iter().flat_map(|r| bands.violations(r)).collect();
        if !violations.is_empty() {
            return Err(Failure::Band(violations));
        }
    }
    Ok(())
}

fn sample(common: &Common) -> Result<(), Failure> {
    let cfg = common.config(None)?;
    let (m, n) = cfg.dims[0];
    let count = common.trials.unwrap_or(1);
    let batch = SampleBatch::new(cfg.spec_for(m, n)?, count, cfg.seed)?;
    let mut text = String::new();
    for (k, x) in batch.iter().enumerate() {
        if k > 0 {
            text.push('\n');
        }
        for row in x?.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
    }
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn opnorm(common: &Common) -> Result<(), Failure> {
    let cfg = common.config(None)?;
    let (m, n) = cfg.dims[0];
    let (p, q) = cfg.pq[0];
    let pq = PQParams::new(p, q)?;
    let spec = cfg.spec_for(m, n)?;
    let mut out = io::stdout().lock();
    match common.trials {
        Some(t) if t > 1 => {
            let engine = PowerIteration::monte_carlo()
                .with_restarts(cfg.restarts)
                .with_tol(cfg.tol);
            let est = mc_expected_opnorm_with(&spec, &pq, t, cfg.seed, &engine)?;
            writeln!(out, "mean,se,upper_mean,trials")?;
            writeln!(
                out,
                "{:.9e},{:.9e},{:.9e},{}",
                est.mean, est.se, est.upper_mean, est.trials
            )?;
        }
        _ => {
            let x = SampleBatch::new(spec, 1, cfg.seed)?.matrix(0)?;
            let est = PowerIteration::default()
                .with_restarts(cfg.restarts)
                .with_seed(cfg.seed)
                .run(x.view(), &pq);
            writeln!(out, "lower,upper,restarts_used,iterations,converged")?;
            writeln!(
                out,
                "{:.9e},{:.9e},{},{},{}",
                est.lower, est.upper, est.restarts_used, est.iterations, est.converged
            )?;
            let w: Vec<String> = est.witness.iter().map(|v| format!("{v:.9e}")).collect();
            writeln!(out, "witness,{}", w.join(","))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_ids {
        list_ids();
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("lpqlab: no subcommand given (see --help)");
        return ExitCode::from(2);
    };
    let result = match &command {
        Command::Sample(c) => sample(c),
        Command::Opnorm(c) => opnorm(c),
        Command::Verify { id, common } => id
            .parse::<InequalityId>()
            .map_err(Failure::from)
            .and_then(|id| run_grid(common, Some(Target::Inequality(id)))),
        Command::Moments { check, common } => check
            .parse::<CheckId>()
            .map_err(Failure::from)
            .and_then(|id| run_grid(common, Some(Target::Check(id)))),
        Command::Sweep(c) => {
            if c.config.is_none() {
                Err(Failure::Config("sweep needs --config".into()))
            } else {
                run_grid(c, None)
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("lpqlab: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("lpqlab: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::Band(violations)) => {
            for v in violations {
                eprintln!("band violation: {v}");
            }
            ExitCode::from(3)
        }
    }
}
