//! Executes an [`ExperimentConfig`] grid.

use std::time::Instant;

use crate::bounds::{verify_batch, verify_with, InequalityId, VerifyOptions};
use crate::ensembles::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Target};
use crate::harness::output::ResultRow;
use crate::momentslab::{self, CheckId, MomentReport};
use crate::norms::PQParams;
use crate::opnorm::PowerIteration;

impl ExperimentConfig {
    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            improved_exponents: self.improved_exponents,
            power: PowerIteration::monte_carlo()
                .with_restarts(self.restarts)
                .with_tol(self.tol),
            weak_restarts: self.restarts,
            reverse_threshold: self.reverse_threshold,
        }
    }
}

struct Cell<'a> {
    cfg: &'a ExperimentConfig,
    m: usize,
    n: usize,
}

impl Cell<'_> {
    fn error(&self, id: &str, pq: Option<(f64, f64)>, err: &Error) -> ResultRow {
        ResultRow::error(
            &self.cfg.experiment_id,
            id,
            self.cfg.family.as_str(),
            self.m,
            self.n,
            pq,
            self.cfg.trials,
            self.cfg.seed,
            &err.to_string(),
        )
    }

    fn inequalities(&self, ids: &[InequalityId], pq: (f64, f64), out: &mut Vec<ResultRow>) {
        let cfg = self.cfg;
        let run = || -> Result<(EnsembleSpec, PQParams)> {
            Ok((cfg.spec_for(self.m, self.n)?, PQParams::new(pq.0, pq.1)?))
        };
        let (spec, params) = match run() {
            Ok(v) => v,
            Err(e) => {
                out.extend(ids.iter().map(|id| self.error(id.as_str(), Some(pq), &e)));
                return;
            }
        };
        let opts = cfg.verify_options();
        match verify_batch(ids, &spec, &params, cfg.trials, cfg.seed, &opts) {
            Ok(reports) => out.extend(
                reports
                    .iter()
                    .map(|r| ResultRow::from_bound(&cfg.experiment_id, r, cfg.record_runtime)),
            ),
            // isolate the failing ids; the others still see identical draws
            Err(_) => {
                for &id in ids {
                    out.push(
                        match verify_with(id, &spec, &params, cfg.trials, cfg.seed, &opts) {
                            Ok(rep) => {
                                ResultRow::from_bound(&cfg.experiment_id, &rep, cfg.record_runtime)
                            }
                            Err(e) => self.error(id.as_str(), Some(pq), &e),
                        },
                    );
                }
            }
        }
    }

    fn check(&self, id: CheckId, pq: Option<(f64, f64)>) -> ResultRow {
        let cfg = self.cfg;
        let started = Instant::now();
        let result = self.run_check(id, pq);
        let runtime = cfg
            .record_runtime
            .then(|| started.elapsed().as_millis() as u64);
        match result {
            Ok((report, family, p, q, params)) => ResultRow::from_moment(
                &cfg.experiment_id,
                &report,
                &family,
                self.m,
                self.n,
                p,
                q,
                params,
                runtime,
            ),
            Err(e) => self.error(id.as_str(), pq, &e),
        }
    }

    #[allow(clippy::type_complexity)]
    fn run_check(
        &self,
        id: CheckId,
        pq: Option<(f64, f64)>,
    ) -> Result<(
        MomentReport,
        String,
        Option<f64>,
        Option<f64>,
        (Option<f64>, Option<f64>, Option<f64>),
    )> {
        let cfg = self.cfg;
        let (t, seed) = (cfg.trials, cfg.seed);
        let spec_params = |s: &EnsembleSpec| (s.gamma(), s.beta(), s.l());
        let family = cfg.family.to_string();
        let (p, q) = pq.unwrap_or((f64::NAN, f64::NAN));
        Ok(match id {
            CheckId::Regularity => {
                let spec = cfg.spec_for(self.m, self.n)?;
                let r = momentslab::regularity_constant(&spec, cfg.norm_p, p, q, t, seed)?;
                (r, family, Some(p), Some(q), spec_params(&spec))
            }
            CheckId::WeakStrong => {
                let spec = cfg.spec_for(self.m, self.n)?;
                let r = momentslab::weak_strong_constant(&spec, p, q, t, cfg.restarts, seed)?;
                (r, family, Some(p), Some(q), spec_params(&spec))
            }
            CheckId::TailCmp => {
                let spec = cfg.spec_for(self.m, self.n)?;
                let r = momentslab::tail_comparison(&spec, p, &cfg.u_grid, cfg.c4, t, seed)?;
                (r, family, Some(p), None, spec_params(&spec))
            }
            CheckId::Sudakov => {
                let r = momentslab::sudakov_ratio(&cfg.a.build(self.m), cfg.family, t, seed)?;
                (r, family, None, None, (None, None, None))
            }
            CheckId::MomClaim => {
                let missing = || Error::Config("momclaim needs `beta` and `L`".into());
                let beta = cfg.beta.ok_or_else(missing)?;
                let l = cfg.l.ok_or_else(missing)?;
                let r = momentslab::moment_comparison_claim(
                    beta,
                    l,
                    &cfg.t.build(self.n),
                    &cfg.r_grid,
                    t,
                    seed,
                )?;
                (
                    r,
                    Family::BetaRegular.to_string(),
                    None,
                    None,
                    (None, Some(beta), Some(l)),
                )
            }
            CheckId::MomProfile => {
                let spec = cfg.spec_for(self.m, self.n)?;
                let r = momentslab::moment_growth_profile(&spec, &cfg.r_grid, t, seed)?;
                (r, family, None, None, spec_params(&spec))
            }
        })
    }
}

fn uses_pq(id: CheckId) -> bool {
    matches!(
        id,
        CheckId::Regularity | CheckId::WeakStrong | CheckId::TailCmp
    )
}

/// Runs every grid cell in order: dimensions, then `(p, q)`, then targets.
/// Inequality targets of one cell share their Monte Carlo draws. A cell that
/// cannot run yields an error row and the run continues.
pub fn run_config(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let ineqs: Vec<InequalityId> = config
        .targets
        .iter()
        .filter_map(|t| match t {
            Target::Inequality(id) => Some(*id),
            Target::Check(_) => None,
        })
        .collect();
    let checks: Vec<CheckId> = config
        .targets
        .iter()
        .filter_map(|t| match t {
            Target::Check(id) => Some(*id),
            Target::Inequality(_) => None,
        })
        .collect();

    let mut rows = Vec::new();
    for &(m, n) in &config.dims {
        let cell = Cell { cfg: config, m, n };
        for &pq in &config.pq {
            if !ineqs.is_empty() {
                cell.inequalities(&ineqs, pq, &mut rows);
            }
            for &id in checks.iter().filter(|id| uses_pq(**id)) {
                rows.push(cell.check(id, Some(pq)));
            }
        }
        for &id in checks.iter().filter(|id| !uses_pq(**id)) {
            rows.push(cell.check(id, None));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_single_cell() {
        let cfg = ExperimentConfig {
            dims: vec![(4, 4)],
            trials: 2,
            ..ExperimentConfig::default()
        };
        let rows = run_config(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!(r.error.is_none());
        assert_eq!(r.terms.len(), 3);
        assert!(r.lhs_mean.is_some() && r.ratio.is_some() && r.rhs_bracket.is_some());
    }

    #[test]
    fn bad_cells_become_error_rows() {
        let mut cfg = ExperimentConfig {
            dims: vec![(4, 4)],
            pq: vec![(2.0, 2.0), (1.5, 2.0)],
            trials: 3,
            ..ExperimentConfig::default()
        };
        cfg.set("target", "main11, beta52").unwrap();
        let rows = run_config(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.as_deref().unwrap().contains("beta52"));
        assert!(rows[2].error.is_some() && rows[3].error.is_some());
    }

    #[test]
    fn checks_run_per_grid() {
        let mut cfg = ExperimentConfig {
            dims: vec![(1, 3)],
            pq: vec![(2.0, 1.0), (4.0, 2.0)],
            trials: 200,
            beta: Some(1.0),
            l: Some(2.0),
            ..ExperimentConfig::default()
        };
        cfg.set("target", "regularity, sudakov, momclaim").unwrap();
        let rows = run_config(&cfg).unwrap();
        let ids: Vec<&str> = rows.iter().map(|r| r.inequality_id.as_str()).collect();
        assert_eq!(ids, ["regularity", "regularity", "sudakov", "momclaim"]);
        assert!(rows.iter().all(|r| r.error.is_none()));
        assert_eq!(rows[3].family, "beta_regular");
    }
}
