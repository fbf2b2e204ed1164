//! Right-hand-side terms of the operator-norm inequalities, weak moments, and
//! Monte Carlo verification of `LHS ≤ C · RHS`.
//!
//! The constants `C(p, q)` are never fixed here: every [`BoundReport`]
//! exposes the raw ratio `lhs / rhs_bracket`, and acceptance bands live with
//! the callers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::ensembles::{sample_structured_matrix, EnsembleSpec, Family, MixingLaw};
use crate::error::{domain, Error, Result};
use crate::harness::stream::derive_substream;
use crate::norms::{
    compensated_sum, lp_norm_unchecked, max_abs_entry, max_col_norm, max_row_norm, mean_and_se,
    CoeffMatrix, Exponent, PQParams,
};
use crate::opnorm::{random_sphere_point, trial_norm, PowerIteration};

/// Stable identifiers of the verified inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityId {
    Main11,
    Reverse12,
    Cor13,
    Prop15,
    Uncond16,
    Lemma31,
    Lemma32,
    Mixture42,
    Beta52,
}

impl InequalityId {
    pub const ALL: [InequalityId; 9] = [
        InequalityId::Main11,
        InequalityId::Reverse12,
        InequalityId::Cor13,
        InequalityId::Prop15,
        InequalityId::Uncond16,
        InequalityId::Lemma31,
        InequalityId::Lemma32,
        InequalityId::Mixture42,
        InequalityId::Beta52,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Main11 => "main11",
            InequalityId::Reverse12 => "reverse12",
            InequalityId::Cor13 => "cor13",
            InequalityId::Prop15 => "prop15",
            InequalityId::Uncond16 => "uncond16",
            InequalityId::Lemma31 => "lemma31",
            InequalityId::Lemma32 => "lemma32",
            InequalityId::Mixture42 => "mixture42",
            InequalityId::Beta52 => "beta52",
        }
    }

    /// The inequality being checked, in plain text.
    pub fn statement(self) -> &'static str {
        match self {
            InequalityId::Main11 => {
                "E||X||_{p'->q} <= C(p,q) [ (log m)^{1/q} max_i ||A_i||_p + max_j ||A^(j)||_q + (log m)^{1+1/q} E max_ij |X_ij| ], isotropic log-concave rows"
            }
            InequalityId::Reverse12 => {
                "E||X||_{p'->q} >= c [ max_i ||A_i||_p + max_j ||A^(j)||_q + E max_ij |X_ij| ], isotropic log-concave rows"
            }
            InequalityId::Cor13 => {
                "E||X||_{p'->q} <= C(p,q) [ (log m)^{1+1/q} E max_i ||X_i||_p + E max_j ||X^(j)||_q ]"
            }
            InequalityId::Prop15 => {
                "E max_i ||(B_ij Y_ij)_j||_p <= C [ p^2 max_i ||B_i||_p + p log(m v n) E max_ij |B_ij Y_ij| ]"
            }
            InequalityId::Uncond16 => {
                "E||X||_{p'->q} <= C(p,q) [ (log m)^{3/2+1/q} E max_i ||X_i||_p + sqrt(log n) E max_j ||X^(j)||_q ], unconditional X"
            }
            InequalityId::Lemma31 => {
                "(E max_i ||X_i||_p^q)^{1/q} <= C(p,q) [ max_i ||A_i||_p + log m E max_ij |X_ij| ]"
            }
            InequalityId::Lemma32 => {
                "sup_{t in B_{p'}} (sum_i E|<X_i,t>|^q)^{1/q} <= C q max_j ||A^(j)||_q"
            }
            InequalityId::Mixture42 => {
                "E||X||_{p'->q} <= C(p,q,gamma) [ (log m)^{1/q+gamma} max_i ||B_i||_p + (log n)^gamma max_j ||B^(j)||_q + (log m)^{1+1/q} E max_ij |X_ij| ], X_ij = |Z_ij|^gamma B_ij G_ij"
            }
            InequalityId::Beta52 => {
                "E||X||_{p'->q} <= C(p,q,L,beta) [ (log m)^{beta+1/q} max_i ||A_i||_p + (log n)^beta max_j ||A^(j)||_q + (log m)^{1/q} sqrt(log mn) E max_ij |X_ij| ], beta-regular entries"
            }
        }
    }

    fn needs_norm(self) -> bool {
        !matches!(
            self,
            InequalityId::Prop15 | InequalityId::Lemma31 | InequalityId::Lemma32
        )
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

impl Term {
    fn new(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
        }
    }
}

/// Monte Carlo estimates of the random quantities entering the terms.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AuxExpectations {
    /// `E max_ij |X_ij|`
    pub max_entry: Option<f64>,
    /// `E max_i ‖X_i‖_p`
    pub max_row_p: Option<f64>,
    /// `E max_j ‖X^{(j)}‖_q`
    pub max_col_q: Option<f64>,
}

/// Parameters some inequalities need besides `A` and `(p, q)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TermOptions {
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub improved_exponents: bool,
    /// Mixing matrix `Z` has i.i.d. Gaussian entries (enables the sharper
    /// Gaussian-mixture exponents under `improved_exponents`).
    pub gaussian_mixing: bool,
}

fn need(value: Option<f64>, what: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Domain(format!("missing auxiliary expectation {what}")))
}

fn log_dim(d: usize, what: &str) -> Result<f64> {
    if d < 2 {
        return domain(format!(
            "{what} >= 2 required where log {what} appears, got {d}"
        ));
    }
    Ok((d as f64).ln())
}

/// Exact values of the right-hand-side terms of `id`.
pub fn theorem_terms(
    id: InequalityId,
    coeff: &CoeffMatrix,
    pq: &PQParams,
    aux: &AuxExpectations,
    opts: &TermOptions,
) -> Result<Vec<Term>> {
    let (p, q) = (pq.p, pq.q);
    let rows_p = coeff.max_row_norm(p);
    let cols_q = coeff.max_col_norm(q);
    let terms = match id {
        InequalityId::Main11 => {
            let lm = log_dim(coeff.m(), "m")?;
            vec![
                Term::new("log_rows_p", lm.powf(1.0 / q) * rows_p),
                Term::new("cols_q", cols_q),
                Term::new(
                    "log_max_entry",
                    lm.powf(1.0 + 1.0 / q) * need(aux.max_entry, "E max|X_ij|")?,
                ),
            ]
        }
        InequalityId::Reverse12 => vec![
            Term::new("rows_p", rows_p),
            Term::new("cols_q", cols_q),
            Term::new("max_entry", need(aux.max_entry, "E max|X_ij|")?),
        ],
        InequalityId::Cor13 => {
            let lm = log_dim(coeff.m(), "m")?;
            vec![
                Term::new(
                    "log_rand_rows_p",
                    lm.powf(1.0 + 1.0 / q) * need(aux.max_row_p, "E max_i ||X_i||_p")?,
                ),
                Term::new("rand_cols_q", need(aux.max_col_q, "E max_j ||X^(j)||_q")?),
            ]
        }
        InequalityId::Prop15 => {
            let l = (coeff.m().max(coeff.n()) as f64).ln();
            if coeff.m().max(coeff.n()) < 2 {
                return domain("m v n >= 2 required");
            }
            vec![
                Term::new("p2_rows_p", p * p * rows_p),
                Term::new(
                    "p_log_max_entry",
                    p * l * need(aux.max_entry, "E max|X_ij|")?,
                ),
            ]
        }
        InequalityId::Uncond16 => {
            let lm = log_dim(coeff.m(), "m")?;
            let ln = log_dim(coeff.n(), "n")?;
            let exponent = if opts.improved_exponents {
                0.5 + 1.0 / q
            } else {
                1.5 + 1.0 / q
            };
            vec![
                Term::new(
                    "log_rand_rows_p",
                    lm.powf(exponent) * need(aux.max_row_p, "E max_i ||X_i||_p")?,
                ),
                Term::new(
                    "sqrtlog_rand_cols_q",
                    ln.sqrt() * need(aux.max_col_q, "E max_j ||X^(j)||_q")?,
                ),
            ]
        }
        InequalityId::Lemma31 => {
            let lm = log_dim(coeff.m(), "m")?;
            vec![
                Term::new("rows_p", rows_p),
                Term::new("log_max_entry", lm * need(aux.max_entry, "E max|X_ij|")?),
            ]
        }
        InequalityId::Lemma32 => vec![Term::new("q_cols_q", q * cols_q)],
        InequalityId::Mixture42 => {
            let gamma = opts
                .gamma
                .ok_or_else(|| Error::Domain("mixture42 needs gamma".into()))?;
            if !(gamma > 0.0) || p < 1.0 / gamma || q < 1.0 / gamma {
                return domain(format!(
                    "mixture42 needs gamma > 0 and p, q >= 1/gamma; got gamma = {gamma}, {pq}"
                ));
            }
            let lm = log_dim(coeff.m(), "m")?;
            let ln = log_dim(coeff.n(), "n")?;
            let g = if opts.improved_exponents && opts.gaussian_mixing {
                gamma / 2.0
            } else {
                gamma
            };
            let entry_exp = if opts.improved_exponents {
                1.0 / q
            } else {
                1.0 + 1.0 / q
            };
            vec![
                Term::new("log_rows_p", lm.powf(1.0 / q + g) * rows_p),
                Term::new("log_cols_q", ln.powf(g) * cols_q),
                Term::new(
                    "log_max_entry",
                    lm.powf(entry_exp) * need(aux.max_entry, "E max|X_ij|")?,
                ),
            ]
        }
        InequalityId::Beta52 => {
            let beta = opts
                .beta
                .ok_or_else(|| Error::Domain("beta52 needs beta".into()))?;
            let lm = log_dim(coeff.m(), "m")?;
            let ln = log_dim(coeff.n(), "n")?;
            let lmn = ((coeff.m() * coeff.n()) as f64).ln();
            vec![
                Term::new("log_rows_p", lm.powf(beta + 1.0 / q) * rows_p),
                Term::new("log_cols_q", ln.powf(beta) * cols_q),
                Term::new(
                    "log_sqrtlog_max_entry",
                    lm.powf(1.0 / q) * lmn.sqrt() * need(aux.max_entry, "E max|X_ij|")?,
                ),
            ]
        }
    };
    Ok(terms)
}

/// Estimate of a weak moment `sup_{t ∈ B_{p'}} (·)^{1/order}` with its maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMomentEstimate {
    pub value: f64,
    /// Standard error of `value` at the witness (delta method).
    pub se: f64,
    pub witness_t: Array1<f64>,
    pub trials: usize,
    pub restarts: usize,
}

/// `F(t) = Σ_g w_g · Ê|⟨R, c_g ∘ t⟩|^order`, maximized over the unit ball of `ℓ_{p'}`.
///
/// `F` is convex, so the linearized step `t ← argmax_{‖s‖_{p'} ≤ 1} ⟨∇F(t), s⟩`
/// never decreases it; this is the ascent used from every candidate start.
pub(crate) struct WeakMomentProblem {
    pools: Vec<Array2<f64>>,
    /// (pool index, coefficient row, weight)
    groups: Vec<(usize, Vec<f64>, f64)>,
    order: f64,
    p: Exponent,
    p_conj: Exponent,
    n: usize,
}

impl WeakMomentProblem {
    /// Builds the problem for rows `rows` of `X`, drawing `trials` samples per row law.
    pub(crate) fn for_rows(
        spec: &EnsembleSpec,
        rows: &[usize],
        p: f64,
        order: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(order >= 1.0) {
            return domain(format!("moment order must be >= 1, got {order}"));
        }
        if !(p >= 1.0) {
            return domain(format!("p must be >= 1, got {p}"));
        }
        if trials < 2 {
            return domain("weak moments need T >= 2");
        }
        let p_exp = Exponent::from(p);
        let p_conj = crate::norms::holder_conjugate(p_exp)?;
        let n = spec.n();
        let coeff = spec.coeff();
        let (pools, groups) = if spec.has_row_law() {
            let pool = spec.sample_row_pool(trials, seed)?;
            // rows with identical coefficients share one group
            let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
            let mut groups: Vec<(usize, Vec<f64>, f64)> = Vec::new();
            for &i in rows {
                let row: Vec<f64> = coeff.row(i).to_vec();
                let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
                match index.get(&key) {
                    Some(&g) => groups[g].2 += 1.0,
                    None => {
                        index.insert(key, groups.len());
                        groups.push((0, row, 1.0));
                    }
                }
            }
            (vec![pool], groups)
        } else {
            let mats: Vec<Array2<f64>> = (0..trials)
                .into_par_iter()
                .map(|t| sample_structured_matrix(spec, &mut derive_substream(seed, t as u64)))
                .collect::<Result<_>>()?;
            let mut pools = Vec::new();
            let mut groups = Vec::new();
            for &i in rows {
                let mut pool = Array2::zeros((trials, n));
                for (k, x) in mats.iter().enumerate() {
                    pool.row_mut(k).assign(&x.row(i));
                }
                groups.push((pools.len(), vec![1.0; n], 1.0));
                pools.push(pool);
            }
            (pools, groups)
        };
        Ok(Self {
            pools,
            groups,
            order,
            p: p_exp,
            p_conj,
            n,
        })
    }

    fn trials(&self) -> usize {
        self.pools[0].nrows()
    }

    /// Per-sample contributions `c_k = Σ_g w_g |s_gk|^order`; `F = mean(c)`.
    fn contributions(&self, t: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.trials()];
        for (pool_idx, coeff, weight) in &self.groups {
            let dir: Array1<f64> = coeff.iter().zip(t).map(|(a, b)| a * b).collect();
            let s = self.pools[*pool_idx].dot(&dir);
            for (ck, sk) in c.iter_mut().zip(s.iter()) {
                *ck += weight * pow_abs(*sk, self.order);
            }
        }
        c
    }

    /// `F(t)` and `∇F(t)` in one pass over the pools.
    fn eval(&self, t: &[f64]) -> (f64, Vec<f64>) {
        let trials = self.trials();
        let mut c = vec![0.0; trials];
        let mut grad = vec![0.0; self.n];
        let mut g = vec![0.0; self.n];
        for (pool_idx, coeff, weight) in &self.groups {
            let dir: Vec<f64> = coeff.iter().zip(t).map(|(a, b)| a * b).collect();
            g.iter_mut().for_each(|v| *v = 0.0);
            for (ck, row) in c.iter_mut().zip(self.pools[*pool_idx].rows()) {
                let row = row.as_slice().expect("pools are standard layout");
                let s: f64 = row.iter().zip(&dir).map(|(x, d)| x * d).sum();
                if s == 0.0 {
                    continue;
                }
                let a = pow_abs(s, self.order - 1.0);
                *ck += weight * a * s.abs();
                let phi = s.signum() * a;
                for (gj, x) in g.iter_mut().zip(row) {
                    *gj += phi * x;
                }
            }
            for j in 0..self.n {
                grad[j] += weight * self.order * coeff[j] * g[j] / trials as f64;
            }
        }
        (compensated_sum(c) / trials as f64, grad)
    }

    /// Value at `e_j` for every `j`, without forming directions.
    fn basis_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (pool_idx, coeff, weight) in &self.groups {
            let pool = &self.pools[*pool_idx];
            for j in 0..self.n {
                if coeff[j] == 0.0 {
                    continue;
                }
                let col = pool.column(j);
                let mean =
                    compensated_sum(col.iter().map(|v| pow_abs(*v, self.order))) / col.len() as f64;
                out[j] += weight * pow_abs(coeff[j], self.order) * mean;
            }
        }
        out
    }

    /// Next iterate: the maximizer of `⟨grad, s⟩` over the unit `ℓ_{p'}`-ball.
    fn linear_maximizer(&self, grad: &[f64]) -> Option<Vec<f64>> {
        let gn = lp_norm_unchecked(grad.iter(), self.p);
        if gn == 0.0 {
            return None;
        }
        if self.p.is_infinite() {
            let j = (0..self.n).max_by(|&a, &b| grad[a].abs().total_cmp(&grad[b].abs()))?;
            let mut e = vec![0.0; self.n];
            e[j] = grad[j].signum();
            return Some(e);
        }
        let phi_p = self.p.value() - 1.0;
        Some(
            grad.iter()
                .map(|g| {
                    if *g == 0.0 {
                        0.0
                    } else {
                        g.signum() * pow_abs(g / gn, phi_p)
                    }
                })
                .collect(),
        )
    }

    fn ascend(&self, mut t: Vec<f64>) -> (f64, Vec<f64>) {
        let (mut value, mut grad) = self.eval(&t);
        for _ in 0..ASCENT_MAX_STEPS {
            let Some(next) = self.linear_maximizer(&grad) else {
                break;
            };
            let (nv, ng) = self.eval(&next);
            if nv <= value {
                break;
            }
            let gain = (nv - value) / value;
            t = next;
            value = nv;
            grad = ng;
            if gain < ASCENT_TOL {
                break;
            }
        }
        (value, t)
    }

    /// Candidates: all `e_j` (exact), the best few refined, the normalized
    /// all-ones vector and `restarts` random points of the `p'`-sphere.
    pub(crate) fn maximize(&self, restarts: usize, seed: u64) -> WeakMomentEstimate {
        let basis = self.basis_values();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| basis[b].total_cmp(&basis[a]));

        let mut best_value = basis[order[0]];
        let mut best_t = vec![0.0; self.n];
        best_t[order[0]] = 1.0;

        let mut starts: Vec<Vec<f64>> = Vec::new();
        for &j in order.iter().take(3) {
            let mut e = vec![0.0; self.n];
            e[j] = 1.0;
            starts.push(e);
        }
        let ones = vec![1.0; self.n];
        let norm = lp_norm_unchecked(ones.iter(), self.p_conj);
        starts.push(ones.into_iter().map(|v| v / norm).collect());
        let mut rng = derive_substream(seed, u64::MAX);
        for _ in 0..restarts {
            starts.push(random_sphere_point(self.n, self.p_conj, &mut rng));
        }
        for s in starts {
            let (v, t) = self.ascend(s);
            if v > best_value * (1.0 + 1e-12) {
                best_value = v;
                best_t = t;
            }
        }

        let contributions = self.contributions(&best_t);
        let (f, f_se) = mean_and_se(&contributions);
        let value = f.max(0.0).powf(1.0 / self.order);
        let se = if f > 0.0 {
            value * f_se / (self.order * f)
        } else {
            0.0
        };
        WeakMomentEstimate {
            value,
            se,
            witness_t: Array1::from(best_t),
            trials: self.trials(),
            restarts,
        }
    }
}

const ASCENT_MAX_STEPS: usize = 200;
// far below the Monte Carlo error of any weak-moment estimate
const ASCENT_TOL: f64 = 1e-7;

#[inline]
fn pow_abs(x: f64, e: f64) -> f64 {
    let a = x.abs();
    if e == 1.0 {
        a
    } else if e == 2.0 {
        a * a
    } else if e.fract() == 0.0 && e < 64.0 {
        a.powi(e as i32)
    } else {
        a.powf(e)
    }
}

/// Weak moment `σ = sup_{t ∈ B_{p'}} (Ê|⟨t, X_i⟩|^order)^{1/order}` of a row of `X`.
///
/// With `row_index_free` the supremum also runs over the row index `i`;
/// otherwise the first row is used.
pub fn weak_moment_sigma(
    spec: &EnsembleSpec,
    row_index_free: bool,
    pq: &PQParams,
    moment_order: f64,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<WeakMomentEstimate> {
    weak_moment_sigma_p(
        spec,
        row_index_free,
        pq.p,
        moment_order,
        trials,
        restarts,
        seed,
    )
}

/// As [`weak_moment_sigma`] for any `p ≥ 1`.
pub fn weak_moment_sigma_p(
    spec: &EnsembleSpec,
    row_index_free: bool,
    p: f64,
    moment_order: f64,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<WeakMomentEstimate> {
    if !row_index_free {
        return Ok(
            WeakMomentProblem::for_rows(spec, &[0], p, moment_order, trials, seed)?
                .maximize(restarts, seed),
        );
    }
    // one problem per distinct row law; a sup over i of sups over t
    let mut best: Option<WeakMomentEstimate> = None;
    let rows: Vec<usize> = if spec.has_row_law() {
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        (0..spec.m())
            .filter(|&i| {
                let key: Vec<u64> = spec.coeff().row(i).iter().map(|v| v.to_bits()).collect();
                seen.insert(key, i).is_none()
            })
            .collect()
    } else {
        (0..spec.m()).collect()
    };
    for i in rows {
        let est = WeakMomentProblem::for_rows(spec, &[i], p, moment_order, trials, seed)?
            .maximize(restarts, seed);
        if best.as_ref().is_none_or(|b| est.value > b.value) {
            best = Some(est);
        }
    }
    Ok(best.expect("m >= 1"))
}

/// `u = sup_{t ∈ B_{p'}} (Σ_i Ê|⟨X_i, t⟩|^q)^{1/q}`.
pub fn weak_chaos_u(
    spec: &EnsembleSpec,
    pq: &PQParams,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<WeakMomentEstimate> {
    let rows: Vec<usize> = (0..spec.m()).collect();
    Ok(
        WeakMomentProblem::for_rows(spec, &rows, pq.p, pq.q, trials, seed)?
            .maximize(restarts, seed),
    )
}

/// One inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub inequality_id: InequalityId,
    pub spec_summary: String,
    pub family: Family,
    pub m: usize,
    pub n: usize,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub l: Option<f64>,
    pub pq: PQParams,
    pub trials: usize,
    pub seed: u64,
    pub lhs_mean: f64,
    pub lhs_se: f64,
    pub terms: Vec<Term>,
    /// Sum of the term values.
    pub rhs_bracket: f64,
    /// `lhs_mean / rhs_bracket`
    pub ratio: f64,
    /// `lhs_mean / max term` (reverse12 only).
    pub reverse_ratio: Option<f64>,
    /// Mean relaxation upper bound of the norm, where the LHS is a norm.
    pub lhs_upper_mean: Option<f64>,
    /// `lhs_upper_mean / max term` (reverse12 only).
    pub reverse_upper_ratio: Option<f64>,
    /// reverse12: whether `(lhs_mean − 2·lhs_se) / max term ≥ reverse_threshold`.
    pub reverse_ok: Option<bool>,
    pub runtime_ms: u64,
}

impl BoundReport {
    /// Ratio with the LHS moved 2 SE to the unfavorable (upper) side.
    pub fn ratio_upper_2se(&self) -> f64 {
        (self.lhs_mean + 2.0 * self.lhs_se) / self.rhs_bracket
    }

    /// Reverse ratio with the LHS moved 2 SE down.
    pub fn reverse_ratio_lower_2se(&self) -> Option<f64> {
        let max_term = self.terms.iter().map(|t| t.value).fold(0.0, f64::max);
        self.reverse_ratio
            .map(|_| (self.lhs_mean - 2.0 * self.lhs_se) / max_term)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub improved_exponents: bool,
    pub power: PowerIteration,
    /// Random starts of the weak-moment ascent (lemma32).
    pub weak_restarts: usize,
    pub reverse_threshold: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            improved_exponents: false,
            power: PowerIteration::monte_carlo(),
            weak_restarts: 4,
            reverse_threshold: 0.25,
        }
    }
}

fn check_compatible(id: InequalityId, spec: &EnsembleSpec) -> Result<()> {
    let family = spec.family();
    let ok = match id {
        InequalityId::Reverse12 => true,
        InequalityId::Main11
        | InequalityId::Cor13
        | InequalityId::Prop15
        | InequalityId::Lemma31
        | InequalityId::Lemma32 => family.is_log_concave(),
        InequalityId::Uncond16 => family == Family::UnconditionalWrap || family.is_product(),
        InequalityId::Mixture42 => family == Family::GaussianMixture,
        InequalityId::Beta52 => family == Family::BetaRegular,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Incompatible(format!(
            "`{id}` does not apply to family `{family}`"
        )))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialStats {
    norm_lower: f64,
    norm_upper: f64,
    max_entry: f64,
    max_row_p: f64,
    max_col_q: f64,
    max_row_p_pow_q: f64,
}

fn collect_trials(
    spec: &EnsembleSpec,
    pq: &PQParams,
    trials: usize,
    seed: u64,
    with_norm: bool,
    power: &PowerIteration,
) -> Result<Vec<TrialStats>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_substream(seed, t as u64);
            let x = sample_structured_matrix(spec, &mut rng)?;
            let mut stats = TrialStats {
                max_entry: max_abs_entry(x.view())?,
                max_row_p: max_row_norm(x.view(), pq.p),
                max_col_q: max_col_norm(x.view(), pq.q),
                ..TrialStats::default()
            };
            stats.max_row_p_pow_q = stats.max_row_p.powf(pq.q);
            if with_norm {
                let est = trial_norm(x.view(), pq, power, &mut rng);
                stats.norm_lower = est.lower;
                stats.norm_upper = est.upper;
            }
            Ok(stats)
        })
        .collect()
}

fn field(stats: &[TrialStats], f: impl Fn(&TrialStats) -> f64) -> (f64, f64) {
    let values: Vec<f64> = stats.iter().map(f).collect();
    mean_and_se(&values)
}

/// Verifies one inequality with default options.
pub fn verify_inequality(
    id: InequalityId,
    spec: &EnsembleSpec,
    pq: &PQParams,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    verify_with(id, spec, pq, trials, seed, &VerifyOptions::default())
}

pub fn verify_with(
    id: InequalityId,
    spec: &EnsembleSpec,
    pq: &PQParams,
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    Ok(verify_batch(&[id], spec, pq, trials, seed, opts)?.remove(0))
}

/// Verifies several inequalities on the same draws. Each report is identical
/// to the one a separate [`verify_with`] call would produce.
pub fn verify_batch(
    ids: &[InequalityId],
    spec: &EnsembleSpec,
    pq: &PQParams,
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<Vec<BoundReport>> {
    if trials < 2 {
        return domain("verification needs T >= 2");
    }
    for &id in ids {
        check_compatible(id, spec)?;
    }
    let started = Instant::now();
    let coeff = spec.coeff();
    let term_opts = TermOptions {
        gamma: spec.gamma(),
        beta: spec.beta(),
        improved_exponents: opts.improved_exponents,
        gaussian_mixing: spec.mixing() == MixingLaw::Rows(Family::Gaussian),
    };
    // validate term preconditions before any sampling
    let probe = AuxExpectations {
        max_entry: Some(1.0),
        max_row_p: Some(1.0),
        max_col_q: Some(1.0),
    };
    for &id in ids {
        theorem_terms(id, coeff, pq, &probe, &term_opts)?;
    }

    let needs_trials = ids.iter().any(|id| *id != InequalityId::Lemma32);
    let with_norm = ids.iter().any(|id| id.needs_norm());
    let stats = if needs_trials {
        collect_trials(spec, pq, trials, seed, with_norm, &opts.power)?
    } else {
        Vec::new()
    };
    let shared_ms = started.elapsed().as_millis() as u64;

    let aux = if needs_trials {
        AuxExpectations {
            max_entry: Some(field(&stats, |s| s.max_entry).0),
            max_row_p: Some(field(&stats, |s| s.max_row_p).0),
            max_col_q: Some(field(&stats, |s| s.max_col_q).0),
        }
    } else {
        AuxExpectations::default()
    };

    let mut reports = Vec::with_capacity(ids.len());
    for &id in ids {
        let own = Instant::now();
        let (lhs_mean, lhs_se, lhs_upper_mean) = match id {
            InequalityId::Prop15 => {
                let (m, s) = field(&stats, |s| s.max_row_p);
                (m, s, None)
            }
            InequalityId::Lemma31 => {
                let (mq, sq) = field(&stats, |s| s.max_row_p_pow_q);
                let lhs = mq.powf(1.0 / pq.q);
                let se = if mq > 0.0 {
                    lhs * sq / (pq.q * mq)
                } else {
                    0.0
                };
                (lhs, se, None)
            }
            InequalityId::Lemma32 => {
                let est = weak_chaos_u(spec, pq, trials, opts.weak_restarts, seed)?;
                (est.value, est.se, None)
            }
            _ => {
                let (m, s) = field(&stats, |s| s.norm_lower);
                let (u, _) = field(&stats, |s| s.norm_upper);
                (m, s, Some(u))
            }
        };
        let terms = theorem_terms(id, coeff, pq, &aux, &term_opts)?;
        let rhs_bracket = compensated_sum(terms.iter().map(|t| t.value));
        let ratio = lhs_mean / rhs_bracket;
        let max_term = terms.iter().map(|t| t.value).fold(0.0, f64::max);
        let (reverse_ratio, reverse_upper_ratio, reverse_ok) = if id == InequalityId::Reverse12 {
            let rr = lhs_mean / max_term;
            let ru = lhs_upper_mean.map(|u| u / max_term);
            let ok = (lhs_mean - 2.0 * lhs_se) / max_term >= opts.reverse_threshold;
            (Some(rr), ru, Some(ok))
        } else {
            (None, None, None)
        };
        let runtime_ms = shared_ms + own.elapsed().as_millis() as u64;
        reports.push(BoundReport {
            inequality_id: id,
            spec_summary: spec.summary(),
            family: spec.family(),
            m: spec.m(),
            n: spec.n(),
            gamma: spec.gamma(),
            beta: spec.beta(),
            l: spec.l(),
            pq: *pq,
            trials,
            seed,
            lhs_mean,
            lhs_se,
            terms,
            rhs_bracket,
            ratio,
            reverse_ratio,
            lhs_upper_mean,
            reverse_upper_ratio,
            reverse_ok,
            runtime_ms,
        });
    }
    Ok(reports)
}

/// `(E max_ij |X_ij|, SE)` by Monte Carlo.
pub fn estimate_max_entry(spec: &EnsembleSpec, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if trials < 2 {
        return domain("Monte Carlo needs T >= 2");
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = sample_structured_matrix(spec, &mut derive_substream(seed, t as u64))?;
            max_abs_entry(x.view())
        })
        .collect::<Result<_>>()?;
    Ok(mean_and_se(&values))
}
