//! Empirical checks of the moment and tail inequalities used by the proofs:
//! moment regularity of norms, weak versus strong moments, the tail version
//! of that comparison, a Sudakov-type lower bound for maxima, and moment
//! growth of β-regular variables.
//!
//! Every check returns a [`MomentReport`] whose `constant` is the measured
//! ratio `lhs / rhs`, the quantity the inequalities bound by an unspecified
//! universal constant.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::bounds::weak_moment_sigma_p;
use crate::ensembles::{sample_structured_matrix, EnsembleSpec, Family};
use crate::error::{domain, Error, Result};
use crate::harness::stream::derive_substream;
use crate::norms::{
    compensated_sum, lp_norm_unchecked, mean_and_se, nonincreasing_rearrangement, CoeffMatrix,
    Exponent,
};
use crate::opnorm::random_sphere_point;

/// Random directions added to the basis in the tail check.
pub const TAIL_RANDOM_DIRECTIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckId {
    Regularity,
    WeakStrong,
    TailCmp,
    Sudakov,
    MomClaim,
    MomProfile,
}

impl CheckId {
    pub const ALL: [CheckId; 6] = [
        CheckId::Regularity,
        CheckId::WeakStrong,
        CheckId::TailCmp,
        CheckId::Sudakov,
        CheckId::MomClaim,
        CheckId::MomProfile,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Regularity => "regularity",
            CheckId::WeakStrong => "weakstrong",
            CheckId::TailCmp => "tailcmp",
            CheckId::Sudakov => "sudakov",
            CheckId::MomClaim => "momclaim",
            CheckId::MomProfile => "momprofile",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            CheckId::Regularity => {
                "(E f(Z)^p)^{1/p} <= C (p/q) (E f(Z)^q)^{1/q} for a norm f, p >= q >= 1, Z log-concave"
            }
            CheckId::WeakStrong => {
                "(E ||Z||_p^q)^{1/q} <= C p ( E ||Z||_p + sup_{t in B_{p'}} (E|<t,Z>|^q)^{1/q} )"
            }
            CheckId::TailCmp => {
                "P( ||Z||_p >= C p (u + E||Z||_p) ) <= C4 sup_{t in B_{p'}} P( |<t,Z>| >= u )"
            }
            CheckId::Sudakov => {
                "E max_i |a_i Z_i| >= c max_k a*_k min_i ||Z_i||_{log(k+1)}, Z isotropic log-concave"
            }
            CheckId::MomClaim => {
                "|| sum_j t_j Y_j ||_r <= C L r^beta || sum_j t_j Y_j ||_2 for beta-regular Y_j"
            }
            CheckId::MomProfile => "r^beta / L <= ||Y||_r <= L r^beta",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// One grid point of a check.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCell {
    /// The grid parameter (`p`, `u`, `r` or `k` depending on the check).
    pub param: f64,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or the check's convention where both vanish.
    pub constant: f64,
    /// Additional named estimates for this point.
    pub extras: Vec<(String, f64)>,
    /// Why this point was excluded from the summary, if it was.
    pub flag: Option<String>,
}

impl MomentCell {
    fn new(param: f64, lhs: f64, lhs_se: f64, rhs: f64, constant: f64) -> Self {
        Self {
            param,
            lhs,
            lhs_se,
            rhs,
            constant,
            extras: Vec::new(),
            flag: None,
        }
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub check_id: CheckId,
    pub spec_summary: String,
    pub cells: Vec<MomentCell>,
    /// Summary estimates taken from the cell attaining `constant`.
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    /// The empirical constant of the check.
    pub constant: f64,
    /// Report-level named estimates.
    pub estimates: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub trials: usize,
    pub seed: u64,
}

impl MomentReport {
    fn from_cells(
        check_id: CheckId,
        spec_summary: String,
        cells: Vec<MomentCell>,
        trials: usize,
        seed: u64,
    ) -> Self {
        let best = cells
            .iter()
            .filter(|c| c.flag.is_none())
            .fold(None::<&MomentCell>, |acc, c| match acc {
                Some(b) if b.constant >= c.constant => Some(b),
                _ => Some(c),
            });
        let (lhs, lhs_se, rhs, constant) = best.map_or((0.0, 0.0, 0.0, 0.0), |c| {
            (c.lhs, c.lhs_se, c.rhs, c.constant)
        });
        Self {
            check_id,
            spec_summary,
            cells,
            lhs,
            lhs_se,
            rhs,
            constant,
            estimates: Vec::new(),
            notes: Vec::new(),
            trials,
            seed,
        }
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.estimates
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    /// Cell attaining the summary constant.
    pub fn argmax(&self) -> Option<&MomentCell> {
        self.cells
            .iter()
            .filter(|c| c.flag.is_none())
            .find(|c| c.constant == self.constant)
    }
}

/// `T` draws of the first row of `X` (coefficients included).
fn first_row_pool(spec: &EnsembleSpec, trials: usize, seed: u64) -> Result<Array2<f64>> {
    if trials < 2 {
        return domain("Monte Carlo needs T >= 2");
    }
    if spec.has_row_law() {
        let mut pool = spec.sample_row_pool(trials, seed)?;
        let a = spec.coeff().row(0).to_owned();
        pool.axis_iter_mut(Axis(0)).for_each(|mut r| r *= &a);
        Ok(pool)
    } else {
        let rows: Vec<Vec<f64>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let x = sample_structured_matrix(spec, &mut derive_substream(seed, t as u64))?;
                Ok(x.row(0).to_vec())
            })
            .collect::<Result<_>>()?;
        let n = spec.n();
        Array2::from_shape_vec((trials, n), rows.concat()).map_err(|e| Error::Domain(e.to_string()))
    }
}

fn row_norms(pool: &Array2<f64>, r: Exponent) -> Vec<f64> {
    pool.rows()
        .into_iter()
        .map(|row| lp_norm_unchecked(row.iter(), r))
        .collect()
}

/// `((mean |v|^r)^{1/r}, SE)` with the SE from the delta method.
fn moment(values: &[f64], r: f64) -> (f64, f64) {
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(r)).collect();
    let (m, se) = mean_and_se(&powered);
    if m <= 0.0 {
        return (0.0, 0.0);
    }
    let root = m.powf(1.0 / r);
    (root, root * se / (r * m))
}

/// `Ĉ₁ = (Ê f^p)^{1/p} / ((p/q) (Ê f^q)^{1/q})` with `f = ‖·‖_{norm_p}` of the first row.
pub fn regularity_constant(
    spec: &EnsembleSpec,
    norm_p: f64,
    p: f64,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<MomentReport> {
    if !(q >= 1.0) || !(p >= q) || !p.is_finite() {
        return domain(format!(
            "regularity needs p >= q >= 1, got p = {p}, q = {q}"
        ));
    }
    if !(norm_p >= 1.0) {
        return domain(format!("norm exponent must be >= 1, got {norm_p}"));
    }
    let pool = first_row_pool(spec, trials, seed)?;
    let f = row_norms(&pool, Exponent::from(norm_p));
    let (lhs, lhs_se) = moment(&f, p);
    let (low, _) = moment(&f, q);
    let rhs = (p / q) * low;
    let constant = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    let mut cell = MomentCell::new(p, lhs, lhs_se, rhs, constant);
    cell.extras.push(("moment_q".into(), low));
    let mut report = MomentReport::from_cells(
        CheckId::Regularity,
        spec.summary(),
        vec![cell],
        trials,
        seed,
    );
    report.estimates = vec![("norm_p".into(), norm_p), ("p".into(), p), ("q".into(), q)];
    Ok(report)
}

/// `Ĉ = (Ê‖Z‖_p^q)^{1/q} / (p (Ê‖Z‖_p + σ̂))`, with `σ̂` the weak `q`-th moment of the first row.
pub fn weak_strong_constant(
    spec: &EnsembleSpec,
    p: f64,
    q: f64,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<MomentReport> {
    if !(p >= 1.0) || !(q >= 1.0) || !p.is_finite() || !q.is_finite() {
        return domain(format!(
            "weak-strong needs finite p, q >= 1, got p = {p}, q = {q}"
        ));
    }
    let pool = first_row_pool(spec, trials, seed)?;
    let norms = row_norms(&pool, Exponent::from(p));
    let (lhs, lhs_se) = moment(&norms, q);
    let (strong_mean, _) = mean_and_se(&norms);
    let sigma = weak_moment_sigma_p(spec, false, p, q, trials, restarts, seed)?;
    let rhs = p * (strong_mean + sigma.value);
    let constant = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    let mut cell = MomentCell::new(q, lhs, lhs_se, rhs, constant);
    cell.extras = vec![
        ("mean_norm".into(), strong_mean),
        ("sigma".into(), sigma.value),
    ];
    let mut report = MomentReport::from_cells(
        CheckId::WeakStrong,
        spec.summary(),
        vec![cell],
        trials,
        seed,
    );
    report.estimates = vec![
        ("p".into(), p),
        ("q".into(), q),
        ("mean_norm".into(), strong_mean),
        ("sigma".into(), sigma.value),
        ("sigma_se".into(), sigma.se),
    ];
    Ok(report)
}

/// Smallest `Ĉ₃` with `P̂(‖Z‖_p ≥ Ĉ₃ p (u + Ê‖Z‖_p)) ≤ C4 · max_t P̂(|⟨t,Z⟩| ≥ u)` on the grid.
///
/// The supremum over `t` runs over the basis vectors and
/// [`TAIL_RANDOM_DIRECTIONS`] random points of the `p'`-sphere. Grid points
/// whose right side is below `10/T` are flagged and skipped.
pub fn tail_comparison(
    spec: &EnsembleSpec,
    p: f64,
    u_grid: &[f64],
    c4: f64,
    trials: usize,
    seed: u64,
) -> Result<MomentReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("tail check needs finite p >= 1, got {p}"));
    }
    if u_grid.is_empty() || u_grid.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
        return domain("u grid must be non-empty and positive");
    }
    if !(c4 >= 1.0) {
        return domain(format!("C4 must be >= 1, got {c4}"));
    }
    let pool = first_row_pool(spec, trials, seed)?;
    let n = pool.ncols();
    let mut norms = row_norms(&pool, Exponent::from(p));
    let (mean_norm, _) = mean_and_se(&norms);
    norms.sort_by(|a, b| b.total_cmp(a));

    let p_conj = crate::norms::holder_conjugate(p)?;
    let mut directions: Vec<(String, Vec<f64>)> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            (format!("e_{}", j + 1), e)
        })
        .collect();
    let mut rng = derive_substream(seed, u64::MAX);
    for k in 0..TAIL_RANDOM_DIRECTIONS {
        directions.push((
            format!("random_{}", k + 1),
            random_sphere_point(n, p_conj, &mut rng),
        ));
    }
    // exceedance counts per (direction, u)
    let counts: Vec<Vec<usize>> = directions
        .par_iter()
        .map(|(_, t)| {
            let mut c = vec![0usize; u_grid.len()];
            for row in pool.rows() {
                let s: f64 = row.iter().zip(t).map(|(x, y)| x * y).sum::<f64>().abs();
                for (ck, u) in c.iter_mut().zip(u_grid) {
                    if s >= *u {
                        *ck += 1;
                    }
                }
            }
            c
        })
        .collect();

    let tf = trials as f64;
    let mut cells = Vec::with_capacity(u_grid.len());
    for (k, &u) in u_grid.iter().enumerate() {
        let (arg, best) = counts
            .iter()
            .enumerate()
            .map(|(d, c)| (d, c[k]))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let rhs_prob = best as f64 / tf;
        let scale = p * (u + mean_norm);
        let tail_lhs = norms.iter().filter(|s| **s >= scale).count() as f64 / tf;
        let allowed = c4 * rhs_prob;
        let (threshold, constant) = if allowed >= 1.0 {
            (0.0, 0.0)
        } else {
            let budget = (allowed * tf).floor() as usize;
            let s = norms.get(budget).copied().unwrap_or(0.0);
            (s, s / scale)
        };
        let mut cell = MomentCell::new(u, threshold, 0.0, scale, constant);
        cell.extras = vec![
            ("tail_lhs".into(), tail_lhs),
            ("tail_rhs".into(), rhs_prob),
            ("argmax_direction".into(), arg as f64),
        ];
        if best == 0 {
            cell.flag = Some("empirical right side is zero; ratio undefined".into());
        } else if rhs_prob < 10.0 / tf {
            cell.flag = Some(format!("right side {rhs_prob:e} below 10/T; unresolved"));
        }
        cells.push(cell);
    }
    let mut report =
        MomentReport::from_cells(CheckId::TailCmp, spec.summary(), cells, trials, seed);
    report.estimates = vec![
        ("p".into(), p),
        ("c4".into(), c4),
        ("mean_norm".into(), mean_norm),
    ];
    if let Some(cell) = report.argmax() {
        let d = cell.extra("argmax_direction").unwrap_or(0.0) as usize;
        report
            .notes
            .push(format!("right side attained by {}", directions[d].0));
    }
    for c in report.cells.iter().filter(|c| c.flag.is_some()) {
        report.notes.push(format!(
            "u = {}: {}",
            c.param,
            c.flag.as_deref().unwrap_or("")
        ));
    }
    Ok(report)
}

/// `Ê max_i |a_i Z_i| / max_k a*_k min_i (Ê|Z_i|^{ln(k+1)})^{1/ln(k+1)}` for `Z`
/// an isotropic vector of `family` in dimension `len(a)`.
pub fn sudakov_ratio(a: &[f64], family: Family, trials: usize, seed: u64) -> Result<MomentReport> {
    let m = a.len();
    if m == 0 {
        return domain("sudakov needs m >= 1");
    }
    let spec = EnsembleSpec::log_concave(family, CoeffMatrix::ones(1, m)?)?;
    let pool = first_row_pool(&spec, trials, seed)?;
    let a_star = nonincreasing_rearrangement(a)?;

    let maxima: Vec<f64> = pool
        .rows()
        .into_iter()
        .map(|z| {
            z.iter()
                .zip(a)
                .map(|(x, w)| (x * w).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let (lhs, lhs_se) = mean_and_se(&maxima);

    let logs: Vec<Vec<f64>> = (0..m)
        .map(|i| pool.column(i).iter().map(|v| v.abs().ln()).collect())
        .collect();
    let cells: Vec<MomentCell> = (1..=m)
        .into_par_iter()
        .map(|k| {
            let r = ((k + 1) as f64).ln();
            let min_moment = logs
                .iter()
                .map(|col| {
                    let mean = compensated_sum(col.iter().map(|l| (r * l).exp())) / trials as f64;
                    mean.powf(1.0 / r)
                })
                .fold(f64::INFINITY, f64::min);
            let rhs_k = a_star[k - 1] * min_moment;
            let mut cell = MomentCell::new(k as f64, lhs, lhs_se, rhs_k, 0.0);
            cell.extras.push(("min_moment".into(), min_moment));
            cell
        })
        .collect();
    let rhs = cells.iter().map(|c| c.rhs).fold(0.0, f64::max);
    let constant = if rhs == 0.0 && lhs == 0.0 {
        1.0
    } else {
        lhs / rhs
    };
    let cells = cells.into_iter().map(|mut c| {
        c.constant = constant;
        c
    });
    let mut report =
        MomentReport::from_cells(CheckId::Sudakov, spec.summary(), Vec::new(), trials, seed);
    report.cells = cells.collect();
    report.lhs = lhs;
    report.lhs_se = lhs_se;
    report.rhs = rhs;
    report.constant = constant;
    if rhs == 0.0 {
        report
            .notes
            .push("a = 0: both sides vanish, ratio set to 1".into());
    }
    Ok(report)
}

/// `max_r (Ê|Σ t_j Y_j|^r)^{1/r} / (r^β ‖t‖₂)` for β-regular `Y_j`, the empirical `C·L`.
pub fn moment_comparison_claim(
    beta: f64,
    l: f64,
    t: &[f64],
    r_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<MomentReport> {
    if t.is_empty() {
        return domain("t must be non-empty");
    }
    if r_grid.is_empty() || r_grid.iter().any(|r| !(2.0..=32.0).contains(r)) {
        return domain("r grid must be non-empty and inside [2, 32]");
    }
    let spec = EnsembleSpec::beta_regular(CoeffMatrix::ones(1, t.len())?, beta, l)?;
    let pool = first_row_pool(&spec, trials, seed)?;
    let t_norm = lp_norm_unchecked(t.iter(), Exponent::Finite(2.0));
    let sums: Vec<f64> = pool
        .rows()
        .into_iter()
        .map(|y| y.iter().zip(t).map(|(a, b)| a * b).sum())
        .collect();
    let cells: Vec<MomentCell> = r_grid
        .iter()
        .map(|&r| {
            let (m, se) = moment(&sums, r);
            let rhs = r.powf(beta) * t_norm;
            let ratio = if t_norm == 0.0 { 0.0 } else { m / rhs };
            MomentCell::new(r, m, se, rhs, ratio)
        })
        .collect();
    let mut report =
        MomentReport::from_cells(CheckId::MomClaim, spec.summary(), cells, trials, seed);
    report.estimates = vec![
        ("beta".into(), beta),
        ("L".into(), l),
        ("cl_over_l".into(), report.constant / l),
    ];
    if !(0.5..=1.0).contains(&beta) {
        report.notes.push(format!(
            "beta = {beta} is outside the claim regime [1/2, 1]"
        ));
    }
    Ok(report)
}

/// Growth exponent used as reference for each family's moment profile.
pub fn reference_beta(spec: &EnsembleSpec) -> f64 {
    match spec.family() {
        Family::BetaRegular => spec.beta().unwrap_or(0.5),
        Family::Laplace => 1.0,
        _ => 0.5,
    }
}

/// Per-`r` moments of the first coordinate and the smallest `L̂` with
/// `r^β/L̂ ≤ ‖Y‖_r ≤ L̂ r^β` on the grid, `β` from [`reference_beta`].
///
/// Cell extras carry `phi = r · min_j ‖Y_j‖_r` over the coordinates of the row.
pub fn moment_growth_profile(
    spec: &EnsembleSpec,
    r_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<MomentReport> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(1.0..=64.0).contains(r)) {
        return domain("r grid must be non-empty and inside [1, 64]");
    }
    if !spec.has_row_law() {
        return Err(Error::Incompatible(format!(
            "`{}` has no coordinate law",
            spec.summary()
        )));
    }
    let pool = spec.sample_row_pool(trials, seed)?;
    let beta = reference_beta(spec);
    let cells: Vec<MomentCell> = r_grid
        .iter()
        .map(|&r| {
            let (m0, se0) = moment(&pool.column(0).to_vec(), r);
            let min_moment = (0..pool.ncols())
                .map(|j| moment(&pool.column(j).to_vec(), r).0)
                .fold(f64::INFINITY, f64::min);
            let growth = r.powf(beta);
            let (lhs, rhs) = if m0 >= growth {
                (m0, growth)
            } else {
                (growth, m0)
            };
            let constant = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
            let mut cell = MomentCell::new(r, lhs, se0, rhs, constant);
            cell.extras = vec![("moment".into(), m0), ("phi".into(), r * min_moment)];
            cell
        })
        .collect();
    let mut report =
        MomentReport::from_cells(CheckId::MomProfile, spec.summary(), cells, trials, seed);
    report.estimates = vec![("beta_ref".into(), beta), ("l_hat".into(), report.constant)];
    if spec.family() != Family::BetaRegular {
        report.notes.push(format!(
            "reference exponent beta = {beta} for `{}`; reported, not asserted",
            spec.family()
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::gaussian_abs_moment;
    use approx::assert_relative_eq;

    fn row(family: Family, n: usize) -> EnsembleSpec {
        EnsembleSpec::log_concave(family, CoeffMatrix::ones(1, n).unwrap()).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), id);
        }
    }

    #[test]
    fn regularity_equal_orders_is_one() {
        for family in Family::LOG_CONCAVE {
            let r = regularity_constant(&row(family, 5), 3.0, 2.5, 2.5, 500, 1).unwrap();
            assert_eq!(r.constant, 1.0);
        }
    }

    #[test]
    fn regularity_gaussian_scalar() {
        let r = regularity_constant(&row(Family::Gaussian, 1), 1.0, 4.0, 2.0, 200_000, 2).unwrap();
        let exact = 3f64.powf(0.25) / 2.0;
        assert!(
            (r.constant - exact).abs() < 0.01,
            "{} vs {exact}",
            r.constant
        );
        assert_relative_eq!(r.constant, r.lhs / r.rhs, max_relative = 1e-15);
    }

    #[test]
    fn regularity_rejects_inverted_orders() {
        assert!(regularity_constant(&row(Family::Gaussian, 2), 2.0, 1.0, 2.0, 10, 1).is_err());
    }

    #[test]
    fn weak_strong_q_one_collapse() {
        for family in [Family::Gaussian, Family::BallUniform] {
            let r = weak_strong_constant(&row(family, 4), 3.0, 1.0, 5_000, 2, 3).unwrap();
            assert!(r.constant <= 1.0 / 3.0 + 1e-12, "{}", r.constant);
        }
    }

    #[test]
    fn tail_far_above_support_is_trivial() {
        let r = tail_comparison(
            &row(Family::Gaussian, 4),
            2.0,
            &[1e3],
            std::f64::consts::E.powi(2),
            10_000,
            4,
        )
        .unwrap();
        assert_eq!(r.cells[0].extra("tail_lhs"), Some(0.0));
        assert!(r.cells[0].flag.is_some());
        assert_eq!(r.constant, 0.0);
    }

    #[test]
    fn tail_sides_are_monotone_in_u() {
        let grid = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
        let r = tail_comparison(&row(Family::Laplace, 3), 2.0, &grid, 7.0, 50_000, 5).unwrap();
        for w in r.cells.windows(2) {
            assert!(w[1].extra("tail_lhs").unwrap() <= w[0].extra("tail_lhs").unwrap());
            assert!(w[1].extra("tail_rhs").unwrap() <= w[0].extra("tail_rhs").unwrap());
        }
    }

    #[test]
    fn sudakov_examples() {
        let r = sudakov_ratio(&[1.0], Family::Gaussian, 200_000, 6).unwrap();
        let exact_lhs = (2.0 / std::f64::consts::PI).sqrt();
        assert!((r.lhs - exact_lhs).abs() <= 3.0 * r.lhs_se);
        let ln2 = 2f64.ln();
        let exact_rhs = gaussian_abs_moment(ln2).powf(1.0 / ln2);
        assert!((r.rhs - exact_rhs).abs() < 0.01, "{} vs {exact_rhs}", r.rhs);
        assert!(r.constant >= 1.0);

        let zero = sudakov_ratio(&[0.0; 5], Family::Laplace, 100, 7).unwrap();
        assert_eq!(zero.constant, 1.0);
    }

    #[test]
    fn sudakov_is_scale_invariant() {
        let a: Vec<f64> = (1..=16).map(|k| 1.0 / k as f64).collect();
        let scaled: Vec<f64> = a.iter().map(|v| 5.0 * v).collect();
        let r1 = sudakov_ratio(&a, Family::Laplace, 5_000, 8).unwrap();
        let r5 = sudakov_ratio(&scaled, Family::Laplace, 5_000, 8).unwrap();
        assert_relative_eq!(r1.constant, r5.constant, max_relative = 1e-12);
        assert_relative_eq!(5.0 * r1.lhs, r5.lhs, max_relative = 1e-12);
    }

    #[test]
    fn momclaim_examples() {
        let zero = moment_comparison_claim(0.75, 2.0, &[0.0, 0.0], &[2.0, 4.0], 100, 1).unwrap();
        assert_eq!(zero.constant, 0.0);

        let r = moment_comparison_claim(0.5, 1.0, &[1.0, 0.0, 0.0], &[2.0, 4.0, 8.0], 200_000, 2)
            .unwrap();
        // t = e_1 at beta = 1/2 is a Gaussian coordinate: ratio sqrt(r)^{-1} ||g||_r
        for c in &r.cells {
            let exact = gaussian_abs_moment(c.param).powf(1.0 / c.param) / c.param.sqrt();
            assert!(
                (c.constant - exact).abs() < 0.02,
                "r = {}: {} vs {exact}",
                c.param,
                c.constant
            );
        }

        let out = moment_comparison_claim(1.5, 2.0, &[1.0], &[2.0], 100, 1).unwrap();
        assert!(!out.notes.is_empty());
        assert!(moment_comparison_claim(1.0, 2.0, &[1.0], &[1.0], 100, 1).is_err());
    }

    #[test]
    fn momclaim_second_moment_identity() {
        let t = [0.5, -1.0, 2.0, 0.25];
        for beta in [0.5, 0.75, 1.0] {
            let r = moment_comparison_claim(beta, 2.0, &t, &[2.0], 100_000, 9).unwrap();
            let c = &r.cells[0];
            let target = 2f64.powf(-beta);
            // ratio at r = 2 is 2^{-beta} times a root of a mean, delta-method SE
            assert!(
                (c.constant - target).abs() <= 3.0 * c.lhs_se / c.rhs + 1e-12,
                "beta {beta}: {}",
                c.constant
            );
        }
    }

    #[test]
    fn gaussian_profile_matches_closed_form() {
        let grid = [2.0, 4.0, 8.0, 16.0];
        let r = moment_growth_profile(&row(Family::Gaussian, 1), &grid, 400_000, 10).unwrap();
        let exact_l = grid
            .iter()
            .map(|&s| {
                let m = gaussian_abs_moment(s).powf(1.0 / s);
                (m / s.sqrt()).max(s.sqrt() / m)
            })
            .fold(0.0, f64::max);
        // the largest order has the largest Monte Carlo error
        assert!(
            (r.constant - exact_l).abs() / exact_l < 0.03,
            "{} vs {exact_l}",
            r.constant
        );
    }

    #[test]
    fn cube_profile_is_bounded_by_support() {
        let r = moment_growth_profile(
            &row(Family::CubeUniform, 2),
            &[2.0, 8.0, 32.0, 64.0],
            50_000,
            11,
        )
        .unwrap();
        for c in &r.cells {
            assert!(c.extra("moment").unwrap() <= 3f64.sqrt() + 1e-12);
        }
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn profiles_are_monotone_in_order() {
        let grid = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
        for family in Family::LOG_CONCAVE {
            let r = moment_growth_profile(&row(family, 3), &grid, 50_000, 12).unwrap();
            for w in r.cells.windows(2) {
                let (a, b) = (w[0].extra("moment").unwrap(), w[1].extra("moment").unwrap());
                assert!(b >= a - 3.0 * w[1].lhs_se.max(w[0].lhs_se), "{family}");
            }
        }
    }
}
