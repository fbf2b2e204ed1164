//! Deterministic primitives: vector `r`-norms, Hölder conjugation,
//! rearrangements and the coefficient-matrix container.

use std::fmt;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{domain, Error, Result};

/// A norm exponent `r ∈ [1, ∞]`. Infinity is its own variant so powers never overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// The finite value, or `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(r) => r,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl From<f64> for Exponent {
    fn from(r: f64) -> Self {
        if r == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::Finite(r)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean of the values after sorting them, so the result does not depend on input order.
pub fn sorted_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    compensated_sum(sorted) / values.len() as f64
}

/// Mean and standard error (sample SD / √T).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let t = values.len();
    let mean = sorted_mean(values);
    if t < 2 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let var = compensated_sum(dev) / (t - 1) as f64;
    (mean, (var / t as f64).sqrt())
}

/// `‖x‖_r` without validation; caller guarantees finite entries.
pub(crate) fn lp_norm_unchecked<'a, I>(x: I, r: Exponent) -> f64
where
    I: IntoIterator<Item = &'a f64> + Clone,
{
    let max = x
        .clone()
        .into_iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    match r {
        Exponent::Infinity => max,
        Exponent::Finite(1.0) => compensated_sum(x.into_iter().map(|v| v.abs())),
        Exponent::Finite(2.0) => {
            max * compensated_sum(x.into_iter().map(|v| {
                let s = v / max;
                s * s
            }))
            .sqrt()
        }
        Exponent::Finite(r) => {
            max * compensated_sum(x.into_iter().map(|v| (v.abs() / max).powf(r))).powf(1.0 / r)
        }
    }
}

/// `‖x‖_r = (Σ|x_i|^r)^{1/r}`, or `max|x_i|` for `r = ∞`.
pub fn lp_norm(x: &[f64], r: impl Into<Exponent>) -> Result<f64> {
    let r = r.into();
    check_exponent(r)?;
    check_finite(x)?;
    Ok(lp_norm_unchecked(x.iter(), r))
}

fn check_exponent(r: Exponent) -> Result<()> {
    match r {
        Exponent::Finite(v) if !(v >= 1.0) || !v.is_finite() => {
            domain(format!("norm exponent must be >= 1, got {v}"))
        }
        _ => Ok(()),
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        domain("non-finite entry")
    }
}

/// `r' = r/(r−1)`, with `1 ↔ ∞`.
pub fn holder_conjugate(r: impl Into<Exponent>) -> Result<Exponent> {
    match r.into() {
        Exponent::Infinity => Ok(Exponent::Finite(1.0)),
        Exponent::Finite(1.0) => Ok(Exponent::Infinity),
        Exponent::Finite(r) if r > 1.0 && r.is_finite() => Ok(Exponent::Finite(r / (r - 1.0))),
        Exponent::Finite(r) => domain(format!("Hölder conjugate needs r >= 1, got {r}")),
    }
}

/// `|a|` sorted in nonincreasing order.
pub fn nonincreasing_rearrangement(a: &[f64]) -> Result<Vec<f64>> {
    check_finite(a)?;
    let mut out: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    Ok(out)
}

/// `max_ij |X_ij|`.
pub fn max_abs_entry(x: ArrayView2<'_, f64>) -> Result<f64> {
    if x.is_empty() {
        return domain("max_abs_entry of an empty matrix");
    }
    let mut max = 0.0f64;
    for &v in x.iter() {
        if !v.is_finite() {
            return domain("non-finite entry");
        }
        max = max.max(v.abs());
    }
    Ok(max)
}

/// Exponent pair `(p, q) ∈ [2, ∞)²` together with the conjugates `p'`, `q'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQParams {
    pub p: f64,
    pub q: f64,
    pub p_conj: f64,
    pub q_conj: f64,
}

impl PQParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 2.0 && p.is_finite() && q >= 2.0 && q.is_finite()) {
            return domain(format!("need finite p, q >= 2, got ({p}, {q})"));
        }
        Ok(Self {
            p,
            q,
            p_conj: p / (p - 1.0),
            q_conj: q / (q - 1.0),
        })
    }

    /// The pair describing `Xᵀ`: `‖X‖_{p'→q} = ‖Xᵀ‖_{q'→p}`.
    pub fn transposed(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
            p_conj: self.q_conj,
            q_conj: self.p_conj,
        }
    }
}

impl fmt::Display for PQParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={})", self.p, self.q)
    }
}

/// Deterministic `m × n` coefficient matrix (the `A` or `B` multiplying the random entries).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix(Array2<f64>);

impl CoeffMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return domain("coefficient matrix must have m, n >= 1");
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return domain("coefficient matrix has a non-finite entry");
        }
        Ok(Self(entries))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return domain("ragged coefficient rows");
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let arr = Array2::from_shape_vec((m, n), flat).map_err(|e| Error::Domain(e.to_string()))?;
        Self::new(arr)
    }

    pub fn ones(m: usize, n: usize) -> Result<Self> {
        Self::new(Array2::ones((m, n)))
    }

    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        Self::new(Array2::zeros((m, n)))
    }

    /// `m × n` with ones on the main diagonal.
    pub fn identity(m: usize, n: usize) -> Result<Self> {
        let mut a = Array2::zeros((m, n));
        for k in 0..m.min(n) {
            a[[k, k]] = 1.0;
        }
        Self::new(a)
    }

    pub fn m(&self) -> usize {
        self.0.nrows()
    }

    pub fn n(&self) -> usize {
        self.0.ncols()
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.0.row(i)
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.0.column(j)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.0 * c)
    }

    /// `max_i ‖A_i‖_r`.
    pub fn max_row_norm(&self, r: impl Into<Exponent>) -> f64 {
        let r = r.into();
        self.0
            .rows()
            .into_iter()
            .map(|row| lp_norm_unchecked(row.iter(), r))
            .fold(0.0, f64::max)
    }

    /// `max_j ‖A^{(j)}‖_r`.
    pub fn max_col_norm(&self, r: impl Into<Exponent>) -> f64 {
        let r = r.into();
        self.0
            .columns()
            .into_iter()
            .map(|col| lp_norm_unchecked(col.iter(), r))
            .fold(0.0, f64::max)
    }
}

/// `max_i ‖X_i‖_r` for a sampled matrix.
pub fn max_row_norm(x: ArrayView2<'_, f64>, r: impl Into<Exponent>) -> f64 {
    let r = r.into();
    x.rows()
        .into_iter()
        .map(|row| lp_norm_unchecked(row.iter(), r))
        .fold(0.0, f64::max)
}

/// `max_j ‖X^{(j)}‖_r` for a sampled matrix.
pub fn max_col_norm(x: ArrayView2<'_, f64>, r: impl Into<Exponent>) -> f64 {
    let r = r.into();
    x.columns()
        .into_iter()
        .map(|col| lp_norm_unchecked(col.iter(), r))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn lp_norm_examples() {
        assert_relative_eq!(
            lp_norm(&[3.0, 4.0], 2.0).unwrap(),
            5.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            lp_norm(&[1.0, 1.0, 1.0, 1.0], 4.0).unwrap(),
            4f64.powf(0.25),
            max_relative = 1e-15
        );
        assert_relative_eq!(lp_norm(&[1.0, -2.0, 2.0], 1.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&[1.0, -7.0], Exponent::Infinity).unwrap(), 7.0);
        assert_eq!(lp_norm(&[], 3.0).unwrap(), 0.0);
        assert_eq!(lp_norm(&[0.0, 0.0], 3.0).unwrap(), 0.0);
    }

    #[test]
    fn lp_norm_rejects_bad_input() {
        assert!(lp_norm(&[f64::NAN], 2.0).is_err());
        assert!(lp_norm(&[1.0, f64::INFINITY], 2.0).is_err());
        assert!(lp_norm(&[1.0], 0.5).is_err());
    }

    #[test]
    fn lp_norm_large_entries_do_not_overflow() {
        let x = [1e200, 1e200];
        assert_relative_eq!(
            lp_norm(&x, 4.0).unwrap(),
            1e200 * 2f64.powf(0.25),
            max_relative = 1e-14
        );
    }

    #[test]
    fn compensated_summation_is_accurate() {
        // 1 + 1e4 copies of 1e-16 loses everything under naive summation
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        assert_relative_eq!(compensated_sum(v), 1.0 + 1e-12, max_relative = 1e-15);
    }

    #[test]
    fn holder_conjugate_examples() {
        assert_eq!(holder_conjugate(2.0).unwrap(), Exponent::Finite(2.0));
        assert_relative_eq!(holder_conjugate(4.0).unwrap().value(), 4.0 / 3.0);
        assert_relative_eq!(holder_conjugate(3.0).unwrap().value(), 1.5);
        assert_eq!(holder_conjugate(1.0).unwrap(), Exponent::Infinity);
        assert_eq!(
            holder_conjugate(Exponent::Infinity).unwrap(),
            Exponent::Finite(1.0)
        );
        assert!(holder_conjugate(0.9).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(
            nonincreasing_rearrangement(&[-3.0, 1.0, 2.0]).unwrap(),
            vec![3.0, 2.0, 1.0]
        );
        assert_eq!(
            nonincreasing_rearrangement(&[0.0, 0.0]).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(nonincreasing_rearrangement(&[5.0]).unwrap(), vec![5.0]);
        assert!(nonincreasing_rearrangement(&[f64::NAN]).is_err());
    }

    #[test]
    fn max_abs_entry_examples() {
        assert_eq!(
            max_abs_entry(array![[1.0, -7.0], [3.0, 2.0]].view()).unwrap(),
            7.0
        );
        assert_eq!(max_abs_entry(Array2::<f64>::eye(3).view()).unwrap(), 1.0);
        assert_eq!(
            max_abs_entry(Array2::<f64>::zeros((2, 3)).view()).unwrap(),
            0.0
        );
        assert!(max_abs_entry(Array2::<f64>::zeros((0, 3)).view()).is_err());
    }

    #[test]
    fn pq_params() {
        let pq = PQParams::new(4.0, 3.0).unwrap();
        assert_relative_eq!(1.0 / pq.p + 1.0 / pq.p_conj, 1.0, max_relative = 1e-15);
        assert_relative_eq!(1.0 / pq.q + 1.0 / pq.q_conj, 1.0, max_relative = 1e-15);
        assert!(PQParams::new(1.5, 2.0).is_err());
        assert!(PQParams::new(2.0, f64::INFINITY).is_err());
        let t = pq.transposed();
        assert_eq!((t.p, t.q), (3.0, 4.0));
    }

    #[test]
    fn coeff_matrix_views() {
        let a = CoeffMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!((a.m(), a.n()), (2, 3));
        assert_eq!(a.row(1).len(), 3);
        assert_eq!(a.column(2).len(), 2);
        assert_relative_eq!(a.max_col_norm(2.0), 45f64.sqrt());
        assert!(CoeffMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(CoeffMatrix::from_rows(&[vec![f64::NAN]]).is_err());
        assert!(CoeffMatrix::zeros(0, 2).is_err());
    }

    fn grid() -> Vec<Exponent> {
        vec![
            1.0.into(),
            1.5.into(),
            2.0.into(),
            4.0.into(),
            8.0.into(),
            Exponent::Infinity,
        ]
    }

    proptest! {
        #[test]
        fn norm_nonincreasing_in_r(x in prop::collection::vec(-1e3f64..1e3, 1..40)) {
            let values: Vec<f64> = grid().into_iter().map(|r| lp_norm(&x, r).unwrap()).collect();
            for w in values.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn triangle_inequality(
            pair in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40),
        ) {
            let x: Vec<f64> = pair.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pair.iter().map(|p| p.1).collect();
            let s: Vec<f64> = pair.iter().map(|p| p.0 + p.1).collect();
            for r in grid() {
                let lhs = lp_norm(&s, r).unwrap();
                let rhs = lp_norm(&x, r).unwrap() + lp_norm(&y, r).unwrap();
                prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
            }
        }

        #[test]
        fn conjugation_is_an_involution(r in 1.0f64..100.0) {
            let back = holder_conjugate(holder_conjugate(r).unwrap()).unwrap().value();
            prop_assert!((back - r).abs() <= 1e-12 * r);
        }

        #[test]
        fn rearrangement_preserves_norms(x in prop::collection::vec(-1e3f64..1e3, 0..40)) {
            let y = nonincreasing_rearrangement(&x).unwrap();
            let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
            a.sort_by(|u, v| v.total_cmp(u));
            prop_assert_eq!(&y, &a);
            for r in grid() {
                let (nx, ny) = (lp_norm(&x, r).unwrap(), lp_norm(&y, r).unwrap());
                prop_assert!((nx - ny).abs() <= 1e-12 * nx.max(1.0));
            }
        }
    }
}
