use approx::assert_relative_eq;
use ndarray::Array2;
use proptest::prelude::*;

use lpqlab::norms::{max_col_norm, max_row_norm};
use lpqlab::opnorm::{brute_oracle_small, spectral_norm, upper_bound, PowerIteration};
use lpqlab::PQParams;

fn matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = Array2<f64>> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        prop::collection::vec(-3.0f64..3.0, m * n)
            .prop_map(move |v| Array2::from_shape_vec((m, n), v).unwrap())
    })
}

fn exponents() -> impl Strategy<Value = PQParams> {
    (2.0f64..8.0, 2.0f64..8.0).prop_map(|(p, q)| PQParams::new(p, q).unwrap())
}

fn engine() -> PowerIteration {
    PowerIteration::default().with_tol(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lower_is_sandwiched(x in matrix(6, 6), pq in exponents()) {
        let est = engine().run(x.view(), &pq);
        prop_assert!(est.lower <= est.upper * (1.0 + 1e-12));
        prop_assert!(est.upper <= upper_bound(x.view(), &pq) * (1.0 + 1e-12));
        // e_j starts give the column norms, rows give the trivial upper bound
        prop_assert!(est.lower >= max_col_norm(x.view(), pq.q) * (1.0 - 1e-12));
        prop_assert!(est.upper >= max_row_norm(x.view(), pq.p) * (1.0 - 1e-9));
    }

    #[test]
    fn homogeneous(x in matrix(5, 5), pq in exponents(), c in -4.0f64..4.0) {
        prop_assume!(c.abs() > 1e-3);
        let base = engine().run(x.view(), &pq).lower;
        let scaled = engine().run((&x * c).view(), &pq).lower;
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-8 * (1.0 + c.abs() * base));
    }

    #[test]
    fn agrees_with_grid_oracle(x in matrix(5, 3), pq in exponents()) {
        let est = engine().run(x.view(), &pq).lower;
        let oracle = brute_oracle_small(x.view(), &pq, 40).unwrap();
        prop_assert!(est >= oracle * (1.0 - 5e-3), "power {est} < oracle {oracle}");
    }

    #[test]
    fn witness_attains_lower(x in matrix(5, 5), pq in exponents()) {
        let est = engine().run(x.view(), &pq);
        let w: Vec<f64> = est.witness.to_vec();
        let wn = lpqlab::norms::lp_norm(&w, pq.p_conj).unwrap();
        prop_assert!((wn - 1.0).abs() < 1e-9);
        let image: Vec<f64> = x.dot(&est.witness).to_vec();
        let value = lpqlab::norms::lp_norm(&image, pq.q).unwrap();
        prop_assert!((value - est.lower).abs() <= 1e-9 * (1.0 + est.lower));
    }
}

#[test]
fn spectral_and_duality_on_fixed_matrix() {
    let x = ndarray::array![
        [1.0, -2.0, 0.5],
        [0.3, 0.8, -1.1],
        [2.2, 0.0, 0.7],
        [-0.4, 1.5, 1.0]
    ];
    let pq = PQParams::new(2.0, 2.0).unwrap();
    assert_relative_eq!(
        engine().run(x.view(), &pq).lower,
        spectral_norm(x.view()),
        max_relative = 1e-10
    );
    for (p, q) in [(2.0, 3.0), (3.0, 4.0), (4.0, 2.0)] {
        let pq = PQParams::new(p, q).unwrap();
        let a = engine().run(x.view(), &pq).lower;
        let b = engine().run(x.t(), &pq.transposed()).lower;
        assert_relative_eq!(a, b, max_relative = 1e-8);
    }
}

#[test]
fn exponents_below_two_are_rejected() {
    for (p, q) in [(1.5, 2.0), (2.0, 1.0), (f64::INFINITY, 2.0), (2.0, f64::NAN)] {
        assert!(matches!(PQParams::new(p, q), Err(lpqlab::Error::Domain(_))), "({p}, {q})");
    }
}
