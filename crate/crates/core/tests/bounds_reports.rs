use approx::assert_relative_eq;

use lpqlab::bounds::{
    theorem_terms, verify_batch, verify_with, AuxExpectations, InequalityId, TermOptions,
    VerifyOptions,
};
use lpqlab::ensembles::{EnsembleSpec, Family, MixingLaw};
use lpqlab::{CoeffMatrix, Error, PQParams};

fn aux() -> AuxExpectations {
    AuxExpectations {
        max_entry: Some(1.7),
        max_row_p: Some(2.5),
        max_col_q: Some(3.1),
    }
}

fn spec_for(id: InequalityId, m: usize, n: usize) -> EnsembleSpec {
    let coeff = CoeffMatrix::ones(m, n).unwrap();
    match id {
        InequalityId::Mixture42 => {
            EnsembleSpec::gaussian_mixture(coeff, 1.0, MixingLaw::Rows(Family::Gaussian))
        }
        InequalityId::Beta52 => EnsembleSpec::beta_regular(coeff, 1.0, 2.0),
        _ => EnsembleSpec::log_concave(Family::Laplace, coeff),
    }
    .unwrap()
}

#[test]
fn every_report_is_internally_consistent() {
    let pq = PQParams::new(3.0, 2.0).unwrap();
    for id in InequalityId::ALL {
        let spec = spec_for(id, 8, 6);
        let r = verify_with(id, &spec, &pq, 20, 4, &VerifyOptions::default()).unwrap();
        let sum: f64 = r.terms.iter().map(|t| t.value).sum();
        assert_relative_eq!(r.rhs_bracket, sum, max_relative = 1e-12);
        assert_relative_eq!(r.ratio, r.lhs_mean / r.rhs_bracket, max_relative = 1e-12);
        assert!(r.lhs_se >= 0.0 && r.lhs_mean > 0.0, "{id}");
        assert!(
            r.terms
                .iter()
                .all(|t| t.value.is_finite() && t.value >= 0.0),
            "{id}"
        );
        assert!(
            r.lhs_upper_mean
                .is_none_or(|u| u >= r.lhs_mean * (1.0 - 1e-12)),
            "{id}"
        );
        assert_eq!((r.m, r.n, r.trials, r.seed), (8, 6, 20, 4));
    }
}

#[test]
fn shared_draws_match_single_runs() {
    let pq = PQParams::new(2.0, 4.0).unwrap();
    let spec = spec_for(InequalityId::Main11, 10, 10);
    let ids = [
        InequalityId::Main11,
        InequalityId::Reverse12,
        InequalityId::Lemma31,
        InequalityId::Cor13,
    ];
    let opts = VerifyOptions::default();
    let batch = verify_batch(&ids, &spec, &pq, 16, 8, &opts).unwrap();
    for (id, shared) in ids.iter().zip(&batch) {
        let single = verify_with(*id, &spec, &pq, 16, 8, &opts).unwrap();
        assert_eq!(shared.lhs_mean, single.lhs_mean, "{id}");
        assert_eq!(shared.rhs_bracket, single.rhs_bracket, "{id}");
    }
}

#[test]
fn terms_scale_linearly_with_coefficients() {
    let pq = PQParams::new(2.0, 3.0).unwrap();
    let coeff = CoeffMatrix::from_rows(&[
        vec![1.0, 0.5, 0.0],
        vec![0.2, 2.0, 1.0],
        vec![0.0, 0.0, 3.0],
    ])
    .unwrap();
    let c = 2.5;
    let scaled_aux = AuxExpectations {
        max_entry: aux().max_entry.map(|v| c * v),
        max_row_p: aux().max_row_p.map(|v| c * v),
        max_col_q: aux().max_col_q.map(|v| c * v),
    };
    let opts = TermOptions {
        gamma: Some(1.0),
        beta: Some(1.0),
        ..TermOptions::default()
    };
    for id in InequalityId::ALL {
        let base = theorem_terms(id, &coeff, &pq, &aux(), &opts).unwrap();
        let big = theorem_terms(id, &coeff.scaled(c).unwrap(), &pq, &scaled_aux, &opts).unwrap();
        for (a, b) in base.iter().zip(&big) {
            assert_eq!(a.name, b.name);
            assert_relative_eq!(c * a.value, b.value, max_relative = 1e-12);
        }
    }
}

#[test]
fn improved_exponents_never_increase_terms() {
    let coeff = CoeffMatrix::ones(32, 32).unwrap();
    let pq = PQParams::new(3.0, 3.0).unwrap();
    let plain = TermOptions {
        gamma: Some(1.0),
        gaussian_mixing: true,
        ..TermOptions::default()
    };
    let improved = TermOptions {
        improved_exponents: true,
        ..plain
    };
    for id in [InequalityId::Uncond16, InequalityId::Mixture42] {
        let a = theorem_terms(id, &coeff, &pq, &aux(), &plain).unwrap();
        let b = theorem_terms(id, &coeff, &pq, &aux(), &improved).unwrap();
        assert!(
            a.iter()
                .zip(&b)
                .all(|(x, y)| y.value <= x.value * (1.0 + 1e-12)),
            "{id}"
        );
        assert!(a.iter().zip(&b).any(|(x, y)| y.value < x.value), "{id}");
    }
}

#[test]
fn hypotheses_are_enforced() {
    let pq = PQParams::new(2.0, 2.0).unwrap();
    let opts = VerifyOptions::default();
    let beta = spec_for(InequalityId::Beta52, 4, 4);
    assert!(matches!(
        verify_with(InequalityId::Main11, &beta, &pq, 4, 1, &opts),
        Err(Error::Incompatible(_))
    ));
    let ball =
        EnsembleSpec::log_concave(Family::BallUniform, CoeffMatrix::ones(4, 4).unwrap()).unwrap();
    assert!(matches!(
        verify_with(InequalityId::Uncond16, &ball, &pq, 4, 1, &opts),
        Err(Error::Incompatible(_))
    ));
    let wrapped = EnsembleSpec::unconditional(ball).unwrap();
    assert!(verify_with(InequalityId::Uncond16, &wrapped, &pq, 4, 1, &opts).is_ok());
    assert!(matches!(
        "main99".parse::<InequalityId>(),
        Err(Error::UnknownId(_))
    ));
    for id in InequalityId::ALL {
        assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        assert!(!id.statement().is_empty());
    }
}
