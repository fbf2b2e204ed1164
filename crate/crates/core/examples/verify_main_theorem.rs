//! The main upper bound and its reverse on one ensemble: measured
//! `E‖X‖_{p'→q}` against each right-hand-side term.
//!
//!     cargo run --release --example verify_main_theorem [-- FAMILY DIM]

use lpqlab::bounds::{verify_batch, InequalityId, VerifyOptions};
use lpqlab::ensembles::{EnsembleSpec, Family};
use lpqlab::harness::suites::FULL_PQ;
use lpqlab::{CoeffMatrix, PQParams};

fn main() -> lpqlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("laplace").parse()?;
    let dim: usize = args
        .next()
        .map_or(32, |s| s.parse().expect("DIM must be an integer"));

    let spec = EnsembleSpec::log_concave(family, CoeffMatrix::ones(dim, dim)?)?;
    println!("{}\n", InequalityId::Main11.statement());
    println!("{}, T = 100", spec.summary());
    let ids = [InequalityId::Main11, InequalityId::Reverse12];
    for (p, q) in FULL_PQ {
        let pq = PQParams::new(p, q)?;
        let reports = verify_batch(&ids, &spec, &pq, 100, 5, &VerifyOptions::default())?;
        let (main, rev) = (&reports[0], &reports[1]);
        let terms: Vec<String> = main
            .terms
            .iter()
            .map(|t| format!("{}={:.3}", t.name, t.value))
            .collect();
        println!(
            "p={p} q={q}  E|X| = {:.4} ± {:.4}  ratio {:.3}  reverse {:.3}  [{}]",
            main.lhs_mean,
            main.lhs_se,
            main.ratio,
            rev.reverse_ratio.unwrap_or(f64::NAN),
            terms.join(" ")
        );
    }
    Ok(())
}
