//! The norm engine on one matrix: power-method witness, relaxation upper
//! bound, and the three independent cross-checks (grid oracle, duality,
//! SVD at p = q = 2).
//!
//!     cargo run --release --example opnorm_engine

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};

use lpqlab::harness::derive_substream;
use lpqlab::opnorm::{brute_oracle_small, spectral_norm, PowerIteration};
use lpqlab::PQParams;

fn main() -> lpqlab::Result<()> {
    let mut rng = derive_substream(42, 0);
    let x = Array2::from_shape_simple_fn((5, 3), || StandardNormal.sample(&mut rng));
    let xt = x.t().to_owned();
    println!("X =\n{x:.3}\n");

    let engine = PowerIteration::default().with_tol(1e-12);
    println!(
        "{:>4} {:>4} {:>12} {:>12} {:>12} {:>12}",
        "p", "q", "lower", "upper", "oracle", "dual"
    );
    for (p, q) in [(2.0, 2.0), (2.0, 4.0), (3.0, 3.0), (4.0, 2.0), (2.0, 6.0)] {
        let pq = PQParams::new(p, q)?;
        let est = engine.run(x.view(), &pq);
        let oracle = brute_oracle_small(x.view(), &pq, 60)?;
        let dual = engine.run(xt.view(), &pq.transposed()).lower;
        println!(
            "{p:>4} {q:>4} {:>12.8} {:>12.8} {oracle:>12.8} {dual:>12.8}",
            est.lower, est.upper
        );
    }

    let pq = PQParams::new(2.0, 2.0)?;
    let est = engine.run(x.view(), &pq);
    println!(
        "\n(2,2): power {:.12}  svd {:.12}",
        est.lower,
        spectral_norm(x.view())
    );
    println!(
        "witness {:.4}  ({} iterations, converged: {})",
        est.witness, est.iterations, est.converged
    );
    Ok(())
}
