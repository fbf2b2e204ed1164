//! Monte Carlo laboratory for `ℓ_{p'} → ℓ_q` operator norms of structured
//! random matrices `X_ij = A_ij Y_ij` whose rows are i.i.d. isotropic
//! log-concave vectors.
//!
//! * [`norms`]: vector norms, Hölder conjugates, coefficient matrices.
//! * [`ensembles`]: samplers for the random matrix laws.
//! * [`opnorm`]: certified lower bounds, relaxation upper bounds and oracles for `‖X‖_{p'→q}`.
//! * [`bounds`]: right-hand-side terms of the operator-norm inequalities and their Monte Carlo verification.
//! * [`momentslab`]: moment and tail inequalities for log-concave and β-regular laws.
//! * [`harness`]: configuration, seeded execution and CSV/JSONL output.

// `!(x >= a)` is used on purpose so NaN fails every domain check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod momentslab;
pub mod norms;
pub mod opnorm;

pub use error::{Error, Result};
pub use norms::{CoeffMatrix, Exponent, PQParams};
