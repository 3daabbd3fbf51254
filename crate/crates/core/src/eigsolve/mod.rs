//! Source and eigenvalue solvers, the dense oracle and convergence rates.

pub mod direct;
pub mod lanczos;
pub mod oracle;
pub mod rates;

pub use direct::{relative_residual, solve_constrained_source, solve_source, Factor};
pub use lanczos::{solve_eigs, solve_eigs_with, EigenOptions, EigenPair, SolveReport};
pub use oracle::{constraint_null_space, dense_oracle_eigs, dense_oracle_eigs_with, DENSE_LIMIT};
pub use rates::{h_rates, p_rate};
