//! Sparse storage and iterative solvers.

mod gauss_seidel;
mod solvers;
mod sparse;

pub use gauss_seidel::{block_gauss_seidel, NodeBlockSystem};
pub use solvers::{
    bicgstab, cg, jacobi_inverse, pcg, solve_coupled, solve_coupled_from, solve_spd, BlockSystem, LinearOperator,
    SolveStats, SolverOptions, DEFAULT_TOL, NEGATIVITY_TOL,
};
pub use sparse::{dot, norm2, norm_inf, SparseMatrix};
