//! Jacobi-preconditioned Krylov solvers.
//!
//! [`cg`] handles the symmetric positive definite mass/stiffness blocks,
//! [`bicgstab`] the nonsymmetric coupled `(u, v)` system. Both report the
//! true relative residual `‖b − Ax‖₂ / ‖b‖₂` and restart from the true
//! residual if the recursively updated one drifts below tolerance first.

use super::sparse::{dot, norm2, norm_inf, SparseMatrix};
use crate::{Error, Result};

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Components below `-NEGATIVITY_TOL * ‖x‖∞` count as a positivity violation.
pub const NEGATIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverOptions {
    /// `max_iter = 10 · n`.
    pub fn for_size(n: usize, tol: f64) -> Self {
        Self {
            tol,
            max_iter: 10 * n.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Square operator with a diagonal (for Jacobi preconditioning).
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y)
    }

    fn diagonal(&self) -> Vec<f64> {
        SparseMatrix::diagonal(self)
    }
}

/// 2×2 block system over the `(u, v)` unknowns:
///
/// ```text
/// [ A_uu  A_uv ] [u]   [b_u]
/// [ A_vu  A_vv ] [v] = [b_v]
/// ```
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub blocks: [[SparseMatrix; 2]; 2],
    pub rhs: [Vec<f64>; 2],
}

impl BlockSystem {
    pub fn new(blocks: [[SparseMatrix; 2]; 2], rhs: [Vec<f64>; 2]) -> Result<Self> {
        let n0 = blocks[0][0].n_rows();
        let n1 = blocks[1][1].n_rows();
        let ok = blocks[0][0].n_cols() == n0
            && blocks[1][1].n_cols() == n1
            && blocks[0][1].n_rows() == n0
            && blocks[0][1].n_cols() == n1
            && blocks[1][0].n_rows() == n1
            && blocks[1][0].n_cols() == n0
            && rhs[0].len() == n0
            && rhs[1].len() == n1;
        if !ok {
            return Err(Error::Dimension("block system is not conformal".into()));
        }
        Ok(Self { blocks, rhs })
    }

    pub fn split(&self) -> usize {
        self.blocks[0][0].n_rows()
    }

    fn stacked_rhs(&self) -> Vec<f64> {
        let mut b = self.rhs[0].clone();
        b.extend_from_slice(&self.rhs[1]);
        b
    }
}

impl LinearOperator for BlockSystem {
    fn dim(&self) -> usize {
        self.blocks[0][0].n_rows() + self.blocks[1][1].n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n0 = self.split();
        let (x0, x1) = x.split_at(n0);
        let (y0, y1) = y.split_at_mut(n0);
        for (row, y_r) in self.blocks.iter().zip([y0, y1]) {
            for (i, yi) in y_r.iter_mut().enumerate() {
                let mut s = 0.0;
                for (j, v) in row[0].row(i) {
                    s += v * x0[j];
                }
                for (j, v) in row[1].row(i) {
                    s += v * x1[j];
                }
                *yi = s;
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = self.blocks[0][0].diagonal();
        d.extend(self.blocks[1][1].diagonal());
        d
    }
}

/// Inverse diagonal for [`pcg`]; fails on zero or non-finite diagonals.
pub fn jacobi_inverse(op: &impl LinearOperator) -> Result<Vec<f64>> {
    op.diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            if d.is_finite() && d != 0.0 {
                Ok(1.0 / d)
            } else {
                Err(Error::Consistency(format!("zero or non-finite diagonal at row {i}")))
            }
        })
        .collect()
}

fn true_residual(op: &impl LinearOperator, b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm2(r)
}

/// Preconditioned conjugate gradients; `x` holds the initial guess on entry.
pub fn cg(
    op: &impl LinearOperator,
    b: &[f64],
    x: &mut [f64],
    opts: SolverOptions,
) -> Result<SolveStats> {
    let inv_diag = jacobi_inverse(op)?;
    pcg(op, &inv_diag, b, x, opts)
}

/// [`cg`] with a caller-supplied inverse diagonal.
pub fn pcg(
    op: &impl LinearOperator,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    opts: SolverOptions,
) -> Result<SolveStats> {
    let n = op.dim();
    if b.len() != n || x.len() != n || inv_diag.len() != n {
        return Err(Error::Dimension("cg: vector length mismatch".into()));
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(SolveStats::default());
    }
    let target = opts.tol * bnorm;
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut iterations = 0;

    let mut rnorm = true_residual(op, b, x, &mut r);
    while iterations < opts.max_iter {
        if rnorm <= target {
            return Ok(SolveStats {
                iterations,
                residual: rnorm / bnorm,
            });
        }
        let mut rz = 0.0;
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
            rz += r[i] * z[i];
        }
        p.copy_from_slice(&z);
        while iterations < opts.max_iter {
            iterations += 1;
            op.apply(&p, &mut q);
            let pq = dot(&p, &q);
            if pq <= 0.0 || !pq.is_finite() {
                return Err(Error::Consistency(
                    "cg: operator is not positive definite".into(),
                ));
            }
            let alpha = rz / pq;
            let mut rr = 0.0;
            let mut rz_new = 0.0;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
                z[i] = inv_diag[i] * r[i];
                rr += r[i] * r[i];
                rz_new += r[i] * z[i];
            }
            if rr.sqrt() <= target {
                break;
            }
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        rnorm = true_residual(op, b, x, &mut r);
    }
    if rnorm <= target {
        return Ok(SolveStats {
            iterations,
            residual: rnorm / bnorm,
        });
    }
    Err(Error::NoConvergence {
        method: "cg",
        iterations,
        residual: rnorm / bnorm,
    })
}

/// Right-preconditioned BiCGStab; `x` holds the initial guess on entry.
pub fn bicgstab(
    op: &impl LinearOperator,
    b: &[f64],
    x: &mut [f64],
    opts: SolverOptions,
) -> Result<SolveStats> {
    let n = op.dim();
    if b.len() != n || x.len() != n {
        return Err(Error::Dimension("bicgstab: vector length mismatch".into()));
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(SolveStats::default());
    }
    let inv_diag = jacobi_inverse(op)?;
    let target = opts.tol * bnorm;
    let mut r = vec![0.0; n];
    let mut r_hat = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut iterations = 0;

    let mut rnorm = true_residual(op, b, x, &mut r);
    while iterations < opts.max_iter {
        if rnorm <= target {
            return Ok(SolveStats {
                iterations,
                residual: rnorm / bnorm,
            });
        }
        // (Re)start from the true residual.
        r_hat.copy_from_slice(&r);
        p.fill(0.0);
        v.fill(0.0);
        let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
        while iterations < opts.max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new == 0.0 || !rho_new.is_finite() {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                p_hat[i] = inv_diag[i] * p[i];
            }
            op.apply(&p_hat, &mut v);
            let rv = dot(&r_hat, &v);
            if rv == 0.0 || !rv.is_finite() {
                break;
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm2(&s) <= target {
                for i in 0..n {
                    x[i] += alpha * p_hat[i];
                }
                break;
            }
            for i in 0..n {
                s_hat[i] = inv_diag[i] * s[i];
            }
            op.apply(&s_hat, &mut t);
            let tt = dot(&t, &t);
            if tt == 0.0 || !tt.is_finite() {
                for i in 0..n {
                    x[i] += alpha * p_hat[i];
                }
                break;
            }
            omega = dot(&t, &s) / tt;
            for i in 0..n {
                x[i] += alpha * p_hat[i] + omega * s_hat[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm2(&r) <= target || omega == 0.0 {
                break;
            }
        }
        let prev = rnorm;
        rnorm = true_residual(op, b, x, &mut r);
        if !rnorm.is_finite() {
            break;
        }
        // A restart that made no progress at all will not make any later.
        if rnorm > target && rnorm >= prev && iterations >= opts.max_iter / 2 {
            break;
        }
    }
    if rnorm <= target {
        return Ok(SolveStats {
            iterations,
            residual: rnorm / bnorm,
        });
    }
    Err(Error::NoConvergence {
        method: "bicgstab",
        iterations,
        residual: rnorm / bnorm,
    })
}

/// Solves a symmetric positive definite system from a zero initial guess.
pub fn solve_spd(a: &SparseMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let mut x = vec![0.0; b.len()];
    cg(a, b, &mut x, SolverOptions { tol, max_iter })?;
    Ok(x)
}

/// Solves the coupled block system from a zero initial guess.
pub fn solve_coupled(
    system: &BlockSystem,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (u, v, _) = solve_coupled_from(system, None, SolverOptions { tol, max_iter })?;
    Ok((u, v))
}

/// Solves the coupled block system from an optional initial guess and checks
/// the sign of the solution when the right-hand side is nonnegative.
pub fn solve_coupled_from(
    system: &BlockSystem,
    guess: Option<(&[f64], &[f64])>,
    opts: SolverOptions,
) -> Result<(Vec<f64>, Vec<f64>, SolveStats)> {
    let n0 = system.split();
    let b = system.stacked_rhs();
    let mut x = match guess {
        Some((g0, g1)) => {
            if g0.len() != n0 || g1.len() != system.dim() - n0 {
                return Err(Error::Dimension("initial guess has the wrong length".into()));
            }
            let mut x = g0.to_vec();
            x.extend_from_slice(g1);
            x
        }
        None => vec![0.0; b.len()],
    };
    let stats = bicgstab(system, &b, &mut x, opts)?;
    if b.iter().all(|&bi| bi >= 0.0) {
        let floor = -NEGATIVITY_TOL * norm_inf(&x);
        if let Some((index, &value)) = x.iter().enumerate().find(|(_, &xi)| xi < floor) {
            return Err(Error::PositivityViolation { index, value });
        }
    }
    let v = x.split_off(n0);
    Ok((x, v, stats))
}
