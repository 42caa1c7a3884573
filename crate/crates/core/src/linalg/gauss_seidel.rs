//! Node-block Gauss–Seidel for coupled systems whose off-diagonal blocks are
//! diagonal.
//!
//! Each node update solves the local 2×2 system in `(u_i, v_i)` exactly. When
//! all off-diagonal entries of the full matrix are nonpositive, the local
//! determinants are positive and the right-hand side is nonnegative, every
//! iterate started from a nonnegative guess stays nonnegative in floating
//! point: each update only adds and multiplies nonnegative numbers.

use super::solvers::{BlockSystem, SolveStats, SolverOptions};
use super::sparse::{norm2, SparseMatrix};
use crate::{Error, Result};

/// Coupled `(u, v)` system stored per node: one 2×2 block per node plus the
/// off-diagonal parts of the two diagonal blocks, which share one sparsity
/// pattern.
#[derive(Debug, Clone)]
pub struct NodeBlockSystem {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    /// Interleaved off-diagonal values `(a^u_ij, a^v_ij)`.
    off: Vec<[f64; 2]>,
    pub blocks: Vec<[[f64; 2]; 2]>,
    pub rhs: [Vec<f64>; 2],
}

impl NodeBlockSystem {
    /// Zeroed node blocks and right-hand sides. `a_u` and `a_v` must share a
    /// pattern; their diagonals are discarded.
    pub fn new(a_u: &SparseMatrix, a_v: &SparseMatrix) -> Result<Self> {
        let n = a_u.n_rows();
        if a_u.n_cols() != n || !a_u.same_pattern(a_v) {
            return Err(Error::Dimension("node-block Gauss-Seidel needs square blocks on one pattern".into()));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(a_u.nnz());
        let mut off = Vec::with_capacity(a_u.nnz());
        offsets.push(0);
        let (o, c) = (a_u.row_offsets(), a_u.column_indices());
        for i in 0..n {
            for k in o[i]..o[i + 1] {
                if c[k] != i {
                    cols.push(c[k]);
                    off.push([a_u.values()[k], a_v.values()[k]]);
                }
            }
            offsets.push(cols.len());
        }
        Ok(Self {
            offsets,
            cols,
            off,
            blocks: vec![[[0.0; 2]; 2]; n],
            rhs: [vec![0.0; n], vec![0.0; n]],
        })
    }

    /// Converts a block system whose coupling blocks are diagonal.
    pub fn from_block_system(system: &BlockSystem) -> Result<Self> {
        let n = system.split();
        let [[a, b], [c, d]] = &system.blocks;
        let mut out = Self::new(a, d)?;
        for m in [b, c] {
            for i in 0..n {
                if m.row(i).any(|(j, v)| j != i && v != 0.0) {
                    return Err(Error::Dimension("coupling blocks must be diagonal".into()));
                }
            }
        }
        for i in 0..n {
            out.blocks[i] = [[a.get(i, i), b.get(i, i)], [c.get(i, i), d.get(i, i)]];
        }
        out.rhs = system.rhs.clone();
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    /// `(Σ_j a^u_ij u_j, Σ_j a^v_ij v_j)` over the off-diagonal entries.
    #[inline(always)]
    fn neighbour_sums(&self, i: usize, u: &[f64], v: &[f64]) -> (f64, f64) {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        let mut su = 0.0;
        let mut sv = 0.0;
        for (&j, &[au, av]) in self.cols[lo..hi].iter().zip(&self.off[lo..hi]) {
            su += au * u[j];
            sv += av * v[j];
        }
        (su, sv)
    }

    /// Inverses of the node blocks; a nonpositive determinant is reported as
    /// a positivity loss at that node, since the local inverse would then
    /// have negative entries.
    fn local_inverses(&self) -> Result<Vec<[[f64; 2]; 2]>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, &[[a, b], [c, d]])| {
                let det = a * d - b * c;
                if !(det > 0.0) {
                    return Err(Error::PositivityLoss {
                        node: i,
                        quantity: "local block determinant",
                        value: det,
                    });
                }
                let r = 1.0 / det;
                Ok([[d * r, -b * r], [-c * r, a * r]])
            })
            .collect()
    }

    /// Local solve at node `i`; returns the squared, diagonally weighted
    /// change.
    #[inline(always)]
    fn relax(&self, inv: &[[f64; 2]; 2], i: usize, u: &mut [f64], v: &mut [f64]) -> f64 {
        let (su, sv) = self.neighbour_sums(i, u, v);
        let ru = self.rhs[0][i] - su;
        let rv = self.rhs[1][i] - sv;
        let [[p, q], [r, t]] = *inv;
        let ui = p * ru + q * rv;
        let vi = r * ru + t * rv;
        let [[a, _], [_, d]] = self.blocks[i];
        let du = a * (ui - u[i]);
        let dv = d * (vi - v[i]);
        u[i] = ui;
        v[i] = vi;
        du * du + dv * dv
    }

    pub fn residual_norm(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, &[[a, b], [c, d]]) in self.blocks.iter().enumerate() {
            let (su, sv) = self.neighbour_sums(i, u, v);
            let ru = self.rhs[0][i] - su - a * u[i] - b * v[i];
            let rv = self.rhs[1][i] - sv - c * u[i] - d * v[i];
            s += ru * ru + rv * rv;
        }
        s.sqrt()
    }

    /// Symmetric (forward then backward) sweeps until the true relative
    /// residual `‖b − Ax‖₂ / ‖b‖₂` is at most `tol`. `max_iter` counts
    /// symmetric sweeps.
    ///
    /// The residual is evaluated only once the weighted change of a sweep,
    /// extrapolated with the observed contraction rate, drops below the
    /// target. A nonpositive local determinant is a positivity loss.
    pub fn solve(&self, u: &mut [f64], v: &mut [f64], opts: SolverOptions) -> Result<SolveStats> {
        let n = self.n();
        if u.len() != n || v.len() != n {
            return Err(Error::Dimension("initial guess has the wrong length".into()));
        }
        let b_norm = norm2(&self.rhs[0]).hypot(norm2(&self.rhs[1]));
        if b_norm == 0.0 {
            u.fill(0.0);
            v.fill(0.0);
            return Ok(SolveStats::default());
        }
        let inverses = self.local_inverses()?;
        let target = opts.tol * b_norm;
        let mut iterations = 0;
        let mut previous = f64::INFINITY;
        loop {
            let mut res = f64::NAN;
            let mut converged = false;
            if iterations > 0 {
                res = self.residual_norm(u, v);
                converged = res <= target;
            }
            if converged {
                return Ok(SolveStats {
                    iterations,
                    residual: res / b_norm,
                });
            }
            loop {
                if iterations == opts.max_iter {
                    return Err(Error::NoConvergence {
                        method: "block Gauss-Seidel",
                        iterations,
                        residual: res / b_norm,
                    });
                }
                for (i, inv) in inverses.iter().enumerate() {
                    self.relax(inv, i, u, v);
                }
                let mut change = 0.0;
                for (i, inv) in inverses.iter().enumerate().rev() {
                    change += self.relax(inv, i, u, v);
                }
                iterations += 1;
                let change = change.sqrt();
                if !change.is_finite() {
                    return Err(Error::NoConvergence {
                        method: "block Gauss-Seidel",
                        iterations,
                        residual: f64::NAN,
                    });
                }
                let rate = (change / previous).min(0.5);
                previous = change;
                if change * rate / (1.0 - rate) <= target {
                    break;
                }
            }
        }
    }
}

/// [`NodeBlockSystem::solve`] on a general block system with diagonal
/// coupling blocks.
pub fn block_gauss_seidel(
    system: &BlockSystem,
    u: &mut [f64],
    v: &mut [f64],
    opts: SolverOptions,
) -> Result<SolveStats> {
    NodeBlockSystem::from_block_system(system)?.solve(u, v, opts)
}
