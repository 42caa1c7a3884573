//! Flux-corrected transport for one nodal unknown.
//!
//! The difference between a high-order and a low-order update is split into
//! antisymmetric edge fluxes, `m̃_i x^H_i = m̃_i x^L_i + dt Σ_j f_ij`, and the
//! fluxes are scaled by symmetric Zalesak factors so the corrected solution
//! stays inside the local range of `x^L` over the stencil `{i} ∪ N(i)`.
//!
//! One flux value is stored per undirected edge `(i, j)`, `i < j`; it is the
//! flux into `i`, and `j` receives its negative.

use crate::linalg::{norm2, SparseMatrix};
use crate::{Error, Result};

/// Relative tolerance of the reconstruction identity.
pub const RECONSTRUCTION_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimiterMode {
    /// Zalesak factors.
    #[default]
    Zalesak,
    /// `α ≡ 0`: keep the low-order solution.
    ForceLow,
    /// `α ≡ 1`: accept the high-order solution.
    ForceHigh,
}

impl std::str::FromStr for LimiterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zalesak" => Ok(Self::Zalesak),
            "low" | "force_low" => Ok(Self::ForceLow),
            "high" | "force_high" => Ok(Self::ForceHigh),
            other => Err(Error::Config(format!("unknown limiter '{other}'"))),
        }
    }
}

/// Summary of one limiting pass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LimiterStats {
    pub min_alpha: f64,
    pub mean_alpha: f64,
    /// Edges with nonzero flux and `α < 1`.
    pub limited_edges: usize,
}

#[derive(Debug, Clone)]
pub struct FctWorkspace {
    edges: Vec<[usize; 2]>,
    /// CSR position of `(i, j)` for each edge in the shared pattern.
    positions: Vec<usize>,
    pub x_n: Vec<f64>,
    pub x_low: Vec<f64>,
    pub x_high: Vec<f64>,
    /// Low-order solution of the coupled partner unknown.
    pub partner_low: Vec<f64>,
    pub fluxes: Vec<f64>,
    pub alpha: Vec<f64>,
    pub x_max: Vec<f64>,
    pub x_min: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    pub q_plus: Vec<f64>,
    pub q_minus: Vec<f64>,
    pub r_plus: Vec<f64>,
    pub r_minus: Vec<f64>,
}

impl FctWorkspace {
    /// Edges are the strictly upper off-diagonal entries of `pattern`, which
    /// must have a symmetric sparsity structure.
    pub fn new(pattern: &SparseMatrix) -> Result<Self> {
        let n = pattern.n_rows();
        if pattern.n_cols() != n {
            return Err(Error::Dimension("flux pattern must be square".into()));
        }
        let mut edges = Vec::new();
        let mut positions = Vec::new();
        let offsets = pattern.row_offsets();
        let cols = pattern.column_indices();
        for i in 0..n {
            for k in offsets[i]..offsets[i + 1] {
                let j = cols[k];
                if j > i {
                    if pattern.position(j, i).is_none() {
                        return Err(Error::Dimension(format!("pattern lacks ({j}, {i})")));
                    }
                    edges.push([i, j]);
                    positions.push(k);
                }
            }
        }
        let ne = edges.len();
        Ok(Self {
            edges,
            positions,
            x_n: vec![0.0; n],
            x_low: vec![0.0; n],
            x_high: vec![0.0; n],
            partner_low: vec![0.0; n],
            fluxes: vec![0.0; ne],
            alpha: vec![0.0; ne],
            x_max: vec![0.0; n],
            x_min: vec![0.0; n],
            p_plus: vec![0.0; n],
            p_minus: vec![0.0; n],
            q_plus: vec![0.0; n],
            q_minus: vec![0.0; n],
            r_plus: vec![0.0; n],
            r_minus: vec![0.0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.x_n.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn load(&mut self, x_n: &[f64], x_low: &[f64], x_high: &[f64], partner_low: &[f64]) {
        self.x_n.copy_from_slice(x_n);
        self.x_low.copy_from_slice(x_low);
        self.x_high.copy_from_slice(x_high);
        self.partner_low.copy_from_slice(partner_low);
    }

    /// Net flux into each node, `Σ_j α_ij f_ij` (or the raw sum if
    /// `limited` is false).
    pub fn flux_sums(&self, limited: bool) -> Vec<f64> {
        let mut s = vec![0.0; self.n()];
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            let f = if limited { self.alpha[e] * self.fluxes[e] } else { self.fluxes[e] };
            s[i] += f;
            s[j] -= f;
        }
        s
    }
}

/// Raw antidiffusive fluxes for unknown `x` with coupled partner `y`:
///
/// ```text
/// f_ij = a_ij [ΔL − ½ΔH − ½Δn] − b_ij ΔL + c_ij ΔyL − (m_ij/dt) [ΔH − Δn]
/// ```
///
/// with `Δz = z_j − z_i`. Afterwards the identity
/// `m̃_i (x^H_i − x^L_i) = dt Σ_j f_ij` is checked in the 2-norm relative to
/// `‖m̃ x^H‖`; a violation means the matrices do not match the ones used to
/// produce `x^L` and `x^H`.
pub fn compute_fluxes(
    ws: &mut FctWorkspace,
    a: &SparseMatrix,
    b: &SparseMatrix,
    c: &SparseMatrix,
    m: &SparseMatrix,
    lumped_mass: &[f64],
    dt: f64,
) -> Result<()> {
    antidiffusive_fluxes(ws, a, b, c, m, dt)?;
    check_reconstruction(ws, lumped_mass, dt)
}

/// The flux formula alone, without the reconstruction check.
pub fn antidiffusive_fluxes(
    ws: &mut FctWorkspace,
    a: &SparseMatrix,
    b: &SparseMatrix,
    c: &SparseMatrix,
    m: &SparseMatrix,
    dt: f64,
) -> Result<()> {
    let nnz = ws.positions.last().map_or(0, |&p| p + 1);
    for mat in [a, b, c, m] {
        if mat.nnz() < nnz || mat.n_rows() != ws.n() {
            return Err(Error::Dimension("flux matrices do not match the workspace pattern".into()));
        }
    }
    let (av, bv, cv, mv) = (a.values(), b.values(), c.values(), m.values());
    let (xl, xh, xn, yl) = (&ws.x_low, &ws.x_high, &ws.x_n, &ws.partner_low);
    for (e, (&[i, j], &k)) in ws.edges.iter().zip(&ws.positions).enumerate() {
        let dl = xl[j] - xl[i];
        let dh = xh[j] - xh[i];
        let dn = xn[j] - xn[i];
        let dy = yl[j] - yl[i];
        ws.fluxes[e] = av[k] * (dl - 0.5 * dh - 0.5 * dn) - bv[k] * dl + cv[k] * dy
            - mv[k] / dt * (dh - dn);
    }
    Ok(())
}

fn check_reconstruction(ws: &FctWorkspace, lumped_mass: &[f64], dt: f64) -> Result<()> {
    let sums = ws.flux_sums(false);
    let mut defect = Vec::with_capacity(ws.n());
    let mut scale = Vec::with_capacity(ws.n());
    for i in 0..ws.n() {
        let mi = lumped_mass[i];
        defect.push(mi * (ws.x_high[i] - ws.x_low[i]) - dt * sums[i]);
        scale.push(mi * ws.x_high[i]);
    }
    let (d, s) = (norm2(&defect), norm2(&scale));
    if d > RECONSTRUCTION_TOL * s.max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!(
            "flux reconstruction defect {:.3e} exceeds {:.0e} relative (scale {:.3e})",
            d, RECONSTRUCTION_TOL, s
        )));
    }
    Ok(())
}

/// Local extrema of `x^L` over `{i} ∪ N(i)`.
pub fn compute_bounds(ws: &mut FctWorkspace) {
    ws.x_max.copy_from_slice(&ws.x_low);
    ws.x_min.copy_from_slice(&ws.x_low);
    for &[i, j] in &ws.edges {
        let (xi, xj) = (ws.x_low[i], ws.x_low[j]);
        ws.x_max[i] = ws.x_max[i].max(xj);
        ws.x_min[i] = ws.x_min[i].min(xj);
        ws.x_max[j] = ws.x_max[j].max(xi);
        ws.x_min[j] = ws.x_min[j].min(xi);
    }
}

/// Cancels fluxes that point down the gradient of `x^L`, i.e. those that
/// would steepen rather than flatten it.
pub fn prelimit(ws: &mut FctWorkspace) {
    for (e, &[i, j]) in ws.edges.iter().enumerate() {
        if ws.fluxes[e] * (ws.x_low[i] - ws.x_low[j]) > 0.0 {
            ws.fluxes[e] = 0.0;
        }
    }
}

/// Zalesak's limiter. Requires fluxes and bounds; fills `P±`, `Q±`, `R±` and
/// `α`.
pub fn zalesak_limit(ws: &mut FctWorkspace, lumped_mass: &[f64], dt: f64) {
    ws.p_plus.fill(0.0);
    ws.p_minus.fill(0.0);
    for (&f, &[i, j]) in ws.fluxes.iter().zip(&ws.edges) {
        let (pos, neg) = (f.max(0.0), f.min(0.0));
        ws.p_plus[i] += pos;
        ws.p_minus[j] -= pos;
        ws.p_minus[i] += neg;
        ws.p_plus[j] -= neg;
    }
    for i in 0..ws.n() {
        let scale = lumped_mass[i] / dt;
        ws.q_plus[i] = scale * (ws.x_max[i] - ws.x_low[i]);
        ws.q_minus[i] = scale * (ws.x_min[i] - ws.x_low[i]);
        ws.r_plus[i] = ratio(ws.q_plus[i], ws.p_plus[i]);
        ws.r_minus[i] = ratio(ws.q_minus[i], ws.p_minus[i]);
    }
    for (e, &[i, j]) in ws.edges.iter().enumerate() {
        ws.alpha[e] = if ws.fluxes[e] > 0.0 {
            ws.r_plus[i].min(ws.r_minus[j])
        } else {
            ws.r_minus[i].min(ws.r_plus[j])
        };
    }
}

fn ratio(q: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        (q / p).min(1.0)
    }
}

/// Sets `α` according to `mode`, running bounds and the Zalesak limiter when
/// needed, and returns the corrected solution `x^L + (dt/m̃) Σ α f`.
pub fn limit(
    ws: &mut FctWorkspace,
    lumped_mass: &[f64],
    dt: f64,
    mode: LimiterMode,
    prelimiting: bool,
) -> Vec<f64> {
    compute_bounds(ws);
    match mode {
        LimiterMode::Zalesak => {
            if prelimiting {
                prelimit(ws);
            }
            zalesak_limit(ws, lumped_mass, dt);
        }
        LimiterMode::ForceLow => ws.alpha.fill(0.0),
        LimiterMode::ForceHigh => ws.alpha.fill(1.0),
    }
    corrected_solution(ws, lumped_mass, dt)
}

pub fn corrected_solution(ws: &FctWorkspace, lumped_mass: &[f64], dt: f64) -> Vec<f64> {
    let sums = ws.flux_sums(true);
    ws.x_low
        .iter()
        .zip(&sums)
        .zip(lumped_mass)
        .map(|((xl, s), m)| xl + dt / m * s)
        .collect()
}

pub fn limiter_stats(ws: &FctWorkspace) -> LimiterStats {
    if ws.alpha.is_empty() {
        return LimiterStats {
            min_alpha: 1.0,
            mean_alpha: 1.0,
            limited_edges: 0,
        };
    }
    let mut min_alpha = f64::INFINITY;
    let mut total = 0.0;
    let mut limited_edges = 0;
    for (a, f) in ws.alpha.iter().zip(&ws.fluxes) {
        min_alpha = min_alpha.min(*a);
        total += a;
        if *f != 0.0 && *a < 1.0 {
            limited_edges += 1;
        }
    }
    LimiterStats {
        min_alpha,
        mean_alpha: total / ws.alpha.len() as f64,
        limited_edges,
    }
}

/// Largest excursion of `x` outside `[x_min, x_max]` (0 if inside).
pub fn bound_violation(ws: &FctWorkspace, x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, &xi)| (xi - ws.x_max[i]).max(ws.x_min[i] - xi).max(0.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_solutions_give_zero_flux() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 0.2], vec![0.2, 1.0]]).unwrap();
        let a = SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let mut ws = FctWorkspace::new(&m).unwrap();
        ws.load(&[1.0, 3.0], &[1.0, 3.0], &[1.0, 3.0], &[0.5, 0.5]);
        let lumped = m.row_sums();
        let z = m.with_values(vec![0.0; 4]);
        compute_fluxes(&mut ws, &a, &z, &z, &m, &lumped, 0.1).unwrap();
        assert_eq!(ws.fluxes, vec![0.0]);
        let x = limit(&mut ws, &lumped, 0.1, LimiterMode::Zalesak, false);
        assert_eq!(x, ws.x_low);
    }

    #[test]
    fn hand_computed_two_node_flux() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 0.25], vec![0.25, 1.0]]).unwrap();
        let a = SparseMatrix::from_dense(&[vec![2.0, -2.0], vec![-2.0, 2.0]]).unwrap();
        let b = m.with_values(vec![0.0, 0.5, 0.5, 0.0]);
        let c = m.with_values(vec![0.0, 0.125, 0.125, 0.0]);
        let mut ws = FctWorkspace::new(&m).unwrap();
        ws.load(&[1.0, 4.0], &[1.0, 2.0], &[1.5, 1.25], &[3.0, 1.0]);
        let dt = 0.5;
        antidiffusive_fluxes(&mut ws, &a, &b, &c, &m, dt).unwrap();
        // ΔL = 1, ΔH = -0.25, Δn = 3, Δy = -2.
        let want = -2.0 * (1.0 + 0.125 - 1.5) - 0.5 * 1.0 + 0.125 * -2.0 - 0.5 * (-0.25 - 3.0);
        assert!((ws.fluxes[0] - want).abs() < 1e-15);
        // Without mass, sinks or coupling and with x^n = x^H the flux is a(ΔL − ΔH).
        let z = m.with_values(vec![0.0; 4]);
        ws.load(&[1.5, 1.25], &[1.0, 2.0], &[1.5, 1.25], &[3.0, 1.0]);
        antidiffusive_fluxes(&mut ws, &a, &z, &z, &z, dt).unwrap();
        assert_eq!(ws.fluxes[0], -2.0 * (1.0 - -0.25));
    }

    #[test]
    fn single_edge_hits_the_bound_exactly() {
        let p = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let mut ws = FctWorkspace::new(&p).unwrap();
        ws.load(&[0.0; 2], &[1.0, 2.0], &[0.0; 2], &[0.0; 2]);
        ws.fluxes[0] = 10.0;
        let lumped = [1.0, 1.0];
        let x = limit(&mut ws, &lumped, 0.5, LimiterMode::Zalesak, false);
        assert_eq!(x[0], 2.0);
        assert_eq!(x[1], 1.0);
        assert_eq!(ws.alpha[0], 0.2);
    }

    #[test]
    fn uniform_low_order_state_blocks_all_fluxes() {
        let p = SparseMatrix::from_dense(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        let mut ws = FctWorkspace::new(&p).unwrap();
        ws.load(&[0.0; 3], &[0.7; 3], &[0.0; 3], &[0.0; 3]);
        ws.fluxes.copy_from_slice(&[1.0, -2.0, 0.5]);
        let x = limit(&mut ws, &[1.0; 3], 0.1, LimiterMode::Zalesak, false);
        assert_eq!(x, vec![0.7; 3]);
        assert!(ws.alpha.iter().all(|&a| a == 0.0));
        assert_eq!(limiter_stats(&ws).limited_edges, 3);
    }

    #[test]
    fn prelimiting_drops_steepening_fluxes() {
        let p = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let mut ws = FctWorkspace::new(&p).unwrap();
        ws.load(&[0.0; 2], &[2.0, 1.0], &[0.0; 2], &[0.0; 2]);
        ws.fluxes[0] = 1.0;
        prelimit(&mut ws);
        assert_eq!(ws.fluxes[0], 0.0);
        ws.fluxes[0] = -1.0;
        prelimit(&mut ws);
        assert_eq!(ws.fluxes[0], -1.0);
    }

    #[test]
    fn limiter_mode_parsing() {
        assert_eq!("Zalesak".parse::<LimiterMode>().unwrap(), LimiterMode::Zalesak);
        assert_eq!("force_low".parse::<LimiterMode>().unwrap(), LimiterMode::ForceLow);
        assert!("none".parse::<LimiterMode>().is_err());
    }
}
