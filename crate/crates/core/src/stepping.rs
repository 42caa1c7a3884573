//! Time integrators for the surface/bulk system.
//!
//! First order: implicit Euler for `w`, then one lumped Patankar–Euler solve
//! for `(u, v)` using the new `w`.
//!
//! Second order (Strang):
//!
//! 1. Patankar-θ half step for `w` with `v^n`;
//! 2. low-order lumped Patankar solve `(u^L, v^L)`;
//! 3. Crank–Nicolson solve `(u^H, v^H)` with reactions evaluated at `(u^L, v^L)`;
//! 4. Zalesak limiting of `u` and `v`, each against its own `x^L`;
//! 5. Patankar-θ half step for `w` with `v^{n+1}`.
//!
//! Both surface solves use the latest `w`.

use crate::fct::{self, FctWorkspace, LimiterMode, LimiterStats};
use crate::fem::Operators;
use crate::linalg::{dot, jacobi_inverse, pcg, BlockSystem, NodeBlockSystem, SolveStats, SolverOptions, SparseMatrix, DEFAULT_TOL};
use crate::reaction::{self, ModelParams, PatankarCoefficients, ReactionOperators};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: f64,
    pub t: f64,
}

impl State {
    pub fn new(u: Vec<f64>, v: Vec<f64>, w: f64) -> Self {
        Self { u, v, w, t: 0.0 }
    }

    /// `u ≥ 0`, `v > 0`, `w ≥ 0`, all finite.
    pub fn check(&self, step: usize) -> Result<()> {
        let fail = |detail: String| Err(Error::StateInvariant { step, detail });
        if self.u.len() != self.v.len() {
            return fail("u and v differ in length".into());
        }
        if let Some(i) = self.u.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return fail(format!("u[{i}] = {:e}", self.u[i]));
        }
        if let Some(i) = self.v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return fail(format!("v[{i}] = {:e}", self.v[i]));
        }
        if !(self.w.is_finite() && self.w >= 0.0) {
            return fail(format!("w = {:e}", self.w));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemeOrder {
    #[default]
    First,
    Second,
}

impl std::str::FromStr for SchemeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "first" => Ok(Self::First),
            "2" | "second" => Ok(Self::Second),
            other => Err(Error::Config(format!("unknown scheme order '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub dt: f64,
    pub order: SchemeOrder,
    /// Relative residual tolerance of every linear solve.
    pub solver_tol: f64,
    pub limiter: LimiterMode,
    pub prelimit: bool,
}

impl SchemeConfig {
    pub fn new(dt: f64, order: SchemeOrder) -> Self {
        Self {
            dt,
            order,
            solver_tol: DEFAULT_TOL,
            limiter: LimiterMode::Zalesak,
            prelimit: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol < 1.0) {
            return Err(Error::Parameter(format!("solver tolerance {} out of range", self.solver_tol)));
        }
        Ok(())
    }
}

/// `∫_Γ v_h = Σ_i (M v)_i = Σ_i m̃_i v_i`.
fn total(ops: &Operators, v: &[f64]) -> f64 {
    dot(&ops.lumped_mass, v)
}

/// Rates of `dw/dt = a − b w`.
pub fn ode_rates(v: &[f64], ops: &Operators, params: &ModelParams) -> (f64, f64) {
    let a = params.bulk_source_factor() * total(ops, v) / params.tau_b;
    let b = params.bulk_decay() / params.tau_b;
    (a, b)
}

/// Implicit Euler step of the bulk ODE with `v` frozen.
pub fn ode_step_euler(w: f64, v: &[f64], dt: f64, ops: &Operators, params: &ModelParams) -> f64 {
    let source = params.bulk_source_factor() * total(ops, v);
    (params.tau_b * w + dt * source) / (params.tau_b + dt * params.bulk_decay())
}

/// Result of one Patankar-θ step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaStep {
    pub w: f64,
    pub theta: [f64; 2],
}

fn theta_stage(w: f64, a: f64, b: f64, dt: f64) -> (f64, f64) {
    let theta = if w == 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / (dt * b) - a / (b * w)).max(0.0)
    };
    let next = (w + dt * (a - b * (1.0 - theta) * w)) / (1.0 + dt * b * theta);
    (next, theta)
}

/// Patankar-θ modification of SSP-RK2 for `dw/dt = a − b w` with constant
/// `a ≥ 0`, `b > 0`. Each stage is implicit only as far as needed to keep it
/// nonnegative.
pub fn patankar_theta(w: f64, a: f64, b: f64, dt: f64) -> ThetaStep {
    let (w1, t1) = theta_stage(w, a, b, dt);
    let (w2, t2) = theta_stage(w1, a, b, dt);
    ThetaStep {
        w: 0.5 * (w + w2),
        theta: [t1, t2],
    }
}

/// Plain SSP-RK2 for `dw/dt = a − b w`.
pub fn ssp_rk2(w: f64, a: f64, b: f64, dt: f64) -> f64 {
    let w1 = w + dt * (a - b * w);
    let w2 = w1 + dt * (a - b * w1);
    0.5 * (w + w2)
}

pub fn patankar_theta_ode_step(w: f64, v: &[f64], dt: f64, ops: &Operators, params: &ModelParams) -> ThetaStep {
    let (a, b) = ode_rates(v, ops, params);
    patankar_theta(w, a, b, dt)
}

/// Diffusion matrices `A_u = ε² L`, `A_v = (D_s/τ_s) L`.
#[derive(Debug, Clone)]
pub struct Diffusion {
    pub a_u: SparseMatrix,
    pub a_v: SparseMatrix,
}

impl Diffusion {
    pub fn new(ops: &Operators, params: &ModelParams) -> Self {
        let scaled = |c: f64| ops.stiffness.with_values(ops.stiffness.values().iter().map(|l| c * l).collect());
        Self {
            a_u: scaled(params.activator_diffusion()),
            a_v: scaled(params.inhibitor_diffusion()),
        }
    }
}

/// `diag(m̃ + dt·d) + dt·A` on the pattern of `A`.
fn implicit_block(a: &SparseMatrix, lumped_mass: &[f64], d: &[f64], dt: f64) -> SparseMatrix {
    let mut m = a.with_values(a.values().iter().map(|x| dt * x).collect());
    let diag: Vec<f64> = lumped_mass.iter().zip(d).map(|(mi, di)| mi + dt * di).collect();
    m.add_diagonal(&diag).expect("pattern contains the diagonal");
    m
}

/// The lumped Patankar–Euler system as a general [`BlockSystem`], with
/// lumped group coefficients `[b̃_u, b̃_v, c̃_u, c̃_v]`.
pub fn low_order_block_system(
    state: &State,
    lumped: [&[f64]; 4],
    w: f64,
    dt: f64,
    ops: &Operators,
    params: &ModelParams,
) -> Result<BlockSystem> {
    let diffusion = Diffusion::new(ops, params);
    let [b_u, b_v, c_u, c_v] = lumped;
    let m = &ops.lumped_mass;
    let (rhs_u, rhs_v) = low_order_rhs(state, w, dt, ops, params);
    let neg = |c: &[f64]| SparseMatrix::from_diagonal(&c.iter().map(|x| -dt * x).collect::<Vec<_>>());
    BlockSystem::new(
        [
            [implicit_block(&diffusion.a_u, m, b_u, dt), neg(c_u)],
            [neg(c_v), implicit_block(&diffusion.a_v, m, b_v, dt)],
        ],
        [rhs_u, rhs_v],
    )
}

fn low_order_rhs(state: &State, w: f64, dt: f64, ops: &Operators, params: &ModelParams) -> (Vec<f64>, Vec<f64>) {
    let m = &ops.lumped_mass;
    let e_coeff = params.bulk_coupling_coeff();
    (
        m.iter().zip(&state.u).map(|(mi, ui)| mi * ui + dt * params.sigma * mi).collect(),
        m.iter().zip(&state.v).map(|(mi, vi)| mi * vi + dt * e_coeff * w * mi).collect(),
    )
}

fn lumped_coefficients(coeffs: &PatankarCoefficients, ops: &Operators) -> [Vec<f64>; 4] {
    let g = |c: &[f64]| reaction::lumped_group(&ops.mass, &ops.lumped_mass, c);
    [g(&coeffs.bu), g(&coeffs.bv), g(&coeffs.cu), g(&coeffs.cv)]
}

/// Low-order system kept across steps: only the node blocks and the
/// right-hand side change.
#[derive(Debug, Clone)]
struct LowOrder {
    system: NodeBlockSystem,
    /// `dt·A_ii` for `u` and `v`.
    diffusion_diag: [Vec<f64>; 2],
    dt: f64,
    /// `x^L − x^n` of the previous solve.
    increment: Option<[Vec<f64>; 2]>,
}

impl LowOrder {
    fn new(diffusion: &Diffusion, dt: f64) -> Result<Self> {
        let scaled = |a: &SparseMatrix| a.with_values(a.values().iter().map(|x| dt * x).collect());
        let (a_u, a_v) = (scaled(&diffusion.a_u), scaled(&diffusion.a_v));
        Ok(Self {
            system: NodeBlockSystem::new(&a_u, &a_v)?,
            diffusion_diag: [a_u.diagonal(), a_v.diagonal()],
            dt,
            increment: None,
        })
    }

    fn assemble(&mut self, state: &State, lumped: [&[f64]; 4], w: f64, ops: &Operators, params: &ModelParams) {
        let dt = self.dt;
        let [b_u, b_v, c_u, c_v] = lumped;
        let e = dt * params.bulk_coupling_coeff() * w;
        let d = dt * params.sigma;
        let sys = &mut self.system;
        for (i, &mi) in ops.lumped_mass.iter().enumerate() {
            sys.blocks[i] = [
                [mi + self.diffusion_diag[0][i] + dt * b_u[i], -dt * c_u[i]],
                [-dt * c_v[i], mi + self.diffusion_diag[1][i] + dt * b_v[i]],
            ];
            sys.rhs[0][i] = mi * (state.u[i] + d);
            sys.rhs[1][i] = mi * (state.v[i] + e);
        }
    }

    /// Solves starting from `state` plus the increment of the previous
    /// solve, clipped at zero so the Gauss–Seidel iterates stay nonnegative.
    fn solve(&mut self, state: &State, tol: f64) -> Result<(Vec<f64>, Vec<f64>, SolveStats)> {
        let (mut u, mut v) = (state.u.clone(), state.v.clone());
        if let Some([du, dv]) = &self.increment {
            for (x, d) in u.iter_mut().zip(du).chain(v.iter_mut().zip(dv)) {
                *x = (*x + d).max(0.0);
            }
        }
        let stats = self.system.solve(&mut u, &mut v, SolverOptions::for_size(state.u.len(), tol))?;
        let n = u.len();
        let inc = self.increment.get_or_insert_with(|| [vec![0.0; n], vec![0.0; n]]);
        for i in 0..n {
            inc[0][i] = u[i] - state.u[i];
            inc[1][i] = v[i] - state.v[i];
        }
        Ok((u, v, stats))
    }
}

/// Lumped Patankar–Euler surface step with coefficients frozen at `state`
/// and bulk value `w`:
///
/// ```text
/// [M̃ + dt(A_u + B̃_u)   −dt C̃_u        ] [u']   [M̃u + dt D   ]
/// [−dt C̃_v          M̃ + dt(A_v + B̃_v)] [v'] = [M̃v + dt E(w)]
/// ```
pub fn surface_step_low(
    state: &State,
    w: f64,
    dt: f64,
    ops: &Operators,
    params: &ModelParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let coeffs = reaction::patankar_coefficients(&state.u, &state.v, params)?;
    let [b_u, b_v, c_u, c_v] = lumped_coefficients(&coeffs, ops);
    let mut low = LowOrder::new(&Diffusion::new(ops, params), dt)?;
    low.assemble(state, [&b_u, &b_v, &c_u, &c_v], w, ops, params);
    let (u, v, _) = low.solve(state, DEFAULT_TOL)?;
    Ok((u, v))
}

/// Crank–Nicolson matrices `M ± dt/2 A` for both unknowns.
#[derive(Debug, Clone)]
struct CrankNicolson {
    lhs: [SparseMatrix; 2],
    rhs: [SparseMatrix; 2],
    /// Jacobi preconditioners of `lhs`.
    inv_diag: [Vec<f64>; 2],
}

impl CrankNicolson {
    fn new(ops: &Operators, diffusion: &Diffusion, dt: f64) -> Result<Self> {
        let half = 0.5 * dt;
        let pair = |a: &SparseMatrix| -> Result<(SparseMatrix, SparseMatrix)> {
            Ok((ops.mass.linear_combination(1.0, a, half)?, ops.mass.linear_combination(1.0, a, -half)?))
        };
        let (lu, ru) = pair(&diffusion.a_u)?;
        let (lv, rv) = pair(&diffusion.a_v)?;
        Ok(Self {
            inv_diag: [jacobi_inverse(&lu)?, jacobi_inverse(&lv)?],
            lhs: [lu, lv],
            rhs: [ru, rv],
        })
    }
}

/// `out = R x^n + dt (C y^L − B x^L)` in one pass over the shared pattern,
/// with `x = [x^n, x^L, y^L]`.
fn high_rhs(r: &SparseMatrix, b: &SparseMatrix, c: &SparseMatrix, x: [&[f64]; 3], dt: f64, out: &mut [f64]) {
    debug_assert!(r.same_pattern(b) && r.same_pattern(c));
    let (offsets, cols) = (r.row_offsets(), r.column_indices());
    let (rv, bv, cv) = (r.values(), b.values(), c.values());
    let [xn, xl, yl] = x;
    for (o, w) in out.iter_mut().zip(offsets.windows(2)) {
        let mut s = 0.0;
        for k in w[0]..w[1] {
            let j = cols[k];
            s += rv[k] * xn[j] + dt * (cv[k] * yl[j] - bv[k] * xl[j]);
        }
        *o = s;
    }
}

/// `guess` holds the initial iterates on entry and the solution on exit.
fn solve_high(
    cn: &CrankNicolson,
    state: &State,
    low: (&[f64], &[f64]),
    reaction: &ReactionOperators,
    w: f64,
    dt: f64,
    tol: f64,
    guess: [&mut [f64]; 2],
) -> Result<usize> {
    let n = state.u.len();
    let e = reaction.e(w);
    let mut rhs_u = vec![0.0; n];
    let mut rhs_v = vec![0.0; n];
    high_rhs(&cn.rhs[0], &reaction.b_u, &reaction.c_u, [&state.u, low.0, low.1], dt, &mut rhs_u);
    high_rhs(&cn.rhs[1], &reaction.b_v, &reaction.c_v, [&state.v, low.1, low.0], dt, &mut rhs_v);
    for i in 0..n {
        rhs_u[i] += dt * reaction.d[i];
        rhs_v[i] += dt * e[i];
    }
    let opts = SolverOptions::for_size(n, tol);
    let [u, v] = guess;
    let su = pcg(&cn.lhs[0], &cn.inv_diag[0], &rhs_u, u, opts)?;
    let sv = pcg(&cn.lhs[1], &cn.inv_diag[1], &rhs_v, v, opts)?;
    Ok(su.iterations + sv.iterations)
}

/// Crank–Nicolson surface step with explicit reactions at the low-order
/// solution:
///
/// ```text
/// (M + dt/2 A_u) u^H = (M − dt/2 A_u) u^n + dt (−B_u u^L + C_u v^L) + dt D
/// (M + dt/2 A_v) v^H = (M − dt/2 A_v) v^n + dt (−B_v v^L + C_v u^L) + dt E(w)
/// ```
///
/// with the consistent group matrices evaluated at `state`.
pub fn surface_step_high(
    state: &State,
    u_low: &[f64],
    v_low: &[f64],
    w: f64,
    dt: f64,
    ops: &Operators,
    params: &ModelParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let coeffs = reaction::patankar_coefficients(&state.u, &state.v, params)?;
    let reaction = reaction::assemble_reaction(&coeffs, ops, params);
    let diffusion = Diffusion::new(ops, params);
    let cn = CrankNicolson::new(ops, &diffusion, dt)?;
    let (mut u, mut v) = (u_low.to_vec(), v_low.to_vec());
    solve_high(&cn, state, (u_low, v_low), &reaction, w, dt, DEFAULT_TOL, [&mut u, &mut v])?;
    Ok((u, v))
}

/// Diagnostics of one time step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    /// `Σ m̃ u^L`, `Σ m̃ v^L`.
    pub mass_low: [f64; 2],
    /// `Σ m̃ u^{n+1}`, `Σ m̃ v^{n+1}`.
    pub mass_new: [f64; 2],
    /// Limiter statistics for `u` and `v` (second order only).
    pub limiter: Option<[LimiterStats; 2]>,
    /// Largest excursion of `u^{n+1}`, `v^{n+1}` outside the local bounds of
    /// the low-order solution (second order only).
    pub bound_violation: [f64; 2],
    /// θ of the two stages of each ODE half step (second order only).
    pub theta: Option<[[f64; 2]; 2]>,
    /// `w` after each ODE half step (second order only).
    pub w_half: Option<[f64; 2]>,
    /// Symmetric Gauss–Seidel sweeps of the low-order solve.
    pub low_sweeps: usize,
    /// Conjugate-gradient iterations of both high-order solves.
    pub high_iterations: usize,
}

/// Reusable integrator for a fixed mesh, parameter set and time step.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    ops: &'a Operators,
    params: ModelParams,
    config: SchemeConfig,
    diffusion: Diffusion,
    low: LowOrder,
    cn: Option<CrankNicolson>,
    reaction: Option<ReactionOperators>,
    fct: Option<[FctWorkspace; 2]>,
    /// `x^H − x^L` of the previous step, the warm start of the next
    /// high-order solve.
    correction: Option<[Vec<f64>; 2]>,
    steps: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(ops: &'a Operators, params: ModelParams, config: SchemeConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        let diffusion = Diffusion::new(ops, &params);
        let low = LowOrder::new(&diffusion, config.dt)?;
        let (cn, fct) = match config.order {
            SchemeOrder::First => (None, None),
            SchemeOrder::Second => (
                Some(CrankNicolson::new(ops, &diffusion, config.dt)?),
                Some([FctWorkspace::new(&ops.mass)?, FctWorkspace::new(&ops.mass)?]),
            ),
        };
        Ok(Self {
            ops,
            params,
            config,
            diffusion,
            low,
            cn,
            reaction: None,
            fct,
            correction: None,
            steps: 0,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn operators(&self) -> &Operators {
        self.ops
    }

    /// Steps taken so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// FCT workspaces of the last second-order step (`u`, then `v`).
    pub fn fct_workspaces(&self) -> Option<&[FctWorkspace; 2]> {
        self.fct.as_ref()
    }

    /// Advances `state` by one step and checks the state invariants.
    pub fn step(&mut self, state: &mut State) -> Result<StepReport> {
        let report = match self.config.order {
            SchemeOrder::First => self.step_first(state)?,
            SchemeOrder::Second => self.step_second(state)?,
        };
        self.steps += 1;
        state.t += self.config.dt;
        state.check(self.steps)?;
        Ok(report)
    }

    fn step_first(&mut self, state: &mut State) -> Result<StepReport> {
        let dt = self.config.dt;
        state.w = ode_step_euler(state.w, &state.v, dt, self.ops, &self.params);
        let coeffs = reaction::patankar_coefficients(&state.u, &state.v, &self.params)?;
        let [b_u, b_v, c_u, c_v] = lumped_coefficients(&coeffs, self.ops);
        self.low.assemble(state, [&b_u, &b_v, &c_u, &c_v], state.w, self.ops, &self.params);
        let (u, v, stats) = self.low.solve(state, self.config.solver_tol)?;
        state.u = u;
        state.v = v;
        let mass = [total(self.ops, &state.u), total(self.ops, &state.v)];
        Ok(StepReport {
            mass_low: mass,
            mass_new: mass,
            low_sweeps: stats.iterations,
            ..Default::default()
        })
    }

    fn step_second(&mut self, state: &mut State) -> Result<StepReport> {
        let dt = self.config.dt;
        let ops = self.ops;
        let first = patankar_theta_ode_step(state.w, &state.v, 0.5 * dt, ops, &self.params);
        let w = first.w;

        let coeffs = reaction::patankar_coefficients(&state.u, &state.v, &self.params)?;
        let reaction = match &mut self.reaction {
            Some(r) => {
                r.update(&coeffs, &ops.mass);
                r
            }
            slot => slot.insert(reaction::assemble_reaction(&coeffs, ops, &self.params)),
        };
        let lumped = [
            &reaction.lumped_b_u[..],
            &reaction.lumped_b_v,
            &reaction.lumped_c_u,
            &reaction.lumped_c_v,
        ];
        self.low.assemble(state, lumped, w, ops, &self.params);
        let (u_low, v_low, stats) = self.low.solve(state, self.config.solver_tol)?;

        let cn = self.cn.as_ref().expect("second-order stepper has Crank-Nicolson matrices");
        let (mut u_high, mut v_high) = (u_low.clone(), v_low.clone());
        if let Some([du, dv]) = &self.correction {
            u_high.iter_mut().zip(du).for_each(|(x, d)| *x += d);
            v_high.iter_mut().zip(dv).for_each(|(x, d)| *x += d);
        }
        let high_iterations = solve_high(
            cn,
            state,
            (&u_low, &v_low),
            reaction,
            w,
            dt,
            self.config.solver_tol,
            [&mut u_high, &mut v_high],
        )?;
        let correction = self.correction.get_or_insert_with(|| [vec![0.0; u_low.len()], vec![0.0; u_low.len()]]);
        for (c, (h, l)) in correction[0].iter_mut().zip(u_high.iter().zip(&u_low)) {
            *c = h - l;
        }
        for (c, (h, l)) in correction[1].iter_mut().zip(v_high.iter().zip(&v_low)) {
            *c = h - l;
        }

        let [ws_u, ws_v] = self.fct.as_mut().expect("second-order stepper has FCT workspaces");
        let m = &ops.lumped_mass;
        ws_u.load(&state.u, &u_low, &u_high, &v_low);
        fct::compute_fluxes(ws_u, &self.diffusion.a_u, &reaction.b_u, &reaction.c_u, &ops.mass, m, dt)?;
        let u_new = fct::limit(ws_u, m, dt, self.config.limiter, self.config.prelimit);
        ws_v.load(&state.v, &v_low, &v_high, &u_low);
        fct::compute_fluxes(ws_v, &self.diffusion.a_v, &reaction.b_v, &reaction.c_v, &ops.mass, m, dt)?;
        let v_new = fct::limit(ws_v, m, dt, self.config.limiter, self.config.prelimit);

        let bound_violation = [fct::bound_violation(ws_u, &u_new), fct::bound_violation(ws_v, &v_new)];
        let limiter = Some([fct::limiter_stats(ws_u), fct::limiter_stats(ws_v)]);
        state.u = u_new;
        state.v = v_new;

        let second = patankar_theta_ode_step(w, &state.v, 0.5 * dt, ops, &self.params);
        state.w = second.w;
        Ok(StepReport {
            mass_low: [total(ops, &u_low), total(ops, &v_low)],
            mass_new: [total(ops, &state.u), total(ops, &state.v)],
            limiter,
            bound_violation,
            theta: Some([first.theta, second.theta]),
            w_half: Some([first.w, second.w]),
            low_sweeps: stats.iterations,
            high_iterations,
        })
    }
}

/// One first-order step with default solver settings.
pub fn step_first_order(state: &State, dt: f64, ops: &Operators, params: &ModelParams) -> Result<State> {
    let mut next = state.clone();
    Stepper::new(ops, params.clone(), SchemeConfig::new(dt, SchemeOrder::First))?.step(&mut next)?;
    Ok(next)
}

/// One second-order step with default solver and limiter settings.
pub fn step_second_order(state: &State, dt: f64, ops: &Operators, params: &ModelParams) -> Result<State> {
    let mut next = state.clone();
    Stepper::new(ops, params.clone(), SchemeConfig::new(dt, SchemeOrder::Second))?.step(&mut next)?;
    Ok(next)
}
