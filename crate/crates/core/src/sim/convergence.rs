//! Self-convergence studies in time and a Rayleigh-quotient study in space.

use crate::fem::Operators;
use crate::linalg::{dot, norm_inf};
use crate::mesh::build_cubed_sphere;
use crate::reaction::ModelParams;
use crate::stepping::{SchemeConfig, SchemeOrder, State, Stepper};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    TemporalOrder1,
    TemporalOrder2,
    SpatialLaplacian,
}

impl std::str::FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "temporal_order1" => Ok(Self::TemporalOrder1),
            "temporal_order2" => Ok(Self::TemporalOrder2),
            "spatial_laplacian" => Ok(Self::SpatialLaplacian),
            other => Err(Error::Config(format!("unknown study '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub kind: StudyKind,
    /// Time steps, or maximum edge lengths for the spatial study.
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Orders between consecutive entries.
    pub pairwise_orders: Vec<f64>,
    /// Least-squares slope of `log error` against `log step`.
    pub observed_order: f64,
}

impl std::fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:?}", self.kind)?;
        writeln!(f, "{:>14} {:>14} {:>8}", "step", "error", "order")?;
        for (i, (h, e)) in self.steps.iter().zip(&self.errors).enumerate() {
            match i.checked_sub(1).map(|k| self.pairwise_orders[k]) {
                Some(o) => writeln!(f, "{h:>14.6e} {e:>14.6e} {o:>8.3}")?,
                None => writeln!(f, "{h:>14.6e} {e:>14.6e} {:>8}", "-")?,
            }
        }
        write!(f, "observed order {:.3}", self.observed_order)
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn observed_order(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn pairwise(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

/// Short nonlinear run used for temporal self-convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalSetup {
    pub level: u32,
    pub params: ModelParams,
    /// `u0 = u_mean + u_tilt · x₃`.
    pub u_mean: f64,
    pub u_tilt: f64,
    /// `v0 = v_mean + v_tilt · x₁`.
    pub v_mean: f64,
    pub v_tilt: f64,
    pub w0: f64,
    pub t_end: f64,
    pub dts: Vec<f64>,
    pub dt_ref: f64,
}

impl Default for TemporalSetup {
    fn default() -> Self {
        Self {
            level: 2,
            params: ModelParams::standard(0.002, 0.01),
            u_mean: 1.0,
            u_tilt: 0.2,
            v_mean: 2.0,
            v_tilt: 0.2,
            w0: 0.01,
            t_end: 0.1,
            dts: vec![4e-3, 2e-3, 1e-3],
            dt_ref: 1.25e-4,
        }
    }
}

fn integrate(setup: &TemporalSetup, ops: &Operators, initial: &State, order: SchemeOrder, dt: f64) -> Result<State> {
    let params = setup.params.clone().with_gamma_area(ops.area);
    let mut stepper = Stepper::new(ops, params, SchemeConfig::new(dt, order))?;
    let mut state = initial.clone();
    let n = (setup.t_end / dt).round() as usize;
    for _ in 0..n {
        stepper.step(&mut state)?;
    }
    Ok(state)
}

/// Runs `setup` with each step size and with `dt_ref`; the error of a run is
/// the largest of `‖u − u_ref‖∞`, `‖v − v_ref‖∞` and `|w − w_ref|` at `t_end`.
pub fn temporal_study(setup: &TemporalSetup, order: SchemeOrder) -> Result<ConvergenceReport> {
    let mesh = build_cubed_sphere(setup.level)?;
    let ops = Operators::assemble(&mesh)?;
    let u = mesh.vertices().iter().map(|x| setup.u_mean + setup.u_tilt * x[2]).collect();
    let v = mesh.vertices().iter().map(|x| setup.v_mean + setup.v_tilt * x[0]).collect();
    let initial = State::new(u, v, setup.w0);
    initial.check(0)?;
    let reference = integrate(setup, &ops, &initial, order, setup.dt_ref)?;
    let mut errors = Vec::new();
    for &dt in &setup.dts {
        let s = integrate(setup, &ops, &initial, order, dt)?;
        let du: Vec<f64> = s.u.iter().zip(&reference.u).map(|(a, b)| a - b).collect();
        let dv: Vec<f64> = s.v.iter().zip(&reference.v).map(|(a, b)| a - b).collect();
        errors.push(norm_inf(&du).max(norm_inf(&dv)).max((s.w - reference.w).abs()));
    }
    Ok(ConvergenceReport {
        kind: match order {
            SchemeOrder::First => StudyKind::TemporalOrder1,
            SchemeOrder::Second => StudyKind::TemporalOrder2,
        },
        pairwise_orders: pairwise(&setup.dts, &errors),
        observed_order: observed_order(&setup.dts, &errors),
        steps: setup.dts.clone(),
        errors,
    })
}

/// `xᵀLx / xᵀMx` for the three nodal coordinate functions.
pub fn rayleigh_quotients(ops: &Operators, vertices: &[[f64; 3]]) -> [f64; 3] {
    std::array::from_fn(|k| {
        let x: Vec<f64> = vertices.iter().map(|p| p[k]).collect();
        dot(&x, &ops.stiffness.mul_vec(&x)) / dot(&x, &ops.mass.mul_vec(&x))
    })
}

/// Error of the coordinate-function Rayleigh quotients against the exact
/// eigenvalue 2, over the given levels.
pub fn spatial_study(levels: &[u32]) -> Result<ConvergenceReport> {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for &level in levels {
        let mesh = build_cubed_sphere(level)?;
        let ops = Operators::assemble(&mesh)?;
        let q = rayleigh_quotients(&ops, mesh.vertices());
        steps.push(mesh.max_edge_length());
        errors.push(q.iter().map(|v| (v - 2.0).abs()).fold(0.0, f64::max));
    }
    Ok(ConvergenceReport {
        kind: StudyKind::SpatialLaplacian,
        pairwise_orders: pairwise(&steps, &errors),
        observed_order: observed_order(&steps, &errors),
        steps,
        errors,
    })
}

pub fn convergence_study(kind: StudyKind) -> Result<ConvergenceReport> {
    match kind {
        StudyKind::TemporalOrder1 => temporal_study(&TemporalSetup::default(), SchemeOrder::First),
        StudyKind::TemporalOrder2 => temporal_study(&TemporalSetup::default(), SchemeOrder::Second),
        StudyKind::SpatialLaplacian => spatial_study(&[2, 3, 4]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let x = [4.0, 2.0, 1.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((observed_order(&x, &y) - 2.0).abs() < 1e-12);
        for o in pairwise(&x, &y) {
            assert!((o - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn study_names_parse() {
        assert_eq!("spatial_laplacian".parse::<StudyKind>().unwrap(), StudyKind::SpatialLaplacian);
        assert!("temporal".parse::<StudyKind>().is_err());
    }
}
