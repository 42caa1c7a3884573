//! Running one configured case.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use super::config::RunConfig;
use super::initial::make_initial_u;
use crate::fem::{mesh_quality_report, Operators};
use crate::mesh::{build_cubed_sphere, SurfaceMesh};
use crate::stepping::{State, StepReport, Stepper};
use crate::{vtk, Error, Result};

/// Cosine below which two maxima count as opposite.
pub const ANTIPODAL_COS: f64 = -0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub vertex: usize,
    pub value: f64,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Flat,
    OneSpike,
    TwoSpikeSymmetric,
    TwoSpikeNonsymmetric,
    Multi(usize),
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pattern::Flat => f.write_str("no spike"),
            Pattern::OneSpike => f.write_str("1-spike"),
            Pattern::TwoSpikeSymmetric => f.write_str("2-spike symmetric"),
            Pattern::TwoSpikeNonsymmetric => f.write_str("2-spike nonsymmetric"),
            Pattern::Multi(n) => write!(f, "{n}-spike"),
        }
    }
}

/// Strict local maxima of `u` over vertex stencils whose value exceeds half
/// the global maximum, largest first.
pub fn find_spikes(mesh: &SurfaceMesh, u: &[f64]) -> Vec<Spike> {
    let top = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut spikes: Vec<Spike> = (0..mesh.n_vertices())
        .filter(|&i| u[i] > 0.5 * top && mesh.stencil(i).iter().all(|&j| u[i] > u[j]))
        .map(|i| Spike {
            vertex: i,
            value: u[i],
            position: mesh.vertices()[i],
        })
        .collect();
    spikes.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.vertex.cmp(&b.vertex)));
    spikes
}

/// Two spikes are symmetric when the cosine of their angle is at most
/// [`ANTIPODAL_COS`].
pub fn classify(spikes: &[Spike]) -> Pattern {
    match spikes {
        [] => Pattern::Flat,
        [_] => Pattern::OneSpike,
        [a, b] => {
            let (x, y) = (a.position, b.position);
            let cos = (x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
                / ((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
            if cos <= ANTIPODAL_COS {
                Pattern::TwoSpikeSymmetric
            } else {
                Pattern::TwoSpikeNonsymmetric
            }
        }
        many => Pattern::Multi(many.len()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub name: String,
    pub t: f64,
    pub steps: usize,
    pub min_u: f64,
    pub max_u: f64,
    pub min_v: f64,
    pub max_v: f64,
    pub w: f64,
    /// Whether the steady-state test held over the last window.
    pub steady: bool,
    /// Start time of the final run of steady steps, if any.
    pub steady_since: Option<f64>,
    pub spikes: Vec<Spike>,
    pub pattern: Pattern,
    /// Positive off-diagonal stiffness entries of the mesh.
    pub positive_stiffness_entries: usize,
    pub state: State,
}

/// Everything an observer sees after a step.
pub struct StepContext<'s, 'a> {
    pub step: usize,
    pub previous: &'s State,
    pub state: &'s State,
    pub report: &'s StepReport,
    pub stepper: &'s Stepper<'a>,
}

pub fn initial_state(config: &RunConfig, mesh: &SurfaceMesh) -> Result<State> {
    let n = mesh.n_vertices();
    let u = make_initial_u(config.ic, mesh, config.amplitude, config.width, config.seed)?;
    let state = State::new(u, vec![config.v0; n], config.w0);
    state.check(0)?;
    Ok(state)
}

pub fn run_case(config: &RunConfig) -> Result<CaseResult> {
    run_case_with(config, |_| Ok(()))
}

fn extrema(x: &[f64]) -> (f64, f64) {
    x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

struct Output {
    dir: PathBuf,
    csv: BufWriter<File>,
}

const CSV_HEADER: &str =
    "step,t,min_u,max_u,min_v,max_v,w,mass_u,mass_v,min_alpha_u,mean_alpha_u,limited_u,min_alpha_v,mean_alpha_v,limited_v";

impl Output {
    fn open(config: &RunConfig) -> Result<Option<Self>> {
        let Some(dir) = &config.output_dir else {
            return Ok(None);
        };
        fs::create_dir_all(dir)?;
        let mut csv = BufWriter::new(File::create(dir.join(format!("{}.csv", config.name)))?);
        writeln!(csv, "{CSV_HEADER}")?;
        Ok(Some(Self { dir: dir.clone(), csv }))
    }

    fn row(&mut self, step: usize, state: &State, ops: &Operators, report: Option<&StepReport>) -> Result<()> {
        let (lu, hu) = extrema(&state.u);
        let (lv, hv) = extrema(&state.v);
        let mu: f64 = ops.lumped_mass.iter().zip(&state.u).map(|(m, x)| m * x).sum();
        let mv: f64 = ops.lumped_mass.iter().zip(&state.v).map(|(m, x)| m * x).sum();
        write!(self.csv, "{step},{},{lu:e},{hu:e},{lv:e},{hv:e},{:e},{mu:e},{mv:e}", state.t, state.w)?;
        match report.and_then(|r| r.limiter) {
            Some(stats) => {
                for s in stats {
                    write!(self.csv, ",{:e},{:e},{}", s.min_alpha, s.mean_alpha, s.limited_edges)?;
                }
            }
            None => write!(self.csv, ",,,,,,")?,
        }
        writeln!(self.csv)?;
        Ok(())
    }

    fn snapshot(&self, name: &str, step: usize, mesh: &SurfaceMesh, state: &State) -> Result<()> {
        let path = self.dir.join(format!("{name}_{step:08}.vtk"));
        let file = BufWriter::new(File::create(path)?);
        vtk::write_polydata(file, mesh, &format!("{name} t={}", state.t), &[("u", &state.u), ("v", &state.v)])
    }
}

/// Runs `config` to `t_end`, calling `observer` after every step. An error
/// from the stepper or the observer aborts the run; the message carries the
/// step number.
pub fn run_case_with<F>(config: &RunConfig, mut observer: F) -> Result<CaseResult>
where
    F: FnMut(&StepContext<'_, '_>) -> Result<()>,
{
    config.validate()?;
    let mesh = build_cubed_sphere(config.level)?;
    let ops = Operators::assemble(&mesh)?;
    let quality = mesh_quality_report(&ops.stiffness);
    let params = config.params.clone().with_gamma_area(ops.area);
    let mut stepper = Stepper::new(&ops, params, config.scheme)?;
    let mut state = initial_state(config, &mesh)?;
    let dt = config.scheme.dt;
    let n_steps = config.n_steps();
    let snapshot_steps: Vec<usize> = config.snapshots.iter().map(|t| (t / dt).round() as usize).collect();

    let mut out = Output::open(config)?;
    if let Some(o) = out.as_mut() {
        o.row(0, &state, &ops, None)?;
        if snapshot_steps.contains(&0) {
            o.snapshot(&config.name, 0, &mesh, &state)?;
        }
    }

    let mut quiet_steps = 0usize;
    for step in 1..=n_steps {
        let previous = state.clone();
        let report = stepper.step(&mut state).map_err(|e| match e {
            Error::StateInvariant { .. } => e,
            other => Error::StateInvariant {
                step,
                detail: other.to_string(),
            },
        })?;
        state.t = step as f64 * dt;
        let change = state
            .u
            .iter()
            .zip(&previous.u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / dt;
        if change < config.steady_tol {
            quiet_steps += 1;
        } else {
            quiet_steps = 0;
        }
        observer(&StepContext {
            step,
            previous: &previous,
            state: &state,
            report: &report,
            stepper: &stepper,
        })?;
        if let Some(o) = out.as_mut() {
            if step % config.csv_every == 0 {
                o.row(step, &state, &ops, Some(&report))?;
            }
            if snapshot_steps.contains(&step) {
                o.snapshot(&config.name, step, &mesh, &state)?;
            }
        }
    }
    if let Some(o) = out.as_mut() {
        o.csv.flush()?;
    }

    let (min_u, max_u) = extrema(&state.u);
    let (min_v, max_v) = extrema(&state.v);
    let spikes = find_spikes(&mesh, &state.u);
    let steady = quiet_steps >= config.steady_window;
    Ok(CaseResult {
        name: config.name.clone(),
        t: state.t,
        steps: n_steps,
        min_u,
        max_u,
        min_v,
        max_v,
        w: state.w,
        steady,
        steady_since: (quiet_steps > 0).then(|| (n_steps - quiet_steps) as f64 * dt),
        pattern: classify(&spikes),
        spikes,
        positive_stiffness_entries: quality.count(),
        state,
    })
}
