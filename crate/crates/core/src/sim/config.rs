//! Run configuration: a flat TOML file of `key = value` lines with `#`
//! comments. Unknown keys are errors.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::initial::InitialCondition;
use crate::fct::LimiterMode;
use crate::reaction::{ModelParams, OdeSourceScaling};
use crate::stepping::{SchemeConfig, SchemeOrder};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub level: u32,
    /// `gamma_area` is replaced by the mesh area when the run starts.
    pub params: ModelParams,
    pub scheme: SchemeConfig,
    pub t_end: f64,
    pub ic: InitialCondition,
    pub amplitude: f64,
    pub width: f64,
    pub seed: u64,
    pub v0: f64,
    pub w0: f64,
    /// Directory for the CSV time series and VTK snapshots; `None` disables
    /// file output.
    pub output_dir: Option<PathBuf>,
    /// Steps between CSV rows.
    pub csv_every: usize,
    /// Snapshot times; each must be a multiple of `dt`.
    pub snapshots: Vec<f64>,
    /// `‖u^{n+1} − u^n‖∞ / dt` threshold of the steady-state test.
    pub steady_tol: f64,
    /// Consecutive steps below `steady_tol` needed to report a steady state.
    pub steady_window: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "run".into(),
            level: 3,
            params: ModelParams::standard(0.002, 0.01),
            scheme: SchemeConfig::new(1e-4, SchemeOrder::Second),
            t_end: 100.0,
            ic: InitialCondition::Spike2_180,
            amplitude: DEFAULT_AMPLITUDE,
            width: 0.3,
            seed: 1,
            v0: 0.1,
            w0: 0.01,
            output_dir: None,
            csv_every: 1000,
            snapshots: Vec::new(),
            steady_tol: 1e-8,
            steady_window: 1000,
        }
    }
}

/// Default peak of the initial activator profile. With `v0 = 0.1` and
/// `dt = 1e-4` the lumped Patankar blocks stay M-matrices only for peaks
/// below about 0.277.
pub const DEFAULT_AMPLITUDE: f64 = 0.25;

impl RunConfig {
    /// Number of time steps, `round(t_end / dt)`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.scheme.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.scheme.validate()?;
        let bad = |m: String| Err(Error::Config(m));
        if !(self.v0 > 0.0) {
            return bad(format!("v0 must be positive, got {}", self.v0));
        }
        if !(self.w0 >= 0.0) {
            return bad(format!("w0 must be nonnegative, got {}", self.w0));
        }
        if !(self.amplitude >= 0.0) {
            return bad(format!("amplitude must be nonnegative, got {}", self.amplitude));
        }
        if !(self.width > 0.0) {
            return bad(format!("width must be positive, got {}", self.width));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        let steps = self.t_end / self.scheme.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return bad(format!("t_end = {} is not a multiple of dt = {}", self.t_end, self.scheme.dt));
        }
        if self.csv_every == 0 || !self.n_steps().is_multiple_of(self.csv_every) {
            return bad(format!("csv_every = {} must divide the step count {}", self.csv_every, self.n_steps()));
        }
        for &t in &self.snapshots {
            let k = t / self.scheme.dt;
            if t < 0.0 || t > self.t_end * (1.0 + 1e-12) || (k - k.round()).abs() > 1e-6 * k.max(1.0) {
                return bad(format!("snapshot time {t} is not a step time in [0, t_end]"));
            }
        }
        if self.level > crate::mesh::MAX_LEVEL {
            return bad(format!("level {} exceeds {}", self.level, crate::mesh::MAX_LEVEL));
        }
        Ok(())
    }

    /// Parses a flat TOML document. `k` and `sigma` are required; every
    /// other key falls back to [`RunConfig::default`].
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let mut c = Self::default();
        let p = &mut c.params;
        p.k = raw.k.ok_or_else(|| Error::Config("k is required".into()))?;
        p.sigma = raw.sigma.ok_or_else(|| Error::Config("sigma is required".into()))?;
        macro_rules! take {
            ($($field:ident => $dst:expr),* $(,)?) => {
                $(if let Some(x) = raw.$field { $dst = x; })*
            };
        }
        take! {
            p => p.p, q => p.q, r => p.r, s => p.s,
            epsilon => p.epsilon, d_s => p.d_s, tau_s => p.tau_s, tau_b => p.tau_b,
            omega_volume => p.omega_volume, check_exponent_window => p.check_exponent_window,
            name => c.name, level => c.level, dt => c.scheme.dt, t_end => c.t_end,
            solver_tol => c.scheme.solver_tol, prelimit => c.scheme.prelimit,
            amplitude => c.amplitude, width => c.width, seed => c.seed, v0 => c.v0, w0 => c.w0,
            csv_every => c.csv_every, snapshots => c.snapshots,
            steady_tol => c.steady_tol, steady_window => c.steady_window,
        }
        if let Some(o) = raw.order {
            c.scheme.order = o.to_string().parse()?;
        }
        if let Some(l) = raw.limiter {
            c.scheme.limiter = l.parse()?;
        }
        if let Some(m) = raw.ode_source_scaling {
            c.params.ode_source_scaling = m.parse()?;
        }
        if let Some(ic) = raw.ic {
            c.ic = ic.parse()?;
        }
        c.output_dir = raw.output_dir;
        c.validate()?;
        Ok(c)
    }

    /// TOML form accepted by [`RunConfig::parse`].
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let s = &self.scheme;
        let raw = RawConfig {
            name: Some(self.name.clone()),
            level: Some(self.level),
            dt: Some(s.dt),
            order: Some(match s.order {
                SchemeOrder::First => 1,
                SchemeOrder::Second => 2,
            }),
            t_end: Some(self.t_end),
            solver_tol: Some(s.solver_tol),
            limiter: Some(
                match s.limiter {
                    LimiterMode::Zalesak => "zalesak",
                    LimiterMode::ForceLow => "force_low",
                    LimiterMode::ForceHigh => "force_high",
                }
                .into(),
            ),
            prelimit: Some(s.prelimit),
            k: Some(p.k),
            sigma: Some(p.sigma),
            p: Some(p.p),
            q: Some(p.q),
            r: Some(p.r),
            s: Some(p.s),
            epsilon: Some(p.epsilon),
            d_s: Some(p.d_s),
            tau_s: Some(p.tau_s),
            tau_b: Some(p.tau_b),
            omega_volume: Some(p.omega_volume),
            ode_source_scaling: Some(
                match p.ode_source_scaling {
                    OdeSourceScaling::Total => "total",
                    OdeSourceScaling::PerVolume => "per_volume",
                }
                .into(),
            ),
            check_exponent_window: Some(p.check_exponent_window),
            ic: Some(self.ic.to_string()),
            amplitude: Some(self.amplitude),
            width: Some(self.width),
            seed: Some(self.seed),
            v0: Some(self.v0),
            w0: Some(self.w0),
            output_dir: self.output_dir.clone(),
            csv_every: Some(self.csv_every),
            snapshots: Some(self.snapshots.clone()),
            steady_tol: Some(self.steady_tol),
            steady_window: Some(self.steady_window),
        };
        toml::to_string(&raw).expect("flat config always serializes")
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    level: Option<u32>,
    dt: Option<f64>,
    order: Option<u8>,
    t_end: Option<f64>,
    solver_tol: Option<f64>,
    limiter: Option<String>,
    prelimit: Option<bool>,
    k: Option<f64>,
    sigma: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    r: Option<f64>,
    s: Option<f64>,
    epsilon: Option<f64>,
    d_s: Option<f64>,
    tau_s: Option<f64>,
    tau_b: Option<f64>,
    omega_volume: Option<f64>,
    ode_source_scaling: Option<String>,
    check_exponent_window: Option<bool>,
    ic: Option<String>,
    amplitude: Option<f64>,
    width: Option<f64>,
    seed: Option<u64>,
    v0: Option<f64>,
    w0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
    csv_every: Option<usize>,
    snapshots: Option<Vec<f64>>,
    steady_tol: Option<f64>,
    steady_window: Option<usize>,
}
