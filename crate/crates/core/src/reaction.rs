//! Model parameters and the Patankar-linearized reaction operators.
//!
//! The inhibitor equation is divided by `τ_s`, so both surface unknowns carry
//! the plain mass matrix in time and the factor `1/τ_s` lives inside the
//! inhibitor diffusion, sink, source and bulk-coupling coefficients:
//!
//! ```text
//! u_t = ε² Δu − u + (u^p / v^(q+1)) v + σ
//! v_t = (D_s/τ_s) Δv − ((1+K)/τ_s) v + K/(τ_s |Ω|) w + (u^(r−1) / (ε τ_s v^s)) u
//! ```
//!
//! Reaction matrices use a symmetric group finite-element form: with nodal
//! coefficients `c_i`, `(C)_ij = m_ij (c_i + c_j) / 2`. For constant
//! coefficients this is `c · M`; the symmetry makes the antidiffusive flux
//! decomposition in [`crate::fct`] exactly antisymmetric.

use std::f64::consts::PI;

use crate::fem::Operators;
use crate::linalg::SparseMatrix;
use crate::{Error, Result};

/// Smallest admissible inhibitor value before exponentiation.
pub const V_FLOOR: f64 = 1e-14;

/// How the bulk ODE source `K Σ_i G(v)_i` is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OdeSourceScaling {
    /// `K Σ_i G(v)_i`.
    #[default]
    Total,
    /// `(K/|Ω|) Σ_i G(v)_i`, the volume-average form.
    PerVolume,
}

impl std::str::FromStr for OdeSourceScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "total" => Ok(Self::Total),
            "per_volume" => Ok(Self::PerVolume),
            other => Err(Error::Config(format!("unknown ode_source_scaling '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub d_s: f64,
    pub tau_s: f64,
    pub tau_b: f64,
    pub k: f64,
    /// Surface area |Γ|, normally taken from the mesh.
    pub gamma_area: f64,
    /// Bulk volume |Ω|.
    pub omega_volume: f64,
    pub ode_source_scaling: OdeSourceScaling,
    /// Enforce the exponent window `0 < (p−1)/r < q/(s+1)`, `(p−1)/r < 2/(n+1)`.
    pub check_exponent_window: bool,
}

impl ModelParams {
    /// Exponents, diffusivities and time constants of the reference experiments
    /// on the unit sphere (`|Γ| = 4π`, `|Ω| = 4π/3`).
    pub fn standard(k: f64, sigma: f64) -> Self {
        Self {
            p: 2.0,
            q: 4.0,
            r: 3.0,
            s: 4.0,
            epsilon: 0.1,
            sigma,
            d_s: 10.0,
            tau_s: 0.6,
            tau_b: 0.1,
            k,
            gamma_area: 4.0 * PI,
            omega_volume: 4.0 * PI / 3.0,
            ode_source_scaling: OdeSourceScaling::Total,
            check_exponent_window: true,
        }
    }

    pub fn with_gamma_area(mut self, area: f64) -> Self {
        self.gamma_area = area;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("D_s", self.d_s),
            ("tau_s", self.tau_s),
            ("tau_b", self.tau_b),
            ("gamma_area", self.gamma_area),
            ("omega_volume", self.omega_volume),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("sigma", self.sigma), ("K", self.k)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if self.check_exponent_window {
            let ratio = (self.p - 1.0) / self.r;
            let n = 3.0;
            if !(ratio > 0.0 && ratio < self.q / (self.s + 1.0) && ratio < 2.0 / (n + 1.0)) {
                return Err(Error::Parameter(format!(
                    "exponents outside the admissible window: (p-1)/r = {ratio}"
                )));
            }
        }
        Ok(())
    }

    /// Coefficient of `Δu`.
    pub fn activator_diffusion(&self) -> f64 {
        self.epsilon * self.epsilon
    }

    /// Coefficient of `Δv` after division by `τ_s`.
    pub fn inhibitor_diffusion(&self) -> f64 {
        self.d_s / self.tau_s
    }

    /// `1 + K|Γ|/|Ω|`.
    pub fn bulk_decay(&self) -> f64 {
        1.0 + self.k * self.gamma_area / self.omega_volume
    }

    /// Multiplier of `Σ_i G(v)_i` in the bulk ODE.
    pub fn bulk_source_factor(&self) -> f64 {
        match self.ode_source_scaling {
            OdeSourceScaling::Total => self.k,
            OdeSourceScaling::PerVolume => self.k / self.omega_volume,
        }
    }

    /// `E(w)_i = e_coeff · w · m̃_i`.
    pub fn bulk_coupling_coeff(&self) -> f64 {
        self.k / (self.tau_s * self.omega_volume)
    }
}

/// Nodal Patankar coefficients: sink rates `bu`, `bv` and source coefficients
/// `cu` (multiplying `v` in the activator equation) and `cv` (multiplying `u`
/// in the inhibitor equation).
#[derive(Debug, Clone, PartialEq)]
pub struct PatankarCoefficients {
    pub bu: Vec<f64>,
    pub bv: Vec<f64>,
    pub cu: Vec<f64>,
    pub cv: Vec<f64>,
}

impl PatankarCoefficients {
    /// `bu`, `bv`, `cu`, `cv` by index.
    fn field(&self, k: usize) -> &[f64] {
        [&self.bu, &self.bv, &self.cu, &self.cv][k]
    }
}

pub fn patankar_coefficients(u: &[f64], v: &[f64], params: &ModelParams) -> Result<PatankarCoefficients> {
    if u.len() != v.len() {
        return Err(Error::Dimension("u and v differ in length".into()));
    }
    let n = u.len();
    let bv_const = (1.0 + params.k) / params.tau_s;
    let source_scale = 1.0 / (params.epsilon * params.tau_s);
    let mut cu = Vec::with_capacity(n);
    let mut cv = Vec::with_capacity(n);
    for (i, (&ui, &vi)) in u.iter().zip(v).enumerate() {
        if !(vi > V_FLOOR) {
            return Err(Error::PositivityLoss {
                node: i,
                quantity: "v",
                value: vi,
            });
        }
        if !(ui >= 0.0) {
            return Err(Error::PositivityLoss {
                node: i,
                quantity: "u",
                value: ui,
            });
        }
        cu.push(pow(ui, params.p) / pow(vi, params.q + 1.0));
        cv.push(source_scale * pow(ui, params.r - 1.0) / pow(vi, params.s));
    }
    Ok(PatankarCoefficients {
        bu: vec![1.0; n],
        bv: vec![bv_const; n],
        cu,
        cv,
    })
}

fn pow(x: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

/// Reaction matrices in consistent (group FE) and lumped form, plus sources.
#[derive(Debug, Clone)]
pub struct ReactionOperators {
    pub b_u: SparseMatrix,
    pub b_v: SparseMatrix,
    pub c_u: SparseMatrix,
    pub c_v: SparseMatrix,
    pub lumped_b_u: Vec<f64>,
    pub lumped_b_v: Vec<f64>,
    pub lumped_c_u: Vec<f64>,
    pub lumped_c_v: Vec<f64>,
    /// `D_i = σ m̃_i`.
    pub d: Vec<f64>,
    pub e_coeff: f64,
    lumped_mass: Vec<f64>,
    coeffs: Option<PatankarCoefficients>,
}

impl ReactionOperators {
    /// `E(w)_i = e_coeff · w · m̃_i`.
    pub fn e(&self, w: f64) -> Vec<f64> {
        self.lumped_mass.iter().map(|m| self.e_coeff * w * m).collect()
    }
}

/// `(C)_ij = m_ij (c_i + c_j) / 2` on the mass-matrix pattern.
pub fn group_matrix(mass: &SparseMatrix, c: &[f64]) -> SparseMatrix {
    let mut g = mass.clone();
    group_values_into(mass, c, g.values_mut());
    g
}

/// Values of [`group_matrix`] written into `out` (same pattern as `mass`).
pub fn group_values_into(mass: &SparseMatrix, c: &[f64], out: &mut [f64]) {
    let (offsets, cols, m) = (mass.row_offsets(), mass.column_indices(), mass.values());
    for (i, w) in offsets.windows(2).enumerate() {
        let ci = c[i];
        for k in w[0]..w[1] {
            out[k] = m[k] * 0.5 * (ci + c[cols[k]]);
        }
    }
}

/// Row sums of [`group_matrix`] without assembling it:
/// `½ (c_i m̃_i + (M c)_i)`.
pub fn lumped_group(mass: &SparseMatrix, lumped_mass: &[f64], c: &[f64]) -> Vec<f64> {
    let mc = mass.mul_vec(c);
    c.iter()
        .zip(lumped_mass)
        .zip(mc)
        .map(|((ci, mi), mci)| 0.5 * (ci * mi + mci))
        .collect()
}

pub fn assemble_reaction(
    coeffs: &PatankarCoefficients,
    ops: &Operators,
    params: &ModelParams,
) -> ReactionOperators {
    let n = ops.n();
    let mut r = ReactionOperators {
        b_u: ops.mass.clone(),
        b_v: ops.mass.clone(),
        c_u: ops.mass.clone(),
        c_v: ops.mass.clone(),
        lumped_b_u: vec![0.0; n],
        lumped_b_v: vec![0.0; n],
        lumped_c_u: vec![0.0; n],
        lumped_c_v: vec![0.0; n],
        d: ops.lumped_mass.iter().map(|m| params.sigma * m).collect(),
        e_coeff: params.bulk_coupling_coeff(),
        lumped_mass: ops.lumped_mass.clone(),
        coeffs: None,
    };
    r.update(coeffs, &ops.mass);
    r
}

impl ReactionOperators {
    /// Re-evaluates the group matrices and their row sums for new
    /// coefficients, reusing storage. `mass` must be the matrix the
    /// operators were assembled with. Matrices whose coefficients are
    /// unchanged are left alone.
    pub fn update(&mut self, coeffs: &PatankarCoefficients, mass: &SparseMatrix) {
        let old = self.coeffs.take();
        let unchanged = |k: usize| old.as_ref().is_some_and(|o| o.field(k) == coeffs.field(k));
        let pairs = [
            (&mut self.b_u, &mut self.lumped_b_u),
            (&mut self.b_v, &mut self.lumped_b_v),
            (&mut self.c_u, &mut self.lumped_c_u),
            (&mut self.c_v, &mut self.lumped_c_v),
        ];
        for (k, (g, lumped)) in pairs.into_iter().enumerate() {
            if unchanged(k) {
                continue;
            }
            let c = coeffs.field(k);
            group_values_into(mass, c, g.values_mut());
            let vals = g.values();
            for (li, w) in lumped.iter_mut().zip(mass.row_offsets().windows(2)) {
                *li = vals[w[0]..w[1]].iter().sum();
            }
        }
        self.coeffs = Some(coeffs.clone());
    }
}
