//! Initial activator profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::SurfaceMesh;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialCondition {
    /// Bumps at the poles `±e₃`.
    Spike2_180,
    /// Bumps at `e₃` and `e₁`.
    Spike2_90,
    /// Bumps at `±e₁`, `±e₂`, `±e₃`.
    Spike6,
    /// Independent uniform draws in `(0, A]`.
    Random,
}

impl InitialCondition {
    pub const ALL: [Self; 4] = [Self::Spike2_180, Self::Spike2_90, Self::Spike6, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::Spike2_180 => "spike2_180",
            Self::Spike2_90 => "spike2_90",
            Self::Spike6 => "spike6",
            Self::Random => "random",
        }
    }

    pub fn centers(self) -> &'static [[f64; 3]] {
        match self {
            Self::Spike2_180 => &[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
            Self::Spike2_90 => &[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
            Self::Spike6 => &[
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
            Self::Random => &[],
        }
    }
}

impl std::fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|ic| ic.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown initial condition '{s}'")))
    }
}

/// Nodal activator values.
///
/// Spike variants sum Gaussian bumps `A exp(−|x − c|² / (2 width²))` over
/// their centers, with `|x − c|` the chordal distance. `Random` draws
/// `A (1 − U)`, `U ∈ [0, 1)`, per vertex in index order from a ChaCha8
/// generator seeded with `seed`.
pub fn make_initial_u(
    variant: InitialCondition,
    mesh: &SurfaceMesh,
    amplitude: f64,
    width: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(width > 0.0) {
        return Err(Error::Parameter(format!("width must be positive, got {width}")));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::Parameter(format!("amplitude must be nonnegative, got {amplitude}")));
    }
    if variant == InitialCondition::Random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..mesh.n_vertices())
            .map(|_| amplitude * (1.0 - rng.gen::<f64>()))
            .collect());
    }
    let s = 2.0 * width * width;
    Ok(mesh
        .vertices()
        .iter()
        .map(|x| {
            variant
                .centers()
                .iter()
                .map(|c| {
                    let d2: f64 = (0..3).map(|k| (x[k] - c[k]).powi(2)).sum();
                    amplitude * (-d2 / s).exp()
                })
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_cubed_sphere;

    #[test]
    fn parse_round_trip() {
        for ic in InitialCondition::ALL {
            assert_eq!(ic.to_string().parse::<InitialCondition>().unwrap(), ic);
        }
        assert!("spike3".parse::<InitialCondition>().is_err());
    }

    #[test]
    fn rejects_bad_width() {
        let m = build_cubed_sphere(0).unwrap();
        assert!(make_initial_u(InitialCondition::Spike6, &m, 1.0, 0.0, 0).is_err());
    }
}
