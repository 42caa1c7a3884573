//! The eight reference cases: four initial activator profiles, two coupling
//! rates.

use super::config::RunConfig;
use super::initial::InitialCondition;
use crate::reaction::ModelParams;
use crate::stepping::{SchemeConfig, SchemeOrder};

/// Coupling rates of the case matrix.
pub const PRESET_K: [f64; 2] = [0.002, 200_000.0];

/// Constant activator source used by all presets.
pub const PRESET_SIGMA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Level 3, `dt = 1e-4`, `T = 100`.
    Desk,
    /// Level 5, `dt = 1e-5`, `T = 500` (1000 for cases that were still
    /// drifting at 500).
    Full,
}

/// Expected outcome of one reference case at full scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOutcome {
    pub ic: InitialCondition,
    pub k: f64,
    pub pattern: &'static str,
    pub min_u: f64,
    pub max_u: f64,
    /// Still drifting at the final time.
    pub transient: bool,
}

pub const REFERENCE_OUTCOMES: [ReferenceOutcome; 8] = [
    outcome(InitialCondition::Spike2_180, 0.002, "2-spike symmetric", 4.483e-6, 1.996, false),
    outcome(InitialCondition::Spike2_180, 200_000.0, "2-spike symmetric", 1.419e-4, 59.21, false),
    outcome(InitialCondition::Spike2_90, 0.002, "2-spike symmetric", 3.624e-6, 2.139, true),
    outcome(InitialCondition::Spike2_90, 200_000.0, "1-spike", 3.149e-10, 77.72, false),
    outcome(InitialCondition::Spike6, 0.002, "2-spike symmetric", 4.483e-6, 1.997, false),
    outcome(InitialCondition::Spike6, 200_000.0, "2-spike symmetric", 1.419e-4, 59.21, false),
    outcome(InitialCondition::Random, 0.002, "2-spike symmetric", 3.073e-6, 2.145, true),
    outcome(InitialCondition::Random, 200_000.0, "1-spike", 3.5e-10, 78.1, true),
];

const fn outcome(
    ic: InitialCondition,
    k: f64,
    pattern: &'static str,
    min_u: f64,
    max_u: f64,
    transient: bool,
) -> ReferenceOutcome {
    ReferenceOutcome {
        ic,
        k,
        pattern,
        min_u,
        max_u,
        transient,
    }
}

pub fn reference_outcome(ic: InitialCondition, k: f64) -> Option<&'static ReferenceOutcome> {
    REFERENCE_OUTCOMES.iter().find(|o| o.ic == ic && o.k == k)
}

pub fn preset_name(ic: InitialCondition, k: f64, order: SchemeOrder) -> String {
    let o = match order {
        SchemeOrder::First => 1,
        SchemeOrder::Second => 2,
    };
    format!("{ic}_k{k}_o{o}")
}

pub fn preset(ic: InitialCondition, k: f64, scale: Scale, order: SchemeOrder) -> RunConfig {
    let (level, dt, t_end) = match scale {
        Scale::Desk => (3, 1e-4, 100.0),
        Scale::Full => {
            let long = reference_outcome(ic, k).is_some_and(|o| o.transient);
            (5, 1e-5, if long { 1000.0 } else { 500.0 })
        }
    };
    RunConfig {
        name: preset_name(ic, k, order),
        level,
        params: ModelParams::standard(k, PRESET_SIGMA),
        scheme: SchemeConfig::new(dt, order),
        t_end,
        ic,
        csv_every: match scale {
            Scale::Desk => 1000,
            Scale::Full => 10_000,
        },
        snapshots: vec![0.0, 10.0, 20.0, 70.0, t_end],
        ..RunConfig::default()
    }
}

/// All eight cases in table order (initial condition major, `K` minor).
pub fn presets(scale: Scale, order: SchemeOrder) -> Vec<RunConfig> {
    InitialCondition::ALL
        .into_iter()
        .flat_map(|ic| PRESET_K.into_iter().map(move |k| preset(ic, k, scale, order)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_valid_cases_mirror_the_reference_matrix() {
        for scale in [Scale::Desk, Scale::Full] {
            let p = presets(scale, SchemeOrder::Second);
            assert_eq!(p.len(), 8);
            for (c, r) in p.iter().zip(&REFERENCE_OUTCOMES) {
                c.validate().unwrap();
                assert_eq!((c.ic, c.params.k), (r.ic, r.k));
            }
        }
        let desk = preset(InitialCondition::Random, 0.002, Scale::Desk, SchemeOrder::First);
        assert_eq!((desk.level, desk.scheme.dt, desk.t_end), (3, 1e-4, 100.0));
        assert_eq!(preset(InitialCondition::Random, 0.002, Scale::Full, SchemeOrder::First).t_end, 1000.0);
    }
}
