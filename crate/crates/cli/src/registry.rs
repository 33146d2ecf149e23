//! Scenario registry: names, one-line descriptions, defaults and builders.

use semilab_core::scenarios::{
    absorption_1d, dirichlet_heat, lorentzian_well_potential, neumann_heat,
    nonlocal_dirichlet_diffusion, nonlocal_laplace_interval, reference_system_potential,
    schrodinger_1d, schrodinger_system, uniform_jump_weights, GridDescriptor,
};
use semilab_core::semigroup::Generator;

use crate::config::{CliError, Overrides};

/// Which length-like parameter a scenario understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthRole {
    /// No length parameter; the domain is fixed.
    None,
    /// Half-width of the truncated line `[-L, L]`; grid resolution is kept
    /// when sweeping by scaling `n` with `L`.
    HalfWidth,
    /// Length of the interval `(0, L)`.
    Interval,
}

#[derive(Debug, Clone, Copy)]
pub struct ScenarioMeta {
    pub name: &'static str,
    pub description: &'static str,
    pub default_n: usize,
    pub min_n: usize,
    pub default_l: Option<f64>,
    pub length_role: LengthRole,
    /// Block size for the system scenario.
    pub default_block: Option<usize>,
}

pub const SCENARIOS: &[ScenarioMeta] = &[
    ScenarioMeta {
        name: "ex4_1",
        description: "diffusion on (0,1) whose endpoint values jump back into the interior \
                      with prescribed probabilities; conservative, positive, irreducible",
        default_n: 100,
        min_n: 3,
        default_l: None,
        length_role: LengthRole::None,
        default_block: None,
    },
    ScenarioMeta {
        name: "ex4_2a",
        description: "1D Schrodinger generator with a small constant absorption term 0.01 \
                      on [-L, L]; the semigroup decays to zero",
        default_n: 500,
        min_n: 10,
        default_l: Some(10.0),
        length_role: LengthRole::HalfWidth,
        default_block: None,
    },
    ScenarioMeta {
        name: "ex7_1",
        description: "1D Schrodinger generator with a confining step potential (0 inside \
                      |x| <= 1, 1 outside); spectral gap stabilizes as L grows",
        default_n: 400,
        min_n: 10,
        default_l: Some(10.0),
        length_role: LengthRole::HalfWidth,
        default_block: None,
    },
    ScenarioMeta {
        name: "ex7_2",
        description: "1D Schrodinger generator with potential (6x^2-2)/(1+x^2)^2 whose \
                      ground state is 1/(1+x^2) at spectral bound zero",
        default_n: 800,
        min_n: 10,
        default_l: Some(20.0),
        length_role: LengthRole::HalfWidth,
        default_block: None,
    },
    ScenarioMeta {
        name: "ex9_1",
        description: "Laplacian on (0,1) with endpoint coupling matrix [[1,1],[1,1]]; \
                      not positive, but positive for all large times",
        default_n: 100,
        min_n: 4,
        default_l: None,
        length_role: LengthRole::None,
        default_block: None,
    },
    ScenarioMeta {
        name: "ex9_2",
        description: "coupled diffusion system on (0,1) with a negative-semidefinite \
                      matrix potential annihilating a positive direction; eventually \
                      positive (block size >= 3 for a non-positive coupling)",
        default_n: 200,
        min_n: 3,
        default_l: None,
        length_role: LengthRole::None,
        default_block: Some(3),
    },
    ScenarioMeta {
        name: "heat_neumann",
        description: "heat equation on (0, L) with natural ends; conservative with \
                      spectral gap pi^2 / L^2",
        default_n: 200,
        min_n: 2,
        default_l: Some(1.0),
        length_role: LengthRole::Interval,
        default_block: None,
    },
    ScenarioMeta {
        name: "heat_dirichlet",
        description: "heat equation on (0, L) with absorbing ends; decays at rate \
                      pi^2 / L^2",
        default_n: 200,
        min_n: 3,
        default_l: Some(1.0),
        length_role: LengthRole::Interval,
        default_block: None,
    },
];

pub fn find(name: &str) -> Option<&'static ScenarioMeta> {
    SCENARIOS.iter().find(|m| m.name == name)
}

/// Fully resolved run parameters after defaults, config file and overrides.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub meta: &'static ScenarioMeta,
    pub n: usize,
    pub l: Option<f64>,
    pub block: Option<usize>,
    pub t_max: Option<f64>,
    pub points: usize,
    pub eps: f64,
}

pub const DEFAULT_PROFILE_POINTS: usize = 12;

pub fn resolve(name: &str, overrides: &Overrides) -> Result<ResolvedConfig, CliError> {
    let meta = find(name).ok_or_else(|| {
        CliError::config(format!(
            "unknown scenario '{name}'; run `semilab list` for the registry"
        ))
    })?;
    let n = overrides.n.unwrap_or(meta.default_n);
    if n < meta.min_n || n > 4000 {
        return Err(CliError::config(format!(
            "n = {n} outside the supported range [{}, 4000] for scenario {}",
            meta.min_n, meta.name
        )));
    }
    let l = match (meta.length_role, overrides.l) {
        (LengthRole::None, Some(_)) => {
            return Err(CliError::config(format!(
                "scenario {} has no length parameter L",
                meta.name
            )))
        }
        (LengthRole::None, None) => None,
        (_, user) => {
            let l = user
                .or(meta.default_l)
                .expect("length scenarios have defaults");
            if !(l > 0.0 && l <= 1e4) {
                return Err(CliError::config(format!(
                    "L = {l} outside the supported range (0, 1e4]"
                )));
            }
            Some(l)
        }
    };
    let block = match (meta.default_block, overrides.block) {
        (None, Some(_)) => {
            return Err(CliError::config(format!(
                "scenario {} has no block-size parameter N",
                meta.name
            )))
        }
        (def, user) => user.or(def),
    };
    if let Some(b) = block {
        if b == 0 || b.saturating_mul(n) > 5000 {
            return Err(CliError::config(format!(
                "block size N = {b} with n = {n} exceeds the supported N*n <= 5000"
            )));
        }
    }
    let points = overrides.points.unwrap_or(DEFAULT_PROFILE_POINTS);
    if !(4..=512).contains(&points) {
        return Err(CliError::config(format!(
            "points = {points} outside the supported range [4, 512]"
        )));
    }
    if let Some(t) = overrides.t_max {
        if t <= 0.0 {
            return Err(CliError::config(format!("t_max = {t} must be positive")));
        }
    }
    let eps = overrides.eps.unwrap_or(semilab_core::eventual::DEFAULT_EPS);
    if eps < 0.0 {
        return Err(CliError::config(format!("eps = {eps} must be nonnegative")));
    }
    Ok(ResolvedConfig {
        meta,
        n,
        l,
        block,
        t_max: overrides.t_max,
        points,
        eps,
    })
}

/// Build the generator for a resolved configuration.
pub fn build_generator(cfg: &ResolvedConfig) -> Result<Generator, CliError> {
    let build = || -> semilab_core::Result<Generator> {
        match cfg.meta.name {
            "ex4_1" => {
                let w = uniform_jump_weights(cfg.n);
                nonlocal_dirichlet_diffusion(cfg.n, &w, &w)
            }
            "ex4_2a" => absorption_1d(|_| 0.01, cfg.l.unwrap(), cfg.n),
            "ex7_1" => schrodinger_1d(
                |x: f64| if x.abs() <= 1.0 { 0.0 } else { 1.0 },
                cfg.l.unwrap(),
                cfg.n,
            ),
            "ex7_2" => schrodinger_1d(lorentzian_well_potential, cfg.l.unwrap(), cfg.n),
            "ex9_1" => nonlocal_laplace_interval(cfg.n),
            "ex9_2" => {
                let block = cfg.block.unwrap_or(3);
                let grid = GridDescriptor::new(0.0, 1.0, cfg.n)?;
                let pot = reference_system_potential(block)?;
                schrodinger_system(&grid, &pot)
            }
            "heat_neumann" => neumann_heat(cfg.n, cfg.l.unwrap()),
            "heat_dirichlet" => dirichlet_heat(cfg.n, cfg.l.unwrap()),
            other => unreachable!("unregistered scenario {other}"),
        }
    };
    build().map_err(|e| match e {
        semilab_core::Error::InvalidInput(_) | semilab_core::Error::NonFinite { .. } => {
            CliError::config(format!(
                "scenario {} rejected its inputs: {e}",
                cfg.meta.name
            ))
        }
        other => CliError::Pipeline {
            stage: "build",
            message: other.to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_eight_scenarios() {
        assert_eq!(SCENARIOS.len(), 8);
        for meta in SCENARIOS {
            assert!(find(meta.name).is_some());
        }
    }

    #[test]
    fn resolve_applies_defaults_and_ranges() {
        let cfg = resolve("heat_neumann", &Overrides::default()).unwrap();
        assert_eq!(cfg.n, 200);
        assert_eq!(cfg.l, Some(1.0));
        let too_big = Overrides {
            n: Some(10_000),
            ..Default::default()
        };
        assert!(resolve("heat_neumann", &too_big).is_err());
        let stray_length = Overrides {
            l: Some(2.0),
            ..Default::default()
        };
        assert!(resolve("ex4_1", &stray_length).is_err(), "ex4_1 has no L");
        let oversize_block = Overrides {
            block: Some(60),
            ..Default::default()
        };
        assert!(resolve("ex9_2", &oversize_block).is_err(), "N*n over limit");
    }

    #[test]
    fn unknown_scenario_is_a_config_error() {
        match resolve("nope", &Overrides::default()) {
            Err(CliError::Config(_)) => {}
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn every_scenario_builds_at_small_size() {
        for meta in SCENARIOS {
            let small_n = if meta.name == "ex4_1" || meta.name == "ex9_1" {
                20
            } else {
                meta.default_n.min(40).max(meta.min_n.max(10))
            };
            let o = Overrides {
                n: Some(small_n),
                ..Default::default()
            };
            let cfg = resolve(meta.name, &o).unwrap();
            let g = build_generator(&cfg).unwrap();
            assert!(g.dim() >= 3, "{} built a tiny generator", meta.name);
        }
    }
}
