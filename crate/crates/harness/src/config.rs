//! JSON run configuration: schema, defaults and validation.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use nsk_core::constitutive::{CapillarityLaw, CapillarityModel, DensityLaw, Laws, PressureLaw, ViscosityModel};
use nsk_core::diagnostics::{check_s_range, DiagnosticsSpec, TestFunctionSpec};
use nsk_core::solver::SimulationConfig;
use nsk_core::Grid;
use serde::{Deserialize, Serialize};

use crate::scenario::{Scenario, ScenarioId};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}, key `{key}`: {message}")]
    Parse { line: usize, column: usize, key: String, message: String },
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },
}

pub(crate) fn invalid(key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Validation { key: key.to_owned(), message: message.to_string() }
}

/// The file as written. Optional entries are filled in by [`RunConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Domain,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub pressure: PressureSection,
    #[serde(default)]
    pub viscosity: ViscositySection,
    #[serde(default)]
    pub capillarity: CapillaritySection,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

fn two_pi() -> f64 {
    TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t_end: f64,
    pub cfl: f64,
    /// Defaults to `t_end / 10`.
    pub output_interval: Option<f64>,
    /// Defaults to `1e-6 ρ̄`.
    pub rho_floor: Option<f64>,
    pub max_dt: Option<f64>,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self { t_end: 1.0, cfl: 0.25, output_interval: None, rho_floor: None, max_dt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PressureSection {
    pub a: f64,
    pub gamma: f64,
    pub rho_bar: f64,
}

impl Default for PressureSection {
    fn default() -> Self {
        Self { a: 1.0, gamma: 2.0, rho_bar: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViscosityKind {
    Constant,
    Inviscid,
    /// `μ(ρ) = mu ρ^mu_exponent`, `λ(ρ) = lambda ρ^lambda_exponent`.
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ViscositySection {
    pub model: ViscosityKind,
    pub mu: f64,
    pub lambda: f64,
    pub mu_exponent: f64,
    pub lambda_exponent: f64,
}

impl Default for ViscositySection {
    fn default() -> Self {
        Self { model: ViscosityKind::Constant, mu: 0.01, lambda: 0.0, mu_exponent: 0.0, lambda_exponent: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapillarityKind {
    PowerLaw,
    Critical,
    PiecewiseConstant,
    OneD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapillaritySection {
    pub model: CapillarityKind,
    pub kappa: f64,
    pub alpha: f64,
    pub rho_threshold: Option<f64>,
    pub epsilon: Option<f64>,
}

impl Default for CapillaritySection {
    fn default() -> Self {
        Self { model: CapillarityKind::PowerLaw, kappa: 0.01, alpha: 0.0, rho_threshold: None, epsilon: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub id: ScenarioId,
    pub amplitude: Option<f64>,
    pub wavenumber: Option<u32>,
    #[serde(default)]
    pub seed: u64,
    /// Width of the density dip of `vacuum-approach`, as a fraction of the box.
    pub bump_width: Option<f64>,
    /// `min ρ₀ = floor_multiple · rho_floor` for `vacuum-approach`.
    pub floor_multiple: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSection {
    pub center: Vec<f64>,
    pub radius: f64,
    pub order: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub s: Option<f64>,
    pub ball_radius: Option<f64>,
    pub alpha_gain: Option<f64>,
    pub delta_orlicz: Option<f64>,
    pub phi: Option<PhiSection>,
}

/// A validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct Config {
    /// The input with every default written out.
    pub echo: RunConfig,
    pub simulation: SimulationConfig,
    pub scenario: Scenario,
}

pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse { line: inner.line(), column: inner.column(), key, message: inner.to_string() }
    })?;
    raw.resolve()
}

impl RunConfig {
    /// Fills defaults, builds the core configuration and checks every invariant.
    pub fn resolve(&self) -> Result<Config, ConfigError> {
        let d = &self.domain;
        let grid = Grid::new(d.dim, d.n, d.length).map_err(|e| invalid("domain", e))?;

        let p = &self.pressure;
        if !(p.gamma > 1.0) {
            return Err(invalid("pressure.gamma", format!("gamma > 1 required, got {}", p.gamma)));
        }
        if !(p.a > 0.0) {
            return Err(invalid("pressure.a", format!("a > 0 required, got {}", p.a)));
        }
        if !(p.rho_bar > 0.0) {
            return Err(invalid("pressure.rho_bar", format!("rho_bar > 0 required, got {}", p.rho_bar)));
        }
        let pressure = PressureLaw::new(p.a, p.gamma, p.rho_bar).map_err(|e| invalid("pressure", e))?;

        let v = &self.viscosity;
        let viscosity = match v.model {
            ViscosityKind::Inviscid => ViscosityModel::inviscid(),
            ViscosityKind::Constant => ViscosityModel::constant(v.mu, v.lambda),
            ViscosityKind::Power => ViscosityModel {
                mu: DensityLaw::power(v.mu, v.mu_exponent),
                lambda: DensityLaw::power(v.lambda, v.lambda_exponent),
                bounds: None,
            },
        };

        let c = &self.capillarity;
        let law = match c.model {
            CapillarityKind::PowerLaw if c.alpha == -2.0 => CapillarityLaw::Critical { kappa: c.kappa },
            CapillarityKind::PowerLaw => CapillarityLaw::PowerLaw { kappa: c.kappa, alpha: c.alpha },
            CapillarityKind::Critical => CapillarityLaw::Critical { kappa: c.kappa },
            CapillarityKind::PiecewiseConstant | CapillarityKind::OneD => {
                let rho_threshold = c
                    .rho_threshold
                    .ok_or_else(|| invalid("capillarity.rho_threshold", "required by piecewise models"))?;
                let epsilon = c.epsilon.unwrap_or(0.0);
                if c.model == CapillarityKind::OneD {
                    CapillarityLaw::OneD { rho_threshold, kappa: c.kappa, epsilon }
                } else {
                    CapillarityLaw::PiecewiseConstant { rho_threshold, kappa: c.kappa, epsilon }
                }
            }
        };
        let capillarity = CapillarityModel::new(law, p.rho_bar).map_err(|e| invalid("capillarity", e))?;

        let t = &self.time;
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return Err(invalid("time.t_end", format!("t_end > 0 required, got {}", t.t_end)));
        }
        if !(t.cfl > 0.0 && t.cfl <= 1.0) {
            return Err(invalid("time.cfl", format!("0 < cfl <= 1 required, got {}", t.cfl)));
        }
        let output_interval = t.output_interval.unwrap_or(t.t_end / 10.0);
        if !(output_interval > 0.0) {
            return Err(invalid("time.output_interval", "must be positive"));
        }
        let rho_floor = t.rho_floor.unwrap_or(1e-6 * p.rho_bar);
        if !(rho_floor > 0.0 && rho_floor < p.rho_bar) {
            return Err(invalid("time.rho_floor", format!("0 < rho_floor < rho_bar required, got {rho_floor}")));
        }
        if let Some(dt) = t.max_dt {
            if !(dt > 0.0) {
                return Err(invalid("time.max_dt", "must be positive"));
            }
        }

        if !viscosity.is_inviscid() {
            viscosity
                .validate(rho_floor, 1e3 * p.rho_bar, d.dim, 256)
                .map_err(|e| invalid("viscosity", e))?;
        }

        let defaults = DiagnosticsSpec::default_for(&grid);
        let ds = &self.diagnostics;
        let s = ds.s.unwrap_or(defaults.s);
        check_s_range(s, d.dim).map_err(|_| {
            let range = if d.dim == 2 { "[0, 2)" } else { "[0, 1/2)" };
            invalid("diagnostics.s", format!("s must lie in {range} for dim={}, got {s}", d.dim))
        })?;
        let phi = match &ds.phi {
            None => defaults.phi,
            Some(ph) => {
                if ph.center.len() != d.dim {
                    return Err(invalid("diagnostics.phi.center", format!("needs {} coordinates", d.dim)));
                }
                let center = [ph.center[0], ph.center.get(1).copied().unwrap_or(0.0)];
                TestFunctionSpec::Bump { center, radius: ph.radius, order: ph.order.unwrap_or(8) }
            }
        };
        let diagnostics = DiagnosticsSpec {
            s,
            ball_radius: ds.ball_radius.unwrap_or(defaults.ball_radius),
            alpha_gain: ds.alpha_gain.unwrap_or(defaults.alpha_gain),
            phi,
            delta_orlicz: ds.delta_orlicz.unwrap_or(defaults.delta_orlicz),
        };
        diagnostics.validate(&grid).map_err(|e| invalid("diagnostics", e))?;

        let scenario = Scenario::from_section(&self.scenario, &grid, &capillarity, &viscosity)?;

        let laws = Laws::new(pressure, viscosity, capillarity);
        let simulation = SimulationConfig {
            grid,
            laws,
            t_end: t.t_end,
            cfl_factor: t.cfl,
            rho_floor,
            output_interval,
            max_dt: t.max_dt,
            diagnostics: diagnostics.clone(),
        };
        simulation.validate().map_err(|e| invalid("time", e))?;

        let mut echo = self.clone();
        echo.time.output_interval = Some(output_interval);
        echo.time.rho_floor = Some(rho_floor);
        echo.scenario = scenario.to_section();
        let center = diagnostics.phi.center().unwrap_or([0.0; 2]);
        echo.diagnostics = DiagnosticsSection {
            s: Some(diagnostics.s),
            ball_radius: Some(diagnostics.ball_radius),
            alpha_gain: Some(diagnostics.alpha_gain),
            delta_orlicz: Some(diagnostics.delta_orlicz),
            phi: match diagnostics.phi {
                TestFunctionSpec::Bump { radius, order, .. } => {
                    Some(PhiSection { center: center[..d.dim].to_vec(), radius, order: Some(order) })
                }
                _ => None,
            },
        };
        Ok(Config { echo, simulation, scenario })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(r#"{"domain":{"dim":1,"n":64},"scenario":{"id":"large-data-1d"}}"#).unwrap();
        assert_eq!(c.simulation.cfl_factor, 0.25);
        assert_eq!(c.simulation.rho_floor, 1e-6);
        assert_eq!(c.simulation.diagnostics.delta_orlicz, 1.0);
        assert_eq!(c.simulation.grid.length(), TAU);
        assert_eq!(c.echo.time.output_interval, Some(0.1));
    }

    #[test]
    fn gamma_below_one_is_rejected() {
        let e = parse_config(r#"{"domain":{"dim":1,"n":64},"pressure":{"gamma":0.5},"scenario":{"id":"large-data-1d"}}"#)
            .unwrap_err();
        match e {
            ConfigError::Validation { key, message } => {
                assert_eq!(key, "pressure.gamma");
                assert!(message.contains("gamma > 1"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn s_range_depends_on_dimension() {
        let text = r#"{"domain":{"dim":1,"n":64},"scenario":{"id":"large-data-1d"},"diagnostics":{"s":1.0}}"#;
        assert!(matches!(parse_config(text), Err(ConfigError::Validation { key, .. }) if key == "diagnostics.s"));
        let text = r#"{"domain":{"dim":2,"n":16},"scenario":{"id":"small-data-2d"},"diagnostics":{"s":1.0}}"#;
        assert!(parse_config(text).is_ok());
    }

    #[test]
    fn parse_errors_carry_position_and_key() {
        let text = "{\n  \"domain\": {\"dim\": 1, \"n\": 64},\n  \"scenario\": {\"id\": \"large-data-1d\", \"amplitud\": 1}\n}";
        match parse_config(text).unwrap_err() {
            ConfigError::Parse { line, key, .. } => {
                assert_eq!(line, 3);
                assert!(key.starts_with("scenario"), "{key}");
            }
            other => panic!("unexpected {other}"),
        }
        match parse_config(r#"{"domain":{"dim":"two","n":64},"scenario":{"id":"large-data-1d"}}"#).unwrap_err() {
            ConfigError::Parse { key, .. } => assert_eq!(key, "domain.dim"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config(r#"{"domain":{"dim":2,"n":16},"scenario":{"id":"small-data-2d","seed":3}}"#).unwrap();
        let text = serde_json::to_string(&c.echo).unwrap();
        let again = parse_config(&text).unwrap();
        assert_eq!(again.echo, c.echo);
        assert_eq!(again.simulation, c.simulation);
    }
}
