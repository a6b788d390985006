//! Scenario library: initial data for each regime.

use std::f64::consts::TAU;

use nsk_core::constitutive::{CapillarityLaw, CapillarityModel, Laws, ViscosityModel};
use nsk_core::diagnostics::capillary_energy_a;
use nsk_core::{FlowState, Grid, ScalarField, Spectral, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{invalid, ConfigError, ScenarioSection};
use crate::manufactured::Manufactured;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    #[serde(rename = "small-data-2d")]
    SmallData2d,
    #[serde(rename = "large-data-1d")]
    LargeData1d,
    #[serde(rename = "vacuum-approach")]
    VacuumApproach,
    #[serde(rename = "large-kappa")]
    LargeKappa,
    #[serde(rename = "critical-capillarity")]
    CriticalCapillarity,
    #[serde(rename = "manufactured")]
    Manufactured,
}

impl ScenarioId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::SmallData2d => "small-data-2d",
            ScenarioId::LargeData1d => "large-data-1d",
            ScenarioId::VacuumApproach => "vacuum-approach",
            ScenarioId::LargeKappa => "large-kappa",
            ScenarioId::CriticalCapillarity => "critical-capillarity",
            ScenarioId::Manufactured => "manufactured",
        }
    }

    fn default_amplitude(&self) -> f64 {
        match self {
            ScenarioId::SmallData2d | ScenarioId::CriticalCapillarity => 1e-3,
            ScenarioId::LargeData1d => 0.5,
            ScenarioId::VacuumApproach => 1.0,
            ScenarioId::LargeKappa => 0.1,
            ScenarioId::Manufactured => 0.1,
        }
    }
}

/// Initial-data builder parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub amplitude: f64,
    /// Highest mode of the random perturbation (or the single mode of the
    /// manufactured solution).
    pub wavenumber: u32,
    pub seed: u64,
    /// Width of the vacuum dip as a fraction of the box.
    pub bump_width: f64,
    pub floor_multiple: f64,
}

/// The size of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialNorms {
    /// `‖∇ρ₀‖_{L²}`.
    pub grad_rho: f64,
    /// `‖√ρ₀ u₀‖_{L²}`.
    pub sqrt_rho_u: f64,
    /// `‖j_γ(ρ₀)‖_{L¹}`.
    pub j_gamma: f64,
    /// Sum of the three quantities above.
    pub smallness: f64,
    /// `‖∇A(ρ₀)‖_{L²}`.
    pub grad_a: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub state: FlowState,
    pub norms: InitialNorms,
}

impl Scenario {
    pub fn new(id: ScenarioId) -> Self {
        Self { id, amplitude: id.default_amplitude(), wavenumber: 1, seed: 0, bump_width: 0.125, floor_multiple: 10.0 }
    }

    pub(crate) fn from_section(
        s: &ScenarioSection,
        grid: &Grid,
        capillarity: &CapillarityModel,
        viscosity: &ViscosityModel,
    ) -> Result<Self, ConfigError> {
        let mut sc = Self::new(s.id);
        sc.amplitude = s.amplitude.unwrap_or(sc.amplitude);
        sc.wavenumber = s.wavenumber.unwrap_or(sc.wavenumber);
        sc.seed = s.seed;
        sc.bump_width = s.bump_width.unwrap_or(sc.bump_width);
        sc.floor_multiple = s.floor_multiple.unwrap_or(sc.floor_multiple);

        if !(sc.amplitude >= 0.0 && sc.amplitude.is_finite()) {
            return Err(invalid("scenario.amplitude", "must be finite and non-negative"));
        }
        if sc.wavenumber == 0 || 3 * sc.wavenumber as usize >= grid.n() {
            return Err(invalid("scenario.wavenumber", "must be at least 1 and inside the dealiased band"));
        }
        if !(sc.bump_width > 0.0 && sc.bump_width < 0.5) {
            return Err(invalid("scenario.bump_width", "must lie in (0, 1/2)"));
        }
        if !(sc.floor_multiple > 1.0) {
            return Err(invalid("scenario.floor_multiple", "must exceed 1"));
        }
        match s.id {
            ScenarioId::SmallData2d if grid.dim() != 2 => {
                return Err(invalid("domain.dim", "small-data-2d needs dim = 2"));
            }
            ScenarioId::LargeData1d if grid.dim() != 1 => {
                return Err(invalid("domain.dim", "large-data-1d needs dim = 1"));
            }
            ScenarioId::LargeData1d | ScenarioId::SmallData2d | ScenarioId::LargeKappa if sc.amplitude >= 1.0 => {
                return Err(invalid("scenario.amplitude", "density perturbation must stay below 1"));
            }
            ScenarioId::CriticalCapillarity if !matches!(capillarity.law(), CapillarityLaw::Critical { .. }) => {
                return Err(invalid("capillarity.model", "critical-capillarity needs the critical law"));
            }
            ScenarioId::Manufactured => Manufactured::check_models(capillarity, viscosity)?,
            _ => {}
        }
        Ok(sc)
    }

    pub(crate) fn to_section(&self) -> ScenarioSection {
        ScenarioSection {
            id: self.id,
            amplitude: Some(self.amplitude),
            wavenumber: Some(self.wavenumber),
            seed: self.seed,
            bump_width: Some(self.bump_width),
            floor_multiple: Some(self.floor_multiple),
        }
    }

    /// The manufactured solution of this scenario, if it is one.
    pub fn manufactured(&self, grid: &Grid, laws: &Laws) -> Option<Manufactured> {
        (self.id == ScenarioId::Manufactured)
            .then(|| Manufactured::new(*grid, laws.clone(), self.amplitude, self.wavenumber))
    }
}

/// Random trigonometric polynomial with modes `1 ≤ |k|_∞ ≤ kmax`, amplitudes
/// decaying like `|k|⁻²`, normalized to unit maximum.
pub fn random_smooth_field(grid: &Grid, rng: &mut ChaCha8Rng, kmax: u32) -> ScalarField {
    let k0 = grid.k0();
    let kmax = kmax as i64;
    let mut modes = Vec::new();
    let ky_range = if grid.dim() == 2 { -kmax..=kmax } else { 0..=0 };
    for ky in ky_range {
        for kx in 0..=kmax {
            if kx == 0 && ky <= 0 {
                continue;
            }
            let amp: f64 = rng.gen_range(-1.0..1.0) / (kx * kx + ky * ky) as f64;
            let phase: f64 = rng.gen_range(0.0..TAU);
            modes.push((kx as f64 * k0, ky as f64 * k0, amp, phase));
        }
    }
    let f = ScalarField::from_fn(*grid, |x| {
        modes.iter().map(|&(kx, ky, a, p)| a * (kx * x[0] + ky * x[1] + p).cos()).sum()
    });
    let m = f.max_abs();
    if m > 0.0 {
        f.scale(1.0 / m)
    } else {
        f
    }
}

pub fn build_initial(scenario: &Scenario, grid: &Grid, laws: &Laws, rho_floor: f64) -> nsk_core::Result<InitialData> {
    let rho_bar = laws.rho_bar();
    let c_s = laws.pressure.pressure_prime(rho_bar).sqrt();
    let a = scenario.amplitude;
    let state = match scenario.id {
        ScenarioId::SmallData2d | ScenarioId::LargeData1d | ScenarioId::LargeKappa | ScenarioId::CriticalCapillarity => {
            let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
            let g = random_smooth_field(grid, &mut rng, scenario.wavenumber);
            let rho = g.map(|v| rho_bar * (1.0 + a * v));
            let u = VectorField::new(
                (0..grid.dim())
                    .map(|_| random_smooth_field(grid, &mut rng, scenario.wavenumber).scale(a * c_s))
                    .collect(),
            )?;
            FlowState::from_velocity(rho, &u, 0.0)?
        }
        ScenarioId::VacuumApproach => {
            let k0 = grid.k0();
            let c = 0.5 * grid.length();
            let w = scenario.bump_width * grid.length() * k0;
            let depth = rho_bar - scenario.floor_multiple * rho_floor;
            let dip = |x: [f64; 2]| -> f64 {
                (0..grid.dim()).map(|i| (((k0 * (x[i] - c)).cos() - 1.0) / (w * w)).exp()).product()
            };
            let rho = ScalarField::from_fn(*grid, |x| rho_bar - depth * dip(x));
            let u = VectorField::new(
                (0..grid.dim())
                    .map(|i| ScalarField::from_fn(*grid, |x| a * c_s * (k0 * (x[i] - c)).sin() * dip(x)))
                    .collect(),
            )?;
            FlowState::from_velocity(rho, &u, 0.0)?
        }
        ScenarioId::Manufactured => Manufactured::new(*grid, laws.clone(), a, scenario.wavenumber).exact(0.0)?,
    };
    let norms = initial_norms(&state, laws)?;
    Ok(InitialData { state, norms })
}

pub fn initial_norms(state: &FlowState, laws: &Laws) -> nsk_core::Result<InitialNorms> {
    let grid = *state.grid();
    let sp = Spectral::new(grid);
    let grad_rho = sp.gradient(state.rho()).l2_norm();
    let kinetic = state.momentum().dot(&state.velocity()).integral();
    let j_gamma = state.rho().map(|r| laws.pressure.j_gamma(r)).integral();
    let sqrt_rho_u = kinetic.max(0.0).sqrt();
    Ok(InitialNorms {
        grad_rho,
        sqrt_rho_u,
        j_gamma,
        smallness: grad_rho + sqrt_rho_u + j_gamma,
        grad_a: (2.0 * capillary_energy_a(&sp, state.rho(), &laws.capillarity)?).sqrt(),
        rho_min: state.min_density(),
        rho_max: state.max_density(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsk_core::constitutive::PressureLaw;

    fn laws() -> Laws {
        Laws::new(
            PressureLaw::new(1.0, 2.0, 1.0).unwrap(),
            ViscosityModel::constant(0.01, 0.0),
            CapillarityModel::power_law(0.01, 0.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn zero_amplitude_is_equilibrium() {
        let g = Grid::new(2, 16, TAU).unwrap();
        let mut s = Scenario::new(ScenarioId::SmallData2d);
        s.amplitude = 0.0;
        let d = build_initial(&s, &g, &laws(), 1e-6).unwrap();
        assert_eq!(d.state, FlowState::equilibrium(g, 1.0).unwrap());
        assert_eq!(d.norms.smallness, 0.0);
    }

    #[test]
    fn small_data_triple_is_small() {
        let g = Grid::new(2, 32, TAU).unwrap();
        let s = Scenario::new(ScenarioId::SmallData2d);
        let d = build_initial(&s, &g, &laws(), 1e-6).unwrap();
        assert!(d.norms.smallness > 0.0 && d.norms.smallness < 0.05, "{:?}", d.norms);
    }

    #[test]
    fn vacuum_dip_hits_the_floor_multiple() {
        let g = Grid::new(1, 64, TAU).unwrap();
        let s = Scenario::new(ScenarioId::VacuumApproach);
        let d = build_initial(&s, &g, &laws(), 0.01).unwrap();
        assert!((d.state.min_density() - 0.1).abs() < 1e-14);
    }

    #[test]
    fn seeds_are_deterministic() {
        let g = Grid::new(2, 16, TAU).unwrap();
        let mut s = Scenario::new(ScenarioId::SmallData2d);
        let a = build_initial(&s, &g, &laws(), 1e-6).unwrap();
        let b = build_initial(&s, &g, &laws(), 1e-6).unwrap();
        assert_eq!(a.state, b.state);
        s.seed = 1;
        let c = build_initial(&s, &g, &laws(), 1e-6).unwrap();
        assert_ne!(a.state, c.state);
    }
}
