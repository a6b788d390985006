//! Capillarity, pressure and viscosity laws, plus the Orlicz norm used to
//! measure density deviations.

mod capillarity;
mod orlicz;
mod pressure;
mod viscosity;

pub use capillarity::{CapillarityLaw, CapillarityModel};
pub use orlicz::{orlicz_norm, orlicz_psi};
pub use pressure::{JGammaBounds, PressureLaw};
pub use viscosity::{DensityLaw, GrowthBounds, ViscosityModel, ViscosityReport};

/// The three constitutive laws that close the system.
#[derive(Debug, Clone, PartialEq)]
pub struct Laws {
    pub pressure: PressureLaw,
    pub viscosity: ViscosityModel,
    pub capillarity: CapillarityModel,
}

impl Laws {
    pub fn new(pressure: PressureLaw, viscosity: ViscosityModel, capillarity: CapillarityModel) -> Self {
        Self { pressure, viscosity, capillarity }
    }

    /// Reference density ρ̄ (shared by pressure and capillarity normalization).
    pub fn rho_bar(&self) -> f64 {
        self.pressure.rho_bar()
    }
}
