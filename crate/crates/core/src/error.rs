use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Growth or sign bound of a viscosity law that failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// μ(ρ) > 0.
    MuPositive,
    /// 2μ(ρ) + Nλ(ρ) ≥ 0.
    LameCombination,
    /// μ(s) > c for 0 ≤ s ≤ s₀.
    MuLower,
    /// μ(s) ≤ c₁ s^m for s ≥ s₀.
    MuUpper,
    /// λ(s) > c′ for 0 ≤ s ≤ s′₀.
    LambdaLower,
    /// λ(s) ≤ c₂ s^m′ for s ≥ s′₀.
    LambdaUpper,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bound::MuPositive => "mu(rho) > 0",
            Bound::LameCombination => "2 mu(rho) + N lambda(rho) >= 0",
            Bound::MuLower => "mu(s) > c on [0, s0]",
            Bound::MuUpper => "mu(s) <= c1 s^m on [s0, inf)",
            Bound::LambdaLower => "lambda(s) > c' on [0, s0']",
            Bound::LambdaUpper => "lambda(s) <= c2 s^m' on [s0', inf)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidGrid(&'static str),
    GridMismatch,
    /// Negative fractional power applied to a field with nonzero mean.
    NegativePowerOnMean { mean: f64 },
    /// Inverse Laplacian of a field with nonzero mean.
    NonZeroMean { mean: f64 },
    NonPositiveDensity { value: f64 },
    InvalidModel(&'static str),
    ConstraintViolated { bound: Bound, rho: f64, value: f64 },
    /// Minimum density fell below the configured floor.
    VacuumApproached { time: f64, rho_min: f64, floor: f64 },
    /// The state stopped being finite (numerical blow-up).
    NonFiniteState { time: f64 },
    SRangeViolation { s: f64, dim: usize },
    RadiusTooLarge { radius: f64, limit: f64 },
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::NegativePowerOnMean { mean } => {
                write!(f, "negative fractional power of a field with mean {mean:e}")
            }
            Error::NonZeroMean { mean } => {
                write!(f, "inverse Laplacian needs a zero-mean field (mean {mean:e})")
            }
            Error::NonPositiveDensity { value } => write!(f, "non-positive density {value:e}"),
            Error::InvalidModel(why) => write!(f, "invalid model: {why}"),
            Error::ConstraintViolated { bound, rho, value } => {
                write!(f, "viscosity constraint `{bound}` violated at rho={rho:e} (value {value:e})")
            }
            Error::VacuumApproached { time, rho_min, floor } => write!(
                f,
                "vacuum approached at t={time}: min rho {rho_min:e} below floor {floor:e}"
            ),
            Error::NonFiniteState { time } => write!(f, "state became non-finite at t={time}"),
            Error::SRangeViolation { s, dim } => {
                write!(f, "regularity index s={s} outside the admissible range for dim={dim}")
            }
            Error::RadiusTooLarge { radius, limit } => {
                write!(f, "radius {radius} too large (limit {limit})")
            }
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}
