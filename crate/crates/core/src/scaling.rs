//! Physical constants and the dimensionless variables used by every kernel.
//!
//! A [`PhysicalSystem`] fixes the particle mass `m`, the force magnitude `F`
//! (directed along `+z`) and the reduced Planck constant `ħ`. From these it
//! derives the scale `β = (m / (4 ħ² F²))^(1/3)`, which has the dimension of
//! an inverse energy. `βF` is then an inverse length and `2β` an inverse
//! energy, giving
//!
//! ```text
//! ξ = βF x    ν_y = βF y    ζ = βF z    ρ = βF |r|
//! ε = -2βE    τ = t / (2ħβ)
//! ```
//!
//! All numerical work happens in these variables. SI values only appear at
//! the API boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J s (CODATA 2018, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron rest mass, kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of a ⁸⁷Rb atom, kg.
pub const RB87_MASS: f64 = 86.909_180_527 * ATOMIC_MASS_UNIT;
/// Gravitational acceleration used by the atom-laser presets, m/s².
pub const GRAVITY: f64 = 9.81;

/// An energy with an explicit unit tag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Energy {
    Joules(f64),
    ElectronVolts(f64),
    /// Frequency in Hz; converted with `E = 2πħν`.
    Frequency(f64),
}

impl Energy {
    /// Value in joules, using `hbar` for frequency conversion.
    pub fn to_joules(self, hbar: f64) -> f64 {
        match self {
            Energy::Joules(e) => e,
            Energy::ElectronVolts(e) => e * ELEMENTARY_CHARGE,
            Energy::Frequency(nu) => 2.0 * std::f64::consts::PI * hbar * nu,
        }
    }
}

/// Mass, force and action defining a uniform-field problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSystem {
    mass: f64,
    force: f64,
    hbar: f64,
    beta: f64,
}

/// Build a system from mass (kg), force magnitude (N) and ħ (J s).
pub fn make_system(mass: f64, force: f64, hbar: f64) -> Result<PhysicalSystem> {
    PhysicalSystem::new(mass, force, hbar)
}

impl PhysicalSystem {
    pub fn new(mass: f64, force: f64, hbar: f64) -> Result<Self> {
        for (field, value) in [("mass", mass), ("force", force), ("hbar", hbar)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain {
                    field,
                    value,
                    reason: "must be strictly positive and finite",
                });
            }
        }
        let beta = (mass / (4.0 * hbar * hbar * force * force)).cbrt();
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain {
                field: "beta",
                value: beta,
                reason: "derived scale is not a positive finite number",
            });
        }
        Ok(PhysicalSystem {
            mass,
            force,
            hbar,
            beta,
        })
    }

    /// Electron in an electric field given in eV/m (that is, `F = e·field`).
    pub fn electron_in_field(field_ev_per_m: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS, field_ev_per_m * ELEMENTARY_CHARGE, HBAR)
    }

    /// Particle of mass `mass` falling under gravity `g`.
    pub fn gravity(mass: f64, g: f64) -> Result<Self> {
        Self::new(mass, mass * g, HBAR)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn force(&self) -> f64 {
        self.force
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `β`, an inverse energy.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `βF`, the inverse length scale.
    pub fn inverse_length(&self) -> f64 {
        self.beta * self.force
    }

    /// Converts a dimensionless Green function to SI: `β (βF)³`.
    pub fn green_unit(&self) -> f64 {
        let bf = self.inverse_length();
        self.beta * bf * bf * bf
    }

    pub fn energy(&self, e: Energy) -> f64 {
        e.to_joules(self.hbar)
    }

    pub fn scale_point(&self, r: [f64; 3]) -> ScaledPoint {
        let k = self.inverse_length();
        ScaledPoint::new(k * r[0], k * r[1], k * r[2])
    }

    pub fn unscale_point(&self, p: &ScaledPoint) -> [f64; 3] {
        let k = self.inverse_length();
        [p.xi / k, p.nu_y / k, p.zeta / k]
    }

    pub fn scale_length(&self, x: f64) -> f64 {
        self.inverse_length() * x
    }

    pub fn unscale_length(&self, x: f64) -> f64 {
        x / self.inverse_length()
    }

    pub fn scale_energy(&self, energy: f64) -> ScaledEnergy {
        ScaledEnergy(-2.0 * self.beta * energy)
    }

    pub fn unscale_energy(&self, eps: ScaledEnergy) -> f64 {
        -eps.0 / (2.0 * self.beta)
    }

    pub fn scale_time(&self, t: f64) -> ScaledTime {
        ScaledTime(t / (2.0 * self.hbar * self.beta))
    }

    pub fn unscale_time(&self, tau: ScaledTime) -> f64 {
        tau.0 * 2.0 * self.hbar * self.beta
    }
}

/// Dimensionless position `(ξ, ν_y, ζ)` with its norm `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub xi: f64,
    pub nu_y: f64,
    pub zeta: f64,
    pub rho: f64,
}

impl ScaledPoint {
    pub fn new(xi: f64, nu_y: f64, zeta: f64) -> Self {
        let rho = (xi * xi + nu_y * nu_y + zeta * zeta).sqrt();
        ScaledPoint { xi, nu_y, zeta, rho }
    }

    /// `ξ² + ν_y²`.
    pub fn lateral_sq(&self) -> f64 {
        self.xi * self.xi + self.nu_y * self.nu_y
    }

    pub fn sub(&self, other: &ScaledPoint) -> ScaledPoint {
        ScaledPoint::new(self.xi - other.xi, self.nu_y - other.nu_y, self.zeta - other.zeta)
    }
}

/// Dimensionless energy `ε = -2βE`; negative for positive physical energy.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ScaledEnergy(pub f64);

/// Dimensionless time `τ = t/(2ħβ)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ScaledTime(pub f64);
