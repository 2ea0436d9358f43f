//! Unit conventions.
//!
//! Energies, bath frequencies and decay constants live in cm⁻¹ with ħ = 1, so
//! the natural time unit is 1/cm⁻¹. Rates are supplied in ps⁻¹ and converted
//! through a single factor κ (ps⁻¹ per cm⁻¹), which is the only place where the
//! two conventions below differ.

use serde::{Deserialize, Serialize};

/// Boltzmann constant in cm⁻¹/K.
pub const KB_CM_PER_K: f64 = 0.695035;

/// 2πc in rad·ps⁻¹ per cm⁻¹.
pub const ANGULAR_PER_CM: f64 = 0.188365;

/// How a rate in ps⁻¹ maps onto the cm⁻¹ energy scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// 1 cm⁻¹ ↔ c·1 cm⁻¹ = 0.0299792 ps⁻¹. Reproduces the published FMO numbers.
    #[default]
    Cyclic,
    /// 1 cm⁻¹ ↔ 2πc·1 cm⁻¹ = 0.188365 rad/ps.
    Angular,
}

impl Units {
    /// κ: ps⁻¹ per internal cm⁻¹.
    pub fn kappa(self) -> f64 {
        match self {
            Units::Cyclic => ANGULAR_PER_CM / (2.0 * std::f64::consts::PI),
            Units::Angular => ANGULAR_PER_CM,
        }
    }

    /// ps⁻¹ → cm⁻¹.
    pub fn rate_to_internal(self, rate_per_ps: f64) -> f64 {
        rate_per_ps / self.kappa()
    }

    /// ps → internal time (1/cm⁻¹).
    pub fn ps_to_internal(self, t_ps: f64) -> f64 {
        t_ps * self.kappa()
    }

    /// internal time (1/cm⁻¹) → ps.
    pub fn internal_to_ps(self, t: f64) -> f64 {
        t / self.kappa()
    }
}

/// Inverse thermal energy β = 1/(k_B T) in cm.
pub fn beta(temperature_k: f64) -> f64 {
    1.0 / (KB_CM_PER_K * temperature_k)
}
