//! Physical constants in SI units.
//!
//! The defining constants of the 2019 SI (ħ, k_B, c, e) are exact. The vacuum
//! permeability is derived from ε₀ and c so that `c² ε₀ μ₀ = 1` holds to
//! rounding.

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Elementary charge (C), used for eV conversions at the I/O boundary.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Vacuum permeability (H/m), `1 / (ε₀ c²)`.
pub fn mu0() -> f64 {
    1.0 / (EPS0 * C * C)
}

/// Angular frequency (rad/s) of a photon with energy `energy_ev`.
pub fn omega_from_ev(energy_ev: f64) -> f64 {
    energy_ev * E_CHARGE / HBAR
}

/// Photon energy in eV at angular frequency `omega`.
pub fn ev_from_omega(omega: f64) -> f64 {
    omega * HBAR / E_CHARGE
}

/// The constants every observable depends on, including the transverse
/// quantization area `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub eps0: f64,
    pub mu0: f64,
    /// Quantization area in the transverse plane (m²).
    pub area: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            k_b: K_B,
            c: C,
            eps0: EPS0,
            mu0: mu0(),
            area: 1.0,
        }
    }
}

impl PhysicalConstants {
    /// SI constants with a custom quantization area.
    pub fn with_area(area: f64) -> Self {
        Self {
            area,
            ..Self::default()
        }
    }

    /// Checks positivity and the `c² ε₀ μ₀ = 1` identity.
    pub fn is_consistent(&self) -> bool {
        let all_positive = [self.hbar, self.k_b, self.c, self.eps0, self.mu0, self.area]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        all_positive && (self.c * self.c * self.eps0 * self.mu0 - 1.0).abs() < 1e-12
    }

    /// Electric LDOS of homogeneous vacuum, `1 / (π c S)`.
    pub fn vacuum_ldos(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.c * self.area)
    }

    /// The plotting unit `2 / (π c S)` used for reported LDOS values.
    pub fn ldos_unit(&self) -> f64 {
        2.0 / (std::f64::consts::PI * self.c * self.area)
    }
}
