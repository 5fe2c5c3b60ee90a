//! CODATA 2018 recommended values.

/// Fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Newtonian gravitational constant, m^3 kg^-1 s^-2.
    pub g: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Speed of light in vacuum, m s^-1.
    pub c: f64,
    /// Boltzmann constant, J K^-1.
    pub k_b: f64,
    /// Bohr magneton, J T^-1.
    pub mu_b: f64,
    /// Magnitude of the electron g-factor.
    pub g_e: f64,
    /// Vacuum permittivity, F m^-1.
    pub eps0: f64,
    /// Vacuum permeability, H m^-1.
    pub mu0: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    g: 6.674_30e-11,
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    k_b: 1.380_649e-23,
    mu_b: 9.274_010_078_3e-24,
    g_e: 2.002_319_304_362_56,
    eps0: 8.854_187_812_8e-12,
    mu0: 1.256_637_062_12e-6,
};

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a neutral helium-4 atom (4.002 603 254 13 u), kg.
pub const HELIUM4_MASS: f64 = 4.002_603_254_13 * ATOMIC_MASS_UNIT;

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA_2018
    }
}

impl PhysicalConstants {
    pub const fn codata2018() -> Self {
        CODATA_2018
    }
}
