//! Physical constants in Gaussian CGS units.
//!
//! CODATA 2018 values, converted from SI where necessary (charge via
//! 1 C = 2.997 924 58 × 10⁹ statC).  These are the only constants the rest of
//! the crate is allowed to use; everything else must be derived.

/// Speed of light in vacuum (cm/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e10;

/// Reduced Planck constant ħ (erg·s).
pub const HBAR: f64 = 1.054_571_817e-27;

/// Elementary charge (statC = esu).
pub const ELEMENTARY_CHARGE: f64 = 4.803_204_712_57e-10;

/// Electron mass (g).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-28;

/// Boltzmann constant (erg/K).
pub const BOLTZMANN: f64 = 1.380_649e-16;

/// One Debye in CGS dipole-moment units (esu·cm).
pub const DEBYE: f64 = 1.0e-18;

/// Ergs per second in one watt, i.e. 1 W = 10⁷ erg/s.
pub const ERG_PER_S_IN_WATT: f64 = 1.0e7;
