//! Physical constants and unit conversions. Everything inside the crate is
//! in Hartree atomic units (lengths in bohr, momenta in inverse bohr) except
//! energies, which stay in eV.

/// Bohr radius in nanometres (CODATA 2018).
pub const BOHR_NM: f64 = 0.052_917_721_090_3;
/// Electron rest energy in eV.
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.95;
/// hbar * c in eV nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

#[inline]
pub fn nm_to_bohr(nm: f64) -> f64 {
    nm / BOHR_NM
}

#[inline]
pub fn bohr_to_nm(bohr: f64) -> f64 {
    bohr * BOHR_NM
}

#[inline]
pub fn mrad_to_rad(mrad: f64) -> f64 {
    mrad * 1e-3
}

#[inline]
pub fn rad_to_mrad(rad: f64) -> f64 {
    rad * 1e3
}
