//! Relativistic beam kinematics.

use crate::error::{Error, Result};
use crate::units::{BOHR_NM, ELECTRON_REST_ENERGY_EV, HBAR_C_EV_NM};

/// Incident beam: kinetic energy, wavenumber, convergence semi-angle and
/// topological charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    /// Kinetic energy in eV.
    pub energy: f64,
    /// Relativistic wavenumber in inverse bohr.
    pub k0: f64,
    /// Convergence semi-angle in rad.
    pub alpha: f64,
    /// Topological charge.
    pub m: i32,
}

impl BeamParams {
    pub fn new(energy: f64, alpha: f64, m: i32) -> Result<Self> {
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::Domain(format!("beam energy must be positive, got {energy} eV")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("convergence semi-angle must be positive, got {alpha} rad")));
        }
        Ok(Self {
            energy,
            k0: wavenumber(energy)?,
            alpha,
            m,
        })
    }

    pub fn with_charge(self, m: i32) -> Self {
        Self { m, ..self }
    }

    /// Radius of the illumination aperture in reciprocal space, `k0 * alpha`.
    pub fn aperture_q(&self) -> f64 {
        self.k0 * self.alpha
    }

    /// Wavelength in pm.
    pub fn wavelength_pm(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k0 * BOHR_NM * 1e3
    }

    pub fn gamma(&self) -> f64 {
        1.0 + self.energy / ELECTRON_REST_ENERGY_EV
    }

    /// Transverse momentum for a scattering angle in rad.
    pub fn q_of_theta(&self, theta: f64) -> f64 {
        self.k0 * theta
    }
}

/// Relativistic `k0 = p / hbar` in inverse bohr for a kinetic energy in eV.
pub fn wavenumber(energy: f64) -> Result<f64> {
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(Error::Domain(format!("kinetic energy must be non-negative, got {energy} eV")));
    }
    let pc = (energy * (energy + 2.0 * ELECTRON_REST_ENERGY_EV)).sqrt();
    Ok(pc / HBAR_C_EV_NM * BOHR_NM)
}

/// Characteristic angle `theta_E = dE / (gamma m0 v^2)` in rad.
pub fn characteristic_angle(delta_e: f64, beam: &BeamParams) -> Result<f64> {
    if !(delta_e >= 0.0) || delta_e >= beam.energy {
        return Err(Error::Domain(format!(
            "energy loss {delta_e} eV must lie in [0, {}) eV",
            beam.energy
        )));
    }
    let gamma = beam.gamma();
    let beta2 = 1.0 - 1.0 / (gamma * gamma);
    Ok(delta_e / (gamma * ELECTRON_REST_ENERGY_EV * beta2))
}

/// Characteristic momentum transfer `q_E = k0 theta_E` in inverse bohr.
pub fn characteristic_q(delta_e: f64, beam: &BeamParams) -> Result<f64> {
    Ok(beam.k0 * characteristic_angle(delta_e, beam)?)
}
