//! Atomic inputs: beam kinematics, orbitals, the `j1` matrix element, the
//! transition kernels and the channel weights.

pub mod kernel;
pub mod kinematics;
pub mod matrix_element;
pub mod orbital;
pub mod weights;

pub use kernel::{transition_kernel, Channel, KernelSpectrum, TransitionKernel};
pub use kinematics::{characteristic_angle, characteristic_q, wavenumber, BeamParams};
pub use matrix_element::{dipole_moment, radial_matrix_element};
pub use orbital::{slater_orbital, AtomicTable, RadialOrbital};
pub use weights::{channel_weights, ChannelWeights, Edge, Polarization};

use crate::error::{Error, Result};

/// Default interaction radius in bohr.
pub const DEFAULT_RHO: f64 = 10.0;

/// Edge under study: energy loss, characteristic momentum, the 2p -> 3d
/// orbitals and the interaction cutoff radius.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeParams {
    pub element: String,
    pub edge: Edge,
    /// Energy loss in eV.
    pub delta_e: f64,
    /// Characteristic momentum transfer in inverse bohr.
    pub q_e: f64,
    pub initial: RadialOrbital,
    pub final_: RadialOrbital,
    /// Interaction radius in bohr.
    pub rho: f64,
}

impl EdgeParams {
    /// Tabulated edge energy and Slater orbitals for `element`.
    pub fn new(element: &str, edge: Edge, beam: &BeamParams, rho: f64) -> Result<Self> {
        let table = AtomicTable::builtin();
        let delta_e = table.edge_energy(element, edge.label())?;
        Self::with_energy(element, edge, delta_e, beam, rho)
    }

    pub fn with_energy(element: &str, edge: Edge, delta_e: f64, beam: &BeamParams, rho: f64) -> Result<Self> {
        let initial = slater_orbital(element, 2, 1)?;
        let final_ = slater_orbital(element, 3, 2)?;
        let q_e = characteristic_q(delta_e, beam)?;
        if !(q_e > 0.0) {
            return Err(Error::Domain("characteristic momentum must be positive".into()));
        }
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("interaction radius must be positive, got {rho}")));
        }
        // |R_f(rho)| rho against the maximum of |R_f(r)| r
        let peak_r = final_.n as f64 / final_.zeta();
        let edge_value = final_.value(rho).abs() * rho;
        let peak = final_.value(peak_r).abs() * peak_r;
        if edge_value >= 1e-3 * peak {
            return Err(Error::Domain(format!(
                "interaction radius {rho} bohr cuts the final orbital at {:.2e} of its peak",
                edge_value / peak
            )));
        }
        Ok(Self {
            element: element.to_string(),
            edge,
            delta_e,
            q_e,
            initial,
            final_,
            rho,
        })
    }
}
