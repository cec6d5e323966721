//! Diffraction-plane amplitudes, channel sums, EMCD maps and
//! particle/detector integrals.

pub mod field;
pub mod signal;
pub mod simulation;

pub use field::{i_pow, outgoing_centered, outgoing_coefficients, outgoing_fields, DiffractionField, PolarIntensity};
pub use signal::{azimuthal_average, channel_sum, emcd, snr, INTENSITY_FLOOR};
pub use simulation::{ChannelMeans, DetectorImage, DetectorTable, EmcdMap, IntensityTable, MapKind, Simulation, SimulationSetup};

/// Default scattering-angle axis: 256 points from 0 to 10 mrad.
pub fn default_theta_mrad() -> Vec<f64> {
    (0..256).map(|k| 10.0 * k as f64 / 255.0).collect()
}
