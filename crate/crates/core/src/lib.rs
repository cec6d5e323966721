//! Simulation of energy-loss magnetic chiral dichroism (EMCD) produced by
//! focused electron vortex probes exciting 2p -> 3d dipole transitions.
//!
//! The pipeline, bottom up:
//!
//! * [`special_math`]: Bessel functions, radial quadrature grids, Hankel
//!   transforms, azimuthal Fourier decomposition, Clebsch-Gordan coefficients.
//! * [`atomic`]: beam kinematics, Slater orbitals, the radial matrix element
//!   of `j1(Qr)`, the transition kernels `f_mu(r)` and the dipole channel weights.
//! * [`probe`]: the aperture-limited vortex probe and its cylindrical-harmonic
//!   expansion about a displaced atom.
//! * [`scattering`]: diffraction-plane amplitudes, channel sums, EMCD maps and
//!   detector/particle integrals.
//! * [`oracle`]: an independent Cartesian grid + 2D FFT reference.
//! * [`config`] and [`commands`]: the sectioned run configuration and the
//!   sweep commands behind the `vortex-emcd` binary.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod commands;
pub mod config;
pub mod error;
pub mod oracle;
pub mod probe;
mod render;
pub mod scattering;
pub mod special_math;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
