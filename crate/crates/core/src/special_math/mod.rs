//! Numerical substrate: Bessel functions, radial grids, Hankel transforms,
//! azimuthal decomposition, Clebsch-Gordan coefficients and quadrature.

pub mod azimuthal;
pub mod bessel;
pub mod clebsch;
pub mod grid;
pub mod hankel;
pub mod quadrature;

pub use azimuthal::{azimuthal_decompose, AzimuthalCoefficients, AzimuthalTransform};
pub use bessel::{bessel_j, bessel_j_orders, bessel_j_signed, spherical_bessel_j1};
pub use clebsch::{clebsch_gordan, clebsch_gordan_doubled};
pub use grid::{RadialGrid, SampledRadialFunction};
pub use hankel::{hankel_transform, hankel_transform_many};
pub use quadrature::{gauss_legendre, integrate_adaptive};
