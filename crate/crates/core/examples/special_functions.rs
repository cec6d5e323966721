//! Bessel functions, Clebsch-Gordan coefficients and a Hankel transform
//! checked against a closed form.

use std::sync::Arc;
use vortex_emcd::special_math::grid::DEFAULT_PANEL_ORDER;
use vortex_emcd::special_math::{
    bessel_j, clebsch_gordan, hankel_transform, spherical_bessel_j1, RadialGrid, SampledRadialFunction,
};
use vortex_emcd::Complex64;

fn main() -> vortex_emcd::Result<()> {
    for x in [0.5, 2.404_825_557_695_773, 10.0] {
        println!("J0({x}) = {:+.12}  J1({x}) = {:+.12}", bessel_j(0, x)?, bessel_j(1, x)?);
    }
    println!("j1(pi) = {:.15} (1/pi = {:.15})", spherical_bessel_j1(std::f64::consts::PI), 1.0 / std::f64::consts::PI);
    println!("<1 1; 1/2 -1/2 | 3/2 1/2> = {:.12}", clebsch_gordan(1.0, 1.0, 0.5, -0.5, 1.5, 0.5)?);

    // Gaussian: its order-0 transform is again a Gaussian.
    let grid = Arc::new(RadialGrid::uniform(12.0, 0.05, DEFAULT_PANEL_ORDER)?);
    let f = SampledRadialFunction::from_fn(grid, |r| Complex64::new((-r * r / 2.0).exp(), 0.0))?;
    for q in [0.0, 0.5, 1.5] {
        let got = hankel_transform(0, &f, q)?;
        println!("H0[exp(-r^2/2)]({q}) = {:.12}  closed form {:.12}", got.re, (-q * q / 2.0).exp());
    }
    Ok(())
}
