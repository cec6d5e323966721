//! Radial intensity and ring radius of focused vortex probes.
//!
//! cargo run --release --example probe_profile -- [alpha_mrad]

use std::sync::Arc;
use vortex_emcd::atomic::BeamParams;
use vortex_emcd::probe::{build_probe, probe_grid};
use vortex_emcd::units::{mrad_to_rad, nm_to_bohr};

fn main() -> vortex_emcd::Result<()> {
    let alpha: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.2);
    let grid = Arc::new(probe_grid(nm_to_bohr(3.0))?);
    println!("200 keV, alpha = {alpha} mrad");
    for m in [0, 1, 2] {
        let probe = build_probe(&BeamParams::new(200e3, mrad_to_rad(alpha), m)?, Arc::clone(&grid))?;
        println!(
            "m = {m}: ring radius {:.4} nm, power on grid {:.5}",
            probe.ring_radius_nm()?,
            probe.enclosed_power()
        );
    }
    let probe = build_probe(&BeamParams::new(200e3, mrad_to_rad(alpha), 1)?, grid)?;
    println!("\n r (nm)   |psi|^2 (bohr^-2)");
    for k in 0..=20 {
        let r = 0.1 * k as f64;
        println!("{r:6.2}   {:.4e}", probe.profile(nm_to_bohr(r)).powi(2));
    }
    Ok(())
}
