//! Energy-filtered diffraction of the mu = -1 channel on a detector grid,
//! drawn as ASCII art for both beam chiralities.

use vortex_emcd::atomic::Channel;
use vortex_emcd::probe::Displacement;
use vortex_emcd::scattering::{Simulation, SimulationSetup};

const SHADES: &[u8] = b" .:-=+*#%@";

fn main() -> vortex_emcd::Result<()> {
    let sim = Simulation::new(&SimulationSetup::default())?;
    for r_nm in [0.0, 0.3, 1.0] {
        for m in [1, -1] {
            let img = sim.detector_image(m, Displacement::nm(r_nm)?, 6e-3, 31, Some(Channel::Minus))?;
            println!("m = {m:+}, R = {r_nm} nm, peak {:.3e}", img.max());
            let peak = img.max();
            for row in (0..img.pixels).rev().step_by(2) {
                let line: String = (0..img.pixels)
                    .map(|col| {
                        let v = img.values[row * img.pixels + col] / peak;
                        SHADES[((v * (SHADES.len() - 1) as f64).round() as usize).min(SHADES.len() - 1)] as char
                    })
                    .collect();
                println!("  {line}");
            }
        }
    }
    Ok(())
}
