//! Cylindrical-harmonic content of an off-axis vortex probe.

use std::f64::consts::PI;
use std::sync::Arc;
use vortex_emcd::atomic::BeamParams;
use vortex_emcd::probe::{build_probe, expand_displaced, probe_grid, Displacement, DEFAULT_HALF_WIDTH};
use vortex_emcd::special_math::grid::DEFAULT_PANEL_ORDER;
use vortex_emcd::special_math::RadialGrid;
use vortex_emcd::units::nm_to_bohr;

fn main() -> vortex_emcd::Result<()> {
    let probe = build_probe(&BeamParams::new(200e3, 1.2e-3, 1)?, Arc::new(probe_grid(nm_to_bohr(3.5))?))?;
    let disk = Arc::new(RadialGrid::uniform(10.0, 0.02, DEFAULT_PANEL_ORDER)?);
    for r_nm in [0.0, 0.3, 0.6, 1.0, 2.0] {
        let e = expand_displaced(&probe, Displacement::nm(r_nm)?, DEFAULT_HALF_WIDTH, Arc::clone(&disk))?;
        let total = e.power();
        let mut top: Vec<(i32, f64)> = e.iter().map(|(l, f)| (l, 2.0 * PI * f.power() / total)).collect();
        top.sort_by(|a, b| b.1.total_cmp(&a.1));
        let shown: Vec<String> = top.iter().take(4).map(|(l, p)| format!("l={l:+}: {:.3}", p)).collect();
        println!(
            "R = {r_nm:.1} nm  power in disk {:.3e}  window +-{}  discarded {:.1e}  [{}]",
            total,
            e.half_width,
            e.discarded,
            shown.join(", ")
        );
    }
    Ok(())
}
