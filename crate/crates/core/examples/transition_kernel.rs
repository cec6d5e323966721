//! Real-space transition kernels of the Fe L3 edge.

use std::sync::Arc;
use vortex_emcd::atomic::{transition_kernel, BeamParams, Channel, Edge, EdgeParams, DEFAULT_RHO};
use vortex_emcd::special_math::RadialGrid;
use vortex_emcd::special_math::grid::DEFAULT_PANEL_ORDER;

fn main() -> vortex_emcd::Result<()> {
    let beam = BeamParams::new(200e3, 1.2e-3, 1)?;
    let edge = EdgeParams::new("Fe", Edge::L3, &beam, DEFAULT_RHO)?;
    println!("Fe L3: energy loss {} eV, q_E = {:.5} bohr^-1", edge.delta_e, edge.q_e);
    let grid = Arc::new(RadialGrid::uniform(DEFAULT_RHO, 0.02, DEFAULT_PANEL_ORDER)?);
    for c in Channel::ALL {
        let k = transition_kernel(c, &edge, Arc::clone(&grid))?;
        println!(
            "mu = {:+}: q_max {:.2} bohr^-1, |f(rho)|/max|f| = {:.4}",
            c.mu(),
            k.q_max,
            k.edge_ratio
        );
        for r in [0.5, 1.0, 2.0, 5.0] {
            let v = k.eval(r);
            println!("    f({r:.1} bohr) = {:+.4e} {:+.4e}i", v.re, v.im);
        }
    }
    Ok(())
}
