//! Cartesian FFT reference against the cylindrical-harmonic pipeline for a
//! single case. Expect roughly half a minute in release mode.

use vortex_emcd::atomic::{Channel, KernelSpectrum};
use vortex_emcd::oracle::{compare_with_pipeline, grid_scatter, GridSpec, KernelImage, OracleKernel};
use vortex_emcd::probe::Displacement;
use vortex_emcd::scattering::{Simulation, SimulationSetup};

fn main() -> vortex_emcd::Result<()> {
    let sim = Simulation::new(&SimulationSetup::default())?;
    let spec = GridSpec::default();
    let spectrum = KernelSpectrum::new(1, &sim.edge, sim.edge.rho)?;
    let image = KernelImage::new(&spectrum, sim.edge.rho, spec)?;
    let q_limit = sim.beam.q_of_theta(10e-3);
    for r_nm in [0.0, 0.6] {
        let d = Displacement::nm(r_nm)?;
        let channel = Channel::Minus;
        let oracle = grid_scatter(sim.probe(1)?, OracleKernel::Channel { channel, image: &image }, d, spec)?;
        let cmp = compare_with_pipeline(&oracle, &sim.expansion(1, d)?, sim.kernel(channel), q_limit)?;
        println!(
            "m = +1, mu = -1, R = {r_nm} nm: relative L2 {:.2e} over {} lattice points",
            cmp.relative_l2, cmp.points
        );
    }
    Ok(())
}
