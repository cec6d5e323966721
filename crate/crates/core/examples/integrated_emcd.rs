//! EMCD of disk-shaped particles with a circular detector, and the
//! collection angle that maximizes the shot-noise SNR.

use vortex_emcd::scattering::{emcd, Simulation, SimulationSetup};

fn main() -> vortex_emcd::Result<()> {
    let sim = Simulation::new(&SimulationSetup::default())?;
    let d_nm = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0];
    let theta: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
    let beta: Vec<f64> = (0..=60).map(|k| 0.1 * k as f64).collect();
    let table = sim.detector_table(&d_nm, &theta, 0.05)?;
    let w = sim.weights;
    println!("d (nm)  EMCD(beta->0)  best beta (mrad)  EMCD(best)");
    for (row, d) in d_nm.iter().enumerate() {
        let (p0, m0) = table.integrated(row, &w, 0.0)?;
        let best = table.optimal_beta(row, &w, &beta)?;
        let (p, m) = table.integrated(row, &w, best * 1e-3)?;
        let pct = |v: Option<f64>| v.map_or(f64::NAN, |x| 100.0 * x);
        println!("{d:>6.1}  {:>12.2}%  {best:>16.1}  {:>9.2}%", pct(emcd(p0, m0)), pct(emcd(p, m)));
    }
    Ok(())
}
