//! Angle-resolved EMCD as the probe moves off the atom.

use vortex_emcd::scattering::{Simulation, SimulationSetup};

fn main() -> vortex_emcd::Result<()> {
    let sim = Simulation::new(&SimulationSetup::default())?;
    let r_nm: Vec<f64> = (0..=10).map(|k| 0.2 * k as f64).collect();
    let theta: Vec<f64> = (0..=10).map(|k| k as f64).collect();
    let map = sim.emcd_map(&r_nm, &theta)?;
    print!("R (nm) \\ theta (mrad)");
    for t in &theta {
        print!("{t:>7.1}");
    }
    println!();
    for (i, r) in r_nm.iter().enumerate() {
        print!("{r:>21.1}");
        for v in map.row(i) {
            match v {
                Some(x) => print!("{:>+7.1}", 100.0 * x),
                None => print!("{:>7}", "-"),
            }
        }
        println!();
    }
    println!("(values in percent)");
    Ok(())
}
