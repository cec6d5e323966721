//! Dipole channel weights of the 2p -> 3d edges for each polarization.

use vortex_emcd::atomic::{channel_weights, Edge, Polarization};

fn main() {
    println!("edge  polarization   C(-1)     C(0)      C(+1)");
    for edge in [Edge::L3, Edge::L2] {
        for pol in [Polarization::Up, Polarization::Down, Polarization::Unpolarized] {
            let w = channel_weights(edge, pol);
            println!(
                "{:<5} {:<13} {:.6}  {:.6}  {:.6}",
                edge.label(),
                pol.label(),
                w.minus,
                w.zero,
                w.plus
            );
        }
    }
}
