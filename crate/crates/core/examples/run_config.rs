//! Parses a run configuration and prints the resolved form, defaults included.
//!
//! cargo run --example run_config -- [path]

use vortex_emcd::config::RunConfig;

const SAMPLE: &str = "\
[beam]
energy = 300 keV
alpha = 1.5 mrad

[edge]
element = Co
polarization = down

[geometry]
displacements = 0, 4, 8 angstrom
";

fn main() {
    let parsed = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path.as_ref()),
        None => RunConfig::parse(SAMPLE),
    };
    match parsed {
        Ok(cfg) => print!("{}", cfg.to_text()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
