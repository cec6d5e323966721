//! Command implementations behind the `vortex-emcd` binary. Each writes CSV
//! tables, optional PNG renderings and the resolved configuration into the
//! output directory, and returns a short report.

use crate::atomic::{BeamParams, Channel, KernelSpectrum};
use crate::config::{PatternChannel, RunConfig};
use crate::error::{Error, Result};
use crate::oracle::{self, Comparison, KernelImage, OracleKernel};
use crate::probe::{build_probe, probe_grid, Displacement};
use crate::render::{self, Field, Isolines, Palette};
use crate::scattering::{emcd, snr, DetectorImage, EmcdMap, Simulation};
use crate::units::{bohr_to_nm, nm_to_bohr, rad_to_mrad};
use image::Rgb;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Name of the configuration echo written next to every result set.
pub const RESOLVED_CONFIG: &str = "config.resolved.txt";

/// Human-readable findings plus the files written.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Report {
    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

struct Csv {
    out: BufWriter<File>,
}

impl Csv {
    fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out })
    }

    fn row(&mut self, cells: &[Cell]) -> Result<()> {
        let text: Vec<String> = cells.iter().map(Cell::render).collect();
        writeln!(self.out, "{}", text.join(","))?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

enum Cell {
    F(f64),
    Opt(Option<f64>),
    I(i64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:.10e}"),
            Cell::Opt(Some(v)) => format!("{v:.10e}"),
            Cell::Opt(None) => "nan".into(),
            Cell::I(v) => v.to_string(),
        }
    }
}

fn prepare(cfg: &RunConfig, report: &mut Report) -> Result<PathBuf> {
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    let path = dir.join(RESOLVED_CONFIG);
    fs::write(&path, cfg.to_text())?;
    report.files.push(path);
    Ok(dir)
}

fn signed(m: i32) -> String {
    format!("{m:+}")
}

fn require_pair(cfg: &RunConfig) -> Result<()> {
    if cfg.beam.charges.contains(&1) && cfg.beam.charges.contains(&-1) {
        Ok(())
    } else {
        Err(Error::config("beam.m", "dichroic maps need both m = 1 and m = -1"))
    }
}

/// Radial profile, ring radius and a transverse image of each probe.
pub fn cmd_probe(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let dir = prepare(cfg, &mut report)?;
    let grid = Arc::new(probe_grid(cfg.max_displacement() + cfg.edge.rho + 5.0)?);
    let probes = cfg
        .beam
        .charges
        .iter()
        .map(|&m| build_probe(&BeamParams::new(cfg.beam.energy, cfg.beam.alpha, m)?, Arc::clone(&grid)))
        .collect::<Result<Vec<_>>>()?;

    let r_nm: Vec<f64> = (0..=600).map(|k| 0.005 * k as f64).collect();
    let mut header = vec!["r_nm".to_string()];
    header.extend(cfg.beam.charges.iter().map(|&m| format!("intensity_m{}_per_bohr2", signed(m))));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = dir.join("probe_profile.csv");
    let mut csv = Csv::create(&path, &header)?;
    for &r in &r_nm {
        let mut cells = vec![Cell::F(r)];
        cells.extend(probes.iter().map(|p| Cell::F(p.profile(nm_to_bohr(r)).powi(2))));
        csv.row(&cells)?;
    }
    csv.finish()?;
    report.files.push(path);

    for p in &probes {
        let m = p.m();
        report.note(format!(
            "m = {}: ring radius {:.4} nm, power on grid {:.6}",
            signed(m),
            p.ring_radius_nm()?,
            p.enclosed_power()
        ));
        if cfg.output.render {
            let n = 257usize;
            let half = nm_to_bohr(2.5);
            let values: Vec<Option<f64>> = (0..n * n)
                .map(|k| {
                    let (i, j) = (k / n, k % n);
                    let y = -half + 2.0 * half * i as f64 / (n - 1) as f64;
                    let x = -half + 2.0 * half * j as f64 / (n - 1) as f64;
                    Some(p.value_at(x, y).norm_sqr())
                })
                .collect();
            let max = values.iter().flatten().copied().fold(0.0, f64::max);
            let path = dir.join(format!("probe_m{}.png", signed(m)));
            let field = Field {
                rows: n,
                cols: n,
                values: &values,
            };
            render::write_png(&path, &field, n as u32, n as u32, Palette::Sequential { max }, &[])?;
            report.files.push(path);
        }
    }
    Ok(report)
}

fn channel_choice(cfg: &RunConfig) -> (Option<Channel>, String) {
    match cfg.pattern_channel {
        PatternChannel::Single(c) => (Some(c), format!("mu{:+}", c.mu())),
        PatternChannel::Weighted => (None, "weighted".into()),
    }
}

/// Energy-filtered diffraction patterns for every charge and displacement.
pub fn cmd_diffraction(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let dir = prepare(cfg, &mut report)?;
    let sim = Simulation::new(&cfg.simulation_setup())?;
    let (channel, tag) = channel_choice(cfg);
    let theta_max = cfg.geometry.theta_max;
    let pixels = cfg.numerics.pattern_pixels;

    let mut panels: Vec<(i32, f64, DetectorImage)> = Vec::new();
    for &m in &cfg.beam.charges {
        for &r in &cfg.geometry.displacements {
            let img = sim.detector_image(m, Displacement::bohr(r)?, theta_max, pixels, channel)?;
            panels.push((m, r, img));
        }
    }
    let global = panels.iter().map(|(_, _, img)| img.max()).fold(0.0, f64::max);
    for (m, r, img) in &panels {
        let name = format!("diffraction_m{}_R{:.3}nm_{tag}", signed(*m), bohr_to_nm(*r));
        let path = dir.join(format!("{name}.csv"));
        let mut csv = Csv::create(&path, &["theta_x_mrad", "theta_y_mrad", "intensity_au"])?;
        for i in 0..pixels {
            for j in 0..pixels {
                csv.row(&[
                    Cell::F(rad_to_mrad(img.angle(j))),
                    Cell::F(rad_to_mrad(img.angle(i))),
                    Cell::F(img.values[i * pixels + j]),
                ])?;
            }
        }
        csv.finish()?;
        report.files.push(path);
        let peak = img.max();
        let scale = if peak > 0.0 { global / peak } else { f64::INFINITY };
        report.note(format!(
            "m = {}, R = {:.3} nm: peak {:.4e}, display scale x{:.2}",
            signed(*m),
            bohr_to_nm(*r),
            peak,
            scale
        ));
        if cfg.output.render {
            let values: Vec<Option<f64>> = img.values.iter().map(|&v| Some(v)).collect();
            let field = Field {
                rows: pixels,
                cols: pixels,
                values: &values,
            };
            let side = (pixels as u32).max(256);
            let path = dir.join(format!("{name}.png"));
            render::write_png(&path, &field, side, side, Palette::Sequential { max: peak }, &[])?;
            report.files.push(path);
        }
    }
    for &r in &cfg.geometry.displacements {
        let find = |m: i32| panels.iter().find(|(pm, pr, _)| *pm == m && *pr == r).map(|p| &p.2);
        if let (Some(a), Some(b)) = (find(1), find(-1)) {
            report.note(format!(
                "R = {:.3} nm: relative L2 difference between m = +1 and m = -1 patterns {:.4e}",
                bohr_to_nm(r),
                a.relative_difference(b)?
            ));
        }
    }
    Ok(report)
}

fn write_map_csv(path: &Path, map: &EmcdMap, extra: Option<&[f64]>) -> Result<()> {
    let (row_label, col_label) = map.kind.axis_labels();
    let mut header = vec![row_label, col_label, "I_plus_au", "I_minus_au", "emcd"];
    if extra.is_some() {
        header.push("snr_unit_dose");
    }
    let mut csv = Csv::create(path, &header)?;
    for (i, &r) in map.rows.iter().enumerate() {
        for (j, &c) in map.cols.iter().enumerate() {
            let k = i * map.n_cols() + j;
            let mut cells = vec![
                Cell::F(r),
                Cell::F(c),
                Cell::F(map.i_plus[k]),
                Cell::F(map.i_minus[k]),
                Cell::Opt(map.emcd[k]),
            ];
            if let Some(e) = extra {
                cells.push(Cell::F(e[k]));
            }
            csv.row(&cells)?;
        }
    }
    csv.finish()
}

fn render_map(path: &Path, map: &EmcdMap, isolines: &[Isolines]) -> Result<()> {
    let limit = map.max_abs().max(1e-12);
    let field = Field {
        rows: map.n_rows(),
        cols: map.n_cols(),
        values: &map.emcd,
    };
    render::write_png(path, &field, 512, 384, Palette::Diverging { limit }, isolines)
}

/// Theta-resolved EMCD over probe displacement.
pub fn cmd_emcd_map(cfg: &RunConfig) -> Result<Report> {
    require_pair(cfg)?;
    let mut report = Report::default();
    let dir = prepare(cfg, &mut report)?;
    let sim = Simulation::new(&cfg.simulation_setup())?;
    let r_nm = cfg.r_axis_nm();
    let theta = cfg.theta_axis_mrad();
    let map = sim.emcd_map(&r_nm, &theta)?;

    let path = dir.join("emcd_map.csv");
    write_map_csv(&path, &map, None)?;
    report.files.push(path);
    if cfg.output.render {
        let path = dir.join("emcd_map.png");
        let iso = [
            Isolines::multiples(0.2, 2.0, Rgb([0, 0, 0])),
            Isolines {
                levels: vec![-0.04, 0.04],
                color: Rgb([90, 90, 90]),
            },
        ];
        render_map(&path, &map, &iso)?;
        report.files.push(path);
    }

    let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{:+.3}%", 100.0 * x));
    report.note(format!("EMCD at R = 0, theta = 0: {}", fmt(map.get(0, 0))));
    let nearest = |target: f64| {
        (0..r_nm.len())
            .min_by(|&a, &b| (r_nm[a] - target).abs().total_cmp(&(r_nm[b] - target).abs()))
            .unwrap_or(0)
    };
    let i06 = nearest(0.6);
    report.note(format!("EMCD at R = {:.3} nm, theta = 0: {}", r_nm[i06], fmt(map.get(i06, 0))));
    if let Some(j) = sign_change(map.row(0)) {
        report.note(format!(
            "EMCD at R = 0 changes sign between {:.3} and {:.3} mrad",
            theta[j - 1],
            theta[j]
        ));
    }
    report.note(format!("max |EMCD| {:.3}%", 100.0 * map.max_abs()));
    Ok(report)
}

fn sign_change(row: &[Option<f64>]) -> Option<usize> {
    let first = row.first().copied().flatten()?.signum();
    (1..row.len()).find(|&j| row[j].is_some_and(|v| v.signum() != first))
}

/// Particle- and detector-integrated EMCD over diameter and collection angle.
pub fn cmd_emcd_integrated(cfg: &RunConfig) -> Result<Report> {
    require_pair(cfg)?;
    let mut report = Report::default();
    let dir = prepare(cfg, &mut report)?;
    let sim = Simulation::new(&cfg.simulation_setup())?;
    let d_nm = cfg.d_axis_nm();
    let beta = cfg.beta_axis_mrad();
    let theta = cfg.theta_axis_mrad();
    let table = sim.detector_table(&d_nm, &theta, bohr_to_nm(cfg.geometry.cell_max))?;
    let w = sim.weights;
    let map = table.emcd_map(&w, &beta)?;
    let snr_values = map
        .i_plus
        .iter()
        .zip(&map.i_minus)
        .map(|(&p, &m)| snr(p, m, 1.0))
        .collect::<Result<Vec<_>>>()?;

    let path = dir.join("emcd_integrated.csv");
    write_map_csv(&path, &map, Some(&snr_values))?;
    report.files.push(path);

    let path = dir.join("optimal_beta.csv");
    let mut csv = Csv::create(&path, &["d_nm", "beta_opt_mrad", "emcd_at_opt", "emcd_beta0"])?;
    for (row, &d) in d_nm.iter().enumerate() {
        let best = table.optimal_beta(row, &w, &beta)?;
        let (p, m) = table.integrated(row, &w, crate::units::mrad_to_rad(best))?;
        let (p0, m0) = table.integrated(row, &w, 0.0)?;
        csv.row(&[
            Cell::F(d),
            Cell::F(best),
            Cell::Opt(emcd(p, m)),
            Cell::Opt(emcd(p0, m0)),
        ])?;
        report.note(format!(
            "d = {d:.3} nm: optimal beta {best:.2} mrad, EMCD there {}, at beta -> 0 {}",
            emcd(p, m).map_or("undefined".into(), |v| format!("{:+.3}%", 100.0 * v)),
            emcd(p0, m0).map_or("undefined".into(), |v| format!("{:+.3}%", 100.0 * v)),
        ));
    }
    csv.finish()?;
    report.files.push(path);

    if cfg.output.render && d_nm.len() >= 2 {
        let path = dir.join("emcd_integrated.png");
        let iso = [Isolines::multiples(0.02, 2.0, Rgb([0, 0, 0]))];
        render_map(&path, &map, &iso)?;
        report.files.push(path);
    }
    Ok(report)
}

/// Cartesian brute-force patterns against the pipeline for every charge,
/// channel and configured displacement.
pub fn cmd_oracle_dump(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let dir = prepare(cfg, &mut report)?;
    let sim = Simulation::new(&cfg.simulation_setup())?;
    let spec = cfg.numerics.oracle;
    let q_limit = sim.beam.q_of_theta(cfg.geometry.theta_max);
    let widest = cfg.beam.charges.iter().try_fold(0.0f64, |acc, &m| Ok::<_, Error>(acc.max(sim.probe(m)?.ring_radius()?)))?;
    let far = cfg.geometry.displacements.iter().copied().fold(0.0, f64::max);
    spec.validate(cfg.edge.rho, widest + far, sim.beam.aperture_q())?;
    let dipole = KernelSpectrum::new(1, &sim.edge, cfg.edge.rho)?;
    let monopole = KernelSpectrum::new(0, &sim.edge, cfg.edge.rho)?;
    let images = [
        KernelImage::new(&monopole, cfg.edge.rho, spec)?,
        KernelImage::new(&dipole, cfg.edge.rho, spec)?,
    ];

    let summary_path = dir.join("oracle_comparison.csv");
    let mut summary = Csv::create(&summary_path, &["m", "mu", "R_nm", "relative_l2", "points"])?;
    let dq_mrad = rad_to_mrad(spec.dq() / sim.beam.q_of_theta(1.0));
    for &m in &cfg.beam.charges {
        let probe = sim.probe(m)?;
        for &r in &cfg.geometry.displacements {
            let d = Displacement::bohr(r)?;
            let expansion = sim.expansion(m, d)?;
            for &c in &Channel::ALL {
                let image = &images[c.mu().unsigned_abs() as usize];
                let pattern = oracle::grid_scatter(probe, OracleKernel::Channel { channel: c, image }, d, spec)?;
                let samples = oracle::lattice_samples(&pattern, &expansion, sim.kernel(c), q_limit)?;
                let cmp = Comparison::from_samples(&samples);
                summary.row(&[
                    Cell::I(m.into()),
                    Cell::I(c.mu().into()),
                    Cell::F(bohr_to_nm(r)),
                    Cell::F(cmp.relative_l2),
                    Cell::I(cmp.points as i64),
                ])?;
                report.note(format!(
                    "m = {}, mu = {:+}, R = {:.3} nm: relative L2 {:.3e} over {} points",
                    signed(m),
                    c.mu(),
                    bohr_to_nm(r),
                    cmp.relative_l2,
                    cmp.points
                ));
                let path = dir.join(format!(
                    "oracle_m{}_mu{:+}_R{:.3}nm.csv",
                    signed(m),
                    c.mu(),
                    bohr_to_nm(r)
                ));
                let mut csv = Csv::create(&path, &["theta_x_mrad", "theta_y_mrad", "I_oracle_au", "I_pipeline_au"])?;
                for s in &samples {
                    csv.row(&[
                        Cell::F(s.kx as f64 * dq_mrad),
                        Cell::F(s.ky as f64 * dq_mrad),
                        Cell::F(s.oracle),
                        Cell::F(s.pipeline),
                    ])?;
                }
                csv.finish()?;
                report.files.push(path);
            }
        }
    }
    summary.finish()?;
    report.files.push(summary_path);
    Ok(report)
}
