//! Sectioned `key = value` run configuration with mandatory unit suffixes.
//!
//! ```text
//! [beam]
//! energy = 200 keV
//! alpha = 1.2 mrad
//! m = 1, -1
//!
//! [geometry]
//! displacements = 0, 0.3, 1, 2 nm
//! ```
//!
//! Lists may carry one trailing unit shared by all entries. Unknown
//! sections or keys and physical values without a unit are rejected with
//! an error naming the key.

use crate::atomic::{ChannelWeights, Edge, Polarization};
use crate::error::{Error, Result};
use crate::oracle::GridSpec;
use crate::scattering::SimulationSetup;
use crate::units::{bohr_to_nm, nm_to_bohr, rad_to_mrad, BOHR_NM};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    Angle,
    Energy,
}

impl Dimension {
    fn describe(self) -> &'static str {
        match self {
            Dimension::Length => "a length (nm, pm, angstrom, bohr)",
            Dimension::Angle => "an angle (mrad, urad, rad, deg)",
            Dimension::Energy => "an energy (eV, keV, MeV)",
        }
    }

    /// Factor to the internal unit: bohr, rad or eV.
    fn factor(self, unit: &str) -> Option<f64> {
        let u = unit.trim();
        match self {
            Dimension::Length => match u {
                "nm" => Some(1.0 / BOHR_NM),
                "pm" => Some(1e-3 / BOHR_NM),
                "angstrom" | "A" | "Å" => Some(0.1 / BOHR_NM),
                "bohr" | "a0" | "at.u." => Some(1.0),
                _ => None,
            },
            Dimension::Angle => match u {
                "mrad" => Some(1e-3),
                "urad" | "µrad" => Some(1e-6),
                "rad" => Some(1.0),
                "deg" => Some(std::f64::consts::PI / 180.0),
                _ => None,
            },
            Dimension::Energy => match u {
                "eV" => Some(1.0),
                "keV" => Some(1e3),
                "MeV" => Some(1e6),
                _ => None,
            },
        }
    }
}

fn split_number(token: &str) -> (&str, &str) {
    let t = token.trim();
    let end = t
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-' || ((c == 'e' || c == 'E') && i > 0))
        })
        .map_or(t.len(), |(i, _)| i);
    // an exponent marker must be followed by a digit or sign to count
    let (mut num, mut unit) = t.split_at(end);
    if num.ends_with(['e', 'E']) {
        num = &num[..num.len() - 1];
        unit = &t[num.len()..];
    }
    (num.trim(), unit.trim())
}

fn parse_quantity_list(key: &str, raw: &str, dim: Dimension) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty list entry"));
    }
    let split: Vec<(&str, &str)> = parts.iter().map(|p| split_number(p)).collect();
    let shared = split.last().map(|(_, u)| *u).unwrap_or("");
    split
        .iter()
        .map(|&(num, unit)| {
            let unit = if unit.is_empty() { shared } else { unit };
            if unit.is_empty() {
                return Err(Error::config(key, format!("missing unit: expected {}", dim.describe())));
            }
            let factor = dim
                .factor(unit)
                .ok_or_else(|| Error::config(key, format!("unknown unit `{unit}`: expected {}", dim.describe())))?;
            let value: f64 = num
                .parse()
                .map_err(|_| Error::config(key, format!("`{num}` is not a number")))?;
            if !value.is_finite() {
                return Err(Error::config(key, "value must be finite"));
            }
            Ok(value * factor)
        })
        .collect()
}

fn parse_quantity(key: &str, raw: &str, dim: Dimension) -> Result<f64> {
    let list = parse_quantity_list(key, raw, dim)?;
    match list.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::config(key, "expected a single value")),
    }
}

fn parse_plain<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{}`", raw.trim())))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool> {
    match raw.trim() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(Error::config(key, format!("expected true or false, got `{other}`"))),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(key, "must be positive"))
    }
}

/// Which channel(s) the diffraction gallery shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternChannel {
    Single(crate::atomic::Channel),
    /// Weighted incoherent sum over all channels.
    Weighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    /// eV
    pub energy: f64,
    /// rad
    pub alpha: f64,
    pub charges: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeConfig {
    pub element: String,
    pub edge: Edge,
    /// eV; tabulated edge energy when `None`.
    pub delta_e: Option<f64>,
    pub polarization: Polarization,
    pub weights: Option<ChannelWeights>,
    /// bohr
    pub rho: f64,
}

/// Sweep axes. Lengths in bohr, angles in rad.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub displacements: Vec<f64>,
    pub r_max: f64,
    pub r_step: f64,
    pub theta_max: f64,
    pub theta_points: usize,
    pub beta_max: f64,
    pub beta_step: f64,
    pub d_max: f64,
    pub d_step: f64,
    /// Widest radial cell of the particle integral.
    pub cell_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericsConfig {
    pub l_window: u32,
    /// bohr
    pub radial_spacing: f64,
    /// Pixels per side of Cartesian diffraction patterns (odd).
    pub pattern_pixels: usize,
    pub oracle: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub render: bool,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub beam: BeamConfig,
    pub edge: EdgeConfig,
    pub pattern_channel: PatternChannel,
    pub geometry: GeometryConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            beam: BeamConfig {
                energy: 200e3,
                alpha: 1.2e-3,
                charges: vec![1, -1],
            },
            edge: EdgeConfig {
                element: "Fe".into(),
                edge: Edge::L3,
                delta_e: None,
                polarization: Polarization::Up,
                weights: None,
                rho: crate::atomic::DEFAULT_RHO,
            },
            pattern_channel: PatternChannel::Single(crate::atomic::Channel::Minus),
            geometry: GeometryConfig {
                displacements: [0.0, 0.3, 1.0, 2.0].iter().map(|&x| nm_to_bohr(x)).collect(),
                r_max: nm_to_bohr(2.5),
                r_step: nm_to_bohr(0.05),
                theta_max: 10e-3,
                theta_points: 256,
                beta_max: 10e-3,
                beta_step: 0.1e-3,
                d_max: nm_to_bohr(5.0),
                d_step: nm_to_bohr(0.25),
                cell_max: nm_to_bohr(0.05),
            },
            numerics: NumericsConfig {
                l_window: crate::probe::DEFAULT_HALF_WIDTH,
                radial_spacing: 0.02,
                pattern_pixels: 129,
                oracle: GridSpec::default(),
            },
            output: OutputConfig {
                dir: PathBuf::from("out"),
                render: true,
            },
        }
    }
}

fn axis(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step * (1.0 + 1e-12)).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if max - v[n] > 1e-9 * step {
        v.push(max);
    }
    v
}

fn fmt_list(values: &[f64], f: impl Fn(f64) -> f64, unit: &str) -> String {
    let body: Vec<String> = values.iter().map(|&v| format!("{}", round_sig(f(v)))).collect();
    format!("{} {unit}", body.join(", "))
}

/// Strips representation noise from unit conversions (12 significant digits).
fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let digits = 12 - v.abs().log10().ceil() as i32;
    let scale = 10f64.powi(digits);
    (v * scale).round() / scale
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for (no, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(
                    section.as_str(),
                    "beam" | "edge" | "diffraction" | "geometry" | "numerics" | "output"
                ) {
                    return Err(Error::config(format!("[{section}]"), "unknown section"));
                }
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", no + 1), "expected `key = value`"))?;
            let key = format!("{section}.{}", k.trim());
            if section.is_empty() {
                return Err(Error::config(k.trim(), "key outside of a section"));
            }
            if let Some(prev) = seen.insert(key.clone(), no + 1) {
                return Err(Error::config(&key, format!("duplicate key (first set on line {prev})")));
            }
            cfg.apply(&key, v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, v: &str) -> Result<()> {
        use Dimension::*;
        match key {
            "beam.energy" => self.beam.energy = positive(key, parse_quantity(key, v, Energy)?)?,
            "beam.alpha" => self.beam.alpha = positive(key, parse_quantity(key, v, Angle)?)?,
            "beam.m" => {
                self.beam.charges = v
                    .split(',')
                    .map(|s| parse_plain::<i32>(key, s))
                    .collect::<Result<_>>()?
            }
            "edge.element" => self.edge.element = v.to_string(),
            "edge.edge" => {
                self.edge.edge = Edge::parse(v).ok_or_else(|| Error::config(key, "expected L3 or L2"))?
            }
            "edge.delta_e" => self.edge.delta_e = Some(positive(key, parse_quantity(key, v, Energy)?)?),
            "edge.polarization" => {
                self.edge.polarization = Polarization::parse(v)
                    .ok_or_else(|| Error::config(key, "expected up, down or unpolarized"))?
            }
            "edge.weights" => {
                let w: Vec<f64> = v.split(',').map(|s| parse_plain(key, s)).collect::<Result<_>>()?;
                if w.len() != 3 {
                    return Err(Error::config(key, "expected three weights for mu = -1, 0, +1"));
                }
                self.edge.weights =
                    Some(ChannelWeights::new(w[0], w[1], w[2]).map_err(|e| Error::config(key, e.to_string()))?);
            }
            "edge.rho" => self.edge.rho = positive(key, parse_quantity(key, v, Length)?)?,
            "diffraction.channel" => {
                self.pattern_channel = match v {
                    "weighted" | "all" => PatternChannel::Weighted,
                    other => {
                        let mu: i32 = parse_plain(key, other)?;
                        PatternChannel::Single(
                            crate::atomic::Channel::from_mu(mu).map_err(|e| Error::config(key, e.to_string()))?,
                        )
                    }
                }
            }
            "geometry.displacements" => self.geometry.displacements = parse_quantity_list(key, v, Length)?,
            "geometry.r_max" => self.geometry.r_max = parse_quantity(key, v, Length)?,
            "geometry.r_step" => self.geometry.r_step = positive(key, parse_quantity(key, v, Length)?)?,
            "geometry.theta_max" => self.geometry.theta_max = positive(key, parse_quantity(key, v, Angle)?)?,
            "geometry.theta_points" => self.geometry.theta_points = parse_plain(key, v)?,
            "geometry.beta_max" => self.geometry.beta_max = positive(key, parse_quantity(key, v, Angle)?)?,
            "geometry.beta_step" => self.geometry.beta_step = positive(key, parse_quantity(key, v, Angle)?)?,
            "geometry.d_max" => self.geometry.d_max = parse_quantity(key, v, Length)?,
            "geometry.d_step" => self.geometry.d_step = positive(key, parse_quantity(key, v, Length)?)?,
            "geometry.cell_max" => self.geometry.cell_max = positive(key, parse_quantity(key, v, Length)?)?,
            "numerics.l_window" => self.numerics.l_window = parse_plain(key, v)?,
            "numerics.radial_spacing" => {
                self.numerics.radial_spacing = positive(key, parse_quantity(key, v, Length)?)?
            }
            "numerics.pattern_pixels" => self.numerics.pattern_pixels = parse_plain(key, v)?,
            "numerics.oracle_n" => self.numerics.oracle.n = parse_plain(key, v)?,
            "numerics.oracle_extent" => {
                self.numerics.oracle.extent = positive(key, parse_quantity(key, v, Length)?)?
            }
            "numerics.oracle_edge_subdivisions" => self.numerics.oracle.edge_subdivisions = parse_plain(key, v)?,
            "numerics.oracle_core_subdivisions" => self.numerics.oracle.core_subdivisions = parse_plain(key, v)?,
            "numerics.oracle_core_radius" => {
                self.numerics.oracle.core_radius = parse_quantity(key, v, Length)?
            }
            "output.dir" => self.output.dir = PathBuf::from(v),
            "output.render" => self.output.render = parse_bool(key, v)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.beam.charges.is_empty() {
            return Err(Error::config("beam.m", "at least one topological charge is required"));
        }
        if self.beam.charges.iter().any(|m| m.unsigned_abs() > 8) {
            return Err(Error::config("beam.m", "topological charges beyond |m| = 8 are not supported"));
        }
        if self.edge.delta_e.is_some_and(|de| de >= self.beam.energy) {
            return Err(Error::config("edge.delta_e", "energy loss must be below the beam energy"));
        }
        let g = &self.geometry;
        if g.displacements.iter().any(|&r| r < 0.0) {
            return Err(Error::config("geometry.displacements", "displacements must be >= 0"));
        }
        if !(g.r_max >= 0.0) {
            return Err(Error::config("geometry.r_max", "must be >= 0"));
        }
        if !(g.d_max >= 0.0) {
            return Err(Error::config("geometry.d_max", "must be >= 0"));
        }
        if g.theta_points < 2 {
            return Err(Error::config("geometry.theta_points", "need at least two angles"));
        }
        if g.beta_max > g.theta_max * (1.0 + 1e-12) {
            return Err(Error::config("geometry.beta_max", "must not exceed geometry.theta_max"));
        }
        if self.numerics.l_window == 0 || self.numerics.l_window > crate::probe::MAX_HALF_WIDTH {
            return Err(Error::config(
                "numerics.l_window",
                format!("must lie in 1..={}", crate::probe::MAX_HALF_WIDTH),
            ));
        }
        let px = self.numerics.pattern_pixels;
        if px < 9 || px.is_multiple_of(2) || px > 1025 {
            return Err(Error::config("numerics.pattern_pixels", "must be odd and within 9..=1025"));
        }
        let o = &self.numerics.oracle;
        if !o.n.is_power_of_two() || o.n < 16 {
            return Err(Error::config("numerics.oracle_n", "must be a power of two >= 16"));
        }
        if o.edge_subdivisions == 0 || o.core_subdivisions == 0 {
            return Err(Error::config("numerics.oracle_edge_subdivisions", "sub-sample counts must be >= 1"));
        }
        Ok(())
    }

    /// Largest displacement any command may need, bohr.
    pub fn max_displacement(&self) -> f64 {
        let g = &self.geometry;
        g.displacements
            .iter()
            .copied()
            .fold(g.r_max.max(g.d_max / 2.0), f64::max)
    }

    pub fn simulation_setup(&self) -> SimulationSetup {
        SimulationSetup {
            energy: self.beam.energy,
            alpha: self.beam.alpha,
            charges: self.beam.charges.clone(),
            element: self.edge.element.clone(),
            edge: self.edge.edge,
            delta_e: self.edge.delta_e,
            polarization: self.edge.polarization,
            weights: self.edge.weights,
            rho: self.edge.rho,
            radial_spacing: self.numerics.radial_spacing,
            half_width: self.numerics.l_window,
            max_displacement: self.max_displacement(),
        }
    }

    /// Displacement axis of the EMCD map, nm.
    pub fn r_axis_nm(&self) -> Vec<f64> {
        axis(self.geometry.r_max, self.geometry.r_step)
            .into_iter()
            .map(bohr_to_nm)
            .collect()
    }

    /// Scattering-angle axis, mrad, from 0 to `theta_max`.
    pub fn theta_axis_mrad(&self) -> Vec<f64> {
        let g = &self.geometry;
        let n = g.theta_points - 1;
        (0..=n).map(|k| rad_to_mrad(g.theta_max) * k as f64 / n as f64).collect()
    }

    pub fn beta_axis_mrad(&self) -> Vec<f64> {
        axis(self.geometry.beta_max, self.geometry.beta_step)
            .into_iter()
            .map(rad_to_mrad)
            .collect()
    }

    pub fn d_axis_nm(&self) -> Vec<f64> {
        if self.geometry.d_max == 0.0 {
            return vec![0.0];
        }
        axis(self.geometry.d_max, self.geometry.d_step)
            .into_iter()
            .map(bohr_to_nm)
            .collect()
    }

    /// Resolved configuration in the input format, defaults expanded.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let b = &self.beam;
        let e = &self.edge;
        let g = &self.geometry;
        let n = &self.numerics;
        let nm = |v: f64| bohr_to_nm(v);
        let mrad = |v: f64| rad_to_mrad(v);
        let id = |v: f64| v;
        let _ = writeln!(s, "# resolved vortex-emcd configuration");
        let _ = writeln!(s, "[beam]");
        let _ = writeln!(s, "energy = {} eV", round_sig(b.energy));
        let _ = writeln!(s, "alpha = {} mrad", round_sig(mrad(b.alpha)));
        let charges: Vec<String> = b.charges.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(s, "m = {}", charges.join(", "));
        let _ = writeln!(s, "\n[edge]");
        let _ = writeln!(s, "element = {}", e.element);
        let _ = writeln!(s, "edge = {}", e.edge.label());
        let delta_e = match e.delta_e {
            Some(v) => v,
            None => crate::atomic::AtomicTable::builtin()
                .edge_energy(&e.element, e.edge.label())
                .unwrap_or(f64::NAN),
        };
        let _ = writeln!(s, "delta_e = {} eV", round_sig(delta_e));
        let _ = writeln!(s, "polarization = {}", e.polarization.label());
        let w = e
            .weights
            .unwrap_or_else(|| crate::atomic::channel_weights(e.edge, e.polarization));
        let _ = writeln!(s, "weights = {}, {}, {}", round_sig(w.minus), round_sig(w.zero), round_sig(w.plus));
        let _ = writeln!(s, "rho = {} bohr", round_sig(e.rho));
        let _ = writeln!(s, "\n[diffraction]");
        let channel = match self.pattern_channel {
            PatternChannel::Single(c) => c.mu().to_string(),
            PatternChannel::Weighted => "weighted".into(),
        };
        let _ = writeln!(s, "channel = {channel}");
        let _ = writeln!(s, "\n[geometry]");
        let _ = writeln!(s, "displacements = {}", fmt_list(&g.displacements, nm, "nm"));
        let _ = writeln!(s, "r_max = {}", fmt_list(&[g.r_max], nm, "nm"));
        let _ = writeln!(s, "r_step = {}", fmt_list(&[g.r_step], nm, "nm"));
        let _ = writeln!(s, "theta_max = {}", fmt_list(&[g.theta_max], mrad, "mrad"));
        let _ = writeln!(s, "theta_points = {}", g.theta_points);
        let _ = writeln!(s, "beta_max = {}", fmt_list(&[g.beta_max], mrad, "mrad"));
        let _ = writeln!(s, "beta_step = {}", fmt_list(&[g.beta_step], mrad, "mrad"));
        let _ = writeln!(s, "d_max = {}", fmt_list(&[g.d_max], nm, "nm"));
        let _ = writeln!(s, "d_step = {}", fmt_list(&[g.d_step], nm, "nm"));
        let _ = writeln!(s, "cell_max = {}", fmt_list(&[g.cell_max], nm, "nm"));
        let _ = writeln!(s, "\n[numerics]");
        let _ = writeln!(s, "l_window = {}", n.l_window);
        let _ = writeln!(s, "radial_spacing = {}", fmt_list(&[n.radial_spacing], id, "bohr"));
        let _ = writeln!(s, "pattern_pixels = {}", n.pattern_pixels);
        let _ = writeln!(s, "oracle_n = {}", n.oracle.n);
        let _ = writeln!(s, "oracle_extent = {}", fmt_list(&[n.oracle.extent], nm, "nm"));
        let _ = writeln!(s, "oracle_edge_subdivisions = {}", n.oracle.edge_subdivisions);
        let _ = writeln!(s, "oracle_core_subdivisions = {}", n.oracle.core_subdivisions);
        let _ = writeln!(s, "oracle_core_radius = {}", fmt_list(&[n.oracle.core_radius], id, "bohr"));
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output.dir.display());
        let _ = writeln!(s, "render = {}", self.output.render);
        s
    }
}
