//! Single-zeta Slater-type radial orbitals and the shipped parameter tables.

use crate::error::{Error, Result};
use std::fmt;

const ORBITAL_TABLE: &str = include_str!("../../data/orbitals-v1.txt");
const EDGE_TABLE: &str = include_str!("../../data/edges-v1.txt");

/// Supported table format version.
pub const TABLE_VERSION: u32 = 1;

/// Normalized Slater radial function `R(r) = N r^{n-1} exp(-zeta r)` with
/// `zeta = z_eff / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOrbital {
    pub n: u32,
    pub l: u32,
    pub z_eff: f64,
    pub norm: f64,
}

impl RadialOrbital {
    pub fn slater(n: u32, l: u32, z_eff: f64) -> Result<Self> {
        if n == 0 || l >= n {
            return Err(Error::Domain(format!("invalid quantum numbers n = {n}, l = {l}")));
        }
        if !(z_eff > 0.0) {
            return Err(Error::Domain(format!("effective charge must be positive, got {z_eff}")));
        }
        let zeta = z_eff / n as f64;
        let two_n = 2 * n;
        let fact: f64 = (1..=two_n).map(|k| k as f64).product();
        let norm = (2.0 * zeta).powf(n as f64 + 0.5) / fact.sqrt();
        Ok(Self { n, l, z_eff, norm })
    }

    pub fn zeta(&self) -> f64 {
        self.z_eff / self.n as f64
    }

    pub fn value(&self, r: f64) -> f64 {
        self.norm * r.powi(self.n as i32 - 1) * (-self.zeta() * r).exp()
    }
}

impl fmt::Display for RadialOrbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = ['s', 'p', 'd', 'f'].get(self.l as usize).copied().unwrap_or('?');
        write!(f, "{}{} (Z_eff = {})", self.n, letter, self.z_eff)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalRecord {
    pub element: String,
    pub z: u32,
    pub n: u32,
    pub l: u32,
    pub z_eff: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub element: String,
    pub edge: String,
    pub energy_ev: f64,
    pub source: String,
}

fn parse_orbital_label(label: &str) -> Option<(u32, u32)> {
    let mut chars = label.chars();
    let n = chars.next()?.to_digit(10)?;
    let l = match chars.next()? {
        's' => 0,
        'p' => 1,
        'd' => 2,
        'f' => 3,
        _ => return None,
    };
    chars.next().is_none().then_some((n, l))
}

fn check_version(text: &str, what: &str) -> Result<()> {
    let version = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("# format-version:"))
        .and_then(|v| v.trim().parse::<u32>().ok());
    match version {
        Some(TABLE_VERSION) => Ok(()),
        other => Err(Error::Domain(format!("{what}: unsupported format version {other:?}"))),
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parsed element, orbital and edge tables.
#[derive(Debug, Clone)]
pub struct AtomicTable {
    pub orbitals: Vec<OrbitalRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl AtomicTable {
    /// Tables shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(ORBITAL_TABLE, EDGE_TABLE).expect("shipped atomic tables are valid")
    }

    pub fn parse(orbitals: &str, edges: &str) -> Result<Self> {
        check_version(orbitals, "orbital table")?;
        check_version(edges, "edge table")?;
        let mut orbital_records = Vec::new();
        for (line_no, line) in data_lines(orbitals) {
            let rest: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Domain(format!("orbital table line {line_no}: malformed record `{line}`"));
            if rest.len() < 4 {
                return Err(bad());
            }
            let z = rest[1].parse().map_err(|_| bad())?;
            let (n, l) = parse_orbital_label(rest[2]).ok_or_else(bad)?;
            let z_eff = rest[3].parse().map_err(|_| bad())?;
            let source = rest[4..].join(" ");
            orbital_records.push(OrbitalRecord {
                element: rest[0].to_string(),
                z,
                n,
                l,
                z_eff,
                source,
            });
        }
        let mut edge_records = Vec::new();
        for (line_no, line) in data_lines(edges) {
            let rest: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Domain(format!("edge table line {line_no}: malformed record `{line}`"));
            if rest.len() < 3 {
                return Err(bad());
            }
            edge_records.push(EdgeRecord {
                element: rest[0].to_string(),
                edge: rest[1].to_string(),
                energy_ev: rest[2].parse().map_err(|_| bad())?,
                source: rest[3..].join(" "),
            });
        }
        Ok(Self {
            orbitals: orbital_records,
            edges: edge_records,
        })
    }

    pub fn orbital(&self, element: &str, n: u32, l: u32) -> Result<RadialOrbital> {
        let rec = self
            .orbitals
            .iter()
            .find(|r| r.element.eq_ignore_ascii_case(element) && r.n == n && r.l == l)
            .ok_or_else(|| Error::Domain(format!("no Slater parameters for {element} n = {n}, l = {l}")))?;
        RadialOrbital::slater(n, l, rec.z_eff)
    }

    pub fn edge_energy(&self, element: &str, edge: &str) -> Result<f64> {
        self.edges
            .iter()
            .find(|r| r.element.eq_ignore_ascii_case(element) && r.edge.eq_ignore_ascii_case(edge))
            .map(|r| r.energy_ev)
            .ok_or_else(|| Error::Domain(format!("no {edge} edge energy for {element}")))
    }
}

/// Slater orbital for a supported element and shell (`2p` or `3d` of Fe, Co, Ni).
pub fn slater_orbital(element: &str, n: u32, l: u32) -> Result<RadialOrbital> {
    if !matches!((n, l), (2, 1) | (3, 2)) {
        return Err(Error::Domain(format!(
            "only 2p and 3d orbitals are supported, got n = {n}, l = {l}"
        )));
    }
    AtomicTable::builtin().orbital(element, n, l)
}
