//! Dipole channel weights `C^mu` for spin-polarized 2p -> 3d transitions.
//!
//! For an initial `2p_j` level and 3d holes of a single spin projection
//! `sigma`, channel `mu` collects
//!
//! ```text
//! sum_{m_l} [ sum_{m_j} |<1 m_l; 1/2 sigma | j m_j>|^2 ] * |<1 m_l; 1 mu | 2 m_l+mu>|^2
//! ```
//!
//! i.e. the spin-orbit content of the core level times the angular part of
//! the dipole coupling. Weights are normalized to sum to one.

use crate::error::{Error, Result};
use crate::special_math::clebsch_gordan_doubled;

use super::kernel::Channel;

/// Spin-orbit branch of the L edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `2p_{3/2}`
    L3,
    /// `2p_{1/2}`
    L2,
}

impl Edge {
    /// Twice the total angular momentum of the core level.
    pub fn two_j(self) -> i32 {
        match self {
            Edge::L3 => 3,
            Edge::L2 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Edge::L3 => "L3",
            Edge::L2 => "L2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L3" => Some(Edge::L3),
            "L2" => Some(Edge::L2),
            _ => None,
        }
    }
}

/// Spin projection of the empty 3d states relative to the beam axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    /// Holes with spin projection +1/2.
    Up,
    /// Holes with spin projection -1/2.
    Down,
    /// Equal hole occupation in both spins.
    Unpolarized,
}

impl Polarization {
    pub fn flipped(self) -> Self {
        match self {
            Polarization::Up => Polarization::Down,
            Polarization::Down => Polarization::Up,
            Polarization::Unpolarized => Polarization::Unpolarized,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Polarization::Up => "up",
            Polarization::Down => "down",
            Polarization::Unpolarized => "unpolarized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" => Some(Polarization::Up),
            "down" => Some(Polarization::Down),
            "unpolarized" | "none" => Some(Polarization::Unpolarized),
            _ => None,
        }
    }
}

/// Normalized non-negative weights for the channels `mu = -1, 0, +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWeights {
    pub minus: f64,
    pub zero: f64,
    pub plus: f64,
}

impl ChannelWeights {
    /// Custom weights; rescaled to unit sum.
    pub fn new(minus: f64, zero: f64, plus: f64) -> Result<Self> {
        let all = [minus, zero, plus];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain("channel weights must be finite and non-negative".into()));
        }
        let sum: f64 = all.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Domain("channel weights must not all vanish".into()));
        }
        Ok(Self {
            minus: minus / sum,
            zero: zero / sum,
            plus: plus / sum,
        })
    }

    pub fn get(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Minus => self.minus,
            Channel::Zero => self.zero,
            Channel::Plus => self.plus,
        }
    }

    /// Weights for the reversed magnetization: `C^{+1} <-> C^{-1}`.
    pub fn swapped(&self) -> Self {
        Self {
            minus: self.plus,
            zero: self.zero,
            plus: self.minus,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.minus == self.plus
    }
}

fn spin_resolved(edge: Edge, two_sigma: i32) -> Result<[f64; 3]> {
    let two_j = edge.two_j();
    let mut out = [0.0; 3];
    for (slot, mu) in [-1, 0, 1].into_iter().enumerate() {
        let mut acc = 0.0;
        for m_l in -1..=1 {
            let mut core = 0.0;
            for two_mj in (-two_j..=two_j).step_by(2) {
                let c = clebsch_gordan_doubled(2, 2 * m_l, 1, two_sigma, two_j, two_mj)?;
                core += c * c;
            }
            let m_final = m_l + mu;
            if m_final.abs() > 2 {
                continue;
            }
            let dipole = clebsch_gordan_doubled(2, 2 * m_l, 2, 2 * mu, 4, 2 * m_final)?;
            acc += core * dipole * dipole;
        }
        out[slot] = acc;
    }
    Ok(out)
}

/// Clebsch-Gordan derived weights for an edge and hole polarization.
pub fn channel_weights(edge: Edge, polarization: Polarization) -> ChannelWeights {
    let raw = match polarization {
        Polarization::Up => spin_resolved(edge, 1),
        Polarization::Down => spin_resolved(edge, -1),
        Polarization::Unpolarized => {
            let up = spin_resolved(edge, 1).expect("valid quantum numbers");
            let down = spin_resolved(edge, -1).expect("valid quantum numbers");
            Ok([up[0] + down[0], up[1] + down[1], up[2] + down[2]])
        }
    }
    .expect("valid quantum numbers");
    ChannelWeights::new(raw[0], raw[1], raw[2]).expect("positive weights")
}
