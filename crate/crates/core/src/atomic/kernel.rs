//! Transition kernels `f_mu(r)` for the dipole channels `mu = -1, 0, +1`.
//!
//! ```text
//! f_mu(r) = i^mu / (2 pi) * q_E^{1-|mu|} * int_0^inf q^{1+|mu|} J_|mu|(q r) <j1(Q)> / Q^3 dq,
//! Q^2 = q^2 + q_E^2
//! ```
//!
//! The `q` integral is truncated where the integrand envelope falls below
//! [`Q_TAIL`] of its peak and evaluated with composite Gauss-Legendre panels
//! narrow enough to resolve the Bessel oscillation at the largest radius.

use super::matrix_element::radial_matrix_element;
use super::EdgeParams;
use crate::error::{Error, Result};
use crate::special_math::quadrature::gauss_legendre;
use crate::special_math::{bessel_j_orders, RadialGrid, SampledRadialFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// Relative envelope level at which the momentum integral is truncated.
pub const Q_TAIL: f64 = 1e-6;
const Q_SCAN_STEP: f64 = 0.25;
const Q_LIMIT: f64 = 2000.0;
const Q_PANEL_ORDER: usize = 12;

/// Dipole channel: change of the atomic magnetic quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Minus,
    Zero,
    Plus,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Minus, Channel::Zero, Channel::Plus];

    pub fn mu(self) -> i32 {
        match self {
            Channel::Minus => -1,
            Channel::Zero => 0,
            Channel::Plus => 1,
        }
    }

    pub fn from_mu(mu: i32) -> Result<Self> {
        match mu {
            -1 => Ok(Channel::Minus),
            0 => Ok(Channel::Zero),
            1 => Ok(Channel::Plus),
            _ => Err(Error::Domain(format!("dipole channel must be -1, 0 or +1, got {mu}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Channel::Minus => Channel::Plus,
            Channel::Zero => Channel::Zero,
            Channel::Plus => Channel::Minus,
        }
    }

    /// `i^mu`.
    pub fn phase(self) -> Complex64 {
        match self {
            Channel::Minus => Complex64::new(0.0, -1.0),
            Channel::Zero => Complex64::new(1.0, 0.0),
            Channel::Plus => Complex64::new(0.0, 1.0),
        }
    }
}

/// Momentum-space quadrature of the kernel integrand, shared by all
/// channels with the same `|mu|`.
#[derive(Debug, Clone)]
pub struct KernelSpectrum {
    abs_mu: u32,
    q_e: f64,
    q_max: f64,
    nodes: Vec<f64>,
    /// `w_k q_k^{1+|mu|} <j1(Q_k)> / Q_k^3`
    weighted: Vec<f64>,
}

impl KernelSpectrum {
    /// Tabulates the integrand for `|mu|` on `[0, q_max]`, with panels
    /// narrow enough for radii up to `r_max`.
    pub fn new(abs_mu: u32, edge: &EdgeParams, r_max: f64) -> Result<Self> {
        let q_e = edge.q_e;
        let envelope = |q: f64| -> Result<f64> {
            let big_q = (q * q + q_e * q_e).sqrt();
            let me = radial_matrix_element(big_q, &edge.initial, &edge.final_)?;
            Ok(q.powi(1 + abs_mu as i32) * me.abs() / big_q.powi(3))
        };
        let q_max = truncation_point(envelope)?;
        let panel = Q_SCAN_STEP.min(2.0 / r_max.max(1e-12));
        let panels = (q_max / panel).ceil() as usize;
        let breaks: Vec<f64> = (0..=panels).map(|i| q_max * i as f64 / panels as f64).collect();
        let (x, w) = gauss_legendre(Q_PANEL_ORDER);
        let mut nodes = Vec::with_capacity(panels * Q_PANEL_ORDER);
        let mut qw = Vec::with_capacity(nodes.capacity());
        for pair in breaks.windows(2) {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[1] + pair[0]);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                qw.push(wi * half);
            }
        }
        let weighted = nodes
            .par_iter()
            .zip(qw.par_iter())
            .map(|(&q, &w)| {
                let big_q = (q * q + q_e * q_e).sqrt();
                let me = radial_matrix_element(big_q, &edge.initial, &edge.final_)?;
                Ok(w * q.powi(1 + abs_mu as i32) * me / big_q.powi(3))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            abs_mu,
            q_e,
            q_max,
            nodes,
            weighted,
        })
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn abs_mu(&self) -> u32 {
        self.abs_mu
    }

    /// The real radial integral `int q^{1+|mu|} J_|mu|(q r) <j1>/Q^3 dq`.
    pub fn radial_integral(&self, r: f64) -> f64 {
        let mut table = [0.0; 2];
        let n = self.abs_mu as usize;
        self.nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&q, &w)| {
                bessel_j_orders(q * r, &mut table[..=n]);
                w * table[n]
            })
            .sum()
    }

    /// Full kernel value including the prefactor `i^mu q_E^{1-|mu|} / 2 pi`.
    pub fn value(&self, channel: Channel, r: f64) -> Complex64 {
        debug_assert_eq!(channel.mu().unsigned_abs(), self.abs_mu);
        let pref = self.q_e.powi(1 - self.abs_mu as i32) / (2.0 * PI);
        channel.phase() * (pref * self.radial_integral(r))
    }
}

/// Scans outward until the envelope over the last unit interval stays
/// below `Q_TAIL` of the running peak.
fn truncation_point<F: Fn(f64) -> Result<f64>>(envelope: F) -> Result<f64> {
    let window = (1.0 / Q_SCAN_STEP).round() as usize * 4;
    let mut peak = 0.0f64;
    let mut recent = std::collections::VecDeque::with_capacity(window);
    let mut q = 0.0;
    while q < Q_LIMIT {
        q += Q_SCAN_STEP;
        let v = envelope(q)?;
        peak = peak.max(v);
        if recent.len() == window {
            recent.pop_front();
        }
        recent.push_back(v);
        let recent_max = recent.iter().copied().fold(0.0, f64::max);
        if recent.len() == window && peak > 0.0 && recent_max < Q_TAIL * peak {
            return Ok(q);
        }
    }
    Err(Error::NonConvergence(format!(
        "kernel momentum integrand has not decayed to {Q_TAIL:e} of its peak by q = {Q_LIMIT}"
    )))
}

/// `f_mu(r)` sampled on a radial grid spanning the interaction disk.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    pub channel: Channel,
    pub values: SampledRadialFunction,
    /// Momentum truncation of the defining integral.
    pub q_max: f64,
    /// `|f_mu(rho)| / max |f_mu|` at the outer edge of the grid.
    pub edge_ratio: f64,
}

impl TransitionKernel {
    pub fn mu(&self) -> i32 {
        self.channel.mu()
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.values.grid()
    }

    /// Interpolated value at radius `r` (zero beyond the grid).
    pub fn eval(&self, r: f64) -> Complex64 {
        self.values.eval(r)
    }
}

/// Kernel for one channel on `grid`. The grid should end at the
/// interaction radius `rho`.
pub fn transition_kernel(channel: Channel, edge: &EdgeParams, grid: Arc<RadialGrid>) -> Result<TransitionKernel> {
    let spectrum = KernelSpectrum::new(channel.mu().unsigned_abs(), edge, grid.r_max())?;
    kernel_from_spectrum(channel, &spectrum, grid)
}

/// Kernel for one channel from a precomputed spectrum (channels `+1` and
/// `-1` share one).
pub fn kernel_from_spectrum(channel: Channel, spectrum: &KernelSpectrum, grid: Arc<RadialGrid>) -> Result<TransitionKernel> {
    if channel.mu().unsigned_abs() != spectrum.abs_mu {
        return Err(Error::Domain("kernel spectrum computed for a different |mu|".into()));
    }
    let values: Vec<Complex64> = grid.nodes().par_iter().map(|&r| spectrum.value(channel, r)).collect();
    let values = SampledRadialFunction::new(Arc::clone(&grid), values)?;
    let peak = values.max_abs();
    let edge_ratio = spectrum.value(channel, grid.r_max()).norm() / peak;
    Ok(TransitionKernel {
        channel,
        values,
        q_max: spectrum.q_max,
        edge_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::{BeamParams, Edge, EdgeParams};
    use crate::special_math::bessel_j;
    use crate::special_math::grid::DEFAULT_PANEL_ORDER;

    fn fe_l3() -> EdgeParams {
        let beam = BeamParams::new(200e3, 20e-3, 1).unwrap();
        EdgeParams::new("Fe", Edge::L3, &beam, 10.0).unwrap()
    }

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::uniform(10.0, 0.05, DEFAULT_PANEL_ORDER).unwrap())
    }

    // <j1(Q)> for Slater orbitals from int r^k e^{-(s - iQ) r} dr = k!/(s - iQ)^{k+1}
    fn j1_closed(q: f64, edge: &EdgeParams) -> f64 {
        let (i, f) = (&edge.initial, &edge.final_);
        let z = Complex64::new(i.zeta() + f.zeta(), -q);
        i.norm * f.norm * (6.0 / z.powi(4)).im / (q * q) - i.norm * f.norm * (24.0 / z.powi(5)).re / q
    }

    #[test]
    fn conjugate_channels_share_magnitude() {
        let edge = fe_l3();
        let g = grid();
        let plus = transition_kernel(Channel::Plus, &edge, Arc::clone(&g)).unwrap();
        let minus = transition_kernel(Channel::Minus, &edge, g).unwrap();
        for (a, b) in plus.values.values().iter().zip(minus.values.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-14 * a.norm().max(1e-300));
            assert!((a + b).norm() <= 1e-14 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn dipole_kernels_vanish_linearly_at_origin() {
        let edge = fe_l3();
        let spec = KernelSpectrum::new(1, &edge, 10.0).unwrap();
        let a = spec.value(Channel::Plus, 1e-5);
        let b = spec.value(Channel::Plus, 2e-5);
        assert!(((b / a).re - 2.0).abs() < 1e-4, "{}", (b / a).re);
        let zero = KernelSpectrum::new(0, &edge, 10.0).unwrap();
        assert!(zero.value(Channel::Zero, 0.0).norm() > 0.0);
    }

    #[test]
    fn phase_is_i_to_the_mu() {
        let edge = fe_l3();
        let g = grid();
        for channel in Channel::ALL {
            let k = transition_kernel(channel, &edge, Arc::clone(&g)).unwrap();
            for v in k.values.values() {
                let stripped = v / channel.phase();
                assert!(stripped.im.abs() <= 1e-14 * v.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn matches_brute_force_momentum_integral() {
        let edge = fe_l3();
        let r = 1.0;
        for (abs_mu, channel) in [(0u32, Channel::Zero), (1, Channel::Plus)] {
            let spec = KernelSpectrum::new(abs_mu, &edge, 10.0).unwrap();
            let got = spec.value(channel, r) / channel.phase();
            // fine trapezoid well past the truncation point
            let q_end = 4.0 * spec.q_max();
            let n = 400_000;
            let h = q_end / n as f64;
            let mut sum = 0.0;
            for k in 1..=n {
                let q = k as f64 * h;
                let big_q = (q * q + edge.q_e * edge.q_e).sqrt();
                let w = if k == n { 0.5 } else { 1.0 };
                sum += w
                    * q.powi(1 + abs_mu as i32)
                    * bessel_j(abs_mu as usize, q * r).unwrap()
                    * j1_closed(big_q, &edge)
                    / big_q.powi(3);
            }
            let want = sum * h * edge.q_e.powi(1 - abs_mu as i32) / (2.0 * PI);
            assert!(((got.re - want) / want).abs() < 1e-5, "|mu| = {abs_mu}: {} vs {want}", got.re);
        }
    }

    #[test]
    fn tail_ratio_is_reported() {
        let edge = fe_l3();
        let k = transition_kernel(Channel::Plus, &edge, grid()).unwrap();
        assert!(k.edge_ratio > 0.0 && k.edge_ratio < 0.05);
        assert!(k.q_max > 1.0);
    }

    #[test]
    fn mismatched_spectrum_is_rejected() {
        let edge = fe_l3();
        let spec = KernelSpectrum::new(0, &edge, 10.0).unwrap();
        assert!(kernel_from_spectrum(Channel::Plus, &spec, grid()).is_err());
        assert!(Channel::from_mu(2).is_err());
        assert_eq!(Channel::from_mu(-1).unwrap().flipped(), Channel::Plus);
    }
}
