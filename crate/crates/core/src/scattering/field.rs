//! Diffraction-plane amplitudes of the inelastically scattered wave.
//!
//! For a probe coefficient `a_l(r)` and kernel `f_mu(r)` the outgoing wave
//! carries azimuthal order `n = l + mu` and, with the transform
//! `psi~(q) = (2 pi)^-2 int psi(r) e^{i q.r} d^2 r`,
//!
//! ```text
//! psi~(q, phi_q) = sum_l i^n e^{i n phi_q} a~_l(q) / 2 pi,
//! a~_l(q) = int_0^rho a_l(r) f_mu(r) J_n(q r) r dr.
//! ```

use crate::atomic::{Channel, TransitionKernel};
use crate::error::{Error, Result};
use crate::probe::{AzimuthalExpansion, VortexProbe};
use crate::special_math::{hankel_transform_many, RadialGrid};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// `i^n` for any integer `n`.
pub fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Order-resolved diffraction amplitudes of one `(m, mu)` channel on a
/// grid of `|q|` values.
#[derive(Debug, Clone)]
pub struct DiffractionField {
    pub m: i32,
    pub channel: Channel,
    q: Vec<f64>,
    /// Outgoing azimuthal orders `n = l + mu`.
    orders: Vec<i32>,
    /// `radial[k][iq] = a~_l(q)` for `orders[k]`.
    radial: Vec<Vec<Complex64>>,
}

impl DiffractionField {
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn orders(&self) -> &[i32] {
        &self.orders
    }

    /// Radial integral `a~` of outgoing order `n` at every `q`.
    pub fn radial(&self, n: i32) -> Option<&[Complex64]> {
        self.orders.iter().position(|&o| o == n).map(|k| self.radial[k].as_slice())
    }

    /// Amplitude at `q[iq]` and detector azimuth `phi`.
    pub fn amplitude(&self, iq: usize, phi: f64) -> Complex64 {
        self.orders
            .iter()
            .zip(&self.radial)
            .map(|(&n, c)| i_pow(n) * Complex64::from_polar(1.0, n as f64 * phi) * c[iq])
            .sum::<Complex64>()
            / (2.0 * PI)
    }

    /// Intensity averaged over the detector azimuth, `sum_n |a~_n|^2 / (2 pi)^2`.
    pub fn azimuthal_mean(&self, iq: usize) -> f64 {
        self.radial.iter().map(|c| c[iq].norm_sqr()).sum::<f64>() / (4.0 * PI * PI)
    }

    pub fn azimuthal_means(&self) -> Vec<f64> {
        (0..self.q.len()).map(|iq| self.azimuthal_mean(iq)).collect()
    }

    /// `|psi~|^2` on `q x phi` with `n_phi` uniform azimuths.
    pub fn polar_intensity(&self, n_phi: usize) -> PolarIntensity {
        let phi: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
        let mut values = Vec::with_capacity(self.q.len() * n_phi);
        for iq in 0..self.q.len() {
            for &p in &phi {
                values.push(self.amplitude(iq, p).norm_sqr());
            }
        }
        PolarIntensity {
            q: self.q.clone(),
            phi,
            values,
        }
    }
}

/// Intensity on a polar `q x phi_q` grid, stored row-major by `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarIntensity {
    pub q: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<f64>,
}

impl PolarIntensity {
    pub fn get(&self, iq: usize, iphi: usize) -> f64 {
        self.values[iq * self.phi.len() + iphi]
    }

    pub fn row(&self, iq: usize) -> &[f64] {
        let n = self.phi.len();
        &self.values[iq * n..(iq + 1) * n]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &PolarIntensity) -> bool {
        self.q == other.q && self.phi == other.phi
    }
}

fn check_same_grid(a: &Arc<RadialGrid>, b: &Arc<RadialGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch("probe expansion and kernel use different radial grids".into()))
    }
}

/// Centered atom: a single outgoing order `m + mu` with
/// `a~(q) = int f_mu(r) f(r) J_{m+mu}(q r) r dr`.
pub fn outgoing_centered(probe: &VortexProbe, kernel: &TransitionKernel, q: &[f64]) -> Result<DiffractionField> {
    let grid = kernel.grid();
    let product: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(kernel.values.values())
        .map(|(&r, f)| f * probe.profile(r))
        .collect();
    let order = probe.m() + kernel.mu();
    let radial = hankel_transform_many(grid, &[(order, &product)], q)?;
    Ok(DiffractionField {
        m: probe.m(),
        channel: kernel.channel,
        q: q.to_vec(),
        orders: vec![order],
        radial,
    })
}

/// Displaced atom: one Hankel transform of order `l + mu` per retained `l`.
pub fn outgoing_coefficients(
    expansion: &AzimuthalExpansion,
    kernel: &TransitionKernel,
    q: &[f64],
) -> Result<DiffractionField> {
    let mut fields = outgoing_fields(expansion, std::slice::from_ref(kernel), q)?;
    Ok(fields.pop().expect("one kernel in, one field out"))
}

/// [`outgoing_coefficients`] for several kernels at once, sharing the
/// Bessel tables.
pub fn outgoing_fields(
    expansion: &AzimuthalExpansion,
    kernels: &[TransitionKernel],
    q: &[f64],
) -> Result<Vec<DiffractionField>> {
    let grid = expansion.grid();
    for kernel in kernels {
        check_same_grid(grid, kernel.grid())?;
    }
    let mut products: Vec<(i32, Vec<Complex64>)> = Vec::new();
    for kernel in kernels {
        for (l, a) in expansion.iter() {
            let values = a.values().iter().zip(kernel.values.values()).map(|(x, f)| x * f).collect();
            products.push((l + kernel.mu(), values));
        }
    }
    let items: Vec<(i32, &[Complex64])> = products.iter().map(|(n, v)| (*n, v.as_slice())).collect();
    let mut radial = hankel_transform_many(grid, &items, q)?.into_iter();
    let per_kernel = expansion.orders().count();
    Ok(kernels
        .iter()
        .map(|kernel| {
            let orders = expansion.orders().map(|l| l + kernel.mu()).collect();
            DiffractionField {
                m: expansion.m,
                channel: kernel.channel,
                q: q.to_vec(),
                orders,
                radial: radial.by_ref().take(per_kernel).collect(),
            }
        })
        .collect())
}
