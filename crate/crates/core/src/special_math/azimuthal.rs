//! Azimuthal Fourier decomposition `a_l(r) = (1/2pi) int field(r, phi) e^{-i l phi} dphi`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::Arc;

/// Relative power at the window edge above which a decomposition is
/// flagged as possibly aliased or truncated.
pub const ALIASING_THRESHOLD: f64 = 1e-6;

/// Fourier coefficients over a contiguous window of azimuthal orders.
#[derive(Debug, Clone)]
pub struct AzimuthalCoefficients {
    pub l_min: i32,
    pub coeffs: Vec<Complex64>,
    /// Mean of `|field|^2` over the azimuth, equal to the sum of all
    /// `|a_l|^2` including orders outside the window.
    pub total_power: f64,
    /// Set when the outermost retained orders carry more than
    /// [`ALIASING_THRESHOLD`] of the total power.
    pub aliased: bool,
}

impl AzimuthalCoefficients {
    pub fn get(&self, l: i32) -> Complex64 {
        let idx = l - self.l_min;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[idx as usize]
    }

    pub fn l_max(&self) -> i32 {
        self.l_min + self.coeffs.len() as i32 - 1
    }

    pub fn window_power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Number of azimuthal samples for a window reaching `|l| = l_max`:
/// the smallest power of two that is at least `8 * l_max` (and at least 16).
pub fn sample_count(l_max: u32) -> usize {
    (8 * l_max as usize).max(16).next_power_of_two()
}

/// Reusable uniform-azimuth transform with `n_phi` samples.
#[derive(Clone)]
pub struct AzimuthalTransform {
    n_phi: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for AzimuthalTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AzimuthalTransform").field("n_phi", &self.n_phi).finish()
    }
}

impl AzimuthalTransform {
    pub fn new(n_phi: usize) -> Self {
        assert!(n_phi.is_power_of_two(), "azimuthal sample count must be a power of two");
        let fft = FftPlanner::new().plan_fft_forward(n_phi);
        Self { n_phi, fft }
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    /// Sample angles `phi_k = 2 pi k / n_phi`.
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_phi).map(move |k| 2.0 * PI * k as f64 / self.n_phi as f64)
    }

    /// Full discrete spectrum of uniformly spaced samples; entry `k` holds
    /// order `k` for `k < n/2` and order `k - n` above.
    pub fn spectrum(&self, samples: &mut [Complex64]) {
        debug_assert_eq!(samples.len(), self.n_phi);
        self.fft.process(samples);
        let inv = 1.0 / self.n_phi as f64;
        for s in samples.iter_mut() {
            *s *= inv;
        }
    }

    /// Coefficients for the orders in `window` from sampled values.
    pub fn decompose_samples(&self, mut samples: Vec<Complex64>, window: RangeInclusive<i32>) -> AzimuthalCoefficients {
        self.spectrum(&mut samples);
        let n = self.n_phi as i32;
        let total_power: f64 = samples.iter().map(|c| c.norm_sqr()).sum();
        let (lo, hi) = (*window.start(), *window.end());
        let coeffs: Vec<Complex64> = (lo..=hi)
            .map(|l| {
                if l.abs() >= n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    samples[l.rem_euclid(n) as usize]
                }
            })
            .collect();
        let edge = coeffs.first().map_or(0.0, |c| c.norm_sqr()) + coeffs.last().map_or(0.0, |c| c.norm_sqr());
        let aliased = total_power > 0.0 && edge > ALIASING_THRESHOLD * total_power;
        AzimuthalCoefficients {
            l_min: lo,
            coeffs,
            total_power,
            aliased,
        }
    }
}

/// Decompose `field(r, phi)` at fixed `r` into azimuthal orders `l_window`
/// by the uniform trapezoid rule.
pub fn azimuthal_decompose<F>(field: F, r: f64, l_window: RangeInclusive<i32>) -> AzimuthalCoefficients
where
    F: Fn(f64, f64) -> Complex64,
{
    let l_max = l_window.start().unsigned_abs().max(l_window.end().unsigned_abs());
    let transform = AzimuthalTransform::new(sample_count(l_max));
    let samples = transform.angles().map(|phi| field(r, phi)).collect();
    transform.decompose_samples(samples, l_window)
}
