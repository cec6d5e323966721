//! Aperture-limited convergent vortex probe and its cylindrical-harmonic
//! expansion about a displaced atom.
//!
//! The in-focus probe with topological charge `m` is
//!
//! ```text
//! psi_m(r, phi) = e^{i m phi} f(r),   f(r) = N int_0^K J_|m|(q r) q dq,   K = k0 alpha
//! ```
//!
//! with `N = 1 / (K sqrt(pi))`, which gives unit power over the whole plane.
//! The constant phase `i^m` of the aperture transform is dropped, so the
//! `m` and `-m` probes are complex conjugates of each other.

use crate::atomic::BeamParams;
use crate::error::{Error, Result};
use crate::special_math::azimuthal::{sample_count, AzimuthalTransform};
use crate::special_math::grid::DEFAULT_PANEL_ORDER;
use crate::special_math::{hankel_transform, RadialGrid, SampledRadialFunction};
use crate::units::{bohr_to_nm, nm_to_bohr};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::Arc;

/// Largest fraction of the probe power allowed outside the radial grid.
pub const MAX_OUTSIDE_POWER: f64 = 0.01;
/// Default half-width of the azimuthal window, `|l - m| <= 24`.
pub const DEFAULT_HALF_WIDTH: u32 = 24;
/// Discarded-power tolerance of the azimuthal window.
pub const WINDOW_TOLERANCE: f64 = 1e-6;
/// Largest half-width the window may grow to; keeps `|l + mu| <= 64`.
pub const MAX_HALF_WIDTH: u32 = 60;

/// Default probe grid: `0.05` bohr resolution out to `inner` bohr, then
/// stretched panels out to 1000 bohr.
pub fn probe_grid(inner: f64) -> Result<RadialGrid> {
    RadialGrid::piecewise(inner.max(20.0), 0.05, 1000.0_f64.max(2.0 * inner), 1.15, 4.0, DEFAULT_PANEL_ORDER)
}

/// In-focus, aberration-free vortex probe.
#[derive(Debug, Clone)]
pub struct VortexProbe {
    pub beam: BeamParams,
    /// `f(r)` on the probe grid (real-valued, stored as complex).
    pub radial_profile: SampledRadialFunction,
    /// Normalization constant `N` of the aperture integral.
    pub normalization: f64,
    aperture: Arc<SampledRadialFunction>,
}

impl VortexProbe {
    pub fn m(&self) -> i32 {
        self.beam.m
    }

    /// Interpolated radial profile `f(r)`; zero beyond the grid.
    pub fn profile(&self, r: f64) -> f64 {
        self.radial_profile.eval(r).re
    }

    /// `f(r)` from the aperture integral, without interpolation.
    pub fn profile_exact(&self, r: f64) -> Result<f64> {
        let order = self.beam.m.unsigned_abs() as i32;
        Ok(self.normalization * hankel_transform(order, &self.aperture, r)?.re)
    }

    /// `psi_m` at Cartesian position `(x, y)` relative to the vortex axis.
    pub fn value_at(&self, x: f64, y: f64) -> Complex64 {
        let s = x.hypot(y);
        self.radial_profile.eval(s).re * winding(self.beam.m, x, y, s)
    }

    /// `2 pi int |f|^2 r dr` over the grid.
    pub fn enclosed_power(&self) -> f64 {
        2.0 * PI * self.radial_profile.power()
    }

    /// Radius of the first intensity maximum in bohr (0 for `m = 0`).
    pub fn ring_radius(&self) -> Result<f64> {
        if self.beam.m == 0 {
            return Ok(0.0);
        }
        let k = self.beam.aperture_q();
        let step = 0.01 / k;
        let limit = (self.beam.m.unsigned_abs() as f64 + 4.0) / k;
        let mut prev = 0.0;
        let mut r = step;
        while r < limit {
            let here = self.profile(r).abs();
            let next = self.profile(r + step).abs();
            if here >= prev && here >= next && here > 0.0 {
                return golden_max(|x| self.profile_exact(x).map(f64::abs), r - step, r + step);
            }
            prev = here;
            r += step;
        }
        Err(Error::NonConvergence("no intensity maximum found for the vortex ring".into()))
    }

    pub fn ring_radius_nm(&self) -> Result<f64> {
        Ok(bohr_to_nm(self.ring_radius()?))
    }
}

/// `e^{i m phi}` for the direction `(x, y)` of length `s`; zero at the
/// origin for `m != 0`.
fn winding(m: i32, x: f64, y: f64, s: f64) -> Complex64 {
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let unit = Complex64::new(x / s, y / s);
    let w = unit.powu(m.unsigned_abs());
    if m > 0 {
        w
    } else {
        w.conj()
    }
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let g = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > 1e-9 * b.abs().max(1.0) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Probe for `beam` sampled on `r_grid`. The grid must hold at least
/// `1 - MAX_OUTSIDE_POWER` of the probe power.
pub fn build_probe(beam: &BeamParams, r_grid: Arc<RadialGrid>) -> Result<VortexProbe> {
    if beam.m.unsigned_abs() as usize > crate::special_math::bessel::MAX_ORDER {
        return Err(Error::Domain(format!("topological charge {} is too large", beam.m)));
    }
    let k = beam.aperture_q();
    let r_max = r_grid.r_max();
    let spacing = (k / 64.0).min(2.0 * PI / (16.0 * r_max));
    let aperture_grid = Arc::new(RadialGrid::uniform(k, spacing, DEFAULT_PANEL_ORDER)?);
    let aperture = Arc::new(SampledRadialFunction::from_fn(aperture_grid, |_| Complex64::new(1.0, 0.0))?);
    let normalization = 1.0 / (k * PI.sqrt());
    let order = beam.m.unsigned_abs() as i32;
    let values = r_grid
        .nodes()
        .par_iter()
        .map(|&r| Ok(Complex64::new(normalization * hankel_transform(order, &aperture, r)?.re, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let radial_profile = SampledRadialFunction::new(r_grid, values)?;
    let probe = VortexProbe {
        beam: *beam,
        radial_profile,
        normalization,
        aperture,
    };
    let outside = 1.0 - probe.enclosed_power();
    if outside > MAX_OUTSIDE_POWER {
        return Err(Error::GridExtent(format!(
            "{:.2} % of the probe power lies beyond r = {r_max:.1} bohr",
            100.0 * outside
        )));
    }
    Ok(probe)
}

/// Position of the vortex axis relative to the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    radius: f64,
    azimuth: f64,
}

impl Displacement {
    pub const CENTERED: Displacement = Displacement {
        radius: 0.0,
        azimuth: 0.0,
    };

    /// Displacement along `x` by `radius` bohr.
    pub fn bohr(radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("displacement must be finite and >= 0, got {radius}")));
        }
        Ok(Self { radius, azimuth: 0.0 })
    }

    pub fn nm(radius: f64) -> Result<Self> {
        Self::bohr(nm_to_bohr(radius))
    }

    /// Same distance, rotated to azimuth `phi` (rad).
    pub fn with_azimuth(self, phi: f64) -> Self {
        Self { azimuth: phi, ..self }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radius_nm(&self) -> f64 {
        bohr_to_nm(self.radius)
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    /// Cartesian position `(X, Y)` of the vortex axis in bohr.
    pub fn position(&self) -> (f64, f64) {
        (self.radius * self.azimuth.cos(), self.radius * self.azimuth.sin())
    }
}

/// Coefficients `a_l(r)` of `psi_m(r - R) = sum_l a_l(r) e^{i l phi}`.
#[derive(Debug, Clone)]
pub struct AzimuthalExpansion {
    pub displacement: Displacement,
    pub m: i32,
    /// Window half-width actually used: `|l - m| <= half_width`.
    pub half_width: u32,
    /// Fraction of the in-disk power outside the window.
    pub discarded: f64,
    grid: Arc<RadialGrid>,
    l_min: i32,
    coeffs: Vec<SampledRadialFunction>,
}

impl AzimuthalExpansion {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn orders(&self) -> RangeInclusive<i32> {
        self.l_min..=self.l_min + self.coeffs.len() as i32 - 1
    }

    pub fn get(&self, l: i32) -> Option<&SampledRadialFunction> {
        let idx = l - self.l_min;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize)
    }

    /// `(l, a_l)` pairs over the window.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &SampledRadialFunction)> {
        self.orders().zip(self.coeffs.iter())
    }

    /// `2 pi sum_l int |a_l|^2 r dr`.
    pub fn power(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|c| c.power()).sum::<f64>()
    }

    /// Power held by orders with `|l - m| > k`.
    pub fn power_beyond(&self, k: u32) -> f64 {
        2.0 * PI
            * self
                .iter()
                .filter(|(l, _)| (l - self.m).unsigned_abs() > k)
                .map(|(_, c)| c.power())
                .sum::<f64>()
    }

    /// `sum_l a_l(r) e^{i l phi}`.
    pub fn reconstruct(&self, r: f64, phi: f64) -> Complex64 {
        self.iter()
            .map(|(l, a)| a.eval(r) * Complex64::from_polar(1.0, l as f64 * phi))
            .sum()
    }
}

/// Expands the probe about an atom at the origin with the vortex axis at
/// `displacement`. Starts from `|l - m| <= half_width` and doubles the
/// window until the discarded power drops below [`WINDOW_TOLERANCE`].
pub fn expand_displaced(
    probe: &VortexProbe,
    displacement: Displacement,
    half_width: u32,
    r_grid: Arc<RadialGrid>,
) -> Result<AzimuthalExpansion> {
    let mut width = half_width.clamp(1, MAX_HALF_WIDTH);
    loop {
        let expansion = expand_with_window(probe, displacement, width, Arc::clone(&r_grid))?;
        if expansion.discarded <= WINDOW_TOLERANCE {
            return Ok(expansion);
        }
        if width >= MAX_HALF_WIDTH {
            return Err(Error::WindowTruncation {
                window: width as usize,
                discarded: expansion.discarded,
            });
        }
        width = (2 * width).min(MAX_HALF_WIDTH);
    }
}

fn expand_with_window(
    probe: &VortexProbe,
    displacement: Displacement,
    width: u32,
    r_grid: Arc<RadialGrid>,
) -> Result<AzimuthalExpansion> {
    let m = probe.m();
    let window = m - width as i32..=m + width as i32;
    let l_extent = window.start().unsigned_abs().max(window.end().unsigned_abs());
    let transform = AzimuthalTransform::new(sample_count(l_extent));
    let angles: Vec<(f64, f64)> = transform.angles().map(|phi| phi.sin_cos()).collect();
    let (cx, cy) = displacement.position();

    let per_node: Vec<(Vec<Complex64>, f64)> = r_grid
        .nodes()
        .par_iter()
        .map(|&r| {
            let samples = angles
                .iter()
                .map(|&(sin, cos)| probe.value_at(r * cos - cx, r * sin - cy))
                .collect();
            let c = transform.decompose_samples(samples, window.clone());
            (c.coeffs, c.total_power)
        })
        .collect();

    let weights = r_grid.weights();
    let mut total = 0.0;
    let mut kept = 0.0;
    for ((coeffs, node_total), &w) in per_node.iter().zip(weights) {
        total += w * node_total;
        kept += w * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    let discarded = if total > 0.0 { ((total - kept) / total).max(0.0) } else { 0.0 };

    let n_orders = (2 * width + 1) as usize;
    let coeffs = (0..n_orders)
        .map(|k| {
            let values = per_node.iter().map(|(c, _)| c[k]).collect();
            SampledRadialFunction::new(Arc::clone(&r_grid), values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AzimuthalExpansion {
        displacement,
        m,
        half_width: width,
        discarded,
        grid: r_grid,
        l_min: *window.start(),
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_math::bessel_j;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn beam(m: i32) -> BeamParams {
        BeamParams::new(200e3, 1.2e-3, m).unwrap()
    }

    fn probe(m: i32) -> VortexProbe {
        build_probe(&beam(m), Arc::new(probe_grid(80.0).unwrap())).unwrap()
    }

    fn disk_grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::uniform(10.0, 0.02, DEFAULT_PANEL_ORDER).unwrap())
    }

    #[test]
    fn profile_matches_closed_form_for_m0() {
        // int_0^K J0(q r) q dq = K J1(K r) / r
        let p = probe(0);
        let k = p.beam.aperture_q();
        for r in [0.5, 7.0, 30.0, 150.0] {
            let want = p.normalization * k * bessel_j(1, k * r).unwrap() / r;
            assert!((p.profile_exact(r).unwrap() - want).abs() < 1e-12 * p.normalization * k * k);
            assert!((p.profile(r) - want).abs() < 1e-8 * p.normalization * k * k);
        }
    }

    #[test]
    fn centered_vortex_vanishes_on_axis_and_airy_peaks_there() {
        assert_eq!(probe(1).value_at(0.0, 0.0), Complex64::new(0.0, 0.0));
        let p0 = probe(0);
        assert_eq!(p0.ring_radius().unwrap(), 0.0);
        assert!(p0.profile(0.0) > p0.profile(5.0));
    }

    #[test]
    fn ring_radius_near_nine_angstrom() {
        let r = probe(1).ring_radius_nm().unwrap();
        assert!((r - 0.9).abs() < 0.15 * 0.9, "ring radius {r} nm");
    }

    #[test]
    fn doubling_alpha_halves_ring_radius() {
        let narrow = probe(1).ring_radius().unwrap();
        let b = BeamParams::new(200e3, 2.4e-3, 1).unwrap();
        let wide = build_probe(&b, Arc::new(probe_grid(80.0).unwrap())).unwrap();
        let ratio = wide.ring_radius().unwrap() / narrow;
        assert!((ratio - 0.5).abs() < 1e-6);
    }

    #[test]
    fn power_is_unity_up_to_the_tail() {
        let p = probe(1);
        let enclosed = p.enclosed_power();
        // tail beyond r0 is about 2 / (pi K r0)
        let tail = 2.0 / (PI * p.beam.aperture_q() * 1000.0);
        assert!(enclosed < 1.0 && (1.0 - enclosed - tail).abs() < 0.2 * tail);
    }

    #[test]
    fn small_grid_is_rejected() {
        let g = Arc::new(RadialGrid::uniform(60.0, 0.1, DEFAULT_PANEL_ORDER).unwrap());
        assert!(matches!(build_probe(&beam(1), g), Err(Error::GridExtent(_))));
    }

    #[test]
    fn centered_expansion_is_a_single_order() {
        let p = probe(1);
        let e = expand_displaced(&p, Displacement::CENTERED, DEFAULT_HALF_WIDTH, disk_grid()).unwrap();
        let total = e.power();
        for (l, a) in e.iter() {
            if l == 1 {
                for (&r, v) in a.grid().nodes().iter().zip(a.values()) {
                    assert!((v.re - p.profile(r)).abs() < 1e-14 && v.im.abs() < 1e-14);
                }
            } else {
                assert!(2.0 * PI * a.power() < 1e-10 * total);
            }
        }
    }

    #[test]
    fn displaced_expansion_conserves_disk_power() {
        let p = probe(1);
        let grid = disk_grid();
        for nm in [0.2, 1.0, 2.0] {
            let d = Displacement::nm(nm).unwrap();
            let e = expand_displaced(&p, d, DEFAULT_HALF_WIDTH, Arc::clone(&grid)).unwrap();
            let (cx, cy) = d.position();
            // brute-force disk power with 4x the angular resolution
            let n_phi = 4 * sample_count(DEFAULT_HALF_WIDTH + 1);
            let disk: f64 = grid.integrate(|r| {
                (0..n_phi)
                    .map(|k| {
                        let phi = 2.0 * PI * k as f64 / n_phi as f64;
                        p.value_at(r * phi.cos() - cx, r * phi.sin() - cy).norm_sqr()
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI
                    / n_phi as f64
            });
            assert!(((e.power() - disk) / disk).abs() < 1e-4, "R = {nm} nm");
            assert!(e.discarded < WINDOW_TOLERANCE);
        }
    }

    #[test]
    fn small_displacement_keeps_order_m_dominant() {
        let p = probe(1);
        let e = expand_displaced(&p, Displacement::nm(0.2).unwrap(), DEFAULT_HALF_WIDTH, disk_grid()).unwrap();
        let best = e
            .iter()
            .max_by(|a, b| a.1.power().total_cmp(&b.1.power()))
            .map(|(l, _)| l)
            .unwrap();
        assert_eq!(best, 1);
    }

    #[test]
    fn reconstruction_matches_direct_evaluation() {
        let p = probe(1);
        let d = Displacement::nm(0.6).unwrap().with_azimuth(0.4);
        let e = expand_displaced(&p, d, DEFAULT_HALF_WIDTH, disk_grid()).unwrap();
        let peak = p.radial_profile.max_abs();
        let (cx, cy) = d.position();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..64 {
            let r = rng.random_range(0.0..10.0);
            let phi = rng.random_range(0.0..2.0 * PI);
            let direct = p.value_at(r * phi.cos() - cx, r * phi.sin() - cy);
            assert!((e.reconstruct(r, phi) - direct).norm() < 1e-6 * peak);
        }
    }

    #[test]
    fn opposite_charge_is_the_conjugate_mirror() {
        let grid = disk_grid();
        let d = Displacement::nm(0.5).unwrap();
        let plus = expand_displaced(&probe(1), d, DEFAULT_HALF_WIDTH, Arc::clone(&grid)).unwrap();
        let minus = expand_displaced(&probe(-1), d, DEFAULT_HALF_WIDTH, grid).unwrap();
        for (l, a) in plus.iter() {
            let b = minus.get(-l).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x.conj() - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn leakage_is_monotone() {
        let e = expand_displaced(&probe(1), Displacement::nm(1.5).unwrap(), DEFAULT_HALF_WIDTH, disk_grid()).unwrap();
        let beyond: Vec<f64> = (0..e.half_width).map(|k| e.power_beyond(k)).collect();
        assert!(beyond.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn tiny_window_grows_automatically() {
        let e = expand_displaced(&probe(1), Displacement::nm(1.0).unwrap(), 1, disk_grid()).unwrap();
        assert!(e.half_width > 1);
        assert!(e.discarded <= WINDOW_TOLERANCE);
    }
}
