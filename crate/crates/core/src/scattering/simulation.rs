//! End-to-end sweeps: probes, kernels and weights assembled once, then
//! evaluated over displacements, scattering angles and particle sizes.

use super::field::{outgoing_fields, DiffractionField, PolarIntensity};
use super::signal::{emcd, snr, INTENSITY_FLOOR};
use crate::atomic::kernel::kernel_from_spectrum;
use crate::atomic::{
    channel_weights, BeamParams, Channel, ChannelWeights, Edge, EdgeParams, KernelSpectrum, Polarization,
    TransitionKernel,
};
use crate::error::{Error, Result};
use crate::probe::{build_probe, expand_displaced, probe_grid, AzimuthalExpansion, Displacement, VortexProbe};
use crate::special_math::grid::DEFAULT_PANEL_ORDER;
use crate::special_math::RadialGrid;
use crate::units::{bohr_to_nm, mrad_to_rad, nm_to_bohr, rad_to_mrad};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// Physical and numerical inputs of a [`Simulation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSetup {
    /// Beam kinetic energy in eV.
    pub energy: f64,
    /// Convergence semi-angle in rad.
    pub alpha: f64,
    /// Topological charges to prepare probes for.
    pub charges: Vec<i32>,
    pub element: String,
    pub edge: Edge,
    /// Energy loss in eV; the tabulated edge energy when `None`.
    pub delta_e: Option<f64>,
    pub polarization: Polarization,
    /// Replaces the Clebsch-Gordan weights when set.
    pub weights: Option<ChannelWeights>,
    /// Interaction radius in bohr.
    pub rho: f64,
    /// Mean node spacing inside the interaction disk, bohr.
    pub radial_spacing: f64,
    /// Initial azimuthal window half-width.
    pub half_width: u32,
    /// Largest displacement that will be requested, bohr.
    pub max_displacement: f64,
}

impl Default for SimulationSetup {
    fn default() -> Self {
        Self {
            energy: 200e3,
            alpha: 1.2e-3,
            charges: vec![1, -1],
            element: "Fe".into(),
            edge: Edge::L3,
            delta_e: None,
            polarization: Polarization::Up,
            weights: None,
            rho: crate::atomic::DEFAULT_RHO,
            radial_spacing: 0.02,
            half_width: crate::probe::DEFAULT_HALF_WIDTH,
            max_displacement: nm_to_bohr(2.5),
        }
    }
}

/// Azimuthally averaged intensity `I_{m,mu}(q)` for each channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMeans {
    /// Indexed like [`Channel::ALL`].
    pub values: [Vec<f64>; 3],
}

impl ChannelMeans {
    pub fn channel(&self, channel: Channel) -> &[f64] {
        &self.values[channel_index(channel)]
    }

    /// `sum_mu C^mu I_{m,mu}(q)`.
    pub fn weighted(&self, weights: &ChannelWeights) -> Vec<f64> {
        let n = self.values[0].len();
        (0..n)
            .map(|i| Channel::ALL.iter().map(|&c| weights.get(c) * self.channel(c)[i]).sum())
            .collect()
    }
}

fn channel_index(channel: Channel) -> usize {
    match channel {
        Channel::Minus => 0,
        Channel::Zero => 1,
        Channel::Plus => 2,
    }
}

/// Prepared kernels, probes and weights.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub beam: BeamParams,
    pub edge: EdgeParams,
    pub weights: ChannelWeights,
    pub half_width: u32,
    max_displacement: f64,
    grid: Arc<RadialGrid>,
    kernels: Vec<TransitionKernel>,
    probes: Vec<VortexProbe>,
}

impl Simulation {
    pub fn new(setup: &SimulationSetup) -> Result<Self> {
        let beam = BeamParams::new(setup.energy, setup.alpha, 1)?;
        let edge = match setup.delta_e {
            Some(de) => EdgeParams::with_energy(&setup.element, setup.edge, de, &beam, setup.rho)?,
            None => EdgeParams::new(&setup.element, setup.edge, &beam, setup.rho)?,
        };
        let weights = setup
            .weights
            .unwrap_or_else(|| channel_weights(setup.edge, setup.polarization));
        if !(setup.radial_spacing > 0.0) {
            return Err(Error::Domain("radial spacing must be positive".into()));
        }
        let grid = Arc::new(RadialGrid::uniform(setup.rho, setup.radial_spacing, DEFAULT_PANEL_ORDER)?);
        let dipole = KernelSpectrum::new(1, &edge, setup.rho)?;
        let monopole = KernelSpectrum::new(0, &edge, setup.rho)?;
        let kernels = Channel::ALL
            .iter()
            .map(|&c| {
                let spectrum = if c == Channel::Zero { &monopole } else { &dipole };
                kernel_from_spectrum(c, spectrum, Arc::clone(&grid))
            })
            .collect::<Result<Vec<_>>>()?;
        if !(setup.max_displacement >= 0.0) {
            return Err(Error::Domain("maximum displacement must be non-negative".into()));
        }
        let probe_r = Arc::new(probe_grid(setup.max_displacement + setup.rho + 5.0)?);
        let mut charges = setup.charges.clone();
        charges.sort_unstable();
        charges.dedup();
        let probes = charges
            .iter()
            .map(|&m| build_probe(&beam.with_charge(m), Arc::clone(&probe_r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            beam,
            edge,
            weights,
            half_width: setup.half_width,
            max_displacement: setup.max_displacement,
            grid,
            kernels,
            probes,
        })
    }

    /// Radial grid of the interaction disk.
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn kernel(&self, channel: Channel) -> &TransitionKernel {
        &self.kernels[channel_index(channel)]
    }

    pub fn kernels(&self) -> &[TransitionKernel] {
        &self.kernels
    }

    pub fn probe(&self, m: i32) -> Result<&VortexProbe> {
        self.probes
            .iter()
            .find(|p| p.m() == m)
            .ok_or_else(|| Error::Domain(format!("no probe prepared for m = {m}")))
    }

    /// Transverse momenta for scattering angles in rad.
    pub fn q_of(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|&t| self.beam.q_of_theta(t)).collect()
    }

    fn check_displacement(&self, d: Displacement) -> Result<()> {
        if d.radius() > self.max_displacement * (1.0 + 1e-12) {
            return Err(Error::Extrapolation {
                what: "displacement (bohr)",
                value: d.radius(),
                min: 0.0,
                max: self.max_displacement,
            });
        }
        Ok(())
    }

    pub fn expansion(&self, m: i32, d: Displacement) -> Result<AzimuthalExpansion> {
        self.check_displacement(d)?;
        expand_displaced(self.probe(m)?, d, self.half_width, Arc::clone(&self.grid))
    }

    /// Diffraction fields of the three channels, ordered like [`Channel::ALL`].
    pub fn fields(&self, m: i32, d: Displacement, q: &[f64]) -> Result<Vec<DiffractionField>> {
        let expansion = self.expansion(m, d)?;
        outgoing_fields(&expansion, &self.kernels, q)
    }

    pub fn channel_means(&self, m: i32, d: Displacement, q: &[f64]) -> Result<ChannelMeans> {
        let fields = self.fields(m, d, q)?;
        let values = [
            fields[0].azimuthal_means(),
            fields[1].azimuthal_means(),
            fields[2].azimuthal_means(),
        ];
        Ok(ChannelMeans { values })
    }

    /// Weighted intensity `I_m(q, phi_q)` on `n_phi` azimuths.
    pub fn pattern(&self, m: i32, d: Displacement, q: &[f64], n_phi: usize) -> Result<PolarIntensity> {
        let fields = self.fields(m, d, q)?;
        let parts: Vec<PolarIntensity> = fields.iter().map(|f| f.polar_intensity(n_phi)).collect();
        let pairs: Vec<(Channel, &PolarIntensity)> = Channel::ALL.iter().copied().zip(parts.iter()).collect();
        super::signal::channel_sum(&pairs, &self.weights)
    }

    /// Averaged channel intensities for both beam chiralities over a
    /// displacement x angle grid.
    pub fn intensity_table(&self, r: &[f64], theta: &[f64]) -> Result<IntensityTable> {
        let q = self.q_of(theta);
        let rows = r
            .par_iter()
            .map(|&radius| {
                let d = Displacement::bohr(radius)?;
                Ok((self.channel_means(1, d, &q)?, self.channel_means(-1, d, &q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let (plus, minus) = rows.into_iter().unzip();
        Ok(IntensityTable {
            r: r.to_vec(),
            theta: theta.to_vec(),
            plus,
            minus,
        })
    }

    /// EMCD over displacements `r_nm` and scattering angles `theta_mrad`.
    pub fn emcd_map(&self, r_nm: &[f64], theta_mrad: &[f64]) -> Result<EmcdMap> {
        let r: Vec<f64> = r_nm.iter().map(|&x| nm_to_bohr(x)).collect();
        let theta: Vec<f64> = theta_mrad.iter().map(|&x| mrad_to_rad(x)).collect();
        Ok(self.intensity_table(&r, &theta)?.emcd_map(&self.weights))
    }

    /// Position-integrated intensities for disk particles of diameters
    /// `d_nm`, resolved in scattering angle over `theta_mrad`.
    pub fn detector_table(&self, d_nm: &[f64], theta_mrad: &[f64], max_cell_nm: f64) -> Result<DetectorTable> {
        if !(max_cell_nm > 0.0) {
            return Err(Error::Domain("radial cell width must be positive".into()));
        }
        if theta_mrad.first() != Some(&0.0) || theta_mrad.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("angle grid must start at 0 and increase strictly".into()));
        }
        let halves: Vec<f64> = d_nm
            .iter()
            .map(|&d| {
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(Error::Domain(format!("particle diameter must be >= 0, got {d} nm")));
                }
                Ok(nm_to_bohr(d / 2.0))
            })
            .collect::<Result<_>>()?;
        let cells = radial_cells(&halves, nm_to_bohr(max_cell_nm));
        let mut radii: Vec<f64> = vec![0.0];
        radii.extend(cells.iter().map(|&(lo, hi)| 0.5 * (lo + hi)));
        let theta: Vec<f64> = theta_mrad.iter().map(|&x| mrad_to_rad(x)).collect();
        let table = self.intensity_table(&radii, &theta)?;

        let n_theta = theta.len();
        let mut plus = Vec::with_capacity(halves.len());
        let mut minus = Vec::with_capacity(halves.len());
        for &half in &halves {
            if half == 0.0 {
                plus.push(table.plus[0].clone());
                minus.push(table.minus[0].clone());
                continue;
            }
            let mut acc_p = [vec![0.0; n_theta], vec![0.0; n_theta], vec![0.0; n_theta]];
            let mut acc_m = acc_p.clone();
            for (k, &(lo, hi)) in cells.iter().enumerate() {
                if hi > half * (1.0 + 1e-12) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let area = 2.0 * PI * mid * (hi - lo);
                for c in 0..3 {
                    for j in 0..n_theta {
                        acc_p[c][j] += area * table.plus[k + 1].values[c][j];
                        acc_m[c][j] += area * table.minus[k + 1].values[c][j];
                    }
                }
            }
            plus.push(ChannelMeans { values: acc_p });
            minus.push(ChannelMeans { values: acc_m });
        }
        Ok(DetectorTable {
            d_nm: d_nm.to_vec(),
            theta,
            plus,
            minus,
        })
    }
}

/// Diffraction intensity on a square grid of scattering angles.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorImage {
    /// Half-width of the grid in rad.
    pub theta_max: f64,
    /// Pixels per side (odd; the center pixel sits on the axis).
    pub pixels: usize,
    /// Row-major, rows running along `theta_y` from `-theta_max`.
    pub values: Vec<f64>,
}

impl DetectorImage {
    /// Scattering angle of pixel index `k` along either axis, rad.
    pub fn angle(&self, k: usize) -> f64 {
        let half = (self.pixels / 2) as f64;
        (k as f64 - half) * self.theta_max / half
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `||self - other|| / ||other||`.
    pub fn relative_difference(&self, other: &DetectorImage) -> Result<f64> {
        if self.pixels != other.pixels || self.theta_max != other.theta_max {
            return Err(Error::GridMismatch("detector images on different grids".into()));
        }
        let (diff, norm) = self
            .values
            .iter()
            .zip(&other.values)
            .fold((0.0, 0.0), |(d, n), (a, b)| (d + (a - b).powi(2), n + b * b));
        Ok((diff / norm).sqrt())
    }
}

impl Simulation {
    /// Pattern of beam `m` on a `pixels x pixels` detector spanning
    /// `[-theta_max, theta_max]` in both directions. A single channel when
    /// `channel` is set, the weighted channel sum otherwise.
    pub fn detector_image(
        &self,
        m: i32,
        d: Displacement,
        theta_max: f64,
        pixels: usize,
        channel: Option<Channel>,
    ) -> Result<DetectorImage> {
        if pixels < 3 || pixels.is_multiple_of(2) {
            return Err(Error::Domain(format!("detector needs an odd pixel count >= 3, got {pixels}")));
        }
        if !(theta_max > 0.0) {
            return Err(Error::Domain("detector half-width must be positive".into()));
        }
        let half = (pixels / 2) as i64;
        let step = theta_max / half as f64;
        let mut shells: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
        for ky in -half..=half {
            for kx in -half..=half {
                let next = shells.len();
                shells.entry(kx * kx + ky * ky).or_insert(next);
            }
        }
        let mut theta = vec![0.0; shells.len()];
        for (&k2, &idx) in &shells {
            theta[idx] = (k2 as f64).sqrt() * step;
        }
        let fields = self.fields(m, d, &self.q_of(&theta))?;
        let weights: [f64; 3] = match channel {
            Some(c) => {
                let mut w = [0.0; 3];
                w[channel_index(c)] = 1.0;
                w
            }
            None => [
                self.weights.get(Channel::Minus),
                self.weights.get(Channel::Zero),
                self.weights.get(Channel::Plus),
            ],
        };
        let mut values = Vec::with_capacity(pixels * pixels);
        for ky in -half..=half {
            for kx in -half..=half {
                let iq = shells[&(kx * kx + ky * ky)];
                let phi = (ky as f64).atan2(kx as f64);
                let v = fields
                    .iter()
                    .zip(weights)
                    .filter(|(_, w)| *w != 0.0)
                    .map(|(f, w)| w * f.amplitude(iq, phi).norm_sqr())
                    .sum();
                values.push(v);
            }
        }
        Ok(DetectorImage {
            theta_max,
            pixels,
            values,
        })
    }
}

/// Cells `[lo, hi]` tiling `[0, max(halves)]` with every entry of `halves`
/// on a cell boundary and no cell wider than `max_width`.
fn radial_cells(halves: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = halves.iter().copied().filter(|&h| h > 0.0).collect();
    edges.push(0.0);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let mut cells = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let n = ((b - a) / max_width).ceil().max(1.0) as usize;
        for i in 0..n {
            let lo = a + (b - a) * i as f64 / n as f64;
            let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            cells.push((lo, hi));
        }
    }
    cells
}

/// `I_{+-1, mu}(R, theta)` on a displacement x angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityTable {
    /// Displacements in bohr.
    pub r: Vec<f64>,
    /// Scattering angles in rad.
    pub theta: Vec<f64>,
    pub plus: Vec<ChannelMeans>,
    pub minus: Vec<ChannelMeans>,
}

impl IntensityTable {
    pub fn emcd_map(&self, weights: &ChannelWeights) -> EmcdMap {
        let mut i_plus = Vec::with_capacity(self.r.len() * self.theta.len());
        let mut i_minus = Vec::with_capacity(i_plus.capacity());
        for (p, m) in self.plus.iter().zip(&self.minus) {
            i_plus.extend(p.weighted(weights));
            i_minus.extend(m.weighted(weights));
        }
        EmcdMap::new(
            MapKind::DisplacementAngle,
            self.r.iter().map(|&x| bohr_to_nm(x)).collect(),
            self.theta.iter().map(|&x| rad_to_mrad(x)).collect(),
            i_plus,
            i_minus,
            FloorScope::Map,
        )
    }
}

/// Particle-integrated intensities `int I 2 pi R dR` per diameter, resolved
/// in scattering angle. The `d = 0` row holds the centered-atom intensity,
/// the limit of the integral divided by the particle area.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTable {
    pub d_nm: Vec<f64>,
    /// Scattering angles in rad, starting at 0.
    pub theta: Vec<f64>,
    pub plus: Vec<ChannelMeans>,
    pub minus: Vec<ChannelMeans>,
}

impl DetectorTable {
    fn theta_max(&self) -> f64 {
        *self.theta.last().expect("non-empty angle grid")
    }

    /// `int_0^beta g(theta) theta dtheta` by the trapezoid rule; the last
    /// partial interval uses linear interpolation of the integrand.
    fn detector_integral(&self, g: &[f64], beta: f64) -> f64 {
        let t = &self.theta;
        let mut acc = 0.0;
        for j in 1..t.len() {
            let (a, b) = (t[j - 1], t[j]);
            let (fa, fb) = (g[j - 1] * a, g[j] * b);
            if beta >= b {
                acc += 0.5 * (b - a) * (fa + fb);
            } else {
                if beta > a {
                    let fx = fa + (fb - fa) * (beta - a) / (b - a);
                    acc += 0.5 * (beta - a) * (fa + fx);
                }
                break;
            }
        }
        acc
    }

    fn check_beta(&self, beta: f64) -> Result<()> {
        if !(beta >= 0.0) || beta > self.theta_max() * (1.0 + 1e-12) {
            return Err(Error::Extrapolation {
                what: "collection angle (mrad)",
                value: rad_to_mrad(beta),
                min: 0.0,
                max: rad_to_mrad(self.theta_max()),
            });
        }
        Ok(())
    }

    /// `(I+1(beta), I-1(beta))` for row `row`. At `beta = 0` the angle-resolved
    /// values at `theta = 0` are returned, the limit of `I(beta) / (beta^2 / 2)`.
    pub fn integrated(&self, row: usize, weights: &ChannelWeights, beta: f64) -> Result<(f64, f64)> {
        self.check_beta(beta)?;
        let gp = self.plus[row].weighted(weights);
        let gm = self.minus[row].weighted(weights);
        if beta == 0.0 {
            return Ok((gp[0], gm[0]));
        }
        Ok((self.detector_integral(&gp, beta), self.detector_integral(&gm, beta)))
    }

    /// EMCD over diameters x collection angles (`beta_mrad`).
    pub fn emcd_map(&self, weights: &ChannelWeights, beta_mrad: &[f64]) -> Result<EmcdMap> {
        let mut i_plus = Vec::with_capacity(self.d_nm.len() * beta_mrad.len());
        let mut i_minus = Vec::with_capacity(i_plus.capacity());
        for row in 0..self.d_nm.len() {
            for &b in beta_mrad {
                let (p, m) = self.integrated(row, weights, mrad_to_rad(b))?;
                i_plus.push(p);
                i_minus.push(m);
            }
        }
        Ok(EmcdMap::new(
            MapKind::DiameterCollection,
            self.d_nm.clone(),
            beta_mrad.to_vec(),
            i_plus,
            i_minus,
            FloorScope::Row,
        ))
    }

    /// Collection angle in mrad maximizing the shot-noise SNR for row `row`
    /// over the positive entries of `beta_mrad`.
    pub fn optimal_beta(&self, row: usize, weights: &ChannelWeights, beta_mrad: &[f64]) -> Result<f64> {
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for &b in beta_mrad.iter().filter(|&&b| b > 0.0) {
            let (p, m) = self.integrated(row, weights, mrad_to_rad(b))?;
            let s = snr(p, m, 1.0)?;
            if s > best.0 {
                best = (s, b);
            }
        }
        if best.1.is_nan() {
            return Err(Error::Domain("no positive collection angle to optimize over".into()));
        }
        Ok(best.1)
    }
}

/// Axes of an [`EmcdMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// Rows: displacement `R` (nm); columns: scattering angle `theta` (mrad).
    DisplacementAngle,
    /// Rows: particle diameter `d` (nm); columns: collection angle `beta` (mrad).
    DiameterCollection,
}

impl MapKind {
    pub fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            MapKind::DisplacementAngle => ("R_nm", "theta_mrad"),
            MapKind::DiameterCollection => ("d_nm", "beta_mrad"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum FloorScope {
    Map,
    Row,
}

/// EMCD values with their companion intensities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmcdMap {
    pub kind: MapKind,
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub i_plus: Vec<f64>,
    pub i_minus: Vec<f64>,
    /// `None` marks cells below the intensity floor.
    pub emcd: Vec<Option<f64>>,
}

impl EmcdMap {
    fn new(
        kind: MapKind,
        rows: Vec<f64>,
        cols: Vec<f64>,
        i_plus: Vec<f64>,
        i_minus: Vec<f64>,
        scope: FloorScope,
    ) -> Self {
        let n_cols = cols.len();
        let sums: Vec<f64> = i_plus.iter().zip(&i_minus).map(|(a, b)| a + b).collect();
        let global = sums.iter().copied().fold(0.0, f64::max);
        let emcd = sums
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let reference = match scope {
                    FloorScope::Map => global,
                    FloorScope::Row => {
                        let row = k / n_cols;
                        sums[row * n_cols..(row + 1) * n_cols].iter().copied().fold(0.0, f64::max)
                    }
                };
                if s < INTENSITY_FLOOR * reference {
                    None
                } else {
                    emcd(i_plus[k], i_minus[k])
                }
            })
            .collect();
        Self {
            kind,
            rows,
            cols,
            i_plus,
            i_minus,
            emcd,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.emcd[row * self.cols.len() + col]
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        let n = self.cols.len();
        &self.emcd[row * n..(row + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.emcd.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }
}
