//! Brute-force reference: the scattered wave `psi_m(r - R) e^{i mu phi} f_mu(r)`
//! sampled on a Cartesian grid and taken to the diffraction plane with a 2D
//! FFT, independent of the cylindrical-harmonic machinery.

use crate::atomic::{Channel, KernelSpectrum};
use crate::error::{Error, Result};
use crate::probe::{AzimuthalExpansion, Displacement, VortexProbe};
use crate::scattering::{outgoing_coefficients, DiffractionField};
use crate::units::nm_to_bohr;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Square sampling grid in real space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Samples per side, a power of two.
    pub n: usize,
    /// Side length in bohr.
    pub extent: f64,
    /// Pixels whose centres lie within `core_radius` bohr of the atom are
    /// averaged over `core_subdivisions^2` sub-samples (1 disables).
    pub core_subdivisions: usize,
    pub core_radius: f64,
    /// Pixels straddling the interaction radius are averaged over
    /// `edge_subdivisions^2` sub-samples (1 disables).
    pub edge_subdivisions: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 2048,
            extent: nm_to_bohr(12.0),
            core_subdivisions: 1,
            core_radius: 1.0,
            edge_subdivisions: 4,
        }
    }
}

impl GridSpec {
    pub fn pixel(&self) -> f64 {
        self.extent / self.n as f64
    }

    /// Frequency-lattice spacing in inverse bohr.
    pub fn dq(&self) -> f64 {
        2.0 * PI / self.extent
    }

    /// Checks the grid against the field it is meant to hold: `extent` at
    /// least four times the larger of `rho` and `ring + R`, and a pixel
    /// finer than `pi / q_band`.
    pub fn validate(&self, rho: f64, ring_plus_r: f64, q_band: f64) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 16 {
            return Err(Error::Domain(format!("grid size {} must be a power of two >= 16", self.n)));
        }
        if self.core_subdivisions == 0 || self.edge_subdivisions == 0 {
            return Err(Error::Domain("sub-sample counts must be at least 1".into()));
        }
        let need = 4.0 * rho.max(ring_plus_r);
        if self.extent < need {
            return Err(Error::GridExtent(format!(
                "Cartesian extent {:.1} bohr is below 4 x {:.1} bohr",
                self.extent,
                need / 4.0
            )));
        }
        if self.pixel() >= PI / q_band {
            return Err(Error::BandLimit(format!(
                "pixel {:.4} bohr is not finer than pi / {q_band:.3}",
                self.pixel()
            )));
        }
        Ok(())
    }
}

/// Kernel multiplying the displaced probe.
#[derive(Debug, Clone, Copy)]
pub enum OracleKernel<'a> {
    /// `f_mu(r) e^{i mu phi}` inside the interaction disk, zero outside.
    Channel {
        channel: Channel,
        image: &'a KernelImage,
    },
    /// Unit kernel over the whole grid: the bare probe.
    Unit,
}

#[derive(Debug, Clone)]
struct PixelSamples {
    index: usize,
    /// `(x, y, f(r) / i^|mu|)` per sub-sample.
    samples: Vec<(f64, f64, f64)>,
}

/// Real radial kernel `f_mu(r) / i^mu` evaluated at every pixel (and
/// sub-sample) inside the interaction disk of a grid. Shared by the channels
/// `mu` and `-mu` and by every probe position.
#[derive(Debug, Clone)]
pub struct KernelImage {
    spec: GridSpec,
    abs_mu: u32,
    rho: f64,
    pixels: Vec<PixelSamples>,
}

impl KernelImage {
    pub fn new(spectrum: &KernelSpectrum, rho: f64, spec: GridSpec) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::Domain("interaction radius must be positive".into()));
        }
        let n = spec.n;
        let h = spec.pixel();
        let centre = (n / 2) as f64;
        let reference = if spectrum.abs_mu() == 0 { Channel::Zero } else { Channel::Plus };
        let radial = |r: f64| (spectrum.value(reference, r) / reference.phase()).re;
        let reach = (rho / h).ceil() as usize + 2;
        let lo = (n / 2).saturating_sub(reach);
        let hi = (n / 2 + reach).min(n - 1);
        let pixels: Vec<PixelSamples> = (lo..=hi)
            .into_par_iter()
            .flat_map_iter(|iy| {
                let y = (iy as f64 - centre) * h;
                (lo..=hi).filter_map(move |ix| {
                    let x = (ix as f64 - centre) * h;
                    let r = x.hypot(y);
                    if r > rho + h {
                        return None;
                    }
                    let sub = if r < spec.core_radius {
                        spec.core_subdivisions
                    } else if (r - rho).abs() <= h {
                        spec.edge_subdivisions
                    } else {
                        1
                    };
                    let s = sub as f64;
                    let mut samples = Vec::with_capacity(sub * sub);
                    for a in 0..sub {
                        for b in 0..sub {
                            let (sx, sy) = if sub == 1 {
                                (x, y)
                            } else {
                                (x + h * ((a as f64 + 0.5) / s - 0.5), y + h * ((b as f64 + 0.5) / s - 0.5))
                            };
                            let sr = sx.hypot(sy);
                            if sr <= rho {
                                samples.push((sx, sy, radial(sr)));
                            }
                        }
                    }
                    // weight of each sub-sample is 1 / sub^2, including the
                    // ones outside the disk that contribute zero
                    let norm = 1.0 / (s * s);
                    for v in &mut samples {
                        v.2 *= norm;
                    }
                    Some(PixelSamples {
                        index: iy * n + ix,
                        samples,
                    })
                })
            })
            .collect();
        Ok(Self {
            spec,
            abs_mu: spectrum.abs_mu(),
            rho,
            pixels,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Complex samples on an `n x n` grid, row-major in `y`.
#[derive(Debug, Clone)]
pub struct CartesianField {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl CartesianField {
    /// Coordinate of index `j` along either axis, atom at the grid centre.
    pub fn coordinate(&self, j: usize) -> f64 {
        (j as f64 - (self.spec.n / 2) as f64) * self.spec.pixel()
    }

    /// `sum |psi|^2 h^2`.
    pub fn power(&self) -> f64 {
        let h = self.spec.pixel();
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h
    }
}

/// Diffraction intensity `|psi~(q)|^2` on the FFT lattice.
#[derive(Debug, Clone)]
pub struct OracleDiffraction {
    pub spec: GridSpec,
    /// Row-major in `k_y`, FFT index order.
    pub intensity: Vec<f64>,
}

impl OracleDiffraction {
    /// Signed lattice index of FFT bin `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        let n = self.spec.n;
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// FFT bin of signed lattice index `s`.
    pub fn bin(&self, s: i64) -> usize {
        s.rem_euclid(self.spec.n as i64) as usize
    }

    pub fn at(&self, kx: i64, ky: i64) -> f64 {
        self.intensity[self.bin(ky) * self.spec.n + self.bin(kx)]
    }

    /// `(2 pi)^2 sum |psi~|^2 dq^2`.
    pub fn power(&self) -> f64 {
        let dq = self.spec.dq();
        4.0 * PI * PI * self.intensity.iter().sum::<f64>() * dq * dq
    }

    /// Lattice points with `|q| <= q_limit` as `(kx, ky)`.
    pub fn lattice_points(&self, q_limit: f64) -> Vec<(i64, i64)> {
        let reach = (q_limit / self.spec.dq()).floor() as i64;
        let mut out = Vec::new();
        for ky in -reach..=reach {
            for kx in -reach..=reach {
                if ((kx * kx + ky * ky) as f64).sqrt() * self.spec.dq() <= q_limit {
                    out.push((kx, ky));
                }
            }
        }
        out
    }
}

/// Samples `psi_m(r - R)` times the kernel on the grid of `spec`.
pub fn sample_field(
    probe: &VortexProbe,
    kernel: OracleKernel<'_>,
    displacement: Displacement,
    spec: GridSpec,
) -> Result<CartesianField> {
    let ring = probe.ring_radius()?;
    let rho = match kernel {
        OracleKernel::Channel { image, .. } => {
            if image.spec != spec {
                return Err(Error::GridMismatch("kernel image sampled on a different grid".into()));
            }
            image.rho
        }
        OracleKernel::Unit => 0.0,
    };
    spec.validate(rho, ring + displacement.radius(), probe.beam.aperture_q())?;
    let n = spec.n;
    let h = spec.pixel();
    let (cx, cy) = displacement.position();
    let centre = (n / 2) as f64;
    let m = probe.m();

    // the probe at one point, from the aperture integral
    let probe_at = |x: f64, y: f64| -> Result<Complex64> {
        let (dx, dy) = (x - cx, y - cy);
        let s = dx.hypot(dy);
        let f = probe.profile_exact(s)?;
        if m == 0 {
            return Ok(Complex64::new(f, 0.0));
        }
        if s == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(f * Complex64::from_polar(1.0, m as f64 * dy.atan2(dx)))
    };

    let values = match kernel {
        OracleKernel::Unit => {
            let rows = (0..n)
                .into_par_iter()
                .map(|iy| {
                    let y = (iy as f64 - centre) * h;
                    (0..n)
                        .map(|ix| probe_at((ix as f64 - centre) * h, y))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            rows.concat()
        }
        OracleKernel::Channel { channel, image } => {
            if channel.mu().unsigned_abs() != image.abs_mu {
                return Err(Error::Domain("kernel image computed for a different |mu|".into()));
            }
            let mu = channel.mu() as f64;
            let phase = channel.phase();
            let filled = image
                .pixels
                .par_iter()
                .map(|px| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(x, y, f) in &px.samples {
                        if f == 0.0 {
                            continue;
                        }
                        let winding = if mu == 0.0 || (x == 0.0 && y == 0.0) {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::from_polar(1.0, mu * y.atan2(x))
                        };
                        acc += f * winding * probe_at(x, y)?;
                    }
                    Ok((px.index, phase * acc))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut values = vec![Complex64::new(0.0, 0.0); n * n];
            for (index, v) in filled {
                values[index] = v;
            }
            values
        }
    };
    Ok(CartesianField { spec, values })
}

/// `|psi~(q)|^2` with `psi~(q) = (2 pi)^-2 int psi(r) e^{i q.r} d^2 r`.
pub fn diffract(field: &CartesianField) -> OracleDiffraction {
    let n = field.spec.n;
    let h = field.spec.pixel();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let mut data = field.values.clone();
    data.par_chunks_mut(n).for_each(|row| fft.process(row));
    // columns via transpose
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    transpose(&data, &mut t, n);
    t.par_chunks_mut(n).for_each(|col| fft.process(col));
    transpose(&t, &mut data, n);
    let scale = h * h / (4.0 * PI * PI);
    let intensity = data.par_iter().map(|v| (v * scale).norm_sqr()).collect();
    OracleDiffraction {
        spec: field.spec,
        intensity,
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    dst.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = src[j * n + i];
        }
    });
}

/// Samples the scattered wave and transforms it.
pub fn grid_scatter(
    probe: &VortexProbe,
    kernel: OracleKernel<'_>,
    displacement: Displacement,
    spec: GridSpec,
) -> Result<OracleDiffraction> {
    Ok(diffract(&sample_field(probe, kernel, displacement, spec)?))
}

/// Agreement between the polar pipeline and the oracle on the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// `||I_pipeline - I_oracle|| / ||I_oracle||` over the compared points.
    pub relative_l2: f64,
    pub points: usize,
}

/// Oracle and pipeline intensity at one lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSample {
    pub kx: i64,
    pub ky: i64,
    pub pipeline: f64,
    pub oracle: f64,
}

/// Evaluates the pipeline at every lattice point with `|q| <= q_limit`.
pub fn lattice_samples(
    oracle: &OracleDiffraction,
    expansion: &AzimuthalExpansion,
    kernel: &crate::atomic::TransitionKernel,
    q_limit: f64,
) -> Result<Vec<LatticeSample>> {
    let points = oracle.lattice_points(q_limit);
    let mut shells: BTreeMap<i64, usize> = BTreeMap::new();
    for &(kx, ky) in &points {
        let next = shells.len();
        shells.entry(kx * kx + ky * ky).or_insert(next);
    }
    let dq = oracle.spec.dq();
    let mut q = vec![0.0; shells.len()];
    for (&k2, &idx) in &shells {
        q[idx] = (k2 as f64).sqrt() * dq;
    }
    let field: DiffractionField = outgoing_coefficients(expansion, kernel, &q)?;
    Ok(points
        .iter()
        .map(|&(kx, ky)| {
            let iq = shells[&(kx * kx + ky * ky)];
            let phi = (ky as f64).atan2(kx as f64);
            LatticeSample {
                kx,
                ky,
                pipeline: field.amplitude(iq, phi).norm_sqr(),
                oracle: oracle.at(kx, ky),
            }
        })
        .collect())
}

impl Comparison {
    pub fn from_samples(samples: &[LatticeSample]) -> Self {
        let (diff, norm) = samples.iter().fold((0.0, 0.0), |(d, n), s| {
            (d + (s.pipeline - s.oracle).powi(2), n + s.oracle * s.oracle)
        });
        Comparison {
            relative_l2: (diff / norm).sqrt(),
            points: samples.len(),
        }
    }
}

/// Compares pipeline and oracle intensities over `|q| <= q_limit`.
pub fn compare_with_pipeline(
    oracle: &OracleDiffraction,
    expansion: &AzimuthalExpansion,
    kernel: &crate::atomic::TransitionKernel,
    q_limit: f64,
) -> Result<Comparison> {
    Ok(Comparison::from_samples(&lattice_samples(oracle, expansion, kernel, q_limit)?))
}

/// Relative L2 distance between two oracle patterns over `|q| <= q_limit`,
/// matching lattice points by physical momentum. `fine` must have an
/// integer multiple of the lattice density of `coarse`.
pub fn pattern_distance(coarse: &OracleDiffraction, fine: &OracleDiffraction, q_limit: f64) -> Result<f64> {
    let ratio = coarse.spec.dq() / fine.spec.dq();
    let step = ratio.round() as i64;
    if step < 1 || (ratio - step as f64).abs() > 1e-9 {
        return Err(Error::GridMismatch("lattices are not commensurate".into()));
    }
    let (mut diff, mut norm) = (0.0, 0.0);
    for (kx, ky) in coarse.lattice_points(q_limit) {
        let a = coarse.at(kx, ky);
        let b = fine.at(kx * step, ky * step);
        diff += (a - b).powi(2);
        norm += b * b;
    }
    Ok((diff / norm).sqrt())
}
