//! Radial quadrature grids and functions sampled on them.

use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Default Gauss-Legendre order of each panel.
pub const DEFAULT_PANEL_ORDER: usize = 10;

/// Composite Gauss-Legendre grid for integrals of the form `int f(r) r dr`.
///
/// The grid is a sequence of contiguous panels `[b_k, b_{k+1}]` starting at
/// `r = 0`, each carrying the same number of Legendre nodes. `weights`
/// already include the factor `r`, so `sum_i w_i f(r_i)` approximates
/// `int_0^{r_max} f(r) r dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    breaks: Vec<f64>,
    panel_order: usize,
}

impl RadialGrid {
    /// Build from explicit panel boundaries. `breaks` must start at 0 and be
    /// strictly increasing.
    pub fn from_breaks(breaks: Vec<f64>, panel_order: usize) -> Result<Self> {
        if breaks.len() < 2 || breaks[0] != 0.0 {
            return Err(Error::Domain("panel boundaries must start at r = 0".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("panel boundaries must be finite and strictly increasing".into()));
        }
        if panel_order == 0 {
            return Err(Error::Domain("panel order must be positive".into()));
        }
        let (x, w) = gauss_legendre(panel_order);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * panel_order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                let r = mid + half * xi;
                nodes.push(r);
                weights.push(wi * half * r);
            }
        }
        Ok(Self {
            nodes,
            weights,
            breaks,
            panel_order,
        })
    }

    /// Uniform panels on `[0, r_max]` whose mean node spacing does not exceed
    /// `spacing`.
    pub fn uniform(r_max: f64, spacing: f64, panel_order: usize) -> Result<Self> {
        if !(r_max > 0.0 && spacing > 0.0) {
            return Err(Error::Domain("grid extent and spacing must be positive".into()));
        }
        let panel_width = spacing * panel_order as f64;
        let panels = (r_max / panel_width).ceil().max(1.0) as usize;
        let breaks = (0..=panels)
            .map(|i| r_max * i as f64 / panels as f64)
            .collect();
        Self::from_breaks(breaks, panel_order)
    }

    /// Dense uniform panels on `[0, inner]`, then geometrically stretched
    /// panels out to `r_max`. Outer panel widths grow by `stretch` per panel
    /// and are capped at `max_outer_width`.
    pub fn piecewise(
        inner: f64,
        spacing: f64,
        r_max: f64,
        stretch: f64,
        max_outer_width: f64,
        panel_order: usize,
    ) -> Result<Self> {
        if !(inner > 0.0 && r_max >= inner && stretch >= 1.0 && max_outer_width > 0.0) {
            return Err(Error::Domain("invalid piecewise grid parameters".into()));
        }
        let inner_grid = Self::uniform(inner, spacing, panel_order)?;
        let mut breaks = inner_grid.breaks;
        let mut width = spacing * panel_order as f64;
        let mut r = inner;
        while r < r_max * (1.0 - 1e-12) {
            width = (width * stretch).min(max_outer_width);
            let next = if r + 1.5 * width >= r_max { r_max } else { r + width };
            breaks.push(next);
            r = next;
        }
        Self::from_breaks(breaks, panel_order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn panel_order(&self) -> usize {
        self.panel_order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Upper end of the grid support.
    pub fn r_max(&self) -> f64 {
        *self.breaks.last().expect("grid has at least one panel")
    }

    /// Largest gap between neighbouring nodes.
    pub fn max_spacing(&self) -> f64 {
        let first = self.nodes[0];
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(first, f64::max)
            .max(self.r_max() - self.nodes[self.nodes.len() - 1])
    }

    /// `int_0^{r_max} g(r) r dr` for a real callable.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * g(r)).sum()
    }

    /// Weighted sum of sampled complex values.
    pub fn integrate_samples(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, &w)| v * w).sum()
    }
}

/// A complex function sampled on a [`RadialGrid`].
///
/// Between nodes the function is evaluated by cubic Lagrange interpolation
/// through the four nearest nodes; outside `[0, r_max]` it is zero.
#[derive(Debug, Clone)]
pub struct SampledRadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
}

impl SampledRadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Arc<RadialGrid>, f: F) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `int |f|^2 r dr` over the grid support.
    pub fn power(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum()
    }

    /// Pointwise product with another function on the same grid.
    pub fn mul(&self, other: &SampledRadialFunction) -> Result<SampledRadialFunction> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(Error::GridMismatch("product of functions on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    pub fn scale(&self, factor: Complex64) -> SampledRadialFunction {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Value at an arbitrary radius.
    pub fn eval(&self, r: f64) -> Complex64 {
        let nodes = self.grid.nodes();
        if r < 0.0 || r > self.grid.r_max() {
            return Complex64::new(0.0, 0.0);
        }
        let n = nodes.len();
        if n < 4 {
            // not enough support for a cubic; nearest neighbour
            let i = nodes.partition_point(|&x| x < r).min(n - 1);
            return self.values[i];
        }
        let upper = nodes.partition_point(|&x| x < r);
        let start = upper.saturating_sub(2).min(n - 4);
        let xs = &nodes[start..start + 4];
        let ys = &self.values[start..start + 4];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let mut basis = 1.0;
            for j in 0..4 {
                if i != j {
                    basis *= (r - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += ys[i] * basis;
        }
        acc
    }
}
