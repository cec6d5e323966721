//! Order-n Hankel transforms `int f(r) J_n(q r) r dr` of sampled functions.

use super::bessel::{bessel_j_orders, MAX_ORDER};
use super::grid::{RadialGrid, SampledRadialFunction};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Beyond this value of `q * r_max` the grid must carry enough nodes per
/// oscillation of `J_n(q r)`.
const OSCILLATORY_ONSET: f64 = 50.0;
const MIN_NODES_PER_PERIOD: f64 = 8.0;

fn check_order(order: i32) -> Result<()> {
    if order.unsigned_abs() as usize > MAX_ORDER {
        return Err(Error::Domain(format!("Hankel order {order} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// Fails when `q` lies in the oscillatory regime and the grid is too coarse.
pub fn check_resolution(grid: &RadialGrid, q: f64) -> Result<()> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("transform variable must be finite and >= 0, got {q}")));
    }
    if q * grid.r_max() <= OSCILLATORY_ONSET {
        return Ok(());
    }
    let available = 2.0 * std::f64::consts::PI / (q * grid.max_spacing());
    if available < MIN_NODES_PER_PERIOD {
        return Err(Error::Resolution {
            q,
            needed: MIN_NODES_PER_PERIOD,
            available,
        });
    }
    Ok(())
}

#[inline]
fn signed(order: i32, table: &[f64]) -> f64 {
    let n = order.unsigned_abs() as usize;
    let v = table[n];
    if order < 0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `int_0^{r_max} f(r) J_order(q r) r dr` using the grid's quadrature weights.
pub fn hankel_transform(order: i32, f: &SampledRadialFunction, q: f64) -> Result<Complex64> {
    check_order(order)?;
    let grid = f.grid();
    check_resolution(grid, q)?;
    let n = order.unsigned_abs() as usize;
    let mut table = vec![0.0; n + 1];
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&r, &w), v) in grid.nodes().iter().zip(grid.weights()).zip(f.values()) {
        bessel_j_orders(q * r, &mut table);
        acc += v * (w * signed(order, &table));
    }
    Ok(acc)
}

/// Transforms many `(order, samples)` pairs sharing one grid at every `q` of
/// `q_grid`. Returns `out[item][iq]`.
///
/// Each `q` fills one table of `J_0 .. J_nmax` per node, shared across all
/// items, so the cost is dominated by the dot products.
pub fn hankel_transform_many(
    grid: &RadialGrid,
    items: &[(i32, &[Complex64])],
    q_grid: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let mut n_max = 0usize;
    for (order, samples) in items {
        check_order(*order)?;
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        n_max = n_max.max(order.unsigned_abs() as usize);
    }
    for &q in q_grid {
        check_resolution(grid, q)?;
    }
    let nodes = grid.nodes();
    let weights = grid.weights();
    let stride = n_max + 1;
    let per_q: Vec<Vec<Complex64>> = q_grid
        .par_iter()
        .map(|&q| {
            let mut table = vec![0.0; nodes.len() * stride];
            for (j, &r) in nodes.iter().enumerate() {
                bessel_j_orders(q * r, &mut table[j * stride..(j + 1) * stride]);
                for v in &mut table[j * stride..(j + 1) * stride] {
                    *v *= weights[j];
                }
            }
            items
                .iter()
                .map(|(order, samples)| {
                    samples
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * signed(*order, &table[j * stride..(j + 1) * stride]))
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut out = vec![Vec::with_capacity(q_grid.len()); items.len()];
    for row in per_q {
        for (k, v) in row.into_iter().enumerate() {
            out[k].push(v);
        }
    }
    Ok(out)
}
