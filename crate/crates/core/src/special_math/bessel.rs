//! Cylindrical Bessel functions of the first kind for integer order, and the
//! spherical Bessel function `j1`.
//!
//! Small and moderate arguments use Miller's downward recurrence normalized
//! with the sum rule `J0 + 2 (J2 + J4 + ...) = 1`, which is stable for every
//! order. Large arguments use the Hankel asymptotic expansion for `J0`/`J1`
//! followed by upward recurrence, which is stable while the order stays
//! below the argument.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Highest supported order.
pub const MAX_ORDER: usize = 64;

/// Above this argument `J0`/`J1` come from the asymptotic expansion.
const ASYMPTOTIC_THRESHOLD: f64 = 30.0;

const RESCALE_LIMIT: f64 = 1e250;

/// `J_order(x)` for `0 <= order <= 64`, `x >= 0`.
pub fn bessel_j(order: usize, x: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    let mut buf = [0.0; MAX_ORDER + 1];
    bessel_j_orders(x, &mut buf[..=order]);
    Ok(buf[order])
}

/// `J_n(x)` for signed integer order via `J_{-n} = (-1)^n J_n`.
///
/// Panics on orders outside `[-64, 64]` or negative `x`; intended for
/// internal loops whose arguments are validated upstream.
pub fn bessel_j_signed(order: i32, x: f64) -> f64 {
    let n = order.unsigned_abs() as usize;
    let v = bessel_j(n, x).expect("bessel_j_signed: argument out of range");
    if order < 0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Fill `out[n] = J_n(x)` for `n = 0 .. out.len()`.
///
/// `x` must be finite and non-negative; orders above [`MAX_ORDER`] are
/// accepted here but lose the accuracy guarantee.
pub fn bessel_j_orders(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let n_max = out.len() - 1;
    debug_assert!(x >= 0.0 && x.is_finite());
    if x == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if x >= ASYMPTOTIC_THRESHOLD && (n_max as f64) < x {
        out[0] = asymptotic_j(0, x);
        if n_max >= 1 {
            out[1] = asymptotic_j(1, x);
        }
        for n in 1..n_max {
            out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
        }
        return;
    }
    miller(x, out);
}

/// Downward recurrence from an order well above `max(n_max, x)`.
fn miller(x: f64, out: &mut [f64]) {
    let n_max = out.len() - 1;
    let top = n_max.max(x.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    out.fill(0.0);
    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1e-300; // J_k, arbitrary seed
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let order = k - 1;
        if j_cur.abs() > RESCALE_LIMIT {
            j_cur /= RESCALE_LIMIT;
            j_next /= RESCALE_LIMIT;
            even_sum /= RESCALE_LIMIT;
            for v in out.iter_mut() {
                *v /= RESCALE_LIMIT;
            }
        }
        if order <= n_max {
            out[order] = j_cur;
        }
        if order > 0 && order % 2 == 0 {
            even_sum += j_cur;
        }
    }
    // j_cur now holds the unnormalized J_0.
    let norm = j_cur + 2.0 * even_sum;
    for v in out.iter_mut() {
        *v /= norm;
    }
}

/// Hankel asymptotic expansion of `J_nu(x)` for large `x`.
fn asymptotic_j(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() >= last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        // k odd -> Q, k even -> P, with alternating signs within each series.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    // chi = x - (nu/2 + 1/4) pi; expand cos/sin of the shift exactly so the
    // large argument keeps full precision.
    let shift = (nu as f64 / 2.0 + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (ss, cs) = shift.sin_cos();
    let cos_chi = cx * cs + sx * ss;
    let sin_chi = sx * cs - cx * ss;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Below this argument `j1` uses its Taylor series.
const J1_SERIES_SWITCH: f64 = 0.1;

/// Spherical Bessel function `j1(x) = sin(x)/x^2 - cos(x)/x`.
pub fn spherical_bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    if ax < J1_SERIES_SWITCH {
        let x2 = x * x;
        // x/3 - x^3/30 + x^5/840 - x^7/45360
        return x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)));
    }
    let (s, c) = x.sin_cos();
    s / (x * x) - c / x
}
