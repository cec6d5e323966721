//! Incoherent channel sums, azimuthal averages, the dichroic ratio and the
//! shot-noise figure of merit.

use super::field::PolarIntensity;
use crate::atomic::{Channel, ChannelWeights};
use crate::error::{Error, Result};

/// Cells whose summed intensity falls below this fraction of the map
/// maximum have no defined EMCD value.
pub const INTENSITY_FLOOR: f64 = 1e-9;

/// `I_m = sum_mu C^mu |psi_{m,mu}|^2`. Channels never interfere.
pub fn channel_sum(parts: &[(Channel, &PolarIntensity)], weights: &ChannelWeights) -> Result<PolarIntensity> {
    let (_, first) = parts
        .first()
        .ok_or_else(|| Error::Domain("channel sum needs at least one channel".into()))?;
    if parts.iter().any(|(_, p)| !p.same_grid(first)) {
        return Err(Error::GridMismatch("channel intensities on different polar grids".into()));
    }
    let mut values = vec![0.0; first.values.len()];
    for (channel, part) in parts {
        let w = weights.get(*channel);
        for (acc, v) in values.iter_mut().zip(&part.values) {
            *acc += w * v;
        }
    }
    Ok(PolarIntensity {
        q: first.q.clone(),
        phi: first.phi.clone(),
        values,
    })
}

/// Mean over the detector azimuth at each `q`.
pub fn azimuthal_average(intensity: &PolarIntensity) -> Vec<f64> {
    let n = intensity.phi.len() as f64;
    (0..intensity.q.len())
        .map(|iq| intensity.row(iq).iter().sum::<f64>() / n)
        .collect()
}

/// `2 (I+ - I-) / (I+ + I-)`, or `None` when the denominator vanishes.
pub fn emcd(i_plus: f64, i_minus: f64) -> Option<f64> {
    let sum = i_plus + i_minus;
    if !(sum > 0.0) || !sum.is_finite() {
        return None;
    }
    Some(2.0 * (i_plus - i_minus) / sum)
}

/// Shot-noise limited `|I+ - I-| sqrt(dose) / sqrt(I+ + I-)`.
pub fn snr(i_plus: f64, i_minus: f64, dose: f64) -> Result<f64> {
    if !(dose > 0.0) {
        return Err(Error::Domain(format!("dose must be positive, got {dose}")));
    }
    let sum = i_plus + i_minus;
    if !(sum > 0.0) {
        return Ok(0.0);
    }
    Ok((i_plus - i_minus).abs() * dose.sqrt() / sum.sqrt())
}
