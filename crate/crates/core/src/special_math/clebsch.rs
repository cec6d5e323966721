//! Clebsch-Gordan coefficients from Racah's closed-form factorial sum.

use crate::error::{Error, Result};

const MAX_FACTORIAL: usize = 170;

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0 && (n as usize) <= MAX_FACTORIAL);
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn doubled(x: f64, name: &str) -> Result<i32> {
    let t = 2.0 * x;
    if !t.is_finite() || (t - t.round()).abs() > 1e-9 {
        return Err(Error::Domain(format!("{name} = {x} is not a multiple of 1/2")));
    }
    Ok(t.round() as i32)
}

fn check_pair(tj: i32, tm: i32, name: &str) -> Result<()> {
    if tj < 0 {
        return Err(Error::Domain(format!("{name} must be non-negative")));
    }
    if tm.abs() > tj || (tj - tm) % 2 != 0 {
        return Err(Error::Domain(format!(
            "projection {}/2 is not allowed for {name} = {}/2",
            tm, tj
        )));
    }
    if tj as usize > MAX_FACTORIAL / 2 {
        return Err(Error::Domain(format!("{name} too large")));
    }
    Ok(())
}

/// `<j1 m1; j2 m2 | J M>` with half-integer arguments given as `f64`.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    clebsch_gordan_doubled(
        doubled(j1, "j1")?,
        doubled(m1, "m1")?,
        doubled(j2, "j2")?,
        doubled(m2, "m2")?,
        doubled(j, "J")?,
        doubled(m, "M")?,
    )
}

/// Same as [`clebsch_gordan`] with every argument doubled (`2 j`, `2 m`).
///
/// Invalid quantum numbers are a domain error; couplings forbidden by the
/// selection rules (`M != m1 + m2`, triangle inequality) give exactly 0.
pub fn clebsch_gordan_doubled(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> Result<f64> {
    check_pair(tj1, tm1, "j1")?;
    check_pair(tj2, tm2, "j2")?;
    check_pair(tj, tm, "J")?;
    if tm != tm1 + tm2 {
        return Ok(0.0);
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }
    // All combinations below are integers.
    let a = (tj1 + tj2 - tj) / 2; // j1 + j2 - J
    let b = (tj1 - tm1) / 2; // j1 - m1
    let c = (tj2 + tm2) / 2; // j2 + m2
    let d = (tj - tj2 + tm1) / 2; // J - j2 + m1
    let e = (tj - tj1 - tm2) / 2; // J - j1 - m2
    let prefactor = ((tj + 1) as f64 * factorial((tj + tj1 - tj2) / 2) * factorial((tj - tj1 + tj2) / 2)
        * factorial(a)
        / factorial((tj1 + tj2 + tj) / 2 + 1))
        .sqrt()
        * (factorial((tj + tm) / 2)
            * factorial((tj - tm) / 2)
            * factorial((tj1 - tm1) / 2)
            * factorial((tj1 + tm1) / 2)
            * factorial((tj2 - tm2) / 2)
            * factorial((tj2 + tm2) / 2))
            .sqrt();
    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(c - k)
            * factorial(d + k)
            * factorial(e + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    Ok(prefactor * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singlet_from_two_vectors() {
        let v = clebsch_gordan(1.0, 1.0, 1.0, -1.0, 0.0, 0.0).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn selection_rule_gives_zero() {
        assert_eq!(clebsch_gordan(1.0, 1.0, 1.0, 0.0, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn coupling_with_scalar() {
        for (j, m) in [(0.5, -0.5), (1.0, 1.0), (2.5, 1.5), (3.0, -2.0)] {
            assert!((clebsch_gordan(j, m, 0.0, 0.0, j, m).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn known_spin_orbit_values() {
        // <1 0; 1/2 1/2 | 3/2 1/2> = sqrt(2/3)
        let v = clebsch_gordan(1.0, 0.0, 0.5, 0.5, 1.5, 0.5).unwrap();
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        // <1 1; 1/2 -1/2 | 1/2 1/2> = sqrt(2/3)
        let v = clebsch_gordan(1.0, 1.0, 0.5, -0.5, 0.5, 0.5).unwrap();
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        // <1 -1; 1 1 | 2 0> = sqrt(1/6)
        let v = clebsch_gordan(1.0, -1.0, 1.0, 1.0, 2.0, 0.0).unwrap();
        assert!((v - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_quantum_numbers() {
        assert!(clebsch_gordan(1.0, 2.0, 1.0, 0.0, 1.0, 2.0).is_err());
        assert!(clebsch_gordan(0.3, 0.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(clebsch_gordan(1.0, 0.5, 1.0, 0.0, 1.0, 0.5).is_err());
        assert!(clebsch_gordan(-1.0, 0.0, 1.0, 0.0, 1.0, 0.0).is_err());
    }
}
