//! Radial matrix element of the spherical Bessel function `j1(Q r)`.

use super::orbital::RadialOrbital;
use crate::error::Result;
use crate::special_math::{integrate_adaptive, spherical_bessel_j1};

const REL_TOL: f64 = 1e-8;

/// Radius beyond which the overlap density `R_f R_i r^2` is negligible.
fn overlap_cutoff(initial: &RadialOrbital, final_: &RadialOrbital) -> f64 {
    let power = (initial.n + final_.n) as f64;
    let decay = initial.zeta() + final_.zeta();
    (power + 60.0) / decay
}

/// `<j1(Q)> = int_0^inf R_f(r) j1(Q r) R_i(r) r^2 dr`.
pub fn radial_matrix_element(q: f64, initial: &RadialOrbital, final_: &RadialOrbital) -> Result<f64> {
    if q == 0.0 {
        return Ok(0.0);
    }
    let r_end = overlap_cutoff(initial, final_);
    let breaks = ((q * r_end / std::f64::consts::PI).ceil() as usize).clamp(4, 400);
    let scale = dipole_moment(initial, final_)?.abs() * q.min(1.0);
    integrate_adaptive(
        |r| final_.value(r) * spherical_bessel_j1(q * r) * initial.value(r) * r * r,
        0.0,
        r_end,
        breaks,
        REL_TOL,
        1e-14 * scale,
    )
}

/// `int_0^inf R_f(r) r^3 R_i(r) dr`; `<j1(Q)> / Q` tends to a third of this.
pub fn dipole_moment(initial: &RadialOrbital, final_: &RadialOrbital) -> Result<f64> {
    let r_end = overlap_cutoff(initial, final_);
    integrate_adaptive(
        |r| final_.value(r) * r.powi(3) * initial.value(r),
        0.0,
        r_end,
        4,
        1e-12,
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::orbital::slater_orbital;
    use num_complex::Complex64;

    // Closed form for Slater orbitals: with s = zeta_i + zeta_f and the
    // overlap density N r^p e^{-s r}, using
    // int r^k e^{-s r} e^{iQr} dr = k! / (s - iQ)^{k+1}.
    fn closed_form(q: f64, i: &RadialOrbital, f: &RadialOrbital) -> f64 {
        let s = i.zeta() + f.zeta();
        let p = (i.n + f.n) as i32; // r^{n_i-1} r^{n_f-1} r^2
        let z = Complex64::new(s, -q);
        let fact = |k: i32| (1..=k).map(|x| x as f64).product::<f64>();
        // j1(x) = sin x / x^2 - cos x / x
        let sin_part = (fact(p - 2) / z.powi(p - 1)).im / (q * q);
        let cos_part = (fact(p - 1) / z.powi(p)).re / q;
        i.norm * f.norm * (sin_part - cos_part)
    }

    #[test]
    fn vanishes_at_zero() {
        let i = slater_orbital("Fe", 2, 1).unwrap();
        let f = slater_orbital("Fe", 3, 2).unwrap();
        assert_eq!(radial_matrix_element(0.0, &i, &f).unwrap(), 0.0);
    }

    #[test]
    fn small_q_slope() {
        let i = slater_orbital("Fe", 2, 1).unwrap();
        let f = slater_orbital("Fe", 3, 2).unwrap();
        let q = 1e-4;
        let slope = radial_matrix_element(q, &i, &f).unwrap() / q;
        let want = dipole_moment(&i, &f).unwrap() / 3.0;
        assert!(((slope - want) / want).abs() < 1e-7);
    }

    #[test]
    fn matches_closed_form() {
        let i = slater_orbital("Fe", 2, 1).unwrap();
        let f = slater_orbital("Fe", 3, 2).unwrap();
        for q in [0.3, 0.5, 2.0, 8.0, 25.0] {
            let got = radial_matrix_element(q, &i, &f).unwrap();
            let want = closed_form(q, &i, &f);
            assert!(((got - want) / want).abs() < 1e-8, "Q = {q}: {got} vs {want}");
        }
    }

    #[test]
    fn fine_trapezoid_reference_at_half_bohr_inverse() {
        let i = slater_orbital("Fe", 2, 1).unwrap();
        let f = slater_orbital("Fe", 3, 2).unwrap();
        let q = 0.5;
        let n = 1_000_000;
        let r_end = 40.0;
        let h = r_end / n as f64;
        let mut reference = 0.0;
        for k in 1..n {
            let r = k as f64 * h;
            reference += f.value(r) * spherical_bessel_j1(q * r) * i.value(r) * r * r;
        }
        reference *= h;
        let got = radial_matrix_element(q, &i, &f).unwrap();
        assert!(((got - reference) / reference).abs() < 1e-6);
    }

    #[test]
    fn decays_at_large_momentum() {
        let i = slater_orbital("Fe", 2, 1).unwrap();
        let f = slater_orbital("Fe", 3, 2).unwrap();
        let peak = (1..200)
            .map(|k| radial_matrix_element(0.05 * k as f64, &i, &f).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(radial_matrix_element(200.0, &i, &f).unwrap().abs() < 1e-6 * peak);
    }
}
