use approx::assert_relative_eq;
use std::sync::OnceLock;
use vortex_emcd::atomic::{Channel, ChannelWeights};
use vortex_emcd::probe::Displacement;
use vortex_emcd::scattering::{emcd, Simulation, SimulationSetup};
use vortex_emcd::units::mrad_to_rad;
use vortex_emcd::Error;

fn sim() -> &'static Simulation {
    static SIM: OnceLock<Simulation> = OnceLock::new();
    SIM.get_or_init(|| Simulation::new(&SimulationSetup::default()).unwrap())
}

fn theta_mrad() -> Vec<f64> {
    (0..=40).map(|k| 0.25 * k as f64).collect()
}

#[test]
fn mirrored_beam_channel_and_weights_reproduce_intensities() {
    let s = sim();
    let q = s.q_of(&theta_mrad().iter().map(|&t| mrad_to_rad(t)).collect::<Vec<_>>());
    let w = ChannelWeights::new(0.2, 0.5, 0.3).unwrap();
    for r in [0.0, 0.45, 1.3] {
        let d = Displacement::nm(r).unwrap();
        let plus = s.channel_means(1, d, &q).unwrap().weighted(&w);
        let minus = s.channel_means(-1, d, &q).unwrap().weighted(&w.swapped());
        for (a, b) in plus.iter().zip(&minus) {
            assert_relative_eq!(*a, *b, max_relative = 1e-10);
        }
        let e_w: Vec<_> = plus.iter().zip(s.channel_means(-1, d, &q).unwrap().weighted(&w)).map(|(a, b)| emcd(*a, b)).collect();
        let flipped_plus = s.channel_means(1, d, &q).unwrap().weighted(&w.swapped());
        let e_s: Vec<_> = flipped_plus.iter().zip(&minus).map(|(a, b)| emcd(*a, *b)).collect();
        for (x, y) in e_w.iter().zip(&e_s) {
            assert!((x.unwrap() + y.unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn maps_are_reproducible() {
    let s = sim();
    let r = [0.0, 0.4, 0.8, 1.6];
    let a = s.emcd_map(&r, &theta_mrad()).unwrap();
    let b = s.emcd_map(&r, &theta_mrad()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n_rows(), 4);
    assert_eq!(a.n_cols(), 41);
    assert!(a.max_abs() <= 2.0);
}

#[test]
fn point_particle_row_is_the_centered_beta_integral() {
    let s = sim();
    let theta = theta_mrad();
    let table = s.detector_table(&[0.0, 1.0], &theta, 0.05).unwrap();
    let w = s.weights;
    let t: Vec<f64> = theta.iter().map(|&x| mrad_to_rad(x)).collect();
    let centered = s.channel_means(1, Displacement::CENTERED, &s.q_of(&t)).unwrap().weighted(&w);
    let beta = mrad_to_rad(3.0);
    let mut want = 0.0;
    for j in 1..t.len() {
        if t[j] > beta + 1e-15 {
            break;
        }
        want += 0.5 * (t[j] - t[j - 1]) * (centered[j] * t[j] + centered[j - 1] * t[j - 1]);
    }
    let (got, _) = table.integrated(0, &w, beta).unwrap();
    assert_relative_eq!(got, want, max_relative = 1e-12);
}

#[test]
fn collection_angle_beyond_the_grid_is_rejected() {
    let s = sim();
    let table = s.detector_table(&[0.5], &[0.0, 1.0, 2.0], 0.05).unwrap();
    let err = table.integrated(0, &s.weights, mrad_to_rad(2.5)).unwrap_err();
    assert!(matches!(err, Error::Extrapolation { .. }));
    assert!(s.detector_table(&[0.5], &[1.0, 2.0], 0.05).is_err());
    assert!(s.detector_table(&[-1.0], &[0.0, 1.0], 0.05).is_err());
}

#[test]
fn displacements_beyond_the_prepared_range_are_rejected() {
    let s = sim();
    let err = s.expansion(1, Displacement::nm(3.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Extrapolation { .. }));
    assert!(Displacement::nm(-0.1).is_err());
}

#[test]
fn weighted_detector_image_is_the_channel_sum() {
    let s = sim();
    let d = Displacement::nm(0.5).unwrap();
    let total = s.detector_image(1, d, 5e-3, 21, None).unwrap();
    let parts: Vec<_> = Channel::ALL
        .iter()
        .map(|&c| s.detector_image(1, d, 5e-3, 21, Some(c)).unwrap())
        .collect();
    for (k, v) in total.values.iter().enumerate() {
        let sum: f64 = Channel::ALL.iter().zip(&parts).map(|(&c, p)| s.weights.get(c) * p.values[k]).sum();
        assert_relative_eq!(*v, sum, max_relative = 1e-12);
    }
    assert!(s.detector_image(1, d, 5e-3, 20, None).is_err());
}
