use std::f64::consts::PI;

use adgeom::bloch::{
    ad_affine, bloch_from_angles, dtheta_dtheta_abs, f_gamma, intermediate_norm, lambda_factor,
    BlochVector, DampingParameter, PurePoint,
};
use adgeom::majorization::{cumulants, ensemble_sdl};
use proptest::prelude::*;

fn g(v: f64) -> DampingParameter {
    DampingParameter::new(v).unwrap()
}

fn prob_vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| w.iter().map(|x| x / s).collect())
    })
}

proptest! {
    #[test]
    fn damping_composes_on_the_ball(theta in 0.0..PI, phi in 0.0..(2.0 * PI), r in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        // Two damping steps equal one with 1 − γ = (1 − a)(1 − b). The projected
        // map does not compose this way: projection between steps rescales the
        // affine offset.
        let c = 1.0 - (1.0 - a) * (1.0 - b);
        let u = bloch_from_angles(PurePoint::new(theta, phi).unwrap());
        let v = BlochVector::new(r * u.x, r * u.y, r * u.z);
        let twice = ad_affine(ad_affine(v, g(a)), g(b));
        prop_assert!(twice.distance(&ad_affine(v, g(c))) < 1e-12);
        prop_assert!(twice.in_ball());
    }

    #[test]
    fn lambda_is_sine_ratio_times_jacobian(theta in 0.01..(PI - 0.01), gamma in 0.0f64..1.0) {
        prop_assume!(intermediate_norm(theta, g(gamma)).unwrap() > 1e-3);
        let tp = f_gamma(PurePoint::new(theta, 0.0).unwrap(), g(gamma)).unwrap().theta();
        let want = tp.sin() / theta.sin() * dtheta_dtheta_abs(theta, g(gamma)).unwrap();
        let got = lambda_factor(theta, g(gamma)).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
    }

    #[test]
    fn map_preserves_azimuth_and_stays_on_sphere(theta in 0.0..=PI, phi in -10.0f64..10.0, gamma in 0.0f64..=1.0) {
        prop_assume!(intermediate_norm(theta, g(gamma)).unwrap() > 1e-6);
        let p = PurePoint::new(theta, phi).unwrap();
        let q = f_gamma(p, g(gamma)).unwrap();
        prop_assert_eq!(q.phi(), p.phi());
        prop_assert!((0.0..=PI).contains(&q.theta()));
        prop_assert!((bloch_from_angles(q).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_round_trips_through_bloch_vector(theta in 1e-6..(PI - 1e-6), phi in 0.0..(2.0 * PI)) {
        let p = PurePoint::new(theta, phi).unwrap();
        let back = bloch_from_angles(p).direction().unwrap();
        prop_assert!((back.theta() - theta).abs() < 1e-12);
        let dphi = (back.phi() - p.phi()).abs();
        prop_assert!(dphi.min(2.0 * PI - dphi) < 1e-9);
    }

    #[test]
    fn cumulants_ignore_order(p in prob_vector(8), rot in 0usize..8) {
        let mut q = p.clone();
        q.rotate_left(rot);
        q.reverse();
        prop_assert_eq!(cumulants(&p).unwrap(), cumulants(&q).unwrap());
    }

    #[test]
    fn cumulants_are_majorized_by_a_point_mass(p in prob_vector(16)) {
        let c = cumulants(&p).unwrap();
        let c = c.as_slice();
        let flat = (1..=16).map(|k| k as f64 / 16.0);
        for (k, (ck, fk)) in c.iter().zip(flat).enumerate() {
            // Uniform ≺ p ≺ point mass.
            prop_assert!(*ck >= fk - 1e-12 && *ck <= 1.0 + 1e-12);
            if k > 0 {
                prop_assert!(*ck >= c[k - 1] - 1e-15);
            }
        }
        prop_assert!((c[15] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sdl_vanishes_for_identical_members(p in prob_vector(4), m in 2usize..20) {
        let c = cumulants(&p).unwrap();
        let sig = ensemble_sdl(&vec![c; m], 0).unwrap();
        prop_assert!(sig.sdl.iter().all(|s| s.abs() < 1e-12));
    }
}
