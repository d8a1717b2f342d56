//! Property tests over the catalog: CF axioms at random probe points,
//! symmetry of densities, and scale homogeneity of the maximum of
//! density.

use llt_core::distributions::{
    make_asymmetric_family, make_gaussian, make_uniform_ball, make_uniform_interval,
    AsymmetricKind, DistributionSpec,
};
use llt_core::functionals::max_density;
use proptest::prelude::*;

fn catalog_1d(sigma: f64) -> Vec<DistributionSpec> {
    vec![
        make_uniform_interval(sigma).unwrap(),
        make_gaussian(1, sigma).unwrap(),
        make_asymmetric_family(AsymmetricKind::CenteredExponential, sigma).unwrap(),
        make_asymmetric_family(AsymmetricKind::SkewedTriangle, sigma).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cf_modulus_and_conjugation(sigma in 0.3f64..3.0, t in -40.0f64..40.0) {
        for dist in catalog_1d(sigma) {
            let f = dist.cf(&[t]);
            prop_assert!(f.norm() <= 1.0 + 1e-12, "{}: |f({t})| = {}", dist.label, f.norm());
            let conj = dist.cf(&[-t]);
            prop_assert!((f.conj() - conj).norm() < 1e-12);
        }
    }

    #[test]
    fn cf_at_zero_is_one(sigma in 0.3f64..3.0) {
        for dist in catalog_1d(sigma) {
            let f = dist.cf(&[0.0]);
            prop_assert!((f.re - 1.0).abs() < 1e-14 && f.im.abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_density_is_even(sigma in 0.3f64..3.0, x in -5.0f64..5.0) {
        let u = make_uniform_interval(sigma).unwrap();
        let g = make_gaussian(1, sigma).unwrap();
        for dist in [u, g] {
            prop_assert!((dist.density(&[x]) - dist.density(&[-x])).abs() < 1e-14);
        }
    }

    #[test]
    fn max_density_scale_homogeneity(sigma in 0.4f64..2.0, lambda in 0.5f64..2.5) {
        // X/lambda realized as the sigma/lambda member of each scale family.
        for d in [1usize, 2] {
            let base = make_uniform_ball(d, sigma).unwrap();
            let scaled = make_uniform_ball(d, sigma / lambda).unwrap();
            let ratio = max_density(&scaled).unwrap() / max_density(&base).unwrap();
            prop_assert!((ratio - lambda.powi(d as i32)).abs() < 1e-8);
        }
        let base = make_asymmetric_family(AsymmetricKind::SkewedTriangle, sigma).unwrap();
        let scaled = make_asymmetric_family(AsymmetricKind::SkewedTriangle, sigma / lambda).unwrap();
        let ratio = max_density(&scaled).unwrap() / max_density(&base).unwrap();
        prop_assert!((ratio - lambda).abs() < 1e-8);
    }

    #[test]
    fn ball_cf_hermitian_2d(t1 in -30.0f64..30.0, t2 in -30.0f64..30.0) {
        let b = make_uniform_ball(2, 1.0).unwrap();
        let f = b.cf(&[t1, t2]);
        let g = b.cf(&[-t1, -t2]);
        prop_assert!((f.conj() - g).norm() < 1e-12);
        prop_assert!(f.norm() <= 1.0 + 1e-12);
    }
}
