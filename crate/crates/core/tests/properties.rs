use postedge::edgeworth::{build_series, SeriesKind};
use postedge::momentalg::{cumulants_to_moments, moments_to_cumulants, CumulantVector};
use postedge::quadrature::{integrate, Tolerance};
use postedge::specialfn::{hermite_eval, normal_pdf};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn cumulant_moment_round_trip(
        mean in -3.0f64..3.0,
        var in 0.1f64..4.0,
        higher in prop::collection::vec(-1.0f64..1.0, 6),
        about in -2.0f64..2.0,
    ) {
        let mut v = vec![mean, var];
        v.extend(higher);
        let c = CumulantVector::new(v.clone()).unwrap();
        let m = cumulants_to_moments(&c, about).unwrap();
        let back = moments_to_cumulants(&m).unwrap();
        // the inversion cancels moments down to cumulant size, so rounding
        // is relative to the largest moment on the scale of order j
        let raw = m.values();
        for (j, (a, b)) in v.iter().zip(back.values()).enumerate() {
            let order = (j + 1) as f64;
            let size = raw[..=j]
                .iter()
                .enumerate()
                .map(|(i, r)| r.abs().powf(order / (i + 1) as f64))
                .fold(1.0, f64::max);
            let tol = 1e-12 * size;
            prop_assert!((a - b).abs() <= tol, "order {}: {} vs {}", j + 1, a, b);
        }
    }

    #[test]
    fn cumulants_are_affine_equivariant(
        v in prop::collection::vec(-1.0f64..1.0, 6),
        scale in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
        shift in -5.0f64..5.0,
    ) {
        let mut vals = v.clone();
        vals[1] = vals[1].abs() + 0.1;
        let c = CumulantVector::new(vals.clone()).unwrap();
        let t = c.affine(scale, shift);
        prop_assert!(rel_close(t.order(1), scale * vals[0] + shift, 1e-12));
        for j in 2..=6 {
            prop_assert!(rel_close(t.order(j), scale.powi(j as i32) * vals[j - 1], 1e-12));
        }
        // invariant cumulants only see the sign of the scale
        for j in 3..=6 {
            let expect = scale.signum().powi(j as i32) * c.invariant(j);
            prop_assert!(rel_close(t.invariant(j), expect, 1e-10));
        }
    }

    #[test]
    fn hermite_three_term_recurrence(x in -6.0f64..6.0, j in 1usize..12) {
        let lhs = hermite_eval(j + 1, x).unwrap();
        let rhs = x * hermite_eval(j, x).unwrap() - j as f64 * hermite_eval(j - 1, x).unwrap();
        prop_assert!(rel_close(lhs, rhs, 1e-12));
    }

    #[test]
    fn series_density_has_unit_mass(k3 in -0.8f64..0.8, k4 in -0.8f64..0.8, k5 in -0.8f64..0.8, order in 2usize..=5) {
        let s = build_series([k3, k4, k5], order, SeriesKind::Density).unwrap();
        let r = integrate(|x| s.eval(x), -12.0, 12.0, Tolerance::relative(1e-12));
        prop_assert!((r.value[0] - 1.0).abs() < 1e-9, "mass {}", r.value[0]);
    }

    #[test]
    fn cdf_series_differentiates_to_density(k3 in -0.8f64..0.8, k4 in -0.8f64..0.8, x in -4.0f64..4.0) {
        let d = build_series([k3, k4, 0.1], 4, SeriesKind::Density).unwrap();
        let c = build_series([k3, k4, 0.1], 4, SeriesKind::Cdf).unwrap();
        let h = 1e-5;
        let fd = (c.eval(x + h) - c.eval(x - h)) / (2.0 * h);
        prop_assert!((fd - d.eval(x)).abs() < 1e-6);
    }

    #[test]
    fn gaussian_cumulants_give_pure_normal(x in -8.0f64..8.0, order in 2usize..=5) {
        let s = build_series([0.0; 3], order, SeriesKind::Density).unwrap();
        prop_assert_eq!(s.eval(x), normal_pdf(x));
    }
}
