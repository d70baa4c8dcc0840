//! Randomized property tests for the exact-arithmetic layer and the
//! structural identities of the function toolbox.

use cslab::params::{check_gn_admissible, rat, ParamSet};
use cslab::profiles::{
    dyadic_maximal, dyadic_sharp, truncate_value, truncation_identities_check, GridFunction,
    RadialShape,
};
use cslab::quad::{sobolev_seminorm, QuadratureSpec};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=24, 1i64..=6)
}

proptest! {
    /// Split-exponent sequence bound: sum a_i^tau b_i^eta <=
    /// (sum a_i)^tau (sum b_i)^eta whenever tau, eta > 0 and tau + eta >= 1.
    #[test]
    fn sequence_split_exponent_bound(
        a in prop::collection::vec(0.0f64..10.0, 1..50),
        b in prop::collection::vec(0.0f64..10.0, 1..50),
        tau in 0.05f64..3.0,
        eta_extra in 0.0f64..2.0,
    ) {
        let n = a.len().min(b.len());
        let eta = (1.0 - tau).max(0.05) + eta_extra;
        let lhs: f64 = a[..n]
            .iter()
            .zip(&b[..n])
            .map(|(&x, &y)| x.powf(tau) * y.powf(eta))
            .sum();
        let sa: f64 = a[..n].iter().sum();
        let sb: f64 = b[..n].iter().sum();
        let rhs = sa.powf(tau) * sb.powf(eta);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300, "lhs {lhs} rhs {rhs}");
    }

    /// Direct admissibility test and range classification agree on every
    /// constructible rational parameter set.
    #[test]
    fn admissibility_forms_agree(
        d in 1u32..=4,
        s in small_rat(),
        p in small_rat(),
        q in small_rat(),
        alpha in small_rat(),
        gamma in small_rat(),
    ) {
        let s = rat(s.0.min(s.1), s.1);
        let p = rat(p.0.max(p.1), p.1);
        let q = rat(q.0.max(q.1), q.1);
        let alpha = rat(alpha.0.min(alpha.1 * d as i64 - 1).max(1), alpha.1);
        let gamma = rat(gamma.0 + gamma.1, gamma.1);
        if let Ok(ps) = ParamSet::from_scaling(d, s, p, q, alpha, gamma) {
            let rep = check_gn_admissible(&ps);
            prop_assert!(rep.range_form_agrees, "{ps:?}");
            // And the solved betas satisfy both scaling equations in floats.
            let f = ps.to_f64();
            let r1 = f.beta1 * f.p + 2.0 * f.beta2 * f.q - 1.0;
            let r2 = (f.d as f64 - f.s * f.p) * f.beta1
                + (f.d as f64 + f.alpha) * f.beta2
                - f.d as f64 / f.gamma;
            prop_assert!(r1.abs() <= 1e-12 && r2.abs() <= 1e-12, "{r1} {r2}");
        }
    }

    #[test]
    fn truncation_reconstruction_and_contraction(
        samples in prop::collection::vec(0.0f64..100.0, 1..60),
        pairs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..60),
    ) {
        let rep = truncation_identities_check(&samples, &pairs);
        prop_assert!(rep.reconstruction_violation <= 1e-11);
        prop_assert!(rep.contraction_violation <= 1e-11);
    }

    #[test]
    fn truncation_range_and_monotonicity(
        g in 0.0f64..1e6,
        delta in 0.0f64..10.0,
        k in -6i32..=6,
    ) {
        let width = 10f64.powi(k + 1) - 10f64.powi(k);
        let t = truncate_value(g, k);
        prop_assert!((0.0..=width).contains(&t));
        prop_assert!(truncate_value(g + delta, k) >= t);
    }

    #[test]
    fn dyadic_bounds(values in prop::collection::vec(-5.0f64..5.0, 64)) {
        let g = GridFunction::new(1, 64, 1.0, vec![0.0], values.clone());
        let m = dyadic_maximal(&g).unwrap();
        let s = dyadic_sharp(&g).unwrap();
        for i in 0..64 {
            prop_assert!(m.values[i] >= values[i].abs() - 1e-13);
            prop_assert!(s.values[i] <= 2.0 * m.values[i] + 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Gradient-branch seminorm dilation covariance:
    /// [g(lambda .)]^p = lambda^{sp - d} [g]^p for unweighted energies.
    #[test]
    fn seminorm_dilation_covariance(
        lambda in 0.5f64..2.0,
        sigma in 0.5f64..1.5,
    ) {
        let spec = QuadratureSpec::default();
        let base = RadialShape::Gaussian { sigma };
        let (d, s, p) = (3u32, 1.0, 2.0);
        let e0 = sobolev_seminorm(d, &base, s, p, 0.0, 0.0, &spec).unwrap();
        let el = sobolev_seminorm(d, &base.clone().dilate(lambda), s, p, 0.0, 0.0, &spec).unwrap();
        let expected = lambda.powf(s * p - d as f64) * e0.value.powf(p);
        let got = el.value.powf(p);
        let tol = 3.0 * (e0.est_rel_err + el.est_rel_err) * p + 1e-10;
        prop_assert!(
            (got / expected - 1.0).abs() <= tol.max(1e-8),
            "lambda {lambda}: {got} vs {expected}"
        );
    }
}
