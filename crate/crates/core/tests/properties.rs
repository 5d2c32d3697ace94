//! Property tests for the algebraic invariants of the reduction.

use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;
use ymjoin::eigenmaps::Eigenmap;
use ymjoin::functional::{truncate_value, JoinProblem};
use ymjoin::grid::{Domain, Grid};
use ymjoin::ode;
use ymjoin::profile::Profile;

fn id_join(m1: u32, m2: u32) -> JoinProblem {
    JoinProblem::new(Eigenmap::identity(m1).unwrap(), Eigenmap::identity(m2).unwrap()).unwrap()
}

proptest! {
    /// Pointwise truncation never increases the potential term and is
    /// 1-Lipschitz, the two facts behind energy monotonicity of the
    /// projection step.
    #[test]
    fn truncation_monotonicity(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let (tx, ty) = (truncate_value(x), truncate_value(y));
        prop_assert!((0.0..=1.0).contains(&tx));
        prop_assert!((tx * tx - 1.0).powi(2) <= (x * x - 1.0).powi(2) + 1e-12);
        prop_assert!((tx - ty).abs() <= (x - y).abs() + 1e-12);
    }

    /// The residual in the original coordinate equals the transformed
    /// residual times `(e^s + e^{-s})^2` under the substitution chain rule.
    #[test]
    fn chain_rule_consistency(
        t in 0.05f64..1.5,
        a in -1.5f64..1.5,
        ap in -2.0f64..2.0,
        app in -2.0f64..2.0,
        b in -1.5f64..1.5,
        bp in -2.0f64..2.0,
        bpp in -2.0f64..2.0,
        m1 in 2u32..9,
        m2 in 2u32..9,
    ) {
        let p = id_join(m1, m2);
        let s = ode::to_log_coordinate(t).unwrap();
        let q = t.tan() + 1.0 / t.tan();
        let qp = t.tan().powi(2) - 1.0 / t.tan().powi(2);
        let (r1t, r2t) = ode::el_residual_t(
            &p, t,
            a, q * ap, q * q * app + qp * ap,
            b, q * bp, q * q * bpp + qp * bp,
        ).unwrap();
        let (r1s, r2s) = ode::el_residual_s(&p, s, a, ap, app, b, bp, bpp);
        let scale = q * q;
        prop_assert!((r1t - scale * r1s).abs() <= 1e-10 * (1.0 + r1t.abs() + scale));
        prop_assert!((r2t - scale * r2s).abs() <= 1e-10 * (1.0 + r2t.abs() + scale));
    }

    /// Swap invariance: residual one of the swapped problem at reflected
    /// points equals residual two of the original.
    #[test]
    fn swap_invariance(
        t in 0.05f64..1.5,
        a in -1.0f64..1.0,
        ap in -1.0f64..1.0,
        app in -1.0f64..1.0,
        b in -1.0f64..1.0,
        bp in -1.0f64..1.0,
        bpp in -1.0f64..1.0,
    ) {
        let p = id_join(5, 3);
        let ps = p.swapped();
        let (_, r2) = ode::el_residual_t(&p, t, a, ap, app, b, bp, bpp).unwrap();
        let (r1s, _) = ode::el_residual_t(&ps, FRAC_PI_2 - t, b, -bp, bpp, a, -ap, app).unwrap();
        prop_assert!((r1s - r2).abs() <= 1e-10 * (1.0 + r2.abs()));
    }

    /// mu m = (m-1) lambda holds exactly across the catalog families.
    #[test]
    fn eigenmap_exact_relation(m in 2u32..20, ell in 1u32..10) {
        let e = Eigenmap::standard_immersion(m, ell).unwrap();
        let lambda = e.lambda.as_rational().unwrap();
        let mu = e.mu.as_rational().unwrap();
        let m_r = num_rational::Ratio::from_integer(m as i128);
        let one = num_rational::Ratio::from_integer(1i128);
        prop_assert_eq!(mu * m_r, (m_r - one) * lambda);
    }

    /// Profiles serialize to JSON and back without losing a bit.
    #[test]
    fn profile_json_roundtrip(seed in 0u64..1_000) {
        let g = Grid::uniform_s(Domain::Join, 32, 10.0).unwrap();
        let mut rng = ymjoin::numerics::SplitMix64::new(seed);
        let alpha: Vec<f64> = (0..32).map(|_| rng.uniform_symmetric()).collect();
        let beta: Vec<f64> = (0..32).map(|_| rng.uniform_symmetric()).collect();
        let f = Profile::new(g, alpha, beta, (0.0, 1.0), (1.0, 0.0)).unwrap();
        let js = serde_json::to_string(&f).unwrap();
        let f2: Profile = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(&f.alpha, &f2.alpha);
        prop_assert_eq!(&f.beta, &f2.beta);
        prop_assert_eq!(f.grid.nodes(), f2.grid.nodes());
    }

    /// The symmetrization projection satisfies the reflection identity
    /// exactly and fixes symmetric profiles.
    #[test]
    fn symmetrize_reflection_identity(seed in 0u64..1_000) {
        let g = Grid::uniform_s(Domain::Join, 64, 8.0).unwrap();
        let mut rng = ymjoin::numerics::SplitMix64::new(seed);
        let alpha: Vec<f64> = g.nodes().iter().map(|&t| t.sin() + 0.3 * rng.uniform_symmetric()).collect();
        let beta: Vec<f64> = g.nodes().iter().map(|&t| t.cos() + 0.3 * rng.uniform_symmetric()).collect();
        let f = Profile::new(g, alpha, beta, (0.0, 1.0), (1.0, 0.0)).unwrap();
        let s = ymjoin::functional::symmetrize_profile(&f).unwrap();
        let n = s.len();
        for i in 0..n {
            prop_assert!((s.alpha[i] - s.beta[n - 1 - i]).abs() < 1e-13);
        }
        let s2 = ymjoin::functional::symmetrize_profile(&s).unwrap();
        for i in 0..n {
            prop_assert!((s2.alpha[i] - s.alpha[i]).abs() < 1e-13);
        }
    }
}
