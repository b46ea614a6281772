use cmc_core::bifurcation::residual;
use cmc_core::geometry::*;
use cmc_core::oracle::*;
use cmc_core::spectrum::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_eigenvalues_increase_with_both_indices(
        r in 0.3f64..3.0, gamma in 0.2f64..PI - 0.2, h in 0.5f64..20.0, k in 1usize..5, n in 1usize..5,
    ) {
        let l = planar_eigenvalue(r, gamma, h, k, n);
        prop_assert!(planar_eigenvalue(r, gamma, h, k + 1, n) > l);
        prop_assert!(planar_eigenvalue(r, gamma, h, k, n + 1) > l);
    }

    #[test]
    fn planar_eigenvalues_scale_inversely_with_area(
        r in 0.3f64..3.0, gamma in 0.2f64..PI - 0.2, h in 0.5f64..20.0, a in 0.2f64..5.0,
    ) {
        let l = planar_eigenvalue(r, gamma, h, 1, 1);
        let la = planar_eigenvalue(a * r, gamma, a * h, 1, 1);
        prop_assert!((la * a * a - l).abs() <= 1e-12 * (1.0 + l.abs()) * 10.0);
    }

    #[test]
    fn period_is_twice_critical_length(r in 0.1f64..10.0, gamma in FRAC_PI_2 + 1e-3..PI - 1e-3) {
        let h0 = planar_critical_length(r, gamma).unwrap();
        prop_assert_eq!(planar_bifurcation_period(r, gamma).unwrap(), 2.0 * h0);
        prop_assert!(planar_eigenvalue(r, gamma, h0, 1, 1).abs() < 1e-10 / (r * r));
    }

    #[test]
    fn lowest_robin_eigenvalue_increases_with_coefficient(a in -3.0f64..3.0, d in 0.05f64..2.0, beta in 0.5f64..2.5) {
        let mk = |rho: f64| SturmProblem { s_lo: 0.0, s_hi: beta, right_bc: RightBc::Robin(rho), ns: 200 };
        let lo = sturm_eigen(&mk(a), 1).unwrap().mu[0];
        let hi = sturm_eigen(&mk(a + d), 1).unwrap().mu[0];
        prop_assert!(hi > lo);
        let dir = sturm_eigen(&SturmProblem { s_lo: 0.0, s_hi: beta, right_bc: RightBc::Dirichlet, ns: 200 }, 1).unwrap().mu[0];
        prop_assert!(hi < dir);
    }

    #[test]
    fn transverse_roots_solve_their_equation(gamma in 0.1f64..1.5, beta in 0.2f64..3.0) {
        let c = CylinderConfig::wedge(1.0, gamma, beta, Convexity::Convex).unwrap();
        let m = transverse_modes(&c, 1).unwrap()[0];
        let cot = gamma.cos() / gamma.sin();
        // g(s) = sinh, s or sin of c·s must satisfy g'(β) = cot γ · g(β).
        let (g, dg) = match m.branch {
            Branch::Exponential => ((m.c * beta).sinh(), m.c * (m.c * beta).cosh()),
            Branch::Linear => (beta, 1.0),
            Branch::Oscillatory => ((m.c * beta).sin(), m.c * (m.c * beta).cos()),
        };
        prop_assert!((dg - cot * g).abs() < 1e-9 * (1.0 + dg.abs() + cot.abs() * g.abs()));
    }

    #[test]
    fn residual_commutes_with_arc_reflection(seed in 0u64..1000, amp in 0.01f64..0.2) {
        let c = CylinderConfig::planar(1.0, 2.2).unwrap();
        let g = build_grid(&c, 10, 12, 3.0, TMode::HalfPeriodNeumann).unwrap();
        let phase = seed as f64 * 0.37;
        let mut u = ScalarField::from_fn(&g, |t, s| amp * (t + phase).sin() * (3.0 * s + phase).cos());
        u.apply_dirichlet(&c);
        let mut mirrored = ScalarField::zeros(&g);
        for j in 0..g.nt {
            for i in 0..g.ns {
                mirrored.set(j, i, u.get(j, g.mirror_s(i)));
            }
        }
        let a = residual(&c, &g, &u, 0.45).unwrap().field;
        let b = residual(&c, &g, &mirrored, 0.45).unwrap().field;
        for j in 0..g.nt {
            for i in 0..g.ns {
                prop_assert!((a.get(j, i) - b.get(j, g.mirror_s(i))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_inner_product_is_bilinear(x in -3.0f64..3.0, r in 0.2f64..4.0) {
        let c = CylinderConfig::planar(r, 2.0).unwrap();
        let g = build_grid(&c, 7, 9, 2.0, TMode::Periodic).unwrap();
        let u = ScalarField::from_fn(&g, |t, s| t.cos() + s);
        let v = ScalarField::from_fn(&g, |t, s| (t * s).sin());
        let a = u.scaled(x).inner(&v, r).unwrap();
        let b = x * v.inner(&u, r).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
    }
}
