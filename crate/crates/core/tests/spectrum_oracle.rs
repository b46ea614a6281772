use cmc_core::geometry::*;
use cmc_core::oracle::*;
use cmc_core::spectrum::*;
use cmc_core::CmcError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[test]
fn planar_closed_form_matches_modal_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..8 {
        let gamma = rng.gen_range(0.2..PI - 0.2);
        let r = rng.gen_range(0.5..2.0);
        let h = rng.gen_range(1.0..10.0);
        let c = CylinderConfig::planar(r, gamma).unwrap();
        let entries = modal_jacobi_grid(&c, h, TMode::DirichletEnds, 3, 3, 1001).unwrap();
        for e in &entries {
            let exact = planar_eigenvalue(r, gamma, h, e.k, e.n);
            let err = relative_error(&c, e, exact, 0.0);
            assert!(err < 1e-6, "gamma {gamma} r {r} h {h} ({}, {}): {err}", e.k, e.n);
        }
    }
}

#[test]
fn critical_length_is_the_oracle_zero_crossing() {
    let c = CylinderConfig::planar(1.0, 0.75 * PI).unwrap();
    let lambda1 = |h: f64| modal_jacobi_spectrum(&c, h, TMode::DirichletEnds, 1, 801).unwrap()[0].lambda;
    let (mut lo, mut hi) = (1.0, 10.0);
    assert!(lambda1(lo) > 0.0 && lambda1(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if lambda1(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h0 = planar_critical_length(1.0, 0.75 * PI).unwrap();
    assert!((h0 - 4.2149).abs() < 1e-4);
    assert!((0.5 * (lo + hi) - h0).abs() / h0 < 1e-4);
}

#[test]
fn period_identities() {
    for gamma in [1.7, 2.0, 2.5, 3.0] {
        let t = planar_bifurcation_period(1.3, gamma).unwrap();
        assert_eq!(t, 2.0 * planar_critical_length(1.3, gamma).unwrap());
    }
    let beta = 2.0 * PI / 3.0;
    let c = CylinderConfig::wedge(1.0, FRAC_PI_2, beta, Convexity::Convex).unwrap();
    let (t, case) = wedge_bifurcation_period(&c).unwrap();
    assert_eq!(case, CaseId::NeumannEq);
    let alt = 2.0 * PI / (1.0 - (PI / (2.0 * beta)).powi(2)).sqrt();
    assert!((t - alt).abs() < 1e-14);
    assert!((t - 4.0 * PI * beta / (4.0 * beta * beta - PI * PI).sqrt()).abs() < 1e-14);
}

#[test]
fn wedge_classifications() {
    for (gamma, beta) in [(0.4, 0.5), (0.2, 1.2), (1.0, 0.5), (0.7, 0.8)] {
        let c = CylinderConfig::wedge(1.0, gamma, beta, Convexity::Concave).unwrap();
        for h in [1.0, 10.0, 1e3] {
            assert_eq!(stability(&c, h).unwrap().classification, Classification::Stable);
        }
    }
    let narrow = CylinderConfig::wedge(1.0, FRAC_PI_2, 1.4, Convexity::Convex).unwrap();
    assert_eq!(stability(&narrow, 1e3).unwrap().classification, Classification::Stable);
    let wide = CylinderConfig::wedge(1.0, FRAC_PI_2, 2.0, Convexity::Convex).unwrap();
    assert_eq!(stability(&wide, 1.0).unwrap().classification, Classification::Stable);
    assert_eq!(stability(&wide, 100.0).unwrap().classification, Classification::Unstable);
}

#[test]
fn unstable_triggers_are_confirmed_by_the_oracle() {
    let tan_trigger = ((1.26f64).tan() / 0.9).atan();
    for (gamma, beta, case) in [
        (FRAC_PI_4, 2.0, CaseId::ConvexExpEq),
        (FRAC_PI_4, 1.0, CaseId::ConvexLinearEq),
        (tan_trigger, 1.4, CaseId::ConvexTanEq),
    ] {
        let c = CylinderConfig::wedge(1.0, gamma, beta, Convexity::Convex).unwrap();
        assert_eq!(wedge_bifurcation_period(&c).unwrap().1, case);
        let v = stability(&c, 100.0).unwrap();
        assert_eq!(v.classification, Classification::Unstable);
        let oracle = modal_jacobi_spectrum(&c, 100.0, TMode::DirichletEnds, 1, 2001).unwrap()[0];
        assert!(oracle.lambda < 0.0);
        let kappa = c.robin_slope().unwrap();
        assert!(relative_error(&c, &oracle, v.lambda_min, kappa) < 1e-6, "{case:?}");
    }
}

#[test]
fn exponential_root_matches_lowest_robin_eigenvalue() {
    let root = solve_transcendental(CaseId::ConvexExpEq, FRAC_PI_4, 2.0, (0.0, 50.0)).unwrap();
    let cr = root.root_c.unwrap();
    assert!((cr - 0.957).abs() < 1e-3, "{cr}");
    assert!(root.residual.abs() < 1e-12);
    let c = CylinderConfig::wedge(1.0, FRAC_PI_4, 2.0, Convexity::Convex).unwrap();
    let mu = sturm_eigen_extrapolated(&sturm_problem(&c, 2001), 1).unwrap().mu[0];
    assert!((mu + cr * cr).abs() / (cr * cr) < 1e-6);
}

#[test]
fn full_2d_agrees_with_separated_discrete_spectrum() {
    let c = CylinderConfig::wedge(1.0, 1.2, 1.5, Convexity::Convex).unwrap();
    let g = build_grid(&c, 24, 64, 3.0, TMode::HalfPeriodNeumann).unwrap();
    let full = full_2d_jacobi_spectrum(&c, &g, 5).unwrap();
    let modal = discrete_modal_spectrum(&c, &g, 5).unwrap();
    for (f, m) in full.iter().zip(&modal) {
        assert!((f.0 - m.lambda).abs() < 1e-8 * (1.0 + m.lambda.abs()));
    }
}

#[test]
fn no_critical_length_for_acute_contact() {
    assert_eq!(planar_critical_length(1.0, PI / 3.0), Err(CmcError::NoCriticalLength));
    let c = CylinderConfig::wedge(1.0, 1.0, 0.5, Convexity::Concave).unwrap();
    assert!(matches!(bifurcation_period(&c), Err(CmcError::NoBifurcation(_))));
}
