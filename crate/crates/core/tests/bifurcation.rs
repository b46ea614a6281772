use cmc_core::bifurcation::*;
use cmc_core::geometry::*;
use cmc_core::CmcError;
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

fn planar() -> CylinderConfig {
    CylinderConfig::planar(1.0, 0.75 * PI).unwrap()
}

fn small() -> LocateOptions {
    LocateOptions { nt: 32, ns: 32, search: None }
}

fn planar_point() -> &'static BifurcationPoint {
    static P: OnceLock<BifurcationPoint> = OnceLock::new();
    P.get_or_init(|| locate_bifurcation(&planar(), TMode::HalfPeriodNeumann, &small()).unwrap())
}

fn wedge_point() -> &'static BifurcationPoint {
    static P: OnceLock<BifurcationPoint> = OnceLock::new();
    P.get_or_init(|| {
        let c = CylinderConfig::wedge(1.0, FRAC_PI_4, 1.0, Convexity::Convex).unwrap();
        locate_bifurcation(&c, TMode::HalfPeriodNeumann, &small()).unwrap()
    })
}

#[test]
fn trivial_branch_has_zero_residual() {
    for c in [planar(), CylinderConfig::wedge(0.7, 1.1, 1.3, Convexity::Convex).unwrap()] {
        let g = build_grid(&c, 12, 16, 2.0, TMode::HalfPeriodNeumann).unwrap();
        let res = residual(&c, &g, &ScalarField::zeros(&g), 0.5 / c.r).unwrap();
        assert!(res.field.max_abs() < 1e-13);
        if let Some(b) = res.on_plane {
            assert!(b.iter().all(|v| v.abs() < 1e-15));
        }
    }
}

#[test]
fn constant_shift_in_mean_curvature() {
    let c = planar();
    let g = build_grid(&c, 12, 16, 2.0, TMode::DirichletEnds).unwrap();
    let res = residual(&c, &g, &ScalarField::zeros(&g), 0.6).unwrap();
    for j in 1..g.nt - 1 {
        for i in 1..g.ns - 1 {
            assert!((res.field.get(j, i) - 0.2).abs() < 1e-13);
        }
    }
    assert_eq!(res.field.get(0, 5), 0.0);
}

#[test]
fn residual_is_quadratic_along_the_kernel() {
    let p = planar_point();
    let norm = |eps: f64| residual(&p.config, &p.grid, &p.kernel.scaled(eps), p.h0).unwrap().field.max_abs();
    let (a, b) = (norm(1e-3), norm(2e-3));
    assert!(a < 1e-5);
    assert!((b / a - 4.0).abs() < 0.05, "{}", b / a);
}

#[test]
fn residual_derivative_is_minus_jacobi_operator() {
    let p = planar_point();
    let g = p.grid;
    let (s_lo, s_hi) = p.config.s_interval();
    let mut v = ScalarField::from_fn(&g, |t, s| (t / p.period * 4.0).cos() * (s - s_lo) * (s_hi - s));
    v.apply_dirichlet(&p.config);
    let eps = 1e-6 * (1.0 + v.max_abs());
    let rp = residual(&p.config, &g, &v.scaled(eps), p.h0).unwrap().field;
    let rm = residual(&p.config, &g, &v.scaled(-eps), p.h0).unwrap().field;
    let lv = jacobi_apply(&p.config, &g, &v).unwrap();
    for j in 0..g.nt {
        for i in 1..g.ns - 1 {
            let fd = (rp.get(j, i) - rm.get(j, i)) / (2.0 * eps);
            assert!((fd + lv.get(j, i)).abs() < 1e-6 * lv.max_abs());
        }
    }
}

#[test]
fn planar_bifurcation_point() {
    let p = planar_point();
    assert_eq!(p.kernel_dim, 1);
    assert!((p.period - 8.429_777_677).abs() < 1e-8);
    assert!((p.h0 - 0.5).abs() < 1e-3);
    assert!((p.h0 - 0.499_615_116_77).abs() < 1e-9, "{}", p.h0);
    let closed = 4.0 * (1.0 - 4.0 / 9.0);
    assert!(p.transversality > 0.0);
    assert!((p.transversality - closed).abs() / closed < 0.05);
    assert!((p.kernel.norm(p.config.r) - 1.0).abs() < 1e-12);
    let (s_lo, _) = p.config.s_interval();
    let gamma = p.config.gamma;
    let analytic = ScalarField::from_fn(&p.grid, |t, s| {
        (PI * (s - s_lo) / (2.0 * gamma)).sin() * (2.0 * PI * t / p.period).cos()
    });
    let r = p.config.r;
    let corr = p.kernel.inner(&analytic, r).unwrap() / analytic.norm(r);
    assert!(corr > 0.999, "{corr}");
}

#[test]
fn wedge_bifurcation_point() {
    let p = wedge_point();
    assert!((p.period - 2.0 * PI).abs() < 1e-12);
    assert!((p.h0 - 0.5).abs() < 1e-3);
    assert!(p.transversality > 0.0);
    // The transverse profile is linear, so `u_ss + u = u` exactly.
    assert!((p.transversality - 8.0 * p.h0).abs() < 1e-9, "{}", p.transversality);
    // Kernel obeys u_s = κu on the free column.
    let g = p.grid;
    let kappa = p.config.robin_slope().unwrap();
    let k = &p.kernel;
    let n = g.ns - 1;
    for j in 0..g.nt {
        let d = (3.0 * k.get(j, n) - 4.0 * k.get(j, n - 1) + k.get(j, n - 2)) / (2.0 * g.ds());
        assert!((d - kappa * k.get(j, n)).abs() < 1e-2 * k.max_abs());
    }
}

#[test]
fn stable_families_do_not_bifurcate() {
    let acute = CylinderConfig::planar(1.0, PI / 3.0).unwrap();
    assert!(matches!(locate_bifurcation(&acute, TMode::HalfPeriodNeumann, &small()), Err(CmcError::NoBifurcation(_))));
    let concave = CylinderConfig::wedge(1.0, 0.5, 0.6, Convexity::Concave).unwrap();
    assert!(matches!(locate_bifurcation(&concave, TMode::HalfPeriodNeumann, &small()), Err(CmcError::NoBifurcation(_))));
}

#[test]
fn translation_invariance_doubles_the_periodic_kernel() {
    let r = locate_bifurcation(&planar(), TMode::Periodic, &LocateOptions { nt: 32, ns: 24, search: None });
    assert_eq!(r.unwrap_err(), CmcError::DegenerateKernel(2));
}

#[test]
fn zero_amplitude_returns_the_cylinder() {
    let p = planar_point();
    let s = branch_switch(p, 0.0).unwrap();
    assert_eq!(s.h, p.h0);
    assert_eq!(s.u.max_abs(), 0.0);
    assert_eq!(s.epsilon, 0.0);
}

#[test]
fn pitchfork_is_symmetric() {
    let p = planar_point();
    let a = branch_switch(p, 1e-2).unwrap();
    let b = branch_switch(p, -1e-2).unwrap();
    assert!((a.h - b.h).abs() < 1e-8);
    assert!((a.epsilon - 1e-2).abs() < 1e-10);
    assert!((b.epsilon + 1e-2).abs() < 1e-10);
    assert!(a.residual_norm < 1e-10);
    assert!(a.h < p.h0);
    assert!(check_alexandrov_symmetry(&a) < 1e-8);
}

#[test]
fn large_amplitude_is_rejected() {
    let p = planar_point();
    match branch_switch(p, 0.5 * p.config.r * 4.0) {
        Err(CmcError::NewtonDiverged(_)) | Err(CmcError::GraphDegenerate { .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn continuation_grows_the_amplitude() {
    let p = planar_point();
    let start = branch_switch(p, 1e-2).unwrap();
    let states = continue_branch(p, &start, 8, 1e-2, &ContinuationOptions::default()).unwrap();
    assert_eq!(states.len(), 8);
    let mut prev = start.epsilon.abs();
    let mut prev_s = 0.0;
    for s in &states {
        assert!(s.residual_norm < 1e-10);
        assert!(s.epsilon.abs() > prev);
        assert!(s.arclength > prev_s);
        assert!(non_rotationality(s) > 0.5 * s.epsilon.abs());
        assert!(check_alexandrov_symmetry(s) < 1e-8);
        prev = s.epsilon.abs();
        prev_s = s.arclength;
    }
    let (a, r2) = quadratic_fit(p.h0, &states);
    assert!(a < 0.0);
    assert!(r2 > 0.99);
}

#[test]
fn reversed_tangent_walks_the_mirror_branch() {
    let p = planar_point();
    let start = branch_switch(p, 1e-2).unwrap();
    let opts = ContinuationOptions { reverse: true, ..Default::default() };
    let states = continue_branch(p, &start, 4, 0.0123, &opts).unwrap();
    assert!(states.last().unwrap().epsilon < 0.0);
    assert!(states.iter().all(|s| s.residual_norm < 1e-10));
}

#[test]
fn starved_corrector_stalls() {
    let p = planar_point();
    let start = branch_switch(p, 1e-2).unwrap();
    let opts = ContinuationOptions { newton: NewtonOptions { tol: 1e-10, max_iter: 0 }, ..Default::default() };
    assert!(matches!(
        continue_branch(p, &start, 2, 1e-2, &opts),
        Err(CmcError::ContinuationStalled { .. })
    ));
}

#[test]
fn wedge_branch_keeps_contact_line_on_the_plane() {
    let p = wedge_point();
    let start = branch_switch(p, 1e-2).unwrap();
    let mirror = branch_switch(p, -1e-2).unwrap();
    assert!((start.h - mirror.h).abs() < 1e-8);
    let states = continue_branch(p, &start, 3, 1e-2, &ContinuationOptions::default()).unwrap();
    for s in &states {
        assert!(s.residual_norm < 1e-10);
        let theta = s.boundary_angle.as_ref().unwrap();
        let config = p.config.with_radius(0.5 / s.h);
        let res = residual_with_boundary(&config, &p.grid, &s.u, s.h, Some(theta)).unwrap();
        assert!(res.on_plane.unwrap().iter().all(|v| v.abs() < 1e-10));
        assert!(res.field.max_abs() < 1e-10);
        let mesh = branch_surface(p, s).unwrap();
        assert_eq!(mesh.positions.len(), p.grid.len());
    }
}

#[test]
fn alexandrov_defect_measures_injected_asymmetry() {
    let p = planar_point();
    let mut s = branch_switch(p, 0.0).unwrap();
    assert_eq!(check_alexandrov_symmetry(&s), 0.0);
    s.u.set(3, 2, 1e-3);
    assert!((check_alexandrov_symmetry(&s) - 1e-3).abs() < 1e-18);
}
