use cmc_core::geometry::*;
use cmc_core::CmcError;
use std::f64::consts::PI;

fn max_rel_error(h: &ScalarField, exact: f64) -> f64 {
    h.values().iter().map(|v| (v - exact).abs() / exact).fold(0.0, f64::max)
}

#[test]
fn mesh_curvature_converges_at_second_order() {
    let c = CylinderConfig::wedge(1.0, 1.0, 1.0, Convexity::Convex).unwrap();
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let g = build_grid(&c, n, n, 2.0, TMode::HalfPeriodNeumann).unwrap();
        let mesh = normal_graph(&c, &g, &ScalarField::zeros(&g)).unwrap();
        errs.push(max_rel_error(&mean_curvature(&mesh).unwrap(), 0.5));
    }
    assert!(errs[2] < 1e-4, "{errs:?}");
    for (w, ds_ratio) in errs.windows(2).zip([31.0f64 / 15.0, 63.0 / 31.0]) {
        let order = (w[0] / w[1]).ln() / ds_ratio.ln();
        assert!((order - 2.0).abs() < 0.2, "order {order} from {errs:?}");
    }
}

#[test]
fn mesh_curvature_of_translated_graph_is_independent_of_t_mode() {
    let c = CylinderConfig::planar(1.3, PI / 6.0).unwrap();
    for mode in [TMode::DirichletEnds, TMode::HalfPeriodNeumann, TMode::Periodic] {
        let g = build_grid(&c, 24, 64, 5.0, mode).unwrap();
        let mesh = normal_graph(&c, &g, &ScalarField::zeros(&g)).unwrap();
        let err = max_rel_error(&mean_curvature(&mesh).unwrap(), 0.5 / 1.3);
        assert!(err < 1e-4, "{mode:?}: {err}");
    }
}

#[test]
fn graph_curvature_linearizes_to_half_jacobi_operator() {
    let c = CylinderConfig::planar(1.0, 0.75 * PI).unwrap();
    let g = build_grid(&c, 40, 40, 4.0, TMode::DirichletEnds).unwrap();
    let (s_lo, s_hi) = c.s_interval();
    let v = ScalarField::from_fn(&g, |t, s| {
        (PI * t / 4.0).sin() * ((s - s_lo) * (s_hi - s)) * (1.0 + 0.3 * (2.0 * s).cos())
    });
    let eps = 1e-5;
    let hp = graph_mean_curvature(&c, &g, &v.scaled(eps)).unwrap();
    let hm = graph_mean_curvature(&c, &g, &v.scaled(-eps)).unwrap();
    let lv = jacobi_apply(&c, &g, &v).unwrap();
    let scale = lv.max_abs();
    for j in 1..g.nt - 1 {
        for i in 1..g.ns - 1 {
            let fd = (hp.get(j, i) - hm.get(j, i)) / (2.0 * eps);
            assert!((fd - 0.5 * lv.get(j, i)).abs() < 1e-6 * scale);
        }
    }
}

#[test]
fn index_form_is_symmetric_and_matches_operator() {
    let c = CylinderConfig::wedge(0.8, 1.1, 1.3, Convexity::Convex).unwrap();
    let g = build_grid(&c, 20, 30, 3.0, TMode::HalfPeriodNeumann).unwrap();
    let mut u = ScalarField::from_fn(&g, |t, s| s * (1.0 + t.cos()));
    let mut v = ScalarField::from_fn(&g, |t, s| (s * 2.0).sin() * (0.5 * t).cos());
    u.apply_dirichlet(&c);
    v.apply_dirichlet(&c);
    let a = index_form(&c, &g, &u, &v).unwrap();
    let b = index_form(&c, &g, &v, &u).unwrap();
    assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    let lu = jacobi_apply(&c, &g, &u).unwrap().scaled(-1.0);
    assert!((lu.inner(&v, c.r).unwrap() - a).abs() < 1e-10 * a.abs().max(1.0));
}

#[test]
fn grid_mismatch_is_reported() {
    let c = CylinderConfig::planar(1.0, 2.0).unwrap();
    let g1 = build_grid(&c, 8, 8, 1.0, TMode::DirichletEnds).unwrap();
    let g2 = build_grid(&c, 8, 9, 1.0, TMode::DirichletEnds).unwrap();
    let u = ScalarField::zeros(&g1);
    assert!(matches!(jacobi_apply(&c, &g2, &u), Err(CmcError::GridMismatch(_))));
    assert!(matches!(u.inner(&ScalarField::zeros(&g2), 1.0), Err(CmcError::GridMismatch(_))));
}

#[test]
fn obj_output_is_deterministic() {
    let c = CylinderConfig::planar(1.0, 2.0).unwrap();
    let g = build_grid(&c, 6, 5, 1.0, TMode::Periodic).unwrap();
    let u = ScalarField::from_fn(&g, |t, s| 0.1 * t.sin() * s.cos());
    let mesh = normal_graph(&c, &g, &u).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_obj(&mesh, &mut a).unwrap();
    write_obj(&mesh, &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 30);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 6 * 4);
}
