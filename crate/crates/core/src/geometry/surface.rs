use super::{CylinderConfig, Grid, ScalarField, TMode};
use crate::scalar::Scalar;
use crate::{CmcError, Result};

/// Normal graphs with `|u| ≥ DEGENERACY_FRACTION · r` are rejected.
pub const DEGENERACY_FRACTION: f64 = 0.9;

/// Sampled immersion `X(t, s)` in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub grid: Grid,
    /// t-major, same layout as [`ScalarField`].
    pub positions: Vec<[f64; 3]>,
    /// `+1` when `X_t × X_s` points along the inward unit normal.
    pub normal_orientation: f64,
}

/// Inward unit normal of the unperturbed cylinder at arc parameter `s`.
pub fn unit_normal(s: f64) -> [f64; 3] {
    [0.0, -s.cos(), -s.sin()]
}

/// `φ + u N` for the configured cylinder.
pub fn normal_graph(config: &CylinderConfig, grid: &Grid, u: &ScalarField) -> Result<SurfaceMesh> {
    if u.grid() != grid {
        return Err(CmcError::GridMismatch("field and grid differ".into()));
    }
    let limit = DEGENERACY_FRACTION * config.r;
    let max_abs_u = u.max_abs();
    if max_abs_u >= limit || !max_abs_u.is_finite() {
        return Err(CmcError::GraphDegenerate { max_abs_u, limit });
    }
    let off = config.vertical_offset();
    let mut positions = Vec::with_capacity(grid.len());
    for j in 0..grid.nt {
        let t = grid.t(j);
        for i in 0..grid.ns {
            let s = grid.s(i);
            let rho = config.r - u.get(j, i);
            positions.push([t, rho * s.cos(), rho * s.sin() - off]);
        }
    }
    Ok(SurfaceMesh { grid: *grid, positions, normal_orientation: 1.0 })
}

/// Finite-difference weights along one axis: `d1[j]` and `d2[j]` list
/// `(node, weight)` pairs for the first and second derivative at node `j`.
#[derive(Debug, Clone)]
pub(crate) struct AxisStencils {
    pub d1: Vec<Vec<(usize, f64)>>,
    pub d2: Vec<Vec<(usize, f64)>>,
}

impl AxisStencils {
    fn one_sided(n: usize, h: f64) -> Self {
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let (a, b) = (1.0 / (2.0 * h), 1.0 / (h * h));
        for j in 0..n {
            if j == 0 {
                d1.push(vec![(0, -3.0 * a), (1, 4.0 * a), (2, -a)]);
                d2.push(vec![(0, 2.0 * b), (1, -5.0 * b), (2, 4.0 * b), (3, -b)]);
            } else if j == n - 1 {
                d1.push(vec![(j, 3.0 * a), (j - 1, -4.0 * a), (j - 2, a)]);
                d2.push(vec![(j, 2.0 * b), (j - 1, -5.0 * b), (j - 2, 4.0 * b), (j - 3, -b)]);
            } else {
                d1.push(vec![(j + 1, a), (j - 1, -a)]);
                d2.push(vec![(j + 1, b), (j, -2.0 * b), (j - 1, b)]);
            }
        }
        Self { d1, d2 }
    }

    /// Axial stencils. `mirror` uses even reflection at the ends of a
    /// half-period grid; otherwise those ends get one-sided differences.
    pub fn t_axis(grid: &Grid, mirror: bool) -> Self {
        let (n, h) = (grid.nt, grid.dt());
        let (a, b) = (1.0 / (2.0 * h), 1.0 / (h * h));
        match grid.t_mode {
            TMode::Periodic => {
                let d1 = (0..n).map(|j| vec![((j + 1) % n, a), ((j + n - 1) % n, -a)]).collect();
                let d2 = (0..n)
                    .map(|j| vec![((j + 1) % n, b), (j, -2.0 * b), ((j + n - 1) % n, b)])
                    .collect();
                Self { d1, d2 }
            }
            TMode::HalfPeriodNeumann if mirror => {
                let mut s = Self::one_sided(n, h);
                s.d1[0].clear();
                s.d1[n - 1].clear();
                s.d2[0] = vec![(1, 2.0 * b), (0, -2.0 * b)];
                s.d2[n - 1] = vec![(n - 2, 2.0 * b), (n - 1, -2.0 * b)];
                s
            }
            _ => Self::one_sided(n, h),
        }
    }

    pub fn s_axis(grid: &Grid) -> Self {
        Self::one_sided(grid.ns, grid.ds())
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Weighted sum along t. Periodic stencils wrap around, so for positions
/// (`unwrap`) the axial coordinate of a wrapped neighbour is shifted by one
/// period.
fn combine(
    p: &[[f64; 3]],
    grid: &Grid,
    j0: usize,
    row: &[(usize, f64)],
    i: usize,
    unwrap: bool,
) -> [f64; 3] {
    let mut out = [0.0; 3];
    let periodic = unwrap && grid.t_mode == TMode::Periodic;
    for &(j, w) in row {
        let mut x = p[grid.idx(j, i)];
        if periodic {
            let half = grid.nt / 2;
            if j0 < half && j > j0 + half {
                x[0] -= grid.t_extent;
            } else if j0 > half && j + half < j0 {
                x[0] += grid.t_extent;
            }
        }
        for c in 0..3 {
            out[c] += w * x[c];
        }
    }
    out
}

/// Mean curvature of a sampled immersion from its first and second
/// fundamental forms, with second-order differences of the positions.
pub fn mean_curvature(mesh: &SurfaceMesh) -> Result<ScalarField> {
    let g = &mesh.grid;
    let tst = AxisStencils::t_axis(g, false);
    let sst = AxisStencils::s_axis(g);
    let p = &mesh.positions;
    // s-derivatives first, then t-derivatives of those for the mixed term
    let mut xs = vec![[0.0; 3]; g.len()];
    for j in 0..g.nt {
        for i in 0..g.ns {
            let mut v = [0.0; 3];
            for &(ii, w) in &sst.d1[i] {
                let x = p[g.idx(j, ii)];
                for c in 0..3 {
                    v[c] += w * x[c];
                }
            }
            xs[g.idx(j, i)] = v;
        }
    }
    let mut h = ScalarField::zeros(g);
    for j in 0..g.nt {
        for i in 0..g.ns {
            let xt = combine(p, g, j, &tst.d1[j], i, true);
            let xtt = combine(p, g, j, &tst.d2[j], i, true);
            let xts = combine(&xs, g, j, &tst.d1[j], i, false);
            let xs_ji = xs[g.idx(j, i)];
            let mut xss = [0.0; 3];
            for &(ii, w) in &sst.d2[i] {
                let x = p[g.idx(j, ii)];
                for c in 0..3 {
                    xss[c] += w * x[c];
                }
            }
            let n = cross(xt, xs_ji).map(|v| v * mesh.normal_orientation);
            let (e, f, gg) = (dot(xt, xt), dot(xt, xs_ji), dot(xs_ji, xs_ji));
            let w2 = e * gg - f * f;
            if !(w2 > 0.0) {
                return Err(CmcError::DegenerateMetric { j, i });
            }
            let num = e * dot(xss, n) - 2.0 * f * dot(xts, n) + gg * dot(xtt, n);
            h.set(j, i, num / (2.0 * w2 * w2.sqrt()));
        }
    }
    Ok(h)
}

/// Local data of a surface written as `X = (t, ρ cos θ, ρ sin θ)` with
/// `ρ(t, s)` and `θ(t, s)`: values and derivatives up to second order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolarJet<T> {
    pub rho: T,
    pub rho_t: T,
    pub rho_s: T,
    pub rho_tt: T,
    pub rho_ts: T,
    pub rho_ss: T,
    pub th_t: T,
    pub th_s: T,
    pub th_tt: T,
    pub th_ts: T,
    pub th_ss: T,
}

/// Tangent and unnormalized normal `X_t × X_s` in the orthonormal frame
/// `(e_x, e_r(θ), e_θ(θ))`.
pub(crate) fn polar_tangents<T: Scalar>(j: &PolarJet<T>) -> ([T; 3], [T; 3], [T; 3]) {
    let one = T::from_f64(1.0);
    let zero = T::from_f64(0.0);
    let xt = [one, j.rho_t, j.rho * j.th_t];
    let xs = [zero, j.rho_s, j.rho * j.th_s];
    let n = [
        xt[1] * xs[2] - xt[2] * xs[1],
        xt[2] * xs[0] - xt[0] * xs[2],
        xt[0] * xs[1] - xt[1] * xs[0],
    ];
    (xt, xs, n)
}

/// Mean curvature with respect to `X_t × X_s` and the metric determinant.
/// Frame derivatives are exact, so a constant `ρ` gives exactly `1/(2ρ)`.
pub(crate) fn polar_mean_curvature<T: Scalar>(j: &PolarJet<T>) -> (T, T) {
    let (xt, xs, n) = polar_tangents(j);
    let two = 2.0;
    let xtt = [
        T::from_f64(0.0),
        j.rho_tt - j.rho * j.th_t * j.th_t,
        j.rho_t * j.th_t * two + j.rho * j.th_tt,
    ];
    let xts = [
        T::from_f64(0.0),
        j.rho_ts - j.rho * j.th_t * j.th_s,
        j.rho_t * j.th_s + j.rho_s * j.th_t + j.rho * j.th_ts,
    ];
    let xss = [
        T::from_f64(0.0),
        j.rho_ss - j.rho * j.th_s * j.th_s,
        j.rho_s * j.th_s * two + j.rho * j.th_ss,
    ];
    let d = |a: [T; 3], b: [T; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (e, f, g) = (d(xt, xt), d(xt, xs), d(xs, xs));
    let w2 = e * g - f * f;
    let num = e * d(xss, n) - f * d(xts, n) * two + g * d(xtt, n);
    (num / (w2 * w2.sqrt() * two), w2)
}

/// Second-order derivatives of `ρ = r − u` at node `(j, i)`.
pub(crate) fn rho_derivatives<T: Scalar>(
    grid: &Grid,
    tst: &AxisStencils,
    sst: &AxisStencils,
    r: T,
    u: &[T],
    j: usize,
    i: usize,
) -> [T; 6] {
    let zero = T::from_f64(0.0);
    let at = |jj: usize, ii: usize| u[grid.idx(jj, ii)];
    let mut ut = zero;
    let mut utt = zero;
    for &(jj, w) in &tst.d1[j] {
        ut = ut + at(jj, i) * w;
    }
    for &(jj, w) in &tst.d2[j] {
        utt = utt + at(jj, i) * w;
    }
    let mut us = zero;
    let mut uss = zero;
    for &(ii, w) in &sst.d1[i] {
        us = us + at(j, ii) * w;
    }
    for &(ii, w) in &sst.d2[i] {
        uss = uss + at(j, ii) * w;
    }
    let mut uts = zero;
    for &(jj, wt) in &tst.d1[j] {
        for &(ii, ws) in &sst.d1[i] {
            uts = uts + at(jj, ii) * (wt * ws);
        }
    }
    [r - at(j, i), -ut, -us, -utt, -uts, -uss]
}

/// Mean curvature of `φ + u N` from the closed-form graph equation, with
/// second-order differences of `u` only. Exactly `1/(2r)` for `u ≡ 0`; its
/// linearization at zero is half the five-point Jacobi stencil.
pub fn graph_mean_curvature(
    config: &CylinderConfig,
    grid: &Grid,
    u: &ScalarField,
) -> Result<ScalarField> {
    if u.grid() != grid {
        return Err(CmcError::GridMismatch("field and grid differ".into()));
    }
    let limit = DEGENERACY_FRACTION * config.r;
    let max_abs_u = u.max_abs();
    if max_abs_u >= limit || !max_abs_u.is_finite() {
        return Err(CmcError::GraphDegenerate { max_abs_u, limit });
    }
    let tst = AxisStencils::t_axis(grid, true);
    let sst = AxisStencils::s_axis(grid);
    let mut out = ScalarField::zeros(grid);
    for j in 0..grid.nt {
        for i in 0..grid.ns {
            let [rho, rho_t, rho_s, rho_tt, rho_ts, rho_ss] =
                rho_derivatives(grid, &tst, &sst, config.r, u.values(), j, i);
            let jet = PolarJet {
                rho,
                rho_t,
                rho_s,
                rho_tt,
                rho_ts,
                rho_ss,
                th_t: 0.0,
                th_s: 1.0,
                th_tt: 0.0,
                th_ts: 0.0,
                th_ss: 0.0,
            };
            let (h, w2) = polar_mean_curvature(&jet);
            if !(w2 > 0.0) {
                return Err(CmcError::DegenerateMetric { j, i });
            }
            out.set(j, i, h);
        }
    }
    Ok(out)
}
