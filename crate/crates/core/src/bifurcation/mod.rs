//! Bifurcation from the trivial cylinder branch: locating the critical mean
//! curvature, checking the simple-eigenvalue hypotheses, switching onto the
//! non-rotational branch and following it by pseudo-arclength continuation.
//!
//! Unknowns after switching are `(u, H)` with the base radius tied to the
//! mean curvature, `r(H) = 1/(2H)`, so every cylinder is a solution and the
//! linearization at `(0, H₀)` is the discrete Jacobi operator.

mod system;

use crate::geometry::{
    arc_operator_apply, build_grid, normal_graph, CylinderConfig, Grid, ScalarField, SurfaceMesh, TMode,
};
use crate::oracle::{eigenvalue_count_below, full_2d_jacobi_spectrum};
use crate::spectrum::bifurcation_period;
use crate::{CmcError, Result};
use system::{newton, BranchSystem, Constraint, Evaluator};

/// Residual of the mean-curvature problem on a fixed base cylinder.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    /// `2(H − H(u))` at equation nodes, `u` itself on pinned nodes and, in
    /// the wedge, the contact-angle defect on the free column.
    pub field: ScalarField,
    /// Wedge only: per row, the distance of the contact line from the
    /// supporting plane divided by `r`.
    pub on_plane: Option<Vec<f64>>,
}

/// Residual of the normal graph of `u` over `config`'s cylinder at mean
/// curvature `h`. In the wedge the contact line sits at `θ = β`.
pub fn residual(config: &CylinderConfig, grid: &Grid, u: &ScalarField, h: f64) -> Result<Residual> {
    residual_with_boundary(config, grid, u, h, None)
}

/// As [`residual`], with the wedge contact line at polar angle `theta[j]`
/// on row `j` and the arc stretched accordingly.
pub fn residual_with_boundary(
    config: &CylinderConfig,
    grid: &Grid,
    u: &ScalarField,
    h: f64,
    theta: Option<&[f64]>,
) -> Result<Residual> {
    config.validate()?;
    if u.grid() != grid {
        return Err(CmcError::GridMismatch("field and grid differ".into()));
    }
    if let Some(th) = theta {
        if th.len() != grid.nt {
            return Err(CmcError::GridMismatch(format!("{} boundary angles for {} rows", th.len(), grid.nt)));
        }
    }
    let ev = Evaluator::new(config, grid);
    let out = ev.eval(config.r, h, u.values(), theta)?;
    Ok(Residual { field: ScalarField::from_values(grid, out.field)?, on_plane: out.on_plane })
}

/// A point on the trivial branch where a simple eigenvalue crosses zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationPoint {
    /// Configuration with the critical radius `1/(2H₀)`.
    pub config: CylinderConfig,
    pub grid: Grid,
    /// Critical mean curvature `H₀`.
    pub h0: f64,
    /// Period of the bifurcating branch.
    pub period: f64,
    /// Null vector of the discrete Jacobi operator, unit quadrature norm.
    pub kernel: ScalarField,
    pub kernel_dim: usize,
    /// `∫ u₀ · 8H₀(u₀_ss + u₀) dM`.
    pub transversality: f64,
    /// Discrete eigenvalue closest to zero at `H₀`.
    pub critical_eigenvalue: f64,
}

/// A converged point on the bifurcating branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub u: ScalarField,
    /// Mean curvature; the base radius is `1/(2H)`.
    pub h: f64,
    /// Amplitude `⟨u, kernel⟩`.
    pub epsilon: f64,
    pub arclength: f64,
    pub residual_norm: f64,
    /// Wedge only: polar angle of the contact line, per row.
    pub boundary_angle: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocateOptions {
    pub nt: usize,
    pub ns: usize,
    /// Search interval in `H`; defaults to ±5% around `1/(2r)`.
    pub search: Option<(f64, f64)>,
}

impl Default for LocateOptions {
    fn default() -> Self {
        Self { nt: 64, ns: 64, search: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Max-norm tolerance on the residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 30 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    /// Smallest step, as a fraction of the initial one.
    pub min_step_fraction: f64,
    /// Largest step, as a multiple of the initial one.
    pub max_step_factor: f64,
    /// Corrector iterations counted as an easy step.
    pub easy_iterations: usize,
    /// Walk against the initial secant.
    pub reverse: bool,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            min_step_fraction: 1.0 / 64.0,
            max_step_factor: 4.0,
            easy_iterations: 3,
            reverse: false,
        }
    }
}

fn t_extent(period: f64, t_mode: TMode) -> f64 {
    match t_mode {
        TMode::Periodic => period,
        TMode::HalfPeriodNeumann | TMode::DirichletEnds => 0.5 * period,
    }
}

/// Finds `H₀` by bisecting the negative-eigenvalue count of the discrete
/// Jacobi operator on the cylinder of radius `1/(2H)`, over a grid spanning
/// the period predicted by the spectrum module (half of it for
/// `HalfPeriodNeumann` and `DirichletEnds`).
pub fn locate_bifurcation(config: &CylinderConfig, t_mode: TMode, opts: &LocateOptions) -> Result<BifurcationPoint> {
    config.validate()?;
    let (period, _) = bifurcation_period(config)?;
    let grid = build_grid(config, opts.nt, opts.ns, t_extent(period, t_mode), t_mode)?;
    let h_nom = 0.5 / config.r;
    let (mut lo, mut hi) = opts.search.unwrap_or((0.95 * h_nom, 1.05 * h_nom));
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CmcError::InvalidConfig(format!("invalid search interval [{lo}, {hi}]")));
    }
    let count = |h: f64| eigenvalue_count_below(&config.with_radius(0.5 / h), &grid, 0.0);
    let c_lo = count(lo)?;
    if count(hi)? <= c_lo {
        return Err(CmcError::NoBifurcation(format!(
            "no eigenvalue crosses zero for H in [{lo}, {hi}]"
        )));
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? > c_lo {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let h0 = 0.5 * (lo + hi);
    let crit = config.with_radius(0.5 / h0);
    let r0 = crit.r;

    let delta = 1e-4 / (r0 * r0);
    let kernel_dim = eigenvalue_count_below(&crit, &grid, delta)? - eigenvalue_count_below(&crit, &grid, -delta)?;
    if kernel_dim != 1 {
        return Err(CmcError::DegenerateKernel(kernel_dim));
    }
    let pairs = full_2d_jacobi_spectrum(&crit, &grid, c_lo + 1)?;
    let (critical_eigenvalue, mut kernel) = pairs
        .into_iter()
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .expect("at least one eigenpair");
    let row = if t_mode == TMode::DirichletEnds { 1 } else { 0 };
    let row_sum: f64 = (0..grid.ns).map(|i| kernel.get(row, i)).sum();
    if row_sum < 0.0 {
        kernel = kernel.scaled(-1.0);
    }
    let arc = arc_operator_apply(&crit, &grid, &kernel)?;
    let transversality = 8.0 * h0 * kernel.inner(&arc, r0)?;
    Ok(BifurcationPoint {
        config: crit,
        grid,
        h0,
        period,
        kernel,
        kernel_dim,
        transversality,
        critical_eigenvalue,
    })
}

fn amplitude_weights(sys: &BranchSystem, point: &BifurcationPoint) -> Vec<f64> {
    let g = sys.grid();
    let r0 = point.config.r;
    let mut c = vec![0.0; sys.n()];
    for &j in &sys.rows {
        for i in sys.i_lo..=sys.i_hi {
            c[sys.u_index(j, i).unwrap()] = g.t_weight(j) * g.s_weight(i) * r0;
        }
    }
    c
}

fn make_state(sys: &BranchSystem, point: &BifurcationPoint, x: &[f64], h: f64, arclength: f64, residual_norm: f64) -> Result<BranchState> {
    let (u, theta) = sys.unpack(x);
    let u = ScalarField::from_values(&point.grid, u)?;
    let epsilon = u.inner(&point.kernel, point.config.r)?;
    Ok(BranchState { u, h, epsilon, arclength, residual_norm, boundary_angle: theta })
}

fn state_vector(sys: &BranchSystem, state: &BranchState) -> Vec<f64> {
    sys.pack(state.u.values(), state.boundary_angle.as_deref())
}

fn check_point(point: &BifurcationPoint) -> Result<()> {
    if !(point.transversality.abs() > 0.0) {
        return Err(CmcError::NoBifurcation("transversality vanishes".into()));
    }
    Ok(())
}

/// Solves `{G(u, H) = 0, ⟨u, kernel⟩ = ε}` from the predictor
/// `(ε·kernel, H₀)`.
pub fn branch_switch(point: &BifurcationPoint, epsilon: f64) -> Result<BranchState> {
    branch_switch_with(point, epsilon, &NewtonOptions::default())
}

pub fn branch_switch_with(point: &BifurcationPoint, epsilon: f64, opts: &NewtonOptions) -> Result<BranchState> {
    check_point(point)?;
    let sys = BranchSystem::new(&point.config, &point.grid);
    let mut x = sys.trivial();
    let r0 = point.config.r;
    let g = &point.grid;
    let slope = point.config.robin_slope();
    for &j in &sys.rows {
        for i in sys.i_lo..=sys.i_hi {
            x[sys.u_index(j, i).unwrap()] = epsilon * point.kernel.get(j, i);
        }
        if let (Some(k), Some(kappa)) = (sys.theta_index(j), slope) {
            // Keep the predicted contact line on the plane to first order.
            x[k] -= epsilon * point.kernel.get(j, g.ns - 1) * kappa / r0;
        }
    }
    let kernel = sys.pack(point.kernel.values(), None);
    let c = amplitude_weights(&sys, point).iter().zip(&kernel).map(|(w, k)| w * k).collect();
    let constraint = Constraint { c, d: 0.0, target: epsilon };
    let res = newton(&sys, x, point.h0, &constraint, opts.tol, opts.max_iter)?;
    make_state(&sys, point, &res.x, res.h, 0.0, res.residual_norm)
}

/// Pseudo-arclength continuation from `start` for `steps` accepted steps.
/// The first tangent is the secant from the bifurcation point to `start`
/// (the kernel direction if `start` is the bifurcation point). Steps are
/// measured in the quadrature norm of `u` plus `|ΔH|`.
pub fn continue_branch(
    point: &BifurcationPoint,
    start: &BranchState,
    steps: usize,
    ds: f64,
    opts: &ContinuationOptions,
) -> Result<Vec<BranchState>> {
    check_point(point)?;
    if !(ds.is_finite() && ds > 0.0) {
        return Err(CmcError::InvalidConfig(format!("step size must be positive, got {ds}")));
    }
    if start.u.grid() != &point.grid {
        return Err(CmcError::GridMismatch("start state on another grid".into()));
    }
    let sys = BranchSystem::new(&point.config, &point.grid);
    let w = amplitude_weights(&sys, point);
    let n = sys.n();
    let norm = |dx: &[f64], dh: f64| (dx.iter().zip(&w).map(|(a, b)| b * a * a).sum::<f64>() + dh * dh).sqrt();

    let mut x = state_vector(&sys, start);
    let mut h = start.h;
    let origin = sys.trivial();
    let mut tx: Vec<f64> = x.iter().zip(&origin).map(|(a, b)| a - b).collect();
    let mut th = h - point.h0;
    if norm(&tx, th) == 0.0 {
        tx = sys.pack(point.kernel.values(), None);
        if sys.wedge {
            for &j in &sys.rows {
                tx[sys.theta_index(j).unwrap()] = 0.0;
            }
        }
        th = 0.0;
    }
    let scale = norm(&tx, th);
    tx.iter_mut().for_each(|v| *v /= scale);
    th /= scale;
    if opts.reverse {
        tx.iter_mut().for_each(|v| *v = -*v);
        th = -th;
    }

    let ds_min = ds * opts.min_step_fraction;
    let ds_max = ds * opts.max_step_factor;
    let mut step = ds;
    let mut easy = 0;
    let mut arclength = start.arclength;
    let mut out = Vec::with_capacity(steps);
    while out.len() < steps {
        let xp: Vec<f64> = (0..n).map(|k| x[k] + step * tx[k]).collect();
        let hp = h + step * th;
        let c: Vec<f64> = (0..n).map(|k| w[k] * tx[k]).collect();
        let target = c.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + th * h + step;
        let constraint = Constraint { c, d: th, target };
        match newton(&sys, xp, hp, &constraint, opts.newton.tol, opts.newton.max_iter) {
            Ok(res) => {
                let dx: Vec<f64> = (0..n).map(|k| res.x[k] - x[k]).collect();
                let dh = res.h - h;
                let len = norm(&dx, dh);
                tx = dx.iter().map(|v| v / len).collect();
                th = dh / len;
                arclength += len;
                x = res.x;
                h = res.h;
                out.push(make_state(&sys, point, &x, h, arclength, res.residual_norm)?);
                if res.iterations <= opts.easy_iterations {
                    easy += 1;
                    if easy >= 3 {
                        step = (2.0 * step).min(ds_max);
                        easy = 0;
                    }
                } else {
                    easy = 0;
                }
            }
            Err(CmcError::InvalidConfig(m)) => return Err(CmcError::InvalidConfig(m)),
            Err(_) => {
                easy = 0;
                step *= 0.5;
                if step < ds_min {
                    return Err(CmcError::ContinuationStalled { ds: step, ds_min });
                }
            }
        }
    }
    Ok(out)
}

/// Largest nodewise defect of reflection through the middle of the arc.
pub fn check_alexandrov_symmetry(state: &BranchState) -> f64 {
    let g = state.u.grid();
    let mut worst = 0.0f64;
    for j in 0..g.nt {
        for i in 0..g.ns {
            worst = worst.max((state.u.get(j, i) - state.u.get(j, g.mirror_s(i))).abs());
        }
    }
    worst
}

/// Largest axial oscillation `max_t u − min_t u` over the columns.
pub fn non_rotationality(state: &BranchState) -> f64 {
    let g = state.u.grid();
    (0..g.ns)
        .map(|i| {
            let col = (0..g.nt).map(|j| state.u.get(j, i));
            let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Least-squares fit `H − H₀ ≈ a·ε²` over the states. Returns `(a, R²)`.
pub fn quadratic_fit(h0: f64, states: &[BranchState]) -> (f64, f64) {
    let xs: Vec<f64> = states.iter().map(|s| s.epsilon * s.epsilon).collect();
    let ys: Vec<f64> = states.iter().map(|s| s.h - h0).collect();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let a = if sxx > 0.0 { xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / sxx } else { 0.0 };
    let mean = ys.iter().sum::<f64>() / ys.len().max(1) as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a * x).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (a, r2)
}

/// Embedded surface of a branch state over the cylinder of radius `1/(2H)`.
/// Wedge rows are stretched so the contact line sits at `Θ(t)`.
pub fn branch_surface(point: &BifurcationPoint, state: &BranchState) -> Result<SurfaceMesh> {
    let config = point.config.with_radius(0.5 / state.h);
    let mut mesh = normal_graph(&config, &point.grid, &state.u)?;
    if let (Some(theta), Some(beta)) = (&state.boundary_angle, config.beta()) {
        let g = point.grid;
        for j in 0..g.nt {
            for i in 0..g.ns {
                let rho = config.r - state.u.get(j, i);
                let ang = g.s(i) * theta[j] / beta;
                mesh.positions[g.idx(j, i)] = [g.t(j), rho * ang.cos(), rho * ang.sin()];
            }
        }
    }
    Ok(mesh)
}
