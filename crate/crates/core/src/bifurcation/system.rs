//! Discrete nonlinear system `G(x, H) = 0` for normal graphs over the
//! cylinder of radius `r(H) = 1/(2H)`, its complex-step Jacobian, and a
//! bordered Newton solver.

use crate::banded::{BandedLu, BandedMatrix};
use crate::geometry::{
    polar_mean_curvature, polar_tangents, rho_derivatives, AxisStencils, Convexity, CylinderConfig, Grid, PolarJet,
    TMode, DEGENERACY_FRACTION,
};
use crate::scalar::Scalar;
use crate::{CmcError, Result};
use num_complex::Complex64;

const CS_STEP: f64 = 1e-20;

/// Evaluates the mean-curvature residual and, for the wedge, the two
/// free-boundary conditions. Free-boundary rows are parametrized by the
/// polar angle `Θ(t)` of the contact line: the surface is
/// `ρ(t, s)·e_r(θ)` with `ρ = r − u` and `θ = sΘ(t)/β`.
#[derive(Debug, Clone)]
pub(crate) struct Evaluator {
    pub config: CylinderConfig,
    pub grid: Grid,
    tst: AxisStencils,
    sst: AxisStencils,
}

/// Output of [`Evaluator::eval`]: per-node residual and, for the wedge, the
/// per-row condition that the contact line lies on the supporting plane.
pub(crate) struct Evaluated<T> {
    pub field: Vec<T>,
    pub on_plane: Option<Vec<T>>,
}

impl Evaluator {
    pub fn new(config: &CylinderConfig, grid: &Grid) -> Self {
        Self {
            config: *config,
            grid: *grid,
            tst: AxisStencils::t_axis(grid, true),
            sst: AxisStencils::s_axis(grid),
        }
    }

    fn wedge(&self) -> Option<(f64, f64)> {
        self.config.beta().map(|b| {
            let sigma = if self.config.convexity() == Some(Convexity::Convex) { 1.0 } else { -1.0 };
            (b, sigma)
        })
    }

    pub fn pinned_row(&self, j: usize) -> bool {
        self.grid.t_mode == TMode::DirichletEnds && (j == 0 || j == self.grid.nt - 1)
    }

    /// `u` holds all nodes; `theta` one boundary angle per row (wedge only,
    /// `None` means `Θ ≡ β`).
    pub fn eval<T: Scalar>(&self, r: T, h: T, u: &[T], theta: Option<&[T]>) -> Result<Evaluated<T>> {
        let g = &self.grid;
        let (nt, ns) = (g.nt, g.ns);
        let last = ns - 1;
        let limit = DEGENERACY_FRACTION * r.re();
        let max_abs_u = u.iter().fold(0.0f64, |m, v| m.max(v.re().abs()));
        if !(max_abs_u < limit) {
            return Err(CmcError::GraphDegenerate { max_abs_u, limit });
        }
        let zero = T::from_f64(0.0);
        let one = T::from_f64(1.0);
        let gamma = self.config.gamma;
        let (cg, sg) = (gamma.cos(), gamma.sin());
        let wedge = self.wedge();
        let th: Vec<T> = match (wedge, theta) {
            (Some(_), Some(t)) => t.to_vec(),
            (Some((beta, _)), None) => vec![T::from_f64(beta); nt],
            (None, _) => Vec::new(),
        };
        let diff = |row: &[(usize, f64)]| row.iter().fold(zero, |acc, &(jj, w)| acc + th[jj] * w);
        let (th_t, th_tt): (Vec<T>, Vec<T>) = if wedge.is_some() {
            ((0..nt).map(|j| diff(&self.tst.d1[j])).collect(), (0..nt).map(|j| diff(&self.tst.d2[j])).collect())
        } else {
            (Vec::new(), Vec::new())
        };
        let mut field = vec![zero; nt * ns];
        for j in 0..nt {
            let pinned = self.pinned_row(j);
            for i in 0..ns {
                let k = g.idx(j, i);
                if pinned || i == 0 || (wedge.is_none() && i == last) {
                    field[k] = u[k];
                    continue;
                }
                let [rho, rho_t, rho_s, rho_tt, rho_ts, rho_ss] =
                    rho_derivatives(g, &self.tst, &self.sst, r, u, j, i);
                let jet = match wedge {
                    None => PolarJet {
                        rho,
                        rho_t,
                        rho_s,
                        rho_tt,
                        rho_ts,
                        rho_ss,
                        th_t: zero,
                        th_s: one,
                        th_tt: zero,
                        th_ts: zero,
                        th_ss: zero,
                    },
                    Some((beta, _)) => {
                        let s = (g.s(i) - g.s_lo) / beta;
                        PolarJet {
                            rho,
                            rho_t,
                            rho_s,
                            rho_tt,
                            rho_ts,
                            rho_ss,
                            th_t: th_t[j] * s,
                            th_s: th[j] / beta,
                            th_tt: th_tt[j] * s,
                            th_ts: th_t[j] / beta,
                            th_ss: zero,
                        }
                    }
                };
                if let (Some((beta, sigma)), true) = (wedge, i == last) {
                    // Contact-angle defect ⟨N̂, Ñ⟩ − cos γ, with Ñ the unit
                    // normal of the supporting plane written in the frame at Θ.
                    let (_, _, n) = polar_tangents(&jet);
                    let w2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
                    if !(w2.re() > 0.0) {
                        return Err(CmcError::DegenerateMetric { j, i });
                    }
                    let phi = -(th[j] - beta);
                    let (sp, cp) = (phi.sin(), phi.cos());
                    let nr = -(cp * cg) - sp * (sigma * sg);
                    let nth = -(sp * cg) + cp * (sigma * sg);
                    field[k] = (n[1] * nr + n[2] * nth) / w2.sqrt() - cg;
                } else {
                    let (hl, w2) = polar_mean_curvature(&jet);
                    if !(w2.re() > 0.0) {
                        return Err(CmcError::DegenerateMetric { j, i });
                    }
                    field[k] = (h - hl) * 2.0;
                }
            }
        }
        let on_plane = wedge.map(|(beta, sigma)| {
            (0..nt)
                .map(|j| {
                    if self.pinned_row(j) {
                        return th[j] - beta;
                    }
                    let d = th[j] - beta;
                    let er_dot = -(d.cos() * cg) + d.sin() * (sigma * sg);
                    ((r - u[g.idx(j, last)]) * er_dot + r * cg) / r
                })
                .collect()
        });
        Ok(Evaluated { field, on_plane })
    }
}

/// Unknowns: per free row, `u` on the free columns, then (wedge) `Θ`.
/// Equations use the same indexing: mean-curvature rows, the contact-angle
/// defect in the Robin column's slot, the on-plane condition in `Θ`'s slot.
#[derive(Debug, Clone)]
pub(crate) struct BranchSystem {
    pub ev: Evaluator,
    pub rows: Vec<usize>,
    row_pos: Vec<Option<usize>>,
    pub i_lo: usize,
    pub i_hi: usize,
    pub wedge: bool,
    t_colors: Vec<usize>,
    n_t_colors: usize,
}

impl BranchSystem {
    pub fn new(config: &CylinderConfig, grid: &Grid) -> Self {
        let ev = Evaluator::new(config, grid);
        let nt = grid.nt;
        let rows: Vec<usize> = match grid.t_mode {
            TMode::DirichletEnds => (1..nt - 1).collect(),
            TMode::HalfPeriodNeumann => (0..nt).collect(),
            TMode::Periodic => {
                let mut v = Vec::with_capacity(nt);
                for a in 0..(nt + 1) / 2 {
                    v.push(a);
                    if nt - 1 - a != a {
                        v.push(nt - 1 - a);
                    }
                }
                v
            }
        };
        let mut row_pos = vec![None; nt];
        for (p, &j) in rows.iter().enumerate() {
            row_pos[j] = Some(p);
        }
        let wedge = !config.is_planar();
        let i_hi = if wedge { grid.ns - 1 } else { grid.ns - 2 };
        // Rows sharing a colour are at cyclic distance ≥ 3.
        let rem = if grid.t_mode == TMode::Periodic { nt % 3 } else { 0 };
        let t_colors: Vec<usize> = (0..nt).map(|j| if j < nt - rem { j % 3 } else { 3 + (j - (nt - rem)) }).collect();
        let n_t_colors = 3 + rem;
        Self { ev, rows, row_pos, i_lo: 1, i_hi, wedge, t_colors, n_t_colors }
    }

    pub fn grid(&self) -> &Grid {
        &self.ev.grid
    }

    pub fn nu(&self) -> usize {
        self.i_hi - self.i_lo + 1
    }

    pub fn slots(&self) -> usize {
        self.nu() + usize::from(self.wedge)
    }

    pub fn n(&self) -> usize {
        self.rows.len() * self.slots()
    }

    pub fn u_index(&self, j: usize, i: usize) -> Option<usize> {
        if i < self.i_lo || i > self.i_hi {
            return None;
        }
        self.row_pos[j].map(|p| p * self.slots() + (i - self.i_lo))
    }

    pub fn theta_index(&self, j: usize) -> Option<usize> {
        if !self.wedge {
            return None;
        }
        self.row_pos[j].map(|p| p * self.slots() + self.nu())
    }

    fn band(&self) -> usize {
        let dp = if self.grid().t_mode == TMode::Periodic { 2 } else { 1 };
        (dp + 1) * self.slots() - 1
    }

    /// Rows coupled to row `j` by the axial stencils.
    fn neighbour_rows(&self, j: usize) -> Vec<usize> {
        let nt = self.grid().nt;
        let mut v = vec![j];
        match self.grid().t_mode {
            TMode::Periodic => {
                v.push((j + 1) % nt);
                v.push((j + nt - 1) % nt);
            }
            _ => {
                if j + 1 < nt {
                    v.push(j + 1);
                }
                if j > 0 {
                    v.push(j - 1);
                }
            }
        }
        v.retain(|&jj| self.row_pos[jj].is_some());
        v
    }

    /// Full-grid `u` and per-row `Θ` from an unknown vector.
    pub fn unpack<T: Scalar>(&self, x: &[T]) -> (Vec<T>, Option<Vec<T>>) {
        let g = self.grid();
        let mut u = vec![T::from_f64(0.0); g.len()];
        let mut theta = self.ev.config.beta().map(|b| vec![T::from_f64(b); g.nt]);
        for &j in &self.rows {
            for i in self.i_lo..=self.i_hi {
                u[g.idx(j, i)] = x[self.u_index(j, i).unwrap()];
            }
            if let Some(th) = theta.as_mut() {
                th[j] = x[self.theta_index(j).unwrap()];
            }
        }
        (u, theta)
    }

    pub fn pack(&self, u: &[f64], theta: Option<&[f64]>) -> Vec<f64> {
        let g = self.grid();
        let mut x = vec![0.0; self.n()];
        for &j in &self.rows {
            for i in self.i_lo..=self.i_hi {
                x[self.u_index(j, i).unwrap()] = u[g.idx(j, i)];
            }
            if let (Some(k), Some(th)) = (self.theta_index(j), theta) {
                x[k] = th[j];
            }
        }
        x
    }

    /// Unknown vector of the unperturbed cylinder.
    pub fn trivial(&self) -> Vec<f64> {
        let beta = self.ev.config.beta();
        let mut x = vec![0.0; self.n()];
        if let Some(b) = beta {
            for &j in &self.rows {
                x[self.theta_index(j).unwrap()] = b;
            }
        }
        x
    }

    /// `G(x, H)` with base radius `1/(2H)`.
    pub fn equations<T: Scalar>(&self, x: &[T], h: T) -> Result<Vec<T>> {
        let r = T::from_f64(0.5) / h;
        let (u, theta) = self.unpack(x);
        let out = self.ev.eval(r, h, &u, theta.as_deref())?;
        let g = self.grid();
        let mut eq = vec![T::from_f64(0.0); self.n()];
        for &j in &self.rows {
            for i in self.i_lo..=self.i_hi {
                eq[self.u_index(j, i).unwrap()] = out.field[g.idx(j, i)];
            }
            if let (Some(k), Some(p)) = (self.theta_index(j), out.on_plane.as_ref()) {
                eq[k] = p[j];
            }
        }
        Ok(eq)
    }

    /// Equation index → (row, column of the equation node, is on-plane row).
    fn equation_node(&self, e: usize) -> (usize, usize, bool) {
        let s = self.slots();
        let j = self.rows[e / s];
        let a = e % s;
        if a < self.nu() {
            (j, self.i_lo + a, false)
        } else {
            (j, self.grid().ns - 1, true)
        }
    }

    fn column_footprint(&self, i: usize, on_plane: bool) -> Vec<usize> {
        let ns = self.grid().ns;
        let cols: Vec<usize> = if on_plane {
            vec![ns - 1]
        } else if i == ns - 1 {
            vec![ns - 3, ns - 2, ns - 1]
        } else {
            vec![i - 1, i, i + 1]
        };
        cols.into_iter().filter(|&c| c >= self.i_lo && c <= self.i_hi).collect()
    }

    /// Banded `∂G/∂x` and the column `∂G/∂H` by complex-step
    /// differentiation, perturbing one colour class of unknowns per pass.
    pub fn jacobian(&self, x: &[f64], h: f64) -> Result<(BandedMatrix, Vec<f64>)> {
        let n = self.n();
        let band = self.band();
        let mut jac = BandedMatrix::zeros(n, band, band);
        let base: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let hc = Complex64::new(h, 0.0);
        let nbrs: Vec<Vec<usize>> = (0..self.grid().nt).map(|j| self.neighbour_rows(j)).collect();
        let eq_nodes: Vec<(usize, usize, bool)> = (0..n).map(|e| self.equation_node(e)).collect();

        for ct in 0..self.n_t_colors {
            for cs in 0..3 {
                let mut xc = base.clone();
                let mut any = false;
                for &j in &self.rows {
                    if self.t_colors[j] != ct {
                        continue;
                    }
                    for i in self.i_lo..=self.i_hi {
                        if i % 3 == cs {
                            xc[self.u_index(j, i).unwrap()].im = CS_STEP;
                            any = true;
                        }
                    }
                }
                if !any {
                    continue;
                }
                let eq = self.equations(&xc, hc)?;
                for (e, &(j, i, on_plane)) in eq_nodes.iter().enumerate() {
                    let d = eq[e].im / CS_STEP;
                    if d == 0.0 {
                        continue;
                    }
                    let jj = nbrs[j].iter().copied().find(|&r| self.t_colors[r] == ct);
                    let ii = self.column_footprint(i, on_plane).into_iter().find(|&c| c % 3 == cs);
                    if let (Some(jj), Some(ii)) = (jj, ii) {
                        jac.add(e, self.u_index(jj, ii).unwrap(), d);
                    }
                }
            }
        }
        if self.wedge {
            for ct in 0..self.n_t_colors {
                let mut xc = base.clone();
                let mut any = false;
                for &j in &self.rows {
                    if self.t_colors[j] == ct {
                        xc[self.theta_index(j).unwrap()].im = CS_STEP;
                        any = true;
                    }
                }
                if !any {
                    continue;
                }
                let eq = self.equations(&xc, hc)?;
                for (e, &(j, _, _)) in eq_nodes.iter().enumerate() {
                    let d = eq[e].im / CS_STEP;
                    if d == 0.0 {
                        continue;
                    }
                    if let Some(jj) = nbrs[j].iter().copied().find(|&r| self.t_colors[r] == ct) {
                        jac.add(e, self.theta_index(jj).unwrap(), d);
                    }
                }
            }
        }
        let eq = self.equations(&base, Complex64::new(h, CS_STEP))?;
        let dh = eq.iter().map(|v| v.im / CS_STEP).collect();
        Ok((jac, dh))
    }
}

/// Linear constraint `c·x + d·H = target` closing the square system.
#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub c: Vec<f64>,
    pub d: f64,
    pub target: f64,
}

impl Constraint {
    fn value(&self, x: &[f64], h: f64) -> f64 {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.d * h - self.target
    }
}

/// Solves `[A b; cᵀ d] [x; y] = [f; g]` by block elimination on the banded
/// LU of `A`, with two steps of iterative refinement on the full system.
struct Bordered<'a> {
    a: &'a BandedMatrix,
    lu: BandedLu,
    b: &'a [f64],
    c: &'a [f64],
    d: f64,
    z2: Vec<f64>,
}

impl<'a> Bordered<'a> {
    fn new(a: &'a BandedMatrix, b: &'a [f64], c: &'a [f64], d: f64) -> Result<Self> {
        let lu = a.clone().lu()?;
        let z2 = lu.solve(b);
        Ok(Self { a, lu, b, c, d, z2 })
    }

    fn once(&self, f: &[f64], g: f64) -> Result<(Vec<f64>, f64)> {
        let z1 = self.lu.solve(f);
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let denom = self.d - dot(self.c, &self.z2);
        if denom == 0.0 || !denom.is_finite() {
            return Err(CmcError::ConvergenceFailure("singular bordered system".into()));
        }
        let y = (g - dot(self.c, &z1)) / denom;
        let x = z1.iter().zip(&self.z2).map(|(a, b)| a - y * b).collect();
        Ok((x, y))
    }

    fn solve(&self, f: &[f64], g: f64) -> Result<(Vec<f64>, f64)> {
        let (mut x, mut y) = self.once(f, g)?;
        for _ in 0..2 {
            let ax = self.a.matvec(&x);
            let rf: Vec<f64> = (0..f.len()).map(|k| f[k] - ax[k] - self.b[k] * y).collect();
            let rg = g - self.c.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - self.d * y;
            let (dx, dy) = self.once(&rf, rg)?;
            x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
            y += dy;
        }
        Ok((x, y))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonResult {
    pub x: Vec<f64>,
    pub h: f64,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Newton's method on `{G(x, H) = 0, constraint}`. Fails after `max_iter`
/// iterations or when the step grows twice in a row.
pub(crate) fn newton(
    sys: &BranchSystem,
    mut x: Vec<f64>,
    mut h: f64,
    constraint: &Constraint,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonResult> {
    let mut prev_step = f64::INFINITY;
    let mut growth = 0;
    for it in 0..=max_iter {
        let g = sys.equations(&x, h)?;
        let cres = constraint.value(&x, h);
        let gnorm = max_abs(&g);
        if gnorm.is_nan() {
            return Err(CmcError::NewtonDiverged("residual is NaN".into()));
        }
        if gnorm < tol && cres.abs() < tol {
            return Ok(NewtonResult { x, h, iterations: it, residual_norm: gnorm });
        }
        if it == max_iter {
            break;
        }
        let (a, dh) = sys.jacobian(&x, h)?;
        let solver = Bordered::new(&a, &dh, &constraint.c, constraint.d)?;
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let (dx, dy) = solver.solve(&rhs, -cres)?;
        let step = max_abs(&dx).max(dy.abs());
        if step > prev_step {
            growth += 1;
            if growth >= 2 {
                return Err(CmcError::NewtonDiverged(format!(
                    "step norm grew twice in a row (iteration {it}, step {step:.3e})"
                )));
            }
        } else {
            growth = 0;
        }
        prev_step = step;
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        h += dy;
        if !h.is_finite() || h <= 0.0 {
            return Err(CmcError::NewtonDiverged(format!("mean curvature left the positive axis: {h}")));
        }
    }
    Err(CmcError::NewtonDiverged(format!("no convergence in {max_iter} iterations")))
}
