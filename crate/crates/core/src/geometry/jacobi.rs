use super::{CylinderConfig, Grid, ScalarField, TMode};
use crate::banded::SymBandedMatrix;
use crate::{CmcError, Result};

/// Ordering of the free nodes (those not pinned by a Dirichlet condition)
/// used for banded assembly. Periodic rows are interleaved
/// `0, nt−1, 1, nt−2, …` so the wrap-around coupling stays in the band.
#[derive(Debug, Clone)]
pub(crate) struct UnknownLayout {
    pub grid: Grid,
    pub rows: Vec<usize>,
    pub row_pos: Vec<Option<usize>>,
    pub i_lo: usize,
    pub i_hi: usize,
}

impl UnknownLayout {
    pub fn new(config: &CylinderConfig, grid: &Grid) -> Self {
        let nt = grid.nt;
        let rows: Vec<usize> = match grid.t_mode {
            TMode::DirichletEnds => (1..nt - 1).collect(),
            TMode::HalfPeriodNeumann => (0..nt).collect(),
            TMode::Periodic => {
                let mut v = Vec::with_capacity(nt);
                let (mut a, mut b) = (0usize, nt - 1);
                while a <= b {
                    v.push(a);
                    if a != b {
                        v.push(b);
                    }
                    a += 1;
                    if b == 0 {
                        break;
                    }
                    b -= 1;
                }
                v
            }
        };
        let mut row_pos = vec![None; nt];
        for (p, &j) in rows.iter().enumerate() {
            row_pos[j] = Some(p);
        }
        let i_hi = if config.is_planar() { grid.ns - 2 } else { grid.ns - 1 };
        Self { grid: *grid, rows, row_pos, i_lo: 1, i_hi }
    }

    pub fn nu(&self) -> usize {
        self.i_hi - self.i_lo + 1
    }

    pub fn n(&self) -> usize {
        self.rows.len() * self.nu()
    }

    pub fn index(&self, j: usize, i: usize) -> Option<usize> {
        if i < self.i_lo || i > self.i_hi {
            return None;
        }
        self.row_pos[j].map(|p| p * self.nu() + (i - self.i_lo))
    }

    pub fn node(&self, k: usize) -> (usize, usize) {
        let nu = self.nu();
        (self.rows[k / nu], self.i_lo + k % nu)
    }

    /// Half-bandwidth of the assembled operator.
    pub fn kd(&self) -> usize {
        match self.grid.t_mode {
            TMode::Periodic => 2 * self.nu(),
            _ => self.nu(),
        }
    }

    pub fn gather(&self, f: &ScalarField) -> Vec<f64> {
        (0..self.n())
            .map(|k| {
                let (j, i) = self.node(k);
                f.get(j, i)
            })
            .collect()
    }

    pub fn scatter(&self, x: &[f64]) -> ScalarField {
        let mut f = ScalarField::zeros(&self.grid);
        for (k, &v) in x.iter().enumerate() {
            let (j, i) = self.node(k);
            f.set(j, i, v);
        }
        f
    }

    /// Quadrature weight `w_t w_s r` of unknown `k`.
    pub fn weight(&self, k: usize, r: f64) -> f64 {
        let (j, i) = self.node(k);
        self.grid.t_weight(j) * self.grid.s_weight(i) * r
    }
}

/// Stencil of `L = ∂tt + (1/r²)(∂ss + 1)` at a free node, as
/// `(j, i, coefficient)`. The Robin column uses ghost-node elimination.
fn stencil(config: &CylinderConfig, grid: &Grid, j: usize, i: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(6);
    let nt = grid.nt;
    let dt2 = 1.0 / (grid.dt() * grid.dt());
    match grid.t_mode {
        TMode::Periodic => {
            out.push(((j + 1) % nt, i, dt2));
            out.push(((j + nt - 1) % nt, i, dt2));
            out.push((j, i, -2.0 * dt2));
        }
        TMode::HalfPeriodNeumann if j == 0 => {
            out.push((1, i, 2.0 * dt2));
            out.push((0, i, -2.0 * dt2));
        }
        TMode::HalfPeriodNeumann if j == nt - 1 => {
            out.push((nt - 2, i, 2.0 * dt2));
            out.push((nt - 1, i, -2.0 * dt2));
        }
        _ => {
            out.push((j + 1, i, dt2));
            out.push((j - 1, i, dt2));
            out.push((j, i, -2.0 * dt2));
        }
    }
    for (ii, c) in arc_stencil(config, grid, i) {
        out.push((j, ii, c / (config.r * config.r)));
    }
    out
}

/// Stencil of `∂ss + 1` in column `i` (no radius scaling).
fn arc_stencil(config: &CylinderConfig, grid: &Grid, i: usize) -> Vec<(usize, f64)> {
    let ds = grid.ds();
    let a = 1.0 / (ds * ds);
    if i == grid.ns - 1 {
        let kappa = config.robin_slope().expect("Robin column only exists for wedges");
        vec![(i - 1, 2.0 * a), (i, -2.0 * a + 2.0 * kappa / ds + 1.0)]
    } else {
        vec![(i + 1, a), (i - 1, a), (i, -2.0 * a + 1.0)]
    }
}

fn check_grid(grid: &Grid, v: &ScalarField) -> Result<()> {
    if v.grid() != grid {
        return Err(CmcError::GridMismatch("field and grid differ".into()));
    }
    Ok(())
}

/// Discrete Jacobi operator `L v = v_tt + (1/r²)(v_ss + v)`. Values on
/// pinned nodes are zero; the wedge's free column carries the Robin
/// condition `v_s = κ v` through a ghost node.
pub fn jacobi_apply(config: &CylinderConfig, grid: &Grid, v: &ScalarField) -> Result<ScalarField> {
    check_grid(grid, v)?;
    let layout = UnknownLayout::new(config, grid);
    let mut out = ScalarField::zeros(grid);
    for &j in &layout.rows {
        for i in layout.i_lo..=layout.i_hi {
            let val = stencil(config, grid, j, i).iter().map(|&(jj, ii, c)| c * v.get(jj, ii)).sum();
            out.set(j, i, val);
        }
    }
    Ok(out)
}

/// `v_ss + v` with the same boundary treatment as [`jacobi_apply`].
pub fn arc_operator_apply(
    config: &CylinderConfig,
    grid: &Grid,
    v: &ScalarField,
) -> Result<ScalarField> {
    check_grid(grid, v)?;
    let layout = UnknownLayout::new(config, grid);
    let mut out = ScalarField::zeros(grid);
    for &j in &layout.rows {
        for i in layout.i_lo..=layout.i_hi {
            let val = arc_stencil(config, grid, i).iter().map(|&(ii, c)| c * v.get(j, ii)).sum();
            out.set(j, i, val);
        }
    }
    Ok(out)
}

/// `I(u, v) = ∫ (⟨∇u, ∇v⟩ − u v / r²) dM − ∫_{Γ₂} q u v dt`, with gradients
/// integrated exactly on the piecewise-linear reconstruction and the rest by
/// the trapezoidal rule. Equals `⟨−L u, v⟩` for fields obeying the pinned
/// boundary values.
pub fn index_form(
    config: &CylinderConfig,
    grid: &Grid,
    u: &ScalarField,
    v: &ScalarField,
) -> Result<f64> {
    check_grid(grid, u)?;
    check_grid(grid, v)?;
    let r = config.r;
    let (nt, ns) = (grid.nt, grid.ns);
    let (dt, ds) = (grid.dt(), grid.ds());
    let t_edges: Vec<(usize, usize)> = match grid.t_mode {
        TMode::Periodic => (0..nt).map(|j| (j, (j + 1) % nt)).collect(),
        _ => (0..nt - 1).map(|j| (j, j + 1)).collect(),
    };
    let mut grad_t = 0.0;
    for &(a, b) in &t_edges {
        for i in 0..ns {
            let du = u.get(b, i) - u.get(a, i);
            let dv = v.get(b, i) - v.get(a, i);
            grad_t += grid.s_weight(i) * du * dv / dt;
        }
    }
    let mut grad_s = 0.0;
    let mut mass = 0.0;
    for j in 0..nt {
        let wt = grid.t_weight(j);
        for i in 0..ns - 1 {
            grad_s += wt * (u.get(j, i + 1) - u.get(j, i)) * (v.get(j, i + 1) - v.get(j, i)) / ds;
        }
        for i in 0..ns {
            mass += wt * grid.s_weight(i) * u.get(j, i) * v.get(j, i);
        }
    }
    let mut boundary = 0.0;
    if let Some(q) = config.robin_coefficient() {
        for j in 0..nt {
            boundary += grid.t_weight(j) * q * u.get(j, ns - 1) * v.get(j, ns - 1);
        }
    }
    Ok(r * grad_t + grad_s / r - mass / r - boundary)
}

/// Symmetrized `−L` on the free nodes, `W^{1/2}(−L)W^{−1/2}` with the
/// quadrature weights `W`, together with the node layout.
pub(crate) fn assemble_symmetric(
    config: &CylinderConfig,
    grid: &Grid,
) -> (SymBandedMatrix, UnknownLayout) {
    let layout = UnknownLayout::new(config, grid);
    let mut a = SymBandedMatrix::zeros(layout.n(), layout.kd());
    for k in 0..layout.n() {
        let (j, i) = layout.node(k);
        let wk = layout.weight(k, config.r);
        for (jj, ii, c) in stencil(config, grid, j, i) {
            if let Some(m) = layout.index(jj, ii) {
                if m <= k {
                    let wm = layout.weight(m, config.r);
                    a.add(k, m, -c * (wk / wm).sqrt());
                }
            }
        }
    }
    (a, layout)
}
