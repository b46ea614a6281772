use super::CylinderConfig;
use crate::{CmcError, Result};

/// Treatment of the axial variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TMode {
    /// Truncated cylinder of length h, u = 0 on both end rows.
    DirichletEnds,
    /// One full period T with wrap-around.
    Periodic,
    /// Half period T/2 with mirror (Neumann) ends; keeps the cosine modes.
    HalfPeriodNeumann,
}

/// Uniform tensor-product grid over `[0, t_extent] × [s_lo, s_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nt: usize,
    pub ns: usize,
    pub t_extent: f64,
    pub t_mode: TMode,
    pub s_lo: f64,
    pub s_hi: f64,
}

pub fn build_grid(
    config: &CylinderConfig,
    nt: usize,
    ns: usize,
    t_extent: f64,
    t_mode: TMode,
) -> Result<Grid> {
    config.validate()?;
    if nt < 4 || ns < 4 {
        return Err(CmcError::InvalidConfig(format!(
            "grid needs at least 4 samples per direction, got {nt}x{ns}"
        )));
    }
    if !(t_extent.is_finite() && t_extent > 0.0) {
        return Err(CmcError::InvalidConfig(format!(
            "axial extent must be positive, got {t_extent}"
        )));
    }
    let (s_lo, s_hi) = config.s_interval();
    Ok(Grid { nt, ns, t_extent, t_mode, s_lo, s_hi })
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nt * self.ns
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, j: usize, i: usize) -> usize {
        j * self.ns + i
    }

    pub fn dt(&self) -> f64 {
        match self.t_mode {
            TMode::Periodic => self.t_extent / self.nt as f64,
            _ => self.t_extent / (self.nt - 1) as f64,
        }
    }

    pub fn ds(&self) -> f64 {
        (self.s_hi - self.s_lo) / (self.ns - 1) as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn s(&self, i: usize) -> f64 {
        if i == self.ns - 1 {
            self.s_hi
        } else {
            self.s_lo + i as f64 * self.ds()
        }
    }

    /// Trapezoidal weight in t (uniform when periodic).
    pub fn t_weight(&self, j: usize) -> f64 {
        let dt = self.dt();
        match self.t_mode {
            TMode::Periodic => dt,
            _ if j == 0 || j == self.nt - 1 => 0.5 * dt,
            _ => dt,
        }
    }

    pub fn s_weight(&self, i: usize) -> f64 {
        let ds = self.ds();
        if i == 0 || i == self.ns - 1 {
            0.5 * ds
        } else {
            ds
        }
    }

    /// Column index mirrored through the middle of the arc.
    pub fn mirror_s(&self, i: usize) -> usize {
        self.ns - 1 - i
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(CmcError::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Real values on the nodes of a [`Grid`], stored t-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: *grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.nt {
            let t = grid.t(j);
            for i in 0..grid.ns {
                values.push(f(t, grid.s(i)));
            }
        }
        Self { grid: *grid, values }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CmcError::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nt,
                grid.ns
            )));
        }
        Ok(Self { grid: *grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.values[self.grid.idx(j, i)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, i: usize, v: f64) {
        let k = self.grid.idx(j, i);
        self.values[k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal `∫ u v dM` with area element `r dt ds`.
    pub fn inner(&self, other: &ScalarField, r: f64) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let g = &self.grid;
        let mut total = 0.0;
        for j in 0..g.nt {
            let wt = g.t_weight(j);
            let mut row = 0.0;
            for i in 0..g.ns {
                let k = g.idx(j, i);
                row += g.s_weight(i) * self.values[k] * other.values[k];
            }
            total += wt * row;
        }
        Ok(r * total)
    }

    pub fn norm(&self, r: f64) -> f64 {
        self.inner(self, r).expect("same grid").sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| a * v).collect() }
    }

    /// Zeroes the nodes where the scenario imposes u = 0.
    pub fn apply_dirichlet(&mut self, config: &CylinderConfig) {
        let g = self.grid;
        for j in 0..g.nt {
            self.values[g.idx(j, 0)] = 0.0;
            if config.is_planar() {
                self.values[g.idx(j, g.ns - 1)] = 0.0;
            }
        }
        if g.t_mode == TMode::DirichletEnds {
            for i in 0..g.ns {
                self.values[g.idx(0, i)] = 0.0;
                self.values[g.idx(g.nt - 1, i)] = 0.0;
            }
        }
    }
}
