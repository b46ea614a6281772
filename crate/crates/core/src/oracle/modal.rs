use super::sturm::{sturm_eigen, sturm_eigen_extrapolated, RightBc, SturmProblem};
use crate::geometry::{CylinderConfig, Grid, Scenario, TMode};
use crate::spectrum::{axial_wavenumber, first_axial_index, sort_entries, Branch, SpectrumEntry};
use crate::{CmcError, Result};
use std::f64::consts::PI;

/// Transverse problem of a configuration: Dirichlet/Dirichlet on the strip
/// arc, Dirichlet/Robin on the wedge arc.
pub fn sturm_problem(config: &CylinderConfig, ns: usize) -> SturmProblem {
    let (s_lo, s_hi) = config.s_interval();
    let right_bc = match config.scenario {
        Scenario::PlanarStrip => RightBc::Dirichlet,
        Scenario::RightWedge { .. } => RightBc::Robin(-config.robin_slope().expect("wedge")),
    };
    SturmProblem { s_lo, s_hi, right_bc, ns }
}

fn branch_of(mu: f64) -> Branch {
    if mu.abs() <= 1e-9 {
        Branch::Linear
    } else if mu > 0.0 {
        Branch::Oscillatory
    } else {
        Branch::Exponential
    }
}

/// Error of `approx` against `exact`, relative to the sum of magnitudes of
/// the terms making up the eigenvalue so that cancellation near zero does
/// not inflate it.
pub fn relative_error(config: &CylinderConfig, entry: &SpectrumEntry, exact: f64, kappa: f64) -> f64 {
    let r2 = config.r * config.r;
    let scale = (entry.c * entry.c + 1.0) / r2 + kappa * kappa;
    (entry.lambda - exact).abs() / scale
}

/// Every `(k, n)` with `k ≤ k_max` and `n` ranging over `n_count` axial
/// indices, using Richardson-extrapolated transverse eigenvalues.
pub fn modal_jacobi_grid(
    config: &CylinderConfig,
    extent: f64,
    t_mode: TMode,
    k_max: usize,
    n_count: usize,
    ns: usize,
) -> Result<Vec<SpectrumEntry>> {
    config.validate()?;
    if !(extent > 0.0) {
        return Err(CmcError::InvalidConfig(format!("axial extent {extent}")));
    }
    let mu = sturm_eigen_extrapolated(&sturm_problem(config, ns), k_max)?.mu;
    let r2 = config.r * config.r;
    let n0 = first_axial_index(t_mode);
    let mut out = Vec::with_capacity(k_max * n_count);
    for (idx, &m) in mu.iter().enumerate() {
        for n in n0..n0 + n_count {
            let kap = axial_wavenumber(extent, t_mode, n);
            out.push(SpectrumEntry {
                k: idx + 1,
                n,
                lambda: (m - 1.0) / r2 + kap * kap,
                c: m.abs().sqrt(),
                branch: branch_of(m),
            });
        }
    }
    sort_entries(&mut out);
    Ok(out)
}

/// The `m` smallest eigenvalues of the separated Jacobi operator.
pub fn modal_jacobi_spectrum(
    config: &CylinderConfig,
    extent: f64,
    t_mode: TMode,
    m: usize,
    ns: usize,
) -> Result<Vec<SpectrumEntry>> {
    let mut all = modal_jacobi_grid(config, extent, t_mode, m, m, ns)?;
    all.truncate(m);
    Ok(all)
}

/// Separated spectrum of the discrete 2D operator on `grid`: transverse
/// eigenvalues at the grid's own resolution and the exact eigenvalues of
/// the axial second difference (with multiplicity). Matches
/// [`super::full_2d_jacobi_spectrum`] to round-off.
pub fn discrete_modal_spectrum(config: &CylinderConfig, grid: &Grid, m: usize) -> Result<Vec<SpectrumEntry>> {
    let ns = grid.ns;
    let mu = sturm_eigen(&sturm_problem(config, ns), m.min(ns / 4))?.mu;
    let dt = grid.dt();
    let nt = grid.nt;
    let axial = |theta: f64| 4.0 / (dt * dt) * theta.sin().powi(2);
    let mut kappas: Vec<(usize, f64)> = Vec::new();
    match grid.t_mode {
        TMode::DirichletEnds => {
            for n in 1..nt - 1 {
                kappas.push((n, axial(n as f64 * PI / (2.0 * (nt - 1) as f64))));
            }
        }
        TMode::HalfPeriodNeumann => {
            for n in 0..nt {
                kappas.push((n, axial(n as f64 * PI / (2.0 * (nt - 1) as f64))));
            }
        }
        TMode::Periodic => {
            for n in 0..nt {
                let wn = n.min(nt - n);
                kappas.push((wn, axial(PI * n as f64 / nt as f64)));
            }
        }
    }
    let r2 = config.r * config.r;
    let mut out = Vec::new();
    for (idx, &mk) in mu.iter().enumerate() {
        for &(n, k2) in &kappas {
            out.push(SpectrumEntry {
                k: idx + 1,
                n,
                lambda: (mk - 1.0) / r2 + k2,
                c: mk.abs().sqrt(),
                branch: branch_of(mk),
            });
        }
    }
    sort_entries(&mut out);
    out.truncate(m);
    Ok(out)
}
