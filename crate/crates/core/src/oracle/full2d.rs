use crate::banded::SymBandedMatrix;
use crate::geometry::{assemble_symmetric, CylinderConfig, Grid, ScalarField, UnknownLayout};
use crate::{CmcError, Result};

/// Largest grid (`nt·ns`) accepted by the 2D solver.
pub const MAX_2D_NODES: usize = 16384;

const MAX_ITER: usize = 500;

struct Operator {
    a: SymBandedMatrix,
    layout: UnknownLayout,
    r: f64,
    scale: f64,
}

fn operator(config: &CylinderConfig, grid: &Grid) -> Result<Operator> {
    config.validate()?;
    let (s_lo, s_hi) = config.s_interval();
    if (grid.s_lo - s_lo).abs() > 1e-12 || (grid.s_hi - s_hi).abs() > 1e-12 {
        return Err(CmcError::GridMismatch("grid arc differs from configuration".into()));
    }
    if grid.len() > MAX_2D_NODES {
        return Err(CmcError::InvalidConfig(format!(
            "{}x{} grid exceeds {MAX_2D_NODES} nodes",
            grid.nt, grid.ns
        )));
    }
    let (a, layout) = assemble_symmetric(config, grid);
    let (lo, hi) = a.gershgorin();
    Ok(Operator { a, layout, r: config.r, scale: lo.abs().max(hi.abs()) })
}

/// Number of eigenvalues of the discrete `−L` strictly below `x`.
pub fn eigenvalue_count_below(config: &CylinderConfig, grid: &Grid, x: f64) -> Result<usize> {
    Ok(operator(config, grid)?.a.count_below(x))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(y: &mut [f64]) -> f64 {
    let n = dot(y, y).sqrt();
    if n > 0.0 {
        y.iter_mut().for_each(|v| *v /= n);
    }
    n
}

fn orthogonalize(y: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let p = dot(y, b);
            y.iter_mut().zip(b).for_each(|(v, w)| *v -= p * w);
        }
    }
}

/// Deterministic start vector, varied by `seed`.
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let x = (k as f64 * 12.9898 + seed as f64 * 78.233).sin() * 43758.5453;
            x - x.floor() - 0.5
        })
        .collect()
}

/// Inverse iteration for the eigenvector nearest `shift`, orthogonal to
/// `deflate`. Returns the Rayleigh quotient and the unit vector.
fn inverse_iteration(
    op: &Operator,
    shift: f64,
    mut y: Vec<f64>,
    deflate: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    let mut sigma = shift;
    let lu = loop {
        match op.a.shifted_general(sigma).lu() {
            Ok(lu) => break lu,
            Err(_) => sigma += 1e-10 * op.scale.max(1.0),
        }
    };
    orthogonalize(&mut y, deflate);
    if normalize(&mut y) == 0.0 {
        return Err(CmcError::InvalidConfig("zero vector cannot seed inverse iteration".into()));
    }
    let tol = 1e-11 * op.scale.max(1.0);
    for _ in 0..MAX_ITER {
        let mut z = lu.solve(&y);
        orthogonalize(&mut z, deflate);
        if normalize(&mut z) == 0.0 {
            return Err(CmcError::ConvergenceFailure("inverse iteration collapsed".into()));
        }
        let az = op.a.matvec(&z);
        let rho = dot(&z, &az);
        let res = az.iter().zip(&z).map(|(a, v)| (a - rho * v).powi(2)).sum::<f64>().sqrt();
        y = z;
        if res <= tol {
            return Ok((rho, y));
        }
    }
    Err(CmcError::ConvergenceFailure(format!("inverse iteration near {shift} did not converge")))
}

fn to_field(op: &Operator, y: &[f64]) -> ScalarField {
    let x: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(k, v)| v / op.layout.weight(k, op.r).sqrt())
        .collect();
    op.layout.scatter(&x)
}

/// Brackets for the lowest `m` eigenvalues by bisection on the inertia
/// count, sharing probes between eigenvalues.
fn locate_all(op: &Operator, m: usize, width: f64) -> Vec<f64> {
    let (lo, hi) = op.a.gershgorin();
    let mut probes: Vec<(f64, usize)> = vec![(lo - 1.0, 0), (hi + 1.0, op.layout.n())];
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let mut a = probes.iter().filter(|p| p.1 <= k).map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let mut b = probes.iter().filter(|p| p.1 > k).map(|p| p.0).fold(f64::INFINITY, f64::min);
        while b - a > width * (1.0 + 0.5 * (a + b).abs()) {
            let mid = 0.5 * (a + b);
            let c = op.a.count_below(mid);
            probes.push((mid, c));
            if c > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// The `m` smallest eigenpairs of the assembled `−L`, eigenfields with unit
/// quadrature norm. Eigenvalues are bracketed by inertia bisection, then
/// refined by shifted inverse iteration with deflation against the pairs
/// already found.
pub fn full_2d_jacobi_spectrum(
    config: &CylinderConfig,
    grid: &Grid,
    m: usize,
) -> Result<Vec<(f64, ScalarField)>> {
    let op = operator(config, grid)?;
    if m > op.layout.n() {
        return Err(CmcError::InvalidConfig(format!("m = {m} exceeds {} unknowns", op.layout.n())));
    }
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    for (k, shift) in locate_all(&op, m, 1e-5).into_iter().enumerate() {
        let (lam, y) = inverse_iteration(&op, shift, start_vector(op.layout.n(), k), &vecs)?;
        let f = to_field(&op, &y);
        vecs.push(y);
        out.push((lam, f));
    }
    // Close eigenvalues may be found out of order.
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Inverse iteration from a caller-supplied field.
pub fn refine_eigenpair(
    config: &CylinderConfig,
    grid: &Grid,
    shift: f64,
    initial: &ScalarField,
) -> Result<(f64, ScalarField)> {
    let op = operator(config, grid)?;
    if initial.grid() != grid {
        return Err(CmcError::GridMismatch("initial field on another grid".into()));
    }
    let y: Vec<f64> = op
        .layout
        .gather(initial)
        .iter()
        .enumerate()
        .map(|(k, v)| v * op.layout.weight(k, op.r).sqrt())
        .collect();
    let (lam, y) = inverse_iteration(&op, shift, y, &[])?;
    Ok((lam, to_field(&op, &y)))
}
