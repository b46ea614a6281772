use crate::banded::BandedMatrix;
use crate::{CmcError, Result};

/// Boundary condition at `s_hi`; the left end is always Dirichlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightBc {
    Dirichlet,
    /// `g′(s_hi) + ρ g(s_hi) = 0`. A convex wedge has `ρ = −cot γ`.
    Robin(f64),
}

/// `−g″ = μ g` on `[s_lo, s_hi]` sampled at `ns` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SturmProblem {
    pub s_lo: f64,
    pub s_hi: f64,
    pub right_bc: RightBc,
    pub ns: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Lowest eigenvalues, ascending.
    pub mu: Vec<f64>,
    /// Eigenfunctions sampled on all `ns` nodes, max-norm one, positive
    /// just inside `s_lo`.
    pub modes: Option<Vec<Vec<f64>>>,
}

/// Symmetric tridiagonal form: diagonal `d`, off-diagonal `e`.
struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
    /// Square roots of the trapezoidal weights (up to `h`).
    sqrt_w: Vec<f64>,
}

fn assemble(p: &SturmProblem) -> Tridiagonal {
    let h = (p.s_hi - p.s_lo) / (p.ns - 1) as f64;
    let a = 1.0 / (h * h);
    let n = match p.right_bc {
        RightBc::Dirichlet => p.ns - 2,
        RightBc::Robin(_) => p.ns - 1,
    };
    let mut d = vec![2.0 * a; n];
    let mut e = vec![-a; n.saturating_sub(1)];
    let mut sqrt_w = vec![1.0; n];
    if let RightBc::Robin(rho) = p.right_bc {
        // Ghost node g_{N+1} = g_{N−1} − 2hρ g_N, then symmetrize with the
        // half weight of the boundary node.
        d[n - 1] = 2.0 * a + 2.0 * rho / h;
        e[n - 2] = -std::f64::consts::SQRT_2 * a;
        sqrt_w[n - 1] = std::f64::consts::FRAC_1_SQRT_2;
    }
    Tridiagonal { d, e, sqrt_w }
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(t: &Tridiagonal, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..t.d.len() {
        let off = if i == 0 { 0.0 } else { t.e[i - 1] * t.e[i - 1] / q };
        q = t.d[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (1.0 + x.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn validate(p: &SturmProblem, m: usize) -> Result<()> {
    if p.ns < 64 {
        return Err(CmcError::InvalidConfig(format!("Sturm solver needs ns >= 64, got {}", p.ns)));
    }
    if m > p.ns / 4 {
        return Err(CmcError::InvalidConfig(format!("m = {m} exceeds ns/4 = {}", p.ns / 4)));
    }
    if !(p.s_hi > p.s_lo) {
        return Err(CmcError::InvalidConfig("empty interval".into()));
    }
    Ok(())
}

fn eigenvalues(t: &Tridiagonal, m: usize) -> Result<Vec<f64>> {
    let n = t.d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { t.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { t.e[i].abs() } else { 0.0 };
        lo = lo.min(t.d[i] - r);
        hi = hi.max(t.d[i] + r);
    }
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let (mut a, mut b) = (out.last().copied().unwrap_or(lo) - 1.0, hi + 1.0);
        if k > 0 {
            a = a.min(out[k - 1]);
        }
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= 1e-12 * (1.0 + mid.abs()) || mid <= a || mid >= b {
                break;
            }
            if sturm_count(t, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        if sturm_count(t, a) > k || sturm_count(t, b) <= k {
            return Err(CmcError::ConvergenceFailure(format!("eigenvalue {k} not isolated")));
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Lowest `m` eigenvalues of the second-difference matrix by Sturm-sequence
/// bisection.
pub fn sturm_eigen(problem: &SturmProblem, m: usize) -> Result<EigenResult> {
    validate(problem, m)?;
    let t = assemble(problem);
    Ok(EigenResult { mu: eigenvalues(&t, m)?, modes: None })
}

/// Richardson extrapolation of [`sturm_eigen`] over `ns` and `2ns − 1`,
/// cancelling the `O(h²)` term.
pub fn sturm_eigen_extrapolated(problem: &SturmProblem, m: usize) -> Result<EigenResult> {
    let coarse = sturm_eigen(problem, m)?;
    let fine = sturm_eigen(&SturmProblem { ns: 2 * problem.ns - 1, ..*problem }, m)?;
    let mu = coarse.mu.iter().zip(&fine.mu).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    Ok(EigenResult { mu, modes: None })
}

/// As [`sturm_eigen`], with eigenfunctions from inverse iteration.
pub fn sturm_eigen_with_modes(problem: &SturmProblem, m: usize) -> Result<EigenResult> {
    validate(problem, m)?;
    let t = assemble(problem);
    let mu = eigenvalues(&t, m)?;
    let n = t.d.len();
    let mut modes = Vec::with_capacity(m);
    for (k, &lam) in mu.iter().enumerate() {
        let gap = mu
            .get(k + 1)
            .map(|x| x - lam)
            .into_iter()
            .chain(k.checked_sub(1).map(|p| lam - mu[p]))
            .fold(f64::INFINITY, f64::min);
        let shift = lam - 1e-6 * gap.min(1.0);
        let mut mat = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            mat.add(i, i, t.d[i] - shift);
            if i + 1 < n {
                mat.add(i, i + 1, t.e[i]);
                mat.add(i + 1, i, t.e[i]);
            }
        }
        let lu = mat.lu()?;
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64).collect();
        for _ in 0..4 {
            y = lu.solve(&y);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
        }
        let mut g = vec![0.0; problem.ns];
        for i in 0..n {
            g[i + 1] = y[i] / t.sqrt_w[i];
        }
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sign = if g[1] < 0.0 { -1.0 } else { 1.0 };
        g.iter_mut().for_each(|v| *v *= sign / scale);
        modes.push(g);
    }
    Ok(EigenResult { mu, modes: Some(modes) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dd(ns: usize) -> SturmProblem {
        SturmProblem { s_lo: 0.0, s_hi: PI, right_bc: RightBc::Dirichlet, ns }
    }

    #[test]
    fn dirichlet_matches_discrete_formula() {
        let p = dd(101);
        let r = sturm_eigen(&p, 5).unwrap();
        let h = PI / 100.0;
        for (k, mu) in r.mu.iter().enumerate() {
            let kk = (k + 1) as f64;
            let exact = 4.0 / (h * h) * (kk * h / 2.0).sin().powi(2);
            assert!((mu - exact).abs() < 1e-10 * (1.0 + exact), "{mu} vs {exact}");
        }
    }

    #[test]
    fn second_order_convergence() {
        let e1 = (sturm_eigen(&dd(101), 1).unwrap().mu[0] - 1.0).abs();
        let e2 = (sturm_eigen(&dd(201), 1).unwrap().mu[0] - 1.0).abs();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn robin_mixed_spectrum() {
        let beta = 2.0;
        let p = SturmProblem { s_lo: 0.0, s_hi: beta, right_bc: RightBc::Robin(0.0), ns: 401 };
        let r = sturm_eigen_extrapolated(&p, 3).unwrap();
        for (k, mu) in r.mu.iter().enumerate() {
            let c = (PI / 2.0 + k as f64 * PI) / beta;
            assert!((mu - c * c).abs() < 1e-8 * c * c, "{mu} vs {}", c * c);
        }
    }

    #[test]
    fn oscillation_count() {
        let p = SturmProblem { s_lo: 0.0, s_hi: 2.0, right_bc: RightBc::Robin(-0.7), ns: 200 };
        let r = sturm_eigen_with_modes(&p, 5).unwrap();
        for (k, g) in r.modes.unwrap().iter().enumerate() {
            let interior = &g[1..];
            let changes = interior.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
            assert_eq!(changes, k);
        }
    }

    #[test]
    fn rejects_small_grids() {
        assert!(sturm_eigen(&dd(32), 1).is_err());
        assert!(sturm_eigen(&dd(64), 17).is_err());
    }
}
