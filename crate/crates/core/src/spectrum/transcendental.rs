use crate::{CmcError, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Which boundary equation is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// `e^{2cβ} = (1 + c tanγ)/(1 − c tanγ)`, i.e. `c tanγ = tanh(cβ)`.
    ConvexExpEq,
    /// The degenerate condition `β = tanγ` (zero transverse eigenvalue).
    ConvexLinearEq,
    /// `c tanγ = tan(cβ)`.
    ConvexTanEq,
    /// `c tanγ + tan(cβ) = 0`.
    ConcaveTanEq,
    /// `cos(cβ) = 0`, closed form `c = (π/2 + kπ)/β`.
    NeumannEq,
}

/// Outcome of [`solve_transcendental`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranscendentalCase {
    pub case_id: CaseId,
    pub root_c: Option<f64>,
    /// Pole-free residual at the root; NaN when no root exists.
    pub residual: f64,
}

pub(crate) const SCAN_STEP: f64 = 1e-3;
pub(crate) const C_MAX: f64 = 50.0;

/// Pole-free forms: the tangent equations multiplied by `cos(cβ)·cosγ`
/// (rescaled by `sinγ` so that `γ = π/2` stays finite), the exponential one
/// by `cosγ`. `sigma = +1` convex, `−1` concave.
fn tan_form(c: f64, gamma: f64, beta: f64, sigma: f64) -> f64 {
    c * gamma.sin() * (c * beta).cos() - sigma * gamma.cos() * (c * beta).sin()
}

fn tan_form_prime(c: f64, gamma: f64, beta: f64, sigma: f64) -> f64 {
    let (s, co) = (c * beta).sin_cos();
    gamma.sin() * (co - c * beta * s) - sigma * beta * gamma.cos() * co
}

/// `tan_form / c`, finite at `c = 0`; removes the trivial root.
fn tan_form_reduced(c: f64, gamma: f64, beta: f64, sigma: f64) -> f64 {
    if c == 0.0 {
        gamma.sin() - sigma * gamma.cos() * beta
    } else {
        tan_form(c, gamma, beta, sigma) / c
    }
}

fn exp_form(c: f64, gamma: f64, beta: f64) -> f64 {
    c * gamma.sin() - gamma.cos() * (c * beta).tanh()
}

fn exp_form_prime(c: f64, gamma: f64, beta: f64) -> f64 {
    let ch = (c * beta).cosh();
    gamma.sin() - beta * gamma.cos() / (ch * ch)
}

fn exp_form_reduced(c: f64, gamma: f64, beta: f64) -> f64 {
    if c == 0.0 {
        gamma.sin() - gamma.cos() * beta
    } else {
        exp_form(c, gamma, beta) / c
    }
}

/// Bisection to `|Δc| < 1e−14` on a sign-changing bracket.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > 1e-14 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All sign changes of `f` on `[a, b]` scanned at [`SCAN_STEP`], each
/// refined by bisection.
pub(crate) fn scan_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, limit: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let steps = ((b - a) / SCAN_STEP).ceil().max(1.0) as usize;
    let mut x0 = a;
    let mut f0 = f(x0);
    for k in 1..=steps {
        let x1 = if k == steps { b } else { a + k as f64 * SCAN_STEP };
        let f1 = f(x1);
        if f1 == 0.0 && k < steps {
            roots.push(x1);
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(&f, x0, x1));
        }
        if roots.len() >= limit {
            break;
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn polish(c: f64, f: impl Fn(f64) -> f64, fp: impl Fn(f64) -> f64) -> f64 {
    let d = fp(c);
    if d == 0.0 || !d.is_finite() {
        return c;
    }
    let c1 = c - f(c) / d;
    if f(c1).abs() < f(c).abs() {
        c1
    } else {
        c
    }
}

/// Smallest root of the chosen equation inside `bracket`.
pub fn solve_transcendental(
    case_id: CaseId,
    gamma: f64,
    beta: f64,
    bracket: (f64, f64),
) -> Result<TranscendentalCase> {
    let (a, b) = bracket;
    if !(a >= 0.0 && b > a && b.is_finite()) {
        return Err(CmcError::InvalidConfig(format!("bad bracket [{a}, {b}]")));
    }
    if !(gamma > 0.0 && gamma < PI && beta > 0.0) {
        return Err(CmcError::InvalidConfig(format!("gamma = {gamma}, beta = {beta}")));
    }
    let none = |case_id| TranscendentalCase { case_id, root_c: None, residual: f64::NAN };
    let out = match case_id {
        CaseId::NeumannEq => {
            let k = ((a * beta - FRAC_PI_2) / PI).ceil().max(0.0);
            let c = (FRAC_PI_2 + k * PI) / beta;
            if c <= b {
                TranscendentalCase { case_id, root_c: Some(c), residual: (c * beta).cos() }
            } else {
                none(case_id)
            }
        }
        CaseId::ConvexLinearEq => TranscendentalCase {
            case_id,
            root_c: None,
            residual: beta * gamma.cos() - gamma.sin(),
        },
        CaseId::ConvexExpEq => {
            let f = |c| exp_form_reduced(c, gamma, beta);
            match scan_roots(f, a, b, 1).first() {
                Some(&c) => {
                    let c = polish(c, |x| exp_form(x, gamma, beta), |x| exp_form_prime(x, gamma, beta));
                    TranscendentalCase { case_id, root_c: Some(c), residual: exp_form(c, gamma, beta) }
                }
                None => none(case_id),
            }
        }
        CaseId::ConvexTanEq | CaseId::ConcaveTanEq => {
            let sigma = if case_id == CaseId::ConvexTanEq { 1.0 } else { -1.0 };
            let f = |c| tan_form_reduced(c, gamma, beta, sigma);
            match scan_roots(f, a, b, 1).first() {
                Some(&c) => {
                    let c = polish(
                        c,
                        |x| tan_form(x, gamma, beta, sigma),
                        |x| tan_form_prime(x, gamma, beta, sigma),
                    );
                    TranscendentalCase {
                        case_id,
                        root_c: Some(c),
                        residual: tan_form(c, gamma, beta, sigma),
                    }
                }
                None => {
                    // tan(cβ) has a pole in the bracket but the equation has
                    // no root there: the naive form would report one.
                    let first_pole = FRAC_PI_2 / beta;
                    let k = ((a - first_pole) * beta / PI).ceil().max(0.0);
                    let pole = first_pole + k * PI / beta;
                    if pole <= b {
                        return Err(CmcError::PoleInBracket(pole));
                    }
                    none(case_id)
                }
            }
        }
    };
    Ok(out)
}

/// Transverse eigenvalues `μ` of `−g″ = μ g`, `g(0) = 0`, `g′(β) = κ g(β)`
/// with `κ = σ cotγ`, lowest `m`, each with its wavenumber `c = √|μ|`.
pub(crate) fn robin_transverse(gamma: f64, beta: f64, sigma: f64, m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    if (gamma - FRAC_PI_2).abs() < 1e-12 {
        for k in 0..m {
            let c = (FRAC_PI_2 + k as f64 * PI) / beta;
            out.push((c * c, c));
        }
        return out;
    }
    let at_zero = tan_form_reduced(0.0, gamma, beta, sigma);
    let linear = at_zero.abs() <= 1e-12;
    if !linear && at_zero < 0.0 {
        // sinγ − σβcosγ < 0: exactly one negative eigenvalue.
        let f = |c| exp_form_reduced(c, gamma, beta);
        let mut hi = 1.0;
        while f(hi) < 0.0 {
            hi *= 2.0;
        }
        let c = bisect(f, 0.0, hi);
        let c = polish(c, |x| exp_form(x, gamma, beta), |x| exp_form_prime(x, gamma, beta));
        out.push((-c * c, c));
    }
    if linear {
        out.push((0.0, 0.0));
    }
    let need = m.saturating_sub(out.len());
    if need > 0 {
        let start = if linear { SCAN_STEP } else { 0.0 };
        let c_max = C_MAX.max((need as f64 + 2.0) * PI / beta);
        let f = |c| tan_form_reduced(c, gamma, beta, sigma);
        for c in scan_roots(f, start, c_max, need) {
            let c = polish(
                c,
                |x| tan_form(x, gamma, beta, sigma),
                |x| tan_form_prime(x, gamma, beta, sigma),
            );
            out.push((c * c, c));
        }
    }
    out.truncate(m);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn neumann_closed_form() {
        let r = solve_transcendental(CaseId::NeumannEq, FRAC_PI_2, 2.0 * PI / 3.0, (0.0, 10.0)).unwrap();
        assert!((r.root_c.unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn exp_root_near_0957() {
        let r = solve_transcendental(CaseId::ConvexExpEq, FRAC_PI_4, 2.0, (0.0, C_MAX)).unwrap();
        let c = r.root_c.unwrap();
        assert!((c - 0.957).abs() < 1e-3, "{c}");
        assert!(r.residual.abs() < 1e-12);
    }

    #[test]
    fn concave_has_no_small_root() {
        let r = solve_transcendental(CaseId::ConcaveTanEq, PI / 6.0, 0.5, (0.0, 1.0)).unwrap();
        assert!(r.root_c.is_none());
        assert!(r.residual.is_nan());
    }

    #[test]
    fn pole_without_root_is_reported() {
        // cβ = π/2 at c = π/3 in the bracket, and for this concave case the
        // first root lies beyond the pole.
        let e = solve_transcendental(CaseId::ConcaveTanEq, 0.3, 1.5, (0.5, 1.1));
        assert!(matches!(e, Err(CmcError::PoleInBracket(_))), "{e:?}");
    }

    #[test]
    fn tan_root_satisfies_tangent_equation() {
        let gamma = (1.26f64.tan() / 0.9).atan();
        let r = solve_transcendental(CaseId::ConvexTanEq, gamma, 1.4, (0.0, 1.0)).unwrap();
        let c = r.root_c.unwrap();
        assert!((c - 0.9).abs() < 1e-12, "{c}");
        assert!((c * gamma.tan() - (c * 1.4).tan()).abs() < 1e-10);
    }

    #[test]
    fn robin_limit_matches_neumann() {
        let beta = 2.0 * PI / 3.0;
        let a = robin_transverse(FRAC_PI_2, beta, 1.0, 3);
        let b = robin_transverse(FRAC_PI_2 - 1e-9, beta, 1.0, 3);
        for (x, y) in a.iter().zip(&b) {
            assert!((x.0 - y.0).abs() < 1e-6);
        }
    }
}
