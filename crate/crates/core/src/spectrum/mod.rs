//! Closed-form spectra, stability verdicts, critical lengths and
//! bifurcation periods.
//!
//! Separation of variables reduces the Jacobi operator to
//! `λ = (μ − 1)/r² + κ²`, where `μ` is a transverse eigenvalue of `−∂ss` on
//! the arc (Dirichlet at both ends for the strip, Dirichlet/Robin for the
//! wedge) and `κ` the axial wavenumber.

mod transcendental;

pub use transcendental::{solve_transcendental, CaseId, TranscendentalCase};
pub(crate) use transcendental::robin_transverse;

use crate::geometry::{Convexity, CylinderConfig, Scenario, TMode};
use crate::{CmcError, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Relative band inside which a vanishing eigenvalue counts as marginal.
pub const MARGINAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `μ > 0`, sinusoidal transverse profile.
    Oscillatory,
    /// `μ = 0`, linear profile.
    Linear,
    /// `μ < 0`, hyperbolic-sine profile.
    Exponential,
}

impl Branch {
    fn of(mu: f64) -> Self {
        if mu > 0.0 {
            Branch::Oscillatory
        } else if mu < 0.0 {
            Branch::Exponential
        } else {
            Branch::Linear
        }
    }
}

/// Transverse mode `k` (1-based) with eigenvalue `μ` and wavenumber `c = √|μ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    pub k: usize,
    pub mu: f64,
    pub c: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub k: usize,
    pub n: usize,
    pub lambda: f64,
    pub c: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Stable,
    MarginallyStable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub classification: Classification,
    pub lambda_min: f64,
    /// Most negative mode when unstable.
    pub witness: Option<SpectrumEntry>,
}

pub fn planar_eigenvalue(r: f64, gamma: f64, h: f64, k: usize, n: usize) -> f64 {
    let (k, n) = (k as f64, n as f64);
    (k * k * PI * PI / (4.0 * gamma * gamma) - 1.0) / (r * r) + n * n * PI * PI / (h * h)
}

/// `h₀ = 2πrγ/√(4γ² − π²)`, the length at which `λ_{1,1}` vanishes.
pub fn planar_critical_length(r: f64, gamma: f64) -> Result<f64> {
    if !(gamma > FRAC_PI_2 && gamma < PI) {
        return Err(CmcError::NoCriticalLength);
    }
    Ok(2.0 * PI * r * gamma / (4.0 * gamma * gamma - PI * PI).sqrt())
}

/// Period `T = 2h₀` of the bifurcating non-rotational surfaces.
pub fn planar_bifurcation_period(r: f64, gamma: f64) -> Result<f64> {
    planar_critical_length(r, gamma)
        .map(|h0| 2.0 * h0)
        .map_err(|_| CmcError::NoBifurcation(format!("strip with gamma = {gamma} <= pi/2 is stable")))
}

pub fn planar_stability(r: f64, gamma: f64, h: f64) -> StabilityVerdict {
    let lambda_min = planar_eigenvalue(r, gamma, h, 1, 1);
    let entry = SpectrumEntry { k: 1, n: 1, lambda: lambda_min, c: PI / (2.0 * gamma), branch: Branch::Oscillatory };
    let classification = match planar_critical_length(r, gamma) {
        Err(_) => Classification::Stable,
        Ok(h0) if (h - h0).abs() <= MARGINAL_TOL * h0 => Classification::MarginallyStable,
        Ok(h0) if h < h0 => Classification::Stable,
        Ok(_) => Classification::Unstable,
    };
    let witness = (classification == Classification::Unstable).then_some(entry);
    StabilityVerdict { classification, lambda_min, witness }
}

/// Lowest `m` transverse modes of the configuration.
pub fn transverse_modes(config: &CylinderConfig, m: usize) -> Result<Vec<TransverseMode>> {
    config.validate()?;
    let raw: Vec<(f64, f64)> = match config.scenario {
        Scenario::PlanarStrip => (1..=m)
            .map(|k| {
                let c = k as f64 * PI / (2.0 * config.gamma);
                (c * c, c)
            })
            .collect(),
        Scenario::RightWedge { beta, convexity } => {
            let sigma = if convexity == Convexity::Convex { 1.0 } else { -1.0 };
            robin_transverse(config.gamma, beta, sigma, m)
        }
    };
    if raw.len() < m {
        return Err(CmcError::ConvergenceFailure(format!(
            "found {} of {m} transverse modes",
            raw.len()
        )));
    }
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(idx, (mu, c))| TransverseMode { k: idx + 1, mu, c, branch: Branch::of(mu) })
        .collect())
}

/// Axial wavenumber of index `n` and the first admissible index.
pub fn axial_wavenumber(extent: f64, t_mode: TMode, n: usize) -> f64 {
    match t_mode {
        TMode::DirichletEnds | TMode::HalfPeriodNeumann => n as f64 * PI / extent,
        TMode::Periodic => 2.0 * PI * n as f64 / extent,
    }
}

pub fn first_axial_index(t_mode: TMode) -> usize {
    match t_mode {
        TMode::DirichletEnds => 1,
        TMode::Periodic | TMode::HalfPeriodNeumann => 0,
    }
}

/// Orders by eigenvalue, ties by `(k, n)`.
pub fn sort_entries(entries: &mut [SpectrumEntry]) {
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then((a.k, a.n).cmp(&(b.k, b.n))));
}

/// The `m` smallest closed-form eigenvalues on a domain of axial `extent`
/// (length `h`, period `T`, or half period `T/2`, per `t_mode`).
pub fn closed_form_spectrum(
    config: &CylinderConfig,
    extent: f64,
    t_mode: TMode,
    m: usize,
) -> Result<Vec<SpectrumEntry>> {
    if !(extent > 0.0) {
        return Err(CmcError::InvalidConfig(format!("axial extent {extent}")));
    }
    let modes = transverse_modes(config, m)?;
    let r2 = config.r * config.r;
    let n0 = first_axial_index(t_mode);
    let mut out = Vec::with_capacity(m * m);
    for tm in &modes {
        for n in n0..n0 + m {
            let kap = axial_wavenumber(extent, t_mode, n);
            out.push(SpectrumEntry {
                k: tm.k,
                n,
                lambda: (tm.mu - 1.0) / r2 + kap * kap,
                c: tm.c,
                branch: tm.branch,
            });
        }
    }
    sort_entries(&mut out);
    out.truncate(m);
    Ok(out)
}

/// Stability of a wedge cylinder of length `h` with pinned ends.
pub fn wedge_stability(config: &CylinderConfig, h: f64) -> Result<StabilityVerdict> {
    config.validate()?;
    if config.is_planar() {
        return Err(CmcError::InvalidConfig("wedge_stability needs a wedge configuration".into()));
    }
    if !(h > 0.0) {
        return Err(CmcError::InvalidConfig(format!("length {h}")));
    }
    let lowest = transverse_modes(config, 1)?[0];
    let r2 = config.r * config.r;
    // λ grows with n, but enumerate every index that could be negative.
    let n_max = (h * ((1.0 - lowest.mu).max(0.0) / r2).sqrt() / PI).ceil() as usize + 2;
    let mut best: Option<SpectrumEntry> = None;
    for n in 1..=n_max {
        let kap = n as f64 * PI / h;
        let lambda = (lowest.mu - 1.0) / r2 + kap * kap;
        if best.map_or(true, |b| lambda < b.lambda) {
            best = Some(SpectrumEntry { k: 1, n, lambda, c: lowest.c, branch: lowest.branch });
        }
    }
    let best = best.expect("at least one axial mode");
    let scale = (lowest.mu.abs() + 1.0) / r2 + (PI / h).powi(2);
    let classification = if best.lambda.abs() <= MARGINAL_TOL * scale {
        Classification::MarginallyStable
    } else if best.lambda > 0.0 {
        Classification::Stable
    } else {
        Classification::Unstable
    };
    let witness = (classification == Classification::Unstable).then_some(best);
    Ok(StabilityVerdict { classification, lambda_min: best.lambda, witness })
}

/// Dispatches to [`planar_stability`] or [`wedge_stability`].
pub fn stability(config: &CylinderConfig, h: f64) -> Result<StabilityVerdict> {
    config.validate()?;
    if config.is_planar() {
        if !(h > 0.0) {
            return Err(CmcError::InvalidConfig(format!("length {h}")));
        }
        Ok(planar_stability(config.r, config.gamma, h))
    } else {
        wedge_stability(config, h)
    }
}

/// Period of the bifurcating branch in the wedge, and which boundary
/// equation produced the critical transverse mode.
pub fn wedge_bifurcation_period(config: &CylinderConfig) -> Result<(f64, CaseId)> {
    config.validate()?;
    let (beta, convexity) = match config.scenario {
        Scenario::RightWedge { beta, convexity } => (beta, convexity),
        Scenario::PlanarStrip => {
            return Err(CmcError::InvalidConfig("wedge period needs a wedge configuration".into()))
        }
    };
    let r = config.r;
    if convexity == Convexity::Concave {
        return Err(CmcError::NoBifurcation("concave wedge cylinders are stable".into()));
    }
    if (config.gamma - FRAC_PI_2).abs() < 1e-12 {
        if beta <= FRAC_PI_2 {
            return Err(CmcError::NoBifurcation(format!("beta = {beta} <= pi/2 at gamma = pi/2")));
        }
        let t = 4.0 * PI * r * beta / (4.0 * beta * beta - PI * PI).sqrt();
        return Ok((t, CaseId::NeumannEq));
    }
    let lowest = transverse_modes(config, 1)?[0];
    match lowest.branch {
        Branch::Exponential => Ok((2.0 * PI * r / (1.0 + lowest.c * lowest.c).sqrt(), CaseId::ConvexExpEq)),
        Branch::Linear => Ok((2.0 * PI * r, CaseId::ConvexLinearEq)),
        Branch::Oscillatory if lowest.c < 1.0 => {
            Ok((2.0 * PI * r / (1.0 - lowest.c * lowest.c).sqrt(), CaseId::ConvexTanEq))
        }
        Branch::Oscillatory => Err(CmcError::NoBifurcation(format!(
            "lowest transverse wavenumber {} >= 1",
            lowest.c
        ))),
    }
}

/// Bifurcation period for either scenario; the case is `None` for the strip.
pub fn bifurcation_period(config: &CylinderConfig) -> Result<(f64, Option<CaseId>)> {
    config.validate()?;
    if config.is_planar() {
        planar_bifurcation_period(config.r, config.gamma).map(|t| (t, None))
    } else {
        wedge_bifurcation_period(config).map(|(t, c)| (t, Some(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn planar_examples() {
        assert!((planar_eigenvalue(1.0, FRAC_PI_2, PI, 1, 1) - 1.0).abs() < 1e-15);
        let h0 = planar_critical_length(1.0, 0.75 * PI).unwrap();
        assert!((h0 - 3.0 * PI / 5f64.sqrt()).abs() < 1e-13);
        assert!(planar_eigenvalue(1.0, 0.75 * PI, h0, 1, 1).abs() < 1e-14);
        let h2 = planar_critical_length(2.0, 0.75 * PI).unwrap();
        assert_eq!(h2, 2.0 * h0);
        assert_eq!(planar_critical_length(1.0, PI / 3.0), Err(CmcError::NoCriticalLength));
        assert!(matches!(planar_bifurcation_period(1.0, FRAC_PI_2), Err(CmcError::NoBifurcation(_))));
    }

    #[test]
    fn planar_verdicts() {
        assert_eq!(planar_stability(1.0, PI / 3.0, 100.0).classification, Classification::Stable);
        let v = planar_stability(1.0, 0.75 * PI, 5.0);
        assert_eq!(v.classification, Classification::Unstable);
        assert!(v.witness.unwrap().lambda < 0.0);
        assert_eq!(planar_stability(1.0, 0.75 * PI, 3.0).classification, Classification::Stable);
        let h0 = planar_critical_length(1.0, 0.75 * PI).unwrap();
        assert_eq!(
            planar_stability(1.0, 0.75 * PI, h0).classification,
            Classification::MarginallyStable
        );
    }

    #[test]
    fn wedge_periods() {
        let c = CylinderConfig::wedge(1.0, FRAC_PI_2, 2.0 * PI / 3.0, Convexity::Convex).unwrap();
        let (t, case) = wedge_bifurcation_period(&c).unwrap();
        assert_eq!(case, CaseId::NeumannEq);
        assert!((t - 8.0 * PI / 7f64.sqrt()).abs() < 1e-13);

        let c = CylinderConfig::wedge(1.0, FRAC_PI_4, 1.0, Convexity::Convex).unwrap();
        let (t, case) = wedge_bifurcation_period(&c).unwrap();
        assert_eq!(case, CaseId::ConvexLinearEq);
        assert!((t - 2.0 * PI).abs() < 1e-12);

        let c = CylinderConfig::wedge(1.0, FRAC_PI_4, 2.0, Convexity::Convex).unwrap();
        let (t, case) = wedge_bifurcation_period(&c).unwrap();
        assert_eq!(case, CaseId::ConvexExpEq);
        assert!((t - 4.539).abs() < 1e-3, "{t}");

        let c = CylinderConfig::wedge(1.0, PI / 6.0, 0.3, Convexity::Concave).unwrap();
        assert!(matches!(wedge_bifurcation_period(&c), Err(CmcError::NoBifurcation(_))));
    }

    #[test]
    fn wedge_verdicts() {
        let cc = CylinderConfig::wedge(1.0, PI / 6.0, 0.3, Convexity::Concave).unwrap();
        assert_eq!(wedge_stability(&cc, 1e3).unwrap().classification, Classification::Stable);
        let c = CylinderConfig::wedge(1.0, FRAC_PI_2, PI / 3.0, Convexity::Convex).unwrap();
        assert_eq!(wedge_stability(&c, 100.0).unwrap().classification, Classification::Stable);
        let c = CylinderConfig::wedge(1.0, FRAC_PI_2, 2.0 * PI / 3.0, Convexity::Convex).unwrap();
        let v = wedge_stability(&c, 20.0).unwrap();
        assert_eq!(v.classification, Classification::Unstable);
        assert!((v.lambda_min - (PI * PI / 400.0 - 7.0 / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn periodic_spectrum_includes_constant_axial_mode() {
        let c = CylinderConfig::wedge(1.0, FRAC_PI_2, 2.0 * PI / 3.0, Convexity::Convex).unwrap();
        let (t, _) = wedge_bifurcation_period(&c).unwrap();
        let s = closed_form_spectrum(&c, t, TMode::Periodic, 4).unwrap();
        assert_eq!((s[0].k, s[0].n), (1, 0));
        assert!(s[1].lambda.abs() < 1e-12);
    }
}
