use crate::{CmcError, Result};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convexity {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Cylinder meeting one plane along two parallel lines at angle γ.
    PlanarStrip,
    /// Cylinder of arc extent β in a right wedge, pinned on one face and
    /// meeting the other at angle γ.
    RightWedge { beta: f64, convexity: Convexity },
}

/// Geometric description of the unperturbed cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderConfig {
    pub scenario: Scenario,
    pub r: f64,
    pub gamma: f64,
}

impl CylinderConfig {
    pub fn planar(r: f64, gamma: f64) -> Result<Self> {
        let c = Self { scenario: Scenario::PlanarStrip, r, gamma };
        c.validate()?;
        Ok(c)
    }

    pub fn wedge(r: f64, gamma: f64, beta: f64, convexity: Convexity) -> Result<Self> {
        let c = Self { scenario: Scenario::RightWedge { beta, convexity }, r, gamma };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CmcError::InvalidConfig(m));
        if !(self.r.is_finite() && self.r > 0.0) {
            return bad(format!("radius must be positive, got {}", self.r));
        }
        if !(self.gamma > 0.0 && self.gamma < PI) {
            return bad(format!("contact angle must lie in (0, pi), got {}", self.gamma));
        }
        if let Scenario::RightWedge { beta, convexity } = self.scenario {
            if !(beta > 0.0 && beta < 1.5 * PI) {
                return bad(format!("wedge arc must lie in (0, 3pi/2), got {beta}"));
            }
            if convexity == Convexity::Concave
                && !(self.gamma < FRAC_PI_2 && beta < FRAC_PI_2 - self.gamma)
            {
                return bad(format!(
                    "concave wedge needs gamma < pi/2 and beta < pi/2 - gamma (gamma = {}, beta = {beta})",
                    self.gamma
                ));
            }
        }
        Ok(())
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.scenario, Scenario::PlanarStrip)
    }

    pub fn beta(&self) -> Option<f64> {
        match self.scenario {
            Scenario::RightWedge { beta, .. } => Some(beta),
            Scenario::PlanarStrip => None,
        }
    }

    pub fn convexity(&self) -> Option<Convexity> {
        match self.scenario {
            Scenario::RightWedge { convexity, .. } => Some(convexity),
            Scenario::PlanarStrip => None,
        }
    }

    /// Arc parameter interval: `[π/2 − γ, π/2 + γ]` planar, `[0, β]` wedge.
    pub fn s_interval(&self) -> (f64, f64) {
        match self.scenario {
            Scenario::PlanarStrip => (FRAC_PI_2 - self.gamma, FRAC_PI_2 + self.gamma),
            Scenario::RightWedge { beta, .. } => (0.0, beta),
        }
    }

    /// Same shape with a different radius.
    pub fn with_radius(&self, r: f64) -> Self {
        Self { r, ..*self }
    }

    /// Vertical shift subtracted from the parametrization so that the planar
    /// cylinder meets the plane `z = 0`.
    pub fn vertical_offset(&self) -> f64 {
        match self.scenario {
            Scenario::PlanarStrip => self.r * self.gamma.cos(),
            Scenario::RightWedge { .. } => 0.0,
        }
    }

    /// Robin coefficient `q = ±cot(γ)/r` on the free boundary, `+` convex.
    pub fn robin_coefficient(&self) -> Option<f64> {
        self.robin_slope().map(|k| k / self.r)
    }

    /// Dimensionless Robin slope `κ = r·q`: the boundary condition reads
    /// `∂u/∂s = κ u` at `s = β`.
    pub fn robin_slope(&self) -> Option<f64> {
        let cot = self.gamma.cos() / self.gamma.sin();
        match self.scenario {
            Scenario::RightWedge { convexity: Convexity::Convex, .. } => Some(cot),
            Scenario::RightWedge { convexity: Convexity::Concave, .. } => Some(-cot),
            Scenario::PlanarStrip => None,
        }
    }
}
