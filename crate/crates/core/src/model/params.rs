use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Lower and upper edge of the coupling window in which the adiabatic
/// approximation is considered reliable.
pub const BETA_WINDOW: (f64, f64) = (0.1, 0.6);

/// Physical knobs of the two-qubit/oscillator model.
///
/// Everything is dimensionless: energies in units of `hbar*omega`, times as
/// `tau = omega * t`. `omega` is only carried along so callers can convert
/// back to physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Qubit-oscillator coupling strength.
    pub beta: f64,
    /// Middle-level parameter; positive for the symmetric channel,
    /// negative for the asymmetric one.
    pub a: f64,
    /// Frequency ratio `omega_0 / omega`.
    pub ratio: f64,
    /// Oscillator angular frequency, the time unit.
    pub omega: f64,
}

/// Soft diagnostics about a parameter set. They never stop a computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Advisory {
    BetaOutsideWindow { beta: f64 },
}

impl std::fmt::Display for Advisory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Advisory::BetaOutsideWindow { beta } => write!(
                f,
                "beta = {beta} lies outside [{}, {}] where the adiabatic approximation applies",
                BETA_WINDOW.0, BETA_WINDOW.1
            ),
        }
    }
}

impl ModelParams {
    /// Validated constructor with `omega = 1`.
    pub fn new(beta: f64, a: f64, ratio: f64) -> Result<Self> {
        Self::with_omega(beta, a, ratio, 1.0)
    }

    pub fn with_omega(beta: f64, a: f64, ratio: f64, omega: f64) -> Result<Self> {
        let p = ModelParams { beta, a, ratio, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(invalid("beta", format!("must be finite and >= 0, got {}", self.beta)));
        }
        if !self.a.is_finite() {
            return Err(invalid("a", format!("must be finite, got {}", self.a)));
        }
        if !self.ratio.is_finite() || self.ratio < 0.0 {
            return Err(invalid("ratio", format!("must be finite and >= 0, got {}", self.ratio)));
        }
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(invalid("omega", format!("must be finite and > 0, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn advisories(&self) -> Vec<Advisory> {
        let mut out = Vec::new();
        if self.beta < BETA_WINDOW.0 || self.beta > BETA_WINDOW.1 {
            out.push(Advisory::BetaOutsideWindow { beta: self.beta });
        }
        out
    }

    pub fn beta2(&self) -> f64 {
        self.beta * self.beta
    }

    /// Converts a dimensionless time back to physical time.
    pub fn physical_time(&self, tau: f64) -> f64 {
        tau / self.omega
    }
}
