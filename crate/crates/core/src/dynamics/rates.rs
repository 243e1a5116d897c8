use crate::{Error, Result};

/// Downward and upward transition-rate scales `G(ω)` and `G(-ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub g_down: f64,
    pub g_up: f64,
}

impl RatePair {
    pub fn new(g_down: f64, g_up: f64) -> Result<Self> {
        if !(g_down.is_finite() && g_down > 0.0) {
            return Err(Error::InvalidInput(format!(
                "G(ω) must be positive, got {g_down}"
            )));
        }
        if !(g_up.is_finite() && g_up >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "G(-ω) must be non-negative, got {g_up}"
            )));
        }
        Ok(Self { g_down, g_up })
    }

    /// Rates obeying detailed balance with a bath at `b`: `G(-ω) = e^{-b} G(ω)`.
    pub fn thermal(g_down: f64, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidInput(format!("b must be finite, got {b}")));
        }
        Self::new(g_down, g_down * (-b).exp())
    }

    /// `ln(G(-ω)/G(ω)) = -b`; `-inf` for a zero-temperature bath.
    pub fn ln_ratio(&self) -> f64 {
        (self.g_up / self.g_down).ln()
    }

    /// The bath's dimensionless inverse temperature, `+inf` when `G(-ω) = 0`.
    pub fn bath_b(&self) -> f64 {
        -self.ln_ratio()
    }
}
