//! Minimum-uncertainty Gaussian wave packets in the ground state.
//!
//! Widths are position standard deviations; the momentum standard
//! deviation is `1/(2Δ)` per axis. The momentum amplitude is the one the
//! packet would have as a free particle at `t = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Above this much probability at `k_x < 0` the half-line expansion is
/// considered unreliable.
pub const NEGATIVE_MASS_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket1D {
    pub x0: f64,
    pub dx: f64,
    pub k0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket2D {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub kx0: f64,
    pub ky0: f64,
}

impl GaussianPacket1D {
    pub fn new(x0: f64, dx: f64, k0: f64) -> Result<Self> {
        let g = Self { x0, dx, k0 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0.is_finite() && self.dx.is_finite() && self.k0.is_finite()) {
            return Err(Error::NonFinite("packet"));
        }
        if self.dx <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "packet width must be positive, got {:e}",
                self.dx
            )));
        }
        Ok(())
    }

    /// Momentum standard deviation 1/(2Δx).
    pub fn sigma_k(&self) -> f64 {
        0.5 / self.dx
    }

    pub fn momentum_amplitude(&self, k: f64) -> Complex64 {
        let norm = (2.0 * self.dx * self.dx / PI).powf(0.25);
        let d = k - self.k0;
        let mag = norm * (-d * d * self.dx * self.dx).exp();
        Complex64::from_polar(mag, -k * self.x0)
    }

    /// Probability carried by `k < 0`.
    pub fn negative_k_mass(&self) -> f64 {
        0.5 * erfc(std::f64::consts::SQRT_2 * self.k0 * self.dx)
    }

    /// Free-particle amplitude ψ(x, t), `hbar_over_mass` in m²/s.
    pub fn free_amplitude(&self, x: f64, t: f64, hbar_over_mass: f64) -> Complex64 {
        let (psi, _) = self.free_amplitude_and_log_derivative(x, t, hbar_over_mass);
        psi
    }

    /// ψ(x, t) and ∂ₓψ/ψ for free evolution.
    ///
    /// ψ = (2π)^{-1/2} ∫ ψ̃(k) e^{ikx − iħk²t/2m} dk is a Gaussian integral
    /// ∫ exp(−a k² + b k + c) dk with a = Δx² + iħt/2m,
    /// b = 2k₀Δx² + i(x − x₀), c = −k₀²Δx².
    pub fn free_amplitude_and_log_derivative(
        &self,
        x: f64,
        t: f64,
        hbar_over_mass: f64,
    ) -> (Complex64, Complex64) {
        let norm = (2.0 * self.dx * self.dx / PI).powf(0.25) / (2.0 * PI).sqrt();
        let a = Complex64::new(self.dx * self.dx, 0.5 * hbar_over_mass * t);
        let b = Complex64::new(2.0 * self.k0 * self.dx * self.dx, x - self.x0);
        let c = -self.k0 * self.k0 * self.dx * self.dx;
        let psi = norm * (PI / a).sqrt() * (b * b / (4.0 * a) + c).exp();
        let log_deriv = Complex64::i() * b / (2.0 * a);
        (psi, log_deriv)
    }
}

impl GaussianPacket2D {
    pub fn new(x0: f64, y0: f64, dx: f64, dy: f64, kx0: f64, ky0: f64) -> Result<Self> {
        let g = Self {
            x0,
            y0,
            dx,
            dy,
            kx0,
            ky0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.x_marginal().validate()?;
        self.y_marginal().validate()
    }

    pub fn x_marginal(&self) -> GaussianPacket1D {
        GaussianPacket1D {
            x0: self.x0,
            dx: self.dx,
            k0: self.kx0,
        }
    }

    pub fn y_marginal(&self) -> GaussianPacket1D {
        GaussianPacket1D {
            x0: self.y0,
            dx: self.dy,
            k0: self.ky0,
        }
    }

    pub fn sigma_kx(&self) -> f64 {
        0.5 / self.dx
    }

    pub fn sigma_ky(&self) -> f64 {
        0.5 / self.dy
    }

    pub fn momentum_amplitude(&self, kx: f64, ky: f64) -> Complex64 {
        self.x_marginal().momentum_amplitude(kx) * self.y_marginal().momentum_amplitude(ky)
    }

    /// Probability carried by `k_x < 0`, lost by the half-line expansion.
    pub fn negative_k_mass(&self) -> f64 {
        self.x_marginal().negative_k_mass()
    }

    pub fn free_amplitude(&self, x: f64, y: f64, t: f64, hbar_over_mass: f64) -> Complex64 {
        self.x_marginal().free_amplitude(x, t, hbar_over_mass)
            * self.y_marginal().free_amplitude(y, t, hbar_over_mass)
    }
}
