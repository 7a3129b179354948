//! Atom and laser constants, and the kinetic detuning that a plane wave with
//! transverse wavenumber `k_y` picks up when it absorbs a laser photon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (CODATA 2018), J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Mass of a caesium-133 atom, kg.
pub const CESIUM_MASS: f64 = 2.2069e-25;

/// Cs D2 line wavenumber, m⁻¹.
pub const CESIUM_D2_WAVENUMBER: f64 = 7.37e6;

/// Physical constants of the two-level atom and the travelling-wave laser.
///
/// All values are SI. The laser propagates along `+y` and illuminates the
/// half-plane `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Atomic mass, kg.
    pub mass: f64,
    /// Rabi frequency Ω, s⁻¹.
    pub rabi: f64,
    /// Decay rate γ of the excited state, s⁻¹.
    pub gamma: f64,
    /// Laser detuning Δ_L (laser minus atomic angular frequency), s⁻¹.
    pub laser_detuning: f64,
    /// Laser wavenumber k_L, m⁻¹.
    pub laser_wavenumber: f64,
}

/// Doppler plus recoil shift, all in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KineticDetuning {
    pub total: f64,
    pub doppler: f64,
    pub recoil: f64,
}

impl PhysParams {
    pub fn new(
        mass: f64,
        rabi: f64,
        gamma: f64,
        laser_detuning: f64,
        laser_wavenumber: f64,
    ) -> Result<Self> {
        let p = Self {
            mass,
            rabi,
            gamma,
            laser_detuning,
            laser_wavenumber,
        };
        p.validate()?;
        Ok(p)
    }

    /// Caesium with the driving used for the reference arrival-time curves:
    /// Ω = 1.67e8 s⁻¹, γ = 3.3e8 s⁻¹, resonant laser.
    pub fn cesium() -> Self {
        Self {
            mass: CESIUM_MASS,
            rabi: 1.67e8,
            gamma: 3.3e8,
            laser_detuning: 0.0,
            laser_wavenumber: CESIUM_D2_WAVENUMBER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("rabi", self.rabi),
            ("gamma", self.gamma),
            ("laser_detuning", self.laser_detuning),
            ("laser_wavenumber", self.laser_wavenumber),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {:e}",
                self.mass
            )));
        }
        for (name, v) in [
            ("rabi", self.rabi),
            ("gamma", self.gamma),
            ("laser_wavenumber", self.laser_wavenumber),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v:e}"
                )));
            }
        }
        Ok(())
    }

    /// ħ/m in m²/s.
    pub fn hbar_over_mass(&self) -> f64 {
        HBAR / self.mass
    }

    /// v_R = ħ k_L / m.
    pub fn recoil_velocity(&self) -> f64 {
        self.hbar_over_mass() * self.laser_wavenumber
    }

    /// ω_R = ħ k_L² / 2m.
    pub fn recoil_shift(&self) -> f64 {
        0.5 * self.hbar_over_mass() * self.laser_wavenumber * self.laser_wavenumber
    }

    /// Velocity ħk/m carried by wavenumber `k`.
    pub fn velocity_of(&self, k: f64) -> f64 {
        self.hbar_over_mass() * k
    }

    /// Wavenumber m v/ħ for velocity `v`.
    pub fn wavenumber_of(&self, v: f64) -> f64 {
        v / self.hbar_over_mass()
    }

    pub fn with_laser_detuning(mut self, laser_detuning: f64) -> Self {
        self.laser_detuning = laser_detuning;
        self
    }

    pub fn with_laser_wavenumber(mut self, laser_wavenumber: f64) -> Self {
        self.laser_wavenumber = laser_wavenumber;
        self
    }

    pub fn with_rabi(mut self, rabi: f64) -> Self {
        self.rabi = rabi;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// Kinetic detuning Δ_K = (ħ/2m)(2 k_y k_L + k_L²), split into the Doppler
/// part ħ k_y k_L / m and the recoil part ħ k_L² / 2m.
pub fn kinetic_detuning(p: &PhysParams, k_y: f64) -> KineticDetuning {
    let hm = p.hbar_over_mass();
    let doppler = hm * k_y * p.laser_wavenumber;
    let recoil = 0.5 * hm * p.laser_wavenumber * p.laser_wavenumber;
    KineticDetuning {
        total: doppler + recoil,
        doppler,
        recoil,
    }
}

/// Effective detuning Δ = Δ_L − Δ_K(k_y) seen by a plane wave with
/// transverse wavenumber `k_y`.
pub fn effective_detuning(p: &PhysParams, k_y: f64) -> f64 {
    p.laser_detuning - kinetic_detuning(p, k_y).total
}
