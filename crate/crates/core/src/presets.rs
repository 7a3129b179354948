//! Parameter sets for the caesium scenarios and for a scaled "desk"
//! configuration small enough for the grid oracle.
//!
//! The desk scale keeps Ω/γ, Δ_L/γ and k_L·Δx of the caesium setup but uses a
//! mass with ħ/m = 1e-12 m²/s, so that lengths come out in micrometres and
//! times in seconds.

use crate::oracle::GridSpec;
use crate::packet::GaussianPacket2D;
use crate::physparams::{PhysParams, CESIUM_D2_WAVENUMBER, HBAR};
use crate::toa::uniform_times;

/// Initial centre, m.
pub const CESIUM_X0: f64 = -1.32e-6;
/// Initial width along x, m.
pub const CESIUM_DX: f64 = 0.24e-6;
/// Incident velocity, m/s.
pub const CESIUM_V0: f64 = 0.09;
/// Transverse width for runs that should behave one-dimensionally, m.
pub const CESIUM_WIDE_DY: f64 = 1e-6;

/// Transverse widths showing first the height increase and then the tail.
pub const NARROW_DY_LADDER: [f64; 4] = [2e-10, 1e-10, 5e-11, 2e-11];

/// ⟨k_y⟩/⟨k_x⟩ ratios for oblique incidence.
pub const OBLIQUE_RATIOS: [f64; 3] = [100.0, 300.0, 1000.0];

/// Transverse velocities sampled for the reflection scan, m/s.
pub const REFLECTION_SCAN_VY: [f64; 13] = [
    -1000.0, -300.0, -100.0, -30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0,
];

pub fn cesium_kx0(p: &PhysParams) -> f64 {
    p.wavenumber_of(CESIUM_V0)
}

/// Normally incident caesium packet with transverse width `dy`.
pub fn cesium_packet(p: &PhysParams, dy: f64) -> GaussianPacket2D {
    oblique_cesium_packet(p, dy, 0.0)
}

/// Caesium packet with mean transverse wavenumber `ky0`.
pub fn oblique_cesium_packet(p: &PhysParams, dy: f64, ky0: f64) -> GaussianPacket2D {
    GaussianPacket2D {
        x0: CESIUM_X0,
        y0: 0.0,
        dx: CESIUM_DX,
        dy,
        kx0: cesium_kx0(p),
        ky0,
    }
}

/// 0–60 µs in 50 ns steps.
pub fn cesium_times() -> Vec<f64> {
    uniform_times(0.0, 60e-6, 1201)
}

/// Desk-scale mass: ħ/m = 1e-12 m²/s.
pub const DESK_MASS: f64 = HBAR * 1e12;
/// Decay rate of the desk run compared with the grid oracle, s⁻¹.
pub const DESK_GAMMA: f64 = 20.0;
/// Decay rate at the bottom of the flux-limit sweep, s⁻¹.
pub const DESK_FLUX_GAMMA: f64 = 200.0;
pub const DESK_X0: f64 = -6e-6;
pub const DESK_DX: f64 = 1e-6;
pub const DESK_DY: f64 = 0.25e-6;
pub const DESK_KX0: f64 = 1e7;

/// Ω/γ of the caesium setup.
pub fn cesium_rabi_ratio() -> f64 {
    let cs = PhysParams::cesium();
    cs.rabi / cs.gamma
}

/// Desk parameters at decay rate `gamma` with the caesium Ω/γ and k_L·Δx.
pub fn desk_params(gamma: f64) -> PhysParams {
    PhysParams {
        mass: DESK_MASS,
        rabi: cesium_rabi_ratio() * gamma,
        gamma,
        laser_detuning: 0.0,
        laser_wavenumber: CESIUM_D2_WAVENUMBER * CESIUM_DX / DESK_DX,
    }
}

pub fn desk_packet(dy: f64) -> GaussianPacket2D {
    GaussianPacket2D {
        x0: DESK_X0,
        y0: 0.0,
        dx: DESK_DX,
        dy,
        kx0: DESK_KX0,
        ky0: 0.0,
    }
}

/// 512 × 256 box holding the reflected and the transmitted parts of the desk
/// packet until 1.6 s.
pub fn desk_grid() -> GridSpec {
    let dt = 4e-4;
    GridSpec {
        x_min: -32e-6,
        x_max: 32e-6,
        y_min: -24e-6,
        y_max: 24e-6,
        n_x: 512,
        n_y: 256,
        dt,
        n_steps: (1.6 / dt).round() as usize,
    }
}

/// 0–4 s in 1 ms steps, long enough for the slowest member of the flux sweep.
pub fn desk_flux_times() -> Vec<f64> {
    uniform_times(0.0, 4.0, 4001)
}
