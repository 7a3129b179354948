//! Stationary scattering states in the (x, y) plane.
//!
//! Matching at `x = 0` conserves `k_y`, reflects `k_x → −k_x` and gives the
//! excited component the photon momentum, `q_y = k_y + k_L`. What remains is
//! the 1D problem with the laser detuning replaced by the effective detuning
//! Δ(k_y), so every coefficient depends on `k_y` only through Δ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching;
use crate::physparams::{effective_detuning, PhysParams};
use crate::TwoComponent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSolution2D {
    pub kx: f64,
    pub ky: f64,
    /// Effective detuning Δ = Δ_L − Δ_K(k_y).
    pub delta_eff: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub kx_plus: Complex64,
    pub kx_minus: Complex64,
    pub q_x: Complex64,
    pub q_y: f64,
    pub r1: Complex64,
    pub r2: Complex64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    /// (2λ₊/Ω) C₊
    pub excited_plus: Complex64,
    /// (2λ₋/Ω) C₋
    pub excited_minus: Complex64,
}

pub fn solve_2d(p: &PhysParams, kx: f64, ky: f64) -> Result<EigenSolution2D> {
    if !ky.is_finite() {
        return Err(Error::NonFinite("k_y"));
    }
    solve_2d_with_detuning(p, kx, ky, effective_detuning(p, ky))
}

/// As [`solve_2d`] with the effective detuning supplied by the caller, who
/// is responsible for `delta_eff == effective_detuning(p, ky)`.
pub fn solve_2d_with_detuning(
    p: &PhysParams,
    kx: f64,
    ky: f64,
    delta_eff: f64,
) -> Result<EigenSolution2D> {
    if !kx.is_finite() {
        return Err(Error::NonFinite("k_x"));
    }
    if kx <= 0.0 {
        return Err(Error::NonPositiveWavenumber(kx));
    }
    if !delta_eff.is_finite() {
        return Err(Error::NonFinite("effective detuning"));
    }
    p.validate()?;
    let b = matching::branches(p.hbar_over_mass(), p.rabi, p.gamma, delta_eff, kx);
    let c = matching::coefficients(kx, &b, p.rabi)
        .map_err(|relative| Error::DegenerateDenominator { kx, ky, relative })?;
    Ok(EigenSolution2D {
        kx,
        ky,
        delta_eff,
        lambda_plus: b.lambda_plus,
        lambda_minus: b.lambda_minus,
        kx_plus: b.k_plus,
        kx_minus: b.k_minus,
        q_x: b.q,
        q_y: ky + p.laser_wavenumber,
        r1: c.r1,
        r2: c.r2,
        c_plus: c.c_plus,
        c_minus: c.c_minus,
        excited_plus: c.excited_plus,
        excited_minus: c.excited_minus,
    })
}

/// Delta-normalized eigenfunction at `(x, y)`, `[ground, excited]`.
pub fn eigenstate_2d_at(sol: &EigenSolution2D, x: f64, y: f64) -> TwoComponent {
    let i = Complex64::i();
    let norm = 1.0 / (2.0 * PI);
    let ground_y = (i * sol.ky * y).exp();
    let excited_y = (i * sol.q_y * y).exp();
    if x < 0.0 {
        let ground = (i * sol.kx * x).exp() + sol.r1 * (-i * sol.kx * x).exp();
        let excited = sol.r2 * (-i * sol.q_x * x).exp();
        [norm * ground * ground_y, norm * excited * excited_y]
    } else {
        let ep = (i * sol.kx_plus * x).exp();
        let em = (i * sol.kx_minus * x).exp();
        [
            norm * (sol.c_plus * ep + sol.c_minus * em) * ground_y,
            norm * (sol.excited_plus * ep + sol.excited_minus * em) * excited_y,
        ]
    }
}
