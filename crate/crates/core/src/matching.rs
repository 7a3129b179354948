//! Branch wavenumbers and matching coefficients at the laser edge `x = 0`.
//!
//! The 1D model and every `k_y` slice of the 2D model reduce to the same
//! four linear conditions, differing only in the detuning fed in. Both
//! solvers go through this module so the reduction holds bit for bit.

use num_complex::Complex64;

use crate::branch::{decaying_sqrt, dressed_frequencies};

/// |D| below this fraction of its natural scale is treated as singular.
pub const DENOMINATOR_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Branches {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub k_plus: Complex64,
    pub k_minus: Complex64,
    pub q: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Coefficients {
    pub r1: Complex64,
    pub r2: Complex64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    /// (2λ₊/Ω) C₊, the excited amplitude carried by the `+` dressed wave.
    pub excited_plus: Complex64,
    /// (2λ₋/Ω) C₋.
    pub excited_minus: Complex64,
}

pub(crate) fn branches(
    hbar_over_mass: f64,
    rabi: f64,
    gamma: f64,
    detuning: f64,
    k: f64,
) -> Branches {
    let (lambda_plus, lambda_minus) = dressed_frequencies(rabi, gamma, detuning);
    let k2 = Complex64::new(k * k, 0.0);
    let inv = 1.0 / hbar_over_mass;
    let k_plus = decaying_sqrt(k2 - 2.0 * inv * lambda_plus);
    let k_minus = decaying_sqrt(k2 - 2.0 * inv * lambda_minus);
    let q = decaying_sqrt(k2 + inv * Complex64::new(2.0 * detuning, gamma));
    Branches {
        lambda_plus,
        lambda_minus,
        k_plus,
        k_minus,
        q,
    }
}

/// Solves the matching conditions for an incident ground-state wave of
/// wavenumber `k`. On a degenerate denominator returns `Err(|D|/scale)`.
pub(crate) fn coefficients(k: f64, b: &Branches, rabi: f64) -> Result<Coefficients, f64> {
    let (lp, lm) = (b.lambda_plus, b.lambda_minus);
    let (kp, km, q) = (b.k_plus, b.k_minus, b.q);
    let d = lp * (k + km) * (q + kp) - lm * (k + kp) * (q + km);

    let zero = Complex64::new(0.0, 0.0);
    if rabi == 0.0 {
        // The ground state never couples; the edge is invisible.
        return Ok(Coefficients {
            r1: zero,
            r2: zero,
            c_plus: Complex64::new(1.0, 0.0),
            c_minus: zero,
            excited_plus: zero,
            excited_minus: zero,
        });
    }

    let scale =
        (lp.norm() + lm.norm()) * (k + kp.norm() + km.norm()) * (q.norm() + kp.norm() + km.norm());
    let relative = if scale > 0.0 { d.norm() / scale } else { 0.0 };
    if relative.is_nan() || relative < DENOMINATOR_GUARD {
        return Err(relative);
    }

    let c_plus = -2.0 * k * (q + km) * lm / d;
    let c_minus = 2.0 * k * (q + kp) * lp / d;
    let r2 = k * (km - kp) * rabi / d;
    let r1 = (lp * (q + kp) * (k - km) - lm * (q + km) * (k - kp)) / d;
    // λ₊λ₋ = −Ω²/4 turns (2λ±/Ω)C± into expressions free of 1/Ω.
    let excited_plus = k * rabi * (q + km) / d;
    let excited_minus = -k * rabi * (q + kp) / d;
    Ok(Coefficients {
        r1,
        r2,
        c_plus,
        c_minus,
        excited_plus,
        excited_minus,
    })
}
