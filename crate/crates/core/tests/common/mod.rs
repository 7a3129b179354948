//! Independent residual checks shared by the integration tests.
//!
//! Nothing here reuses the solver's coefficient formulas: the matching
//! identities are the continuity conditions at x = 0 written out directly,
//! and the stationarity residual applies the conditional Hamiltonian to each
//! plane wave of the solution with the bare laser detuning, so the reduction
//! to an effective detuning is checked rather than assumed.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use toa_core::physparams::CESIUM_MASS;
use toa_core::{EigenSolution2D, PhysParams};

/// Draws parameters and incident wavenumbers spanning weak to strong
/// driving, large detunings and kinetic energies from far below to far
/// above ħγ.
pub fn random_case(rng: &mut impl Rng) -> (PhysParams, f64, f64) {
    let mass = CESIUM_MASS * 10f64.powf(rng.random_range(-1.0..1.0));
    let gamma = 10f64.powf(rng.random_range(6.0..9.0));
    let rabi = gamma * 10f64.powf(rng.random_range(-2.0..1.0));
    let laser_detuning = gamma * rng.random_range(-5.0..5.0);
    let laser_wavenumber = 10f64.powf(rng.random_range(5.0..7.5));
    let p = PhysParams::new(mass, rabi, gamma, laser_detuning, laser_wavenumber).unwrap();
    let hm = p.hbar_over_mass();
    let kinetic = gamma * 10f64.powf(rng.random_range(-4.0..2.0));
    let kx = (2.0 * kinetic / hm).sqrt();
    let doppler = gamma * rng.random_range(-10.0..10.0);
    let ky = doppler / (hm * laser_wavenumber);
    (p, kx, ky)
}

fn relative(residual: Complex64, terms: &[Complex64]) -> f64 {
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if scale == 0.0 {
        residual.norm()
    } else {
        residual.norm() / scale
    }
}

/// Value and slope continuity of both components at x = 0, relative to
/// the size of the terms involved.
pub fn matching_residuals(s: &EigenSolution2D) -> [f64; 4] {
    let one = Complex64::new(1.0, 0.0);
    let kx = Complex64::new(s.kx, 0.0);
    let (kp, km) = (s.kx_plus, s.kx_minus);
    let (cp, cm) = (s.c_plus, s.c_minus);
    let (ep, em) = (s.excited_plus, s.excited_minus);
    [
        relative(one + s.r1 - cp - cm, &[one, s.r1, cp, cm]),
        relative(
            kx * (one - s.r1) - kp * cp - km * cm,
            &[kx, kx * s.r1, kp * cp, km * cm],
        ),
        relative(s.r2 - ep - em, &[s.r2, ep, em]),
        // Left of the edge the excited wave is R2·e^{−i q_x x}, so its slope is −i q_x R2.
        relative(
            -s.q_x * s.r2 - kp * ep - km * em,
            &[s.q_x * s.r2, kp * ep, km * em],
        ),
    ]
}

/// Largest relative residual of (H − E)Φ = 0 over all plane waves of the
/// solution, in frequency units. Uses Δ_L, not the effective detuning.
pub fn stationarity_residual(p: &PhysParams, s: &EigenSolution2D) -> f64 {
    let hm2 = 0.5 * p.hbar_over_mass();
    let energy = Complex64::new(hm2 * (s.kx * s.kx + s.ky * s.ky), 0.0);
    let half_rabi = 0.5 * p.rabi;
    let damping = Complex64::new(p.laser_detuning, 0.5 * p.gamma);
    let ky2 = s.ky * s.ky;
    let qy2 = s.q_y * s.q_y;
    let mut worst: f64 = 0.0;

    // Inside: ground e^{i(k_a x + k_y y)}, excited e^{i(k_a x + q_y y)}; the
    // coupling e^{∓i k_L y} maps one onto the other.
    for (k, c, e) in [
        (s.kx_plus, s.c_plus, s.excited_plus),
        (s.kx_minus, s.c_minus, s.excited_minus),
    ] {
        let kin_g = hm2 * (k * k + ky2) * c;
        let ground = kin_g + half_rabi * e - energy * c;
        worst = worst.max(relative(ground, &[kin_g, half_rabi * e, energy * c]));
        let kin_e = hm2 * (k * k + qy2) * e;
        let excited = kin_e + half_rabi * c - damping * e - energy * e;
        worst = worst.max(relative(
            excited,
            &[kin_e, half_rabi * c, damping * e, energy * e],
        ));
    }

    // Outside: the excited reflected wave R2 e^{i(−q_x x + q_y y)} is free
    // apart from the decay term.
    let q = s.q_x;
    let kin = hm2 * (q * q + qy2) * s.r2;
    let outside = kin - damping * s.r2 - energy * s.r2;
    worst = worst.max(relative(outside, &[kin, damping * s.r2, energy * s.r2]));
    worst
}
