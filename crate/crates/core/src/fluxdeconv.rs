//! Detection delay and the flux limit.
//!
//! The measured Π is modelled as an ideal distribution convolved with the
//! first-photon density W(t) of an atom at rest in the laser. Removing W
//! by regularized deconvolution should approach the x-flux through the
//! plane x = 0 of the freely moving packet when emission is fast compared
//! with the packet's passage and reflection is weak.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packet::GaussianPacket2D;
use crate::series::{uniform_step, ToaSeries};

/// Default Wiener regularization, relative to max|Ŵ|².
pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtRestDistribution {
    pub omega: f64,
    pub gamma: f64,
    pub detuning: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxSeries {
    pub times: Vec<f64>,
    pub jbar_x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub epsilon: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// e^{−iμ̄t}cos(δt) and e^{−iμ̄t}sin(δt)/δ for the at-rest generator
/// M = [[0, Ω/2], [Ω/2, d]], d = −Δ_L − iγ/2, with eigenvalues μ̄ ± δ and
/// δ² = d²/4 + Ω²/4.
///
/// Away from δt = 0 both are combined from e^{−i(μ̄ ± δ)t}, which never grow,
/// so strongly overdamped systems do not overflow.
fn at_rest_propagator(omega: f64, gamma: f64, detuning: f64, t: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let d = Complex64::new(-detuning, -0.5 * gamma);
    let mean = 0.5 * d;
    let delta = (0.25 * d * d + 0.25 * omega * omega).sqrt();
    let z = delta * t;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        let phase = (-i * mean * t).exp();
        let cos = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
        let sinc = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
        return (phase * cos, phase * t * sinc);
    }
    let slow = (-i * (mean - delta) * t).exp();
    let fast = (-i * (mean + delta) * t).exp();
    (0.5 * (slow + fast), (slow - fast) / (2.0 * i * delta))
}

/// Excited amplitude b(t) of an atom at rest starting in the ground state:
/// b = −i(Ω/2) e^{−iμ̄t} sin(δt)/δ by Sylvester's formula.
pub fn excited_amplitude_at_rest(omega: f64, gamma: f64, detuning: f64, t: f64) -> Complex64 {
    let (_, sin_over_delta) = at_rest_propagator(omega, gamma, detuning, t);
    -Complex64::i() * 0.5 * omega * sin_over_delta
}

/// Ground amplitude a(t) of the same system,
/// e^{−iμ̄t}[cos δt − i(M₁₁ − μ̄) sin(δt)/δ] with M₁₁ = 0.
pub fn ground_amplitude_at_rest(omega: f64, gamma: f64, detuning: f64, t: f64) -> Complex64 {
    let (cos, sin_over_delta) = at_rest_propagator(omega, gamma, detuning, t);
    let mean = Complex64::new(-0.5 * detuning, -0.25 * gamma);
    cos + Complex64::i() * mean * sin_over_delta
}

/// W(t) = γ|b(t)|².
pub fn w_at_rest(omega: f64, gamma: f64, detuning: f64, times: &[f64]) -> AtRestDistribution {
    let values = times
        .iter()
        .map(|&t| gamma * excited_amplitude_at_rest(omega, gamma, detuning, t).norm_sqr())
        .collect();
    AtRestDistribution {
        omega,
        gamma,
        detuning,
        times: times.to_vec(),
        values,
    }
}

/// x-flux through x = 0, integrated over y, of the freely moving packet.
///
/// The packet is a product state, so the y factor integrates to one and
/// J̄ₓ(0, t) = (ħ/m)|ψ(0, t)|² Re(b/2a) for the x marginal.
pub fn flux_xline(g: &GaussianPacket2D, hbar_over_mass: f64, times: &[f64]) -> FluxSeries {
    let gx = g.x_marginal();
    let jbar_x = times
        .iter()
        .map(|&t| {
            let (psi, log_deriv) = gx.free_amplitude_and_log_derivative(0.0, t, hbar_over_mass);
            hbar_over_mass * psi.norm_sqr() * log_deriv.im
        })
        .collect();
    FluxSeries {
        times: times.to_vec(),
        jbar_x,
    }
}

/// Linear convolution (Π_id ⋆ W)(tₙ) = Σₘ Π_id(tₘ) W(tₙ − tₘ) Δt on the
/// grid of `pi_id`; W must start at t = 0 with the same step.
pub fn convolve(pi_id: &ToaSeries, w: &AtRestDistribution) -> Result<ToaSeries> {
    let dt = check_grids(pi_id, w)?;
    let n = pi_id.len();
    let out: Vec<f64> = (0..n)
        .map(|i| {
            let first = (i + 1).saturating_sub(w.values.len());
            (first..=i)
                .map(|j| pi_id.pi_values[j] * w.values[i - j] * dt)
                .sum()
        })
        .collect();
    Ok(ToaSeries::new(pi_id.times.clone(), out, "convolved"))
}

fn check_grids(pi: &ToaSeries, w: &AtRestDistribution) -> Result<f64> {
    let dt = pi
        .uniform_step()
        .ok_or_else(|| Error::GridMismatch("Π must be sampled on a uniform grid".into()))?;
    let dw = uniform_step(&w.times)
        .ok_or_else(|| Error::GridMismatch("W must be sampled on a uniform grid".into()))?;
    if (dt - dw).abs() > 1e-9 * dt {
        return Err(Error::GridMismatch(format!(
            "step of Π ({dt:e}) differs from step of W ({dw:e})"
        )));
    }
    if w.times[0].abs() > 1e-9 * dt {
        return Err(Error::GridMismatch("W must start at t = 0".into()));
    }
    Ok(dt)
}

/// Π_id from Π = Π_id ⋆ W by Wiener filtering,
/// Π̂_id = Π̂ conj(Ŵ) / (|Ŵ|² + ε max|Ŵ|²), zero-padded to avoid wrap-around.
/// The result is not renormalized.
pub fn deconvolve(
    pi: &ToaSeries,
    w: &AtRestDistribution,
    reg: Regularization,
) -> Result<ToaSeries> {
    if reg.epsilon.is_nan() || reg.epsilon <= 0.0 {
        return Err(Error::InvalidRegularization(reg.epsilon));
    }
    let dt = check_grids(pi, w)?;
    let n = pi.len();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut signal = vec![Complex64::new(0.0, 0.0); m];
    for (s, v) in signal.iter_mut().zip(&pi.pi_values) {
        *s = Complex64::new(*v, 0.0);
    }
    let mut kernel = vec![Complex64::new(0.0, 0.0); m];
    for (k, v) in kernel.iter_mut().zip(w.values.iter().take(n)) {
        *k = Complex64::new(v * dt, 0.0);
    }
    fwd.process(&mut signal);
    fwd.process(&mut kernel);
    let max_power = kernel.iter().map(|k| k.norm_sqr()).fold(0.0, f64::max);
    let floor = reg.epsilon * max_power;
    for (s, k) in signal.iter_mut().zip(&kernel) {
        *s = *s * k.conj() / (k.norm_sqr() + floor);
    }
    inv.process(&mut signal);
    let values = signal[..n].iter().map(|c| c.re / m as f64).collect();
    let mut out = ToaSeries::new(pi.times.clone(), values, "deconvolved");
    out.metadata
        .diagnostics
        .insert("epsilon".into(), reg.epsilon);
    Ok(out)
}
