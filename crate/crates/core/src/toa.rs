//! First-photon distribution Π(t) of a Gaussian packet.
//!
//! After the spatial integrals are done analytically, Π(t) is a quadrature
//! over (k_x, k_x', k_y) of a Cauchy-type kernel built from the scattering
//! coefficients, times the free phase e^{−iħ(k_x'² − k_x²)t/2m}. The
//! integrand is smooth in k; all oscillation sits in that phase, which is
//! evaluated exactly at every node pair.
//!
//! Scattering solutions are computed once per node and reused for every
//! time sample. Each k_y slice becomes a dense Hermitian matrix, and Π(t)
//! is a sum of quadratic forms in phase-rotated amplitude vectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen1d::{solve_1d, EigenSolution1D};
use crate::eigen2d::{solve_2d_with_detuning, EigenSolution2D};
use crate::error::{Error, Result};
use crate::packet::{GaussianPacket1D, GaussianPacket2D, NEGATIVE_MASS_THRESHOLD};
use crate::physparams::{effective_detuning, PhysParams};
use crate::quadrature::GaussLegendre;
use crate::series::ToaSeries;

/// Node counts used when a run does not specify them.
pub const DEFAULT_N_KX: usize = 96;
pub const DEFAULT_N_KY: usize = 48;

/// Lower cut-off of the k_x grid in units of the momentum spread.
pub const K_FLOOR_SIGMAS: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_kx: usize,
    pub n_ky: usize,
    /// Half-width of the k boxes in momentum standard deviations.
    pub span_sigmas: f64,
    /// Sample times, s.
    pub times: Vec<f64>,
    /// Skip the negative-momentum guard (diagnostic runs only).
    #[serde(default)]
    pub allow_truncation: bool,
}

impl QuadratureSpec {
    pub fn new(n_kx: usize, n_ky: usize, times: Vec<f64>) -> Self {
        Self {
            n_kx,
            n_ky,
            span_sigmas: 6.0,
            times,
            allow_truncation: false,
        }
    }

    pub fn with_default_nodes(times: Vec<f64>) -> Self {
        Self::new(DEFAULT_N_KX, DEFAULT_N_KY, times)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_kx < 8 || self.n_ky < 8 {
            return Err(Error::InvalidQuadrature(format!(
                "need at least 8 nodes per axis, got n_kx = {}, n_ky = {}",
                self.n_kx, self.n_ky
            )));
        }
        if !(self.span_sigmas > 0.0 && self.span_sigmas.is_finite()) {
            return Err(Error::InvalidQuadrature(format!(
                "span_sigmas must be positive, got {}",
                self.span_sigmas
            )));
        }
        if self.times.is_empty() {
            return Err(Error::InvalidQuadrature("no time samples".into()));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidQuadrature(
                "times must be finite and >= 0".into(),
            ));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidQuadrature(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn kx_rule(&self, g: &GaussianPacket1D) -> GaussLegendre {
        let sigma = g.sigma_k();
        let lo = (g.k0 - self.span_sigmas * sigma).max(K_FLOOR_SIGMAS * sigma);
        let hi = (g.k0 + self.span_sigmas * sigma).max(lo + sigma);
        GaussLegendre::new(self.n_kx, lo, hi)
    }

    pub fn ky_rule(&self, g: &GaussianPacket1D) -> GaussLegendre {
        let sigma = g.sigma_k();
        GaussLegendre::new(
            self.n_ky,
            g.k0 - self.span_sigmas * sigma,
            g.k0 + self.span_sigmas * sigma,
        )
    }
}

/// Uniform grid of `n` samples on `[t0, t1]`.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t0];
    }
    (0..n)
        .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Per-node data entering the kernel: the three exponents and the
/// excited-state amplitudes they carry.
#[derive(Debug, Clone, Copy)]
struct KernelNode {
    k: f64,
    q: Complex64,
    r2: Complex64,
    k_plus: Complex64,
    k_minus: Complex64,
    e_plus: Complex64,
    e_minus: Complex64,
}

impl From<&EigenSolution2D> for KernelNode {
    fn from(s: &EigenSolution2D) -> Self {
        Self {
            k: s.kx,
            q: s.q_x,
            r2: s.r2,
            k_plus: s.kx_plus,
            k_minus: s.kx_minus,
            e_plus: s.excited_plus,
            e_minus: s.excited_minus,
        }
    }
}

impl From<&EigenSolution1D> for KernelNode {
    fn from(s: &EigenSolution1D) -> Self {
        Self {
            k: s.k,
            q: s.q,
            r2: s.r2,
            k_plus: s.k_plus,
            k_minus: s.k_minus,
            e_plus: s.excited_plus,
            e_minus: s.excited_minus,
        }
    }
}

/// i·a/b with an underflow guard on the denominator.
fn cauchy(a: Complex64, b: Complex64, kx: f64, kx_prime: f64) -> Result<Complex64> {
    // Both exponents live in the upper half-plane, so Im b > 0 unless γ = 0
    // and both branches are real.
    if b.norm() == 0.0 || !b.norm().is_finite() {
        if a == Complex64::new(0.0, 0.0) {
            return Ok(a);
        }
        return Err(Error::KernelDenominator { kx, kx_prime });
    }
    Ok(Complex64::i() * a / b)
}

/// Dense matrix K[i][j] = ∫ dx conj(φᵢ⁽²⁾(x)) φⱼ⁽²⁾(x) up to the 1/(2π)
/// normalization, where φ⁽²⁾ is the excited component of the scattering
/// state at node i.
fn kernel_matrix(nodes: &[KernelNode]) -> Result<Vec<Complex64>> {
    let n = nodes.len();
    let mut k = vec![Complex64::new(0.0, 0.0); n * n];
    for (i, a) in nodes.iter().enumerate() {
        let ea = [
            (a.e_plus.conj(), a.k_plus.conj()),
            (a.e_minus.conj(), a.k_minus.conj()),
        ];
        for (j, b) in nodes.iter().enumerate() {
            let mut s = cauchy(a.r2.conj() * b.r2, b.q - a.q.conj(), a.k, b.k)?;
            for (ca, ka) in ea {
                s += cauchy(ca * b.e_plus, b.k_plus - ka, a.k, b.k)?;
                s += cauchy(ca * b.e_minus, b.k_minus - ka, a.k, b.k)?;
            }
            k[i * n + j] = s;
        }
    }
    Ok(k)
}

/// One k_y slice: kernel, weighted amplitudes and the free dispersion.
struct Slice {
    kernel: Vec<Complex64>,
    amplitudes: Vec<Complex64>,
    /// ħ(k² − k_ref²)/2m per node.
    frequencies: Vec<f64>,
}

impl Slice {
    fn new(
        nodes: &[KernelNode],
        amplitudes: Vec<Complex64>,
        hbar_over_mass: f64,
        k_ref: f64,
    ) -> Result<Self> {
        Ok(Self {
            kernel: kernel_matrix(nodes)?,
            amplitudes,
            frequencies: nodes
                .iter()
                .map(|n| 0.5 * hbar_over_mass * (n.k - k_ref) * (n.k + k_ref))
                .collect(),
        })
    }

    /// v(t)ᴴ K v(t) with vᵢ(t) = aᵢ e^{−iωᵢt}.
    fn quadratic_form(&self, t: f64) -> Complex64 {
        let n = self.amplitudes.len();
        let v: Vec<Complex64> = self
            .amplitudes
            .iter()
            .zip(&self.frequencies)
            .map(|(a, w)| a * Complex64::from_polar(1.0, -w * t))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let kv: Complex64 = row.iter().zip(&v).map(|(k, vj)| k * vj).sum();
            total += v[i].conj() * kv;
        }
        total
    }

    fn evaluate(&self, times: &[f64]) -> Vec<Complex64> {
        times.par_iter().map(|&t| self.quadratic_form(t)).collect()
    }
}

fn check_truncation(g: &GaussianPacket1D, q: &QuadratureSpec) -> Result<f64> {
    let mass = g.negative_k_mass();
    if mass > NEGATIVE_MASS_THRESHOLD && !q.allow_truncation {
        return Err(Error::NegativeMomentumMass {
            mass,
            threshold: NEGATIVE_MASS_THRESHOLD,
        });
    }
    Ok(mass)
}

/// Last time at which the k_x rule still resolves the packet.
///
/// A momentum grid with spacing δk represents the packet as if repeated with
/// period 2π/δk in x. The copy trailing the packet reaches x = 0 after
/// roughly (2π/δk − |x0| − 6Δx)/v; the widest spacing within 3σ of k0 sets
/// the period.
pub fn alias_horizon(g: &GaussianPacket1D, rule: &GaussLegendre, hbar_over_mass: f64) -> f64 {
    let sigma = g.sigma_k();
    let dk = rule
        .nodes
        .windows(2)
        .filter(|w| (0.5 * (w[0] + w[1]) - g.k0).abs() <= 3.0 * sigma)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    if dk == 0.0 {
        return f64::INFINITY;
    }
    let period = 2.0 * PI / dk;
    let lead = g.x0.abs() + 6.0 * g.dx;
    ((period - lead) / (hbar_over_mass * g.k0)).max(0.0)
}

fn check_alias(
    g: &GaussianPacket1D,
    q: &QuadratureSpec,
    rule: &GaussLegendre,
    hm: f64,
) -> Result<f64> {
    let horizon = alias_horizon(g, rule, hm);
    let t_max = *q.times.last().expect("validated non-empty");
    if t_max > horizon {
        let needed = q.n_kx as f64 * (hm * g.k0 * t_max + g.x0.abs() + 6.0 * g.dx)
            / (hm * g.k0 * horizon + g.x0.abs() + 6.0 * g.dx);
        return Err(Error::AliasHorizon {
            horizon,
            t_max,
            n_kx_needed: needed.ceil() as usize + 1,
        });
    }
    Ok(horizon)
}

/// Assembles the series from per-slice complex sums; slices are reduced in
/// index order so the result does not depend on the worker count.
fn finish(
    times: &[f64],
    slice_values: Vec<Vec<Complex64>>,
    slice_weights: &[f64],
    gamma: f64,
    source: &str,
) -> ToaSeries {
    let pref = gamma / (2.0 * PI);
    let mut acc = vec![Complex64::new(0.0, 0.0); times.len()];
    for (vals, w) in slice_values.iter().zip(slice_weights) {
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += w * v;
        }
    }
    let re: Vec<f64> = acc.iter().map(|c| pref * c.re).collect();
    let im_max = acc.iter().map(|c| (pref * c.im).abs()).fold(0.0, f64::max);
    let peak = re.iter().copied().fold(0.0, f64::max);
    let min = re.iter().copied().fold(f64::INFINITY, f64::min);
    let mut s = ToaSeries::new(times.to_vec(), re, source);
    let d = &mut s.metadata.diagnostics;
    d.insert(
        "max_imag_over_peak".into(),
        if peak > 0.0 { im_max / peak } else { im_max },
    );
    d.insert(
        "min_over_peak".into(),
        if peak > 0.0 { min / peak } else { min },
    );
    s
}

/// Π(t) for the 2D model.
pub fn pi_2d(p: &PhysParams, g: &GaussianPacket2D, q: &QuadratureSpec) -> Result<ToaSeries> {
    p.validate()?;
    g.validate()?;
    q.validate()?;
    let mass = check_truncation(&g.x_marginal(), q)?;
    let kx_rule = q.kx_rule(&g.x_marginal());
    let ky_rule = q.ky_rule(&g.y_marginal());
    let hm = p.hbar_over_mass();
    let horizon = check_alias(&g.x_marginal(), q, &kx_rule, hm)?;

    let slices: Vec<Slice> = ky_rule
        .nodes
        .par_iter()
        .map(|&ky| {
            let delta = effective_detuning(p, ky);
            let nodes = kx_rule
                .nodes
                .iter()
                .map(|&kx| solve_2d_with_detuning(p, kx, ky, delta).map(|s| KernelNode::from(&s)))
                .collect::<Result<Vec<_>>>()?;
            let amplitudes = kx_rule
                .nodes
                .iter()
                .zip(&kx_rule.weights)
                .map(|(&kx, &w)| w * g.momentum_amplitude(kx, ky))
                .collect();
            Slice::new(&nodes, amplitudes, hm, g.kx0)
        })
        .collect::<Result<_>>()?;

    let values: Vec<Vec<Complex64>> = slices.par_iter().map(|s| s.evaluate(&q.times)).collect();
    let mut s = finish(&q.times, values, &ky_rule.weights, p.gamma, "pi_2d");
    s.metadata
        .diagnostics
        .insert("negative_k_mass".into(), mass);
    s.metadata
        .diagnostics
        .insert("alias_horizon".into(), horizon);
    s.metadata.echo = serde_json::json!({ "params": p, "packet": g, "quadrature": q });
    Ok(s)
}

/// Π(t) for the 1D model.
pub fn pi_1d(p: &PhysParams, g: &GaussianPacket1D, q: &QuadratureSpec) -> Result<ToaSeries> {
    p.validate()?;
    g.validate()?;
    q.validate()?;
    let mass = check_truncation(g, q)?;
    let rule = q.kx_rule(g);
    let horizon = check_alias(g, q, &rule, p.hbar_over_mass())?;
    let nodes = rule
        .nodes
        .par_iter()
        .map(|&k| solve_1d(p, k).map(|s| KernelNode::from(&s)))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&k, &w)| w * g.momentum_amplitude(k))
        .collect();
    let slice = Slice::new(&nodes, amplitudes, p.hbar_over_mass(), g.k0)?;
    let values = vec![slice.evaluate(&q.times)];
    let mut s = finish(&q.times, values, &[1.0], p.gamma, "pi_1d");
    s.metadata
        .diagnostics
        .insert("negative_k_mass".into(), mass);
    s.metadata
        .diagnostics
        .insert("alias_horizon".into(), horizon);
    s.metadata.echo = serde_json::json!({ "params": p, "packet": g, "quadrature": q });
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionTotal {
    /// ∫Π dt including the tail estimate, clamped to [0, 1].
    pub total: f64,
    /// Exponential extrapolation past the last sample.
    pub tail: f64,
}

impl EmissionTotal {
    pub fn tail_fraction(&self) -> f64 {
        if self.total > 0.0 {
            self.tail / self.total
        } else {
            0.0
        }
    }
}

/// Total emission probability: the running integral at the last sample
/// plus Π_last/rate, the rate being fitted to the last two samples.
pub fn emission_total(s: &ToaSeries) -> EmissionTotal {
    let n = s.len();
    let covered = s.total();
    let mut tail = 0.0;
    if n >= 2 {
        let (a, b) = (s.pi_values[n - 2], s.pi_values[n - 1]);
        let dt = s.times[n - 1] - s.times[n - 2];
        if a > 0.0 && b > 0.0 && b < a {
            let rate = (a / b).ln() / dt;
            tail = b / rate;
        }
    }
    let out = EmissionTotal {
        total: (covered + tail).clamp(0.0, 1.0),
        tail,
    };
    if out.tail_fraction() > 0.01 {
        log::warn!(
            "tail extrapolation is {:.2}% of the total emission; extend the time grid",
            100.0 * out.tail_fraction()
        );
    }
    out
}
