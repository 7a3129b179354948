//! Direct time-domain propagation of the two-component wave function
//! under the conditional Hamiltonian on a periodic (x, y) grid.
//!
//! Strang splitting: half a potential step (an exact 2×2 exponential at
//! every grid point), a full kinetic step in Fourier space, half a
//! potential step. Π(t) then follows either from the norm loss or from the
//! excited population, independently of the eigenfunction expansion.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packet::GaussianPacket2D;
use crate::physparams::PhysParams;
use crate::series::ToaSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub dt: f64,
    pub n_steps: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.n_x.is_power_of_two() || !self.n_y.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point counts must be powers of two, got {} x {}",
                self.n_x, self.n_y
            )));
        }
        if !(self.x_max > self.x_min && self.y_max > self.y_min) {
            return Err(Error::InvalidGrid("empty box".into()));
        }
        if !(self.x_min < 0.0 && self.x_max > 0.0) {
            return Err(Error::InvalidGrid("the box must straddle x = 0".into()));
        }
        let edge = -self.x_min / self.dx();
        if (edge - edge.round()).abs() > 1e-6 {
            return Err(Error::InvalidGrid(format!(
                "x = 0 must fall on a grid line (x_min/dx = {edge})"
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_x as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.n_y as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + self.dy() * j as f64
    }

    /// Index of the first column with x >= 0.
    pub fn edge_index(&self) -> usize {
        (-self.x_min / self.dx()).round() as usize
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that the grid resolves the packet's wavenumbers, including
    /// the photon kick on the excited component.
    pub fn check_resolution(&self, p: &PhysParams, g: &GaussianPacket2D) -> Result<()> {
        let kx_max = g.kx0.abs() + 6.0 * g.sigma_kx();
        if self.dx() >= PI / kx_max {
            return Err(Error::InvalidGrid(format!(
                "dx = {:e} does not resolve k_x up to {kx_max:e}",
                self.dx()
            )));
        }
        if self.n_y > 1 {
            let ky_max = g.ky0.abs() + 6.0 * g.sigma_ky() + p.laser_wavenumber;
            if self.dy() >= PI / ky_max {
                return Err(Error::InvalidGrid(format!(
                    "dy = {:e} does not resolve k_y up to {ky_max:e}",
                    self.dy()
                )));
            }
        }
        Ok(())
    }

    /// Default time step: 0.02 over the fastest rate in the problem.
    pub fn default_dt(p: &PhysParams, k_max: f64) -> f64 {
        let kinetic = 0.5 * p.hbar_over_mass() * k_max * k_max;
        0.02 / p.gamma.max(p.rabi).max(p.laser_detuning.abs()).max(kinetic)
    }
}

/// Two-component wave function on the grid, row-major `[ix * n_y + iy]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub ground: Vec<Complex64>,
    pub excited: Vec<Complex64>,
    pub time: f64,
}

impl GridState {
    /// Ground-state Gaussian at t = 0.
    pub fn from_packet(g: &GaussianPacket2D, spec: &GridSpec, hbar_over_mass: f64) -> Self {
        let gx = g.x_marginal();
        let gy = g.y_marginal();
        let ys: Vec<Complex64> = (0..spec.n_y)
            .map(|j| gy.free_amplitude(spec.y(j), 0.0, hbar_over_mass))
            .collect();
        let mut ground = Vec::with_capacity(spec.len());
        for i in 0..spec.n_x {
            let fx = gx.free_amplitude(spec.x(i), 0.0, hbar_over_mass);
            ground.extend(ys.iter().map(|fy| fx * fy));
        }
        Self {
            excited: vec![Complex64::new(0.0, 0.0); ground.len()],
            ground,
            time: 0.0,
        }
    }

    /// Ground state `f(x)` repeated along y, normalized over the box height.
    pub fn from_profile<F: Fn(f64) -> Complex64>(f: F, spec: &GridSpec) -> Self {
        let h = (spec.y_max - spec.y_min).sqrt();
        let mut ground = Vec::with_capacity(spec.len());
        for i in 0..spec.n_x {
            let v = f(spec.x(i)) / h;
            ground.extend(std::iter::repeat_n(v, spec.n_y));
        }
        Self {
            excited: vec![Complex64::new(0.0, 0.0); ground.len()],
            ground,
            time: 0.0,
        }
    }

    pub fn norm_sqr(&self, spec: &GridSpec) -> f64 {
        (ordered_sum(&self.ground, spec.n_y) + ordered_sum(&self.excited, spec.n_y))
            * spec.cell_area()
    }

    pub fn excited_population(&self, spec: &GridSpec) -> f64 {
        ordered_sum(&self.excited, spec.n_y) * spec.cell_area()
    }

    /// Largest density on the outermost rows and columns over the largest
    /// density anywhere.
    pub fn boundary_density_ratio(&self, spec: &GridSpec) -> f64 {
        let (nx, ny) = (spec.n_x, spec.n_y);
        let dens = |idx: usize| self.ground[idx].norm_sqr() + self.excited[idx].norm_sqr();
        let peak = (0..nx * ny).map(dens).fold(0.0, f64::max);
        let mut edge: f64 = 0.0;
        for j in 0..ny {
            edge = edge.max(dens(j)).max(dens((nx - 1) * ny + j));
        }
        if ny > 1 {
            for i in 0..nx {
                edge = edge.max(dens(i * ny)).max(dens(i * ny + ny - 1));
            }
        }
        if peak > 0.0 {
            edge / peak
        } else {
            0.0
        }
    }
}

/// Σ|ψ|² with per-row partial sums added in row order.
fn ordered_sum(v: &[Complex64], row: usize) -> f64 {
    let partial: Vec<f64> = v
        .par_chunks(row)
        .map(|r| r.iter().map(|c| c.norm_sqr()).sum())
        .collect();
    partial.iter().sum()
}

type Matrix2 = [[Complex64; 2]; 2];

/// exp(A) for a complex 2×2 matrix.
fn expm2(a: Matrix2) -> Matrix2 {
    let mu = 0.5 * (a[0][0] + a[1][1]);
    let h = 0.5 * (a[0][0] - a[1][1]);
    let s = (h * h + a[0][1] * a[1][0]).sqrt();
    let (cosh, sinhc) = if s.norm() < 1e-4 {
        let s2 = s * s;
        (
            1.0 + s2 / 2.0 + s2 * s2 / 24.0,
            1.0 + s2 / 6.0 + s2 * s2 / 120.0,
        )
    } else {
        (s.cosh(), s.sinh() / s)
    };
    let e = mu.exp();
    [
        [e * (cosh + sinhc * h), e * sinhc * a[0][1]],
        [e * sinhc * a[1][0], e * (cosh - sinhc * h)],
    ]
}

/// Precomputed split-step operators for one grid and parameter set.
pub struct Propagator {
    spec: GridSpec,
    gamma: f64,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
    /// Kinetic phase per mode, layout `[iky * n_x + ikx]`, FFT scaling folded in.
    kinetic: Vec<Complex64>,
    /// Half-step excited-state factor for x < 0.
    dark_excited: Complex64,
    /// Half-step 2×2 propagator inside the laser, before the y phase.
    lit: Matrix2,
    /// Same with the coupling halved, for the grid line on the laser edge.
    lit_edge: Matrix2,
    /// e^{i k_L y} per row position.
    laser_phase: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Propagator {
    pub fn new(p: &PhysParams, spec: &GridSpec) -> Result<Self> {
        p.validate()?;
        spec.validate()?;
        let mut planner = FftPlanner::new();
        let (nx, ny) = (spec.n_x, spec.n_y);
        let lx = spec.x_max - spec.x_min;
        let ly = spec.y_max - spec.y_min;
        let freq = |j: usize, n: usize, l: f64| {
            let m = if j < n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            2.0 * PI * m / l
        };
        let scale = 1.0 / (nx * ny) as f64;
        let hm = p.hbar_over_mass();
        let mut kinetic = Vec::with_capacity(nx * ny);
        for jy in 0..ny {
            let ky = if ny > 1 { freq(jy, ny, ly) } else { 0.0 };
            for jx in 0..nx {
                let kx = freq(jx, nx, lx);
                let phase = -0.5 * hm * (kx * kx + ky * ky) * spec.dt;
                kinetic.push(Complex64::from_polar(scale, phase));
            }
        }
        let tau = 0.5 * spec.dt;
        let i = Complex64::i();
        // −iτ V/ħ, V/ħ = [[0, Ω/2], [Ω/2, −(Δ_L + iγ/2)]]
        let d = Complex64::new(p.laser_detuning, 0.5 * p.gamma);
        let dark_excited = (i * d * tau).exp();
        let off = -i * tau * 0.5 * p.rabi;
        let lit = expm2([[Complex64::new(0.0, 0.0), off], [off, i * tau * d]]);
        // The step is sampled at its midpoint on x = 0, which keeps the
        // splitting second order in the grid spacing.
        let lit_edge = expm2([
            [Complex64::new(0.0, 0.0), 0.5 * off],
            [0.5 * off, i * tau * d],
        ]);
        let laser_phase = (0..ny)
            .map(|j| Complex64::from_polar(1.0, p.laser_wavenumber * spec.y(j)))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            gamma: p.gamma,
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y: planner.plan_fft_forward(ny),
            ifft_y: planner.plan_fft_inverse(ny),
            kinetic,
            dark_excited,
            lit,
            lit_edge,
            laser_phase,
            scratch: vec![Complex64::new(0.0, 0.0); nx * ny],
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn potential_half_step(&self, s: &mut GridState) {
        let ny = self.spec.n_y;
        let edge = self.spec.edge_index();
        let (lit, lit_edge) = (self.lit, self.lit_edge);
        let dark = self.dark_excited;
        let phase = &self.laser_phase;
        s.ground
            .par_chunks_mut(ny)
            .zip(s.excited.par_chunks_mut(ny))
            .enumerate()
            .for_each(|(ix, (g, e))| {
                if ix < edge {
                    e.iter_mut().for_each(|v| *v *= dark);
                } else {
                    let u = if ix == edge { lit_edge } else { lit };
                    for j in 0..ny {
                        let (a, b) = (g[j], e[j]);
                        let ph = phase[j];
                        // P U P† with P = diag(1, e^{i k_L y})
                        g[j] = u[0][0] * a + u[0][1] * ph.conj() * b;
                        e[j] = u[1][0] * ph * a + u[1][1] * b;
                    }
                }
            });
    }

    fn kinetic_step(&mut self, field: &mut [Complex64]) {
        let (nx, ny) = (self.spec.n_x, self.spec.n_y);
        let buf = &mut self.scratch;
        if ny > 1 {
            field.par_chunks_mut(ny).for_each(|r| self.fft_y.process(r));
        }
        transpose(field, buf, nx, ny);
        let kin = &self.kinetic;
        buf.par_chunks_mut(nx)
            .zip(kin.par_chunks(nx))
            .for_each(|(r, k)| {
                self.fft_x.process(r);
                r.iter_mut().zip(k).for_each(|(v, f)| *v *= f);
                self.ifft_x.process(r);
            });
        transpose(buf, field, ny, nx);
        if ny > 1 {
            field
                .par_chunks_mut(ny)
                .for_each(|r| self.ifft_y.process(r));
        }
    }

    /// Advances `state` by one time step.
    pub fn step(&mut self, state: &mut GridState) {
        self.potential_half_step(state);
        let mut g = std::mem::take(&mut state.ground);
        let mut e = std::mem::take(&mut state.excited);
        self.kinetic_step(&mut g);
        self.kinetic_step(&mut e);
        state.ground = g;
        state.excited = e;
        self.potential_half_step(state);
        state.time += self.spec.dt;
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, v) in out.iter_mut().enumerate() {
            *v = src[r * cols + c];
        }
    });
}

/// Advances a copy of `state` by one step. Building the propagator is the
/// expensive part; loops should use [`Propagator`] directly.
pub fn step(state: &GridState, p: &PhysParams, spec: &GridSpec) -> Result<GridState> {
    let mut prop = Propagator::new(p, spec)?;
    let mut next = state.clone();
    prop.step(&mut next);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSample {
    pub time: f64,
    pub norm_sqr: f64,
    pub excited_population: f64,
}

impl NormSample {
    pub fn of(state: &GridState, spec: &GridSpec) -> Self {
        Self {
            time: state.time,
            norm_sqr: state.norm_sqr(spec),
            excited_population: state.excited_population(spec),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    /// One sample per step, starting with the initial state.
    pub trace: Vec<NormSample>,
    pub final_state: GridState,
    pub max_boundary_ratio: f64,
}

/// Steps `initial` through `spec.n_steps`, recording the norm every step
/// and the boundary density every `monitor_every` steps.
pub fn run(
    p: &PhysParams,
    spec: &GridSpec,
    initial: GridState,
    monitor_every: usize,
) -> Result<OracleRun> {
    let mut prop = Propagator::new(p, spec)?;
    let mut state = initial;
    let mut trace = Vec::with_capacity(spec.n_steps + 1);
    trace.push(NormSample::of(&state, spec));
    let mut max_boundary_ratio = state.boundary_density_ratio(spec);
    let monitor_every = monitor_every.max(1);
    for n in 1..=spec.n_steps {
        prop.step(&mut state);
        let sample = NormSample::of(&state, spec);
        let prev = trace[trace.len() - 1].norm_sqr;
        let growth = sample.norm_sqr - prev;
        if growth > 1e-12 * prev.max(f64::MIN_POSITIVE) {
            return Err(Error::Instability { step: n, growth });
        }
        trace.push(sample);
        if n % monitor_every == 0 {
            max_boundary_ratio = max_boundary_ratio.max(state.boundary_density_ratio(spec));
        }
    }
    Ok(OracleRun {
        trace,
        final_state: state,
        max_boundary_ratio,
    })
}

/// Π(tᵢ) = −(‖Ψ(tᵢ₊₁)‖² − ‖Ψ(tᵢ₋₁)‖²)/(tᵢ₊₁ − tᵢ₋₁) at interior samples.
pub fn pi_from_norm(trace: &[NormSample]) -> ToaSeries {
    let (times, values) = trace
        .windows(3)
        .map(|w| {
            (
                w[1].time,
                -(w[2].norm_sqr - w[0].norm_sqr) / (w[2].time - w[0].time),
            )
        })
        .unzip();
    ToaSeries::new(times, values, "oracle_norm")
}

/// Π(tᵢ) = γ ∫|Ψ⁽²⁾|² at the same interior samples as [`pi_from_norm`].
pub fn pi_from_population(trace: &[NormSample], gamma: f64) -> ToaSeries {
    let interior = trace.len().saturating_sub(1).max(1);
    let (times, values) = trace[1..interior]
        .iter()
        .map(|s| (s.time, gamma * s.excited_population))
        .unzip();
    ToaSeries::new(times, values, "oracle_population")
}

/// Norm samples of a sequence of stored states.
pub fn norm_trace(states: &[GridState], spec: &GridSpec) -> Vec<NormSample> {
    states.iter().map(|s| NormSample::of(s, spec)).collect()
}
