use std::f64::consts::PI;

use toa_core::fluxdeconv::w_at_rest;
use toa_core::oracle::{pi_from_norm, pi_from_population, run, GridSpec, GridState, NormSample};
use toa_core::presets::{desk_params, DESK_MASS};
use toa_core::toa::{emission_total, uniform_times};
use toa_core::{pi_1d, GaussianPacket1D, PhysParams, QuadratureSpec};

fn line_grid(x_min: f64, x_max: f64, n_x: usize, dt: f64, t_end: f64) -> GridSpec {
    GridSpec {
        x_min,
        x_max,
        y_min: -0.5e-6,
        y_max: 0.5e-6,
        n_x,
        n_y: 1,
        dt,
        n_steps: (t_end / dt).round() as usize,
    }
}

fn desk_line_packet() -> GaussianPacket1D {
    GaussianPacket1D::new(-6e-6, 1e-6, 1e7).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A wide packet at rest deep inside the laser has no kinetic dynamics on
/// the time scale of the decay, so its emission must follow the at-rest
/// two-level solution.
fn at_rest_emission(p: &PhysParams, n_y: usize, y_len: f64) -> (Vec<f64>, Vec<f64>) {
    let spec = GridSpec {
        x_min: -64e-6,
        x_max: 192e-6,
        y_min: -0.5 * y_len,
        y_max: 0.5 * y_len,
        n_x: 256,
        n_y,
        dt: 1e-3,
        n_steps: 1000,
    };
    let g = GaussianPacket1D::new(64e-6, 8e-6, 0.0).unwrap();
    let hm = p.hbar_over_mass();
    let init = GridState::from_profile(|x| g.free_amplitude(x, 0.0, hm), &spec);
    let out = run(p, &spec, init, 100).unwrap();
    let s = pi_from_population(&out.trace, p.gamma);
    (s.times, s.pi_values)
}

#[test]
fn wide_packet_at_rest_emits_like_a_single_atom() {
    let p = desk_params(20.0)
        .with_laser_wavenumber(0.0)
        .with_laser_detuning(5.0);
    let (times, pi) = at_rest_emission(&p, 1, 1e-6);
    let w = w_at_rest(p.rabi, p.gamma, p.laser_detuning, &times);
    let peak = w.values.iter().cloned().fold(0.0, f64::max);
    let dev = max_abs_diff(&pi, &w.values);
    assert!(dev < 1e-3 * peak, "{:e}", dev / peak);
}

#[test]
fn photon_recoil_detunes_the_atom_at_rest() {
    // k_L is a Fourier mode of the periodic y box, so the grid represents the
    // kicked excited state exactly and charges it the recoil energy.
    let y_len = 16e-6;
    let k_l = 4.0 * 2.0 * PI / y_len;
    let p = desk_params(20.0)
        .with_laser_wavenumber(k_l)
        .with_laser_detuning(5.0);
    let (times, pi) = at_rest_emission(&p, 16, y_len);
    let shifted = w_at_rest(p.rabi, p.gamma, p.laser_detuning - p.recoil_shift(), &times);
    let bare = w_at_rest(p.rabi, p.gamma, p.laser_detuning, &times);
    let peak = shifted.values.iter().cloned().fold(0.0, f64::max);
    let dev = max_abs_diff(&pi, &shifted.values);
    let without_recoil = max_abs_diff(&pi, &bare.values);
    assert!(dev < 1e-3 * peak, "{:e}", dev / peak);
    assert!(without_recoil > 10.0 * dev, "{without_recoil:e} vs {dev:e}");
}

fn norm_series(p: &PhysParams, dt: f64, t_end: f64) -> Vec<NormSample> {
    let spec = line_grid(-32e-6, 32e-6, 512, dt, t_end);
    let init = GridState::from_profile(|x| desk_line_packet().free_amplitude(x, 0.0, 1e-12), &spec);
    run(p, &spec, init, 1000).unwrap().trace
}

#[test]
fn splitting_is_second_order_in_time() {
    let p = desk_params(20.0).with_laser_wavenumber(0.0);
    let t_end = 1.0;
    // Norms every 0.01 s.
    let sampled = |dt: f64| -> Vec<f64> {
        let stride = (0.01 / dt).round() as usize;
        norm_series(&p, dt, t_end)
            .iter()
            .step_by(stride)
            .map(|s| s.norm_sqr)
            .collect()
    };
    let reference = sampled(1.25e-4);
    let errors: Vec<f64> = [2e-3, 1e-3, 5e-4]
        .iter()
        .map(|&dt| max_abs_diff(&sampled(dt), &reference))
        .collect();
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((3.0..5.5).contains(&ratio), "{ratio} from {errors:?}");
    }
}

#[test]
fn norm_loss_and_excited_population_agree_at_the_default_step() {
    let p = desk_params(200.0);
    let g = desk_line_packet();
    let dt = GridSpec::default_dt(&p, g.k0 + 6.0 * g.sigma_k());
    let spec = line_grid(-32e-6, 32e-6, 512, dt, 1.2);
    let init = GridState::from_profile(|x| g.free_amplitude(x, 0.0, 1e-12), &spec);
    let out = run(&p, &spec, init, 1000).unwrap();
    let a = pi_from_norm(&out.trace);
    let b = pi_from_population(&out.trace, p.gamma);
    let peak = a.peak().1;
    assert!(max_abs_diff(&a.pi_values, &b.pi_values) < 1e-3 * peak);
}

#[test]
fn uniform_transverse_profile_reduces_to_the_line() {
    let p = desk_params(20.0).with_laser_wavenumber(0.0);
    let g = desk_line_packet();
    let mut plane = line_grid(-32e-6, 32e-6, 256, 1e-3, 1.0);
    plane.y_min = -4e-6;
    plane.y_max = 4e-6;
    plane.n_y = 16;
    let line = line_grid(-32e-6, 32e-6, 256, 1e-3, 1.0);
    let f = |x| g.free_amplitude(x, 0.0, 1e-12);
    let a = run(&p, &plane, GridState::from_profile(f, &plane), 100).unwrap();
    let b = run(&p, &line, GridState::from_profile(f, &line), 100).unwrap();
    let na: Vec<f64> = a.trace.iter().map(|s| s.norm_sqr).collect();
    let nb: Vec<f64> = b.trace.iter().map(|s| s.norm_sqr).collect();
    assert!(max_abs_diff(&na, &nb) < 1e-6);
}

#[test]
fn hermitian_evolution_conserves_the_norm() {
    let p = PhysParams::new(DESK_MASS, 10.0, 0.0, 3.0, 1.77e6).unwrap();
    let g = desk_line_packet();
    let spec = GridSpec {
        x_min: -32e-6,
        x_max: 32e-6,
        y_min: -8e-6,
        y_max: 8e-6,
        n_x: 256,
        n_y: 32,
        dt: 1e-3,
        n_steps: 1200,
    };
    let packet = toa_core::GaussianPacket2D::new(g.x0, 0.0, g.dx, 1e-6, g.k0, 0.0).unwrap();
    let init = GridState::from_packet(&packet, &spec, 1e-12);
    let n0 = init.norm_sqr(&spec);
    let out = run(&p, &spec, init, 100).unwrap();
    let drift = out
        .trace
        .iter()
        .map(|s| (s.norm_sqr - n0).abs())
        .fold(0.0, f64::max);
    assert!(drift < 1e-9, "{drift:e}");
    let pi = pi_from_norm(&out.trace);
    assert!(pi.pi_values.iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn emitted_plus_surviving_probability_is_one() {
    let p = desk_params(200.0);
    let g = desk_line_packet();
    let spec = line_grid(-32e-6, 32e-6, 512, 2e-4, 1.5);
    let init = GridState::from_profile(|x| g.free_amplitude(x, 0.0, 1e-12), &spec);
    let out = run(&p, &spec, init, 1000).unwrap();
    let survival = out.trace.last().unwrap().norm_sqr;
    let s = pi_1d(
        &p,
        &g,
        &QuadratureSpec::with_default_nodes(uniform_times(0.0, 1.5, 1501)),
    )
    .unwrap();
    let total = emission_total(&s).total;
    assert!(
        (total + survival - 1.0).abs() < 2e-2,
        "{total} + {survival}"
    );
}
