use num_complex::Complex64;
use toa_core::presets::{self, cesium_packet, cesium_times, CESIUM_WIDE_DY};
use toa_core::quadrature::GaussLegendre;
use toa_core::toa::{emission_total, uniform_times};
use toa_core::{
    pi_1d, pi_2d, solve_1d, GaussianPacket1D, GaussianPacket2D, PhysParams, QuadratureSpec,
};

#[test]
fn inverse_transform_is_normalized() {
    // ψ(x) = (2π)^{-1/2} ∫ ψ̃(k) e^{ikx} dk on a position grid, then ∫|ψ|² dx.
    let g = GaussianPacket1D::new(-1.5, 0.7, 4.0).unwrap();
    let k_rule = GaussLegendre::new(120, g.k0 - 12.0 * g.sigma_k(), g.k0 + 12.0 * g.sigma_k());
    let x_rule = GaussLegendre::new(200, g.x0 - 12.0 * g.dx, g.x0 + 12.0 * g.dx);
    let norm = x_rule.integrate(|x| {
        let psi: Complex64 = k_rule
            .nodes
            .iter()
            .zip(&k_rule.weights)
            .map(|(&k, &w)| w * g.momentum_amplitude(k) * Complex64::new(0.0, k * x).exp())
            .sum();
        psi.norm_sqr() / (2.0 * std::f64::consts::PI)
    });
    assert!((norm - 1.0).abs() < 1e-8, "{norm}");
}

#[test]
fn free_packet_centre_moves_at_the_group_velocity() {
    let g = GaussianPacket1D::new(-1.32e-6, 0.24e-6, 1.88e8).unwrap();
    let hm = PhysParams::cesium().hbar_over_mass();
    let t = 2e-6;
    // Width at t is about 2 µm; integrate over ±15 widths.
    let rule = GaussLegendre::new(1200, -30e-6, 30e-6);
    let norm = rule.integrate(|x| g.free_amplitude(x, t, hm).norm_sqr());
    let mean = rule.integrate(|x| x * g.free_amplitude(x, t, hm).norm_sqr());
    assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    let expected = g.x0 + hm * g.k0 * t;
    assert!(
        (mean - expected).abs() < 1e-9 * expected.abs(),
        "{mean} vs {expected}"
    );
}

#[test]
fn caesium_series_is_real_nonnegative_and_bounded() {
    let p = PhysParams::cesium();
    let g = cesium_packet(&p, CESIUM_WIDE_DY);
    let s = pi_2d(&p, &g, &QuadratureSpec::with_default_nodes(cesium_times())).unwrap();
    let d = &s.metadata.diagnostics;
    assert!(d["max_imag_over_peak"] < 1e-8);
    assert!(d["min_over_peak"] >= -1e-6);
    assert!(s.cumulative.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(*s.cumulative.last().unwrap() <= 1.0 + 1e-6);
}

#[test]
fn doubling_the_nodes_leaves_the_caesium_series_unchanged() {
    let p = PhysParams::cesium();
    for dy in [CESIUM_WIDE_DY, presets::NARROW_DY_LADDER[3]] {
        let g = cesium_packet(&p, dy);
        let base = QuadratureSpec::with_default_nodes(uniform_times(0.0, 60e-6, 601));
        let fine = QuadratureSpec::new(2 * base.n_kx, 2 * base.n_ky, base.times.clone());
        let a = pi_2d(&p, &g, &base).unwrap();
        let b = pi_2d(&p, &g, &fine).unwrap();
        let l1 = a.relative_l1(&b).unwrap();
        assert!(l1 < 5e-3, "dy = {dy:e}: {l1:e}");
    }
}

#[test]
fn wide_packet_without_photon_momentum_matches_the_line_model() {
    let p = PhysParams::cesium().with_laser_wavenumber(0.0);
    let g =
        GaussianPacket2D::new(-1.32e-6, 0.0, 0.24e-6, 24e-6, p.wavenumber_of(0.09), 0.0).unwrap();
    let q = QuadratureSpec::with_default_nodes(cesium_times());
    let s2 = pi_2d(&p, &g, &q).unwrap();
    let s1 = pi_1d(&p, &g.x_marginal(), &q).unwrap();
    let l1 = s2.relative_l1(&s1).unwrap();
    assert!(l1 < 1e-3, "{l1:e}");
}

#[test]
fn missing_emission_is_the_reflected_ground_probability() {
    // The excited reflected wave is evanescent, so the only probability
    // that never produces a photon is the reflected ground-state part.
    let p = PhysParams::cesium();
    let g = cesium_packet(&p, CESIUM_WIDE_DY).x_marginal();
    let s = pi_1d(
        &p,
        &g,
        &QuadratureSpec::with_default_nodes(uniform_times(0.0, 80e-6, 1601)),
    )
    .unwrap();
    let total = emission_total(&s);
    let rule = GaussLegendre::new(200, g.k0 - 8.0 * g.sigma_k(), g.k0 + 8.0 * g.sigma_k());
    let reflected = rule
        .integrate(|k| g.momentum_amplitude(k).norm_sqr() * solve_1d(&p, k).unwrap().r1.norm_sqr());
    assert!(reflected > 0.1, "{reflected}");
    assert!(
        (total.total + reflected - 1.0).abs() < 1e-4,
        "{} + {reflected}",
        total.total
    );
}
