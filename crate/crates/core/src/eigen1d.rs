//! Stationary scattering states of the 1D model: a ground-state plane wave
//! incident from the left on a resonant laser filling `x >= 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching;
use crate::physparams::PhysParams;
use crate::TwoComponent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSolution1D {
    pub k: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub k_plus: Complex64,
    pub k_minus: Complex64,
    pub q: Complex64,
    pub r1: Complex64,
    pub r2: Complex64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub excited_plus: Complex64,
    pub excited_minus: Complex64,
}

pub fn solve_1d(p: &PhysParams, k: f64) -> Result<EigenSolution1D> {
    if !k.is_finite() {
        return Err(Error::NonFinite("k"));
    }
    if k <= 0.0 {
        return Err(Error::NonPositiveWavenumber(k));
    }
    p.validate()?;
    let b = matching::branches(p.hbar_over_mass(), p.rabi, p.gamma, p.laser_detuning, k);
    let c =
        matching::coefficients(k, &b, p.rabi).map_err(|relative| Error::DegenerateDenominator {
            kx: k,
            ky: 0.0,
            relative,
        })?;
    Ok(EigenSolution1D {
        k,
        lambda_plus: b.lambda_plus,
        lambda_minus: b.lambda_minus,
        k_plus: b.k_plus,
        k_minus: b.k_minus,
        q: b.q,
        r1: c.r1,
        r2: c.r2,
        c_plus: c.c_plus,
        c_minus: c.c_minus,
        excited_plus: c.excited_plus,
        excited_minus: c.excited_minus,
    })
}

/// Delta-normalized eigenfunction at `x`, `[ground, excited]`.
pub fn eigenstate_1d_at(sol: &EigenSolution1D, x: f64) -> TwoComponent {
    let norm = 1.0 / (2.0 * PI).sqrt();
    let i = Complex64::i();
    if x < 0.0 {
        let ground = (i * sol.k * x).exp() + sol.r1 * (-i * sol.k * x).exp();
        let excited = sol.r2 * (-i * sol.q * x).exp();
        [norm * ground, norm * excited]
    } else {
        let ep = (i * sol.k_plus * x).exp();
        let em = (i * sol.k_minus * x).exp();
        [
            norm * (sol.c_plus * ep + sol.c_minus * em),
            norm * (sol.excited_plus * ep + sol.excited_minus * em),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physparams::HBAR;
    use approx::assert_relative_eq;

    fn cs_fig2() -> PhysParams {
        PhysParams::cesium()
    }

    fn k_of_velocity(p: &PhysParams, v: f64) -> f64 {
        p.mass * v / HBAR
    }

    /// Residuals of the value/derivative matching conditions, relative to
    /// the magnitude of the terms involved.
    fn matching_residuals(s: &EigenSolution1D, rabi: f64) -> [f64; 4] {
        let one = Complex64::new(1.0, 0.0);
        let a_p = 2.0 * s.lambda_plus / rabi;
        let a_m = 2.0 * s.lambda_minus / rabi;
        let rel = |lhs: Complex64, rhs: Complex64, scale: f64| (lhs - rhs).norm() / scale;
        [
            rel(
                one + s.r1,
                s.c_plus + s.c_minus,
                1.0 + s.r1.norm() + s.c_plus.norm() + s.c_minus.norm(),
            ),
            rel(
                s.r2,
                a_p * s.c_plus + a_m * s.c_minus,
                s.r2.norm() + (a_p * s.c_plus).norm() + (a_m * s.c_minus).norm(),
            ),
            rel(
                s.k * (one - s.r1),
                s.k_plus * s.c_plus + s.k_minus * s.c_minus,
                s.k * (1.0 + s.r1.norm())
                    + (s.k_plus * s.c_plus).norm()
                    + (s.k_minus * s.c_minus).norm(),
            ),
            rel(
                -s.q * s.r2,
                s.k_plus * a_p * s.c_plus + s.k_minus * a_m * s.c_minus,
                (s.q * s.r2).norm()
                    + (s.k_plus * a_p * s.c_plus).norm()
                    + (s.k_minus * a_m * s.c_minus).norm(),
            ),
        ]
    }

    #[test]
    fn transparent_without_laser() {
        for (g, d, k) in [(3.3e8, 0.0, 1e8), (0.0, 5e7, 3e7), (1e7, -2e8, 2e9)] {
            let p = PhysParams::new(cs_fig2().mass, 0.0, g, d, 0.0).unwrap();
            let s = solve_1d(&p, k).unwrap();
            assert_eq!(s.r1, Complex64::new(0.0, 0.0));
            assert_eq!(s.r2, Complex64::new(0.0, 0.0));
            assert_eq!(s.c_plus, Complex64::new(1.0, 0.0));
            assert_eq!(s.c_minus, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn undamped_resonant_branches() {
        let base = cs_fig2();
        let p = PhysParams::new(base.mass, 1e8, 0.0, 0.0, 0.0).unwrap();
        let mo = p.rabi / p.hbar_over_mass();
        // k² > mΩ/ħ: both branches propagate.
        let fast = solve_1d(&p, 2.0 * mo.sqrt()).unwrap();
        assert_relative_eq!(fast.lambda_plus.re, -0.5 * p.rabi, max_relative = 1e-14);
        assert_relative_eq!(fast.lambda_minus.re, 0.5 * p.rabi, max_relative = 1e-14);
        assert_eq!(fast.k_minus.im, 0.0);
        assert!(fast.k_minus.re > 0.0);
        // k² < mΩ/ħ: the upper dressed state is closed.
        let slow = solve_1d(&p, 0.5 * mo.sqrt()).unwrap();
        assert!(slow.k_minus.re.abs() < 1e-9 * slow.k_minus.im);
        assert!(slow.k_minus.im > 0.0);
    }

    #[test]
    fn cesium_matching_residuals() {
        let p = cs_fig2();
        let s = solve_1d(&p, k_of_velocity(&p, 0.09)).unwrap();
        for r in matching_residuals(&s, p.rabi) {
            assert!(r < 1e-12, "residual {r:e}");
        }
        assert!(s.k_plus.im > 0.0 && s.k_minus.im > 0.0 && s.q.im > 0.0);
        assert!(s.r1.norm_sqr() < 1.0);
    }

    #[test]
    fn eigenstate_continuous_at_edge() {
        let p = cs_fig2();
        let s = solve_1d(&p, k_of_velocity(&p, 0.09)).unwrap();
        let left = eigenstate_1d_at(&s, -1e-300);
        let right = eigenstate_1d_at(&s, 0.0);
        for c in 0..2 {
            assert!((left[c] - right[c]).norm() < 1e-14);
        }
    }

    #[test]
    fn excited_component_decays_inside_laser() {
        let p = cs_fig2();
        let s = solve_1d(&p, k_of_velocity(&p, 0.09)).unwrap();
        let x = 5.0 / s.k_minus.im;
        let norm = 1.0 / (2.0 * PI).sqrt();
        let bound = norm
            * (s.excited_plus.norm() * (-s.k_plus.im * x).exp()
                + s.excited_minus.norm() * (-5.0f64).exp());
        assert!(eigenstate_1d_at(&s, x)[1].norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn far_left_excited_component_vanishes() {
        let p = cs_fig2();
        let s = solve_1d(&p, k_of_velocity(&p, 0.09)).unwrap();
        let x = -60.0 / s.q.im;
        assert!(eigenstate_1d_at(&s, x)[1].norm() < 1e-20);
    }

    #[test]
    fn rejects_bad_wavenumber() {
        let p = cs_fig2();
        assert!(matches!(
            solve_1d(&p, 0.0),
            Err(Error::NonPositiveWavenumber(_))
        ));
        assert!(matches!(
            solve_1d(&p, -1.0),
            Err(Error::NonPositiveWavenumber(_))
        ));
        assert!(matches!(solve_1d(&p, f64::NAN), Err(Error::NonFinite(_))));
    }

    #[test]
    fn reflection_continuous_across_zero_detuning() {
        // Ω slightly above γ/2 puts the dressed-frequency radicand on the
        // branch cut at Δ = 0; the labels swap but R1, R2 must not jump.
        let base = cs_fig2();
        let k = k_of_velocity(&base, 0.09);
        let n = 2001;
        let span = 1e6;
        let mut prev: Option<(Complex64, Complex64)> = None;
        let mut max_jump: f64 = 0.0;
        for i in 0..n {
            let d = -span + 2.0 * span * i as f64 / (n - 1) as f64;
            let s = solve_1d(&base.with_laser_detuning(d), k).unwrap();
            if let Some((r1, r2)) = prev {
                max_jump = max_jump.max((s.r1 - r1).norm()).max((s.r2 - r2).norm());
            }
            prev = Some((s.r1, s.r2));
        }
        assert!(max_jump < 1e-4, "jump {max_jump:e}");
    }
}
