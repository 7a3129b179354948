//! Square-root branch selection shared by the 1D and 2D solvers.
//!
//! Two roots are needed. The dressed-state frequencies use the principal
//! root (non-negative real part), which keeps λ₊ → 0 as Ω → 0 for every
//! detuning. Every wavenumber uses the decaying root (positive imaginary
//! part, ties broken towards a positive real part so that undamped waves
//! are outgoing).

use num_complex::Complex64;

/// Principal square root with signed zeros normalized, so that a radicand
/// on the negative real axis always maps to the upper half-plane.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    z.sqrt()
}

/// Root with `Im > 0`; when `Im == 0` the root with `Re >= 0`.
pub fn decaying_sqrt(z: Complex64) -> Complex64 {
    let r = principal_sqrt(z);
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// Frequencies λ± of the dressed two-level system inside the laser, roots
/// of λ² + (Δ + iγ/2)λ − Ω²/4 = 0.
///
/// λ₋ is taken from the non-cancelling branch and λ₊ from the product
/// λ₊λ₋ = −Ω²/4, so λ₊ is exactly zero at Ω = 0.
pub fn dressed_frequencies(rabi: f64, gamma: f64, detuning: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    // γ − 2iΔ
    let a = Complex64::new(gamma, -2.0 * detuning);
    if rabi == 0.0 {
        return (Complex64::new(0.0, 0.0), -i * a * 0.5);
    }
    let s = principal_sqrt(a * a - 4.0 * rabi * rabi);
    let minus = -i * (a + s) * 0.25;
    let plus = -(rabi * rabi) / (4.0 * minus);
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn decaying_root_of_negative_real() {
        let r = decaying_sqrt(Complex64::new(-4.0, -0.0));
        assert_eq!(r, Complex64::new(0.0, 2.0));
    }

    #[test]
    fn decaying_root_tie_is_outgoing() {
        let r = decaying_sqrt(Complex64::new(9.0, 0.0));
        assert_eq!(r, Complex64::new(3.0, 0.0));
    }

    #[test]
    fn undamped_resonant_frequencies() {
        let (p, m) = dressed_frequencies(2.0, 0.0, 0.0);
        assert_relative_eq!(p.re, -1.0, max_relative = 1e-15);
        assert_relative_eq!(m.re, 1.0, max_relative = 1e-15);
        assert_eq!(p.im, 0.0);
        assert_eq!(m.im, 0.0);
    }

    #[test]
    fn zero_rabi_gives_zero_plus_branch() {
        for d in [-3.0, 0.0, 5.0] {
            let (p, m) = dressed_frequencies(0.0, 1.5, d);
            assert_eq!(p, Complex64::new(0.0, 0.0));
            assert_relative_eq!(m.re, -d, max_relative = 1e-15);
            assert_relative_eq!(m.im, -0.75, max_relative = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn roots_solve_quadratic(rabi in 0.0f64..10.0, gamma in 0.0f64..10.0, det in -10.0f64..10.0) {
            let (p, m) = dressed_frequencies(rabi, gamma, det);
            let b = Complex64::new(det, gamma / 2.0);
            for l in [p, m] {
                let res = l * l + b * l - rabi * rabi / 4.0;
                prop_assert!(res.norm() <= 1e-12 * (1.0 + b.norm_sqr() + rabi * rabi));
            }
        }

        #[test]
        fn small_rabi_plus_branch_vanishes(gamma in 0.1f64..10.0, det in -10.0f64..10.0) {
            let (p, _) = dressed_frequencies(1e-6, gamma, det);
            prop_assert!(p.norm() < 1e-10);
        }

        #[test]
        fn decaying_root_squares_back(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let z = Complex64::new(re, im);
            let r = decaying_sqrt(z);
            prop_assert!(r.im >= 0.0);
            prop_assert!((r * r - z).norm() <= 1e-12 * (1.0 + z.norm()));
        }
    }
}
