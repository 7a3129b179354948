//! Quantum-optical arrival times in two dimensions.
//!
//! A two-level atom in its ground state moves towards the half-plane
//! `x >= 0`, which is illuminated by a travelling-wave laser along `y`. The
//! arrival time is the time of the first spontaneously emitted photon. This
//! crate computes the stationary scattering states of the non-Hermitian
//! conditional Hamiltonian, the first-photon distribution Π(t) of Gaussian
//! wave packets, an independent grid propagation used to check it, and the
//! deconvolution that relates Π(t) to the quantum flux.

pub mod branch;
pub mod eigen1d;
pub mod eigen2d;
pub mod error;
pub mod fluxdeconv;
mod matching;
pub mod oracle;
pub mod packet;
pub mod physparams;
pub mod presets;
pub mod quadrature;
pub mod series;
pub mod toa;

use num_complex::Complex64;

/// `[ground, excited]` amplitudes.
pub type TwoComponent = [Complex64; 2];

pub use eigen1d::{eigenstate_1d_at, solve_1d, EigenSolution1D};
pub use eigen2d::{eigenstate_2d_at, solve_2d, EigenSolution2D};
pub use error::{Error, Result};
pub use matching::DENOMINATOR_GUARD;
pub use packet::{GaussianPacket1D, GaussianPacket2D};
pub use physparams::{effective_detuning, kinetic_detuning, KineticDetuning, PhysParams, HBAR};
pub use series::ToaSeries;
pub use toa::{pi_1d, pi_2d, QuadratureSpec};
