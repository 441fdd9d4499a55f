//! Cavity-modified ground-state energy of Lorentz media.
//!
//! The crate evaluates the Casimir-Lifshitz energy of a Fabry-Perot cavity
//! filled with a Lorentz medium, at zero temperature (imaginary-frequency
//! integral) and at finite temperature (Matsubara sum), and the closed-form
//! models it is compared with: single-mode Hopfield polaritons and the
//! static screening approximation.
//!
//! All quantities are SI: rad/s, m, J, K.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dielectric;
pub mod error;
pub mod fresnel;
pub mod hopfield;
pub mod lifshitz;
pub mod quadrature;
pub mod ssa;

pub use dielectric::{
    eps_imag, eps_real, ConstantDielectric, DielectricModel, DrudeMetal, LorentzMedium,
};
pub use error::{CavityError, Result};
pub use fresnel::{
    kz_imag, r_interface, r_stack, r_stack_complex, transmission, Layer, MirrorStack, Multilayer,
    Polarization, Thickness,
};
pub use hopfield::{
    bulk_polaritons, cavity_polaritons, polariton_gap, single_mode_relative, single_mode_shift,
    CouplingSpec, PolaritonPair,
};
pub use lifshitz::{
    casimir_energy_t0, delta_u, energy, free_energy_t, integrand_omega, integrand_xi,
    low_frequency_weight, per_molecule, CavityConfig, EnergyResult, EnergyShift, QuadratureSpec,
};
pub use num_complex::Complex64;
pub use ssa::{ssa_energy, ssa_integral_constants, ssa_relative_shift, SsaConstants, SsaInput};
