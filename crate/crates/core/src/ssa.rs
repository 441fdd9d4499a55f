//! Static screening approximation for perfect-conductor cavities.
//!
//! Freezing ε(iξ) at its ξ = 0 value turns the zero-temperature Lifshitz
//! integral into the empty-cavity result divided by √ε(0).

use std::f64::consts::PI;

use crate::constants::{pec_casimir_energy, C, HBAR};
use crate::error::{CavityError, Result};
use crate::quadrature::{integrate, integrate_semi_infinite, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsaInput {
    pub length: f64,
    pub omega0: f64,
    pub g: f64,
    pub eps_inf: f64,
}

impl SsaInput {
    pub fn new(length: f64, omega0: f64, g: f64) -> Self {
        Self {
            length,
            omega0,
            g,
            eps_inf: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.omega0 > 0.0 && self.g >= 0.0 && self.eps_inf >= 1.0) {
            return Err(CavityError::Domain(format!(
                "invalid screening input {self:?}"
            )));
        }
        Ok(())
    }

    pub fn static_eps(&self) -> f64 {
        self.eps_inf + 4.0 * self.g * self.g / (self.omega0 * self.omega0)
    }
}

/// −ħcπ²/(720L³)/√ε(0), J/m².
pub fn ssa_energy(input: &SsaInput) -> Result<f64> {
    input.validate()?;
    Ok(pec_casimir_energy(input.length) / input.static_eps().sqrt())
}

/// 1 − √(ε∞/ε(0)); with ε∞ = 1 this is 1 − 1/√(1 + 4g²/ω₀²).
pub fn ssa_relative_shift(omega0: f64, g: f64, eps_inf: f64) -> f64 {
    let x = 4.0 * g * g / (omega0 * omega0 * eps_inf);
    // 1 − 1/√(1+x) = x / (√(1+x)(1 + √(1+x)))
    let s = (1.0 + x).sqrt();
    x / (s * (1.0 + s))
}

/// Screening factor 1/√ε applied to an unscreened energy.
pub fn screened(energy: f64, static_eps: f64) -> f64 {
    energy / static_eps.sqrt()
}

/// Numerical check of the constants behind the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsaConstants {
    /// ∫₀^∞ x² ln(1 − e^{−x}) dx, expected −π⁴/45.
    pub x_integral: f64,
    pub x_deviation: f64,
    /// ∫₁^∞ p⁻³ dp, expected 1/2.
    pub p_inverse_cube: f64,
    pub p_cube_deviation: f64,
    /// ∫₁^∞ p⁻² dp, expected 1; the moment left after both substitutions.
    pub p_inverse_square: f64,
    /// U·L³/(ħc) assembled from the integrals: (1/2π²)(1/8)·∫p⁻²·∫x²ln(1−e⁻ˣ).
    pub prefactor: f64,
    pub prefactor_deviation: f64,
}

pub fn ssa_integral_constants() -> Result<SsaConstants> {
    let opts = QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_subdivisions: 5000,
    };
    // Split at x = 1 so the logarithmic endpoint and the exponential tail get
    // their own panels.
    let f = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            x * x * (-(-x).exp_m1()).ln()
        }
    };
    let head = integrate(f, 0.0, 1.0, &[], &opts)?;
    let tail = integrate_semi_infinite(f, 1.0, 5.0, &opts)?;
    let x_integral = head.value + tail.value;
    let x_exact = -PI.powi(4) / 45.0;

    let p3 = integrate_semi_infinite(|p| p.powi(-3), 1.0, 1.0, &opts)?.value;
    let p2 = integrate_semi_infinite(|p| p.powi(-2), 1.0, 1.0, &opts)?.value;

    let prefactor = x_integral * p2 / (16.0 * PI * PI);
    let prefactor_exact = -PI * PI / 720.0;
    Ok(SsaConstants {
        x_integral,
        x_deviation: x_integral - x_exact,
        p_inverse_cube: p3,
        p_cube_deviation: p3 - 0.5,
        p_inverse_square: p2,
        prefactor,
        prefactor_deviation: prefactor - prefactor_exact,
    })
}

/// Closed form energy from the assembled prefactor, for cross-checks.
pub fn energy_from_prefactor(prefactor: f64, length: f64, static_eps: f64) -> f64 {
    prefactor * HBAR * C / (length.powi(3) * static_eps.sqrt())
}
