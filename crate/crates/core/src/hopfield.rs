//! Closed-form polariton spectra of a single Lorentz resonance coupled to
//! light, and the single-mode Hopfield ground-state shift.
//!
//! Both branches solve (ω² − ω_m²)(ω² − ω₀²) = 4g²ω² for a photon mode
//! frequency ω_m. With A = (ω_m² + ω₀² + 4g²)/2 and B = ω₀²ω_m²,
//! ω₊² = A + √(A² − B) and ω₋² = B/ω₊², where A² − B is expanded as a sum
//! of non-negative terms so neither root loses digits as g → 0.

use crate::constants::{cavity_fundamental, C, HBAR};
use crate::error::{CavityError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    pub omega0: f64,
    pub g: f64,
    /// Fundamental cavity frequency πc/L.
    pub omega_l: f64,
}

impl CouplingSpec {
    pub fn new(omega0: f64, g: f64, omega_l: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(CavityError::Config(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(CavityError::Config(format!(
                "g must be non-negative, got {g}"
            )));
        }
        if !(omega_l > 0.0 && omega_l.is_finite()) {
            return Err(CavityError::Config(format!(
                "cavity frequency must be positive, got {omega_l}"
            )));
        }
        Ok(Self { omega0, g, omega_l })
    }

    pub fn for_length(omega0: f64, g: f64, length: f64) -> Result<Self> {
        Self::new(omega0, g, cavity_fundamental(length))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonPair {
    pub omega_plus: f64,
    pub omega_minus: f64,
}

/// Upper and lower polariton for a photon mode at `omega_mode`.
pub fn polaritons_for_mode(omega0: f64, g: f64, omega_mode: f64) -> PolaritonPair {
    let (w0s, wms) = (omega0 * omega0, omega_mode * omega_mode);
    let g2 = g * g;
    let a = 0.5 * (wms + w0s) + 2.0 * g2;
    let half_split = 0.5 * (wms - w0s);
    let disc = half_split * half_split + 2.0 * g2 * (wms + w0s) + 4.0 * g2 * g2;
    let plus2 = a + disc.sqrt();
    let minus2 = w0s * wms / plus2;
    PolaritonPair {
        omega_plus: plus2.sqrt(),
        omega_minus: minus2.sqrt(),
    }
}

/// Bulk polaritons at wave number `k`, photon frequency ck.
pub fn bulk_polaritons(k: f64, omega0: f64, g: f64) -> Result<PolaritonPair> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(CavityError::Domain(format!(
            "wave number must be positive, got {k}"
        )));
    }
    Ok(polaritons_for_mode(omega0, g, C * k))
}

/// Cavity mode frequency ω_{q,n} = c√(q² + (πn/L)²).
pub fn cavity_mode(q: f64, n: u32, length: f64) -> f64 {
    let kn = std::f64::consts::PI * n as f64 / length;
    C * q.hypot(kn)
}

/// Polariton pair of cavity band `n` ≥ 1 at in-plane wave number `q`.
pub fn cavity_polaritons(
    q: f64,
    n: u32,
    length: f64,
    omega0: f64,
    g: f64,
) -> Result<PolaritonPair> {
    if n == 0 {
        return Err(CavityError::Domain("cavity band index starts at 1".into()));
    }
    if !(q >= 0.0 && q.is_finite()) {
        return Err(CavityError::Domain(format!(
            "in-plane wave number must be non-negative, got {q}"
        )));
    }
    if !(length > 0.0) {
        return Err(CavityError::Domain(format!(
            "cavity length must be positive, got {length}"
        )));
    }
    Ok(polaritons_for_mode(omega0, g, cavity_mode(q, n, length)))
}

/// Squared wave number k² = ω²ε(ω)/c² of a bulk mode at real frequency ω
/// (lossless Lorentz). Negative inside the polariton gap.
pub fn bulk_k_squared(omega: f64, omega0: f64, g: f64) -> f64 {
    let eps = 1.0 + 4.0 * g * g / (omega0 * omega0 - omega * omega);
    omega * omega * eps / (C * C)
}

/// Sum ω₊ + ω₋ − ω₀ − ω_L = 4g²/(S + ω₀ + ω_L), S = √((ω₀ + ω_L)² + 4g²).
fn zero_point_excess(spec: &CouplingSpec) -> f64 {
    let w = spec.omega0 + spec.omega_l;
    let g2 = spec.g * spec.g;
    let s = (w * w + 4.0 * g2).sqrt();
    4.0 * g2 / (s + w)
}

/// ΔU₁ = ħ(ω₁⁺ + ω₁⁻ − ω₀ − ω_L)/2 in joules.
pub fn single_mode_shift(spec: &CouplingSpec) -> f64 {
    0.5 * HBAR * zero_point_excess(spec)
}

/// ΔU₁/U₁(0) with U₁(0) = ħ(ω₀ + ω_L)/2.
pub fn single_mode_relative(spec: &CouplingSpec) -> f64 {
    zero_point_excess(spec) / (spec.omega0 + spec.omega_l)
}

/// Leading small-g term 2g²/(ω₀ + ω_L)².
pub fn single_mode_relative_leading(spec: &CouplingSpec) -> f64 {
    let w = spec.omega0 + spec.omega_l;
    2.0 * spec.g * spec.g / (w * w)
}

/// Δ_pol = √(ω₀² + 4g²) − ω₀, written without cancellation.
pub fn polariton_gap(omega0: f64, g: f64) -> f64 {
    let g2 = 4.0 * g * g;
    g2 / ((omega0 * omega0 + g2).sqrt() + omega0)
}
