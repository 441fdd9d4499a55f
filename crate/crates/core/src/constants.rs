//! Physical constants (CODATA 2018, exact where SI defines them) and
//! unit conversions used at the crate boundary.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C. Also joules per electronvolt.
pub const EV: f64 = 1.602_176_634e-19;

/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Converts a photon energy in eV to angular frequency in rad/s.
pub fn ev_to_rad_per_s(ev: f64) -> f64 {
    ev * EV / HBAR
}

pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR / EV
}

/// Fundamental mode frequency πc/L of an ideal cavity of length `l` (m).
pub fn cavity_fundamental(l: f64) -> f64 {
    std::f64::consts::PI * C / l
}

/// Spacing 2πk_BT/ħ of bosonic Matsubara frequencies at temperature `t` (K).
pub fn matsubara_spacing(t: f64) -> f64 {
    2.0 * std::f64::consts::PI * K_B * t / HBAR
}

/// Casimir energy per area −ħcπ²/(720L³) of an empty perfect-conductor cavity, J/m².
pub fn pec_casimir_energy(l: f64) -> f64 {
    -HBAR * C * std::f64::consts::PI.powi(2) / (720.0 * l.powi(3))
}
