//! Permittivity models on the imaginary axis and at complex frequency.

use num_complex::Complex64;

use crate::error::{CavityError, Result};

/// Single-resonance Lorentz medium ε(ω) = ε∞ + 4g²/(ω₀² − ω² − iωγ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMedium {
    /// Resonance, rad/s.
    pub omega0: f64,
    /// Damping rate, rad/s.
    pub gamma: f64,
    /// Collective coupling, rad/s.
    pub g: f64,
    /// Background permittivity.
    pub eps_inf: f64,
}

impl LorentzMedium {
    pub fn new(omega0: f64, gamma: f64, g: f64, eps_inf: f64) -> Result<Self> {
        let medium = Self {
            omega0,
            gamma,
            g,
            eps_inf,
        };
        medium.validate()?;
        Ok(medium)
    }

    /// Lossless medium with unit background.
    pub fn lossless(omega0: f64, g: f64) -> Self {
        Self {
            omega0,
            gamma: 0.0,
            g,
            eps_inf: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(CavityError::Config(format!(
                "Lorentz omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(CavityError::Config(format!(
                "Lorentz gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(CavityError::Config(format!(
                "Lorentz coupling g must be non-negative, got {}",
                self.g
            )));
        }
        if !(self.eps_inf >= 1.0 && self.eps_inf.is_finite()) {
            return Err(CavityError::Config(format!(
                "Lorentz eps_inf must be at least 1, got {}",
                self.eps_inf
            )));
        }
        Ok(())
    }

    /// Static permittivity ε∞ + 4g²/ω₀².
    pub fn static_eps(&self) -> f64 {
        self.eps_inf + 4.0 * self.g * self.g / (self.omega0 * self.omega0)
    }

    pub fn with_coupling(self, g: f64) -> Self {
        Self { g, ..self }
    }
}

/// Drude metal ε(ω) = 1 − ω_p²/(ω² + iωγ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeMetal {
    pub omega_p: f64,
    pub gamma: f64,
}

impl DrudeMetal {
    /// Gold with ħω_p = 9.02 eV and ħγ = 0.0265 eV.
    pub fn gold() -> Self {
        Self {
            omega_p: crate::constants::ev_to_rad_per_s(9.02),
            gamma: crate::constants::ev_to_rad_per_s(0.0265),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p > 0.0 && self.omega_p.is_finite()) {
            return Err(CavityError::Config(format!(
                "Drude omega_p must be positive, got {}",
                self.omega_p
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CavityError::Config(format!(
                "Drude gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDielectric {
    pub eps: f64,
}

/// Any material the engine knows how to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DielectricModel {
    Lorentz(LorentzMedium),
    Drude(DrudeMetal),
    Constant(ConstantDielectric),
    /// Perfect electric conductor. Never evaluated as a permittivity; the
    /// reflection code special-cases it.
    PerfectConductor,
}

impl DielectricModel {
    pub fn vacuum() -> Self {
        Self::Constant(ConstantDielectric { eps: 1.0 })
    }

    pub fn constant(eps: f64) -> Self {
        Self::Constant(ConstantDielectric { eps })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Lorentz(m) => m.validate(),
            Self::Drude(m) => m.validate(),
            Self::Constant(c) if !(c.eps >= 1.0 && c.eps.is_finite()) => Err(CavityError::Config(
                format!("constant permittivity must be at least 1, got {}", c.eps),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_pec(&self) -> bool {
        matches!(self, Self::PerfectConductor)
    }

    /// Finite ξ = 0 permittivity, or `None` for conductors whose static
    /// response diverges.
    pub fn static_eps(&self) -> Option<f64> {
        match self {
            Self::Lorentz(m) => Some(m.static_eps()),
            Self::Constant(c) => Some(c.eps),
            Self::Drude(_) | Self::PerfectConductor => None,
        }
    }

    /// Lossless at every real frequency.
    pub fn is_lossless(&self) -> bool {
        match self {
            Self::Lorentz(m) => m.gamma == 0.0 || m.g == 0.0,
            Self::Drude(_) => false,
            Self::Constant(_) | Self::PerfectConductor => true,
        }
    }
}

/// ε(iξ), real and at least 1 for every supported material.
pub fn eps_imag(material: &DielectricModel, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(CavityError::Domain(format!(
            "imaginary frequency must be non-negative, got {xi}"
        )));
    }
    match material {
        DielectricModel::Lorentz(m) => {
            if xi.is_infinite() {
                return Ok(m.eps_inf);
            }
            Ok(m.eps_inf + 4.0 * m.g * m.g / (m.omega0 * m.omega0 + xi * xi + xi * m.gamma))
        }
        DielectricModel::Drude(m) => {
            if xi == 0.0 {
                return Err(CavityError::SpecialCase(
                    "Drude permittivity diverges at xi = 0; use the static reflection limit".into(),
                ));
            }
            if xi.is_infinite() {
                return Ok(1.0);
            }
            Ok(1.0 + m.omega_p * m.omega_p / (xi * (xi + m.gamma)))
        }
        DielectricModel::Constant(c) => Ok(c.eps),
        DielectricModel::PerfectConductor => Err(CavityError::SpecialCase(
            "perfect conductor has no finite permittivity".into(),
        )),
    }
}

/// Unchecked ε(iξ) for ξ > 0 on materials other than PEC; the hot path of
/// the reflection code.
#[inline]
pub(crate) fn eps_imag_positive(material: &DielectricModel, xi: f64) -> f64 {
    match material {
        DielectricModel::Lorentz(m) => {
            m.eps_inf + 4.0 * m.g * m.g / (m.omega0 * m.omega0 + xi * xi + xi * m.gamma)
        }
        DielectricModel::Drude(m) => 1.0 + m.omega_p * m.omega_p / (xi * (xi + m.gamma)),
        DielectricModel::Constant(c) => c.eps,
        DielectricModel::PerfectConductor => f64::INFINITY,
    }
}

/// ε(ω) at complex frequency in the closed upper half-plane.
pub fn eps_real(material: &DielectricModel, omega: Complex64) -> Result<Complex64> {
    if !(omega.im >= 0.0) {
        return Err(CavityError::Domain(format!(
            "frequency must lie in the upper half-plane, got {omega}"
        )));
    }
    let i = Complex64::i();
    match material {
        DielectricModel::Lorentz(m) => {
            let denom = m.omega0 * m.omega0 - omega * omega - i * omega * m.gamma;
            Ok(m.eps_inf + 4.0 * m.g * m.g / denom)
        }
        DielectricModel::Drude(m) => {
            if omega == Complex64::new(0.0, 0.0) {
                return Err(CavityError::SpecialCase(
                    "Drude permittivity diverges at omega = 0".into(),
                ));
            }
            Ok(1.0 - m.omega_p * m.omega_p / (omega * omega + i * omega * m.gamma))
        }
        DielectricModel::Constant(c) => Ok(Complex64::new(c.eps, 0.0)),
        DielectricModel::PerfectConductor => Err(CavityError::SpecialCase(
            "perfect conductor has no finite permittivity".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lorentz_static_value() {
        let m = DielectricModel::Lorentz(LorentzMedium::lossless(1.0, 0.5));
        assert_eq!(eps_imag(&m, 0.0).unwrap(), 2.0);
        assert_eq!(eps_imag(&m, f64::INFINITY).unwrap(), 1.0);
        assert!((eps_imag(&m, 1e12).unwrap() - 1.0).abs() < 1e-20);
    }

    #[test]
    fn lorentz_damped_at_unit_xi() {
        let m = DielectricModel::Lorentz(LorentzMedium::new(1.0, 0.1, 0.5, 1.0).unwrap());
        let v = eps_imag(&m, 1.0).unwrap();
        assert!((v - (1.0 + 1.0 / 2.1)).abs() < 1e-15);
        assert!((v - 1.47619).abs() < 1e-5);
    }

    #[test]
    fn complex_axis_examples() {
        let lossless = DielectricModel::Lorentz(LorentzMedium::lossless(1.0, 0.5));
        assert_eq!(
            eps_real(&lossless, Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(2.0, 0.0)
        );

        let damped = DielectricModel::Lorentz(LorentzMedium::new(1.0, 0.1, 0.5, 1.0).unwrap());
        let at_res = eps_real(&damped, Complex64::new(1.0, 0.0)).unwrap();
        assert!((at_res - Complex64::new(1.0, 10.0)).norm() < 1e-12);

        let glass = DielectricModel::constant(2.1);
        assert_eq!(
            eps_real(&glass, Complex64::new(3.0e15, 0.0)).unwrap().re,
            2.1
        );
    }

    #[test]
    fn domain_errors() {
        let m = DielectricModel::Lorentz(LorentzMedium::lossless(1.0, 0.5));
        assert!(matches!(eps_imag(&m, -1.0), Err(CavityError::Domain(_))));
        assert!(matches!(
            eps_imag(&DielectricModel::Drude(DrudeMetal::gold()), 0.0),
            Err(CavityError::SpecialCase(_))
        ));
        assert!(eps_real(&m, Complex64::new(1.0, -1e-3)).is_err());
        assert!(eps_imag(&DielectricModel::PerfectConductor, 1.0).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(LorentzMedium::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(LorentzMedium::new(1.0, -0.1, 1.0, 1.0).is_err());
        assert!(LorentzMedium::new(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(DielectricModel::constant(0.9).validate().is_err());
    }

    fn any_material() -> impl Strategy<Value = DielectricModel> {
        prop_oneof![
            (0.1f64..10.0, 0.0f64..2.0, 0.0f64..5.0, 1.0f64..4.0).prop_map(|(w, gm, g, e)| {
                DielectricModel::Lorentz(LorentzMedium {
                    omega0: w,
                    gamma: gm,
                    g,
                    eps_inf: e,
                })
            }),
            (0.5f64..20.0, 0.001f64..1.0).prop_map(|(wp, gm)| {
                DielectricModel::Drude(DrudeMetal {
                    omega_p: wp,
                    gamma: gm,
                })
            }),
            (1.0f64..10.0).prop_map(DielectricModel::constant),
        ]
    }

    proptest! {
        #[test]
        fn imaginary_axis_consistency(m in any_material(), xi in 1e-3f64..50.0) {
            let a = eps_imag(&m, xi).unwrap();
            let b = eps_real(&m, Complex64::new(0.0, xi)).unwrap();
            prop_assert!((b.re - a).abs() <= 1e-14 * a.abs());
            prop_assert!(b.im.abs() <= 1e-14 * a.abs());
        }

        #[test]
        fn lorentz_monotone_on_imaginary_axis(
            w in 0.1f64..10.0, gm in 0.0f64..2.0, g in 0.01f64..5.0, e in 1.0f64..3.0
        ) {
            let m = DielectricModel::Lorentz(LorentzMedium { omega0: w, gamma: gm, g, eps_inf: e });
            let mut prev = f64::INFINITY;
            for k in 0..200 {
                let xi = 0.05 * w * k as f64;
                let v = eps_imag(&m, xi).unwrap();
                prop_assert!(v < prev);
                prop_assert!(v >= e);
                prev = v;
            }
        }

        #[test]
        fn static_identity(w in 0.1f64..10.0, gm in 0.0f64..2.0, g in 0.0f64..5.0) {
            let lm = LorentzMedium { omega0: w, gamma: gm, g, eps_inf: 1.0 };
            let v = eps_imag(&DielectricModel::Lorentz(lm), 0.0).unwrap();
            prop_assert_eq!(v, lm.eps_inf + 4.0 * g * g / (w * w));
            prop_assert_eq!(v, lm.static_eps());
        }

        #[test]
        fn passive_on_real_axis(m in any_material(), omega in 1e-3f64..50.0) {
            let lossy = match m {
                DielectricModel::Lorentz(l) => l.gamma > 0.0,
                DielectricModel::Drude(_) => true,
                _ => false,
            };
            let e = eps_real(&m, Complex64::new(omega, 0.0)).unwrap();
            if lossy {
                prop_assert!(e.im >= 0.0);
            }
        }
    }
}
