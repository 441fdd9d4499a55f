//! Casimir pressure by central differences of the energy in L.

use cavity_core::{energy, CavityConfig, QuadratureSpec, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pressure {
    /// −[U(L+dL) − U(L−dL)]/(2dL), J/m³.
    pub value: f64,
    /// Richardson combination of steps dL and dL/2.
    pub extrapolated: f64,
    /// |P(dL/2) − P(dL)|/|P(dL/2)|; small values mean the step resolves the slope.
    pub rel_change: f64,
}

fn central(cfg: &CavityConfig, dl: f64, spec: &QuadratureSpec) -> Result<f64> {
    let l = cfg.length;
    let plus = energy(&cfg.with_length(l + dl), spec)?.u_per_area;
    let minus = energy(&cfg.with_length(l - dl), spec)?.u_per_area;
    Ok(-(plus - minus) / (2.0 * dl))
}

pub fn pressure_finite_difference(
    cfg: &CavityConfig,
    dl: f64,
    spec: &QuadratureSpec,
) -> Result<Pressure> {
    if !(dl > 0.0 && dl < 0.5 * cfg.length) {
        return Err(cavity_core::CavityError::Domain(format!(
            "finite-difference step must lie in (0, L/2), got {dl}"
        )));
    }
    let coarse = central(cfg, dl, spec)?;
    let fine = central(cfg, 0.5 * dl, spec)?;
    Ok(Pressure {
        value: coarse,
        extrapolated: (4.0 * fine - coarse) / 3.0,
        rel_change: ((fine - coarse) / fine).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cavity_core::constants::{pec_casimir_energy, K_B, ZETA_3};
    use cavity_core::DielectricModel;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-10)
    }

    #[test]
    fn empty_pec_power_law() {
        let l = 100e-9;
        let cfg = CavityConfig::pec(l, DielectricModel::vacuum()).unwrap();
        let p = pressure_finite_difference(&cfg, 1e-3 * l, &spec()).unwrap();
        let want = 3.0 * pec_casimir_energy(l).abs() / l;
        assert!(p.value < 0.0);
        assert!((p.value.abs() - want).abs() / want < 1e-3);
        assert!((p.extrapolated.abs() - want).abs() / want < 1e-6);
    }

    #[test]
    fn second_order_convergence() {
        let l = 100e-9;
        let cfg = CavityConfig::pec(l, DielectricModel::vacuum()).unwrap();
        let want = -3.0 * pec_casimir_energy(l).abs() / l;
        let e1 = (pressure_finite_difference(&cfg, 0.04 * l, &spec())
            .unwrap()
            .value
            - want)
            .abs();
        let e2 = (pressure_finite_difference(&cfg, 0.02 * l, &spec())
            .unwrap()
            .value
            - want)
            .abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn classical_limit() {
        let (l, t) = (10e-6, 300.0);
        let cfg = CavityConfig::pec(l, DielectricModel::vacuum())
            .unwrap()
            .with_temperature(t);
        let p = pressure_finite_difference(&cfg, 1e-3 * l, &spec()).unwrap();
        let f = ZETA_3 * K_B * t / (8.0 * PI * l * l);
        assert!((p.value.abs() - 2.0 * f / l).abs() / (2.0 * f / l) < 0.01);
    }

    #[test]
    fn step_must_be_small() {
        let cfg = CavityConfig::pec(1e-7, DielectricModel::vacuum()).unwrap();
        assert!(pressure_finite_difference(&cfg, 1e-7, &spec()).is_err());
        assert!(pressure_finite_difference(&cfg, 0.0, &spec()).is_err());
    }
}
