//! Quantities with unit suffixes, e.g. "100 nm", "1.5 eV", "0.5 omega0".
//!
//! A bare number is taken as SI. Frequencies may be given relative to the
//! resonance (`omega0`) or to the fundamental cavity mode (`omegaL`); both
//! are resolved against a [`FrequencyContext`] at load time.

use std::fmt;

use cavity_core::constants::ev_to_rad_per_s;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct UnitError(pub String);

/// A config value: a number in SI units or a string with a unit suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Number(v)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Number(v) => write!(f, "{v}"),
            Quantity::Text(s) => f.write_str(s),
        }
    }
}

/// Reference frequencies for relative units.
#[derive(Debug, Clone, Copy, Default)]
pub struct FrequencyContext {
    pub omega0: Option<f64>,
    pub omega_l: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Frequency,
    Temperature,
    /// Number density, m⁻³.
    Density,
    /// Wave number, rad/m.
    Wavenumber,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Frequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::Density => "number density",
            Dimension::Wavenumber => "wave number",
        }
    }
}

fn split(text: &str) -> Result<(f64, String), UnitError> {
    let t = text.trim();
    if let Some((number, unit)) = t.split_once(char::is_whitespace) {
        if let Ok(v) = number.parse::<f64>() {
            return Ok((v, unit.trim().to_string()));
        }
    }
    // The number ends where the unit starts: the first alphabetic character
    // that is not an exponent marker followed by a digit or sign.
    let bytes: Vec<char> = t.chars().collect();
    let mut end = bytes.len();
    for (i, &ch) in bytes.iter().enumerate() {
        let exponent = (ch == 'e' || ch == 'E')
            && i > 0
            && bytes[i - 1].is_ascii_digit()
            && matches!(bytes.get(i + 1), Some(c) if c.is_ascii_digit() || *c == '-' || *c == '+');
        if (ch.is_alphabetic() || ch == 'µ' || ch == 'μ' || ch == '/') && !exponent {
            end = i;
            break;
        }
    }
    let number: String = bytes[..end].iter().collect();
    let unit: String = bytes[end..].iter().collect();
    let value = number
        .trim()
        .parse::<f64>()
        .map_err(|_| UnitError(format!("cannot read a number from {text:?}")))?;
    Ok((value, unit.trim().to_string()))
}

/// Conversion to SI. Sub-unit prefixes divide, so "100 nm" is exactly 1e-7.
enum Scale {
    Times(f64),
    Over(f64),
}

fn scale(unit: &str, dim: Dimension, ctx: &FrequencyContext) -> Result<Scale, UnitError> {
    use Scale::{Over, Times};
    let u = unit.replace(['µ', 'μ'], "u");
    let factor = match (dim, u.as_str()) {
        (_, "") => Times(1.0),
        (Dimension::Length, "m") => Times(1.0),
        (Dimension::Length, "mm") => Over(1e3),
        (Dimension::Length, "um") => Over(1e6),
        (Dimension::Length, "nm") => Over(1e9),
        (Dimension::Frequency, "rad/s") => Times(1.0),
        (Dimension::Frequency, "eV") => Times(ev_to_rad_per_s(1.0)),
        (Dimension::Frequency, "meV") => Times(ev_to_rad_per_s(1e-3)),
        (Dimension::Frequency, "omega0") => ctx
            .omega0
            .map(Times)
            .ok_or_else(|| UnitError("omega0 is not defined in this context".into()))?,
        (Dimension::Frequency, "omegaL") => ctx
            .omega_l
            .map(Times)
            .ok_or_else(|| UnitError("omegaL needs a cavity length".into()))?,
        (Dimension::Temperature, "K") => Times(1.0),
        (Dimension::Temperature, "mK") => Over(1e3),
        (Dimension::Wavenumber, "rad/m" | "1/m") => Times(1.0),
        (Dimension::Wavenumber, "1/um") => Times(1e6),
        (Dimension::Wavenumber, "1/nm") => Times(1e9),
        (Dimension::Density, "m^-3") => Times(1.0),
        (Dimension::Density, "cm^-3") => Times(1e6),
        (Dimension::Density, "mol/L") => Times(6.022_140_76e26),
        _ => {
            return Err(UnitError(format!(
                "unit {unit:?} is not a {} unit",
                dim.name()
            )))
        }
    };
    Ok(factor)
}

/// Resolves a quantity to SI.
pub fn resolve(q: &Quantity, dim: Dimension, ctx: &FrequencyContext) -> Result<f64, UnitError> {
    let v = match q {
        Quantity::Number(v) => *v,
        Quantity::Text(s) => {
            let (v, unit) = split(s)?;
            match scale(&unit, dim, ctx)? {
                Scale::Times(f) => v * f,
                Scale::Over(d) => v / d,
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(UnitError(format!("{q} is not finite")))
    }
}

/// Parses a command-line quantity such as "100nm" or "0.5".
pub fn parse(text: &str, dim: Dimension, ctx: &FrequencyContext) -> Result<f64, UnitError> {
    match text.trim().parse::<f64>() {
        Ok(v) => resolve(&Quantity::Number(v), dim, ctx),
        Err(_) => resolve(&Quantity::Text(text.to_string()), dim, ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> FrequencyContext {
        FrequencyContext {
            omega0: Some(2.0e15),
            omega_l: Some(3.0e15),
        }
    }

    #[test]
    fn lengths() {
        let c = ctx();
        let t = |s: &str| resolve(&Quantity::Text(s.into()), Dimension::Length, &c).unwrap();
        assert_eq!(t("100 nm"), 100e-9);
        assert_eq!(t("100nm"), 100e-9);
        assert_eq!(t("4 um"), 4e-6);
        assert_eq!(t("4 μm"), 4e-6);
        assert_eq!(t("1e-7"), 1e-7);
        assert_eq!(t("2.5e-1 m"), 0.25);
        assert_eq!(
            resolve(&Quantity::Number(3e-9), Dimension::Length, &c).unwrap(),
            3e-9
        );
    }

    #[test]
    fn frequencies() {
        let c = ctx();
        assert_eq!(
            parse("0.5 omega0", Dimension::Frequency, &c).unwrap(),
            1.0e15
        );
        assert_eq!(parse("2omegaL", Dimension::Frequency, &c).unwrap(), 6.0e15);
        assert_eq!(parse("2e15 rad/s", Dimension::Frequency, &c).unwrap(), 2e15);
        let ev = parse("1 eV", Dimension::Frequency, &c).unwrap();
        assert!((ev - 1.519_267_448_8e15).abs() / ev < 1e-9);
    }

    #[test]
    fn errors_name_the_problem() {
        let c = FrequencyContext::default();
        let e = parse("1 omega0", Dimension::Frequency, &c).unwrap_err();
        assert!(e.0.contains("omega0"));
        let e = parse("3 kg", Dimension::Length, &c).unwrap_err();
        assert!(e.0.contains("kg") && e.0.contains("length"));
        assert!(parse("abc nm", Dimension::Length, &c).is_err());
        assert!(parse("300 nm", Dimension::Temperature, &c).is_err());
    }

    #[test]
    fn temperatures_and_densities() {
        let c = ctx();
        assert_eq!(parse("300 K", Dimension::Temperature, &c).unwrap(), 300.0);
        assert_eq!(parse("1e21 cm^-3", Dimension::Density, &c).unwrap(), 1e27);
        assert_eq!(parse("0.1 1/nm", Dimension::Wavenumber, &c).unwrap(), 1e8);
        assert_eq!(parse("2 1/um", Dimension::Wavenumber, &c).unwrap(), 2e6);
    }
}
