//! Scenario files: the raw TOML schema, and its resolution to SI values.
//!
//! Every resolved config can be written back as a raw config holding only
//! plain numbers ([`Resolved::to_raw`]); resolving that again reproduces
//! the same bits, which is what the output headers rely on.

use std::path::PathBuf;

use cavity_core::constants::cavity_fundamental;
use cavity_core::{
    CavityConfig, DielectricModel, DrudeMetal, Layer, LorentzMedium, MirrorStack, QuadratureSpec,
    Thickness,
};
use serde::{Deserialize, Serialize};

use crate::units::{resolve, Dimension, FrequencyContext, Quantity};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

pub const GLASS_EPS: f64 = 2.1;
pub const WATER_EPS_INF: f64 = 1.77;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Parameters chosen rather than known; echoed as "assumed" in outputs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumed: Vec<String>,
    pub cavity: RawCavity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<RawQuadrature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<RawOutput>,
    #[serde(rename = "curve")]
    pub curves: Vec<RawCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCavity {
    pub length: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<Quantity>,
    pub gap: RawMaterial,
    /// Shorthand for identical top and bottom mirrors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirrors: Option<RawMirror>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<RawMirror>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<RawMirror>,
}

/// A named preset ("vacuum", "gold", "glass", "water", "pec") or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawMaterial {
    Preset(String),
    Spec(MaterialSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Lorentz {
        omega0: Quantity,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<Quantity>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<Quantity>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps_inf: Option<f64>,
    },
    Drude {
        omega_p: Quantity,
        gamma: Quantity,
    },
    Constant {
        eps: f64,
    },
    Pec,
}

/// A preset ("pec", "gold", "gold_on_glass") or an explicit layer list,
/// first layer facing the gap, last layer semi-infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawMirror {
    Preset(String),
    Stack { layers: Vec<RawLayer> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLayer {
    pub material: RawMaterial,
    /// Omitted for the closing half-space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawQuadrature {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matsubara_rel_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_matsubara_terms: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    /// U (T = 0) or F (T > 0) per area.
    Energy,
    /// U(g)/U(g = 0).
    EnergyRatio,
    /// U(g) − U(0).
    DeltaU,
    /// ΔU/|U(0)| from Lifshitz, static screening and the single-mode model.
    RelativeShift,
    /// Single-mode Hopfield ΔU₁.
    SingleMode,
    /// U(g = 0)/√ε(i0), the static screening overlay.
    SsaEnergy,
    PerMolecule,
    IntegrandXi,
    IntegrandOmega,
    Transmission,
    Polaritons,
    Pressure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    G,
    Length,
    Temperature,
    Xi,
    Omega,
    Q,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::G => "g_over_omega0",
            SweepVariable::Length => "length_m",
            SweepVariable::Temperature => "temperature_K",
            SweepVariable::Xi => "xi_rad_per_s",
            SweepVariable::Omega => "omega_rad_per_s",
            SweepVariable::Q => "q_rad_per_m",
        }
    }

    fn dimension(self) -> Dimension {
        match self {
            SweepVariable::G | SweepVariable::Xi | SweepVariable::Omega => Dimension::Frequency,
            SweepVariable::Length => Dimension::Length,
            SweepVariable::Temperature => Dimension::Temperature,
            SweepVariable::Q => Dimension::Wavenumber,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub variable: SweepVariable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Quantity>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
}

/// Per-curve changes to the base cavity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawCurveOptions {
    /// Imaginary offset for real-frequency diagnostics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Quantity>,
    /// Number of cavity bands for polariton branches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<u32>,
    /// Molecular number density for per-molecule energies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Quantity>,
    /// Finite-difference step relative to L.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dl_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCurve {
    pub name: String,
    pub quantity: QuantityKind,
    pub sweep: RawSweep,
    #[serde(default, skip_serializing_if = "is_default")]
    pub set: RawOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: RawCurveOptions,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overrides {
    pub g: Option<f64>,
    pub length: Option<f64>,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveOptions {
    pub eta: Option<f64>,
    pub bands: u32,
    pub rho: Option<f64>,
    pub dl_rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub quantity: QuantityKind,
    pub variable: SweepVariable,
    /// Grid in SI units, in output order.
    pub values: Vec<f64>,
    pub set: Overrides,
    pub options: CurveOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub scenario: String,
    pub description: Option<String>,
    pub assumed: Vec<String>,
    pub cavity: CavityConfig,
    pub quadrature: QuadratureSpec,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
    pub curves: Vec<Curve>,
}

pub fn parse_str(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| {
        let path = e
            .span()
            .map(|s| format!("line {}", text[..s.start].matches('\n').count() + 1))
            .unwrap_or_else(|| "config".into());
        ConfigError::new(path, e.message().to_string())
    })
}

pub fn load_str(text: &str) -> Result<Resolved> {
    resolve_config(&parse_str(text)?)
}

fn quantity(q: &Quantity, dim: Dimension, ctx: &FrequencyContext, path: &str) -> Result<f64> {
    resolve(q, dim, ctx).map_err(|e| ConfigError::new(path, e.0))
}

fn positive(v: f64, path: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(path, format!("must be positive, got {v:e}")))
    }
}

fn non_negative(v: f64, path: &str) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(
            path,
            format!("must be non-negative, got {v:e}"),
        ))
    }
}

fn gold() -> DielectricModel {
    DielectricModel::Drude(DrudeMetal::gold())
}

fn material(m: &RawMaterial, ctx: &FrequencyContext, path: &str) -> Result<DielectricModel> {
    let model = match m {
        RawMaterial::Preset(name) => match name.as_str() {
            "vacuum" => DielectricModel::vacuum(),
            "gold" => gold(),
            "glass" => DielectricModel::constant(GLASS_EPS),
            "water" => DielectricModel::constant(WATER_EPS_INF),
            "pec" => DielectricModel::PerfectConductor,
            other => {
                return Err(ConfigError::new(
                    path,
                    format!("unknown material {other:?} (vacuum, gold, glass, water, pec)"),
                ))
            }
        },
        RawMaterial::Spec(MaterialSpec::Lorentz {
            omega0,
            g,
            gamma,
            eps_inf,
        }) => {
            let w0 = positive(
                quantity(omega0, Dimension::Frequency, ctx, &format!("{path}.omega0"))?,
                &format!("{path}.omega0"),
            )?;
            let inner = FrequencyContext {
                omega0: Some(w0),
                ..*ctx
            };
            let g = match g {
                Some(g) => non_negative(
                    quantity(g, Dimension::Frequency, &inner, &format!("{path}.g"))?,
                    &format!("{path}.g"),
                )?,
                None => 0.0,
            };
            let gamma = match gamma {
                Some(q) => non_negative(
                    quantity(q, Dimension::Frequency, &inner, &format!("{path}.gamma"))?,
                    &format!("{path}.gamma"),
                )?,
                None => 0.0,
            };
            let medium = LorentzMedium::new(w0, gamma, g, eps_inf.unwrap_or(1.0))
                .map_err(|e| ConfigError::new(path, e.to_string()))?;
            DielectricModel::Lorentz(medium)
        }
        RawMaterial::Spec(MaterialSpec::Drude { omega_p, gamma }) => {
            DielectricModel::Drude(DrudeMetal {
                omega_p: positive(
                    quantity(
                        omega_p,
                        Dimension::Frequency,
                        ctx,
                        &format!("{path}.omega_p"),
                    )?,
                    &format!("{path}.omega_p"),
                )?,
                gamma: non_negative(
                    quantity(gamma, Dimension::Frequency, ctx, &format!("{path}.gamma"))?,
                    &format!("{path}.gamma"),
                )?,
            })
        }
        RawMaterial::Spec(MaterialSpec::Constant { eps }) => DielectricModel::constant(*eps),
        RawMaterial::Spec(MaterialSpec::Pec) => DielectricModel::PerfectConductor,
    };
    model
        .validate()
        .map_err(|e| ConfigError::new(path, e.to_string()))?;
    Ok(model)
}

fn mirror(m: &RawMirror, ctx: &FrequencyContext, path: &str) -> Result<MirrorStack> {
    let built = match m {
        RawMirror::Preset(name) => match name.as_str() {
            "pec" => Ok(MirrorStack::pec()),
            "gold" => MirrorStack::half_space(gold()),
            "gold_on_glass" => {
                MirrorStack::film_on_substrate(gold(), 30e-9, DielectricModel::constant(GLASS_EPS))
            }
            other => {
                return Err(ConfigError::new(
                    path,
                    format!("unknown mirror {other:?} (pec, gold, gold_on_glass, or layers)"),
                ))
            }
        },
        RawMirror::Stack { layers } => {
            let mut out = Vec::with_capacity(layers.len());
            for (i, layer) in layers.iter().enumerate() {
                let lp = format!("{path}.layers[{i}]");
                let mat = material(&layer.material, ctx, &format!("{lp}.material"))?;
                out.push(match &layer.thickness {
                    Some(d) => {
                        let dp = format!("{lp}.thickness");
                        Layer::film(
                            mat,
                            non_negative(quantity(d, Dimension::Length, ctx, &dp)?, &dp)?,
                        )
                    }
                    None => Layer::half_space(mat),
                });
            }
            MirrorStack::new(out)
        }
    };
    built.map_err(|e| ConfigError::new(path, e.to_string()))
}

fn grid(sweep: &RawSweep, ctx: &FrequencyContext, path: &str) -> Result<Vec<f64>> {
    let dim = sweep.variable.dimension();
    let values = match (&sweep.values, &sweep.from, &sweep.to, sweep.points) {
        (Some(values), None, None, None) => values
            .iter()
            .enumerate()
            .map(|(i, v)| quantity(v, dim, ctx, &format!("{path}.values[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        (None, Some(from), Some(to), Some(points)) => {
            let a = quantity(from, dim, ctx, &format!("{path}.from"))?;
            let b = quantity(to, dim, ctx, &format!("{path}.to"))?;
            if points == 0 {
                return Err(ConfigError::new(
                    format!("{path}.points"),
                    "must be at least 1",
                ));
            }
            let spacing = sweep.spacing.unwrap_or_default();
            if spacing == Spacing::Log && !(a > 0.0 && b > 0.0) {
                return Err(ConfigError::new(path, "log spacing needs positive bounds"));
            }
            (0..points)
                .map(|k| {
                    if k == 0 {
                        return a;
                    }
                    if k + 1 == points {
                        return b;
                    }
                    let t = k as f64 / (points - 1) as f64;
                    match spacing {
                        Spacing::Linear => a + (b - a) * t,
                        Spacing::Log => (a.ln() + (b.ln() - a.ln()) * t).exp(),
                    }
                })
                .collect()
        }
        _ => {
            return Err(ConfigError::new(
                path,
                "give either `values` or all of `from`, `to`, `points`",
            ))
        }
    };
    if values.is_empty() {
        return Err(ConfigError::new(path, "grid is empty"));
    }
    Ok(values)
}

fn check_variable(curve: &RawCurve, cavity: &CavityConfig, path: &str) -> Result<()> {
    use QuantityKind as K;
    use SweepVariable as V;
    let v = curve.sweep.variable;
    let allowed: &[SweepVariable] = match curve.quantity {
        K::IntegrandXi => &[V::Xi],
        K::IntegrandOmega | K::Transmission => &[V::Omega],
        K::Polaritons => &[V::Q],
        K::SingleMode => &[V::G, V::Length],
        _ => &[V::G, V::Length, V::Temperature],
    };
    if !allowed.contains(&v) {
        return Err(ConfigError::new(
            format!("{path}.sweep.variable"),
            format!(
                "{v:?} cannot be swept for {:?}; allowed: {allowed:?}",
                curve.quantity
            )
            .to_lowercase(),
        ));
    }
    let needs_lorentz = matches!(
        curve.quantity,
        K::EnergyRatio
            | K::DeltaU
            | K::RelativeShift
            | K::SingleMode
            | K::SsaEnergy
            | K::PerMolecule
            | K::Polaritons
    ) || v == V::G
        || curve.set.g.is_some();
    if needs_lorentz && cavity.lorentz().is_none() {
        return Err(ConfigError::new(
            "cavity.gap",
            format!("{path} needs a Lorentz gap medium"),
        ));
    }
    Ok(())
}

pub fn resolve_config(raw: &RawConfig) -> Result<Resolved> {
    let length_path = "cavity.length";
    let length = positive(
        quantity(
            &raw.cavity.length,
            Dimension::Length,
            &FrequencyContext::default(),
            length_path,
        )?,
        length_path,
    )?;
    let ctx = FrequencyContext {
        omega0: None,
        omega_l: Some(cavity_fundamental(length)),
    };
    let temperature = match &raw.cavity.temperature {
        Some(t) => non_negative(
            quantity(t, Dimension::Temperature, &ctx, "cavity.temperature")?,
            "cavity.temperature",
        )?,
        None => 0.0,
    };
    let gap = material(&raw.cavity.gap, &ctx, "cavity.gap")?;
    let pick = |m: &Option<RawMirror>, name: &str| -> Result<MirrorStack> {
        match (m, &raw.cavity.mirrors) {
            (Some(m), _) => mirror(m, &ctx, &format!("cavity.{name}")),
            (None, Some(m)) => mirror(m, &ctx, "cavity.mirrors"),
            (None, None) => Err(ConfigError::new(
                format!("cavity.{name}"),
                "no mirror given (set `mirrors` or `top`/`bottom`)",
            )),
        }
    };
    let (top, bottom) = (
        pick(&raw.cavity.top, "top")?,
        pick(&raw.cavity.bottom, "bottom")?,
    );
    let cavity = CavityConfig::new(length, gap, top, bottom, temperature)
        .map_err(|e| ConfigError::new("cavity", e.to_string()))?;

    let ctx = FrequencyContext {
        omega0: cavity.lorentz().map(|m| m.omega0),
        ..ctx
    };

    let q = raw.quadrature.clone().unwrap_or_default();
    let d = QuadratureSpec::default();
    let quadrature = QuadratureSpec {
        rel_tol: q.rel_tol.unwrap_or(d.rel_tol),
        max_subdivisions: q.max_subdivisions.unwrap_or(d.max_subdivisions),
        matsubara_rel_cutoff: q.matsubara_rel_cutoff.unwrap_or(d.matsubara_rel_cutoff),
        max_matsubara_terms: q.max_matsubara_terms.unwrap_or(d.max_matsubara_terms),
        record_samples: false,
    };
    quadrature
        .validate()
        .map_err(|e| ConfigError::new("quadrature", e.to_string()))?;

    if raw.curves.is_empty() {
        return Err(ConfigError::new(
            "curve",
            "at least one [[curve]] is required",
        ));
    }
    let mut curves = Vec::with_capacity(raw.curves.len());
    for (i, c) in raw.curves.iter().enumerate() {
        let path = format!("curve[{i}]");
        if c.name.is_empty()
            || !c
                .name
                .chars()
                .all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-')
        {
            return Err(ConfigError::new(
                format!("{path}.name"),
                "use letters, digits, '_' or '-'",
            ));
        }
        if curves.iter().any(|p: &Curve| p.name == c.name) {
            return Err(ConfigError::new(
                format!("{path}.name"),
                "duplicate curve name",
            ));
        }
        check_variable(c, &cavity, &path)?;
        let values = grid(&c.sweep, &ctx, &format!("{path}.sweep"))?;
        validate_grid(c.sweep.variable, &values, &format!("{path}.sweep"))?;
        let sp = format!("{path}.set");
        let set = Overrides {
            g: c.set
                .g
                .as_ref()
                .map(|g| quantity(g, Dimension::Frequency, &ctx, &format!("{sp}.g")))
                .transpose()?
                .map(|g| non_negative(g, &format!("{sp}.g")))
                .transpose()?,
            length: c
                .set
                .length
                .as_ref()
                .map(|l| quantity(l, Dimension::Length, &ctx, &format!("{sp}.length")))
                .transpose()?
                .map(|l| positive(l, &format!("{sp}.length")))
                .transpose()?,
            temperature: c
                .set
                .temperature
                .as_ref()
                .map(|t| {
                    quantity(
                        t,
                        Dimension::Temperature,
                        &ctx,
                        &format!("{sp}.temperature"),
                    )
                })
                .transpose()?
                .map(|t| non_negative(t, &format!("{sp}.temperature")))
                .transpose()?,
        };
        let op = format!("{path}.options");
        let options = CurveOptions {
            eta: c
                .options
                .eta
                .as_ref()
                .map(|e| quantity(e, Dimension::Frequency, &ctx, &format!("{op}.eta")))
                .transpose()?
                .map(|e| positive(e, &format!("{op}.eta")))
                .transpose()?,
            bands: c.options.bands.unwrap_or(1),
            rho: c
                .options
                .rho
                .as_ref()
                .map(|r| quantity(r, Dimension::Density, &ctx, &format!("{op}.rho")))
                .transpose()?
                .map(|r| positive(r, &format!("{op}.rho")))
                .transpose()?,
            dl_rel: positive(c.options.dl_rel.unwrap_or(1e-3), &format!("{op}.dl_rel"))?,
        };
        if options.bands == 0 {
            return Err(ConfigError::new(
                format!("{op}.bands"),
                "must be at least 1",
            ));
        }
        if c.quantity == QuantityKind::IntegrandOmega && options.eta.is_none() {
            return Err(ConfigError::new(
                format!("{op}.eta"),
                "real-frequency integrand needs a positive eta",
            ));
        }
        if c.quantity == QuantityKind::PerMolecule && options.rho.is_none() {
            return Err(ConfigError::new(
                format!("{op}.rho"),
                "per-molecule energy needs rho",
            ));
        }
        curves.push(Curve {
            name: c.name.clone(),
            quantity: c.quantity,
            variable: c.sweep.variable,
            values,
            set,
            options,
        });
    }

    let output = raw.output.clone().unwrap_or_default();
    Ok(Resolved {
        scenario: raw.scenario.clone(),
        description: raw.description.clone(),
        assumed: raw.assumed.clone(),
        cavity,
        quadrature,
        output_dir: output.dir,
        format: output.format.unwrap_or_default(),
        curves,
    })
}

fn validate_grid(v: SweepVariable, values: &[f64], path: &str) -> Result<()> {
    for (i, &x) in values.iter().enumerate() {
        let p = format!("{path}.values[{i}]");
        match v {
            SweepVariable::Length | SweepVariable::Omega => {
                positive(x, &p)?;
            }
            _ => {
                non_negative(x, &p)?;
            }
        }
    }
    Ok(())
}

fn material_raw(m: &DielectricModel) -> RawMaterial {
    RawMaterial::Spec(match *m {
        DielectricModel::Lorentz(l) => MaterialSpec::Lorentz {
            omega0: l.omega0.into(),
            g: Some(l.g.into()),
            gamma: Some(l.gamma.into()),
            eps_inf: Some(l.eps_inf),
        },
        DielectricModel::Drude(d) => MaterialSpec::Drude {
            omega_p: d.omega_p.into(),
            gamma: d.gamma.into(),
        },
        DielectricModel::Constant(c) => MaterialSpec::Constant { eps: c.eps },
        DielectricModel::PerfectConductor => MaterialSpec::Pec,
    })
}

fn mirror_raw(m: &MirrorStack) -> RawMirror {
    RawMirror::Stack {
        layers: m
            .layers()
            .iter()
            .map(|l| RawLayer {
                material: material_raw(&l.material),
                thickness: match l.thickness {
                    Thickness::Finite(d) => Some(d.into()),
                    Thickness::HalfSpace => None,
                },
            })
            .collect(),
    }
}

impl Resolved {
    /// The resolved config as plain SI numbers.
    pub fn to_raw(&self) -> RawConfig {
        let c = &self.cavity;
        RawConfig {
            scenario: self.scenario.clone(),
            description: self.description.clone(),
            assumed: self.assumed.clone(),
            cavity: RawCavity {
                length: c.length.into(),
                temperature: Some(c.temperature.into()),
                gap: material_raw(&c.gap),
                mirrors: None,
                top: Some(mirror_raw(&c.top)),
                bottom: Some(mirror_raw(&c.bottom)),
            },
            quadrature: Some(RawQuadrature {
                rel_tol: Some(self.quadrature.rel_tol),
                max_subdivisions: Some(self.quadrature.max_subdivisions),
                matsubara_rel_cutoff: Some(self.quadrature.matsubara_rel_cutoff),
                max_matsubara_terms: Some(self.quadrature.max_matsubara_terms),
            }),
            output: Some(RawOutput {
                dir: self.output_dir.clone(),
                format: Some(self.format),
            }),
            curves: self
                .curves
                .iter()
                .map(|cv| RawCurve {
                    name: cv.name.clone(),
                    quantity: cv.quantity,
                    sweep: RawSweep {
                        variable: cv.variable,
                        values: Some(cv.values.iter().map(|&v| v.into()).collect()),
                        from: None,
                        to: None,
                        points: None,
                        spacing: None,
                    },
                    set: RawOverrides {
                        g: cv.set.g.map(Into::into),
                        length: cv.set.length.map(Into::into),
                        temperature: cv.set.temperature.map(Into::into),
                    },
                    options: RawCurveOptions {
                        eta: cv.options.eta.map(Into::into),
                        bands: Some(cv.options.bands),
                        rho: cv.options.rho.map(Into::into),
                        dl_rel: Some(cv.options.dl_rel),
                    },
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("resolved config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1E: &str = r#"
        scenario = "fig1e"
        [cavity]
        length = "100 nm"
        mirrors = "pec"
        gap = { kind = "lorentz", omega0 = "1 omegaL" }
        [[curve]]
        name = "lifshitz"
        quantity = "energy_ratio"
        sweep = { variable = "g", from = "0 omega0", to = "3 omega0", points = 4 }
    "#;

    #[test]
    fn resolves_relative_units() {
        let r = load_str(FIG1E).unwrap();
        let w0 = cavity_fundamental(100e-9);
        assert_eq!(r.cavity.lorentz().unwrap().omega0, w0);
        assert_eq!(r.curves[0].values, vec![0.0, w0, 2.0 * w0, 3.0 * w0]);
        assert!(r.cavity.top.is_pec() && r.cavity.bottom.is_pec());
        assert_eq!(r.format, Format::Csv);
    }

    #[test]
    fn round_trip_is_exact() {
        let r = load_str(FIG1E).unwrap();
        let again = load_str(&r.to_toml()).unwrap();
        assert_eq!(r, again);
        assert_eq!(r.to_toml(), again.to_toml());
    }

    #[test]
    fn negative_length_reports_field_path() {
        let bad = FIG1E.replace("\"100 nm\"", "\"-100 nm\"");
        let e = load_str(&bad).unwrap_err();
        assert_eq!(e.path, "cavity.length");
        assert!(e.message.contains("positive"));
    }

    #[test]
    fn unknown_fields_and_bad_sweeps_rejected() {
        let bad = FIG1E.replace("mirrors = \"pec\"", "mirrors = \"pec\"\ncolour = 3");
        assert!(load_str(&bad).is_err());
        let bad = FIG1E.replace("variable = \"g\"", "variable = \"xi\"");
        let e = load_str(&bad).unwrap_err();
        assert_eq!(e.path, "curve[0].sweep.variable");
        let bad = FIG1E.replace(", points = 4", "");
        assert_eq!(load_str(&bad).unwrap_err().path, "curve[0].sweep");
    }

    #[test]
    fn explicit_layers() {
        let text = FIG1E.replace(
            "mirrors = \"pec\"",
            "mirrors = { layers = [ { material = \"gold\", thickness = \"30 nm\" }, { material = { kind = \"constant\", eps = 2.1 } } ] }",
        );
        let r = load_str(&text).unwrap();
        assert_eq!(
            r.cavity.top,
            MirrorStack::film_on_substrate(gold(), 30e-9, DielectricModel::constant(2.1)).unwrap()
        );
        assert_eq!(load_str(&r.to_toml()).unwrap(), r);
    }
}
