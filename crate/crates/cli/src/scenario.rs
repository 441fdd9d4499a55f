//! Built-in figure scenarios and the evaluation of curves into tables.

use cavity_core::constants::{C, K_B};
use cavity_core::hopfield::{cavity_mode, polaritons_for_mode};
use cavity_core::{
    energy, integrand_omega, integrand_xi, per_molecule, single_mode_relative, single_mode_shift,
    ssa_relative_shift, transmission, CavityConfig, CavityError, CouplingSpec, DielectricModel,
    MirrorStack, Multilayer, QuadratureSpec, Thickness,
};
use rayon::prelude::*;

use crate::config::{Curve, QuantityKind, Resolved, SweepVariable};
use crate::pressure::pressure_finite_difference;

pub struct Builtin {
    pub name: &'static str,
    pub source: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "fig1b",
        source: include_str!("../scenarios/fig1b.toml"),
    },
    Builtin {
        name: "fig1d",
        source: include_str!("../scenarios/fig1d.toml"),
    },
    Builtin {
        name: "fig1e",
        source: include_str!("../scenarios/fig1e.toml"),
    },
    Builtin {
        name: "fig2a",
        source: include_str!("../scenarios/fig2a.toml"),
    },
    Builtin {
        name: "fig2b",
        source: include_str!("../scenarios/fig2b.toml"),
    },
    Builtin {
        name: "fig2c",
        source: include_str!("../scenarios/fig2c.toml"),
    },
    Builtin {
        name: "fig2d",
        source: include_str!("../scenarios/fig2d.toml"),
    },
    Builtin {
        name: "fig3a",
        source: include_str!("../scenarios/fig3a.toml"),
    },
    Builtin {
        name: "fig3b",
        source: include_str!("../scenarios/fig3b.toml"),
    },
    Builtin {
        name: "custom",
        source: include_str!("../scenarios/custom.toml"),
    },
];

pub fn builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub curve: String,
    pub quantity: QuantityKind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// One entry per row; `Some` marks a partial (non-converged) value.
    pub warnings: Vec<Option<String>>,
    /// Largest relative error estimate reported by the energy integrals.
    pub max_rel_error: f64,
}

impl Table {
    pub fn converged(&self) -> bool {
        self.warnings.iter().all(Option::is_none)
    }
}

#[derive(Debug, Default)]
struct Row {
    values: Vec<f64>,
    warning: Option<String>,
    rel_error: f64,
}

impl Row {
    fn note(&mut self, e: &Eval) {
        self.rel_error = self.rel_error.max(e.rel_error);
        if self.warning.is_none() {
            self.warning.clone_from(&e.warning);
        }
    }
}

struct Eval {
    value: f64,
    rel_error: f64,
    terms: Option<usize>,
    warning: Option<String>,
}

/// Energy with non-convergence turned into a flagged partial value.
fn eval_energy(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<Eval, CavityError> {
    match energy(cfg, spec) {
        Ok(r) => Ok(Eval {
            value: r.u_per_area,
            rel_error: r.rel_tol_achieved,
            terms: r.matsubara_terms_used,
            warning: None,
        }),
        Err(CavityError::Convergence {
            what,
            partial,
            rel_error,
        }) => Ok(Eval {
            value: partial,
            rel_error,
            terms: None,
            warning: Some(format!("not converged: {what} (rel error {rel_error:.1e})")),
        }),
        Err(e) => Err(e),
    }
}

fn point(base: &CavityConfig, curve: &Curve, x: f64) -> Result<CavityConfig, CavityError> {
    let mut cfg = base.clone();
    if let Some(l) = curve.set.length {
        cfg = cfg.with_length(l);
    }
    if let Some(t) = curve.set.temperature {
        cfg = cfg.with_temperature(t);
    }
    if let Some(g) = curve.set.g {
        cfg = cfg.with_coupling(g)?;
    }
    match curve.variable {
        SweepVariable::G => cfg = cfg.with_coupling(x)?,
        SweepVariable::Length => cfg = cfg.with_length(x),
        SweepVariable::Temperature => cfg = cfg.with_temperature(x),
        SweepVariable::Xi | SweepVariable::Omega | SweepVariable::Q => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn columns(curve: &Curve) -> Vec<String> {
    let mut cols = vec![curve.variable.column().to_string()];
    let rest: &[&str] = match curve.quantity {
        QuantityKind::Energy => &["U_J_per_m2", "rel_error", "matsubara_terms"],
        QuantityKind::EnergyRatio => &["U_over_U0", "U_J_per_m2", "U0_J_per_m2"],
        QuantityKind::DeltaU => &[
            "delta_U_J_per_m2",
            "delta_U_over_abs_U0",
            "U_J_per_m2",
            "U0_J_per_m2",
        ],
        QuantityKind::RelativeShift => &["lifshitz", "ssa", "single_mode"],
        QuantityKind::SingleMode => &["delta_U1_J", "delta_U1_over_U1"],
        QuantityKind::SsaEnergy => &["U0_J_per_m2", "U0_over_sqrt_eps0_J_per_m2", "eps0"],
        QuantityKind::PerMolecule => &[
            "delta_U_J_per_m2",
            "per_molecule_J",
            "kT_J",
            "per_molecule_over_kT",
        ],
        QuantityKind::IntegrandXi => &["U_xi"],
        QuantityKind::IntegrandOmega => &["U_omega"],
        QuantityKind::Transmission => &["T"],
        QuantityKind::Pressure => &["P_J_per_m3", "P_extrapolated_J_per_m3", "rel_change"],
        QuantityKind::Polaritons => &[],
    };
    cols.extend(rest.iter().map(|s| s.to_string()));
    if curve.quantity == QuantityKind::Polaritons {
        for n in 1..=curve.options.bands {
            cols.push(format!("omega_plus_n{n}"));
            cols.push(format!("omega_minus_n{n}"));
            cols.push(format!("omega_cavity_n{n}"));
        }
        cols.push("omega_bulk_plus".into());
        cols.push("omega_bulk_minus".into());
    }
    cols
}

/// Normal-incidence stack: exit medium of the top mirror, its finite layers
/// reversed, the gap, the bottom mirror's finite layers, its half-space.
fn multilayer(cfg: &CavityConfig) -> Result<Multilayer, CavityError> {
    fn split(m: &MirrorStack) -> (Vec<(DielectricModel, f64)>, DielectricModel) {
        let mut films = Vec::new();
        let mut last = DielectricModel::vacuum();
        for l in m.layers() {
            match l.thickness {
                Thickness::Finite(d) => films.push((l.material, d)),
                Thickness::HalfSpace => last = l.material,
            }
        }
        (films, last)
    }
    let (mut top, incident) = split(&cfg.top);
    let (bottom, exit) = split(&cfg.bottom);
    top.reverse();
    top.push((cfg.gap, cfg.length));
    top.extend(bottom);
    Ok(Multilayer {
        incident,
        layers: top,
        exit,
    })
}

fn x_value(curve: &Curve, cfg: &CavityConfig, x: f64) -> f64 {
    match curve.variable {
        SweepVariable::G => x / cfg.lorentz().expect("checked at load").omega0,
        _ => x,
    }
}

fn row(
    base: &CavityConfig,
    curve: &Curve,
    spec: &QuadratureSpec,
    x: f64,
) -> Result<Row, CavityError> {
    let cfg = point(base, curve, x)?;
    let mut r = Row {
        values: vec![x_value(curve, &cfg, x)],
        ..Row::default()
    };
    let uncoupled = || cfg.with_coupling(0.0);
    match curve.quantity {
        QuantityKind::Energy => {
            let e = eval_energy(&cfg, spec)?;
            r.values
                .extend([e.value, e.rel_error, e.terms.unwrap_or(0) as f64]);
            r.note(&e);
        }
        QuantityKind::EnergyRatio | QuantityKind::DeltaU => {
            let on = eval_energy(&cfg, spec)?;
            let off = eval_energy(&uncoupled()?, spec)?;
            if curve.quantity == QuantityKind::EnergyRatio {
                r.values.extend([on.value / off.value, on.value, off.value]);
            } else {
                let d = on.value - off.value;
                r.values
                    .extend([d, d / off.value.abs(), on.value, off.value]);
            }
            r.note(&on);
            r.note(&off);
        }
        QuantityKind::RelativeShift => {
            let m = cfg.lorentz().expect("checked at load");
            let on = eval_energy(&cfg, spec)?;
            let off = eval_energy(&uncoupled()?, spec)?;
            let single = CouplingSpec::for_length(m.omega0, m.g, cfg.length)?;
            r.values.extend([
                (on.value - off.value) / off.value.abs(),
                ssa_relative_shift(m.omega0, m.g, m.eps_inf),
                single_mode_relative(&single),
            ]);
            r.note(&on);
            r.note(&off);
        }
        QuantityKind::SingleMode => {
            let m = cfg.lorentz().expect("checked at load");
            let single = CouplingSpec::for_length(m.omega0, m.g, cfg.length)?;
            r.values
                .extend([single_mode_shift(&single), single_mode_relative(&single)]);
        }
        QuantityKind::SsaEnergy => {
            let eps0 = cfg.gap.static_eps().expect("validated gap");
            let off = eval_energy(&uncoupled()?, spec)?;
            r.values.extend([off.value, off.value / eps0.sqrt(), eps0]);
            r.note(&off);
        }
        QuantityKind::PerMolecule => {
            let on = eval_energy(&cfg, spec)?;
            let off = eval_energy(&uncoupled()?, spec)?;
            let d = on.value - off.value;
            let rho = curve.options.rho.expect("checked at load");
            let pm = per_molecule(d, rho, cfg.length)?;
            let kt = K_B * cfg.temperature;
            r.values
                .extend([d, pm, kt, if kt > 0.0 { pm / kt } else { f64::NAN }]);
            r.note(&on);
            r.note(&off);
        }
        QuantityKind::IntegrandXi => r.values.push(integrand_xi(&cfg, x, spec)?),
        QuantityKind::IntegrandOmega => {
            let eta = curve.options.eta.expect("checked at load");
            r.values.push(integrand_omega(&cfg, x, eta)?);
        }
        QuantityKind::Transmission => r.values.push(transmission(&multilayer(&cfg)?, x)?),
        QuantityKind::Pressure => {
            let p = pressure_finite_difference(&cfg, curve.options.dl_rel * cfg.length, spec)?;
            r.values.extend([p.value, p.extrapolated, p.rel_change]);
        }
        QuantityKind::Polaritons => {
            let m = cfg.lorentz().expect("checked at load");
            for n in 1..=curve.options.bands {
                let mode = cavity_mode(x, n, cfg.length);
                let p = polaritons_for_mode(m.omega0, m.g, mode);
                r.values.extend([p.omega_plus, p.omega_minus, mode]);
            }
            let bulk = polaritons_for_mode(m.omega0, m.g, C * x);
            r.values.extend([bulk.omega_plus, bulk.omega_minus]);
        }
    }
    Ok(r)
}

/// Evaluates one curve; rows come back in grid order whatever the thread count.
pub fn run_curve(resolved: &Resolved, curve: &Curve) -> Result<Table, CavityError> {
    let cols = columns(curve);
    let rows: Vec<Row> = curve
        .values
        .par_iter()
        .map(
            |&x| match row(&resolved.cavity, curve, &resolved.quadrature, x) {
                // No usable partial value here (e.g. a pressure difference); keep the row as NaN.
                Err(CavityError::Convergence {
                    what, rel_error, ..
                }) => {
                    let mut values = vec![f64::NAN; cols.len()];
                    values[0] = x_value(curve, &resolved.cavity, x);
                    Ok(Row {
                        values,
                        warning: Some(format!("not converged: {what} (rel error {rel_error:.1e})")),
                        rel_error,
                    })
                }
                other => other,
            },
        )
        .collect::<Result<_, _>>()?;
    Ok(Table {
        curve: curve.name.clone(),
        quantity: curve.quantity,
        columns: cols,
        max_rel_error: rows.iter().map(|r| r.rel_error).fold(0.0, f64::max),
        warnings: rows.iter().map(|r| r.warning.clone()).collect(),
        rows: rows.into_iter().map(|r| r.values).collect(),
    })
}

pub fn run(resolved: &Resolved) -> Result<Vec<Table>, CavityError> {
    resolved
        .curves
        .iter()
        .map(|c| run_curve(resolved, c))
        .collect()
}
