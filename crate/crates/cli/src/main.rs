use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use cavity_cli::config::{
    load_str, ConfigError, Format, MaterialSpec, QuantityKind, RawCavity, RawConfig, RawCurve,
    RawMaterial, RawMirror, RawSweep, Resolved, SweepVariable, WATER_EPS_INF,
};
use cavity_cli::output::{embedded_config, write_all};
use cavity_cli::scenario::{self, BUILTINS};
use cavity_cli::units::Quantity;
use cavity_core::{energy, CavityError};
use clap::{Parser, Subcommand, ValueEnum};

const OUTPUT_ENV: &str = "CAVITY_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "cavity",
    version,
    about = "Casimir-Lifshitz energy of Lorentz media in planar cavities"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: a config file, a built-in name, or a previously written table.
    Run {
        target: String,
        /// Output directory (default: config `output.dir`, then $CAVITY_OUTPUT_DIR, then ".").
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Overrides the quadrature relative tolerance.
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// One energy evaluation, printed to stdout.
    Energy {
        /// Gap length, e.g. "100nm".
        #[arg(long = "L", value_name = "LENGTH")]
        length: String,
        /// Coupling; a bare number is in units of omega0.
        #[arg(long, default_value = "0")]
        g: String,
        #[arg(long, value_enum, default_value = "pec")]
        material: Mirror,
        /// Temperature, e.g. "300K"; a bare number is kelvin.
        #[arg(long = "T", value_name = "TEMPERATURE", default_value = "0")]
        temperature: String,
        #[arg(long, default_value = "1 omegaL")]
        omega0: String,
        /// Molecular damping; a bare number is in units of omega0.
        #[arg(long, default_value = "0")]
        gamma: String,
        /// Background permittivity of the gap (1.77 for water).
        #[arg(long, default_value_t = 1.0)]
        eps_inf: f64,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: EnergyFormat,
        /// Include the imaginary-frequency integrand samples (JSON only).
        #[arg(long)]
        samples: bool,
    },
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mirror {
    Pec,
    Gold,
    GoldOnGlass,
    /// Gold on glass with a water background (eps_inf = 1.77).
    GoldWater,
}

enum Failure {
    Config(anyhow::Error),
    Convergence(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Run {
            target,
            output,
            format,
            rel_tol,
        } => run(&target, output, format, rel_tol),
        Command::Energy {
            length,
            g,
            material,
            temperature,
            omega0,
            gamma,
            eps_inf,
            rel_tol,
            format,
            samples,
        } => one_energy(EnergyArgs {
            length,
            g,
            material,
            temperature,
            omega0,
            gamma,
            eps_inf,
            rel_tol,
            format,
            samples,
        }),
        Command::ListScenarios => {
            for b in BUILTINS {
                let desc = load_str(b.source)
                    .ok()
                    .and_then(|r| r.description)
                    .unwrap_or_default();
                println!("{:<8} {desc}", b.name);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Convergence(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Config text for a built-in name, a TOML file, or a table written by `run`.
fn config_source(target: &str) -> anyhow::Result<String> {
    let path = Path::new(target);
    if !path.exists() {
        if let Some(b) = scenario::builtin(target) {
            return Ok(b.source.to_string());
        }
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {target}"))?;
    Ok(embedded_config(&text).unwrap_or(text))
}

fn run(
    target: &str,
    output: Option<PathBuf>,
    format: Option<FormatArg>,
    rel_tol: Option<f64>,
) -> Result<(), Failure> {
    let mut resolved = load_str(&config_source(target)?)?;
    if let Some(tol) = rel_tol {
        resolved.quadrature.rel_tol = tol;
        resolved
            .quadrature
            .validate()
            .map_err(|e| ConfigError::new("--rel-tol", e.to_string()))?;
    }
    if let Some(f) = format {
        resolved.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    let dir = output
        .or_else(|| resolved.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    // Output location is not part of the result; keep it out of the echoed config.
    resolved.output_dir = None;

    let tables = scenario::run(&resolved).map_err(|e| Failure::Config(e.into()))?;
    let paths = write_all(&resolved, &tables, &dir, resolved.format)
        .with_context(|| format!("writing to {}", dir.display()))?;
    for p in &paths {
        println!("{}", p.display());
    }
    let partial: Vec<_> = tables
        .iter()
        .filter(|t| !t.converged())
        .map(|t| t.curve.as_str())
        .collect();
    if partial.is_empty() {
        Ok(())
    } else {
        Err(Failure::Convergence(format!(
            "partial values written for curve(s) {}",
            partial.join(", ")
        )))
    }
}

struct EnergyArgs {
    length: String,
    g: String,
    material: Mirror,
    temperature: String,
    omega0: String,
    gamma: String,
    eps_inf: f64,
    rel_tol: Option<f64>,
    format: EnergyFormat,
    samples: bool,
}

/// A bare number becomes `unit`-relative text.
fn with_unit(value: &str, unit: &str) -> Quantity {
    match value.trim().parse::<f64>() {
        Ok(v) => Quantity::Text(format!("{v} {unit}")),
        Err(_) => Quantity::Text(value.to_string()),
    }
}

fn energy_config(a: &EnergyArgs) -> Result<Resolved, ConfigError> {
    let (mirror, eps_inf) = match a.material {
        Mirror::Pec => ("pec", a.eps_inf),
        Mirror::Gold => ("gold", a.eps_inf),
        Mirror::GoldOnGlass => ("gold_on_glass", a.eps_inf),
        Mirror::GoldWater => ("gold_on_glass", WATER_EPS_INF),
    };
    let raw = RawConfig {
        scenario: "energy".into(),
        description: None,
        assumed: Vec::new(),
        cavity: RawCavity {
            length: Quantity::Text(a.length.clone()),
            temperature: Some(with_unit(&a.temperature, "K")),
            gap: RawMaterial::Spec(MaterialSpec::Lorentz {
                omega0: Quantity::Text(a.omega0.clone()),
                g: Some(with_unit(&a.g, "omega0")),
                gamma: Some(with_unit(&a.gamma, "omega0")),
                eps_inf: Some(eps_inf),
            }),
            mirrors: Some(RawMirror::Preset(mirror.into())),
            top: None,
            bottom: None,
        },
        quadrature: None,
        output: None,
        curves: vec![RawCurve {
            name: "energy".into(),
            quantity: QuantityKind::Energy,
            sweep: RawSweep {
                variable: SweepVariable::G,
                values: Some(vec![with_unit(&a.g, "omega0")]),
                from: None,
                to: None,
                points: None,
                spacing: None,
            },
            set: Default::default(),
            options: Default::default(),
        }],
    };
    let mut r = cavity_cli::config::resolve_config(&raw)?;
    if let Some(tol) = a.rel_tol {
        r.quadrature.rel_tol = tol;
        r.quadrature
            .validate()
            .map_err(|e| ConfigError::new("--rel-tol", e.to_string()))?;
    }
    r.quadrature.record_samples = a.samples;
    Ok(r)
}

fn one_energy(a: EnergyArgs) -> Result<(), Failure> {
    let r = energy_config(&a)?;
    let cfg = &r.cavity;
    let spec = &r.quadrature;
    let on = match energy(cfg, spec) {
        Ok(v) => v,
        Err(e @ CavityError::Convergence { .. }) => {
            return Err(Failure::Convergence(e.to_string()))
        }
        Err(e) => return Err(Failure::Config(e.into())),
    };
    let off = if cfg.lorentz().is_some_and(|m| m.g > 0.0) {
        let mut spec0 = *spec;
        spec0.record_samples = false;
        let cfg0 = cfg
            .with_coupling(0.0)
            .map_err(|e| Failure::Config(e.into()))?;
        Some(energy(&cfg0, &spec0).map_err(|e| match e {
            CavityError::Convergence { .. } => Failure::Convergence(e.to_string()),
            e => Failure::Config(e.into()),
        })?)
    } else {
        None
    };
    let m = cfg.lorentz().expect("gap is Lorentz");
    match a.format {
        EnergyFormat::Json => {
            let doc = serde_json::json!({
                "length_m": cfg.length,
                "temperature_K": cfg.temperature,
                "omega0_rad_per_s": m.omega0,
                "g_rad_per_s": m.g,
                "result": on,
                "uncoupled": off,
                "delta_u": off.as_ref().map(|o| on.u_per_area - o.u_per_area),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializes")
            );
        }
        EnergyFormat::Text => {
            let label = if cfg.temperature > 0.0 { "F" } else { "U" };
            println!(
                "L = {:e} m, T = {} K, omega0 = {:e} rad/s, g/omega0 = {}",
                cfg.length,
                cfg.temperature,
                m.omega0,
                m.g / m.omega0
            );
            println!(
                "{label} = {:.10e} J/m^2 (rel error {:.1e})",
                on.u_per_area, on.rel_tol_achieved
            );
            if let Some(n) = on.matsubara_terms_used {
                println!("matsubara terms = {n}");
            }
            if let Some(o) = &off {
                let d = on.u_per_area - o.u_per_area;
                println!("{label}(g = 0) = {:.10e} J/m^2", o.u_per_area);
                println!(
                    "delta = {:.10e} J/m^2, delta/|{label}(0)| = {:.6e}",
                    d,
                    d / o.u_per_area.abs()
                );
            }
        }
    }
    Ok(())
}
