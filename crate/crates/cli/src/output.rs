//! CSV and JSON tables with a metadata header.
//!
//! CSV headers are `#` comment lines; the resolved config is echoed between
//! `# config-begin` and `# config-end` so a table can be fed back to
//! `cavity run` and reproduce itself.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, Resolved};
use crate::scenario::Table;

pub const TOOL: &str = concat!("cavity ", env!("CARGO_PKG_VERSION"));
const CONFIG_BEGIN: &str = "# config-begin";
const CONFIG_END: &str = "# config-end";

/// Full double precision: 17 significant digits.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn file_name(resolved: &Resolved, table: &Table, format: Format) -> String {
    format!(
        "{}_{}.{}",
        resolved.scenario,
        table.curve,
        format.extension()
    )
}

pub fn csv(resolved: &Resolved, table: &Table) -> String {
    let mut out = String::new();
    let q = &resolved.quadrature;
    let _ = writeln!(out, "# tool: {TOOL}");
    let _ = writeln!(out, "# scenario: {}", resolved.scenario);
    if let Some(d) = &resolved.description {
        let _ = writeln!(out, "# description: {d}");
    }
    let _ = writeln!(out, "# curve: {} ({:?})", table.curve, table.quantity);
    for a in &resolved.assumed {
        let _ = writeln!(out, "# assumed: {a}");
    }
    let _ = writeln!(
        out,
        "# quadrature: rel_tol={:e} max_subdivisions={} matsubara_rel_cutoff={:e} max_matsubara_terms={}",
        q.rel_tol, q.max_subdivisions, q.matsubara_rel_cutoff, q.max_matsubara_terms
    );
    let _ = writeln!(out, "# max_rel_error_achieved: {:.3e}", table.max_rel_error);
    let _ = writeln!(out, "{CONFIG_BEGIN}");
    for line in resolved.to_toml().lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{CONFIG_END}");

    let partial = !table.converged();
    let mut header = table.columns.join(",");
    if partial {
        header.push_str(",warning");
    }
    let _ = writeln!(out, "{header}");
    for (row, warning) in table.rows.iter().zip(&table.warnings) {
        let mut line = row.iter().map(|&v| number(v)).collect::<Vec<_>>().join(",");
        if partial {
            line.push(',');
            if let Some(w) = warning {
                line.push('"');
                line.push_str(&w.replace('"', "'"));
                line.push('"');
            }
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

#[derive(Serialize)]
struct JsonTable<'a> {
    tool: &'a str,
    scenario: &'a str,
    description: Option<&'a str>,
    curve: &'a str,
    quantity: String,
    assumed: &'a [String],
    quadrature: &'a cavity_core::QuadratureSpec,
    max_rel_error_achieved: f64,
    config: String,
    columns: &'a [String],
    rows: &'a [Vec<f64>],
    warnings: &'a [Option<String>],
}

pub fn json(resolved: &Resolved, table: &Table) -> String {
    let doc = JsonTable {
        tool: TOOL,
        scenario: &resolved.scenario,
        description: resolved.description.as_deref(),
        curve: &table.curve,
        quantity: format!("{:?}", table.quantity),
        assumed: &resolved.assumed,
        quadrature: &resolved.quadrature,
        max_rel_error_achieved: table.max_rel_error,
        config: resolved.to_toml(),
        columns: &table.columns,
        rows: &table.rows,
        warnings: &table.warnings,
    };
    // Non-finite values (e.g. a ratio at T = 0) become null.
    serde_json::to_string_pretty(&doc).expect("table serializes") + "\n"
}

pub fn render(resolved: &Resolved, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => csv(resolved, table),
        Format::Json => json(resolved, table),
    }
}

pub fn write_all(
    resolved: &Resolved,
    tables: &[Table],
    dir: &Path,
    format: Format,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    tables
        .iter()
        .map(|t| {
            let path = dir.join(file_name(resolved, t, format));
            fs::write(&path, render(resolved, t, format))?;
            Ok(path)
        })
        .collect()
}

/// The echoed config of a previously written table, if `text` is one.
pub fn embedded_config(text: &str) -> Option<String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(trimmed).ok()?;
        return v.get("config")?.as_str().map(str::to_string);
    }
    let mut lines = text.lines().skip_while(|l| *l != CONFIG_BEGIN);
    lines.next()?;
    let mut config = String::new();
    for line in lines {
        if line == CONFIG_END {
            return Some(config);
        }
        config.push_str(line.strip_prefix("# ").or_else(|| line.strip_prefix('#'))?);
        config.push('\n');
    }
    None
}

/// Data rows of a CSV table; used to compare re-runs.
pub fn csv_rows(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}
