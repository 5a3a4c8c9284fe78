//! Flattens result JSON files into plot-ready CSV.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;
use crate::manifest::Outputs;
use crate::runner::{CERTIFICATE_SCHEMA, DECAY_SCHEMA, OMEGA_SCHEMA, WEAK_TYPE_SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Decay,
    WeakType,
    Omega,
    Certificate,
}

impl PlotKind {
    pub fn schema(self) -> &'static str {
        match self {
            PlotKind::Decay => DECAY_SCHEMA,
            PlotKind::WeakType => WEAK_TYPE_SCHEMA,
            PlotKind::Omega => OMEGA_SCHEMA,
            PlotKind::Certificate => CERTIFICATE_SCHEMA,
        }
    }

    pub fn from_schema(schema: &str) -> Option<Self> {
        [PlotKind::Decay, PlotKind::WeakType, PlotKind::Omega, PlotKind::Certificate]
            .into_iter()
            .find(|k| k.schema() == schema)
    }

    fn file_name(self) -> &'static str {
        match self {
            PlotKind::Decay => "decay_plot.csv",
            PlotKind::WeakType => "weak_type_plot.csv",
            PlotKind::Omega => "omega_plot.csv",
            PlotKind::Certificate => "certificate_plot.csv",
        }
    }
}

fn malformed(what: &str) -> CliError {
    CliError::Usage(format!("malformed result: missing or invalid `{what}`"))
}

fn field_str(v: &Value, key: &str) -> Result<String, CliError> {
    let x = v.get(key).ok_or_else(|| malformed(key))?;
    match x {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(malformed(key)),
    }
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, CliError> {
    v.get(key).and_then(Value::as_array).ok_or_else(|| malformed(key))
}

/// Reads the result at `input`, checks its schema tag against `kind` (or
/// infers the kind from it) and writes one CSV into `out_dir`.
pub fn emit_plotdata(input: &Path, kind: Option<PlotKind>, out_dir: &Path) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(input).map_err(CliError::io(format!("reading {}", input.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not JSON: {e}", input.display())))?;
    let found = value.get("schema").and_then(Value::as_str).unwrap_or("<none>");
    let kind = match kind {
        Some(k) if k.schema() == found => k,
        Some(k) => return Err(CliError::Usage(format!("schema mismatch: expected {}, found {found}", k.schema()))),
        None => PlotKind::from_schema(found)
            .ok_or_else(|| CliError::Usage(format!("schema mismatch: {found} has no plot layout")))?,
    };
    let (header, rows): (&[&str], Vec<Vec<String>>) = match kind {
        PlotKind::Decay => (
            &["tau", "ratio", "envelope"],
            array(&value, "sweep")?
                .iter()
                .map(|r| Ok(vec![field_str(r, "tau")?, field_str(r, "ratio")?, field_str(r, "envelope")?]))
                .collect::<Result<_, CliError>>()?,
        ),
        PlotKind::WeakType => (
            &["lambda", "ratio"],
            array(&value, "curve")?
                .iter()
                .map(|r| Ok(vec![field_str(r, "lambda")?, field_str(r, "ratio")?]))
                .collect::<Result<_, CliError>>()?,
        ),
        PlotKind::Omega => {
            let mut rows = Vec::new();
            for bin in array(&value, "bins")? {
                let s = field_str(bin, "s")?;
                for cell in array(bin, "cells")? {
                    let rc = cell.as_array().filter(|a| a.len() == 2).ok_or_else(|| malformed("cells"))?;
                    rows.push(vec![rc[0].to_string(), rc[1].to_string(), s.clone()]);
                }
            }
            rows.sort_by_key(|r| (r[0].parse::<usize>().unwrap_or(0), r[1].parse::<usize>().unwrap_or(0)));
            (&["row", "col", "s"], rows)
        }
        PlotKind::Certificate => (
            &["member", "contained_in", "slack"],
            array(&value, "containment")?
                .iter()
                .map(|r| Ok(vec![field_str(r, "member")?, field_str(r, "contained_in")?, field_str(r, "slack")?]))
                .collect::<Result<_, CliError>>()?,
        ),
    };
    let mut out = Outputs::new(out_dir)?;
    out.write_csv(kind.file_name(), header, rows)?;
    Ok(out_dir.join(kind.file_name()))
}
