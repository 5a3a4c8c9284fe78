//! The five catalog field kinds, their parameters and default instances.

use serde::Serialize;
use vfm_core::field::FieldSpec;

use crate::config::{DomainConfig, FieldConfig, Point};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    pub description: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub formula: &'static str,
    pub params: Vec<ParamSchema>,
    /// Default instance, in the config's field syntax.
    pub example: FieldConfig,
}

fn param(name: &'static str, ty: &'static str, description: &'static str) -> ParamSchema {
    ParamSchema { name, ty, description }
}

fn domain() -> ParamSchema {
    param("domain", "{min: [f64; 2], max: [f64; 2]}", "box Ω, default [-1, 1]²")
}

pub fn list_catalog() -> Vec<CatalogEntry> {
    let d = DomainConfig::default();
    vec![
        CatalogEntry {
            kind: "constant",
            formula: "v(x) = v₀",
            params: vec![param("direction", "[f64; 2]", "the constant vector v₀"), domain()],
            example: FieldConfig::Constant { direction: [0.6, 0.8], domain: d },
        },
        CatalogEntry {
            kind: "rotation",
            formula: "v(x) = (-x₂, x₁)",
            params: vec![domain()],
            example: FieldConfig::Rotation { domain: d },
        },
        CatalogEntry {
            kind: "shear",
            formula: "v(x) = (1, x₁^k)",
            params: vec![param("power", "u32 ≥ 1", "monomial degree k"), domain()],
            example: FieldConfig::Shear { power: 2, domain: d },
        },
        CatalogEntry {
            kind: "flat",
            formula: "v(x) = (1, exp(-1/|x₁|^γ)·sgn x₁)",
            params: vec![param("gamma", "f64 in (0, 1)", "flatness exponent γ"), domain()],
            example: FieldConfig::Flat { gamma: 0.5, domain: d },
        },
        CatalogEntry {
            kind: "grid_sampled",
            formula: "bilinear interpolation of lattice values",
            params: vec![
                param("path", "string, optional", "CSV with header x,y,vx,vy on a rectangular lattice"),
                param("spacing", "f64 > 0", "lattice spacing of the generated noise field"),
                param("amplitude", "f64", "noise amplitude a in v = (1 + a·n₁, a·n₂)"),
                param("seed", "u64", "noise seed"),
                domain(),
            ],
            example: FieldConfig::GridSampled { path: None, spacing: 0.125, amplitude: 0.3, seed: 0, domain: d },
        },
    ]
}

/// Default instance of every catalog kind.
pub fn catalog_fields() -> Result<Vec<FieldSpec>, CliError> {
    list_catalog().iter().map(|e| e.example.build()).collect()
}

/// The 3 × 3 base points `{-0.6, 0.2, 0.7}²` used by the catalog audits.
pub fn base_points() -> Vec<Point> {
    let coords = [-0.6, 0.2, 0.7];
    coords.iter().flat_map(|&y| coords.iter().map(move |&x| [x, y])).collect()
}

pub fn render_text(entries: &[CatalogEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!("{:<13} {}\n", e.kind, e.formula));
        for p in &e.params {
            out.push_str(&format!("    {:<10} {:<32} {}\n", p.name, p.ty, p.description));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_kinds_that_build() {
        let entries = list_catalog();
        assert_eq!(entries.len(), 5);
        let fields = catalog_fields().unwrap();
        let kinds: Vec<_> = fields.iter().map(|f| f.kind.name()).collect();
        assert_eq!(kinds, ["constant", "rotation", "shear", "flat", "grid_sampled"]);
    }

    #[test]
    fn json_examples_parse_as_field_configs() {
        let json = serde_json::to_value(list_catalog()).unwrap();
        for entry in json.as_array().unwrap() {
            let cfg: FieldConfig = serde_json::from_value(entry["example"].clone()).unwrap();
            assert_eq!(cfg.label(), entry["kind"].as_str().unwrap());
            cfg.build().unwrap();
        }
    }

    #[test]
    fn base_points_avoid_the_axes() {
        let pts = base_points();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|p| p[0] != 0.0 && p[1] != 0.0));
    }
}
