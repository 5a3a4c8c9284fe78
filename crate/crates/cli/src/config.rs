//! Experiment configuration, parsed from JSON with unknown keys rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vfm_core::angular::{BalanceRegime, DecayKind, IntegralKind, TauGrid};
use vfm_core::covering::FamilySampler;
use vfm_core::field::{BoxDomain, FieldKind, FieldSpec, SampledGrid};
use vfm_core::operators::{OrientationRule, ScaleWeights};

use crate::catalog;
use crate::error::CliError;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub min: Point,
    pub max: Point,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { min: [-1.0, -1.0], max: [1.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Constant {
        direction: Point,
        #[serde(default)]
        domain: DomainConfig,
    },
    Rotation {
        #[serde(default)]
        domain: DomainConfig,
    },
    Shear {
        power: u32,
        #[serde(default)]
        domain: DomainConfig,
    },
    Flat {
        gamma: f64,
        #[serde(default)]
        domain: DomainConfig,
    },
    /// Pseudo-random lattice field, or a lattice read from a `x,y,vx,vy` CSV when `path` is set.
    GridSampled {
        #[serde(default)]
        path: Option<String>,
        #[serde(default = "default_spacing")]
        spacing: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        domain: DomainConfig,
    },
    /// Rotation field on the unit box centered at `(0, 40)`.
    FarRotation,
}

fn default_spacing() -> f64 {
    0.125
}

fn default_amplitude() -> f64 {
    0.3
}

impl FieldConfig {
    pub fn label(&self) -> String {
        match self {
            FieldConfig::Constant { .. } => "constant",
            FieldConfig::Rotation { .. } => "rotation",
            FieldConfig::Shear { .. } => "shear",
            FieldConfig::Flat { .. } => "flat",
            FieldConfig::GridSampled { .. } => "grid_sampled",
            FieldConfig::FarRotation => "far_rotation",
        }
        .to_string()
    }

    pub fn build(&self) -> Result<FieldSpec, CliError> {
        let label = self.label();
        let dom = |d: &DomainConfig| BoxDomain::new(d.min, d.max);
        let spec = match self {
            FieldConfig::Constant { direction, domain } => FieldSpec::new(FieldKind::Constant(*direction), dom(domain)?, label)?,
            FieldConfig::Rotation { domain } => FieldSpec::new(FieldKind::Rotation, dom(domain)?, label)?,
            FieldConfig::Shear { power, domain } => FieldSpec::new(FieldKind::Shear { power: *power }, dom(domain)?, label)?,
            FieldConfig::Flat { gamma, domain } => FieldSpec::new(FieldKind::Flat { gamma: *gamma }, dom(domain)?, label)?,
            FieldConfig::GridSampled { path: Some(path), domain, .. } => {
                let grid = SampledGrid::from_csv_path(path)?;
                FieldSpec::new(FieldKind::GridSampled(grid), dom(domain)?, label)?
            }
            FieldConfig::GridSampled { path: None, spacing, amplitude, seed, domain } => {
                FieldSpec::noise(dom(domain)?, *spacing, *amplitude, *seed, label)?
            }
            FieldConfig::FarRotation => vfm_core::covering::far_rotation_field(),
        };
        Ok(spec)
    }
}

fn rotation() -> FieldConfig {
    FieldConfig::Rotation { domain: DomainConfig::default() }
}

/// Random or structured test function on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    /// Unit values on the listed `(row, col)` cells.
    Cells { cells: Vec<[usize; 2]> },
    /// Each cell nonzero with probability `density`, value uniform on `[0, 1)`.
    SparseRandom { density: f64 },
    /// Uniform on `[-1, 1)` in every cell.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditDecayParams {
    pub field: FieldConfig,
    pub points: Vec<Point>,
    pub eps: Vec<f64>,
    pub n_t: usize,
    pub kind: DecayKind,
    pub tau_grid: TauGrid,
    /// Integral conditions whose Markov transfer is checked on every profile.
    pub markov: Vec<IntegralKind>,
}

impl Default for AuditDecayParams {
    fn default() -> Self {
        Self {
            field: rotation(),
            points: vec![[1.0, 0.0]],
            eps: vec![0.5],
            n_t: 1 << 16,
            kind: DecayKind::Power { c0: 1.0 },
            tau_grid: TauGrid { lo: 1e-2, hi: 1.0 - 1e-6, count: 64 },
            markov: vec![IntegralKind::Power { sigma: 0.5 }, IntegralKind::LogPoly { q: 1.5 }],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoublingParams {
    pub field: FieldConfig,
    pub points: Vec<Point>,
    pub eps: Vec<f64>,
    pub n_t: usize,
    pub p: f64,
    /// Decay constant; fitted from the log-polynomial sublevel condition when absent.
    pub constant: Option<f64>,
    pub tau_grid: TauGrid,
}

impl Default for DoublingParams {
    fn default() -> Self {
        Self {
            field: rotation(),
            points: catalog::base_points(),
            eps: vec![0.25, 0.125, 0.0625],
            n_t: 1024,
            p: 2.0,
            constant: None,
            tau_grid: TauGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BalanceParams {
    pub regimes: Vec<BalanceRegime>,
    pub tdelta: Vec<f64>,
    pub residual_tol: f64,
}

impl Default for BalanceParams {
    fn default() -> Self {
        let e = std::f64::consts::E;
        Self {
            regimes: vec![BalanceRegime::ExpLog { sigma: 1.0, c1: 1.0 }, BalanceRegime::LogPoly { p: 2.0 }],
            tdelta: vec![e, e * e, e * e * e, 10.0, 1e3, 1e6],
            residual_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSplitParams {
    pub field: FieldConfig,
    pub points: Vec<Point>,
    pub eps: Vec<f64>,
    /// Values of `a = εT/|v(x₀)|`.
    pub a: Vec<f64>,
    pub n_t: usize,
    pub tau_grid: TauGrid,
}

impl Default for KernelSplitParams {
    fn default() -> Self {
        Self {
            field: rotation(),
            points: catalog::base_points(),
            eps: vec![0.5, 0.25],
            a: vec![10.0, 100.0],
            n_t: 1024,
            tau_grid: TauGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LpParams {
    pub grid_n: usize,
    pub function: FunctionConfig,
    pub tolerance: f64,
}

impl Default for LpParams {
    fn default() -> Self {
        Self { grid_n: 256, function: FunctionConfig::Uniform, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    /// `M_v` over dyadic scales on one `Ω_{ε,s}` bin, or on the whole grid when `bin` is absent.
    Mv {
        eps0: f64,
        k_max: u32,
        n_t: usize,
        #[serde(default)]
        bin: Option<i32>,
    },
    /// `M̃_{v,δ,θ}` over a field-aligned candidate family.
    Tilde { delta: f64, theta: f64, family: FamilyConfig },
    /// `M_{v,δ,w}` under the size caps.
    LaceyLi { delta: f64, w: f64, b: f64, family: FamilyConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub stride: usize,
    pub orientation: OrientationRule,
    pub lengths: Vec<f64>,
    pub limit: Option<usize>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            stride: 8,
            orientation: OrientationRule::FieldAligned { count: 3, spread: 0.004 },
            lengths: vec![0.3, 0.6],
            limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximalParams {
    pub field: FieldConfig,
    pub grid_n: usize,
    pub function: FunctionConfig,
    pub operator: OperatorConfig,
}

impl Default for MaximalParams {
    fn default() -> Self {
        Self {
            field: rotation(),
            grid_n: 64,
            function: FunctionConfig::SparseRandom { density: 0.05 },
            operator: OperatorConfig::Mv { eps0: 0.25, k_max: 3, n_t: 64, bin: None },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeakTypeParams {
    pub field: FieldConfig,
    pub grid_n: usize,
    pub function: FunctionConfig,
    pub delta: f64,
    pub theta: f64,
    pub family: FamilyConfig,
    /// Number of log-spaced λ values in the exported curve.
    pub lambdas: usize,
}

impl Default for WeakTypeParams {
    fn default() -> Self {
        Self {
            field: FieldConfig::FarRotation,
            grid_n: 128,
            function: FunctionConfig::Cells { cells: vec![[68, 68]] },
            delta: 0.5,
            theta: 0.009,
            family: FamilyConfig::default(),
            lambdas: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoveringParams {
    pub families: usize,
    pub delta: f64,
    pub theta: f64,
    pub sampler: FamilySampler,
}

impl Default for CoveringParams {
    fn default() -> Self {
        Self { families: 1, delta: 0.3, theta: 0.009, sampler: FamilySampler::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleSumParams {
    pub grid_n: usize,
    pub function: FunctionConfig,
    pub weights: ScaleWeights,
    pub j_max: u32,
    pub s_min: i32,
    pub s_max: i32,
}

impl Default for ScaleSumParams {
    fn default() -> Self {
        Self {
            grid_n: 128,
            function: FunctionConfig::Uniform,
            weights: ScaleWeights::LogPoly { p: 2.0 },
            j_max: 8,
            s_min: -8,
            s_max: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Scenario {
    AuditDecay(AuditDecayParams),
    Doubling(DoublingParams),
    Balance(BalanceParams),
    KernelSplit(KernelSplitParams),
    Lp(LpParams),
    Maximal(MaximalParams),
    WeakType(WeakTypeParams),
    Covering(CoveringParams),
    ScaleSum(ScaleSumParams),
}

pub const SCENARIOS: [&str; 9] =
    ["audit-decay", "doubling", "balance", "kernel-split", "lp", "maximal", "weak-type", "covering", "scale-sum"];

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::AuditDecay(_) => "audit-decay",
            Scenario::Doubling(_) => "doubling",
            Scenario::Balance(_) => "balance",
            Scenario::KernelSplit(_) => "kernel-split",
            Scenario::Lp(_) => "lp",
            Scenario::Maximal(_) => "maximal",
            Scenario::WeakType(_) => "weak-type",
            Scenario::Covering(_) => "covering",
            Scenario::ScaleSum(_) => "scale-sum",
        }
    }

    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "audit-decay" => Scenario::AuditDecay(Default::default()),
            "doubling" => Scenario::Doubling(Default::default()),
            "balance" => Scenario::Balance(Default::default()),
            "kernel-split" => Scenario::KernelSplit(Default::default()),
            "lp" => Scenario::Lp(Default::default()),
            "maximal" => Scenario::Maximal(Default::default()),
            "weak-type" => Scenario::WeakType(Default::default()),
            "covering" => Scenario::Covering(Default::default()),
            "scale-sum" => Scenario::ScaleSum(Default::default()),
            _ => return None,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output_dir: Option<String>,
    scenario: serde_json::Map<String, serde_json::Value>,
}

fn located(path: &str, e: serde_json::Error) -> CliError {
    CliError::Usage(format!("invalid config at `{path}`: {e}"))
}

fn parse_params<T: serde::de::DeserializeOwned>(params: serde_json::Map<String, serde_json::Value>) -> Result<T, CliError> {
    serde_path_to_error::deserialize(serde_json::Value::Object(params)).map_err(|e| {
        let path = match e.path().to_string() {
            p if p == "." => "scenario".to_string(),
            p => format!("scenario.{p}"),
        };
        located(&path, e.into_inner())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    pub scenario: Scenario,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self { seed, output_dir: None, scenario }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| located(&e.path().to_string(), e.into_inner()))?;
        let mut params = raw.scenario;
        let name = match params.remove("name") {
            Some(serde_json::Value::String(name)) => name,
            _ => return Err(CliError::Usage("invalid config at `scenario.name`: missing scenario name".into())),
        };
        let scenario = match name.as_str() {
            "audit-decay" => Scenario::AuditDecay(parse_params(params)?),
            "doubling" => Scenario::Doubling(parse_params(params)?),
            "balance" => Scenario::Balance(parse_params(params)?),
            "kernel-split" => Scenario::KernelSplit(parse_params(params)?),
            "lp" => Scenario::Lp(parse_params(params)?),
            "maximal" => Scenario::Maximal(parse_params(params)?),
            "weak-type" => Scenario::WeakType(parse_params(params)?),
            "covering" => Scenario::Covering(parse_params(params)?),
            "scale-sum" => Scenario::ScaleSum(parse_params(params)?),
            other => {
                return Err(CliError::Usage(format!(
                    "invalid config at `scenario.name`: unknown scenario `{other}`, expected one of {}",
                    SCENARIOS.join(", ")
                )))
            }
        };
        Ok(Self { seed: raw.seed, output_dir: raw.output_dir, scenario })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, which has a fixed key order.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for name in SCENARIOS {
            let cfg = ExperimentConfig::new(Scenario::default_for(name).unwrap(), 3);
            let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.hash(), cfg.hash());
            assert_eq!(back.scenario.name(), name);
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = ExperimentConfig::from_json(r#"{"scenario": {"name": "balance", "tdeltas": [2.0]}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tdeltas"), "{msg}");
        let err = ExperimentConfig::from_json(r#"{"scenario": {"name": "lp"}, "sede": 1}"#).unwrap_err();
        assert!(err.to_string().contains("sede"));
        let err =
            ExperimentConfig::from_json(r#"{"scenario": {"name": "doubling", "field": {"kind": "shear", "power": 2, "pow": 1}}}"#)
                .unwrap_err();
        assert!(err.to_string().contains("scenario.field"), "{err}");
    }

    #[test]
    fn partial_params_take_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"seed": 9, "scenario": {"name": "covering", "families": 3}}"#).unwrap();
        let Scenario::Covering(p) = cfg.scenario else { panic!() };
        assert_eq!(p.families, 3);
        assert_eq!(p.sampler, FamilySampler::default());
    }

    #[test]
    fn hash_ignores_formatting() {
        let compact = r#"{"seed":1,"scenario":{"name":"balance","regimes":[{"kind":"logpoly","p":2.0}],"tdelta":[10.0]}}"#;
        let spaced = "{ \"seed\": 1,\n  \"scenario\": { \"name\": \"balance\", \"tdelta\": [10.0], \"regimes\": [{\"p\": 2.0, \"kind\": \"logpoly\"}] } }";
        let a = ExperimentConfig::from_json(compact).unwrap();
        let b = ExperimentConfig::from_json(spaced).unwrap();
        assert_eq!(a.hash().len(), 64);
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), ExperimentConfig::new(a.scenario.clone(), 2).hash());
    }
}
