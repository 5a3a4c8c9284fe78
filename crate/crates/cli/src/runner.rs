//! Scenario execution: each scenario writes its results through [`Outputs`]
//! and returns the list of failed checks.

use std::path::PathBuf;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use vfm_core::angular::{
    angular_profile, balance_sign_changes, balance_tau, decay_sweep, doubling_check, fit_decay_constant, integral_condition,
    kernel_split_audit, markov_transfer, AngularProfile, BalanceRegime, DecayKind, IntegralValue,
};
use vfm_core::covering::{covering_certificate, far_rotation_grid, sample_family, CoveringCertificate};
use vfm_core::field::FieldSpec;
use vfm_core::geometry::{omega_partition, GridSpec, RasterMask};
use vfm_core::operators::{
    lambda_log_bracket, laceyli_maximal, lp_decompose, maximal_mv, scale_sum_audit, tilde_maximal, weak_type_ratio,
    weak_type_sup, CandidateFamily, DyadicScales, FamilySpec, GridFunction, LaceyLiCaps, WidthRule,
};
use vfm_core::Error;

use crate::config::*;
use crate::error::CliError;
use crate::manifest::{now_unix_ms, Outputs, RunManifest, GENERATOR, MANIFEST_FILE};

pub const DECAY_SCHEMA: &str = "vfm.decay-report/1";
pub const DOUBLING_SCHEMA: &str = "vfm.doubling/1";
pub const BALANCE_SCHEMA: &str = "vfm.balance/1";
pub const KERNEL_SCHEMA: &str = "vfm.kernel-split/1";
pub const LP_SCHEMA: &str = "vfm.lp/1";
pub const MAXIMAL_SCHEMA: &str = "vfm.maximal/1";
pub const OMEGA_SCHEMA: &str = "vfm.omega/1";
pub const WEAK_TYPE_SCHEMA: &str = "vfm.weak-type/1";
pub const CERTIFICATE_SCHEMA: &str = "vfm.certificate/1";
pub const COVERING_SCHEMA: &str = "vfm.covering/1";
pub const SCALE_SUM_SCHEMA: &str = "vfm.scale-sum/1";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub workers: usize,
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

type Failures = Vec<String>;

fn num(x: f64) -> String {
    format!("{x}")
}

/// Runs the scenario on a dedicated pool of `workers` threads, writes its
/// outputs and the manifest, and returns the manifest.
pub fn run_scenario(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    if opts.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let started = now_unix_ms();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", opts.workers)))?;
    let mut out = Outputs::new(&opts.out_dir)?;
    out.write_bytes("config.json", format!("{}\n", config.to_json()).as_bytes())?;
    let hash = config.hash();
    let failures = pool.install(|| dispatch(config, &hash, &mut out))?;
    let manifest = RunManifest {
        scenario: config.scenario.name().to_string(),
        config_hash: hash,
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        generator: GENERATOR.to_string(),
        workers: opts.workers,
        started_unix_ms: started,
        finished_unix_ms: now_unix_ms(),
        passed: failures.is_empty(),
        failures,
        files: out.into_files(),
    };
    let path = opts.out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(CliError::io(format!("writing {}", path.display())))?;
    Ok(manifest)
}

fn dispatch(config: &ExperimentConfig, hash: &str, out: &mut Outputs) -> Result<Failures, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &config.scenario {
        Scenario::AuditDecay(p) => audit_decay(p, out),
        Scenario::Doubling(p) => doubling(p, out),
        Scenario::Balance(p) => balance(p, out),
        Scenario::KernelSplit(p) => kernel_split(p, out),
        Scenario::Lp(p) => lp(p, &mut rng, out),
        Scenario::Maximal(p) => maximal(p, &mut rng, out),
        Scenario::WeakType(p) => weak_type(p, &mut rng, out),
        Scenario::Covering(p) => covering(p, hash, &mut rng, out),
        Scenario::ScaleSum(p) => scale_sum(p, &mut rng, out),
    }
}

/// Profiles for every `(x, ε)` pair, `x` varying fastest.
pub fn profiles(field: &FieldSpec, points: &[Point], eps: &[f64], n_t: usize) -> Result<Vec<AngularProfile>, CliError> {
    let pairs: Vec<(Point, f64)> = eps.iter().flat_map(|&e| points.iter().map(move |&x| (x, e))).collect();
    Ok(pairs.par_iter().map(|&(x, e)| angular_profile(field, x, e, n_t)).collect::<Result<Vec<_>, _>>()?)
}

fn split_degenerate(all: Vec<AngularProfile>) -> (Vec<AngularProfile>, Vec<(Point, f64)>) {
    let (live, dead): (Vec<_>, Vec<_>) = all.into_iter().partition(|p| !p.is_degenerate());
    (live, dead.into_iter().map(|p| (p.x, p.eps)).collect())
}

fn audit_decay(p: &AuditDecayParams, out: &mut Outputs) -> Result<Failures, CliError> {
    let field = p.field.build()?;
    let (live, degenerate) = split_degenerate(profiles(&field, &p.points, &p.eps, p.n_t)?);
    if live.is_empty() {
        return Err(CliError::Core(Error::DegenerateProfile));
    }
    let report = fit_decay_constant(&live, p.kind, &p.tau_grid)?;
    let sweep = decay_sweep(&live, p.kind, &p.tau_grid)?;
    let mut failures = Vec::new();
    let mut markov = Vec::new();
    for profile in &live {
        for &kind in &p.markov {
            let value = integral_condition(profile, kind)?;
            let checked = match value {
                IntegralValue::Finite(a) => match markov_transfer(profile, kind, a, &p.tau_grid) {
                    Ok(_) => true,
                    Err(e @ Error::Violation { .. }) => {
                        failures.push(format!("x = {:?}, ε = {}: {e}", profile.x, profile.eps));
                        true
                    }
                    Err(e) => return Err(e.into()),
                },
                IntegralValue::Divergent => false,
            };
            markov.push(json!({"x": profile.x, "eps": profile.eps, "kind": kind, "integral": value, "checked": checked}));
        }
    }
    let body = json!({
        "field": field.label,
        "report": report,
        "degenerate": degenerate,
        "markov": markov,
        "sweep": sweep,
    });
    out.write_json("decay_report.json", &Versioned { schema: DECAY_SCHEMA, body: &body })?;
    out.write_csv(
        "sweep.csv",
        &["x1", "x2", "eps", "tau", "measure", "envelope", "ratio"],
        sweep.iter().map(|r| [r.x[0], r.x[1], r.eps, r.tau, r.measure, r.envelope, r.ratio].map(num)),
    )?;
    Ok(failures)
}

fn doubling(p: &DoublingParams, out: &mut Outputs) -> Result<Failures, CliError> {
    let field = p.field.build()?;
    let constant = match p.constant {
        Some(c) => c,
        None => {
            let (live, _) = split_degenerate(profiles(&field, &p.points, &p.eps, p.n_t)?);
            if live.is_empty() {
                return Err(CliError::Usage("every profile is degenerate; set `constant` explicitly".into()));
            }
            fit_decay_constant(&live, DecayKind::LogPoly { p: p.p }, &p.tau_grid)?.c_min
        }
    };
    let pairs: Vec<(Point, f64)> = p.eps.iter().flat_map(|&e| p.points.iter().map(move |&x| (x, e))).collect();
    let records = pairs
        .par_iter()
        .map(|&(x, e)| doubling_check(&field, x, e, constant, p.p, p.n_t))
        .collect::<Result<Vec<_>, _>>()?;
    let failures: Failures = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("doubling at x = {:?}, ε = {}: ratio {} > 1/τ₀ = {}", r.x, r.eps, r.ratio(), 1.0 / r.tau0))
        .collect();
    let body = json!({"field": field.label, "constant": constant, "p": p.p, "records": records});
    out.write_json("doubling.json", &Versioned { schema: DOUBLING_SCHEMA, body: &body })?;
    out.write_csv(
        "doubling.csv",
        &["x1", "x2", "eps", "sup_eps", "sup_2eps", "ratio", "tau0", "pass"],
        records.iter().map(|r| {
            let mut row = [r.x[0], r.x[1], r.eps, r.sup_eps, r.sup_2eps, r.ratio(), r.tau0].map(num).to_vec();
            row.push(r.pass.to_string());
            row
        }),
    )?;
    Ok(failures)
}

fn regime_name(r: &BalanceRegime) -> String {
    match *r {
        BalanceRegime::ExpLog { sigma, c1 } => format!("explog(sigma={sigma},c1={c1})"),
        BalanceRegime::LogPoly { p } => format!("logpoly(p={p})"),
    }
}

fn balance(p: &BalanceParams, out: &mut Outputs) -> Result<Failures, CliError> {
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for regime in &p.regimes {
        for &td in &p.tdelta {
            let root = balance_tau(*regime, td)?;
            let sign_changes = balance_sign_changes(*regime, td, 4096)?;
            if !(root.residual.abs() < p.residual_tol) {
                failures.push(format!("{} at Tδ = {td}: residual {} ≥ {}", regime_name(regime), root.residual, p.residual_tol));
            }
            if sign_changes != 1 {
                failures.push(format!("{} at Tδ = {td}: {sign_changes} sign changes", regime_name(regime)));
            }
            rows.push(json!({
                "regime": regime,
                "tdelta": td,
                "tau": root.tau,
                "residual": root.residual,
                "iterations": root.iterations,
                "sign_changes": sign_changes,
            }));
        }
    }
    out.write_json("balance.json", &Versioned { schema: BALANCE_SCHEMA, body: &json!({ "roots": rows }) })?;
    out.write_csv(
        "balance.csv",
        &["regime", "tdelta", "tau", "residual", "iterations"],
        rows.iter().map(|r| {
            vec![
                regime_name(&serde_json::from_value(r["regime"].clone()).expect("regime round-trips")),
                r["tdelta"].to_string(),
                r["tau"].to_string(),
                r["residual"].to_string(),
                r["iterations"].to_string(),
            ]
        }),
    )?;
    Ok(failures)
}

fn kernel_split(p: &KernelSplitParams, out: &mut Outputs) -> Result<Failures, CliError> {
    let field = p.field.build()?;
    let all = profiles(&field, &p.points, &p.eps, p.n_t)?;
    let mut failures = Vec::new();
    let mut skipped = Vec::new();
    let mut records = Vec::new();
    for profile in &all {
        let v0 = profile.v_at_x[0].hypot(profile.v_at_x[1]);
        for &a in &p.a {
            if profile.is_degenerate() {
                skipped.push(json!({"x": profile.x, "eps": profile.eps, "a": a, "reason": "degenerate profile"}));
                continue;
            }
            let t = a * v0 / profile.eps;
            match kernel_split_audit(profile, t, v0, &p.tau_grid) {
                Ok(rec) => records.push((profile.x, profile.eps, rec)),
                Err(Error::Regime(reason)) => skipped.push(json!({"x": profile.x, "eps": profile.eps, "a": a, "reason": reason})),
                Err(e @ Error::Violation { .. }) => failures.push(format!("x = {:?}, ε = {}, a = {a}: {e}", profile.x, profile.eps)),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let body = json!({
        "field": field.label,
        "checked": records.len(),
        "skipped": skipped,
        "records": records.iter().map(|(x, e, r)| json!({"x": x, "eps": e, "record": r})).collect::<Vec<_>>(),
    });
    out.write_json("kernel_split.json", &Versioned { schema: KERNEL_SCHEMA, body: &body })?;
    out.write_csv(
        "kernel_split.csv",
        &["x1", "x2", "eps", "a", "tau", "lhs", "term1", "term2"],
        records.iter().flat_map(|(x, e, r)| {
            r.rows.iter().map(move |row| [x[0], x[1], *e, r.a, row.tau, row.lhs, row.term1, row.term2].map(num))
        }),
    )?;
    Ok(failures)
}

pub fn make_function(cfg: &FunctionConfig, grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<GridFunction, CliError> {
    let values = match cfg {
        FunctionConfig::Cells { cells } => {
            let mut v = vec![0.0; grid.len()];
            for &[r, c] in cells {
                if r >= grid.n || c >= grid.n {
                    return Err(CliError::Usage(format!("cell ({r}, {c}) outside the {0}×{0} grid", grid.n)));
                }
                v[grid.index(r, c)] = 1.0;
            }
            v
        }
        FunctionConfig::SparseRandom { density } => {
            if !(0.0..=1.0).contains(density) {
                return Err(CliError::Usage(format!("density {density} outside [0, 1]")));
            }
            (0..grid.len()).map(|_| if rng.gen_bool(*density) { rng.gen_range(0.0..1.0) } else { 0.0 }).collect()
        }
        FunctionConfig::Uniform => (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    Ok(GridFunction::new(grid, values)?)
}

fn unit_grid(n: usize) -> Result<GridSpec, CliError> {
    Ok(GridSpec::covering([0.0, 0.0], 1.0, n)?)
}

fn lp(p: &LpParams, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Failures, CliError> {
    let f = make_function(&p.function, unit_grid(p.grid_n)?, rng)?;
    let dec = lp_decompose(&f)?;
    let rec = dec.reconstruct();
    let linf = f.values.iter().zip(&rec.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let total = f.l2_squared();
    let parts = dec.dc.l2_squared() + dec.bands.iter().map(|(_, b)| b.l2_squared()).sum::<f64>();
    let plancherel = if total > 0.0 { (parts - total).abs() / total } else { parts };
    let mut failures = Vec::new();
    if !(linf < p.tolerance) {
        failures.push(format!("reconstruction error {linf} ≥ {}", p.tolerance));
    }
    if !(plancherel < p.tolerance) {
        failures.push(format!("Plancherel relative error {plancherel} ≥ {}", p.tolerance));
    }
    let bands: Vec<_> = dec.bands.iter().map(|(t, b)| json!({"t": t, "energy": b.l2_squared()})).collect();
    let body = json!({
        "n": p.grid_n,
        "reconstruction_linf": linf,
        "plancherel_relative": plancherel,
        "dc_energy": dec.dc.l2_squared(),
        "total_energy": total,
        "bands": bands,
    });
    out.write_json("lp.json", &Versioned { schema: LP_SCHEMA, body: &body })?;
    out.write_csv(
        "lp_bands.csv",
        &["t", "energy"],
        dec.bands.iter().map(|(t, b)| vec![t.to_string(), num(b.l2_squared())]),
    )?;
    Ok(failures)
}

fn field_grid(cfg: &FieldConfig, field: &FieldSpec, n: usize) -> Result<GridSpec, CliError> {
    if matches!(cfg, FieldConfig::FarRotation) {
        return Ok(far_rotation_grid(n)?);
    }
    let d = &field.domain;
    Ok(GridSpec::covering(d.min, d.width().max(d.height()), n)?)
}

fn family_spec(cfg: &FamilyConfig, width_rule: WidthRule, caps: Option<LaceyLiCaps>, seed: u64) -> FamilySpec {
    FamilySpec {
        stride: cfg.stride,
        orientation: cfg.orientation,
        lengths: cfg.lengths.clone(),
        width_rule,
        caps,
        limit: cfg.limit,
        seed,
    }
}

fn omega_json(field: &FieldSpec, eps: f64, grid: &GridSpec, n_t: usize) -> Result<(serde_json::Value, Vec<(i32, RasterMask)>), CliError> {
    let part = omega_partition(field, eps, grid, n_t)?;
    let bins: Vec<_> = part
        .bins
        .iter()
        .map(|(s, m)| json!({"s": s, "cells": m.cells().map(|(r, c)| [r, c]).collect::<Vec<_>>()}))
        .collect();
    let value = json!({
        "n": grid.n,
        "eps": eps,
        "bins": bins,
        "degenerate": part.degenerate.count(),
        "undefined": part.undefined.count(),
    });
    Ok((value, part.bins.into_iter().collect()))
}

fn maximal(p: &MaximalParams, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Failures, CliError> {
    let field = p.field.build()?;
    let grid = field_grid(&p.field, &field, p.grid_n)?;
    let f = make_function(&p.function, grid, rng)?;
    let family_seed = rng.next_u64();
    let (values, extra) = match &p.operator {
        OperatorConfig::Mv { eps0, k_max, n_t, bin } => {
            let (omega, bins) = omega_json(&field, *eps0, &grid, *n_t)?;
            out.write_json("omega.json", &Versioned { schema: OMEGA_SCHEMA, body: &omega })?;
            let mask = match bin {
                Some(s) => bins
                    .into_iter()
                    .find(|(b, _)| b == s)
                    .map(|(_, m)| m)
                    .ok_or_else(|| CliError::Usage(format!("Ω bin s = {s} is empty")))?,
                None => RasterMask::full(grid),
            };
            let scales = DyadicScales { eps0: *eps0, k_max: *k_max }.scales();
            (maximal_mv(&field, &f, &scales, &mask, *n_t)?, json!({"cells": mask.count()}))
        }
        OperatorConfig::Tilde { delta, theta, family } => {
            let fam = CandidateFamily::build(&field, &grid, &family_spec(family, WidthRule::Eccentricity { theta: *theta }, None, family_seed))?;
            let res = tilde_maximal(&f, &fam, *delta, *theta)?;
            (res.values, json!({"members": fam.members.len(), "admissible": res.admissible}))
        }
        OperatorConfig::LaceyLi { delta, w, b, family } => {
            let caps = LaceyLiCaps { b: *b };
            let fam = CandidateFamily::build(&field, &grid, &family_spec(family, WidthRule::Width { w: *w }, Some(caps), family_seed))?;
            let res = laceyli_maximal(&f, &fam, *delta)?;
            (res.values, json!({"members": fam.members.len(), "admissible": res.admissible}))
        }
    };
    let body = json!({
        "field": field.label,
        "operator": p.operator,
        "max": values.linf(),
        "l1": values.l1(),
        "f_l1": f.l1(),
        "details": extra,
    });
    out.write_json("maximal.json", &Versioned { schema: MAXIMAL_SCHEMA, body: &body })?;
    out.write_csv(
        "maximal.csv",
        &["row", "col", "value"],
        (0..grid.len()).filter(|&i| values.values[i] != 0.0).map(|i| {
            let (r, c) = grid.row_col(i);
            vec![r.to_string(), c.to_string(), num(values.values[i])]
        }),
    )?;
    Ok(Vec::new())
}

fn weak_type(p: &WeakTypeParams, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Failures, CliError> {
    let field = p.field.build()?;
    let grid = field_grid(&p.field, &field, p.grid_n)?;
    let f = make_function(&p.function, grid, rng)?;
    let family_seed = rng.next_u64();
    let spec = family_spec(&p.family, WidthRule::Eccentricity { theta: p.theta }, None, family_seed);
    let fam = CandidateFamily::build(&field, &grid, &spec)?;
    let res = tilde_maximal(&f, &fam, p.delta, p.theta)?;
    let sup = weak_type_sup(&res.values, &f)?;
    let bound = 100.0 / p.delta;
    let curve: Vec<(f64, f64)> = lambda_log_bracket(&res.values, p.lambdas)
        .into_iter()
        .map(|l| Ok((l, weak_type_ratio(&res.values, &f, &[l])?)))
        .collect::<Result<_, Error>>()?;
    let mut failures = Vec::new();
    if !(sup <= bound) {
        failures.push(format!("weak-type ratio {sup} > 100/δ = {bound}"));
    }
    let body = json!({
        "field": field.label,
        "delta": p.delta,
        "theta": p.theta,
        "members": fam.members.len(),
        "admissible": res.admissible,
        "sup_ratio": sup,
        "bound": bound,
        "curve": curve.iter().map(|(l, r)| json!({"lambda": l, "ratio": r})).collect::<Vec<_>>(),
    });
    out.write_json("weak_type.json", &Versioned { schema: WEAK_TYPE_SCHEMA, body: &body })?;
    out.write_csv("weak_type.csv", &["lambda", "ratio"], curve.iter().map(|&(l, r)| [l, r].map(num)))?;
    Ok(failures)
}

/// Per-member evidence table of a certificate.
pub fn certificate_rows(cert: &CoveringCertificate) -> Vec<Vec<String>> {
    cert.containment
        .iter()
        .map(|c| {
            let e = cert.pair_evidence.iter().find(|e| e.member == c.member);
            let mut row = vec![c.member.to_string(), c.contained_in.to_string(), num(c.slack)];
            match e {
                Some(e) => {
                    row.extend([e.phi0, e.phi1, e.phi2, e.normal_extent, e.normal_bound, e.axis_extent, e.axis_bound].map(num));
                    row.push(e.near_edge.to_string());
                }
                None => row.extend(std::iter::repeat(String::new()).take(8)),
            }
            row
        })
        .collect()
}

pub const EVIDENCE_HEADER: [&str; 11] = [
    "member",
    "contained_in",
    "slack",
    "phi0",
    "phi1",
    "phi2",
    "normal_extent",
    "normal_bound",
    "axis_extent",
    "axis_bound",
    "near_edge",
];

fn covering(p: &CoveringParams, hash: &str, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Failures, CliError> {
    if p.families == 0 {
        return Err(CliError::Usage("`families` must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..p.families).map(|_| rng.next_u64()).collect();
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (k, &seed) in seeds.iter().enumerate() {
        let family = sample_family(&p.sampler, p.delta, p.theta, seed)?;
        match covering_certificate(&family) {
            Ok(mut cert) => {
                cert.config_hash = hash.to_string();
                cert.seed = seed;
                out.write_json(&format!("certificate_{k:03}.json"), &Versioned { schema: CERTIFICATE_SCHEMA, body: &cert })?;
                out.write_csv(&format!("evidence_{k:03}.csv"), &EVIDENCE_HEADER, certificate_rows(&cert))?;
                summary.push(json!({
                    "family": k,
                    "seed": seed,
                    "members": cert.members,
                    "selected": cert.selected.len(),
                    "K_over_bound": cert.chain.k / cert.chain.bound,
                    "near_edge_pairs": cert.near_edge_pairs,
                }));
            }
            Err(e @ Error::Violation { .. }) => {
                failures.push(format!("family {k} (seed {seed}): {e}"));
                summary.push(json!({"family": k, "seed": seed, "error": e.to_string()}));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let body = json!({"delta": p.delta, "theta": p.theta, "families": summary});
    out.write_json("covering.json", &Versioned { schema: COVERING_SCHEMA, body: &body })?;
    Ok(failures)
}

fn scale_sum(p: &ScaleSumParams, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Failures, CliError> {
    let f = make_function(&p.function, unit_grid(p.grid_n)?, rng)?;
    let mut failures = Vec::new();
    let body = match scale_sum_audit(&f, p.weights, p.j_max, p.s_min, p.s_max) {
        Ok(rec) => json!({"status": "finite", "weights": p.weights, "record": rec}),
        Err(Error::Divergent(reason)) => json!({"status": "divergent", "weights": p.weights, "reason": reason}),
        Err(e @ Error::Violation { .. }) => {
            failures.push(e.to_string());
            json!({"status": "violated", "weights": p.weights, "reason": e.to_string()})
        }
        Err(e) => return Err(e.into()),
    };
    out.write_json("scale_sum.json", &Versioned { schema: SCALE_SUM_SCHEMA, body: &body })?;
    Ok(failures)
}
