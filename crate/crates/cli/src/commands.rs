use serde_json::{json, Value};

use sblab_core::dynamics::{default_window, linear_slope, SurvivalCurve};
use sblab_core::fockoracle::{FockOracle, Profile, Regularization};
use sblab_core::levelshift::{gamma0_groundshift, LevelShift, Resonance, ResonanceReport};
use sblab_core::model::ModelParams;
use sblab_core::mourre::{mourre_constant, weighted_resolvent_probe};
use sblab_core::quadrature::QuadratureConfig;
use sblab_core::scattering::{lambda1_tilde, transition_lorentzian, KernelProfile, PacketSpec};
use sblab_core::Error;

use crate::config::{AnalyticMethod, RunConfig};
use crate::output::{num, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Result of one subcommand: a JSON document and a table view of the same data.
pub struct Artifact {
    pub name: &'static str,
    pub json: Value,
    pub table: Table,
    pub default_format: Format,
    pub manifest: Option<Value>,
}

pub struct Context {
    pub config: RunConfig,
    pub params: ModelParams<f64>,
    pub quad: QuadratureConfig<f64>,
    pub profile: Option<Profile>,
}

fn cfg_err(pointer: &str, message: impl Into<String>) -> CliError {
    CliError::Config { message: message.into(), pointer: Some(pointer.to_string()) }
}

pub fn resonance(ctx: &Context) -> Result<Artifact, CliError> {
    let shift = LevelShift::compute(&ctx.params, &ctx.quad)?;
    let res = Resonance::from_level_shift(&shift, &ctx.params);
    let report = ResonanceReport::new(&shift, &res);
    let mut table = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("gamma_minus0_re", report.gamma_minus0[0]),
        ("gamma_minus0_im", report.gamma_minus0[1]),
        ("theta0", report.theta0),
        ("gamma0", report.gamma0),
        ("lambda1_tilde_re", report.lambda1_tilde[0]),
        ("lambda1_tilde_im", report.lambda1_tilde[1]),
        ("lambda0", report.lambda0),
        ("decay_rate", report.decay_rate),
    ] {
        table.push(vec![k.to_string(), num(v)]);
    }
    Ok(Artifact {
        name: "resonance",
        json: json!({ "params": ctx.config.params, "report": report }),
        table,
        default_format: Format::Json,
        manifest: None,
    })
}

pub fn survival(ctx: &Context) -> Result<Artifact, CliError> {
    let spec = ctx.config.survival;
    if !(spec.dt > 0.0) || !(spec.t_max >= 0.0) {
        return Err(cfg_err("/survival", "dt must be > 0 and t_max >= 0"));
    }
    let oracle = match (ctx.profile, spec.oracle) {
        (Some(profile), true) => Some(FockOracle::new(&ctx.params, &ctx.config.oracle_config(profile))?),
        _ => None,
    };
    let t_end = oracle.as_ref().map_or(spec.t_max, |o| spec.t_max.min(o.revival_horizon()));
    let n = (t_end / spec.dt + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * spec.dt).collect();
    let res = sblab_core::levelshift::resonance(&ctx.params, &ctx.quad)?;
    let analytic = match spec.analytic {
        AnalyticMethod::Residue => SurvivalCurve::residue(&times, &res)?,
        AnalyticMethod::Quadrature => {
            SurvivalCurve::quadrature(&times, &res, default_window(&ctx.params, &res), &ctx.quad)?
        }
    };
    let oracle_curve = oracle.as_ref().map(|o| o.survival_oracle(&times)).transpose()?;
    let mut table = Table::new(&["t", "analytic_re", "analytic_im", "oracle_re", "oracle_im", "abs_err"]);
    for (k, &t) in times.iter().enumerate() {
        let a = analytic.amplitudes[k];
        let mut row = vec![num(t), num(a.re), num(a.im)];
        match &oracle_curve {
            Some(c) => {
                let b = c.amplitudes[k];
                row.extend([num(b.re), num(b.im), num((a - b).norm())]);
            }
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        table.push(row);
    }
    let json = json!({
        "analytic": spec.analytic,
        "profile": ctx.profile.filter(|_| oracle.is_some()),
        "revival_horizon": oracle.as_ref().map(|o| o.revival_horizon()),
        "rows": table.to_json(),
    });
    Ok(Artifact {
        name: "survival",
        json,
        table,
        default_format: Format::Csv,
        manifest: oracle.map(|o| serde_json::to_value(o.manifest()).expect("manifest serializes")),
    })
}

pub fn tmatrix(ctx: &Context) -> Result<Artifact, CliError> {
    let p = &ctx.params;
    let shift = LevelShift::compute(p, &ctx.quad)?;
    let packets = &ctx.config.packets;
    let build = |spec: &PacketSpec, ptr: &str| spec.build().map_err(|e| cfg_err(ptr, e.to_string()));
    let h = build(&packets.h, "/packets/h")?;
    let l = build(&packets.l, "/packets/l")?;
    let mut pairs = vec![("on_resonance".to_string(), h, l)];
    for (i, spec) in packets.off_resonance.iter().enumerate() {
        let k = build(spec, &format!("/packets/off_resonance/{i}"))?;
        pairs.push((format!("off_resonance_{i}"), k.clone(), k));
    }
    let reg = match ctx.config.tmatrix.eta {
        None => Regularization::Limit,
        Some(eta) => Regularization::Eta(eta),
    };
    let oracle = ctx.profile.map(|pr| FockOracle::new(p, &ctx.config.oracle_config(pr))).transpose()?;
    let (lambda0, gs_norm_sq, source) = match &oracle {
        Some(o) => {
            let gs = o.ground_state()?;
            (gs.energy, gs.contour_norm_sq(), "oracle")
        }
        None => (-p.g() * p.g() * gamma0_groundshift(p, &ctx.quad)?, 1.0, "analytic"),
    };
    let mut table = Table::new(&["packet", "tp_re", "tp_im", "oracle_re", "oracle_im", "rel_err"]);
    for (label, a, b) in &pairs {
        let tp = transition_lorentzian(a, b, &shift, lambda0, gs_norm_sq, p, &ctx.quad)?;
        let mut row = vec![label.clone(), num(tp.re), num(tp.im)];
        match &oracle {
            Some(o) => {
                let t = o.tmatrix_oracle(a, b, reg, &ctx.quad)?.value;
                let rel = if tp.norm() > 0.0 { (t - tp).norm() / tp.norm() } else { (t - tp).norm() };
                row.extend([num(t.re), num(t.im), num(rel)]);
            }
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        table.push(row);
    }
    let json = json!({
        "lambda0": lambda0,
        "lambda0_source": source,
        "gs_norm_sq": gs_norm_sq,
        "regularization": reg,
        "level_spacing": oracle.as_ref().map(|o| o.level_spacing()),
        "rows": table.to_json(),
    });
    Ok(Artifact {
        name: "tmatrix",
        json,
        table,
        default_format: Format::Json,
        manifest: oracle.map(|o| serde_json::to_value(o.manifest()).expect("manifest serializes")),
    })
}

pub fn kernel(ctx: &Context) -> Result<Artifact, CliError> {
    let spec = ctx.config.kernel;
    if !(spec.r_min > 0.0 && spec.r_max > spec.r_min) || spec.points < 2 {
        return Err(cfg_err("/kernel", "need 0 < r_min < r_max and points >= 2"));
    }
    let p = &ctx.params;
    let shift = LevelShift::compute(p, &ctx.quad)?;
    let lambda0 = -p.g() * p.g() * shift.gamma0_gs;
    let grid: Vec<f64> = (0..spec.points)
        .map(|i| spec.r_min + (spec.r_max - spec.r_min) * i as f64 / (spec.points - 1) as f64)
        .collect();
    let prof = KernelProfile::sample(&grid, &shift, lambda0, 1.0, p)?;
    let mut table = Table::new(&["r", "re", "im", "abs"]);
    for (r, v) in prof.r.iter().zip(&prof.values) {
        table.push(vec![num(*r), num(v.re), num(v.im), num(v.norm())]);
    }
    let target = lambda1_tilde(&shift, p).re - lambda0;
    let predicted = if target > p.m() { Some((target * target - p.m() * p.m()).sqrt()) } else { None };
    let argmax = if prof.values.iter().any(|v| v.norm() > 0.0) { prof.argmax() } else { None };
    let peak = predicted.and_then(|r| prof.local_peak_near(r));
    let json = json!({
        "lambda0": lambda0,
        "argmax_r": argmax,
        "resonant_peak_r": peak,
        "predicted_peak_r": predicted,
        "grid_step": grid[1] - grid[0],
        "rows": table.to_json(),
    });
    Ok(Artifact { name: "kernel", json, table, default_format: Format::Csv, manifest: None })
}

pub fn groundstate(ctx: &Context) -> Result<Artifact, CliError> {
    let profile = ctx.profile.unwrap_or(Profile::Static);
    let ocfg = ctx.config.oracle_config(profile);
    let mut table = Table::new(&["g", "lambda0_num", "lambda0_analytic", "residual"]);
    let mut pts = Vec::new();
    let mut manifest = None;
    for (i, &g) in ctx.config.groundstate.g_values.iter().enumerate() {
        let p = ctx.params.with_coupling(g).map_err(|e| cfg_err(&format!("/groundstate/g_values/{i}"), e.to_string()))?;
        let o = FockOracle::new(&p, &ocfg)?;
        let e = o.ground_state()?.energy;
        let analytic = -g * g * gamma0_groundshift(&p, &ctx.quad)?;
        let residual = (e - analytic).abs();
        if g > 0.0 && residual > 0.0 {
            pts.push((g.ln(), residual.ln()));
        }
        table.push(vec![num(g), num(e), num(analytic), num(residual)]);
        manifest.get_or_insert_with(|| serde_json::to_value(o.manifest()).expect("manifest serializes"));
    }
    let json = json!({
        "profile": profile,
        "residual_exponent": linear_slope(&pts),
        "rows": table.to_json(),
    });
    Ok(Artifact { name: "groundstate", json, table, default_format: Format::Csv, manifest })
}

pub fn mourre(ctx: &Context) -> Result<Artifact, CliError> {
    let ocfg = ctx.config.oracle_config(ctx.profile.unwrap_or(Profile::Dynamic));
    let spec = &ctx.config.mourre;
    let report = mourre_constant(&ctx.params, &ocfg)?;
    let z = spec.z.unwrap_or(ctx.params.e1());
    let probe_cfg = sblab_core::fockoracle::OracleConfig { modes: spec.probe_modes, ..ocfg };
    let probe = weighted_resolvent_probe(&ctx.params, &probe_cfg, z, &spec.eps)?;
    let mut table = Table::new(&["eps", "weighted", "unweighted"]);
    for r in &probe.rows {
        table.push(vec![num(r.eps), num(r.weighted), num(r.unweighted)]);
    }
    let json = json!({ "report": report, "probe": probe });
    Ok(Artifact { name: "mourre", json, table, default_format: Format::Json, manifest: None })
}

/// Maps parameter validation failures to config errors.
pub fn validate_params(config: &RunConfig) -> Result<ModelParams<f64>, CliError> {
    ModelParams::try_from(config.params).map_err(|e: Error| match &e {
        Error::InvalidParameter { name, .. } => cfg_err(&format!("/params/{name}"), e.to_string()),
        _ => cfg_err("/params", e.to_string()),
    })
}
