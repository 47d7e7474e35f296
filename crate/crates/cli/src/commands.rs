//! One table builder per subcommand. Figures reuse the same builders.

use std::path::Path;

use madde_core::adaptive::ess_curve;
use madde_core::bifurcation::RegionMap;
use madde_core::stability::classify;
use madde_core::{
    branch_single, equilibria, ess_tau, integrate, scan_grid, BranchDiagram, DelaySystem, InitialHistory,
    IntegratorConfig, Model, ModelId, TradeoffParams,
};

use crate::error::{config, CliResult};
use crate::output::{num, sibling, text, Provenance, Table};
use crate::params::{model_params, tradeoff_params};

/// Whether a command finished cleanly or wrote output that contains an inconclusive result.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Done,
    Inconclusive(String),
}

pub fn default_history(model: &Model) -> Vec<f64> {
    match model {
        Model::Hutchinson(_) => vec![0.5],
        Model::Adde(_) | Model::Madde(_) => vec![0.1],
        Model::Competition(_) => vec![0.8, 0.1],
    }
}

pub fn integrator_config(model: &Model, step: Option<f64>, t_end: f64) -> IntegratorConfig {
    match step {
        Some(h) => IntegratorConfig::new(h, t_end),
        None => IntegratorConfig::with_default_step(&model.delays(), t_end),
    }
}

fn state_columns(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{prefix}{i}")).collect()
}

/// Trajectory sampled every `sample_dt`, always ending with a row at `t_end`.
pub fn simulate(model: &Model, history: &[f64], cfg: &IntegratorConfig, sample_dt: f64) -> CliResult<Table> {
    if history.len() != model.dim() {
        return Err(config(format!(
            "--history-const needs {} value(s) for the {} model, got {}",
            model.dim(),
            model.id(),
            history.len()
        )));
    }
    if !(sample_dt > 0.0 && sample_dt.is_finite()) {
        return Err(config(format!("sample spacing {sample_dt} must be finite and > 0")));
    }
    let step = cfg.aligned_step(&model.delay_spec())?;
    let sol = integrate(model, &InitialHistory::constant(history)?, cfg)?;

    let prov = Provenance::new("simulate", model.id().as_str(), model_params(model)).integration(num(step), cfg.t_end);
    let mut columns = vec!["t".to_string()];
    columns.extend(state_columns("x", sol.dim()));
    columns.extend(state_columns("z", sol.n_aux()));
    let mut table = Table { provenance: prov, notes: Vec::new(), columns, rows: Vec::new() };
    table.note(format!("history constant {}", history.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")));

    let n = (cfg.t_end / sample_dt - 1e-9).ceil() as usize;
    for k in 0..=n {
        let t = (k as f64 * sample_dt).min(cfg.t_end);
        let mut row = vec![num(t)];
        row.extend(sol.eval(t)?.into_iter().map(num));
        if sol.n_aux() > 0 {
            row.extend(sol.eval_aux(t)?.into_iter().map(num));
        }
        table.push(row);
    }
    Ok(table)
}

pub fn equilibria_table(model: &Model) -> CliResult<Table> {
    let set = equilibria(model)?;
    let dim = model.dim();
    let mut columns = vec!["label".to_string()];
    columns.extend(state_columns("x", dim));
    columns.extend(["exists", "residual", "note"].map(String::from));
    let prov = Provenance::new("equilibria", model.id().as_str(), model_params(model));
    let mut table = Table { provenance: prov, notes: Vec::new(), columns, rows: Vec::new() };
    for (i, th) in set.thresholds.iter().enumerate() {
        let flagged = |f: madde_core::equilibria::Flagged| if f.exists { num(f.value) } else { "none".into() };
        table.note(format!(
            "species {} R0={} tau_H={} K={}",
            i + 1,
            num(th.r0),
            flagged(th.tau_h),
            flagged(th.carrying_capacity)
        ));
    }
    for eq in &set.equilibria {
        let mut row = vec![eq.label.as_str().to_string()];
        row.extend(eq.state.iter().map(|v| num(*v)));
        row.extend([eq.exists.to_string(), num(eq.residual), text(eq.note.as_deref().unwrap_or(""))]);
        table.push(row);
    }
    Ok(table)
}

pub fn stability_table(model: &Model) -> CliResult<(Table, Status)> {
    let set = equilibria(model)?;
    let verdicts = classify(model, &set);
    let mut columns = vec!["label".to_string()];
    columns.extend(state_columns("x", model.dim()));
    columns.extend(["classification", "unstable_roots", "re_max", "im_max", "rule", "warning"].map(String::from));
    let prov = Provenance::new("stability", model.id().as_str(), model_params(model));
    let mut table = Table { provenance: prov, notes: Vec::new(), columns, rows: Vec::new() };
    let mut inconclusive = Vec::new();
    for v in &verdicts {
        if v.unstable_root_count.is_none() {
            inconclusive.push(v.label.as_str());
        }
        let mut row = vec![v.label.as_str().to_string()];
        row.extend(v.state.iter().map(|x| num(*x)));
        row.extend([
            v.classification.as_str().to_string(),
            v.unstable_root_count.map_or_else(|| "inconclusive".into(), |c| c.to_string()),
            num(v.search_rectangle.re_max),
            num(v.search_rectangle.im_max),
            text(&v.analytic_rule_applied),
            text(v.warning.as_deref().unwrap_or("")),
        ]);
        table.push(row);
    }
    let status = if inconclusive.is_empty() {
        Status::Done
    } else {
        Status::Inconclusive(format!("root count inconclusive for {}", inconclusive.join(", ")))
    };
    Ok((table, status))
}

pub fn without_delays(params: Vec<(&'static str, f64)>) -> Vec<(&'static str, f64)> {
    params.into_iter().filter(|(k, _)| !k.starts_with("tau")).collect()
}

/// Region labels of every grid cell and the traced boundary curves.
pub fn region_tables(model: &Model, tau_max: f64, n: usize) -> CliResult<(Table, Table)> {
    let Model::Competition(p) = model else {
        return Err(config("region maps need the competition model"));
    };
    let map: RegionMap = scan_grid(p, (0.0, tau_max), (0.0, tau_max), n)?;
    let prov = Provenance::new("bifurcate", "competition", without_delays(model_params(model)));
    let span = format!("tau1 and tau2 on {n} points in [0, {}]", num(tau_max));

    let mut regions = Table::new(prov.clone(), &["tau1", "tau2", "label", "R0_1", "R0_2", "d1", "d2"]);
    regions.note(span.clone());
    for c in &map.cells {
        let r = &c.region;
        regions.push(vec![
            num(c.tau1),
            num(c.tau2),
            r.label.as_str().into(),
            num(r.r0[0]),
            num(r.r0[1]),
            num(r.d1),
            num(r.d2),
        ]);
    }
    let mut curves = Table::new(prov, &["curve", "tau1", "tau2"]);
    curves.note(span);
    for curve in &map.curves {
        for pt in &curve.points {
            curves.push(vec![curve.kind.as_str().into(), num(pt[0]), num(pt[1])]);
        }
    }
    Ok((regions, curves))
}

pub fn branch_table(model: &Model, tau_max: f64, n: usize) -> CliResult<Table> {
    let diagram: BranchDiagram = branch_single(model, 0.0, tau_max, n)?;
    let prov = Provenance::new("bifurcate", model.id().as_str(), without_delays(model_params(model)));
    let mut table = Table::new(prov, &["tau", "value", "stability", "model", "branch"]);
    table.note(format!("tau on {n} points in [0, {}]", num(tau_max)));
    if let Some(t) = diagram.transcritical {
        table.note(format!("transcritical tau={}", num(t)));
    }
    for c in &diagram.stability_changes {
        table.note(format!(
            "stability change branch={} tau={} {}->{}",
            c.branch.as_str(),
            num(c.tau),
            c.from.as_str(),
            c.to.as_str()
        ));
    }
    for pt in &diagram.points {
        table.push(vec![
            num(pt.tau),
            num(pt.equilibrium_value),
            pt.stability.as_str().into(),
            pt.model.as_str().into(),
            pt.branch.as_str().into(),
        ]);
    }
    Ok(table)
}

/// `x*(tau)` on `samples` delays plus the one-row summary.
pub fn ess_tables(tp: &TradeoffParams, samples: usize) -> CliResult<(Table, Table)> {
    if samples < 2 {
        return Err(config("the ESS curve needs at least 2 samples"));
    }
    let prov = Provenance::new("ess", "tradeoff", tradeoff_params(tp));
    let mut curve = Table::new(prov.clone(), &["tau", "xstar", "dxstar_dtau"]);
    for row in ess_curve(tp, samples)? {
        curve.push(row.iter().map(|v| num(*v)).collect());
    }
    let r = ess_tau(tp)?;
    let mut summary =
        Table::new(prov, &["tau_star", "tau_H", "kind", "xstar_max", "dxstar_at_star", "critical_points"]);
    summary.push(vec![
        num(r.tau_star),
        num(r.tau_h),
        r.kind.as_str().into(),
        num(r.xstar_max),
        num(r.dxstar_at_star),
        r.critical_points.to_string(),
    ]);
    Ok((curve, summary))
}

pub fn require_out<'a>(out: Option<&'a Path>, command: &str) -> CliResult<&'a Path> {
    out.ok_or_else(|| config(format!("{command} writes several files and needs --out <path>")))
}

/// Region map to `out` and curves next to it, or a branch file for single-species models.
pub fn bifurcate(model: &Model, tau_max: f64, n: usize, out: Option<&Path>) -> CliResult<Status> {
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(config(format!("--tau-max {tau_max} must be finite and > 0")));
    }
    if model.id() == ModelId::Competition {
        let out = require_out(out, "bifurcate for the competition model")?;
        let (regions, curves) = region_tables(model, tau_max, n)?;
        regions.write(Some(out))?;
        curves.write(Some(&sibling(out, "curves")))?;
    } else {
        branch_table(model, tau_max, n)?.write(out)?;
    }
    Ok(Status::Done)
}

pub fn ess(tp: &TradeoffParams, samples: usize, out: Option<&Path>) -> CliResult<Status> {
    let out = require_out(out, "ess")?;
    let (curve, summary) = ess_tables(tp, samples)?;
    curve.write(Some(out))?;
    summary.write(Some(&sibling(out, "summary")))?;
    Ok(Status::Done)
}
