//! Datasets behind each figure, written as CSV files into one directory.
//!
//! 3: mixed-model trajectories, per-delay-interval maxima and the Lyapunov quantity.
//! 4, 5: region maps, boundary curves and simulated outcomes at the test points.
//! 6: equilibrium branches of the three single-species models and the Hutchinson
//!    periodic-orbit amplitude.
//! 7: the evolutionarily stable delay curve and its summary.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use madde_core::diagnostics::oscillation_amplitude;
use madde_core::{
    classify_region, convergence_report, equilibria, integrate, lyapunov_series, CompetitionParams, DenseSolution,
    EquilibriumLabel, HutchinsonParams, InitialHistory, Model, SingleParams,
};

use crate::commands::{branch_table, ess_tables, integrator_config, region_tables, without_delays, Status};
use crate::error::{config, CliResult};
use crate::output::{num, Provenance, Table};
use crate::params::{
    model_params, single_params, strong_competition, weak_competition, HUTCHINSON_PRESET, SINGLE_PRESET,
    TRADEOFF_PRESET,
};

pub const FIGURE_IDS: [&str; 5] = ["3", "4", "5", "6", "7"];

const REGION_GRID: usize = 200;
const BRANCH_GRID: usize = 301;
const ESS_GRID: usize = 1000;
const DELAY_RANGE: f64 = 3.0;
const VERDICT_T_END: f64 = 500.0;
const VERDICT_TOL: f64 = 1e-3;
const DEFAULT_STEP_RULE: &str = "tau_min/100";

pub fn reproduce(id: &str, dir: &Path, grid: Option<usize>) -> CliResult<Status> {
    let files = match id {
        "3" => fig3()?,
        "4" => competition_figure(4, &strong_cases(), grid.unwrap_or(REGION_GRID))?,
        "5" => competition_figure(5, &weak_cases(), grid.unwrap_or(REGION_GRID))?,
        "6" => fig6(grid.unwrap_or(BRANCH_GRID))?,
        "7" => {
            let (curve, summary) = ess_tables(&TRADEOFF_PRESET, grid.unwrap_or(ESS_GRID))?;
            vec![("fig7_curve", curve), ("fig7_summary", summary)]
        }
        other => return Err(config(format!("unknown figure '{other}' (valid: {})", FIGURE_IDS.join(", ")))),
    };
    for (name, mut table) in files {
        table.provenance.command = format!("reproduce-figure-{id}");
        table.write(Some(&dir.join(format!("{name}.csv"))))?;
    }
    Ok(Status::Done)
}

fn run(model: &Model, history: &[f64], t_end: f64) -> CliResult<DenseSolution> {
    Ok(integrate(model, &InitialHistory::constant(history)?, &integrator_config(model, None, t_end))?)
}

fn fig3() -> CliResult<Vec<(&'static str, Table)>> {
    const T_END: f64 = 30.0;
    const DT: f64 = 0.05;
    let p: SingleParams = SINGLE_PRESET;
    let model = Model::Madde(p);
    let histories = [0.1, 1.0];
    let prov = Provenance::new("", "madde", single_params(&p)).integration(DEFAULT_STEP_RULE, T_END);
    let mut traj = Table::new(prov.clone(), &["history", "t", "x", "z", "Y"]);
    let mut maxima = Table::new(prov, &["history", "n", "t_start", "t_end", "max"]);
    for h in histories {
        let sol = run(&model, &[h], T_END)?;
        for (t, y) in lyapunov_series(&sol, &p, DT)? {
            traj.push(vec![num(h), num(t), num(sol.eval(t)?[0]), num(sol.eval_aux(t)?[0]), num(y)]);
        }
        let intervals = (T_END / p.tau).floor() as usize;
        for n in 0..intervals {
            let (a, b) = (n as f64 * p.tau, (n + 1) as f64 * p.tau);
            let top = sol
                .knot_times()
                .iter()
                .enumerate()
                .filter(|(_, &t)| t >= a && t <= b)
                .map(|(i, _)| sol.knot_values(i)[0])
                .fold(f64::NEG_INFINITY, f64::max);
            maxima.push(vec![num(h), n.to_string(), num(a), num(b), num(top)]);
        }
    }
    Ok(vec![("fig3_trajectories", traj), ("fig3_interval_maxima", maxima)])
}

/// A simulated test point and the equilibrium it is expected to reach.
struct Case {
    params: CompetitionParams,
    history: [f64; 2],
    expected: EquilibriumLabel,
}

fn strong_cases() -> Vec<Case> {
    let case = |t1, t2, history, expected| Case { params: strong_competition(t1, t2), history, expected };
    vec![
        case(1.0, 1.5, [0.8, 0.1], EquilibriumLabel::E1),
        case(1.0, 1.5, [0.1, 0.8], EquilibriumLabel::E2),
        case(1.0, 2.0, [0.8, 0.1], EquilibriumLabel::E1),
        case(1.0, 2.0, [0.1, 0.8], EquilibriumLabel::E1),
        case(1.5, 1.0, [0.8, 0.1], EquilibriumLabel::E2),
        case(1.5, 1.0, [0.1, 0.8], EquilibriumLabel::E2),
    ]
}

fn weak_cases() -> Vec<Case> {
    vec![Case { params: weak_competition(1.0, 1.0), history: [0.8, 0.8], expected: EquilibriumLabel::Ec }]
}

fn competition_figure(id: u8, cases: &[Case], n: usize) -> CliResult<Vec<(&'static str, Table)>> {
    let base = Model::Competition(cases[0].params);
    let (regions, curves) = region_tables(&base, DELAY_RANGE, n)?;

    let outcomes: Vec<CliResult<Vec<String>>> = cases.par_iter().map(verdict_row).collect();
    let prov = Provenance::new("", "competition", without_delays(model_params(&base)))
        .integration(DEFAULT_STEP_RULE, VERDICT_T_END);
    let mut verdicts = Table::new(
        prov,
        &["tau1", "tau2", "region", "x1_0", "x2_0", "expected", "reached", "distance", "verdict", "matches"],
    );
    verdicts.note(format!("convergence tolerance {VERDICT_TOL} over the final 20% of the run"));
    for row in outcomes {
        verdicts.push(row?);
    }
    Ok(if id == 4 {
        vec![("fig4_regions", regions), ("fig4_curves", curves), ("fig4_verdicts", verdicts)]
    } else {
        vec![("fig5_regions", regions), ("fig5_curves", curves), ("fig5_verdicts", verdicts)]
    })
}

fn verdict_row(case: &Case) -> CliResult<Vec<String>> {
    let model = Model::Competition(case.params);
    let sol = run(&model, &case.history, VERDICT_T_END)?;
    let end = sol.eval(VERDICT_T_END)?;
    let set = equilibria(&model)?;
    let dist = |s: &[f64]| s.iter().zip(&end).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let nearest = set
        .existing()
        .min_by(|a, b| dist(&a.state).total_cmp(&dist(&b.state)))
        .ok_or_else(|| config("no equilibrium exists"))?;
    let report = convergence_report(&sol, &nearest.state, 0.2, VERDICT_TOL)?;
    let [t1, t2] = case.params.taus();
    let matches = nearest.label == case.expected && report.verdict == madde_core::Verdict::Converged;
    Ok(vec![
        num(t1),
        num(t2),
        classify_region(&case.params).label.as_str().into(),
        num(case.history[0]),
        num(case.history[1]),
        case.expected.as_str().into(),
        nearest.label.as_str().into(),
        num(report.terminal_distance),
        report.verdict.as_str().into(),
        matches.to_string(),
    ])
}

fn fig6(n: usize) -> CliResult<Vec<(&'static str, Table)>> {
    let hutchinson = Model::Hutchinson(HUTCHINSON_PRESET);
    let mut files = vec![
        ("fig6_hutchinson", branch_table(&hutchinson, DELAY_RANGE, n)?),
        ("fig6_adde", branch_table(&Model::Adde(SINGLE_PRESET), DELAY_RANGE, n)?),
        ("fig6_madde", branch_table(&Model::Madde(SINGLE_PRESET), DELAY_RANGE, n)?),
    ];
    files.push(("fig6_hutchinson_po", periodic_orbit_table(HUTCHINSON_PRESET)?));
    Ok(files)
}

/// Range of `x` over the final 20% of long runs at delays `0.25, 0.5, ..., 3`.
fn periodic_orbit_table(p: HutchinsonParams) -> CliResult<Table> {
    const T_END: f64 = 400.0;
    let taus: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
    let rows: Vec<CliResult<Vec<String>>> = taus
        .par_iter()
        .map(|&tau| {
            let sol = run(&Model::Hutchinson(p.with_tau(tau)), &[0.5], T_END)?;
            let window = (0.8 * T_END, T_END);
            let (lo, hi) = knot_range(&sol, window);
            let report = convergence_report(&sol, &[p.k_cap], 0.2, 1e-4)?;
            Ok(vec![
                num(tau),
                num(lo),
                num(hi),
                num(oscillation_amplitude(&sol, window)[0]),
                report.verdict.as_str().into(),
            ])
        })
        .collect();
    let prov =
        Provenance::new("", "hutchinson", vec![("r", p.r), ("K", p.k_cap)]).integration(DEFAULT_STEP_RULE, T_END);
    let mut table = Table::new(prov, &["tau", "x_min", "x_max", "amplitude", "verdict"]);
    table.note("history constant 0.5");
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn knot_range(sol: &DenseSolution, window: (f64, f64)) -> (f64, f64) {
    sol.knot_times()
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= window.0 && t <= window.1)
        .map(|(i, _)| sol.knot_values(i)[0])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

pub fn default_dir() -> PathBuf {
    PathBuf::from("figures")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_figure_is_config_error() {
        let dir = std::env::temp_dir();
        assert_eq!(reproduce("8", &dir, None).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn strong_competition_outcomes() {
        for case in strong_cases() {
            let row = verdict_row(&case).unwrap();
            assert_eq!(row[9], "true", "{row:?}");
        }
    }

    #[test]
    fn weak_competition_outcome() {
        let row = verdict_row(&weak_cases()[0]).unwrap();
        assert_eq!((row[2].as_str(), row[6].as_str(), row[9].as_str()), ("C", "Ec", "true"));
    }

    #[test]
    fn fig3_maxima_decrease_from_above() {
        let files = fig3().unwrap();
        let maxima = &files[1].1;
        let above: Vec<f64> = maxima.rows.iter().filter(|r| r[0] == "1").map(|r| r[4].parse().unwrap()).collect();
        assert!(above.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn periodic_orbit_appears_past_hopf() {
        let t = periodic_orbit_table(HUTCHINSON_PRESET).unwrap();
        let amp = |tau: &str| t.rows.iter().find(|r| r[0] == tau).unwrap()[3].parse::<f64>().unwrap();
        assert!(amp("1") < 1e-6);
        assert!(amp("2") > 0.5);
    }
}
