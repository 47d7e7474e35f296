use std::path::Path;
use std::process::{Command, Output};

fn madde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_madde")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Data rows (after the provenance, notes and column lines) split into cells.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn columns(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn simulate_reaches_interior_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = madde(&["simulate", "--model", "madde", "--tau", "1", "--t-end", "200", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out);
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# madde ") && first.contains("model=madde") && first.contains("gamma=1.5"));
    assert!(first.contains("step=0.01") && first.contains("t_end=200"));
    assert_eq!(columns(&csv), "t,x1,z1");
    let last = rows(&csv).pop().unwrap();
    assert_eq!(last[0], "200");
    assert!((last[1].parse::<f64>().unwrap() - 0.2258614).abs() < 1e-6);
}

#[test]
fn simulate_competition_to_stdout() {
    let o = madde(&[
        "simulate",
        "--model",
        "competition",
        "--tau1",
        "1",
        "--tau2",
        "1.5",
        "--history-const",
        "0.8,0.1",
        "--t-end",
        "2",
        "--sample-dt",
        "0.5",
    ]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(columns(&csv), "t,x1,x2,z1,z2");
    assert_eq!(rows(&csv).len(), 5);
}

#[test]
fn output_is_deterministic() {
    let a = madde(&["simulate", "--model", "adde", "--t-end", "20"]).stdout;
    let b = madde(&["simulate", "--model", "adde", "--t-end", "20"]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn params_file_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("p.txt");
    let json = dir.path().join("p.json");
    std::fs::write(&kv, "# hutchinson\nr = 0.8\nK = 2\ntau = 1.2\n").unwrap();
    std::fs::write(&json, r#"{"r": 0.8, "K": 2, "tau": 1.2}"#).unwrap();
    let a = madde(&["equilibria", "--model", "hutchinson", "--params", kv.to_str().unwrap()]);
    let b = madde(&["equilibria", "--model", "hutchinson", "--params", json.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    assert!(csv.lines().next().unwrap().contains("r=0.8 K=2 tau=1.2"));
    assert_eq!(rows(&csv)[1][..2], ["x*".to_string(), "2".to_string()]);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "gamma = 1.5\nbogus = 1\n").unwrap();
    for args in [
        vec!["equilibria", "--params", bad.to_str().unwrap()],
        vec!["equilibria", "--params", "/nonexistent/params.txt"],
        vec!["simulate", "--model", "madde", "--step", "0.5"],
        vec!["simulate", "--model", "madde", "--history-const", "0.1,0.2"],
        vec!["simulate", "--model", "nonsense"],
        vec!["bifurcate", "--model", "competition", "--grid", "5"],
        vec!["ess"],
    ] {
        let o = madde(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn unknown_figure_lists_valid_ids() {
    let o = madde(&["reproduce-figure", "--figure", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(["3", "4", "5", "6", "7"].iter().all(|id| err.contains(id)), "{err}");
}

#[test]
fn marginal_stability_exits_three_with_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stab.csv");
    let tau = std::f64::consts::FRAC_PI_2.to_string();
    let o = madde(&["stability", "--model", "hutchinson", "--tau", &tau, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(read(&out).contains("inconclusive"));
}

#[test]
fn stability_of_madde() {
    let o = madde(&["stability", "--model", "madde", "--tau", "1"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    let r = rows(&csv);
    assert_eq!((r[0][2].as_str(), r[0][3].as_str()), ("unstable", "1"));
    assert_eq!((r[1][2].as_str(), r[1][3].as_str()), ("stable", "0"));
}

#[test]
fn ess_writes_curve_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ess.csv");
    let o = madde(&["ess", "--grid", "100", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(rows(&read(&out)).len(), 100);
    let summary = read(&dir.path().join("ess_summary.csv"));
    assert!(summary.lines().next().unwrap().contains("gamma0=3 c=8 mu=2"));
    let s = &rows(&summary)[0];
    assert!((s[0].parse::<f64>().unwrap() - 0.14).abs() < 0.01);
    assert!((s[1].parse::<f64>().unwrap() - 1.48).abs() < 0.01);
}

#[test]
fn bifurcate_competition_writes_map_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let o = madde(&["bifurcate", "--model", "competition", "--grid", "11", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let map = read(&out);
    assert_eq!(columns(&map), "tau1,tau2,label,R0_1,R0_2,d1,d2");
    assert_eq!(rows(&map).len(), 121);
    assert!(!rows(&read(&dir.path().join("map_curves.csv"))).is_empty());
}

#[test]
fn figure_6_branches_flip_at_hopf() {
    let dir = tempfile::tempdir().unwrap();
    let o = madde(&["reproduce-figure", "--figure", "6", "--grid", "31", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let hut = read(&dir.path().join("fig6_hutchinson.csv"));
    assert!(hut.lines().next().unwrap().contains("command=reproduce-figure-6"));
    let flip = hut
        .lines()
        .find_map(|l| l.strip_prefix("# stability change branch=interior tau="))
        .and_then(|rest| rest.split(' ').next())
        .map(|t| t.parse::<f64>().unwrap())
        .expect("interior branch changes stability");
    assert!((flip - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    for name in ["fig6_adde.csv", "fig6_madde.csv", "fig6_hutchinson_po.csv"] {
        assert!(!rows(&read(&dir.path().join(name))).is_empty());
    }
}

#[test]
fn figures_4_and_5_match_reported_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["4", "5"] {
        let o = madde(&["reproduce-figure", "--figure", id, "--grid", "13", "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let verdicts = rows(&read(&dir.path().join(format!("fig{id}_verdicts.csv"))));
        assert!(verdicts.iter().all(|r| r[9] == "true"), "{verdicts:?}");
    }
    let labels: Vec<_> = rows(&read(&dir.path().join("fig4_verdicts.csv"))).iter().map(|r| r[2].clone()).collect();
    assert_eq!(labels, ["C", "C", "A", "A", "B", "B"]);
}

#[test]
fn figures_3_and_7() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["3", "7"] {
        let o = madde(&["reproduce-figure", "--figure", id, "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(columns(&read(&dir.path().join("fig3_trajectories.csv"))), "history,t,x,z,Y");
    let summary = rows(&read(&dir.path().join("fig7_summary.csv")));
    assert_eq!(summary[0][2], "interior-max");
    assert_eq!(rows(&read(&dir.path().join("fig7_curve.csv"))).len(), 1000);
}
