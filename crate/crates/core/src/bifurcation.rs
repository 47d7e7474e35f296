//! Region maps over the two delays of the competition model and equilibrium
//! branches of the single-species models as functions of the delay.

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{equilibria, madde_equilibrium, r0_single, tau_h, EquilibriumLabel};
use crate::error::{Error, Result};
use crate::models::{CompetitionParams, Model, ModelId};
use crate::roots::{bisect, bisect_transition};
use crate::stability::{classify, criterion_verdict, Classification};

/// Comparisons closer than this to a tie are labelled [`Region::Boundary`].
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    /// Species 1 wins.
    A,
    /// Species 2 wins.
    B,
    /// Coexistence equilibrium exists.
    C,
    /// Both species go extinct.
    D,
    Boundary,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
            Region::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionLabel {
    pub label: Region,
    pub r0: [f64; 2],
    /// `alpha_1 x_1* - kappa_2 x_2*`.
    pub d1: f64,
    /// `alpha_2 x_2* - kappa_1 x_1*`.
    pub d2: f64,
}

impl RegionLabel {
    /// Weak competition: both species resist invasion by neither, so `Ec` is stable.
    pub fn weak_competition(&self) -> bool {
        self.label == Region::C && self.d1 < 0.0 && self.d2 < 0.0
    }

    /// Strong competition: `Ec` is a saddle between `E1` and `E2`.
    pub fn strong_competition(&self) -> bool {
        self.label == Region::C && self.d1 > 0.0 && self.d2 > 0.0
    }
}

fn sign(v: f64) -> Option<bool> {
    if v.abs() <= BOUNDARY_TOLERANCE {
        None
    } else {
        Some(v > 0.0)
    }
}

/// Semi-trivial levels, zero for a species that cannot persist alone.
fn levels(p: &CompetitionParams) -> [f64; 2] {
    [madde_equilibrium(&p.species[0].single()).or_zero(), madde_equilibrium(&p.species[1].single()).or_zero()]
}

/// Region of the delay plane that `p` (with its delays) lies in.
///
/// A strip where only one species is viable takes that species' label.
pub fn classify_region(p: &CompetitionParams) -> RegionLabel {
    let [s1, s2] = p.species;
    let r0 = [r0_single(s1.gamma, s1.mu, s1.tau), r0_single(s2.gamma, s2.mu, s2.tau)];
    let [x1, x2] = levels(p);
    let d1 = s1.alpha * x1 - s2.kappa * x2;
    let d2 = s2.alpha * x2 - s1.kappa * x1;
    let viable = [sign(r0[0] - 1.0), sign(r0[1] - 1.0)];
    let label = match viable {
        [Some(false), Some(false)] => Region::D,
        [Some(true), Some(false)] => Region::A,
        [Some(false), Some(true)] => Region::B,
        [None, Some(false)] | [Some(false), None] | [None, None] => Region::Boundary,
        _ => match (sign(d1), sign(d2)) {
            (Some(true), Some(false)) => Region::A,
            (Some(false), Some(true)) => Region::B,
            (Some(a), Some(b)) if a == b => Region::C,
            _ => Region::Boundary,
        },
    };
    RegionLabel { label, r0, d1, d2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryKind {
    /// `R0_1 = 1`.
    Survival1,
    /// `R0_2 = 1`.
    Survival2,
    /// `alpha_1 x_1* = kappa_2 x_2*`.
    Invasion1,
    /// `alpha_2 x_2* = kappa_1 x_1*`.
    Invasion2,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 4] =
        [BoundaryKind::Survival1, BoundaryKind::Survival2, BoundaryKind::Invasion1, BoundaryKind::Invasion2];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Survival1 => "R0_1=1",
            BoundaryKind::Survival2 => "R0_2=1",
            BoundaryKind::Invasion1 => "alpha1*x1=kappa2*x2",
            BoundaryKind::Invasion2 => "alpha2*x2=kappa1*x1",
        }
    }

    /// The function whose zero set is this boundary.
    pub fn defect(self, p: &CompetitionParams) -> f64 {
        let [s1, s2] = p.species;
        match self {
            BoundaryKind::Survival1 => r0_single(s1.gamma, s1.mu, s1.tau) - 1.0,
            BoundaryKind::Survival2 => r0_single(s2.gamma, s2.mu, s2.tau) - 1.0,
            BoundaryKind::Invasion1 => {
                let [x1, x2] = levels(p);
                s1.alpha * x1 - s2.kappa * x2
            }
            BoundaryKind::Invasion2 => {
                let [x1, x2] = levels(p);
                s2.alpha * x2 - s1.kappa * x1
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub kind: BoundaryKind,
    /// `(tau1, tau2)` vertices sorted lexicographically.
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub tau1: f64,
    pub tau2: f64,
    pub region: RegionLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub tau1: Vec<f64>,
    pub tau2: Vec<f64>,
    /// Row-major: row `j` holds `tau2[j]` and every `tau1`.
    pub cells: Vec<GridCell>,
    pub curves: Vec<BoundaryCurve>,
}

impl RegionMap {
    pub fn cell(&self, i1: usize, i2: usize) -> &GridCell {
        &self.cells[i2 * self.tau1.len() + i1]
    }
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n).map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64).collect()
}

/// Labels an `n x n` grid of delays and traces the boundary curves along grid edges.
pub fn scan_grid(
    base: &CompetitionParams,
    tau1_range: (f64, f64),
    tau2_range: (f64, f64),
    n: usize,
) -> Result<RegionMap> {
    base.validate()?;
    if n == 0 {
        return Err(Error::Config("grid size must be at least 1".into()));
    }
    for (lo, hi) in [tau1_range, tau2_range] {
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!("delay range [{lo}, {hi}] is invalid")));
        }
    }
    let tau1 = axis(tau1_range, n);
    let tau2 = axis(tau2_range, n);
    let cells: Vec<GridCell> = tau2
        .par_iter()
        .flat_map_iter(|&t2| {
            tau1.iter().map(move |&t1| GridCell {
                tau1: t1,
                tau2: t2,
                region: classify_region(&base.with_taus(t1, t2)),
            })
        })
        .collect();

    let curves = BoundaryKind::ALL.par_iter().map(|&kind| trace_curve(base, kind, &tau1, &tau2, &cells)).collect();
    Ok(RegionMap { tau1, tau2, cells, curves })
}

fn trace_curve(
    base: &CompetitionParams,
    kind: BoundaryKind,
    tau1: &[f64],
    tau2: &[f64],
    cells: &[GridCell],
) -> BoundaryCurve {
    let n1 = tau1.len();
    let value = |c: &GridCell| match kind {
        BoundaryKind::Survival1 => c.region.r0[0] - 1.0,
        BoundaryKind::Survival2 => c.region.r0[1] - 1.0,
        BoundaryKind::Invasion1 => c.region.d1,
        BoundaryKind::Invasion2 => c.region.d2,
    };
    let mut points = Vec::new();
    for j in 0..tau2.len() {
        for i in 0..n1 {
            let here = &cells[j * n1 + i];
            let v = value(here);
            if v == 0.0 {
                points.push([here.tau1, here.tau2]);
                continue;
            }
            if i + 1 < n1 {
                let right = &cells[j * n1 + i + 1];
                if v * value(right) < 0.0 {
                    let f = |t: f64| kind.defect(&base.with_taus(t, here.tau2));
                    if let Ok(t) = bisect(f, here.tau1, right.tau1, 0.0) {
                        points.push([t, here.tau2]);
                    }
                }
            }
            if j + 1 < tau2.len() {
                let up = &cells[(j + 1) * n1 + i];
                if v * value(up) < 0.0 {
                    let f = |t: f64| kind.defect(&base.with_taus(here.tau1, t));
                    if let Ok(t) = bisect(f, here.tau2, up.tau2, 0.0) {
                        points.push([here.tau1, t]);
                    }
                }
            }
        }
    }
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    points.dedup();
    BoundaryCurve { kind, points }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Interior,
    Zero,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Interior => "interior",
            Branch::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub tau: f64,
    pub equilibrium_value: f64,
    pub stability: Classification,
    pub model: ModelId,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityChange {
    pub branch: Branch,
    pub tau: f64,
    pub from: Classification,
    pub to: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchDiagram {
    pub model: ModelId,
    /// Ordered by `tau`, interior before zero at equal `tau`.
    pub points: Vec<BranchPoint>,
    /// Delay where the interior branch meets zero, if inside the range.
    pub transcritical: Option<f64>,
    pub stability_changes: Vec<StabilityChange>,
}

fn with_tau(model: &Model, tau: f64) -> Result<Model> {
    Ok(match model {
        Model::Hutchinson(p) => Model::Hutchinson(p.with_tau(tau)),
        Model::Adde(p) => Model::Adde(p.with_tau(tau)),
        Model::Madde(p) => Model::Madde(p.with_tau(tau)),
        Model::Competition(_) => {
            return Err(Error::Config("branches are traced for single-species models only".into()))
        }
    })
}

/// `(value, stability)` of each branch at one delay.
fn branch_state(model: &Model, tau: f64) -> Result<Vec<(Branch, f64, Classification)>> {
    let m = with_tau(model, tau)?;
    let set = equilibria(&m)?;
    Ok(classify(&m, &set)
        .into_iter()
        .map(|v| {
            let branch = if v.label == EquilibriumLabel::Zero { Branch::Zero } else { Branch::Interior };
            (branch, v.state[0], v.classification)
        })
        .collect())
}

fn stability_of(model: &Model, tau: f64, branch: Branch) -> Option<Classification> {
    let m = with_tau(model, tau).ok()?;
    let set = equilibria(&m).ok()?;
    let label = match branch {
        Branch::Zero => EquilibriumLabel::Zero,
        Branch::Interior => EquilibriumLabel::XStar,
    };
    criterion_verdict(&m, &set, label)
}

/// Equilibrium branches of a single-species model over `n` delays in `[lo, hi]`.
pub fn branch_single(model: &Model, lo: f64, hi: f64, n: usize) -> Result<BranchDiagram> {
    model.validate()?;
    with_tau(model, lo)?;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(Error::Config(format!("branch range [{lo}, {hi}] with {n} points is invalid")));
    }
    let taus = axis((lo, hi), n);
    let rows: Vec<Vec<(Branch, f64, Classification)>> =
        taus.par_iter().map(|&t| branch_state(model, t)).collect::<Result<_>>()?;

    let mut points = Vec::new();
    for (&tau, row) in taus.iter().zip(&rows) {
        for branch in [Branch::Interior, Branch::Zero] {
            if let Some(&(_, value, stability)) = row.iter().find(|(b, _, _)| *b == branch) {
                points.push(BranchPoint { tau, equilibrium_value: value, stability, model: model.id(), branch });
            }
        }
    }

    let transcritical = match model {
        Model::Madde(p) | Model::Adde(p) => {
            let th = tau_h(p.gamma, p.mu);
            (th.exists && th.value >= lo && th.value <= hi).then_some(th.value)
        }
        _ => None,
    };

    let mut stability_changes = Vec::new();
    for branch in [Branch::Interior, Branch::Zero] {
        let series: Vec<(f64, Classification)> =
            points.iter().filter(|p| p.branch == branch).map(|p| (p.tau, p.stability)).collect();
        for w in series.windows(2) {
            let ((t0, c0), (t1, c1)) = (w[0], w[1]);
            if c0 == c1 {
                continue;
            }
            let same = |t: f64| stability_of(model, t, branch) == Some(c0);
            if let Some(tau) = bisect_transition(same, t0, t1, 1e-12) {
                stability_changes.push(StabilityChange { branch, tau, from: c0, to: c1 });
            }
        }
    }
    Ok(BranchDiagram { model: model.id(), points, transcritical, stability_changes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{adde_residual, madde_residual};
    use crate::models::{HutchinsonParams, SingleParams, Species};
    use std::collections::HashSet;
    use std::f64::consts::FRAC_PI_2;

    fn fig4(tau1: f64, tau2: f64) -> CompetitionParams {
        CompetitionParams::new(
            Species { gamma: 1.5, mu: 0.5, kappa: 0.8, alpha: 1.0, tau: tau1 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: 1.5, tau: tau2 },
        )
        .unwrap()
    }

    fn fig5(tau1: f64, tau2: f64) -> CompetitionParams {
        CompetitionParams::new(
            Species { gamma: 1.5, mu: 0.5, kappa: 1.2, alpha: 1.0, tau: tau1 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: 0.5, tau: tau2 },
        )
        .unwrap()
    }

    #[test]
    fn figure_test_points() {
        let c = classify_region(&fig4(1.0, 1.5));
        assert!(c.label == Region::C && c.strong_competition());
        assert_eq!(classify_region(&fig4(1.0, 2.0)).label, Region::A);
        assert_eq!(classify_region(&fig4(1.5, 1.0)).label, Region::B);
        assert_eq!(classify_region(&fig4(2.5, 3.0)).label, Region::D);
        let w = classify_region(&fig5(1.0, 1.0));
        assert!(w.label == Region::C && w.weak_competition());
    }

    #[test]
    fn single_survivor_strips() {
        assert_eq!(classify_region(&fig4(1.0, 2.9)).label, Region::A);
        assert_eq!(classify_region(&fig4(2.5, 1.0)).label, Region::B);
    }

    #[test]
    fn boundary_on_threshold() {
        let th = tau_h(1.5, 0.5).value;
        assert_eq!(classify_region(&fig4(th, 3.0)).label, Region::Boundary);
    }

    #[test]
    fn single_cell_grid() {
        let map = scan_grid(&fig4(0.0, 0.0), (1.0, 1.0), (1.5, 1.5), 1).unwrap();
        assert_eq!(map.cells.len(), 1);
        assert_eq!(map.cells[0].region.label, Region::C);
    }

    #[test]
    fn strong_competition_map() {
        let map = scan_grid(&fig4(0.0, 0.0), (0.0, 3.0), (0.0, 3.0), 61).unwrap();
        let labels: HashSet<Region> = map.cells.iter().map(|c| c.region.label).collect();
        for r in [Region::A, Region::B, Region::C, Region::D] {
            assert!(labels.contains(&r), "{r:?} missing");
        }
        let c = map.cell(20, 30);
        assert_eq!((c.tau1, c.tau2), (1.0, 1.5));
        assert_eq!(c.region.label, Region::C);
        for curve in &map.curves {
            assert!(!curve.points.is_empty(), "{:?}", curve.kind);
            for v in &curve.points {
                assert!(curve.kind.defect(&fig4(v[0], v[1])).abs() <= 1e-8);
            }
        }
        let s1 = &map.curves[0];
        assert!(s1.points.iter().all(|v| (v[0] - tau_h(1.5, 0.5).value).abs() < 1e-12));
    }

    #[test]
    fn weak_competition_band() {
        let map = scan_grid(&fig5(0.0, 0.0), (0.0, 3.0), (0.0, 3.0), 31).unwrap();
        let c_cells: Vec<_> = map.cells.iter().filter(|c| c.region.label == Region::C).collect();
        assert!(!c_cells.is_empty());
        assert!(c_cells.iter().all(|c| c.region.weak_competition()));
    }

    #[test]
    fn grid_is_deterministic() {
        let a = scan_grid(&fig4(0.0, 0.0), (0.0, 3.0), (0.0, 3.0), 17).unwrap();
        let b = scan_grid(&fig4(0.0, 0.0), (0.0, 3.0), (0.0, 3.0), 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn madde_branch_decreases_to_threshold() {
        let model = Model::Madde(SingleParams::new(1.5, 0.5, 1.0, 0.0).unwrap());
        let d = branch_single(&model, 0.0, 3.0, 61).unwrap();
        let th = 2.0 * 3f64.ln();
        assert!((d.transcritical.unwrap() - th).abs() < 1e-15);
        let interior: Vec<_> = d.points.iter().filter(|p| p.branch == Branch::Interior).collect();
        assert!(interior.windows(2).all(|w| w[1].equilibrium_value < w[0].equilibrium_value));
        assert!(interior.iter().all(|p| p.tau < th && p.stability == Classification::Stable));
        for p in &interior {
            let sp = SingleParams::new(1.5, 0.5, 1.0, p.tau).unwrap();
            assert!(madde_residual(&sp, p.equilibrium_value).abs() <= 1e-10);
        }
        let change = d.stability_changes.iter().find(|c| c.branch == Branch::Zero).unwrap();
        assert!((change.tau - th).abs() < 1e-9);
        assert_eq!((change.from, change.to), (Classification::Unstable, Classification::Stable));
    }

    #[test]
    fn hutchinson_branch_flips_at_hopf() {
        let model = Model::Hutchinson(HutchinsonParams::new(1.0, 1.0, 0.0).unwrap());
        let d = branch_single(&model, 0.0, 3.0, 31).unwrap();
        assert!(d.transcritical.is_none());
        assert!(d.points.iter().filter(|p| p.branch == Branch::Interior).all(|p| p.equilibrium_value == 1.0));
        let change = d.stability_changes.iter().find(|c| c.branch == Branch::Interior).unwrap();
        assert!((change.tau - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn adde_branch_lies_above_madde() {
        let p = SingleParams::new(1.5, 0.5, 1.0, 0.0).unwrap();
        let a = branch_single(&Model::Adde(p), 2.0, 2.0, 1).unwrap();
        let m = branch_single(&Model::Madde(p), 2.0, 2.0, 1).unwrap();
        let (ai, mi) = (a.points[0], m.points[0]);
        assert_eq!((ai.branch, mi.branch), (Branch::Interior, Branch::Interior));
        assert!(ai.equilibrium_value > mi.equilibrium_value);
        assert_eq!((ai.stability, mi.stability), (Classification::Stable, Classification::Stable));
        assert!(adde_residual(&p.with_tau(2.0), ai.equilibrium_value).abs() <= 1e-10);
    }

    #[test]
    fn competition_has_no_branches() {
        assert!(branch_single(&Model::Competition(fig4(1.0, 1.0)), 0.0, 1.0, 3).is_err());
    }
}
