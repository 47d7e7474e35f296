//! Survival thresholds and equilibria.
//!
//! For the single-species models the interior equilibrium solves a scalar monotone
//! equation on `(0, K]`, where `K = (gamma e^{-mu tau} - mu)/kappa` is the
//! delay-reduced carrying capacity; bisection on that bracket always converges.
//! For competition, `kappa_i x_i^*` solves the same scalar equation per species, and
//! the coexistence state follows from a 2x2 linear system.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{CompetitionParams, Model, ModelId, SingleParams};
use crate::roots::bisect;

/// Coexistence components at or below this count as absent.
pub const EXISTENCE_MARGIN: f64 = 1e-12;

/// A value with an existence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flagged {
    pub value: f64,
    pub exists: bool,
}

impl Flagged {
    fn absent() -> Self {
        Flagged { value: 0.0, exists: false }
    }

    /// The value when it exists, zero otherwise.
    pub fn or_zero(&self) -> f64 {
        if self.exists {
            self.value
        } else {
            0.0
        }
    }
}

pub fn r0_single(gamma: f64, mu: f64, tau: f64) -> f64 {
    gamma * (-mu * tau).exp() / mu
}

/// Delay at which the survival ratio drops to 1. `exists` is false (and the value 0)
/// when `gamma <= mu`, i.e. there is no delay window allowing survival.
pub fn tau_h(gamma: f64, mu: f64) -> Flagged {
    if gamma > mu {
        Flagged { value: (gamma / mu).ln() / mu, exists: true }
    } else {
        Flagged::absent()
    }
}

pub fn carrying_capacity(gamma: f64, mu: f64, kappa: f64, tau: f64) -> Flagged {
    let k = (gamma * (-mu * tau).exp() - mu) / kappa;
    Flagged { value: k, exists: k > 0.0 }
}

/// `gamma e^{-tau(mu + kappa x)} - (mu + kappa x)`.
pub fn madde_residual(p: &SingleParams, x: f64) -> f64 {
    let m = p.mu + p.kappa * x;
    p.gamma * (-p.tau * m).exp() - m
}

/// Steady-state balance of the self-crowding model: births minus deaths per capita.
pub fn adde_residual(p: &SingleParams, x: f64) -> f64 {
    let e = (-p.mu * p.tau).exp();
    p.gamma * p.mu * e / (p.mu + p.kappa * (1.0 - e) * x) - (p.mu + p.kappa * x)
}

fn interior_root(p: &SingleParams, residual: fn(&SingleParams, f64) -> f64) -> Flagged {
    if r0_single(p.gamma, p.mu, p.tau) <= 1.0 {
        return Flagged::absent();
    }
    let k = carrying_capacity(p.gamma, p.mu, p.kappa, p.tau).value;
    match bisect(|x| residual(p, x), 0.0, k, 0.0) {
        Ok(x) if x > 0.0 => Flagged { value: x, exists: true },
        _ => Flagged::absent(),
    }
}

/// Positive equilibrium of the mixed (whole-population crowding) model.
pub fn madde_equilibrium(p: &SingleParams) -> Flagged {
    interior_root(p, madde_residual)
}

/// Positive equilibrium of the self-crowding model.
pub fn adde_equilibrium(p: &SingleParams) -> Flagged {
    interior_root(p, adde_residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EquilibriumLabel {
    /// Extinction state of a single-species model.
    #[serde(rename = "zero")]
    Zero,
    /// Interior state of a single-species model.
    #[serde(rename = "x*")]
    XStar,
    E0,
    E1,
    E2,
    Ec,
}

impl EquilibriumLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumLabel::Zero => "zero",
            EquilibriumLabel::XStar => "x*",
            EquilibriumLabel::E0 => "E0",
            EquilibriumLabel::E1 => "E1",
            EquilibriumLabel::E2 => "E2",
            EquilibriumLabel::Ec => "Ec",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub label: EquilibriumLabel,
    pub state: Vec<f64>,
    /// Largest absolute residual of the defining steady-state equations.
    pub residual: f64,
    pub exists: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeciesThresholds {
    pub r0: f64,
    pub tau_h: Flagged,
    pub carrying_capacity: Flagged,
}

impl SpeciesThresholds {
    pub fn of(p: &SingleParams) -> Self {
        SpeciesThresholds {
            r0: r0_single(p.gamma, p.mu, p.tau),
            tau_h: tau_h(p.gamma, p.mu),
            carrying_capacity: carrying_capacity(p.gamma, p.mu, p.kappa, p.tau),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub model: ModelId,
    pub equilibria: Vec<Equilibrium>,
    /// One entry per species; empty for the Hutchinson model.
    pub thresholds: Vec<SpeciesThresholds>,
}

impl EquilibriumSet {
    pub fn get(&self, label: EquilibriumLabel) -> Option<&Equilibrium> {
        self.equilibria.iter().find(|e| e.label == label)
    }

    pub fn existing(&self) -> impl Iterator<Item = &Equilibrium> {
        self.equilibria.iter().filter(|e| e.exists)
    }
}

/// Equilibria of any model.
pub fn equilibria(model: &Model) -> Result<EquilibriumSet> {
    model.validate()?;
    match model {
        Model::Hutchinson(p) => Ok(EquilibriumSet {
            model: ModelId::Hutchinson,
            equilibria: vec![
                point(EquilibriumLabel::Zero, vec![0.0], 0.0),
                point(EquilibriumLabel::XStar, vec![p.k_cap], 0.0),
            ],
            thresholds: vec![],
        }),
        Model::Madde(p) | Model::Adde(p) => {
            let (root, residual): (Flagged, fn(&SingleParams, f64) -> f64) = if model.id() == ModelId::Madde {
                (madde_equilibrium(p), madde_residual)
            } else {
                (adde_equilibrium(p), adde_residual)
            };
            let mut eqs = vec![point(EquilibriumLabel::Zero, vec![0.0], 0.0)];
            if root.exists {
                eqs.push(point(EquilibriumLabel::XStar, vec![root.value], residual(p, root.value).abs()));
            }
            Ok(EquilibriumSet { model: model.id(), equilibria: eqs, thresholds: vec![SpeciesThresholds::of(p)] })
        }
        Model::Competition(p) => competition_equilibria(p),
    }
}

fn point(label: EquilibriumLabel, state: Vec<f64>, residual: f64) -> Equilibrium {
    Equilibrium { label, state, residual, exists: true, note: None }
}

/// Semi-trivial levels `x_i^*` (zero when species `i` cannot persist alone).
pub fn semi_trivial_levels(p: &CompetitionParams) -> [Flagged; 2] {
    [madde_equilibrium(&p.species[0].single()), madde_equilibrium(&p.species[1].single())]
}

/// Solution of the coexistence linear system; `None` in the marginal case.
pub fn coexistence_state(p: &CompetitionParams, x1_star: f64, x2_star: f64) -> Option<[f64; 2]> {
    let [s1, s2] = p.species;
    let det = s1.kappa * s2.kappa - s1.alpha * s2.alpha;
    if det.abs() <= 1e-12 * (s1.kappa * s2.kappa).max(s1.alpha * s2.alpha) {
        return None;
    }
    Some([
        s2.kappa * (s1.kappa * x1_star - s2.alpha * x2_star) / det,
        s1.kappa * (s2.kappa * x2_star - s1.alpha * x1_star) / det,
    ])
}

/// Residuals of `kappa_1 x1 + alpha_2 x2 = kappa_1 x1*` and `alpha_1 x1 + kappa_2 x2 = kappa_2 x2*`.
pub fn coexistence_linear_residual(p: &CompetitionParams, state: [f64; 2], x_star: [f64; 2]) -> f64 {
    let [s1, s2] = p.species;
    let r1 = s1.kappa * state[0] + s2.alpha * state[1] - s1.kappa * x_star[0];
    let r2 = s1.alpha * state[0] + s2.kappa * state[1] - s2.kappa * x_star[1];
    r1.abs().max(r2.abs())
}

/// Per-species balance `gamma_i e^{-tau_i m_i} - m_i` with `m_1 = mu_1 + kappa_1 x1 + alpha_2 x2`
/// and `m_2 = mu_2 + alpha_1 x1 + kappa_2 x2`; only rows with a nonzero component count.
pub fn competition_residual(p: &CompetitionParams, state: [f64; 2]) -> f64 {
    let [s1, s2] = p.species;
    let m = [s1.mu + s1.kappa * state[0] + s2.alpha * state[1], s2.mu + s1.alpha * state[0] + s2.kappa * state[1]];
    let mut worst: f64 = 0.0;
    for (i, s) in p.species.iter().enumerate() {
        if state[i] != 0.0 {
            worst = worst.max((s.gamma * (-s.tau * m[i]).exp() - m[i]).abs());
        }
    }
    worst
}

pub fn competition_equilibria(p: &CompetitionParams) -> Result<EquilibriumSet> {
    p.validate()?;
    let [s1, s2] = p.species;
    let det = s1.kappa * s2.kappa - s1.alpha * s2.alpha;
    if det.abs() <= 1e-12 * (s1.kappa * s2.kappa).max(s1.alpha * s2.alpha) {
        return Err(Error::MarginalCase);
    }
    let [x1, x2] = semi_trivial_levels(p);
    let mut eqs = vec![point(EquilibriumLabel::E0, vec![0.0, 0.0], 0.0)];
    if x1.exists {
        eqs.push(point(EquilibriumLabel::E1, vec![x1.value, 0.0], competition_residual(p, [x1.value, 0.0])));
    }
    if x2.exists {
        eqs.push(point(EquilibriumLabel::E2, vec![0.0, x2.value], competition_residual(p, [0.0, x2.value])));
    }
    if x1.exists && x2.exists {
        let xc = coexistence_state(p, x1.value, x2.value).ok_or(Error::MarginalCase)?;
        let exists = xc[0] > EXISTENCE_MARGIN && xc[1] > EXISTENCE_MARGIN;
        let degenerate = !exists && xc[0] >= -EXISTENCE_MARGIN && xc[1] >= -EXISTENCE_MARGIN;
        eqs.push(Equilibrium {
            label: EquilibriumLabel::Ec,
            state: xc.to_vec(),
            residual: competition_residual(p, xc),
            exists,
            note: degenerate.then(|| "degenerate: a coexistence component is zero".to_string()),
        });
    }
    Ok(EquilibriumSet {
        model: ModelId::Competition,
        equilibria: eqs,
        thresholds: p.species.iter().map(|s| SpeciesThresholds::of(&s.single())).collect(),
    })
}
