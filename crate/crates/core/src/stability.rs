//! Characteristic functions, argument-principle root counting and equilibrium
//! classification.
//!
//! Every equilibrium is classified by its closed-form criterion first; the
//! number of characteristic roots in a right-half-plane rectangle is then counted
//! numerically and any disagreement is attached to the verdict as a warning.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::equilibria::{EquilibriumLabel, EquilibriumSet};
use crate::error::{Error, Result};
use crate::models::{CompetitionParams, HutchinsonParams, Model, SingleParams};

/// Below this `|lambda tau|` the delay kernel uses its Taylor series.
const KERNEL_SERIES_RADIUS: f64 = 1e-4;

/// Default total panel count along the contour.
pub const DEFAULT_PANELS: usize = 4096;

const MAX_PANELS: usize = 1 << 18;
const MAX_INFLATIONS: usize = 5;
const RESIDUE_LIMIT: f64 = 0.1;
const CONTOUR_ZERO_RATIO: f64 = 1e-9;

/// `(e^{-lambda tau} - 1)/lambda`, continuous through `lambda = 0` where it equals `-tau`.
pub fn delay_kernel(lambda: Complex64, tau: f64) -> Complex64 {
    let z = lambda * tau;
    if z.norm() < KERNEL_SERIES_RADIUS {
        tau * (-1.0 + z / 2.0 - z * z / 6.0)
    } else {
        ((-z).exp() - 1.0) / lambda
    }
}

/// Characteristic function of the mixed model linearized at `x_bar` (zero or `x*`).
///
/// Written in terms of `y = kappa x_bar`, which removes `kappa` from the spectrum.
pub fn char_single(p: &SingleParams, x_bar: f64, lambda: Complex64) -> Complex64 {
    let y = p.kappa * x_bar;
    let gain = p.gamma * (-p.tau * (p.mu + y)).exp();
    gain * ((-lambda * p.tau).exp() + y * delay_kernel(lambda, p.tau)) - p.mu - 2.0 * y - lambda
}

/// Characteristic function of the self-crowding model at `x_bar`.
pub fn char_adde(p: &SingleParams, x_bar: f64, lambda: Complex64) -> Complex64 {
    let e = (-p.mu * p.tau).exp();
    let denom = p.mu + p.kappa * (1.0 - e) * x_bar;
    let slope = p.gamma * p.mu * p.mu * e / (denom * denom);
    slope * (-lambda * p.tau).exp() - p.mu - 2.0 * p.kappa * x_bar - lambda
}

pub fn char_hutchinson(p: &HutchinsonParams, x_bar: f64, lambda: Complex64) -> Complex64 {
    let u = x_bar / p.k_cap;
    p.r * (1.0 - u) - lambda - p.r * u * (-lambda * p.tau).exp()
}

/// Determinant of the 2x2 characteristic matrix of the competition system at `state`.
pub fn char_competition(p: &CompetitionParams, state: [f64; 2], lambda: Complex64) -> Complex64 {
    let [s1, s2] = p.species;
    let [x1, x2] = state;
    let m1 = s1.mu + s1.kappa * x1 + s2.alpha * x2;
    let m2 = s2.mu + s1.alpha * x1 + s2.kappa * x2;
    let g1 = s1.gamma * (-s1.tau * m1).exp();
    let g2 = s2.gamma * (-s2.tau * m2).exp();
    let d1 = delay_kernel(lambda, s1.tau);
    let d2 = delay_kernel(lambda, s2.tau);
    let a11 = g1 * ((-lambda * s1.tau).exp() + x1 * s1.kappa * d1) - m1 - s1.kappa * x1 - lambda;
    let a12 = x1 * s2.alpha * (g1 * d1 - 1.0);
    let a21 = x2 * s1.alpha * (g2 * d2 - 1.0);
    let a22 = g2 * ((-lambda * s2.tau).exp() + x2 * s2.kappa * d2) - m2 - s2.kappa * x2 - lambda;
    a11 * a22 - a12 * a21
}

/// One factor of a factorized characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharBlock {
    /// `gain e^{-lambda tau} - shift - lambda`.
    Transcendental { gain: f64, tau: f64, shift: f64 },
    /// `m (e^{-lambda tau} - 1)/lambda - 1`; no roots with nonnegative real part.
    Kernel { m: f64, tau: f64 },
    /// `lambda + a`.
    Linear { a: f64 },
    /// `lambda^2 + b lambda + c`.
    Quadratic { b: f64, c: f64 },
}

impl CharBlock {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        match *self {
            CharBlock::Transcendental { gain, tau, shift } => gain * (-lambda * tau).exp() - shift - lambda,
            CharBlock::Kernel { m, tau } => m * delay_kernel(lambda, tau) - 1.0,
            CharBlock::Linear { a } => lambda + a,
            CharBlock::Quadratic { b, c } => lambda * lambda + b * lambda + c,
        }
    }

    /// Whether the block has a root with positive real part, decided in closed form.
    ///
    /// For the transcendental block this is `gain > shift` (a positive real root);
    /// complex pairs that a large delay can push across the imaginary axis are
    /// left to the numerical count.
    pub fn has_unstable_root(&self) -> bool {
        match *self {
            CharBlock::Transcendental { gain, shift, .. } => gain > shift,
            CharBlock::Kernel { .. } => false,
            CharBlock::Linear { a } => a < 0.0,
            CharBlock::Quadratic { b, c } => b < 0.0 || c < 0.0,
        }
    }
}

/// Evaluates a product of blocks.
pub fn eval_blocks(blocks: &[CharBlock], lambda: Complex64) -> Complex64 {
    blocks.iter().fold(Complex64::new(1.0, 0.0), |acc, b| acc * b.eval(lambda))
}

/// Factorization of the competition characteristic function at one of its equilibria.
pub fn char_competition_blocks(
    p: &CompetitionParams,
    label: EquilibriumLabel,
    state: [f64; 2],
) -> Result<Vec<CharBlock>> {
    let [s1, s2] = p.species;
    let [x1, x2] = state;
    let zero_block =
        |gain: f64, tau: f64, shift: f64| CharBlock::Transcendental { gain: gain * (-tau * shift).exp(), tau, shift };
    Ok(match label {
        EquilibriumLabel::E0 => vec![zero_block(s1.gamma, s1.tau, s1.mu), zero_block(s2.gamma, s2.tau, s2.mu)],
        EquilibriumLabel::E1 => vec![
            CharBlock::Kernel { m: s1.mu + s1.kappa * x1, tau: s1.tau },
            CharBlock::Linear { a: s1.kappa * x1 },
            zero_block(s2.gamma, s2.tau, s2.mu + s1.alpha * x1),
        ],
        EquilibriumLabel::E2 => vec![
            zero_block(s1.gamma, s1.tau, s1.mu + s2.alpha * x2),
            CharBlock::Kernel { m: s2.mu + s2.kappa * x2, tau: s2.tau },
            CharBlock::Linear { a: s2.kappa * x2 },
        ],
        EquilibriumLabel::Ec => vec![
            CharBlock::Kernel { m: s1.mu + s1.kappa * x1 + s2.alpha * x2, tau: s1.tau },
            CharBlock::Kernel { m: s2.mu + s1.alpha * x1 + s2.kappa * x2, tau: s2.tau },
            CharBlock::Quadratic {
                b: s1.kappa * x1 + s2.kappa * x2,
                c: x1 * x2 * (s1.kappa * s2.kappa - s1.alpha * s2.alpha),
            },
        ],
        other => return Err(Error::Config(format!("{} is not a competition equilibrium", other.as_str()))),
    })
}

/// The rectangle `[0, re_max] x [-im_max, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchRect {
    pub re_max: f64,
    pub im_max: f64,
}

impl SearchRect {
    /// `re_max = max(10, 5 rate)`, `im_max = max(50, 20 pi / tau)` (50 without delay).
    pub fn for_rate(rate: f64, tau_min: Option<f64>) -> Self {
        let im_max = match tau_min {
            Some(t) if t > 0.0 => (20.0 * PI / t).max(50.0),
            _ => 50.0,
        };
        SearchRect { re_max: (5.0 * rate).max(10.0), im_max }
    }

    pub fn for_model(model: &Model) -> Self {
        let tau_min = model.delays().into_iter().filter(|&t| t > 0.0).reduce(f64::min);
        let rate = match model {
            Model::Hutchinson(p) => 2.0 * p.r,
            Model::Adde(p) | Model::Madde(p) => p.gamma + p.mu,
            Model::Competition(p) => p.species.iter().map(|s| s.gamma + s.mu).fold(0.0, f64::max),
        };
        SearchRect::for_rate(rate, tau_min)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SearchRect { re_max: self.re_max * factor, im_max: self.im_max * factor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootCount {
    pub count: usize,
    /// Rectangle actually used after any inflation.
    pub rect: SearchRect,
}

/// Closed polygon of contour nodes, counter-clockwise, edge panels proportional to length.
fn contour_nodes(rect: &SearchRect, panels: usize) -> Vec<Complex64> {
    let corners = [
        Complex64::new(0.0, -rect.im_max),
        Complex64::new(rect.re_max, -rect.im_max),
        Complex64::new(rect.re_max, rect.im_max),
        Complex64::new(0.0, rect.im_max),
    ];
    let perimeter = 2.0 * rect.re_max + 4.0 * rect.im_max;
    let mut nodes = Vec::with_capacity(panels + 64);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let n = ((panels as f64 * (b - a).norm() / perimeter).round() as usize).max(16);
        for j in 0..n {
            nodes.push(a + (b - a) * (j as f64 / n as f64));
        }
    }
    nodes
}

enum Attempt {
    Count(usize),
    ZeroOnContour,
    Unresolved(f64),
}

fn winding<F: Fn(Complex64) -> Complex64>(f: &F, rect: &SearchRect, panels: usize) -> Attempt {
    let nodes = contour_nodes(rect, panels);
    let values: Vec<Complex64> = nodes.iter().map(|&z| f(z)).collect();
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    if values.iter().any(|v| v.norm().is_nan() || v.norm() < CONTOUR_ZERO_RATIO * scale) {
        return Attempt::ZeroOnContour;
    }
    let log_derivative: Vec<Complex64> = nodes
        .iter()
        .zip(&values)
        .map(|(&z, &fz)| {
            let h = 1e-6 * z.norm().max(1.0);
            (f(z + h) - f(z - h)) / (2.0 * h) / fz
        })
        .collect();

    let n = nodes.len();
    let mut phase = 0.0;
    let mut quad = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let k1 = (k + 1) % n;
        phase += (values[k1] / values[k]).arg();
        quad += (log_derivative[k] + log_derivative[k1]) * 0.5 * (nodes[k1] - nodes[k]);
    }
    let by_phase = phase / (2.0 * PI);
    let by_quad = quad / Complex64::new(0.0, 2.0 * PI);
    let rounded = by_phase.round();
    let residue = (by_quad.re - rounded).abs().max(by_quad.im.abs()).max((by_phase - rounded).abs());
    if residue <= RESIDUE_LIMIT && by_quad.re.round() == rounded && rounded >= 0.0 {
        Attempt::Count(rounded as usize)
    } else {
        Attempt::Unresolved(residue)
    }
}

/// Number of zeros of `f` inside `rect`, by the argument principle.
///
/// A zero on the contour triggers up to five 10% inflations of the rectangle; an
/// unresolved winding number doubles the panel count. Zeros on the imaginary axis
/// survive inflation and end as [`Error::Inconclusive`].
pub fn count_unstable_roots<F>(f: F, rect: SearchRect, panels: usize) -> Result<RootCount>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut rect = rect;
    let mut inflations = 0;
    let mut panels = panels.max(64);
    loop {
        match winding(&f, &rect, panels) {
            Attempt::Count(count) => return Ok(RootCount { count, rect }),
            Attempt::ZeroOnContour => {
                if inflations == MAX_INFLATIONS {
                    return Err(Error::Inconclusive { residue: f64::NAN });
                }
                inflations += 1;
                rect = rect.scaled(1.1);
            }
            Attempt::Unresolved(residue) => {
                if panels >= MAX_PANELS {
                    return Err(Error::Inconclusive { residue });
                }
                panels *= 2;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Stable,
    Unstable,
    /// On a stability boundary, or the numerical count was inconclusive.
    Marginal,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Unstable => "unstable",
            Classification::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub label: EquilibriumLabel,
    pub state: Vec<f64>,
    pub classification: Classification,
    /// `None` when the contour count was inconclusive.
    pub unstable_root_count: Option<usize>,
    pub search_rectangle: SearchRect,
    pub analytic_rule_applied: String,
    /// Set when the root count contradicts the closed-form criterion.
    pub warning: Option<String>,
}

/// Compares two quantities; equal within a relative `1e-12` means marginal.
fn compare(lhs: f64, rhs: f64) -> Option<bool> {
    if (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300) {
        None
    } else {
        Some(lhs > rhs)
    }
}

fn by_rule(stable: Option<bool>) -> Classification {
    match stable {
        Some(true) => Classification::Stable,
        Some(false) => Classification::Unstable,
        None => Classification::Marginal,
    }
}

/// Closed-form verdict and the rule used, for one equilibrium of `model`.
fn criterion(model: &Model, set: &EquilibriumSet, label: EquilibriumLabel, state: &[f64]) -> (Classification, String) {
    match model {
        Model::Hutchinson(p) => match label {
            EquilibriumLabel::Zero => (Classification::Unstable, "r > 0: zero unstable".into()),
            _ => (by_rule(compare(FRAC_PI_2, p.r * p.tau)), "r tau < pi/2: carrying capacity stable".into()),
        },
        Model::Madde(p) | Model::Adde(p) => match label {
            EquilibriumLabel::Zero => (
                by_rule(compare(1.0, crate::equilibria::r0_single(p.gamma, p.mu, p.tau))),
                "R0 < 1: zero stable; R0 > 1: zero unstable".into(),
            ),
            _ => (Classification::Stable, "R0 > 1: positive equilibrium stable".into()),
        },
        Model::Competition(p) => {
            let r0 = |i: usize| set.thresholds[i].r0;
            let x_star = |i: usize| crate::equilibria::madde_equilibrium(&p.species[i].single()).or_zero();
            let [s1, s2] = p.species;
            match label {
                EquilibriumLabel::E0 => {
                    let c1 = compare(1.0, r0(0));
                    let c2 = compare(1.0, r0(1));
                    let stable = match (c1, c2) {
                        (Some(false), _) | (_, Some(false)) => Some(false),
                        (Some(true), Some(true)) => Some(true),
                        _ => None,
                    };
                    (by_rule(stable), "E0 stable iff R0_1 < 1 and R0_2 < 1".into())
                }
                EquilibriumLabel::E1 => (
                    by_rule(compare(s1.alpha * state[0], s2.kappa * x_star(1))),
                    "E1 stable iff alpha1 x1* > kappa2 x2*".into(),
                ),
                EquilibriumLabel::E2 => (
                    by_rule(compare(s2.alpha * state[1], s1.kappa * x_star(0))),
                    "E2 stable iff alpha2 x2* > kappa1 x1*".into(),
                ),
                _ => {
                    let (x1, x2) = (x_star(0), x_star(1));
                    let weak = compare(s2.kappa * x2, s1.alpha * x1).zip(compare(s1.kappa * x1, s2.alpha * x2));
                    let stable = match weak {
                        Some((true, true)) => Some(true),
                        Some((false, false)) => Some(false),
                        _ => None,
                    };
                    (by_rule(stable), "Ec stable under weak competition (H_S), unstable under strong (H_U)".into())
                }
            }
        }
    }
}

/// Closed-form verdict for the equilibrium `label` of `set`, without root counting.
pub fn criterion_verdict(model: &Model, set: &EquilibriumSet, label: EquilibriumLabel) -> Option<Classification> {
    set.get(label).filter(|e| e.exists).map(|e| criterion(model, set, label, &e.state).0)
}

/// Characteristic function of `model` linearized at `state`.
pub fn char_model(model: &Model, state: &[f64], lambda: Complex64) -> Complex64 {
    match model {
        Model::Hutchinson(p) => char_hutchinson(p, state[0], lambda),
        Model::Adde(p) => char_adde(p, state[0], lambda),
        Model::Madde(p) => char_single(p, state[0], lambda),
        Model::Competition(p) => char_competition(p, [state[0], state[1]], lambda),
    }
}

/// Verdicts for every existing equilibrium of `set`.
pub fn classify(model: &Model, set: &EquilibriumSet) -> Vec<StabilityVerdict> {
    classify_with(model, set, SearchRect::for_model(model), DEFAULT_PANELS)
}

pub fn classify_with(model: &Model, set: &EquilibriumSet, rect: SearchRect, panels: usize) -> Vec<StabilityVerdict> {
    set.existing()
        .map(|eq| {
            let (rule_verdict, rule) = criterion(model, set, eq.label, &eq.state);
            let counted = count_unstable_roots(|l| char_model(model, &eq.state, l), rect, panels);
            let (count, used_rect) = match &counted {
                Ok(rc) => (Some(rc.count), rc.rect),
                Err(_) => (None, rect),
            };
            let numeric = match count {
                Some(0) => Classification::Stable,
                Some(_) => Classification::Unstable,
                None => Classification::Marginal,
            };
            let warning = (numeric != rule_verdict).then(|| {
                format!(
                    "root count {} disagrees with criterion verdict {}",
                    count.map_or("inconclusive".to_string(), |c| c.to_string()),
                    rule_verdict.as_str()
                )
            });
            StabilityVerdict {
                label: eq.label,
                state: eq.state.clone(),
                classification: rule_verdict,
                unstable_root_count: count,
                search_rectangle: used_rect,
                analytic_rule_applied: rule,
                warning,
            }
        })
        .collect()
}

/// Delay at which the carrying-capacity state of the Hutchinson model loses stability.
pub fn hutchinson_hopf_tau(r: f64) -> f64 {
    FRAC_PI_2 / r
}
