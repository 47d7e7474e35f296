//! Invasion exponents and the evolutionarily stable delay under a linear
//! growth/delay trade-off `gamma(tau) = gamma0 (1 + c tau)` (crowding scaled to 1).

use serde::Serialize;

use crate::equilibria::{madde_equilibrium, Flagged};
use crate::error::{Error, Result};
use crate::models::{SingleParams, Species};
use crate::roots::{bisect, golden_section_max};

/// Samples used to bracket the global maximum before refinement.
pub const ESS_SAMPLES: usize = 1000;

/// Growth of a rare species-2 mutant against a species-1 resident at its equilibrium.
///
/// Positive means the mutant invades: `kappa_2 x_2* - alpha_1 x_1*`.
pub fn invasion_exponent(resident: &Species, mutant: &Species) -> f64 {
    let x1 = madde_equilibrium(&resident.single()).or_zero();
    let x2 = madde_equilibrium(&mutant.single()).or_zero();
    mutant.kappa * x2 - resident.alpha * x1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffParams {
    pub gamma0: f64,
    pub c: f64,
    pub mu: f64,
}

impl TradeoffParams {
    pub fn new(gamma0: f64, c: f64, mu: f64) -> Result<Self> {
        let p = TradeoffParams { gamma0, c, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.gamma0 > self.mu && self.gamma0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "need gamma0 > mu > 0, got gamma0 = {}, mu = {}",
                self.gamma0, self.mu
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParams(format!("c = {} must be finite and > 0", self.c)));
        }
        Ok(())
    }

    pub fn gamma(&self, tau: f64) -> f64 {
        self.gamma0 * (1.0 + self.c * tau)
    }

    /// Equivalent single-species parameters at delay `tau`.
    pub fn at(&self, tau: f64) -> SingleParams {
        SingleParams { gamma: self.gamma(tau), mu: self.mu, kappa: 1.0, tau }
    }
}

/// Threshold delay: the positive root of `gamma0 (1 + c tau) e^{-mu tau} = mu`.
pub fn tau_h_tradeoff(tp: &TradeoffParams) -> Result<f64> {
    tp.validate()?;
    let f = |t: f64| tp.gamma(t) * (-tp.mu * t).exp() - tp.mu;
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoBracket { lo: 0.0, hi });
        }
    }
    bisect(f, 0.0, hi, 0.0)
}

/// Interior equilibrium at delay `tau`.
pub fn xstar_tradeoff(tp: &TradeoffParams, tau: f64) -> Flagged {
    madde_equilibrium(&tp.at(tau))
}

/// `dx*/dtau` from implicit differentiation of the equilibrium equation.
pub fn dxstar_dtau(tp: &TradeoffParams, tau: f64) -> f64 {
    let x = xstar_tradeoff(tp, tau).or_zero();
    let m = tp.mu + x;
    m * (tp.c / (1.0 + tp.c * tau) - m) / (1.0 + tau * m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EssKind {
    InteriorMax,
    BoundaryZero,
}

impl EssKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EssKind::InteriorMax => "interior-max",
            EssKind::BoundaryZero => "boundary-zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EssResult {
    pub tau_star: f64,
    pub xstar_max: f64,
    pub tau_h: f64,
    pub kind: EssKind,
    pub dxstar_at_star: f64,
    /// Sign changes of `dx*/dtau` on the sampling grid.
    pub critical_points: usize,
}

/// `(tau, x*, dx*/dtau)` on `n` evenly spaced delays in `[0, tau_H]`.
pub fn ess_curve(tp: &TradeoffParams, n: usize) -> Result<Vec<[f64; 3]>> {
    let th = tau_h_tradeoff(tp)?;
    let n = n.max(2);
    Ok((0..n)
        .map(|k| {
            let t = th * k as f64 / (n - 1) as f64;
            [t, xstar_tradeoff(tp, t).or_zero(), dxstar_dtau(tp, t)]
        })
        .collect())
}

/// Global maximizer of `x*(tau)` on `[0, tau_H]`.
///
/// Dense sampling picks the best sample; golden section refines within its
/// neighbours, and an interior maximum is then polished to the root of `dx*/dtau`.
pub fn ess_tau(tp: &TradeoffParams) -> Result<EssResult> {
    let curve = ess_curve(tp, ESS_SAMPLES)?;
    let th = curve[curve.len() - 1][0];
    let best = curve.iter().enumerate().fold(0, |b, (k, row)| if row[1] > curve[b][1] { k } else { b });
    let lo = curve[best.saturating_sub(1)][0];
    let hi = curve[(best + 1).min(curve.len() - 1)][0];
    let (mut tau_star, _) = golden_section_max(|t| xstar_tradeoff(tp, t).or_zero(), lo, hi, 1e-8);

    let slope = |t: f64| dxstar_dtau(tp, t);
    let kind = if tau_star > 1e-6 { EssKind::InteriorMax } else { EssKind::BoundaryZero };
    if kind == EssKind::InteriorMax {
        let (a, b) = ((tau_star - 1e-6).max(lo), (tau_star + 1e-6).min(hi));
        if let Ok(t) = bisect(slope, a, b, 0.0) {
            tau_star = t;
        }
    } else {
        tau_star = 0.0;
    }
    let critical_points = curve.windows(2).filter(|w| w[0][2] != 0.0 && w[0][2].signum() != w[1][2].signum()).count();
    Ok(EssResult {
        tau_star,
        xstar_max: xstar_tradeoff(tp, tau_star).or_zero(),
        tau_h: th,
        kind,
        dxstar_at_star: slope(tau_star),
        critical_points,
    })
}
