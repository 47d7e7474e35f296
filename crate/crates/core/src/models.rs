//! Right-hand sides of the four delayed logistic models and their parameter records.
//!
//! * `hutchinson`: `x' = r x (1 - x(t-tau)/K)`
//! * `adde`: births from survivors of a self-crowding cohort (discrete delay only)
//! * `madde`: births from survivors that crowd with the whole population, giving a
//!   discrete delay plus a running window integral
//! * `competition`: the two-species extension of `madde`

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{DelaySpec, DelaySystem, IntegralState};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {v} must be finite and > 0")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {v} must be finite and >= 0")))
    }
}

/// Growth, death, crowding and delay of one species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleParams {
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
    pub tau: f64,
}

impl SingleParams {
    pub fn new(gamma: f64, mu: f64, kappa: f64, tau: f64) -> Result<Self> {
        let p = SingleParams { gamma, mu, kappa, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("gamma", self.gamma)?;
        positive("mu", self.mu)?;
        positive("kappa", self.kappa)?;
        nonnegative("tau", self.tau)
    }

    pub fn with_tau(self, tau: f64) -> Self {
        SingleParams { tau, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HutchinsonParams {
    pub r: f64,
    pub k_cap: f64,
    pub tau: f64,
}

impl HutchinsonParams {
    pub fn new(r: f64, k_cap: f64, tau: f64) -> Result<Self> {
        let p = HutchinsonParams { r, k_cap, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("r", self.r)?;
        positive("K", self.k_cap)?;
        nonnegative("tau", self.tau)
    }

    pub fn with_tau(self, tau: f64) -> Self {
        HutchinsonParams { tau, ..self }
    }
}

/// One competitor. `alpha` is the pressure this species exerts on the *other* one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Species {
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub tau: f64,
}

impl Species {
    pub fn single(&self) -> SingleParams {
        SingleParams { gamma: self.gamma, mu: self.mu, kappa: self.kappa, tau: self.tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompetitionParams {
    pub species: [Species; 2],
}

impl CompetitionParams {
    pub fn new(species1: Species, species2: Species) -> Result<Self> {
        let p = CompetitionParams { species: [species1, species2] };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.species.iter().enumerate() {
            let n = i + 1;
            positive(&format!("gamma{n}"), s.gamma)?;
            positive(&format!("mu{n}"), s.mu)?;
            positive(&format!("kappa{n}"), s.kappa)?;
            nonnegative(&format!("alpha{n}"), s.alpha)?;
            nonnegative(&format!("tau{n}"), s.tau)?;
        }
        Ok(())
    }

    pub fn with_taus(mut self, tau1: f64, tau2: f64) -> Self {
        self.species[0].tau = tau1;
        self.species[1].tau = tau2;
        self
    }

    pub fn taus(&self) -> [f64; 2] {
        [self.species[0].tau, self.species[1].tau]
    }

    /// Weights of the window integrand for species `i`: `(kappa_1, alpha_2)` for
    /// species 1 and `(alpha_1, kappa_2)` for species 2.
    pub fn window_weights(&self, i: usize) -> [f64; 2] {
        let [s1, s2] = self.species;
        if i == 0 {
            [s1.kappa, s2.alpha]
        } else {
            [s1.alpha, s2.kappa]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Hutchinson,
    Adde,
    Madde,
    Competition,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::Hutchinson, ModelId::Adde, ModelId::Madde, ModelId::Competition];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Hutchinson => "hutchinson",
            ModelId::Adde => "adde",
            ModelId::Madde => "madde",
            ModelId::Competition => "competition",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            Error::Config(format!("unknown model '{s}' (expected hutchinson, adde, madde or competition)"))
        })
    }
}

/// A model together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", content = "params", rename_all = "lowercase")]
pub enum Model {
    Hutchinson(HutchinsonParams),
    Adde(SingleParams),
    Madde(SingleParams),
    Competition(CompetitionParams),
}

impl Model {
    pub fn id(&self) -> ModelId {
        match self {
            Model::Hutchinson(_) => ModelId::Hutchinson,
            Model::Adde(_) => ModelId::Adde,
            Model::Madde(_) => ModelId::Madde,
            Model::Competition(_) => ModelId::Competition,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Hutchinson(p) => p.validate(),
            Model::Adde(p) | Model::Madde(p) => p.validate(),
            Model::Competition(p) => p.validate(),
        }
    }

    pub fn delays(&self) -> Vec<f64> {
        match self {
            Model::Hutchinson(p) => vec![p.tau],
            Model::Adde(p) | Model::Madde(p) => vec![p.tau],
            Model::Competition(p) => p.taus().to_vec(),
        }
    }
}

fn decay(mu: f64, tau: f64, exposure: f64) -> f64 {
    (-mu * tau - exposure).exp()
}

/// Survivors at `t` of the `x(t - tau)` individuals alive one delay earlier, when
/// they die at rate `mu` and crowd with the whole population whose window integral
/// is `window_integral`.
pub fn survival_factor(x_at_minus_tau: f64, p: &SingleParams, window_integral: f64) -> f64 {
    x_at_minus_tau * decay(p.mu, p.tau, p.kappa * window_integral)
}

/// `z` is the integral of `x` over `[t - tau, t]`.
pub fn rhs_madde(p: &SingleParams, x_now: f64, x_delayed: f64, z: f64) -> f64 {
    p.gamma * survival_factor(x_delayed, p, z) - p.mu * x_now - p.kappa * x_now * x_now
}

pub fn rhs_adde(p: &SingleParams, x_now: f64, x_delayed: f64) -> f64 {
    let e = (-p.mu * p.tau).exp();
    p.gamma * p.mu * e * x_delayed / (p.mu + p.kappa * (1.0 - e) * x_delayed) - p.mu * x_now - p.kappa * x_now * x_now
}

pub fn rhs_hutchinson(p: &HutchinsonParams, x_now: f64, x_delayed: f64) -> f64 {
    p.r * x_now * (1.0 - x_delayed / p.k_cap)
}

/// Two-species competition. `x_delayed_i` is the state at `t - tau_i`; only its
/// `i`-th component enters. `z_i` is the weighted window integral of species `i`
/// (see [`CompetitionParams::window_weights`]).
pub fn rhs_competition(
    p: &CompetitionParams,
    x_now: [f64; 2],
    x_delayed_1: [f64; 2],
    x_delayed_2: [f64; 2],
    z1: f64,
    z2: f64,
) -> [f64; 2] {
    let [s1, s2] = p.species;
    let [x1, x2] = x_now;
    [
        s1.gamma * (x_delayed_1[0] * decay(s1.mu, s1.tau, z1)) - s1.mu * x1 - s1.kappa * x1 * x1 - s2.alpha * x1 * x2,
        s2.gamma * (x_delayed_2[1] * decay(s2.mu, s2.tau, z2)) - s2.mu * x2 - s2.kappa * x2 * x2 - s1.alpha * x1 * x2,
    ]
}

impl DelaySystem for Model {
    fn dim(&self) -> usize {
        match self {
            Model::Competition(_) => 2,
            _ => 1,
        }
    }

    fn delay_spec(&self) -> DelaySpec {
        match self {
            Model::Hutchinson(p) => DelaySpec { discrete_delays: vec![p.tau], integral_states: vec![] },
            Model::Adde(p) => DelaySpec { discrete_delays: vec![p.tau], integral_states: vec![] },
            Model::Madde(p) => DelaySpec {
                discrete_delays: vec![p.tau],
                integral_states: vec![IntegralState { window: p.tau, weights: vec![1.0] }],
            },
            Model::Competition(p) => DelaySpec {
                discrete_delays: p.taus().to_vec(),
                integral_states: (0..2)
                    .map(|i| IntegralState { window: p.species[i].tau, weights: p.window_weights(i).to_vec() })
                    .collect(),
            },
        }
    }

    fn rhs(&self, x: &[f64], delayed: &[f64], z: &[f64], out: &mut [f64]) {
        match self {
            Model::Hutchinson(p) => out[0] = rhs_hutchinson(p, x[0], delayed[0]),
            Model::Adde(p) => out[0] = rhs_adde(p, x[0], delayed[0]),
            Model::Madde(p) => out[0] = rhs_madde(p, x[0], delayed[0], z[0]),
            Model::Competition(p) => {
                let r =
                    rhs_competition(p, [x[0], x[1]], [delayed[0], delayed[1]], [delayed[2], delayed[3]], z[0], z[1]);
                out.copy_from_slice(&r);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG6: SingleParams = SingleParams { gamma: 1.5, mu: 0.5, kappa: 1.0, tau: 1.0 };
    const XSTAR_FIG6: f64 = 0.2258613577662262;

    #[test]
    fn madde_vanishes_at_equilibrium_and_zero() {
        let x = XSTAR_FIG6;
        assert!(rhs_madde(&FIG6, x, x, FIG6.tau * x).abs() < 1e-14);
        assert_eq!(rhs_madde(&FIG6, 0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn madde_hand_value() {
        let expected = 1.5 * 0.2 * (-0.65f64).exp() - 0.05 - 0.01;
        assert!((rhs_madde(&FIG6, 0.1, 0.2, 0.15) - expected).abs() < 1e-15);
        assert!((expected - 0.0966).abs() < 1e-4);
    }

    #[test]
    fn adde_limits() {
        assert_eq!(rhs_adde(&FIG6, 0.0, 0.0), 0.0);
        let p0 = FIG6.with_tau(0.0);
        assert_eq!(rhs_adde(&p0, 0.3, 0.4), 1.5 * 0.4 - 0.5 * 0.3 - 0.09);
    }

    #[test]
    fn adde_matches_independent_coding() {
        let (g, m, k, t, x) = (1.5f64, 0.5f64, 1.0f64, 1.0f64, 0.3f64);
        let survive = 1.0 / (1.0 / ((-m * t).exp()) + k * x * (1.0 - (-m * t).exp()) / (m * (-m * t).exp()));
        let other = g * x * survive - m * x - k * x * x;
        assert!((rhs_adde(&FIG6, x, x) - other).abs() < 1e-14);
    }

    #[test]
    fn hutchinson_values() {
        let p = HutchinsonParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(rhs_hutchinson(&p, 0.7, 1.0), 0.0);
        assert_eq!(rhs_hutchinson(&p, 0.0, 0.3), 0.0);
        assert_eq!(rhs_hutchinson(&p, 0.5, 0.25), 0.375);
    }

    #[test]
    fn survival_factor_closed_forms() {
        let p = SingleParams { kappa: 1e-300, ..FIG6 };
        assert!((survival_factor(0.4, &p, 1.0) - 0.4 * (-0.5f64).exp()).abs() < 1e-16);
        assert_eq!(survival_factor(0.4, &FIG6.with_tau(0.0), 0.0), 0.4);
        let xb = 0.3;
        let direct = xb * (-(FIG6.mu + FIG6.kappa * xb) * FIG6.tau).exp();
        assert!((survival_factor(xb, &FIG6, FIG6.tau * xb) - direct).abs() < 1e-16);
    }

    fn competition(alpha1: f64, alpha2: f64) -> CompetitionParams {
        CompetitionParams::new(
            Species { gamma: 1.5, mu: 0.5, kappa: 0.8, alpha: alpha1, tau: 1.0 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: alpha2, tau: 1.5 },
        )
        .unwrap()
    }

    #[test]
    fn competition_decouples_without_interaction() {
        let p = competition(0.0, 0.0);
        let x = [0.3, 0.6];
        let d1 = [0.25, 0.9];
        let d2 = [0.8, 0.55];
        let (za, zb) = (0.4, 0.7);
        let got = rhs_competition(&p, x, d1, d2, p.species[0].kappa * za, p.species[1].kappa * zb);
        assert_eq!(got[0], rhs_madde(&p.species[0].single(), x[0], d1[0], za));
        assert_eq!(got[1], rhs_madde(&p.species[1].single(), x[1], d2[1], zb));
    }

    #[test]
    fn competition_matches_independent_coding() {
        let p = competition(1.0, 1.5);
        let x = [0.8, 0.1];
        let w1 = p.window_weights(0);
        let w2 = p.window_weights(1);
        let z1 = 1.0 * (w1[0] * x[0] + w1[1] * x[1]);
        let z2 = 1.5 * (w2[0] * x[0] + w2[1] * x[1]);
        let got = rhs_competition(&p, x, x, x, z1, z2);
        // species 1: gamma=1.5 mu=0.5 kappa=0.8, pressure from species 2 alpha2=1.5
        let e1 =
            1.5 * 0.8 * (-(0.5f64 * 1.0) - 1.0 * (0.8 * 0.8 + 1.5 * 0.1)).exp() - 0.5 * 0.8 - 0.8 * 0.64 - 1.5 * 0.08;
        let e2 = 2.0 * 0.1 * (-(0.5f64 * 1.5) - 1.5 * (1.0 * 0.8 + 1.0 * 0.1)).exp() - 0.05 - 0.01 - 1.0 * 0.08;
        assert!((got[0] - e1).abs() < 1e-14, "{} vs {}", got[0], e1);
        assert!((got[1] - e2).abs() < 1e-14, "{} vs {}", got[1], e2);
    }

    #[test]
    fn model_ids_round_trip() {
        for id in ModelId::ALL {
            assert_eq!(id.as_str().parse::<ModelId>().unwrap(), id);
        }
        assert!("logistic".parse::<ModelId>().is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(SingleParams::new(1.5, 0.0, 1.0, 1.0).is_err());
        assert!(SingleParams::new(1.5, 0.5, 1.0, -1.0).is_err());
        assert!(HutchinsonParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(CompetitionParams::new(
            Species { gamma: 1.5, mu: 0.5, kappa: 0.8, alpha: 1.0, tau: 1.0 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: -1.0, tau: 1.0 },
        )
        .is_err());
    }
}
