//! Parameter files and their conversion into models.
//!
//! A file is either a JSON object of numbers or lines of `key = value` with `#`
//! comments. Keys a file leaves out take the defaults of the figure presets.

use std::collections::BTreeMap;
use std::path::Path;

use madde_core::{CompetitionParams, HutchinsonParams, Model, ModelId, SingleParams, Species, TradeoffParams};

use crate::error::{config, CliError, CliResult};

pub const SINGLE_KEYS: [&str; 4] = ["gamma", "mu", "kappa", "tau"];
pub const HUTCHINSON_KEYS: [&str; 3] = ["r", "K", "tau"];
pub const COMPETITION_KEYS: [&str; 10] =
    ["gamma1", "mu1", "kappa1", "alpha1", "tau1", "gamma2", "mu2", "kappa2", "alpha2", "tau2"];
pub const TRADEOFF_KEYS: [&str; 3] = ["gamma0", "c", "mu"];

pub const SINGLE_PRESET: SingleParams = SingleParams { gamma: 1.5, mu: 0.5, kappa: 1.0, tau: 1.0 };
pub const HUTCHINSON_PRESET: HutchinsonParams = HutchinsonParams { r: 1.0, k_cap: 1.0, tau: 1.0 };
pub const TRADEOFF_PRESET: TradeoffParams = TradeoffParams { gamma0: 3.0, c: 8.0, mu: 2.0 };

/// Strong competition (species 1 kappa 0.8, alpha 1; species 2 kappa 1, alpha 1.5).
pub fn strong_competition(tau1: f64, tau2: f64) -> CompetitionParams {
    CompetitionParams {
        species: [
            Species { gamma: 1.5, mu: 0.5, kappa: 0.8, alpha: 1.0, tau: tau1 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: 1.5, tau: tau2 },
        ],
    }
}

/// Weak competition (species 1 kappa 1.2, alpha 1; species 2 kappa 1, alpha 0.5).
pub fn weak_competition(tau1: f64, tau2: f64) -> CompetitionParams {
    CompetitionParams {
        species: [
            Species { gamma: 1.5, mu: 0.5, kappa: 1.2, alpha: 1.0, tau: tau1 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: 0.5, tau: tau2 },
        ],
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamRecord(BTreeMap<String, f64>);

impl ParamRecord {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text).map_err(|e| config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        if text.trim_start().starts_with('{') {
            let map: BTreeMap<String, f64> =
                serde_json::from_str(text).map_err(|e| config(format!("invalid JSON parameters: {e}")))?;
            return Ok(ParamRecord(map));
        }
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| config(format!("line {}: expected key = value", n + 1)))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| config(format!("line {}: '{}' is not a number", n + 1, value.trim())))?;
            if map.insert(key.to_string(), value).is_some() {
                return Err(config(format!("line {}: duplicate key '{key}'", n + 1)));
            }
        }
        Ok(ParamRecord(map))
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str], what: &str) -> CliResult<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => {
                Err(config(format!("key '{k}' does not apply to {what} (expected one of {})", allowed.join(", "))))
            }
            None => Ok(()),
        }
    }
}

/// Delay overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct DelayFlags {
    pub tau: Option<f64>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
}

pub fn build_model(id: ModelId, record: &ParamRecord, delays: DelayFlags) -> CliResult<Model> {
    let mut rec = record.clone();
    if id == ModelId::Competition {
        if delays.tau.is_some() {
            return Err(config("--tau applies to single-species models; use --tau1/--tau2"));
        }
        if let Some(t) = delays.tau1 {
            rec.set("tau1", t);
        }
        if let Some(t) = delays.tau2 {
            rec.set("tau2", t);
        }
    } else {
        if delays.tau1.is_some() || delays.tau2.is_some() {
            return Err(config("--tau1/--tau2 apply to the competition model; use --tau"));
        }
        if let Some(t) = delays.tau {
            rec.set("tau", t);
        }
    }

    let model = match id {
        ModelId::Hutchinson => {
            rec.check_keys(&HUTCHINSON_KEYS, "the hutchinson model")?;
            let d = HUTCHINSON_PRESET;
            Model::Hutchinson(HutchinsonParams {
                r: rec.get_or("r", d.r),
                k_cap: rec.get_or("K", d.k_cap),
                tau: rec.get_or("tau", d.tau),
            })
        }
        ModelId::Adde | ModelId::Madde => {
            rec.check_keys(&SINGLE_KEYS, &format!("the {id} model"))?;
            let d = SINGLE_PRESET;
            let p = SingleParams {
                gamma: rec.get_or("gamma", d.gamma),
                mu: rec.get_or("mu", d.mu),
                kappa: rec.get_or("kappa", d.kappa),
                tau: rec.get_or("tau", d.tau),
            };
            if id == ModelId::Adde {
                Model::Adde(p)
            } else {
                Model::Madde(p)
            }
        }
        ModelId::Competition => {
            rec.check_keys(&COMPETITION_KEYS, "the competition model")?;
            let d = strong_competition(1.0, 1.5);
            let species = |i: usize| {
                let s = d.species[i];
                let n = i + 1;
                Species {
                    gamma: rec.get_or(&format!("gamma{n}"), s.gamma),
                    mu: rec.get_or(&format!("mu{n}"), s.mu),
                    kappa: rec.get_or(&format!("kappa{n}"), s.kappa),
                    alpha: rec.get_or(&format!("alpha{n}"), s.alpha),
                    tau: rec.get_or(&format!("tau{n}"), s.tau),
                }
            };
            Model::Competition(CompetitionParams { species: [species(0), species(1)] })
        }
    };
    model.validate()?;
    Ok(model)
}

pub fn build_tradeoff(record: &ParamRecord) -> CliResult<TradeoffParams> {
    record.check_keys(&TRADEOFF_KEYS, "the trade-off")?;
    let d = TRADEOFF_PRESET;
    Ok(TradeoffParams::new(record.get_or("gamma0", d.gamma0), record.get_or("c", d.c), record.get_or("mu", d.mu))?)
}

/// `(key, value)` pairs of a model in file-key order.
pub fn model_params(model: &Model) -> Vec<(&'static str, f64)> {
    match model {
        Model::Hutchinson(p) => vec![("r", p.r), ("K", p.k_cap), ("tau", p.tau)],
        Model::Adde(p) | Model::Madde(p) => single_params(p),
        Model::Competition(p) => {
            let [s1, s2] = p.species;
            COMPETITION_KEYS
                .into_iter()
                .zip([s1.gamma, s1.mu, s1.kappa, s1.alpha, s1.tau, s2.gamma, s2.mu, s2.kappa, s2.alpha, s2.tau])
                .collect()
        }
    }
}

pub fn single_params(p: &SingleParams) -> Vec<(&'static str, f64)> {
    SINGLE_KEYS.into_iter().zip([p.gamma, p.mu, p.kappa, p.tau]).collect()
}

pub fn tradeoff_params(p: &TradeoffParams) -> Vec<(&'static str, f64)> {
    TRADEOFF_KEYS.into_iter().zip([p.gamma0, p.c, p.mu]).collect()
}
