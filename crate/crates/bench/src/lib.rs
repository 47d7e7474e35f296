//! Workloads shared by the benchmarks.

use madde_core::{CompetitionParams, HutchinsonParams, SingleParams, Species, TradeoffParams};

pub const SINGLE: SingleParams = SingleParams { gamma: 1.5, mu: 0.5, kappa: 1.0, tau: 1.0 };
pub const HUTCHINSON: HutchinsonParams = HutchinsonParams { r: 1.0, k_cap: 1.0, tau: 2.0 };
pub const TRADEOFF: TradeoffParams = TradeoffParams { gamma0: 3.0, c: 8.0, mu: 2.0 };

pub fn competition(tau1: f64, tau2: f64) -> CompetitionParams {
    CompetitionParams {
        species: [
            Species { gamma: 1.5, mu: 0.5, kappa: 0.8, alpha: 1.0, tau: tau1 },
            Species { gamma: 2.0, mu: 0.5, kappa: 1.0, alpha: 1.5, tau: tau2 },
        ],
    }
}
