//! Delay logistic population models with a distributed crowding delay.
//!
//! The crate integrates the single-species and two-species competition models,
//! computes their equilibria and survival thresholds, classifies local stability
//! through characteristic functions, maps the delay plane of the competition
//! model, and locates the evolutionarily stable delay under a growth trade-off.
//!
//! ```
//! use madde_core::{equilibria, integrate, InitialHistory, IntegratorConfig, Model, SingleParams};
//!
//! let model = Model::Madde(SingleParams::new(1.5, 0.5, 1.0, 1.0).unwrap());
//! let sol = integrate(&model, &InitialHistory::constant(&[0.1]).unwrap(), &IntegratorConfig::new(0.01, 200.0)).unwrap();
//! let target = equilibria(&model).unwrap().equilibria[1].state[0];
//! assert!((sol.eval(200.0).unwrap()[0] - target).abs() < 1e-8);
//! ```

pub mod adaptive;
pub mod bifurcation;
pub mod dense;
pub mod diagnostics;
pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod models;
pub mod roots;
pub mod stability;

pub use adaptive::{ess_tau, invasion_exponent, EssKind, EssResult, TradeoffParams};
pub use bifurcation::{
    branch_single, classify_region, scan_grid, Branch, BranchDiagram, Region, RegionLabel, RegionMap,
};
pub use dense::{DenseSolution, InitialHistory};
pub use diagnostics::{convergence_report, lyapunov_series, ConvergenceReport, Verdict};
pub use equilibria::{equilibria, Equilibrium, EquilibriumLabel, EquilibriumSet};
pub use error::{Error, Result};
pub use integrator::{integrate, DelaySystem, IntegratorConfig};
pub use models::{CompetitionParams, HutchinsonParams, Model, ModelId, SingleParams, Species};
pub use stability::{classify, count_unstable_roots, Classification, SearchRect, StabilityVerdict};

/// Version string written into output provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
