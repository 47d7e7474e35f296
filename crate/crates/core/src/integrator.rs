//! Fixed-step RK4 method of steps for systems with discrete delays and running
//! window integrals.
//!
//! A window integral `z(t) = ∫_{t-w}^{t} wᵀx(s) ds` is carried as an extra state
//! with `z' = wᵀx(t) - wᵀx(t-w)`, initialized by quadrature over the history.
//! The step is shortened so the smallest positive delay is an integer number of
//! steps and never exceeds a quarter of it, which keeps every delayed lookup
//! (including RK stage lookups) inside completed segments or the history.

use crate::dense::{DenseSolution, InitialHistory};
use crate::error::{Error, Result};

/// Any `|state|` above this aborts the run.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

/// Step used when no delay is positive.
pub const DEFAULT_ODE_STEP: f64 = 0.01;

/// Default steps per smallest positive delay.
pub const DEFAULT_STEPS_PER_DELAY: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralState {
    pub window: f64,
    /// One weight per population component.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelaySpec {
    pub discrete_delays: Vec<f64>,
    pub integral_states: Vec<IntegralState>,
}

impl DelaySpec {
    pub fn max_delay(&self) -> f64 {
        self.discrete_delays.iter().copied().chain(self.integral_states.iter().map(|s| s.window)).fold(0.0, f64::max)
    }

    pub fn min_positive_delay(&self) -> Option<f64> {
        self.discrete_delays
            .iter()
            .copied()
            .chain(self.integral_states.iter().map(|s| s.window))
            .filter(|&d| d > 0.0)
            .reduce(f64::min)
    }
}

/// A delay differential system in the form the integrator understands.
pub trait DelaySystem {
    /// Number of population components.
    fn dim(&self) -> usize;

    fn delay_spec(&self) -> DelaySpec;

    /// Writes `x'` into `out`. `delayed` holds the state at `t - d` for each
    /// discrete delay `d`, concatenated; `z` holds the window integrals.
    fn rhs(&self, x: &[f64], delayed: &[f64], z: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub t_end: f64,
    pub integral_quadrature_panels: usize,
}

impl IntegratorConfig {
    pub fn new(step: f64, t_end: f64) -> Self {
        IntegratorConfig { step, t_end, integral_quadrature_panels: 1000 }
    }

    /// One hundredth of the smallest positive delay, or [`DEFAULT_ODE_STEP`] without delay.
    pub fn with_default_step(delays: &[f64], t_end: f64) -> Self {
        let step = match delays.iter().copied().filter(|&d| d > 0.0).reduce(f64::min) {
            Some(d) => d / DEFAULT_STEPS_PER_DELAY,
            None => DEFAULT_ODE_STEP,
        };
        IntegratorConfig::new(step, t_end)
    }

    /// The step actually used: `tau_min / round(tau_min / step)` when a positive
    /// delay exists, otherwise `step`.
    pub fn aligned_step(&self, spec: &DelaySpec) -> Result<f64> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("step {} must be finite and > 0", self.step)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end {} must be finite and > 0", self.t_end)));
        }
        match spec.min_positive_delay() {
            None => Ok(self.step),
            Some(tau) => {
                if self.step > tau / 4.0 * (1.0 + 1e-12) {
                    return Err(Error::Config(format!(
                        "step {} exceeds a quarter of the smallest delay {tau}",
                        self.step
                    )));
                }
                Ok(tau / (tau / self.step).round())
            }
        }
    }
}

/// `∫_{-window}^{0} wᵀφ(s) ds` by composite Simpson with `panels` panels (rounded up to even).
pub fn init_integral_state(history: &InitialHistory, window: f64, weights: &[f64], panels: usize) -> Result<f64> {
    if !(window >= 0.0 && window.is_finite()) {
        return Err(Error::Config(format!("window {window} must be finite and >= 0")));
    }
    if !history.covers(window) {
        return Err(Error::Config(format!("window {window} exceeds the history domain {:?}", history.span())));
    }
    if weights.len() != history.dim() {
        return Err(Error::Config("weight count does not match history dimension".into()));
    }
    if window == 0.0 {
        return Ok(0.0);
    }
    let panels = (panels.max(2) + 1) & !1;
    let h = window / panels as f64;
    let integrand = |s: f64| -> f64 { weights.iter().enumerate().map(|(c, &w)| w * history.value(s, c)).sum() };
    let mut acc = integrand(-window) + integrand(0.0);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(-window + k as f64 * h);
    }
    Ok(acc * h / 3.0)
}

struct Workspace<'a, S> {
    system: &'a S,
    dim: usize,
    discrete: Vec<f64>,
    windows: Vec<(f64, Vec<f64>)>,
    delayed: Vec<f64>,
    lagged: Vec<f64>,
}

impl<S: DelaySystem> Workspace<'_, S> {
    /// Full derivative (population then window integrals) at time `t`.
    fn derivative(&mut self, sol: &DenseSolution, t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim;
        let (x, z) = y.split_at(n);
        for (j, &d) in self.discrete.iter().enumerate() {
            let slot = &mut self.delayed[j * n..(j + 1) * n];
            if d == 0.0 {
                slot.copy_from_slice(x);
            } else {
                sol.eval_into(t - d, slot)?;
            }
        }
        self.system.rhs(x, &self.delayed, z, &mut out[..n]);
        for (i, (w, weights)) in self.windows.iter().enumerate() {
            out[n + i] = if *w == 0.0 {
                0.0
            } else {
                sol.eval_into(t - w, &mut self.lagged)?;
                weights.iter().zip(x.iter().zip(&self.lagged)).map(|(c, (now, then))| c * (now - then)).sum()
            };
        }
        Ok(())
    }
}

fn check_state(t: f64, y: &[f64]) -> Result<()> {
    if y.iter().all(|v| v.is_finite() && v.abs() <= BLOW_UP_THRESHOLD) {
        Ok(())
    } else {
        Err(Error::BlowUp { t })
    }
}

/// Integrates `system` from the initial history over `[0, config.t_end]`.
pub fn integrate<S: DelaySystem>(
    system: &S,
    history: &InitialHistory,
    config: &IntegratorConfig,
) -> Result<DenseSolution> {
    let spec = system.delay_spec();
    let n = system.dim();
    if history.dim() != n {
        return Err(Error::Config(format!("history has {} components, model needs {n}", history.dim())));
    }
    for &d in spec.discrete_delays.iter().chain(spec.integral_states.iter().map(|s| &s.window)) {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::Config(format!("delay {d} must be finite and >= 0")));
        }
    }
    let h = config.aligned_step(&spec)?;
    let span = spec.max_delay();
    let mut sol = DenseSolution::new(history.clone(), span, 0.0, spec.integral_states.len())?;

    let width = n + spec.integral_states.len();
    let mut y = vec![0.0; width];
    for (c, v) in y.iter_mut().take(n).enumerate() {
        *v = history.value(0.0, c);
    }
    for (i, st) in spec.integral_states.iter().enumerate() {
        y[n + i] = init_integral_state(history, st.window, &st.weights, config.integral_quadrature_panels)?;
    }

    let mut ws = Workspace {
        system,
        dim: n,
        delayed: vec![0.0; n * spec.discrete_delays.len()],
        lagged: vec![0.0; n],
        discrete: spec.discrete_delays,
        windows: spec.integral_states.into_iter().map(|s| (s.window, s.weights)).collect(),
    };

    let mut f = vec![0.0; width];
    ws.derivative(&sol, 0.0, &y, &mut f)?;
    sol.push_knot(0.0, &y, &f)?;

    let n_steps = ((config.t_end / h) - 1e-9).ceil().max(1.0) as usize;
    let (mut k2, mut k3, mut k4) = (vec![0.0; width], vec![0.0; width], vec![0.0; width]);
    let mut stage = vec![0.0; width];
    let mut t = 0.0;
    for k in 1..=n_steps {
        let t_next = if k == n_steps { config.t_end } else { k as f64 * h };
        let dt = t_next - t;

        for i in 0..width {
            stage[i] = y[i] + 0.5 * dt * f[i];
        }
        ws.derivative(&sol, t + 0.5 * dt, &stage, &mut k2)?;
        for i in 0..width {
            stage[i] = y[i] + 0.5 * dt * k2[i];
        }
        ws.derivative(&sol, t + 0.5 * dt, &stage, &mut k3)?;
        for i in 0..width {
            stage[i] = y[i] + dt * k3[i];
        }
        ws.derivative(&sol, t_next, &stage, &mut k4)?;
        for i in 0..width {
            y[i] += dt / 6.0 * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_state(t_next, &y)?;

        ws.derivative(&sol, t_next, &y, &mut f)?;
        sol.push_knot(t_next, &y, &f)?;
        t = t_next;
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Model, SingleParams};

    fn madde(tau: f64) -> Model {
        Model::Madde(SingleParams::new(1.5, 0.5, 1.0, tau).unwrap())
    }

    #[test]
    fn integral_state_initialization() {
        let flat = InitialHistory::constant(&[0.1]).unwrap();
        assert!((init_integral_state(&flat, 1.0, &[1.0], 1000).unwrap() - 0.1).abs() < 1e-15);

        let ramp = InitialHistory::sampled(vec![(-1.0, vec![0.0]), (0.0, vec![1.0])]).unwrap();
        assert!((init_integral_state(&ramp, 1.0, &[1.0], 1000).unwrap() - 0.5).abs() < 1e-14);

        let pair = InitialHistory::constant(&[0.8, 0.1]).unwrap();
        assert!((init_integral_state(&pair, 1.0, &[0.8, 1.5], 10).unwrap() - 0.79).abs() < 1e-15);

        let short = InitialHistory::sampled(vec![(-0.5, vec![0.0]), (0.0, vec![1.0])]).unwrap();
        assert!(matches!(init_integral_state(&short, 1.0, &[1.0], 10), Err(Error::Config(_))));
    }

    #[test]
    fn zero_history_stays_zero() {
        for model in [madde(1.0), Model::Adde(SingleParams::new(1.5, 0.5, 1.0, 1.0).unwrap())] {
            let hist = InitialHistory::constant(&[0.0]).unwrap();
            let sol = integrate(&model, &hist, &IntegratorConfig::new(0.05, 20.0)).unwrap();
            for i in 0..sol.knot_times().len() {
                assert_eq!(sol.knot_values(i)[0], 0.0);
            }
        }
    }

    #[test]
    fn step_alignment_and_rejection() {
        let spec = madde(1.0).delay_spec();
        assert_eq!(IntegratorConfig::new(0.3, 1.0).aligned_step(&spec).map_err(|e| e.is_config()), Err(true));
        let h = IntegratorConfig::new(0.0098, 1.0).aligned_step(&spec).unwrap();
        assert!((1.0 / h - 102.0).abs() < 1e-9);
        let d = IntegratorConfig::with_default_step(&[1.5, 1.0], 10.0);
        assert!((d.step - 0.01).abs() < 1e-15);
        let d = IntegratorConfig::with_default_step(&[0.0, 0.3], 10.0);
        assert!((d.step - 0.003).abs() < 1e-15);
        assert_eq!(IntegratorConfig::with_default_step(&[0.0], 10.0).step, DEFAULT_ODE_STEP);
    }

    #[test]
    fn ode_limit_matches_logistic_closed_form() {
        let hist = InitialHistory::constant(&[0.1]).unwrap();
        let sol = integrate(&madde(0.0), &hist, &IntegratorConfig::new(0.01, 40.0)).unwrap();
        let exact = |t: f64| 1.0 / (1.0 + 9.0 * (-t).exp());
        let got = sol.eval(40.0).unwrap()[0];
        assert!((got - exact(40.0)).abs() < 1e-6);
        let mid = sol.eval(2.345).unwrap()[0];
        assert!((mid - exact(2.345)).abs() < 1e-8);
    }

    #[test]
    fn blow_up_is_reported() {
        struct Explosive;
        impl DelaySystem for Explosive {
            fn dim(&self) -> usize {
                1
            }
            fn delay_spec(&self) -> DelaySpec {
                DelaySpec { discrete_delays: vec![], integral_states: vec![] }
            }
            fn rhs(&self, x: &[f64], _: &[f64], _: &[f64], out: &mut [f64]) {
                out[0] = x[0] * x[0];
            }
        }
        let hist = InitialHistory::constant(&[1.0]).unwrap();
        match integrate(&Explosive, &hist, &IntegratorConfig::new(0.01, 2.0)) {
            Err(Error::BlowUp { t }) => assert!(t > 0.9 && t <= 1.02, "{t}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn history_dimension_mismatch() {
        let hist = InitialHistory::constant(&[0.1, 0.2]).unwrap();
        assert!(matches!(integrate(&madde(1.0), &hist, &IntegratorConfig::new(0.01, 1.0)), Err(Error::Config(_))));
    }
}
