//! Post-processing of simulated trajectories: the Lyapunov-type quantity of the
//! mixed model, convergence to a target state and oscillation detection.

use serde::Serialize;

use crate::dense::DenseSolution;
use crate::error::{Error, Result};
use crate::models::SingleParams;

/// Minimum amplitude counted as a sustained oscillation, whatever the tolerance.
pub const OSCILLATION_FLOOR: f64 = 1e-2;

/// `(t, Y(t))` samples of `Y = gamma exp(-mu tau - kappa z) - mu - kappa x` every `dt`, ending at `t_end`.
///
/// `sol` must come from the mixed model so that its first auxiliary state is the window integral.
pub fn lyapunov_series(sol: &DenseSolution, p: &SingleParams, dt: f64) -> Result<Vec<(f64, f64)>> {
    if sol.n_aux() == 0 || sol.dim() != 1 {
        return Err(Error::Config("solution carries no window integral".into()));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::Config(format!("sample spacing {dt} must be > 0")));
    }
    let t_end = sol.t_end();
    let n = (t_end / dt - 1e-9).ceil() as usize;
    (0..=n)
        .map(|k| {
            let t = (k as f64 * dt).min(t_end);
            let x = sol.eval(t)?[0];
            let z = sol.eval_aux(t)?[0];
            Ok((t, p.gamma * (-p.mu * p.tau - p.kappa * z).exp() - p.mu - p.kappa * x))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovCheck {
    /// No sample has the opposite sign to the first nonzero one.
    pub sign_constant: bool,
    /// Largest increase of `|Y|` between consecutive samples (0 when non-increasing).
    pub max_increase: f64,
    pub terminal: f64,
}

impl LyapunovCheck {
    pub fn of(series: &[(f64, f64)]) -> Self {
        let sign = series.iter().map(|s| s.1).find(|&y| y != 0.0).map_or(0.0, f64::signum);
        let sign_constant = series.iter().all(|s| s.1 * sign >= 0.0);
        let max_increase = series.windows(2).map(|w| w[1].1.abs() - w[0].1.abs()).fold(0.0, f64::max);
        LyapunovCheck { sign_constant, max_increase, terminal: series.last().map_or(0.0, |s| s.1) }
    }

    pub fn non_increasing(&self, slack: f64) -> bool {
        self.sign_constant && self.max_increase <= slack
    }
}

/// `max - min` of each population component over knots in `[t0, t1]`.
pub fn oscillation_amplitude(sol: &DenseSolution, window: (f64, f64)) -> Vec<f64> {
    (0..sol.dim())
        .map(|c| {
            let (lo, hi) = window_values(sol, window, c)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi >= lo {
                hi - lo
            } else {
                0.0
            }
        })
        .collect()
}

fn window_values(sol: &DenseSolution, window: (f64, f64), comp: usize) -> impl Iterator<Item = f64> + '_ {
    sol.knot_times()
        .iter()
        .enumerate()
        .filter(move |(_, &t)| t >= window.0 && t <= window.1)
        .map(move |(i, _)| sol.knot_values(i)[comp])
}

fn local_maxima(values: &[f64]) -> usize {
    values.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2]).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Oscillating,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Oscillating => "oscillating",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub target: Vec<f64>,
    pub terminal_state: Vec<f64>,
    /// Max-norm distance of the final state from `target`.
    pub terminal_distance: f64,
    /// Largest per-component amplitude over the final window.
    pub oscillation_amplitude: f64,
    pub window: (f64, f64),
    pub verdict: Verdict,
}

/// Compares the end of `sol` with `target` over the final `window_fraction` of the run.
///
/// Oscillating means an amplitude of at least `max(10 tol, 1e-2)`, at least three
/// local maxima, and less than 5% amplitude decay from the first half of the
/// window to the second.
pub fn convergence_report(
    sol: &DenseSolution,
    target: &[f64],
    window_fraction: f64,
    tol: f64,
) -> Result<ConvergenceReport> {
    if target.len() != sol.dim() {
        return Err(Error::Config(format!("target has {} components, solution {}", target.len(), sol.dim())));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Config(format!("window fraction {window_fraction} must lie in (0, 1]")));
    }
    let (t0, t1) = (sol.t_start(), sol.t_end());
    let window = (t1 - window_fraction * (t1 - t0), t1);
    let terminal_state = sol.eval(t1)?;
    let terminal_distance = terminal_state.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let amplitudes = oscillation_amplitude(sol, window);
    let amplitude = amplitudes.iter().copied().fold(0.0, f64::max);

    let verdict = if terminal_distance <= tol && amplitude <= tol {
        Verdict::Converged
    } else if amplitude >= (10.0 * tol).max(OSCILLATION_FLOOR) {
        let comp = amplitudes.iter().enumerate().fold(0, |b, (i, &a)| if a > amplitudes[b] { i } else { b });
        let mid = 0.5 * (window.0 + window.1);
        let first = oscillation_amplitude(sol, (window.0, mid))[comp];
        let second = oscillation_amplitude(sol, (mid, window.1))[comp];
        let values: Vec<f64> = window_values(sol, window, comp).collect();
        if second >= 0.95 * first && local_maxima(&values) >= 3 {
            Verdict::Oscillating
        } else {
            Verdict::Undecided
        }
    } else {
        Verdict::Undecided
    };
    Ok(ConvergenceReport {
        target: target.to_vec(),
        terminal_state,
        terminal_distance,
        oscillation_amplitude: amplitude,
        window,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::InitialHistory;
    use crate::equilibria::madde_equilibrium;
    use crate::integrator::{integrate, IntegratorConfig};
    use crate::models::{HutchinsonParams, Model};

    const FIG6: SingleParams = SingleParams { gamma: 1.5, mu: 0.5, kappa: 1.0, tau: 1.0 };

    fn run(model: &Model, x0: &[f64], t_end: f64) -> DenseSolution {
        let hist = InitialHistory::constant(x0).unwrap();
        integrate(model, &hist, &IntegratorConfig::with_default_step(&model.delays(), t_end)).unwrap()
    }

    #[test]
    fn lyapunov_vanishes_at_equilibrium() {
        let x = madde_equilibrium(&FIG6).value;
        let sol = run(&Model::Madde(FIG6), &[x], 20.0);
        let series = lyapunov_series(&sol, &FIG6, 0.5).unwrap();
        assert!(series.iter().all(|s| s.1.abs() <= 1e-10));
    }

    #[test]
    fn lyapunov_decays_monotonically() {
        let sol = run(&Model::Madde(FIG6), &[0.1], 200.0);
        let series = lyapunov_series(&sol, &FIG6, 0.1).unwrap();
        let check = LyapunovCheck::of(&series);
        assert!(check.non_increasing(1e-9), "{check:?}");
        assert!(check.terminal.abs() <= 1e-8);
        assert!(series.windows(2).take(200).all(|w| w[1].1.abs() < w[0].1.abs()));
        assert_eq!(series.last().unwrap().0, 200.0);
    }

    #[test]
    fn lyapunov_requires_window_state() {
        let model = Model::Hutchinson(HutchinsonParams::new(1.0, 1.0, 1.0).unwrap());
        let sol = run(&model, &[0.5], 5.0);
        assert!(lyapunov_series(&sol, &FIG6, 0.1).is_err());
    }

    #[test]
    fn extinction_converges_to_zero() {
        let p = FIG6.with_tau(3.0);
        let sol = run(&Model::Madde(p), &[0.3], 500.0);
        let r = convergence_report(&sol, &[0.0], 0.2, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
    }

    #[test]
    fn hutchinson_oscillates_past_hopf() {
        let model = Model::Hutchinson(HutchinsonParams::new(1.0, 1.0, 2.0).unwrap());
        let sol = run(&model, &[0.5], 300.0);
        let r = convergence_report(&sol, &[1.0], 0.2, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Oscillating);
        assert!(r.oscillation_amplitude > 0.1);
    }

    #[test]
    fn hutchinson_settles_below_hopf() {
        let model = Model::Hutchinson(HutchinsonParams::new(1.0, 1.0, 1.0).unwrap());
        let sol = run(&model, &[0.5], 300.0);
        let r = convergence_report(&sol, &[1.0], 0.2, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(oscillation_amplitude(&sol, (250.0, 300.0))[0] < 1e-6);
    }

    #[test]
    fn constant_solution_has_no_amplitude() {
        let x = madde_equilibrium(&FIG6).value;
        let sol = run(&Model::Madde(FIG6), &[x], 10.0);
        assert!(oscillation_amplitude(&sol, (0.0, 10.0))[0] < 1e-14);
    }

    #[test]
    fn bad_inputs() {
        let sol = run(&Model::Madde(FIG6), &[0.1], 1.0);
        assert!(convergence_report(&sol, &[0.0, 0.0], 0.2, 1e-4).is_err());
        assert!(convergence_report(&sol, &[0.0], 0.0, 1e-4).is_err());
    }
}
