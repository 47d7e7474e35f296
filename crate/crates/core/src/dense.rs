//! Continuous trajectories: prescribed initial history plus cubic Hermite segments.
//!
//! A [`DenseSolution`] owns the initial history, so a delayed lookup at any
//! `t - tau` resolves against one object whether it lands in the past data or in
//! an already-integrated step.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack accepted at the ends of the evaluable domain.
const DOMAIN_SLACK: f64 = 1e-12;

/// Initial data on `[-span, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitialHistory {
    /// The same state at every past time.
    Constant(Vec<f64>),
    /// Samples joined by straight lines. Times strictly increase and end at 0.
    Sampled { times: Vec<f64>, states: Vec<Vec<f64>> },
}

impl InitialHistory {
    pub fn constant(state: &[f64]) -> Result<Self> {
        if state.is_empty() {
            return Err(Error::InvalidHistory("empty state".into()));
        }
        check_state(state)?;
        Ok(InitialHistory::Constant(state.to_vec()))
    }

    pub fn sampled(samples: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidHistory("need at least two samples".into()));
        }
        let dim = samples[0].1.len();
        if dim == 0 {
            return Err(Error::InvalidHistory("empty state".into()));
        }
        let mut times = Vec::with_capacity(samples.len());
        let mut states = Vec::with_capacity(samples.len());
        for (t, s) in samples {
            if !t.is_finite() {
                return Err(Error::InvalidHistory(format!("non-finite sample time {t}")));
            }
            if let Some(&prev) = times.last() {
                if t <= prev {
                    return Err(Error::InvalidHistory(format!(
                        "sample times must strictly increase ({prev} then {t})"
                    )));
                }
            }
            if s.len() != dim {
                return Err(Error::InvalidHistory("inconsistent state dimension".into()));
            }
            check_state(&s)?;
            times.push(t);
            states.push(s);
        }
        if times[times.len() - 1] != 0.0 {
            return Err(Error::InvalidHistory("last sample must be at t = 0".into()));
        }
        Ok(InitialHistory::Sampled { times, states })
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialHistory::Constant(v) => v.len(),
            InitialHistory::Sampled { states, .. } => states[0].len(),
        }
    }

    /// Length of the covered past; `None` when the history is constant and unbounded.
    pub fn span(&self) -> Option<f64> {
        match self {
            InitialHistory::Constant(_) => None,
            InitialHistory::Sampled { times, .. } => Some(-times[0]),
        }
    }

    /// True when the history covers `[-span, 0]`.
    pub fn covers(&self, span: f64) -> bool {
        self.span().is_none_or(|s| s >= span)
    }

    /// Value at `t <= 0`; piecewise-linear between samples.
    pub fn value(&self, t: f64, component: usize) -> f64 {
        match self {
            InitialHistory::Constant(v) => v[component],
            InitialHistory::Sampled { times, states } => {
                let (i, w) = locate_linear(times, t);
                if w == 0.0 {
                    states[i][component]
                } else {
                    states[i][component] + w * (states[i + 1][component] - states[i][component])
                }
            }
        }
    }

    fn value_into(&self, t: f64, out: &mut [f64]) {
        match self {
            InitialHistory::Constant(v) => out.copy_from_slice(v),
            InitialHistory::Sampled { times, states } => {
                let (i, w) = locate_linear(times, t);
                for (c, o) in out.iter_mut().enumerate() {
                    *o = if w == 0.0 { states[i][c] } else { states[i][c] + w * (states[i + 1][c] - states[i][c]) };
                }
            }
        }
    }

    /// Exact integral of the piecewise-linear interpolant over `[a, b]`, `a <= b <= 0`.
    pub fn integral(&self, a: f64, b: f64, component: usize) -> f64 {
        match self {
            InitialHistory::Constant(v) => v[component] * (b - a),
            InitialHistory::Sampled { times, .. } => {
                let mut total = 0.0;
                let start = times.partition_point(|&s| s <= a).saturating_sub(1);
                for i in start..times.len() - 1 {
                    let lo = times[i].max(a);
                    let hi = times[i + 1].min(b);
                    if hi <= lo {
                        if times[i] >= b {
                            break;
                        }
                        continue;
                    }
                    total += 0.5 * (hi - lo) * (self.value(lo, component) + self.value(hi, component));
                }
                total
            }
        }
    }
}

fn check_state(state: &[f64]) -> Result<()> {
    for &v in state {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidHistory(format!("state {v} must be finite and >= 0")));
        }
    }
    Ok(())
}

/// Index of the sample interval holding `t` and the linear weight inside it.
fn locate_linear(times: &[f64], t: f64) -> (usize, f64) {
    let last = times.len() - 1;
    if t <= times[0] {
        return (0, 0.0);
    }
    if t >= times[last] {
        return (last, 0.0);
    }
    let i = times.partition_point(|&s| s <= t) - 1;
    (i, (t - times[i]) / (times[i + 1] - times[i]))
}

/// A trajectory on `[t_start - history_span, t_end]`.
///
/// Knots carry the full integrator state: `dim` population components followed by
/// `n_aux` auxiliary components (running window integrals). Between knots every
/// component is the cubic Hermite interpolant of the stored values and slopes, so
/// values at shared knots agree bit for bit. The history only knows the population
/// components.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    history: InitialHistory,
    history_span: f64,
    t_start: f64,
    dim: usize,
    width: usize,
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl DenseSolution {
    pub fn new(history: InitialHistory, history_span: f64, t_start: f64, n_aux: usize) -> Result<Self> {
        if !(history_span >= 0.0 && history_span.is_finite()) {
            return Err(Error::Config(format!("history span {history_span} must be finite and >= 0")));
        }
        if !history.covers(history_span) {
            return Err(Error::Config(format!("history covers {:?} but {history_span} is required", history.span())));
        }
        let dim = history.dim();
        Ok(DenseSolution {
            history,
            history_span,
            t_start,
            dim,
            width: dim + n_aux,
            times: Vec::new(),
            values: Vec::new(),
            slopes: Vec::new(),
        })
    }

    /// Appends a knot. The first knot must sit at `t_start`; later knots must advance in time.
    pub fn push_knot(&mut self, t: f64, values: &[f64], slopes: &[f64]) -> Result<()> {
        if values.len() != self.width || slopes.len() != self.width {
            return Err(Error::Config(format!(
                "knot width {} / {} does not match state width {}",
                values.len(),
                slopes.len(),
                self.width
            )));
        }
        match self.times.last() {
            None if t != self.t_start => {
                return Err(Error::Config(format!("first knot at {t}, expected {}", self.t_start)))
            }
            Some(&last) if t <= last => return Err(Error::Config(format!("degenerate segment [{last}, {t}]"))),
            _ => {}
        }
        self.times.push(t);
        self.values.extend_from_slice(values);
        self.slopes.extend_from_slice(slopes);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_aux(&self) -> usize {
        self.width - self.dim
    }

    pub fn history(&self) -> &InitialHistory {
        &self.history
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    /// Time of the last knot (or `t_start` before any knot exists).
    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(self.t_start)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t_start - self.history_span, self.t_end())
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.times
    }

    /// Full stored state (population then auxiliary) at knot `i`.
    pub fn knot_values(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn knot_slopes(&self, i: usize) -> &[f64] {
        &self.slopes[i * self.width..(i + 1) * self.width]
    }

    /// Population state at `t`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// Population state at `t`, written into `out` (length `dim`).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let t = self.check_domain(t)?;
        if t < self.t_start || self.times.is_empty() {
            self.history.value_into(t - self.t_start, out);
            return Ok(());
        }
        self.hermite_into(t, 0, out);
        Ok(())
    }

    /// Auxiliary components at `t >= t_start`.
    pub fn eval_aux(&self, t: f64) -> Result<Vec<f64>> {
        let t = self.check_domain(t)?;
        if t < self.t_start || self.times.is_empty() {
            return Err(Error::OutOfDomain { t, lo: self.t_start, hi: self.t_end() });
        }
        let mut out = vec![0.0; self.width - self.dim];
        self.hermite_into(t, self.dim, &mut out);
        Ok(out)
    }

    /// Exact integral of population component `component` over `[a, b]`.
    pub fn integral_over(&self, a: f64, b: f64, component: usize) -> Result<f64> {
        if a > b {
            return self.integral_over(b, a, component).map(|v| -v);
        }
        let a = self.check_domain(a)?;
        let b = self.check_domain(b)?;
        let mut total = 0.0;
        if a < self.t_start {
            let hi = b.min(self.t_start);
            total += self.history.integral(a - self.t_start, hi - self.t_start, component);
        }
        if b > self.t_start && self.times.len() >= 2 {
            total += self.segments_integral(a.max(self.t_start), b, component);
        }
        Ok(total)
    }

    /// Integral of `weights . x` over `[a, b]`.
    pub fn weighted_integral(&self, a: f64, b: f64, weights: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (c, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                total += w * self.integral_over(a, b, c)?;
            }
        }
        Ok(total)
    }

    fn check_domain(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let slack = DOMAIN_SLACK * lo.abs().max(hi.abs()).max(1.0);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::OutOfDomain { t, lo, hi });
        }
        Ok(t.clamp(lo, hi))
    }

    fn segment_index(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s <= t);
        i.saturating_sub(1).min(self.times.len().saturating_sub(2))
    }

    fn hermite_into(&self, t: f64, offset: usize, out: &mut [f64]) {
        let n = out.len();
        if self.times.len() == 1 {
            out.copy_from_slice(&self.values[offset..offset + n]);
            return;
        }
        let i = self.segment_index(t);
        let (a, b) = (self.times[i], self.times[i + 1]);
        let base0 = i * self.width + offset;
        let base1 = base0 + self.width;
        if t == a {
            out.copy_from_slice(&self.values[base0..base0 + n]);
            return;
        }
        if t == b {
            out.copy_from_slice(&self.values[base1..base1 + n]);
            return;
        }
        let h = b - a;
        let s = (t - a) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        for (c, o) in out.iter_mut().enumerate() {
            *o = h00 * self.values[base0 + c]
                + h10 * h * self.slopes[base0 + c]
                + h01 * self.values[base1 + c]
                + h11 * h * self.slopes[base1 + c];
        }
    }

    fn segments_integral(&self, a: f64, b: f64, component: usize) -> f64 {
        let mut total = 0.0;
        let mut i = self.segment_index(a);
        while i + 1 < self.times.len() {
            let (ta, tb) = (self.times[i], self.times[i + 1]);
            if ta >= b {
                break;
            }
            let lo = ta.max(a);
            let hi = tb.min(b);
            if hi > lo {
                let h = tb - ta;
                let s0 = (lo - ta) / h;
                let s1 = (hi - ta) / h;
                let k0 = i * self.width + component;
                let k1 = k0 + self.width;
                let (y0, y1) = (self.values[k0], self.values[k1]);
                let (f0, f1) = (self.slopes[k0], self.slopes[k1]);
                let d = |g: fn(f64) -> f64| g(s1) - g(s0);
                total += h
                    * (y0 * d(antideriv_h00)
                        + h * f0 * d(antideriv_h10)
                        + y1 * d(antideriv_h01)
                        + h * f1 * d(antideriv_h11));
            }
            i += 1;
        }
        total
    }
}

fn antideriv_h00(s: f64) -> f64 {
    s * (1.0 + s * s * (-1.0 + 0.5 * s))
}

fn antideriv_h10(s: f64) -> f64 {
    s * s * (0.5 + s * (-2.0 / 3.0 + 0.25 * s))
}

fn antideriv_h01(s: f64) -> f64 {
    s * s * s * (1.0 - 0.5 * s)
}

fn antideriv_h11(s: f64) -> f64 {
    s * s * s * (-1.0 / 3.0 + 0.25 * s)
}
