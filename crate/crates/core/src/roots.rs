//! Scalar root finding and maximization on brackets.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 2000;

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
///
/// Halving continues until the bracket is no wider than `xtol` or no representable
/// midpoint remains, so `xtol = 0.0` resolves the root to machine precision. The
/// endpoint with the smaller residual is returned.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo: a, hi: b });
    }
    for _ in 0..MAX_BISECTIONS {
        if b - a <= xtol {
            break;
        }
        let m = a + 0.5 * (b - a);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Locates the point where a boolean predicate flips between `lo` and `hi`.
///
/// Returns `None` when the predicate agrees at both ends.
pub fn bisect_transition<P>(mut pred: P, lo: f64, hi: f64, xtol: f64) -> Option<f64>
where
    P: FnMut(f64) -> bool,
{
    let (mut a, mut b) = (lo, hi);
    let pa = pred(a);
    if pa == pred(b) {
        return None;
    }
    while b - a > xtol {
        let m = a + 0.5 * (b - a);
        if m <= a || m >= b {
            break;
        }
        if pred(m) == pa {
            a = m;
        } else {
            b = m;
        }
    }
    Some(a + 0.5 * (b - a))
}

/// Golden-section search for a maximum of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmax, max)`; the bracket ends are included as candidates.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2_to_precision() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 0.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn bisect_rejects_missing_sign_change() {
        assert_eq!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NoBracket { lo: -1.0, hi: 1.0 }));
    }

    #[test]
    fn bisect_accepts_root_at_endpoint() {
        assert_eq!(bisect(|x| x - 1.0, 1.0, 3.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn transition_of_step_predicate() {
        let t = bisect_transition(|x| x < 0.3, 0.0, 1.0, 1e-12).unwrap();
        assert!((t - 0.3).abs() < 1e-11);
        assert!(bisect_transition(|x| x < 2.0, 0.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section_max(|x| -(x - 0.7) * (x - 0.7) + 2.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_prefers_boundary_maximum() {
        let (x, _) = golden_section_max(|x| -x, 0.0, 1.0, 1e-10);
        assert!(x < 1e-9);
    }
}
