//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Iteration cap for [`find_root`].
pub const MAX_ITERATIONS: usize = 200;

/// Finds a root of `f` in `[lo, hi]` by bisection.
///
/// Requires `f(lo)·f(hi) ≤ 0`. Stops once the bracket is no wider than `tol`
/// or can no longer be split in floating point. Deterministic: the same
/// inputs always produce the same sequence of evaluations.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Invalid(format!("bad bracket [{lo}, {hi}]")));
    }
    let f_lo = eval(&mut f, lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = eval(&mut f, hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut a, mut b) = (lo, hi);
    let lo_negative = f_lo < 0.0;
    for _ in 0..MAX_ITERATIONS {
        let mid = a + 0.5 * (b - a);
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let f_mid = eval(&mut f, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(Error::IterationCap {
        cap: MAX_ITERATIONS,
        lo: a,
        hi: b,
    })
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}
