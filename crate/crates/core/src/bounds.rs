//! The four estimating functions for the maximal angle and their domains.
//!
//! | kind  | function                                | domain            |
//! |-------|-----------------------------------------|-------------------|
//! | `Kmm` | `arcsin((π/2)·x/(1−x))`                 | `[0, 2/(2+π))`    |
//! | `Ms`  | `(π/4)·log(1/(1−2x))`                   | `[0, sinh(1)/e)`  |
//! | `Am`  | `M*`, three branches                    | `[0, c*]`         |
//! | `New` | `N`, four branches, the inverse of `T`  | `[0, c_crit]`     |

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{am_second_break, c_crit, c_kmm, c_ms, c_star, kappa_upper, n_second_break};
use crate::error::{Error, Result};
use crate::scalar::{DOMAIN_SLACK, UNIT_PREIMAGE};

/// Identifies one of the estimating functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundKind {
    Kmm,
    Ms,
    Am,
    New,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [BoundKind::Kmm, BoundKind::Ms, BoundKind::Am, BoundKind::New];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Kmm => "KMM",
            BoundKind::Ms => "MS",
            BoundKind::Am => "AM",
            BoundKind::New => "NEW",
        }
    }

    pub fn domain(self) -> BoundDomain {
        let (limit, closed) = match self {
            BoundKind::Kmm => (c_kmm(), false),
            BoundKind::Ms => (c_ms(), false),
            BoundKind::Am => (c_star(), true),
            BoundKind::New => (c_crit(), true),
        };
        BoundDomain {
            kind: self,
            limit,
            closed,
        }
    }

    /// Evaluates this bound at `x`; `kappa` is only used by [`BoundKind::New`].
    pub fn eval(self, x: f64, kappa: f64) -> Result<f64> {
        match self {
            BoundKind::Kmm => eval_kmm(x),
            BoundKind::Ms => eval_ms(x),
            BoundKind::Am => eval_am(x),
            BoundKind::New => eval_new(x, kappa),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Domain `[0, limit)` or `[0, limit]` of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundDomain {
    pub kind: BoundKind,
    pub limit: f64,
    pub closed: bool,
}

impl BoundDomain {
    pub fn contains(&self, x: f64) -> bool {
        if self.closed {
            (0.0..=self.limit + DOMAIN_SLACK).contains(&x)
        } else {
            (0.0..self.limit).contains(&x)
        }
    }

    fn check(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            let domain = if self.closed {
                format!("[0, {}]", self.limit)
            } else {
                format!("[0, {})", self.limit)
            };
            return Err(Error::domain("x", x, domain));
        }
        Ok(x.min(self.limit))
    }
}

/// `arcsin((π/2)·x/(1−x))` on `[0, 2/(2+π))`.
pub fn eval_kmm(x: f64) -> Result<f64> {
    let x = BoundKind::Kmm.domain().check(x)?;
    Ok((FRAC_PI_2 * x / (1.0 - x)).min(1.0).asin())
}

/// `(π/4)·log(1/(1−2x))` on `[0, sinh(1)/e)`.
pub fn eval_ms(x: f64) -> Result<f64> {
    let x = BoundKind::Ms.domain().check(x)?;
    Ok(-FRAC_PI_4 * (-2.0 * x).ln_1p())
}

/// The three-branch function `M*` on `[0, c*]`.
pub fn eval_am(x: f64) -> Result<f64> {
    let x = BoundKind::Am.domain().check(x)?;
    let p2 = PI * PI;
    let first = 4.0 * PI / (p2 + 4.0);
    let value = if x <= UNIT_PREIMAGE {
        0.5 * (PI * x).asin()
    } else if x <= am_second_break() {
        let arg = PI * ((p2 + 4.0) * x - 4.0) / (p2 - 4.0);
        0.5 * first.asin() + 0.5 * arg.min(1.0).asin()
    } else {
        let arg = PI * ((p2 + 4.0).powi(2) * x - 8.0 * p2) / (p2 - 4.0).powi(2);
        first.asin() + 0.5 * arg.min(1.0).asin()
    };
    Ok(value)
}

/// The four-branch optimal function `N` on `[0, c_crit]`.
///
/// `kappa` must be the solved switch point (see
/// [`solve_kappa`](crate::constants::solve_kappa)); any value strictly
/// between `4(π²−2)/π⁴` and `2(π−1)/π²` still gives a valid, if weaker, bound.
pub fn eval_new(x: f64, kappa: f64) -> Result<f64> {
    let x = BoundKind::New.domain().check(x)?;
    if !(kappa > n_second_break() && kappa < kappa_upper()) {
        return Err(Error::domain("kappa", kappa, "(4(π²−2)/π⁴, 2(π−1)/π²)"));
    }
    let p2 = PI * PI;
    let value = if x <= UNIT_PREIMAGE {
        0.5 * (PI * x).asin()
    } else if x < n_second_break() {
        ((2.0 * p2 * x - 4.0) / (p2 - 4.0)).sqrt().min(1.0).asin()
    } else if x <= kappa {
        (FRAC_PI_2 * (1.0 - (1.0 - 2.0 * x).sqrt())).min(1.0).asin()
    } else {
        1.5 * (FRAC_PI_2 * (1.0 - (1.0 - 2.0 * x).cbrt())).min(1.0).asin()
    };
    Ok(value)
}

/// All bounds evaluated at one ratio; `None` where `x` is outside a bound's domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    pub kmm: Option<f64>,
    pub ms: Option<f64>,
    pub am: Option<f64>,
    pub new: Option<f64>,
    /// The bound with the smallest value at `x`; ties go to `New`, then `Am`.
    pub minimum: Option<BoundKind>,
}

impl CurveSample {
    pub fn get(&self, kind: BoundKind) -> Option<f64> {
        match kind {
            BoundKind::Kmm => self.kmm,
            BoundKind::Ms => self.ms,
            BoundKind::Am => self.am,
            BoundKind::New => self.new,
        }
    }
}

/// Evaluates every bound whose domain contains `x ∈ [0, ½]`.
pub fn compare_bounds(x: f64, kappa: f64) -> Result<CurveSample> {
    if !(0.0..=0.5).contains(&x) {
        return Err(Error::domain("x", x, "[0, 1/2]"));
    }
    let eval = |kind: BoundKind| -> Result<Option<f64>> {
        if kind.domain().contains(x) {
            kind.eval(x, kappa).map(Some)
        } else {
            Ok(None)
        }
    };
    let mut sample = CurveSample {
        x,
        kmm: eval(BoundKind::Kmm)?,
        ms: eval(BoundKind::Ms)?,
        am: eval(BoundKind::Am)?,
        new: eval(BoundKind::New)?,
        minimum: None,
    };
    let mut best: Option<(BoundKind, f64)> = None;
    for kind in [BoundKind::New, BoundKind::Am, BoundKind::Ms, BoundKind::Kmm] {
        if let Some(v) = sample.get(kind) {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((kind, v));
            }
        }
    }
    sample.minimum = best.map(|(k, _)| k);
    Ok(sample)
}
