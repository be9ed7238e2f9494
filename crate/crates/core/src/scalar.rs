//! Scalar building blocks: the per-step angle cost, the critical-point
//! constraint map and its two-branch inverse.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack applied to closed interval endpoints to absorb round-off.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Largest admissible step parameter, `1/π`.
pub const MAX_STEP: f64 = 1.0 / PI;

/// `2/π²`, the unique critical point of [`constraint_map`].
pub const CRITICAL_STEP: f64 = 2.0 / (PI * PI);

/// `4/(π²+4)`, the nonzero step parameter mapped to 1 by [`constraint_map`].
pub const UNIT_PREIMAGE: f64 = 4.0 / (PI * PI + 4.0);

/// Maximum of [`constraint_map`], `(1 - 4/π²)^(-1/2)`.
pub fn constraint_max() -> f64 {
    1.0 / (1.0 - 4.0 / (PI * PI)).sqrt()
}

/// An angle in radians, within `[0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const RIGHT: Angle = Angle(std::f64::consts::FRAC_PI_2);

    pub fn new(radians: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2 + DOMAIN_SLACK).contains(&radians) {
            return Err(Error::domain("angle", radians, "[0, π/2]"));
        }
        Ok(Angle(radians.min(std::f64::consts::FRAC_PI_2)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A nonnegative dimensionless ratio: a perturbation-to-gap ratio `‖V‖/d`
/// or a step parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ratio(f64);

impl Ratio {
    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::domain("ratio", value, "[0, ∞)"));
        }
        Ok(Ratio(value))
    }

    /// A ratio used as a step parameter, restricted to `[0, 1/π]`.
    pub fn step(value: f64) -> Result<Self> {
        check_step(value, "step parameter").map(Ratio)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Checks `x ∈ [0, 1/π]` up to [`DOMAIN_SLACK`] and clamps into the interval.
pub(crate) fn check_step(x: f64, what: &'static str) -> Result<f64> {
    if !(-DOMAIN_SLACK..=MAX_STEP + DOMAIN_SLACK).contains(&x) {
        return Err(Error::domain(what, x, "[0, 1/π]"));
    }
    Ok(x.clamp(0.0, MAX_STEP))
}

/// Per-step angle cost `½·arcsin(πx)` for a step parameter `x ∈ [0, 1/π]`.
pub fn step_cost(x: f64) -> Result<f64> {
    let x = check_step(x, "x")?;
    Ok(0.5 * (PI * x).min(1.0).asin())
}

/// Inverse of [`step_cost`]: the step parameter `sin(2φ)/π` whose cost is `φ ∈ [0, π/4]`.
pub fn step_for_cost(phi: f64) -> Result<f64> {
    let quarter = std::f64::consts::FRAC_PI_4;
    if !(-DOMAIN_SLACK..=quarter + DOMAIN_SLACK).contains(&phi) {
        return Err(Error::domain("cost", phi, "[0, π/4]"));
    }
    Ok((2.0 * phi.clamp(0.0, quarter)).sin() / PI)
}

/// The map `x ↦ √(1−π²x²)/(1−2x)` on `[0, 1/π]`.
///
/// Equal values of this map at two step parameters characterise the
/// non-equal critical points of the constrained maximisation.
pub fn constraint_map(x: f64) -> Result<f64> {
    let x = check_step(x, "x")?;
    let px = PI * x;
    Ok(((1.0 - px) * (1.0 + px)).max(0.0).sqrt() / (1.0 - 2.0 * x))
}

/// The two preimages of a value under [`constraint_map`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preimages {
    /// Preimage in `(0, 2/π²)`.
    pub small: f64,
    /// Preimage in `(2/π², 4/(π²+4))`.
    pub large: f64,
    /// Set when `alpha` sits at the maximum and both preimages collapse to `2/π²`.
    pub double_root: bool,
}

/// Both preimages of `alpha ∈ (1, m)` under [`constraint_map`], where `m` is
/// [`constraint_max`].
///
/// They are the roots of `z² − 4α²/(π²+4α²)·z + (α²−1)/(π²+4α²)`. The
/// discriminant is evaluated in the factored form `(π²−4)(m−α)(m+α)` so that
/// the roots stay accurate close to the double root.
pub fn constraint_preimages(alpha: f64) -> Result<Preimages> {
    let m = constraint_max();
    if !(alpha > 1.0 && alpha < m + DOMAIN_SLACK) {
        return Err(Error::domain("alpha", alpha, "(1, m)"));
    }
    if (m - alpha).abs() <= DOMAIN_SLACK {
        return Ok(Preimages {
            small: CRITICAL_STEP,
            large: CRITICAL_STEP,
            double_root: true,
        });
    }
    let a2 = alpha * alpha;
    let denom = PI * PI + 4.0 * a2;
    let sum = 4.0 * a2 / denom;
    let product = (a2 - 1.0) / denom;
    let half_gap = ((PI * PI - 4.0) * (m - alpha) * (m + alpha)).sqrt() / denom;
    let large = 0.5 * sum + half_gap;
    Ok(Preimages {
        small: product / large,
        large,
        double_root: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn step_cost_endpoints() {
        assert_eq!(step_cost(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(step_cost(MAX_STEP).unwrap(), PI / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn step_cost_at_critical_step() {
        // ½·arcsin(2/π), cross-checked by bisecting sin(2φ) = 2/π.
        let (mut lo, mut hi) = (0.0_f64, PI / 4.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (2.0 * mid).sin() < 2.0 / PI {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let value = step_cost(CRITICAL_STEP).unwrap();
        assert_abs_diff_eq!(value, lo, epsilon = 1e-15);
        assert_abs_diff_eq!(value, 0.345_053_545_687_27, epsilon = 1e-13);
    }

    #[test]
    fn step_cost_rejects_out_of_domain() {
        assert!(step_cost(-1e-6).is_err());
        assert!(step_cost(MAX_STEP + 1e-6).is_err());
        assert!(step_cost(MAX_STEP + 1e-13).is_ok());
    }

    #[test]
    fn step_for_cost_inverts_step_cost() {
        for i in 0..=100 {
            let x = MAX_STEP * i as f64 / 100.0;
            let back = step_for_cost(step_cost(x).unwrap()).unwrap();
            assert_abs_diff_eq!(back, x, epsilon = 1e-8);
        }
    }

    #[test]
    fn constraint_map_landmarks() {
        assert_eq!(constraint_map(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(constraint_map(UNIT_PREIMAGE).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(constraint_map(MAX_STEP).unwrap(), 0.0, epsilon = 1e-7);
        let m = constraint_map(CRITICAL_STEP).unwrap();
        assert_abs_diff_eq!(m, constraint_max(), epsilon = 1e-14);
        assert_abs_diff_eq!(m, 1.296_717_753_452_108, epsilon = 1e-14);
        let via_tan = PI / 2.0 * (2.0 / PI).asin().tan();
        assert_abs_diff_eq!(m, via_tan, epsilon = 1e-14);
    }

    #[test]
    fn constraint_map_domain() {
        assert!(constraint_map(-0.01).is_err());
        assert!(constraint_map(0.4).is_err());
    }

    #[test]
    fn preimages_satisfy_vieta() {
        let alpha: f64 = 1.1;
        let p = constraint_preimages(alpha).unwrap();
        let denom = PI * PI + 4.0 * alpha * alpha;
        assert_abs_diff_eq!(p.small + p.large, 4.0 * alpha * alpha / denom, epsilon = 1e-15);
        assert_abs_diff_eq!(p.small * p.large, (alpha * alpha - 1.0) / denom, epsilon = 1e-15);
        // Frozen from a 40-digit evaluation of the quadratic.
        assert_abs_diff_eq!(p.small, 0.051_425_901_480_801_76, epsilon = 1e-15);
        assert_abs_diff_eq!(p.large, 0.277_610_819_563_957_3, epsilon = 1e-15);
    }

    #[test]
    fn preimages_at_one_point_two() {
        let p = constraint_preimages(1.2).unwrap();
        assert_abs_diff_eq!(p.small, 0.108_093_893_881_791_39, epsilon = 1e-15);
        assert_abs_diff_eq!(p.large, 0.260_437_506_669_750_2, epsilon = 1e-15);
        assert_abs_diff_eq!(constraint_map(p.small).unwrap(), 1.2, epsilon = 1e-10);
        assert_abs_diff_eq!(constraint_map(p.large).unwrap(), 1.2, epsilon = 1e-10);
    }

    #[test]
    fn preimages_near_maximum_collapse() {
        let p = constraint_preimages(constraint_max() - 1e-9).unwrap();
        assert!(!p.double_root);
        assert!((p.small - CRITICAL_STEP).abs() < 1e-4);
        assert!((p.large - CRITICAL_STEP).abs() < 1e-4);
        let q = constraint_preimages(constraint_max()).unwrap();
        assert!(q.double_root);
        assert_eq!(q.small, q.large);
    }

    #[test]
    fn preimages_domain() {
        assert!(constraint_preimages(1.0).is_err());
        assert!(constraint_preimages(0.5).is_err());
        assert!(constraint_preimages(1.3).is_err());
    }

    #[test]
    fn newtypes_validate() {
        assert!(Angle::new(-0.1).is_err());
        assert!(Angle::new(2.0).is_err());
        assert_eq!(Angle::new(PI / 2.0 + 1e-13).unwrap(), Angle::RIGHT);
        assert!(Ratio::new(-1.0).is_err());
        assert!(Ratio::step(0.5).is_err());
        assert_eq!(Ratio::step(0.1).unwrap().get(), 0.1);
    }
}
