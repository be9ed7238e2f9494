//! Named constants of the bound. `ϑ` and `κ` are transcendental and solved
//! numerically; everything else has a closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root::find_root;
use crate::scalar::{constraint_max, UNIT_PREIMAGE};

/// Domain limit of the `KMM` bound, `2/(2+π)`.
pub fn c_kmm() -> f64 {
    2.0 / (2.0 + PI)
}

/// Domain limit of the `MS` bound, `sinh(1)/e`.
pub fn c_ms() -> f64 {
    1f64.sinh() / 1f64.exp()
}

/// Domain limit of the `AM` bound.
pub fn c_star() -> f64 {
    let p2 = PI * PI;
    let p4 = p2 * p2;
    let p6 = p4 * p2;
    16.0 * (p6 - 2.0 * p4 + 32.0 * p2 - 32.0) / (p2 + 4.0).powi(4)
}

/// Domain limit of the optimal function `N`, `(1 − (1 − √3/π)³)/2`.
pub fn c_crit() -> f64 {
    0.5 * (1.0 - (1.0 - 3f64.sqrt() / PI).powi(3))
}

/// `4(π²−2)/π⁴`, where `N` switches from its second to its third branch.
pub fn n_second_break() -> f64 {
    4.0 * (PI * PI - 2.0) / PI.powi(4)
}

/// `8π²/(π²+4)²`, where `M*` switches from its second to its third branch.
pub fn am_second_break() -> f64 {
    8.0 * PI * PI / (PI * PI + 4.0).powi(2)
}

/// `2(π−1)/π²`, upper end of the admissible range for `κ`.
pub fn kappa_upper() -> f64 {
    2.0 * (PI - 1.0) / (PI * PI)
}

/// `arctan(2/π)`, end of the single-step regime of `T`.
pub fn theta_single_end() -> f64 {
    (2.0 / PI).atan()
}

/// `arcsin(2/π)`, end of the two-block regime of `T`.
pub fn theta_two_block_end() -> f64 {
    (2.0 / PI).asin()
}

/// `arcsin(4π/(π²+4))`, the angle at which `M*` enters its third branch.
pub fn theta_am_third() -> f64 {
    (4.0 * PI / (PI * PI + 4.0)).asin()
}

/// Branch breakpoints in both the ratio and the angle coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints {
    /// `4/(π²+4)`
    pub unit_preimage: f64,
    /// `4(π²−2)/π⁴`
    pub n_second: f64,
    /// `8π²/(π²+4)²`
    pub am_second: f64,
    /// `2(π−1)/π²`
    pub kappa_upper: f64,
    /// `arctan(2/π)`
    pub theta_single_end: f64,
    /// `arcsin(2/π)`
    pub theta_two_block_end: f64,
    /// `arcsin(4π/(π²+4))`
    pub theta_am_third: f64,
}

impl Breakpoints {
    pub fn compute() -> Self {
        Breakpoints {
            unit_preimage: UNIT_PREIMAGE,
            n_second: n_second_break(),
            am_second: am_second_break(),
            kappa_upper: kappa_upper(),
            theta_single_end: theta_single_end(),
            theta_two_block_end: theta_two_block_end(),
            theta_am_third: theta_am_third(),
        }
    }
}

/// Every constant the bound depends on, solved once and passed around by value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaperConstants {
    pub kappa: f64,
    pub vartheta: f64,
    pub c_crit: f64,
    pub c_star: f64,
    pub c_kmm: f64,
    pub c_ms: f64,
    /// Maximum of the constraint map.
    pub m: f64,
    pub breakpoints: Breakpoints,
}

impl PaperConstants {
    /// Solves for `κ` and `ϑ` to bracket width `tol` and collects the closed forms.
    pub fn compute(tol: f64) -> Result<Self> {
        let vartheta = solve_vartheta(tol)?;
        let kappa = solve_kappa(tol)?;
        Ok(PaperConstants {
            kappa,
            vartheta,
            c_crit: c_crit(),
            c_star: c_star(),
            c_kmm: c_kmm(),
            c_ms: c_ms(),
            m: constraint_max(),
            breakpoints: Breakpoints::compute(),
        })
    }

    /// Constants solved to the finest resolvable bracket.
    pub fn solved() -> Self {
        Self::compute(1e-15).expect("bracketed solves on fixed intervals cannot fail")
    }
}

/// Residual of `(1 − (2/π)sin ϑ)² = (1 − (2/π)sin(2ϑ/3))³`.
pub fn vartheta_residual(theta: f64) -> f64 {
    let two_step = 1.0 - 2.0 / PI * theta.sin();
    let three_step = 1.0 - 2.0 / PI * (2.0 * theta / 3.0).sin();
    two_step * two_step - three_step.powi(3)
}

/// Residual of `arcsin((π/2)(1 − √(1−2κ))) = (3/2)·arcsin((π/2)(1 − ∛(1−2κ)))`.
pub fn kappa_residual(kappa: f64) -> f64 {
    let q = 1.0 - 2.0 * kappa;
    let two = (FRAC_PI_2 * (1.0 - q.sqrt())).min(1.0).asin();
    let three = (FRAC_PI_2 * (1.0 - q.cbrt())).min(1.0).asin();
    two - 1.5 * three
}

/// The sign function whose unique zero is `ϑ`:
/// `w(θ) = sin(2θ/3) − (π/2 − (π/2)(1 − (2/π)sin θ)^{2/3})`.
pub fn vartheta_sign_function(theta: f64) -> f64 {
    let base = 1.0 - 2.0 / PI * theta.sin();
    (2.0 * theta / 3.0).sin() - (FRAC_PI_2 - FRAC_PI_2 * base.cbrt().powi(2))
}

/// Checks that `w` is negative on `(0, ϑ)` and positive on `(ϑ, π/2]` at
/// `samples` evenly spaced interior points, skipping points within `1e-9` of `ϑ`.
pub fn sign_pattern_holds(vartheta: f64, samples: usize) -> bool {
    (1..=samples).all(|i| {
        let theta = FRAC_PI_2 * i as f64 / samples as f64;
        if (theta - vartheta).abs() < 1e-9 {
            return true;
        }
        let w = vartheta_sign_function(theta);
        if theta < vartheta {
            w < 0.0
        } else {
            w > 0.0
        }
    })
}

/// Solves for `ϑ ∈ (arcsin(2/π), π/2)`, where three equal steps overtake two.
pub fn solve_vartheta(tol: f64) -> Result<f64> {
    let vartheta = find_root(vartheta_residual, theta_two_block_end(), FRAC_PI_2, tol)?;
    if !sign_pattern_holds(vartheta, 1000) {
        return Err(Error::Degenerate(format!(
            "sign pattern around vartheta = {vartheta} is not the expected one"
        )));
    }
    Ok(vartheta)
}

/// Solves for `κ ∈ (4(π²−2)/π⁴, 2(π−1)/π²)`, the switch point of `N`.
///
/// The residual also vanishes at `κ = 0`, so the lower end of the bracket is
/// the start of the third branch of `N` rather than zero.
pub fn solve_kappa(tol: f64) -> Result<f64> {
    find_root(kappa_residual, n_second_break(), kappa_upper(), tol)
}

/// `|κ − (½ − ½(1 − (2/π)sin ϑ)²)|`.
pub fn cross_check_kappa_vartheta(kappa: f64, vartheta: f64) -> f64 {
    let from_vartheta = 0.5 - 0.5 * (1.0 - 2.0 / PI * vartheta.sin()).powi(2);
    (kappa - from_vartheta).abs()
}

/// Whether `value` agrees with a decimal expansion cut off (not rounded)
/// after `places` digits, as in `0.4548399…`.
pub fn matches_truncated(value: f64, published: f64, places: i32) -> bool {
    let unit = 10f64.powi(-places);
    let d = value - published;
    d > -1e-15 && d < unit - 1e-15
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn published_digits() {
        let c = PaperConstants::solved();
        for (value, digits) in [
            (c.kappa, 0.409_862_3),
            (c.vartheta, 1.128_694_2),
            (c.c_crit, 0.454_839_9),
            (c.c_star, 0.454_169_2),
            (c.c_kmm, 0.388_984_5),
            (c.c_ms, 0.432_332_3),
        ] {
            assert!(matches_truncated(value, digits, 7), "{value} vs {digits}…");
        }
        assert!(!matches_truncated(0.454_84, 0.454_839_9, 7));
        assert!(!matches_truncated(0.454_839_8, 0.454_839_9, 7));
    }

    #[test]
    fn high_precision_values() {
        // 40-digit reference values.
        let c = PaperConstants::solved();
        assert_abs_diff_eq!(c.vartheta, 1.128_694_215_096_665_4, epsilon = 1e-14);
        assert_abs_diff_eq!(c.kappa, 0.409_862_308_769_886_6, epsilon = 1e-14);
        assert_abs_diff_eq!(c.c_crit, 0.454_839_961_132_706, epsilon = 1e-15);
        assert_abs_diff_eq!(c.c_star, 0.454_169_241_665_048_4, epsilon = 1e-15);
    }

    #[test]
    fn residuals_are_tiny() {
        let c = PaperConstants::solved();
        assert!(vartheta_residual(c.vartheta).abs() < 1e-12);
        assert!(kappa_residual(c.kappa).abs() < 1e-12);
    }

    #[test]
    fn vartheta_brackets() {
        let v = solve_vartheta(1e-15).unwrap();
        assert!(v > theta_two_block_end());
        assert!(v < theta_am_third());
        assert_abs_diff_eq!(theta_two_block_end(), 0.690_107_091_374_54, epsilon = 1e-13);
    }

    #[test]
    fn kappa_brackets() {
        let k = solve_kappa(1e-15).unwrap();
        assert!(k > n_second_break() && k < kappa_upper());
        assert!(k < am_second_break());
        assert_abs_diff_eq!(n_second_break(), 0.323_156_876_531_876_4, epsilon = 1e-15);
        assert_abs_diff_eq!(kappa_upper(), 0.433_977_405_082_905_8, epsilon = 1e-15);
    }

    #[test]
    fn cross_check() {
        let c = PaperConstants::solved();
        assert!(cross_check_kappa_vartheta(c.kappa, c.vartheta) < 1e-10);
        assert!(cross_check_kappa_vartheta(c.kappa + 0.01, c.vartheta) > 1e-3);
    }

    #[test]
    fn cross_check_against_grid_scan() {
        // Independent oracle: locate the sign change of the defining residual
        // on a 10⁶-point grid without any root finder.
        let (lo, hi) = (theta_two_block_end(), FRAC_PI_2);
        let n = 1_000_000;
        let mut prev = vartheta_residual(lo);
        let mut scanned = f64::NAN;
        for i in 1..=n {
            let theta = lo + (hi - lo) * i as f64 / n as f64;
            let r = vartheta_residual(theta);
            if prev < 0.0 && r >= 0.0 {
                let h = (hi - lo) / n as f64;
                scanned = theta - h * r / (r - prev);
                break;
            }
            prev = r;
        }
        let kappa = solve_kappa(1e-15).unwrap();
        assert!(cross_check_kappa_vartheta(kappa, scanned) < 1e-6);
        assert!((scanned - solve_vartheta(1e-15).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn sign_pattern_on_dense_grid() {
        let v = solve_vartheta(1e-15).unwrap();
        assert!(sign_pattern_holds(v, 10_000));
        assert!(!sign_pattern_holds(v + 0.05, 10_000));
    }

    #[test]
    fn breakpoint_identities() {
        let b = Breakpoints::compute();
        assert_abs_diff_eq!(b.theta_am_third, 2.0 * b.theta_single_end, epsilon = 1e-12);
        assert_abs_diff_eq!(b.theta_single_end, 0.5 * b.theta_am_third, epsilon = 1e-12);
        assert_abs_diff_eq!(b.unit_preimage, 0.288_400_439_142_000_9, epsilon = 1e-15);
        assert_abs_diff_eq!(b.am_second, 0.410_451_251_689_403_9, epsilon = 1e-15);
        // sin²(arctan(2/π)) = 4/(π²+4)
        assert_abs_diff_eq!(b.theta_single_end.sin().powi(2), b.unit_preimage, epsilon = 1e-15);
        let c_crit_alt = 3.0 * 3f64.sqrt() * (PI * PI - 3f64.sqrt() * PI + 1.0) / (2.0 * PI.powi(3));
        assert_abs_diff_eq!(c_crit(), c_crit_alt, epsilon = 1e-15);
    }

    #[test]
    fn domain_constants_ordered() {
        assert!(c_kmm() < c_ms() && c_ms() < c_star() && c_star() < c_crit());
        assert!(c_crit() <= 0.5);
    }
}
