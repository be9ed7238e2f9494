//! Grid certification of the auxiliary trigonometric inequalities that the
//! closed forms for `T` rest on.
//!
//! Each check samples its open domain on an evenly spaced grid (endpoints
//! excluded, and any point within `1e-9` of an equality point dropped),
//! records the smallest margin of the strict inequality, and separately
//! confirms that the margin vanishes at the equality points.
//!
//! Floating-point evidence only; nothing here is an interval proof.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{constraint_map, CRITICAL_STEP, UNIT_PREIMAGE};

/// Smallest grid accepted by the checks.
pub const MIN_GRID: usize = 1000;
/// Distance from endpoints and equality points below which samples are dropped.
pub const EXCLUSION: f64 = 1e-9;
/// Tolerance for the margin at an equality point.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Step of the central difference used against the closed-form `θ′`.
pub const FD_STEP: f64 = 1e-6;
/// Relative tolerance of that comparison, floored at an absolute scale of 1.
pub const FD_TOL: f64 = 1e-5;

// Working precision for the one margin that vanishes to third order.
const HP_BITS: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    A1a,
    A1b,
    A1c,
    A1d,
    A1e,
    A2,
    A3,
    A4,
}

impl Lemma {
    pub const ALL: [Lemma; 8] = [
        Lemma::A1a,
        Lemma::A1b,
        Lemma::A1c,
        Lemma::A1d,
        Lemma::A1e,
        Lemma::A2,
        Lemma::A3,
        Lemma::A4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::A1a => "a1a",
            Lemma::A1b => "a1b",
            Lemma::A1c => "a1c",
            Lemma::A1d => "a1d",
            Lemma::A1e => "a1e",
            Lemma::A2 => "a2",
            Lemma::A3 => "a3",
            Lemma::A4 => "a4",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown lemma '{s}'")))
    }
}

/// Variant of the first group of inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum A1Variant {
    A,
    B,
    C,
    D,
    E,
}

impl A1Variant {
    pub fn lemma(self) -> Lemma {
        match self {
            A1Variant::A => Lemma::A1a,
            A1Variant::B => Lemma::A1b,
            A1Variant::C => Lemma::A1c,
            A1Variant::D => Lemma::A1d,
            A1Variant::E => Lemma::A1e,
        }
    }
}

/// A named side condition attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The measured quantity, e.g. a difference or a count.
    pub value: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, passed: bool) -> Self {
        Check { name: name.into(), value, passed }
    }

    fn equality(label: &str, point: f64, margin: f64) -> Self {
        Check::new(format!("equality at {label} = {point}"), margin, margin.abs() < EQUALITY_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub lemma: Lemma,
    pub grid_size: usize,
    /// Smallest slack of the strict inequality over the sampled points.
    pub min_margin: f64,
    /// Where `min_margin` is attained.
    pub worst_point: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl GridReport {
    fn assemble(lemma: Lemma, sweep: Sweep, checks: Vec<Check>) -> Self {
        let passed = sweep.count > 0 && sweep.min_margin > 0.0 && checks.iter().all(|c| c.passed);
        GridReport {
            lemma,
            grid_size: sweep.count,
            min_margin: sweep.min_margin,
            worst_point: sweep.worst_point,
            passed,
            checks,
        }
    }
}

/// Evenly spaced samples of `(lo, hi)`, or `(lo, hi]` when `hi_closed`,
/// skipping anything within [`EXCLUSION`] of an endpoint or of `avoid`.
fn grid_points(lo: f64, hi: f64, hi_closed: bool, n: usize, avoid: &[f64]) -> Vec<f64> {
    let denom = if hi_closed { n } else { n + 1 } as f64;
    (1..=n)
        .map(|i| lo + (hi - lo) * (i as f64 / denom))
        .filter(|&x| x - lo > EXCLUSION)
        .filter(|&x| hi_closed || hi - x > EXCLUSION)
        .filter(|&x| avoid.iter().all(|&a| (x - a).abs() > EXCLUSION))
        .collect()
}

struct Sweep {
    count: usize,
    min_margin: f64,
    worst_point: f64,
}

/// Minimum of `margin` over `points`; ties resolve to the smaller point.
fn sweep<F>(points: &[f64], margin: F) -> Sweep
where
    F: Fn(f64) -> f64 + Sync,
{
    let (min_margin, worst_point) = points
        .par_iter()
        .map(|&x| {
            let m = margin(x);
            // A NaN margin must fail, never hide.
            (if m.is_nan() { f64::NEG_INFINITY } else { m }, x)
        })
        .reduce(
            || (f64::INFINITY, f64::NAN),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Sweep { count: points.len(), min_margin, worst_point }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < MIN_GRID {
        return Err(Error::Invalid(format!("grid must be at least {MIN_GRID}, got {grid}")));
    }
    Ok(())
}

/// `(2/π)(1 − sinθ/π)·sinθ`, the two-equal-step endpoint written in `sin θ`.
fn two_equal(theta: f64) -> f64 {
    let s = theta.sin();
    2.0 / PI * (1.0 - s / PI) * s
}

/// `2/π² + (π²−4)/(2π²)·sin²θ`, the two-block endpoint.
fn two_block(theta: f64) -> f64 {
    let p2 = PI * PI;
    2.0 / p2 + (p2 - 4.0) / (2.0 * p2) * theta.sin().powi(2)
}

/// Margin of variant `v` at `theta`: positive exactly when the inequality holds.
pub fn a1_margin(v: A1Variant, theta: f64) -> f64 {
    let p2 = PI * PI;
    match v {
        A1Variant::A => {
            let s = theta.sin();
            two_equal(theta) - (2.0 / p2 + (2.0 * PI - 4.0) / p2 * s * s)
        }
        A1Variant::B => two_block(theta) - (2.0 * theta).sin() / PI,
        A1Variant::C => two_block(theta) - two_equal(theta),
        A1Variant::D => (2.0 * theta).sin() / PI - two_equal(theta),
        A1Variant::E => two_equal(theta) - (2.0 * theta).sin() / PI,
    }
}

/// Checks one of the five inequalities comparing single-step, two-equal and
/// two-block endpoints on its domain.
pub fn check_a1(v: A1Variant, grid: usize) -> Result<GridReport> {
    check_grid(grid)?;
    let lower_a = (1.0 / (PI - 1.0)).asin();
    let single_end = (2.0 / PI).atan();
    let two_equal_switch = 2.0 * (1.0 / PI).atan();
    let tangency = (2.0 / PI).asin();
    let margin = |t: f64| a1_margin(v, t);
    let (points, checks) = match v {
        A1Variant::A => (
            grid_points(lower_a, FRAC_PI_2, false, grid, &[]),
            vec![
                Check::equality("arcsin(1/(π−1))", lower_a, margin(lower_a)),
                Check::equality("π/2", FRAC_PI_2, margin(FRAC_PI_2)),
            ],
        ),
        A1Variant::B => (
            grid_points(single_end, FRAC_PI_4, true, grid, &[]),
            vec![Check::equality("arctan(2/π)", single_end, margin(single_end))],
        ),
        A1Variant::C => {
            let mirror = PI - tangency;
            (
                grid_points(0.0, PI, false, grid, &[tangency, mirror]),
                vec![
                    Check::equality("arcsin(2/π)", tangency, margin(tangency)),
                    Check::equality("π − arcsin(2/π)", mirror, margin(mirror)),
                ],
            )
        }
        A1Variant::D => (
            grid_points(0.0, two_equal_switch, false, grid, &[]),
            vec![Check::equality("2·arctan(1/π)", two_equal_switch, margin(two_equal_switch))],
        ),
        A1Variant::E => (
            grid_points(two_equal_switch, PI, false, grid, &[]),
            vec![Check::equality("2·arctan(1/π)", two_equal_switch, margin(two_equal_switch))],
        ),
    };
    Ok(GridReport::assemble(v.lemma(), sweep(&points, margin), checks))
}

/// `(1 − (2/π)sin(2θ/3))³ − (1 − (2/π)sinθ)²`: positive below `ϑ`, negative above.
pub fn a2_difference(theta: f64) -> f64 {
    (1.0 - 2.0 / PI * (2.0 * theta / 3.0).sin()).powi(3) - (1.0 - 2.0 / PI * theta.sin()).powi(2)
}

/// Checks that three equal steps lose to two below `vartheta` and win above it.
pub fn check_a2(grid: usize, vartheta: f64) -> Result<GridReport> {
    check_grid(grid)?;
    if !(vartheta > 0.0 && vartheta < FRAC_PI_2) {
        return Err(Error::domain("vartheta", vartheta, "(0, π/2)"));
    }
    let points = grid_points(0.0, FRAC_PI_2, true, grid, &[vartheta]);
    let s = sweep(&points, |t| {
        let d = a2_difference(t);
        if t < vartheta {
            d
        } else {
            -d
        }
    });
    let at = a2_difference(vartheta);
    let mut checks = vec![Check::equality("ϑ", vartheta, at)];
    let tangency = (2.0 / PI).asin();
    checks.push(Check::new(
        "ϑ > arcsin(2/π)",
        vartheta - tangency,
        vartheta > tangency,
    ));
    Ok(GridReport::assemble(Lemma::A2, s, checks))
}

/// The auxiliary parametrisation of the two-block branch by its larger step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A3Point {
    pub alpha: f64,
    pub y: f64,
    pub theta: f64,
}

fn a3_y(x: f64) -> f64 {
    let p2 = PI * PI;
    (4.0 - (p2 + 4.0) * x) / (p2 + 4.0 - 4.0 * p2 * x)
}

fn a3_theta(x: f64) -> f64 {
    (PI * x).asin() + 0.5 * (PI * a3_y(x)).asin()
}

/// For `2/π² < x < 4/(π²+4)`: the common constraint-map value `α`, the
/// smaller preimage `y` of `α`, and the spent angle `θ = arcsin(πx) + ½·arcsin(πy)`.
pub fn lem_a3_parametrization(x: f64) -> Result<A3Point> {
    if !(x > CRITICAL_STEP && x < UNIT_PREIMAGE) {
        return Err(Error::domain("x", x, "(2/π², 4/(π²+4))"));
    }
    Ok(A3Point {
        alpha: constraint_map(x)?,
        y: a3_y(x),
        theta: a3_theta(x),
    })
}

/// Closed-form `θ′(x)`.
pub fn a3_theta_derivative(x: f64) -> f64 {
    let p2 = PI * PI;
    PI / (2.0 * (1.0 - p2 * x * x).sqrt()) * (12.0 + p2 - 8.0 * p2 * x) / (p2 + 4.0 - 4.0 * p2 * x)
}

/// `(12+π²)/(8π²)`, where `θ` peaks.
pub fn a3_peak() -> f64 {
    (12.0 + PI * PI) / (8.0 * PI * PI)
}

/// `(1−2x)²(1−2y) − (1 − (2/π)sin(2θ/3))³`, evaluated in 128-bit precision.
///
/// It vanishes to third order at `x = 2/π²`, so in `f64` the first few dozen
/// points of a fine grid would be pure rounding noise.
pub fn a3_estimate_margin(x: f64) -> f64 {
    let f = |v: f64| Float::with_val(HP_BITS, v);
    let pi = Float::with_val(HP_BITS, Constant::Pi);
    let p2 = Float::with_val(HP_BITS, &pi * &pi);
    let x = f(x);
    let num = f(4.0) - (p2.clone() + 4u32) * &x;
    let den = p2.clone() + 4u32 - f(4.0) * &p2 * &x;
    let y = num / den;
    let theta = Float::with_val(HP_BITS, &pi * &x).asin() + Float::with_val(HP_BITS, &pi * &y).asin() / 2u32;
    let one_minus_2x = f(1.0) - f(2.0) * &x;
    let lhs = Float::with_val(HP_BITS, one_minus_2x.square_ref()) * (f(1.0) - f(2.0) * &y);
    let s = (theta * 2u32 / 3u32).sin();
    let rhs = (f(1.0) - f(2.0) / &pi * s).pow(3u32);
    (lhs - rhs).to_f64()
}

/// Certifies the auxiliary parametrisation on `(2/π², 4/(π²+4))`.
///
/// The sweep covers the strict lower bound on `θ` and the estimate
/// `(1 − (2/π)sin(2θ/3))³ < (1−2x)²(1−2y)`. The side checks are listed in
/// the returned report; among them is the single sign change of the
/// derivative at [`a3_peak`].
pub fn check_a3(grid: usize) -> Result<GridReport> {
    check_grid(grid)?;
    let (lo, hi) = (CRITICAL_STEP, UNIT_PREIMAGE);
    let points = grid_points(lo, hi, false, grid, &[]);
    let spacing = (hi - lo) / (grid + 1) as f64;
    let p2 = PI * PI;
    let theta_low = 1.5 * (2.0 / PI).asin();
    let theta_high = ((12.0 + p2) / (8.0 * PI)).asin() + 0.5 * ((12.0 - p2) / (4.0 * PI)).asin();

    let s = sweep(&points, |x| (a3_theta(x) - theta_low).min(a3_estimate_margin(x)));

    let mut upper_excess = f64::NEG_INFINITY;
    let mut fd_error = 0.0_f64;
    let mut identity_error = 0.0_f64;
    let mut roundtrip_error = 0.0_f64;
    let mut sign_changes = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in &points {
        let p = lem_a3_parametrization(x)?;
        upper_excess = upper_excess.max(p.theta - theta_high);
        let d = a3_theta_derivative(x);
        if x - FD_STEP > lo && x + FD_STEP < hi {
            let fd = (a3_theta(x + FD_STEP) - a3_theta(x - FD_STEP)) / (2.0 * FD_STEP);
            fd_error = fd_error.max((fd - d).abs() / d.abs().max(1.0));
        }
        let identity = (p2 - 4.0) / (p2 + 4.0 - 4.0 * p2 * x) * (1.0 - 2.0 * x);
        identity_error = identity_error.max(((1.0 - 2.0 * p.y) - identity).abs());
        roundtrip_error = roundtrip_error.max((constraint_map(p.y)? - p.alpha).abs());
        if let Some((px, pd)) = prev {
            if (pd > 0.0) != (d > 0.0) {
                sign_changes.push((px, x, pd > 0.0));
            }
        }
        prev = Some((x, d));
    }
    let peak = a3_peak();
    let located = match sign_changes.as_slice() {
        [(a, b, true)] => (peak >= a - spacing && peak <= b + spacing).then(|| (a + b) / 2.0),
        _ => None,
    };
    let end_margin = a3_estimate_margin(hi);
    let checks = vec![
        Check::new("θ ≤ θ((12+π²)/(8π²)) (max excess)", upper_excess, upper_excess <= 1e-12),
        Check::equality("(12+π²)/(8π²)", peak, a3_theta(peak) - theta_high),
        Check::new("θ′ formula vs central difference (max relative error)", fd_error, fd_error < FD_TOL),
        Check::new(
            "θ′ changes sign once, + to −, at (12+π²)/(8π²)",
            located.unwrap_or(f64::NAN),
            located.is_some(),
        ),
        Check::new("1 − 2y identity (max error)", identity_error, identity_error < 1e-12),
        Check::new("constraint map round trip (max error)", roundtrip_error, roundtrip_error < 1e-10),
        Check::equality("2/π²", lo, a3_estimate_margin(lo)),
        Check::new("estimate margin at 4/(π²+4)", end_margin, end_margin > 0.0),
    ];
    Ok(GridReport::assemble(Lemma::A3, s, checks))
}

/// `(1 − (2/π)sin(θ/2))⁴ − (1 − (2/π)sin(2θ/3))³`
pub fn a4_margin(theta: f64) -> f64 {
    (1.0 - 2.0 / PI * (0.5 * theta).sin()).powi(4) - (1.0 - 2.0 / PI * (2.0 * theta / 3.0).sin()).powi(3)
}

/// Checks that four equal steps never beat three on `(0, π/2]`.
pub fn check_a4(grid: usize) -> Result<GridReport> {
    check_grid(grid)?;
    let points = grid_points(0.0, FRAC_PI_2, true, grid, &[]);
    let s = sweep(&points, a4_margin);
    let checks = vec![Check::equality("0", 0.0, a4_margin(0.0))];
    Ok(GridReport::assemble(Lemma::A4, s, checks))
}

/// Runs the check for `lemma` at the given grid size.
pub fn check_lemma(lemma: Lemma, grid: usize, vartheta: f64) -> Result<GridReport> {
    match lemma {
        Lemma::A1a => check_a1(A1Variant::A, grid),
        Lemma::A1b => check_a1(A1Variant::B, grid),
        Lemma::A1c => check_a1(A1Variant::C, grid),
        Lemma::A1d => check_a1(A1Variant::D, grid),
        Lemma::A1e => check_a1(A1Variant::E, grid),
        Lemma::A2 => check_a2(grid, vartheta),
        Lemma::A3 => check_a3(grid),
        Lemma::A4 => check_a4(grid),
    }
}
