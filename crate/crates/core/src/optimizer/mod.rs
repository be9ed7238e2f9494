//! The constrained maximisation behind `N`.
//!
//! A finite sequence of step parameters `λ_j ∈ [0, 1/π]` generates an
//! interpolation partition through `t_{j+1} = t_j + λ_j(1 − 2t_j)`, `t_0 = 0`.
//! Each step costs the angle `½·arcsin(πλ_j)`. For a total budget `θ`,
//! `T(θ)` is the largest endpoint reachable; `N` is its inverse.
//!
//! The closed forms here ([`t0_closed`], [`t1_closed`], [`t2_closed`],
//! [`t_closed`]) are checked against the grid search in [`oracle`].

pub mod oracle;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::bounds::eval_am;
use crate::constants::{c_star, theta_am_third, theta_single_end, theta_two_block_end};
use crate::error::{Error, Result};
use crate::scalar::{check_step, constraint_preimages, step_cost, Angle, DOMAIN_SLACK, UNIT_PREIMAGE};

pub use oracle::{brute_force_tn, truncation_check, PrefixSlack, TruncationReport};

/// A nonempty finite sequence of step parameters, each in `[0, 1/π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ParamSeq(Vec<f64>);

impl ParamSeq {
    pub fn new(params: Vec<f64>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Invalid("parameter sequence must be nonempty".into()));
        }
        let params = params
            .into_iter()
            .map(|x| check_step(x, "step parameter"))
            .collect::<Result<Vec<_>>>()?;
        Ok(ParamSeq(params))
    }

    /// `count` copies of `value`.
    pub fn repeated(value: f64, count: usize) -> Result<Self> {
        Self::new(vec![value; count])
    }

    pub fn params(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total angle cost `Σ ½·arcsin(πλ_j)`.
    pub fn total_cost(&self) -> f64 {
        self.0.iter().map(|&x| step_cost(x).expect("validated")).sum()
    }

    /// The first `len` parameters.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.0.len() {
            return Err(Error::Invalid(format!(
                "prefix length {len} outside 1..={}",
                self.0.len()
            )));
        }
        Ok(ParamSeq(self.0[..len].to_vec()))
    }
}

impl TryFrom<Vec<f64>> for ParamSeq {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ParamSeq::new(v)
    }
}

impl From<ParamSeq> for Vec<f64> {
    fn from(p: ParamSeq) -> Self {
        p.0
    }
}

/// The increasing partition `(t_0, …, t_{n+1})` with `t_0 = 0` and all `t_j < ½`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<f64>);

impl Partition {
    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn last(&self) -> f64 {
        *self.0.last().expect("partition always holds t_0")
    }
}

/// Which closed-form regime produced an [`OptResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// One step `(1/π)·sin 2θ`, for `θ ≤ arctan(2/π)`.
    Single,
    /// Two distinct steps with equal constraint-map value `(π/2)·tan θ`.
    TwoBlock,
    /// Two equal steps `(1/π)·sin θ`, for `arcsin(2/π) ≤ θ ≤ ϑ`.
    TwoEqual,
    /// Three equal steps `(1/π)·sin(2θ/3)`, for `θ > ϑ`.
    ThreeEqual,
}

/// Solution of the maximisation at one angle budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub theta: Angle,
    /// `T(θ)`
    pub value: f64,
    pub argmax: ParamSeq,
    pub branch: Branch,
}

/// Runs the recursion `t_{j+1} = t_j + λ_j(1 − 2t_j)` from `t_0 = 0`.
pub fn apply_w(lambda: &ParamSeq) -> Partition {
    let mut ts = Vec::with_capacity(lambda.len() + 1);
    let mut t = 0.0;
    ts.push(t);
    for &x in lambda.params() {
        t += x * (1.0 - 2.0 * t);
        ts.push(t);
    }
    Partition(ts)
}

/// The endpoint `½(1 − Π(1 − 2λ_j))` of the partition; independent of order.
pub fn max_w(lambda: &ParamSeq) -> f64 {
    max_w_slice(lambda.params())
}

pub(crate) fn max_w_slice(params: &[f64]) -> f64 {
    0.5 * (1.0 - params.iter().map(|&x| 1.0 - 2.0 * x).product::<f64>())
}

/// Endpoint reached by `steps` equal parameters `(1/π)·sin(2θ/steps)`.
pub fn equal_steps_value(theta: f64, steps: usize) -> f64 {
    let k = steps as f64;
    0.5 - 0.5 * (1.0 - 2.0 / PI * (2.0 * theta / k).sin()).powi(steps as i32)
}

fn check_theta(theta: f64) -> Result<f64> {
    Angle::new(theta).map(Angle::radians)
}

/// `T_0(θ)`: `(1/π)·sin 2θ` for `θ ≤ π/4`, and 0 beyond (no single step can spend θ).
pub fn t0_closed(theta: f64) -> Result<f64> {
    let theta = check_theta(theta)?;
    Ok(if theta <= FRAC_PI_4 {
        (2.0 * theta).sin() / PI
    } else {
        0.0
    })
}

/// `T_1(θ)`, the best endpoint with at most two steps.
pub fn t1_closed(theta: f64) -> Result<f64> {
    let theta = check_theta(theta)?;
    Ok(if theta <= theta_single_end() {
        (2.0 * theta).sin() / PI
    } else if theta < theta_two_block_end() {
        let p2 = PI * PI;
        2.0 / p2 + (p2 - 4.0) / (2.0 * p2) * theta.sin().powi(2)
    } else {
        equal_steps_value(theta, 2)
    })
}

/// `T_2(θ)`, which equals `T(θ)`: extra steps beyond three never help.
pub fn t2_closed(theta: f64, vartheta: f64) -> Result<f64> {
    let theta = check_theta(theta)?;
    if theta <= vartheta {
        t1_closed(theta)
    } else {
        Ok(equal_steps_value(theta, 3))
    }
}

/// `T(θ)` together with a maximising sequence and its regime.
pub fn t_closed(theta: f64, vartheta: f64) -> Result<OptResult> {
    let theta = check_theta(theta)?;
    let value = t2_closed(theta, vartheta)?;
    let (branch, argmax) = if theta <= theta_single_end() {
        (Branch::Single, ParamSeq::new(vec![(2.0 * theta).sin() / PI])?)
    } else if theta < theta_two_block_end() {
        let alpha = FRAC_PI_2 * theta.tan();
        // Right above arctan(2/π) the map value can round down to exactly 1.
        let (large, small) = if alpha <= 1.0 {
            (UNIT_PREIMAGE, 0.0)
        } else {
            let pre = constraint_preimages(alpha)?;
            (pre.large, pre.small)
        };
        (Branch::TwoBlock, ParamSeq::new(vec![large, small])?)
    } else if theta <= vartheta {
        (Branch::TwoEqual, ParamSeq::repeated(theta.sin() / PI, 2)?)
    } else {
        (
            Branch::ThreeEqual,
            ParamSeq::repeated((2.0 * theta / 3.0).sin() / PI, 3)?,
        )
    };
    Ok(OptResult {
        theta: Angle::new(theta)?,
        value,
        argmax,
        branch,
    })
}

/// Witness that `M*` is beaten: a sequence spending `θ = M*(x)` that reaches
/// exactly `x`, so `x = max W(λ) < T(M*(x))`.
///
/// Returns the sequence and `max W` of it. Valid for `4/(π²+4) < x ≤ c*`.
pub fn am_comparison_points(x: f64) -> Result<(ParamSeq, f64)> {
    let cs = c_star();
    if !(x > UNIT_PREIMAGE && x <= cs + DOMAIN_SLACK) {
        return Err(Error::domain("x", x, "(4/(π²+4), c*]"));
    }
    let theta = eval_am(x.min(cs))?;
    let third = theta_am_third();
    let seq = if theta <= third {
        vec![UNIT_PREIMAGE, (2.0 * theta - third).sin() / PI]
    } else {
        vec![
            UNIT_PREIMAGE,
            UNIT_PREIMAGE,
            (2.0 * theta - 2.0 * third).sin() / PI,
        ]
    };
    let seq = ParamSeq::new(seq)?;
    let reached = max_w(&seq);
    Ok((seq, reached))
}
