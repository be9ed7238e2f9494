//! Bounds on the rotation of spectral subspaces of self-adjoint operators
//! under bounded additive perturbations.
//!
//! For a perturbation of relative size `x = ‖V‖/d` (`d` the spectral gap),
//! the maximal angle between the unperturbed and perturbed spectral subspaces
//! is at most `N(x)`, for `0 ≤ x < c_crit`. This crate evaluates `N` next to
//! the older estimating functions. It also checks the underlying maximisation
//! against a brute-force oracle and tests the bound on random matrices.
//!
//! ```
//! use rotbound::{bounds::eval_new, constants::PaperConstants};
//!
//! let c = PaperConstants::solved();
//! let theta = eval_new(0.3, c.kappa).unwrap();
//! assert!(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2);
//! ```

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appendix;
pub mod bounds;
pub mod constants;
pub mod error;
pub mod matrix_lab;
pub mod optimizer;
pub mod root;
pub mod scalar;

pub use bounds::{compare_bounds, BoundKind, CurveSample};
pub use constants::PaperConstants;
pub use error::{Error, Result};
pub use optimizer::{apply_w, max_w, t_closed, Branch, OptResult, ParamSeq, Partition};
pub use scalar::{Angle, Ratio};
