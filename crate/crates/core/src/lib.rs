//! Discrete machinery for measuring the regularity of the characteristic
//! function of the unit cube in Besov-type spaces `B^{s,tau}_{p,q}(R^n)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`]: dyadic cubes, containment, and the non-uniform cube sets `A_j`.
//! * [`seqnorm`]: smoothness parameters, sparse coefficient fields and the
//!   sup-over-cubes sequence quasi-norms (optimised evaluator plus a
//!   brute-force oracle).
//! * [`haar`]: exact Haar analysis of boxes and dyadic step functions.
//! * [`families`]: the test-function families used to show that
//!   `f -> <f, X>` fails to extend, with closed-form norms and pairings.
//! * [`regions`]: closed-form parameter-region predicates.
//! * [`diffnorm`]: difference-based quantities for piecewise-constant inputs.
//! * [`harness`]: probes, divergence experiments, sweeps and configuration.
//! * [`io`]: the coefficient CSV format shared with the command line tool.

// Negated comparisons are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffnorm;
pub mod dyadic;
pub mod error;
pub mod families;
pub mod haar;
pub mod harness;
pub mod io;
pub mod regions;
pub mod seqnorm;

pub use error::{Error, Result};

/// Relative tolerance used when deciding whether a real parameter sits exactly
/// on a threshold.
pub(crate) const THRESHOLD_EPS: f64 = 1e-12;

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = 1.0_f64.max(a.abs()).max(b.abs());
    (a - b).abs() <= THRESHOLD_EPS * scale
}

pub(crate) fn approx_lt(a: f64, b: f64) -> bool {
    a < b && !approx_eq(a, b)
}

pub(crate) fn approx_le(a: f64, b: f64) -> bool {
    a < b || approx_eq(a, b)
}
