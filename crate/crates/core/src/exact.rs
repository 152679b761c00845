//! Exact arithmetic on binary64 inputs.
//!
//! Every finite `f64` is a dyadic rational, so sums and products of table
//! values and distance-matrix entries can be evaluated without rounding.
//! The space validator uses this for the triangle inequality, and the
//! symmetrized integral has an exact path for step curves with table
//! integrands.

use num::BigRational;
use num::FromPrimitive;

/// Exact rational image of a finite float; `None` for `±inf`/`NaN`.
pub fn rat(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

/// Exact triangle check `d_ik <= d_ij + d_jk`; falls back to a float check
/// when any entry fails to convert (non-finite input).
pub fn triangle_holds(d_ik: f64, d_ij: f64, d_jk: f64) -> bool {
    match (rat(d_ik), rat(d_ij), rat(d_jk)) {
        (Some(ik), Some(ij), Some(jk)) => ik <= ij + jk,
        _ => d_ik <= d_ij + d_jk,
    }
}

/// Exact evaluation of `(f(x) + f(y)) · d / 2`.
pub fn half_pair_mass(fx: f64, fy: f64, d: f64) -> Option<BigRational> {
    let two = BigRational::from_integer(2.into());
    Some((rat(fx)? + rat(fy)?) * rat(d)? / two)
}
