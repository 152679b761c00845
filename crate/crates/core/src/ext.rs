//! Extended-real arithmetic.
//!
//! Tables may carry `±inf` (gradient tables only `+inf`). Two conventions are
//! used throughout and centralized here so no call site reinvents them:
//!
//! * `|x − y| = +inf` when `x` and `y` are infinities of the same sign;
//! * `value · mass = 0` whenever `mass = 0`, even for infinite values
//!   (an atom of measure zero kills any integrand).

pub const INF: f64 = f64::INFINITY;

/// Absolute difference under the like-signed-infinities convention.
pub fn abs_diff(x: f64, y: f64) -> f64 {
    if x.is_infinite() && y.is_infinite() && x == y {
        INF
    } else {
        (x - y).abs()
    }
}

/// Integrand-times-mass product; zero mass absorbs infinite values.
pub fn mul_mass(value: f64, mass: f64) -> f64 {
    if mass == 0.0 || value == 0.0 {
        0.0
    } else {
        value * mass
    }
}

/// `lhs <= rhs` up to an absolute slack, with infinities handled so that an
/// infinite right side always passes and an infinite left side only passes
/// against an infinite right side.
pub fn leq_slack(lhs: f64, rhs: f64, slack: f64) -> bool {
    if rhs == INF {
        return true;
    }
    if lhs == INF {
        return false;
    }
    lhs <= rhs + slack
}
