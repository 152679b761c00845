//! Calculus of right-continuous bounded-variation curves in finite metric
//! measure spaces.
//!
//! The crate provides, bottom up:
//!
//! * [`space`] — finite metric measure spaces `(X, d, m)` and scalar tables on
//!   them, with exact validation of the metric axioms;
//! * [`curve`] — test curves (right-continuous BV curves with left limits,
//!   left-continuous at the right endpoint), their variation calculus,
//!   reversal, restriction and reparametrization;
//! * [`stieltjes`] — the Lebesgue–Stieltjes measure `μ_γ` of a curve, plain and
//!   symmetrized curve integrals, the symmetrized pushforward measure on the
//!   space, and the interval-decomposition identities;
//! * [`modulus`] — the discrete p-modulus of finite curve families and its
//!   generalization to weighted curve plans;
//! * [`gradients`] — Hajłasz and upper-S-gradient checks, McShane extension,
//!   and the gradient-transfer pipelines with their explicit constants
//!   (2, 18, 76);
//! * [`verify`] — randomized verification suites used by the CLI and the
//!   acceptance tests.
//!
//! All types are immutable after construction and every operation is pure, so
//! shared data may be used from multiple threads freely.

pub mod curve;
pub mod exact;
pub mod ext;
pub mod gradients;
pub mod jsonio;
pub mod modulus;
pub mod quad;
pub mod report;
pub mod sample;
pub mod solver;
pub mod space;
pub mod stieltjes;
pub mod verify;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    Space(String),
    #[error("invalid curve: {0}")]
    Curve(String),
    #[error("invalid function: {0}")]
    Function(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("time {t} outside domain [{a}, {b}]")]
    OutOfDomain { t: f64, a: f64, b: f64 },
    #[error("invalid interval [{r}, {t}]")]
    BadInterval { r: f64, t: f64 },
    #[error("cannot restrict at discontinuity point {0}")]
    RestrictAtJump(f64),
    #[error("operation requires a continuous curve (found a jump at {0})")]
    NotContinuous(f64),
    #[error("operation requires a curve of positive variation")]
    ZeroVariation,
    #[error("exponent p must satisfy p >= 1, got {0}")]
    Exponent(f64),

    #[error("program is infeasible: {0}")]
    Infeasible(String),
    #[error("{0} requires pure step curves")]
    StepCurvesOnly(&'static str),
    #[error("{0} requires a space with a Euclidean embedding")]
    EmbeddingRequired(&'static str),
    #[error("table integrand cannot be evaluated on a polyline piece")]
    TableOverPolyline,
    #[error("set for {0} must be nonempty")]
    EmptySet(&'static str),
    #[error("function is not {constant}-Lipschitz on the set: |f({i})-f({j})| = {diff} > {bound}")]
    NotLipschitz {
        i: usize,
        j: usize,
        constant: f64,
        diff: f64,
        bound: f64,
    },
    #[error("sequence must be strictly monotone toward {0}")]
    NotMonotone(f64),
    #[error("negative density entry at {0}")]
    NegativeDensity(usize),
    #[error("config: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
