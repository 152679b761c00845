//! Deterministic random instances for the verification suites.
//!
//! All generators take an explicit ChaCha stream so that every failure is
//! reproducible from a single seed. Spaces are drawn as points in the unit
//! square with Euclidean distances and weights uniform in `[0.5, 2]`; the
//! triangle inequality then holds by construction and validation always
//! passes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::{Piece, TestCurve};
use crate::gradients::minimal_hajlasz;
use crate::space::{MetricMeasureSpace, ScalarFunction};
use crate::Result;

/// Independent generator for a (suite, case) cell: distinct cells get
/// distinct ChaCha streams, and re-running a cell replays its stream.
pub fn rng_for(seed: u64, suite: u64, case: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(suite.wrapping_mul(0x2545_f491_4f6c_dd1d))
            .wrapping_add(case),
    )
}

/// Random `n`-point space: points uniform in the unit square, weights
/// uniform in `[0.5, 2]`. Points are resampled until pairwise distinct so
/// that distances are positive.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> MetricMeasureSpace {
    let mut coords: Vec<Vec<f64>> = Vec::with_capacity(n);
    while coords.len() < n {
        let p = vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        if coords.iter().all(|q| q != &p) {
            coords.push(p);
        }
    }
    let weights = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    MetricMeasureSpace::from_coords(coords, weights)
        .expect("unit-square samples form a valid space")
}

/// Table with entries uniform in `[lo, hi)`.
pub fn random_table(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> ScalarFunction {
    ScalarFunction::new((0..n).map(|_| rng.gen_range(lo..hi)).collect())
        .expect("uniform samples are finite")
}

/// Continuous curve on `[0, 1]`: a single polyline piece through `segments + 1`
/// random vertices in the unit square at sorted random interior times.
pub fn random_polyline(rng: &mut ChaCha8Rng, segments: usize) -> (MetricMeasureSpace, TestCurve) {
    let s = random_space(rng, 3);
    let mut times = vec![0.0];
    let mut interior: Vec<f64> = (0..segments.saturating_sub(1))
        .map(|_| rng.gen_range(0.05..0.95))
        .collect();
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    interior.dedup();
    times.extend(interior);
    times.push(1.0);
    let vertices = (0..times.len())
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect();
    let c = TestCurve::new(
        &s,
        (0.0, 1.0),
        vec![Piece::Polyline { start: 0.0, end: 1.0, times, vertices }],
    )
    .expect("sorted times and square vertices form a valid polyline");
    (s, c)
}

/// Everywhere-Hajłasz pair: a random table together with its minimal
/// gradient, optionally pushed up pointwise (monotonicity keeps the pair
/// valid) and optionally with one entry boosted past several dyadic levels
/// to exercise truncation.
pub fn hajlasz_pair(
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    p: f64,
    slack: f64,
    plant_large: bool,
) -> Result<(ScalarFunction, ScalarFunction)> {
    let f = random_table(rng, s.n(), -1.0, 1.0);
    let (minimal, _) = minimal_hajlasz(s, &f, p)?;
    let mut values: Vec<f64> = minimal
        .values()
        .iter()
        .map(|&v| v + rng.gen_range(0.0..=slack))
        .collect();
    if plant_large {
        let i = rng.gen_range(0..s.n());
        values[i] += 2f64.powi(rng.gen_range(6..11));
    }
    Ok((f, ScalarFunction::new(values)?))
}

/// Pair whose gradient passes the two-point upper-S check by construction:
/// twice a Hajłasz gradient of `f`.
pub fn upper_s_pair(
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    p: f64,
) -> Result<(ScalarFunction, ScalarFunction)> {
    let (f, g) = hajlasz_pair(rng, s, p, 0.25, false)?;
    Ok((f, g.scale(2.0)))
}
