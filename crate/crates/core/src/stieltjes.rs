//! Curve integration. The Lebesgue–Stieltjes measure `μ_γ` of the variation
//! function drives the forward integral `∫_γ f = ∫ f∘γ dμ_γ`; the symmetrized
//! integral is literally `½(∫_γ f + ∫_γ⃖ f)`, computed through `reverse` so
//! that reversal invariance is a property of the construction rather than an
//! algebraic shortcut. The symmetrized occupation measure `μ^S_γ` is built the
//! same way, as the average of the two pushforwards.
//!
//! Atomic parts use the extended-real conventions of [`crate::ext`]
//! (`∞ · 0 = 0`), so infinite integrand values on unvisited mass are
//! harmless. Moving polyline parts are integrated by adaptive quadrature and
//! require finite integrand values along the path.

use num::BigRational;

use crate::curve::{dist_loc, Loc, Partition, Piece, TestCurve, VariationFunction};
use crate::exact::rat;
use crate::ext::mul_mass;
use crate::quad;
use crate::space::{euclidean, MetricMeasureSpace, ScalarFunction};
use crate::{Error, Result};

/// Per-segment absolute quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-11;

/// Threshold below which a tail of symmetrized integrals counts as vanished.
pub const TAIL_TOL: f64 = 1e-9;

/// The Lebesgue–Stieltjes measure `μ_γ` on `[a,b]` induced by `V_γ`.
/// Atoms sit at the jump times with the jump sizes; the absolutely
/// continuous part has the polyline speeds as density.
#[derive(Debug, Clone)]
pub struct CurveMeasure {
    vf: VariationFunction,
}

impl CurveMeasure {
    pub fn domain(&self) -> (f64, f64) {
        self.vf.domain()
    }

    /// `μ_γ([a,b]) = V(γ)`.
    pub fn total_mass(&self) -> f64 {
        self.vf.total()
    }

    /// `μ_γ((r,t]) = V_γ(t) − V_γ(r)` for `a ≤ r ≤ t ≤ b`.
    pub fn interval_mass(&self, r: f64, t: f64) -> Result<f64> {
        if r > t {
            return Err(Error::BadInterval { r, t });
        }
        Ok(self.vf.value(t)? - self.vf.value(r)?)
    }

    /// `μ_γ({t})`, the jump size at `t` (zero at continuity points and at `a`).
    pub fn singleton(&self, t: f64) -> f64 {
        self.vf.jump_at(t)
    }

    /// Atoms `(time, mass)` in time order.
    pub fn atoms(&self) -> &[(f64, f64)] {
        self.vf.jumps()
    }

    /// Absolutely continuous part as `(t0, t1, density)` runs.
    pub fn density_segments(&self) -> &[(f64, f64, f64)] {
        self.vf.segments()
    }
}

/// `μ_γ` for a test curve.
pub fn curve_measure(s: &MetricMeasureSpace, c: &TestCurve) -> CurveMeasure {
    CurveMeasure { vf: c.variation_function(s) }
}

/// Integrand for curve integrals: a value table on the space points, or a
/// function of embedded coordinates. Tables cannot be evaluated on moving
/// polyline parts or at off-grid coordinates.
pub enum Integrand<'a> {
    Table(&'a ScalarFunction),
    Coord(&'a dyn Fn(&[f64]) -> f64),
}

impl Integrand<'_> {
    /// Evaluate at a curve value. Coordinates equal (bitwise) to a space
    /// point's embedding count as that point.
    pub fn eval(&self, s: &MetricMeasureSpace, loc: &Loc) -> Result<f64> {
        match (self, loc) {
            (Integrand::Table(f), Loc::Point(i)) => Ok(f.at(*i)),
            (Integrand::Table(f), Loc::Coords(x)) => match s.point_of_coords(x) {
                Some(i) => Ok(f.at(i)),
                None => Err(Error::TableOverPolyline),
            },
            (Integrand::Coord(f), Loc::Point(i)) => {
                let row = s
                    .coords_row(*i)
                    .ok_or(Error::EmbeddingRequired("coordinate integrand"))?;
                Ok(f(row))
            }
            (Integrand::Coord(f), Loc::Coords(x)) => Ok(f(x)),
        }
    }
}

/// Forward curve integral `∫_γ f = ∫ f∘γ dμ_γ`: the atomic part charges the
/// arrival values `f(γ(t))` at each jump, the moving part integrates
/// `f(γ(τ)) · |γ'(τ)|` by quadrature.
pub fn integrate(s: &MetricMeasureSpace, c: &TestCurve, f: &Integrand) -> Result<f64> {
    if let Integrand::Table(table) = f {
        table.check_matches(s)?;
    }
    let vf = c.variation_function(s);
    let mut total = 0.0;
    for &(t, size) in vf.jumps() {
        let value = f.eval(s, &c.eval(t)?)?;
        total += mul_mass(value, size);
    }
    for p in c.pieces() {
        if let Piece::Polyline { times, vertices, .. } = p {
            for k in 0..times.len() - 1 {
                let len = euclidean(&vertices[k], &vertices[k + 1]);
                if len == 0.0 {
                    continue;
                }
                let g = match f {
                    Integrand::Table(_) => return Err(Error::TableOverPolyline),
                    Integrand::Coord(g) => g,
                };
                let (t0, t1) = (times[k], times[k + 1]);
                let speed = len / (t1 - t0);
                let (v0, v1) = (&vertices[k], &vertices[k + 1]);
                total += quad::integrate(
                    |tau| {
                        let lam = (tau - t0) / (t1 - t0);
                        let x: Vec<f64> = v0
                            .iter()
                            .zip(v1.iter())
                            .map(|(&p0, &p1)| p0 + lam * (p1 - p0))
                            .collect();
                        g(&x) * speed
                    },
                    t0,
                    t1,
                    QUAD_TOL,
                );
            }
        }
    }
    Ok(total)
}

/// Symmetrized curve integral `∫^S_γ f = ½(∫_γ f + ∫_γ⃖ f)`, evaluated by
/// actually reversing the curve. A jump therefore charges the arrival value
/// through `γ` and the departure value through `γ⃖`, half each.
pub fn sym_integrate(s: &MetricMeasureSpace, c: &TestCurve, f: &Integrand) -> Result<f64> {
    let forward = integrate(s, c, f)?;
    let backward = integrate(s, &c.reverse(s), f)?;
    Ok(0.5 * (forward + backward))
}

/// Exact-rational symmetrized integral for pure step curves and finite
/// tables. Every finite `f64` is a dyadic rational, so both one-sided sums
/// are formed in `BigRational` and averaged; `None` if the table carries an
/// infinite value on a charged point.
pub fn sym_integrate_exact(
    s: &MetricMeasureSpace,
    c: &TestCurve,
    f: &ScalarFunction,
) -> Result<Option<BigRational>> {
    if !c.is_step() {
        return Err(Error::StepCurvesOnly("exact symmetrized integration"));
    }
    f.check_matches(s)?;
    let forward = step_route_exact(s, c, f);
    let backward = step_route_exact(s, &c.reverse(s), f);
    Ok(match (forward, backward) {
        (Some(x), Some(y)) => Some((x + y) / BigRational::from_integer(2.into())),
        _ => None,
    })
}

/// One-sided exact sum `Σ f(γ(t)) φ_γ(t)` over the jumps of a step curve.
fn step_route_exact(
    s: &MetricMeasureSpace,
    c: &TestCurve,
    f: &ScalarFunction,
) -> Option<BigRational> {
    let mut sum = BigRational::from_integer(0.into());
    for (t, size) in c.jump_list(s) {
        let i = c.eval(t).ok()?.point_index()?;
        sum += rat(f.at(i))? * rat(size)?;
    }
    Some(sum)
}

/// The symmetrized occupation measure `μ^S_γ = ½(γ_# μ_γ + γ⃖_# μ_{γ⃖})` as a
/// measure on the space (and, for embedded curves, on the ambient space):
/// point atoms, off-grid coordinate atoms, and length mass along segments.
/// Total mass is `V(γ)`; a jump at `t` charges `γ(t)` and `γ(t⁻)` each half
/// the jump size.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    point_atoms: Vec<f64>,
    coord_atoms: Vec<(Vec<f64>, f64)>,
    segments: Vec<(Vec<f64>, Vec<f64>, f64)>,
}

impl PointMeasure {
    /// Atom mass at space point `i`.
    pub fn at_point(&self, i: usize) -> f64 {
        self.point_atoms[i]
    }

    /// Atom masses indexed by space point.
    pub fn point_atoms(&self) -> &[f64] {
        &self.point_atoms
    }

    /// Atoms at off-grid embedded coordinates, lexicographically sorted.
    pub fn coord_atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.coord_atoms
    }

    /// Length-measure mass per unordered segment `(lo, hi, mass)`.
    pub fn segments(&self) -> &[(Vec<f64>, Vec<f64>, f64)] {
        &self.segments
    }

    /// No moving mass: the measure is purely atomic.
    pub fn is_discrete(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.point_atoms.iter().sum::<f64>()
            + self.coord_atoms.iter().map(|(_, m)| m).sum::<f64>()
            + self.segments.iter().map(|(_, _, m)| m).sum::<f64>()
    }
}

struct RawMeasure {
    point_atoms: Vec<f64>,
    coord_atoms: Vec<(Vec<f64>, f64)>,
    segments: Vec<(Vec<f64>, Vec<f64>, f64)>,
}

fn deposit_half(s: &MetricMeasureSpace, c: &TestCurve, acc: &mut RawMeasure) {
    for (t, size) in c.jump_list(s) {
        let loc = c.eval(t).expect("jump times are in the domain");
        match canonical_loc(s, loc) {
            Loc::Point(i) => acc.point_atoms[i] += 0.5 * size,
            Loc::Coords(x) => acc.coord_atoms.push((x, 0.5 * size)),
        }
    }
    for p in c.pieces() {
        if let Piece::Polyline { vertices, .. } = p {
            for w in vertices.windows(2) {
                let len = euclidean(&w[0], &w[1]);
                if len > 0.0 {
                    let (lo, hi) = if w[0] <= w[1] {
                        (w[0].clone(), w[1].clone())
                    } else {
                        (w[1].clone(), w[0].clone())
                    };
                    acc.segments.push((lo, hi, 0.5 * len));
                }
            }
        }
    }
}

fn canonical_loc(s: &MetricMeasureSpace, loc: Loc) -> Loc {
    match loc {
        Loc::Coords(x) => match s.point_of_coords(&x) {
            Some(i) => Loc::Point(i),
            None => Loc::Coords(x),
        },
        p => p,
    }
}

/// `μ^S_γ`, assembled from the two pushforwards via `reverse`.
pub fn sym_measure(s: &MetricMeasureSpace, c: &TestCurve) -> PointMeasure {
    let mut acc = RawMeasure {
        point_atoms: vec![0.0; s.n()],
        coord_atoms: Vec::new(),
        segments: Vec::new(),
    };
    deposit_half(s, c, &mut acc);
    deposit_half(s, &c.reverse(s), &mut acc);

    let cmp = |x: &[f64], y: &[f64]| x.partial_cmp(y).expect("coordinates are finite");
    acc.coord_atoms.sort_by(|p, q| cmp(&p.0, &q.0));
    let mut coord_atoms: Vec<(Vec<f64>, f64)> = Vec::new();
    for (x, m) in acc.coord_atoms {
        match coord_atoms.last_mut() {
            Some((y, acc_m)) if *y == x => *acc_m += m,
            _ => coord_atoms.push((x, m)),
        }
    }
    acc.segments
        .sort_by(|p, q| cmp(&p.0, &q.0).then_with(|| cmp(&p.1, &q.1)));
    let mut segments: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    for (lo, hi, m) in acc.segments {
        match segments.last_mut() {
            Some((u, v, acc_m)) if *u == lo && *v == hi => *acc_m += m,
            _ => segments.push((lo, hi, m)),
        }
    }
    PointMeasure { point_atoms: acc.point_atoms, coord_atoms, segments }
}

/// The three parts of `∫^S_γ f` split at an interior time `t`:
/// the symmetrized integral over `γ|[a,t⁻]`, the bridge term
/// `½(f(γ(t⁻)) + f(γ(t))) · φ_γ(t)`, and the symmetrized integral over
/// `γ|[t,b]`. They sum to the whole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitIntegral {
    pub left: f64,
    pub bridge: f64,
    pub right: f64,
}

impl SplitIntegral {
    pub fn total(&self) -> f64 {
        self.left + self.bridge + self.right
    }
}

/// Split `∫^S_γ f` at `t ∈ (a,b)`.
pub fn decompose_at(
    s: &MetricMeasureSpace,
    c: &TestCurve,
    t: f64,
    f: &Integrand,
) -> Result<SplitIntegral> {
    let (a, b) = c.domain();
    if !(t > a && t < b) {
        return Err(Error::OutOfDomain { t, a, b });
    }
    let left = sym_integrate(s, &c.left_adjusted_restrict(s, a, t)?, f)?;
    let right = sym_integrate(s, &c.restrict(s, t, b)?, f)?;
    let size = c.jump(s, t)?;
    let pair = f.eval(s, &c.eval_left(t)?)? + f.eval(s, &c.eval(t)?)?;
    let bridge = 0.5 * mul_mass(pair, size);
    Ok(SplitIntegral { left, bridge, right })
}

/// Riemann sum `Σ_i d(γ(t_{i−1}), γ(t_i)) · f(γ(t_i))` over a partition of
/// the domain. Converges to `∫_γ f` along normal partition sequences when `f`
/// is continuous along the curve.
pub fn riemann_approx(
    s: &MetricMeasureSpace,
    c: &TestCurve,
    f: &Integrand,
    p: &Partition,
) -> Result<f64> {
    let (a, b) = c.domain();
    let times = p.times();
    if times[0] != a || *times.last().unwrap() != b {
        return Err(Error::Partition(format!(
            "partition must span [{a}, {b}], got [{}, {}]",
            times[0],
            times.last().unwrap()
        )));
    }
    let mut sum = 0.0;
    let mut prev = c.eval(times[0])?;
    for &t in &times[1..] {
        let cur = c.eval(t)?;
        let step = dist_loc(s, &prev, &cur);
        sum += mul_mass(f.eval(s, &cur)?, step);
        prev = cur;
    }
    Ok(sum)
}

/// Which side of `t` a tail sequence approaches from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Left,
    Right,
}

/// Symmetrized integrals of `f` over the shrinking tails `[r_n, t)` (left)
/// or `[t, r_n)` plus the closing bridge at `r_n` (right). The times must
/// approach `t` strictly monotonically from the stated side.
pub fn tail_sequence(
    s: &MetricMeasureSpace,
    c: &TestCurve,
    f: &Integrand,
    t: f64,
    side: TailSide,
    times: &[f64],
) -> Result<Vec<f64>> {
    let (a, b) = c.domain();
    if times.is_empty() {
        return Err(Error::EmptySet("tail time sequence"));
    }
    let mut out = Vec::with_capacity(times.len());
    match side {
        TailSide::Left => {
            if !(t > a && t <= b) {
                return Err(Error::OutOfDomain { t, a, b });
            }
            if times.windows(2).any(|w| w[0] >= w[1]) || *times.last().unwrap() >= t {
                return Err(Error::NotMonotone(t));
            }
            if times[0] < a {
                return Err(Error::OutOfDomain { t: times[0], a, b });
            }
            for &r in times {
                out.push(sym_integrate(s, &c.left_adjusted_restrict(s, r, t)?, f)?);
            }
        }
        TailSide::Right => {
            if !(t >= a && t < b) {
                return Err(Error::OutOfDomain { t, a, b });
            }
            if times.windows(2).any(|w| w[0] <= w[1]) || *times.last().unwrap() <= t {
                return Err(Error::NotMonotone(t));
            }
            if times[0] > b {
                return Err(Error::OutOfDomain { t: times[0], a, b });
            }
            for &r in times {
                let body = sym_integrate(s, &c.left_adjusted_restrict(s, t, r)?, f)?;
                let size = if r < b { c.jump(s, r)? } else { 0.0 };
                let pair = f.eval(s, &c.eval_left(r)?)? + f.eval(s, &c.eval(r)?)?;
                out.push(body + 0.5 * mul_mass(pair, size));
            }
        }
    }
    Ok(out)
}

/// Whether the tail sequence has vanished: its final value is below
/// [`TAIL_TOL`] in absolute value.
pub fn tail_vanishes(
    s: &MetricMeasureSpace,
    c: &TestCurve,
    f: &Integrand,
    t: f64,
    side: TailSide,
    times: &[f64],
) -> Result<bool> {
    let seq = tail_sequence(s, c, f, t, side, times)?;
    Ok(seq.last().unwrap().abs() < TAIL_TOL)
}
