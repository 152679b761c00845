//! Test curves: right-continuous bounded-variation curves `γ: [a,b] → X` with
//! left limits everywhere and left-continuity at `b`.
//!
//! A curve is an ordered list of pieces. A `Step` piece holds a point index
//! and is constant on `[start, next-start)`; a `Polyline` piece holds embedded
//! vertices with per-vertex times and is continuous on its interval. Values
//! are right-continuous: at a piece boundary the curve takes the value of the
//! piece beginning there, and the previous piece supplies the left limit.
//! The final piece extends to `b`, which is exactly left-continuity at `b`.
//!
//! Everything here is exact given the representation: the variation is a
//! finite sum of jump distances and segment lengths, jumps are discrete
//! bookkeeping (piece boundaries are compared with `==`, constructed rather
//! than computed), and reversal and restriction are structural maps.

use crate::space::{euclidean, MetricMeasureSpace};
use crate::{Error, Result};

/// One piece of a test curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// Constant at `point` on `[start, next-start)` (closed at `b` when last).
    Step { start: f64, point: usize },
    /// Continuous piecewise-linear path through `vertices` at `times`,
    /// covering `[start, end)`; its terminal vertex is the left limit at
    /// `end`. Requires the space to carry a Euclidean embedding.
    Polyline {
        start: f64,
        end: f64,
        times: Vec<f64>,
        vertices: Vec<Vec<f64>>,
    },
}

impl Piece {
    pub fn start(&self) -> f64 {
        match self {
            Piece::Step { start, .. } => *start,
            Piece::Polyline { start, .. } => *start,
        }
    }
}

/// Value of a curve at a time: a space point or an embedded coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Loc {
    Point(usize),
    Coords(Vec<f64>),
}

impl Loc {
    pub fn point_index(&self) -> Option<usize> {
        match self {
            Loc::Point(i) => Some(*i),
            Loc::Coords(_) => None,
        }
    }
}

/// Distance between two curve values. Index pairs read the distance matrix;
/// anything involving coordinates is Euclidean (the embedding is validated
/// against the matrix at space construction).
pub fn dist_loc(s: &MetricMeasureSpace, u: &Loc, v: &Loc) -> f64 {
    match (u, v) {
        (Loc::Point(i), Loc::Point(j)) => s.d(*i, *j),
        _ => {
            let cu = loc_coords(s, u);
            let cv = loc_coords(s, v);
            euclidean(&cu, &cv)
        }
    }
}

fn loc_coords(s: &MetricMeasureSpace, u: &Loc) -> Vec<f64> {
    match u {
        Loc::Point(i) => s
            .coords_row(*i)
            .expect("coordinate value exists only in embedded spaces")
            .to_vec(),
        Loc::Coords(c) => c.clone(),
    }
}

/// Partition `a = t_0 < … < t_n = b` of an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    times: Vec<f64>,
}

impl Partition {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Partition("need at least two times".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Partition("times must be finite".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Partition("times must be strictly increasing".into()));
        }
        Ok(Self { times })
    }

    /// Uniform partition of `[a,b]` into `m` intervals.
    pub fn uniform(a: f64, b: f64, m: usize) -> Result<Self> {
        if m == 0 || !(a < b) {
            return Err(Error::Partition("need m >= 1 and a < b".into()));
        }
        let mut times: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
        times[0] = a;
        times[m] = b;
        Self::new(times)
    }

    /// Refinement by extra times (duplicates and out-of-range times dropped).
    pub fn refine_with(&self, extra: &[f64]) -> Partition {
        let (a, b) = (self.times[0], *self.times.last().unwrap());
        let mut times = self.times.clone();
        times.extend(extra.iter().copied().filter(|t| *t > a && *t < b));
        times.sort_by(|x, y| x.partial_cmp(y).unwrap());
        times.dedup();
        Partition { times }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Mesh `|Δ| = max (t_i − t_{i−1})`.
    pub fn diameter(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// A test curve. Immutable; construction canonicalizes (adjacent equal steps
/// merged, function-preserving redundant polyline vertices dropped) so that
/// structural equality is canonical-form equality.
#[derive(Debug, Clone, PartialEq)]
pub struct TestCurve {
    domain: (f64, f64),
    pieces: Vec<Piece>,
}

impl TestCurve {
    pub fn new(s: &MetricMeasureSpace, domain: (f64, f64), pieces: Vec<Piece>) -> Result<Self> {
        let (a, b) = domain;
        if !a.is_finite() || !b.is_finite() || !(a < b) {
            return Err(Error::Curve(format!("domain [{a}, {b}] must be a nondegenerate interval")));
        }
        if pieces.is_empty() {
            return Err(Error::Curve("curve needs at least one piece".into()));
        }
        if pieces[0].start() != a {
            return Err(Error::Curve(format!(
                "first piece starts at {} but the domain starts at {a}",
                pieces[0].start()
            )));
        }
        for w in pieces.windows(2) {
            if !(w[0].start() < w[1].start()) {
                return Err(Error::Curve("piece starts must be strictly increasing".into()));
            }
        }
        for (i, p) in pieces.iter().enumerate() {
            let next_start = if i + 1 < pieces.len() { Some(pieces[i + 1].start()) } else { None };
            match p {
                Piece::Step { start, point } => {
                    if !start.is_finite() || *start >= b {
                        return Err(Error::Curve(format!(
                            "step piece at {start} must start inside [{a}, {b})"
                        )));
                    }
                    if *point >= s.n() {
                        return Err(Error::Curve(format!(
                            "step piece references point {point} but the space has {} points",
                            s.n()
                        )));
                    }
                }
                Piece::Polyline { start, end, times, vertices } => {
                    let dim = s.embedding_dim().ok_or(Error::EmbeddingRequired("polyline pieces"))?;
                    if !(start < end) {
                        return Err(Error::Curve("polyline needs start < end".into()));
                    }
                    let expected_end = next_start.unwrap_or(b);
                    if *end != expected_end {
                        return Err(Error::Curve(format!(
                            "polyline ends at {end} but the next piece starts at {expected_end}"
                        )));
                    }
                    if times.len() < 2 || times.len() != vertices.len() {
                        return Err(Error::Curve(
                            "polyline needs matching times and vertices, at least two".into(),
                        ));
                    }
                    if times[0] != *start || *times.last().unwrap() != *end {
                        return Err(Error::Curve("polyline times must span [start, end]".into()));
                    }
                    if times.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::Curve("polyline times must be strictly increasing".into()));
                    }
                    if times.iter().any(|t| !t.is_finite()) {
                        return Err(Error::Curve("polyline times must be finite".into()));
                    }
                    for v in vertices {
                        if v.len() != dim {
                            return Err(Error::Curve(format!(
                                "polyline vertex has dimension {} but the embedding has {dim}",
                                v.len()
                            )));
                        }
                        if v.iter().any(|x| !x.is_finite()) {
                            return Err(Error::Curve("polyline vertices must be finite".into()));
                        }
                    }
                }
            }
        }
        Ok(Self { domain, pieces: canonicalize(pieces) })
    }

    /// Step curve from `(start, point)` pairs on `domain`.
    pub fn step(
        s: &MetricMeasureSpace,
        domain: (f64, f64),
        steps: &[(f64, usize)],
    ) -> Result<Self> {
        let pieces = steps
            .iter()
            .map(|&(start, point)| Piece::Step { start, point })
            .collect();
        Self::new(s, domain, pieces)
    }

    /// The canonical two-point curve `x·1_[0,½) + y·1_[½,1]` on `[0,1]`.
    pub fn two_point(s: &MetricMeasureSpace, x: usize, y: usize) -> Result<Self> {
        Self::step(s, (0.0, 1.0), &[(0.0, x), (0.5, y)])
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p, Piece::Step { .. }))
    }

    fn piece_end(&self, i: usize) -> f64 {
        if i + 1 < self.pieces.len() {
            self.pieces[i + 1].start()
        } else {
            self.domain.1
        }
    }

    fn check_in_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain;
        if !(t >= a && t <= b) {
            return Err(Error::OutOfDomain { t, a, b });
        }
        Ok(())
    }

    /// `γ(t)`, right-continuous value.
    pub fn eval(&self, t: f64) -> Result<Loc> {
        self.check_in_domain(t)?;
        let idx = self.pieces.partition_point(|p| p.start() <= t) - 1;
        Ok(self.eval_piece(idx, t))
    }

    /// `γ(t⁻)` for `t ∈ (a, b]`: the value carried by the piece active
    /// immediately before `t`.
    pub fn eval_left(&self, t: f64) -> Result<Loc> {
        let (a, b) = self.domain;
        if !(t > a && t <= b) {
            return Err(Error::OutOfDomain { t, a, b });
        }
        let idx = self.pieces.partition_point(|p| p.start() < t) - 1;
        match &self.pieces[idx] {
            Piece::Step { point, .. } => Ok(Loc::Point(*point)),
            // Polylines are continuous on (start, end], so the left limit is
            // the value itself.
            Piece::Polyline { times, vertices, .. } => Ok(interp(times, vertices, t)),
        }
    }

    fn eval_piece(&self, idx: usize, t: f64) -> Loc {
        match &self.pieces[idx] {
            Piece::Step { point, .. } => Loc::Point(*point),
            Piece::Polyline { times, vertices, .. } => interp(times, vertices, t),
        }
    }

    /// Jump `φ_γ(t) = d(γ(t⁻), γ(t))` for `t ∈ (a, b]`. Zero at continuity
    /// points and at `b` (left-continuity).
    pub fn jump(&self, s: &MetricMeasureSpace, t: f64) -> Result<f64> {
        Ok(dist_loc(s, &self.eval_left(t)?, &self.eval(t)?))
    }

    /// All `(time, size)` with a positive jump, in time order. Jumps occur
    /// only at piece starts, so this is exact.
    pub fn jump_list(&self, s: &MetricMeasureSpace) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 1..self.pieces.len() {
            let t = self.pieces[i].start();
            let size = dist_loc(
                s,
                &self.eval_left(t).expect("piece start is interior"),
                &self.eval_piece(i, t),
            );
            if size > 0.0 {
                out.push((t, size));
            }
        }
        out
    }

    /// `V^Δ(γ) = Σ d(γ(t_i), γ(t_{i−1}))`.
    pub fn delta_variation(&self, s: &MetricMeasureSpace, p: &Partition) -> Result<f64> {
        let (a, b) = self.domain;
        let times = p.times();
        if times[0] != a || *times.last().unwrap() != b {
            return Err(Error::Partition(format!(
                "partition must span [{a}, {b}], got [{}, {}]",
                times[0],
                times.last().unwrap()
            )));
        }
        let mut sum = 0.0;
        let mut prev = self.eval(times[0])?;
        for &t in &times[1..] {
            let cur = self.eval(t)?;
            sum += dist_loc(s, &prev, &cur);
            prev = cur;
        }
        Ok(sum)
    }

    /// Exact total variation: jump distances plus polyline segment lengths.
    /// Equal to the supremum of `delta_variation` over all partitions.
    pub fn variation(&self, s: &MetricMeasureSpace) -> f64 {
        let mut v: f64 = self.jump_list(s).iter().map(|&(_, sz)| sz).sum();
        for p in &self.pieces {
            if let Piece::Polyline { vertices, .. } = p {
                for w in vertices.windows(2) {
                    v += euclidean(&w[0], &w[1]);
                }
            }
        }
        v
    }

    /// The variation function `V_γ(t) = V(γ|[a,t])`.
    pub fn variation_function(&self, s: &MetricMeasureSpace) -> VariationFunction {
        let mut jumps = self.jump_list(s);
        jumps.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut segs = Vec::new();
        let mut seg_cum = Vec::new();
        let mut cum = 0.0;
        for p in &self.pieces {
            if let Piece::Polyline { times, vertices, .. } = p {
                for k in 0..times.len() - 1 {
                    let len = euclidean(&vertices[k], &vertices[k + 1]);
                    if len > 0.0 {
                        let dt = times[k + 1] - times[k];
                        segs.push((times[k], times[k + 1], len / dt));
                        seg_cum.push(cum);
                        cum += len;
                    }
                }
            }
        }
        VariationFunction {
            domain: self.domain,
            jumps,
            segs,
            seg_cum,
        }
    }

    /// The reversal `γ⃖(t) = γ((a+b−t)⁻)` (with `γ(a⁻) := γ(a)`). Jump times
    /// reflect through `t ↦ a+b−t` with equal sizes; variation is preserved.
    pub fn reverse(&self, s: &MetricMeasureSpace) -> TestCurve {
        let (a, b) = self.domain;
        let k = a + b;
        let map = |x: f64| if x == a { b } else if x == b { a } else { k - x };
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.iter().enumerate().rev() {
            let e = self.piece_end(i);
            match p {
                Piece::Step { point, .. } => out.push(Piece::Step { start: map(e), point: *point }),
                Piece::Polyline { start, end, times, vertices } => {
                    let nt: Vec<f64> = times.iter().rev().map(|&t| map(t)).collect();
                    let nv: Vec<Vec<f64>> = vertices.iter().rev().cloned().collect();
                    out.push(Piece::Polyline {
                        start: map(*end),
                        end: map(*start),
                        times: nt,
                        vertices: nv,
                    });
                }
            }
        }
        let rev = TestCurve { domain: (a, b), pieces: canonicalize(out) };
        debug_assert!(TestCurve::new(s, (a, b), rev.pieces.clone()).is_ok());
        rev
    }

    fn clip(&self, r: f64, t: f64) -> Vec<Piece> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = p.start().max(r);
            let hi = self.piece_end(i).min(t);
            if !(lo < hi) {
                continue;
            }
            match p {
                Piece::Step { point, .. } => out.push(Piece::Step { start: lo, point: *point }),
                Piece::Polyline { times, vertices, .. } => {
                    out.push(sub_polyline(times, vertices, lo, hi));
                }
            }
        }
        out
    }

    /// Restriction `γ|[r,t]`. Requires `t` to be a continuity point or `b`,
    /// otherwise the restriction would fail left-continuity at its right
    /// endpoint and leave the curve class.
    pub fn restrict(&self, s: &MetricMeasureSpace, r: f64, t: f64) -> Result<TestCurve> {
        let (a, b) = self.domain;
        if !(r >= a && t <= b && r < t) {
            return Err(Error::BadInterval { r, t });
        }
        if t < b && self.jump(s, t)? > 0.0 {
            return Err(Error::RestrictAtJump(t));
        }
        Ok(TestCurve { domain: (r, t), pieces: canonicalize(self.clip(r, t)) })
    }

    /// Left-adjusted restriction `γ|[r,t⁻]`: on `[r,t)` it is `γ`, and its
    /// value at `t` is the left limit `γ(t⁻)`. Defined at every `t ∈ (r, b]`;
    /// agrees with `restrict` when `γ` is continuous at `t`.
    pub fn left_adjusted_restrict(&self, s: &MetricMeasureSpace, r: f64, t: f64) -> Result<TestCurve> {
        let (a, b) = self.domain;
        let _ = s;
        if !(r >= a && t <= b && r < t) {
            return Err(Error::BadInterval { r, t });
        }
        Ok(TestCurve { domain: (r, t), pieces: canonicalize(self.clip(r, t)) })
    }

    /// Affine pushforward onto `target`: the curve `γ ∘ ψ` where
    /// `ψ: target → [a,b]` is the increasing affine bijection. Variation and
    /// curve integrals are invariant; reversal commutes with this map.
    pub fn reparametrize(&self, s: &MetricMeasureSpace, target: (f64, f64)) -> Result<TestCurve> {
        let (a, b) = self.domain;
        let (c, d) = target;
        if !c.is_finite() || !d.is_finite() || !(c < d) {
            return Err(Error::BadInterval { r: c, t: d });
        }
        let scale = (d - c) / (b - a);
        let map = |x: f64| if x == a { c } else if x == b { d } else { c + (x - a) * scale };
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Step { start, point } => Piece::Step { start: map(*start), point: *point },
                Piece::Polyline { start, end, times, vertices } => Piece::Polyline {
                    start: map(*start),
                    end: map(*end),
                    times: times.iter().map(|&t| map(t)).collect(),
                    vertices: vertices.clone(),
                },
            })
            .collect();
        // Re-validate: an extreme shrink can collapse neighboring times.
        TestCurve::new(s, (c, d), pieces)
    }

    /// Arc-length reparametrization `γ̃` on `[0, V(γ)]` with `γ = γ̃ ∘ V_γ`
    /// and unit speed. Requires a continuous curve of positive variation;
    /// plateaus (zero-length stretches) collapse, matching
    /// `h(t) = inf V_γ⁻¹[{t}]`.
    pub fn arc_length_parametrize(&self, s: &MetricMeasureSpace) -> Result<TestCurve> {
        for i in 1..self.pieces.len() {
            let t = self.pieces[i].start();
            if self.jump(s, t)? > 0.0 {
                return Err(Error::NotContinuous(t));
            }
        }
        let mut times = vec![0.0];
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let start_loc = self.eval(self.domain.0)?;
        vertices.push(loc_coords(s, &start_loc));
        let mut cum = 0.0;
        for p in &self.pieces {
            if let Piece::Polyline { vertices: vs, .. } = p {
                for w in vs.windows(2) {
                    let len = euclidean(&w[0], &w[1]);
                    if len > 0.0 {
                        cum += len;
                        times.push(cum);
                        vertices.push(w[1].clone());
                    }
                }
            }
        }
        if cum <= 0.0 {
            return Err(Error::ZeroVariation);
        }
        TestCurve::new(
            s,
            (0.0, cum),
            vec![Piece::Polyline { start: 0.0, end: cum, times, vertices }],
        )
    }

    /// Times where the structure changes: piece starts, polyline vertex
    /// times, and both domain endpoints. A partition through these points
    /// computes the variation exactly.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![self.domain.0];
        for p in &self.pieces {
            match p {
                Piece::Step { start, .. } => out.push(*start),
                Piece::Polyline { times, .. } => out.extend_from_slice(times),
            }
        }
        out.push(self.domain.1);
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }
}

fn interp(times: &[f64], vertices: &[Vec<f64>], t: f64) -> Loc {
    let k = times.partition_point(|&x| x <= t);
    if k == times.len() {
        return Loc::Coords(vertices.last().unwrap().clone());
    }
    let k = k - 1;
    if t == times[k] {
        return Loc::Coords(vertices[k].clone());
    }
    let theta = (t - times[k]) / (times[k + 1] - times[k]);
    let v = vertices[k]
        .iter()
        .zip(vertices[k + 1].iter())
        .map(|(x, y)| x + theta * (y - x))
        .collect();
    Loc::Coords(v)
}

fn sub_polyline(times: &[f64], vertices: &[Vec<f64>], lo: f64, hi: f64) -> Piece {
    let mut nt = vec![lo];
    let mut nv = vec![match interp(times, vertices, lo) {
        Loc::Coords(c) => c,
        Loc::Point(_) => unreachable!(),
    }];
    for (t, v) in times.iter().zip(vertices.iter()) {
        if *t > lo && *t < hi {
            nt.push(*t);
            nv.push(v.clone());
        }
    }
    nt.push(hi);
    nv.push(match interp(times, vertices, hi) {
        Loc::Coords(c) => c,
        Loc::Point(_) => unreachable!(),
    });
    Piece::Polyline { start: lo, end: hi, times: nt, vertices: nv }
}

/// Canonical form: merge adjacent steps on the same point and drop polyline
/// vertices that are interior to an exact plateau (the only function-
/// preserving vertex removal). Plateaus themselves are kept: removing one
/// would change the curve as a function of time.
fn canonicalize(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        let p = match p {
            Piece::Polyline { start, end, times, vertices } => {
                let mut nt = Vec::with_capacity(times.len());
                let mut nv: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
                for i in 0..times.len() {
                    if i > 0
                        && i + 1 < times.len()
                        && vertices[i] == vertices[i - 1]
                        && vertices[i] == vertices[i + 1]
                    {
                        continue;
                    }
                    nt.push(times[i]);
                    nv.push(vertices[i].clone());
                }
                Piece::Polyline { start, end, times: nt, vertices: nv }
            }
            step => step,
        };
        match (out.last(), &p) {
            (Some(Piece::Step { point: q, .. }), Piece::Step { point: r, .. }) if q == r => {}
            _ => out.push(p),
        }
    }
    out
}

/// The nondecreasing right-continuous function `V_γ(t)`, stored as its jump
/// list plus constant-speed segments from polyline pieces.
#[derive(Debug, Clone)]
pub struct VariationFunction {
    domain: (f64, f64),
    jumps: Vec<(f64, f64)>,
    segs: Vec<(f64, f64, f64)>,
    seg_cum: Vec<f64>,
}

impl VariationFunction {
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// `V_γ(t)`; right-continuous, so a jump at `t` is already included.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let j = self.jumps.partition_point(|&(x, _)| x <= t);
        Ok(self.jumps[..j].iter().map(|&(_, sz)| sz).sum::<f64>() + self.seg_part(t))
    }

    /// `V_γ(t⁻)` (and `V_γ(a⁻) = 0`).
    pub fn left_value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let j = self.jumps.partition_point(|&(x, _)| x < t);
        Ok(self.jumps[..j].iter().map(|&(_, sz)| sz).sum::<f64>() + self.seg_part(t))
    }

    pub fn total(&self) -> f64 {
        self.value(self.domain.1).expect("b is in the domain")
    }

    /// Jump of `V_γ` at `t`; equals the curve's jump there.
    pub fn jump_at(&self, t: f64) -> f64 {
        match self.jumps.binary_search_by(|&(x, _)| x.partial_cmp(&t).unwrap()) {
            Ok(i) => self.jumps[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// `(t0, t1, speed)` segments of the absolutely continuous part.
    pub fn segments(&self) -> &[(f64, f64, f64)] {
        &self.segs
    }

    fn seg_part(&self, t: f64) -> f64 {
        let k = self.segs.partition_point(|&(t0, _, _)| t0 <= t);
        if k == 0 {
            return 0.0;
        }
        let (t0, t1, speed) = self.segs[k - 1];
        self.seg_cum[k - 1] + speed * (t.min(t1) - t0)
    }

    fn check(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain;
        if !(t >= a && t <= b) {
            return Err(Error::OutOfDomain { t, a, b });
        }
        Ok(())
    }
}
