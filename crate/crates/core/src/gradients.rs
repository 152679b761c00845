//! Hajłasz and upper-S-gradient machinery.
//!
//! A nonnegative table `g` is a *Hajłasz gradient* of `f` when
//! `|f(y) − f(x)| ≤ (g(x) + g(y))·d(x, y)` for every pair outside a null set,
//! and an *upper S-gradient* when `|f(γ(1)) − f(γ(0))| ≤ ∫^S_γ g` along every
//! nontrivial test curve. This module provides the pointwise checks, the
//! minimal-gradient solvers, the McShane extension, and the pipelines that
//! verify the transfer theorems between the two notions with their explicit
//! constants: an upper S-gradient halves into a Hajłasz gradient, a bounded
//! Hajłasz gradient scales by 18 into an upper S-gradient, and an unbounded
//! one by 76 via dyadic truncation.
//!
//! Every check takes an explicit absolute tolerance; [`CHECK_TOL`] is the
//! default used by the CLI and the verification suites.

use crate::curve::{Piece, TestCurve};
use crate::ext::{abs_diff, leq_slack, mul_mass, INF};
use crate::modulus::{modulus, row_integral, CurveFamily, TestPlan, NULL_TOL};
use crate::solver::{solve, ConvexProgram};
use crate::space::{lp_norm, MetricMeasureSpace, ScalarFunction};
use crate::stieltjes::{sym_integrate, Integrand};
use crate::{Error, Result};

/// Default absolute slack for every inequality check in this module.
pub const CHECK_TOL: f64 = 1e-9;

/// What a violation points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// Pointwise pair inequality at `(x, y)`.
    Pair(usize, usize),
    /// Pointwise bound at a single point.
    Point(usize),
    /// Arena curve, by index.
    Curve(usize),
    /// Test plan, by index.
    Plan(usize),
    /// Pair inequality at truncation level `k`.
    TruncationPair { k: u32, x: usize, y: usize },
    /// Pointwise bound at truncation level `k`.
    TruncationPoint { k: u32, x: usize },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Witness::Pair(x, y) => write!(f, "pair {x}-{y}"),
            Witness::Point(x) => write!(f, "point {x}"),
            Witness::Curve(i) => write!(f, "curve {i}"),
            Witness::Plan(i) => write!(f, "plan {i}"),
            Witness::TruncationPair { k, x, y } => write!(f, "level {k} pair {x}-{y}"),
            Witness::TruncationPoint { k, x } => write!(f, "level {k} point {x}"),
        }
    }
}

/// One failed inequality: `lhs > rhs + tolerance`.
#[derive(Debug, Clone)]
pub struct Violation {
    pub witness: Witness,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// By how much the inequality fails.
    pub fn deficit(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Outcome of an inequality check over an arena of pairs, curves or plans.
#[derive(Debug, Clone, Default)]
pub struct ViolationReport {
    /// Failing witnesses, in arena order.
    pub violations: Vec<Violation>,
    /// `Mod^p` of the violating curve subfamily, when the arena is a curve
    /// family and the caller asked for it.
    pub violator_modulus: Option<f64>,
}

impl ViolationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// How a pipeline run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineOutcome {
    /// Hypothesis and conclusion both hold.
    Ok,
    /// The input pair fails the pipeline's hypothesis; nothing is claimed
    /// about the conclusion.
    PreconditionFailed,
    /// Hypothesis holds but a claimed inequality fails.
    TheoremViolated,
}

impl PipelineOutcome {
    pub fn is_ok(self) -> bool {
        matches!(self, PipelineOutcome::Ok)
    }
}

fn ensure_gradient_pair(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
) -> Result<()> {
    f.check_matches(s)?;
    g.check_matches(s)?;
    if !g.is_nonnegative() {
        return Err(Error::Function("gradient table must be nonnegative".into()));
    }
    Ok(())
}

fn point_mask(n: usize, points: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &x in points {
        if x >= n {
            return Err(Error::Function(format!(
                "point index {x} out of range for a {n}-point space"
            )));
        }
        mask[x] = true;
    }
    Ok(mask)
}

/// Checks `|f(y) − f(x)| ≤ (g(x) + g(y))·d(x, y)` for every pair outside
/// `except`. On validated spaces the only null set is empty, so `except` is
/// normally `&[]`; it exists for experiments with zero-weight points on
/// unchecked spaces.
pub fn hajlasz_check(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    except: &[usize],
    tol: f64,
) -> Result<ViolationReport> {
    ensure_gradient_pair(s, f, g)?;
    let excluded = point_mask(s.n(), except)?;
    let mut violations = Vec::new();
    for x in 0..s.n() {
        if excluded[x] {
            continue;
        }
        for y in (x + 1)..s.n() {
            if excluded[y] {
                continue;
            }
            let lhs = abs_diff(f.at(x), f.at(y));
            let rhs = mul_mass(g.at(x) + g.at(y), s.d(x, y));
            if !leq_slack(lhs, rhs, tol) {
                violations.push(Violation { witness: Witness::Pair(x, y), lhs, rhs });
            }
        }
    }
    Ok(ViolationReport { violations, violator_modulus: None })
}

/// Minimal-`L^p` Hajłasz gradient: solves `min Σ_x m(x) g(x)^p` over `g ≥ 0`
/// subject to `g(x) + g(y) ≥ |f(x) − f(y)| / d(x, y)` for every pair, and
/// returns the minimizer together with its `L^p` norm.
pub fn minimal_hajlasz(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    p: f64,
) -> Result<(ScalarFunction, f64)> {
    f.check_matches(s)?;
    if !f.is_finite() {
        return Err(Error::Function(
            "minimal Hajłasz gradient requires finite f".into(),
        ));
    }
    let n = s.n();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let diff = (f.at(x) - f.at(y)).abs();
            if diff == 0.0 {
                continue;
            }
            let mut row = vec![0.0; n];
            row[x] = 1.0;
            row[y] = 1.0;
            rows.push(row);
            rhs.push(diff / s.d(x, y));
        }
    }
    if rows.is_empty() {
        return Ok((ScalarFunction::constant(n, 0.0), 0.0));
    }
    let prog = ConvexProgram::new(s.weights().to_vec(), rows, rhs)?;
    let report = solve(&prog, p)?;
    let norm = report.value.powf(1.0 / p);
    Ok((ScalarFunction::new(report.density)?, norm))
}

/// Endpoint difference `|f(γ(b)) − f(γ(a))|` of a step curve.
fn endpoint_diff(f: &ScalarFunction, c: &TestCurve) -> Result<f64> {
    let (a, b) = c.domain();
    let x = c.eval(a)?.point_index().expect("step curves evaluate to points");
    let y = c.eval(b)?.point_index().expect("step curves evaluate to points");
    Ok(abs_diff(f.at(x), f.at(y)))
}

/// Curves of `fam` whose endpoint difference exceeds their symmetrized
/// integral of `g`.
fn endpoint_violations(
    f: &ScalarFunction,
    g: &ScalarFunction,
    fam: &CurveFamily,
    tol: f64,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (i, c) in fam.curves().iter().enumerate() {
        let lhs = endpoint_diff(f, c)?;
        let rhs = row_integral(&fam.rows()[i], g.values());
        if !leq_slack(lhs, rhs, tol) {
            out.push(Violation { witness: Witness::Curve(i), lhs, rhs });
        }
    }
    Ok(out)
}

/// Strict upper-S-gradient check: `|f(γ(1)) − f(γ(0))| ≤ ∫^S_γ g` for every
/// member of the family.
pub fn upper_s_check(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    fam: &CurveFamily,
    tol: f64,
) -> Result<ViolationReport> {
    ensure_gradient_pair(s, f, g)?;
    Ok(ViolationReport {
        violations: endpoint_violations(f, g, fam, tol)?,
        violator_modulus: None,
    })
}

/// An exceptional subfamily of the arena: member indices and its `Mod^p`.
#[derive(Debug, Clone)]
pub struct ExceptionalFamily {
    pub members: Vec<usize>,
    pub modulus: f64,
}

/// Outcome of the p-weak check together with the three exceptional families.
#[derive(Debug, Clone)]
pub struct WeakUpperSReport {
    /// Endpoint violations (`Witness::Curve`), with the modulus of the
    /// violating subfamily filled in.
    pub report: ViolationReport,
    /// Whether the violating subfamily is `Mod^p`-null.
    pub is_weak_gradient: bool,
    /// Members whose symmetrized integral of `g` is infinite.
    pub gamma1: ExceptionalFamily,
    /// Members violating the inequality between some pair of interior times,
    /// evaluated through left-adjusted restrictions.
    pub gamma2: ExceptionalFamily,
    /// Members with a single jump violating
    /// `|f(γ(t⁻)) − f(γ(t))| ≤ ½(g(γ(t⁻)) + g(γ(t)))·d`.
    pub gamma3: ExceptionalFamily,
}

/// p-weak upper-S-gradient check over a step-curve arena: computes the
/// violating subfamily and accepts iff its modulus is below the null
/// threshold. The three exceptional families are evaluated independently —
/// `gamma2` integrates over restricted curves, `gamma3` reads the jump data
/// directly — so their agreement on jump-only curves is itself checkable.
pub fn weak_upper_s_check(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    fam: &CurveFamily,
    p: f64,
    tol: f64,
) -> Result<WeakUpperSReport> {
    ensure_gradient_pair(s, f, g)?;
    let violations = endpoint_violations(f, g, fam, tol)?;
    let violators: Vec<usize> = violations
        .iter()
        .map(|v| match v.witness {
            Witness::Curve(i) => i,
            _ => unreachable!("endpoint violations carry curve witnesses"),
        })
        .collect();
    let violator_modulus = subfamily_modulus(s, fam, &violators, p)?;

    let mut gamma1 = Vec::new();
    let mut gamma2 = Vec::new();
    let mut gamma3 = Vec::new();
    for (i, c) in fam.curves().iter().enumerate() {
        if row_integral(&fam.rows()[i], g.values()).is_infinite() {
            gamma1.push(i);
        }
        if in_gamma2(s, f, g, c, tol)? {
            gamma2.push(i);
        }
        if in_gamma3(s, f, g, c, tol) {
            gamma3.push(i);
        }
    }
    let m1 = subfamily_modulus(s, fam, &gamma1, p)?;
    let m2 = subfamily_modulus(s, fam, &gamma2, p)?;
    let m3 = subfamily_modulus(s, fam, &gamma3, p)?;
    Ok(WeakUpperSReport {
        is_weak_gradient: violator_modulus < NULL_TOL,
        report: ViolationReport { violations, violator_modulus: Some(violator_modulus) },
        gamma1: ExceptionalFamily { members: gamma1, modulus: m1 },
        gamma2: ExceptionalFamily { members: gamma2, modulus: m2 },
        gamma3: ExceptionalFamily { members: gamma3, modulus: m3 },
    })
}

/// `Mod^p` of the subfamily picked out by `indices` (zero when empty).
fn subfamily_modulus(
    s: &MetricMeasureSpace,
    fam: &CurveFamily,
    indices: &[usize],
    p: f64,
) -> Result<f64> {
    if indices.is_empty() {
        return Ok(0.0);
    }
    let curves: Vec<TestCurve> = indices.iter().map(|&i| fam.curves()[i].clone()).collect();
    let sub = CurveFamily::new(s, curves)?;
    Ok(modulus(s, &sub, p)?.value)
}

/// Whether some pair of times `r < t` has `γ(r) ≠ γ(t⁻)` and
/// `|f(γ(r)) − f(γ(t⁻))| > ∫^S g` over the left-adjusted restriction to
/// `[r, t]`. Both sides are constant between piece boundaries, so the
/// piece-start grid plus the right endpoint is exhaustive.
fn in_gamma2(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    c: &TestCurve,
    tol: f64,
) -> Result<bool> {
    let (_, b) = c.domain();
    let mut grid: Vec<f64> = c.pieces().iter().map(Piece::start).collect();
    grid.push(b);
    for i in 0..grid.len() - 1 {
        for j in (i + 1)..grid.len() {
            let (r, t) = (grid[i], grid[j]);
            let xr = c.eval(r)?.point_index().expect("step curve");
            let xt = c.eval_left(t)?.point_index().expect("step curve");
            if xr == xt {
                continue;
            }
            let piece = c.left_adjusted_restrict(s, r, t)?;
            let lhs = abs_diff(f.at(xr), f.at(xt));
            let rhs = sym_integrate(s, &piece, &Integrand::Table(g))?;
            if !leq_slack(lhs, rhs, tol) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Whether some jump of `c` violates the single-jump inequality
/// `|f(γ(t⁻)) − f(γ(t))| ≤ ½(g(γ(t⁻)) + g(γ(t)))·d(γ(t⁻), γ(t))`.
fn in_gamma3(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    c: &TestCurve,
    tol: f64,
) -> bool {
    let points: Vec<usize> = c
        .pieces()
        .iter()
        .map(|p| match p {
            Piece::Step { point, .. } => *point,
            Piece::Polyline { .. } => unreachable!("family curves are step curves"),
        })
        .collect();
    points.windows(2).any(|w| {
        let (x, y) = (w[0], w[1]);
        if x == y {
            return false;
        }
        let lhs = abs_diff(f.at(x), f.at(y));
        let rhs = mul_mass(0.5 * (g.at(x) + g.at(y)), s.d(x, y));
        !leq_slack(lhs, rhs, tol)
    })
}

/// Averaged upper-gradient check over finitely supported plans:
/// `Σ_i w_i·|f(γ_i(1)) − f(γ_i(0))| ≤ Σ_i w_i·∫^S_{γ_i} g` per plan. Plans
/// must have a finite marginal-domination constant, which on positive-weight
/// spaces is automatic.
pub fn plan_check(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    plans: &[TestPlan],
    tol: f64,
) -> Result<ViolationReport> {
    ensure_gradient_pair(s, f, g)?;
    let mut violations = Vec::new();
    for (k, plan) in plans.iter().enumerate() {
        let c = crate::modulus::marginal_constant(s, plan)?;
        if !c.is_finite() {
            return Err(Error::Curve(format!(
                "plan {k} has an infinite marginal constant"
            )));
        }
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (w, curve) in plan.items() {
            lhs += w * endpoint_diff(f, curve)?;
            rhs += w * sym_integrate(s, curve, &Integrand::Table(g))?;
        }
        if !leq_slack(lhs, rhs, tol) {
            violations.push(Violation { witness: Witness::Plan(k), lhs, rhs });
        }
    }
    Ok(ViolationReport { violations, violator_modulus: None })
}

/// McShane extension of `f` from the base set `e` to the whole space:
/// `h(x) = min_{y ∈ e} f(y) + L·d(x, y)`. The result agrees with `f` on `e`
/// exactly and is the largest `L`-Lipschitz function doing so. The Lipschitz
/// precondition on `e` is checked with absolute slack `tol`.
pub fn mcshane_extend(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    e: &[usize],
    l: f64,
    tol: f64,
) -> Result<ScalarFunction> {
    f.check_matches(s)?;
    if !(l >= 0.0) || !l.is_finite() {
        return Err(Error::Function(format!(
            "Lipschitz constant must be finite and nonnegative, got {l}"
        )));
    }
    let mask = point_mask(s.n(), e)?;
    let base: Vec<usize> = (0..s.n()).filter(|&x| mask[x]).collect();
    if base.is_empty() {
        return Err(Error::EmptySet("McShane extension"));
    }
    for (c, &x) in base.iter().enumerate() {
        if !f.at(x).is_finite() {
            return Err(Error::Function(format!(
                "McShane extension requires finite values on the base set, f({x}) is not"
            )));
        }
        for &y in &base[c + 1..] {
            let diff = (f.at(x) - f.at(y)).abs();
            let bound = l * s.d(x, y);
            if !leq_slack(diff, bound, tol) {
                return Err(Error::NotLipschitz { i: x, j: y, constant: l, diff, bound });
            }
        }
    }
    let table = (0..s.n())
        .map(|x| {
            if mask[x] {
                f.at(x)
            } else {
                base.iter().map(|&y| f.at(y) + l * s.d(x, y)).fold(INF, f64::min)
            }
        })
        .collect();
    ScalarFunction::new(table)
}

/// All two-point step curves `x·1_[0,½) + y·1_[½,1]`, one per unordered pair,
/// in pair-lexicographic order.
pub fn two_point_arena(s: &MetricMeasureSpace) -> Result<CurveFamily> {
    let mut curves = Vec::new();
    for x in 0..s.n() {
        for y in (x + 1)..s.n() {
            curves.push(TestCurve::two_point(s, x, y)?);
        }
    }
    CurveFamily::new(s, curves)
}

/// Result of the weak-to-Hajłasz pipeline.
#[derive(Debug, Clone)]
pub struct UnoReport {
    pub outcome: PipelineOutcome,
    /// Weak check of `g` over the two-point arena.
    pub precondition: WeakUpperSReport,
    /// Hajłasz check of `g/2`; empty when the theorem holds.
    pub conclusion: ViolationReport,
}

/// Verifies: if `g` is a p-weak upper S-gradient of `f`, then `g/2` is a
/// Hajłasz gradient of `f`. The hypothesis is checked over the explicitly
/// materialized arena of all two-point curves; zero-weight points (possible
/// only on unchecked spaces) form the Hajłasz exceptional set, since curves
/// through them carry no modulus.
pub fn pipeline_uno(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    p: f64,
    tol: f64,
) -> Result<UnoReport> {
    let arena = two_point_arena(s)?;
    let precondition = weak_upper_s_check(s, f, g, &arena, p, tol)?;
    if !precondition.is_weak_gradient {
        return Ok(UnoReport {
            outcome: PipelineOutcome::PreconditionFailed,
            precondition,
            conclusion: ViolationReport::default(),
        });
    }
    let except: Vec<usize> = (0..s.n()).filter(|&x| s.weight(x) == 0.0).collect();
    let conclusion = hajlasz_check(s, f, &g.scale(0.5), &except, tol)?;
    let outcome = if conclusion.ok() {
        PipelineOutcome::Ok
    } else {
        PipelineOutcome::TheoremViolated
    };
    Ok(UnoReport { outcome, precondition, conclusion })
}

/// Result of the bounded-gradient pipeline.
#[derive(Debug, Clone)]
pub struct BoundedLemmaReport {
    pub outcome: PipelineOutcome,
    /// Hajłasz violations (`Witness::Pair`) and non-finite entries of `g`
    /// (`Witness::Point`, infinite deficit).
    pub precondition: ViolationReport,
    /// Failures of `|f(γ(0)) − f(γ(1))| ≤ ∫^S_γ 18g` over the arena.
    pub bound_18g: ViolationReport,
    /// Failures of the endpoint decomposition
    /// `|f(γ(a)) − f(γ(b⁻))| ≤ 8M·g(γ(a)) + 16·∫^S g + 8M·g(γ(b⁻))`
    /// over the curves whose interior jumps are at most `M`.
    pub bound_8m: ViolationReport,
    /// Arena curves the `8M` check skipped (an interior jump exceeds `M`).
    pub skipped_8m: usize,
}

/// Verifies the bounded-gradient inequality: a pair satisfying the
/// everywhere-Hajłasz inequality with finite `g` obeys
/// `|f(γ(0)) − f(γ(1))| ≤ ∫^S_γ 18g` on every arena curve, and the sharper
/// `8M/16/8M` endpoint decomposition on curves whose interior jumps stay
/// below the user-supplied bound `m_bound`.
pub fn pipeline_bounded_lemma(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    arena: &CurveFamily,
    m_bound: f64,
    tol: f64,
) -> Result<BoundedLemmaReport> {
    ensure_gradient_pair(s, f, g)?;
    if !(m_bound > 0.0) {
        return Err(Error::Function(format!(
            "jump bound M must be positive, got {m_bound}"
        )));
    }
    let precondition = hajlasz_and_finite(s, f, g, tol)?;
    if !precondition.ok() {
        return Ok(BoundedLemmaReport {
            outcome: PipelineOutcome::PreconditionFailed,
            precondition,
            bound_18g: ViolationReport::default(),
            bound_8m: ViolationReport::default(),
            skipped_8m: 0,
        });
    }

    let bound_18g = ViolationReport {
        violations: endpoint_violations(f, &g.scale(18.0), arena, tol)?,
        violator_modulus: None,
    };

    let mut violations_8m = Vec::new();
    let mut skipped_8m = 0;
    for (i, c) in arena.curves().iter().enumerate() {
        let max_jump = c
            .jump_list(s)
            .iter()
            .map(|&(_, size)| size)
            .fold(0.0, f64::max);
        if max_jump > m_bound {
            skipped_8m += 1;
            continue;
        }
        let (a, b) = c.domain();
        let x0 = c.eval(a)?.point_index().expect("step curve");
        let x1 = c.eval_left(b)?.point_index().expect("step curve");
        let restricted = c.left_adjusted_restrict(s, a, b)?;
        let integral = sym_integrate(s, &restricted, &Integrand::Table(g))?;
        let lhs = abs_diff(f.at(x0), f.at(x1));
        let rhs = 8.0 * m_bound * g.at(x0) + 16.0 * integral + 8.0 * m_bound * g.at(x1);
        if !leq_slack(lhs, rhs, tol) {
            violations_8m.push(Violation { witness: Witness::Curve(i), lhs, rhs });
        }
    }
    let bound_8m = ViolationReport { violations: violations_8m, violator_modulus: None };

    let outcome = if bound_18g.ok() && bound_8m.ok() {
        PipelineOutcome::Ok
    } else {
        PipelineOutcome::TheoremViolated
    };
    Ok(BoundedLemmaReport { outcome, precondition, bound_18g, bound_8m, skipped_8m })
}

/// Everywhere-Hajłasz check plus finiteness of `g`, the shared hypothesis of
/// the 18g and 76g pipelines.
fn hajlasz_and_finite(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    tol: f64,
) -> Result<ViolationReport> {
    let mut report = hajlasz_check(s, f, g, &[], tol)?;
    for x in 0..s.n() {
        if !g.at(x).is_finite() {
            report.violations.push(Violation {
                witness: Witness::Point(x),
                lhs: g.at(x),
                rhs: 0.0,
            });
        }
    }
    Ok(report)
}

/// Result of the truncation pipeline.
#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub outcome: PipelineOutcome,
    /// Hajłasz violations and non-finite entries of `g`.
    pub precondition: ViolationReport,
    /// Truncation levels visited: `E_k = {g ≤ 2^k}` for `k_range.0 ..=
    /// k_range.1`, from the first nonempty level to the first full one.
    pub k_range: (u32, u32),
    /// Failures of the level-`k` pairwise inequality
    /// `|f'_k(x) − f'_k(y)| ≤ (g'_k(x) + g'_k(y))·d(x, y)`.
    pub truncated_pairs: ViolationReport,
    /// Failures of the envelope `g'_k ≤ 2g`.
    pub envelope: ViolationReport,
    /// Whether `f'_k = f` exactly at the final level, where `E_k` is the
    /// whole space; this is the stabilized lim inf.
    pub stabilized: bool,
    /// Failures of `|f(γ(0)) − f(γ(1))| ≤ ∫^S_γ 76g` over the arena, with
    /// the violating subfamily's modulus.
    pub final_76g: ViolationReport,
    /// Largest observed `|f(γ(1)) − f(γ(0))| / ∫^S_γ g` over arena curves
    /// with a positive integral: the empirical headroom under the proven 76.
    pub max_ratio: f64,
}

/// Verifies the truncation construction: for an everywhere-Hajłasz pair with
/// finite `g`, the sets `E_k = {g ≤ 2^k}`, McShane extensions `f'_k` with
/// constant `2^{k+1}` and truncated gradients
/// `g'_k = g·1_{E_k} + 2^{k+1}·1_{E_kᶜ}` satisfy, level by level, the
/// pairwise inequality and the envelope `g'_k ≤ 2g`; the extensions
/// stabilize to `f` once `E_k` is the whole space; and `76g` passes the
/// upper-S-gradient check over the arena.
pub fn pipeline_76(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    g: &ScalarFunction,
    p: f64,
    arena: &CurveFamily,
    tol: f64,
) -> Result<TruncationReport> {
    ensure_gradient_pair(s, f, g)?;
    if !f.is_finite() {
        return Err(Error::Function("truncation pipeline requires finite f".into()));
    }
    let precondition = hajlasz_and_finite(s, f, g, tol)?;
    if !precondition.ok() {
        return Ok(TruncationReport {
            outcome: PipelineOutcome::PreconditionFailed,
            precondition,
            k_range: (0, 0),
            truncated_pairs: ViolationReport::default(),
            envelope: ViolationReport::default(),
            stabilized: false,
            final_76g: ViolationReport::default(),
            max_ratio: 0.0,
        });
    }

    let min_g = g.values().iter().fold(INF, |m, &v| m.min(v));
    let max_g = g.values().iter().fold(0.0, |m: f64, &v| m.max(v));
    let k_start = if min_g <= 1.0 { 0 } else { min_g.log2().ceil() as u32 };
    let k_end = if max_g <= 2f64.powi(k_start as i32) {
        k_start
    } else {
        max_g.log2().ceil() as u32
    };

    let mut truncated_pairs = Vec::new();
    let mut envelope = Vec::new();
    let mut stabilized = false;
    for k in k_start..=k_end {
        let threshold = 2f64.powi(k as i32);
        let lipschitz = 2.0 * threshold;
        let e_k: Vec<usize> = (0..s.n()).filter(|&x| g.at(x) <= threshold).collect();
        let f_k = mcshane_extend(s, f, &e_k, lipschitz, tol)?;
        let g_k = ScalarFunction::new(
            (0..s.n())
                .map(|x| if g.at(x) <= threshold { g.at(x) } else { lipschitz })
                .collect(),
        )?;
        for x in 0..s.n() {
            if !leq_slack(g_k.at(x), 2.0 * g.at(x), tol) {
                envelope.push(Violation {
                    witness: Witness::TruncationPoint { k, x },
                    lhs: g_k.at(x),
                    rhs: 2.0 * g.at(x),
                });
            }
        }
        for v in hajlasz_check(s, &f_k, &g_k, &[], tol)?.violations {
            let (x, y) = match v.witness {
                Witness::Pair(x, y) => (x, y),
                _ => unreachable!("Hajłasz violations carry pair witnesses"),
            };
            truncated_pairs.push(Violation {
                witness: Witness::TruncationPair { k, x, y },
                lhs: v.lhs,
                rhs: v.rhs,
            });
        }
        if k == k_end {
            stabilized = e_k.len() == s.n() && f_k.values() == f.values();
        }
    }

    let final_violations = endpoint_violations(f, &g.scale(76.0), arena, tol)?;
    let violators: Vec<usize> = final_violations
        .iter()
        .map(|v| match v.witness {
            Witness::Curve(i) => i,
            _ => unreachable!(),
        })
        .collect();
    let final_76g = ViolationReport {
        violator_modulus: Some(subfamily_modulus(s, arena, &violators, p)?),
        violations: final_violations,
    };

    let mut max_ratio = 0.0f64;
    for (i, c) in arena.curves().iter().enumerate() {
        let denom = row_integral(&arena.rows()[i], g.values());
        if denom > 0.0 {
            max_ratio = max_ratio.max(endpoint_diff(f, c)? / denom);
        }
    }

    let outcome = if truncated_pairs.is_empty()
        && envelope.is_empty()
        && stabilized
        && final_76g.ok()
    {
        PipelineOutcome::Ok
    } else {
        PipelineOutcome::TheoremViolated
    };
    Ok(TruncationReport {
        outcome,
        precondition,
        k_range: (k_start, k_end),
        truncated_pairs: ViolationReport { violations: truncated_pairs, violator_modulus: None },
        envelope: ViolationReport { violations: envelope, violator_modulus: None },
        stabilized,
        final_76g,
        max_ratio,
    })
}

/// The two Sobolev-type norms of `f`.
#[derive(Debug, Clone)]
pub struct NormsReport {
    /// `‖f‖_p + ‖g*‖_p` for the minimal Hajłasz gradient `g*`.
    pub m_norm: f64,
    /// `‖f‖_p` plus the minimal norm over gradients admissible for the
    /// arena. The finite arena relaxes the constraint set of the full
    /// TC-Newtonian infimum, so this is a lower bound for that norm.
    pub n_tc_lower: f64,
    /// Gradient part of `m_norm`.
    pub m_gradient: f64,
    /// Gradient part of `n_tc_lower`.
    pub n_gradient_lower: f64,
    /// `½·n ≤ m ≤ 76·n` for the gradient parts, within tolerance. Expected
    /// whenever the arena contains every two-point curve.
    pub sandwich_holds: bool,
}

/// Computes the Hajłasz–Sobolev norm of `f` and the arena-restricted
/// TC-Newtonian norm: `min ‖g‖_p` subject to `∫^S_γ g ≥ |f(γ(1)) − f(γ(0))|`
/// for every arena curve, plus the `L^p` norm of `f` itself.
pub fn norms(
    s: &MetricMeasureSpace,
    f: &ScalarFunction,
    p: f64,
    arena: &CurveFamily,
    tol: f64,
) -> Result<NormsReport> {
    f.check_matches(s)?;
    if !f.is_finite() {
        return Err(Error::Function("norms require finite f".into()));
    }
    let fp = lp_norm(f, s, p)?;
    let (_, m_gradient) = minimal_hajlasz(s, f, p)?;

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, c) in arena.curves().iter().enumerate() {
        let diff = endpoint_diff(f, c)?;
        if diff == 0.0 {
            continue;
        }
        rows.push(arena.rows()[i].clone());
        rhs.push(diff);
    }
    let n_gradient_lower = if rows.is_empty() {
        0.0
    } else {
        let prog = ConvexProgram::new(s.weights().to_vec(), rows, rhs)?;
        solve(&prog, p)?.value.powf(1.0 / p)
    };

    let sandwich_holds = leq_slack(0.5 * n_gradient_lower, m_gradient, tol)
        && leq_slack(m_gradient, 76.0 * n_gradient_lower, tol);
    Ok(NormsReport {
        m_norm: fp + m_gradient,
        n_tc_lower: fp + n_gradient_lower,
        m_gradient,
        n_gradient_lower,
        sandwich_holds,
    })
}
