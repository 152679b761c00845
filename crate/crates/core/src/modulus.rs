//! Discrete p-modulus of finite families of nontrivial step curves, the
//! generalized modulus over finite test plans, and the step-curve enumerator
//! used by the verification harness.
//!
//! The modulus is the value of the convex program
//! `min Σ_x m(x) ρ(x)^p` over densities `ρ ≥ 0` with `∫^S_γ ρ ≥ 1` for every
//! family member. For a step curve the symmetrized integral of a table is
//! `a_γ·ρ` where `a_γ[x] = μ^S_γ({x})`, so the constraint matrix is exactly
//! the stack of symmetrized occupation atoms; rows sum to `V(γ) > 0`, hence a
//! large constant density is always admissible and the program is feasible.

use crate::curve::TestCurve;
use crate::ext::{mul_mass, INF};
use crate::solver::{solve, ConvexProgram};
use crate::space::{MetricMeasureSpace, ScalarFunction};
use crate::stieltjes::sym_measure;
use crate::{Error, Result};

/// Admissibility slack tolerance.
pub const ADMISSIBLE_TOL: f64 = 1e-12;

/// Below this value a family counts as null.
pub const NULL_TOL: f64 = 1e-10;

/// A finite family of nontrivial step curves with cached constraint rows.
#[derive(Debug, Clone)]
pub struct CurveFamily {
    n: usize,
    curves: Vec<TestCurve>,
    rows: Vec<Vec<f64>>,
}

impl CurveFamily {
    /// Validates that every member is a step curve of positive variation and
    /// caches `a_γ[x] = μ^S_γ({x})` per curve.
    pub fn new(s: &MetricMeasureSpace, curves: Vec<TestCurve>) -> Result<Self> {
        let mut rows = Vec::with_capacity(curves.len());
        for c in &curves {
            if !c.is_step() {
                return Err(Error::StepCurvesOnly("p-modulus"));
            }
            if c.variation(s) == 0.0 {
                return Err(Error::ZeroVariation);
            }
            rows.push(sym_measure(s, c).point_atoms().to_vec());
        }
        Ok(Self { n: s.n(), curves, rows })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[TestCurve] {
        &self.curves
    }

    /// Constraint rows, one per curve; row sums equal the variations.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Family union (as a multiset; duplicates do not affect the modulus).
    pub fn union(&self, other: &CurveFamily) -> CurveFamily {
        let mut curves = self.curves.clone();
        curves.extend(other.curves.iter().cloned());
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        CurveFamily { n: self.n, curves, rows }
    }
}

/// `Σ_x mul_mass(ρ(x), a(x))`: the symmetrized integral of a table density
/// along a step curve, honoring `∞ · 0 = 0`.
pub(crate) fn row_integral(row: &[f64], rho: &[f64]) -> f64 {
    row.iter()
        .zip(rho)
        .map(|(&a, &r)| mul_mass(r, a))
        .sum()
}

/// Whether `ρ` is admissible for the family, together with the worst slack
/// `min_γ (∫^S_γ ρ − 1)`. The empty family admits everything (slack `+∞`).
pub fn admissible(
    fam: &CurveFamily,
    rho: &ScalarFunction,
) -> Result<(bool, f64)> {
    if rho.len() != fam.n {
        return Err(Error::Function(format!(
            "density has {} entries but the space has {}",
            rho.len(),
            fam.n
        )));
    }
    if let Some(i) = rho.values().iter().position(|&v| v < 0.0) {
        return Err(Error::NegativeDensity(i));
    }
    let worst = fam
        .rows
        .iter()
        .map(|row| row_integral(row, rho.values()) - 1.0)
        .fold(INF, f64::min);
    Ok((worst >= -ADMISSIBLE_TOL, worst))
}

/// Solution of a modulus program.
#[derive(Debug, Clone)]
pub struct ModulusResult {
    /// `Mod^p` value `Σ_x m(x) ρ(x)^p`.
    pub value: f64,
    /// Optimal density table.
    pub density: ScalarFunction,
    /// Per-constraint slack `∫^S ρ − 1`, in input order.
    pub slacks: Vec<f64>,
    /// `p = 1` only: the optimum was a tie resolved lexicographically.
    pub tie_broken: bool,
    /// Solver iterations or pivots.
    pub iterations: usize,
}

/// `Mod^p(Γ)` for a family of step curves. Zero-weight points (possible only
/// on unchecked spaces) carry infinite density at zero energy, so rows they
/// touch are satisfied for free and drop out of the program.
pub fn modulus(s: &MetricMeasureSpace, fam: &CurveFamily, p: f64) -> Result<ModulusResult> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Exponent(p));
    }
    if fam.is_empty() {
        return Ok(ModulusResult {
            value: 0.0,
            density: ScalarFunction::constant(fam.n, 0.0),
            slacks: Vec::new(),
            tie_broken: false,
            iterations: 0,
        });
    }
    solve_rows(s, &fam.rows, p)
}

fn solve_rows(s: &MetricMeasureSpace, rows: &[Vec<f64>], p: f64) -> Result<ModulusResult> {
    let zero: Vec<usize> = (0..s.n()).filter(|&x| s.weight(x) == 0.0).collect();
    if zero.is_empty() {
        let prog = ConvexProgram::new(
            s.weights().to_vec(),
            rows.to_vec(),
            vec![1.0; rows.len()],
        )?;
        let r = solve(&prog, p)?;
        return Ok(ModulusResult {
            value: r.value,
            density: ScalarFunction::new(r.density)?,
            slacks: r.slacks,
            tie_broken: r.tie_broken,
            iterations: r.iterations,
        });
    }
    // Unchecked space with null-mass points: infinite density there costs
    // nothing, so any row charging such a point is free.
    let pos: Vec<usize> = (0..s.n()).filter(|&x| s.weight(x) > 0.0).collect();
    let kept: Vec<Vec<f64>> = rows
        .iter()
        .filter(|row| zero.iter().all(|&x| row[x] == 0.0))
        .map(|row| pos.iter().map(|&x| row[x]).collect())
        .collect();
    let mut density = vec![0.0; s.n()];
    for &x in &zero {
        density[x] = INF;
    }
    let (value, tie_broken, iterations) = if kept.is_empty() {
        (0.0, false, 0)
    } else {
        let prog = ConvexProgram::new(
            pos.iter().map(|&x| s.weight(x)).collect(),
            kept.clone(),
            vec![1.0; kept.len()],
        )?;
        let r = solve(&prog, p)?;
        for (j, &x) in pos.iter().enumerate() {
            density[x] = r.density[j];
        }
        (r.value, r.tie_broken, r.iterations)
    };
    let slacks = rows
        .iter()
        .map(|row| row_integral(row, &density) - 1.0)
        .collect();
    Ok(ModulusResult {
        value,
        density: ScalarFunction::new(density)?,
        slacks,
        tie_broken,
        iterations,
    })
}

/// Outcome of the zero-modulus test.
#[derive(Debug, Clone)]
pub struct NullFamilyReport {
    pub is_null: bool,
    /// The modulus value the verdict is based on.
    pub value: f64,
    /// When null: an admissible density of zero energy whose symmetrized
    /// integral is infinite along every member.
    pub witness: Option<ScalarFunction>,
}

/// Whether `Mod^p(Γ) = 0`, with a witness density when it is. On a validated
/// space (all weights positive) a nonempty family is never null.
pub fn is_null_family(
    s: &MetricMeasureSpace,
    fam: &CurveFamily,
    p: f64,
) -> Result<NullFamilyReport> {
    if fam.is_empty() {
        return Ok(NullFamilyReport {
            is_null: true,
            value: 0.0,
            witness: Some(ScalarFunction::constant(fam.n, 0.0)),
        });
    }
    let result = modulus(s, fam, p)?;
    let is_null = result.value < NULL_TOL;
    let witness = if is_null {
        // Zero modulus on a finite space forces every row onto the
        // null-mass points; infinity there is the Prop's witness.
        let table: Vec<f64> = s
            .weights()
            .iter()
            .map(|&m| if m == 0.0 { INF } else { 0.0 })
            .collect();
        Some(ScalarFunction::new(table)?)
    } else {
        None
    };
    Ok(NullFamilyReport { is_null, value: result.value, witness })
}

/// A finitely supported measure on step curves: weighted curves over a common
/// domain, with cached endpoint marginals.
#[derive(Debug, Clone)]
pub struct TestPlan {
    items: Vec<(f64, TestCurve)>,
    domain: Option<(f64, f64)>,
    e_start: Vec<f64>,
    e_end: Vec<f64>,
}

impl TestPlan {
    pub fn new(s: &MetricMeasureSpace, items: Vec<(f64, TestCurve)>) -> Result<Self> {
        let mut e_start = vec![0.0; s.n()];
        let mut e_end = vec![0.0; s.n()];
        let mut domain: Option<(f64, f64)> = None;
        for (w, c) in &items {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::Curve(format!("plan weight {w} must be positive and finite")));
            }
            if !c.is_step() {
                return Err(Error::StepCurvesOnly("test plans"));
            }
            match domain {
                None => domain = Some(c.domain()),
                Some(d) if d != c.domain() => {
                    return Err(Error::Curve("plan curves must share a common domain".into()))
                }
                _ => {}
            }
            let (a, b) = c.domain();
            let start = c.eval(a).expect("domain start").point_index().unwrap();
            let end = c.eval(b).expect("domain end").point_index().unwrap();
            e_start[start] += w;
            e_end[end] += w;
        }
        Ok(Self { items, domain, e_start, e_end })
    }

    /// The Dirac plan `δ_γ`.
    pub fn dirac(s: &MetricMeasureSpace, c: TestCurve) -> Result<Self> {
        Self::new(s, vec![(1.0, c)])
    }

    pub fn items(&self) -> &[(f64, TestCurve)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    pub fn total_weight(&self) -> f64 {
        self.items.iter().map(|(w, _)| w).sum()
    }

    /// Endpoint marginals `(e_a)_#` and `(e_b)_#` as atom tables.
    pub fn endpoint_marginals(&self) -> (&[f64], &[f64]) {
        (&self.e_start, &self.e_end)
    }

    /// The plan's constraint row `Σ_i w_i a_{γ_i}`.
    fn row(&self, s: &MetricMeasureSpace) -> Vec<f64> {
        let mut row = vec![0.0; s.n()];
        for (w, c) in &self.items {
            let atoms = sym_measure(s, c);
            for (entry, &a) in row.iter_mut().zip(atoms.point_atoms()) {
                *entry += w * a;
            }
        }
        row
    }
}

/// Generalized modulus over a finite list of test plans: the same convex
/// program with one constraint row `Σ_i w_i a_{γ_i}` per plan. For Dirac
/// plans the rows coincide with the plain modulus rows, so the results agree
/// exactly.
pub fn generalized_modulus(
    s: &MetricMeasureSpace,
    plans: &[TestPlan],
    p: f64,
) -> Result<ModulusResult> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Exponent(p));
    }
    if plans.is_empty() {
        return Ok(ModulusResult {
            value: 0.0,
            density: ScalarFunction::constant(s.n(), 0.0),
            slacks: Vec::new(),
            tie_broken: false,
            iterations: 0,
        });
    }
    let rows: Vec<Vec<f64>> = plans.iter().map(|plan| plan.row(s)).collect();
    solve_rows(s, &rows, p)
}

/// The marginal-domination constant
/// `C = max_t max_x (e_t)_#π({x}) / m(x)`. The marginal is constant between
/// piece boundaries, so the maximum over all times is attained on the finite
/// boundary grid.
pub fn marginal_constant(s: &MetricMeasureSpace, plan: &TestPlan) -> Result<f64> {
    if plan.is_empty() {
        return Ok(0.0);
    }
    let (a, b) = plan.domain().unwrap();
    let mut grid = vec![a, b];
    for (_, c) in plan.items() {
        for piece in c.pieces() {
            grid.push(piece.start());
        }
    }
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();
    let mut best = 0.0f64;
    for &t in &grid {
        let mut atom = vec![0.0; s.n()];
        for (w, c) in plan.items() {
            let x = c.eval(t)?.point_index().expect("step curves evaluate to points");
            atom[x] += w;
        }
        for x in 0..s.n() {
            if atom[x] > 0.0 {
                best = best.max(atom[x] / s.weight(x));
            }
        }
    }
    Ok(best)
}

/// All step curves on `[0,1]` with `1..=max_jumps` jumps at times from the
/// dyadic grid `{k/2^depth}` and values in the point set (consecutive values
/// distinct). Deterministic lexicographic order: by jump count, then jump
/// times, then value sequence.
pub fn enumerate_step_curves(
    s: &MetricMeasureSpace,
    max_jumps: usize,
    depth: u32,
) -> Vec<TestCurve> {
    let n = s.n();
    let denom = 1u64 << depth;
    let grid: Vec<f64> = (1..denom).map(|k| k as f64 / denom as f64).collect();
    let mut out = Vec::new();
    let mut times = Vec::new();
    for r in 1..=max_jumps.min(grid.len()) {
        times.clear();
        choose_times(&grid, r, 0, &mut times, &mut |chosen| {
            let mut values = Vec::new();
            choose_values(n, r + 1, &mut values, &mut |vals| {
                let mut steps = Vec::with_capacity(r + 1);
                steps.push((0.0, vals[0]));
                for (i, &t) in chosen.iter().enumerate() {
                    steps.push((t, vals[i + 1]));
                }
                let c = TestCurve::step(s, (0.0, 1.0), &steps)
                    .expect("enumerated step curves are valid");
                out.push(c);
            });
        });
    }
    out
}

fn choose_times(
    grid: &[f64],
    r: usize,
    from: usize,
    acc: &mut Vec<f64>,
    emit: &mut impl FnMut(&[f64]),
) {
    if acc.len() == r {
        emit(acc);
        return;
    }
    for i in from..grid.len() {
        acc.push(grid[i]);
        choose_times(grid, r, i + 1, acc, emit);
        acc.pop();
    }
}

fn choose_values(n: usize, len: usize, acc: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if acc.len() == len {
        emit(acc);
        return;
    }
    for v in 0..n {
        if acc.last() == Some(&v) {
            continue;
        }
        acc.push(v);
        choose_values(n, len, acc, emit);
        acc.pop();
    }
}
