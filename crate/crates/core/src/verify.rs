//! Randomized end-to-end verification suites.
//!
//! Each suite draws deterministic random instances (see [`crate::sample`]),
//! runs a pipeline or cross-module identity, and records every failed
//! inequality with its locus. The generators produce inputs that satisfy
//! each suite's hypothesis by construction, so on a correct implementation
//! every suite passes; a reported violation indicates a defect, not an
//! unlucky draw.
//!
//! Suites are addressed by the names the command line uses: `uno`,
//! `bounded18`, `seventysix`, `plans` and `fuglede`.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;

use crate::ext::leq_slack;
use crate::gradients::{
    hajlasz_check, pipeline_76, pipeline_bounded_lemma, pipeline_uno, plan_check, two_point_arena,
    upper_s_check, PipelineOutcome, Violation, Witness, CHECK_TOL,
};
use crate::modulus::{
    admissible, enumerate_step_curves, marginal_constant, modulus, row_integral, CurveFamily,
    TestPlan,
};
use crate::report::Value;
use crate::sample::{hajlasz_pair, random_space, random_table, rng_for, upper_s_pair};
use crate::space::{lp_energy, lp_norm, MetricMeasureSpace, ScalarFunction};
use crate::curve::TestCurve;
use crate::{Error, Result};

/// The named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Upper-S hypothesis over the two-point arena, Hajłasz conclusion for
    /// the halved gradient.
    Uno,
    /// 18g endpoint inequality and the 8M/16/8M refinement for bounded
    /// Hajłasz pairs.
    Bounded18,
    /// Dyadic truncation: level-by-level pair inequality, the 2g envelope,
    /// stabilization, and the final 76g endpoint bound.
    SeventySix,
    /// Plan-averaged checks against member and pairwise checks.
    Plans,
    /// Vanishing modulus tails for densities converging in L^p.
    Fuglede,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Uno,
        Suite::Bounded18,
        Suite::SeventySix,
        Suite::Plans,
        Suite::Fuglede,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Uno => "uno",
            Suite::Bounded18 => "bounded18",
            Suite::SeventySix => "seventysix",
            Suite::Plans => "plans",
            Suite::Fuglede => "fuglede",
        }
    }

    /// The claim the suite verifies, embedded verbatim in every report.
    pub fn claim(self) -> &'static str {
        match self {
            Suite::Uno => "half of a p-weak upper S-gradient is a Hajłasz gradient",
            Suite::Bounded18 => {
                "a bounded Hajłasz pair satisfies the 18g endpoint inequality on every arena \
                 curve, and the 8M/16/8M refinement wherever interior jumps stay under M"
            }
            Suite::SeventySix => {
                "76g is an upper S-gradient for every finite Hajłasz pair, via dyadic \
                 truncation and McShane extension"
            }
            Suite::Plans => {
                "plan-averaged checks agree with member checks, and two-point product plans \
                 reduce to the Hajłasz inequality for the halved gradient"
            }
            Suite::Fuglede => {
                "densities converging in L^p have modulus tails vanishing at rate 2^-k"
            }
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// ChaCha stream index; fixed so a seed pins every suite's draws.
    fn stream(self) -> u64 {
        match self {
            Suite::Uno => 0,
            Suite::Bounded18 => 1,
            Suite::SeventySix => 2,
            Suite::Plans => 3,
            Suite::Fuglede => 4,
        }
    }
}

/// Knobs shared by all suites.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    /// Random cases (one space each) per suite.
    pub spaces: usize,
    /// Arena enumeration: maximum jump count.
    pub max_jumps: usize,
    /// Arena enumeration: dyadic grid depth.
    pub depth: u32,
    pub seed: u64,
    pub p: f64,
    /// Absolute slack for every inequality.
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { spaces: 20, max_jumps: 3, depth: 3, seed: 0, p: 2.0, tol: CHECK_TOL }
    }
}

/// One failed check, flattened for reporting.
#[derive(Debug, Clone)]
pub struct SuiteViolation {
    /// Case index within the suite: which drawn space it happened on.
    pub space_id: usize,
    /// Stage and witness, e.g. `"18g bound: curve 12"`.
    pub witness: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl SuiteViolation {
    /// By how much the inequality fails.
    pub fn deficit(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Aggregate result of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub claim: String,
    /// Cases drawn.
    pub cases: usize,
    /// Individual inequalities evaluated.
    pub checks: usize,
    pub violations: Vec<SuiteViolation>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Deterministic report fragment for this suite.
    pub fn to_value(&self) -> Value {
        let violations = Value::list(self.violations.iter().map(|v| {
            Value::map([
                ("lhs", Value::from(v.lhs)),
                ("rhs", Value::from(v.rhs)),
                ("slack", Value::from(v.deficit())),
                ("space_id", Value::from(v.space_id)),
                ("witness", Value::from(v.witness.as_str())),
            ])
        }));
        Value::map([
            ("cases", Value::from(self.cases)),
            ("checks", Value::from(self.checks)),
            ("claim", Value::from(self.claim.as_str())),
            ("passed", Value::from(self.passed())),
            ("suite", Value::from(self.suite.name())),
            ("violations", violations),
        ])
    }
}

/// Full deterministic verify report: config echo, per-suite outcomes and the
/// aggregate pass flag. Shared by the CLI and the C ABI.
pub fn report_value(cfg: &VerifyConfig, outcomes: &[SuiteOutcome]) -> Value {
    let total: usize = outcomes.iter().map(|o| o.violations.len()).sum();
    let config = Value::map([
        ("depth", Value::from(cfg.depth as usize)),
        ("max_jumps", Value::from(cfg.max_jumps)),
        ("p", Value::from(cfg.p)),
        ("seed", Value::from(cfg.seed as usize)),
        ("spaces", Value::from(cfg.spaces)),
        ("tolerance", Value::from(cfg.tol)),
    ]);
    Value::map([
        ("command", Value::from("verify")),
        ("config", config),
        ("passed", Value::from(total == 0)),
        ("suites", Value::list(outcomes.iter().map(SuiteOutcome::to_value))),
        ("violations_total", Value::from(total)),
    ])
}

/// Runs one suite over `cfg.spaces` deterministic cases.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    if !(cfg.p >= 1.0) || !cfg.p.is_finite() {
        return Err(Error::Exponent(cfg.p));
    }
    let mut out = SuiteOutcome {
        suite,
        claim: suite.claim().to_string(),
        cases: 0,
        checks: 0,
        violations: Vec::new(),
    };
    for case in 0..cfg.spaces {
        let mut rng = rng_for(cfg.seed, suite.stream(), case as u64);
        let s = random_space(&mut rng, case_size(case));
        match suite {
            Suite::Uno => uno_case(cfg, case, &mut rng, &s, &mut out)?,
            Suite::Bounded18 => bounded18_case(cfg, case, &mut rng, &s, &mut out)?,
            Suite::SeventySix => seventysix_case(cfg, case, &mut rng, &s, &mut out)?,
            Suite::Plans => plans_case(cfg, case, &mut rng, &s, &mut out)?,
            Suite::Fuglede => fuglede_case(cfg, case, &mut rng, &s, &mut out)?,
        }
        out.cases += 1;
    }
    Ok(out)
}

/// Runs every suite in declaration order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteOutcome>> {
    Suite::ALL.iter().map(|&s| run_suite(s, cfg)).collect()
}

/// Case sizes cycle through 2..=5 points so every run covers the smallest
/// spaces and some room for multi-jump curves.
fn case_size(case: usize) -> usize {
    2 + case % 4
}

fn push_all(out: &mut SuiteOutcome, case: usize, stage: &str, violations: &[Violation]) {
    for v in violations {
        out.violations.push(SuiteViolation {
            space_id: case,
            witness: format!("{stage}: {}", v.witness),
            lhs: v.lhs,
            rhs: v.rhs,
        });
    }
}

fn unordered_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

fn diameter(s: &MetricMeasureSpace) -> f64 {
    let mut best = 0.0f64;
    for x in 0..s.n() {
        for y in (x + 1)..s.n() {
            best = best.max(s.d(x, y));
        }
    }
    best
}

fn arena_for(s: &MetricMeasureSpace, max_jumps: usize, depth: u32) -> Result<CurveFamily> {
    CurveFamily::new(s, enumerate_step_curves(s, max_jumps, depth))
}

fn uno_case(
    cfg: &VerifyConfig,
    case: usize,
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let (f, g) = upper_s_pair(rng, s, cfg.p)?;
    let report = pipeline_uno(s, &f, &g, cfg.p, cfg.tol)?;
    out.checks += 2 * unordered_pairs(s.n());
    match report.outcome {
        PipelineOutcome::Ok => {}
        PipelineOutcome::PreconditionFailed => {
            push_all(out, case, "hypothesis", &report.precondition.report.violations);
        }
        PipelineOutcome::TheoremViolated => {
            push_all(out, case, "halved-gradient conclusion", &report.conclusion.violations);
        }
    }
    Ok(())
}

fn bounded18_case(
    cfg: &VerifyConfig,
    case: usize,
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let (f, g) = hajlasz_pair(rng, s, cfg.p, 0.25, false)?;
    let arena = arena_for(s, cfg.max_jumps, cfg.depth)?;
    // No jump exceeds the diameter, so the 8M check covers the whole arena.
    let report = pipeline_bounded_lemma(s, &f, &g, &arena, diameter(s), cfg.tol)?;
    out.checks += unordered_pairs(s.n()) + 2 * arena.len();
    push_all(out, case, "hypothesis", &report.precondition.violations);
    push_all(out, case, "18g bound", &report.bound_18g.violations);
    push_all(out, case, "8M/16/8M bound", &report.bound_8m.violations);
    if report.skipped_8m > 0 {
        out.violations.push(SuiteViolation {
            space_id: case,
            witness: "8M/16/8M bound: curves skipped despite the diameter bound".to_string(),
            lhs: report.skipped_8m as f64,
            rhs: 0.0,
        });
    }
    Ok(())
}

fn seventysix_case(
    cfg: &VerifyConfig,
    case: usize,
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    out: &mut SuiteOutcome,
) -> Result<()> {
    // Odd cases plant one gradient entry several dyadic levels up, so the
    // truncation ladder is exercised beyond its first rung.
    let (f, g) = hajlasz_pair(rng, s, cfg.p, 0.25, case % 2 == 1)?;
    let arena = arena_for(s, cfg.max_jumps, cfg.depth)?;
    let report = pipeline_76(s, &f, &g, cfg.p, &arena, cfg.tol)?;
    let levels = (report.k_range.1 - report.k_range.0 + 1) as usize;
    out.checks += unordered_pairs(s.n()) * (1 + levels) + levels * s.n() + arena.len() + 1;
    push_all(out, case, "hypothesis", &report.precondition.violations);
    push_all(out, case, "truncated pair inequality", &report.truncated_pairs.violations);
    push_all(out, case, "2g envelope", &report.envelope.violations);
    push_all(out, case, "76g endpoint bound", &report.final_76g.violations);
    if !report.stabilized {
        out.violations.push(SuiteViolation {
            space_id: case,
            witness: "extension failed to stabilize at the top level".to_string(),
            lhs: 1.0,
            rhs: 0.0,
        });
    }
    Ok(())
}

fn plans_case(
    cfg: &VerifyConfig,
    case: usize,
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    out: &mut SuiteOutcome,
) -> Result<()> {
    // Unconstrained gradient: violations occur naturally, and the suite
    // asserts the different check routes flag exactly the same loci.
    let f = random_table(rng, s.n(), -1.0, 1.0);
    let g = random_table(rng, s.n(), 0.0, 1.5);
    let arena = two_point_arena(s)?;
    let pairs: Vec<(usize, usize)> = (0..s.n())
        .flat_map(|x| ((x + 1)..s.n()).map(move |y| (x, y)))
        .collect();

    // Dirac plans must flag exactly the curves the member check flags.
    let member = upper_s_check(s, &f, &g, &arena, cfg.tol)?;
    let dirac: Vec<TestPlan> = arena
        .curves()
        .iter()
        .map(|c| TestPlan::dirac(s, c.clone()))
        .collect::<Result<_>>()?;
    let dirac_report = plan_check(s, &f, &g, &dirac, cfg.tol)?;
    let member_set: BTreeSet<usize> = member
        .violations
        .iter()
        .filter_map(|v| match v.witness {
            Witness::Curve(i) => Some(i),
            _ => None,
        })
        .collect();
    let dirac_set: BTreeSet<usize> = plan_indices(&dirac_report.violations);
    out.checks += arena.len();
    for &i in member_set.symmetric_difference(&dirac_set) {
        let v = member
            .violations
            .iter()
            .find(|v| v.witness == Witness::Curve(i))
            .or_else(|| dirac_report.violations.iter().find(|v| v.witness == Witness::Plan(i)))
            .expect("index came from one of the two sets");
        out.violations.push(SuiteViolation {
            space_id: case,
            witness: format!("dirac agreement: plan {i}"),
            lhs: v.lhs,
            rhs: v.rhs,
        });
    }

    // At fully shrunken balls the product plan over (x, y) is the Dirac plan
    // on the two-point curve, and its inequality is the Hajłasz inequality
    // for g/2; the flagged pair sets must coincide.
    let haj = hajlasz_check(s, &f, &g.scale(0.5), &[], cfg.tol)?;
    let haj_set: BTreeSet<(usize, usize)> = haj
        .violations
        .iter()
        .filter_map(|v| match v.witness {
            Witness::Pair(x, y) => Some((x, y)),
            _ => None,
        })
        .collect();
    let dirac_pairs: BTreeSet<(usize, usize)> = dirac_set.iter().map(|&i| pairs[i]).collect();
    out.checks += pairs.len();
    for &(x, y) in haj_set.symmetric_difference(&dirac_pairs) {
        out.violations.push(SuiteViolation {
            space_id: case,
            witness: format!("shrunken product plan vs pairwise inequality: pair {x}-{y}"),
            lhs: 0.0,
            rhs: 0.0,
        });
    }

    // Positive-radius product plans: disjoint balls around the two centers,
    // every (ball, ball) pair of endpoints as a two-point curve weighted by
    // the normalized product measure.
    let mut product = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        let r = 0.45 * s.d(x, y);
        let ball_x: Vec<usize> = (0..s.n()).filter(|&w| s.d(x, w) <= r).collect();
        let ball_y: Vec<usize> = (0..s.n()).filter(|&w| s.d(y, w) <= r).collect();
        let mass_x: f64 = ball_x.iter().map(|&w| s.weight(w)).sum();
        let mass_y: f64 = ball_y.iter().map(|&w| s.weight(w)).sum();
        let mut items = Vec::with_capacity(ball_x.len() * ball_y.len());
        for &w in &ball_x {
            for &z in &ball_y {
                let weight = s.weight(w) * s.weight(z) / (mass_x * mass_y);
                items.push((weight, TestCurve::two_point(s, w, z)?));
            }
        }
        let plan = TestPlan::new(s, items)?;
        let constant = marginal_constant(s, &plan)?;
        let expected = (1.0 / mass_x).max(1.0 / mass_y);
        out.checks += 1;
        if (constant - expected).abs() > cfg.tol {
            out.violations.push(SuiteViolation {
                space_id: case,
                witness: format!("marginal constant: pair {x}-{y}"),
                lhs: constant,
                rhs: expected,
            });
        }
        product.push(plan);
    }

    // Averaging valid member inequalities cannot create a violation: every
    // flagged product plan must contain a member pair flagged pairwise.
    let product_report = plan_check(s, &f, &g, &product, cfg.tol)?;
    out.checks += product.len();
    for v in &product_report.violations {
        let i = match v.witness {
            Witness::Plan(i) => i,
            _ => continue,
        };
        let explained = product[i].items().iter().any(|(_, c)| {
            let (a, b) = c.domain();
            let w = c.eval(a).and_then(|l| {
                l.point_index().ok_or(Error::StepCurvesOnly("plan members"))
            });
            let z = c.eval_left(b).and_then(|l| {
                l.point_index().ok_or(Error::StepCurvesOnly("plan members"))
            });
            match (w, z) {
                (Ok(w), Ok(z)) => haj_set.contains(&(w.min(z), w.max(z))),
                _ => false,
            }
        });
        if !explained {
            let (x, y) = pairs[i];
            out.violations.push(SuiteViolation {
                space_id: case,
                witness: format!("averaging created a violation: product plan {x}-{y}"),
                lhs: v.lhs,
                rhs: v.rhs,
            });
        }
    }
    Ok(())
}

fn plan_indices(violations: &[Violation]) -> BTreeSet<usize> {
    violations
        .iter()
        .filter_map(|v| match v.witness {
            Witness::Plan(i) => Some(i),
            _ => None,
        })
        .collect()
}

fn fuglede_case(
    cfg: &VerifyConfig,
    case: usize,
    rng: &mut ChaCha8Rng,
    s: &MetricMeasureSpace,
    out: &mut SuiteOutcome,
) -> Result<()> {
    // A sequence f_k → f in L^p with ‖f_k − f‖_p^p ≤ 2^{-k(p+1)}: the
    // densities ρ_k = |f_k − f| then make 2^k·ρ_k admissible for the family
    // of curves whose line integral of ρ_k reaches 2^{-k}, bounding that
    // family's modulus by 2^{-k}.
    let direction = random_table(rng, s.n(), -1.0, 1.0);
    let norm = lp_norm(&direction, s, cfg.p)?;
    let unit: Vec<f64> = if norm > 0.0 {
        direction.values().iter().map(|v| (v / norm).abs()).collect()
    } else {
        let fallback = ScalarFunction::constant(s.n(), 1.0);
        let fallback_norm = lp_norm(&fallback, s, cfg.p)?;
        vec![1.0 / fallback_norm; s.n()]
    };
    // Two-jump curves suffice for the tail families and keep the per-level
    // solver calls small.
    let arena = arena_for(s, cfg.max_jumps.min(2), cfg.depth)?;

    for k in 0u32..=8 {
        let scale = 0.99 * 2f64.powf(-(k as f64) * (cfg.p + 1.0) / cfg.p);
        let rho_k = ScalarFunction::new(unit.iter().map(|&v| v * scale).collect())?;
        let budget = 2f64.powf(-(k as f64) * (cfg.p + 1.0));
        let energy = lp_energy(&rho_k, s, cfg.p)?;
        out.checks += 1;
        if !leq_slack(energy, budget, cfg.tol) {
            out.violations.push(SuiteViolation {
                space_id: case,
                witness: format!("tail energy: level {k}"),
                lhs: energy,
                rhs: budget,
            });
        }

        let threshold = 2f64.powi(-(k as i32));
        let selected: Vec<TestCurve> = arena
            .curves()
            .iter()
            .zip(arena.rows())
            .filter(|(_, row)| row_integral(row, rho_k.values()) >= threshold)
            .map(|(c, _)| c.clone())
            .collect();
        out.checks += 1;
        if selected.is_empty() {
            continue;
        }
        let family = CurveFamily::new(s, selected)?;

        // Scaling by the exact power of two turns every member's integral
        // into a value ≥ 1, so admissibility holds with no tolerance.
        let (ok, slack) = admissible(&family, &rho_k.scale(2f64.powi(k as i32)))?;
        out.checks += 1;
        if !ok {
            out.violations.push(SuiteViolation {
                space_id: case,
                witness: format!("scaled density admissibility: level {k}"),
                lhs: 1.0,
                rhs: 1.0 + slack,
            });
        }

        let tail = modulus(s, &family, cfg.p)?;
        if !leq_slack(tail.value, threshold, cfg.tol) {
            out.violations.push(SuiteViolation {
                space_id: case,
                witness: format!("modulus tail: level {k}"),
                lhs: tail.value,
                rhs: threshold,
            });
        }
    }
    Ok(())
}
