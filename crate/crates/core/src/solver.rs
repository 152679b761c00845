//! Solvers for the weighted p-energy programs behind the modulus and the
//! minimal Hajłasz gradient:
//!
//! ```text
//! minimize   Σ_x m_x ρ_x^p    subject to   A ρ ≥ rhs,   ρ ≥ 0,
//! ```
//!
//! with `m > 0`, `A ≥ 0` entrywise and `rhs ≥ 0`. Rows are scaled to
//! right-hand side 1 (rows with `rhs = 0` are vacuous and dropped). Three
//! deterministic paths:
//!
//! * `p = 1`: two-phase dense simplex with Bland's rule, then a lexicographic
//!   refinement pass when the optimal vertex is not unique, so tied optima
//!   resolve to the lexicographically smallest density.
//! * `p = 2`: primal active-set method with the diagonal Hessian `2D`,
//!   each working-set system `[2D A_Wᵀ; A_W 0]` solved by partial-pivot LU,
//!   lowest-index tie-breaking, started at the feasible constant density.
//! * other `p ∈ (1, ∞)`: damped-Newton descent on the log-barrier central
//!   path (barrier weight shrunk geometrically to `1e-13`), followed by a
//!   Newton polish on the active set the path identifies; the polish removes
//!   the residual `O(μ)` gap and an exact scaling pulls the density back
//!   onto the feasible boundary.

use crate::{Error, Result};

/// `min Σ m_x ρ_x^p  s.t.  rows·ρ ≥ rhs, ρ ≥ 0`.
#[derive(Debug, Clone)]
pub struct ConvexProgram {
    mass: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

/// Solution of a [`ConvexProgram`].
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Optimal energy `Σ m_x ρ_x^p`.
    pub value: f64,
    /// Optimal density.
    pub density: Vec<f64>,
    /// `rows·ρ − rhs`, in the original row order.
    pub slacks: Vec<f64>,
    /// Whether the `p = 1` lexicographic pass moved to a different tied vertex.
    pub tie_broken: bool,
    /// Simplex pivots or active-set/Newton iterations.
    pub iterations: usize,
}

impl ConvexProgram {
    pub fn new(mass: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::EmptySet("program variables"));
        }
        if mass.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::Space("masses must be positive and finite".into()));
        }
        if rows.len() != rhs.len() {
            return Err(Error::Space(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != mass.len() {
                return Err(Error::Space(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    mass.len()
                )));
            }
            if row.iter().any(|&a| !a.is_finite() || a < 0.0) {
                return Err(Error::Space(format!(
                    "row {i} must be nonnegative and finite"
                )));
            }
        }
        if rhs.iter().any(|&b| !b.is_finite() || b < 0.0) {
            return Err(Error::Space("right-hand sides must be nonnegative".into()));
        }
        Ok(Self { mass, rows, rhs })
    }

    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Rows scaled to right-hand side 1, vacuous rows dropped, exact
    /// duplicates merged. A kept row with no positive entry cannot be
    /// satisfied at all.
    fn normalized(&self) -> Result<Vec<Vec<f64>>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for (row, &b) in self.rows.iter().zip(&self.rhs) {
            if b == 0.0 {
                continue;
            }
            let scaled: Vec<f64> = row.iter().map(|&a| a / b).collect();
            if scaled.iter().all(|&a| a == 0.0) {
                return Err(Error::Infeasible(
                    "a constraint row has no positive entry".into(),
                ));
            }
            if !out.contains(&scaled) {
                out.push(scaled);
            }
        }
        Ok(out)
    }

    fn energy(&self, rho: &[f64], p: f64) -> f64 {
        self.mass
            .iter()
            .zip(rho)
            .map(|(&m, &r)| m * r.powf(p))
            .sum()
    }

    fn slacks_at(&self, rho: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, &b)| dot(row, rho) - b)
            .collect()
    }
}

/// Solve the program for a given exponent `p ≥ 1`.
pub fn solve(prog: &ConvexProgram, p: f64) -> Result<SolveReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Exponent(p));
    }
    let rows = prog.normalized()?;
    if rows.is_empty() {
        let rho = vec![0.0; prog.n()];
        return Ok(SolveReport {
            value: 0.0,
            slacks: prog.slacks_at(&rho),
            density: rho,
            tie_broken: false,
            iterations: 0,
        });
    }
    let (rho, tie_broken, iterations) = if p == 1.0 {
        solve_linear(prog.mass(), &rows)?
    } else if p == 2.0 {
        let (rho, it) = solve_quadratic(prog.mass(), &rows)?;
        (rho, false, it)
    } else {
        let (rho, it) = solve_interior(prog.mass(), &rows, p)?;
        (rho, false, it)
    };
    Ok(SolveReport {
        value: prog.energy(&rho, p),
        slacks: prog.slacks_at(&rho),
        density: rho,
        tie_broken,
        iterations,
    })
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
/// `None` when the matrix is numerically singular.
pub(crate) fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let tol = 1e-13 * (1.0 + scale);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())?;
        if a[piv][k].abs() <= tol {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// p = 1: two-phase simplex.

const RED_TOL: f64 = 1e-9;
const PIV_TOL: f64 = 1e-10;

struct Tableau {
    body: Vec<Vec<f64>>, // m x (ncols + 1), last column is the right-hand side
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let f = self.body[r][e];
        for v in self.body[r].iter_mut() {
            *v /= f;
        }
        for i in 0..self.body.len() {
            if i == r {
                continue;
            }
            let f = self.body[i][e];
            if f != 0.0 {
                for j in 0..=self.ncols {
                    let delta = f * self.body[r][j];
                    self.body[i][j] -= delta;
                }
            }
        }
        self.basis[r] = e;
    }

    /// Bland's rule: lowest-index entering column with negative reduced cost,
    /// leaving row by minimum ratio with lowest basic index on ties.
    fn run_phase(&mut self, cost: &[f64], banned: &[bool]) -> Result<usize> {
        let m = self.body.len();
        let mut red: Vec<f64> = (0..self.ncols)
            .map(|j| cost[j] - (0..m).map(|r| cost[self.basis[r]] * self.body[r][j]).sum::<f64>())
            .collect();
        let mut pivots = 0usize;
        loop {
            let enter = (0..self.ncols).find(|&j| !banned[j] && red[j] < -RED_TOL);
            let Some(e) = enter else {
                return Ok(pivots);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = self.body[r][e];
                if a > PIV_TOL {
                    let ratio = self.body[r][self.ncols] / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Infeasible("objective is unbounded below".into()));
            };
            self.pivot(r, e);
            let re = red[e];
            for j in 0..self.ncols {
                red[j] -= re * self.body[r][j];
            }
            pivots += 1;
            if pivots > 50_000 {
                return Err(Error::Infeasible("simplex did not terminate".into()));
            }
        }
    }

    fn solution(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.body[r][self.ncols];
            }
        }
        x
    }
}

struct LpOutcome {
    x: Vec<f64>,
    value: f64,
    has_alternative: bool,
    pivots: usize,
}

/// `min cᵀx  s.t.  ge·x ≥ 1 per row, eq·x = eq_rhs per row, x ≥ 0`.
/// Right-hand sides must be nonnegative.
fn solve_lp(c: &[f64], ge: &[Vec<f64>], eq: &[(Vec<f64>, f64)]) -> Result<LpOutcome> {
    let n = c.len();
    let mge = ge.len();
    let m = mge + eq.len();
    let ncols = n + mge + m; // variables, surplus, artificials
    let mut body = Vec::with_capacity(m);
    for (i, row) in ge.iter().enumerate() {
        let mut r = vec![0.0; ncols + 1];
        r[..n].copy_from_slice(row);
        r[n + i] = -1.0;
        r[n + mge + i] = 1.0;
        r[ncols] = 1.0;
        body.push(r);
    }
    for (i, (row, rhs)) in eq.iter().enumerate() {
        debug_assert!(*rhs >= 0.0);
        let mut r = vec![0.0; ncols + 1];
        r[..n].copy_from_slice(row);
        r[n + mge + mge + i] = 1.0;
        r[ncols] = *rhs;
        body.push(r);
    }
    let basis: Vec<usize> = (0..m).map(|i| n + mge + i).collect();
    let mut t = Tableau { body, basis, ncols };

    let phase1: Vec<f64> = (0..ncols).map(|j| if j >= n + mge { 1.0 } else { 0.0 }).collect();
    let no_ban = vec![false; ncols];
    let mut pivots = t.run_phase(&phase1, &no_ban)?;
    let infeas: f64 = (0..m)
        .filter(|&r| t.basis[r] >= n + mge)
        .map(|r| t.body[r][ncols])
        .sum();
    let scale = 1.0 + eq.iter().map(|(_, b)| b.abs()).fold(1.0, f64::max);
    if infeas > 1e-7 * scale {
        return Err(Error::Infeasible(format!(
            "phase 1 ended with residual {infeas:.3e}"
        )));
    }
    // Drive basic artificials out; a row with no real entry is redundant.
    let mut drop_rows: Vec<usize> = Vec::new();
    for r in 0..m {
        if t.basis[r] >= n + mge {
            let e = (0..n + mge).find(|&j| t.body[r][j].abs() > 1e-9);
            match e {
                Some(e) => {
                    t.pivot(r, e);
                    pivots += 1;
                }
                None => drop_rows.push(r),
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        t.body.remove(r);
        t.basis.remove(r);
    }
    let banned: Vec<bool> = (0..ncols).map(|j| j >= n + mge).collect();
    let mut cost = vec![0.0; ncols];
    cost[..n].copy_from_slice(c);
    pivots += t.run_phase(&cost, &banned)?;

    let x = t.solution(n);
    let value = dot(c, &x);
    let m2 = t.body.len();
    let red = |j: usize| -> f64 {
        cost[j] - (0..m2).map(|r| cost[t.basis[r]] * t.body[r][j]).sum::<f64>()
    };
    let basic: Vec<bool> = {
        let mut b = vec![false; ncols];
        for &j in &t.basis {
            b[j] = true;
        }
        b
    };
    let has_alternative = (0..n + mge).any(|j| !basic[j] && red(j).abs() <= RED_TOL);
    Ok(LpOutcome { x, value, has_alternative, pivots })
}

/// `p = 1` path: simplex, plus sequential lexicographic minimization over the
/// optimal face when the vertex is not unique.
fn solve_linear(mass: &[f64], rows: &[Vec<f64>]) -> Result<(Vec<f64>, bool, usize)> {
    let n = mass.len();
    let first = solve_lp(mass, rows, &[])?;
    let mut pivots = first.pivots;
    if !first.has_alternative {
        return Ok((first.x, false, pivots));
    }
    let mut eq: Vec<(Vec<f64>, f64)> = vec![(mass.to_vec(), first.value)];
    let mut refined = vec![0.0; n];
    for j in 0..n {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        let stage = solve_lp(&c, rows, &eq)?;
        pivots += stage.pivots;
        let v = stage.value.max(0.0);
        refined[j] = v;
        let mut pin = vec![0.0; n];
        pin[j] = 1.0;
        eq.push((pin, v));
    }
    let moved = refined
        .iter()
        .zip(&first.x)
        .any(|(&a, &b)| (a - b).abs() > 1e-9 * (1.0 + b.abs()));
    Ok((refined, moved, pivots))
}

// ---------------------------------------------------------------------------
// p = 2: primal active-set QP.

const QP_TOL: f64 = 1e-11;

fn solve_quadratic(mass: &[f64], rows: &[Vec<f64>]) -> Result<(Vec<f64>, usize)> {
    let n = mass.len();
    let m = rows.len();
    // Feasible start: the smallest constant density satisfying every row.
    let c0 = rows
        .iter()
        .map(|r| 1.0 / r.iter().sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut rho = vec![c0; n];
    let mut active: Vec<usize> = Vec::new(); // working inequality rows
    let mut fixed = vec![false; n]; // coordinates pinned at zero

    for iter in 0..10 * (n + m) + 100 {
        let free: Vec<usize> = (0..n).filter(|&j| !fixed[j]).collect();
        let nf = free.len();
        let k = active.len();
        // KKT system [2D A_Wᵀ; A_W 0] on the free coordinates.
        let mut kkt = vec![vec![0.0; nf + k]; nf + k];
        let mut rhs = vec![0.0; nf + k];
        for (fj, &j) in free.iter().enumerate() {
            kkt[fj][fj] = 2.0 * mass[j];
        }
        for (wi, &i) in active.iter().enumerate() {
            for (fj, &j) in free.iter().enumerate() {
                kkt[fj][nf + wi] = rows[i][j];
                kkt[nf + wi][fj] = rows[i][j];
            }
            rhs[nf + wi] = 1.0;
        }
        let sol = lu_solve(kkt, rhs).ok_or_else(|| {
            Error::Infeasible("degenerate working set in the active-set method".into())
        })?;
        let mut cand = vec![0.0; n];
        for (fj, &j) in free.iter().enumerate() {
            cand[j] = sol[fj];
        }
        let nu = &sol[nf..];

        let gap = cand
            .iter()
            .zip(&rho)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if gap <= QP_TOL * (1.0 + c0) {
            // Multipliers: λ = −ν on rows, μ_j = (A_Wᵀν)_j on pinned coords.
            let mut worst = 0.0f64;
            let mut drop: Option<usize> = None; // global index: rows then bounds
            for (wi, &i) in active.iter().enumerate() {
                let lambda = -nu[wi];
                if lambda < worst {
                    worst = lambda;
                    drop = Some(i);
                }
            }
            for j in 0..n {
                if fixed[j] {
                    let mu: f64 = active
                        .iter()
                        .enumerate()
                        .map(|(wi, &i)| nu[wi] * rows[i][j])
                        .sum();
                    if mu < worst {
                        worst = mu;
                        drop = Some(m + j);
                    }
                }
            }
            if worst >= -1e-10 {
                return Ok((rho, iter + 1));
            }
            match drop.unwrap() {
                g if g < m => active.retain(|&i| i != g),
                g => fixed[g - m] = false,
            }
            continue;
        }

        // Step toward the candidate, stopping at the first blocking constraint.
        let dir: Vec<f64> = cand.iter().zip(&rho).map(|(&a, &b)| a - b).collect();
        let mut alpha = 1.0f64;
        let mut block: Option<usize> = None;
        for (i, row) in rows.iter().enumerate() {
            if active.contains(&i) {
                continue;
            }
            let g = dot(row, &dir);
            if g < -QP_TOL {
                let a = (1.0 - dot(row, &rho)) / g;
                if a < alpha - 1e-14 {
                    alpha = a.max(0.0);
                    block = Some(i);
                }
            }
        }
        for j in 0..n {
            if !fixed[j] && dir[j] < -QP_TOL {
                let a = -rho[j] / dir[j];
                if a < alpha - 1e-14 {
                    alpha = a.max(0.0);
                    block = Some(m + j);
                }
            }
        }
        for (j, r) in rho.iter_mut().enumerate() {
            *r += alpha * dir[j];
        }
        match block {
            Some(g) if g < m => active.push(g),
            Some(g) => {
                fixed[g - m] = true;
                rho[g - m] = 0.0;
            }
            None => {} // full step to the candidate
        }
        active.sort_unstable();
    }
    Err(Error::Infeasible("active-set method did not terminate".into()))
}

// ---------------------------------------------------------------------------
// General p: log-barrier Newton descent with an active-set polish.

const MU_MIN: f64 = 1e-13;
const NEWTON_PER_STAGE: usize = 50;

/// Damped-Newton log-barrier descent for exponents off the linear and
/// quadratic fast paths. The barrier keeps the Hessian positive definite
/// even where the energy's own curvature degenerates (entries at zero with
/// `p > 2`), and the final active-set polish removes the residual `O(μ)`
/// optimality gap.
fn solve_interior(mass: &[f64], rows: &[Vec<f64>], p: f64) -> Result<(Vec<f64>, usize)> {
    let n = mass.len();
    let energy =
        |rho: &[f64]| -> f64 { mass.iter().zip(rho).map(|(&m, &r)| m * r.powf(p)).sum() };
    // Pull a strictly feasible point onto the boundary: every normalized row
    // has a positive entry, so scaling by the worst row value is exact.
    let restore = |rho: &mut Vec<f64>| {
        for r in rho.iter_mut() {
            if !(*r >= 0.0) {
                *r = 0.0;
            }
        }
        let worst = rows.iter().map(|row| dot(row, rho)).fold(f64::INFINITY, f64::min);
        if worst.is_finite() && worst > 0.0 && worst != 1.0 {
            for r in rho.iter_mut() {
                *r /= worst;
            }
        }
    };
    let barrier = |rho: &[f64], mu: f64| -> Option<f64> {
        let mut v = energy(rho);
        for row in rows {
            let s = dot(row, rho) - 1.0;
            if s <= 0.0 {
                return None;
            }
            v -= mu * s.ln();
        }
        for &r in rho {
            if r <= 0.0 {
                return None;
            }
            v -= mu * r.ln();
        }
        Some(v)
    };

    // Interior start on the uniform ray.
    let min_rowsum = rows
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let mut rho = vec![1.02 / min_rowsum; n];
    let mut iters = 0usize;
    let terms = (rows.len() + n) as f64;
    let mut mu = (energy(&rho) / terms).max(1e-3);

    while mu > MU_MIN {
        for _ in 0..NEWTON_PER_STAGE {
            iters += 1;
            let mut grad: Vec<f64> = (0..n)
                .map(|j| p * mass[j] * rho[j].powf(p - 1.0) - mu / rho[j])
                .collect();
            let mut hess = vec![vec![0.0; n]; n];
            for j in 0..n {
                hess[j][j] =
                    p * (p - 1.0) * mass[j] * rho[j].powf(p - 2.0) + mu / (rho[j] * rho[j]);
            }
            for row in rows {
                let s = dot(row, &rho) - 1.0;
                let c = mu / (s * s);
                for j in 0..n {
                    if row[j] == 0.0 {
                        continue;
                    }
                    grad[j] -= mu * row[j] / s;
                    for k in j..n {
                        let v = c * row[j] * row[k];
                        hess[j][k] += v;
                        if k != j {
                            hess[k][j] += v;
                        }
                    }
                }
            }
            let neg: Vec<f64> = grad.iter().map(|&g| -g).collect();
            let Some(dir) = lu_solve(hess, neg) else { break };
            let descent = dot(&grad, &dir);
            let f0 = barrier(&rho, mu).expect("iterates stay strictly feasible");
            if !(descent < 0.0) || -descent <= 1e-13 * f0.abs().max(1.0) {
                break;
            }
            let mut accepted = false;
            let mut t = 1.0f64;
            for _ in 0..60 {
                let cand: Vec<f64> = rho.iter().zip(&dir).map(|(r, &d)| r + t * d).collect();
                if let Some(fc) = barrier(&cand, mu) {
                    if fc <= f0 + 0.25 * t * descent {
                        rho = cand;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        mu *= 0.2;
    }

    restore(&mut rho);
    let mut best = rho.clone();
    let mut best_energy = energy(&best);
    if let Some(polished) = newton_polish(mass, rows, &rho, p) {
        let mut cand = polished;
        restore(&mut cand);
        let e = energy(&cand);
        if e.is_finite() && e < best_energy {
            best_energy = e;
            best = cand;
        }
    }
    debug_assert!(best_energy.is_finite());
    Ok((best, iters))
}

/// Newton iteration for the equality-constrained problem on the active set
/// identified at `rho`. `None` when the working set is degenerate or the
/// iteration leaves the positive orthant.
fn newton_polish(mass: &[f64], rows: &[Vec<f64>], rho: &[f64], p: f64) -> Option<Vec<f64>> {
    let n = mass.len();
    let scale = rho.iter().fold(0.0f64, |a, &b| a.max(b));
    let free: Vec<usize> = (0..n).filter(|&j| rho[j] > 1e-8 * (1.0 + scale)).collect();
    let active: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, row)| dot(row, rho) <= 1.0 + 1e-6)
        .map(|(i, _)| i)
        .collect();
    if active.is_empty() || active.len() > free.len() {
        return None;
    }
    let nf = free.len();
    let k = active.len();
    let mut x: Vec<f64> = free.iter().map(|&j| rho[j]).collect();
    for _ in 0..60 {
        let mut kkt = vec![vec![0.0; nf + k]; nf + k];
        let mut rhs = vec![0.0; nf + k];
        for (fj, &j) in free.iter().enumerate() {
            kkt[fj][fj] = p * (p - 1.0) * mass[j] * x[fj].powf(p - 2.0);
            rhs[fj] = -p * mass[j] * x[fj].powf(p - 1.0);
        }
        for (wi, &i) in active.iter().enumerate() {
            let mut axi = 0.0;
            for (fj, &j) in free.iter().enumerate() {
                kkt[fj][nf + wi] = rows[i][j];
                kkt[nf + wi][fj] = rows[i][j];
                axi += rows[i][j] * x[fj];
            }
            rhs[nf + wi] = 1.0 - axi;
        }
        let sol = lu_solve(kkt, rhs)?;
        let delta = &sol[..nf];
        // Stay strictly inside the positive orthant.
        let mut step = 1.0f64;
        for (fj, &d) in delta.iter().enumerate() {
            if d < 0.0 {
                step = step.min(-0.95 * x[fj] / d);
            }
        }
        let mut moved = 0.0f64;
        for (fj, &d) in delta.iter().enumerate() {
            x[fj] += step * d;
            moved = moved.max((step * d).abs());
        }
        if moved <= 1e-14 * (1.0 + scale) {
            break;
        }
    }
    let mut out = vec![0.0; n];
    for (fj, &j) in free.iter().enumerate() {
        if !(x[fj] >= 0.0) {
            return None;
        }
        out[j] = x[fj];
    }
    Some(out)
}
