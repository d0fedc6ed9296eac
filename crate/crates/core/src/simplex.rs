//! Bounded-variable primal simplex for equality-form models.
//!
//! Phase 1 minimizes the sum of one artificial column per row; phase 2 keeps
//! the artificials at zero and optimizes the real objective. The basis is
//! held as an LU factorization with sparse factors plus a product-form eta
//! file, rebuilt every [`SolverConfig::refactor_interval`] pivots. Pricing is Dantzig's
//! rule until a run of degenerate pivots exceeds `stall_factor × rows`, then
//! Bland's rule until the objective moves again.

use crate::lp::LpModel;

/// Numerical tolerances shared by the solvers and checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed bound and row violation.
    pub feasibility: f64,
    /// Reduced cost threshold for entering candidates.
    pub optimality: f64,
    /// Distance from {0, 1} accepted as integral.
    pub integrality: f64,
    /// Smallest admissible pivot element.
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-8,
            optimality: 1e-9,
            integrality: 1e-6,
            pivot: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tolerances: Tolerances,
    pub refactor_interval: usize,
    pub stall_factor: usize,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            refactor_interval: 100,
            stall_factor: 5,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Primal value per model column.
    pub values: Vec<f64>,
    /// Row duals of the final basis.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimplexError {
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("basis became numerically singular")]
    Singular,
    #[error("column {0} has no finite bound; free columns are not supported")]
    FreeColumn(usize),
    #[error("column {0} has lower bound above upper bound")]
    EmptyBounds(usize),
}

pub fn solve(model: &LpModel) -> Result<LpSolution, SimplexError> {
    solve_with(model, &SolverConfig::default())
}

pub fn solve_with(model: &LpModel, config: &SolverConfig) -> Result<LpSolution, SimplexError> {
    let mut simplex = Simplex::new(model, config)?;
    simplex.run()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

/// LU factors of the basis with row permutation. Elimination runs on a
/// dense array but skips structural zeros; the factors are then kept as
/// sparse rows, so solves cost O(nnz).
struct LuFactors {
    dim: usize,
    /// Strictly lower part of `L` (unit diagonal), by row.
    lower: Vec<Vec<(usize, f64)>>,
    /// Strictly upper part of `U`, by row.
    upper: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    /// `perm[i]` = original row placed at position `i`.
    perm: Vec<usize>,
}

impl LuFactors {
    fn factor(dim: usize, mut a: Vec<f64>, tol: f64) -> Option<Self> {
        let mut perm: Vec<usize> = (0..dim).collect();
        let mut nonzero = Vec::with_capacity(dim);
        for k in 0..dim {
            let (p, best) = (k..dim)
                .map(|i| (i, a[i * dim + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= tol {
                return None;
            }
            if p != k {
                for j in 0..dim {
                    a.swap(k * dim + j, p * dim + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * dim + k];
            let (head, tail) = a.split_at_mut((k + 1) * dim);
            let row_k = &head[k * dim..];
            nonzero.clear();
            nonzero.extend((k + 1..dim).filter(|&j| row_k[j] != 0.0));
            for row in tail.chunks_exact_mut(dim) {
                let f = row[k] / pivot;
                if f != 0.0 {
                    row[k] = f;
                    for &j in &nonzero {
                        row[j] -= f * row_k[j];
                    }
                }
            }
        }
        let mut lower = Vec::with_capacity(dim);
        let mut upper = Vec::with_capacity(dim);
        let mut diag = Vec::with_capacity(dim);
        for i in 0..dim {
            let row = &a[i * dim..(i + 1) * dim];
            let pick = |r: std::ops::Range<usize>| -> Vec<(usize, f64)> {
                r.filter(|&j| row[j] != 0.0).map(|j| (j, row[j])).collect()
            };
            lower.push(pick(0..i));
            upper.push(pick(i + 1..dim));
            diag.push(row[i]);
        }
        Some(Self {
            dim,
            lower,
            upper,
            diag,
            perm,
        })
    }

    /// Solves `B x = rhs` in place.
    fn solve(&self, rhs: &mut [f64]) {
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..self.dim {
            let s: f64 = self.lower[i].iter().map(|&(j, l)| l * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..self.dim).rev() {
            let s: f64 = self.upper[i].iter().map(|&(j, u)| u * x[j]).sum();
            x[i] = (x[i] - s) / self.diag[i];
        }
        rhs.copy_from_slice(&x);
    }

    /// Solves `Bᵀ y = rhs` in place.
    fn solve_transpose(&self, rhs: &mut [f64]) {
        let mut z = rhs.to_vec();
        for i in 0..self.dim {
            z[i] /= self.diag[i];
            let zi = z[i];
            if zi != 0.0 {
                for &(j, u) in &self.upper[i] {
                    z[j] -= u * zi;
                }
            }
        }
        for i in (0..self.dim).rev() {
            let zi = z[i];
            if zi != 0.0 {
                for &(j, l) in &self.lower[i] {
                    z[j] -= l * zi;
                }
            }
        }
        for (i, &p) in self.perm.iter().enumerate() {
            rhs[p] = z[i];
        }
    }
}

/// Elementary column transform recorded for one pivot.
struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

struct Simplex<'a> {
    config: &'a SolverConfig,
    rows: usize,
    structural: usize,
    /// Column-wise coefficients, artificials appended after the model columns.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    model_cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    iterations: usize,
}

impl<'a> Simplex<'a> {
    fn new(model: &LpModel, config: &'a SolverConfig) -> Result<Self, SimplexError> {
        let rows = model.row_count();
        let structural = model.column_count();
        let total = structural + rows;
        let mut cols = vec![Vec::new(); structural];
        for (i, row) in model.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        let mut lower = Vec::with_capacity(total);
        let mut upper = Vec::with_capacity(total);
        let mut x = Vec::with_capacity(total);
        let mut state = Vec::with_capacity(total);
        for (j, c) in model.columns.iter().enumerate() {
            if c.lower > c.upper {
                return Err(SimplexError::EmptyBounds(j));
            }
            lower.push(c.lower);
            upper.push(c.upper);
            if c.lower.is_finite() {
                x.push(c.lower);
                state.push(VarState::AtLower);
            } else if c.upper.is_finite() {
                x.push(c.upper);
                state.push(VarState::AtUpper);
            } else {
                return Err(SimplexError::FreeColumn(j));
            }
        }
        let rhs: Vec<f64> = model.rows.iter().map(|r| r.rhs).collect();
        let mut residual = rhs.clone();
        for (j, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                residual[i] -= a * x[j];
            }
        }
        let mut basis = Vec::with_capacity(rows);
        for (i, r) in residual.iter().enumerate() {
            let sign = if *r < 0.0 { -1.0 } else { 1.0 };
            cols.push(vec![(i, sign)]);
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push(r.abs());
            state.push(VarState::Basic(i));
            basis.push(structural + i);
        }
        let mut cost = vec![0.0; structural];
        cost.resize(total, 1.0);
        Ok(Self {
            config,
            rows,
            structural,
            cols,
            rhs,
            lower,
            upper,
            cost,
            model_cost: model.columns.iter().map(|c| c.cost).collect(),
            x,
            state,
            basis,
            lu: None,
            etas: Vec::new(),
            iterations: 0,
        })
    }

    fn artificials(&self) -> std::ops::Range<usize> {
        self.structural..self.structural + self.rows
    }

    fn run(&mut self) -> Result<LpSolution, SimplexError> {
        self.refactor()?;
        let bounded = self.optimize()?;
        debug_assert!(bounded, "phase 1 is bounded below by zero");
        let infeasibility: f64 = self.artificials().map(|j| self.x[j]).sum();
        let scale = 1.0 + self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if infeasibility > self.config.tolerances.feasibility * scale {
            return Ok(self.finish(LpStatus::Infeasible));
        }

        // Artificials are pinned to zero; basic ones leave on the first
        // pivot that touches their row.
        for j in self.artificials() {
            self.upper[j] = 0.0;
            self.cost[j] = 0.0;
            if !matches!(self.state[j], VarState::Basic(_)) {
                self.state[j] = VarState::AtLower;
                self.x[j] = 0.0;
            }
        }
        self.cost[..self.structural].copy_from_slice(&self.model_cost);
        self.refactor()?;
        if !self.optimize()? {
            return Ok(self.finish(LpStatus::Unbounded));
        }
        Ok(self.finish(LpStatus::Optimal))
    }

    fn finish(&self, status: LpStatus) -> LpSolution {
        let values = self.x[..self.structural].to_vec();
        let objective = values
            .iter()
            .zip(&self.model_cost)
            .map(|(v, c)| v * c)
            .sum();
        LpSolution {
            status,
            objective,
            values,
            duals: self.duals(),
            iterations: self.iterations,
        }
    }

    fn refactor(&mut self) -> Result<(), SimplexError> {
        let m = self.rows;
        let mut dense = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                dense[i * m + pos] = a;
            }
        }
        self.lu = Some(LuFactors::factor(m, dense, 1e-12).ok_or(SimplexError::Singular)?);
        self.etas.clear();

        // x_B = B⁻¹ (b − N x_N)
        let mut r = self.rhs.clone();
        for (j, col) in self.cols.iter().enumerate() {
            if !matches!(self.state[j], VarState::Basic(_)) && self.x[j] != 0.0 {
                for &(i, a) in col {
                    r[i] -= a * self.x[j];
                }
            }
        }
        self.ftran(&mut r);
        for (pos, &j) in self.basis.iter().enumerate() {
            self.x[j] = r[pos];
        }
        Ok(())
    }

    fn ftran(&self, v: &mut [f64]) {
        self.lu.as_ref().expect("factored").solve(v);
        for eta in &self.etas {
            let xr = v[eta.pos] / eta.pivot;
            if xr != 0.0 {
                for &(i, a) in &eta.entries {
                    v[i] -= a * xr;
                }
            }
            v[eta.pos] = xr;
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.entries.iter().map(|&(i, a)| a * v[i]).sum();
            v[eta.pos] = (v[eta.pos] - s) / eta.pivot;
        }
        self.lu.as_ref().expect("factored").solve_transpose(v);
    }

    fn duals(&self) -> Vec<f64> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        if self.lu.is_some() {
            self.btran(&mut y);
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        self.cost[j] - self.cols[j].iter().map(|&(i, a)| a * y[i]).sum::<f64>()
    }

    /// Runs pivots until optimal (true) or unbounded (false).
    fn optimize(&mut self) -> Result<bool, SimplexError> {
        let tol = self.config.tolerances;
        let stall_limit = self.config.stall_factor * self.rows.max(1);
        let mut degenerate_run = 0;
        let mut column = vec![0.0; self.rows];

        loop {
            if self.iterations >= self.config.max_iterations {
                return Err(SimplexError::IterationLimit(self.iterations));
            }
            let bland = degenerate_run > stall_limit;
            let y = self.duals();

            // Pricing.
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..self.cols.len() {
                let dir = match self.state[j] {
                    VarState::Basic(_) => continue,
                    _ if self.lower[j] == self.upper[j] => continue,
                    VarState::AtLower => 1.0,
                    VarState::AtUpper => -1.0,
                };
                let d = self.reduced_cost(j, &y);
                if d * dir < -tol.optimality {
                    let score = d.abs();
                    if bland {
                        entering = Some((j, dir, score));
                        break;
                    }
                    if entering.is_none_or(|(_, _, best)| score > best) {
                        entering = Some((j, dir, score));
                    }
                }
            }
            let Some((q, dir, _)) = entering else {
                return Ok(true);
            };

            column.fill(0.0);
            for &(i, a) in &self.cols[q] {
                column[i] = a;
            }
            self.ftran(&mut column);

            // Ratio test: x_B moves by -dir * t * column.
            let mut step = self.upper[q] - self.lower[q];
            let mut leaving: Option<(usize, bool)> = None;
            let mut leaving_alpha = 0.0f64;
            for (pos, &alpha) in column.iter().enumerate() {
                if alpha.abs() <= tol.pivot {
                    continue;
                }
                let j = self.basis[pos];
                let delta = -dir * alpha;
                let (limit, to_upper) = if delta < 0.0 {
                    if self.lower[j].is_infinite() {
                        continue;
                    }
                    (((self.x[j] - self.lower[j]) / -delta).max(0.0), false)
                } else {
                    if self.upper[j].is_infinite() {
                        continue;
                    }
                    (((self.upper[j] - self.x[j]) / delta).max(0.0), true)
                };
                if limit < step - 1e-12 {
                    step = limit;
                    leaving = Some((pos, to_upper));
                    leaving_alpha = alpha.abs();
                } else if limit <= step + 1e-12 {
                    if let Some((best_pos, _)) = leaving {
                        let wins = if bland {
                            j < self.basis[best_pos]
                        } else {
                            alpha.abs() > leaving_alpha
                        };
                        if wins {
                            step = step.min(limit);
                            leaving = Some((pos, to_upper));
                            leaving_alpha = alpha.abs();
                        }
                    }
                }
            }
            if step.is_infinite() {
                return Ok(false);
            }

            self.iterations += 1;
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            self.x[q] += dir * step;
            for (pos, &alpha) in column.iter().enumerate() {
                if alpha != 0.0 {
                    let j = self.basis[pos];
                    self.x[j] -= dir * step * alpha;
                }
            }

            match leaving {
                None => {
                    // Bound flip.
                    self.state[q] = if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        VarState::AtUpper
                    } else {
                        self.x[q] = self.lower[q];
                        VarState::AtLower
                    };
                }
                Some((pos, to_upper)) => {
                    let out = self.basis[pos];
                    if to_upper {
                        self.x[out] = self.upper[out];
                        self.state[out] = VarState::AtUpper;
                    } else {
                        self.x[out] = self.lower[out];
                        self.state[out] = VarState::AtLower;
                    }
                    self.basis[pos] = q;
                    self.state[q] = VarState::Basic(pos);
                    self.etas.push(Eta {
                        pos,
                        pivot: column[pos],
                        entries: column
                            .iter()
                            .enumerate()
                            .filter(|&(i, &a)| i != pos && a != 0.0)
                            .map(|(i, &a)| (i, a))
                            .collect(),
                    });
                    if self.etas.len() >= self.config.refactor_interval {
                        self.refactor()?;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_certificate(model: &LpModel, sol: &LpSolution) {
        let tol = Tolerances::default();
        assert!(model.infeasibility(&sol.values) <= tol.feasibility);
        for (j, c) in model.columns.iter().enumerate() {
            if c.is_fixed() {
                continue;
            }
            let d = c.cost
                - model
                    .rows
                    .iter()
                    .enumerate()
                    .flat_map(|(i, r)| {
                        r.coeffs
                            .iter()
                            .filter(move |&&(k, _)| k == j)
                            .map(move |&(_, a)| a * sol.duals[i])
                    })
                    .sum::<f64>();
            let v = sol.values[j];
            if (v - c.lower).abs() <= 1e-9 {
                assert!(d >= -1e-7, "column {j} at lower with reduced cost {d}");
            } else if (v - c.upper).abs() <= 1e-9 {
                assert!(d <= 1e-7, "column {j} at upper with reduced cost {d}");
            } else {
                assert!(d.abs() <= 1e-7, "basic column {j} with reduced cost {d}");
            }
        }
    }

    #[test]
    fn single_fixed_row() {
        let mut m = LpModel::default();
        let x = m.add_column("x", 0.0, 1.0, 1.0);
        m.add_row("r", vec![(x, 1.0)], 1.0);
        let sol = solve(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 1.0);
        assert_eq!(sol.values, vec![1.0]);
    }

    #[test]
    fn dominance() {
        let mut m = LpModel::default();
        let x = m.add_column("x", 0.0, 1.0, 1.0);
        let y = m.add_column("y", 0.0, 1.0, 2.0);
        m.add_row("r", vec![(x, 1.0), (y, 1.0)], 1.0);
        let sol = solve(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 1.0);
        assert_eq!(sol.values, vec![1.0, 0.0]);
        check_certificate(&m, &sol);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut m = LpModel::default();
        let x = m.add_column("x", 0.0, 1.0, 1.0);
        m.add_row("r", vec![(x, 1.0)], 2.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Infeasible);

        let mut m = LpModel::default();
        let x = m.add_column("x", 0.0, f64::INFINITY, -1.0);
        let y = m.add_column("y", 0.0, f64::INFINITY, 0.0);
        m.add_row("r", vec![(x, 1.0), (y, -1.0)], 0.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn upper_bound_start_and_bound_flips() {
        // max x + y with x + y + s = 1.5, all in [0, 1]
        let mut m = LpModel::default();
        let x = m.add_column("x", 0.0, 1.0, -1.0);
        let y = m.add_column("y", 0.0, 1.0, -1.0);
        let s = m.add_column("s", f64::NEG_INFINITY, 1.0, 0.0);
        m.add_row("r", vec![(x, 1.0), (y, 1.0), (s, 1.0)], 1.5);
        let sol = solve(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 2.0).abs() < 1e-12);
        check_certificate(&m, &sol);
    }

    #[test]
    fn redundant_rows() {
        let mut m = LpModel::default();
        let x = m.add_column("x", 0.0, 1.0, 1.0);
        let y = m.add_column("y", 0.0, 1.0, 1.0);
        m.add_row("a", vec![(x, 1.0), (y, 1.0)], 1.0);
        m.add_row("b", vec![(x, 2.0), (y, 2.0)], 2.0);
        let sol = solve(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    /// Assignment problems are massively degenerate; exercise the Bland
    /// fallback and compare against brute force over permutations.
    #[test]
    fn degenerate_assignment_battery() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let k = 4;
            let cost: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..k).map(|_| rng.gen_range(0..4) as f64).collect())
                .collect();
            let mut m = LpModel::default();
            for i in 0..k {
                for j in 0..k {
                    m.add_column(format!("x{i}{j}"), 0.0, 1.0, cost[i][j]);
                }
            }
            for i in 0..k {
                m.add_row(
                    format!("r{i}"),
                    (0..k).map(|j| (i * k + j, 1.0)).collect(),
                    1.0,
                );
                m.add_row(
                    format!("c{i}"),
                    (0..k).map(|j| (j * k + i, 1.0)).collect(),
                    1.0,
                );
            }
            let config = SolverConfig {
                stall_factor: 0,
                refactor_interval: 3,
                ..SolverConfig::default()
            };
            let sol = solve_with(&m, &config).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            let mut best = f64::INFINITY;
            let mut perm = [0, 1, 2, 3];
            permutations(&mut perm, 0, &mut |p| {
                best = best.min((0..k).map(|i| cost[i][p[i]]).sum());
            });
            assert!((sol.objective - best).abs() < 1e-9);
            check_certificate(&m, &sol);
        }
    }

    fn permutations(p: &mut [usize; 4], at: usize, f: &mut impl FnMut(&[usize; 4])) {
        if at == p.len() {
            f(p);
            return;
        }
        for i in at..p.len() {
            p.swap(at, i);
            permutations(p, at + 1, f);
            p.swap(at, i);
        }
    }
}
