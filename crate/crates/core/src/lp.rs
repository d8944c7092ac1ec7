//! Exact two-phase primal simplex over rationals with Bland's rule.
//!
//! Solves `max cᵀx s.t. Gx ≤ h, x ≥ 0`. Rows with a negative right-hand side
//! are flipped and given an artificial variable; phase one drives the
//! artificials to zero, phase two optimizes the real objective. Pivoting
//! always takes the lowest eligible column and breaks ratio ties by the
//! lowest basic variable, so the sequence of bases is fully determined by
//! the input.

use num::{One, Signed, Zero};

use crate::error::{check_len, Result};
use crate::ip::IntegerProgram;
use crate::rational::{self, int, Rational};

/// A single `αᵀx ≤ β` row appended to a relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Row {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self { coeffs, rhs }
    }

    /// `x[var] ≤ value`.
    pub fn upper(n: usize, var: usize, value: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs[var] = Rational::one();
        Self { coeffs, rhs: value }
    }

    /// `x[var] ≥ value`, stored as `-x[var] ≤ -value`.
    pub fn lower(n: usize, var: usize, value: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs[var] = -Rational::one();
        Self { coeffs, rhs: -value }
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        rational::dot(&self.coeffs, x) <= self.rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Present only when `status` is `Optimal`.
    pub solution: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
}

impl LpOutcome {
    fn without_solution(status: LpStatus) -> Self {
        Self {
            status,
            solution: None,
            objective: None,
        }
    }
}

/// LP relaxation of `ip` with its variable upper bounds and `extra_rows`.
pub fn solve_relaxation(ip: &IntegerProgram, extra_rows: &[Row]) -> Result<LpOutcome> {
    let n = ip.n();
    let mut rows: Vec<Row> = ip
        .a()
        .iter()
        .zip(ip.b())
        .map(|(a, b)| Row::new(a.clone(), b.clone()))
        .collect();
    if let Some(ub) = ip.upper_bounds() {
        rows.extend(
            ub.iter()
                .enumerate()
                .map(|(i, &u)| Row::upper(n, i, int(u as i64))),
        );
    }
    for row in extra_rows {
        check_len("extra row", n, row.coeffs.len())?;
        rows.push(row.clone());
    }
    Ok(solve(ip.c(), &rows))
}

/// Solves `max cᵀx s.t. rows, x ≥ 0`. Row lengths must equal `c.len()`.
pub fn solve(c: &[Rational], rows: &[Row]) -> LpOutcome {
    Tableau::build(c, rows).run()
}

struct Tableau {
    n: usize,
    /// Constraint rows; the last entry of each row is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// First artificial column; columns at or beyond it are artificial.
    art_start: usize,
    cols: usize,
    c: Vec<Rational>,
}

impl Tableau {
    fn build(c: &[Rational], rows: &[Row]) -> Self {
        let n = c.len();
        let m = rows.len();
        let n_art = rows.iter().filter(|r| r.rhs.is_negative()).count();
        let art_start = n + m;
        let cols = art_start + n_art;
        let mut t = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_art = art_start;
        for (i, row) in rows.iter().enumerate() {
            let mut r = vec![Rational::zero(); cols + 1];
            let flip = row.rhs.is_negative();
            for (j, a) in row.coeffs.iter().enumerate() {
                r[j] = if flip { -a } else { a.clone() };
            }
            r[n + i] = if flip { -Rational::one() } else { Rational::one() };
            r[cols] = if flip { -&row.rhs } else { row.rhs.clone() };
            if flip {
                r[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(n + i);
            }
            t.push(r);
        }
        Self {
            n,
            t,
            basis,
            art_start,
            cols,
            c: c.to_vec(),
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        if !p.is_one() {
            for v in self.t[row].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs `cost_j − Σ cost_B·t_j` for the allowed columns.
    fn reduced_costs(&self, cost: &[Rational], allowed: usize) -> Vec<Rational> {
        (0..allowed)
            .map(|j| {
                let z = self
                    .t
                    .iter()
                    .zip(&self.basis)
                    .filter(|(r, _)| !r[j].is_zero())
                    .fold(Rational::zero(), |acc, (r, &b)| acc + &cost[b] * &r[j]);
                &cost[j] - z
            })
            .collect()
    }

    /// Maximizes `cost` over the current basis, entering only columns below
    /// `allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let reduced = self.reduced_costs(cost, allowed);
            let Some(col) = reduced.iter().position(|d| d.is_positive()) else {
                return true;
            };
            let rhs = self.cols;
            let mut best: Option<(usize, Rational)> = None;
            for (i, r) in self.t.iter().enumerate() {
                if !r[col].is_positive() {
                    continue;
                }
                let ratio = &r[rhs] / &r[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn run(mut self) -> LpOutcome {
        if self.art_start < self.cols {
            let mut cost = vec![Rational::zero(); self.cols];
            for v in &mut cost[self.art_start..] {
                *v = -Rational::one();
            }
            self.optimize(&cost, self.cols);
            let infeasible = self
                .t
                .iter()
                .zip(&self.basis)
                .any(|(r, &b)| b >= self.art_start && !r[self.cols].is_zero());
            if infeasible {
                return LpOutcome::without_solution(LpStatus::Infeasible);
            }
            self.expel_artificials();
        }

        let mut cost = vec![Rational::zero(); self.cols];
        cost[..self.n].clone_from_slice(&self.c);
        if !self.optimize(&cost, self.art_start) {
            return LpOutcome::without_solution(LpStatus::Unbounded);
        }

        let mut x = vec![Rational::zero(); self.n];
        for (r, &b) in self.t.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = r[self.cols].clone();
            }
        }
        let objective = rational::dot(&self.c, &x);
        LpOutcome {
            status: LpStatus::Optimal,
            solution: Some(x),
            objective: Some(objective),
        }
    }

    /// Pivots zero-valued artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= self.art_start {
                match (0..self.art_start).find(|&j| !self.t[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.t.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
