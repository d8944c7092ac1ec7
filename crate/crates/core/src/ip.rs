//! Canonical-form integer programs `max cᵀx s.t. Ax ≤ b, x ≥ 0, x ∈ Zⁿ`,
//! seeded instance generators, and the brute-force integer-point oracle.

use std::fmt::Write as _;

use num::{BigInt, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, invalid, Error, Result};
use crate::rational::{self, int, Rational};

/// Default cap on the number of box points the oracle will visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerProgram {
    c: Vec<Rational>,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    upper_bounds: Option<Vec<u64>>,
}

impl IntegerProgram {
    /// Builds an instance from the objective, the constraint rows and the
    /// right-hand side. `upper_bounds`, when present, bounds every variable
    /// from above.
    pub fn new(
        c: Vec<Rational>,
        a: Vec<Vec<Rational>>,
        b: Vec<Rational>,
        upper_bounds: Option<Vec<u64>>,
    ) -> Result<Self> {
        let n = c.len();
        if n == 0 {
            return Err(invalid("an integer program needs at least one variable"));
        }
        check_len("right-hand side", a.len(), b.len())?;
        for row in &a {
            check_len("constraint row", n, row.len())?;
        }
        if let Some(ub) = &upper_bounds {
            check_len("upper bounds", n, ub.len())?;
        }
        Ok(Self {
            c,
            a,
            b,
            upper_bounds,
        })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// Constraint rows.
    pub fn a(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn upper_bounds(&self) -> Option<&[u64]> {
        self.upper_bounds.as_deref()
    }

    pub fn with_upper_bounds(mut self, ub: Vec<u64>) -> Result<Self> {
        check_len("upper bounds", self.n(), ub.len())?;
        self.upper_bounds = Some(ub);
        Ok(self)
    }

    /// Column `i` of `A`, i.e. the coefficients of variable `i` over all rows.
    pub fn column(&self, i: usize) -> Vec<Rational> {
        self.a.iter().map(|row| row[i].clone()).collect()
    }

    /// `‖aᵢ‖₁` for column `i`.
    pub fn column_norm(&self, i: usize) -> Rational {
        self.a
            .iter()
            .fold(Rational::zero(), |acc, row| acc + row[i].abs())
    }

    /// `‖A‖₁,₁`, the sum of absolute values of all entries.
    pub fn matrix_norm(&self) -> Rational {
        (0..self.n()).fold(Rational::zero(), |acc, i| acc + self.column_norm(i))
    }

    /// `‖b‖₁`.
    pub fn rhs_norm(&self) -> Rational {
        rational::l1_norm(&self.b)
    }

    /// True when `x` satisfies `Ax ≤ b` and `x ≥ 0` (bounds are not checked).
    pub fn satisfies(&self, x: &[i64]) -> bool {
        if x.iter().any(|&v| v < 0) {
            return false;
        }
        let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        self.a
            .iter()
            .zip(&self.b)
            .all(|(row, rhs)| rational::dot(row, &xr) <= *rhs)
    }

    /// Serializes to the plain-text instance format.
    pub fn to_text(&self) -> String {
        let join = |v: &[Rational]| {
            v.iter()
                .map(rational::render)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n(), self.m());
        let _ = writeln!(out, "{}", join(&self.c));
        for row in &self.a {
            let _ = writeln!(out, "{}", join(row));
        }
        let _ = writeln!(out, "{}", join(&self.b));
        if let Some(ub) = &self.upper_bounds {
            let vals: Vec<String> = ub.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "bounds {}", vals.join(" "));
        }
        out
    }

    /// Parses the plain-text instance format. Blank lines and lines starting
    /// with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .peekable();

        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let rationals = |line: usize, s: &str, expect: usize| -> Result<Vec<Rational>> {
            let vals = s
                .split_whitespace()
                .map(rational::parse)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| parse_err(line, e.to_string()))?;
            if vals.len() != expect {
                return Err(parse_err(
                    line,
                    format!("expected {expect} values, found {}", vals.len()),
                ));
            }
            Ok(vals)
        };

        let (line, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty instance".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(line, format!("bad header {header:?}")))?;
        let [n, m] = dims[..] else {
            return Err(parse_err(line, "header must be `n m`".into()));
        };

        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| parse_err(0, format!("missing {what}")))
        };
        let (line, s) = next("objective")?;
        let c = rationals(line, s, n)?;
        let mut a = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, s) = next("constraint row")?;
            a.push(rationals(line, s, n)?);
        }
        let b = if m > 0 {
            let (line, s) = next("right-hand side")?;
            rationals(line, s, m)?
        } else {
            Vec::new()
        };

        let mut upper_bounds = None;
        if let Some((line, s)) = lines.next() {
            let mut toks = s.split_whitespace();
            if toks.next() != Some("bounds") {
                return Err(parse_err(line, format!("unexpected line {s:?}")));
            }
            let ub = toks
                .map(|t| t.parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| parse_err(line, "bounds must be nonnegative integers".into()))?;
            if ub.len() != n {
                return Err(parse_err(
                    line,
                    format!("expected {n} bounds, found {}", ub.len()),
                ));
            }
            upper_bounds = Some(ub);
        }
        if let Some((line, s)) = lines.next() {
            return Err(parse_err(line, format!("trailing content {s:?}")));
        }
        Self::new(c, a, b, upper_bounds)
    }
}

/// The parity instance `2Σx = n`, `x ∈ {0,1}ⁿ` written as two inequalities,
/// with a zero objective. Integer-infeasible for odd `n`.
pub fn jeroslow(n: usize) -> Result<IntegerProgram> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(invalid(format!(
            "the parity instance needs an odd n >= 3, got {n}"
        )));
    }
    let c = vec![Rational::zero(); n];
    let a = vec![vec![int(2); n], vec![int(-2); n]];
    let b = vec![int(n as i64), int(-(n as i64))];
    IntegerProgram::new(c, a, b, Some(vec![1; n]))
}

/// Random packing instance: `A ∈ [0, coeff_max]`, `b ∈ [1, n·coeff_max]`,
/// `c ∈ [1, coeff_max]`, every variable bounded by `n·coeff_max`.
pub fn random_packing(seed: u64, n: usize, m: usize, coeff_max: u64) -> Result<IntegerProgram> {
    if n == 0 || m == 0 {
        return Err(invalid("random packing needs n >= 1 and m >= 1"));
    }
    if coeff_max == 0 {
        return Err(invalid("coeff_max must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cmax = coeff_max as i64;
    let b_max = n as i64 * cmax;
    let a: Vec<Vec<Rational>> = (0..m)
        .map(|_| (0..n).map(|_| int(rng.gen_range(0..=cmax))).collect())
        .collect();
    let b: Vec<Rational> = (0..m).map(|_| int(rng.gen_range(1..=b_max))).collect();
    let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(1..=cmax))).collect();
    IntegerProgram::new(c, a, b, Some(vec![b_max as u64; n]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPointSet {
    pub points: Vec<Vec<i64>>,
}

impl IntegerPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Every integer point of `[0, box]` satisfying `Ax ≤ b`, in lexicographic
/// order (last coordinate fastest).
pub fn enumerate_integer_points(
    ip: &IntegerProgram,
    bounds: &[u64],
    budget: u128,
) -> Result<IntegerPointSet> {
    check_len("enumeration box", ip.n(), bounds.len())?;
    let size = bounds
        .iter()
        .try_fold(1u128, |acc, &u| acc.checked_mul(u as u128 + 1))
        .unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::OracleTooLarge { size, budget });
    }

    // Scale each row to integers so the inner loop stays in BigInt.
    let rows: Vec<(Vec<BigInt>, BigInt)> = ip
        .a()
        .iter()
        .zip(ip.b())
        .map(|(row, rhs)| {
            let lcm = row
                .iter()
                .chain(std::iter::once(rhs))
                .fold(BigInt::from(1), |l, x| num::integer::lcm(l, x.denom().clone()));
            let scale = |x: &Rational| (x * Rational::from_integer(lcm.clone())).to_integer();
            (row.iter().map(scale).collect(), scale(rhs))
        })
        .collect();

    let n = ip.n();
    let mut points = Vec::new();
    let mut x = vec![0i64; n];
    loop {
        let feasible = rows.iter().all(|(row, rhs)| {
            let lhs: BigInt = row.iter().zip(&x).map(|(a, &v)| a * v).sum();
            lhs <= *rhs
        });
        if feasible {
            points.push(x.clone());
        }
        // odometer increment
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(IntegerPointSet { points });
            }
            k -= 1;
            if (x[k] as u64) < bounds[k] {
                x[k] += 1;
                break;
            }
            x[k] = 0;
        }
    }
}
