//! Brute-force oracles shared by integration tests. Nothing here calls the
//! solver code it is used to check.
#![allow(dead_code)]

use cutlab::rational::{self, int, ratio};
use cutlab::{IntegerProgram, Rational as R};
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves the square system `m·x = rhs`; `None` if singular.
pub fn solve_square(mut m: Vec<Vec<R>>, mut rhs: Vec<R>) -> Option<Vec<R>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for k in col..n {
                    let d = &f * &m[col][k];
                    m[r][k] -= d;
                }
                let d = &f * &rhs[col];
                rhs[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// `max cᵀx` over `{x ≥ 0, gx ≤ h}` by enumerating every basic point.
/// The region must be bounded; `None` means infeasible.
pub fn vertex_optimum(c: &[R], g: &[Vec<R>], h: &[R]) -> Option<R> {
    let n = c.len();
    let mut rows: Vec<Vec<R>> = g.to_vec();
    let mut rhs: Vec<R> = h.to_vec();
    for i in 0..n {
        let mut r = vec![R::zero(); n];
        r[i] = -R::one();
        rows.push(r);
        rhs.push(R::zero());
    }
    let mut combos = Vec::new();
    subsets(rows.len(), n, 0, &mut Vec::new(), &mut combos);
    let mut best: Option<R> = None;
    for s in combos {
        let m: Vec<Vec<R>> = s.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<R> = s.iter().map(|&i| rhs[i].clone()).collect();
        let Some(x) = solve_square(m, b) else { continue };
        let feasible = rows
            .iter()
            .zip(&rhs)
            .all(|(r, b)| r.iter().zip(&x).fold(R::zero(), |a, (p, q)| a + p * q) <= *b);
        if feasible {
            let v = c.iter().zip(&x).fold(R::zero(), |a, (p, q)| a + p * q);
            if best.as_ref().map_or(true, |b| v > *b) {
                best = Some(v);
            }
        }
    }
    best
}

/// Every integer point of `{x : Ax ≤ b, 0 ≤ x ≤ box}` by nested loops.
pub fn integer_points(ip: &IntegerProgram, bounds: &[i64]) -> Vec<Vec<i64>> {
    fn rec(ip: &IntegerProgram, bounds: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == bounds.len() {
            let x: Vec<R> = cur.iter().map(|&v| int(v)).collect();
            if ip
                .a()
                .iter()
                .zip(ip.b())
                .all(|(row, b)| row.iter().zip(&x).fold(R::zero(), |a, (p, q)| a + p * q) <= *b)
            {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=bounds[cur.len()] {
            cur.push(v);
            rec(ip, bounds, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(ip, bounds, &mut Vec::new(), &mut out);
    out
}

/// Exact `E_σ[max_f (1/N) Σ σᵢ f(yᵢ)]` over all sign vectors.
pub fn rademacher_exact(values: &[Vec<i64>]) -> R {
    let n = values[0].len();
    let mut total = R::zero();
    for mask in 0..(1u32 << n) {
        let best = values
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(i, &v)| if mask >> i & 1 == 1 { -v } else { v })
                    .sum::<i64>()
            })
            .max()
            .unwrap();
        total += ratio(best, n as i64);
    }
    total / int(1 << n)
}

/// Cut rows for waves computed straight from the definition: every cut in
/// wave `j` combines the original rows and all cuts of earlier waves.
pub fn wave_rows_direct(ip: &IntegerProgram, waves: &[Vec<Vec<R>>]) -> Vec<(Vec<R>, R)> {
    let mut rows: Vec<Vec<R>> = ip.a().to_vec();
    let mut rhs: Vec<R> = ip.b().to_vec();
    let mut cuts = Vec::new();
    for wave in waves {
        let mut new = Vec::new();
        for u in wave {
            let alpha: Vec<R> = (0..ip.n())
                .map(|i| {
                    let s = rows.iter().zip(u).fold(R::zero(), |a, (r, w)| a + &r[i] * w);
                    R::from_integer(s.floor().to_integer())
                })
                .collect();
            let b = rhs.iter().zip(u).fold(R::zero(), |a, (r, w)| a + r * w);
            new.push((alpha, R::from_integer(b.floor().to_integer())));
        }
        for (a, b) in &new {
            rows.push(a.clone());
            rhs.push(b.clone());
        }
        cuts.extend(new);
    }
    cuts
}

pub fn random_unit(rng: &mut ChaCha8Rng, len: usize, denominator: i64) -> Vec<R> {
    (0..len)
        .map(|_| ratio(rng.gen_range(0..=denominator), denominator))
        .collect()
}

/// Small LP `max cᵀx, gx ≤ h, 0 ≤ x ≤ box` with mixed-sign data.
pub fn random_bounded_lp(seed: u64) -> (Vec<R>, Vec<Vec<R>>, Vec<R>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=4);
    let c = (0..n).map(|_| ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
    let mut g: Vec<Vec<R>> = (0..m)
        .map(|_| (0..n).map(|_| ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect())
        .collect();
    let mut h: Vec<R> = (0..m).map(|_| int(rng.gen_range(-4..=12))).collect();
    for i in 0..n {
        let mut r = vec![R::zero(); n];
        r[i] = R::one();
        g.push(r);
        h.push(int(rng.gen_range(1..=6)));
    }
    (c, g, h)
}

pub fn abs_floor(x: &R) -> num::BigInt {
    rational::floor(x).abs()
}

/// Rejection-samples multipliers (denominator 20) whose CG cuts separate
/// `x` and are pairwise distinct, up to `count` of them.
pub fn separating_multipliers(ip: &IntegerProgram, x: &[R], seed: u64, count: usize) -> Vec<Vec<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<(Vec<R>, Vec<R>, R)> = Vec::new();
    for _ in 0..20_000 {
        let u = random_unit(&mut rng, ip.m(), 20);
        let alpha: Vec<R> = (0..ip.n())
            .map(|i| {
                let s = ip.a().iter().zip(&u).fold(R::zero(), |a, (r, w)| a + &r[i] * w);
                R::from_integer(s.floor().to_integer())
            })
            .collect();
        let beta = R::from_integer(
            ip.b().iter().zip(&u).fold(R::zero(), |a, (b, w)| a + b * w).floor().to_integer(),
        );
        let lhs = alpha.iter().zip(x).fold(R::zero(), |a, (p, q)| a + p * q);
        if lhs > beta && !found.iter().any(|(_, a, b)| *a == alpha && *b == beta) {
            found.push((u, alpha, beta));
            if found.len() == count {
                break;
            }
        }
    }
    found.into_iter().map(|(u, _, _)| u).collect()
}
