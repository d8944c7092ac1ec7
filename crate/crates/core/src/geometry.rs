//! Structure of cut-parameter space.
//!
//! A parameter vector's *region signature* is the vector of floors that
//! fully determines the generated cut rows. Two parameter vectors with the
//! same signature generate identical cuts and therefore identical solver
//! behavior, so signatures certify same-region membership without building
//! the arrangement explicitly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::{BigInt, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cuts::{generate_cuts, CutParameters};
use crate::error::{check_len, invalid, Error, Result};
use crate::ip::IntegerProgram;
use crate::rational::{self, ratio, Rational};
use crate::search::{run_branch_and_cut, CutConfig, ScoringWeights, SearchResult};

/// Default cap on grid points visited by [`count_regions_grid`].
pub const DEFAULT_GRID_BUDGET: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionSignature(pub Vec<BigInt>);

impl RegionSignature {
    /// Short stable hex digest of the floors.
    pub fn hash_hex(&self) -> String {
        let text: Vec<String> = self.0.iter().map(BigInt::to_string).collect();
        digest_hex(&text.join(","))
    }
}

pub(crate) fn digest_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// `(⌊uᵀa₁⌋, …, ⌊uᵀaₙ⌋, ⌊uᵀb⌋)` for the columns `aᵢ` of `A`.
pub fn signature_single(a: &[Vec<Rational>], b: &[Rational], u: &[Rational]) -> Result<RegionSignature> {
    check_len("cut multipliers", a.len(), u.len())?;
    check_len("right-hand side", a.len(), b.len())?;
    let n = a.first().map_or(0, Vec::len);
    let mut floors: Vec<BigInt> = (0..n)
        .map(|i| {
            let s = a
                .iter()
                .zip(u)
                .fold(Rational::zero(), |acc, (row, ui)| acc + ui * &row[i]);
            rational::floor(&s)
        })
        .collect();
    floors.push(rational::floor(&rational::dot(u, b)));
    Ok(RegionSignature(floors))
}

/// Per-step floors under the column recurrence: step `w` sees each column
/// extended by the floors of all earlier steps.
pub fn signature_sequential(ip: &IntegerProgram, us: &[Vec<Rational>]) -> Result<RegionSignature> {
    CutParameters::Sequential(us.to_vec()).validate(ip.m())?;
    let mut columns: Vec<Vec<Rational>> = (0..ip.n()).map(|i| ip.column(i)).collect();
    let mut rhs = ip.b().to_vec();
    let mut floors = Vec::new();
    for u in us {
        let step: Vec<BigInt> = columns
            .iter()
            .map(|col| rational::floor(&rational::dot(u, col)))
            .collect();
        let rhs_floor = rational::floor(&rational::dot(u, &rhs));
        for (col, f) in columns.iter_mut().zip(&step) {
            col.push(Rational::from_integer(f.clone()));
        }
        rhs.push(Rational::from_integer(rhs_floor.clone()));
        floors.extend(step);
        floors.push(rhs_floor);
    }
    Ok(RegionSignature(floors))
}

/// Signature of any parameter layout: the floors of every generated cut.
pub fn signature(ip: &IntegerProgram, params: &CutParameters) -> Result<RegionSignature> {
    match params {
        CutParameters::Single(u) => signature_single(ip.a(), ip.b(), u),
        CutParameters::Sequential(us) => signature_sequential(ip, us),
        CutParameters::Waves(_) => {
            let ext = generate_cuts(ip, params)?;
            let floors = ext
                .cuts()
                .iter()
                .flat_map(crate::cuts::cut_floors)
                .collect();
            Ok(RegionSignature(floors))
        }
    }
}

/// `uᵀ·normal = offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: Vec<Rational>,
    pub offset: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperplaneFamily {
    pub planes: Vec<Hyperplane>,
}

impl HyperplaneFamily {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// Some member separates or touches the segment between `u` and `v`.
    pub fn crossed_between(&self, u: &[Rational], v: &[Rational]) -> bool {
        self.planes.iter().any(|h| {
            let off = Rational::from_integer(h.offset.clone());
            let su = rational::dot(&h.normal, u) - &off;
            let sv = rational::dot(&h.normal, v) - &off;
            su.is_zero() || sv.is_zero() || (su < Rational::zero()) != (sv < Rational::zero())
        })
    }
}

fn ceil_norm(x: &Rational) -> i64 {
    rational::ceil(x).to_i64().expect("norm fits in i64")
}

/// Boundaries `uᵀaᵢ = k` for `|k| ≤ ⌈‖aᵢ‖₁⌉` and `uᵀb = k` for `|k| ≤ ⌈‖b‖₁⌉`.
pub fn enumerate_hyperplanes_single(ip: &IntegerProgram) -> HyperplaneFamily {
    let mut planes = Vec::new();
    let mut push_range = |normal: Vec<Rational>, norm: i64| {
        for k in -norm..=norm {
            planes.push(Hyperplane {
                normal: normal.clone(),
                offset: BigInt::from(k),
            });
        }
    };
    for i in 0..ip.n() {
        push_range(ip.column(i), ceil_norm(&ip.column_norm(i)));
    }
    push_range(ip.b().to_vec(), ceil_norm(&ip.rhs_norm()));
    HyperplaneFamily { planes }
}

/// Closed-form size of the single-cut family: `Σᵢ(2Aᵢ+1) + (2B+1)`.
pub fn single_family_size(ip: &IntegerProgram) -> u128 {
    let cols: u128 = (0..ip.n())
        .map(|i| 2 * ceil_norm(&ip.column_norm(i)) as u128 + 1)
        .sum();
    cols + 2 * ceil_norm(&ip.rhs_norm()) as u128 + 1
}

/// Shape of the parameters being sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamLayout {
    Single,
    Sequential { cuts: usize },
    Waves { waves: usize, per_wave: usize },
}

impl ParamLayout {
    /// Lengths of the individual multiplier vectors, in order.
    pub fn vector_lengths(&self, m: usize) -> Vec<usize> {
        match *self {
            ParamLayout::Single => vec![m],
            ParamLayout::Sequential { cuts } => (0..cuts).map(|w| m + w).collect(),
            ParamLayout::Waves { waves, per_wave } => (0..waves)
                .flat_map(|w| std::iter::repeat_n(m + per_wave * w, per_wave))
                .collect(),
        }
    }

    pub fn dimension(&self, m: usize) -> usize {
        self.vector_lengths(m).iter().sum()
    }

    /// Packs a flat coordinate list into parameters of this layout.
    pub fn assemble(&self, m: usize, flat: &[Rational]) -> Result<CutParameters> {
        check_len("flat parameters", self.dimension(m), flat.len())?;
        let mut it = flat.iter().cloned();
        let mut vectors: Vec<Vec<Rational>> = self
            .vector_lengths(m)
            .into_iter()
            .map(|len| it.by_ref().take(len).collect())
            .collect();
        Ok(match *self {
            ParamLayout::Single => CutParameters::Single(vectors.remove(0)),
            ParamLayout::Sequential { .. } => CutParameters::Sequential(vectors),
            ParamLayout::Waves { per_wave, .. } => CutParameters::Waves(
                vectors.chunks(per_wave).map(<[_]>::to_vec).collect(),
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// `resolution` evenly spaced values `i/(resolution−1)` per coordinate.
    Grid { resolution: usize },
    /// `count` points with coordinates `k/denominator`, `k` uniform.
    Random {
        seed: u64,
        count: usize,
        denominator: i64,
    },
}

/// Parameter points drawn by `sampler` for `layout`.
pub fn sample_parameters(layout: ParamLayout, m: usize, sampler: Sampler, budget: u128) -> Result<Vec<CutParameters>> {
    let dim = layout.dimension(m);
    match sampler {
        Sampler::Grid { resolution } => {
            if resolution < 2 {
                return Err(invalid("grid resolution must be at least 2"));
            }
            let size = (resolution as u128)
                .checked_pow(dim as u32)
                .unwrap_or(u128::MAX);
            if size > budget {
                return Err(Error::GridTooLarge { size, budget });
            }
            let steps = resolution as i64 - 1;
            let mut out = Vec::with_capacity(size as usize);
            let mut idx = vec![0i64; dim];
            loop {
                let flat: Vec<Rational> = idx.iter().map(|&i| ratio(i, steps)).collect();
                out.push(layout.assemble(m, &flat)?);
                let mut k = dim;
                loop {
                    if k == 0 {
                        return Ok(out);
                    }
                    k -= 1;
                    if idx[k] < steps {
                        idx[k] += 1;
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        Sampler::Random {
            seed,
            count,
            denominator,
        } => {
            if denominator < 1 {
                return Err(invalid("sampling denominator must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let flat: Vec<Rational> = (0..dim)
                        .map(|_| ratio(rng.gen_range(0..=denominator), denominator))
                        .collect();
                    layout.assemble(m, &flat)
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstancyReport {
    pub samples: usize,
    pub regions: usize,
    pub pairs_tested: usize,
    pub violations: usize,
    /// `(representative index, violating index)` into the sample list.
    pub violating_pairs: Vec<(usize, usize)>,
}

/// Groups sampled parameters by signature and checks that `evaluator` is
/// constant on every group.
pub fn verify_piecewise_constancy<T, F>(
    ip: &IntegerProgram,
    layout: ParamLayout,
    sampler: Sampler,
    evaluator: F,
) -> Result<ConstancyReport>
where
    T: PartialEq + Send,
    F: Fn(&CutParameters) -> T + Sync,
{
    let samples = sample_parameters(layout, ip.m(), sampler, DEFAULT_GRID_BUDGET)?;
    let evaluated: Vec<(RegionSignature, T)> = samples
        .par_iter()
        .map(|p| Ok((signature(ip, p)?, evaluator(p))))
        .collect::<Result<_>>()?;

    let mut groups: BTreeMap<&RegionSignature, Vec<usize>> = BTreeMap::new();
    for (i, (sig, _)) in evaluated.iter().enumerate() {
        groups.entry(sig).or_default().push(i);
    }
    let mut report = ConstancyReport {
        samples: samples.len(),
        regions: groups.len(),
        pairs_tested: 0,
        violations: 0,
        violating_pairs: Vec::new(),
    };
    for members in groups.values() {
        let rep = members[0];
        for &i in &members[1..] {
            report.pairs_tested += 1;
            if evaluated[i].1 != evaluated[rep].1 {
                report.violations += 1;
                report.violating_pairs.push((rep, i));
            }
        }
    }
    report.violating_pairs.sort_unstable();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionCount {
    pub distinct_signatures: usize,
    /// `(family size)^m`, saturating.
    pub bound: u128,
}

/// Distinct single-cut signatures over a uniform grid of `[0,1]^m`.
pub fn count_regions_grid(ip: &IntegerProgram, resolution: usize, budget: u128) -> Result<RegionCount> {
    let samples = sample_parameters(ParamLayout::Single, ip.m(), Sampler::Grid { resolution }, budget)?;
    let mut sigs = samples
        .par_iter()
        .map(|p| signature(ip, p))
        .collect::<Result<Vec<_>>>()?;
    sigs.sort_unstable();
    sigs.dedup();
    let bound = single_family_size(ip)
        .checked_pow(ip.m() as u32)
        .unwrap_or(u128::MAX);
    Ok(RegionCount {
        distinct_signatures: sigs.len(),
        bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: Rational,
    pub tree_size: usize,
    pub hit_cap: bool,
    pub signature_hash: String,
    pub chosen_cut: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Candidate cuts separating the root LP optimum.
    pub root_candidates: usize,
}

impl SweepTable {
    /// Grid positions where the tree size differs from the previous point.
    pub fn change_points(&self) -> usize {
        self.rows
            .windows(2)
            .filter(|w| w[0].tree_size != w[1].tree_size)
            .count()
    }

    /// Grid positions where the chosen root cut differs from the previous point.
    pub fn choice_changes(&self) -> usize {
        self.rows
            .windows(2)
            .filter(|w| w[0].chosen_cut != w[1].chosen_cut)
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("param_value,tree_size,hit_cap,signature_hash,chosen_cut_index\n");
        for r in &self.rows {
            let chosen = r.chosen_cut.map_or("none".to_string(), |c| c.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                rational::render(&r.param),
                r.tree_size,
                r.hit_cap,
                r.signature_hash,
                chosen
            );
        }
        out
    }
}

fn trace_hash(res: &SearchResult) -> String {
    let ids: Vec<String> = res
        .action_trace
        .iter()
        .map(|e| format!("{}:{}", e.step, e.action))
        .collect();
    digest_hex(&ids.join(","))
}

/// Runs root-only cut selection once per grid value of cut weight
/// `swept_index`, holding the other weights at `template`.
pub fn mu_sweep(
    ip: &IntegerProgram,
    template: &ScoringWeights,
    swept_index: usize,
    grid: &[Rational],
    candidates: &[Vec<Rational>],
    kappa: usize,
) -> Result<SweepTable> {
    if swept_index >= ScoringWeights::CUT_RULES {
        return Err(invalid(format!("cut weight index {swept_index} out of range")));
    }
    let config = CutConfig::select(candidates.to_vec(), Default::default());
    let root_candidates = match crate::lp::solve_relaxation(ip, &[])?.solution {
        Some(x) => crate::search::candidate_cuts(ip, candidates)?
            .iter()
            .filter(|(_, c)| c.separates(&x))
            .count(),
        None => 0,
    };
    let rows = grid
        .par_iter()
        .map(|value| {
            let mut weights = template.clone();
            weights.cut[swept_index] = rational::to_f64(value);
            let res = run_branch_and_cut(ip, &weights, &config, kappa)?;
            Ok(SweepRow {
                param: value.clone(),
                tree_size: res.tree_size,
                hit_cap: res.hit_cap,
                signature_hash: trace_hash(&res),
                chosen_cut: res.root_cut,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        rows,
        root_candidates,
    })
}

/// Applies the single cut `(1−t)·from + t·to` at the root for each `t` in
/// `grid` (values in `[0,1]`).
pub fn u_sweep(
    ip: &IntegerProgram,
    weights: &ScoringWeights,
    from: &[Rational],
    to: &[Rational],
    grid: &[Rational],
    kappa: usize,
) -> Result<SweepTable> {
    check_len("sweep start", ip.m(), from.len())?;
    check_len("sweep end", ip.m(), to.len())?;
    let rows = grid
        .par_iter()
        .map(|t| {
            if !rational::in_unit_interval(t) {
                return Err(invalid("segment parameter must lie in [0, 1]"));
            }
            let one_minus = Rational::from_integer(1.into()) - t;
            let u: Vec<Rational> = from
                .iter()
                .zip(to)
                .map(|(a, b)| a * &one_minus + b * t)
                .collect();
            let sig = signature_single(ip.a(), ip.b(), &u)?;
            let res = run_branch_and_cut(
                ip,
                weights,
                &CutConfig::fixed(CutParameters::Single(u)),
                kappa,
            )?;
            Ok(SweepRow {
                param: t.clone(),
                tree_size: res.tree_size,
                hit_cap: res.hit_cap,
                signature_hash: sig.hash_hex(),
                chosen_cut: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        rows,
        root_candidates: 1,
    })
}

/// Up to `count` multiplier vectors with entries `k/denominator` whose cuts
/// separate the root LP optimum and differ pairwise, by seeded rejection
/// sampling over at most `tries` draws. Empty when the root LP has no
/// optimum.
pub fn separating_multipliers(
    ip: &IntegerProgram,
    seed: u64,
    count: usize,
    denominator: i64,
    tries: usize,
) -> Result<Vec<Vec<Rational>>> {
    if denominator < 1 {
        return Err(invalid("sampling denominator must be positive"));
    }
    let Some(x) = crate::lp::solve_relaxation(ip, &[])?.solution else {
        return Ok(Vec::new());
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<(Vec<Rational>, crate::cuts::Cut)> = Vec::new();
    for _ in 0..tries {
        if found.len() == count {
            break;
        }
        let u: Vec<Rational> = (0..ip.m())
            .map(|_| ratio(rng.gen_range(0..=denominator), denominator))
            .collect();
        let cut = crate::cuts::cg_cut(ip.a(), ip.b(), &u)?;
        if cut.separates(&x) && !found.iter().any(|(_, c)| c.same_halfspace(&cut)) {
            found.push((u, cut));
        }
    }
    Ok(found.into_iter().map(|(u, _)| u).collect())
}

/// `points` evenly spaced rationals from `lo` to `hi` inclusive.
pub fn linear_grid(lo: &Rational, hi: &Rational, points: usize) -> Result<Vec<Rational>> {
    if points < 2 {
        return Err(invalid("a grid needs at least two points"));
    }
    let span = hi - lo;
    let steps = Rational::from_integer(BigInt::from(points - 1));
    Ok((0..points)
        .map(|i| lo + &span * Rational::from_integer(BigInt::from(i)) / &steps)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{cg_cut, sequential_cuts};
    use crate::ip::{jeroslow, random_packing};
    use crate::rational::int;

    fn big(v: &[i64]) -> RegionSignature {
        RegionSignature(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn parity_signature() {
        let ip = jeroslow(3).unwrap();
        let s1 = signature_single(ip.a(), ip.b(), &[ratio(3, 4), ratio(1, 5)]).unwrap();
        assert_eq!(s1, big(&[1, 1, 1, 1]));
        let s2 = signature_single(ip.a(), ip.b(), &[ratio(4, 5), ratio(1, 4)]).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(
            cg_cut(ip.a(), ip.b(), &[ratio(3, 4), ratio(1, 5)]).unwrap().alpha,
            cg_cut(ip.a(), ip.b(), &[ratio(4, 5), ratio(1, 4)]).unwrap().alpha
        );
        let z = signature_single(ip.a(), ip.b(), &[int(0), int(0)]).unwrap();
        assert_eq!(z, big(&[0, 0, 0, 0]));
    }

    #[test]
    fn sequential_signature_hand_example() {
        let ip = IntegerProgram::new(vec![int(1)], vec![vec![int(3)]], vec![int(4)], None).unwrap();
        let us = vec![vec![ratio(1, 2)], vec![ratio(1, 2), ratio(1, 2)]];
        assert_eq!(signature_sequential(&ip, &us).unwrap(), big(&[1, 2, 2, 3]));
    }

    #[test]
    fn one_step_sequence_signature_is_single() {
        let ip = random_packing(4, 3, 2, 5).unwrap();
        let u = vec![ratio(2, 7), ratio(5, 9)];
        assert_eq!(
            signature_sequential(&ip, &[u.clone()]).unwrap(),
            signature_single(ip.a(), ip.b(), &u).unwrap()
        );
    }

    #[test]
    fn colliding_sequential_signatures_share_rows() {
        let ip = IntegerProgram::new(
            vec![int(1), int(2)],
            vec![vec![int(2), int(1)], vec![int(1), int(3)]],
            vec![int(5), int(6)],
            None,
        )
        .unwrap();
        let samples = sample_parameters(
            ParamLayout::Sequential { cuts: 2 },
            2,
            Sampler::Random { seed: 9, count: 500, denominator: 20 },
            u128::MAX,
        )
        .unwrap();
        let mut by_sig: BTreeMap<RegionSignature, Vec<Vec<Rational>>> = BTreeMap::new();
        let mut collisions = 0;
        for p in &samples {
            let CutParameters::Sequential(us) = p else { unreachable!() };
            let sig = signature_sequential(&ip, us).unwrap();
            let ext = sequential_cuts(&ip, us).unwrap();
            let rows: Vec<Vec<Rational>> = ext
                .cuts()
                .iter()
                .map(|c| {
                    let mut r = c.alpha.clone();
                    r.push(c.beta.clone());
                    r
                })
                .collect::<Vec<_>>();
            let flat: Vec<Vec<Rational>> = rows;
            match by_sig.get(&sig) {
                Some(prev) => {
                    collisions += 1;
                    assert_eq!(prev, &flat);
                }
                None => {
                    by_sig.insert(sig, flat);
                }
            }
        }
        assert!(collisions > 100, "only {collisions} collisions");
    }

    #[test]
    fn parity_family_size() {
        let ip = jeroslow(3).unwrap();
        let fam = enumerate_hyperplanes_single(&ip);
        assert_eq!(fam.len(), 40);
        assert_eq!(single_family_size(&ip), 40);
    }

    #[test]
    fn zero_data_family() {
        let ip = IntegerProgram::new(
            vec![int(1), int(1)],
            vec![vec![int(0), int(0)]],
            vec![int(0)],
            None,
        )
        .unwrap();
        let fam = enumerate_hyperplanes_single(&ip);
        assert_eq!(fam.len(), 3);
        assert!(fam
            .planes
            .iter()
            .all(|h| h.offset.is_zero() && h.normal.iter().all(Zero::is_zero)));
    }

    #[test]
    fn signature_change_crosses_a_family_member() {
        let ip = random_packing(21, 3, 2, 3).unwrap();
        let fam = enumerate_hyperplanes_single(&ip);
        let pts = sample_parameters(
            ParamLayout::Single,
            2,
            Sampler::Random { seed: 3, count: 400, denominator: 1000 },
            u128::MAX,
        )
        .unwrap();
        let mut changes = 0;
        for pair in pts.windows(2) {
            let (CutParameters::Single(u), CutParameters::Single(v)) = (&pair[0], &pair[1]) else {
                unreachable!()
            };
            // bisect down to a short segment whose endpoints differ
            let (mut lo, mut hi) = (u.clone(), v.clone());
            let sig = |x: &[Rational]| signature_single(ip.a(), ip.b(), x).unwrap();
            if sig(&lo) == sig(&hi) {
                continue;
            }
            changes += 1;
            for _ in 0..20 {
                let mid: Vec<Rational> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / int(2)).collect();
                if sig(&lo) != sig(&mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!(fam.crossed_between(&lo, &hi));
        }
        assert!(changes > 50);
    }

    #[test]
    fn grid_counts() {
        let ip = jeroslow(3).unwrap();
        let c = count_regions_grid(&ip, 101, DEFAULT_GRID_BUDGET).unwrap();
        assert!(c.distinct_signatures as u128 <= c.bound);
        assert_eq!(c.bound, 1600);

        let one = IntegerProgram::new(vec![int(1)], vec![vec![int(1)]], vec![int(1)], None).unwrap();
        for res in [2, 3, 17, 100] {
            let c = count_regions_grid(&one, res, DEFAULT_GRID_BUDGET).unwrap();
            assert_eq!(c.distinct_signatures, 2);
        }
        let corners = count_regions_grid(&random_packing(2, 3, 3, 4).unwrap(), 2, DEFAULT_GRID_BUDGET).unwrap();
        assert!(corners.distinct_signatures <= 8);
        assert!(count_regions_grid(&ip, 1, DEFAULT_GRID_BUDGET).is_err());
        assert!(matches!(
            count_regions_grid(&ip, 1000, 100),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn cut_constant_on_parity_grid() {
        let ip = jeroslow(3).unwrap();
        let report = verify_piecewise_constancy(
            &ip,
            ParamLayout::Single,
            Sampler::Grid { resolution: 51 },
            |p| {
                let CutParameters::Single(u) = p else { unreachable!() };
                let c = cg_cut(ip.a(), ip.b(), u).unwrap();
                (c.alpha, c.beta)
            },
        )
        .unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.samples, 51 * 51);
        assert!(report.pairs_tested > 0);
    }

    #[test]
    fn constant_evaluator_has_no_violations() {
        let ip = random_packing(1, 2, 2, 2).unwrap();
        let report = verify_piecewise_constancy(
            &ip,
            ParamLayout::Waves { waves: 2, per_wave: 2 },
            Sampler::Random { seed: 1, count: 100, denominator: 10 },
            |_| 0u8,
        )
        .unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn detects_a_non_constant_evaluator() {
        let ip = jeroslow(3).unwrap();
        let report = verify_piecewise_constancy(
            &ip,
            ParamLayout::Single,
            Sampler::Grid { resolution: 11 },
            |p| p.flatten(),
        )
        .unwrap();
        assert!(report.violations > 0);
        assert_eq!(report.violations, report.violating_pairs.len());
    }

    #[test]
    fn layout_assembly() {
        let l = ParamLayout::Waves { waves: 2, per_wave: 3 };
        assert_eq!(l.vector_lengths(2), vec![2, 2, 2, 5, 5, 5]);
        let flat = vec![Rational::zero(); 21];
        let p = l.assemble(2, &flat).unwrap();
        p.validate(2).unwrap();
        assert_eq!(p.cut_count(), 6);
    }

    #[test]
    fn sweep_with_one_candidate_is_flat() {
        let ip = random_packing(7, 3, 2, 4).unwrap();
        let grid = linear_grid(&int(-2), &int(2), 41).unwrap();
        let table = mu_sweep(
            &ip,
            &ScoringWeights::default(),
            2,
            &grid,
            &[vec![ratio(1, 2), ratio(1, 3)]],
            64,
        )
        .unwrap();
        assert_eq!(table.change_points(), 0);
        assert_eq!(table.choice_changes(), 0);
        assert_eq!(table.rows.len(), 41);
    }

    #[test]
    fn separating_draws() {
        let ip = random_packing(22, 4, 3, 5).unwrap();
        let us = separating_multipliers(&ip, 1, 5, 20, 20_000).unwrap();
        assert_eq!(us.len(), 5);
        let x = crate::lp::solve_relaxation(&ip, &[]).unwrap().solution.unwrap();
        for u in &us {
            assert!(cg_cut(ip.a(), ip.b(), u).unwrap().separates(&x));
        }
        assert_eq!(us, separating_multipliers(&ip, 1, 5, 20, 20_000).unwrap());
        let integral = IntegerProgram::new(vec![int(1)], vec![vec![int(1)]], vec![int(2)], None).unwrap();
        assert!(separating_multipliers(&integral, 1, 3, 20, 500).unwrap().is_empty());
    }

    #[test]
    fn linear_grid_endpoints() {
        let g = linear_grid(&int(0), &int(1), 5).unwrap();
        assert_eq!(g, vec![int(0), ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)]);
        assert!(linear_grid(&int(0), &int(1), 1).is_err());
    }
}
