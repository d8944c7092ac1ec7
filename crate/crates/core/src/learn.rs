//! Learning-side calculators and harness: pseudo-dimension bounds, sample
//! sizes, ERM over finite candidate lists, and empirical Rademacher
//! complexity.
//!
//! All asymptotic bounds are evaluated with an explicit multiplicative
//! constant `C` and are meaningful only up to constants.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::ip::{jeroslow, random_packing, IntegerProgram};
use crate::rational;

#[derive(Debug, Clone, PartialEq)]
pub enum PdimFamily {
    SingleCut,
    SequentialCuts { w: u64 },
    Waves { w: u64, k: u64 },
    /// `d` scoring rules choosing among `r` candidates.
    ScoringPolicy { d: u64, r: u64 },
    /// `d` weights per step, cap `kappa`, `actions[j]` = `T_j`.
    TreeSearch { d: u64, kappa: u64, actions: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdimBoundSpec {
    pub family: PdimFamily,
    pub m: u64,
    pub n: u64,
    /// Upper bound on `‖A‖₁,₁`.
    pub alpha: f64,
    /// Upper bound on `‖b‖₁`.
    pub beta: f64,
}

impl PdimBoundSpec {
    pub fn new(family: PdimFamily, m: u64, n: u64, alpha: f64, beta: f64) -> Self {
        Self {
            family,
            m,
            n,
            alpha,
            beta,
        }
    }

    /// Whether `alpha`/`beta` dominate the norms of every instance.
    pub fn covers(&self, instances: &[IntegerProgram]) -> bool {
        let (a, b) = max_norms(instances);
        self.alpha >= a && self.beta >= b
    }
}

/// `(max ‖Aᵢ‖₁,₁, max ‖bᵢ‖₁)` over `instances`.
pub fn max_norms(instances: &[IntegerProgram]) -> (f64, f64) {
    instances.iter().fold((0.0, 0.0), |(a, b), ip| {
        (
            f64::max(a, rational::to_f64(&ip.matrix_norm())),
            f64::max(b, rational::to_f64(&ip.rhs_norm())),
        )
    })
}

fn log2_checked(x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x.log2())
    } else {
        Err(invalid(format!("logarithm of nonpositive argument {x}")))
    }
}

fn at_least_one(name: &str, v: u64) -> Result<f64> {
    if v == 0 {
        Err(invalid(format!("{name} must be at least 1")))
    } else {
        Ok(v as f64)
    }
}

/// Evaluates the pseudo-dimension bound of `spec.family` times `constant`.
pub fn pdim_bound(spec: &PdimBoundSpec, constant: f64) -> Result<f64> {
    if !(constant.is_finite() && constant > 0.0) {
        return Err(invalid("bound constant must be positive"));
    }
    let size_term = || -> Result<(f64, f64)> {
        let m = at_least_one("m", spec.m)?;
        let n = at_least_one("n", spec.n)?;
        if !(spec.alpha >= 0.0 && spec.beta >= 0.0) {
            return Err(invalid("norm bounds must be nonnegative"));
        }
        Ok((m, spec.alpha + spec.beta + n))
    };
    let value = match &spec.family {
        PdimFamily::SingleCut => {
            let (m, s) = size_term()?;
            m * log2_checked(m * s)?
        }
        PdimFamily::SequentialCuts { w } => {
            let (m, s) = size_term()?;
            let w = at_least_one("W", *w)?;
            m * w * w * log2_checked(m * w * s)?
        }
        PdimFamily::Waves { w, k } => {
            let (m, s) = size_term()?;
            let w = at_least_one("W", *w)?;
            let k = at_least_one("k", *k)?;
            m * k * k * w * w * log2_checked(m * k * w * s)?
        }
        PdimFamily::ScoringPolicy { d, r } => {
            let d = at_least_one("d", *d)?;
            let r = at_least_one("r", *r)?;
            d * log2_checked(r * d)?
        }
        PdimFamily::TreeSearch { d, kappa, actions } => {
            let d = at_least_one("d", *d)?;
            let kappa = at_least_one("kappa", *kappa)?;
            if actions.is_empty() {
                return Err(invalid("tree search needs at least one step"));
            }
            let mut logs = 0.0;
            for &t in actions {
                logs += log2_checked(at_least_one("T_j", t)?)?;
            }
            d * kappa * logs + d * log2_checked(d)?
        }
    };
    Ok(constant * value)
}

/// `C·(κ²/ε²)·(pdim + ln(1/δ))` before rounding.
pub fn sample_size_raw(epsilon: f64, delta: f64, pdim: f64, kappa: f64, constant: f64) -> Result<f64> {
    let open_unit = |x: f64| x > 0.0 && x < 1.0;
    if !open_unit(epsilon) || !open_unit(delta) {
        return Err(invalid("epsilon and delta must lie in (0, 1)"));
    }
    for (name, v) in [("pdim", pdim), ("kappa", kappa), ("constant", constant)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("{name} must be positive")));
        }
    }
    Ok(constant * (kappa * kappa / (epsilon * epsilon)) * (pdim + (1.0 / delta).ln()))
}

/// Number of samples sufficient for `ε`-uniform convergence with
/// probability `1−δ` over functions with range `[0, κ]`.
pub fn sample_size(epsilon: f64, delta: f64, pdim: f64, kappa: f64, constant: f64) -> Result<u64> {
    let raw = sample_size_raw(epsilon, delta, pdim, kappa, constant)?;
    if raw >= u64::MAX as f64 {
        return Err(invalid("sample size overflows"));
    }
    Ok(raw.ceil() as u64)
}

/// `C·κ·sqrt(pdim_waves(α_N, β_N) / N)` for `W` waves of `k` cuts, with
/// `α_N`, `β_N` the largest norms in the sample.
pub fn rademacher_bound(
    instances: &[IntegerProgram],
    w: u64,
    k: u64,
    kappa: f64,
    constant: f64,
) -> Result<f64> {
    let first = instances
        .first()
        .ok_or_else(|| invalid("rademacher bound needs at least one instance"))?;
    let (alpha, beta) = max_norms(instances);
    let spec = PdimBoundSpec::new(
        PdimFamily::Waves { w, k },
        first.m() as u64,
        first.n() as u64,
        alpha,
        beta,
    );
    let pdim = pdim_bound(&spec, 1.0)?;
    if !(kappa.is_finite() && kappa > 0.0 && constant.is_finite() && constant > 0.0) {
        return Err(invalid("kappa and constant must be positive"));
    }
    Ok(constant * kappa * (pdim / instances.len() as f64).sqrt())
}

/// Seeded instance distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceGenerator {
    /// Point mass on the parity instance of size `n`.
    Jeroslow { n: usize },
    Packing { n: usize, m: usize, coeff_max: u64 },
}

impl InstanceGenerator {
    pub fn draw(&self, seed: u64) -> Result<IntegerProgram> {
        match *self {
            InstanceGenerator::Jeroslow { n } => jeroslow(n),
            InstanceGenerator::Packing { n, m, coeff_max } => random_packing(seed, n, m, coeff_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub generator: InstanceGenerator,
    pub seed: u64,
    pub instances: Vec<IntegerProgram>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl SampleSet {
    /// Draws `count` instances and splits them, `train_count` to training.
    pub fn generate(generator: InstanceGenerator, count: usize, train_count: usize, seed: u64) -> Result<Self> {
        if count == 0 || train_count == 0 || train_count > count {
            return Err(invalid("need 1 ≤ train_count ≤ count"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seeds: Vec<u64> = (0..count).map(|_| rng.gen()).collect();
        let instances = seeds
            .iter()
            .map(|&s| generator.draw(s))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<usize> = (0..count).collect();
        order.shuffle(&mut rng);
        let mut train = order[..train_count].to_vec();
        let mut test = order[train_count..].to_vec();
        train.sort_unstable();
        test.sort_unstable();
        Ok(Self {
            generator,
            seed,
            instances,
            train,
            test,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateStats {
    pub train_mean: f64,
    /// `None` when the test split is empty.
    pub test_mean: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErmReport {
    pub selected: usize,
    pub candidates: Vec<CandidateStats>,
}

impl ErmReport {
    pub fn best(&self) -> &CandidateStats {
        &self.candidates[self.selected]
    }

    pub fn max_gap(&self) -> Option<f64> {
        self.candidates
            .iter()
            .filter_map(|c| c.gap)
            .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.max(g))))
    }

    /// Table rows preceded by `# key=value` header lines.
    pub fn to_table(&self, header: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("candidate_id,train_mean,test_mean,gap,selected\n");
        let opt = |x: Option<f64>| x.map_or("na".to_string(), |v| format!("{v:.6}"));
        for (i, c) in self.candidates.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{:.6},{},{},{}",
                c.train_mean,
                opt(c.test_mean),
                opt(c.gap),
                i == self.selected
            );
        }
        out
    }
}

fn mean(values: &[f64], idx: &[usize]) -> Option<f64> {
    if idx.is_empty() {
        return None;
    }
    Some(idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64)
}

/// Evaluates every candidate on every instance (values clamped to
/// `[1, κ]`) and picks the lowest training mean, ties to the lowest index.
pub fn erm_learn<C, F>(samples: &SampleSet, candidates: &[C], evaluator: F, kappa: usize) -> Result<ErmReport>
where
    C: Sync,
    F: Fn(&C, &IntegerProgram) -> Result<f64> + Sync,
{
    if candidates.is_empty() {
        return Err(invalid("ERM needs at least one candidate"));
    }
    let matrix = value_matrix(&samples.instances, candidates, evaluator, kappa)?;
    let stats: Vec<CandidateStats> = matrix
        .iter()
        .map(|row| {
            let train_mean = mean(row, &samples.train).expect("train split nonempty");
            let test_mean = mean(row, &samples.test);
            CandidateStats {
                train_mean,
                test_mean,
                gap: test_mean.map(|t| (train_mean - t).abs()),
            }
        })
        .collect();
    let selected = stats
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if s.train_mean < stats[best].train_mean { i } else { best });
    Ok(ErmReport {
        selected,
        candidates: stats,
    })
}

/// `F[candidate][instance]`, clamped to `[1, κ]`.
pub fn value_matrix<C, F>(
    instances: &[IntegerProgram],
    candidates: &[C],
    evaluator: F,
    kappa: usize,
) -> Result<Vec<Vec<f64>>>
where
    C: Sync,
    F: Fn(&C, &IntegerProgram) -> Result<f64> + Sync,
{
    let cap = kappa.max(1) as f64;
    let flat = (0..candidates.len() * instances.len())
        .into_par_iter()
        .map(|p| {
            let (c, i) = (p / instances.len(), p % instances.len());
            let v = evaluator(&candidates[c], &instances[i])?;
            if v.is_nan() {
                return Err(invalid("evaluator returned NaN"));
            }
            Ok(v.clamp(1.0, cap))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(flat.chunks(instances.len().max(1)).map(<[_]>::to_vec).collect())
}

/// Largest `N` for which exhaustive sign enumeration is allowed.
pub const EXHAUSTIVE_LIMIT: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RademacherMode {
    MonteCarlo { draws: usize, seed: u64 },
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherEstimate {
    pub estimate: f64,
    /// Zero in exhaustive mode.
    pub std_error: f64,
    pub draws: usize,
}

fn sup_average(values: &[Vec<f64>], sigma: &[f64]) -> f64 {
    let n = sigma.len() as f64;
    values
        .iter()
        .map(|row| row.iter().zip(sigma).map(|(v, s)| v * s).sum::<f64>() / n)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `E_σ[sup_f (1/N) Σ σᵢ f(yᵢ)]` for the value matrix `F[candidate][instance]`.
pub fn empirical_rademacher(values: &[Vec<f64>], mode: RademacherMode) -> Result<RademacherEstimate> {
    let n = values.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(invalid("value matrix must be nonempty"));
    }
    if values.iter().any(|r| r.len() != n) {
        return Err(invalid("value matrix rows differ in length"));
    }
    match mode {
        RademacherMode::Exhaustive => {
            if n as u32 > EXHAUSTIVE_LIMIT {
                return Err(Error::OracleTooLarge {
                    size: 1u128 << n.min(127),
                    budget: 1u128 << EXHAUSTIVE_LIMIT,
                });
            }
            let total = 1usize << n;
            let sum: f64 = (0..total)
                .map(|mask| {
                    let sigma: Vec<f64> = (0..n)
                        .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                        .collect();
                    sup_average(values, &sigma)
                })
                .sum();
            Ok(RademacherEstimate {
                estimate: sum / total as f64,
                std_error: 0.0,
                draws: total,
            })
        }
        RademacherMode::MonteCarlo { draws, seed } => {
            if draws == 0 {
                return Err(invalid("need at least one sigma draw"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<f64> = (0..draws)
                .map(|_| {
                    let sigma: Vec<f64> = (0..n)
                        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                        .collect();
                    sup_average(values, &sigma)
                })
                .collect();
            let mean = samples.iter().sum::<f64>() / draws as f64;
            let std_error = if draws > 1 {
                let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
                (var / draws as f64).sqrt()
            } else {
                0.0
            };
            Ok(RademacherEstimate {
                estimate: mean,
                std_error,
                draws,
            })
        }
    }
}
