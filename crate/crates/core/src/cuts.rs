//! Chvátal-Gomory cuts `⌊uᵀA⌋x ≤ ⌊uᵀb⌋`: single cuts, sequences applied one
//! after another, and waves of simultaneous cuts, together with the
//! integral-point validity oracle and the four cut scoring rules.

use num::{BigInt, Signed, Zero};

use crate::error::{check_len, invalid, Result};
use crate::ip::{enumerate_integer_points, IntegerProgram};
use crate::lp::Row;
use crate::rational::{self, Rational};

/// A halfspace `αᵀx ≤ β` together with the multiplier vector that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub alpha: Vec<Rational>,
    pub beta: Rational,
    pub provenance: Option<Vec<Rational>>,
}

impl Cut {
    pub fn new(alpha: Vec<Rational>, beta: Rational) -> Self {
        Self {
            alpha,
            beta,
            provenance: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(Zero::is_zero)
    }

    /// `αᵀx − β`; positive exactly when the cut separates `x`.
    pub fn violation(&self, x: &[Rational]) -> Rational {
        rational::dot(&self.alpha, x) - &self.beta
    }

    pub fn separates(&self, x: &[Rational]) -> bool {
        self.violation(x).is_positive()
    }

    pub fn to_row(&self) -> Row {
        Row::new(self.alpha.clone(), self.beta.clone())
    }

    /// Same inequality, ignoring provenance.
    pub fn same_halfspace(&self, other: &Cut) -> bool {
        self.alpha == other.alpha && self.beta == other.beta
    }
}

/// Multiplier vectors for the three cut families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutParameters {
    /// One vector of length `m`.
    Single(Vec<Rational>),
    /// `W` vectors; vector `w` (0-based) has length `m + w`.
    Sequential(Vec<Vec<Rational>>),
    /// `waves[w][j]`: cut `j` of wave `w`, of length `m + k·w`.
    Waves(Vec<Vec<Vec<Rational>>>),
}

impl CutParameters {
    /// Checks lengths against `m` and that every entry lies in `[0, 1]`.
    pub fn validate(&self, m: usize) -> Result<()> {
        let check_entries = |u: &[Rational]| {
            if u.iter().all(rational::in_unit_interval) {
                Ok(())
            } else {
                Err(invalid("cut parameters must lie in [0, 1]"))
            }
        };
        match self {
            CutParameters::Single(u) => {
                check_len("cut parameters", m, u.len())?;
                check_entries(u)
            }
            CutParameters::Sequential(us) => {
                if us.is_empty() {
                    return Err(invalid("a cut sequence needs at least one vector"));
                }
                for (w, u) in us.iter().enumerate() {
                    check_len("sequential cut parameters", m + w, u.len())?;
                    check_entries(u)?;
                }
                Ok(())
            }
            CutParameters::Waves(waves) => {
                let k = waves.first().map_or(0, Vec::len);
                if k == 0 {
                    return Err(invalid("waves need at least one cut"));
                }
                for (w, wave) in waves.iter().enumerate() {
                    check_len("cuts per wave", k, wave.len())?;
                    for u in wave {
                        check_len("wave cut parameters", m + k * w, u.len())?;
                        check_entries(u)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// The wave structure as a list of waves of vectors: a single cut is one
    /// wave of one, a sequence is `W` waves of one.
    pub fn as_waves(&self) -> Vec<Vec<Vec<Rational>>> {
        match self {
            CutParameters::Single(u) => vec![vec![u.clone()]],
            CutParameters::Sequential(us) => us.iter().map(|u| vec![u.clone()]).collect(),
            CutParameters::Waves(w) => w.clone(),
        }
    }

    /// Number of cuts the parameters generate.
    pub fn cut_count(&self) -> usize {
        match self {
            CutParameters::Single(_) => 1,
            CutParameters::Sequential(us) => us.len(),
            CutParameters::Waves(w) => w.iter().map(Vec::len).sum(),
        }
    }

    /// All entries flattened in order.
    pub fn flatten(&self) -> Vec<Rational> {
        self.as_waves().into_iter().flatten().flatten().collect()
    }
}

/// `⌊uᵀA⌋x ≤ ⌊uᵀb⌋` for constraint rows `a` and right-hand side `b`.
pub fn cg_cut(a: &[Vec<Rational>], b: &[Rational], u: &[Rational]) -> Result<Cut> {
    check_len("cut multipliers", a.len(), u.len())?;
    check_len("right-hand side", a.len(), b.len())?;
    let n = a.first().map_or(0, Vec::len);
    let mut combo = vec![Rational::zero(); n];
    for (row, ui) in a.iter().zip(u) {
        check_len("constraint row", n, row.len())?;
        if ui.is_zero() {
            continue;
        }
        for (acc, aij) in combo.iter_mut().zip(row) {
            *acc += ui * aij;
        }
    }
    let alpha = combo
        .iter()
        .map(|v| Rational::from_integer(rational::floor(v)))
        .collect();
    let beta = Rational::from_integer(rational::floor(&rational::dot(u, b)));
    Ok(Cut {
        alpha,
        beta,
        provenance: Some(u.to_vec()),
    })
}

/// The base instance extended with cut rows, in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedInstance {
    base_rows: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cuts: Vec<Cut>,
}

impl ExtendedInstance {
    fn from_base(ip: &IntegerProgram) -> Self {
        Self {
            base_rows: ip.m(),
            rows: ip.a().to_vec(),
            rhs: ip.b().to_vec(),
            cuts: Vec::new(),
        }
    }

    /// Added cut rows in order.
    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    /// `ãᵢ` before the `step`-th added row (0-based): column `i` of the first
    /// `m + step` rows.
    pub fn a_tilde(&self, step: usize, i: usize) -> Vec<Rational> {
        self.rows[..self.base_rows + step]
            .iter()
            .map(|r| r[i].clone())
            .collect()
    }

    /// `b̃` before the `step`-th added row (0-based).
    pub fn b_tilde(&self, step: usize) -> Vec<Rational> {
        self.rhs[..self.base_rows + step].to_vec()
    }

    /// Applies a batch of cuts computed from the current rows only.
    fn apply_wave(&mut self, wave: &[Vec<Rational>]) -> Result<()> {
        let cuts = wave
            .iter()
            .map(|u| cg_cut(&self.rows, &self.rhs, u))
            .collect::<Result<Vec<_>>>()?;
        for cut in cuts {
            self.rows.push(cut.alpha.clone());
            self.rhs.push(cut.beta.clone());
            self.cuts.push(cut);
        }
        Ok(())
    }
}

/// Applies `u₁, …, u_W` one after another; cut `w` sees every earlier cut row.
pub fn sequential_cuts(ip: &IntegerProgram, us: &[Vec<Rational>]) -> Result<ExtendedInstance> {
    let params = CutParameters::Sequential(us.to_vec());
    params.validate(ip.m())?;
    let mut ext = ExtendedInstance::from_base(ip);
    for u in us {
        ext.apply_wave(std::slice::from_ref(u))?;
    }
    Ok(ext)
}

/// Applies `W` waves of `k` cuts; cuts within a wave see only the rows that
/// existed before the wave.
pub fn wave_cuts(ip: &IntegerProgram, waves: &[Vec<Vec<Rational>>]) -> Result<ExtendedInstance> {
    CutParameters::Waves(waves.to_vec()).validate(ip.m())?;
    let mut ext = ExtendedInstance::from_base(ip);
    for wave in waves {
        ext.apply_wave(wave)?;
    }
    Ok(ext)
}

/// Generates the cuts for any parameter layout.
pub fn generate_cuts(ip: &IntegerProgram, params: &CutParameters) -> Result<ExtendedInstance> {
    params.validate(ip.m())?;
    let mut ext = ExtendedInstance::from_base(ip);
    for wave in params.as_waves() {
        ext.apply_wave(&wave)?;
    }
    Ok(ext)
}

/// Rewrites waves as the equivalent zero-padded cut sequence: cut `j` of a
/// wave gets `j` trailing zeros so it ignores the rows of its own wave.
pub fn waves_to_sequential(waves: &[Vec<Vec<Rational>>]) -> Vec<Vec<Rational>> {
    waves
        .iter()
        .flat_map(|wave| {
            wave.iter().enumerate().map(|(j, u)| {
                let mut padded = u.clone();
                padded.extend(std::iter::repeat_n(Rational::zero(), j));
                padded
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validity {
    pub valid: bool,
    /// An integer-feasible point the cut removes, when invalid.
    pub witness: Option<Vec<i64>>,
}

/// Checks the cut against every integer-feasible point of `[0, box]`.
pub fn is_valid_cut(
    ip: &IntegerProgram,
    cut: &Cut,
    bounds: &[u64],
    budget: u128,
) -> Result<Validity> {
    check_len("cut", ip.n(), cut.alpha.len())?;
    let points = enumerate_integer_points(ip, bounds, budget)?;
    let witness = points.points.into_iter().find(|x| {
        let xr: Vec<Rational> = x.iter().map(|&v| rational::int(v)).collect();
        cut.separates(&xr)
    });
    Ok(Validity {
        valid: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreRule {
    Efficacy,
    Parallelism,
    DirectedCutoff,
    IntegralSupport,
}

impl ScoreRule {
    pub const ALL: [ScoreRule; 4] = [
        ScoreRule::Efficacy,
        ScoreRule::Parallelism,
        ScoreRule::DirectedCutoff,
        ScoreRule::IntegralSupport,
    ];
}

/// What a cut is scored against.
#[derive(Debug, Clone, Copy)]
pub struct ScoreContext<'a> {
    pub lp_solution: &'a [Rational],
    pub incumbent: Option<&'a [Rational]>,
    pub objective: &'a [Rational],
    /// `true` for variables constrained to be integral.
    pub integral: &'a [bool],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBreakdown {
    pub values: [f64; 4],
    /// Directed cutoff fell back to efficacy (no incumbent, or the incumbent
    /// direction is parallel to the cut).
    pub directed_fallback: bool,
}

/// All four scores of a cut, or `None` for a zero-`α` cut, which is not a
/// candidate.
pub fn score_all(cut: &Cut, ctx: &ScoreContext<'_>) -> Option<ScoreBreakdown> {
    if cut.is_zero() {
        return None;
    }
    let alpha_norm = rational::l2_norm_f64(&cut.alpha);
    let violation = cut.violation(ctx.lp_solution);
    let efficacy = rational::to_f64(&violation) / alpha_norm;

    let c_norm = rational::l2_norm_f64(ctx.objective);
    let parallelism = if c_norm == 0.0 {
        0.0
    } else {
        rational::to_f64(&rational::dot(ctx.objective, &cut.alpha).abs()) / (alpha_norm * c_norm)
    };

    let mut directed_fallback = true;
    let mut directed = efficacy;
    if let Some(inc) = ctx.incumbent {
        let dir: Vec<Rational> = inc.iter().zip(ctx.lp_solution).map(|(a, b)| a - b).collect();
        let along = rational::dot(&cut.alpha, &dir).abs();
        if !along.is_zero() {
            directed = rational::to_f64(&violation) / rational::to_f64(&along)
                * rational::l2_norm_f64(&dir);
            directed_fallback = false;
        }
    }

    let support: Vec<usize> = (0..cut.alpha.len())
        .filter(|&i| !cut.alpha[i].is_zero())
        .collect();
    let integral_support = support.iter().filter(|&&i| ctx.integral[i]).count() as f64
        / support.len() as f64;

    Some(ScoreBreakdown {
        values: [efficacy, parallelism, directed, integral_support],
        directed_fallback,
    })
}

/// One scoring rule; `None` for a zero-`α` cut.
pub fn score(rule: ScoreRule, cut: &Cut, ctx: &ScoreContext<'_>) -> Option<f64> {
    let idx = ScoreRule::ALL.iter().position(|r| *r == rule).unwrap();
    score_all(cut, ctx).map(|s| s.values[idx])
}

/// Floors of a cut's `α` and `β` as integers.
pub fn cut_floors(cut: &Cut) -> Vec<BigInt> {
    cut.alpha
        .iter()
        .chain(std::iter::once(&cut.beta))
        .map(rational::floor)
        .collect()
}
