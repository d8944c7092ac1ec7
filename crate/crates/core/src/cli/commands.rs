use std::fmt::Write as _;
use std::path::Path;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::svg::step_plot;
use super::*;
use crate::cuts::{generate_cuts, CutParameters};
use crate::geometry::{
    count_regions_grid, linear_grid, mu_sweep, separating_multipliers, u_sweep, verify_piecewise_constancy, ParamLayout, Sampler,
    SweepTable, DEFAULT_GRID_BUDGET,
};
use crate::ip::{jeroslow, random_packing, IntegerProgram};
use crate::learn::{
    empirical_rademacher, erm_learn, max_norms, pdim_bound, rademacher_bound, sample_size, value_matrix,
    InstanceGenerator, PdimBoundSpec, PdimFamily, RademacherMode, SampleSet,
};
use crate::rational::{self, int, ratio, Rational};
use crate::search::{run_branch_and_cut, CutConfig, CutPlacement, ScoringWeights, SearchResult};

const DEFAULT_KAPPA: usize = 64;
/// Multipliers are drawn as `k/UNIT_DENOMINATOR`.
const UNIT_DENOMINATOR: i64 = 20;
const WEIGHT_DENOMINATOR: i64 = 100;
const SEPARATION_TRIES: usize = 20_000;
/// Mixed into the run seed for candidate draws so they never share a
/// stream with instance draws.
const CANDIDATE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

type CliResult<T> = std::result::Result<T, CliError>;

struct Outcome {
    text: String,
    violation: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, violation: None }
    }
}

/// Runs a parsed configuration.
pub fn run(cfg: ExperimentConfig) -> CliResult<()> {
    let cfg = cfg.resolve()?;
    if let Some(path) = &cfg.save_config {
        write_file(path, &cfg.to_toml()?)?;
    }
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| CliError::input("no subcommand given"))?;
    let jobs = cfg.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| dispatch(&cfg, &command))?;
    match &cfg.out {
        Some(path) => write_file(path, &outcome.text)?,
        None => print!("{}", outcome.text),
    }
    match outcome.violation {
        Some(msg) => Err(CliError::violation(msg)),
        None => Ok(()),
    }
}

fn dispatch(cfg: &ExperimentConfig, command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Jeroslow(a) => cmd_jeroslow(cfg, a),
        Command::Sweep(a) => cmd_sweep(cfg, a),
        Command::Regions(a) => cmd_regions(cfg, a),
        Command::Learn(a) => cmd_learn(cfg, a),
        Command::Rademacher(a) => cmd_rademacher(cfg, a),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn require_seed(cfg: &ExperimentConfig) -> CliResult<u64> {
    cfg.seed
        .ok_or_else(|| CliError::input("--seed is required for generated data"))
}

fn kappa(cfg: &ExperimentConfig) -> usize {
    cfg.kappa.unwrap_or(DEFAULT_KAPPA)
}

fn generator(args: &InstanceArgs) -> InstanceGenerator {
    match args.generator.unwrap_or_default() {
        GeneratorKind::Jeroslow => InstanceGenerator::Jeroslow { n: args.gen_n.unwrap_or(5) },
        GeneratorKind::Packing => InstanceGenerator::Packing {
            n: args.gen_n.unwrap_or(4),
            m: args.gen_m.unwrap_or(3),
            coeff_max: args.coeff_max.unwrap_or(3),
        },
    }
}

fn load_instance(cfg: &ExperimentConfig, args: &InstanceArgs) -> CliResult<IntegerProgram> {
    if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        return Ok(IntegerProgram::from_text(&text)?);
    }
    Ok(match generator(args) {
        InstanceGenerator::Jeroslow { n } => jeroslow(n)?,
        InstanceGenerator::Packing { n, m, coeff_max } => random_packing(require_seed(cfg)?, n, m, coeff_max)?,
    })
}

fn parse_rational(s: &str) -> CliResult<Rational> {
    Ok(rational::parse(s)?)
}

fn parse_vectors(s: &str) -> CliResult<Vec<Vec<Rational>>> {
    s.split(';')
        .map(|v| rational::parse_vector(v).map_err(CliError::from))
        .collect()
}

fn parse_weights(s: &str) -> CliResult<Vec<f64>> {
    rational::parse_vector(s)?
        .iter()
        .map(|r| {
            let v = rational::to_f64(r);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::input("weights must be finite"))
            }
        })
        .collect()
}

fn random_unit_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
    (0..len)
        .map(|_| ratio(rng.gen_range(0..=UNIT_DENOMINATOR), UNIT_DENOMINATOR))
        .collect()
}

fn candidate_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ CANDIDATE_STREAM)
}

fn bool_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "violated"
    }
}

fn run_cut(ip: &IntegerProgram, u: Vec<Rational>, kappa: usize) -> CliResult<SearchResult> {
    Ok(run_branch_and_cut(
        ip,
        &ScoringWeights::default(),
        &CutConfig::fixed(CutParameters::Single(u)),
        kappa,
    )?)
}

fn cmd_jeroslow(cfg: &ExperimentConfig, args: &JeroslowArgs) -> CliResult<Outcome> {
    let n = args.n;
    let ip = jeroslow(n)?;
    let expected = 1usize
        .checked_shl(((n - 1) / 2) as u32)
        .ok_or_else(|| CliError::input("n too large"))?;
    let kappa = cfg.kappa.unwrap_or(DEFAULT_KAPPA.max(4 * expected));
    if kappa < expected {
        return Err(CliError::input(format!("kappa {kappa} cannot certify a tree of size {expected}")));
    }
    let nn = n as i64;
    let threshold = ratio(nn + 1, 2 * nn);
    let mut out = String::new();
    let _ = writeln!(out, "n={n}");
    let _ = writeln!(out, "kappa={kappa}");
    let _ = writeln!(out, "threshold={}", rational::render(&threshold));
    let _ = writeln!(out, "large_tree_min={expected}");

    let ok = if args.scan {
        let eps = ratio(1, 1_000_000);
        let fifth = ratio(1, 5);
        let below = vec![&threshold - &eps + &fifth, fifth.clone()];
        let above_first = (&threshold + &eps + &fifth).min(int(1));
        let above = vec![above_first, fifth.clone()];
        let baseline = run_branch_and_cut(&ip, &ScoringWeights::default(), &CutConfig::none(), kappa)?;
        let b = run_cut(&ip, below.clone(), kappa)?;
        let a = run_cut(&ip, above.clone(), kappa)?;
        let _ = writeln!(out, "no_cut tree_size={} hit_cap={}", baseline.tree_size, baseline.hit_cap);
        let _ = writeln!(
            out,
            "below u={} tree_size={} hit_cap={}",
            rational::render_vector(&below),
            b.tree_size,
            b.hit_cap
        );
        let _ = writeln!(
            out,
            "above u={} tree_size={} hit_cap={}",
            rational::render_vector(&above),
            a.tree_size,
            a.hit_cap
        );
        b.tree_size == 1 && a.tree_size >= expected && baseline.tree_size >= expected
    } else {
        let u = rational::parse_vector(
            args.u
                .as_deref()
                .ok_or_else(|| CliError::input("give --u or --scan"))?,
        )?;
        let diff = &u.first().cloned().unwrap_or_default() - &u.get(1).cloned().unwrap_or_default();
        let res = run_cut(&ip, u.clone(), kappa)?;
        let regime = if diff >= ratio(1, 2) && diff < threshold {
            "closing"
        } else if diff >= threshold && diff < int(1) {
            "large"
        } else {
            "none"
        };
        let _ = writeln!(
            out,
            "u={} difference={} regime={regime}",
            rational::render_vector(&u),
            rational::render(&diff)
        );
        let _ = writeln!(out, "tree_size={} hit_cap={}", res.tree_size, res.hit_cap);
        match regime {
            "closing" => res.tree_size == 1,
            "large" => res.tree_size >= expected,
            _ => true,
        }
    };
    let _ = writeln!(out, "status={}", bool_word(ok));
    Ok(Outcome {
        text: out,
        violation: (!ok).then(|| "observed tree sizes contradict the predicted regimes".to_string()),
    })
}

fn sweep_points(table: &SweepTable) -> Vec<(f64, f64)> {
    table
        .rows
        .iter()
        .map(|r| (rational::to_f64(&r.param), r.tree_size as f64))
        .collect()
}

fn cmd_sweep(cfg: &ExperimentConfig, args: &SweepArgs) -> CliResult<Outcome> {
    let ip = load_instance(cfg, &args.instance)?;
    let kappa = kappa(cfg);
    let points = args.points.unwrap_or(101);
    let (table, bound, label) = match args.mode.unwrap_or_default() {
        SweepMode::Mu => {
            let mut template = ScoringWeights::default();
            if let Some(w) = &args.weights {
                template.cut = parse_weights(w)?;
            }
            let index = args.index.unwrap_or(2);
            let lo = parse_rational(args.lo.as_deref().unwrap_or("0"))?;
            let hi = parse_rational(args.hi.as_deref().unwrap_or("1"))?;
            let candidates = match &args.candidates {
                Some(s) => parse_vectors(s)?,
                None => separating_multipliers(
                    &ip,
                    require_seed(cfg)? ^ CANDIDATE_STREAM,
                    args.candidate_count.unwrap_or(5),
                    UNIT_DENOMINATOR,
                    SEPARATION_TRIES,
                )?,
            };
            let grid = linear_grid(&lo, &hi, points)?;
            let table = mu_sweep(&ip, &template, index, &grid, &candidates, kappa)?;
            let r = table.root_candidates;
            (table, Some(r * r.saturating_sub(1) / 2), format!("mu[{index}]"))
        }
        SweepMode::U => {
            let from = match &args.from {
                Some(s) => rational::parse_vector(s)?,
                None => vec![Rational::zero(); ip.m()],
            };
            let to = match &args.to {
                Some(s) => rational::parse_vector(s)?,
                None => vec![int(1); ip.m()],
            };
            let grid = linear_grid(&int(0), &int(1), points)?;
            let table = u_sweep(&ip, &ScoringWeights::default(), &from, &to, &grid, kappa)?;
            (table, None, "t".to_string())
        }
    };
    if let Some(path) = &args.svg {
        write_file(path, &step_plot(&sweep_points(&table), &label, "tree size"))?;
    }
    let violation = bound.and_then(|b| {
        (table.change_points() > b)
            .then(|| format!("{} change points exceed the pair bound {b}", table.change_points()))
    });
    Ok(Outcome {
        text: table.to_csv(),
        violation,
    })
}

fn parse_layout(s: &str) -> CliResult<ParamLayout> {
    let bad = || CliError::input(format!("unknown layout {s:?}; use single, seq:W or waves:WxK"));
    if s == "single" {
        return Ok(ParamLayout::Single);
    }
    if let Some(w) = s.strip_prefix("seq:") {
        let cuts = w.parse().map_err(|_| bad())?;
        return Ok(ParamLayout::Sequential { cuts });
    }
    if let Some(rest) = s.strip_prefix("waves:") {
        let (w, k) = rest.split_once('x').ok_or_else(bad)?;
        return Ok(ParamLayout::Waves {
            waves: w.parse().map_err(|_| bad())?,
            per_wave: k.parse().map_err(|_| bad())?,
        });
    }
    Err(bad())
}

fn cmd_regions(cfg: &ExperimentConfig, args: &RegionsArgs) -> CliResult<Outcome> {
    let ip = load_instance(cfg, &args.instance)?;
    let kappa = kappa(cfg);
    let layout = parse_layout(args.layout.as_deref().unwrap_or("single"))?;
    let sampler = Sampler::Random {
        seed: require_seed(cfg)?,
        count: args.samples.unwrap_or(2000),
        denominator: 10_000,
    };
    let evaluator = args.evaluator.unwrap_or_default();
    let report = match evaluator {
        RegionEvaluator::Tree => verify_piecewise_constancy(&ip, layout, sampler, |p| {
            let cfg = CutConfig::fixed(p.clone());
            run_branch_and_cut(&ip, &ScoringWeights::default(), &cfg, kappa).map(|r| r.tree_size)
        })?,
        RegionEvaluator::Cut => verify_piecewise_constancy(&ip, layout, sampler, |p| {
            generate_cuts(&ip, p).map(|e| {
                e.cuts()
                    .iter()
                    .map(|c| (c.alpha.clone(), c.beta.clone()))
                    .collect::<Vec<_>>()
            })
        })?,
    };
    let mut out = String::new();
    let _ = writeln!(out, "layout={}", args.layout.as_deref().unwrap_or("single"));
    let _ = writeln!(out, "evaluator={}", format!("{evaluator:?}").to_lowercase());
    let _ = writeln!(out, "samples={}", report.samples);
    let _ = writeln!(out, "regions_sampled={}", report.regions);
    let _ = writeln!(out, "pairs_tested={}", report.pairs_tested);
    let _ = writeln!(out, "violations={}", report.violations);
    for (a, b) in &report.violating_pairs {
        let _ = writeln!(out, "violating_pair={a},{b}");
    }
    let mut ok = report.violations == 0;
    if layout == ParamLayout::Single {
        let resolution = args.resolution.unwrap_or(21);
        let count = count_regions_grid(&ip, resolution, DEFAULT_GRID_BUDGET)?;
        let _ = writeln!(out, "grid_resolution={resolution}");
        let _ = writeln!(out, "distinct_signatures={}", count.distinct_signatures);
        let _ = writeln!(out, "cell_bound={}", count.bound);
        ok &= count.distinct_signatures as u128 <= count.bound;
    }
    let _ = writeln!(out, "status={}", bool_word(ok));
    Ok(Outcome {
        text: out,
        violation: (!ok).then(|| "tree size not constant on a signature region".to_string()),
    })
}

enum Candidate {
    Mu(Vec<Rational>),
    U(Vec<Rational>),
}

impl Candidate {
    fn describe(&self) -> String {
        match self {
            Candidate::Mu(w) => format!("mu={}", rational::render_vector(w)),
            Candidate::U(u) => format!("u={}", rational::render_vector(u)),
        }
    }
}

/// For the `mu` family every instance gets its own pool of cuts that
/// separate its root LP optimum, drawn from `pool_seed`.
struct CandidateClass {
    family: CandidateFamily,
    candidates: Vec<Candidate>,
    pool_size: usize,
    pool_seed: u64,
}

impl CandidateClass {
    fn draw(args: &SampleArgs, m: usize, seed: u64) -> Self {
        let mut rng = candidate_rng(seed);
        let family = args.family.unwrap_or_default();
        let count = args.candidate_count.unwrap_or(20);
        let pool_seed = rng.gen();
        let candidates = (0..count)
            .map(|_| match family {
                CandidateFamily::Mu => Candidate::Mu(
                    (0..ScoringWeights::CUT_RULES)
                        .map(|_| ratio(rng.gen_range(0..=WEIGHT_DENOMINATOR), WEIGHT_DENOMINATOR))
                        .collect(),
                ),
                CandidateFamily::U => Candidate::U(random_unit_vector(&mut rng, m)),
            })
            .collect();
        Self {
            family,
            candidates,
            pool_size: args.pool.unwrap_or(5),
            pool_seed,
        }
    }

    fn evaluate(&self, c: &Candidate, ip: &IntegerProgram, kappa: usize) -> crate::error::Result<f64> {
        let res = match c {
            Candidate::Mu(w) => {
                let weights = ScoringWeights {
                    cut: w.iter().map(rational::to_f64).collect(),
                    ..ScoringWeights::default()
                };
                let pool = separating_multipliers(ip, self.pool_seed, self.pool_size, UNIT_DENOMINATOR, SEPARATION_TRIES)?;
                let cuts = CutConfig::select(pool, CutPlacement::RootOnly);
                run_branch_and_cut(ip, &weights, &cuts, kappa)?
            }
            Candidate::U(u) => run_branch_and_cut(
                ip,
                &ScoringWeights::default(),
                &CutConfig::fixed(CutParameters::Single(u.clone())),
                kappa,
            )?,
        };
        Ok(res.tree_size as f64)
    }

    fn pdim_spec(&self, instances: &[IntegerProgram]) -> PdimBoundSpec {
        let (alpha, beta) = max_norms(instances);
        let (m, n) = (instances[0].m() as u64, instances[0].n() as u64);
        let family = match self.family {
            CandidateFamily::Mu => PdimFamily::ScoringPolicy {
                d: ScoringWeights::CUT_RULES as u64,
                r: self.pool_size.max(1) as u64,
            },
            CandidateFamily::U => PdimFamily::SingleCut,
        };
        PdimBoundSpec::new(family, m, n, alpha, beta)
    }
}

fn sample_generator(args: &SampleArgs) -> CliResult<InstanceGenerator> {
    if args.instance.instance.is_some() {
        return Err(CliError::input("sampling commands need a generator, not an instance file"));
    }
    Ok(generator(&args.instance))
}

fn cmd_learn(cfg: &ExperimentConfig, args: &LearnArgs) -> CliResult<Outcome> {
    let seed = require_seed(cfg)?;
    let kappa = kappa(cfg);
    let gen = sample_generator(&args.sample)?;
    let count = args.sample.count.unwrap_or(40);
    let train = args.train.unwrap_or((count / 2).max(1));
    let set = SampleSet::generate(gen, count, train, seed)?;
    let class = CandidateClass::draw(&args.sample, set.instances[0].m(), seed);
    let report = erm_learn(&set, &class.candidates, |c, ip| class.evaluate(c, ip, kappa), kappa)?;

    let epsilon = args.epsilon.unwrap_or(0.1);
    let delta = args.delta.unwrap_or(0.01);
    let constant = args.constant.unwrap_or(1.0);
    let pdim = pdim_bound(&class.pdim_spec(&set.instances), constant)?;
    let n_rec = sample_size(epsilon, delta, pdim, kappa as f64, constant)?;
    let fmt_opt = |x: Option<f64>| x.map_or("na".to_string(), |v| format!("{v:.6}"));

    let mut header: Vec<(String, String)> = vec![
        ("family".into(), format!("{:?}", class.family).to_lowercase()),
        ("seed".into(), seed.to_string()),
        ("kappa".into(), kappa.to_string()),
        ("instances".into(), count.to_string()),
        ("train".into(), set.train.len().to_string()),
        ("test".into(), set.test.len().to_string()),
        ("epsilon".into(), epsilon.to_string()),
        ("delta".into(), delta.to_string()),
        ("constant".into(), constant.to_string()),
        ("pdim_bound_up_to_constants".into(), format!("{pdim:.6}")),
        ("recommended_n".into(), n_rec.to_string()),
        ("selected_gap".into(), fmt_opt(report.best().gap)),
        ("max_gap".into(), fmt_opt(report.max_gap())),
    ];
    if class.family == CandidateFamily::Mu {
        header.push(("pool_size".into(), class.pool_size.to_string()));
        header.push(("pool_seed".into(), class.pool_seed.to_string()));
    }
    for (i, c) in class.candidates.iter().enumerate() {
        header.push((format!("candidate_{i}"), c.describe()));
    }
    let best = report.best().train_mean;
    let ok = report.candidates.iter().all(|c| best <= c.train_mean);
    Ok(Outcome {
        text: report.to_table(&header),
        violation: (!ok).then(|| "selected candidate is not a training minimizer".to_string()),
    })
}

fn cmd_rademacher(cfg: &ExperimentConfig, args: &RademacherArgs) -> CliResult<Outcome> {
    let seed = require_seed(cfg)?;
    let kappa = kappa(cfg);
    let gen = sample_generator(&args.sample)?;
    let count = args.sample.count.unwrap_or(8);
    let set = SampleSet::generate(gen, count, count, seed)?;
    let class = CandidateClass::draw(&args.sample, set.instances[0].m(), seed);
    let matrix = value_matrix(&set.instances, &class.candidates, |c, ip| class.evaluate(c, ip, kappa), kappa)?;
    let mode = if args.exhaustive {
        RademacherMode::Exhaustive
    } else {
        RademacherMode::MonteCarlo {
            draws: args.draws.unwrap_or(10_000),
            seed,
        }
    };
    let est = empirical_rademacher(&matrix, mode)?;
    let mut out = String::new();
    let _ = writeln!(out, "family={}", format!("{:?}", class.family).to_lowercase());
    let _ = writeln!(out, "instances={count}");
    let _ = writeln!(out, "candidates={}", class.candidates.len());
    let _ = writeln!(out, "mode={}", if args.exhaustive { "exhaustive" } else { "monte_carlo" });
    let _ = writeln!(out, "draws={}", est.draws);
    let _ = writeln!(out, "estimate={:.9}", est.estimate);
    let _ = writeln!(out, "std_error={:.9}", est.std_error);
    if class.family == CandidateFamily::U {
        let bound = rademacher_bound(&set.instances, 1, 1, kappa as f64, 1.0)?;
        let _ = writeln!(out, "single_cut_bound_up_to_constants={bound:.6}");
    }
    let (alpha, beta) = max_norms(&set.instances);
    let _ = writeln!(out, "alpha_n={alpha}");
    let _ = writeln!(out, "beta_n={beta}");
    let rows: Vec<String> = matrix
        .iter()
        .map(|r| r.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","))
        .collect();
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(out, "values_{i}={r}");
    }
    Ok(Outcome::ok(out))
}
