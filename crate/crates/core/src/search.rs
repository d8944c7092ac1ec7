//! Parameterized tree search and its branch-and-cut instantiation.
//!
//! The engine runs up to `κ` rounds; each round walks a fixed list of steps,
//! and at each step takes the action maximizing a weighted sum of that
//! step's scores. Steps with no available action are skipped. Scores within
//! a relative tolerance of `1e-12` count as tied, and ties go to the action
//! listed first.
//!
//! Branch-and-cut plugs in three steps per round: node selection, cut
//! selection and variable selection. One node is expanded (its LP solved)
//! per round, so the number of rounds equals the tree size.

use std::fmt::Write as _;

use num::BigInt;

use crate::cuts::{cg_cut, generate_cuts, score_all, Cut, CutParameters, ScoreContext};
use crate::error::{check_len, invalid, Error, Result};
use crate::ip::IntegerProgram;
use crate::lp::{solve_relaxation, LpStatus, Row};
use crate::rational::{self, Rational};

/// Relative tolerance under which two weighted scores are tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A candidate action: a caller-chosen identifier plus one score per rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub id: usize,
    pub scores: Vec<f64>,
}

/// A problem the generic engine can drive.
pub trait SearchProblem {
    type State;

    fn initial_state(&self) -> Self::State;

    fn step_count(&self) -> usize;

    /// No further rounds are needed.
    fn is_finished(&self, state: &Self::State) -> bool;

    /// Actions available at `step`, in tie-breaking order.
    fn actions(&self, step: usize, state: &Self::State) -> Vec<Action>;

    fn apply(&self, step: usize, action_id: usize, state: &mut Self::State);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub round: usize,
    pub step: usize,
    pub action: usize,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct SearchRun<S> {
    pub rounds: usize,
    pub trace: Vec<TraceEntry>,
    pub hit_cap: bool,
    pub utility: f64,
    pub final_state: S,
}

/// `a` beats `b` by more than the tie tolerance.
pub fn strictly_better(a: f64, b: f64) -> bool {
    a - b > TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Index into `actions` of the weighted-score maximizer, lowest index on ties.
pub fn argmax_weighted(step: usize, actions: &[Action], weights: &[f64]) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, action) in actions.iter().enumerate() {
        check_len("action scores", weights.len(), action.scores.len())?;
        let value: f64 = weights.iter().zip(&action.scores).map(|(w, s)| w * s).sum();
        if !value.is_finite() {
            return Err(Error::NonFiniteScore {
                step,
                action: action.id,
            });
        }
        if best.is_none_or(|(_, b)| strictly_better(value, b)) {
            best = Some((idx, value));
        }
    }
    Ok(best)
}

/// Runs the generic loop for at most `kappa` rounds. `weights[j]` weights
/// the scores of step `j`; `utility` sees only the final state.
pub fn run_tree_search<P, U>(
    problem: &P,
    weights: &[Vec<f64>],
    kappa: usize,
    utility: U,
) -> Result<SearchRun<P::State>>
where
    P: SearchProblem,
    U: Fn(&P::State) -> f64,
{
    check_len("step weights", problem.step_count(), weights.len())?;
    if weights.iter().flatten().any(|w| !w.is_finite()) {
        return Err(invalid("weights must be finite"));
    }
    let mut state = problem.initial_state();
    let mut trace = Vec::new();
    let mut rounds = 0;
    while rounds < kappa && !problem.is_finished(&state) {
        rounds += 1;
        for (step, w) in weights.iter().enumerate() {
            let actions = problem.actions(step, &state);
            if let Some((idx, value)) = argmax_weighted(step, &actions, w)? {
                let id = actions[idx].id;
                trace.push(TraceEntry {
                    round: rounds,
                    step,
                    action: id,
                    score: value,
                });
                problem.apply(step, id, &mut state);
            }
        }
    }
    let hit_cap = !problem.is_finished(&state);
    let utility = utility(&state);
    Ok(SearchRun {
        rounds,
        trace,
        hit_cap,
        utility,
        final_state: state,
    })
}

/// Renders a trace as `round,step,action_index,score_value` lines.
pub fn trace_log(trace: &[TraceEntry]) -> String {
    let mut out = String::from("round,step,action_index,score_value\n");
    for e in trace {
        let _ = writeln!(out, "{},{},{},{}", e.round, e.step, e.action, e.score);
    }
    out
}

// ---------------------------------------------------------------------------
// Branch-and-cut

pub const NODE_STEP: usize = 0;
pub const CUT_STEP: usize = 1;
pub const VAR_STEP: usize = 2;

/// Weights for the three branch-and-cut steps.
///
/// Node scores: `[parent LP bound, depth]`. Cut scores: efficacy, objective
/// parallelism, directed cutoff, integral support. Variable scores:
/// `[min(f, 1−f), |c_i|]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringWeights {
    pub node: Vec<f64>,
    pub cut: Vec<f64>,
    pub var: Vec<f64>,
}

impl ScoringWeights {
    pub const NODE_RULES: usize = 2;
    pub const CUT_RULES: usize = 4;
    pub const VAR_RULES: usize = 2;

    /// The weighting `3/5, 1/10, 1/2, 1/10` used by SCIP.
    pub const SCIP_CUT_WEIGHTS: [f64; 4] = [0.6, 0.1, 0.5, 0.1];

    pub fn as_steps(&self) -> Vec<Vec<f64>> {
        vec![self.node.clone(), self.cut.clone(), self.var.clone()]
    }

    pub fn total_len(&self) -> usize {
        self.node.len() + self.cut.len() + self.var.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_len("node weights", Self::NODE_RULES, self.node.len())?;
        check_len("cut weights", Self::CUT_RULES, self.cut.len())?;
        check_len("variable weights", Self::VAR_RULES, self.var.len())
    }
}

impl Default for ScoringWeights {
    /// Depth-first node selection, SCIP cut weights, most-fractional branching.
    fn default() -> Self {
        Self {
            node: vec![0.0, 1.0],
            cut: Self::SCIP_CUT_WEIGHTS.to_vec(),
            var: vec![1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutPlacement {
    #[default]
    RootOnly,
    EveryNode,
}

/// Which cuts branch-and-cut may use.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CutConfig {
    /// Cuts applied unconditionally at the root, wave by wave, re-solving
    /// the LP after each wave.
    pub fixed: Option<CutParameters>,
    /// Multiplier vectors (length `m`) of the candidate CG cuts offered to
    /// the cut-selection step.
    pub candidates: Vec<Vec<Rational>>,
    pub placement: CutPlacement,
}

impl CutConfig {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn fixed(params: CutParameters) -> Self {
        Self {
            fixed: Some(params),
            ..Self::default()
        }
    }

    pub fn select(candidates: Vec<Vec<Rational>>, placement: CutPlacement) -> Self {
        Self {
            fixed: None,
            candidates,
            placement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    id: usize,
    depth: usize,
    rows: Vec<Row>,
    /// LP objective of the parent; `None` at the root.
    bound: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Expanded {
    node: Node,
    x: Vec<Rational>,
    objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incumbent {
    pub x: Vec<BigInt>,
    pub value: Rational,
}

/// Search state of a branch-and-cut run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnbState {
    open: Vec<Node>,
    current: Option<Expanded>,
    next_id: usize,
    pub expanded: usize,
    pub incumbent: Option<Incumbent>,
    /// Incumbent value after each improvement.
    pub incumbent_history: Vec<Rational>,
    /// Largest LP bound over open and current nodes after each round step,
    /// once every node carries a bound.
    pub bound_history: Vec<Rational>,
    /// Candidate index of the cut chosen at the root, if any.
    pub root_cut: Option<usize>,
    pub applied_cuts: usize,
}

struct BranchAndCut<'a> {
    ip: &'a IntegerProgram,
    root_waves: Vec<Vec<Row>>,
    candidates: Vec<(usize, Cut)>,
    placement: CutPlacement,
    integral: Vec<bool>,
}

enum NodeVerdict {
    Fathomed,
    Open(Vec<Rational>, Rational),
}

impl<'a> BranchAndCut<'a> {
    fn new(ip: &'a IntegerProgram, config: &CutConfig) -> Result<Self> {
        let root_waves = match &config.fixed {
            None => Vec::new(),
            Some(params) => {
                let ext = generate_cuts(ip, params)?;
                let mut cuts = ext.cuts().iter();
                params
                    .as_waves()
                    .iter()
                    .map(|wave| {
                        wave.iter()
                            .map(|_| cuts.next().expect("one cut per vector").to_row())
                            .collect()
                    })
                    .collect()
            }
        };
        let mut candidates = Vec::new();
        for (idx, u) in config.candidates.iter().enumerate() {
            let cut = cg_cut(ip.a(), ip.b(), u)?;
            CutParameters::Single(u.clone()).validate(ip.m())?;
            if !cut.is_zero() {
                candidates.push((idx, cut));
            }
        }
        Ok(Self {
            ip,
            root_waves,
            candidates,
            placement: config.placement,
            integral: vec![true; ip.n()],
        })
    }

    /// Solves the node LP and classifies it, updating the incumbent.
    fn evaluate(&self, rows: &[Row], state: &mut BnbState) -> NodeVerdict {
        let out = solve_relaxation(self.ip, rows).expect("rows built with matching dimension");
        match out.status {
            // An unbounded relaxation gives no usable bound or branching point.
            LpStatus::Infeasible | LpStatus::Unbounded => NodeVerdict::Fathomed,
            LpStatus::Optimal => {
                let x = out.solution.expect("optimal has solution");
                let obj = out.objective.expect("optimal has objective");
                if let Some(inc) = &state.incumbent {
                    if obj <= inc.value {
                        return NodeVerdict::Fathomed;
                    }
                }
                if x.iter().all(rational::is_integral) {
                    state.incumbent = Some(Incumbent {
                        x: x.iter().map(rational::floor).collect(),
                        value: obj.clone(),
                    });
                    state.incumbent_history.push(obj.clone());
                    state.open.retain(|n| n.bound.as_ref().is_none_or(|b| *b > obj));
                    return NodeVerdict::Fathomed;
                }
                NodeVerdict::Open(x, obj)
            }
        }
    }

    fn record_bound(state: &mut BnbState) {
        let mut best: Option<Rational> = state.current.as_ref().map(|c| c.objective.clone());
        for node in &state.open {
            match &node.bound {
                None => return,
                Some(b) => {
                    if best.as_ref().is_none_or(|cur| b > cur) {
                        best = Some(b.clone());
                    }
                }
            }
        }
        if let Some(b) = best {
            state.bound_history.push(b);
        }
    }

    fn cuts_allowed(&self, node: &Node) -> bool {
        match self.placement {
            CutPlacement::RootOnly => node.depth == 0,
            CutPlacement::EveryNode => true,
        }
    }
}

impl SearchProblem for BranchAndCut<'_> {
    type State = BnbState;

    fn initial_state(&self) -> BnbState {
        BnbState {
            open: vec![Node {
                id: 0,
                depth: 0,
                rows: Vec::new(),
                bound: None,
            }],
            current: None,
            next_id: 1,
            expanded: 0,
            incumbent: None,
            incumbent_history: Vec::new(),
            bound_history: Vec::new(),
            root_cut: None,
            applied_cuts: 0,
        }
    }

    fn step_count(&self) -> usize {
        3
    }

    fn is_finished(&self, state: &BnbState) -> bool {
        state.open.is_empty() && state.current.is_none()
    }

    fn actions(&self, step: usize, state: &BnbState) -> Vec<Action> {
        match step {
            NODE_STEP => {
                if state.current.is_some() {
                    return Vec::new();
                }
                state
                    .open
                    .iter()
                    .map(|n| Action {
                        id: n.id,
                        scores: vec![
                            n.bound.as_ref().map_or(0.0, rational::to_f64),
                            n.depth as f64,
                        ],
                    })
                    .collect()
            }
            CUT_STEP => {
                let Some(cur) = &state.current else {
                    return Vec::new();
                };
                if !self.cuts_allowed(&cur.node) {
                    return Vec::new();
                }
                let inc: Option<Vec<Rational>> = state
                    .incumbent
                    .as_ref()
                    .map(|i| i.x.iter().map(|v| Rational::from_integer(v.clone())).collect());
                let ctx = ScoreContext {
                    lp_solution: &cur.x,
                    incumbent: inc.as_deref(),
                    objective: self.ip.c(),
                    integral: &self.integral,
                };
                self.candidates
                    .iter()
                    .filter(|(_, cut)| cut.separates(&cur.x))
                    .filter_map(|(idx, cut)| {
                        score_all(cut, &ctx).map(|s| Action {
                            id: *idx,
                            scores: s.values.to_vec(),
                        })
                    })
                    .collect()
            }
            VAR_STEP => {
                let Some(cur) = &state.current else {
                    return Vec::new();
                };
                cur.x
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !rational::is_integral(v))
                    .map(|(i, v)| {
                        let f = v - v.floor();
                        let one_minus = Rational::from_integer(1.into()) - &f;
                        let frac = if f < one_minus { f } else { one_minus };
                        Action {
                            id: i,
                            scores: vec![
                                rational::to_f64(&frac),
                                rational::to_f64(&num::Signed::abs(&self.ip.c()[i])),
                            ],
                        }
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    fn apply(&self, step: usize, id: usize, state: &mut BnbState) {
        match step {
            NODE_STEP => {
                let pos = state
                    .open
                    .iter()
                    .position(|n| n.id == id)
                    .expect("selected node is open");
                let mut node = state.open.remove(pos);
                state.expanded += 1;
                let mut verdict = self.evaluate(&node.rows, state);
                if node.depth == 0 {
                    for wave in &self.root_waves {
                        if matches!(verdict, NodeVerdict::Fathomed) {
                            break;
                        }
                        node.rows.extend(wave.iter().cloned());
                        state.applied_cuts += wave.len();
                        verdict = self.evaluate(&node.rows, state);
                    }
                }
                if let NodeVerdict::Open(x, objective) = verdict {
                    state.current = Some(Expanded { node, x, objective });
                }
                Self::record_bound(state);
            }
            CUT_STEP => {
                let mut cur = state.current.take().expect("cut step needs a node");
                let (_, cut) = self
                    .candidates
                    .iter()
                    .find(|(idx, _)| *idx == id)
                    .expect("candidate exists");
                if cur.node.depth == 0 {
                    state.root_cut = Some(id);
                }
                cur.node.rows.push(cut.to_row());
                state.applied_cuts += 1;
                if let NodeVerdict::Open(x, objective) = self.evaluate(&cur.node.rows, state) {
                    state.current = Some(Expanded {
                        node: cur.node,
                        x,
                        objective,
                    });
                }
                Self::record_bound(state);
            }
            VAR_STEP => {
                let cur = state.current.take().expect("variable step needs a node");
                let n = self.ip.n();
                let v = &cur.x[id];
                let down = Row::upper(n, id, v.floor());
                let up = Row::lower(n, id, v.ceil());
                for extra in [down, up] {
                    let mut rows = cur.node.rows.clone();
                    rows.push(extra);
                    state.open.push(Node {
                        id: state.next_id,
                        depth: cur.node.depth + 1,
                        rows,
                        bound: Some(cur.objective.clone()),
                    });
                    state.next_id += 1;
                }
                Self::record_bound(state);
            }
            _ => {}
        }
    }
}

/// Outcome of a branch-and-cut run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Nodes whose LP was solved.
    pub tree_size: usize,
    pub action_trace: Vec<TraceEntry>,
    pub final_incumbent: Option<Incumbent>,
    pub hit_cap: bool,
    /// Tree size clamped to `[1, κ]`.
    pub utility: f64,
    pub root_cut: Option<usize>,
    pub applied_cuts: usize,
    pub incumbent_history: Vec<Rational>,
    pub bound_history: Vec<Rational>,
}

impl SearchResult {
    /// Canonical text rendering; equal results render identically.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tree_size={}", self.tree_size);
        let _ = writeln!(out, "hit_cap={}", self.hit_cap);
        let _ = writeln!(out, "utility={}", self.utility);
        let _ = writeln!(out, "root_cut={:?}", self.root_cut);
        let _ = writeln!(out, "applied_cuts={}", self.applied_cuts);
        match &self.final_incumbent {
            Some(inc) => {
                let xs: Vec<String> = inc.x.iter().map(BigInt::to_string).collect();
                let _ = writeln!(out, "incumbent={} value={}", xs.join(","), inc.value);
            }
            None => {
                let _ = writeln!(out, "incumbent=none");
            }
        }
        out.push_str(&trace_log(&self.action_trace));
        out
    }
}

/// Default utility: tree size clamped to `[1, κ]`.
pub fn tree_size_utility(expanded: usize, kappa: usize) -> f64 {
    expanded.clamp(1, kappa.max(1)) as f64
}

/// Runs branch-and-cut on `ip` through the generic engine.
pub fn run_branch_and_cut(
    ip: &IntegerProgram,
    weights: &ScoringWeights,
    cuts: &CutConfig,
    kappa: usize,
) -> Result<SearchResult> {
    if kappa == 0 {
        return Err(invalid("kappa must be at least 1"));
    }
    weights.validate()?;
    let problem = BranchAndCut::new(ip, cuts)?;
    let run = run_tree_search(&problem, &weights.as_steps(), kappa, |s: &BnbState| {
        tree_size_utility(s.expanded, kappa)
    })?;
    let state = run.final_state;
    debug_assert_eq!(state.expanded, run.rounds);
    Ok(SearchResult {
        tree_size: state.expanded,
        action_trace: run.trace,
        final_incumbent: state.incumbent,
        hit_cap: run.hit_cap,
        utility: run.utility,
        root_cut: state.root_cut,
        applied_cuts: state.applied_cuts,
        incumbent_history: state.incumbent_history,
        bound_history: state.bound_history,
    })
}

/// Root LP scoring context used by [`select_cut`].
#[derive(Debug, Clone)]
pub struct CutSelectionContext {
    pub lp_solution: Vec<Rational>,
    pub incumbent: Option<Vec<Rational>>,
    pub objective: Vec<Rational>,
    pub integral: Vec<bool>,
}

/// Index of the candidate maximizing `Σ μᵢ·scoreᵢ` among the candidates that
/// separate the LP solution; `None` when none separates.
pub fn select_cut(candidates: &[Cut], mu: &[f64], ctx: &CutSelectionContext) -> Result<Option<usize>> {
    check_len("cut weights", ScoringWeights::CUT_RULES, mu.len())?;
    let score_ctx = ScoreContext {
        lp_solution: &ctx.lp_solution,
        incumbent: ctx.incumbent.as_deref(),
        objective: &ctx.objective,
        integral: &ctx.integral,
    };
    let actions: Vec<Action> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.separates(&ctx.lp_solution))
        .filter_map(|(i, c)| {
            score_all(c, &score_ctx).map(|s| Action {
                id: i,
                scores: s.values.to_vec(),
            })
        })
        .collect();
    Ok(argmax_weighted(CUT_STEP, &actions, mu)?.map(|(idx, _)| actions[idx].id))
}

/// Candidate CG cuts (nonzero `α`) for multiplier vectors, keeping the
/// original index of each.
pub fn candidate_cuts(ip: &IntegerProgram, us: &[Vec<Rational>]) -> Result<Vec<(usize, Cut)>> {
    let mut out = Vec::new();
    for (i, u) in us.iter().enumerate() {
        let cut = cg_cut(ip.a(), ip.b(), u)?;
        if !cut.is_zero() {
            out.push((i, cut));
        }
    }
    Ok(out)
}
