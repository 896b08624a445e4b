//! The randomized search for a low-cost tree.
//!
//! A run keeps a best tree and repeatedly examines mutated copies of it. In
//! hill-climbing mode each generation applies one k-mutation with `k` drawn
//! from [`FatTailK`] and keeps the result if its score is strictly higher.
//! In Metropolis mode each generation is a walk of `trial_length` simple
//! mutations with a Metropolis acceptance step on the raw tree cost after
//! each one; the best tree of the walk then competes with the run's best.
//!
//! Simple termination runs one search until the score reaches 1, no
//! improvement happened within `patience` examined trees, or `max_trees`
//! trees were examined. Agreement termination advances `r` independently
//! seeded runs in lock step and stops once they all hold the same tree.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CostFunction, Scorer, ScorerKind};
use crate::mutation::{k_mutation, mutation_path_bound, random_mutation, FatTailK, MutationRecord};
use crate::tree::Tree;
use crate::{binomial, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Simple,
    Agreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    HillClimb,
    Metropolis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub termination: Termination,
    /// Examined trees without improvement before a run gives up.
    pub patience: u64,
    pub max_trees: Option<u64>,
    /// Number of agreement runs; `select_r(n)` when unset.
    pub runs_r: Option<usize>,
    /// Metropolis steps per walk; `n` when unset.
    pub trial_length: Option<usize>,
    /// Metropolis temperature on raw cost; `(M - m) / C(n, 4)` when unset.
    pub temperature: Option<f64>,
    pub seed: u64,
    pub scorer: ScorerKind,
    pub mode: SearchMode,
    /// Largest k drawn for a k-mutation; `max(5n - 16, 4)` when unset.
    pub max_k: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            termination: Termination::Simple,
            patience: 100_000,
            max_trees: None,
            runs_r: None,
            trial_length: None,
            temperature: None,
            seed: 0,
            scorer: ScorerKind::Fast,
            mode: SearchMode::HillClimb,
            max_k: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        if self.max_trees == Some(0) {
            return bad("max_trees must be at least 1");
        }
        if self.runs_r == Some(0) {
            return bad("the number of runs must be at least 1");
        }
        if self.trial_length == Some(0) {
            return bad("trial_length must be at least 1");
        }
        if let Some(t) = self.temperature {
            if !(t > 0.0 && t.is_finite()) {
                return bad("temperature must be positive and finite");
            }
        }
        if self.max_k == Some(0) {
            return bad("max_k must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    /// A tree with score 1 was found.
    PerfectScore,
    /// No improvement within `patience` examined trees (in every run).
    Patience,
    MaxTrees,
    /// All agreement runs hold the same tree.
    Agreement,
}

impl TerminationReason {
    pub fn name(self) -> &'static str {
        match self {
            TerminationReason::PerfectScore => "perfect_score",
            TerminationReason::Patience => "patience",
            TerminationReason::MaxTrees => "max_trees",
            TerminationReason::Agreement => "agreement",
        }
    }
}

/// Counts of accepted and rejected candidates for one mutation length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KCount {
    pub accepted: u64,
    pub rejected: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub best_score: f64,
    pub trees_examined: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_tree: Tree,
    pub best_score: f64,
    pub best_cost: f64,
    /// Trees examined over all runs.
    pub trees_examined: u64,
    /// `(trees examined, best score)` at each improvement of the returned
    /// run, starting with its initial tree.
    pub history: Vec<(u64, f64)>,
    pub per_run_seeds: Vec<u64>,
    pub runs: Vec<RunSummary>,
    pub terminated_by: TerminationReason,
    /// Start tree of the returned run; replaying `trace` on it gives
    /// `best_tree`.
    pub initial_tree: Tree,
    pub trace: Vec<MutationRecord>,
    /// Mutation length statistics of the returned run. Metropolis steps
    /// count as length 1.
    pub k_stats: BTreeMap<u64, KCount>,
}

/// Number of agreement runs for `n` objects.
pub fn select_r(n: usize) -> Result<usize> {
    Ok(match n {
        0..=3 => return Err(Error::InvalidSize(n)),
        4..=5 => 6,
        6..=9 => 5,
        10..=15 => 4,
        16..=17 => 3,
        _ => 2,
    })
}

/// Default Metropolis temperature: the mean per-quartet cost range.
pub fn default_temperature(scorer: &Scorer<'_>) -> f64 {
    let n = scorer.cost_function().size() as u64;
    let b = scorer.bounds();
    let t = (b.max_cost - b.min_cost) / binomial(n, 4) as f64;
    if t > 0.0 && t.is_finite() {
        t
    } else {
        1.0
    }
}

/// Result of one Metropolis walk.
#[derive(Debug, Clone)]
pub struct Walk {
    /// Best tree strictly better than the start, with its cost, if any.
    pub best: Option<(Tree, f64)>,
    /// Accepted steps leading from the start to `best`.
    pub records: Vec<MutationRecord>,
    /// Trees examined when `best` was reached.
    pub best_at: u64,
    pub examined: u64,
    pub accepted: u64,
    pub rejected: u64,
}

/// Walks `steps` simple mutations from `start`. Each step is kept when the
/// cost does not increase and otherwise with probability
/// `exp(-(C_new - C_old) / temperature)`; rejected steps are rolled back.
/// Stops early when a tree with score 1 appears.
pub fn metropolis_trial<R: Rng + ?Sized>(
    start: &Tree,
    start_cost: f64,
    scorer: &Scorer<'_>,
    steps: u64,
    temperature: f64,
    rng: &mut R,
) -> Result<Walk> {
    let mut walker = start.clone();
    let mut walker_cost = start_cost;
    let mut best_score = scorer.score_of(start_cost);
    let mut path: Vec<MutationRecord> = Vec::new();
    let mut walk = Walk { best: None, records: Vec::new(), best_at: 0, examined: 0, accepted: 0, rejected: 0 };
    for _ in 0..steps {
        let rec = random_mutation(&mut walker, rng);
        let cost = scorer.cost(&walker)?;
        walk.examined += 1;
        let keep = cost <= walker_cost || rng.gen::<f64>() < libm::exp(-(cost - walker_cost) / temperature);
        if !keep {
            rec.inverse().apply(&mut walker)?;
            walk.rejected += 1;
            continue;
        }
        walk.accepted += 1;
        walker_cost = cost;
        path.push(rec);
        let s = scorer.score_of(cost);
        if s > best_score {
            best_score = s;
            walk.best = Some((walker.clone(), cost));
            walk.records.clone_from(&path);
            walk.best_at = walk.examined;
            if s == 1.0 {
                break;
            }
        }
    }
    Ok(walk)
}

/// One search run: its random stream, best tree and bookkeeping.
#[derive(Debug, Clone)]
pub struct SearchRun<'a> {
    scorer: &'a Scorer<'a>,
    fat: &'a FatTailK,
    rng: ChaCha8Rng,
    seed: u64,
    mode: SearchMode,
    max_k: u64,
    trial_length: u64,
    temperature: f64,
    initial: Tree,
    best: Tree,
    best_cost: f64,
    best_score: f64,
    examined: u64,
    last_improvement: u64,
    history: Vec<(u64, f64)>,
    trace: Vec<MutationRecord>,
    k_stats: BTreeMap<u64, KCount>,
}

impl<'a> SearchRun<'a> {
    /// Starts a run from a random tree drawn from its own seeded stream.
    pub fn new(scorer: &'a Scorer<'a>, fat: &'a FatTailK, config: &SearchConfig, seed: u64) -> Result<Self> {
        let n = scorer.cost_function().size();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = Tree::random(n, &mut rng)?;
        let cost = scorer.cost(&tree)?;
        let score = scorer.score_of(cost);
        Ok(SearchRun {
            scorer,
            fat,
            rng,
            seed,
            mode: config.mode,
            max_k: config.max_k.unwrap_or((mutation_path_bound(n) as u64).max(4)),
            trial_length: config.trial_length.unwrap_or(n) as u64,
            temperature: config.temperature.unwrap_or_else(|| default_temperature(scorer)),
            initial: tree.clone(),
            best: tree,
            best_cost: cost,
            best_score: score,
            examined: 1,
            last_improvement: 1,
            history: vec![(1, score)],
            trace: Vec::new(),
            k_stats: BTreeMap::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn best_tree(&self) -> &Tree {
        &self.best
    }

    pub fn best_score(&self) -> f64 {
        self.best_score
    }

    pub fn trees_examined(&self) -> u64 {
        self.examined
    }

    /// Examined trees since the last improvement.
    pub fn stalled_for(&self) -> u64 {
        self.examined - self.last_improvement
    }

    pub fn is_perfect(&self) -> bool {
        self.best_score == 1.0
    }

    fn improve(&mut self, tree: Tree, cost: f64, at: u64, records: &[MutationRecord]) {
        self.best = tree;
        self.best_cost = cost;
        self.best_score = self.scorer.score_of(cost);
        self.last_improvement = at;
        self.history.push((at, self.best_score));
        self.trace.extend_from_slice(records);
    }

    /// One generation examining at most `budget` trees.
    pub fn generation(&mut self, budget: u64) -> Result<()> {
        if budget == 0 {
            return Ok(());
        }
        match self.mode {
            SearchMode::HillClimb => {
                let k = self.fat.sample_bounded(&mut self.rng, self.max_k);
                let mut cand = self.best.clone();
                let records = k_mutation(&mut cand, k, &mut self.rng)?;
                let cost = self.scorer.cost(&cand)?;
                self.examined += 1;
                let stat = self.k_stats.entry(k).or_default();
                if self.scorer.score_of(cost) > self.best_score {
                    stat.accepted += 1;
                    let at = self.examined;
                    self.improve(cand, cost, at, &records);
                } else {
                    stat.rejected += 1;
                }
            }
            SearchMode::Metropolis => {
                let steps = self.trial_length.min(budget);
                let walk =
                    metropolis_trial(&self.best, self.best_cost, self.scorer, steps, self.temperature, &mut self.rng)?;
                let base = self.examined;
                self.examined += walk.examined;
                let stat = self.k_stats.entry(1).or_default();
                stat.accepted += walk.accepted;
                stat.rejected += walk.rejected;
                if let Some((tree, cost)) = walk.best {
                    self.improve(tree, cost, base + walk.best_at, &walk.records);
                }
            }
        }
        Ok(())
    }

    fn into_result(self, terminated_by: TerminationReason, total: u64, runs: Vec<RunSummary>) -> SearchResult {
        SearchResult {
            best_tree: self.best,
            best_score: self.best_score,
            best_cost: self.best_cost,
            trees_examined: total,
            history: self.history,
            per_run_seeds: runs.iter().map(|r| r.seed).collect(),
            runs,
            terminated_by,
            initial_tree: self.initial,
            trace: self.trace,
            k_stats: self.k_stats,
        }
    }

    fn summary(&self) -> RunSummary {
        RunSummary { seed: self.seed, best_score: self.best_score, trees_examined: self.examined }
    }
}

/// Advances every run by one generation. Implementations may run the
/// generations concurrently; runs share nothing mutable, so the outcome is
/// the same as stepping them in order.
pub trait RoundStepper {
    fn step(&self, runs: &mut [SearchRun<'_>], budgets: &[u64]) -> Result<()>;
}

/// Steps runs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl RoundStepper for Sequential {
    fn step(&self, runs: &mut [SearchRun<'_>], budgets: &[u64]) -> Result<()> {
        for (run, &budget) in runs.iter_mut().zip(budgets) {
            run.generation(budget)?;
        }
        Ok(())
    }
}

fn check_problem(cf: &CostFunction, config: &SearchConfig) -> Result<()> {
    config.validate()?;
    if cf.size() < 4 {
        return Err(Error::InvalidSize(cf.size()));
    }
    Ok(())
}

/// One run with simple termination, seeded with `config.seed`.
pub fn hill_climb(cf: &CostFunction, config: &SearchConfig) -> Result<SearchResult> {
    check_problem(cf, config)?;
    let scorer = Scorer::new(cf, config.scorer);
    let fat = FatTailK::new();
    let mut run = SearchRun::new(&scorer, &fat, config, config.seed)?;
    let reason = loop {
        if run.is_perfect() {
            break TerminationReason::PerfectScore;
        }
        if run.stalled_for() >= config.patience {
            break TerminationReason::Patience;
        }
        let budget = match config.max_trees {
            Some(max) if run.examined >= max => break TerminationReason::MaxTrees,
            Some(max) => max - run.examined,
            None => u64::MAX,
        };
        run.generation(budget)?;
    };
    let total = run.examined;
    let runs = vec![run.summary()];
    Ok(run.into_result(reason, total, runs))
}

/// Seeds of the agreement runs derived from a master seed.
pub fn run_seeds(master: u64, r: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..r).map(|_| rng.next_u64()).collect()
}

/// `r` runs advanced in lock step until they agree on one tree.
///
/// Every round gives each run one generation; the stop conditions are then
/// checked in this order: some run reached score 1 (the lowest-indexed such
/// run is returned), all runs hold equal scores and equal trees, the total
/// `max_trees` budget is spent, or every run has been stalled for `patience`
/// trees. Without agreement the best run is returned, ties going to the
/// lowest index.
pub fn run_with_agreement(
    cf: &CostFunction,
    config: &SearchConfig,
    stepper: &dyn RoundStepper,
) -> Result<SearchResult> {
    check_problem(cf, config)?;
    let r = match config.runs_r {
        Some(r) => r,
        None => select_r(cf.size())?,
    };
    let scorer = Scorer::new(cf, config.scorer);
    let fat = FatTailK::new();
    let seeds = run_seeds(config.seed, r);
    let mut runs = seeds
        .iter()
        .map(|&s| SearchRun::new(&scorer, &fat, config, s))
        .collect::<Result<Vec<_>>>()?;
    let mut budgets = vec![0u64; r];
    let (reason, winner) = loop {
        if let Some(i) = runs.iter().position(|run| run.is_perfect()) {
            break (TerminationReason::PerfectScore, i);
        }
        let first = runs[0].best_score;
        if runs.iter().all(|run| run.best_score == first) {
            let form = runs[0].best.canonical_form();
            if runs[1..].iter().all(|run| run.best.canonical_form() == form) {
                break (TerminationReason::Agreement, 0);
            }
        }
        let total: u64 = runs.iter().map(|run| run.examined).sum();
        let best = best_run(&runs);
        if let Some(max) = config.max_trees {
            if total >= max {
                break (TerminationReason::MaxTrees, best);
            }
            let left = max - total;
            for (i, b) in budgets.iter_mut().enumerate() {
                *b = left / r as u64 + u64::from((i as u64) < left % r as u64);
            }
        } else {
            budgets.fill(u64::MAX);
        }
        if runs.iter().all(|run| run.stalled_for() >= config.patience) {
            break (TerminationReason::Patience, best);
        }
        stepper.step(&mut runs, &budgets)?;
    };
    let total: u64 = runs.iter().map(|run| run.examined).sum();
    let summaries: Vec<RunSummary> = runs.iter().map(SearchRun::summary).collect();
    let run = runs.swap_remove(winner);
    Ok(run.into_result(reason, total, summaries))
}

fn best_run(runs: &[SearchRun<'_>]) -> usize {
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.best_score > runs[best].best_score {
            best = i;
        }
    }
    best
}

/// Runs the configured termination protocol, stepping agreement runs
/// sequentially.
pub fn search(cf: &CostFunction, config: &SearchConfig) -> Result<SearchResult> {
    match config.termination {
        Termination::Simple => hill_climb(cf, config),
        Termination::Agreement => run_with_agreement(cf, config, &Sequential),
    }
}

/// Progress log text: one `trees_examined<TAB>score` line per improvement.
pub fn progress_log(history: &[(u64, f64)]) -> String {
    let mut out = String::new();
    for (examined, score) in history {
        let _ = writeln!(out, "{examined}\t{score}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{cost_from_mqc, DistanceMatrix, ExplicitCosts};
    use crate::quartet::embedded_quartets;
    use crate::tree::trees_equal;

    fn planted(n: usize, seed: u64) -> (Tree, CostFunction) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Tree::random(n, &mut rng).unwrap();
        let cf = cost_from_mqc(n, &embedded_quartets(&t)).unwrap();
        (t, cf)
    }

    #[test]
    fn runs_per_size() {
        assert_eq!(select_r(4).unwrap(), 6);
        assert_eq!(select_r(5).unwrap(), 6);
        assert_eq!(select_r(9).unwrap(), 5);
        assert_eq!(select_r(12).unwrap(), 4);
        assert_eq!(select_r(17).unwrap(), 3);
        assert_eq!(select_r(100).unwrap(), 2);
        assert_eq!(select_r(3), Err(Error::InvalidSize(3)));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = [
            SearchConfig { patience: 0, ..Default::default() },
            SearchConfig { trial_length: Some(0), ..Default::default() },
            SearchConfig { temperature: Some(0.0), ..Default::default() },
            SearchConfig { temperature: Some(f64::NAN), ..Default::default() },
            SearchConfig { runs_r: Some(0), ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn four_leaves_reach_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cf: CostFunction = ExplicitCosts::from_fn(4, |_| rng.gen()).unwrap().into();
        for seed in 0..10 {
            let res = hill_climb(&cf, &SearchConfig { seed, ..Default::default() }).unwrap();
            assert_eq!(res.best_score, 1.0);
            assert_eq!(res.terminated_by, TerminationReason::PerfectScore);
        }
    }

    #[test]
    fn planted_tree_is_recovered() {
        let (t, cf) = planted(10, 3);
        for mode in [SearchMode::HillClimb, SearchMode::Metropolis] {
            let res = hill_climb(&cf, &SearchConfig { seed: 5, mode, ..Default::default() }).unwrap();
            assert_eq!(res.best_score, 1.0);
            assert!(trees_equal(&res.best_tree, &t).unwrap());
        }
    }

    #[test]
    fn trace_replays_to_the_best_tree() {
        let (_, cf) = planted(9, 4);
        for mode in [SearchMode::HillClimb, SearchMode::Metropolis] {
            let res = hill_climb(&cf, &SearchConfig { seed: 8, mode, ..Default::default() }).unwrap();
            let mut t = res.initial_tree.clone();
            for rec in &res.trace {
                rec.apply(&mut t).unwrap();
            }
            assert!(trees_equal(&t, &res.best_tree).unwrap());
        }
    }

    #[test]
    fn history_is_strictly_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = DistanceMatrix::from_fn(12, |_, _| rng.gen()).unwrap();
        let cf = CostFunction::Distance(d);
        for mode in [SearchMode::HillClimb, SearchMode::Metropolis] {
            let cfg = SearchConfig { seed: 2, mode, patience: 2000, ..Default::default() };
            let res = hill_climb(&cf, &cfg).unwrap();
            assert_eq!(res.history[0].0, 1);
            for w in res.history.windows(2) {
                assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            assert_eq!(res.history.last().unwrap().1, res.best_score);
        }
    }

    #[test]
    fn max_trees_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = DistanceMatrix::from_fn(14, |_, _| rng.gen()).unwrap();
        let cf = CostFunction::Distance(d);
        for (termination, mode) in [
            (Termination::Simple, SearchMode::HillClimb),
            (Termination::Simple, SearchMode::Metropolis),
            (Termination::Agreement, SearchMode::HillClimb),
            (Termination::Agreement, SearchMode::Metropolis),
        ] {
            let cfg = SearchConfig { seed: 1, termination, mode, max_trees: Some(301), ..Default::default() };
            let res = search(&cf, &cfg).unwrap();
            assert_eq!(res.terminated_by, TerminationReason::MaxTrees);
            assert_eq!(res.trees_examined, 301);
        }
    }

    #[test]
    fn patience_stops_a_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = DistanceMatrix::from_fn(8, |_, _| rng.gen()).unwrap();
        let cf = CostFunction::Distance(d);
        let res = hill_climb(&cf, &SearchConfig { patience: 50, ..Default::default() }).unwrap();
        if res.terminated_by == TerminationReason::Patience {
            assert_eq!(res.trees_examined - res.history.last().unwrap().0, 50);
        } else {
            assert_eq!(res.best_score, 1.0);
        }
    }

    #[test]
    fn degenerate_costs_stop_at_once() {
        let cf = cost_from_mqc(6, &[]).unwrap();
        let res = hill_climb(&cf, &SearchConfig::default()).unwrap();
        assert_eq!(res.trees_examined, 1);
        assert_eq!(res.terminated_by, TerminationReason::PerfectScore);
    }

    #[test]
    fn agreement_honors_run_override() {
        let (t, cf) = planted(12, 10);
        let cfg = SearchConfig { termination: Termination::Agreement, runs_r: Some(2), ..Default::default() };
        let res = search(&cf, &cfg).unwrap();
        assert_eq!(res.per_run_seeds.len(), 2);
        assert!(trees_equal(&res.best_tree, &t).unwrap());
        let cfg = SearchConfig { termination: Termination::Agreement, ..Default::default() };
        assert_eq!(search(&cf, &cfg).unwrap().per_run_seeds.len(), 4);
    }

    #[test]
    fn agreement_on_an_imperfect_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = DistanceMatrix::from_fn(6, |_, _| rng.gen()).unwrap();
        let cf = CostFunction::Distance(d);
        let cfg = SearchConfig { termination: Termination::Agreement, seed: 3, ..Default::default() };
        let res = search(&cf, &cfg).unwrap();
        assert!(matches!(
            res.terminated_by,
            TerminationReason::Agreement | TerminationReason::PerfectScore
        ));
        assert_eq!(res.runs.len(), 5);
    }

    #[test]
    fn cold_walk_never_goes_uphill() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = DistanceMatrix::from_fn(10, |_, _| rng.gen()).unwrap();
        let cf = CostFunction::Distance(d);
        let scorer = Scorer::new(&cf, ScorerKind::Fast);
        let start = Tree::random(10, &mut rng).unwrap();
        let c0 = scorer.cost(&start).unwrap();
        let walk = metropolis_trial(&start, c0, &scorer, 200, 1e-300, &mut rng).unwrap();
        let mut t = start.clone();
        let mut c = c0;
        for rec in &walk.records {
            rec.apply(&mut t).unwrap();
            let next = scorer.cost(&t).unwrap();
            assert!(next <= c);
            c = next;
        }
        assert_eq!(walk.examined, walk.accepted + walk.rejected);
    }

    #[test]
    fn progress_lines() {
        assert_eq!(progress_log(&[(1, 0.5), (17, 0.75)]), "1\t0.5\n17\t0.75\n");
    }
}
