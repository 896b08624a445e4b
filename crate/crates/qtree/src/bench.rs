//! Reconstruction trials, run statistics and score reports.

use std::fmt::Write as _;
use std::time::Instant;

use quartet_core::bench::{generate_artificial, histogram, k_pmfs, room_for_improvement, Bin};
use quartet_core::cost::{Scorer, ScorerKind};
use quartet_core::search::{search, run_with_agreement, SearchConfig, SearchResult, Termination};
use quartet_core::tree::trees_equal;
use quartet_core::{CostFunction, Tree};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formats::to_newick;
use crate::parallel::{map_indexed, Threaded};
use crate::Result;

/// Runs the configured search, stepping agreement runs on `threads` threads.
pub fn run_search(cf: &CostFunction, config: &SearchConfig, threads: usize) -> quartet_core::Result<SearchResult> {
    match config.termination {
        Termination::Agreement if threads > 1 => run_with_agreement(cf, config, &Threaded { threads }),
        _ => search(cf, config),
    }
}

/// One artificial reconstruction. Field order is the serialized order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub master_seed: u64,
    pub trial_id: usize,
    pub seed: u64,
    pub n: usize,
    pub num_mutations: u64,
    pub planted_tree: String,
    pub recovered_tree: String,
    pub exact: bool,
    pub s_score: f64,
    pub trees_examined: u64,
    pub terminated_by: &'static str,
    pub wall_time_ms: f64,
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Seeds for `count` trials derived from a master seed.
pub fn trial_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Scrambles a caterpillar, derives its path metric and searches it. The
/// trial seed drives both the scramble and the search; `master_seed` is only
/// recorded.
pub fn reconstruction_trial(
    master_seed: u64,
    trial_id: usize,
    seed: u64,
    n: usize,
    num_mutations: u64,
    config: &SearchConfig,
) -> Result<TrialReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (planted, d) = generate_artificial(n, num_mutations, &mut rng)?;
    let cf = CostFunction::Distance(d);
    let config = SearchConfig { seed: rng.next_u64(), ..config.clone() };
    let start = Instant::now();
    let res = search(&cf, &config)?;
    let wall = start.elapsed();
    let names = numbered(n);
    Ok(TrialReport {
        master_seed,
        trial_id,
        seed,
        n,
        num_mutations,
        planted_tree: to_newick(&planted, &names),
        recovered_tree: to_newick(&res.best_tree, &names),
        exact: trees_equal(&planted, &res.best_tree)?,
        s_score: res.best_score,
        trees_examined: res.trees_examined,
        terminated_by: res.terminated_by.name(),
        wall_time_ms: wall.as_secs_f64() * 1000.0,
    })
}

/// `count` trials in parallel, reported in trial order.
pub fn run_trials(
    count: usize,
    master_seed: u64,
    n: usize,
    num_mutations: u64,
    config: &SearchConfig,
    threads: usize,
) -> Result<Vec<TrialReport>> {
    let seeds = trial_seeds(master_seed, count);
    map_indexed(count, threads, |i| reconstruction_trial(master_seed, i, seeds[i], n, num_mutations, config))
        .into_iter()
        .collect()
}

/// One JSON object per line.
pub fn json_lines<T: Serialize>(rows: &[T]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

/// Tables derived from a set of finished searches.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStatistics {
    pub trees_examined: Vec<Bin>,
    pub bin_width: u64,
    pub k_accepted: Vec<(u64, f64)>,
    pub k_rejected: Vec<(u64, f64)>,
    /// `(run, trees examined, score)` for every improvement of every run.
    pub progress: Vec<(usize, u64, f64)>,
}

/// Histogram of trees examined (20 bars unless a width is given), pooled
/// mutation-length mass functions and progress curves.
pub fn run_statistics(results: &[SearchResult], bin_width: Option<u64>) -> Result<RunStatistics> {
    if results.is_empty() {
        return Err(quartet_core::Error::InvalidInput("statistics need at least one run".into()).into());
    }
    let examined: Vec<u64> = results.iter().map(|r| r.trees_examined).collect();
    let max = *examined.iter().max().expect("nonempty");
    let width = bin_width.unwrap_or_else(|| max.div_ceil(20).max(1));
    let (k_accepted, k_rejected) = k_pmfs(results.iter().map(|r| &r.k_stats));
    let progress = results
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.history.iter().map(move |&(t, s)| (i, t, s)))
        .collect();
    Ok(RunStatistics { trees_examined: histogram(&examined, width)?, bin_width: width, k_accepted, k_rejected, progress })
}

impl RunStatistics {
    pub fn trees_examined_csv(&self, header: &str) -> String {
        let mut out = format!("# {header}\nbin_lower,bin_upper,count,fraction\n");
        for b in &self.trees_examined {
            let _ = writeln!(out, "{},{},{},{}", b.lower, b.lower + self.bin_width, b.count, b.fraction);
        }
        out
    }

    pub fn k_csv(&self, header: &str) -> String {
        let mut out = format!("# {header}\nk,accepted_pmf,rejected_pmf\n");
        let mut ks: Vec<u64> = self.k_accepted.iter().chain(&self.k_rejected).map(|p| p.0).collect();
        ks.sort_unstable();
        ks.dedup();
        let find = |v: &[(u64, f64)], k| v.iter().find(|p| p.0 == k).map_or(0.0, |p| p.1);
        for k in ks {
            let _ = writeln!(out, "{k},{},{}", find(&self.k_accepted, k), find(&self.k_rejected, k));
        }
        out
    }

    pub fn progress_csv(&self, header: &str) -> String {
        let mut out = format!("# {header}\nrun,trees_examined,score\n");
        for (run, t, s) in &self.progress {
            let _ = writeln!(out, "{run},{t},{s}");
        }
        out
    }
}

/// Cost, bounds and score of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreReport {
    pub cost: f64,
    pub min_cost: f64,
    pub max_cost: f64,
    pub score: f64,
    pub room_for_improvement: f64,
}

pub fn score_report(tree: &Tree, cf: &CostFunction) -> Result<ScoreReport> {
    let scorer = Scorer::new(cf, ScorerKind::Fast);
    let cost = scorer.cost(tree)?;
    let b = scorer.bounds();
    let score = b.score(cost);
    Ok(ScoreReport {
        cost,
        min_cost: b.min_cost,
        max_cost: b.max_cost,
        score,
        room_for_improvement: room_for_improvement(score.clamp(0.0, 1.0))?,
    })
}
