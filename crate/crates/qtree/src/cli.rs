//! The `qtree` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use quartet_core::bench::{artificial_metric, db_gain, generate_artificial};
use quartet_core::cost::ScorerKind;
use quartet_core::ncd::CorpusItem;
use quartet_core::search::{progress_log, SearchConfig, SearchMode, SearchResult, Termination};
use quartet_core::CostFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bench::{json_lines, run_search, run_statistics, run_trials, score_report, trial_seeds, ScoreReport};
use crate::compress::Deflate;
use crate::formats::{
    read_matrix_file, read_text, read_tree_file, to_dot, to_newick, write_matrix, write_text, LabeledMatrix,
    MatrixFormat,
};
use crate::manifest::{digest_file, ConfigSnapshot, InputDigest, RunManifest};
use crate::parallel::{default_threads, map_indexed};
use crate::{Error, Result};

/// Version tag of `result.json`.
pub const RESULT_SCHEMA: &str = "qtree-result/1";

#[derive(Debug, Parser)]
#[command(name = "qtree", version, about = "Quartet tree clustering of distance matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a low-cost tree of a distance matrix.
    Cluster(ClusterArgs),
    /// Build a compression distance matrix from files.
    Ncd(NcdArgs),
    /// Report cost, bounds and score of a Newick tree.
    Score(ScoreArgs),
    /// Benchmarks and run statistics.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TerminationArg {
    Simple,
    Agreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hill,
    Metropolis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerArg {
    Naive,
    Fast,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Master seed; every random choice derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TerminationArg::Simple)]
    pub termination: TerminationArg,
    /// Trees examined without improvement before a run stops.
    #[arg(long, default_value_t = 100_000)]
    pub patience: u64,
    /// Upper limit on trees examined over all runs.
    #[arg(long)]
    pub max_trees: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Hill)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ScorerArg::Fast)]
    pub scorer: ScorerArg,
    /// Metropolis steps per walk (default: number of objects).
    #[arg(long)]
    pub trial_length: Option<usize>,
    /// Metropolis temperature on raw cost.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Largest k-mutation length.
    #[arg(long)]
    pub max_k: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl SearchArgs {
    /// Settings with `runs_r` agreement runs.
    pub fn config(&self, runs_r: Option<usize>) -> SearchConfig {
        SearchConfig {
            termination: match self.termination {
                TerminationArg::Simple => Termination::Simple,
                TerminationArg::Agreement => Termination::Agreement,
            },
            patience: self.patience,
            max_trees: self.max_trees,
            runs_r,
            trial_length: self.trial_length,
            temperature: self.temperature,
            seed: self.seed,
            scorer: match self.scorer {
                ScorerArg::Naive => ScorerKind::Naive,
                ScorerArg::Fast => ScorerKind::Fast,
            },
            mode: match self.mode {
                ModeArg::Hill => SearchMode::HillClimb,
                ModeArg::Metropolis => SearchMode::Metropolis,
            },
            max_k: self.max_k,
        }
    }

    fn threads(&self) -> Result<usize> {
        threads(self.threads)
    }
}

fn threads(requested: Option<usize>) -> Result<usize> {
    match requested {
        Some(0) => Err(Error::Usage("--threads must be at least 1".into())),
        Some(t) => Ok(t),
        None => Ok(default_threads()),
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Distance matrix file.
    pub matrix: PathBuf,
    /// Input format (detected when omitted).
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Number of agreement runs (default depends on the matrix size).
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long, default_value = "qtree-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct NcdArgs {
    /// Files, or directories whose regular files are used in name order.
    pub inputs: Vec<PathBuf>,
    /// File with one input path per line.
    #[arg(long)]
    pub list: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
    pub format: MatrixFormat,
    /// Deflate level, 0 to 9.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(0..=9))]
    pub level: u32,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value = "qtree-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub matrix: PathBuf,
    /// Newick tree whose leaves are the matrix names.
    pub tree: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[command(subcommand_required = true, arg_required_else_help = true)]
pub struct BenchArgs {
    #[command(subcommand)]
    pub command: BenchCommand,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Recover scrambled caterpillars from their path metrics.
    Artificial(ArtificialArgs),
    /// Trees-examined histogram, k-mutation length pmfs and progress curves.
    Stats(StatsArgs),
    /// Decibel gain of one tree over another on the same matrix.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct ArtificialArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// k-mutations applied to the caterpillar.
    #[arg(long, default_value_t = 200)]
    pub mutations: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Number of agreement runs (default depends on the matrix size).
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long, default_value = "qtree-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Number of independent searches.
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Size of the generated matrix when --matrix is absent.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub mutations: u64,
    /// Use this matrix instead of a generated one.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
    /// Histogram bar width (default: 20 bars).
    #[arg(long)]
    pub bin_width: Option<u64>,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Number of agreement runs inside each search.
    #[arg(long)]
    pub agreement_runs: Option<usize>,
    #[arg(long, default_value = "qtree-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub matrix: PathBuf,
    /// Tree whose gain is reported.
    pub ours: PathBuf,
    /// Tree compared against.
    pub other: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<MatrixFormat>,
    #[arg(long)]
    pub json: bool,
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::io(Path::new("<stdout>"), e)),
        _ => Ok(()),
    }
}

pub fn run(cli: Cli, command: Vec<String>) -> Result<()> {
    match cli.command {
        Command::Cluster(a) => cmd_cluster(&a, command),
        Command::Ncd(a) => cmd_ncd(&a, command),
        Command::Score(a) => cmd_score(&a),
        Command::Bench(b) => match b.command {
            BenchCommand::Artificial(a) => cmd_bench_artificial(&a, command),
            BenchCommand::Stats(a) => cmd_bench_stats(&a, command),
            BenchCommand::Compare(a) => cmd_bench_compare(&a),
        },
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn header(seed: u64, snapshot: &ConfigSnapshot) -> String {
    format!("seed={seed} config={}", snapshot.line())
}

fn cmd_cluster(a: &ClusterArgs, command: Vec<String>) -> Result<()> {
    let m = read_matrix_file(&a.matrix, a.format)?;
    let cf = CostFunction::Distance(m.matrix.clone());
    let config = a.search.config(a.runs);
    config.validate()?;
    let snapshot = ConfigSnapshot::resolve(&config, &cf)?;
    let res = run_search(&cf, &config, a.search.threads()?)?;
    create_dir(&a.out_dir)?;
    write_cluster_outputs(&a.out_dir, &m, &res, &snapshot)?;
    let manifest = RunManifest::new(command, Some(config.seed), to_value(&snapshot), vec![digest_file(&a.matrix)?]);
    write_text(&a.out_dir.join("manifest.json"), &manifest.to_json())?;
    emit(&format!(
        "S(T) = {}\ntrees examined = {}\nterminated by {}\n{}\n",
        res.best_score,
        res.trees_examined,
        res.terminated_by.name(),
        to_newick(&res.best_tree, &m.names)
    ))
}

/// Writes `tree.nwk`, `tree.dot`, `result.json`, `progress.tsv` and
/// `trace.txt` into `dir`.
pub fn write_cluster_outputs(dir: &Path, m: &LabeledMatrix, res: &SearchResult, snapshot: &ConfigSnapshot) -> Result<()> {
    let head = header(snapshot.seed, snapshot);
    let newick = to_newick(&res.best_tree, &m.names);
    write_text(&dir.join("tree.nwk"), &format!("[{head}]\n{newick}\n"))?;
    write_text(&dir.join("tree.dot"), &format!("// {head}\n{}", to_dot(&res.best_tree, &m.names)))?;
    write_text(&dir.join("progress.tsv"), &format!("# {head}\ntrees_examined\tscore\n{}", progress_log(&res.history)))?;
    let mut trace = format!("# {head}\n# start tree edges, then one mutation per line\n");
    let edges: Vec<String> = res.initial_tree.edges().iter().map(|(x, y)| format!("{x}-{y}")).collect();
    let _ = writeln!(trace, "start {}", edges.join(" "));
    for step in &res.trace {
        let _ = writeln!(trace, "{step}");
    }
    write_text(&dir.join("trace.txt"), &trace)?;
    let result = json!({
        "schema": RESULT_SCHEMA,
        "seed": snapshot.seed,
        "config": to_value(snapshot),
        "names": m.names,
        "tree": newick,
        "score": res.best_score,
        "cost": res.best_cost,
        "trees_examined": res.trees_examined,
        "terminated_by": res.terminated_by.name(),
        "history_path": "progress.tsv",
        "trace_path": "trace.txt",
        "runs": res.runs.iter().map(|r| json!({
            "seed": r.seed,
            "best_score": r.best_score,
            "trees_examined": r.trees_examined,
        })).collect::<Vec<_>>(),
    });
    write_text(&dir.join("result.json"), &pretty(&result))
}

/// Input files for `ncd`: explicit files, directory contents in name order
/// and the lines of the list file, in that order.
fn ncd_inputs(a: &NcdArgs) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for p in &a.inputs {
        if p.is_dir() {
            let mut found = Vec::new();
            for entry in std::fs::read_dir(p).map_err(|e| Error::io(p, e))? {
                let path = entry.map_err(|e| Error::io(p, e))?.path();
                if path.is_file() {
                    found.push(path);
                }
            }
            found.sort();
            paths.extend(found);
        } else {
            paths.push(p.clone());
        }
    }
    if let Some(list) = &a.list {
        let base = list.parent().unwrap_or(Path::new(""));
        for line in read_text(list)?.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            paths.push(base.join(line));
        }
    }
    Ok(paths)
}

fn item_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn cmd_ncd(a: &NcdArgs, command: Vec<String>) -> Result<()> {
    let paths = ncd_inputs(a)?;
    if paths.len() < 4 {
        return Err(quartet_core::Error::InvalidSize(paths.len()).into());
    }
    let mut items = Vec::with_capacity(paths.len());
    let mut digests = Vec::with_capacity(paths.len());
    for p in &paths {
        let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
        digests.push(InputDigest {
            path: p.display().to_string(),
            bytes: bytes.len() as u64,
            sha256: crate::manifest::digest_bytes(&bytes),
        });
        items.push(CorpusItem::new(item_name(p), bytes)?);
    }
    let z = Deflate::with_level(a.level);
    let result = crate::parallel::ncd_matrix(&items, &z, threads(a.threads)?)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let labeled = LabeledMatrix::new(result.names, result.matrix)?;
    create_dir(&a.out_dir)?;
    let out = a.out_dir.join(format!("distances.{}", a.format.extension()));
    write_text(&out, &write_matrix(&labeled, a.format))?;
    let config = json!({ "compressor": "deflate", "level": a.level, "format": a.format });
    let manifest = RunManifest::new(command, None, config, digests);
    write_text(&a.out_dir.join("manifest.json"), &manifest.to_json())?;
    emit(&format!("{}\n", out.display()))
}

fn score_text(r: &ScoreReport) -> String {
    format!(
        "C_T\t{}\nm\t{}\nM\t{}\nS(T)\t{}\nR(T)\t{}\n",
        r.cost, r.min_cost, r.max_cost, r.score, r.room_for_improvement
    )
}

fn cmd_score(a: &ScoreArgs) -> Result<()> {
    let m = read_matrix_file(&a.matrix, a.format)?;
    let tree = read_tree_file(&a.tree, &m.names)?;
    let report = score_report(&tree, &CostFunction::Distance(m.matrix))?;
    emit(&if a.json { pretty(&to_value(&report)) } else { score_text(&report) })
}

fn cmd_bench_artificial(a: &ArtificialArgs, command: Vec<String>) -> Result<()> {
    let config = a.search.config(a.runs);
    config.validate()?;
    if a.n < 4 {
        return Err(quartet_core::Error::InvalidSize(a.n).into());
    }
    let reports = run_trials(a.trials, config.seed, a.n, a.mutations, &config, a.search.threads()?)?;
    create_dir(&a.out_dir)?;
    write_text(&a.out_dir.join("trials.jsonl"), &json_lines(&reports))?;
    let exact = reports.iter().filter(|r| r.exact).count();
    let snapshot = ConfigSnapshot::resolve(&config, &CostFunction::Distance(artificial_metric(
        &quartet_core::Tree::caterpillar(a.n)?,
    )))?;
    let manifest = RunManifest::new(
        command,
        Some(config.seed),
        json!({ "n": a.n, "trials": a.trials, "mutations": a.mutations, "search": to_value(&snapshot) }),
        Vec::new(),
    );
    write_text(&a.out_dir.join("manifest.json"), &manifest.to_json())?;
    let wall: f64 = reports.iter().map(|r| r.wall_time_ms).sum();
    emit(&format!("seed {}: {exact}/{} exact, {:.1} ms total search time\n", config.seed, reports.len(), wall))
}

fn cmd_bench_stats(a: &StatsArgs, command: Vec<String>) -> Result<()> {
    let config = a.search.config(a.agreement_runs);
    config.validate()?;
    if a.runs == 0 {
        return Err(Error::Usage("--runs must be at least 1".into()));
    }
    let mut inputs = Vec::new();
    let cf = match &a.matrix {
        Some(path) => {
            inputs.push(digest_file(path)?);
            CostFunction::Distance(read_matrix_file(path, a.format)?.matrix)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let (_, d) = generate_artificial(a.n, a.mutations, &mut rng)?;
            CostFunction::Distance(d)
        }
    };
    let snapshot = ConfigSnapshot::resolve(&config, &cf)?;
    let seeds = trial_seeds(config.seed.wrapping_add(1), a.runs);
    let results: Vec<SearchResult> = map_indexed(a.runs, a.search.threads()?, |i| {
        let cfg = SearchConfig { seed: seeds[i], ..config.clone() };
        quartet_core::search::search(&cf, &cfg)
    })
    .into_iter()
    .collect::<quartet_core::Result<_>>()?;
    let stats = run_statistics(&results, a.bin_width)?;
    let head = header(config.seed, &snapshot);
    create_dir(&a.out_dir)?;
    write_text(&a.out_dir.join("trees_examined.csv"), &stats.trees_examined_csv(&head))?;
    write_text(&a.out_dir.join("k_lengths.csv"), &stats.k_csv(&head))?;
    write_text(&a.out_dir.join("progress.csv"), &stats.progress_csv(&head))?;
    let mut runs = format!("# {head}\nrun,seed,trees_examined,score,terminated_by\n");
    for (i, (r, s)) in results.iter().zip(&seeds).enumerate() {
        let _ = writeln!(runs, "{i},{s},{},{},{}", r.trees_examined, r.best_score, r.terminated_by.name());
    }
    write_text(&a.out_dir.join("runs.csv"), &runs)?;
    let manifest = RunManifest::new(
        command,
        Some(config.seed),
        json!({ "runs": a.runs, "n": cf.size(), "mutations": a.mutations, "search": to_value(&snapshot) }),
        inputs,
    );
    write_text(&a.out_dir.join("manifest.json"), &manifest.to_json())?;
    let mut examined: Vec<u64> = results.iter().map(|r| r.trees_examined).collect();
    examined.sort_unstable();
    emit(&format!("{} runs, median trees examined {}\n", a.runs, examined[examined.len() / 2]))
}

fn cmd_bench_compare(a: &CompareArgs) -> Result<()> {
    let m = read_matrix_file(&a.matrix, a.format)?;
    let cf = CostFunction::Distance(m.matrix);
    let ours = score_report(&read_tree_file(&a.ours, &m.names)?, &cf)?;
    let other = score_report(&read_tree_file(&a.other, &m.names)?, &cf)?;
    let gain = db_gain(other.room_for_improvement, ours.room_for_improvement);
    if a.json {
        // infinite gains have no JSON number; they are written as strings
        let g = if gain.is_finite() { json!(gain) } else { json!(gain.to_string()) };
        emit(&pretty(&json!({ "ours": to_value(&ours), "other": to_value(&other), "db_gain": g })))
    } else {
        emit(&format!("S(ours)\t{}\nS(other)\t{}\ndb\t{gain}\n", ours.score, other.score))
    }
}
