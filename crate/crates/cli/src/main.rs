//! `nsam`: learn safe numeric action models, evaluate them against a ground
//! truth, and generate benchmark trajectories.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use manifest::{FileDigest, RunManifest};
use nsam_core::bench::{generate, DomainRegistry, GeneratorConfig};
use nsam_core::eval::{build_eval_set, evaluate, kfold, EvalSetConfig, DEFAULT_TOLERANCE};
use nsam_core::learn::{parse_relevant_functions, serialize_learned, LearnConfig, LearnError, LearnerRegistry};
use nsam_core::pddl::{parse_domain, parse_problem, parse_trajectory, serialize_problem, serialize_trajectory};
use nsam_core::precision::{Rounding, DEFAULT_DIGITS, MAX_DIGITS};

/// Overrides the default `--precision`.
const PRECISION_ENV: &str = "NSAM_PRECISION";

#[derive(Parser)]
#[command(name = "nsam", version, about = "Safe numeric action model learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a domain from a domain file and trajectory files
    Learn(LearnArgs),
    /// Score a learned domain against the true one on random states
    Eval(EvalArgs),
    /// Generate benchmark problems and trajectories
    Gen(GenArgs),
}

#[derive(Args)]
struct LearnArgs {
    /// Domain file supplying types, predicates, functions and action signatures
    domain: PathBuf,
    #[arg(required = true)]
    trajectories: Vec<PathBuf>,
    #[arg(long, default_value = "nsam-star")]
    algorithm: String,
    /// Maximal monomial degree
    #[arg(long, default_value_t = 1)]
    degree: u32,
    #[arg(long)]
    relevant_functions: Option<PathBuf>,
    /// Decimal digits for learned constants [default: $NSAM_PRECISION or 4]
    #[arg(long)]
    precision: Option<u32>,
    /// Learned domain file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Unsafe action list [default: <out>.unsafe.txt]
    #[arg(long)]
    unsafe_report: Option<PathBuf>,
    /// Run manifest [default: <out>.manifest.json]
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct EvalArgs {
    learned: PathBuf,
    truth: PathBuf,
    #[arg(required = true)]
    problems: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute slack for numeric comparisons in the learned model
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Random actions per problem
    #[arg(long, default_value_t = 200)]
    n_actions: usize,
    #[arg(long, default_value_t = 0.25)]
    inapplicable_frac: f64,
    /// Round learned-model arithmetic to this many digits
    #[arg(long, value_name = "DIGITS")]
    round_arithmetic: Option<u32>,
    /// Only evaluate on test fold I of K over the problem list, as I/K
    #[arg(long, value_name = "I/K")]
    fold: Option<String>,
    /// Metrics CSV; the summary table always goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run manifest [default: <out>.manifest.json]
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Benchmark domain: farmland, counters or sailing
    name: String,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Steps per trajectory
    #[arg(long, default_value_t = 20)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    outdir: PathBuf,
    /// Write into a non-empty directory
    #[arg(long)]
    force: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Run(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Parse(_) => "parse",
            Failure::Run(_) => "run",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Run(m) => m,
        }
    }
}

impl From<LearnError> for Failure {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::Config(_) | LearnError::UnknownLearner(_) | LearnError::UnknownRelevantLabel { .. } => {
                Failure::Usage(e.to_string())
            }
            LearnError::Pddl(_) => Failure::Parse(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path, inputs: &mut Vec<FileDigest>) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    inputs.push(FileDigest::of(path, &bytes));
    String::from_utf8(bytes).map_err(|_| Failure::Parse(format!("{}: not UTF-8", path.display())))
}

fn write(path: &Path, text: &str, outputs: &mut Vec<FileDigest>) -> Result<()> {
    fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    outputs.push(FileDigest::of(path, text.as_bytes()));
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_err(path: &Path) -> impl Fn(nsam_core::pddl::PddlError) -> Failure + '_ {
    move |e| Failure::Parse(format!("{}: {e}", path.display()))
}

fn default_precision() -> Result<u32> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{PRECISION_ENV}={v} is not a digit count"))),
        Err(_) => Ok(DEFAULT_DIGITS),
    }
}

fn cmd_learn(a: LearnArgs) -> Result<()> {
    let t0 = Instant::now();
    let mut m = RunManifest::new("learn");
    let mut inputs = Vec::new();
    let digits = match a.precision {
        Some(k) => k,
        None => default_precision()?,
    };
    let registry = LearnerRegistry::with_defaults();
    let learner = registry.get(&a.algorithm)?;
    let relevant_functions = match &a.relevant_functions {
        Some(p) => Some(parse_relevant_functions(&read(p, &mut inputs)?)?),
        None => None,
    };
    let config = LearnConfig {
        degree: a.degree,
        relevant_functions,
        digits,
        jobs: a.jobs,
        ..Default::default()
    };
    config.validate()?;

    let domain = parse_domain(&read(&a.domain, &mut inputs)?).map_err(parse_err(&a.domain))?;
    let mut trajs = Vec::new();
    for p in &a.trajectories {
        trajs.push(parse_trajectory(&read(p, &mut inputs)?, &domain).map_err(parse_err(p))?);
    }
    m.time("parse", t0.elapsed());

    let t1 = Instant::now();
    let model = learner.learn(&domain, &trajs, &config)?;
    m.time("learn", t1.elapsed());

    let text = serialize_learned(&model);
    let report: String = model.unsafe_actions.iter().map(|n| format!("{n}\n")).collect();
    let mut outputs = Vec::new();
    match &a.out {
        Some(out) => write(out, &text, &mut outputs)?,
        None => print!("{text}"),
    }
    let report_path = a.unsafe_report.clone().or_else(|| a.out.as_ref().map(|o| with_suffix(o, ".unsafe.txt")));
    match report_path {
        Some(p) => write(&p, &report, &mut outputs)?,
        None => {
            for n in &model.unsafe_actions {
                eprintln!("unsafe: {n}");
            }
        }
    }

    m.set("algorithm", learner.name());
    m.set("degree", config.degree);
    m.set("precision", config.digits);
    m.set("jobs", config.jobs);
    m.set("relevant_functions", &config.relevant_functions);
    m.set("rank_tol", config.rank_tol);
    m.set("effect_tol", config.effect_tol);
    m.set("unsafe_actions", &model.unsafe_actions);
    m.inputs = inputs;
    m.outputs = outputs;
    m.time("total", t0.elapsed());
    if let Some(p) = a.manifest.clone().or_else(|| a.out.as_ref().map(|o| with_suffix(o, ".manifest.json"))) {
        write(&p, &m.to_json(), &mut Vec::new())?;
    }
    Ok(())
}

fn parse_fold(s: &str) -> Result<(usize, usize)> {
    let bad = || Failure::Usage(format!("--fold expects I/K, got '{s}'"));
    let (i, k) = s.split_once('/').ok_or_else(bad)?;
    Ok((i.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?))
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let t0 = Instant::now();
    let mut m = RunManifest::new("eval");
    let mut inputs = Vec::new();
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return Err(Failure::Usage("--tolerance must be a nonnegative number".into()));
    }
    if let Some(k) = a.round_arithmetic {
        if !(1..=MAX_DIGITS).contains(&k) {
            return Err(Failure::Usage(format!("--round-arithmetic must be between 1 and {MAX_DIGITS}")));
        }
    }
    let fold = a.fold.as_deref().map(parse_fold).transpose()?;

    let learned = parse_domain(&read(&a.learned, &mut inputs)?).map_err(parse_err(&a.learned))?;
    let truth = parse_domain(&read(&a.truth, &mut inputs)?).map_err(parse_err(&a.truth))?;
    let mut problems = Vec::new();
    for p in &a.problems {
        problems.push(parse_problem(&read(p, &mut inputs)?, &truth).map_err(parse_err(p))?);
    }
    if let Some((i, k)) = fold {
        let (_, test) = kfold(problems.len(), k, i).map_err(|e| Failure::Usage(e.to_string()))?;
        problems = test.into_iter().map(|j| problems[j].clone()).collect();
    }
    m.time("parse", t0.elapsed());

    let t1 = Instant::now();
    let cfg = EvalSetConfig {
        seed: a.seed,
        n_actions: a.n_actions,
        inapplicable_frac: a.inapplicable_frac,
    };
    let set = build_eval_set(&truth, &problems, &cfg).map_err(|e| Failure::Run(e.to_string()))?;
    let rounding = a.round_arithmetic.map_or(Rounding::Off, Rounding::Digits);
    let report = evaluate(&learned, &truth, &set, a.tolerance, rounding).map_err(|e| Failure::Run(e.to_string()))?;
    m.time("eval", t1.elapsed());

    print!("{}", report.summary());
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        write(out, &report.to_csv(), &mut outputs)?;
    }
    m.seed = Some(a.seed);
    m.set("tolerance", a.tolerance);
    m.set("n_actions", a.n_actions);
    m.set("inapplicable_frac", a.inapplicable_frac);
    m.set("round_arithmetic", a.round_arithmetic);
    m.set("fold", &a.fold);
    m.inputs = inputs;
    m.outputs = outputs;
    m.time("total", t0.elapsed());
    if let Some(p) = a.manifest.clone().or_else(|| a.out.as_ref().map(|o| with_suffix(o, ".manifest.json"))) {
        write(&p, &m.to_json(), &mut Vec::new())?;
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let t0 = Instant::now();
    let registry = DomainRegistry::with_defaults();
    let domain = registry.get(&a.name).map_err(|e| {
        Failure::Usage(format!("{e} (known: {})", registry.names().join(", ")))
    })?;
    if a.outdir.exists() {
        let occupied = fs::read_dir(&a.outdir)
            .map_err(|e| Failure::Run(format!("{}: {e}", a.outdir.display())))?
            .next()
            .is_some();
        if occupied && !a.force {
            return Err(Failure::Usage(format!(
                "{} is not empty; pass --force to write into it",
                a.outdir.display()
            )));
        }
    }
    fs::create_dir_all(&a.outdir).map_err(|e| Failure::Run(format!("{}: {e}", a.outdir.display())))?;

    let cfg = GeneratorConfig {
        domain: domain.name().to_string(),
        problems: a.n,
        length: a.len,
        seed: a.seed,
    };
    let bench = generate(&registry, &cfg).map_err(|e| Failure::Run(e.to_string()))?;
    let mut outputs = Vec::new();
    write(&a.outdir.join("domain.pddl"), domain.pddl(), &mut outputs)?;
    let width = a.n.saturating_sub(1).to_string().len().max(3);
    for (i, (p, t)) in bench.problems.iter().zip(&bench.trajectories).enumerate() {
        write(&a.outdir.join(format!("problem-{i:0width$}.pddl")), &serialize_problem(p), &mut outputs)?;
        write(&a.outdir.join(format!("trajectory-{i:0width$}.traj")), &serialize_trajectory(t), &mut outputs)?;
    }

    let mut m = RunManifest::new("gen");
    m.seed = Some(a.seed);
    m.set("domain", domain.name());
    m.set("problems", a.n);
    m.set("length", a.len);
    m.outputs = outputs;
    m.time("total", t0.elapsed());
    write(&a.outdir.join("manifest.json"), &m.to_json(), &mut Vec::new())?;
    println!("wrote {} problem/trajectory pairs to {}", a.n, a.outdir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let r = match cli.command {
        Command::Learn(a) => cmd_learn(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nsam: {} error: {}", f.kind(), f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_syntax() {
        assert_eq!(parse_fold("2/5").unwrap(), (2, 5));
        assert!(parse_fold("2").is_err());
        assert!(parse_fold("a/5").is_err());
    }

    #[test]
    fn side_files_extend_the_name() {
        assert_eq!(with_suffix(Path::new("out/d.pddl"), ".unsafe.txt"), PathBuf::from("out/d.pddl.unsafe.txt"));
    }

    #[test]
    fn learn_errors_map_to_exit_codes() {
        assert_eq!(Failure::from(LearnError::Config("x".into())).code(), 1);
        assert_eq!(Failure::from(LearnError::UnknownLearner("x".into())).code(), 1);
        let e = LearnError::InconsistentEffects { action: "a".into(), function: "f".into(), residual: 1.0 };
        assert_eq!(Failure::from(e).code(), 3);
    }
}
