//! `cliffwalk`: simulate, solve and bound search heuristics on OneMax and Cliff.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cliffwalk::bounds::{self, BoundReport};
use cliffwalk::harness::{
    compare_with_oracle, export, read_csv, run_experiment, run_experiment_with_progress,
    write_csv, write_json, ComparisonStatus, ExportFormat, FigureOverrides, FigurePreset,
};
use cliffwalk::oracle::{build_level_chain, expected_upgrade_times};
use cliffwalk::{Algorithm, Alpha, Error, ExperimentPlan, Magnitude, Problem, Sweep};

#[derive(Parser, Debug)]
#[command(name = "cliffwalk", version, about = "Runtime laboratory for the Metropolis algorithm and (1+1) EA variants on OneMax and Cliff")]
struct Cli {
    /// Worker threads for parallel trials (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run repeated trials of one heuristic and export the summary.
    Run(RunArgs),
    /// Like `run`, varying one parameter over a range.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// NAME=START:STOP:STEP with NAME one of n, m, d, alpha, p, beta, R.
        #[arg(long)]
        vary: String,
    },
    /// Exact expected runtimes of the Metropolis algorithm.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Selection parameter (> 1, or `inf`).
        #[arg(long)]
        alpha: String,
        /// Also report the expected time from this distance.
        #[arg(long)]
        start_distance: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a closed-form runtime bound.
    Bounds {
        #[arg(long, value_enum)]
        which: BoundKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Compare a results CSV against exact expectations.
    Compare {
        #[arg(long)]
        results: PathBuf,
        /// Override the instance recorded in each row.
        #[arg(long, value_enum)]
        problem: Option<ProblemKind>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<f64>,
        /// Override the alpha recorded in each Metropolis row.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce one of the preset comparison experiments.
    Figure {
        #[arg(value_enum)]
        preset: Preset,
        /// Output directory; the CSV is written to DIR/<preset>.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        /// Suppress progress output on stderr.
        #[arg(long)]
        quiet: bool,
    },
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// ma, oea, rls, fast, sd, ma-gstd or ma-gheavy.
    #[arg(long)]
    algo: String,
    #[arg(long)]
    alpha: Option<String>,
    /// Mutation rate: a number or `c/n`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    /// Stagnation-detection parameter R (default n^3).
    #[arg(long = "R", alias = "r")]
    big_r: Option<u64>,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    budget: Option<u64>,
    /// Output path, or `-` for stdout.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProblemKind {
    Onemax,
    Cliff,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BoundKind {
    OnemaxMa,
    Posdrift,
    E1,
    CliffMa,
    CliffEa,
    Optimal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Preset {
    Fig2,
    Fig3,
    AlphaSweep,
}

/// A failure with its exit code: 1 for invalid input, 2 for runtime errors.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter { .. }
            | Error::LengthMismatch { .. }
            | Error::LevelOrder { .. }
            | Error::Unsupported(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("I/O error on {}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure {
                code: 2,
                message: format!("cannot start thread pool: {e}"),
            })?;
    }
    match cli.command {
        Command::Run(args) => simulate(&args, None),
        Command::Sweep { run, vary } => simulate(&run, Some(parse_vary(&vary)?)),
        Command::Oracle {
            problem,
            alpha,
            start_distance,
            json,
        } => oracle(&problem, &alpha, start_distance, json),
        Command::Bounds {
            which,
            n,
            m,
            d,
            alpha,
            p,
            json,
        } => bound(which, n, m, d, alpha.as_deref(), p, json),
        Command::Compare {
            results,
            problem,
            n,
            m,
            d,
            alpha,
            json,
        } => {
            let problem = match (problem, n) {
                (Some(kind), Some(n)) => Some(build_problem(&ProblemArgs {
                    problem: kind,
                    n,
                    m,
                    d,
                })?),
                (Some(_), None) => return Err(Failure::usage("--problem needs --n")),
                (None, _) => None,
            };
            let alpha = alpha.map(|a| parse_alpha(&a)).transpose()?;
            compare(&results, problem, alpha, json)
        }
        Command::Figure {
            preset,
            out,
            n,
            trials,
            seed,
            budget,
            quiet,
        } => {
            let preset = match preset {
                Preset::Fig2 => FigurePreset::Fig2,
                Preset::Fig3 => FigurePreset::Fig3,
                Preset::AlphaSweep => FigurePreset::AlphaSweep,
            };
            figure(
                preset,
                &out,
                FigureOverrides {
                    n,
                    trials,
                    seed,
                    budget,
                },
                quiet,
            )
        }
    }
}

fn build_problem(args: &ProblemArgs) -> Result<Problem, Failure> {
    match args.problem {
        ProblemKind::Onemax => {
            if args.m.is_some() || args.d.is_some() {
                return Err(Failure::usage("--m and --d only apply to --problem cliff"));
            }
            Ok(Problem::one_max(args.n)?)
        }
        ProblemKind::Cliff => match (args.m, args.d) {
            (Some(m), Some(d)) => Ok(Problem::cliff(args.n, m, d)?),
            _ => Err(Failure::usage("--problem cliff needs --m and --d")),
        },
    }
}

fn parse_alpha(text: &str) -> Result<Alpha, Failure> {
    text.parse::<Alpha>()
        .map_err(|e| Failure::usage(format!("--alpha: {e}")))
}

fn build_algorithm(args: &RunArgs) -> Result<Algorithm, Failure> {
    let mut params = Vec::new();
    if let Some(a) = &args.alpha {
        params.push(format!("alpha={a}"));
    }
    if let Some(p) = &args.p {
        params.push(format!("p={p}"));
    }
    if let Some(b) = args.beta {
        params.push(format!("beta={b}"));
    }
    if let Some(r) = args.big_r {
        params.push(format!("R={r}"));
    }
    let spec = if params.is_empty() {
        args.algo.clone()
    } else {
        format!("{}:{}", args.algo, params.join(","))
    };
    spec.parse::<Algorithm>()
        .map_err(|e| Failure::usage(format!("--algo: {e}")))
}

fn parse_vary(text: &str) -> Result<Sweep, Failure> {
    let bad = || Failure::usage(format!("--vary: expected NAME=START:STOP:STEP, got `{text}`"));
    let (name, range) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<f64> = range
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    Ok(Sweep::range(name.trim(), start, stop, step)?)
}

fn simulate(args: &RunArgs, sweep: Option<Sweep>) -> Result<(), Failure> {
    let problem = build_problem(&args.problem)?;
    let algorithm = build_algorithm(args)?;
    let mut plan = ExperimentPlan::new(problem, vec![algorithm], args.trials, args.seed);
    if let Some(budget) = args.budget {
        plan = plan.with_budget(budget);
    }
    if let Some(sweep) = sweep {
        plan = plan.with_sweep(sweep);
    }
    // fail on bad input before anything is written
    plan.cells()?;
    let result = run_experiment(&plan)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let format = match args.format {
        Format::Csv => ExportFormat::Csv,
        Format::Json => ExportFormat::Json,
    };
    export(&result, format, &args.out)?;
    Ok(())
}

fn fmt_value(v: f64) -> String {
    if v == 0.0 || (1e-4..1e7).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.6e}")
    }
}

fn fmt_magnitude(m: Magnitude) -> String {
    match m.finite_value() {
        Some(v) => format!("{} (log10 {:.6})", fmt_value(v), m.log10()),
        None => format!("10^{:.6}", m.log10()),
    }
}

fn oracle(args: &ProblemArgs, alpha: &str, start: Option<usize>, json: bool) -> Result<(), Failure> {
    let problem = build_problem(args)?;
    let alpha = parse_alpha(alpha)?;
    let n = problem.n();
    if let Some(k) = start {
        if k > n {
            return Err(Failure::usage(format!("--start-distance must be at most n={n}, got {k}")));
        }
    }
    let chain = build_level_chain(&problem, alpha);
    let times = expected_upgrade_times(&chain)?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let wrote = if json {
        let payload = serde_json::json!({
            "chain": chain,
            "times": {
                "e": (0..=n).map(|i| times.e_magnitude(i)).collect::<Vec<_>>(),
                "total_from": (0..=n).map(|k| times.total_from_magnitude(k)).collect::<Vec<_>>(),
                "expected_start": times.expected_start_magnitude(),
            },
            "start_distance": start.map(|k| serde_json::json!({
                "distance": k,
                "expected_time": times.total_from_magnitude(k),
            })),
        });
        write_json(&payload, &mut out).map_err(Failure::from)
    } else {
        (|| -> io::Result<()> {
            writeln!(out, "# {} n={} alpha={alpha}", problem.name(), n)?;
            writeln!(out, "{:>6}  {:>12}  {:>12}  {:>28}  {:>28}", "i", "p_minus", "p_plus", "E_i", "E_i^0")?;
            for i in 1..=n {
                writeln!(
                    out,
                    "{:>6}  {:>12.6e}  {:>12.6e}  {:>28}  {:>28}",
                    i,
                    chain.p_minus[i],
                    chain.p_plus[i],
                    fmt_magnitude(times.e_magnitude(i)),
                    fmt_magnitude(times.total_from_magnitude(i)),
                )?;
            }
            if let Some(k) = start {
                writeln!(out, "expected time from distance {k}: {}", fmt_magnitude(times.total_from_magnitude(k)))?;
            }
            writeln!(out, "expected time from a random start: {}", fmt_magnitude(times.expected_start_magnitude()))
        })()
        .map_err(|e| io_failure(Path::new("-"), e))
    };
    wrote
}

fn require<T>(value: Option<T>, flag: &str, which: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("--which {which} needs --{flag}")))
}

fn bound(
    which: BoundKind,
    n: usize,
    m: Option<usize>,
    d: Option<f64>,
    alpha: Option<&str>,
    p: Option<f64>,
    json: bool,
) -> Result<(), Failure> {
    let name = which.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    let alpha = |required: bool| -> Result<f64, Failure> {
        let a = require(alpha, "alpha", &name)?;
        let _ = required;
        Ok(parse_alpha(a)?.value())
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let BoundKind::Optimal = which {
        let params = bounds::optimal_parameters(n, require(m, "m", &name)?, require(d, "d", &name)?)?;
        if json {
            return write_json(&params, &mut out).map_err(Failure::from);
        }
        let opt = |v: Option<f64>| v.map_or("absent".to_owned(), fmt_value);
        let text = format!(
            "alpha_star_case1_exact: {}\nalpha_star_case1_asym: {}\nalpha_star_case2: {}\np_star: {}\n{}",
            opt(params.alpha_star_case1_exact),
            fmt_value(params.alpha_star_case1_asym),
            fmt_value(params.alpha_star_case2),
            fmt_value(params.p_star),
            params.notes.iter().map(|s| format!("note: {s}\n")).collect::<String>(),
        );
        return out.write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("-"), e));
    }
    let report = match which {
        BoundKind::OnemaxMa => bounds::onemax_ma_bound(n, alpha(true)?)?,
        BoundKind::Posdrift => bounds::posdrift_bounds(n, alpha(true)?)?,
        BoundKind::E1 => bounds::e1_bounds(n, alpha(true)?)?,
        BoundKind::CliffMa => bounds::cliff_ma_bounds(
            n,
            require(m, "m", &name)?,
            require(d, "d", &name)?,
            alpha(true)?,
        )?,
        BoundKind::CliffEa => bounds::cliff_ea_bound(
            n,
            require(m, "m", &name)?,
            require(d, "d", &name)?,
            require(p, "p", &name)?,
        )?,
        BoundKind::Optimal => unreachable!("handled above"),
    };
    if json {
        write_json(&report, &mut out).map_err(Failure::from)
    } else {
        out.write_all(render_report(&report).as_bytes())
            .map_err(|e| io_failure(Path::new("-"), e))
    }
}

fn render_report(r: &BoundReport) -> String {
    let mut s = format!("bound: {}\n", r.name);
    let opt = |m: Option<Magnitude>| m.map_or("absent".to_owned(), fmt_magnitude);
    s += &format!("lower: {}\nupper: {}\nmain term: {}\n", opt(r.lower), opt(r.upper), fmt_magnitude(r.main_term));
    for (k, v) in &r.derived {
        s += &format!("  {k} = {}\n", fmt_value(*v));
    }
    for h in &r.validity {
        s += &format!("hypothesis [{:?}]: {}\n", h.status, h.statement);
    }
    if r.asymptotic_slack {
        s += "asymptotic slack: lower-order factors dropped\n";
    }
    for note in &r.notes {
        s += &format!("note: {note}\n");
    }
    s
}

fn compare(path: &Path, problem: Option<Problem>, alpha: Option<Alpha>, json: bool) -> Result<(), Failure> {
    let file = fs::File::open(path).map_err(|e| io_failure(path, e))?;
    let rows = read_csv(file)?;
    let report = compare_with_oracle(&rows, problem, alpha)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json {
        return write_json(&report, &mut out).map_err(Failure::from);
    }
    let opt = |v: Option<f64>| v.map_or("-".to_owned(), fmt_value);
    let mut text = format!(
        "{:>4}  {:<10}  {:>12}  {:>16}  {:>16}  {:>10}  status\n",
        "row", "algorithm", "sweep", "mean", "exact", "z"
    );
    for c in &report {
        text += &format!(
            "{:>4}  {:<10}  {:>12}  {:>16}  {:>16}  {:>10}  {:?}\n",
            c.row,
            c.algorithm,
            opt(c.sweep_value),
            opt(c.mean),
            opt(c.exact),
            c.z.map_or("-".to_owned(), |z| format!("{z:.3}")),
            c.status
        );
    }
    let flagged = report.iter().filter(|c| c.status == ComparisonStatus::Flagged).count();
    text += &format!("{flagged} of {} rows flagged (|z| > 4)\n", report.len());
    out.write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("-"), e))
}

fn figure(preset: FigurePreset, dir: &Path, overrides: FigureOverrides, quiet: bool) -> Result<(), Failure> {
    let plans = preset.plans(overrides)?;
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let mut rows = Vec::new();
    for (i, plan) in plans.iter().enumerate() {
        let label = format!("{} [{}/{}]", preset.name(), i + 1, plans.len());
        let step = |done: usize, total: usize| {
            if !quiet && (done * 10 / total) != ((done - 1) * 10 / total) {
                eprintln!("{label}: {done}/{total} trials");
            }
        };
        let result = run_experiment_with_progress(plan, step)?;
        for w in &result.warnings {
            eprintln!("warning: {w}");
        }
        rows.extend(result.summary_rows());
    }
    let path = dir.join(format!("{}.csv", preset.name()));
    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
    let mut w = io::BufWriter::new(file);
    write_csv(&rows, &mut w)?;
    w.flush().map_err(|e| io_failure(&path, e))?;
    if !quiet {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}
