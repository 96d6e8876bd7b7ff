use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symetric::baseline::{count_search_space_with, study_alphabet, SearchSpaceTable};
use symetric::benchgen::{generate_benchmark, load_corpus, write_corpus, GenParams};
use symetric::budget::Budget;
use symetric::config::{AblationMode, SynthConfig};
use symetric::csg::{eval, parse, Canvas, Scene};
use symetric::harness::{comparison_table, run_benchmark_suite, Algorithm, SuiteOptions, SuiteReport};
use symetric::search::metric_synth;

/// Inverse CSG by metric program synthesis.
#[derive(Parser, Debug)]
#[command(name = "symetric", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a program that renders exactly the given scene file.
    Synth {
        scene: PathBuf,
        #[command(flatten)]
        opts: SynthOpts,
        /// Write the program here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a program to a scene file.
    Eval {
        program: String,
        #[arg(long, default_value = "16x16")]
        canvas: String,
        /// Write the scene here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a program as ASCII art.
    Render {
        program: String,
        #[arg(long, default_value = "16x16")]
        canvas: String,
    },
    /// Generate a random benchmark corpus.
    GenBench {
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Node count range, e.g. 8-16.
        #[arg(long, default_value = "8-16")]
        size: String,
        /// AST depth range, a lone primitive having depth 1.
        #[arg(long, default_value = "4-7")]
        depth: String,
        #[arg(long, default_value = "16x16")]
        canvas: String,
        #[arg(long, env = "SYMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "gen")]
        out_dir: PathBuf,
        /// Prefix of the case names.
        #[arg(long, default_value = "gen")]
        prefix: String,
    },
    /// Run one algorithm over a corpus and report success rates and timings.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        /// symetric, fta-basic or ablation:<mode>.
        #[arg(long, default_value = "symetric")]
        algo: String,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Count programs, distinct scenes and clusters by program size.
    ClusterStudy {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2")]
        epsilons: Vec<f64>,
        #[arg(long, default_value = "16x16")]
        canvas: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the full algorithm with one or all ablations on a corpus.
    Ablate {
        /// no-cluster, no-rank, extract-random, repair-random or all.
        #[arg(long, default_value = "all")]
        mode: String,
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        suite: SuiteArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct SynthOpts {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    beam_width: Option<usize>,
    /// Largest program size enumerated into the automaton.
    #[arg(long)]
    max_cost: Option<usize>,
    #[arg(long)]
    repair_steps: Option<usize>,
    #[arg(long, env = "SYMETRIC_SEED")]
    seed: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Memory limit in bytes; K, M and G suffixes are accepted.
    #[arg(long, value_parser = parse_bytes)]
    memory_limit: Option<usize>,
}

impl SynthOpts {
    fn config(&self, canvas: Canvas) -> Result<SynthConfig> {
        let mut cfg = SynthConfig::for_canvas(canvas);
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(w) = self.beam_width {
            cfg = cfg.with_beam_width(w);
        }
        if let Some(c) = self.max_cost {
            cfg.c_max = c;
        }
        if let Some(n) = self.repair_steps {
            cfg.repair_steps = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.timeout {
            cfg.time_budget = Duration::try_from_secs_f64(t).context("invalid --timeout")?;
        }
        if let Some(m) = self.memory_limit {
            cfg.memory_budget = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
struct SuiteArgs {
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    opts: SynthOpts,
}

fn parse_bytes(s: &str) -> std::result::Result<usize, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 1usize << 10),
        Some('M') => (&s[..s.len() - 1], 1 << 20),
        Some('G') => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    let n: f64 = num.parse().map_err(|_| format!("invalid size {s:?}"))?;
    if !(n >= 0.0) {
        return Err(format!("invalid size {s:?}"));
    }
    Ok((n * mult as f64) as usize)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    match s.split_once('-') {
        Some((a, b)) => Ok((a.trim().parse()?, b.trim().parse()?)),
        None => {
            let n = s.trim().parse()?;
            Ok((n, n))
        }
    }
}

/// A program given inline or as `@path`.
fn read_program(arg: &str) -> Result<symetric::csg::Expr> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    Ok(parse(&text)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_cases(dir: &Path) -> Result<Vec<symetric::benchgen::BenchmarkCase>> {
    let report = load_corpus(dir)?;
    for (path, err) in &report.errors {
        eprintln!("skipping {}: {err}", path.display());
    }
    if report.cases.is_empty() {
        bail!("no benchmark cases in {}", dir.display());
    }
    Ok(report.cases)
}

fn run_suite(cases: &[symetric::benchgen::BenchmarkCase], algo: Algorithm, args: &SuiteArgs) -> Result<SuiteReport> {
    let canvas = cases[0].canvas;
    let cfg = args.opts.config(canvas)?;
    let opts = SuiteOptions { repeats: args.repeats, threads: args.jobs };
    Ok(run_benchmark_suite(cases, algo, &cfg, opts)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth { scene, opts, out } => {
            let text = fs::read_to_string(&scene).with_context(|| format!("reading {}", scene.display()))?;
            let goal = Scene::parse(&text)?;
            let cfg = opts.config(goal.canvas())?;
            let res = metric_synth(&goal, &cfg)?;
            eprintln!("{}", serde_json::to_string(&res.stats)?);
            match res.outcome.program() {
                Some(p) => {
                    write_or_print(out.as_deref(), &format!("{p}\n"))?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no program found: {}", res.outcome.tag());
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Eval { program, canvas, out } => {
            let p = read_program(&program)?;
            let scene = eval(&p, Canvas::parse(&canvas)?);
            write_or_print(out.as_deref(), &scene.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { program, canvas } => {
            let p = read_program(&program)?;
            print!("{}", eval(&p, Canvas::parse(&canvas)?).to_ascii());
            Ok(ExitCode::SUCCESS)
        }
        Command::GenBench { count, size, depth, canvas, seed, out_dir, prefix } => {
            let params = GenParams {
                canvas: Canvas::parse(&canvas)?,
                size: parse_range(&size).context("invalid --size")?,
                depth: parse_range(&depth).context("invalid --depth")?,
                ..GenParams::desk()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cases = (0..count)
                .map(|i| generate_benchmark(&mut rng, format!("{prefix}{i:02}"), &params))
                .collect::<symetric::Result<Vec<_>>>()?;
            write_corpus(&out_dir, &cases)?;
            eprintln!("wrote {} cases to {}", cases.len(), out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { corpus, algo, suite } => {
            let algo: Algorithm = algo.parse()?;
            let cases = load_cases(&corpus)?;
            let report = run_suite(&cases, algo, &suite)?;
            if let Some(path) = &suite.report {
                fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}\n{}", report.success_table(), report.phase_table());
            Ok(if report.solved() > 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ClusterStudy { n_max, epsilons, canvas, out } => {
            let alphabet = study_alphabet(Canvas::parse(&canvas)?);
            let table = count_search_space_with(&alphabet, n_max, &epsilons, &Budget::unlimited())
                .map_err(|f| anyhow::anyhow!("study stopped: {f}"))?;
            eprintln!("{}", SearchSpaceTable::COUNTING);
            write_or_print(out.as_deref(), &table.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ablate { mode, corpus, suite } => {
            let modes: Vec<AblationMode> = if mode == "all" {
                AblationMode::ALL.to_vec()
            } else {
                vec![AblationMode::None, mode.parse()?]
            };
            let cases = load_cases(&corpus)?;
            let mut reports = Vec::new();
            for m in modes {
                reports.push(run_suite(&cases, Algorithm::Ablation(m), &suite)?);
            }
            if let Some(path) = &suite.report {
                fs::write(path, serde_json::to_string_pretty(&reports)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", comparison_table(&reports));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
