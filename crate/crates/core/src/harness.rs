//! Experiment runner: repeated runs over a corpus, per-case summaries and the
//! report tables.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::fta_basic;
use crate::benchgen::{BenchmarkCase, CaseKind};
use crate::config::{AblationMode, SynthConfig};
use crate::error::{Error, Result};
use crate::search::{metric_synth, SynthResult};

/// Which synthesizer a suite runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Symetric,
    FtaBasic,
    Ablation(AblationMode),
}

impl Algorithm {
    /// Deterministic algorithms are run once per case whatever the repeat count.
    pub fn is_deterministic(self) -> bool {
        self == Algorithm::FtaBasic
    }

    fn normalize(self) -> Self {
        match self {
            Algorithm::Ablation(AblationMode::None) => Algorithm::Symetric,
            a => a,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.normalize() {
            Algorithm::Symetric => f.write_str("symetric"),
            Algorithm::FtaBasic => f.write_str("fta-basic"),
            Algorithm::Ablation(m) => write!(f, "ablation:{m}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symetric" => Ok(Algorithm::Symetric),
            "fta-basic" => Ok(Algorithm::FtaBasic),
            _ => match s.strip_prefix("ablation:") {
                Some(m) => Ok(Algorithm::Ablation(m.parse()?).normalize()),
                None => Err(Error::Config(format!("unknown algorithm {s:?}; expected symetric, fta-basic or ablation:<mode>"))),
            },
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Returns `cfg` with the given component replaced by its naive variant.
pub fn apply_ablation(mode: AblationMode, cfg: &SynthConfig) -> SynthConfig {
    SynthConfig { ablation: mode, ..cfg.clone() }
}

/// Wall times in seconds. Construction is split into expansion, clustering
/// and ranking.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub total_secs: f64,
    pub construct_secs: f64,
    pub expansion_secs: f64,
    pub clustering_secs: f64,
    pub ranking_secs: f64,
    pub extract_secs: f64,
    pub repair_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub case: String,
    pub kind: CaseKind,
    pub algorithm: Algorithm,
    pub repeat: usize,
    pub seed: u64,
    /// `success`, `timeout`, `memory` or `exhausted`.
    pub outcome: String,
    pub program: Option<String>,
    pub times: PhaseTimes,
    pub peak_bytes: usize,
    pub states: usize,
    pub transitions: usize,
    pub extractions: usize,
    pub repairs: usize,
    pub repair_steps: usize,
}

impl RunRecord {
    pub fn is_success(&self) -> bool {
        self.outcome == "success"
    }

    fn from_result(case: &BenchmarkCase, algorithm: Algorithm, repeat: usize, res: &SynthResult) -> Self {
        let s = &res.stats;
        let secs = Duration::as_secs_f64;
        Self {
            case: case.name.clone(),
            kind: case.kind,
            algorithm,
            repeat,
            seed: s.seed,
            outcome: res.outcome.tag().to_string(),
            program: res.outcome.program().map(|p| p.to_string()),
            times: PhaseTimes {
                total_secs: secs(&s.total),
                construct_secs: secs(&s.construct),
                expansion_secs: secs(&s.expansion),
                clustering_secs: secs(&s.clustering),
                ranking_secs: secs(&s.ranking),
                extract_secs: secs(&s.extract),
                repair_secs: secs(&s.repair),
            },
            peak_bytes: s.peak_bytes,
            states: s.states,
            transitions: s.transitions,
            extractions: s.extractions,
            repairs: s.repairs,
            repair_steps: s.repair_steps,
        }
    }
}

/// Seed of run `repeat` on the case called `name`: stable across platforms
/// and independent of corpus order.
pub fn derive_seed(base: u64, name: &str, repeat: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes().chain((repeat as u64).to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ base
}

/// Expected time to first success of a randomized run: the expected number
/// of runs until success times the mean time per run.
pub fn expected_runtime(runs: usize, successes: usize, mean_secs: f64) -> Option<f64> {
    (successes > 0).then(|| runs as f64 / successes as f64 * mean_secs)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

fn max(xs: &[f64]) -> Option<f64> {
    xs.iter().copied().reduce(f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: String,
    pub kind: CaseKind,
    pub runs: usize,
    pub successes: usize,
    pub solved: bool,
    /// Median time of the successful runs.
    pub median_success_secs: Option<f64>,
    pub expected_runtime_secs: Option<f64>,
}

/// One row of the success table: a benchmark group under one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    /// `generated`, `handwritten` or `all`.
    pub group: String,
    pub cases: usize,
    pub solved: usize,
    pub success_pct: f64,
    /// Median over successful runs.
    pub median_success_secs: Option<f64>,
    /// Median over solved cases of the per-case expected runtime.
    pub median_expected_runtime_secs: Option<f64>,
}

/// Median and maximum of one phase over the successful runs of a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub group: String,
    pub runs: usize,
    pub construct_median_secs: Option<f64>,
    pub construct_max_secs: Option<f64>,
    pub extract_median_secs: Option<f64>,
    pub extract_max_secs: Option<f64>,
    pub repair_median_secs: Option<f64>,
    pub repair_max_secs: Option<f64>,
    pub expansion_median_secs: Option<f64>,
    pub clustering_median_secs: Option<f64>,
    pub ranking_median_secs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub algorithm: Algorithm,
    pub repeats: usize,
    pub config: SynthConfig,
    pub records: Vec<RunRecord>,
    pub cases: Vec<CaseSummary>,
    pub summary: Vec<GroupSummary>,
    pub phases: Vec<PhaseSummary>,
}

impl SuiteReport {
    pub fn solved(&self) -> usize {
        self.cases.iter().filter(|c| c.solved).count()
    }

    fn build(algorithm: Algorithm, repeats: usize, config: SynthConfig, mut records: Vec<RunRecord>) -> Self {
        records.sort_by(|a, b| a.case.cmp(&b.case).then(a.repeat.cmp(&b.repeat)));
        let mut cases: Vec<CaseSummary> = Vec::new();
        for chunk in records.chunk_by(|a, b| a.case == b.case) {
            let ok: Vec<f64> = chunk.iter().filter(|r| r.is_success()).map(|r| r.times.total_secs).collect();
            let mean = chunk.iter().map(|r| r.times.total_secs).sum::<f64>() / chunk.len() as f64;
            cases.push(CaseSummary {
                case: chunk[0].case.clone(),
                kind: chunk[0].kind,
                runs: chunk.len(),
                successes: ok.len(),
                solved: !ok.is_empty(),
                median_success_secs: median(&ok),
                expected_runtime_secs: expected_runtime(chunk.len(), ok.len(), mean),
            });
        }
        let groups: [(&str, Option<CaseKind>); 3] =
            [("generated", Some(CaseKind::Generated)), ("handwritten", Some(CaseKind::Handwritten)), ("all", None)];
        let in_group = |k: CaseKind, g: Option<CaseKind>| g.map_or(true, |g| g == k);
        let mut summary = Vec::new();
        let mut phases = Vec::new();
        for (name, g) in groups {
            let cs: Vec<&CaseSummary> = cases.iter().filter(|c| in_group(c.kind, g)).collect();
            if cs.is_empty() {
                continue;
            }
            let ok: Vec<&RunRecord> = records.iter().filter(|r| in_group(r.kind, g) && r.is_success()).collect();
            let solved = cs.iter().filter(|c| c.solved).count();
            let expected: Vec<f64> = cs.iter().filter_map(|c| c.expected_runtime_secs).collect();
            let pick = |f: fn(&PhaseTimes) -> f64| ok.iter().map(|r| f(&r.times)).collect::<Vec<f64>>();
            summary.push(GroupSummary {
                group: name.to_string(),
                cases: cs.len(),
                solved,
                success_pct: 100.0 * solved as f64 / cs.len() as f64,
                median_success_secs: median(&pick(|t| t.total_secs)),
                median_expected_runtime_secs: median(&expected),
            });
            let (construct, extract, repair) =
                (pick(|t| t.construct_secs), pick(|t| t.extract_secs), pick(|t| t.repair_secs));
            phases.push(PhaseSummary {
                group: name.to_string(),
                runs: ok.len(),
                construct_median_secs: median(&construct),
                construct_max_secs: max(&construct),
                extract_median_secs: median(&extract),
                extract_max_secs: max(&extract),
                repair_median_secs: median(&repair),
                repair_max_secs: max(&repair),
                expansion_median_secs: median(&pick(|t| t.expansion_secs)),
                clustering_median_secs: median(&pick(|t| t.clustering_secs)),
                ranking_median_secs: median(&pick(|t| t.ranking_secs)),
            });
        }
        Self { algorithm, repeats, config, records, cases, summary, phases }
    }

    /// Success rates and expected runtimes, one row per benchmark group.
    pub fn success_table(&self) -> String {
        let mut rows = vec![vec![
            "Algorithm".to_string(),
            "Benchmarks".into(),
            "Solved".into(),
            "Success %".into(),
            "Median (s)".into(),
            "Expected (s)".into(),
        ]];
        for g in &self.summary {
            rows.push(vec![
                self.algorithm.to_string(),
                g.group.clone(),
                format!("{}/{}", g.solved, g.cases),
                format!("{:.1}", g.success_pct),
                fmt_opt(g.median_success_secs),
                fmt_opt(g.median_expected_runtime_secs),
            ]);
        }
        align(&rows)
    }

    /// Median and maximum time of each sub-procedure over successful runs.
    pub fn phase_table(&self) -> String {
        let mut rows = vec![vec![
            "Benchmark".to_string(),
            "Construct med".into(),
            "Construct max".into(),
            "Extract med".into(),
            "Extract max".into(),
            "Repair med".into(),
            "Repair max".into(),
        ]];
        for p in &self.phases {
            rows.push(vec![
                p.group.clone(),
                fmt_opt(p.construct_median_secs),
                fmt_opt(p.construct_max_secs),
                fmt_opt(p.extract_median_secs),
                fmt_opt(p.extract_max_secs),
                fmt_opt(p.repair_median_secs),
                fmt_opt(p.repair_max_secs),
            ]);
        }
        align(&rows)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

/// Left-aligns the first column and right-aligns the rest.
pub fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|i| rows.iter().filter_map(|r| r.get(i)).map(|c| c.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (i, c) in r.iter().enumerate() {
            if i == 0 {
                write!(line, "{c:<w$}", w = widths[i]).unwrap();
            } else {
                write!(line, "  {c:>w$}", w = widths[i]).unwrap();
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Several suites over the same corpus side by side.
pub fn comparison_table(reports: &[SuiteReport]) -> String {
    let mut rows = vec![vec!["Algorithm".to_string(), "Solved".into(), "Success %".into(), "Median (s)".into(), "Expected (s)".into()]];
    for r in reports {
        if let Some(g) = r.summary.iter().find(|g| g.group == "all") {
            rows.push(vec![
                r.algorithm.to_string(),
                format!("{}/{}", g.solved, g.cases),
                format!("{:.1}", g.success_pct),
                fmt_opt(g.median_success_secs),
                fmt_opt(g.median_expected_runtime_secs),
            ]);
        }
    }
    align(&rows)
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub repeats: usize,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { repeats: 1, threads: 1 }
    }
}

/// Runs every case `repeats` times (once for deterministic algorithms) with
/// seeds derived from `cfg.seed` and the case name. A failing case never
/// stops the suite. Records come back sorted by case name and repeat.
pub fn run_benchmark_suite(
    cases: &[BenchmarkCase],
    algorithm: Algorithm,
    cfg: &SynthConfig,
    opts: SuiteOptions,
) -> Result<SuiteReport> {
    if opts.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let algorithm = algorithm.normalize();
    let repeats = if algorithm.is_deterministic() { 1 } else { opts.repeats };
    let base = match algorithm {
        Algorithm::Ablation(m) => apply_ablation(m, cfg),
        _ => apply_ablation(AblationMode::None, cfg),
    };
    base.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cases.len()).flat_map(|c| (0..repeats).map(move |r| (c, r))).collect();
    let run = |&(ci, rep): &(usize, usize)| -> Result<RunRecord> {
        let case = &cases[ci];
        let cfg = SynthConfig { seed: derive_seed(base.seed, &case.name, rep), canvas: case.canvas, ..base.clone() };
        let res = match algorithm {
            Algorithm::FtaBasic => fta_basic(&case.goal, &cfg)?,
            _ => metric_synth(&case.goal, &cfg)?,
        };
        Ok(RunRecord::from_result(case, algorithm, rep, &res))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?;
    Ok(SuiteReport::build(algorithm, repeats, base, records))
}
