//! The top-level synthesis loop: build the automaton, then alternate
//! extraction and repair until a program renders the goal exactly.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{Budget, Failure};
use crate::config::{AblationMode, SynthConfig};
use crate::csg::{eval, Expr, Scene};
use crate::error::{Error, Result};
use crate::xfta::{construct_xfta, Alphabet};

use super::extract::{extract_term, ExtractPolicy};
use super::repair::{repair, RepairOutcome, RepairParams, RepairPolicy};
use super::rewrite::default_rules;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved(Expr),
    Failed(Failure),
}

impl Outcome {
    pub fn program(&self) -> Option<&Expr> {
        match self {
            Outcome::Solved(p) => Some(p),
            Outcome::Failed(_) => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Outcome::Solved(_))
    }

    /// `success`, `timeout`, `memory` or `exhausted`.
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Solved(_) => "success",
            Outcome::Failed(Failure::Timeout) => "timeout",
            Outcome::Failed(Failure::Memory) => "memory",
            Outcome::Failed(Failure::Exhausted) => "exhausted",
        }
    }
}

/// Wall times per phase and search counters of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SynthStats {
    pub total: Duration,
    pub construct: Duration,
    pub expansion: Duration,
    pub clustering: Duration,
    pub ranking: Duration,
    pub extract: Duration,
    pub repair: Duration,
    pub states: usize,
    pub transitions: usize,
    pub extractions: usize,
    pub repairs: usize,
    pub repair_steps: usize,
    pub peak_bytes: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthResult {
    pub outcome: Outcome,
    pub stats: SynthStats,
}

/// Synthesizes a program rendering exactly `goal` with the full operator
/// alphabet of the goal's canvas.
pub fn metric_synth(goal: &Scene, cfg: &SynthConfig) -> Result<SynthResult> {
    metric_synth_with(goal, cfg, &Alphabet::full(goal.canvas()))
}

pub fn metric_synth_with(goal: &Scene, cfg: &SynthConfig, alphabet: &Alphabet) -> Result<SynthResult> {
    cfg.validate()?;
    if goal.canvas() != cfg.canvas {
        return Err(Error::DimensionMismatch { left: goal.canvas(), right: cfg.canvas });
    }
    let start = Instant::now();
    let budget = Budget::new(cfg.time_budget, cfg.memory_budget);
    let mut stats = SynthStats { seed: cfg.seed, ..Default::default() };
    let outcome = match run(goal, cfg, alphabet, &budget, &mut stats) {
        Ok(p) => Outcome::Solved(p),
        Err(f) => Outcome::Failed(f),
    };
    stats.total = start.elapsed();
    if let Outcome::Solved(p) = &outcome {
        assert_eq!(eval(p, goal.canvas()), *goal, "unsound solution {p}");
    }
    Ok(SynthResult { outcome, stats })
}

fn run(goal: &Scene, cfg: &SynthConfig, alphabet: &Alphabet, budget: &Budget, stats: &mut SynthStats) -> std::result::Result<Expr, Failure> {
    let t = Instant::now();
    let built = construct_xfta(alphabet, goal, cfg, budget);
    stats.construct = t.elapsed();
    let built = built?;
    let a = built.xfta;
    stats.expansion = built.stats.expansion;
    stats.clustering = built.stats.clustering;
    stats.ranking = built.stats.ranking;
    stats.peak_bytes = built.stats.peak_bytes;
    stats.states = a.num_states();
    stats.transitions = a.transitions().len();

    let extract_policy = match cfg.ablation {
        AblationMode::ExtractRandom => ExtractPolicy::Random,
        _ => ExtractPolicy::Greedy { rate: cfg.transition_sample_rate },
    };
    let params = RepairParams {
        steps: cfg.repair_steps,
        tabu_capacity: cfg.tabu_capacity,
        policy: match cfg.ablation {
            AblationMode::RepairRandom => RepairPolicy::Random,
            _ => RepairPolicy::Greedy { rate: cfg.rewrite_sample_rate },
        },
    };
    let rules = default_rules();
    let mut tried: HashMap<Expr, usize> = HashMap::new();
    let mut attempt: u64 = 0;
    // Round-robin over the finals, best first, so every final is sampled
    // before any is sampled again.
    for _ in 0..cfg.extract_samples {
        for &f in a.finals() {
            budget.check_time()?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(attempt);
            attempt += 1;

            let t = Instant::now();
            let (p, scene) = extract_term(&a, f, goal, extract_policy, &mut rng);
            stats.extract += t.elapsed();
            stats.extractions += 1;
            if scene == *goal {
                return Ok(p.canonicalize());
            }
            let used = tried.entry(p.clone()).or_insert(0);
            if *used >= cfg.repair_attempts {
                continue;
            }
            *used += 1;

            let t = Instant::now();
            let res = repair(&p, goal, &rules, &params, budget, &mut rng);
            stats.repair += t.elapsed();
            stats.repairs += 1;
            match res? {
                RepairOutcome::Solved { program, steps } => {
                    stats.repair_steps += steps;
                    return Ok(program.canonicalize());
                }
                RepairOutcome::Failed { steps, .. } => stats.repair_steps += steps,
            }
        }
    }
    Err(Failure::Exhausted)
}
