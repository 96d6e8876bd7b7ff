//! Synthesis hyperparameters.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::csg::Canvas;
use crate::error::{Error, Result};

/// Which component of the synthesizer, if any, is replaced by a naive variant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AblationMode {
    #[default]
    None,
    /// Every distinct scene becomes its own state.
    NoCluster,
    /// Keep `w` randomly chosen clusters per cost instead of the closest ones.
    NoRank,
    /// Extraction picks incoming transitions uniformly at random.
    ExtractRandom,
    /// Repair moves to a uniformly random neighbor.
    RepairRandom,
}

impl AblationMode {
    pub const ALL: [AblationMode; 5] = [
        AblationMode::None,
        AblationMode::NoCluster,
        AblationMode::NoRank,
        AblationMode::ExtractRandom,
        AblationMode::RepairRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AblationMode::None => "none",
            AblationMode::NoCluster => "no-cluster",
            AblationMode::NoRank => "no-rank",
            AblationMode::ExtractRandom => "extract-random",
            AblationMode::RepairRandom => "repair-random",
        }
    }
}

impl fmt::Display for AblationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AblationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.name().replace('-', "") == norm)
            .ok_or_else(|| Error::Config(format!("unknown ablation mode {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Clustering radius under the goal-aware distance.
    pub epsilon: f64,
    /// New states kept per cost level.
    pub beam_width: usize,
    /// Largest program cost (node count) enumerated into the automaton.
    pub c_max: usize,
    /// Maximum rewrite steps per repair attempt.
    pub repair_steps: usize,
    /// Number of final states.
    pub finals: usize,
    pub tabu_capacity: usize,
    /// Extraction rounds over the final states.
    pub extract_samples: usize,
    /// Repair attempts per distinct extracted program.
    pub repair_attempts: usize,
    pub transition_sample_rate: f64,
    pub rewrite_sample_rate: f64,
    pub seed: u64,
    pub canvas: Canvas,
    #[serde(with = "duration_secs")]
    pub time_budget: Duration,
    pub memory_budget: usize,
    pub ablation: AblationMode,
    /// Stop growing the automaton once a state equals the goal.
    pub stop_at_goal: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.2,
            beam_width: 200,
            c_max: 9,
            repair_steps: 500,
            finals: 200,
            tabu_capacity: 1000,
            extract_samples: 10,
            repair_attempts: 5,
            transition_sample_rate: 0.5,
            rewrite_sample_rate: 0.8,
            seed: 0,
            canvas: Canvas::default(),
            time_budget: Duration::from_secs(600),
            memory_budget: 2 << 30,
            ablation: AblationMode::None,
            stop_at_goal: true,
        }
    }
}

impl SynthConfig {
    pub fn for_canvas(canvas: Canvas) -> Self {
        Self { canvas, ..Self::default() }
    }

    /// Sets the beam width and keeps the number of finals equal to it.
    pub fn with_beam_width(mut self, w: usize) -> Self {
        self.beam_width = w;
        self.finals = w;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon must lie in [0, 1]");
        }
        let counts = [
            self.beam_width,
            self.c_max,
            self.repair_steps,
            self.finals,
            self.tabu_capacity,
            self.extract_samples,
            self.repair_attempts,
        ];
        if counts.contains(&0) {
            return bad("all counts must be at least 1");
        }
        for rate in [self.transition_sample_rate, self.rewrite_sample_rate] {
            if !(rate > 0.0 && rate <= 1.0) {
                return bad("sample rates must lie in (0, 1]");
            }
        }
        Ok(())
    }
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}
