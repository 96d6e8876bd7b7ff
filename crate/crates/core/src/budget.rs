//! Wall-clock and memory limits shared by the search procedures.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Why a synthesis run stopped without a solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Failure {
    Timeout,
    Memory,
    /// The search space or the sampling budget ran out.
    Exhausted,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::Timeout => "timeout",
            Failure::Memory => "memory",
            Failure::Exhausted => "exhausted",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    start: Instant,
    deadline: Option<Instant>,
    memory: usize,
}

impl Budget {
    pub fn new(time: Duration, memory: usize) -> Self {
        let start = Instant::now();
        Self { start, deadline: start.checked_add(time), memory }
    }

    pub fn unlimited() -> Self {
        Self { start: Instant::now(), deadline: None, memory: usize::MAX }
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn check_time(&self) -> Result<(), Failure> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Failure::Timeout),
            _ => Ok(()),
        }
    }

    pub fn check_memory(&self, bytes: usize) -> Result<(), Failure> {
        if bytes > self.memory {
            Err(Failure::Memory)
        } else {
            Ok(())
        }
    }

    pub fn memory_limit(&self) -> usize {
        self.memory
    }
}
