//! Program extraction, repair and the synthesis driver.

pub mod extract;
pub mod repair;
pub mod rewrite;
pub mod synth;

pub use extract::{extract_term, ExtractPolicy};
pub use repair::{neighbors, repair, Neighbor, RepairOutcome, RepairParams, RepairPolicy, TabuList};
pub use rewrite::{default_rules, RewriteRule};
pub use synth::{metric_synth, metric_synth_with, Outcome, SynthResult, SynthStats};
