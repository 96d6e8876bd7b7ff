//! Distances between scenes and a metric index for range queries.

pub mod distance;
pub mod index;

pub use distance::{diff_apply, goal_distance, goal_rank, jaccard, jaccard_unchecked, DiffSet};
pub use index::{Jaccard, LinearIndex, MTree, Metric, MetricIndex};
