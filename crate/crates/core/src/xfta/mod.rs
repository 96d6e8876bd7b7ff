//! Approximate finite tree automata over scenes and their construction.

pub mod alphabet;
pub mod automaton;
pub mod construct;

pub use alphabet::Alphabet;
pub use automaton::{state_order, top_k, State, StateId, Transition, Violation, Xfta, XftaDump};
pub use construct::{cluster_frontier, construct_xfta, Assignment, Clusterer, Clustering, ConstructStats, Construction, LevelStats};
