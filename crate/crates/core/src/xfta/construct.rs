//! Bottom-up construction of the approximate automaton: expansion, clustering
//! and ranking, one cost level at a time.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{Budget, Failure};
use crate::config::{AblationMode, SynthConfig};
use crate::csg::{apply_head, Head, Scene};
use crate::metric::{Jaccard, MTree, MetricIndex};

use super::alphabet::Alphabet;
use super::automaton::{top_k, StateId, Transition, Xfta};

/// Outcome of offering one point to a [`Clusterer`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assignment {
    /// The point became center number `.0`.
    NewCenter(usize),
    /// The point lies within the radius of these centers.
    Joined(Vec<usize>),
    /// No center is close and the center limit has been reached.
    Full,
}

/// Greedy leader clustering: a point joins every existing center within the
/// radius, or else becomes a new center.
///
/// Distances are Jaccard distances between the keys handed in, so callers
/// pass `scene ^ goal` to cluster under the goal-aware distance. Without a
/// radius only exact duplicates are grouped.
pub struct Clusterer {
    radius: Option<f64>,
    limit: usize,
    centers: MTree<Scene, Jaccard>,
    exact: HashMap<Scene, usize>,
}

impl Clusterer {
    pub fn new(radius: Option<f64>, limit: usize) -> Self {
        Self { radius, limit, centers: MTree::new(Jaccard), exact: HashMap::new() }
    }

    pub fn num_centers(&self) -> usize {
        self.centers.len()
    }

    pub fn center(&self, i: usize) -> &Scene {
        self.centers.get(i)
    }

    pub fn assign(&mut self, key: &Scene) -> Assignment {
        let close = match self.radius {
            Some(r) => self.centers.range_query(key, r),
            None => self.exact.get(key).map(|&c| vec![c]).unwrap_or_default(),
        };
        if !close.is_empty() {
            return Assignment::Joined(close);
        }
        if self.centers.len() >= self.limit {
            return Assignment::Full;
        }
        let id = self.centers.insert(key.clone());
        if self.radius.is_none() {
            self.exact.insert(key.clone(), id);
        }
        Assignment::NewCenter(id)
    }
}

/// Result of clustering a list of candidate outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    /// Candidate index that founded each center, in creation order.
    pub centers: Vec<usize>,
    /// For each candidate, the centers its transition is redirected to.
    pub targets: Vec<Vec<usize>>,
}

/// Clusters candidate outputs in the given order under the Jaccard distance of
/// the supplied keys.
pub fn cluster_frontier(keys: &[Scene], epsilon: f64) -> Clustering {
    let mut c = Clusterer::new(Some(epsilon), usize::MAX);
    let mut centers = Vec::new();
    let targets = keys
        .iter()
        .enumerate()
        .map(|(i, k)| match c.assign(k) {
            Assignment::NewCenter(id) => {
                centers.push(i);
                vec![id]
            }
            Assignment::Joined(ids) => ids,
            Assignment::Full => unreachable!("unbounded clusterer"),
        })
        .collect();
    Clustering { centers, targets }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LevelStats {
    pub cost: usize,
    pub frontier: usize,
    pub processed: usize,
    pub new_states: usize,
    pub transitions: usize,
    /// Candidates outside every kept cluster.
    pub dropped: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConstructStats {
    pub expansion: Duration,
    pub clustering: Duration,
    pub ranking: Duration,
    pub levels: Vec<LevelStats>,
    pub peak_bytes: usize,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    head: Head,
    args: [u32; 2],
    rank: f64,
}

impl Candidate {
    fn arg_ids(&self) -> Vec<StateId> {
        self.args[..self.head.arity()].iter().map(|&a| StateId(a)).collect()
    }
}

pub struct Construction {
    pub xfta: Xfta,
    pub stats: ConstructStats,
}

/// Builds the approximate automaton for `goal`.
///
/// Level `c` holds programs of exactly `c` nodes: the frontier combines states
/// whose costs sum to `c - 1`. Candidates are visited closest-to-goal first;
/// the first `beam_width` clusters found are kept, and every later candidate
/// close to a kept center adds transitions into it. Candidates that reproduce
/// an existing state exactly become transitions into it when every argument is
/// strictly cheaper, and are dropped otherwise. Finals are the `finals` states
/// closest to the goal.
pub fn construct_xfta(
    alphabet: &Alphabet,
    goal: &Scene,
    cfg: &SynthConfig,
    budget: &Budget,
) -> Result<Construction, Failure> {
    assert_eq!(alphabet.canvas, goal.canvas(), "alphabet and goal canvases differ");
    let canvas = goal.canvas();
    let mut stats = ConstructStats::default();
    let mut a = Xfta::new(goal.clone(), cfg.epsilon);
    let mut by_cost: Vec<Vec<StateId>> = vec![Vec::new(); cfg.c_max + 1];
    let mut index: HashMap<Scene, StateId> = HashMap::new();
    let clustering = cfg.ablation != AblationMode::NoCluster;
    let scene_bytes = Scene::empty(canvas).footprint();
    let cand_bytes = std::mem::size_of::<Candidate>() + 4;
    let index_bytes = scene_bytes + 48;

    for c in 1..=cfg.c_max {
        budget.check_time()?;

        // Expansion.
        let t = Instant::now();
        let mut cands: Vec<Candidate> = Vec::new();
        let base_bytes = a.footprint() + index.len() * index_bytes;
        let push = |head: Head, args: [u32; 2], scene: &Scene, cands: &mut Vec<Candidate>| -> Result<(), Failure> {
            let rank = crate::metric::jaccard_unchecked(goal, scene);
            cands.push(Candidate { head, args, rank });
            if cands.len() % 4096 == 0 {
                budget.check_time()?;
                budget.check_memory(base_bytes + cands.len() * cand_bytes)?;
            }
            Ok(())
        };
        if c == 1 {
            for &h in &alphabet.primitives {
                let s = apply_head(canvas, h, &[]);
                push(h, [u32::MAX; 2], &s, &mut cands)?;
            }
        }
        if c >= 2 {
            for &q in &by_cost[c - 1] {
                let body = &a.state(q).scene;
                for &h in &alphabet.repeats {
                    let s = apply_head(canvas, h, &[body]);
                    push(h, [q.0, u32::MAX], &s, &mut cands)?;
                }
            }
        }
        for i in 1..c.saturating_sub(1) {
            let j = c - 1 - i;
            for &x in &by_cost[i] {
                for &y in &by_cost[j] {
                    let (sx, sy) = (&a.state(x).scene, &a.state(y).scene);
                    if alphabet.union && (i < j || (i == j && x < y)) {
                        push(Head::Union, [x.0, y.0], &sx.union(sy), &mut cands)?;
                    }
                    if alphabet.diff && x != y {
                        push(Head::Diff, [x.0, y.0], &sx.difference(sy), &mut cands)?;
                    }
                }
            }
        }
        budget.check_memory(base_bytes + cands.len() * cand_bytes)?;
        stats.expansion += t.elapsed();

        // Ranking: closest to the goal first, ties by generation order.
        let t = Instant::now();
        let mut order: Vec<u32> = (0..cands.len() as u32).collect();
        if cfg.ablation == AblationMode::NoRank {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (c as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            order.shuffle(&mut rng);
        } else {
            order.sort_unstable_by(|&x, &y| cands[x as usize].rank.total_cmp(&cands[y as usize].rank).then(x.cmp(&y)));
        }
        stats.ranking += t.elapsed();

        // Clustering. The first `beam_width` clusters found are kept.
        let mut level = LevelStats { cost: c, frontier: cands.len(), ..Default::default() };
        let mut clusterer = Clusterer::new(clustering.then_some(cfg.epsilon), cfg.beam_width);
        let mut centers: Vec<StateId> = Vec::new();
        let t = Instant::now();
        let transitions_before = a.transitions().len();
        for &ci in &order {
            let cand = cands[ci as usize];
            let args = cand.arg_ids();
            let arg_scenes: Vec<&Scene> = args.iter().map(|q| &a.state(*q).scene).collect();
            let scene = apply_head(canvas, cand.head, &arg_scenes);
            level.processed += 1;
            if level.processed % 1024 == 0 {
                budget.check_time()?;
                budget.check_memory(a.footprint() + index.len() * index_bytes + cands.len() * cand_bytes)?;
            }
            if let Some(&old) = index.get(&scene) {
                let old_cost = a.state(old).cost as usize;
                if old_cost < c {
                    let max_arg = args.iter().map(|q| a.state(*q).cost as usize).max().unwrap_or(0);
                    if old_cost > max_arg {
                        a.add_transition(Transition::new(cand.head, &args, old));
                    }
                    continue;
                }
            }
            let key = if clustering { scene.xor(goal) } else { scene.clone() };
            match clusterer.assign(&key) {
                Assignment::NewCenter(_) => {
                    let q = a.add_state(scene.clone(), c as u32);
                    index.insert(scene, q);
                    centers.push(q);
                    a.add_transition(Transition::new(cand.head, &args, q));
                }
                Assignment::Joined(ids) => {
                    for id in ids {
                        a.add_transition(Transition::new(cand.head, &args, centers[id]));
                    }
                }
                Assignment::Full => level.dropped += 1,
            }
        }
        stats.clustering += t.elapsed();
        level.new_states = centers.len();
        level.transitions = a.transitions().len() - transitions_before;
        stats.peak_bytes = stats
            .peak_bytes
            .max(a.footprint() + index.len() * index_bytes + cands.len() * cand_bytes);
        stats.levels.push(level);
        by_cost[c] = centers;

        if cfg.stop_at_goal && index.contains_key(goal) {
            break;
        }
    }

    let t = Instant::now();
    let all: Vec<StateId> = a.states().map(|(id, _)| id).collect();
    let finals = top_k(&a, &all, cfg.finals);
    a.set_finals(finals);
    stats.ranking += t.elapsed();
    Ok(Construction { xfta: a, stats })
}
