//! Bottom-up enumeration with exact observational-equivalence reduction, and
//! the search-space size study built on it.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::budget::{Budget, Failure};
use crate::config::SynthConfig;
use crate::csg::{apply_head, Canvas, Expr, Head, Scene};
use crate::error::{Error, Result};
use crate::search::{Outcome, SynthResult, SynthStats};
use crate::xfta::{Alphabet, Assignment, Clusterer};

#[derive(Clone, Debug)]
struct Class {
    scene: Scene,
    head: Head,
    args: [u32; 2],
    cost: u32,
}

/// One entry per distinct scene, holding the cheapest program found for it.
///
/// Programs are stored as back-pointers to the classes of their arguments and
/// rebuilt on demand.
#[derive(Clone, Debug, Default)]
pub struct EquivClassStore {
    index: HashMap<Scene, u32>,
    classes: Vec<Class>,
}

impl EquivClassStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, scene: &Scene) -> Option<usize> {
        self.index.get(scene).map(|&i| i as usize)
    }

    /// Records a producer of `scene`. Returns the new class id, or `None` when
    /// the scene already has a class; the first producer is kept, so callers
    /// must offer programs in non-decreasing cost.
    pub fn insert(&mut self, scene: Scene, head: Head, args: &[usize], cost: usize) -> Option<usize> {
        if self.index.contains_key(&scene) {
            return None;
        }
        let id = self.classes.len();
        let mut a = [u32::MAX; 2];
        for (slot, &x) in a.iter_mut().zip(args) {
            *slot = x as u32;
        }
        self.index.insert(scene.clone(), id as u32);
        self.classes.push(Class { scene, head, args: a, cost: cost as u32 });
        Some(id)
    }

    pub fn scene(&self, id: usize) -> &Scene {
        &self.classes[id].scene
    }

    pub fn cost(&self, id: usize) -> usize {
        self.classes[id].cost as usize
    }

    /// The stored representative program of class `id`.
    pub fn expr(&self, id: usize) -> Expr {
        let c = &self.classes[id];
        let kids = c.args[..c.head.arity()].iter().map(|&a| self.expr(a as usize)).collect();
        c.head.build(kids)
    }

    pub fn scenes(&self) -> impl Iterator<Item = &Scene> {
        self.classes.iter().map(|c| &c.scene)
    }

    /// Approximate heap size in bytes.
    pub fn footprint(&self) -> usize {
        let per = self.classes.first().map_or(0, |c| c.scene.footprint());
        self.classes.len() * (2 * per + std::mem::size_of::<Class>() + 24)
    }
}

/// Classes found by [`enumerate_classes`], grouped by minimal cost.
#[derive(Debug)]
pub struct Enumeration {
    pub store: EquivClassStore,
    /// `levels[c]` lists the classes whose cheapest program has `c` nodes.
    pub levels: Vec<Vec<usize>>,
    /// Class of the goal, when one was given and reached.
    pub found: Option<usize>,
}

/// Enumerates programs over `alphabet` by increasing node count up to `c_max`,
/// keeping one program per distinct scene. Stops early once `goal` is
/// produced.
///
/// `on_level` sees every completed level, including the one where the goal
/// was found.
pub fn enumerate_classes(
    alphabet: &Alphabet,
    c_max: usize,
    goal: Option<&Scene>,
    budget: &Budget,
    mut on_level: impl FnMut(usize, &EquivClassStore, &[usize]),
) -> std::result::Result<Enumeration, Failure> {
    let canvas = alphabet.canvas;
    let mut store = EquivClassStore::new();
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); c_max + 1];
    let mut seen = 0usize;
    let mut offer = |store: &mut EquivClassStore, new: &mut Vec<usize>, scene: Scene, head: Head, args: &[usize], c: usize| {
        seen += 1;
        if seen % 4096 == 0 {
            budget.check_time()?;
            budget.check_memory(store.footprint())?;
        }
        if let Some(id) = store.insert(scene, head, args, c) {
            new.push(id);
        }
        Ok(())
    };
    for c in 1..=c_max {
        budget.check_time()?;
        let mut new = Vec::new();
        if c == 1 {
            for &h in &alphabet.primitives {
                offer(&mut store, &mut new, apply_head(canvas, h, &[]), h, &[], c)?;
            }
        }
        if c >= 2 {
            for &q in &levels[c - 1] {
                for &h in &alphabet.repeats {
                    let s = apply_head(canvas, h, &[store.scene(q)]);
                    offer(&mut store, &mut new, s, h, &[q], c)?;
                }
            }
        }
        for i in 1..c.saturating_sub(1) {
            let j = c - 1 - i;
            for xi in 0..levels[i].len() {
                let x = levels[i][xi];
                for yi in 0..levels[j].len() {
                    let y = levels[j][yi];
                    if alphabet.union && (i < j || (i == j && x < y)) {
                        let s = store.scene(x).union(store.scene(y));
                        offer(&mut store, &mut new, s, Head::Union, &[x, y], c)?;
                    }
                    if alphabet.diff && x != y {
                        let s = store.scene(x).difference(store.scene(y));
                        offer(&mut store, &mut new, s, Head::Diff, &[x, y], c)?;
                    }
                }
            }
        }
        budget.check_memory(store.footprint())?;
        on_level(c, &store, &new);
        levels[c] = new;
        if let Some(id) = goal.and_then(|g| store.get(g)) {
            return Ok(Enumeration { store, levels, found: Some(id) });
        }
    }
    Ok(Enumeration { store, levels, found: None })
}

/// The exact-equivalence baseline over the full alphabet of the goal's canvas.
pub fn fta_basic(goal: &Scene, cfg: &SynthConfig) -> Result<SynthResult> {
    fta_basic_with(goal, cfg, &Alphabet::full(goal.canvas()))
}

pub fn fta_basic_with(goal: &Scene, cfg: &SynthConfig, alphabet: &Alphabet) -> Result<SynthResult> {
    cfg.validate()?;
    if goal.canvas() != cfg.canvas {
        return Err(Error::DimensionMismatch { left: goal.canvas(), right: cfg.canvas });
    }
    let start = Instant::now();
    let budget = Budget::new(cfg.time_budget, cfg.memory_budget);
    let mut peak = 0;
    let res = enumerate_classes(alphabet, cfg.c_max, Some(goal), &budget, |_, s, _| peak = peak.max(s.footprint()));
    let construct = start.elapsed();
    let (outcome, states) = match res {
        Ok(Enumeration { store, found: Some(id), .. }) => (Outcome::Solved(store.expr(id).canonicalize()), store.len()),
        Ok(Enumeration { store, .. }) => (Outcome::Failed(Failure::Exhausted), store.len()),
        Err(f) => (Outcome::Failed(f), 0),
    };
    if let Outcome::Solved(p) = &outcome {
        assert_eq!(crate::csg::eval(p, goal.canvas()), *goal, "unsound solution {p}");
    }
    let stats = SynthStats {
        total: start.elapsed(),
        construct,
        expansion: construct,
        states,
        peak_bytes: peak,
        seed: cfg.seed,
        ..Default::default()
    };
    Ok(SynthResult { outcome, stats })
}

/// One row of the search-space study: counts over all programs of at most
/// `n` nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSpaceRow {
    pub n: usize,
    pub total: u128,
    pub distinct: usize,
    /// Cluster count for each radius, in the order the radii were given.
    pub clusters: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSpaceTable {
    pub canvas: Canvas,
    pub epsilons: Vec<f64>,
    pub primitives: usize,
    pub repeats: usize,
    pub rows: Vec<SearchSpaceRow>,
}

impl SearchSpaceTable {
    /// How the columns were counted.
    pub const COUNTING: &'static str = "n counts every AST node; programs are canonical (union arguments \
         ordered), parameters come from the study alphabet, and every column is cumulative over sizes 1..=n";

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,total,distinct");
        for e in &self.epsilons {
            write!(out, ",clusters_eps{e}").unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{},{},{}", r.n, r.total, r.distinct).unwrap();
            for c in &r.clusters {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Number of canonical programs with exactly `n` nodes, for `n` in `0..=n_max`.
pub fn count_programs(alphabet: &Alphabet, n_max: usize) -> Vec<u128> {
    let mut t = vec![0u128; n_max + 1];
    for n in 1..=n_max {
        if n == 1 {
            t[1] = alphabet.primitives.len() as u128;
            continue;
        }
        let mut v = alphabet.repeats.len() as u128 * t[n - 1];
        for i in 1..n - 1 {
            let j = n - 1 - i;
            if alphabet.diff {
                v += t[i] * t[j];
            }
            if alphabet.union {
                v += match i.cmp(&j) {
                    std::cmp::Ordering::Less => t[i] * t[j],
                    std::cmp::Ordering::Equal => t[i] * (t[i] + 1) / 2,
                    std::cmp::Ordering::Greater => 0,
                };
            }
        }
        t[n] = v;
    }
    t
}

/// The alphabet used by the search-space study: coordinates on a grid of
/// pitch 8, which keeps sizes up to eight or nine nodes enumerable on 16x16.
pub fn study_alphabet(canvas: Canvas) -> Alphabet {
    Alphabet::lattice(canvas, 8)
}

pub fn count_search_space(canvas: Canvas, n_max: usize, epsilons: &[f64]) -> std::result::Result<SearchSpaceTable, Failure> {
    count_search_space_with(&study_alphabet(canvas), n_max, epsilons, &Budget::unlimited())
}

/// Counts programs, distinct scenes and similarity clusters for sizes up to
/// `n_max`. Clusters are formed greedily over the distinct scenes in
/// enumeration order under the plain Jaccard distance.
pub fn count_search_space_with(
    alphabet: &Alphabet,
    n_max: usize,
    epsilons: &[f64],
    budget: &Budget,
) -> std::result::Result<SearchSpaceTable, Failure> {
    let totals = count_programs(alphabet, n_max);
    let mut clusterers: Vec<Clusterer> = epsilons.iter().map(|&e| Clusterer::new(Some(e), usize::MAX)).collect();
    let mut rows = Vec::new();
    let mut timed_out = None;
    enumerate_classes(alphabet, n_max, None, budget, |n, store, new| {
        if timed_out.is_some() {
            return;
        }
        for (k, &id) in new.iter().enumerate() {
            if k % 1024 == 0 {
                if let Err(f) = budget.check_time() {
                    timed_out = Some(f);
                    return;
                }
            }
            for c in &mut clusterers {
                if let Assignment::Full = c.assign(store.scene(id)) {
                    unreachable!("unbounded clusterer");
                }
            }
        }
        rows.push(SearchSpaceRow {
            n,
            total: totals[1..=n].iter().sum(),
            distinct: store.len(),
            clusters: clusterers.iter().map(Clusterer::num_centers).collect(),
        });
    })?;
    if let Some(f) = timed_out {
        return Err(f);
    }
    Ok(SearchSpaceTable {
        canvas: alphabet.canvas,
        epsilons: epsilons.to_vec(),
        primitives: alphabet.primitives.len(),
        repeats: alphabet.repeats.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csg::eval;

    #[test]
    fn primitive_goal_solved_at_cost_one() {
        let c = Canvas::square(8);
        let p = Expr::rect(1, 2, 5, 6);
        let cfg = SynthConfig { c_max: 3, ..SynthConfig::for_canvas(c) };
        let res = fta_basic(&eval(&p, c), &cfg).unwrap();
        // A radius-3 circle rasterizes to the same square, so only the cost
        // and the render are pinned.
        let q = res.outcome.program().unwrap();
        assert_eq!(q.node_count(), 1);
        assert_eq!(eval(q, c), eval(&p, c));
    }

    #[test]
    fn store_keeps_first_producer() {
        let c = Canvas::square(4);
        let s = eval(&Expr::rect(0, 0, 1, 1), c);
        let mut st = EquivClassStore::new();
        assert_eq!(st.insert(s.clone(), Head::Rect { x1: 0, y1: 0, x2: 1, y2: 1 }, &[], 1), Some(0));
        assert_eq!(st.insert(s.clone(), Head::Union, &[0, 0], 3), None);
        assert_eq!(st.len(), 1);
        assert_eq!(st.cost(0), 1);
    }

    #[test]
    fn program_counts_by_hand() {
        let a = Alphabet { canvas: Canvas::square(4), primitives: vec![Head::Circle { x: 1, y: 1, r: 1 }; 3], repeats: vec![Head::Repeat { dx: 1, dy: 0, count: 2 }; 2], union: true, diff: true };
        // n=2: 2*3 repeats; n=3: 2*6 repeats + 3*3 diffs + 6 unions.
        assert_eq!(count_programs(&a, 3), vec![0, 3, 6, 12 + 9 + 6]);
    }

    #[test]
    fn csv_layout() {
        let t = SearchSpaceTable {
            canvas: Canvas::square(4),
            epsilons: vec![0.1, 0.2],
            primitives: 1,
            repeats: 0,
            rows: vec![SearchSpaceRow { n: 1, total: 5, distinct: 4, clusters: vec![3, 2] }],
        };
        assert_eq!(t.to_csv(), "n,total,distinct,clusters_eps0.1,clusters_eps0.2\n1,5,4,3,2\n");
    }
}
