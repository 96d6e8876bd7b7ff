//! Distance-guided tabu search over single-label rewrites.

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::budget::{Budget, Failure};
use crate::csg::{apply_head, Canvas, Expr, Head, ParamDomain, Scene};
use crate::metric::jaccard_unchecked;

use super::rewrite::RewriteRule;

/// Fixed-capacity set that forgets its oldest member first.
#[derive(Clone, Debug)]
pub struct TabuList<T> {
    order: VecDeque<T>,
    members: HashSet<T>,
    capacity: usize,
}

impl<T: Clone + Eq + Hash> TabuList<T> {
    pub fn new(capacity: usize) -> Self {
        Self { order: VecDeque::new(), members: HashSet::new(), capacity: capacity.max(1) }
    }

    pub fn contains(&self, x: &T) -> bool {
        self.members.contains(x)
    }

    pub fn insert(&mut self, x: T) {
        if !self.members.insert(x.clone()) {
            return;
        }
        self.order.push_back(x);
        if self.order.len() > self.capacity {
            let old = self.order.pop_front().unwrap();
            self.members.remove(&old);
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// How repair chooses the next program among the neighbors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RepairPolicy {
    /// Keep each generated rewrite with probability `rate` (at least one
    /// survives) and move to the surviving neighbor closest to the goal.
    Greedy { rate: f64 },
    /// Move to a uniformly random neighbor.
    Random,
}

#[derive(Clone, Copy, Debug)]
pub struct RepairParams {
    pub steps: usize,
    pub tabu_capacity: usize,
    pub policy: RepairPolicy,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepairOutcome {
    Solved { program: Expr, steps: usize },
    /// Step bound reached or no admissible neighbor left.
    Failed { steps: usize, best: f64 },
}

/// A one-label edit of a program and the resulting distance to the goal.
#[derive(Clone, Copy, Debug)]
pub struct Neighbor {
    pub node: usize,
    pub head: Head,
    pub distance: f64,
}

/// Pre-order node table of a program with the scene of every subterm.
struct Nodes {
    heads: Vec<Head>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    scenes: Vec<Scene>,
}

impl Nodes {
    fn of(e: &Expr, canvas: Canvas) -> Self {
        let mut n = Nodes { heads: Vec::new(), parent: Vec::new(), children: Vec::new(), scenes: Vec::new() };
        n.visit(e, usize::MAX, canvas);
        n
    }

    fn visit(&mut self, e: &Expr, parent: usize, canvas: Canvas) -> usize {
        let id = self.heads.len();
        self.heads.push(e.head());
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.scenes.push(Scene::empty(canvas));
        let kids: Vec<usize> = e.children().into_iter().map(|c| self.visit(c, id, canvas)).collect();
        let refs: Vec<&Scene> = kids.iter().map(|&k| &self.scenes[k]).collect();
        self.scenes[id] = apply_head(canvas, e.head(), &refs);
        self.children[id] = kids;
        id
    }

    /// Scene of the whole program after relabelling `node` with `head`,
    /// recomputing only the path to the root.
    fn render_with(&self, canvas: Canvas, node: usize, head: Head) -> Scene {
        let apply = |i: usize, h: Head, replaced: Option<(usize, &Scene)>| {
            let refs: Vec<&Scene> = self.children[i]
                .iter()
                .map(|&k| match replaced {
                    Some((r, s)) if r == k => s,
                    _ => &self.scenes[k],
                })
                .collect();
            apply_head(canvas, h, &refs)
        };
        let mut cur = node;
        let mut s = apply(node, head, None);
        while self.parent[cur] != usize::MAX {
            let p = self.parent[cur];
            s = apply(p, self.heads[p], Some((cur, &s)));
            cur = p;
        }
        s
    }
}

/// All well-formed single-rewrite neighbors of `p` with their distances to
/// `goal`, in generation order (node, then rule, then production).
pub fn neighbors(p: &Expr, goal: &Scene, rules: &[RewriteRule]) -> Vec<Neighbor> {
    let canvas = goal.canvas();
    let dom = ParamDomain::new(canvas);
    let nodes = Nodes::of(p, canvas);
    let mut out = Vec::new();
    for (i, &h) in nodes.heads.iter().enumerate() {
        for rule in rules {
            for nh in rule.apply(h, &dom) {
                if nh == h || !dom.head_well_formed(nh) {
                    continue;
                }
                let s = nodes.render_with(canvas, i, nh);
                out.push(Neighbor { node: i, head: nh, distance: jaccard_unchecked(goal, &s) });
            }
        }
    }
    out
}

/// Tabu search from `candidate` towards a program rendering exactly `goal`.
///
/// Each step moves to the closest non-tabu neighbor, even uphill. The visited
/// programs, including the start, enter a bounded tabu list. `steps` counts
/// moves taken.
pub fn repair<R: Rng>(
    candidate: &Expr,
    goal: &Scene,
    rules: &[RewriteRule],
    params: &RepairParams,
    budget: &Budget,
    rng: &mut R,
) -> Result<RepairOutcome, Failure> {
    let canvas = goal.canvas();
    let mut p = candidate.clone();
    let start = crate::csg::eval(&p, canvas);
    let mut best = jaccard_unchecked(goal, &start);
    if start == *goal {
        return Ok(RepairOutcome::Solved { program: p, steps: 0 });
    }
    let mut tabu = TabuList::new(params.tabu_capacity);
    tabu.insert(p.clone());
    for step in 1..=params.steps {
        if step % 16 == 0 {
            budget.check_time()?;
        }
        let mut ns = neighbors(&p, goal, rules);
        match params.policy {
            RepairPolicy::Greedy { rate } => {
                if rate < 1.0 && !ns.is_empty() {
                    let keep: Vec<bool> = ns.iter().map(|_| rng.gen_bool(rate)).collect();
                    let forced = rng.gen_range(0..ns.len());
                    let mut i = 0;
                    ns.retain(|_| {
                        let k = keep[i] || i == forced;
                        i += 1;
                        k
                    });
                }
                ns.sort_by(|a, b| a.distance.total_cmp(&b.distance));
            }
            RepairPolicy::Random => ns.shuffle(rng),
        }
        let next = ns.iter().find_map(|n| {
            let q = p.with_head_at(n.node, n.head).expect("neighbor matches node arity");
            (!tabu.contains(&q)).then_some((q, n.distance))
        });
        let Some((q, d)) = next else {
            return Ok(RepairOutcome::Failed { steps: step - 1, best });
        };
        best = best.min(d);
        if d == 0.0 && crate::csg::eval(&q, canvas) == *goal {
            return Ok(RepairOutcome::Solved { program: q, steps: step });
        }
        tabu.insert(q.clone());
        p = q;
    }
    Ok(RepairOutcome::Failed { steps: params.steps, best })
}
