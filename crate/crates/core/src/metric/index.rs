//! Range-query indexes over a metric space.
//!
//! [`MTree`] is a balanced metric tree: every routing entry stores a covering
//! radius and its distance to the parent router, so whole subtrees can be
//! skipped with the triangle inequality. [`LinearIndex`] scans everything and
//! serves as the reference in tests.

use crate::csg::Scene;

use super::distance::jaccard_unchecked;

pub trait Metric<T> {
    fn distance(&self, a: &T, b: &T) -> f64;
}

/// Jaccard distance on filled-pixel sets.
///
/// Indexing `q ^ goal` instead of `q` turns this into the goal-aware distance.
#[derive(Clone, Copy, Debug, Default)]
pub struct Jaccard;

impl Metric<Scene> for Jaccard {
    #[inline]
    fn distance(&self, a: &Scene, b: &Scene) -> f64 {
        jaccard_unchecked(a, b)
    }
}

/// A set of points supporting `insert` and closed-ball range queries.
pub trait MetricIndex<T> {
    /// Inserts `item` and returns its id; ids are assigned 0, 1, 2, ...
    fn insert(&mut self, item: T) -> usize;

    /// Ids of every inserted item within `radius` of `query` (inclusive),
    /// in increasing id order.
    fn range_query(&self, query: &T, radius: f64) -> Vec<usize>;

    fn get(&self, id: usize) -> &T;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct LinearIndex<T, M> {
    items: Vec<T>,
    metric: M,
}

impl<T, M: Metric<T>> LinearIndex<T, M> {
    pub fn new(metric: M) -> Self {
        Self { items: Vec::new(), metric }
    }
}

impl<T, M: Metric<T>> MetricIndex<T> for LinearIndex<T, M> {
    fn insert(&mut self, item: T) -> usize {
        self.items.push(item);
        self.items.len() - 1
    }

    fn range_query(&self, query: &T, radius: f64) -> Vec<usize> {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, it)| self.metric.distance(query, it) <= radius)
            .map(|(i, _)| i)
            .collect()
    }

    fn get(&self, id: usize) -> &T {
        &self.items[id]
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

// Pruning tests are loosened by this much so rounding can never drop a point
// that the exact `<= radius` test would accept.
const SLACK: f64 = 1e-9;

#[derive(Debug)]
struct Entry {
    item: usize,
    parent_dist: f64,
    radius: f64,
    child: Option<Box<Node>>,
}

#[derive(Debug)]
struct Node {
    leaf: bool,
    entries: Vec<Entry>,
}

#[derive(Debug)]
pub struct MTree<T, M> {
    items: Vec<T>,
    metric: M,
    root: Node,
    capacity: usize,
}

impl<T, M: Metric<T>> MTree<T, M> {
    pub fn new(metric: M) -> Self {
        Self::with_capacity(metric, 16)
    }

    /// `capacity` is the maximum number of entries per node (at least 2).
    pub fn with_capacity(metric: M, capacity: usize) -> Self {
        Self {
            items: Vec::new(),
            metric,
            root: Node { leaf: true, entries: Vec::new() },
            capacity: capacity.max(2),
        }
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        self.metric.distance(&self.items[a], &self.items[b])
    }

    fn insert_into(&self, node: &mut Node, parent: Option<usize>, item: usize, parent_dist: f64) -> Option<[Entry; 2]> {
        if node.leaf {
            node.entries.push(Entry { item, parent_dist, radius: 0.0, child: None });
        } else {
            let dists: Vec<f64> = node.entries.iter().map(|e| self.dist(item, e.item)).collect();
            // Prefer a subtree that already covers the item, else the one
            // needing the least radius growth.
            let pick = (0..dists.len())
                .filter(|&i| dists[i] <= node.entries[i].radius)
                .min_by(|&a, &b| dists[a].total_cmp(&dists[b]))
                .unwrap_or_else(|| {
                    (0..dists.len())
                        .min_by(|&a, &b| {
                            let ga = dists[a] - node.entries[a].radius;
                            let gb = dists[b] - node.entries[b].radius;
                            ga.total_cmp(&gb)
                        })
                        .expect("internal node has entries")
                });
            let d = dists[pick];
            let entry = &mut node.entries[pick];
            entry.radius = entry.radius.max(d);
            let router = entry.item;
            let child = entry.child.as_mut().expect("routing entry has a child");
            if let Some(split) = self.insert_into(child, Some(router), item, d) {
                node.entries.swap_remove(pick);
                for mut e in split {
                    e.parent_dist = parent.map_or(0.0, |p| self.dist(e.item, p));
                    node.entries.push(e);
                }
            }
        }
        if node.entries.len() > self.capacity {
            Some(self.split(node))
        } else {
            None
        }
    }

    /// Promotes the two farthest-apart entries and partitions the rest by
    /// the closer promoted router.
    fn split(&self, node: &mut Node) -> [Entry; 2] {
        let entries = std::mem::take(&mut node.entries);
        let n = entries.len();
        let (mut a, mut b, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.dist(entries[i].item, entries[j].item);
                if d > best {
                    (a, b, best) = (i, j, d);
                }
            }
        }
        let (ra, rb) = (entries[a].item, entries[b].item);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, mut e) in entries.into_iter().enumerate() {
            let da = self.dist(e.item, ra);
            let db = self.dist(e.item, rb);
            let to_left = if i == a {
                true
            } else if i == b {
                false
            } else {
                da < db || (da == db && left.len() <= right.len())
            };
            e.parent_dist = if to_left { da } else { db };
            if to_left {
                left.push(e);
            } else {
                right.push(e);
            }
        }
        let leaf = node.leaf;
        let make = |router: usize, entries: Vec<Entry>| {
            let radius = entries.iter().map(|e| e.parent_dist + e.radius).fold(0.0, f64::max);
            Entry { item: router, parent_dist: 0.0, radius, child: Some(Box::new(Node { leaf, entries })) }
        };
        [make(ra, left), make(rb, right)]
    }

    fn query_node(&self, node: &Node, query: &T, query_parent: Option<f64>, radius: f64, out: &mut Vec<usize>) {
        for e in &node.entries {
            if let Some(dp) = query_parent {
                if (dp - e.parent_dist).abs() > radius + e.radius + SLACK {
                    continue;
                }
            }
            let d = self.metric.distance(query, &self.items[e.item]);
            match &e.child {
                None => {
                    if d <= radius {
                        out.push(e.item);
                    }
                }
                Some(child) => {
                    if d <= radius + e.radius + SLACK {
                        self.query_node(child, query, Some(d), radius, out);
                    }
                }
            }
        }
    }

    /// Number of levels, for diagnostics.
    pub fn height(&self) -> usize {
        let mut h = 1;
        let mut node = &self.root;
        while !node.leaf {
            node = node.entries[0].child.as_ref().unwrap();
            h += 1;
        }
        h
    }
}

impl<T, M: Metric<T>> MetricIndex<T> for MTree<T, M> {
    fn insert(&mut self, item: T) -> usize {
        self.items.push(item);
        let id = self.items.len() - 1;
        let mut root = std::mem::replace(&mut self.root, Node { leaf: true, entries: Vec::new() });
        if let Some(split) = self.insert_into(&mut root, None, id, 0.0) {
            root = Node { leaf: false, entries: split.into() };
        }
        self.root = root;
        id
    }

    fn range_query(&self, query: &T, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.query_node(&self.root, query, None, radius, &mut out);
        out.sort_unstable();
        out
    }

    fn get(&self, id: usize) -> &T {
        &self.items[id]
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}
