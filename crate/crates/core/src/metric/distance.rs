//! Jaccard distance and its goal-aware variant.

use crate::csg::Scene;
use crate::error::Result;

#[inline]
fn ratio_distance(inter: u32, union: u32) -> f64 {
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

/// `1 - |q ∩ q2| / |q ∪ q2|` over filled pixels; two empty scenes are at distance 0.
pub fn jaccard(q: &Scene, q2: &Scene) -> Result<f64> {
    q.same_canvas(q2)?;
    Ok(jaccard_unchecked(q, q2))
}

/// [`jaccard`] without the dimension check.
#[inline]
pub fn jaccard_unchecked(q: &Scene, q2: &Scene) -> f64 {
    let (inter, union) = q.overlap_counts(q2);
    ratio_distance(inter, union)
}

/// Pixels of a scene that differ from a goal, together with the scene's value
/// at each of them.
///
/// Stored as two packed masks: `diff = q xor goal` and `values = q & diff`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffSet {
    diff: Scene,
    values: Scene,
}

impl DiffSet {
    /// `f_goal(q) = {(u, v, b) | q[u, v] = b, b != goal[u, v]}`.
    pub fn of(goal: &Scene, q: &Scene) -> Result<Self> {
        goal.same_canvas(q)?;
        let diff = goal.xor(q);
        let values = q.intersection(&diff);
        Ok(Self { diff, values })
    }

    /// Builds a diff set from explicit `(u, v, b)` triples.
    pub fn from_triples(canvas: crate::csg::Canvas, triples: impl IntoIterator<Item = (i32, i32, bool)>) -> Self {
        let mut diff = Scene::empty(canvas);
        let mut values = Scene::empty(canvas);
        for (u, v, b) in triples {
            diff.set(u, v, true);
            values.set(u, v, b);
        }
        Self { diff, values }
    }

    pub fn mask(&self) -> &Scene {
        &self.diff
    }

    pub fn len(&self) -> usize {
        self.diff.count() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.diff.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = (i32, i32, bool)> + '_ {
        self.diff.pixels().map(|(u, v)| (u, v, self.values.get(u, v)))
    }

    /// Jaccard distance between two diff sets taken as sets of triples.
    ///
    /// Two triples at the same pixel are equal iff their values agree.
    pub fn distance(&self, other: &DiffSet) -> Result<f64> {
        self.diff.same_canvas(&other.diff)?;
        // same pixel and same value
        let mut agree = self.values.xor(&other.values);
        agree.xor_with(&Scene::full(agree.canvas()));
        agree.intersect_with(&self.diff);
        agree.intersect_with(&other.diff);
        let inter = agree.count();
        let union = self.diff.count() + other.diff.count() - inter;
        Ok(ratio_distance(inter, union))
    }
}

/// Goal-aware distance: Jaccard distance between `f_goal(q)` and `f_goal(q2)`.
///
/// Two scenes that both differ from the goal at a pixel necessarily agree
/// there, so the triple sets reduce to the xor masks `q ^ goal`, `q2 ^ goal`.
pub fn goal_distance(goal: &Scene, q: &Scene, q2: &Scene) -> Result<f64> {
    goal.same_canvas(q)?;
    goal.same_canvas(q2)?;
    Ok(jaccard_unchecked(&goal.xor(q), &goal.xor(q2)))
}

/// Reconstructs the unique scene whose diff set against `goal` is `d`.
pub fn diff_apply(goal: &Scene, d: &DiffSet) -> Result<Scene> {
    goal.same_canvas(&d.diff)?;
    let mut q = goal.clone();
    for (u, v, b) in d.triples() {
        q.set(u, v, b);
    }
    Ok(q)
}

/// Distance used to rank candidates against the goal itself: plain Jaccard.
///
/// The goal-aware distance is 1 between the goal and every other scene, so it
/// cannot order candidates by proximity to the goal.
pub fn goal_rank(goal: &Scene, q: &Scene) -> Result<f64> {
    jaccard(goal, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csg::Canvas;

    fn set(c: Canvas, px: &[(i32, i32)]) -> Scene {
        Scene::from_pixels(c, px.iter().copied())
    }

    #[test]
    fn jaccard_examples() {
        let c = Canvas::square(4);
        let (p1, p2, p3) = ((0, 0), (1, 0), (2, 0));
        let q = set(c, &[p1, p2]);
        assert_eq!(jaccard(&q, &q).unwrap(), 0.0);
        assert_eq!(jaccard(&Scene::empty(c), &q).unwrap(), 1.0);
        assert_eq!(jaccard(&Scene::empty(c), &Scene::empty(c)).unwrap(), 0.0);
        let d = jaccard(&q, &set(c, &[p1, p3])).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn goal_distance_magnifies_near_goal() {
        let c = Canvas::square(4);
        let (p1, p2, p3) = ((0, 0), (1, 0), (2, 0));
        let o = set(c, &[p1]);
        let (q, q2) = (set(c, &[p1, p2]), set(c, &[p1, p3]));
        assert_eq!(goal_distance(&o, &q, &q2).unwrap(), 1.0);
        assert_eq!(goal_distance(&o, &q, &q).unwrap(), 0.0);
        assert_eq!(goal_distance(&o, &o, &o).unwrap(), 0.0);
    }

    #[test]
    fn goal_distance_to_goal_is_degenerate() {
        let c = Canvas::square(3);
        let o = set(c, &[(0, 0), (1, 1)]);
        for bits in 0u32..512 {
            let q = Scene::from_fn(c, |u, v| bits >> (v * 3 + u) & 1 == 1);
            let expect = if q == o { 0.0 } else { 1.0 };
            assert_eq!(goal_distance(&o, &q, &o).unwrap(), expect);
        }
    }

    #[test]
    fn brute_force_finds_third_versus_three_fifths() {
        // Search 3x3 scenes for A, B, O with jaccard(A, B) = 1/3 and
        // goal_distance(O, A, B) = 3/5.
        let c = Canvas::square(3);
        let all: Vec<Scene> = (0u32..512).map(|b| Scene::from_fn(c, |u, v| b >> (v * 3 + u) & 1 == 1)).collect();
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        let found = all.iter().find_map(|a| {
            all.iter().filter(|b| close(jaccard(a, b).unwrap(), 1.0 / 3.0)).find_map(|b| {
                all.iter().find(|o| close(goal_distance(o, a, b).unwrap(), 0.6)).map(|o| (a, b, o))
            })
        });
        let (a, b, o) = found.expect("a witness exists");
        // Recompute both values from the set definitions.
        let fa: Vec<_> = DiffSet::of(o, a).unwrap().triples().collect();
        let fb: Vec<_> = DiffSet::of(o, b).unwrap().triples().collect();
        let inter = fa.iter().filter(|t| fb.contains(t)).count() as f64;
        let union = (fa.len() + fb.len()) as f64 - inter;
        assert!(close(1.0 - inter / union, 0.6));
        assert!(close(DiffSet::of(o, a).unwrap().distance(&DiffSet::of(o, b).unwrap()).unwrap(), 0.6));
    }

    #[test]
    fn diff_apply_inverts() {
        let c = Canvas::square(3);
        let o = set(c, &[(0, 0), (2, 2)]);
        let q = set(c, &[(0, 0), (1, 2)]);
        let d = DiffSet::of(&o, &q).unwrap();
        let mut t: Vec<_> = d.triples().collect();
        t.sort();
        assert_eq!(t, vec![(1, 2, true), (2, 2, false)]);
        assert_eq!(diff_apply(&o, &d).unwrap(), q);
        assert_eq!(DiffSet::from_triples(c, t), d);
    }

    #[test]
    fn mismatched_canvases_rejected() {
        let (a, b) = (Scene::empty(Canvas::square(3)), Scene::empty(Canvas::square(4)));
        assert!(jaccard(&a, &b).is_err());
        assert!(goal_distance(&a, &a, &b).is_err());
    }
}
