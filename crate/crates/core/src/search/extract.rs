//! Greedy top-down extraction of programs accepted by an automaton.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use crate::csg::{apply_head, Expr, Head, Scene};
use crate::metric::jaccard_unchecked;
use crate::xfta::{StateId, Transition, Xfta};

/// How extraction chooses among the incoming transitions of a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtractPolicy {
    /// Consider a random `rate` fraction (at least one) of the incoming
    /// transitions and take the one whose output, placed into the partially
    /// extracted program around it, lands closest to the goal.
    Greedy { rate: f64 },
    /// Uniformly random incoming transition.
    Random,
}

/// An operator applied to fixed sibling values with a hole at `pos`.
struct Frame {
    head: Head,
    args: Vec<Scene>,
    pos: usize,
}

struct Extractor<'a, R> {
    a: &'a Xfta,
    goal: &'a Scene,
    policy: ExtractPolicy,
    rng: &'a mut R,
    frames: Vec<Frame>,
}

impl<R: Rng> Extractor<'_, R> {
    /// Scene of the whole program when the current hole holds `s`.
    fn lift(&self, s: Scene) -> Scene {
        let canvas = self.a.canvas();
        self.frames.iter().rev().fold(s, |s, f| {
            let args: Vec<&Scene> = f.args.iter().enumerate().map(|(i, a)| if i == f.pos { &s } else { a }).collect();
            apply_head(canvas, f.head, &args)
        })
    }

    fn choose(&mut self, q: StateId) -> Transition {
        let incoming: Vec<&Transition> = self.a.incoming(q).collect();
        assert!(!incoming.is_empty(), "state {q} has no incoming transition");
        match self.policy {
            ExtractPolicy::Random => **incoming.choose(self.rng).unwrap(),
            ExtractPolicy::Greedy { rate } => {
                let n = ((incoming.len() as f64 * rate).ceil() as usize).clamp(1, incoming.len());
                let mut picked: Vec<usize> = if n == incoming.len() {
                    (0..n).collect()
                } else {
                    (0..incoming.len()).choose_multiple(self.rng, n)
                };
                picked.sort_unstable();
                let mut best: Option<(f64, usize)> = None;
                for i in picked {
                    let d = jaccard_unchecked(self.goal, &self.lift(self.a.apply(incoming[i])));
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, i));
                    }
                }
                *incoming[best.unwrap().1]
            }
        }
    }

    fn term(&mut self, q: StateId) -> (Expr, Scene) {
        let t = self.choose(q);
        let mut args: Vec<Scene> = t.args().iter().map(|&s| self.a.state(s).scene.clone()).collect();
        let mut children = Vec::with_capacity(args.len());
        for (i, &s) in t.args().iter().enumerate() {
            self.frames.push(Frame { head: t.head, args: args.clone(), pos: i });
            let (p, v) = self.term(s);
            self.frames.pop();
            args[i] = v;
            children.push(p);
        }
        let refs: Vec<&Scene> = args.iter().collect();
        let scene = apply_head(self.a.canvas(), t.head, &refs);
        (t.head.build(children), scene)
    }
}

/// Extracts one program accepted at `root`, returning it with its scene.
///
/// Arguments are extracted left to right; when choosing a transition for an
/// argument, earlier siblings contribute their extracted values and later
/// siblings their state representatives. Terminates because every transition
/// reads states of strictly smaller cost than the state it enters.
pub fn extract_term<R: Rng>(a: &Xfta, root: StateId, goal: &Scene, policy: ExtractPolicy, rng: &mut R) -> (Expr, Scene) {
    let mut x = Extractor { a, goal, policy, rng, frames: Vec::new() };
    x.term(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csg::{eval, Canvas};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn greedy_picks_closest_root_transition() {
        let c = Canvas::square(8);
        let goal = eval(&Expr::rect(0, 0, 4, 4), c);
        let mut a = Xfta::new(goal.clone(), 1.0);
        let near = Head::Rect { x1: 0, y1: 0, x2: 4, y2: 3 };
        let far = Head::Rect { x1: 0, y1: 0, x2: 2, y2: 2 };
        let q = a.add_state(goal.clone(), 1);
        a.add_transition(Transition::new(far, &[], q));
        a.add_transition(Transition::new(near, &[], q));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (p, s) = extract_term(&a, q, &goal, ExtractPolicy::Greedy { rate: 1.0 }, &mut rng);
        assert_eq!(p, near.leaf());
        assert_eq!(s, eval(&p, c));
    }

    #[test]
    fn nested_extraction_renders_its_scene() {
        let c = Canvas::square(8);
        let goal = eval(&Expr::union(Expr::rect(0, 0, 2, 2), Expr::rect(4, 4, 6, 6)), c);
        let mut a = Xfta::new(goal.clone(), 1.0);
        let l = a.add_state(eval(&Expr::rect(0, 0, 2, 2), c), 1);
        let r = a.add_state(eval(&Expr::rect(4, 4, 6, 6), c), 1);
        a.add_transition(Transition::new(Head::Rect { x1: 0, y1: 0, x2: 2, y2: 2 }, &[], l));
        a.add_transition(Transition::new(Head::Rect { x1: 0, y1: 0, x2: 1, y2: 1 }, &[], l));
        a.add_transition(Transition::new(Head::Rect { x1: 4, y1: 4, x2: 6, y2: 6 }, &[], r));
        let u = a.add_state(goal.clone(), 3);
        a.add_transition(Transition::new(Head::Union, &[l, r], u));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (p, s) = extract_term(&a, u, &goal, ExtractPolicy::Greedy { rate: 1.0 }, &mut rng);
        assert_eq!(s, goal);
        assert_eq!(eval(&p, c), goal);
    }
}
