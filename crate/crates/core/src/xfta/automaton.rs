use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::csg::{apply_head, Canvas, Head, Scene};
use crate::metric::{goal_distance, jaccard_unchecked};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId(pub u32);

impl StateId {
    pub const NONE: StateId = StateId(u32::MAX);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct State {
    /// Representative value of the cluster.
    pub scene: Scene,
    /// Cost level at which the state was created: the smallest node count of
    /// any accepted term reaching it.
    pub cost: u32,
    /// Plain Jaccard distance to the goal.
    pub rank: f64,
}

/// `head(args) -> out`. Unused argument slots hold [`StateId::NONE`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub head: Head,
    args: [StateId; 2],
    pub out: StateId,
}

impl Transition {
    pub fn new(head: Head, args: &[StateId], out: StateId) -> Self {
        assert_eq!(args.len(), head.arity(), "arity mismatch for {head}");
        let mut slots = [StateId::NONE; 2];
        slots[..args.len()].copy_from_slice(args);
        Self { head, args: slots, out }
    }

    pub fn args(&self) -> &[StateId] {
        &self.args[..self.head.arity()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub transition: usize,
    pub distance: f64,
}

/// Approximate finite tree automaton over scenes.
///
/// Every transition satisfies `goal_distance(eval(head(args)), out) <= epsilon`.
#[derive(Clone, Debug)]
pub struct Xfta {
    canvas: Canvas,
    goal: Scene,
    epsilon: f64,
    states: Vec<State>,
    transitions: Vec<Transition>,
    incoming: Vec<Vec<u32>>,
    finals: Vec<StateId>,
}

impl Xfta {
    pub fn new(goal: Scene, epsilon: f64) -> Self {
        Self {
            canvas: goal.canvas(),
            goal,
            epsilon,
            states: Vec::new(),
            transitions: Vec::new(),
            incoming: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn goal(&self) -> &Scene {
        &self.goal
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn add_state(&mut self, scene: Scene, cost: u32) -> StateId {
        assert_eq!(scene.canvas(), self.canvas);
        let rank = jaccard_unchecked(&self.goal, &scene);
        self.states.push(State { scene, cost, rank });
        self.incoming.push(Vec::new());
        StateId(self.states.len() as u32 - 1)
    }

    pub fn add_transition(&mut self, t: Transition) {
        assert!(t.out.index() < self.states.len(), "unknown target state {}", t.out);
        assert!(t.args().iter().all(|a| a.index() < self.states.len()), "unknown argument state");
        self.incoming[t.out.index()].push(self.transitions.len() as u32);
        self.transitions.push(t);
    }

    pub fn set_finals(&mut self, finals: Vec<StateId>) {
        assert!(finals.iter().all(|f| f.index() < self.states.len()));
        self.finals = finals;
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id.index()]
    }

    pub fn states(&self) -> impl Iterator<Item = (StateId, &State)> {
        self.states.iter().enumerate().map(|(i, s)| (StateId(i as u32), s))
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn incoming(&self, id: StateId) -> impl Iterator<Item = &Transition> {
        self.incoming[id.index()].iter().map(|&t| &self.transitions[t as usize])
    }

    pub fn finals(&self) -> &[StateId] {
        &self.finals
    }

    /// Scene produced by applying a transition's operator to its argument states.
    pub fn apply(&self, t: &Transition) -> Scene {
        let args: Vec<&Scene> = t.args().iter().map(|a| &self.states[a.index()].scene).collect();
        apply_head(self.canvas, t.head, &args)
    }

    /// Overwrites a state's representative scene. Only useful for exercising
    /// the invariant audit.
    pub fn replace_state_scene(&mut self, id: StateId, scene: Scene) {
        let rank = jaccard_unchecked(&self.goal, &scene);
        let s = &mut self.states[id.index()];
        s.scene = scene;
        s.rank = rank;
    }

    /// Every transition whose applied scene is farther than `epsilon` from
    /// its target state under the goal-aware distance.
    pub fn audit_invariants(&self, epsilon: f64) -> Vec<Violation> {
        self.transitions
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                let got = self.apply(t);
                let d = goal_distance(&self.goal, &got, &self.state(t.out).scene).expect("same canvas");
                (d > epsilon).then_some(Violation { transition: i, distance: d })
            })
            .collect()
    }

    /// Approximate memory footprint in bytes.
    pub fn footprint(&self) -> usize {
        let scene = Scene::empty(self.canvas).footprint();
        self.states.len() * (std::mem::size_of::<State>() + scene + std::mem::size_of::<Vec<u32>>())
            + self.transitions.len() * (std::mem::size_of::<Transition>() + 4)
    }

    pub fn dump(&self) -> XftaDump {
        XftaDump {
            canvas: self.canvas.to_string(),
            epsilon: self.epsilon,
            goal: self.goal.to_rle(),
            states: self
                .states()
                .map(|(id, s)| StateDump { id: id.0, cost: s.cost, rank: s.rank, scene: s.scene.to_rle() })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDump {
                    op: t.head.to_string(),
                    args: t.args().iter().map(|a| a.0).collect(),
                    out: t.out.0,
                })
                .collect(),
            finals: self.finals.iter().map(|f| f.0).collect(),
        }
    }
}

/// Ordering for final-state selection: rank, then cost, then creation order.
pub fn state_order(a: &Xfta, x: StateId, y: StateId) -> Ordering {
    let (sx, sy) = (a.state(x), a.state(y));
    sx.rank.total_cmp(&sy.rank).then(sx.cost.cmp(&sy.cost)).then(x.cmp(&y))
}

/// The `k` states of `candidates` closest to the goal, best first.
pub fn top_k(a: &Xfta, candidates: &[StateId], k: usize) -> Vec<StateId> {
    let mut v = candidates.to_vec();
    v.sort_by(|&x, &y| state_order(a, x, y));
    v.truncate(k);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct XftaDump {
    pub canvas: String,
    pub epsilon: f64,
    pub goal: String,
    pub states: Vec<StateDump>,
    pub transitions: Vec<TransitionDump>,
    pub finals: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateDump {
    pub id: u32,
    pub cost: u32,
    pub rank: f64,
    pub scene: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionDump {
    pub op: String,
    pub args: Vec<u32>,
    pub out: u32,
}
