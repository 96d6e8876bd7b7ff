//! Local rewrites used by repair. Every rule edits exactly one node label.

use crate::csg::{Head, ParamDomain};

/// A rewrite over single node labels. `produce` returns the replacement labels
/// for a node, or nothing when the rule does not match.
#[derive(Clone, Copy)]
pub struct RewriteRule {
    pub name: &'static str,
    pub produce: fn(Head, &ParamDomain) -> Vec<Head>,
}

impl RewriteRule {
    pub fn matches(&self, head: Head, dom: &ParamDomain) -> bool {
        !(self.produce)(head, dom).is_empty()
    }

    pub fn apply(&self, head: Head, dom: &ParamDomain) -> Vec<Head> {
        (self.produce)(head, dom)
    }
}

impl std::fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RewriteRule").field("name", &self.name).finish()
    }
}

/// Integer parameters of a label with their inclusive bounds.
fn params(head: Head, dom: &ParamDomain) -> Vec<(i32, i32, i32)> {
    let (xm, ym) = (dom.x_max(), dom.y_max());
    match head {
        Head::Circle { x, y, r } => vec![(x, 0, xm), (y, 0, ym), (r, 1, dom.r_max())],
        Head::Rect { x1, y1, x2, y2 } => vec![(x1, 0, xm), (y1, 0, ym), (x2, 0, xm), (y2, 0, ym)],
        Head::Union | Head::Diff => vec![],
        Head::Repeat { dx, dy, count } => {
            vec![(dx, -dom.dx_max(), dom.dx_max()), (dy, -dom.dy_max(), dom.dy_max()), (count, 2, dom.count_max)]
        }
    }
}

fn with_param(head: Head, i: usize, v: i32) -> Head {
    match head {
        Head::Circle { x, y, r } => {
            let mut p = [x, y, r];
            p[i] = v;
            Head::Circle { x: p[0], y: p[1], r: p[2] }
        }
        Head::Rect { x1, y1, x2, y2 } => {
            let mut p = [x1, y1, x2, y2];
            p[i] = v;
            Head::Rect { x1: p[0], y1: p[1], x2: p[2], y2: p[3] }
        }
        Head::Repeat { dx, dy, count } => {
            let mut p = [dx, dy, count];
            p[i] = v;
            Head::Repeat { dx: p[0], dy: p[1], count: p[2] }
        }
        Head::Union | Head::Diff => head,
    }
}

fn nudge(head: Head, dom: &ParamDomain, delta: i32) -> Vec<Head> {
    params(head, dom)
        .into_iter()
        .enumerate()
        .filter(|&(_, (v, lo, hi))| if delta > 0 { v < hi } else { v > lo })
        .map(|(i, (v, _, _))| with_param(head, i, v + delta))
        .collect()
}

fn increment(head: Head, dom: &ParamDomain) -> Vec<Head> {
    nudge(head, dom, 1)
}

fn decrement(head: Head, dom: &ParamDomain) -> Vec<Head> {
    nudge(head, dom, -1)
}

fn circle_to_rect(head: Head, _: &ParamDomain) -> Vec<Head> {
    match head {
        Head::Circle { x, y, r } => vec![Head::Rect { x1: x - r, y1: y - r, x2: x + r, y2: y + r }],
        _ => vec![],
    }
}

fn rect_to_circle(head: Head, _: &ParamDomain) -> Vec<Head> {
    match head {
        Head::Rect { x1, y1, x2, y2 } if x2 - x1 == y2 - y1 => {
            let r = (x2 - x1) / 2;
            vec![Head::Circle { x: x1 + r, y: y1 + r, r }]
        }
        _ => vec![],
    }
}

/// Integer increment, integer decrement, circle to bounding square and square
/// to inscribed circle.
pub fn default_rules() -> Vec<RewriteRule> {
    vec![
        RewriteRule { name: "increment", produce: increment },
        RewriteRule { name: "decrement", produce: decrement },
        RewriteRule { name: "circle-to-rect", produce: circle_to_rect },
        RewriteRule { name: "rect-to-circle", produce: rect_to_circle },
    ]
}
