//! Concrete semantics of CSG programs.

use std::collections::HashMap;

use super::expr::{Expr, Head};
use super::scene::{Canvas, Scene};

/// Pixels strictly inside the circle: `(x-u)^2 + (y-v)^2 < r^2`.
pub fn render_circle(canvas: Canvas, x: i32, y: i32, r: i32) -> Scene {
    let mut s = Scene::empty(canvas);
    if r <= 0 {
        return s;
    }
    let r2 = r * r;
    for v in (y - r + 1).max(0)..=(y + r - 1).min(canvas.height as i32 - 1) {
        let dy = y - v;
        // widest |dx| with dx^2 < r2 - dy^2
        let rem = r2 - dy * dy;
        let mut half = (rem as f64).sqrt() as i32;
        while half * half >= rem && half > 0 {
            half -= 1;
        }
        while (half + 1) * (half + 1) < rem {
            half += 1;
        }
        if half * half < rem {
            s.fill_box(x - half, v, x + half, v);
        }
    }
    s
}

/// Inclusive on both corners.
pub fn render_rect(canvas: Canvas, x1: i32, y1: i32, x2: i32, y2: i32) -> Scene {
    let mut s = Scene::empty(canvas);
    s.fill_box(x1, y1, x2, y2);
    s
}

/// Union of `count` copies of `body`, copy `i` translated by `i * (dx, dy)`.
pub fn apply_repeat(body: &Scene, dx: i32, dy: i32, count: i32) -> Scene {
    let mut out = body.clone();
    let (w, h) = (body.width() as i32, body.height() as i32);
    for i in 1..count {
        let (tx, ty) = (i * dx, i * dy);
        if tx.abs() >= w || ty.abs() >= h {
            break;
        }
        out.or_translated(body, tx, ty);
    }
    out
}

/// Applies one operator to already-evaluated argument scenes.
///
/// Panics if the number of arguments does not match the head's arity.
pub fn apply_head(canvas: Canvas, head: Head, args: &[&Scene]) -> Scene {
    assert_eq!(args.len(), head.arity(), "arity mismatch for {head}");
    match head {
        Head::Circle { x, y, r } => render_circle(canvas, x, y, r),
        Head::Rect { x1, y1, x2, y2 } => render_rect(canvas, x1, y1, x2, y2),
        Head::Union => args[0].union(args[1]),
        Head::Diff => args[0].difference(args[1]),
        Head::Repeat { dx, dy, count } => apply_repeat(args[0], dx, dy, count),
    }
}

/// Evaluates `e` on `canvas` without caching.
pub fn eval(e: &Expr, canvas: Canvas) -> Scene {
    let children: Vec<Scene> = e.children().into_iter().map(|c| eval(c, canvas)).collect();
    let refs: Vec<&Scene> = children.iter().collect();
    apply_head(canvas, e.head(), &refs)
}

/// Evaluator with an optional memo table keyed by program structure.
///
/// The table belongs to one evaluator; share results across threads by giving
/// each thread its own evaluator.
#[derive(Debug)]
pub struct Evaluator {
    canvas: Canvas,
    memo: Option<HashMap<Expr, Scene>>,
    capacity: usize,
    hits: u64,
    misses: u64,
}

impl Evaluator {
    pub fn new(canvas: Canvas) -> Self {
        Self { canvas, memo: Some(HashMap::new()), capacity: 1 << 18, hits: 0, misses: 0 }
    }

    pub fn without_memo(canvas: Canvas) -> Self {
        Self { memo: None, ..Self::new(canvas) }
    }

    /// Bounds the memo table; it is flushed when the bound is reached.
    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity.max(1);
        self
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn stats(&self) -> (u64, u64) {
        (self.hits, self.misses)
    }

    pub fn eval(&mut self, e: &Expr) -> Scene {
        if let Some(memo) = &self.memo {
            if let Some(s) = memo.get(e) {
                self.hits += 1;
                return s.clone();
            }
        }
        self.misses += 1;
        let children: Vec<Scene> = e.children().into_iter().map(|c| self.eval(c)).collect();
        let refs: Vec<&Scene> = children.iter().collect();
        let out = apply_head(self.canvas, e.head(), &refs);
        if let Some(memo) = &mut self.memo {
            if memo.len() >= self.capacity {
                memo.clear();
            }
            memo.insert(e.clone(), out.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_matches_predicate() {
        let c = Canvas::square(4);
        let got = render_circle(c, 2, 2, 1);
        let mut expected = Vec::new();
        for v in 0..4 {
            for u in 0..4 {
                if (((2 - u) * (2 - u) + (2 - v) * (2 - v)) as f64).sqrt() < 1.0 {
                    expected.push((u, v));
                }
            }
        }
        assert_eq!(expected, vec![(2, 2)]);
        assert_eq!(got, Scene::from_pixels(c, expected));
    }

    #[test]
    fn circle_all_radii_match_sqrt_predicate() {
        let c = Canvas::new(21, 17).unwrap();
        for r in 1..9 {
            for (x, y) in [(10, 8), (0, 0), (20, 3), (5, 16)] {
                let want = Scene::from_fn(c, |u, v| {
                    (((x - u) as f64).powi(2) + ((y - v) as f64).powi(2)).sqrt() < r as f64
                });
                assert_eq!(render_circle(c, x, y, r), want, "circle {x} {y} {r}");
            }
        }
    }

    #[test]
    fn rect_is_inclusive() {
        let s = render_rect(Canvas::square(8), 1, 2, 3, 5);
        assert_eq!(s.count(), 3 * 4);
        assert!(s.get(3, 5) && s.get(1, 2) && !s.get(4, 5));
    }

    #[test]
    fn repeat_two_copies_is_union_of_shifted_circle() {
        let c = Canvas::square(16);
        let e = Expr::repeat(Expr::circle(4, 4, 3), 5, 2, 2);
        let u = Expr::union(Expr::circle(4, 4, 3), Expr::circle(9, 6, 3));
        assert_eq!(eval(&e, c), eval(&u, c));
    }

    #[test]
    fn diff_self_is_empty() {
        let c = Canvas::square(16);
        let a = Expr::union(Expr::circle(4, 4, 3), Expr::rect(2, 3, 9, 12));
        assert!(eval(&Expr::diff(a.clone(), a), c).is_empty());
    }

    #[test]
    fn memo_is_transparent() {
        let c = Canvas::square(16);
        let e = Expr::union(
            Expr::repeat(Expr::circle(4, 4, 3), 3, 1, 3),
            Expr::diff(Expr::rect(0, 0, 10, 10), Expr::circle(4, 4, 3)),
        );
        let mut memo = Evaluator::new(c);
        let mut plain = Evaluator::without_memo(c);
        assert_eq!(memo.eval(&e), plain.eval(&e));
        assert_eq!(memo.eval(&e), eval(&e, c));
        assert!(memo.stats().0 >= 1);
    }
}
