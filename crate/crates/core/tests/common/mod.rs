//! Reference implementations used as oracles by the integration tests. They
//! follow the per-pixel definitions directly and share no code with the
//! library beyond the syntax tree.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use symetric::csg::{Canvas, Expr, Scene};

/// Whether pixel `(u, v)` is filled by `e`; pixels off the canvas never are.
pub fn inside(e: &Expr, c: Canvas, u: i32, v: i32) -> bool {
    if u < 0 || v < 0 || u >= c.width as i32 || v >= c.height as i32 {
        return false;
    }
    match e {
        Expr::Circle { x, y, r } => (u - x) * (u - x) + (v - y) * (v - y) < r * r,
        Expr::Rect { x1, y1, x2, y2 } => *x1 <= u && u <= *x2 && *y1 <= v && v <= *y2,
        Expr::Union(a, b) => inside(a, c, u, v) || inside(b, c, u, v),
        Expr::Diff(a, b) => inside(a, c, u, v) && !inside(b, c, u, v),
        Expr::Repeat { body, dx, dy, count } => (0..*count).any(|i| inside(body, c, u - i * dx, v - i * dy)),
    }
}

pub fn naive_eval(e: &Expr, c: Canvas) -> Scene {
    Scene::from_fn(c, |u, v| inside(e, c, u, v))
}

fn primitive<R: Rng>(rng: &mut R, c: Canvas) -> Expr {
    let (w, h) = (c.width as i32, c.height as i32);
    loop {
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(1..=w.min(h) / 2);
            let (x, y) = (rng.gen_range(0..w), rng.gen_range(0..h));
            if x - r >= 0 && x + r < w && y - r >= 0 && y + r < h {
                return Expr::circle(x, y, r);
            }
        } else {
            let (x1, x2) = (rng.gen_range(0..w), rng.gen_range(0..w));
            let (y1, y2) = (rng.gen_range(0..h), rng.gen_range(0..h));
            if x1 < x2 && y1 < y2 {
                return Expr::rect(x1, y1, x2, y2);
            }
        }
    }
}

/// A random well-formed program of at most `max_nodes` nodes.
pub fn random_program<R: Rng>(rng: &mut R, c: Canvas, max_nodes: usize) -> Expr {
    if max_nodes <= 1 || rng.gen_bool(0.3) {
        return primitive(rng, c);
    }
    let (w, h) = (c.width as i32, c.height as i32);
    match rng.gen_range(0..3) {
        0 => loop {
            let (dx, dy) = (rng.gen_range(-w / 2..=w / 2), rng.gen_range(-h / 2..=h / 2));
            if (dx, dy) != (0, 0) {
                let count = rng.gen_range(2..=8);
                return Expr::repeat(random_program(rng, c, max_nodes - 1), dx, dy, count);
            }
        },
        k if max_nodes >= 3 => {
            let left = rng.gen_range(1..=max_nodes - 2);
            let a = random_program(rng, c, left);
            let b = random_program(rng, c, max_nodes - 1 - left);
            if k == 1 {
                Expr::union(a, b)
            } else {
                Expr::diff(a, b)
            }
        }
        _ => primitive(rng, c),
    }
}

/// Scenes on a 4x4 canvas as 16-bit masks, bit `v * 4 + u`.
pub type Mask = u16;

fn bit(u: i32, v: i32) -> Mask {
    1 << (v * 4 + u)
}

fn mask_of(f: impl Fn(i32, i32) -> bool) -> Mask {
    let mut m = 0;
    for v in 0..4 {
        for u in 0..4 {
            if f(u, v) {
                m |= bit(u, v);
            }
        }
    }
    m
}

fn mask_get(m: Mask, u: i32, v: i32) -> bool {
    (0..4).contains(&u) && (0..4).contains(&v) && m & bit(u, v) != 0
}

pub fn mask_to_scene(m: Mask) -> Scene {
    Scene::from_fn(Canvas::square(4), |u, v| mask_get(m, u, v))
}

/// Distinct scenes of all well-formed programs of at most `n_max` nodes on
/// a 4x4 canvas, by exhaustive recursion over program sizes.
pub fn brute_force_scenes_4x4(n_max: usize) -> HashSet<Mask> {
    let mut prims = Vec::new();
    for r in 1..=2 {
        for y in 0..4 {
            for x in 0..4 {
                if x - r >= 0 && x + r < 4 && y - r >= 0 && y + r < 4 {
                    prims.push(mask_of(|u, v| (u - x) * (u - x) + (v - y) * (v - y) < r * r));
                }
            }
        }
    }
    for x1 in 0..4 {
        for x2 in x1 + 1..4 {
            for y1 in 0..4 {
                for y2 in y1 + 1..4 {
                    prims.push(mask_of(|u, v| x1 <= u && u <= x2 && y1 <= v && v <= y2));
                }
            }
        }
    }
    let mut repeats = Vec::new();
    for dx in -2..=2 {
        for dy in -2..=2 {
            if (dx, dy) != (0, 0) {
                for count in 2..=8 {
                    repeats.push((dx, dy, count));
                }
            }
        }
    }
    // exact[n] = scenes of programs with exactly n nodes
    let mut exact: Vec<HashSet<Mask>> = vec![HashSet::new(); n_max + 1];
    if n_max >= 1 {
        exact[1] = prims.into_iter().collect();
    }
    for n in 2..=n_max {
        let mut s = HashSet::new();
        for &m in &exact[n - 1] {
            for &(dx, dy, count) in &repeats {
                s.insert(mask_of(|u, v| (0..count).any(|i| mask_get(m, u - i * dx, v - i * dy))));
            }
        }
        for i in 1..n - 1 {
            for &a in &exact[i] {
                for &b in &exact[n - 1 - i] {
                    s.insert(a | b);
                    s.insert(a & !b);
                }
            }
        }
        exact[n] = s;
    }
    exact.into_iter().flatten().collect()
}

pub fn scene_to_mask(s: &Scene) -> Mask {
    mask_of(|u, v| s.get(u, v))
}
