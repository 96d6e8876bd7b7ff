use crate::csg::{Canvas, Head, ParamDomain};

/// Operator labels available to bottom-up construction. Scalar parameters are
/// part of the label, so primitives are nullary and `Repeat` is unary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub canvas: Canvas,
    pub primitives: Vec<Head>,
    pub repeats: Vec<Head>,
    pub union: bool,
    pub diff: bool,
}

impl Alphabet {
    /// Every well-formed primitive and repeat label on the canvas grid.
    pub fn full(canvas: Canvas) -> Self {
        let d = ParamDomain::new(canvas);
        let mut primitives = Vec::new();
        for r in 1..=d.r_max() {
            for y in 0..=d.y_max() {
                for x in 0..=d.x_max() {
                    primitives.push(Head::Circle { x, y, r });
                }
            }
        }
        for y1 in 0..=d.y_max() {
            for y2 in y1 + 1..=d.y_max() {
                for x1 in 0..=d.x_max() {
                    for x2 in x1 + 1..=d.x_max() {
                        primitives.push(Head::Rect { x1, y1, x2, y2 });
                    }
                }
            }
        }
        let mut repeats = Vec::new();
        for count in 2..=d.count_max {
            for dy in -d.dy_max()..=d.dy_max() {
                for dx in -d.dx_max()..=d.dx_max() {
                    repeats.push(Head::Repeat { dx, dy, count });
                }
            }
        }
        Self::filtered(canvas, primitives, repeats)
    }

    /// A coarse grid: coordinates at multiples of `step` (plus the last pixel),
    /// radii at multiples of `step / 2`, offsets in `{-step, 0, step}` and
    /// counts 2 and 3. Used where the full grid is too large to enumerate.
    pub fn lattice(canvas: Canvas, step: i32) -> Self {
        let step = step.max(1);
        let d = ParamDomain::new(canvas);
        let axis = |max: i32| {
            let mut v: Vec<i32> = (0..=max).step_by(step as usize).collect();
            if *v.last().unwrap() != max {
                v.push(max);
            }
            v
        };
        let (xs, ys) = (axis(d.x_max()), axis(d.y_max()));
        let rstep = (step / 2).max(1);
        let mut primitives = Vec::new();
        for r in (rstep..=d.r_max()).step_by(rstep as usize) {
            for &y in &ys {
                for &x in &xs {
                    primitives.push(Head::Circle { x, y, r });
                }
            }
        }
        for &y1 in &ys {
            for &y2 in &ys {
                for &x1 in &xs {
                    for &x2 in &xs {
                        primitives.push(Head::Rect { x1, y1, x2, y2 });
                    }
                }
            }
        }
        let mut repeats = Vec::new();
        for count in [2, 3] {
            for dy in [-step, 0, step] {
                for dx in [-step, 0, step] {
                    repeats.push(Head::Repeat { dx, dy, count });
                }
            }
        }
        Self::filtered(canvas, primitives, repeats)
    }

    /// Only primitives, no operators.
    pub fn primitives_only(canvas: Canvas) -> Self {
        let full = Self::full(canvas);
        Self { repeats: Vec::new(), union: false, diff: false, ..full }
    }

    fn filtered(canvas: Canvas, mut primitives: Vec<Head>, mut repeats: Vec<Head>) -> Self {
        let d = ParamDomain::new(canvas);
        primitives.retain(|&h| d.head_well_formed(h));
        repeats.retain(|&h| d.head_well_formed(h));
        Self { canvas, primitives, repeats, union: true, diff: true }
    }

    pub fn len(&self) -> usize {
        self.primitives.len() + self.repeats.len() + self.union as usize + self.diff as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_alphabet_sizes() {
        let a = Alphabet::full(Canvas::square(4));
        // circles of radius 1 centred on the inner 2x2; C(4,2)^2 rectangles
        assert_eq!(a.primitives.len(), 4 + 36);
        // 24 non-zero offsets in [-2, 2]^2, counts 2..=8
        assert_eq!(a.repeats.len(), 24 * 7);
        let a16 = Alphabet::full(Canvas::square(16));
        assert_eq!(a16.primitives.len(), 560 + 120 * 120);
    }

    #[test]
    fn lattice_is_well_formed_subset() {
        let c = Canvas::square(16);
        let lat = Alphabet::lattice(c, 4);
        let full = Alphabet::full(c);
        assert!(lat.primitives.iter().all(|p| full.primitives.contains(p)));
        assert_eq!(lat.repeats.len(), 16);
        assert!(lat.primitives.len() < 200);
    }
}
