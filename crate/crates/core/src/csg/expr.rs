//! CSG program syntax.

use std::cmp::Ordering;
use std::fmt;

use super::scene::Canvas;

/// Largest repetition count accepted by [`ParamDomain`].
pub const COUNT_MAX: i32 = 8;

/// A CSG program. All parameters live on the integer pixel grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Circle { x: i32, y: i32, r: i32 },
    Rect { x1: i32, y1: i32, x2: i32, y2: i32 },
    Union(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    /// `count` copies of `body`, copy `i` shifted by `i * (dx, dy)`.
    Repeat { body: Box<Expr>, dx: i32, dy: i32, count: i32 },
}

/// The label of a single AST node with its scalar parameters but without its
/// children. Rewrites and automaton transitions both work at this level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Circle { x: i32, y: i32, r: i32 },
    Rect { x1: i32, y1: i32, x2: i32, y2: i32 },
    Union,
    Diff,
    Repeat { dx: i32, dy: i32, count: i32 },
}

impl Head {
    pub fn arity(self) -> usize {
        match self {
            Head::Circle { .. } | Head::Rect { .. } => 0,
            Head::Repeat { .. } => 1,
            Head::Union | Head::Diff => 2,
        }
    }

    pub fn is_primitive(self) -> bool {
        self.arity() == 0
    }

    /// Builds the node; panics if `children.len()` does not match the arity.
    pub fn build(self, children: Vec<Expr>) -> Expr {
        assert_eq!(children.len(), self.arity(), "arity mismatch for {self:?}");
        let mut it = children.into_iter().map(Box::new);
        match self {
            Head::Circle { x, y, r } => Expr::Circle { x, y, r },
            Head::Rect { x1, y1, x2, y2 } => Expr::Rect { x1, y1, x2, y2 },
            Head::Union => Expr::Union(it.next().unwrap(), it.next().unwrap()),
            Head::Diff => Expr::Diff(it.next().unwrap(), it.next().unwrap()),
            Head::Repeat { dx, dy, count } => Expr::Repeat { body: it.next().unwrap(), dx, dy, count },
        }
    }

    pub fn leaf(self) -> Expr {
        self.build(Vec::new())
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Head::Circle { x, y, r } => write!(f, "circle[{x},{y},{r}]"),
            Head::Rect { x1, y1, x2, y2 } => write!(f, "rect[{x1},{y1},{x2},{y2}]"),
            Head::Union => f.write_str("union"),
            Head::Diff => f.write_str("diff"),
            Head::Repeat { dx, dy, count } => write!(f, "repeat[{dx},{dy},{count}]"),
        }
    }
}

impl Expr {
    pub fn circle(x: i32, y: i32, r: i32) -> Self {
        Expr::Circle { x, y, r }
    }

    pub fn rect(x1: i32, y1: i32, x2: i32, y2: i32) -> Self {
        Expr::Rect { x1, y1, x2, y2 }
    }

    pub fn union(a: Expr, b: Expr) -> Self {
        Expr::Union(Box::new(a), Box::new(b))
    }

    pub fn diff(a: Expr, b: Expr) -> Self {
        Expr::Diff(Box::new(a), Box::new(b))
    }

    pub fn repeat(body: Expr, dx: i32, dy: i32, count: i32) -> Self {
        Expr::Repeat { body: Box::new(body), dx, dy, count }
    }

    pub fn head(&self) -> Head {
        match *self {
            Expr::Circle { x, y, r } => Head::Circle { x, y, r },
            Expr::Rect { x1, y1, x2, y2 } => Head::Rect { x1, y1, x2, y2 },
            Expr::Union(..) => Head::Union,
            Expr::Diff(..) => Head::Diff,
            Expr::Repeat { dx, dy, count, .. } => Head::Repeat { dx, dy, count },
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Circle { .. } | Expr::Rect { .. } => vec![],
            Expr::Union(a, b) | Expr::Diff(a, b) => vec![a, b],
            Expr::Repeat { body, .. } => vec![body],
        }
    }

    /// Number of AST nodes; scalar parameters are not nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Circle { .. } | Expr::Rect { .. } => 1,
            Expr::Union(a, b) | Expr::Diff(a, b) => 1 + a.node_count() + b.node_count(),
            Expr::Repeat { body, .. } => 1 + body.node_count(),
        }
    }

    /// AST depth with the root at depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Circle { .. } | Expr::Rect { .. } => 1,
            Expr::Union(a, b) | Expr::Diff(a, b) => 1 + a.depth().max(b.depth()),
            Expr::Repeat { body, .. } => 1 + body.depth(),
        }
    }

    /// Pre-order traversal.
    pub fn subterms(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            for c in e.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Replaces the head of the node at pre-order position `index`, keeping its
    /// children. Returns `None` if `index` is out of range or the arity differs.
    pub fn with_head_at(&self, index: usize, head: Head) -> Option<Expr> {
        fn go(e: &Expr, index: &mut usize, head: Head) -> Option<Option<Expr>> {
            if *index == 0 {
                if head.arity() != e.head().arity() {
                    return Some(None);
                }
                let children = e.children().into_iter().cloned().collect();
                return Some(Some(head.build(children)));
            }
            *index -= 1;
            let children = e.children();
            for (k, c) in children.iter().enumerate() {
                if let Some(res) = go(c, index, head) {
                    let res = res?;
                    let rebuilt = children
                        .iter()
                        .enumerate()
                        .map(|(j, c)| if j == k { res.clone() } else { (*c).clone() })
                        .collect();
                    return Some(Some(e.head().build(rebuilt)));
                }
            }
            None
        }
        let mut index = index;
        go(self, &mut index, head).flatten()
    }

    /// Symmetry-breaking normal form: every `Union` has its children in
    /// non-decreasing serialized order, every primitive is non-empty, and every
    /// `Repeat` moves its body at least twice.
    pub fn is_canonical(&self) -> bool {
        match self {
            Expr::Circle { r, .. } => *r > 0,
            Expr::Rect { x1, y1, x2, y2 } => x1 < x2 && y1 < y2,
            Expr::Union(a, b) => {
                a.is_canonical() && b.is_canonical() && canonical_order(a, b) != Ordering::Greater
            }
            Expr::Diff(a, b) => a.is_canonical() && b.is_canonical(),
            Expr::Repeat { body, dx, dy, count } => (*dx, *dy) != (0, 0) && *count > 1 && body.is_canonical(),
        }
    }

    /// Reorders `Union` children into canonical order. Semantics are unchanged.
    pub fn canonicalize(&self) -> Expr {
        match self {
            Expr::Circle { .. } | Expr::Rect { .. } => self.clone(),
            Expr::Union(a, b) => {
                let (a, b) = (a.canonicalize(), b.canonicalize());
                if canonical_order(&a, &b) == Ordering::Greater {
                    Expr::union(b, a)
                } else {
                    Expr::union(a, b)
                }
            }
            Expr::Diff(a, b) => Expr::diff(a.canonicalize(), b.canonicalize()),
            Expr::Repeat { body, dx, dy, count } => Expr::repeat(body.canonicalize(), *dx, *dy, *count),
        }
    }
}

/// The fixed total order used for commutative arguments: lexicographic order
/// of the serialized text.
pub fn canonical_order(a: &Expr, b: &Expr) -> Ordering {
    a.to_string().cmp(&b.to_string())
}

/// Integer ranges of every scalar parameter for a canvas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamDomain {
    pub canvas: Canvas,
    pub count_max: i32,
}

impl ParamDomain {
    pub fn new(canvas: Canvas) -> Self {
        Self { canvas, count_max: COUNT_MAX }
    }

    pub fn x_max(&self) -> i32 {
        self.canvas.width as i32 - 1
    }

    pub fn y_max(&self) -> i32 {
        self.canvas.height as i32 - 1
    }

    pub fn r_max(&self) -> i32 {
        self.canvas.width.min(self.canvas.height) as i32 / 2
    }

    pub fn dx_max(&self) -> i32 {
        self.canvas.width as i32 / 2
    }

    pub fn dy_max(&self) -> i32 {
        self.canvas.height as i32 / 2
    }

    /// Whether a single node satisfies the well-formedness rules, given that
    /// its children do.
    pub fn head_well_formed(&self, head: Head) -> bool {
        let (w, h) = (self.canvas.width as i32, self.canvas.height as i32);
        match head {
            Head::Circle { x, y, r } => r > 0 && 0 <= x - r && x + r < w && 0 <= y - r && y + r < h,
            Head::Rect { x1, y1, x2, y2 } => {
                x1 < x2 && y1 < y2 && 0 <= x1 && x2 <= self.x_max() && 0 <= y1 && y2 <= self.y_max()
            }
            Head::Union | Head::Diff => true,
            Head::Repeat { dx, dy, count } => {
                (dx, dy) != (0, 0)
                    && count > 1
                    && count <= self.count_max
                    && dx.abs() <= self.dx_max()
                    && dy.abs() <= self.dy_max()
            }
        }
    }

    pub fn well_formed(&self, e: &Expr) -> bool {
        self.head_well_formed(e.head()) && e.children().into_iter().all(|c| self.well_formed(c))
    }
}

/// Well-formedness on `canvas`: positive radius with the whole circle on the
/// canvas, strictly ordered rectangle corners, and repeats that move by a
/// non-zero vector more than once; all parameters within their grid ranges.
pub fn well_formed(e: &Expr, canvas: Canvas) -> bool {
    ParamDomain::new(canvas).well_formed(e)
}
