//! Benchmark cases: random generation of natural programs and corpus files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::csg::{eval, Canvas, Expr, ParamDomain, Scene};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Generated,
    Handwritten,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkCase {
    pub name: String,
    pub goal: Scene,
    pub ground_truth: Option<Expr>,
    pub kind: CaseKind,
    pub canvas: Canvas,
}

impl BenchmarkCase {
    /// A case whose goal is the render of `program`.
    pub fn from_program(name: impl Into<String>, program: Expr, kind: CaseKind, canvas: Canvas) -> Self {
        let goal = eval(&program, canvas);
        Self { name: name.into(), goal, ground_truth: Some(program), kind, canvas }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub canvas: Canvas,
    pub size: (usize, usize),
    pub depth: (usize, usize),
    pub max_attempts: usize,
}

impl GenParams {
    /// 8 to 16 nodes, depth 4 to 7, on 16x16.
    pub fn desk() -> Self {
        Self { canvas: Canvas::square(16), size: (8, 16), depth: (4, 7), max_attempts: 100_000 }
    }

    /// 25 to 35 nodes, depth 5 to 6, on 32x32.
    pub fn full_scale() -> Self {
        Self { canvas: Canvas::square(32), size: (25, 35), depth: (5, 6), max_attempts: 1_000_000 }
    }
}

fn random_primitive<R: Rng>(rng: &mut R, dom: &ParamDomain) -> Expr {
    loop {
        let e = if rng.gen_bool(0.5) {
            let r = rng.gen_range(1..=dom.r_max());
            Expr::circle(rng.gen_range(0..=dom.x_max()), rng.gen_range(0..=dom.y_max()), r)
        } else {
            let (a, b) = (rng.gen_range(0..=dom.x_max()), rng.gen_range(0..=dom.x_max()));
            let (c, d) = (rng.gen_range(0..=dom.y_max()), rng.gen_range(0..=dom.y_max()));
            Expr::rect(a.min(b), c.min(d), a.max(b), c.max(d))
        };
        if dom.well_formed(&e) {
            return e;
        }
    }
}

/// A uniformly shaped random tree of exactly `size` nodes.
fn random_program<R: Rng>(rng: &mut R, dom: &ParamDomain, size: usize) -> Expr {
    if size == 1 {
        return random_primitive(rng, dom);
    }
    // Repeat is the only unary operator; a size-2 tree must use it.
    if size == 2 || rng.gen_ratio(1, 3) {
        let body = random_program(rng, dom, size - 1);
        loop {
            let dx = rng.gen_range(-dom.dx_max()..=dom.dx_max());
            let dy = rng.gen_range(-dom.dy_max()..=dom.dy_max());
            let count = rng.gen_range(2..=dom.count_max);
            if (dx, dy) != (0, 0) {
                return Expr::repeat(body, dx, dy, count);
            }
        }
    }
    let left = rng.gen_range(1..size - 1);
    let (a, b) = (random_program(rng, dom, left), random_program(rng, dom, size - 1 - left));
    if rng.gen_bool(0.5) {
        Expr::union(a, b).canonicalize()
    } else {
        Expr::diff(a, b).canonicalize()
    }
}

/// Whether every subterm renders a non-empty scene and no operator reproduces
/// one of its arguments.
pub fn is_natural(e: &Expr, canvas: Canvas) -> bool {
    fn go(e: &Expr, canvas: Canvas) -> Option<Scene> {
        let kids: Vec<Scene> = e.children().into_iter().map(|c| go(c, canvas)).collect::<Option<_>>()?;
        let refs: Vec<&Scene> = kids.iter().collect();
        let s = crate::csg::apply_head(canvas, e.head(), &refs);
        if s.is_empty() || kids.iter().any(|k| *k == s) {
            return None;
        }
        Some(s)
    }
    go(e, canvas).is_some()
}

/// Rejection-samples a natural, well-formed, canonical program with node
/// count and depth in the given inclusive ranges.
pub fn generate_program<R: Rng>(rng: &mut R, p: &GenParams) -> Result<Expr> {
    if p.size.0 == 0 || p.size.0 > p.size.1 || p.depth.0 == 0 || p.depth.0 > p.depth.1 {
        return Err(Error::Config("size and depth ranges must be non-empty and positive".into()));
    }
    let dom = ParamDomain::new(p.canvas);
    for _ in 0..p.max_attempts {
        let size = rng.gen_range(p.size.0..=p.size.1);
        let e = random_program(rng, &dom, size);
        let depth = e.depth();
        if depth < p.depth.0 || depth > p.depth.1 {
            continue;
        }
        if dom.well_formed(&e) && e.is_canonical() && is_natural(&e, p.canvas) {
            return Ok(e);
        }
    }
    Err(Error::GaveUp { attempts: p.max_attempts, reason: "no natural program in range".into() })
}

pub fn generate_benchmark<R: Rng>(rng: &mut R, name: impl Into<String>, p: &GenParams) -> Result<BenchmarkCase> {
    let e = generate_program(rng, p)?;
    Ok(BenchmarkCase::from_program(name, e, CaseKind::Generated, p.canvas))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub kind: CaseKind,
    pub canvas: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    /// How node counts and depths are measured.
    pub conventions: BTreeMap<String, String>,
    pub cases: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn for_cases(cases: &[BenchmarkCase]) -> Self {
        let conventions = [
            ("size", "every AST node counts 1; repeat offsets and counts are not nodes"),
            ("depth", "a lone primitive has depth 1"),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        let cases = cases
            .iter()
            .map(|c| ManifestEntry { name: c.name.clone(), kind: c.kind, canvas: c.canvas.to_string() })
            .collect();
        Self { conventions, cases }
    }
}

/// Writes `<name>.scene`, `<name>.csg` when a ground truth exists, and
/// `manifest.json`.
pub fn write_corpus(dir: &Path, cases: &[BenchmarkCase]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for c in cases {
        let scene = dir.join(format!("{}.scene", c.name));
        fs::write(&scene, c.goal.to_text()).map_err(|e| Error::io(&scene, e))?;
        if let Some(p) = &c.ground_truth {
            let prog = dir.join(format!("{}.csg", c.name));
            fs::write(&prog, format!("{p}\n")).map_err(|e| Error::io(&prog, e))?;
        }
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&Manifest::for_cases(cases))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Problems found while loading a corpus. Loading continues past them.
#[derive(Debug, Default)]
pub struct LoadReport {
    pub cases: Vec<BenchmarkCase>,
    pub errors: Vec<(PathBuf, Error)>,
}

fn load_case(dir: &Path, name: &str, kind: CaseKind) -> Result<BenchmarkCase> {
    let path = dir.join(format!("{name}.scene"));
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let goal = Scene::parse(&text)?;
    let prog = dir.join(format!("{name}.csg"));
    let ground_truth = if prog.exists() {
        let text = fs::read_to_string(&prog).map_err(|e| Error::io(&prog, e))?;
        let p: Expr = crate::csg::parse(&text)?;
        if eval(&p, goal.canvas()) != goal {
            return Err(Error::SceneFormat(format!("{} does not render {}", prog.display(), path.display())));
        }
        Some(p)
    } else {
        None
    };
    Ok(BenchmarkCase { name: name.to_string(), canvas: goal.canvas(), goal, ground_truth, kind })
}

/// Loads the cases listed in `manifest.json`, or every `.scene` file as a
/// hand-written case when there is no manifest. Cases come back sorted by name.
pub fn load_corpus(dir: &Path) -> Result<LoadReport> {
    let manifest = dir.join("manifest.json");
    let entries: Vec<(String, CaseKind)> = if manifest.exists() {
        let text = fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
        let m: Manifest = serde_json::from_str(&text)?;
        m.cases.into_iter().map(|e| (e.name, e.kind)).collect()
    } else {
        let mut v = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().is_some_and(|x| x == "scene") {
                let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
                v.push((stem, CaseKind::Handwritten));
            }
        }
        v
    };
    let mut report = LoadReport::default();
    for (name, kind) in entries {
        match load_case(dir, &name, kind) {
            Ok(c) => report.cases.push(c),
            Err(e) => report.errors.push((dir.join(format!("{name}.scene")), e)),
        }
    }
    report.cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_programs_have_requested_size() {
        let p = GenParams { canvas: Canvas::square(8), size: (3, 5), depth: (2, 5), max_attempts: 10_000 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let e = generate_program(&mut rng, &p).unwrap();
            assert!((3..=5).contains(&e.node_count()), "{e}");
            assert!(is_natural(&e, p.canvas));
        }
    }

    #[test]
    fn empty_range_is_rejected() {
        let p = GenParams { size: (5, 3), ..GenParams::desk() };
        assert!(generate_program(&mut ChaCha8Rng::seed_from_u64(0), &p).is_err());
    }

    #[test]
    fn unnatural_programs_detected() {
        let c = Canvas::square(16);
        let big = Expr::rect(0, 0, 10, 10);
        assert!(!is_natural(&Expr::union(big.clone(), Expr::rect(1, 1, 2, 2)), c));
        assert!(!is_natural(&Expr::diff(Expr::rect(1, 1, 2, 2), big.clone()), c));
        assert!(is_natural(&Expr::diff(big, Expr::rect(1, 1, 2, 2)), c));
    }
}
