use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symetric::benchgen::{generate_benchmark, is_natural, load_corpus, write_corpus, BenchmarkCase, CaseKind, GenParams};
use symetric::csg::{eval, well_formed, Canvas, Expr, Head};

fn repo_corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn uses_repeat(e: &Expr) -> bool {
    e.subterms().iter().any(|s| matches!(s.head(), Head::Repeat { .. }))
}

#[test]
fn handwritten_corpus_meets_its_rules() {
    let r = load_corpus(&repo_corpus("handwritten")).unwrap();
    assert!(r.errors.is_empty(), "{:?}", r.errors);
    assert!(r.cases.len() >= 10);
    for c in &r.cases {
        let p = c.ground_truth.as_ref().unwrap();
        assert_eq!(c.kind, CaseKind::Handwritten);
        assert_eq!(c.canvas, Canvas::square(16));
        assert!(uses_repeat(p), "{}", c.name);
        assert!(p.node_count() <= 20, "{}", c.name);
        assert!(well_formed(p, c.canvas) && p.is_canonical(), "{}", c.name);
    }
}

#[test]
fn generated_corpus_is_natural_and_reproducible() {
    let r = load_corpus(&repo_corpus("generated")).unwrap();
    assert!(r.errors.is_empty(), "{:?}", r.errors);
    assert_eq!(r.cases.len(), 10);
    let params = GenParams::desk();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (i, c) in r.cases.iter().enumerate() {
        let p = c.ground_truth.as_ref().unwrap();
        assert!((8..=16).contains(&p.node_count()));
        assert!((4..=7).contains(&p.depth()));
        assert!(is_natural(p, c.canvas) && well_formed(p, c.canvas) && p.is_canonical());
        // every subterm non-empty, no operator equal to a child
        for s in p.subterms() {
            let v = eval(s, c.canvas);
            assert!(!v.is_empty());
            for k in s.children() {
                assert_ne!(eval(k, c.canvas), v);
            }
        }
        let again = generate_benchmark(&mut rng, format!("gen{i:02}"), &params).unwrap();
        assert_eq!(again.ground_truth.as_ref(), Some(p));
    }
}

#[test]
fn bad_pairs_are_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let c = Canvas::square(8);
    let cases = vec![
        BenchmarkCase::from_program("a", Expr::rect(0, 0, 3, 3), CaseKind::Handwritten, c),
        BenchmarkCase::from_program("b", Expr::circle(4, 4, 2), CaseKind::Generated, c),
    ];
    write_corpus(dir.path(), &cases).unwrap();
    fs::write(dir.path().join("a.csg"), "(rect 0 0 2 2)\n").unwrap();
    let r = load_corpus(dir.path()).unwrap();
    assert_eq!(r.cases.len(), 1);
    assert_eq!(r.cases[0].name, "b");
    assert_eq!(r.errors.len(), 1);

    fs::write(dir.path().join("b.scene"), "scene 8 8\n0101\n").unwrap();
    let r = load_corpus(dir.path()).unwrap();
    assert!(r.cases.is_empty());
    assert_eq!(r.errors.len(), 2);
}

#[test]
fn directory_without_manifest_loads_scenes() {
    let dir = tempfile::tempdir().unwrap();
    let c = Canvas::square(8);
    let case = BenchmarkCase::from_program("only", Expr::rect(1, 1, 4, 4), CaseKind::Handwritten, c);
    write_corpus(dir.path(), &[case.clone()]).unwrap();
    fs::remove_file(dir.path().join("manifest.json")).unwrap();
    let r = load_corpus(dir.path()).unwrap();
    assert_eq!(r.cases, vec![case]);
}

#[test]
fn same_seed_same_corpus() {
    let p = GenParams { canvas: Canvas::square(8), size: (3, 6), depth: (2, 4), max_attempts: 10_000 };
    let gen = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..5).map(|i| generate_benchmark(&mut rng, format!("c{i}"), &p).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(gen(3), gen(3));
    assert_ne!(gen(3), gen(4));
}
