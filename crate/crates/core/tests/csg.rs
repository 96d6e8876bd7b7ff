mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symetric::csg::{eval, parse, well_formed, Canvas, Evaluator, Expr};

use common::{naive_eval, random_program};

#[test]
fn eval_matches_per_pixel_reference() {
    let c = Canvas::square(16);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut memo = Evaluator::new(c);
    for _ in 0..300 {
        let e = random_program(&mut rng, c, 10);
        assert!(well_formed(&e, c), "{e}");
        let expect = naive_eval(&e, c);
        assert_eq!(eval(&e, c), expect, "{e}");
        assert_eq!(memo.eval(&e), expect, "{e}");
    }
}

#[test]
fn repeat_unrolls_into_unions() {
    let c = Canvas::square(16);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let body = random_program(&mut rng, c, 4);
        for count in 2..=5 {
            let (dx, dy) = (3, -2);
            let rep = Expr::repeat(body.clone(), dx, dy, count);
            let mut expect = naive_eval(&body, c);
            let base = expect.clone();
            for i in 1..count {
                expect.union_with(&base.translated(i * dx, i * dy));
            }
            assert_eq!(eval(&rep, c), expect, "{rep}");
        }
    }
}

#[test]
fn two_copies_of_a_circle_are_a_union() {
    let c = Canvas::square(16);
    for (x, y, r, dx, dy) in [(4, 4, 3, 5, 0), (3, 8, 2, 2, 3), (7, 7, 4, -3, -2)] {
        let rep = Expr::repeat(Expr::circle(x, y, r), dx, dy, 2);
        let two = Expr::union(Expr::circle(x, y, r), Expr::circle(x + dx, y + dy, r));
        assert_eq!(eval(&rep, c), eval(&two, c));
    }
}

#[test]
fn key_example_renders() {
    let c = Canvas::square(16);
    let key = parse("(union (union (diff (circle 4 8 4) (circle 4 8 3)) (rect 7 7 15 9)) (repeat (rect 10 9 11 10) 2 0 3))").unwrap();
    assert!(well_formed(&key, c));
    let s = eval(&key, c);
    assert_eq!(s, naive_eval(&key, c));
    // teeth at x = 10..=15 on row 10, one pixel gap each
    let row10: String = (0..16).map(|u| if s.get(u, 10) { '#' } else { '.' }).collect();
    assert_eq!(&row10[10..], "######");
}

fn arb_program() -> impl Strategy<Value = Expr> {
    any::<u64>().prop_map(|seed| random_program(&mut ChaCha8Rng::seed_from_u64(seed), Canvas::square(12), 9))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trips(e in arb_program()) {
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn canonical_form_keeps_semantics(e in arb_program()) {
        let c = Canvas::square(12);
        let k = e.canonicalize();
        prop_assert!(k.is_canonical());
        prop_assert_eq!(k.canonicalize(), k.clone());
        prop_assert_eq!(eval(&k, c), eval(&e, c));
        prop_assert_eq!(k.node_count(), e.node_count());
    }

    #[test]
    fn scene_text_round_trips(e in arb_program()) {
        let s = eval(&e, Canvas::square(12));
        prop_assert_eq!(symetric::csg::Scene::parse(&s.to_text()).unwrap(), s);
    }
}
