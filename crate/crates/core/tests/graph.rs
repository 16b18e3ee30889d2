use std::cmp::Ordering;

use abc_core::graph::*;
use proptest::prelude::*;

fn tree_strategy(max: usize) -> impl Strategy<Value = Tree> {
    (3..=max).prop_flat_map(|n| prop::collection::vec(0..n, n - 2).prop_map(move |s| from_prufer(n, &s)))
}

fn rooted_strategy(max: usize) -> impl Strategy<Value = RootedTree> {
    tree_strategy(max).prop_flat_map(|t| {
        let n = t.n();
        (Just(t), 0..n).prop_map(|(t, r)| RootedTree::new(t, r))
    })
}

#[test]
fn weight_difference_monotonicity() {
    // g(x, y) = f(x + a, y - b) - f(x, y) grows in x and shrinks in y
    let f = |x: i64, y: i64| edge_weight(x, y).unwrap();
    for a in [0i64, 1, 2, 5] {
        for y in 2..=200i64 {
            for b in 0..y - 1 {
                let g = |x: i64, y: i64| f(x + a, y - b) - f(x, y);
                for x in 2..=200i64 {
                    assert!(g(x + 1, y) >= g(x, y) - 1e-12, "x: a={a} b={b} ({x},{y})");
                    assert!(g(x, y + 1) <= g(x, y) + 1e-12, "y: a={a} b={b} ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn small_orders_have_zero_index() {
    assert_eq!(abc_index(&Tree::path(1)), 0.0);
    assert_eq!(abc_index(&Tree::path(2)), 0.0);
    assert!(abc_index(&Tree::path(3)) > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn index_is_label_invariant(t in tree_strategy(40), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut perm: Vec<usize> = (0..t.n()).collect();
        perm.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        let u = t.relabel(&perm);
        prop_assert!((abc_index(&t) - abc_index(&u)).abs() < 1e-12);
        prop_assert_eq!(free_code(&t), free_code(&u));
    }

    #[test]
    fn index_is_positive(t in tree_strategy(60)) {
        prop_assert!(abc_index(&t) > 0.0);
    }

    #[test]
    fn index_matches_an_edge_walk(t in tree_strategy(60)) {
        // walk each vertex's adjacency and count every edge from both ends
        let mut twice = 0.0;
        for v in 0..t.n() {
            for &u in t.neighbors(v) {
                let (a, b) = (t.neighbors(v).len() as f64, t.neighbors(u).len() as f64);
                twice += ((a + b - 2.0) / (a * b)).sqrt();
            }
        }
        prop_assert!((abc_index(&t) - twice / 2.0).abs() < 1e-12);
    }

    #[test]
    fn prufer_trees_have_the_right_degrees(seq in prop::collection::vec(0usize..20, 18)) {
        let t = from_prufer(20, &seq);
        for v in 0..20 {
            let expect = 1 + seq.iter().filter(|&&x| x == v).count();
            prop_assert_eq!(t.degree(v), expect);
        }
    }

    #[test]
    fn subtree_order_is_a_total_preorder(a in rooted_strategy(14), b in rooted_strategy(14), c in rooted_strategy(14)) {
        let ab = compare_subtrees(&a, &b);
        prop_assert_eq!(ab, compare_subtrees(&b, &a).reverse());
        prop_assert_eq!(compare_subtrees(&a, &a), Ordering::Equal);
        if ab == Ordering::Equal {
            // only rooted isomorphic trees tie
            prop_assert_eq!(canonical_code(&a), canonical_code(&b));
        }
        let bc = compare_subtrees(&b, &c);
        if ab != Ordering::Less && bc != Ordering::Less {
            prop_assert_ne!(compare_subtrees(&a, &c), Ordering::Less);
        }
    }

    #[test]
    fn rooted_relabel_keeps_the_order(a in rooted_strategy(14), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let n = a.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        let b = RootedTree::new(a.tree().relabel(&perm), perm[a.root()]);
        prop_assert_eq!(compare_subtrees(&a, &b), Ordering::Equal);
    }
}
