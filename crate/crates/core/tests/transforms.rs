use abc_core::branch::{assemble, closed_form_abc, BranchKind, FamilyConfig};
use abc_core::enumerate::{brute_force_min, free_trees};
use abc_core::graph::{abc_index, root_by_max_degree, weight, RootedTree, Tree};
use abc_core::transforms::{
    exchange, exchange_delta, extremal_canonicalize, legal_similarity, level_order_violations,
    local_search,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn rooted(t: Tree) -> RootedTree {
    root_by_max_degree(&t)
}

fn disjoint_pair(r: &RootedTree, rng: &mut StdRng) -> Option<(usize, usize)> {
    for _ in 0..200 {
        let v = rng.gen_range(0..r.n());
        let w = rng.gen_range(0..r.n());
        if v == w || r.parent(v).is_none() || r.parent(w).is_none() {
            continue;
        }
        if r.is_ancestor(v, w) || r.is_ancestor(w, v) {
            continue;
        }
        return Some((v, w));
    }
    None
}

#[test]
fn isomorphic_branches_swap_freely() {
    let cfg = FamilyConfig::new(vec![(BranchKind::B(3), 3)]);
    let t = assemble(&cfg).unwrap();
    let kids = t.children(0).to_vec();
    let e = exchange(&t, kids[0], kids[2]).unwrap();
    assert!((abc_index(e.tree()) - closed_form_abc(&cfg)).abs() < 1e-12);
    assert!(legal_similarity(&t, kids[0], kids[1]).unwrap());
}

#[test]
fn exchange_rejects_root_and_nested() {
    let t = RootedTree::new(Tree::path(6), 0);
    let root = t.root();
    let child = t.children(root)[0];
    assert!(exchange(&t, root, child).is_err());
    let grand = t.children(child)[0];
    assert!(exchange(&t, child, grand).is_err());
    assert!(legal_similarity(&t, child, grand).is_err());
}

#[test]
fn strict_inequalities_are_not_similar() {
    // father degrees 3 and 2, child degrees 1 and 2
    let t = RootedTree::new(
        Tree::new(8, vec![(0, 1), (0, 2), (0, 3), (1, 4), (4, 5), (2, 6), (6, 7)]).unwrap(),
        0,
    );
    assert!(!legal_similarity(&t, 3, 6).unwrap());
    let d = exchange_delta(&t, 3, 6).unwrap();
    let e = exchange(&t, 3, 6).unwrap();
    assert!((abc_index(e.tree()) - abc_index(t.tree()) - d).abs() < 1e-12);
    assert!(d < 0.0);
}

#[test]
fn equal_child_degrees_preserve_value() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut hits = 0;
    while hits < 50 {
        let t = rooted(Tree::random(30, &mut rng));
        let Some((v, w)) = disjoint_pair(&t, &mut rng) else { continue };
        if t.tree().degree(v) != t.tree().degree(w) {
            continue;
        }
        assert!(legal_similarity(&t, v, w).unwrap());
        let e = exchange(&t, v, w).unwrap();
        assert!((abc_index(e.tree()) - abc_index(t.tree())).abs() < 1e-12);
        hits += 1;
    }
}

#[test]
fn exchange_conserves_degrees_of_fathers() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..200 {
        let t = rooted(Tree::random(25, &mut rng));
        let Some((v, w)) = disjoint_pair(&t, &mut rng) else { continue };
        let (u, u2) = (t.parent(v).unwrap(), t.parent(w).unwrap());
        let e = exchange(&t, v, w).unwrap();
        assert_eq!(e.n(), t.n());
        assert_eq!(e.tree().degree(u), t.tree().degree(u));
        assert_eq!(e.tree().degree(u2), t.tree().degree(u2));
        let d = |x| t.tree().degree(x) as u32;
        let predicted = weight(d(u), d(v)) + weight(d(u2), d(w)) - weight(d(u), d(w)) - weight(d(u2), d(v));
        assert!((abc_index(t.tree()) - abc_index(e.tree()) - predicted).abs() < 1e-12);
    }
}

#[test]
fn star_is_improved() {
    let star = Tree::star(10);
    let res = local_search(&star, 100);
    assert!(res.value < abc_index(&star));
    assert_eq!(res.tree.n(), 10);
    assert!(res.trace.len() <= 100);
}

#[test]
fn witness_is_kept() {
    let best = brute_force_min(12).unwrap();
    let w = &best.witnesses[0];
    let res = local_search(w, 1000);
    assert!((res.value - best.best_value).abs() < 1e-9);
    assert!(res.trace.is_empty());
}

#[test]
fn unequal_siblings_are_rebalanced() {
    let start = FamilyConfig::new(vec![(BranchKind::B(5), 1), (BranchKind::B(2), 1)]);
    let balanced = FamilyConfig::new(vec![(BranchKind::B(4), 1), (BranchKind::B(3), 1)]);
    let t = assemble(&start).unwrap().into_tree();
    let res = local_search(&t, 1000);
    assert!(res.value <= closed_form_abc(&balanced) + 1e-12);
}

#[test]
fn budget_caps_the_trace() {
    let res = local_search(&Tree::star(30), 3);
    assert_eq!(res.trace.len(), 3);
    assert!(!res.local_minimum);
}

#[test]
fn canonicalize_sorts_children() {
    let cfg = FamilyConfig::new(vec![(BranchKind::B(2), 2), (BranchKind::B(4), 1), (BranchKind::B1Minus, 1)]);
    let t = assemble(&cfg).unwrap();
    let n = t.n();
    // shuffle labels
    let mut rng = StdRng::seed_from_u64(3);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let shuffled = t.tree().relabel(&perm);
    let c = extremal_canonicalize(&shuffled);
    assert!((abc_index(c.tree()) - closed_form_abc(&cfg)).abs() < 1e-12);
    let codes = c.subtree_codes();
    for v in 0..n {
        let kids = c.children(v);
        assert!(kids.windows(2).all(|w| codes[w[0]] >= codes[w[1]]));
    }
    assert_eq!(c.tree().degree(c.root()), c.tree().max_degree());
}

#[test]
fn double_star_picks_larger_rooting() {
    // two degree-4 vertices; one side carries a longer arm
    let t = Tree::new(
        9,
        vec![(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (4, 6), (4, 7), (7, 8)],
    )
    .unwrap();
    let c = extremal_canonicalize(&t);
    let other = if c.root() == 0 { 4 } else { 0 };
    let alt = RootedTree::new(c.tree().clone(), other).normalized();
    assert!(abc_core::graph::canonical_code(&c) >= abc_core::graph::canonical_code(&alt));
    assert_eq!(c.tree().degree(c.root()), 4);
}

#[test]
fn canonicalize_is_idempotent() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..30 {
        let t = Tree::random(20, &mut rng);
        let once = extremal_canonicalize(&t);
        let twice = extremal_canonicalize(once.tree());
        assert_eq!(once.tree(), twice.tree());
        assert!((abc_index(once.tree()) - abc_index(&t)).abs() < 1e-12);
    }
}

#[test]
fn witness_satisfies_level_order() {
    let best = brute_force_min(14).unwrap();
    for w in &best.witnesses {
        let c = extremal_canonicalize(w);
        assert!((abc_index(c.tree()) - best.best_value).abs() < 1e-12);
        assert!(level_order_violations(&c).is_empty());
    }
}

#[test]
fn reach_rate_small_orders() {
    for n in 6..=12 {
        let best = brute_force_min(n).unwrap().best_value;
        let mut hit = 0;
        let mut total = 0;
        for t in free_trees(n).unwrap() {
            total += 1;
            if (local_search(&t, 10_000).value - best).abs() < 1e-9 {
                hit += 1;
            }
        }
        println!("order {n}: {hit}/{total} classes reach the minimum");
        assert!(hit * 5 >= total * 4);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn tree_strategy(max: usize) -> impl Strategy<Value = Tree> {
        (4..=max).prop_flat_map(|n| {
            prop::collection::vec(0..n, n - 2).prop_map(move |s| abc_core::graph::from_prufer(n, &s))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn exchange_delta_is_the_index_change(t in tree_strategy(40), seed in any::<u64>()) {
            let r = rooted(t);
            let mut rng = StdRng::seed_from_u64(seed);
            if let Some((v, w)) = disjoint_pair(&r, &mut rng) {
                let d = exchange_delta(&r, v, w).unwrap();
                let e = exchange(&r, v, w).unwrap();
                prop_assert!((abc_index(e.tree()) - abc_index(r.tree()) - d).abs() < 1e-12);
                if legal_similarity(&r, v, w).unwrap() {
                    prop_assert!(d <= 1e-12);
                }
            }
        }

        #[test]
        fn local_search_trace_strictly_decreases(t in tree_strategy(40)) {
            let start = abc_index(&t);
            let res = local_search(&t, 500);
            let mut prev = start;
            for s in &res.trace {
                prop_assert!(s.abc < prev);
                prev = s.abc;
            }
            prop_assert!((res.value - abc_index(&res.tree)).abs() < 1e-9);
            prop_assert!(res.value <= start);
            prop_assert_eq!(res.tree.n(), t.n());
        }
    }
}
