use abc_core::branch::*;
use abc_core::graph::{abc_index, free_code};
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = BranchKind> {
    prop_oneof![
        Just(BranchKind::B1Minus),
        (1u32..=5).prop_map(BranchKind::B),
        (2u32..=3).prop_map(BranchKind::BStar),
        Just(BranchKind::B3StarStar),
        (1u32..=60).prop_map(BranchKind::c),
        (1u32..=40, 1u32..=3).prop_map(|(k, e)| BranchKind::c_with(k, vec![(BranchKind::B(2), e)])),
        (1u32..=40).prop_map(|k| BranchKind::c_with(k, vec![(BranchKind::B(4), 1), (BranchKind::BStar(3), 1)])),
    ]
}

fn config_strategy() -> impl Strategy<Value = FamilyConfig> {
    prop::collection::vec((kind_strategy(), 1u32..=4), 1..=5).prop_map(FamilyConfig::new)
}

/// Configs the structured search could return: balanced pure C-branches,
/// optionally a few ending branches.
fn tidy_config_strategy() -> impl Strategy<Value = FamilyConfig> {
    (20u32..=60, 2u32..=12, 0u32..=6, 0u32..=2).prop_map(|(k, r, b3, b4)| {
        let mut v = vec![(BranchKind::c(k), r)];
        if b3 > 0 {
            v.push((BranchKind::B(3), b3));
        }
        if b4 > 0 {
            v.push((BranchKind::B(4), b4));
        }
        FamilyConfig::new(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn assembled_order_matches_the_count(c in config_strategy()) {
        let t = assemble(&c).unwrap();
        prop_assert_eq!(t.n(), c.n());
    }

    #[test]
    fn closed_form_matches_assembled_tree(c in config_strategy()) {
        let t = assemble(&c).unwrap();
        prop_assert!((closed_form_abc(&c) - abc_index(t.tree())).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recognize_reads_back_an_assembled_tree(c in tidy_config_strategy()) {
        let t = assemble(&c).unwrap();
        let back = recognize(t.tree()).expect("assembled trees are recognized");
        prop_assert_eq!(&back, &c);
    }

    #[test]
    fn any_recognized_reading_is_the_same_tree(c in config_strategy()) {
        let t = assemble(&c).unwrap();
        if let Some(back) = recognize(t.tree()) {
            prop_assert_eq!(free_code(assemble(&back).unwrap().tree()), free_code(t.tree()));
        }
    }

    #[test]
    fn constrained_trees_keep_degree_two_off_the_root(
        k in 5u32..=60, big in 0u32..=3, small in 1u32..=3, b2 in 0u32..=12, b4 in 0u32..=2,
        special in 0usize..4, b1 in 0u32..=1,
    ) {
        let mut v = vec![(BranchKind::c(k), small), (BranchKind::c(k + 1), big), (BranchKind::B(2), b2), (BranchKind::B(4), b4), (BranchKind::B(1), b1)];
        let specials = [BranchKind::BStar(2), BranchKind::BStar(3), BranchKind::B3StarStar];
        if special < 3 {
            v.push((specials[special].clone(), 1));
        }
        let c = FamilyConfig::new(v);
        prop_assume!(c.n() >= 40);
        let t = assemble(&c).unwrap();
        let degree_two_at_root = t.children(t.root()).iter().any(|&v| t.tree().degree(v) == 2);
        if c.check_constraints().is_ok() {
            prop_assert!(!degree_two_at_root);
        } else {
            prop_assert!(b1 > 0 || b2 > 11);
        }
    }
}

#[test]
fn p7_is_two_b1() {
    let t = abc_core::graph::Tree::path(7);
    assert_eq!(recognize(&t), Some(FamilyConfig::new(vec![(BranchKind::B(1), 2)])));
}
