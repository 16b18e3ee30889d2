use abc_core::branch::{assemble, closed_form_abc, BranchKind, FamilyConfig};
use abc_core::enumerate::brute_force_min;
use abc_core::extremal::{c0, family_search, gamma_bounds, greedy_tree};
use abc_core::graph::{abc_index, degree_sequence, DegreeSequence, Tree};

#[test]
fn family_search_never_beats_brute_force() {
    for n in 10..=18 {
        let brute = brute_force_min(n).unwrap();
        let fam = family_search(n, false).unwrap();
        assert!(fam.best_value >= brute.best_value - 1e-10, "n={n}");
        assert!(fam.advisory);
        for w in &brute.witnesses {
            let g = greedy_tree(&degree_sequence(w).unwrap());
            assert!((abc_index(g.tree()) - brute.best_value).abs() <= 1e-12, "n={n}");
        }
    }
}

#[test]
fn best_value_is_its_closed_form() {
    for n in [40, 100, 312, 500, 525, 1000] {
        let a = family_search(n, true).unwrap();
        assert!((a.best_value - closed_form_abc(&a.best_config)).abs() <= 1e-10);
        assert_eq!(a.best_config.n(), n);
        let b = family_search(n, true).unwrap();
        assert_eq!(a.best_config, b.best_config);
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    }
}

#[test]
fn first_c_branch_in_residue_zero() {
    assert_eq!(family_search(518, true).unwrap().r, 0);
    assert!(family_search(525, true).unwrap().r >= 1);
}

#[test]
fn estimate_stays_near_the_linear_term() {
    let band = 365.0 * c0() + 10.0;
    let mut n = 366;
    while n <= 20_000 {
        let v = family_search(n, true).unwrap().best_value;
        assert!((v - c0() * n as f64).abs() <= band, "n={n}");
        n += if n < 1200 { 13 } else { 397 };
    }
}

#[test]
fn c52_trees_are_matched_or_beaten() {
    let mut beaten = Vec::new();
    for r in 10..=200u32 {
        let n = 365 * r as usize + 1;
        let best = family_search(n, true).unwrap().best_value;
        let c52 = closed_form_abc(&FamilyConfig::new(vec![(BranchKind::c(52), r)]));
        assert!(best <= c52 + 1e-9, "r={r}");
        if best < c52 - 1e-9 {
            beaten.push(r);
        }
    }
    println!("orders 365r+1 where the family beats r x C52: {} of 191", beaten.len());
}

#[test]
fn bounds_are_ordered_and_about_494_apart() {
    for n in [366, 1000, 36_501, 1_000_000] {
        let g = gamma_bounds(n).unwrap();
        assert!(g.lower <= g.upper && g.lower.is_finite() && g.upper.is_finite());
    }
    let g = gamma_bounds(365 * 100_000 + 1).unwrap();
    assert!((g.upper - g.lower - 2.0 * 365.0 * c0()).abs() < 1e-2);
    assert!((2.0 * 365.0 * c0() - 494.48).abs() < 5e-3);
    assert!(gamma_bounds(2).is_err());
}

#[test]
fn greedy_examples() {
    let p4 = greedy_tree(&DegreeSequence::new(vec![1, 2, 1, 2]).unwrap());
    assert_eq!(abc_core::graph::free_code(p4.tree()), abc_core::graph::free_code(&Tree::path(4)));
    assert!(DegreeSequence::new(vec![3, 3, 3]).is_err());

    let cfg = FamilyConfig::new(vec![(BranchKind::B(3), 43), (BranchKind::B3StarStar, 1)]);
    let t = assemble(&cfg).unwrap();
    let g = greedy_tree(&degree_sequence(t.tree()).unwrap());
    assert!((abc_index(g.tree()) - abc_index(t.tree())).abs() <= 1e-10);
}
