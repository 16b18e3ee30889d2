//! Acceptance run: one PASS/FAIL line per criterion, then a check that the
//! measured facts are the ones recorded. Runs without the test harness so
//! the lines are always printed.
//!
//! The first uexc-g box is cut to dR <= 400 unless ABC_ACCEPTANCE_FULL=1;
//! it already fails there and the full box takes several minutes.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use abc_core::branch::{assemble, closed_form_abc, BranchKind, FamilyConfig};
use abc_core::enumerate::{brute_force_min, min_by_degree_sequence};
use abc_core::extremal::{
    c0, family_search, gamma_bounds, greedy_tree, transition_points, transition_scan,
};
use abc_core::graph::{abc_index, root_by_max_degree, RootedTree, Tree};
use abc_core::lemmas::{sweep, ParamRange, Status, SweepSpec, REGISTRY};
use abc_core::transforms::{exchange, exchange_delta, legal_similarity, local_search};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
    /// Facts that must hold whatever the verdict; a false one fails the run.
    facts: Vec<(String, bool)>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, facts: Vec::new() }
    }

    fn fact(mut self, what: &str, ok: bool) -> Self {
        self.facts.push((what.to_string(), ok));
        self
    }
}

fn constant() -> Outcome {
    let v = c0();
    let pass = (v - 0.67737178).abs() <= 5e-9;
    Outcome::new(pass, format!("c0 = {v:.12}")).fact("c0 within 5e-9", pass)
}

fn closed_forms() -> Outcome {
    let mut worst = 0f64;
    let mut outside = Vec::new();
    for r in 1..=200u32 {
        let cfg = FamilyConfig::new(vec![(BranchKind::c(52), r)]);
        let t = assemble(&cfg).unwrap();
        let v = abc_index(t.tree());
        worst = worst.max((v - closed_form_abc(&cfg)).abs());
        let g = gamma_bounds(365 * r as usize + 1).unwrap();
        if v < g.lower - 1e-3 || v > g.upper + 1e-3 {
            outside.push(r);
        }
    }
    let pass = worst <= 1e-10 && outside.is_empty();
    Outcome::new(pass, format!("max |assembled - closed form| = {worst:.2e}, outside bounds: {outside:?}"))
        .fact("closed forms agree", worst <= 1e-10)
        .fact("within gamma bounds", outside.is_empty())
}

fn brute_structure() -> Outcome {
    let mut failures = Vec::new();
    let mut witnesses = 0;
    for n in 3..=18 {
        let best = brute_force_min(n).unwrap();
        for w in &best.witnesses {
            witnesses += 1;
            let c = abc_core::lemmas::validate_structure(w);
            for i in c.items.iter().filter(|i| i.applicable && !i.pass) {
                failures.push(format!("n={n} {}", i.name));
            }
        }
    }
    // the unique minimum of order 13 is a path of three degree-3 vertices
    // with pendant paths, so it has two 3-3 edges
    let expected = ["n=13 equal-degree-edges", "n=13 degrees-decrease-from-root"];
    let known = failures.iter().map(String::as_str).eq(expected);
    Outcome::new(failures.is_empty(), format!("{witnesses} witnesses, failing items: {failures:?}"))
        .fact("only the order-13 minimum breaks the k-k edge statement", known)
}

fn greedy() -> Outcome {
    let mut classes = 0;
    let mut worse = Vec::new();
    for n in 7..=14 {
        for (seq, (min, _)) in min_by_degree_sequence(n).unwrap() {
            classes += 1;
            let g = abc_index(greedy_tree(&seq).tree());
            if g > min + 1e-12 {
                worse.push(format!("{:?}: {g} > {min}", seq.degrees()));
            }
        }
    }
    let pass = worse.is_empty();
    Outcome::new(pass, format!("{classes} degree sequences, greedy above minimum: {worse:?}"))
        .fact("greedy is minimal", pass)
}

fn lemma_sweeps() -> Outcome {
    let full = std::env::var("ABC_ACCEPTANCE_FULL").is_ok_and(|v| v == "1");
    let mut failed = BTreeSet::new();
    let mut unstable = Vec::new();
    let mut lines = Vec::new();
    for info in REGISTRY {
        let mut spec = SweepSpec::defaults(info.id, false).unwrap();
        if info.id == "uexc-g" && !full {
            spec.boxes[0][0] = ParamRange::new(6, 400);
        }
        let t = Instant::now();
        let rep = sweep(&spec).unwrap();
        if rep.status != Status::Verified {
            failed.insert(info.id);
            lines.push(format!(
                "      {} {:?}: {} of {} points, min {:.6e} at {:?}",
                info.id,
                rep.status,
                rep.counterexamples + rep.inconclusive,
                rep.evaluations,
                rep.min_value,
                rep.argmin
            ));
        } else {
            lines.push(format!(
                "      {} verified: {} points, min {:.6e} at {:?}, {} escalated, {:.1}s",
                info.id,
                rep.evaluations,
                rep.min_value,
                rep.argmin,
                rep.escalated,
                t.elapsed().as_secs_f64()
            ));
        }
        if rep.precision_stable == Some(false) {
            unstable.push(info.id);
        }
    }
    let expected: BTreeSet<&str> = ["uexc-g", "uexc-m", "deg-gap", "c52-exists-b-368"].into();
    let detail = format!("not verified: {failed:?}\n{}", lines.join("\n"));
    Outcome::new(failed.is_empty(), detail)
        .fact("failures are exactly the uexc pair, deg-gap and c52-exists-b-368", failed == expected)
        .fact("spot checks are precision stable", unstable.is_empty())
}

fn landmark_312() -> Outcome {
    let res = family_search(312, true).unwrap();
    let cfg = &res.best_config;
    let (stars, b3) = (cfg.count(&BranchKind::B3StarStar), cfg.count(&BranchKind::B(3)));
    let diff = (abc_index(assemble(cfg).unwrap().tree()) - res.best_value).abs();
    let pass = stars == 1 && b3 == 43 && diff <= 1e-10;
    Outcome::new(pass, format!("best {cfg}, value {:.12}, |assembled - value| = {diff:.1e}", res.best_value))
        .fact("one B3** and 43 B3", stars == 1 && b3 == 43)
        .fact("value matches assembled tree", diff <= 1e-10)
}

fn transitions() -> Outcome {
    let expected = [525, 939, 422, 864, 508, 740, 664];
    let rows = transition_scan(380, 1000).unwrap();
    let got = transition_points(&rows);
    let exact = (0..7).filter(|&i| got[i] == Some(expected[i])).count();
    let close = (0..7).all(|i| got[i].is_some_and(|g| g.abs_diff(expected[i]) <= 7));
    let mut detail = format!("first n with r >= 1 by residue: {got:?}, {exact}/7 exact");
    for i in (0..7).filter(|&i| got[i] != Some(expected[i])) {
        let at = |n: usize| rows.iter().find(|r| r.n == n).map(|r| (r.r, r.best_value));
        detail += &format!("\n      residue {i}: expected {} {:?}, found {:?}", expected[i], at(expected[i]), got[i]);
    }
    let pass = exact >= 5 && close;
    Outcome::new(pass, detail).fact("thresholds reproduced", pass)
}

fn large_n() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    let mut consistent = true;
    for r in [500usize, 1000, 3000] {
        let n = 365 * r + 1;
        let res = family_search(n, true).unwrap();
        let mut sizes = Vec::new();
        let mut other = 0;
        for (kind, count) in res.best_config.branches() {
            if let BranchKind::C(_) = kind {
                let k = kind.b3_count();
                sizes.push((k, *count));
                if k != 52 {
                    other += count;
                }
            }
        }
        let ok = res.s == 0 && other <= 364 && sizes.iter().all(|&(k, _)| (51..=53).contains(&k));
        pass &= ok;
        consistent &= (abc_index(assemble(&res.best_config).unwrap().tree()) - res.best_value).abs() <= 1e-6
            && sizes.iter().all(|&(k, _)| (51..=53).contains(&k));
        lines.push(format!("      n={n}: s={} C sizes {sizes:?}, value {:.10}", res.s, res.best_value));
    }
    Outcome::new(pass, format!("s = 0 and C52 dominance\n{}", lines.join("\n")))
        .fact("C sizes in 51..53 and values match assembled trees", consistent)
}

fn disjoint_pair(t: &RootedTree, rng: &mut StdRng) -> Option<(usize, usize)> {
    let n = t.n();
    for _ in 0..500 {
        let (v, w) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if v != w
            && t.parent(v).is_some()
            && t.parent(w).is_some()
            && !t.is_ancestor(v, w)
            && !t.is_ancestor(w, v)
        {
            return Some((v, w));
        }
    }
    None
}

fn transforms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut similar, mut strict) = (0, 0);
    let (mut similar_bad, mut strict_bad) = (0, 0);
    while similar < 1000 || strict < 1000 {
        let t = root_by_max_degree(&Tree::random(rng.gen_range(8..80), &mut rng));
        let Some((v, w)) = disjoint_pair(&t, &mut rng) else { continue };
        let d = |x: usize| t.tree().degree(x);
        let (u, u2) = (t.parent(v).unwrap(), t.parent(w).unwrap());
        let before = abc_index(t.tree());
        if legal_similarity(&t, v, w).unwrap() && similar < 1000 {
            similar += 1;
            let after = abc_index(exchange(&t, v, w).unwrap().tree());
            similar_bad += ((after - before).abs() > 1e-12) as u32;
        } else if d(u) > d(u2) && d(v) < d(w) && strict < 1000 {
            strict += 1;
            let after = abc_index(exchange(&t, v, w).unwrap().tree());
            strict_bad += (after >= before || exchange_delta(&t, v, w).unwrap() >= 0.0) as u32;
        }
    }
    let mut search_bad = 0;
    for _ in 0..100 {
        let t = Tree::random(60, &mut rng);
        let res = local_search(&t, 10_000);
        let mut prev = res.initial;
        let monotone = res.trace.iter().all(|s| {
            let ok = s.abc < prev;
            prev = s.abc;
            ok
        });
        search_bad += (!monotone || !res.local_minimum || res.trace.len() > 10_000) as u32;
    }
    let pass = similar_bad == 0 && strict_bad == 0 && search_bad == 0;
    Outcome::new(
        pass,
        format!(
            "similarity changes: {similar_bad}/1000, non-decreasing strict exchanges: {strict_bad}/1000, \
             local searches not monotone or unfinished: {search_bad}/100"
        ),
    )
    .fact("exchange properties", pass)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("constant", constant),
        ("closed forms and bounds", closed_forms),
        ("brute-force structure", brute_structure),
        ("greedy optimality", greedy),
        ("lemma sweeps", lemma_sweeps),
        ("order 312", landmark_312),
        ("transition thresholds", transitions),
        ("large-n structure", large_n),
        ("transforms", transforms),
    ];
    let mut broken = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict} {name} ({:.1}s): {}", i + 1, t.elapsed().as_secs_f64(), out.detail);
        for (what, ok) in out.facts {
            if !ok {
                broken.push(format!("criterion {}: {what}", i + 1));
            }
        }
    }
    if broken.is_empty() {
        println!("recorded facts hold");
        ExitCode::SUCCESS
    } else {
        println!("recorded facts broken: {broken:?}");
        ExitCode::FAILURE
    }
}
