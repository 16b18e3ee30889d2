//! Subtree exchanges and a first-improvement local search over tree rewrites.

use std::fmt;

use serde::Serialize;

use crate::error::{AbcError, Result};
use crate::graph::{abc_index, root_by_max_degree, weight, RootedTree, Tree};

const ACCEPT: f64 = 1e-12;

fn check_pair(t: &RootedTree, v: usize, v2: usize) -> Result<(usize, usize)> {
    let n = t.n();
    if v >= n || v2 >= n {
        return Err(AbcError::InvalidMove(format!("vertex out of range: {v}, {v2}")));
    }
    let (Some(u), Some(u2)) = (t.parent(v), t.parent(v2)) else {
        return Err(AbcError::InvalidMove("the root cannot be exchanged".into()));
    };
    if t.is_ancestor(v, v2) || t.is_ancestor(v2, v) {
        return Err(AbcError::InvalidMove(format!("{v} and {v2} are nested")));
    }
    Ok((u, u2))
}

/// Swaps the subtrees hanging from `v` and `v2`; labels are kept.
pub fn exchange(t: &RootedTree, v: usize, v2: usize) -> Result<RootedTree> {
    let (u, u2) = check_pair(t, v, v2)?;
    let edges = t
        .tree()
        .edges()
        .iter()
        .map(|&(a, b)| {
            let e = (a.min(b), a.max(b));
            if e == (u.min(v), u.max(v)) {
                (u2, v)
            } else if e == (u2.min(v2), u2.max(v2)) {
                (u, v2)
            } else {
                (a, b)
            }
        })
        .collect();
    Ok(RootedTree::new(Tree::new(t.n(), edges)?, t.root()))
}

/// Predicted change `ABC(T(v,v2)) - ABC(T)`.
pub fn exchange_delta(t: &RootedTree, v: usize, v2: usize) -> Result<f64> {
    let (u, u2) = check_pair(t, v, v2)?;
    let d = |x: usize| t.tree().degree(x) as u32;
    Ok(weight(d(u), d(v2)) + weight(d(u2), d(v)) - weight(d(u), d(v)) - weight(d(u2), d(v2)))
}

/// Equal father degrees or equal subtree-root degrees.
pub fn legal_similarity(t: &RootedTree, v: usize, v2: usize) -> Result<bool> {
    let (u, u2) = check_pair(t, v, v2)?;
    let tr = t.tree();
    Ok(tr.degree(u) == tr.degree(u2) || tr.degree(v) == tr.degree(v2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    SubtreeExchange,
    BRebalance,
    CSplit,
    Compactify365,
    B1Merge,
    ContractToLeafpath,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::SubtreeExchange => "subtree_exchange",
            MoveKind::BRebalance => "b_rebalance",
            MoveKind::CSplit => "c_split",
            MoveKind::Compactify365 => "compactify_365",
            MoveKind::B1Merge => "b1_merge",
            MoveKind::ContractToLeafpath => "contract_to_leafpath",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step: usize,
    #[serde(rename = "move")]
    pub kind: MoveKind,
    pub abc: f64,
}

#[derive(Clone, Debug)]
pub struct LocalSearchResult {
    pub tree: Tree,
    pub initial: f64,
    pub value: f64,
    pub trace: Vec<TraceStep>,
    pub local_minimum: bool,
}

/// Edge rewrite of a tree with the index change computed from the touched vertices.
struct Rewrite {
    removed: Vec<(usize, usize)>,
    added: Vec<(usize, usize)>,
}

fn norm(e: (usize, usize)) -> (usize, usize) {
    (e.0.min(e.1), e.0.max(e.1))
}

impl Rewrite {
    fn delta(&self, t: &Tree) -> f64 {
        let mut touched: Vec<usize> = Vec::with_capacity(8);
        let mut change: Vec<(usize, i64)> = Vec::with_capacity(8);
        let bump = |v: usize, by: i64, change: &mut Vec<(usize, i64)>| {
            match change.iter_mut().find(|(x, _)| *x == v) {
                Some((_, c)) => *c += by,
                None => change.push((v, by)),
            }
        };
        for &(a, b) in &self.removed {
            bump(a, -1, &mut change);
            bump(b, -1, &mut change);
        }
        for &(a, b) in &self.added {
            bump(a, 1, &mut change);
            bump(b, 1, &mut change);
        }
        for &(v, _) in &change {
            touched.push(v);
        }
        let new_deg = |v: usize| -> u32 {
            let c = change.iter().find(|(x, _)| *x == v).map_or(0, |(_, c)| *c);
            (t.degree(v) as i64 + c) as u32
        };
        let removed: Vec<(usize, usize)> = self.removed.iter().map(|&e| norm(e)).collect();
        let mut old = 0.0;
        let mut new = 0.0;
        let mut counted: Vec<(usize, usize)> = Vec::new();
        for &v in &touched {
            for &w in t.neighbors(v) {
                let e = norm((v, w));
                if counted.contains(&e) {
                    continue;
                }
                counted.push(e);
                old += weight(t.degree(v) as u32, t.degree(w) as u32);
                if !removed.contains(&e) {
                    new += weight(new_deg(v), new_deg(w));
                }
            }
        }
        for &(a, b) in &self.added {
            new += weight(new_deg(a), new_deg(b));
        }
        new - old
    }

    fn apply(&self, t: &Tree) -> Tree {
        let removed: Vec<(usize, usize)> = self.removed.iter().map(|&e| norm(e)).collect();
        let mut edges: Vec<(usize, usize)> = t
            .edges()
            .iter()
            .copied()
            .filter(|&e| !removed.contains(&norm(e)))
            .collect();
        edges.extend_from_slice(&self.added);
        Tree::new(t.n(), edges).expect("rewrite keeps a tree")
    }
}

fn canonical(t: &Tree) -> RootedTree {
    root_by_max_degree(t).normalized()
}

/// Pendant paths of two vertices: (attachment, middle, leaf).
fn pendant_paths(r: &RootedTree) -> Vec<(usize, usize, usize)> {
    let t = r.tree();
    let mut out = Vec::new();
    for x in 0..t.n() {
        if t.degree(x) != 2 || r.parent(x).is_none() {
            continue;
        }
        let kids = r.children(x);
        if kids.len() == 1 && t.degree(kids[0]) == 1 {
            out.push((r.parent(x).unwrap(), x, kids[0]));
        }
    }
    out
}

fn find_exchange(r: &RootedTree) -> Option<Rewrite> {
    let t = r.tree();
    let n = t.n();
    for v in 0..n {
        let Some(u) = r.parent(v) else { continue };
        for v2 in 0..n {
            let Some(u2) = r.parent(v2) else { continue };
            if t.degree(u) <= t.degree(u2) || t.degree(v) >= t.degree(v2) {
                continue;
            }
            if r.is_ancestor(v, v2) || r.is_ancestor(v2, v) {
                continue;
            }
            let rw = Rewrite { removed: vec![(u, v), (u2, v2)], added: vec![(u2, v), (u, v2)] };
            if rw.delta(t) < -ACCEPT {
                return Some(rw);
            }
        }
    }
    None
}

fn find_rebalance(r: &RootedTree) -> Option<Rewrite> {
    let t = r.tree();
    // pendant 2-paths first, then single leaves
    let mut pieces = pendant_paths(r);
    for v in 0..t.n() {
        if t.degree(v) == 1 {
            if let Some(p) = r.parent(v) {
                pieces.push((p, v, v));
            }
        }
    }
    for (w, x, leaf) in pieces {
        for w2 in 0..t.n() {
            if w2 == w || w2 == x || w2 == leaf {
                continue;
            }
            let rw = Rewrite { removed: vec![(w, x)], added: vec![(w2, x)] };
            if rw.delta(t) < -ACCEPT {
                return Some(rw);
            }
        }
    }
    None
}

fn find_b1_merge(r: &RootedTree) -> Option<Rewrite> {
    let t = r.tree();
    let paths = pendant_paths(r);
    for v in 0..t.n() {
        let here: Vec<(usize, usize)> =
            paths.iter().filter(|p| p.0 == v).map(|p| (p.1, p.2)).collect();
        // B1- hanging directly from v, i.e. v's children that are pendant 2-paths
        if here.len() >= 4 {
            // four B1- become one B3*: the first middle vertex takes the other three paths
            let hub = here[0].0;
            let mut removed = Vec::new();
            let mut added = Vec::new();
            for &(x, _) in &here[1..3] {
                removed.push((v, x));
                added.push((hub, x));
            }
            let (x3, l3) = here[3];
            removed.push((v, x3));
            added.push((here[0].1, x3));
            let _ = l3;
            let rw = Rewrite { removed, added };
            if rw.delta(t) < -ACCEPT {
                return Some(rw);
            }
        }
        // B_k + B1- siblings become B_{k+1}
        if here.is_empty() {
            continue;
        }
        for &c in r.children(v) {
            if t.degree(c) < 2 || paths.iter().any(|p| p.1 == c) {
                continue;
            }
            let is_bk = r.children(c).iter().all(|&g| paths.iter().any(|p| p.1 == g));
            if !is_bk {
                continue;
            }
            let (x, _) = here[0];
            let rw = Rewrite { removed: vec![(v, x)], added: vec![(c, x)] };
            if rw.delta(t) < -ACCEPT {
                return Some(rw);
            }
        }
    }
    None
}

fn find_c_split(r: &RootedTree) -> Option<Rewrite> {
    let t = r.tree();
    let leaves: Vec<usize> = (0..t.n()).filter(|&v| t.degree(v) == 1).collect();
    for u in 0..t.n() {
        let Some(p) = r.parent(u) else { continue };
        let kids = r.children(u);
        if kids.len() < 4 {
            continue;
        }
        for &leaf in &leaves {
            let lp = t.neighbors(leaf)[0];
            if leaf == u || lp == u || r.is_ancestor(u, leaf) && kids.contains(&leaf) {
                continue;
            }
            // the leaf becomes a new sibling of u carrying half of u's children
            let mut removed = vec![(lp, leaf)];
            let mut added = vec![(p, leaf)];
            for &c in &kids[kids.len() / 2..] {
                removed.push((u, c));
                added.push((leaf, c));
            }
            if lp == p && t.degree(p) == 1 {
                continue;
            }
            let rw = Rewrite { removed, added };
            if rw.delta(t) < -ACCEPT {
                return Some(rw);
            }
            break;
        }
    }
    None
}

fn find_contract(r: &RootedTree) -> Option<Rewrite> {
    let t = r.tree();
    let leaves: Vec<usize> = (0..t.n()).filter(|&v| t.degree(v) == 1).collect();
    for v in 0..t.n() {
        let Some(u) = r.parent(v) else { continue };
        if r.children(v).is_empty() {
            continue;
        }
        for &leaf in &leaves {
            if r.is_ancestor(v, leaf) && r.children(v).contains(&leaf) && r.children(v).len() == 1 {
                continue;
            }
            // v's children move to u, and v hangs below the leaf
            let mut removed = vec![(u, v)];
            let mut added = vec![(leaf, v)];
            for &c in r.children(v) {
                if c == leaf {
                    continue;
                }
                removed.push((v, c));
                added.push((u, c));
            }
            if r.children(v).contains(&leaf) {
                removed.push((v, leaf));
                added.push((u, leaf));
            }
            let rw = Rewrite { removed, added };
            let candidate = rw.apply_checked(t);
            if candidate && rw.delta(t) < -ACCEPT {
                return Some(rw);
            }
        }
    }
    None
}

impl Rewrite {
    fn apply_checked(&self, t: &Tree) -> bool {
        let removed: Vec<(usize, usize)> = self.removed.iter().map(|&e| norm(e)).collect();
        let mut edges: Vec<(usize, usize)> = t
            .edges()
            .iter()
            .copied()
            .filter(|&e| !removed.contains(&norm(e)))
            .collect();
        edges.extend_from_slice(&self.added);
        Tree::new(t.n(), edges).is_ok()
    }
}

/// Is `v` the root of a pure C-branch: every child carries three pendant 2-paths.
fn c_branch_size(r: &RootedTree, v: usize) -> Option<usize> {
    let kids = r.children(v);
    if kids.is_empty() {
        return None;
    }
    for &c in kids {
        let g = r.children(c);
        if g.len() != 3 {
            return None;
        }
        for &x in g {
            let l = r.children(x);
            if l.len() != 1 || !r.children(l[0]).is_empty() {
                return None;
            }
        }
    }
    Some(kids.len())
}

fn find_compactify(r: &RootedTree) -> Option<Tree> {
    let t = r.tree();
    if t.n() < 365 * 54 {
        return None;
    }
    for u in 0..t.n() {
        let mut by_k: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &c in r.children(u) {
            if let Some(k) = c_branch_size(r, c) {
                if k > 52 {
                    by_k.entry(k).or_default().push(c);
                }
            }
        }
        let Some((&k, roots)) = by_k.iter().find(|(_, v)| v.len() >= 365) else { continue };
        // 365 copies of C_k become 7k+1 copies of C_52 on the same vertex
        let chosen: Vec<usize> = roots[..365].to_vec();
        let mut freed = Vec::new();
        for &c in &chosen {
            let mut stack = vec![c];
            while let Some(x) = stack.pop() {
                freed.push(x);
                stack.extend_from_slice(r.children(x));
            }
        }
        freed.sort_unstable();
        let gone: std::collections::HashSet<usize> = freed.iter().copied().collect();
        let mut edges: Vec<(usize, usize)> = t
            .edges()
            .iter()
            .copied()
            .filter(|(a, b)| !gone.contains(a) && !gone.contains(b))
            .collect();
        let mut ids = freed.into_iter();
        let mut take = || ids.next().expect("sizes match");
        for _ in 0..7 * k + 1 {
            let root = take();
            edges.push((u, root));
            for _ in 0..52 {
                let b = take();
                edges.push((root, b));
                for _ in 0..3 {
                    let x = take();
                    let l = take();
                    edges.push((b, x));
                    edges.push((x, l));
                }
            }
        }
        let next = Tree::new(t.n(), edges).expect("compactified tree");
        if abc_index(&next) < abc_index(t) - ACCEPT {
            return Some(next);
        }
    }
    None
}

fn improve(r: &RootedTree) -> Option<(MoveKind, Tree)> {
    let t = r.tree();
    if let Some(rw) = find_exchange(r) {
        return Some((MoveKind::SubtreeExchange, rw.apply(t)));
    }
    if let Some(rw) = find_rebalance(r) {
        return Some((MoveKind::BRebalance, rw.apply(t)));
    }
    if let Some(rw) = find_b1_merge(r) {
        return Some((MoveKind::B1Merge, rw.apply(t)));
    }
    if let Some(rw) = find_c_split(r) {
        return Some((MoveKind::CSplit, rw.apply(t)));
    }
    if let Some(next) = find_compactify(r) {
        return Some((MoveKind::Compactify365, next));
    }
    if let Some(rw) = find_contract(r) {
        return Some((MoveKind::ContractToLeafpath, rw.apply(t)));
    }
    None
}

/// First-improvement descent; a move is accepted only when it lowers the index
/// by more than 1e-12. Vertices are relabeled canonically after every move so
/// the scan order depends only on the shape.
pub fn local_search(t: &Tree, budget: usize) -> LocalSearchResult {
    let initial = abc_index(t);
    let mut current = canonical(t);
    let mut value = initial;
    let mut trace = Vec::new();
    let mut local_minimum = false;
    if t.n() < 3 {
        return LocalSearchResult { tree: current.into_tree(), initial, value, trace, local_minimum: true };
    }
    while trace.len() < budget {
        match improve(&current) {
            Some((kind, next)) => {
                let v = abc_index(&next);
                debug_assert!(v < value - ACCEPT);
                value = v;
                current = canonical(&next);
                trace.push(TraceStep { step: trace.len() + 1, kind, abc: v });
            }
            None => {
                local_minimum = true;
                break;
            }
        }
    }
    LocalSearchResult { tree: current.into_tree(), initial, value, trace, local_minimum }
}

/// Moves ≻-larger subtrees upward through similarity exchanges and returns the
/// tree rooted ≻-optimally with children sorted ≻-descending.
///
/// An exchange is kept only when it raises the code of the whole rooted tree,
/// which bounds the number of rounds.
pub fn extremal_canonicalize(t: &Tree) -> RootedTree {
    let first = canonical(t);
    if t.n() > 2000 {
        return first;
    }
    let dmax = t.max_degree();
    let mut best: Option<(Vec<u8>, RootedTree)> = None;
    for root in (0..t.n()).filter(|&v| t.degree(v) == dmax) {
        let r = raise_subtrees(RootedTree::new(t.clone(), root).normalized());
        let code = r.code_at(r.root());
        if best.as_ref().is_none_or(|(c, _)| code > *c) {
            best = Some((code, r));
        }
    }
    best.map(|(_, r)| r).unwrap_or(first)
}

fn raise_subtrees(mut current: RootedTree) -> RootedTree {
    'outer: loop {
        let codes = current.subtree_codes();
        let whole = &codes[current.root()];
        let n = current.n();
        for u in 0..n {
            if current.parent(u).is_none() {
                continue;
            }
            for v in 0..n {
                if current.parent(v).is_none() || current.depth(u) >= current.depth(v) {
                    continue;
                }
                if codes[u] >= codes[v] || current.is_ancestor(u, v) {
                    continue;
                }
                if !matches!(legal_similarity(&current, u, v), Ok(true)) {
                    continue;
                }
                let next = exchange(&current, u, v).expect("checked pair").normalized();
                if next.code_at(next.root()) > *whole {
                    current = next;
                    continue 'outer;
                }
            }
        }
        return current;
    }
}

/// Pairs `(u, v)` with `h(u) < h(v)` and `T_u ≺ T_v`.
pub fn level_order_violations(r: &RootedTree) -> Vec<(usize, usize)> {
    let codes = r.subtree_codes();
    let mut out = Vec::new();
    for u in 0..r.n() {
        for v in 0..r.n() {
            if r.depth(u) < r.depth(v) && codes[u] < codes[v] {
                out.push((u, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{assemble, BranchKind, FamilyConfig};

    #[test]
    fn isomorphic_swap_keeps_value() {
        let cfg = FamilyConfig::new(vec![(BranchKind::B(3), 2), (BranchKind::B(2), 1)]);
        let t = assemble(&cfg).unwrap();
        let kids = t.children(0).to_vec();
        let e = exchange(&t, kids[0], kids[1]).unwrap();
        assert!((abc_index(e.tree()) - abc_index(t.tree())).abs() < 1e-12);
        assert!(exchange(&t, 0, kids[0]).is_err());
        let g = t.children(kids[0])[0];
        assert!(exchange(&t, kids[0], g).is_err());
    }

    #[test]
    fn descent_on_random_trees() {
        use rand::{rngs::StdRng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let t = Tree::random(14, &mut rng);
            let res = local_search(&t, 500);
            assert!(res.value <= res.initial + 1e-12);
            assert!((abc_index(&res.tree) - res.value).abs() < 1e-9);
            let mut last = res.initial;
            for s in &res.trace {
                assert!(s.abc < last - ACCEPT);
                last = s.abc;
            }
        }
    }
}
