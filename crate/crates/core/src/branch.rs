//! Branch shapes hanging from a high-degree root and the trees they assemble into.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{AbcError, Result};
use crate::graph::{canonical_code, centers, weight, RootedTree, Tree};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchKind {
    /// Pendant path of two vertices.
    B1Minus,
    /// A vertex with `k` pendant paths of length two.
    B(u32),
    /// `B(k)` with one leaf extended by a vertex.
    BStar(u32),
    /// A vertex carrying two `B1Minus` and one `B(2)`.
    B3StarStar,
    /// A middle vertex carrying the listed branches, as (kind, count) pairs.
    C(Vec<(BranchKind, u32)>),
}

impl BranchKind {
    /// Pure `C_k`: `k` copies of `B(3)`.
    pub fn c(k: u32) -> Self {
        BranchKind::C(vec![(BranchKind::B(3), k)])
    }

    pub fn c_with(b3: u32, extras: Vec<(BranchKind, u32)>) -> Self {
        let mut parts = extras;
        parts.push((BranchKind::B(3), b3));
        BranchKind::C(normalize(parts))
    }

    pub fn size(&self) -> usize {
        match self {
            BranchKind::B1Minus => 2,
            BranchKind::B(k) => 1 + 2 * *k as usize,
            BranchKind::BStar(k) => 2 + 2 * *k as usize,
            BranchKind::B3StarStar => 10,
            BranchKind::C(parts) => {
                1 + parts.iter().map(|(p, c)| *c as usize * p.size()).sum::<usize>()
            }
        }
    }

    /// Degree of the branch root once it hangs from a parent.
    pub fn attached_degree(&self) -> u32 {
        match self {
            BranchKind::B1Minus => 2,
            BranchKind::B(k) | BranchKind::BStar(k) => k + 1,
            BranchKind::B3StarStar => 4,
            BranchKind::C(parts) => 1 + parts.iter().map(|(_, c)| c).sum::<u32>(),
        }
    }

    /// Sum of the edge weights strictly inside the branch.
    pub fn internal_cost(&self) -> f64 {
        match self {
            BranchKind::B1Minus => S,
            BranchKind::B(k) => 2.0 * *k as f64 * S,
            BranchKind::BStar(k) => (2 * *k + 1) as f64 * S,
            BranchKind::B3StarStar => weight(4, 3) + 8.0 * S,
            BranchKind::C(parts) => {
                let d = self.attached_degree();
                parts.iter().map(|(p, c)| *c as f64 * p.cost(d)).sum()
            }
        }
    }

    /// Internal cost plus the edge to a parent of degree `parent_degree`.
    pub fn cost(&self, parent_degree: u32) -> f64 {
        weight(parent_degree, self.attached_degree()) + self.internal_cost()
    }

    /// Number of `B(3)` children of a C-branch.
    pub fn b3_count(&self) -> u32 {
        match self {
            BranchKind::C(parts) => parts
                .iter()
                .filter(|(p, _)| *p == BranchKind::B(3))
                .map(|(_, c)| *c)
                .sum(),
            _ => 0,
        }
    }

    pub fn is_pure_c(&self) -> bool {
        matches!(self, BranchKind::C(parts) if parts.iter().all(|(p, _)| *p == BranchKind::B(3)))
    }

    pub fn validate(&self, unrestricted: bool) -> Result<()> {
        let bad = |m: String| Err(AbcError::InvalidBranch(m));
        match self {
            BranchKind::B1Minus | BranchKind::B3StarStar => Ok(()),
            BranchKind::B(k) => {
                if *k == 0 || (!unrestricted && *k > 5) {
                    bad(format!("B{k} outside 1..=5"))
                } else {
                    Ok(())
                }
            }
            BranchKind::BStar(k) => {
                if *k == 0 || (!unrestricted && !(2..=3).contains(k)) {
                    bad(format!("B{k}* outside 2..=3"))
                } else {
                    Ok(())
                }
            }
            BranchKind::C(parts) => {
                if parts.iter().all(|(_, c)| *c == 0) {
                    return bad("empty C-branch".into());
                }
                let mut b2 = 0;
                let mut extra = 0;
                for (p, c) in parts {
                    if matches!(p, BranchKind::C(_)) {
                        return bad("C-branches cannot nest".into());
                    }
                    p.validate(unrestricted)?;
                    if unrestricted {
                        continue;
                    }
                    match p {
                        BranchKind::B(3) => {}
                        BranchKind::B(2) => b2 += c,
                        BranchKind::BStar(_)
                        | BranchKind::B3StarStar
                        | BranchKind::B(4)
                        | BranchKind::B(5) => extra += c,
                        _ => return bad(format!("{p} not allowed inside a C-branch")),
                    }
                }
                if b2 > 11 {
                    return bad(format!("{b2} B2 inside a C-branch"));
                }
                if extra > 1 {
                    return bad("more than one exceptional part inside a C-branch".into());
                }
                Ok(())
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            BranchKind::B1Minus => json!({"kind": "B1-"}),
            BranchKind::B(k) => json!({"kind": "B", "k": k}),
            BranchKind::BStar(k) => json!({"kind": "B*", "k": k}),
            BranchKind::B3StarStar => json!({"kind": "B3**"}),
            BranchKind::C(parts) => {
                let extras: Vec<Value> = parts
                    .iter()
                    .filter(|(p, _)| *p != BranchKind::B(3))
                    .map(|(p, c)| with_count(p.to_json(), *c))
                    .collect();
                json!({"kind": "C", "b3": self.b3_count(), "extras": extras})
            }
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| AbcError::InvalidConfig(format!("{m} in {v}"));
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
        let k = || {
            v.get("k")
                .and_then(Value::as_u64)
                .map(|k| k as u32)
                .ok_or_else(|| bad("missing k"))
        };
        match kind {
            "B1-" => Ok(BranchKind::B1Minus),
            "B" => Ok(BranchKind::B(k()?)),
            "B*" => Ok(BranchKind::BStar(k()?)),
            "B3**" => Ok(BranchKind::B3StarStar),
            "C" => {
                let b3 = v.get("b3").and_then(Value::as_u64).unwrap_or(0) as u32;
                let mut parts = Vec::new();
                if let Some(extras) = v.get("extras") {
                    let extras = extras.as_array().ok_or_else(|| bad("extras not a list"))?;
                    for e in extras {
                        parts.push((BranchKind::from_json(e)?, count_of(e)?));
                    }
                }
                Ok(BranchKind::c_with(b3, parts))
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchKind::B1Minus => write!(f, "B1-"),
            BranchKind::B(k) => write!(f, "B{k}"),
            BranchKind::BStar(k) => write!(f, "B{k}*"),
            BranchKind::B3StarStar => write!(f, "B3**"),
            BranchKind::C(parts) => {
                write!(f, "C{}", self.b3_count())?;
                for (p, c) in parts.iter().filter(|(p, _)| *p != BranchKind::B(3)) {
                    if *c == 1 {
                        write!(f, "+{p}")?;
                    } else {
                        write!(f, "+{c}x{p}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn with_count(mut v: Value, count: u32) -> Value {
    v["count"] = json!(count);
    v
}

fn count_of(v: &Value) -> Result<u32> {
    match v.get("count") {
        None => Ok(1),
        Some(c) => c
            .as_u64()
            .map(|c| c as u32)
            .ok_or_else(|| AbcError::InvalidConfig(format!("bad count in {v}"))),
    }
}

/// Merges equal kinds, drops zero counts and sorts.
fn normalize(parts: Vec<(BranchKind, u32)>) -> Vec<(BranchKind, u32)> {
    let mut merged: BTreeMap<BranchKind, u32> = BTreeMap::new();
    for (k, c) in parts {
        *merged.entry(k).or_default() += c;
    }
    merged.into_iter().filter(|(_, c)| *c > 0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FamilyConfig {
    branches: Vec<(BranchKind, u32)>,
}

impl FamilyConfig {
    pub fn new(branches: Vec<(BranchKind, u32)>) -> Self {
        FamilyConfig { branches: normalize(branches) }
    }

    pub fn branches(&self) -> &[(BranchKind, u32)] {
        &self.branches
    }

    pub fn n(&self) -> usize {
        1 + self.branches.iter().map(|(k, c)| *c as usize * k.size()).sum::<usize>()
    }

    pub fn root_degree(&self) -> u32 {
        self.branches.iter().map(|(_, c)| c).sum()
    }

    pub fn count(&self, kind: &BranchKind) -> u32 {
        self.branches.iter().filter(|(k, _)| k == kind).map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn validate(&self, unrestricted: bool) -> Result<()> {
        if self.branches.is_empty() {
            return Err(AbcError::InvalidConfig("no branches".into()));
        }
        for (k, _) in &self.branches {
            k.validate(unrestricted)?;
        }
        Ok(())
    }

    /// Counting constraints on the whole tree: no `B1`, at most 11 `B2`, 4 `B4`, one `B5`,
    /// one starred or `B3**` branch, 3 `B1-`, and pure C-branches balanced
    /// to within one `B3` next to at most one irregular C-branch.
    pub fn check_constraints(&self) -> Result<()> {
        self.validate(false)?;
        let mut tally: BTreeMap<BranchKind, u32> = BTreeMap::new();
        let mut pure = Vec::new();
        let mut irregular = 0;
        for (k, c) in &self.branches {
            if let BranchKind::C(parts) = k {
                if k.is_pure_c() {
                    pure.push(k.b3_count());
                } else {
                    irregular += c;
                }
                for (p, pc) in parts {
                    *tally.entry(p.clone()).or_default() += pc * c;
                }
            } else {
                *tally.entry(k.clone()).or_default() += c;
            }
        }
        let get = |k: BranchKind| tally.get(&k).copied().unwrap_or(0);
        let fail = |m: String| Err(AbcError::InvalidConfig(m));
        if get(BranchKind::B(1)) > 0 {
            return fail("B1 puts a degree-2 vertex next to its father".into());
        }
        if get(BranchKind::B(2)) > 11 {
            return fail("more than 11 B2".into());
        }
        if get(BranchKind::B(4)) > 4 {
            return fail("more than 4 B4".into());
        }
        if get(BranchKind::B(5)) > 1 {
            return fail("more than one B5".into());
        }
        let special = get(BranchKind::BStar(2)) + get(BranchKind::BStar(3)) + get(BranchKind::B3StarStar);
        if special > 1 {
            return fail("more than one starred or B3** branch".into());
        }
        if get(BranchKind::B1Minus) > 3 {
            return fail("more than 3 B1-".into());
        }
        if irregular > 1 {
            return fail("more than one irregular C-branch".into());
        }
        if let (Some(lo), Some(hi)) = (pure.iter().min(), pure.iter().max()) {
            if hi - lo > 1 {
                return fail(format!("C-branch sizes {lo} and {hi} differ by more than one"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let branches: Vec<Value> =
            self.branches.iter().map(|(k, c)| with_count(k.to_json(), *c)).collect();
        json!({ "branches": branches })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let list = v
            .get("branches")
            .and_then(Value::as_array)
            .ok_or_else(|| AbcError::InvalidConfig("missing `branches` list".into()))?;
        let mut branches = Vec::new();
        for b in list {
            branches.push((BranchKind::from_json(b)?, count_of(b)?));
        }
        Ok(FamilyConfig::new(branches))
    }

    pub fn parse(input: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(input).map_err(|e| AbcError::InvalidConfig(e.to_string()))?;
        FamilyConfig::from_json(&v)
    }
}

impl fmt::Display for FamilyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.branches.iter().map(|(k, c)| format!("{c}x{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for FamilyConfig {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_json().serialize(s)
    }
}

struct Builder {
    edges: Vec<(usize, usize)>,
    next: usize,
}

impl Builder {
    fn vertex(&mut self, parent: Option<usize>) -> usize {
        let v = self.next;
        self.next += 1;
        if let Some(p) = parent {
            self.edges.push((p, v));
        }
        v
    }

    fn pendant_path(&mut self, parent: usize, len: usize) {
        let mut p = parent;
        for _ in 0..len {
            p = self.vertex(Some(p));
        }
    }

    fn emit(&mut self, kind: &BranchKind, parent: Option<usize>) -> usize {
        let v = self.vertex(parent);
        match kind {
            BranchKind::B1Minus => self.pendant_path(v, 1),
            BranchKind::B(k) => (0..*k).for_each(|_| self.pendant_path(v, 2)),
            BranchKind::BStar(k) => {
                self.pendant_path(v, 3);
                (1..*k).for_each(|_| self.pendant_path(v, 2));
            }
            BranchKind::B3StarStar => {
                self.emit(&BranchKind::B(2), Some(v));
                self.pendant_path(v, 2);
                self.pendant_path(v, 2);
            }
            BranchKind::C(parts) => {
                for (p, c) in ordered(parts) {
                    for _ in 0..*c {
                        self.emit(p, Some(v));
                    }
                }
            }
        }
        v
    }
}

/// Parts sorted ≻-descending by shape.
fn ordered(parts: &[(BranchKind, u32)]) -> Vec<&(BranchKind, u32)> {
    let mut keyed: Vec<(Vec<u8>, &(BranchKind, u32))> =
        parts.iter().map(|p| (shape_code(&p.0), p)).collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0));
    keyed.into_iter().map(|(_, p)| p).collect()
}

/// Canonical code of the branch with a phantom parent edge counted in the root degree.
fn shape_code(kind: &BranchKind) -> Vec<u8> {
    let mut b = Builder { edges: Vec::new(), next: 0 };
    let top = b.vertex(None);
    b.emit(kind, Some(top));
    let tree = Tree::new(b.next, b.edges).expect("branch is a tree");
    let r = RootedTree::new(tree, top);
    canonical_code(&r)
}

/// The branch as a rooted tree with root 0.
pub fn build_branch(kind: &BranchKind, unrestricted: bool) -> Result<RootedTree> {
    kind.validate(unrestricted)?;
    let mut b = Builder { edges: Vec::new(), next: 0 };
    let root = b.emit(kind, None);
    let tree = Tree::new(b.next, b.edges)?;
    Ok(RootedTree::new(tree, root))
}

/// Root vertex 0 adjacent to the root of every branch, branches in ≻-descending order.
pub fn assemble(config: &FamilyConfig) -> Result<RootedTree> {
    config.validate(true)?;
    let mut b = Builder { edges: Vec::with_capacity(config.n()), next: 0 };
    let root = b.vertex(None);
    for (kind, count) in ordered(&config.branches) {
        for _ in 0..*count {
            b.emit(kind, Some(root));
        }
    }
    let tree = Tree::new(b.next, b.edges)?;
    Ok(RootedTree::new(tree, root))
}

pub fn closed_form_abc(config: &FamilyConfig) -> f64 {
    let d = config.root_degree();
    config.branches.iter().map(|(k, c)| *c as f64 * k.cost(d)).sum()
}

/// Inverse of [`assemble`]; `None` when no root makes the tree a catalog family tree.
pub fn recognize(t: &Tree) -> Option<FamilyConfig> {
    let n = t.n();
    if n < 3 {
        return None;
    }
    // a family root has eccentricity at most 4, so it sits within distance
    // 2 of a center; large trees only try those vertices
    let mut candidates: Vec<usize> = if n <= 2000 { (0..n).collect() } else { near_centers(t, 2) };
    candidates.sort_by_key(|&v| (std::cmp::Reverse(t.degree(v)), v));
    for root in candidates {
        let r = RootedTree::new(t.clone(), root);
        let mut parts = Vec::with_capacity(r.children(root).len());
        let ok = r.children(root).iter().all(|&c| match classify(&r, c, true) {
            Some(k) => {
                parts.push((k, 1));
                true
            }
            None => false,
        });
        if ok {
            let config = FamilyConfig::new(parts);
            if config.validate(false).is_ok() {
                return Some(config);
            }
        }
    }
    None
}

fn near_centers(t: &Tree, radius: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; t.n()];
    let mut queue = std::collections::VecDeque::new();
    for c in centers(t) {
        dist[c] = 0;
        queue.push_back(c);
    }
    let mut out = Vec::new();
    while let Some(v) = queue.pop_front() {
        out.push(v);
        if dist[v] == radius {
            continue;
        }
        for &u in t.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    out
}

fn is_leaf(r: &RootedTree, v: usize) -> bool {
    r.children(v).is_empty()
}

/// Pendant path of `len` vertices below and including `v`.
fn is_path(r: &RootedTree, v: usize, len: usize) -> bool {
    let mut v = v;
    for i in 0..len {
        let kids = r.children(v);
        if i + 1 == len {
            return kids.is_empty();
        }
        if kids.len() != 1 {
            return false;
        }
        v = kids[0];
    }
    false
}

fn classify(r: &RootedTree, v: usize, allow_c: bool) -> Option<BranchKind> {
    let kids = r.children(v);
    if kids.is_empty() {
        return None;
    }
    if kids.len() == 1 && is_leaf(r, kids[0]) {
        return Some(BranchKind::B1Minus);
    }
    let two = kids.iter().filter(|&&c| is_path(r, c, 2)).count();
    let three = kids.iter().filter(|&&c| is_path(r, c, 3)).count();
    let k = kids.len() as u32;
    if two == kids.len() {
        return Some(BranchKind::B(k));
    }
    if three == 1 && two + 1 == kids.len() && k >= 2 {
        return Some(BranchKind::BStar(k));
    }
    if kids.len() == 3 && two == 2 {
        let other = kids.iter().find(|&&c| !is_path(r, c, 2)).copied()?;
        if classify(r, other, false) == Some(BranchKind::B(2)) {
            return Some(BranchKind::B3StarStar);
        }
    }
    if !allow_c {
        return None;
    }
    let mut parts = Vec::with_capacity(kids.len());
    for &c in kids {
        parts.push((classify(r, c, false)?, 1));
    }
    Some(BranchKind::C(normalize(parts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{abc_index, degree_sequence};

    #[test]
    fn branch_sizes() {
        let b3 = build_branch(&BranchKind::B(3), false).unwrap();
        assert_eq!(b3.n(), 7);
        assert_eq!(degree_sequence(b3.tree()).unwrap().degrees(), &[3, 2, 2, 2, 1, 1, 1]);
        assert_eq!(build_branch(&BranchKind::B3StarStar, false).unwrap().n(), 10);
        assert_eq!(build_branch(&BranchKind::c(52), false).unwrap().n(), 365);
        assert!(build_branch(&BranchKind::B(6), false).is_err());
        assert!(build_branch(&BranchKind::B(6), true).is_ok());
        assert!(build_branch(&BranchKind::BStar(4), false).is_err());
    }

    #[test]
    fn landmark_config() {
        let cfg = FamilyConfig::new(vec![(BranchKind::B(3), 43), (BranchKind::B3StarStar, 1)]);
        let t = assemble(&cfg).unwrap();
        assert_eq!(t.n(), 312);
        assert_eq!(t.tree().degree(0), 44);
        assert!((abc_index(t.tree()) - closed_form_abc(&cfg)).abs() < 1e-10);
        assert_eq!(recognize(t.tree()), Some(cfg));
    }

    #[test]
    fn smallest_config() {
        let cfg = FamilyConfig::new(vec![(BranchKind::B1Minus, 1)]);
        let t = assemble(&cfg).unwrap();
        assert_eq!(t.n(), 3);
        assert!((closed_form_abc(&cfg) - 2f64.sqrt()).abs() < 1e-15);
        assert!((abc_index(t.tree()) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"branches":[{"kind":"B","k":3,"count":43},{"kind":"B3**","count":1},{"kind":"C","b3":52,"extras":[],"count":10}]}"#;
        let cfg = FamilyConfig::parse(text).unwrap();
        assert_eq!(cfg.n(), 1 + 43 * 7 + 10 + 3650);
        assert_eq!(FamilyConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let with_extras = FamilyConfig::new(vec![(
            BranchKind::c_with(40, vec![(BranchKind::B(2), 3), (BranchKind::B(4), 1)]),
            2,
        )]);
        assert_eq!(FamilyConfig::from_json(&with_extras.to_json()).unwrap(), with_extras);
    }

    #[test]
    fn constraint_checks() {
        let ok = FamilyConfig::new(vec![(BranchKind::c(52), 3), (BranchKind::c(51), 2)]);
        assert!(ok.check_constraints().is_ok());
        let unbalanced = FamilyConfig::new(vec![(BranchKind::c(52), 3), (BranchKind::c(50), 2)]);
        assert!(unbalanced.check_constraints().is_err());
        let many_b2 = FamilyConfig::new(vec![(BranchKind::B(2), 12)]);
        assert!(many_b2.check_constraints().is_err());
    }
}
