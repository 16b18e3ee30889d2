//! Trees, the edge weight, the ABC index and the ≻ order on rooted trees.

use std::cmp::Ordering;
use std::collections::VecDeque;

use rand::Rng;

use crate::error::{AbcError, Result};

/// `sqrt((x + y - 2) / (x y))` without argument checks.
#[inline]
pub fn weight(x: u32, y: u32) -> f64 {
    let (x, y) = (x as f64, y as f64);
    ((x + y - 2.0) / (x * y)).sqrt()
}

/// Weight of an edge joining vertices of degree `x` and `y`.
pub fn edge_weight(x: i64, y: i64) -> Result<f64> {
    if x <= 0 || y <= 0 {
        return Err(AbcError::NonPositiveDegree(x, y));
    }
    let (x, y) = (x as f64, y as f64);
    Ok(((x + y - 2.0) / (x * y)).sqrt())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(AbcError::InvalidTree("a tree needs at least one vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(AbcError::InvalidTree(format!(
                "{} edges for {} vertices",
                edges.len(),
                n
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(AbcError::InvalidTree(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(AbcError::InvalidTree(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        // n - 1 edges plus connectivity rules out cycles and repeated edges.
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return Err(AbcError::InvalidTree("graph is not connected".into()));
        }
        Ok(Tree { n, edges, adj })
    }

    pub fn from_parents(parent: &[usize]) -> Result<Self> {
        let n = parent.len() + 1;
        let edges = parent.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
        Tree::new(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Tree::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path is a tree")
    }

    pub fn star(n: usize) -> Self {
        Tree::new(n, (1..n).map(|i| (0, i)).collect()).expect("star is a tree")
    }

    /// Uniform labeled tree drawn through a random Prüfer sequence.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        if n <= 2 {
            return Tree::path(n.max(1));
        }
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        from_prufer(n, &seq)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn relabel(&self, perm: &[usize]) -> Tree {
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Tree::new(self.n, edges).expect("relabeling keeps a tree")
    }
}

/// Decodes a Prüfer sequence over labels `0..n`.
pub fn from_prufer(n: usize, seq: &[usize]) -> Tree {
    assert!(n >= 2 && seq.len() == n - 2);
    let mut deg = vec![1usize; n];
    for &s in seq {
        deg[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = 0;
    while deg[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &s in seq {
        edges.push((leaf, s));
        deg[s] -= 1;
        if s < ptr && deg[s] == 1 {
            leaf = s;
        } else {
            ptr += 1;
            while deg[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n - 1));
    Tree::new(n, edges).expect("Prüfer decoding yields a tree")
}

/// Neumaier-compensated, so large trees agree with closed forms to ~1e-12.
pub fn abc_index(t: &Tree) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &(u, v) in &t.edges {
        let x = weight(t.degree(u) as u32, t.degree(v) as u32);
        let s = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - s) + x } else { (x - s) + sum };
        sum = s;
    }
    sum + comp
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeSequence(Vec<u32>);

impl DegreeSequence {
    /// Sorts the input into non-increasing order and checks that a tree realizes it.
    pub fn new(mut degrees: Vec<u32>) -> Result<Self> {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        let count = degrees.len();
        if count < 2 {
            return Err(AbcError::InvalidDegreeSequence("fewer than two entries".into()));
        }
        if degrees.contains(&0) {
            return Err(AbcError::InvalidDegreeSequence("zero degree".into()));
        }
        let sum: u64 = degrees.iter().map(|&d| d as u64).sum();
        if sum != 2 * (count as u64 - 1) {
            return Err(AbcError::InvalidDegreeSequence(format!(
                "degree sum {sum} differs from {}",
                2 * (count - 1)
            )));
        }
        Ok(DegreeSequence(degrees))
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn degree_sequence(t: &Tree) -> Result<DegreeSequence> {
    DegreeSequence::new(t.degrees().into_iter().map(|d| d as u32).collect())
}

#[derive(Clone, Debug)]
pub struct RootedTree {
    tree: Tree,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
}

impl RootedTree {
    pub fn new(tree: Tree, root: usize) -> Self {
        let n = tree.n();
        assert!(root < n, "root {root} out of range");
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in tree.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    depth[w] = depth[u] + 1;
                    children[u].push(w);
                    queue.push_back(w);
                }
            }
        }
        RootedTree { tree, root, parent, children, depth, order }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Distance from the root.
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Vertices in breadth-first order from the root.
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_ancestor(&self, a: usize, mut v: usize) -> bool {
        loop {
            if v == a {
                return true;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        let mut size = 0;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            size += 1;
            stack.extend_from_slice(&self.children[u]);
        }
        size
    }

    /// Canonical codes of every subtree, indexed by vertex.
    pub fn subtree_codes(&self) -> Vec<Vec<u8>> {
        let mut codes: Vec<Vec<u8>> = vec![Vec::new(); self.n()];
        for &v in self.order.iter().rev() {
            let mut kids: Vec<&Vec<u8>> = self.children[v].iter().map(|&c| &codes[c]).collect();
            kids.sort_unstable_by(|a, b| b.cmp(a));
            let len = 4 + kids.iter().map(|k| k.len()).sum::<usize>();
            let mut code = Vec::with_capacity(len);
            code.extend_from_slice(&(self.children[v].len() as u32).to_be_bytes());
            for k in kids {
                code.extend_from_slice(k);
            }
            codes[v] = code;
        }
        codes
    }

    /// Code of the subtree hanging from `v`.
    pub fn code_at(&self, v: usize) -> Vec<u8> {
        subtree_code(&self.children, v)
    }

    /// Relabels vertices in breadth-first order with children sorted ≻-descending,
    /// so isomorphic rooted trees come out identical.
    pub fn normalized(&self) -> RootedTree {
        let codes = self.subtree_codes();
        let mut sorted_children = self.children.clone();
        for kids in &mut sorted_children {
            kids.sort_by(|&a, &b| codes[b].cmp(&codes[a]));
        }
        let mut label = vec![0; self.n()];
        let mut queue = VecDeque::from([self.root]);
        let mut next = 0;
        let mut edges = Vec::with_capacity(self.n().saturating_sub(1));
        while let Some(u) = queue.pop_front() {
            label[u] = next;
            next += 1;
            if let Some(p) = self.parent[u] {
                edges.push((label[p], label[u]));
            }
            queue.extend(sorted_children[u].iter().copied());
        }
        let tree = Tree::new(self.n(), edges).expect("relabeling keeps a tree");
        RootedTree::new(tree, 0)
    }
}

fn subtree_code(children: &[Vec<usize>], v: usize) -> Vec<u8> {
    // Iterative post-order; child codes are consumed by the parent.
    let mut stack = vec![(v, false)];
    let mut done: Vec<Vec<u8>> = Vec::new();
    while let Some((u, expanded)) = stack.pop() {
        if !expanded {
            stack.push((u, true));
            for &c in &children[u] {
                stack.push((c, false));
            }
            continue;
        }
        let k = children[u].len();
        let mut kids = done.split_off(done.len() - k);
        kids.sort_unstable_by(|a, b| b.cmp(a));
        let len = 4 + kids.iter().map(Vec::len).sum::<usize>();
        let mut code = Vec::with_capacity(len);
        code.extend_from_slice(&(k as u32).to_be_bytes());
        for kid in kids {
            code.extend_from_slice(&kid);
        }
        done.push(code);
    }
    done.pop().expect("root code")
}

/// Preorder of big-endian child counts with children in ≻-descending order.
///
/// The encoding is prefix-free, so byte order on codes is the ≻ order.
pub fn canonical_code(r: &RootedTree) -> Vec<u8> {
    r.code_at(r.root())
}

pub fn compare_subtrees(a: &RootedTree, b: &RootedTree) -> Ordering {
    canonical_code(a).cmp(&canonical_code(b))
}

/// Roots the tree at a maximum-degree vertex, preferring the ≻-largest rooting,
/// then the smallest id.
pub fn root_by_max_degree(t: &Tree) -> RootedTree {
    let delta = t.max_degree();
    let candidates: Vec<usize> = (0..t.n()).filter(|&v| t.degree(v) == delta).collect();
    if candidates.len() == 1 {
        return RootedTree::new(t.clone(), candidates[0]);
    }
    let mut best: Option<(Vec<u8>, usize)> = None;
    for &c in &candidates {
        let code = canonical_code(&RootedTree::new(t.clone(), c));
        if best.as_ref().is_none_or(|(b, _)| code > *b) {
            best = Some((code, c));
        }
    }
    RootedTree::new(t.clone(), best.expect("non-empty tree").1)
}

/// Isomorphism key of a free tree: the largest rooted code over its centers.
pub fn free_code(t: &Tree) -> Vec<u8> {
    centers(t)
        .into_iter()
        .map(|c| canonical_code(&RootedTree::new(t.clone(), c)))
        .max()
        .expect("tree has a center")
}

pub fn centers(t: &Tree) -> Vec<usize> {
    let n = t.n();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg = t.degrees();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in t.neighbors(leaf) {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}
