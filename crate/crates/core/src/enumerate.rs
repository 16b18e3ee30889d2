//! Generation of all free trees of a given order and exhaustive minimization.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AbcError, Result};
use crate::graph::{abc_index, degree_sequence, free_code, root_by_max_degree, DegreeSequence, Tree};

pub const DEFAULT_CAP: usize = 22;
pub const DEGREE_SEQUENCE_CAP: usize = 18;
pub const TIE_TOLERANCE: f64 = 1e-10;

const BATCH: usize = 1 << 14;

/// Free trees of order `n`, one per isomorphism class, as level sequences
/// in the Wright–Richmond–Odlyzko–McKay order.
pub struct FreeTrees {
    n: usize,
    layout: Option<Vec<usize>>,
    small: Option<Tree>,
}

pub fn free_trees(n: usize) -> Result<FreeTrees> {
    free_trees_with_cap(n, DEFAULT_CAP)
}

pub fn free_trees_with_cap(n: usize, cap: usize) -> Result<FreeTrees> {
    if n == 0 {
        return Err(AbcError::OrderTooSmall { n, min: 1 });
    }
    if n > cap {
        return Err(AbcError::Capacity { n, cap });
    }
    if n <= 2 {
        return Ok(FreeTrees { n, layout: None, small: Some(Tree::path(n)) });
    }
    let mut layout: Vec<usize> = (0..=n / 2).collect();
    layout.extend(1..n.div_ceil(2));
    Ok(FreeTrees { n, layout: Some(layout), small: None })
}

impl FreeTrees {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Next level sequence; the root sits at level 0.
    pub fn next_layout(&mut self) -> Option<Vec<usize>> {
        let current = self.layout.take()?;
        let layout = next_tree(current)?;
        self.layout = next_rooted_tree(&layout, None);
        Some(layout)
    }
}

impl Iterator for FreeTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if let Some(t) = self.small.take() {
            return Some(t);
        }
        self.next_layout().map(|l| layout_to_tree(&l))
    }
}

fn next_rooted_tree(pred: &[usize], p: Option<usize>) -> Option<Vec<usize>> {
    let p = match p {
        Some(p) => p,
        None => {
            let mut p = pred.len() - 1;
            while pred[p] == 1 {
                p -= 1;
            }
            p
        }
    };
    if p == 0 {
        return None;
    }
    let mut q = p - 1;
    while pred[q] != pred[p] - 1 {
        q -= 1;
    }
    let mut result = pred.to_vec();
    for i in p..result.len() {
        result[i] = result[i - p + q];
    }
    Some(result)
}

fn split_tree(layout: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let m = layout
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 1)
        .nth(1)
        .map_or(layout.len(), |(i, _)| i);
    let left = layout[1..m].iter().map(|l| l - 1).collect();
    let mut rest = vec![0];
    rest.extend_from_slice(&layout[m..]);
    (left, rest)
}

fn next_tree(candidate: Vec<usize>) -> Option<Vec<usize>> {
    let (left, rest) = split_tree(&candidate);
    let lh = left.iter().copied().max().unwrap_or(0);
    let rh = rest.iter().copied().max().unwrap_or(0);
    let mut valid = rh >= lh;
    if valid && rh == lh
        && (left.len() > rest.len() || (left.len() == rest.len() && left > rest)) {
            valid = false;
        }
    if valid {
        return Some(candidate);
    }
    let p = left.len();
    let mut next = next_rooted_tree(&candidate, Some(p))?;
    if candidate[p] > 2 {
        let (new_left, _) = split_tree(&next);
        let h = new_left.iter().copied().max().unwrap_or(0);
        let len = next.len();
        for (i, level) in (1..=h + 1).enumerate() {
            next[len - (h + 1) + i] = level;
        }
    }
    Some(next)
}

/// Parent array of a level sequence (entry 0 is the root and has no parent).
pub fn layout_parents(layout: &[usize]) -> Vec<usize> {
    let mut parents = vec![0; layout.len()];
    let mut stack: Vec<usize> = Vec::with_capacity(layout.len());
    for (i, &level) in layout.iter().enumerate() {
        while let Some(&j) = stack.last() {
            if layout[j] >= level {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&j) = stack.last() {
            parents[i] = j;
        }
        stack.push(i);
    }
    parents
}

pub fn layout_to_tree(layout: &[usize]) -> Tree {
    let parents = layout_parents(layout);
    let edges = (1..layout.len()).map(|i| (parents[i], i)).collect();
    Tree::new(layout.len(), edges).expect("level sequence describes a tree")
}

fn layout_abc(layout: &[usize], deg: &mut Vec<u32>) -> f64 {
    let parents = layout_parents(layout);
    deg.clear();
    deg.resize(layout.len(), 0);
    for i in 1..layout.len() {
        deg[i] += 1;
        deg[parents[i]] += 1;
    }
    (1..layout.len())
        .map(|i| crate::graph::weight(deg[i], deg[parents[i]]))
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub best_value: f64,
    #[serde(serialize_with = "serialize_trees")]
    pub witnesses: Vec<Tree>,
    pub examined: u64,
    pub elapsed_ms: u128,
}

fn serialize_trees<S: serde::Serializer>(
    trees: &[Tree],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let values: Vec<serde_json::Value> = trees.iter().map(crate::io::to_json_value).collect();
    values.serialize(s)
}

#[derive(Clone, Default)]
struct Best {
    value: f64,
    layouts: Vec<Vec<usize>>,
}

impl Best {
    fn empty() -> Self {
        Best { value: f64::INFINITY, layouts: Vec::new() }
    }

    fn offer(&mut self, value: f64, layout: &[usize]) {
        if value < self.value - TIE_TOLERANCE {
            self.value = value;
            self.layouts.clear();
            self.layouts.push(layout.to_vec());
        } else if value <= self.value + TIE_TOLERANCE {
            self.value = self.value.min(value);
            self.layouts.push(layout.to_vec());
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if other.value < self.value - TIE_TOLERANCE {
            return other.merge(self);
        }
        if other.value <= self.value + TIE_TOLERANCE {
            self.value = self.value.min(other.value);
            self.layouts.extend(other.layouts);
        }
        let v = self.value;
        // a merge can lower the minimum; drop entries that fell out of the window
        self.layouts.retain(|l| layout_abc(l, &mut Vec::new()) <= v + TIE_TOLERANCE);
        self
    }
}

/// Global minimum of the ABC index over all trees of order `n`, with every
/// tree within the tie tolerance. Runs on the current rayon pool; the result
/// does not depend on the number of workers.
pub fn brute_force_min(n: usize) -> Result<SearchResult> {
    brute_force_min_with_cap(n, DEFAULT_CAP)
}

pub fn brute_force_min_with_cap(n: usize, cap: usize) -> Result<SearchResult> {
    if n < 3 {
        return Err(AbcError::OrderTooSmall { n, min: 3 });
    }
    let start = Instant::now();
    let mut stream = free_trees_with_cap(n, cap)?;
    let mut best = Best::empty();
    let mut examined = 0u64;
    loop {
        let batch: Vec<Vec<usize>> = stream.take_layouts(BATCH);
        if batch.is_empty() {
            break;
        }
        examined += batch.len() as u64;
        let local = batch
            .par_chunks(1024)
            .map(|chunk| {
                let mut b = Best::empty();
                let mut deg = Vec::new();
                for l in chunk {
                    b.offer(layout_abc(l, &mut deg), l);
                }
                b
            })
            .reduce(Best::empty, Best::merge);
        best = best.merge(local);
    }
    let mut witnesses: Vec<(Vec<u8>, Tree)> = best
        .layouts
        .iter()
        .map(|l| {
            let t = root_by_max_degree(&layout_to_tree(l)).normalized().into_tree();
            (free_code(&t), t)
        })
        .collect();
    witnesses.sort_by(|a, b| b.0.cmp(&a.0));
    witnesses.dedup_by(|a, b| a.0 == b.0);
    let best_value = witnesses
        .iter()
        .map(|(_, t)| abc_index(t))
        .fold(f64::INFINITY, f64::min);
    witnesses.retain(|(_, t)| abc_index(t) <= best_value + TIE_TOLERANCE);
    Ok(SearchResult {
        n,
        best_value,
        witnesses: witnesses.into_iter().map(|(_, t)| t).collect(),
        examined,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

impl FreeTrees {
    fn take_layouts(&mut self, max: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(max.min(1024));
        while out.len() < max {
            match self.next_layout() {
                Some(l) => out.push(l),
                None => break,
            }
        }
        out
    }
}

/// Minimum ABC index within each degree-sequence class of order `n`.
pub fn min_by_degree_sequence(n: usize) -> Result<BTreeMap<DegreeSequence, (f64, Tree)>> {
    if n < 3 {
        return Err(AbcError::OrderTooSmall { n, min: 3 });
    }
    if n > DEGREE_SEQUENCE_CAP {
        return Err(AbcError::Capacity { n, cap: DEGREE_SEQUENCE_CAP });
    }
    let mut out: BTreeMap<DegreeSequence, (f64, Tree)> = BTreeMap::new();
    for t in free_trees(n)? {
        let seq = degree_sequence(&t)?;
        let value = abc_index(&t);
        match out.get(&seq) {
            Some((v, _)) if *v <= value => {}
            _ => {
                out.insert(seq, (value, t));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| free_trees(n).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn capacity() {
        assert!(matches!(free_trees(23), Err(AbcError::Capacity { .. })));
        assert!(free_trees(0).is_err());
        assert!(free_trees_with_cap(23, 23).is_ok());
    }

    #[test]
    fn small_minimum() {
        let r = brute_force_min(5).unwrap();
        assert!((r.best_value - 2f64.sqrt() * 2.0).abs() < 1e-12);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.examined, 3);
        let r = brute_force_min(3).unwrap();
        assert!((r.best_value - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn level_sequences_are_trees() {
        for l in [vec![0, 1, 2, 1, 2], vec![0, 1, 1, 1]] {
            let t = layout_to_tree(&l);
            assert_eq!(t.n(), l.len());
        }
    }
}
