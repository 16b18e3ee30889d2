//! Greedy trees, structured search over root-plus-branches trees, and the
//! linear bounds on the minimum ABC index.

use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::branch::{assemble, closed_form_abc, BranchKind, FamilyConfig};
use crate::error::{AbcError, Result};
use crate::graph::{canonical_code, free_code, weight, DegreeSequence, RootedTree, Tree};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;
const B3_INTERNAL: f64 = 6.0 * S;
const TIE: f64 = 1e-10;

/// Largest B3 count of a C-branch considered by the search.
pub const MAX_C: u32 = 142;
/// Largest order handled by the exhaustive unconstrained search.
pub const UNCONSTRAINED_CAP: usize = 120;

/// Breadth-first realization: the root takes the largest degree and the
/// remaining degrees fill child slots in descending order.
pub fn greedy_tree(seq: &DegreeSequence) -> RootedTree {
    let d = seq.degrees();
    let n = d.len();
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let slots = if v == 0 { d[0] } else { d[v] - 1 } as usize;
        for _ in 0..slots {
            edges.push((v, next));
            queue.push_back(next);
            next += 1;
        }
    }
    let tree = Tree::new(n, edges).expect("valid degree sequence realizes a tree");
    RootedTree::new(tree, 0)
}

/// `(1/365) sqrt(1/53) (1 + 26 sqrt(55) + 156 sqrt(106))`.
pub fn c0() -> f64 {
    (1.0 + 26.0 * 55f64.sqrt() + 156.0 * 106f64.sqrt()) / (365.0 * 53f64.sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaBounds {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub c0: f64,
}

/// `c0 n ∓ 365 c0 + (51/2) sqrt(1/53)` plus the second-order term of
/// `sqrt(1 + 51/(r+1))`, with `r = floor((n-1)/365)`.
pub fn gamma_bounds(n: usize) -> Result<GammaBounds> {
    if n < 3 {
        return Err(AbcError::OrderTooSmall { n, min: 3 });
    }
    let c0 = c0();
    let r = ((n - 1) / 365) as f64;
    let inv53 = 1.0 / 53f64.sqrt();
    let second = 2601.0 / 8.0 * inv53;
    let base = 25.5 * inv53;
    let nf = n as f64;
    Ok(GammaBounds {
        n,
        lower: c0 * nf - 365.0 * c0 + base - second / r.max(1.0),
        upper: c0 * nf + 365.0 * c0 + base - second / (r + 1.0),
        c0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySearchResult {
    pub n: usize,
    pub constrained: bool,
    pub best_config: FamilyConfig,
    pub best_value: f64,
    pub ties: Vec<FamilyConfig>,
    /// C-branches adjacent to the root.
    pub r: u32,
    /// B3-branches adjacent to the root.
    pub s: u32,
    /// Set when the structural lemmas behind the constraints need a larger order.
    pub advisory: bool,
    pub evaluated: u64,
    pub elapsed_ms: u128,
}

fn count_c(config: &FamilyConfig) -> (u32, u32) {
    let r = config
        .branches()
        .iter()
        .filter(|(k, _)| matches!(k, BranchKind::C(_)))
        .map(|(_, c)| c)
        .sum();
    (r, config.count(&BranchKind::B(3)))
}

/// Minimizes the closed-form ABC index over root-plus-branches trees of order `n`.
///
/// With `constrained`, pure C-branches are balanced to within one B3, at most
/// one C-branch carries other ending branches, and the counting limits on
/// ending branches and C-branch sizes apply. Without it, every multiset of
/// catalog branches is searched exhaustively (orders up to [`UNCONSTRAINED_CAP`]).
pub fn family_search(n: usize, constrained: bool) -> Result<FamilySearchResult> {
    if n < 3 {
        return Err(AbcError::OrderTooSmall { n, min: 3 });
    }
    let start = Instant::now();
    let (mut found, evaluated) = if constrained {
        let (c, e) = ConstrainedSearch::new(n).run();
        match c {
            Some(found) => (found, e),
            None => unconstrained(n)?,
        }
    } else {
        unconstrained(n)?
    };
    if found.len() > 1 {
        let mut keyed: Vec<(Vec<u8>, Vec<u8>, FamilyConfig)> = found
            .into_iter()
            .map(|c| {
                let t = assemble(&c).expect("search configs assemble");
                (canonical_code(&t), free_code(t.tree()), c)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0));
        // the same tree can be read from several roots; keep the ≻-largest reading
        let mut seen = BTreeSet::new();
        keyed.retain(|(_, free, _)| seen.insert(free.clone()));
        found = keyed.into_iter().map(|(_, _, c)| c).collect();
    }
    let best_config = found[0].clone();
    let (r, s) = count_c(&best_config);
    Ok(FamilySearchResult {
        n,
        constrained,
        best_value: closed_form_abc(&best_config),
        best_config,
        ties: found,
        r,
        s,
        advisory: n < 40,
        evaluated,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub r: u32,
    pub s: u32,
    pub best_value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Constrained family search for every order in `from..=to`.
pub fn transition_scan(from: usize, to: usize) -> Result<Vec<ScanRow>> {
    if from > to {
        return Err(AbcError::InvalidConfig(format!("empty range {from}..={to}")));
    }
    (from.max(3)..=to)
        .into_par_iter()
        .map(|n| {
            let res = family_search(n, true)?;
            let g = gamma_bounds(n)?;
            Ok(ScanRow { n, r: res.r, s: res.s, best_value: res.best_value, lower: g.lower, upper: g.upper })
        })
        .collect()
}

/// First order of each residue class mod 7 from which every scanned order has `r ≥ 1`.
pub fn transition_points(rows: &[ScanRow]) -> [Option<usize>; 7] {
    std::array::from_fn(|res| {
        let mut first = None;
        for row in rows.iter().filter(|r| r.n % 7 == res).rev() {
            if row.r >= 1 {
                first = Some(row.n);
            } else {
                break;
            }
        }
        first
    })
}

// ---------------------------------------------------------------------------
// constrained search

#[derive(Clone, Debug)]
struct Extras {
    parts: Vec<(BranchKind, u32)>,
    count: u32,
    size: usize,
}

impl Extras {
    fn new(parts: Vec<(BranchKind, u32)>) -> Self {
        let parts: Vec<(BranchKind, u32)> = parts.into_iter().filter(|(_, c)| *c > 0).collect();
        let count = parts.iter().map(|(_, c)| c).sum();
        let size = parts.iter().map(|(k, c)| *c as usize * k.size()).sum();
        Extras { parts, count, size }
    }

    fn cost(&self, d: u32) -> f64 {
        self.parts.iter().map(|(k, c)| *c as f64 * k.cost(d)).sum()
    }

    fn tally(&self, kind: &BranchKind) -> u32 {
        self.parts.iter().filter(|(k, _)| k == kind).map(|(_, c)| c).sum()
    }
}

/// Ending branches other than B3 placed at the root, plus those hosted by
/// the single irregular C-branch.
#[derive(Clone, Debug)]
struct Placement {
    root: Extras,
    free: Option<(usize, Extras)>,
}

fn special_kinds() -> [BranchKind; 3] {
    [BranchKind::BStar(2), BranchKind::BStar(3), BranchKind::B3StarStar]
}

fn placements() -> (Vec<Placement>, Vec<Extras>) {
    let mut root_options = Vec::new();
    for b1m in 0..=3 {
        for b2 in 0..=11 {
            let mut tails: Vec<Vec<(BranchKind, u32)>> = Vec::new();
            for b4 in 0..=4 {
                for b5 in 0..=1 {
                    tails.push(vec![(BranchKind::B(4), b4), (BranchKind::B(5), b5)]);
                }
            }
            for sp in special_kinds() {
                tails.push(vec![(sp, 1)]);
            }
            for tail in tails {
                let mut parts = vec![(BranchKind::B1Minus, b1m), (BranchKind::B(2), b2)];
                parts.extend(tail);
                root_options.push(Extras::new(parts));
            }
        }
    }
    let mut free_options = Vec::new();
    for b2 in 0..=11 {
        let mut tails: Vec<Option<BranchKind>> = vec![None];
        tails.extend(special_kinds().into_iter().map(Some));
        tails.push(Some(BranchKind::B(4)));
        tails.push(Some(BranchKind::B(5)));
        for tail in tails {
            let mut parts = vec![(BranchKind::B(2), b2)];
            if let Some(t) = tail {
                parts.push((t, 1));
            }
            let e = Extras::new(parts);
            if e.count > 0 {
                free_options.push(e);
            }
        }
    }
    let mut out = Vec::new();
    for root in &root_options {
        out.push(Placement { root: root.clone(), free: None });
        for (fi, free) in free_options.iter().enumerate() {
            let joint = |k: &BranchKind| root.tally(k) + free.tally(k);
            if root.tally(&BranchKind::B(2)) > 0 && free.tally(&BranchKind::B(2)) > 0 {
                continue;
            }
            let special: u32 = special_kinds().iter().map(joint).sum();
            let b4 = joint(&BranchKind::B(4));
            let b5 = joint(&BranchKind::B(5));
            if special > 1 || b4 > 4 || b5 > 1 || (special > 0 && b4 + b5 > 0) {
                continue;
            }
            out.push(Placement { root: root.clone(), free: Some((fi, free.clone())) });
        }
    }
    (out, free_options)
}

/// Lower convex hull of (size, cost) points sorted by size.
#[derive(Clone, Debug, Default)]
struct Hull {
    pts: Vec<(f64, f64)>,
}

impl Hull {
    fn new(mut pts: Vec<(f64, f64)>) -> Self {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts.dedup_by(|a, b| a.0 == b.0);
        let mut h: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            while h.len() >= 2 {
                let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
                if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) <= 0.0 {
                    h.pop();
                } else {
                    break;
                }
            }
            h.push(p);
        }
        Hull { pts: h }
    }

    /// Hull value and slope at `x`; `None` outside the covered range.
    fn at(&self, x: f64) -> Option<(f64, f64)> {
        let p = &self.pts;
        if p.is_empty() || x < p[0].0 - 1e-9 || x > p[p.len() - 1].0 + 1e-9 {
            return None;
        }
        if p.len() == 1 {
            return Some((p[0].1, 0.0));
        }
        let i = p.partition_point(|q| q.0 < x).clamp(1, p.len() - 1);
        let (a, b) = (p[i - 1], p[i]);
        let slope = (b.1 - a.1) / (b.0 - a.0);
        Some((a.1 + slope * (x - a.0), slope))
    }

    /// `min (cost - lambda size)` over the hull.
    fn conjugate(&self, lambda: f64) -> f64 {
        self.pts.iter().map(|(z, c)| c - lambda * z).fold(f64::INFINITY, f64::min)
    }

    fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
    }

    fn max_size(&self) -> f64 {
        self.pts.last().map_or(0.0, |p| p.0)
    }
}

/// Degree threshold above which at most 7k+7 copies of C_k fit next to a vertex.
fn copy_limit_threshold(k: u32) -> Option<u32> {
    match k {
        0..=48 => Some(0),
        49 => Some(474),
        50 => Some(874),
        51 => Some(3273),
        _ => None,
    }
}

fn copies_allowed(k: u32, copies: u32, d: u32) -> bool {
    if copies == 0 {
        return true;
    }
    if !(2..=MAX_C).contains(&k) {
        return false;
    }
    if copies >= 365 && k > 52 {
        return false;
    }
    match copy_limit_threshold(k) {
        Some(t) if d > t => copies <= 7 * k + 7,
        _ => true,
    }
}

struct Candidate {
    value: f64,
    d: u32,
    q: u32,
    a: u32,
    b: u32,
    s: u32,
    placement: usize,
    free_k: u32,
}

struct ConstrainedSearch {
    n: usize,
    placements: Vec<Placement>,
    free_options: Vec<Extras>,
    /// Hull of (size, cost lower bound) over every shape the irregular C-branch can take.
    free_hull: Hull,
}

impl ConstrainedSearch {
    fn new(n: usize) -> Self {
        let (placements, free_options) = placements();
        let mut pts = Vec::new();
        for f in &free_options {
            for k in 0..=MAX_C {
                let deg = 1 + k + f.count;
                if deg < 3 {
                    continue;
                }
                let z = 1 + 7 * k as usize + f.size;
                let c = 1.0 / (deg as f64).sqrt()
                    + k as f64 * (weight(deg, 4) + B3_INTERNAL)
                    + f.cost(deg);
                pts.push((z as f64, c));
            }
        }
        ConstrainedSearch { n, placements, free_options, free_hull: Hull::new(pts) }
    }

    /// Every shape of the irregular C-branch under a root of degree `d`:
    /// `(k, size, cost)` per entry of `free_options`.
    fn free_shapes(&self, d: u32) -> Vec<Vec<(u32, usize, f64)>> {
        self.free_options
            .iter()
            .map(|f| {
                (0..=MAX_C)
                    .filter_map(|k| {
                        let deg = 1 + k + f.count;
                        if deg < 3 {
                            return None;
                        }
                        let z = 1 + 7 * k as usize + f.size;
                        let c = weight(d, deg) + k as f64 * (weight(deg, 4) + B3_INTERNAL) + f.cost(deg);
                        Some((k, z, c))
                    })
                    .collect()
            })
            .collect()
    }

    /// `pc[k]` is the cost of a pure C_k hanging from a vertex of degree `d`.
    fn pure_costs(d: u32) -> Vec<f64> {
        (0..=MAX_C + 1)
            .map(|k| if k == 0 { f64::NAN } else { weight(d, k + 1) + k as f64 * (weight(k + 1, 4) + B3_INTERNAL) })
            .collect()
    }

    fn pure_hull(d: u32, pc: &[f64]) -> Hull {
        let mut pts = vec![(7.0, weight(d, 4) + B3_INTERNAL)];
        for k in 2..=MAX_C {
            pts.push(((7 * k + 1) as f64, pc[k as usize]));
        }
        Hull::new(pts)
    }

    /// With `refine`, the dual bound is maximized over every hull slope.
    fn lower_bound(&self, d: u32, refine: bool) -> f64 {
        let n1 = (self.n - 1) as f64;
        let pc = Self::pure_costs(d);
        let mut pts = Self::pure_hull(d, &pc).pts;
        for k in [
            BranchKind::B1Minus,
            BranchKind::B(2),
            BranchKind::B(4),
            BranchKind::B(5),
            BranchKind::BStar(2),
            BranchKind::BStar(3),
            BranchKind::B3StarStar,
        ] {
            pts.push((k.size() as f64, k.cost(d)));
        }
        let hull = Hull::new(pts);
        let df = d as f64;
        let without_free = match hull.at(n1 / df) {
            Some((value, _)) => df * value,
            None => f64::INFINITY,
        };
        if (df - 1.0) * hull.max_size() + self.free_hull.max_size() < n1 {
            return without_free;
        }
        // weak duality: every slope gives a valid bound
        let dual = |lambda: f64| {
            lambda * n1 + (df - 1.0) * hull.conjugate(lambda) + self.free_hull.conjugate(lambda)
        };
        let with_free = if refine {
            hull.slopes()
                .chain(self.free_hull.slopes())
                .chain(std::iter::once(0.0))
                .map(dual)
                .fold(f64::NEG_INFINITY, f64::max)
        } else {
            let lambda = match hull.at(n1 / df) {
                Some((_, slope)) => slope,
                None => hull.slopes().last().unwrap_or(0.0),
            };
            dual(lambda)
        };
        without_free.min(with_free)
    }

    fn run(&self) -> (Option<Vec<FamilyConfig>>, u64) {
        let n = self.n;
        let d_max = ((n - 1) / 2) as u32;
        let mut order: Vec<(f64, u32)> = (1..=d_max.max(1))
            .into_par_iter()
            .map(|d| (self.lower_bound(d, false), d))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = f64::INFINITY;
        let mut cands: Vec<Candidate> = Vec::new();
        let mut evaluated = 0u64;
        // evaluate degrees in waves so pruning stays effective under parallelism
        let mut i = 0;
        while i < order.len() {
            if order[i].0 > best + TIE {
                break;
            }
            let wave_end = (i + rayon::current_num_threads().max(1) * 2).min(order.len());
            let wave: Vec<u32> = order[i..wave_end]
                .iter()
                .filter(|(lb, _)| *lb <= best + TIE)
                .map(|(_, d)| *d)
                .collect();
            let bound = best;
            let results: Vec<(Vec<Candidate>, u64)> =
                wave.par_iter().map(|&d| self.search_degree(d, bound)).collect();
            for (cs, e) in results {
                evaluated += e;
                for c in cs {
                    if c.value < best {
                        best = c.value;
                    }
                    cands.push(c);
                }
            }
            cands.retain(|c| c.value <= best + TIE);
            i = wave_end;
        }
        if cands.is_empty() {
            return (None, evaluated);
        }
        let mut configs: Vec<FamilyConfig> = cands.iter().map(|c| self.config_of(c)).collect();
        configs.sort();
        configs.dedup();
        (Some(configs), evaluated)
    }

    fn config_of(&self, c: &Candidate) -> FamilyConfig {
        let p = &self.placements[c.placement];
        let mut parts = vec![
            (BranchKind::c(c.q), c.a),
            (BranchKind::c(c.q + 1), c.b),
            (BranchKind::B(3), c.s),
        ];
        parts.extend(p.root.parts.iter().cloned());
        if let Some((_, f)) = &p.free {
            parts.push((BranchKind::c_with(c.free_k, f.parts.clone()), 1));
        }
        let parts = parts.into_iter().filter(|(_, c)| *c > 0).collect();
        let config = FamilyConfig::new(parts);
        debug_assert_eq!(config.n(), self.n);
        debug_assert_eq!(config.root_degree(), c.d);
        config
    }

    fn search_degree(&self, d: u32, bound: f64) -> (Vec<Candidate>, u64) {
        let n1 = self.n - 1;
        if self.lower_bound(d, true) > bound + TIE {
            return (Vec::new(), 0);
        }
        let pc = Self::pure_costs(d);
        let hull = Self::pure_hull(d, &pc);
        let b3 = weight(d, 4) + B3_INTERNAL;
        let shapes = self.free_shapes(d);
        // a multiplier for pruning a whole root placement against every free shape
        let lambda = hull.at(n1 as f64 / d as f64).map_or(0.0, |(_, sl)| sl);
        let pure_conj = hull.conjugate(lambda);
        let shape_conj: Vec<f64> = shapes
            .iter()
            .map(|fs| fs.iter().map(|&(_, z, c)| c - lambda * z as f64).fold(f64::INFINITY, f64::min))
            .collect();
        let mut best = bound;
        let mut out: Vec<Candidate> = Vec::new();
        let mut evaluated = 0u64;

        let offer = |c: Candidate, best: &mut f64, out: &mut Vec<Candidate>| {
            if c.value <= *best + TIE {
                if c.value < *best {
                    *best = c.value;
                }
                out.push(c);
            }
        };

        for (pi, p) in self.placements.iter().enumerate() {
            if p.root.count > d || p.root.size > n1 {
                continue;
            }
            let root_cost = p.root.cost(d);
            let none = [(0, 0, 0.0)];
            let (frees, free_count): (&[(u32, usize, f64)], u32) = match &p.free {
                None => (&none, 0),
                Some((fi, _)) => {
                    if p.root.count + 1 > d {
                        continue;
                    }
                    let z0 = (n1 - p.root.size) as f64;
                    let m0 = (d - p.root.count - 1) as f64;
                    if root_cost + lambda * z0 + m0 * pure_conj + shape_conj[*fi] > best + TIE {
                        continue;
                    }
                    (&shapes[*fi], 1)
                }
            };
            for &(free_k, free_size, free_cost) in frees {
                let used = p.root.count + free_count;
                let size = p.root.size + free_size;
                if used > d || size > n1 {
                    continue;
                }
                let m = d - used;
                let z = n1 - size;
                let fixed = root_cost + free_cost;
                if m == 0 {
                    if z == 0 {
                        evaluated += 1;
                        let c = Candidate { value: fixed, d, q: 0, a: 0, b: 0, s: 0, placement: pi, free_k };
                        offer(c, &mut best, &mut out);
                    }
                    continue;
                }
                let Some((h, _)) = hull.at(z as f64 / m as f64) else { continue };
                if fixed + m as f64 * h > best + TIE {
                    continue;
                }
                // r = 0: only B3-branches besides the extras
                if z == 7 * m as usize {
                    evaluated += 1;
                    let c = Candidate {
                        value: fixed + m as f64 * b3,
                        d,
                        q: 0,
                        a: 0,
                        b: 0,
                        s: m,
                        placement: pi,
                        free_k,
                    };
                    offer(c, &mut best, &mut out);
                }
                if z < 7 * m as usize {
                    continue;
                }
                // r ≥ 1: r (7q - 6) + 7 rem = z - 7m, r ≡ z - 7m (mod 7)
                let np = (z - 7 * m as usize) as u64;
                let (qlo, qhi) = match &p.free {
                    Some(_) => (free_k.saturating_sub(2).max(2), (free_k + 1).min(MAX_C)),
                    None => (2, MAX_C),
                };
                for q in qlo..=qhi {
                    if p.free.is_some() && !(q + 2 >= free_k && free_k + 1 >= q) {
                        continue;
                    }
                    let lo = (np + 7).div_ceil(7 * q as u64 + 1).max(1);
                    let hi = (np / (7 * q as u64 - 6)).min(m as u64);
                    if lo > hi {
                        continue;
                    }
                    let residue = np % 7;
                    let mut r = lo + (residue + 7 - lo % 7) % 7;
                    while r <= hi {
                        let rem = ((np - r * (7 * q as u64 - 6)) / 7) as u32;
                        let r32 = r as u32;
                        let a = r32 - rem;
                        let b = rem;
                        let s = m - r32;
                        r += 7;
                        if !copies_allowed(q, a, d) || !copies_allowed(q + 1, b, d) {
                            continue;
                        }
                        evaluated += 1;
                        let value = fixed
                            + a as f64 * pc[q as usize]
                            + b as f64 * pc[q as usize + 1]
                            + s as f64 * b3;
                        let c = Candidate { value, d, q, a, b, s, placement: pi, free_k };
                        offer(c, &mut best, &mut out);
                    }
                }
            }
        }
        out.retain(|c| c.value <= best + TIE);
        (out, evaluated)
    }
}

// ---------------------------------------------------------------------------
// unconstrained search

fn unconstrained_kinds(n: usize) -> Vec<BranchKind> {
    let mut kinds = vec![BranchKind::B1Minus, BranchKind::B3StarStar];
    for k in 1..n as u32 {
        kinds.push(BranchKind::B(k));
        kinds.push(BranchKind::BStar(k));
        kinds.push(BranchKind::c(k));
    }
    kinds.retain(|k| k.size() < n);
    kinds
}

/// Exact minimum over every multiset of catalog branches, by a knapsack over
/// (branch count, vertex count) for each root degree.
fn unconstrained(n: usize) -> Result<(Vec<FamilyConfig>, u64)> {
    if n > UNCONSTRAINED_CAP {
        return Err(AbcError::Capacity { n, cap: UNCONSTRAINED_CAP });
    }
    let kinds = unconstrained_kinds(n);
    let n1 = n - 1;
    let mut best: Option<(f64, FamilyConfig)> = None;
    let mut evaluated = 0u64;
    for d in 1..=n1 as u32 {
        let costs: Vec<f64> = kinds.iter().map(|k| k.cost(d)).collect();
        let du = d as usize;
        // dp[c][z]: least cost of c branches with z vertices; choice keeps a
        // non-decreasing kind index so each multiset is built once
        let mut dp = vec![vec![f64::INFINITY; n1 + 1]; du + 1];
        let mut choice = vec![vec![(usize::MAX, usize::MAX); n1 + 1]; du + 1];
        dp[0][0] = 0.0;
        for c in 0..du {
            for z in 0..=n1 {
                let cur = dp[c][z];
                if !cur.is_finite() {
                    continue;
                }
                for (i, k) in kinds.iter().enumerate() {
                    let nz = z + k.size();
                    if nz > n1 {
                        continue;
                    }
                    evaluated += 1;
                    let v = cur + costs[i];
                    if v < dp[c + 1][nz] {
                        dp[c + 1][nz] = v;
                        choice[c + 1][nz] = (i, z);
                    }
                }
            }
        }
        let v = dp[du][n1];
        if !v.is_finite() || best.as_ref().is_some_and(|(b, _)| *b <= v) {
            continue;
        }
        let mut parts = Vec::new();
        let (mut c, mut z) = (du, n1);
        while c > 0 {
            let (i, pz) = choice[c][z];
            parts.push((kinds[i].clone(), 1));
            c -= 1;
            z = pz;
        }
        best = Some((v, FamilyConfig::new(parts)));
    }
    let (_, config) = best.ok_or_else(|| AbcError::InvalidConfig(format!("no family tree of order {n}")))?;
    Ok((vec![config], evaluated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::abc_index;

    #[test]
    fn constant() {
        assert!((c0() - 0.67737178).abs() < 5e-9);
    }

    #[test]
    fn greedy_small() {
        let t = greedy_tree(&DegreeSequence::new(vec![2, 2, 1, 1]).unwrap());
        assert!((abc_index(t.tree()) - abc_index(&Tree::path(4))).abs() < 1e-15);
    }

    #[test]
    fn hull_interpolates() {
        let h = Hull::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.0)]);
        assert_eq!(h.pts.len(), 2);
        let (v, s) = h.at(1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12 && (s - 0.5).abs() < 1e-12);
        assert!(h.at(3.0).is_none());
    }

    #[test]
    fn landmark_order() {
        let res = family_search(312, true).unwrap();
        assert_eq!(res.best_config.count(&BranchKind::B3StarStar), 1);
        assert_eq!(res.best_config.count(&BranchKind::B(3)), 43);
    }
}
