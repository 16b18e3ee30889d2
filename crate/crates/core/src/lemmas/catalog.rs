//! The registered Δ(T, T') expressions.
//!
//! Each one is a lower bound (or an exact difference) for the change of the
//! ABC index under a specific tree rewrite; the claim is that it is positive
//! on the stated parameter box.

use super::exact::Sink;

const HUGE: i64 = i64::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    KkEdge,
    Dis2,
    CkSplit,
    Compactify52,
    SevenK8,
    UexcG,
    UexcM,
    BkSizeB6,
    BkSizeBStar,
    BkSizeB4Star,
    Deg2Root4xB1,
    Deg2RootBkB1,
    BExcDx5,
    BExcDx4,
    BExcB5,
    BExcSmallDr,
    BExcKmod7,
    KkK4Case1,
    DegGap,
    C52ExistsA,
    C52ExistsB,
    C52ExistsB368,
    SZeroRootB3,
    SiblingBk,
    D5TwoB5,
    D5TwoB5Shared,
    B5Detach,
}

/// One integer range of a sweep box, inclusive at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ParamRange {
    pub lo: i64,
    pub hi: i64,
    pub step: i64,
}

impl ParamRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        ParamRange { lo, hi, step: 1 }
    }

    pub fn stepped(lo: i64, hi: i64, step: i64) -> Self {
        ParamRange { lo, hi, step }
    }

    pub fn point(v: i64) -> Self {
        ParamRange { lo: v, hi: v, step: 1 }
    }

    pub fn len(&self) -> u128 {
        if self.hi < self.lo {
            0
        } else {
            ((self.hi - self.lo) / self.step) as u128 + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct LemmaInfo {
    pub id: &'static str,
    pub lemma: Lemma,
    pub params: &'static [&'static str],
    pub summary: &'static str,
    /// The bound is the exact change for the rewrite rather than a worst case.
    pub exact: bool,
    pub note: Option<&'static str>,
}

macro_rules! info {
    ($id:expr, $l:ident, [$($p:expr),*], $exact:expr, $summary:expr) => {
        LemmaInfo { id: $id, lemma: Lemma::$l, params: &[$($p),*], summary: $summary, exact: $exact, note: None }
    };
    ($id:expr, $l:ident, [$($p:expr),*], $exact:expr, $summary:expr, $note:expr) => {
        LemmaInfo { id: $id, lemma: Lemma::$l, params: &[$($p),*], summary: $summary, exact: $exact, note: Some($note) }
    };
}

pub static REGISTRY: &[LemmaInfo] = &[
    info!("thm2.1-eq1", KkEdge, ["k", "m"], false,
        "removing a k-k edge: bound over 1 < m < k"),
    info!("dis2-eq6", Dis2, ["dR", "du"], false,
        "two adjacent large vertices merged, children of degree 6 in the worst case"),
    info!("ck-split", CkSplit, ["k", "dR"], false,
        "a C_k branch with k >= 143 split into two C branches",
        "even k uses a split into k/2 and k/2-1 B3 children with three B4 under the larger one"),
    info!("compactify-52", Compactify52, ["k", "du"], false,
        "365 copies of C_k (53 <= k <= 142) rebuilt as 7k+1 copies of C_52",
        "swept over 53 <= k <= 142"),
    info!("7k8", SevenK8, ["k", "du"], false,
        "7k+8 copies of C_k rebuilt as 7k+1 copies of C_{k+1}",
        "thresholds 474/874/3273 for k = 49/50/51 read as strict lower bounds on du"),
    info!("uexc-g", UexcG, ["dR", "du", "dp"], false,
        "U-exceptional vertex removed; worst case g with m = du-3"),
    info!("uexc-m", UexcM, ["dR", "du", "dp", "m"], false,
        "U-exceptional vertex removed; bound before the worst case in m"),
    info!("bk-size-b6", BkSizeB6, ["k", "d"], false,
        "B_k with k >= 6 replaced by B_{k-4} and B3*"),
    info!("bk-size-bstar", BkSizeBStar, ["k", "d"], false,
        "B_k* with k >= 5 replaced by B_{k-3} and B3"),
    info!("bk-size-b4star", BkSizeB4Star, ["d"], true,
        "B4* replaced by B3**"),
    info!("deg2root-4xB1", Deg2Root4xB1, ["dR"], false,
        "four B1- at the root merged into one B3*"),
    info!("deg2root-bk-b1", Deg2RootBkB1, ["k", "dR"], false,
        "B_k and B1- at the root merged into B_{k+1}"),
    info!("b-exc-dx5", BExcDx5, ["du"], false,
        "B-exceptional reduction with a child of degree 5"),
    info!("b-exc-dx4", BExcDx4, ["du"], false,
        "B-exceptional reduction with children of degree 4"),
    info!("b-exc-b5", BExcB5, ["dr"], true,
        "B3** with its 2-2 edge expanded replaced by B5"),
    info!("b-exc-small-dr", BExcSmallDr, ["dR"], false,
        "B-exceptional reduction for small parent degree"),
    info!("b-exc-kmod7", BExcKmod7, ["du", "dR"], false,
        "B-exceptional branch rebuilt from B3 copies by its order mod 7, worst case over compositions",
        "du = k1+k2+k3+k4 counts children only; siblings of u have degree 3 in the worst case"),
    info!("kk-k4-case1", KkK4Case1, ["dR"], false,
        "two adjacent degree-4 vertices rebuilt as three B4 branches"),
    info!("deg-gap", DegGap, ["k", "dR"], false,
        "non-root vertex of degree k rebuilt from B3 copies, worst case over compositions",
        "siblings of the vertex have degree 3 in the worst case"),
    info!("c52-exists-a", C52ExistsA, ["dR"], false,
        "s = 323 B3 at the root merged into seven C_46, C_143/C_142 layout"),
    info!("c52-exists-b", C52ExistsB, ["dR"], false,
        "s = 323 B3 at the root merged into seven C_46, C_53/C_52 layout",
        "dR-364-s-4 children of degree 53, the count that makes the degrees add up"),
    info!("c52-exists-b-368", C52ExistsB368, ["dR"], false,
        "c52-exists-b with coefficient dR-368 on the degree-53 terms",
        "this count gives the root dR+s children; negative for dR up to 3255"),
    info!("s-zero-root-b3", SZeroRootB3, ["dR"], true,
        "a B3 at the root merged into a C_52"),
    info!("sibling-bk", SiblingBk, ["d", "k", "t"], true,
        "sibling B_k and B_{k-t} rebalanced to B_{k-1} and B_{k-t+1}"),
    info!("d5-two-b5", D5TwoB5, ["d1", "d2"], false,
        "two B5 with different fathers replaced by B3* and two B3"),
    info!("d5-two-b5-shared", D5TwoB5Shared, ["d"], false,
        "two sibling B5 replaced by B3* and two B3"),
    info!("b5-detach", B5Detach, ["du"], false,
        "a B1- moved from a B5 to a B2 or B3 under a sibling of degree du, father degree unbounded"),
];

pub fn lookup(id: &str) -> Option<&'static LemmaInfo> {
    REGISTRY.iter().find(|l| l.id == id)
}

impl Lemma {
    pub fn info(self) -> &'static LemmaInfo {
        REGISTRY.iter().find(|l| l.lemma == self).unwrap()
    }

    /// Domain of parameter `i` given the values of the earlier ones.
    pub fn bounds(self, i: usize, p: &[i64]) -> (i64, i64) {
        use Lemma::*;
        match (self, i) {
            (KkEdge, 0) => (3, HUGE),
            (KkEdge, _) => (2, p[0] - 1),
            (Dis2, 0) => (3, HUGE),
            (Dis2, _) => (3, p[0]),
            (CkSplit, 0) => (143, HUGE),
            (CkSplit, _) => (p[0], HUGE),
            (Compactify52, 0) => (53, 142),
            (Compactify52, _) => (365, HUGE),
            (SevenK8, 0) => (1, 51),
            (SevenK8, _) => (7 * p[0] + 8, HUGE),
            (UexcG | UexcM, 0) => (6, HUGE),
            (UexcG | UexcM, 1) => (6, p[0]),
            (UexcG | UexcM, 2) => (6, p[1]),
            (UexcG | UexcM, _) => (0, p[1] - 3),
            (BkSizeB6, 0) => (6, HUGE),
            (BkSizeBStar, 0) => (5, HUGE),
            (BkSizeB6 | BkSizeBStar, _) => (p[0] + 1, HUGE),
            (BkSizeB4Star, _) => (5, HUGE),
            (Deg2Root4xB1, _) => (5, HUGE),
            (Deg2RootBkB1, 0) => (2, 3),
            (Deg2RootBkB1, _) => (3, HUGE),
            (BExcDx5 | BExcDx4 | BExcB5 | BExcSmallDr, _) => (2, HUGE),
            (BExcKmod7, 0) => (4, 14),
            (BExcKmod7, _) => (p[0], HUGE),
            (KkK4Case1, _) => (4, HUGE),
            (DegGap, 0) => (4, 15),
            (DegGap, _) => (p[0].max(5), HUGE),
            (C52ExistsA, _) => (1055, HUGE),
            (C52ExistsB, _) => (691, HUGE),
            (C52ExistsB368, _) => (370, HUGE),
            (SZeroRootB3, _) => (366, HUGE),
            (SiblingBk, 0) => (4, HUGE),
            (SiblingBk, 1) => (3, p[0] - 1),
            (SiblingBk, _) => (2, p[1] - 1),
            (D5TwoB5, _) => (6, HUGE),
            (D5TwoB5Shared, _) => (6, HUGE),
            (B5Detach, _) => (3, HUGE),
        }
    }

    pub fn in_domain(self, p: &[i64]) -> bool {
        p.len() == self.info().params.len()
            && (0..p.len()).all(|i| {
                let (lo, hi) = self.bounds(i, &p[..i]);
                lo <= p[i] && p[i] <= hi
            })
    }

    /// Default sweep boxes: the parameter boxes stated with each claim.
    pub fn default_boxes(self, full: bool) -> Vec<Vec<ParamRange>> {
        use Lemma::*;
        let r = ParamRange::new;
        let cap = 10_000;
        match self {
            KkEdge => vec![
                vec![r(5, if full { 100_000 } else { cap }), r(2, HUGE)],
                vec![ParamRange::point(4), ParamRange::point(2)],
            ],
            Dis2 => vec![vec![r(3, 100), r(3, 100)]],
            CkSplit => vec![vec![ParamRange::stepped(143, 199, 2), r(143, cap)]],
            Compactify52 => vec![vec![r(53, 142), r(365, cap)]],
            SevenK8 => vec![
                vec![r(1, 48), r(1, cap)],
                vec![ParamRange::point(49), r(475, cap)],
                vec![ParamRange::point(50), r(875, cap)],
                vec![ParamRange::point(51), r(3274, cap)],
            ],
            UexcG => vec![
                vec![r(6, 3271), r(6, HUGE), r(6, HUGE)],
                vec![r(53, cap), r(53, cap), ParamRange::point(53)],
            ],
            UexcM => vec![vec![r(6, 200), r(6, HUGE), r(6, HUGE), r(0, HUGE)]],
            BkSizeB6 => vec![vec![r(6, 200), r(7, cap)]],
            BkSizeBStar => vec![vec![r(5, 200), r(6, cap)]],
            BkSizeB4Star => vec![vec![r(5, cap)]],
            Deg2Root4xB1 => vec![vec![r(12, cap)]],
            Deg2RootBkB1 => vec![vec![r(2, 3), r(17, cap)]],
            BExcDx5 => vec![vec![r(13, cap)]],
            BExcDx4 => vec![vec![r(15, cap)]],
            BExcB5 => vec![vec![r(9, cap)]],
            BExcSmallDr => vec![vec![r(5, 8)]],
            BExcKmod7 => vec![vec![r(4, 14), r(4, cap)]],
            KkK4Case1 => vec![vec![r(4, cap)]],
            DegGap => vec![vec![r(4, 15), r(4, 2000)]],
            C52ExistsA => vec![vec![r(2092, cap)]],
            C52ExistsB | C52ExistsB368 => vec![vec![r(2888, cap)]],
            SZeroRootB3 => vec![vec![r(2948, cap)]],
            SiblingBk => vec![vec![r(4, 400), r(3, HUGE), r(2, HUGE)]],
            D5TwoB5 => vec![vec![r(7, 2000), r(7, 2000)]],
            D5TwoB5Shared => vec![vec![r(7, cap)]],
            B5Detach => vec![vec![r(16, cap)]],
        }
    }

    /// Emits the expression at `p` into `s`. `p` must be in the domain.
    #[inline]
    pub(crate) fn emit<S: Sink>(self, p: &[i64], s: &mut S) {
        use Lemma::*;
        match self {
            KkEdge => kk_edge(s, p[0], p[1]),
            Dis2 => dis2(s, p[0], p[1]),
            CkSplit => ck_split(s, p[0], p[1]),
            Compactify52 => compactify(s, p[0], p[1]),
            SevenK8 => seven_k8(s, p[0], p[1]),
            UexcG => uexc(s, p[0], p[1], p[2], p[1] - 3),
            UexcM => uexc(s, p[0], p[1], p[2], p[3]),
            BkSizeB6 => {
                let (k, d) = (p[0], p[1]);
                s.f(1, d, k + 1);
                s.f(-1, d + 1, k - 3);
                s.f(-1, d + 1, 4);
                s.root(1, 1, 2);
            }
            BkSizeBStar => {
                let (k, d) = (p[0], p[1]);
                s.f(1, d, k + 1);
                s.f(-1, d + 1, k - 2);
                s.f(-1, d + 1, 4);
                s.root(1, 1, 2);
            }
            BkSizeB4Star => {
                let d = p[0];
                s.f(1, d, 5);
                s.f(-1, d, 4);
                s.f(-1, 4, 3);
                s.root(1, 1, 2);
            }
            Deg2Root4xB1 => {
                let d = p[0];
                s.f(1, 2, 2);
                s.f(-1, 4, d - 3);
                s.f(d - 4, 6, d);
                s.f(-(d - 4), 6, d - 3);
            }
            Deg2RootBkB1 => {
                // the root loses one neighbour; its other neighbours have
                // degree at most 6
                let (k, d) = (p[0], p[1]);
                s.f(1, d, k + 1);
                s.f(-1, d - 1, k + 2);
                s.f(d - 2, d, 6);
                s.f(-(d - 2), d - 1, 6);
            }
            BExcDx5 => {
                let d = p[0];
                s.root(1, 1, d);
                s.f(4, d, 5);
                s.root(-1, 1, d - 1);
                s.f(-3, d - 1, 5);
                s.f(-1, d - 1, 6);
            }
            BExcDx4 => {
                let d = p[0];
                s.root(1, 1, d);
                s.f(4, d, 5);
                s.f(d - 6, d, 4);
                s.root(-1, 1, d - 1);
                s.f(-5, d - 1, 5);
                s.f(-(d - 7), d - 1, 4);
            }
            BExcB5 => {
                let d = p[0];
                s.f(1, d, 4);
                s.f(-1, d, 6);
                s.f(1, 4, 3);
                s.root(-1, 1, 2);
            }
            BExcSmallDr => {
                let d = p[0];
                s.f(1, 3, 4);
                s.f(1, 4, d);
                s.f(-2, 3, d + 1);
                s.f(d - 1, 3, d);
                s.f(-(d - 1), 3, d + 1);
            }
            BExcKmod7 => b_exc_kmod7(s, p[0], p[1]),
            KkK4Case1 => {
                let d = p[0];
                s.f(1, d, 4);
                s.f(5, 4, 3);
                s.f(1, 4, 4);
                s.f(10, 3, 2);
                s.f(10, 2, 1);
                s.f(-3, d + 2, 5);
                s.f(-12, 5, 2);
                s.f(-12, 2, 1);
                s.f(d - 1, d, 3);
                s.f(-(d - 1), d + 2, 3);
            }
            DegGap => deg_gap(s, p[0], p[1]),
            C52ExistsA => {
                let (d, sb) = (p[0], 323);
                let (dp, kk) = (d - sb + 7, (sb + 6) / 7);
                s.f(364, d, 143);
                s.f(364, d, 142);
                s.f(4, d, 5);
                s.f(d - 2 * 364 - 4, d, 4);
                s.root(6, 1, 2);
                s.f(-364, dp, 142);
                s.f(-364, dp, 143);
                s.f(-7, dp, kk);
                s.f(-4, dp, 5);
                s.f(-(d - sb - 2 * 364 - 4), dp, 4);
                s.f(-(sb - 1), kk, 4);
            }
            C52ExistsB | C52ExistsB368 => {
                let (d, sb) = (p[0], 323);
                let (dp, kk) = (d - sb + 7, (sb + 6) / 7);
                let c53 = if self == C52ExistsB { d - 364 - sb - 4 } else { d - 364 - 4 };
                s.f(364, d, 54);
                s.f(c53, d, 53);
                s.f(4, d, 5);
                s.f(sb, d, 4);
                s.root(6, 1, 2);
                s.f(-364, dp, 54);
                s.f(-c53, dp, 53);
                s.f(-4, dp, 5);
                s.f(-7, dp, kk);
                s.f(-(sb - 1), kk, 4);
            }
            SZeroRootB3 => {
                let d = p[0];
                s.f(364, d, 54);
                s.f(d - 365, d, 53);
                s.f(1, d, 4);
                s.f(52, 53, 4);
                s.f(-365, d - 1, 54);
                s.f(-(d - 366), d - 1, 53);
                s.f(-53, 54, 4);
            }
            SiblingBk => {
                let (d, k, t) = (p[0], p[1], p[2]);
                s.f(1, d, k + 1);
                s.f(1, d, k - t + 1);
                s.f(-1, d, k);
                s.f(-1, d, k - t + 2);
            }
            D5TwoB5 => {
                // sibling edges of the second father only gain, dropped
                let (d1, d2) = (p[0], p[1]);
                s.f(1, d1, 6);
                s.f(-1, d1, 4);
                s.f(1, d2, 6);
                s.f(-2, d2 + 1, 4);
                s.root(1, 1, 2);
            }
            D5TwoB5Shared => {
                let d = p[0];
                s.f(2, d, 6);
                s.f(-3, d + 1, 4);
                s.root(1, 1, 2);
            }
            B5Detach => {
                // the father's edge to the B5 root tends to 1/sqrt(6) - 1/sqrt(5)
                let d = p[0];
                s.root(1, 1, 6);
                s.root(-1, 1, 5);
                s.f(1, d, 3);
                s.f(-1, d, 4);
                s.case();
                s.root(1, 1, 6);
                s.root(-1, 1, 5);
                s.f(1, d, 4);
                s.f(-1, d, 5);
            }
        }
    }
}

fn kk_edge<S: Sink>(s: &mut S, k: i64, m: i64) {
    s.f(1, k, k);
    s.f(-1, k, k + 1);
    s.f(1, k, k);
    s.f(-1, k + 1, k - 1);
    s.f(1, k, m);
    s.f(-1, k + 1, m);
    s.f(k - 2, k, m);
    s.f(-(k - 2), k + 1, m);
    s.f(k - 2, k, m);
    s.f(-(k - 2), k - 1, m);
}

fn dis2<S: Sink>(s: &mut S, dr: i64, du: i64) {
    let big = dr + du - 2;
    s.f(1, dr, du);
    s.f(-1, 2, 2);
    s.f(dr - 1, dr, 6);
    s.f(-(dr - 1), big, 6);
    s.f(du - 1, du, 6);
    s.f(-(du - 1), big, 6);
}

fn ck_split<S: Sink>(s: &mut S, k: i64, dr: i64) {
    s.f(1, dr, k + 1);
    s.f(dr - 1, dr, 4);
    s.f(-(dr - 1), dr + 1, 4);
    if k % 2 == 1 {
        let kk = (k + 1) / 2;
        s.f(-1, dr + 1, kk);
        s.f(k, k + 1, 4);
        s.f(-k, kk, 4);
        s.f(3, kk, 4);
        s.f(-3, kk, 5);
        s.f(1, kk, 4);
        s.f(-1, kk, dr + 1);
    } else {
        let h = k / 2;
        s.f(k, k + 1, 4);
        s.f(-1, dr + 1, h + 1);
        s.f(-1, dr + 1, h);
        s.f(-(h - 3), h + 1, 4);
        s.f(-3, h + 1, 5);
        s.f(-(h - 1), h, 4);
    }
}

fn compactify<S: Sink>(s: &mut S, k: i64, du: i64) {
    let d1 = du - 365;
    let dup = du + 7 * k - 364;
    s.f(365, du, k + 1);
    s.f(365 * k, k + 1, 4);
    s.root(365 * k * 6, 1, 2);
    s.f(d1, du, 4);
    s.f(-(7 * k + 1), dup, 53);
    s.f(-(7 * k + 1) * 52, 53, 4);
    s.root(-(7 * k + 1) * 52 * 6, 1, 2);
    s.f(-d1, dup, 4);
}

fn seven_k8<S: Sink>(s: &mut S, k: i64, du: i64) {
    s.root(1, 1, du);
    s.root(-1, 1, du - 7);
    s.f(7 * k + 8, du, k + 1);
    s.f(-(7 * k + 1), du - 7, k + 2);
    s.f(du - 7 * k - 10, du, k + 2);
    s.f(-(du - 7 * k - 10), du - 7, k + 2);
    s.f(1, du, du - 1);
    s.f(-1, du - 7, du - 1);
    s.f(k * (7 * k + 8), k + 1, 4);
    s.f(-(7 * k + 1) * (k + 1), k + 2, 4);
    s.f(-6, 2, 1);
}

fn uexc<S: Sink>(s: &mut S, dr: i64, du: i64, dp: i64, m: i64) {
    s.f(1, dr, du);
    s.f(-1, dr + 1, du - 1);
    s.f(dr - 1, dr, dp);
    s.f(-(dr - 1), dr + 1, dp);
    s.f(1, du, dp);
    s.f(-1, dr + 1, dp);
    s.f(du - 2 - m, du, 5);
    s.f(-(du - 2 - m), du - 1, 5);
    s.f(m, du, dp);
    s.f(-m, du - 1, dp);
}

/// Branch kinds hung from a vertex: degree of the attached root, internal
/// cost in units of sqrt(1/2), whether a f(4,3) edge is inside, and order.
#[derive(Clone, Copy)]
struct Shape {
    attach: i64,
    s2: i64,
    f43: i64,
    order: i64,
}

const B1M: Shape = Shape { attach: 2, s2: 1, f43: 0, order: 2 };
const B2: Shape = Shape { attach: 3, s2: 4, f43: 0, order: 5 };
const B2S: Shape = Shape { attach: 3, s2: 5, f43: 0, order: 6 };
const B3: Shape = Shape { attach: 4, s2: 6, f43: 0, order: 7 };
const B3S: Shape = Shape { attach: 4, s2: 7, f43: 0, order: 8 };
const B3SS: Shape = Shape { attach: 4, s2: 8, f43: 1, order: 10 };
const B4: Shape = Shape { attach: 5, s2: 8, f43: 0, order: 9 };
const B5: Shape = Shape { attach: 6, s2: 10, f43: 0, order: 11 };

fn hang<S: Sink>(s: &mut S, sign: i64, at: i64, shape: Shape, count: i64) {
    if count == 0 {
        return;
    }
    s.f(sign * count, at, shape.attach);
    s.root(sign * count * shape.s2, 1, 2);
    s.f(sign * count * shape.f43, 4, 3);
}

/// Replacement of a branch of order `n` (n >= 12) by B3 copies, following
/// the order mod 7.
fn mod7_replacement(n: i64) -> Vec<(Shape, i64)> {
    match n % 7 {
        0 => vec![(B3, n / 7)],
        1 => vec![(B3, (n - 1) / 7 - 1), (B3S, 1)],
        2 => vec![(B3, (n - 2) / 7 - 1), (B4, 1)],
        3 => vec![(B3, (n - 3) / 7 - 1), (B3SS, 1)],
        4 => vec![(B3, (n - 4) / 7 - 2), (B4, 2)],
        5 => vec![(B3, (n - 5) / 7), (B2, 1)],
        _ => vec![(B3, (n - 6) / 7), (B2S, 1)],
    }
}

/// A branch rooted at a child of R (degree `dr`), the child having degree
/// `dv` and children `kids`, is removed and `repl` hung from R; the other
/// dr-1 children of R have degree 3.
fn rebuild<S: Sink>(s: &mut S, dr: i64, dv: i64, kids: &[(Shape, i64)], repl: &[(Shape, i64)]) {
    let added: i64 = repl.iter().map(|r| r.1).sum();
    let drp = dr - 1 + added;
    s.f(1, dr, dv);
    for &(sh, c) in kids {
        hang(s, 1, dv, sh, c);
    }
    for &(sh, c) in repl {
        hang(s, -1, drp, sh, c);
    }
    s.f(dr - 1, dr, 3);
    s.f(-(dr - 1), drp, 3);
}

fn order_of(kids: &[(Shape, i64)]) -> i64 {
    1 + kids.iter().map(|(sh, c)| sh.order * c).sum::<i64>()
}

fn b_exc_kmod7<S: Sink>(s: &mut S, du: i64, dr: i64) {
    let children = du;
    let cap = du - 2;
    let mut first = true;
    for k1 in 1..=cap {
        for k2 in 0..=(children - k1).min(11).min(cap) {
            for k4 in 0..=(children - k1 - k2).min(4).min(cap) {
                if k2 > 0 && k4 > 0 {
                    continue;
                }
                let k3 = children - k1 - k2 - k4;
                if k3 > cap || k2 + k3 + k4 == 0 {
                    continue;
                }
                let kids = [(B1M, k1), (B2, k2), (B3, k3), (B4, k4)];
                let n = order_of(&kids);
                if n < 12 {
                    continue;
                }
                if !first {
                    s.case();
                }
                first = false;
                rebuild(s, dr, du, &kids, &mod7_replacement(n));
                if n == 20 {
                    s.alt();
                    rebuild(s, dr, du, &kids, &[(B4, 1), (B5, 1)]);
                }
            }
        }
    }
}

fn deg_gap<S: Sink>(s: &mut S, k: i64, dr: i64) {
    let children = k - 1;
    let kinds: &[Shape] = match k {
        4 => &[B2, B2S],
        5 => &[B2, B2S, B3, B3S, B3SS],
        6 => &[B2, B2S, B3, B3S, B3SS, B4],
        _ => &[B2, B2S, B3, B3S, B3SS, B4, B5],
    };
    let mut counts = vec![0i64; kinds.len()];
    let mut first = true;
    compositions(&mut counts, 0, children, &mut |c| {
        let get = |i: usize| c.get(i).copied().unwrap_or(0);
        let special = get(1) + get(3) + get(4);
        let (n2, n4, n5) = (get(0), get(5), get(6));
        if n2 > 11 || n4 > 4 || special > 1 || (special == 1 && n4 + n5 > 0) {
            return;
        }
        let kids: Vec<(Shape, i64)> = kinds.iter().copied().zip(c.iter().copied()).collect();
        let n = order_of(&kids);
        if !first {
            s.case();
        }
        first = false;
        if k == 4 && n == 17 {
            rebuild(s, dr, k, &kids, &[(B3, 1), (B2, 2)]);
            s.alt();
        }
        rebuild(s, dr, k, &kids, &mod7_replacement(n));
    });
}

fn compositions(c: &mut Vec<i64>, i: usize, left: i64, visit: &mut dyn FnMut(&[i64])) {
    if i + 1 == c.len() {
        c[i] = left;
        visit(c);
        return;
    }
    for x in 0..=left {
        c[i] = x;
        compositions(c, i + 1, left - x, visit);
    }
}
