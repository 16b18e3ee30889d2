//! Evaluation back ends for the inequality expressions.
//!
//! Every expression is a sum of terms `c * sqrt(num / den)` with integer
//! `c`, `num`, `den`. Cases are combined with `min` (the claim must hold in
//! each) and alternatives within a case with `max` (one replacement that
//! works is enough).

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use ruint::Uint;

pub(crate) trait Sink {
    /// Adds `c * sqrt(num / den)`.
    fn root(&mut self, c: i64, num: i64, den: i64);

    /// Adds `c * f(a, b)`.
    fn f(&mut self, c: i64, a: i64, b: i64) {
        self.root(c, a + b - 2, a * b);
    }

    /// Closes the current alternative and opens another in the same case.
    fn alt(&mut self);

    /// Closes the current case and opens another.
    fn case(&mut self);
}

const TABLE_SIDE: usize = 3300;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; TABLE_SIDE * TABLE_SIDE];
        for a in 1..TABLE_SIDE {
            for b in 1..TABLE_SIDE {
                t[a * TABLE_SIDE + b] = crate::graph::weight(a as u32, b as u32);
            }
        }
        t
    })
}

/// Binary64 evaluation with a running bound on the rounding error.
pub(crate) struct F64Sink {
    fast: bool,
    sum: f64,
    mag: f64,
    terms: u32,
    alt: Option<(f64, f64)>,
    case: Option<(f64, f64)>,
}

impl F64Sink {
    pub fn new(fast: bool) -> Self {
        F64Sink { fast, sum: 0.0, mag: 0.0, terms: 0, alt: None, case: None }
    }

    fn close_alt(&mut self) {
        let err = self.mag * (self.terms as f64 + 4.0) * f64::EPSILON;
        let cur = (self.sum, err);
        self.alt = Some(match self.alt {
            Some(best) if best.0 >= cur.0 => (best.0, best.1.max(cur.1)),
            Some(best) => (cur.0, best.1.max(cur.1)),
            None => cur,
        });
        self.sum = 0.0;
        self.mag = 0.0;
        self.terms = 0;
    }

    fn close_case(&mut self) {
        self.close_alt();
        let cur = self.alt.take().unwrap();
        self.case = Some(match self.case {
            Some(worst) if worst.0 <= cur.0 => (worst.0, worst.1.max(cur.1)),
            Some(worst) => (cur.0, worst.1.max(cur.1)),
            None => cur,
        });
    }

    /// Value and error bound.
    pub fn finish(mut self) -> (f64, f64) {
        self.close_case();
        self.case.unwrap()
    }

    #[inline]
    fn add(&mut self, c: i64, t: f64) {
        let x = c as f64 * t;
        self.sum += x;
        self.mag += x.abs();
        self.terms += 1;
    }
}

impl Sink for F64Sink {
    #[inline]
    fn root(&mut self, c: i64, num: i64, den: i64) {
        if c != 0 {
            self.add(c, (num as f64 / den as f64).sqrt());
        }
    }

    #[inline]
    fn f(&mut self, c: i64, a: i64, b: i64) {
        if c == 0 {
            return;
        }
        let t = if self.fast && (a as usize) < TABLE_SIDE && (b as usize) < TABLE_SIDE {
            table()[a as usize * TABLE_SIDE + b as usize]
        } else {
            crate::graph::weight(a as u32, b as u32)
        };
        self.add(c, t);
    }

    fn alt(&mut self) {
        self.close_alt();
    }

    fn case(&mut self) {
        self.close_case();
    }
}

type Terms = Vec<(i64, i64, i64)>;

/// Collects the terms so they can be evaluated exactly.
#[derive(Default)]
pub(crate) struct TermSink {
    cases: Vec<Vec<Terms>>,
}

impl TermSink {
    pub fn new() -> Self {
        TermSink { cases: vec![vec![Vec::new()]] }
    }
}

impl Sink for TermSink {
    fn root(&mut self, c: i64, num: i64, den: i64) {
        if c != 0 {
            self.cases.last_mut().unwrap().last_mut().unwrap().push((c, num, den));
        }
    }

    fn alt(&mut self) {
        self.cases.last_mut().unwrap().push(Vec::new());
    }

    fn case(&mut self) {
        self.cases.push(vec![Vec::new()]);
    }
}

/// `Negative` means certainly not positive: either below zero or an
/// expression whose terms cancel identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Unknown,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    if a == 0 || b == 0 {
        return (a | b) as i64;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    while b != 0 {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
    }
    (a << shift) as i64
}

/// Reduced fractions with equal terms merged.
fn normalize(terms: &Terms) -> Terms {
    let mut out: Terms = terms
        .iter()
        .map(|&(c, num, den)| {
            let g = gcd(num, den).max(1);
            (c, num / g, den / g)
        })
        .collect();
    out.sort_by_key(|t| (t.1, t.2));
    out.dedup_by(|a, b| {
        if (a.1, a.2) == (b.1, b.2) {
            b.0 += a.0;
            true
        } else {
            false
        }
    });
    out.retain(|t| t.0 != 0);
    out
}

const CACHE_LIMIT: usize = 1 << 17;
/// Precision of the allocation-free first level.
pub(crate) const FAST_BITS: u32 = 256;

type Wide = Uint<640, 10>;
type Acc = Uint<384, 6>;

/// Two generations: when the young one fills up it becomes the old one,
/// so the terms of the last few sweep rows stay available.
#[derive(Default)]
struct RootCache {
    young: HashMap<(i64, i64), Acc>,
    old: HashMap<(i64, i64), Acc>,
}

thread_local! {
    static FAST: RefCell<RootCache> = RefCell::new(RootCache::default());
}

/// floor(sqrt(num / den) * 2^256) for num/den below 2^20. Neighbouring
/// sweep points share most of their terms, so results are kept per thread.
fn root_fast(num: i64, den: i64) -> Acc {
    FAST.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(v) = cache.young.get(&(num, den)) {
            return *v;
        }
        if cache.young.len() >= CACHE_LIMIT {
            cache.old = std::mem::take(&mut cache.young);
        }
        if let Some(v) = cache.old.get(&(num, den)).copied() {
            cache.young.insert((num, den), v);
            return v;
        }
        let m: Wide = (Wide::from(num as u64) << (2 * FAST_BITS as usize)) / Wide::from(den as u64);
        let seed = (num as f64 / den as f64).sqrt();
        let mut s = Wide::from((seed * (1u64 << 52) as f64) as u64 + 1) << (FAST_BITS as usize - 52);
        let mut good = 50;
        while good < FAST_BITS + 8 {
            s = (s + m / s) >> 1usize;
            good *= 2;
        }
        while s * s > m {
            s -= Wide::from(1u64);
        }
        while (s + Wide::from(1u64)) * (s + Wide::from(1u64)) <= m {
            s += Wide::from(1u64);
        }
        let v = Acc::from_limbs_slice(&s.as_limbs()[..6]);
        cache.young.insert((num, den), v);
        v
    })
}

/// floor(sqrt(floor(num * 4^bits / den))).
fn root_big(num: i64, den: i64, bits: u32) -> BigInt {
    let m = (BigUint::from(num as u64) << (2 * bits)) / BigUint::from(den as u64);
    BigInt::from(m.sqrt())
}

/// Sign of the enclosure `lo <= value * 2^bits < hi`.
fn sign_of_enclosure(lo_pos: bool, hi_nonpos: bool) -> Sign {
    if lo_pos {
        Sign::Positive
    } else if hi_nonpos {
        Sign::Negative
    } else {
        Sign::Unknown
    }
}

fn sign_fast(terms: &Terms) -> Sign {
    // positive and negative parts of both ends, kept unsigned
    let (mut lo_p, mut lo_n, mut hi_p, mut hi_n) = (Acc::ZERO, Acc::ZERO, Acc::ZERO, Acc::ZERO);
    for (c, num, den) in normalize(terms) {
        let s = root_fast(num, den);
        let s1 = s + Acc::from(1u64);
        let a = Acc::from(c.unsigned_abs());
        if c > 0 {
            lo_p += s * a;
            hi_p += s1 * a;
        } else {
            lo_n += s1 * a;
            hi_n += s * a;
        }
    }
    sign_of_enclosure(lo_p > lo_n, hi_p <= hi_n)
}

fn fits_fast(terms: &Terms) -> bool {
    terms.iter().all(|&(c, num, den)| num >= 0 && den > 0 && num < den << 20 && c.unsigned_abs() < 1 << 40)
}

fn sign_of(terms: &Terms, bits: u32) -> Sign {
    if bits == FAST_BITS && fits_fast(terms) {
        return sign_fast(terms);
    }
    let mut lo = BigInt::from(0);
    let mut hi = BigInt::from(0);
    for (c, num, den) in normalize(terms) {
        let s = root_big(num, den, bits);
        if c > 0 {
            lo += &s * c;
            hi += (s + 1) * c;
        } else {
            hi += &s * c;
            lo += (s + 1) * c;
        }
    }
    let zero = BigInt::from(0);
    sign_of_enclosure(lo > zero, hi <= zero)
}

impl TermSink {
    /// Sign of min over cases of max over alternatives, at `bits` bits of
    /// absolute precision.
    pub fn sign(&self, bits: u32) -> Sign {
        let mut all_positive = true;
        for case in &self.cases {
            let signs: Vec<Sign> = case.iter().map(|t| sign_of(t, bits)).collect();
            if signs.contains(&Sign::Positive) {
                continue;
            }
            if signs.iter().all(|&s| s == Sign::Negative) {
                return Sign::Negative;
            }
            all_positive = false;
        }
        if all_positive {
            Sign::Positive
        } else {
            Sign::Unknown
        }
    }

    /// Escalates from `bits` by doubling until the sign is settled or
    /// `max_bits` is passed.
    pub fn certify(&self, bits: u32, max_bits: u32) -> (Sign, u32) {
        let mut b = bits;
        loop {
            let s = self.sign(b);
            if s != Sign::Unknown || b * 2 > max_bits {
                return (s, b);
            }
            b *= 2;
        }
    }
}
