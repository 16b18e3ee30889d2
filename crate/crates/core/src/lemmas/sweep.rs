use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::catalog::{lookup, Lemma, ParamRange};
use super::exact::{F64Sink, Sign, TermSink};
use crate::error::{AbcError, Result};

pub const DEFAULT_CAP: u128 = 100_000_000_000;
/// Binary64 values at or below this magnitude are settled exactly.
pub const ESCALATE_BELOW: f64 = 1e-6;
/// Accepted as positive without escalation when exact arithmetic is off.
pub const POSITIVE_FLOOR: f64 = 1e-9;
/// 256 bits is about 77 decimal digits.
pub const START_BITS: u32 = 256;
pub const MAX_BITS: u32 = 2048;
const SPOT_CHECKS: usize = 100;
const SAMPLE: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub lemma_id: String,
    pub boxes: Vec<Vec<ParamRange>>,
    /// Settle near-zero values with exact arithmetic.
    pub escalate: bool,
    pub cap: u128,
}

impl SweepSpec {
    /// The boxes stated with the claim; `full` widens the ones that have a
    /// larger optional range.
    pub fn defaults(lemma_id: &str, full: bool) -> Result<Self> {
        let info = lookup(lemma_id).ok_or_else(|| AbcError::UnknownLemma(lemma_id.into()))?;
        Ok(SweepSpec {
            lemma_id: lemma_id.into(),
            boxes: info.lemma.default_boxes(full),
            escalate: true,
            cap: DEFAULT_CAP,
        })
    }

    /// One box: the first default box with the named ranges replaced.
    pub fn with_ranges(lemma_id: &str, ranges: &[(String, ParamRange)]) -> Result<Self> {
        let mut spec = Self::defaults(lemma_id, false)?;
        let info = lookup(lemma_id).unwrap();
        let mut b = spec.boxes.swap_remove(0);
        for (name, r) in ranges {
            let i = info.params.iter().position(|p| p == name).ok_or_else(|| AbcError::Domain {
                lemma: lemma_id.into(),
                msg: format!("no parameter `{name}` (parameters: {})", info.params.join(", ")),
            })?;
            b[i] = *r;
        }
        spec.boxes = vec![b];
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Counterexample,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub params: Vec<i64>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub lemma_id: String,
    pub params: Vec<String>,
    pub boxes: Vec<Vec<ParamRange>>,
    pub evaluations: u64,
    pub min_value: f64,
    pub argmin: Vec<i64>,
    pub status: Status,
    pub counterexamples: u64,
    /// The first few by parameter order.
    pub counterexample_points: Vec<Point>,
    pub inconclusive: u64,
    pub inconclusive_points: Vec<Point>,
    /// Points settled with exact arithmetic.
    pub escalated: u64,
    /// Whether doubling the precision left every spot-checked point's
    /// classification unchanged; absent when exact arithmetic is off.
    pub precision_stable: Option<bool>,
    pub elapsed_ms: u128,
    pub note: Option<String>,
}

type Params = [i64; 4];

#[derive(Clone, Debug)]
struct Small {
    mag: f64,
    p: Params,
    sign: Sign,
}

impl PartialEq for Small {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Small {}
impl PartialOrd for Small {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Small {
    fn cmp(&self, o: &Self) -> Ordering {
        self.mag.total_cmp(&o.mag).then(self.p.cmp(&o.p))
    }
}

#[derive(Clone)]
struct Partial {
    evaluations: u64,
    min: Option<(f64, Params)>,
    counter: u64,
    counter_pts: Vec<(Params, f64)>,
    unknown: u64,
    unknown_pts: Vec<(Params, f64)>,
    escalated: u64,
    smallest: BinaryHeap<Small>,
}

impl Partial {
    fn new() -> Self {
        Partial {
            evaluations: 0,
            min: None,
            counter: 0,
            counter_pts: Vec::new(),
            unknown: 0,
            unknown_pts: Vec::new(),
            escalated: 0,
            smallest: BinaryHeap::new(),
        }
    }

    fn offer_min(&mut self, v: f64, p: Params) {
        let better = match self.min {
            None => true,
            Some((bv, bp)) => v < bv || (v == bv && p < bp),
        };
        if better {
            self.min = Some((v, p));
        }
    }

    fn keep_small(&mut self, s: Small) {
        if self.smallest.len() < SPOT_CHECKS {
            self.smallest.push(s);
        } else if s < *self.smallest.peek().unwrap() {
            self.smallest.pop();
            self.smallest.push(s);
        }
    }

    fn merge(mut self, o: Partial) -> Partial {
        self.evaluations += o.evaluations;
        if let Some((v, p)) = o.min {
            self.offer_min(v, p);
        }
        self.counter += o.counter;
        self.unknown += o.unknown;
        self.escalated += o.escalated;
        self.counter_pts = merge_sample(self.counter_pts, o.counter_pts);
        self.unknown_pts = merge_sample(self.unknown_pts, o.unknown_pts);
        for s in o.smallest {
            self.keep_small(s);
        }
        self
    }
}

fn merge_sample(mut a: Vec<(Params, f64)>, b: Vec<(Params, f64)>) -> Vec<(Params, f64)> {
    a.extend(b);
    a.sort_by_key(|x| x.0);
    a.dedup_by(|x, y| x.0 == y.0);
    a.truncate(SAMPLE);
    a
}

fn push_sample(v: &mut Vec<(Params, f64)>, p: Params, value: f64) {
    if v.len() < SAMPLE {
        v.push((p, value));
    } else if p < v.iter().map(|x| x.0).max().unwrap() {
        v.push((p, value));
        *v = merge_sample(std::mem::take(v), Vec::new());
    }
}

fn exact_sign(lemma: Lemma, p: &[i64], bits: u32) -> Sign {
    let mut t = TermSink::new();
    lemma.emit(p, &mut t);
    t.certify(bits, MAX_BITS.max(bits)).0
}

/// Binary64 value of the expression, its error bound, and the
/// classification under the precision policy.
fn classify(lemma: Lemma, p: &[i64], escalate: bool) -> (f64, Sign, bool) {
    let mut s = F64Sink::new(true);
    lemma.emit(p, &mut s);
    let (v, err) = s.finish();
    let settled = v.abs() > ESCALATE_BELOW && v.abs() > err;
    if settled {
        let sign = if v > 0.0 { Sign::Positive } else { Sign::Negative };
        return (v, sign, false);
    }
    if !escalate {
        let sign = if v > POSITIVE_FLOOR {
            Sign::Positive
        } else if v < -POSITIVE_FLOOR {
            Sign::Negative
        } else {
            Sign::Unknown
        };
        return (v, sign, false);
    }
    (v, exact_sign(lemma, p, START_BITS), true)
}

struct Walker<'a> {
    lemma: Lemma,
    ranges: &'a [ParamRange],
    escalate: bool,
}

impl Walker<'_> {
    /// Values of parameter `i` allowed by both the box and the domain.
    fn span(&self, i: usize, prefix: &[i64]) -> (i64, i64, i64) {
        let r = self.ranges[i];
        let (dlo, dhi) = self.lemma.bounds(i, prefix);
        let mut lo = r.lo;
        if dlo > lo {
            lo += (dlo - lo + r.step - 1) / r.step * r.step;
        }
        (lo, r.hi.min(dhi), r.step)
    }

    fn walk(&self, i: usize, p: &mut Params, out: &mut Partial) {
        let n = self.ranges.len();
        let (lo, hi, step) = self.span(i, &p[..i]);
        let mut x = lo;
        while x <= hi {
            p[i] = x;
            if i + 1 < n {
                self.walk(i + 1, p, out);
            } else {
                self.visit(p, out);
            }
            x += step;
        }
    }

    #[inline]
    fn visit(&self, p: &Params, out: &mut Partial) {
        let n = self.ranges.len();
        let (v, sign, escalated) = classify(self.lemma, &p[..n], self.escalate);
        out.evaluations += 1;
        out.offer_min(v, *p);
        if escalated {
            out.escalated += 1;
        }
        match sign {
            Sign::Positive => {}
            Sign::Negative => {
                out.counter += 1;
                push_sample(&mut out.counter_pts, *p, v);
            }
            Sign::Unknown => {
                out.unknown += 1;
                push_sample(&mut out.unknown_pts, *p, v);
            }
        }
        let mag = v.abs();
        if out.smallest.len() < SPOT_CHECKS || mag <= out.smallest.peek().unwrap().mag {
            out.keep_small(Small { mag, p: *p, sign });
        }
    }
}

/// Box volume after clamping each range to the parameter domain.
fn volume(lemma: Lemma, b: &[ParamRange]) -> u128 {
    let mut los: Vec<i64> = Vec::new();
    let mut his: Vec<i64> = Vec::new();
    let mut v: u128 = 1;
    for (i, r) in b.iter().enumerate() {
        let (a_lo, a_hi) = lemma.bounds(i, &los);
        let (b_lo, b_hi) = lemma.bounds(i, &his);
        let lo = r.lo.max(a_lo.min(b_lo));
        let hi = r.hi.min(a_hi.max(b_hi));
        v = v.saturating_mul(ParamRange::stepped(lo, hi, r.step).len());
        los.push(lo);
        his.push(hi.max(lo));
    }
    v
}

/// Evaluates the expression at every point of the boxes that lies in the
/// domain. Runs on the current rayon pool; the report does not depend on
/// the number of workers.
pub fn sweep(spec: &SweepSpec) -> Result<SweepReport> {
    let start = Instant::now();
    let info = lookup(&spec.lemma_id).ok_or_else(|| AbcError::UnknownLemma(spec.lemma_id.clone()))?;
    let lemma = info.lemma;
    let dims = info.params.len();
    for b in &spec.boxes {
        let bad = b.len() != dims || b.iter().any(|r| r.step < 1 || r.is_empty());
        if bad {
            return Err(AbcError::Domain {
                lemma: spec.lemma_id.clone(),
                msg: format!("need {dims} non-empty ranges ({}) with positive steps", info.params.join(", ")),
            });
        }
    }
    let points: u128 = spec.boxes.iter().map(|b| volume(lemma, b)).fold(0, u128::saturating_add);
    if points > spec.cap {
        return Err(AbcError::SweepTooLarge { points, cap: spec.cap });
    }

    let mut jobs: Vec<(usize, i64)> = Vec::new();
    for (bi, b) in spec.boxes.iter().enumerate() {
        let w = Walker { lemma, ranges: b, escalate: spec.escalate };
        let (lo, hi, step) = w.span(0, &[]);
        let mut x = lo;
        while x <= hi {
            jobs.push((bi, x));
            x += step;
        }
    }
    let total = jobs
        .par_iter()
        .map(|&(bi, x)| {
            let w = Walker { lemma, ranges: &spec.boxes[bi], escalate: spec.escalate };
            let mut out = Partial::new();
            let mut p = [0i64; 4];
            p[0] = x;
            if dims == 1 {
                w.visit(&p, &mut out);
            } else {
                w.walk(1, &mut p, &mut out);
            }
            out
        })
        .reduce(Partial::new, Partial::merge);

    let precision_stable = spec.escalate.then(|| {
        let checks: Vec<Small> = total.smallest.clone().into_sorted_vec();
        checks.par_iter().all(|s| {
            let p = &s.p[..dims];
            exact_sign(lemma, p, START_BITS * 2) == s.sign
        })
    });

    let status = if total.counter > 0 {
        Status::Counterexample
    } else if total.unknown > 0 || total.evaluations == 0 {
        Status::Inconclusive
    } else {
        Status::Verified
    };
    let to_points = |v: &[(Params, f64)]| -> Vec<Point> {
        v.iter().map(|(p, value)| Point { params: p[..dims].to_vec(), value: *value }).collect()
    };
    let (min_value, argmin) = match total.min {
        Some((v, p)) => (v, p[..dims].to_vec()),
        None => (f64::NAN, Vec::new()),
    };
    Ok(SweepReport {
        lemma_id: spec.lemma_id.clone(),
        params: info.params.iter().map(|s| s.to_string()).collect(),
        boxes: spec.boxes.clone(),
        evaluations: total.evaluations,
        min_value,
        argmin,
        status,
        counterexamples: total.counter,
        counterexample_points: to_points(&total.counter_pts),
        inconclusive: total.unknown,
        inconclusive_points: to_points(&total.unknown_pts),
        escalated: total.escalated,
        precision_stable,
        elapsed_ms: start.elapsed().as_millis(),
        note: info.note.map(str::to_string),
    })
}
