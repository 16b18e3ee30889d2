//! Numeric certification of the Δ(T, T') inequalities behind the structure
//! of minimal trees, and a structural checklist for concrete trees.
//!
//! Expressions are evaluated in binary64 with an error bound; anything at or
//! below 1e-6 in magnitude, or not clear of its error bound, is settled with
//! exact fixed-point interval arithmetic.

mod catalog;
mod exact;
mod structure;
mod sweep;

pub use catalog::{lookup, Lemma, LemmaInfo, ParamRange, REGISTRY};
pub use exact::Sign;
pub use structure::{validate_structure, CheckItem, Checklist};
pub use sweep::{sweep, Point, Status, SweepReport, SweepSpec, DEFAULT_CAP, ESCALATE_BELOW, POSITIVE_FLOOR};

use crate::error::{AbcError, Result};
use exact::{F64Sink, TermSink};

/// Binary64 value of a registered expression.
pub fn evaluate(id: &str, params: &[i64]) -> Result<f64> {
    let info = lookup(id).ok_or_else(|| AbcError::UnknownLemma(id.into()))?;
    eval_lemma(info.lemma, params)
}

fn eval_lemma(lemma: Lemma, params: &[i64]) -> Result<f64> {
    if !lemma.in_domain(params) {
        let info = lemma.info();
        return Err(AbcError::Domain {
            lemma: info.id.into(),
            msg: format!("({}) = {:?} outside the domain", info.params.join(", "), params),
        });
    }
    let mut s = F64Sink::new(false);
    lemma.emit(params, &mut s);
    Ok(s.finish().0)
}

/// Exact sign of a registered expression, doubling the precision from
/// `bits` up to 4096 bits.
pub fn certify(id: &str, params: &[i64], bits: u32) -> Result<Sign> {
    let info = lookup(id).ok_or_else(|| AbcError::UnknownLemma(id.into()))?;
    eval_lemma(info.lemma, params)?;
    let mut t = TermSink::new();
    info.lemma.emit(params, &mut t);
    Ok(t.certify(bits, 4096).0)
}

/// Bound for removing a k-k edge, 1 < m < k.
pub fn delta_kk(k: i64, m: i64) -> Result<f64> {
    eval_lemma(Lemma::KkEdge, &[k, m])
}

/// Bound for merging two adjacent large vertices, 3 <= du <= dR.
pub fn delta_dis2(dr: i64, du: i64) -> Result<f64> {
    eval_lemma(Lemma::Dis2, &[dr, du])
}

/// Bound for splitting a C_k branch, k >= 143, dR >= k.
pub fn delta_ck_split(k: i64, dr: i64) -> Result<f64> {
    eval_lemma(Lemma::CkSplit, &[k, dr])
}

/// Bound for rebuilding 365 copies of C_k as copies of C_52.
pub fn delta_compactify(k: i64, du: i64) -> Result<f64> {
    eval_lemma(Lemma::Compactify52, &[k, du])
}

/// Bound for rebuilding 7k+8 copies of C_k as 7k+1 copies of C_{k+1}.
pub fn delta_7k8(k: i64, du: i64) -> Result<f64> {
    eval_lemma(Lemma::SevenK8, &[k, du])
}

/// Bound for removing a U-exceptional vertex with `m` further children of
/// degree at least 6; `m = du - 3` gives the worst case g.
pub fn delta_uexc(dr: i64, du: i64, dprime: i64, m: i64) -> Result<f64> {
    eval_lemma(Lemma::UexcM, &[dr, du, dprime, m])
}

/// Any other registered expression by id.
pub fn aux_delta(id: &str, params: &[i64]) -> Result<f64> {
    evaluate(id, params)
}
