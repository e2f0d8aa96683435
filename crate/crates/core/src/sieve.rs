//! Candidate enumeration for one `(trace, a_n)` chunk and the arithmetic
//! filter chain that turns survivors into field records.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hpmbounds::{self, outward, outward_low, BoundsError, HpmBoundSet};
use crate::ordermax::{field_discriminant, has_prime_norm_leq};
use crate::polyarith::{
    coredisc, factor_integer, is_irreducible, poly_discriminant, sturm_signature, IntPolynomial,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SieveError {
    #[error("zero evaluation")]
    ZeroValue,
    #[error("unsupported filter level {0}")]
    FilterLevel(u64),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

pub const FILTER_LEVELS: [u64; 6] = [1, 2, 3, 4, 5, 7];
pub const DEFAULT_WINDOW: i64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub n: usize,
    pub r1: usize,
    pub r2: usize,
    pub bound: u64,
    pub filter_level: u64,
    pub window: i64,
}

impl SearchParams {
    pub fn new(n: usize, r1: usize, r2: usize, bound: u64, filter_level: u64, window: i64) -> Result<Self, SieveError> {
        if r1 + 2 * r2 != n || n < 2 {
            return Err(BoundsError::InvalidSignature { n, r1, r2 }.into());
        }
        if !FILTER_LEVELS.contains(&filter_level) {
            return Err(SieveError::FilterLevel(filter_level));
        }
        hpmbounds::hermite_constant(n - 1)?;
        Ok(SearchParams { n, r1, r2, bound, filter_level, window })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldRecord {
    pub poly: IntPolynomial,
    pub r1: usize,
    pub r2: usize,
    pub poly_disc: BigInt,
    /// `None` when the discriminant could not be factored within the caps.
    pub d_k: Option<BigInt>,
    pub index: Option<BigInt>,
    pub iso_class: Option<u64>,
}

impl FieldRecord {
    pub fn is_resolved(&self) -> bool {
        self.d_k.is_some()
    }
}

/// Chunk keys `(trace, a_n)` in lexicographic order.
pub fn chunk_list(params: &SearchParams) -> Result<Vec<(u32, i64)>, SieveError> {
    let mut out = Vec::new();
    for t in hpmbounds::trace_range(params.n) {
        let cell = HpmBoundSet::new(params.n, params.r1, params.r2, params.bound, t)?;
        let nmax = cell.nmax as i64;
        for an in -nmax..=nmax {
            if an != 0 && valuation_filter(&BigInt::from(an), params.filter_level)? {
                out.push((t, an));
            }
        }
    }
    Ok(out)
}

/// Keeps `value` unless some prime `q <= m` divides it to an exponent too
/// small to come from primes of norm above `m`.
pub fn valuation_filter(value: &BigInt, m: u64) -> Result<bool, SieveError> {
    if value.is_zero() {
        return Err(SieveError::ZeroValue);
    }
    if !FILTER_LEVELS.contains(&m) {
        return Err(SieveError::FilterLevel(m));
    }
    for q in [2u64, 3, 5, 7] {
        if q > m {
            break;
        }
        // least residue degree allowed at q
        let mut f_min = 1;
        while q.pow(f_min) <= m {
            f_min += 1;
        }
        let v = valuation(value, q);
        if v >= 1 && v < f_min {
            return Ok(false);
        }
    }
    Ok(true)
}

fn valuation(value: &BigInt, q: u64) -> u32 {
    let qb = BigInt::from(q);
    let mut x = value.abs();
    let mut v = 0;
    while (&x % &qb).is_zero() {
        x /= &qb;
        v += 1;
    }
    v
}

fn floor_div(a: i128, b: i128) -> i128 {
    let d = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        d - 1
    } else {
        d
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

struct Enumerator<'a> {
    n: usize,
    u2: f64,
    uk: Vec<f64>,
    window: i64,
    filter_level: u64,
    a: Vec<i128>,
    s: Vec<i128>,
    an: i128,
    out: &'a mut Vec<IntPolynomial>,
}

impl Enumerator<'_> {
    /// `R_k = sum_{i=1}^{k-1} a_i S_{k-i}`.
    fn tail(&self, k: usize) -> i128 {
        (1..k).map(|i| self.a[i - 1] * self.s[k - i - 1]).sum()
    }

    /// Integer interval for `S_k` given `a_1..a_(k-1)`, or `None` if empty.
    fn s_interval(&self, k: usize) -> Option<(i128, i128)> {
        let (lo, hi) = match k {
            2 => {
                let a1 = self.a[0] as f64;
                (outward_low(-self.u2 + 2.0 * a1 * a1 / self.n as f64), outward(self.u2))
            }
            _ => {
                let u = self.uk[k];
                let mut lo = -u;
                if k == 3 && self.a[0] == 0 {
                    lo = 0.0;
                }
                if k == 4 {
                    let s2 = self.s[1] as f64;
                    let s3 = self.s[2] as f64;
                    let gap = self.u2 - s2;
                    let mut floor4 = -2.0 * gap * gap;
                    if s2 + self.u2 > 0.0 {
                        floor4 += 2.0 * s3 * s3 / (s2 + self.u2);
                    } else if s3 != 0.0 {
                        return None;
                    }
                    lo = lo.max(outward_low(floor4));
                }
                (lo, u)
            }
        };
        let lo = lo.ceil() as i128;
        let hi = hi.floor() as i128;
        (lo <= hi).then_some((lo, hi))
    }

    fn run(&mut self, k: usize) {
        let Some((slo, shi)) = self.s_interval(k) else { return };
        let r = self.tail(k);
        let kk = k as i128;
        if k == self.n {
            let s = -kk * self.an - r;
            if s >= slo && s <= shi {
                self.a.push(self.an);
                self.s.push(s);
                self.leaf();
                self.a.pop();
                self.s.pop();
            }
            return;
        }
        // S_k = -k a_k - R_k
        let amin = ceil_div(-shi - r, kk);
        let amax = floor_div(-slo - r, kk);
        for ak in amin..=amax {
            self.a.push(ak);
            self.s.push(-kk * ak - r);
            self.run(k + 1);
            self.a.pop();
            self.s.pop();
        }
    }

    fn leaf(&mut self) {
        let coeffs: Vec<BigInt> = self.a.iter().map(|&x| BigInt::from(x)).collect();
        let p = IntPolynomial::new(coeffs).expect("degree >= 2");
        for j in -self.window..=self.window {
            let v = p.eval(&BigInt::from(j));
            if v.is_zero() {
                continue;
            }
            if !valuation_filter(&v, self.filter_level).unwrap_or(true) {
                return;
            }
        }
        self.out.push(p);
    }
}

/// Candidates with `a_1 = -trace` and the given `a_n`, in lexicographic order.
pub fn enumerate_chunk(params: &SearchParams, trace: u32, an: i64) -> Result<Vec<IntPolynomial>, SieveError> {
    let n = params.n;
    let cell = HpmBoundSet::new(n, params.r1, params.r2, params.bound, trace)?;
    let norm = an.unsigned_abs();
    if an == 0 || norm > cell.nmax {
        return Ok(Vec::new());
    }
    let mut uk = vec![0.0; n + 1];
    for (k, u) in uk.iter_mut().enumerate().skip(3) {
        *u = cell.power_sum_bound(norm, k)?;
    }
    let mut out = Vec::new();
    let mut e = Enumerator {
        n,
        u2: cell.u2,
        uk,
        window: params.window,
        filter_level: params.filter_level,
        a: vec![-(trace as i128)],
        s: vec![trace as i128],
        an: an as i128,
        out: &mut out,
    };
    e.run(2);
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Reducible,
    WrongSignature,
    CoreDiscTooLarge,
    SmallNormPrime,
    DiscriminantTooLarge,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RejectReason::Reducible => "reducible",
            RejectReason::WrongSignature => "wrong_signature",
            RejectReason::CoreDiscTooLarge => "coredisc_too_large",
            RejectReason::SmallNormPrime => "small_norm_prime",
            RejectReason::DiscriminantTooLarge => "discriminant_too_large",
        };
        f.write_str(s)
    }
}

/// One line of the filter trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterStep {
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub type FilterOutcome = Result<FieldRecord, RejectReason>;

pub fn candidate_filter(p: &IntPolynomial, params: &SearchParams) -> FilterOutcome {
    candidate_filter_traced(p, params).0
}

/// The filter chain with a step-by-step trace.
pub fn candidate_filter_traced(p: &IntPolynomial, params: &SearchParams) -> (FilterOutcome, Vec<FilterStep>) {
    let mut steps = Vec::new();
    let mut step = |check, passed, detail: String| steps.push(FilterStep { check, passed, detail });
    if !is_irreducible(p) {
        step("irreducible", false, "polynomial factors over Q".into());
        return (Err(RejectReason::Reducible), steps);
    }
    step("irreducible", true, String::new());
    let (r1, r2) = sturm_signature(p).expect("irreducible implies squarefree");
    if (r1, r2) != (params.r1, params.r2) {
        step("signature", false, format!("({r1},{r2})"));
        return (Err(RejectReason::WrongSignature), steps);
    }
    step("signature", true, format!("({r1},{r2})"));
    let disc = poly_discriminant(p);
    let bound = BigInt::from(params.bound);
    let core_complete = factor_integer(&disc).map(|f| f.is_complete()).unwrap_or(false);
    if core_complete {
        let cd = coredisc(&disc).expect("complete factorization");
        if cd.abs() > bound {
            step("coredisc", false, format!("|{cd}| > {bound}"));
            return (Err(RejectReason::CoreDiscTooLarge), steps);
        }
        step("coredisc", true, format!("{cd}"));
    } else {
        step("coredisc", true, "factorization incomplete; kept".into());
    }
    if params.filter_level >= 2 {
        if has_prime_norm_leq(p, params.filter_level) {
            step("prime_norms", false, format!("prime of norm <= {}", params.filter_level));
            return (Err(RejectReason::SmallNormPrime), steps);
        }
        step("prime_norms", true, format!("none of norm <= {}", params.filter_level));
    }
    let mut record = FieldRecord {
        poly: p.clone(),
        r1,
        r2,
        poly_disc: disc.clone(),
        d_k: None,
        index: None,
        iso_class: None,
    };
    match field_discriminant(p) {
        Ok((d, index)) => {
            if d.abs() > bound {
                step("field_discriminant", false, format!("|{d}| > {bound}"));
                return (Err(RejectReason::DiscriminantTooLarge), steps);
            }
            step("field_discriminant", true, format!("d_K = {d}, index = {index}"));
            record.d_k = Some(d);
            record.index = Some(index);
        }
        Err(e) => step("field_discriminant", true, format!("unresolved: {e}")),
    }
    (Ok(record), steps)
}

/// `|S_k| <= U_k`, the `S_2` window and the prefix rules, recomputed from the
/// finished polynomial.
pub fn satisfies_search_bounds(p: &IntPolynomial, params: &SearchParams) -> bool {
    let n = p.degree();
    let Some(trace) = (-p.a(1)).to_i64() else { return false };
    if trace < 0 || trace > (n / 2) as i64 {
        return false;
    }
    let Ok(cell) = HpmBoundSet::new(n, params.r1, params.r2, params.bound, trace as u32) else {
        return false;
    };
    let Some(norm) = p.a(n).abs().to_u64() else { return false };
    let prefix = hpmbounds::NewtonPrefix::from_coeffs(p.coeffs());
    let s: Vec<f64> = prefix.s.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect();
    if s[1] > outward(cell.u2) {
        return false;
    }
    for k in 3..=n {
        match cell.power_sum_bound(norm, k) {
            Ok(u) if s[k - 1].abs() <= u => {}
            _ => return false,
        }
    }
    let a1 = -(trace);
    hpmbounds::prefix_ok(a1, s[1], s.get(2).copied(), s.get(3).copied(), cell.u2, n)
}
