//! Coefficient search bounds for defining polynomials of small trace and
//! small `T2`: the trace range, the `T2` bound `U2`, the norm cap, Newton
//! power-sum bounds `U_k`, the Newton recursion, and prefix pruning rules.
//!
//! All real bounds are widened outward by [`outward`] before being compared
//! to integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("Hermite constant known only for dimensions 1..=8, got {0}")]
    UnsupportedDimension(usize),
    #[error("norm {norm} exceeds the arithmetic-geometric cap for U2 = {u2}")]
    InfeasibleNorm { norm: u64, u2: f64 },
    #[error("invalid signature ({r1}, {r2}) for degree {n}")]
    InvalidSignature { n: usize, r1: usize, r2: usize },
}

/// Relative and absolute slack added to every real bound.
const REL_SLACK: f64 = 1e-12;
const ABS_SLACK: f64 = 1e-9;

/// Widens a computed upper bound so that floating error cannot shrink it.
pub fn outward(x: f64) -> f64 {
    x * (1.0 + REL_SLACK) + ABS_SLACK
}

/// Widens a computed lower bound downward.
pub fn outward_low(x: f64) -> f64 {
    x - x.abs() * REL_SLACK - ABS_SLACK
}

/// `gamma_d^d` for `d = 1..=8`.
const HERMITE_POWER: [f64; 8] = [1.0, 4.0 / 3.0, 2.0, 4.0, 8.0, 64.0 / 3.0, 64.0, 256.0];

pub fn hermite_constant(d: usize) -> Result<f64, BoundsError> {
    if d == 0 || d > 8 {
        return Err(BoundsError::UnsupportedDimension(d));
    }
    Ok(outward(HERMITE_POWER[d - 1].powf(1.0 / d as f64)))
}

/// Bound set for one `(degree, signature, B, trace)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct HpmBoundSet {
    pub n: usize,
    pub r1: usize,
    pub r2: usize,
    pub bound: u64,
    pub trace: u32,
    pub u2: f64,
    pub nmax: u64,
}

impl HpmBoundSet {
    pub fn new(n: usize, r1: usize, r2: usize, bound: u64, trace: u32) -> Result<Self, BoundsError> {
        if r1 + 2 * r2 != n || n < 2 {
            return Err(BoundsError::InvalidSignature { n, r1, r2 });
        }
        let u2 = t2_bound(n, bound, trace)?;
        Ok(HpmBoundSet { n, r1, r2, bound, trace, u2, nmax: norm_bound(n, u2) })
    }

    /// `U_k` for this cell at `|a_n| = norm`.
    pub fn power_sum_bound(&self, norm: u64, k: usize) -> Result<f64, BoundsError> {
        pohst_bound(self.n, self.u2, norm, k)
    }
}

/// Trace values `0..=floor(n/2)`.
pub fn trace_range(n: usize) -> std::ops::RangeInclusive<u32> {
    0..=(n / 2) as u32
}

/// `U2 = t^2/n + gamma_{n-1} (B/n)^(1/(n-1))`, rounded outward.
pub fn t2_bound(n: usize, bound: u64, trace: u32) -> Result<f64, BoundsError> {
    let g = hermite_constant(n - 1)?;
    let t = trace as f64;
    let lattice = g * outward((bound as f64 / n as f64).powf(1.0 / (n - 1) as f64));
    Ok(outward(t * t / n as f64 + lattice))
}

/// `floor((U2/n)^(n/2))`.
pub fn norm_bound(n: usize, u2: f64) -> u64 {
    outward((u2 / n as f64).powf(n as f64 / 2.0)).floor() as u64
}

/// Power sums `S_1..S_k` together with coefficients `a_1..a_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NewtonPrefix {
    pub a: Vec<BigInt>,
    pub s: Vec<BigInt>,
}

impl NewtonPrefix {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `R_k = sum_{i=1}^{k-1} a_i S_{k-i}` for the next index `k = len + 1`.
    pub fn tail_sum(&self) -> BigInt {
        let k = self.a.len() + 1;
        (1..k).map(|i| &self.a[i - 1] * &self.s[k - i - 1]).sum()
    }

    pub fn from_coeffs(a: &[BigInt]) -> Self {
        a.iter().fold(NewtonPrefix::default(), |p, c| newton_step(&p, c.clone()))
    }
}

/// Appends `a_k` and the power sum `S_k = -k a_k - sum a_i S_{k-i}`.
pub fn newton_step(prefix: &NewtonPrefix, a_next: BigInt) -> NewtonPrefix {
    let k = prefix.len() + 1;
    let s = -(&a_next * BigInt::from(k)) - prefix.tail_sum();
    let mut out = prefix.clone();
    out.a.push(a_next);
    out.s.push(s);
    out
}

/// Inverse direction: the coefficient `a_k` forced by a target `S_k`, if
/// integral.
pub fn coeff_for_power_sum(prefix: &NewtonPrefix, s_k: &BigInt) -> Option<BigInt> {
    let k = BigInt::from(prefix.len() + 1);
    let num = -(s_k + prefix.tail_sum());
    let (q, r) = num.div_rem(&k);
    r.is_zero().then_some(q)
}

/// Maximum of `sum t_i^(k/2)` over `t_1..t_n > 0` with `sum t_i <= U2` and
/// `prod t_i = N^2`. The optimum takes two values, `t_a` (j times) and
/// `t_b <= t_a` (n - j times), on the face `sum t_i = U2`.
pub fn pohst_bound(n: usize, u2: f64, norm: u64, k: usize) -> Result<f64, BoundsError> {
    let nf = n as f64;
    let kh = k as f64 / 2.0;
    let log_target = 2.0 * (norm as f64).ln();
    let log_cap = nf * (u2 / nf).ln();
    if log_target > outward(log_cap) + 1e-9 {
        return Err(BoundsError::InfeasibleNorm { norm, u2 });
    }
    let equal = nf * (u2 / nf).powf(kh);
    if log_target >= log_cap {
        return Ok(outward(equal));
    }
    let mut best = equal;
    for j in 1..n {
        let jf = j as f64;
        let m = nf - jf;
        // t_a = (U2 - m t_b)/j; g(t_b) = j ln t_a + m ln t_b - ln N^2
        // is increasing on (0, U2/n]: bisection for its root
        let g = |tb: f64| jf * ((u2 - m * tb) / jf).ln() + m * tb.ln() - log_target;
        let (mut lo, mut hi) = (0.0f64, u2 / nf);
        if g(hi) < 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // the larger value of t_b only decreases the objective; take the
        // smaller endpoint to stay above the exact optimum
        let tb = lo;
        let ta = (u2 - m * tb) / jf;
        let v = jf * ta.powf(kh) + m * tb.powf(kh);
        if v > best {
            best = v;
        }
    }
    Ok(outward(best))
}

/// Prefix pruning rules. `s3` and `s4` are applied when present.
pub fn prefix_ok(a1: i64, s2: f64, s3: Option<f64>, s4: Option<f64>, u2: f64, n: usize) -> bool {
    let a1f = a1 as f64;
    if s2 < outward_low(-u2 + 2.0 * a1f * a1f / n as f64) {
        return false;
    }
    if a1 == 0 && s3.is_some_and(|s| s < 0.0) {
        return false;
    }
    let gap = u2 - s2;
    if let Some(s4) = s4 {
        if s4 < outward_low(-2.0 * gap * gap) {
            return false;
        }
        if let Some(s3) = s3 {
            let rhs = (s2 + u2) / 2.0 * (s4 + 2.0 * gap * gap);
            if s3 * s3 > outward(rhs.max(0.0)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prefix(a: &[i64]) -> NewtonPrefix {
        NewtonPrefix::from_coeffs(&a.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hermite_values() {
        assert!((hermite_constant(1).unwrap() - 1.0).abs() < 1e-8);
        assert!((hermite_constant(2).unwrap() - 1.154_700_538).abs() < 1e-8);
        assert!((hermite_constant(8).unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(hermite_constant(9), Err(BoundsError::UnsupportedDimension(9)));
    }

    #[test]
    fn t2_and_norm_examples() {
        let u = t2_bound(8, 5_726_300, 0).unwrap();
        assert!((u - 12.43).abs() < 5e-3, "{u}");
        assert!((t2_bound(2, 4, 0).unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(trace_range(9).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        assert_eq!(norm_bound(2, 5.0), 2);
        assert_eq!(norm_bound(8, 12.43), 5);
        assert_eq!(norm_bound(2, 2.0), 1);
    }

    #[test]
    fn newton_examples() {
        assert_eq!(prefix(&[-3, 2]).s, big(&[3, 5]));
        assert_eq!(prefix(&[0, 0, -1]).s, big(&[0, 0, 3]));
        assert_eq!(prefix(&[0, 0, 0, 0]).s, big(&[0, 0, 0, 0]));
        let p = prefix(&[-3]);
        assert_eq!(coeff_for_power_sum(&p, &BigInt::from(5)), Some(BigInt::from(2)));
        assert_eq!(coeff_for_power_sum(&p, &BigInt::from(6)), None);
    }

    #[test]
    fn pohst_examples() {
        let u = pohst_bound(2, 5.0, 2, 3).unwrap();
        assert!((u - 9.0).abs() < 1e-6, "{u}");
        // equality case of the mean inequality
        let u = pohst_bound(2, 4.0, 2, 3).unwrap();
        assert!((u - 2.0 * 2f64.powf(1.5)).abs() < 1e-6);
        assert!(matches!(pohst_bound(2, 3.0, 2, 3), Err(BoundsError::InfeasibleNorm { .. })));
    }

    #[test]
    fn prefix_examples() {
        assert!(!prefix_ok(0, 0.0, Some(-1.0), None, 10.0, 4));
        let (s2, u2) = (1.0, 10.0);
        let s4 = -2.0 * (u2 - s2) * (u2 - s2) - 1.0;
        assert!(!prefix_ok(1, s2, Some(0.0), Some(s4), u2, 4));
        assert!(prefix_ok(0, 0.0, Some(0.0), Some(0.0), 10.0, 4));
    }
}
