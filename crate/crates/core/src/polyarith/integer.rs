//! Integer factorization with explicit work caps, squarefree kernels and
//! quadratic core discriminants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

/// Trial division runs over all integers up to this bound.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;
/// Pollard-rho iterations allowed per composite cofactor.
pub const RHO_ITERATION_CAP: u64 = 10_000_000;

/// `|m| = prod p^e * cofactor`, where `cofactor` (if present) is composite
/// and resisted factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerFactorization {
    pub negative: bool,
    pub primes: Vec<(BigInt, u32)>,
    pub cofactor: Option<BigInt>,
}

impl IntegerFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    pub fn valuation(&self, p: &BigInt) -> u32 {
        self.primes.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e)
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic for `n < 3.3e24`, probabilistic with fixed bases beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let pb = BigInt::from(p);
        if *n == pb {
            return true;
        }
        if (n % &pb).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u128(n: u128, cap: u64) -> Option<u128> {
    fn mulmod(a: u128, b: u128, m: u128) -> u128 {
        if m < (1u128 << 64) {
            return a * b % m;
        }
        // double-and-add keeps everything below 2^128
        let (mut a, mut b, mut r) = (a % m, b, 0u128);
        while b > 0 {
            if b & 1 == 1 {
                r = if r >= m - a { r - (m - a) } else { r + a };
            }
            a = if a >= m - a { a - (m - a) } else { a + a };
            b >>= 1;
        }
        r
    }
    let mut iters = 0u64;
    for c in 1u128.. {
        let f = |x: u128| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u128, 2u128, 2u128);
        let (mut r, mut q, m) = (1u64, 1u128, 128u64);
        let mut g = 1u128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
                iters += m.min(r);
                if iters > cap {
                    return None;
                }
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
        if c > 20 {
            return None;
        }
    }
    None
}

fn rho_big(n: &BigInt, cap: u64) -> Option<BigInt> {
    let mut iters = 0u64;
    for c in 1u32..20 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut ys) = (BigInt::from(2), BigInt::from(2), BigInt::from(2));
        let (mut r, m) = (1u64, 128u64);
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
                iters += m.min(r);
                if iters > cap {
                    return None;
                }
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

fn split(n: &BigInt, cap: u64) -> Option<BigInt> {
    // perfect powers defeat rho; check squares and cubes first
    for k in 2..=3u32 {
        let r = n.nth_root(k);
        if num_traits::pow(r.clone(), k as usize) == *n {
            return Some(r);
        }
    }
    match n.to_u128() {
        Some(small) => rho_u128(small, cap).map(BigInt::from),
        None => rho_big(n, cap),
    }
}

/// Factor `m` by trial division to [`TRIAL_DIVISION_BOUND`], then Pollard rho
/// capped at [`RHO_ITERATION_CAP`] iterations per cofactor.
pub fn factor_integer(m: &BigInt) -> Result<IntegerFactorization, PolyError> {
    factor_integer_with_caps(m, TRIAL_DIVISION_BOUND, RHO_ITERATION_CAP)
}

pub fn factor_integer_with_caps(
    m: &BigInt,
    trial_bound: u64,
    rho_cap: u64,
) -> Result<IntegerFactorization, PolyError> {
    if m.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let negative = m.is_negative();
    let mut n = m.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, e: u32, primes: &mut Vec<(BigInt, u32)>| {
        if let Some(entry) = primes.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            primes.push((p, e));
        }
    };
    // trial division, using u64 arithmetic once n fits
    let mut d = 2u64;
    while d <= trial_bound {
        if let Some(small) = n.to_u64() {
            if d.saturating_mul(d) > small {
                break;
            }
            if small % d == 0 {
                let mut e = 0;
                let mut s = small;
                while s % d == 0 {
                    s /= d;
                    e += 1;
                }
                push(BigInt::from(d), e, &mut primes);
                n = BigInt::from(s);
            }
        } else {
            let db = BigInt::from(d);
            if (&n % &db).is_zero() {
                let mut e = 0;
                while (&n % &db).is_zero() {
                    n /= &db;
                    e += 1;
                }
                push(db, e, &mut primes);
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut cofactor: Option<BigInt> = None;
    let mut pending = Vec::new();
    if !n.is_one() {
        pending.push(n);
    }
    while let Some(c) = pending.pop() {
        if c.is_one() {
            continue;
        }
        let below_trial_square = c
            .to_u64()
            .is_some_and(|s| (s as u128) < (trial_bound as u128 + 1) * (trial_bound as u128 + 1));
        if below_trial_square || is_probable_prime(&c) {
            push(c, 1, &mut primes);
            continue;
        }
        match split(&c, rho_cap) {
            Some(g) => {
                let h = &c / &g;
                pending.push(g);
                pending.push(h);
            }
            None => {
                cofactor = Some(match cofactor {
                    Some(prev) => prev * c,
                    None => c,
                });
            }
        }
    }
    primes.sort();
    Ok(IntegerFactorization { negative, primes, cofactor })
}

/// Squarefree kernel of `m` carrying the sign of `m`, and whether the
/// factorization completed. When it did not, the unfactored cofactor is
/// multiplied in as-is.
pub fn squarefree_part(m: &BigInt) -> Result<(BigInt, bool), PolyError> {
    let f = factor_integer(m)?;
    Ok(squarefree_from_factorization(&f))
}

pub(crate) fn squarefree_from_factorization(f: &IntegerFactorization) -> (BigInt, bool) {
    let mut d = BigInt::one();
    for (p, e) in &f.primes {
        if e % 2 == 1 {
            d *= p;
        }
    }
    if let Some(c) = &f.cofactor {
        d *= c;
    }
    if f.negative {
        d = -d;
    }
    (d, f.is_complete())
}

/// Discriminant of the quadratic field `Q(sqrt(m))` (1 when `m` is a square).
pub fn coredisc(m: &BigInt) -> Result<BigInt, PolyError> {
    let (d, complete) = squarefree_part(m)?;
    if !complete {
        return Err(PolyError::IncompleteFactorization);
    }
    Ok(coredisc_of_squarefree(&d))
}

pub(crate) fn coredisc_of_squarefree(d: &BigInt) -> BigInt {
    if d.mod_floor(&BigInt::from(4)).is_one() {
        d.clone()
    } else {
        d * 4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&b(12)), Ok((b(3), true)));
        assert_eq!(squarefree_part(&b(-4)), Ok((b(-1), true)));
        assert_eq!(squarefree_part(&b(448)), Ok((b(7), true)));
        assert_eq!(squarefree_part(&b(0)), Err(PolyError::ZeroInput));
    }

    #[test]
    fn coredisc_examples() {
        assert_eq!(coredisc(&b(5)), Ok(b(5)));
        assert_eq!(coredisc(&b(12)), Ok(b(12)));
        assert_eq!(coredisc(&b(-4)), Ok(b(-4)));
        assert_eq!(coredisc(&b(1)), Ok(b(1)));
        assert_eq!(coredisc(&b(-3)), Ok(b(-3)));
    }

    #[test]
    fn rho_splits_products_of_large_primes() {
        // two primes above the trial bound
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(1_000_033u64);
        let r = BigInt::from(998_244_353u64);
        let n = &p * &p * &q * &r;
        let f = factor_integer(&n).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.primes, vec![(p, 2), (q, 1), (r, 1)]);
        let big: BigInt = "170141183460469231731687303715884105727".parse().unwrap();
        assert!(is_probable_prime(&big));
        let f = factor_integer(&(&big * 6)).unwrap();
        assert_eq!(f.primes, vec![(b(2), 1), (b(3), 1), (big, 1)]);
    }

    #[test]
    fn capped_rho_reports_incomplete() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(1_000_000_009u64);
        let f = factor_integer_with_caps(&(&p * &q * 4), 100, 10).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.cofactor, Some(&p * &q));
        let (d, complete) = squarefree_from_factorization(&f);
        assert!(!complete);
        assert_eq!(d, &p * &q);
    }
}
