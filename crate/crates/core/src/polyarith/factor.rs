//! Factorization over `Z` for monic polynomials: rational-root test,
//! degree-pattern certificates, and Zassenhaus (Hensel lifting plus
//! subset recombination) as the complete fallback.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::fp::{factor_fp, FpPoly};
use super::{IntPolynomial, ZPoly};

const CERTIFICATE_PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

pub fn is_irreducible(p: &IntPolynomial) -> bool {
    let n = p.degree();
    if n == 1 {
        return true;
    }
    let z = p.to_zpoly();
    if p.a(n).is_zero() || has_rational_root(p) {
        return false;
    }
    if !z.is_squarefree() {
        return false;
    }
    if n <= 3 {
        // no rational root and degree at most three
        return true;
    }
    // possible degrees of a proper factor, intersected over good primes
    let mut possible: Vec<bool> = vec![true; n + 1];
    let mut good = 0;
    for &q in &CERTIFICATE_PRIMES {
        let f = FpPoly::from_zpoly(&z, q);
        let fac = factor_fp(&f);
        if !fac.is_squarefree() {
            continue;
        }
        good += 1;
        let sums = subset_sums(&fac.degree_pattern(), n);
        for d in 1..n {
            possible[d] &= sums[d];
        }
        if (1..n).all(|d| !possible[d]) {
            return true;
        }
        if good >= 6 {
            break;
        }
    }
    factor_over_z(p).len() == 1
}

fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

fn has_rational_root(p: &IntPolynomial) -> bool {
    let n = p.degree();
    let an = p.a(n).abs();
    let Some(an_small) = an.to_u64() else {
        return false;
    };
    if an_small > 1_000_000_000_000 {
        return false;
    }
    let mut d = 1u64;
    while d * d <= an_small {
        if an_small % d == 0 {
            for cand in [d, an_small / d] {
                let c = BigInt::from(cand);
                if p.eval(&c).is_zero() || p.eval(&-c).is_zero() {
                    return true;
                }
            }
        }
        d += 1;
    }
    false
}

/// Factors a monic polynomial into monic irreducible factors over `Z`
/// (with multiplicity), sorted.
pub fn factor_over_z(p: &IntPolynomial) -> Vec<IntPolynomial> {
    let z = p.to_zpoly();
    let mut out = Vec::new();
    // squarefree decomposition over Z first
    let mut rest = z.clone();
    let mut x_power = 0;
    while rest.coeff(0).is_zero() && rest.deg() > 0 {
        rest = rest.div_exact(&ZPoly::from_i64(&[0, 1])).unwrap();
        x_power += 1;
    }
    for _ in 0..x_power {
        out.push(ZPoly::from_i64(&[0, 1]));
    }
    for (sqf, mult) in squarefree_decompose_z(&rest) {
        for f in zassenhaus(&sqf) {
            for _ in 0..mult {
                out.push(f.clone());
            }
        }
    }
    let mut res: Vec<IntPolynomial> =
        out.iter().map(|f| IntPolynomial::from_zpoly(f).expect("monic factor")).collect();
    res.sort();
    res
}

/// Yun's algorithm over `Z` for a monic polynomial.
fn squarefree_decompose_z(f: &ZPoly) -> Vec<(ZPoly, usize)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let df = f.derivative();
    let mut a = f.gcd(&df);
    let mut b = f.div_exact(&a).expect("gcd divides");
    let mut c = df.div_exact(&a).expect("gcd divides derivative");
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    loop {
        a = b.gcd(&d);
        if a.deg() > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).expect("exact");
        if b.deg() == 0 {
            break;
        }
        c = d.div_exact(&a).expect("exact");
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Mignotte-style bound on coefficients of any factor: `2^n * ||f||_2`.
fn factor_coefficient_bound(f: &ZPoly) -> BigInt {
    let norm2: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    (norm2.sqrt() + 1) << f.deg()
}

/// Symmetric residue in `(-m/2, m/2]`.
fn smod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn reduce(f: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn reduce_sym(f: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(f.coeffs().iter().map(|c| smod(c, m)).collect())
}

fn mul_mod(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    reduce(&a.mul(b), m)
}

/// Division by a monic divisor modulo `m`.
fn divrem_mod(a: &ZPoly, b: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let (q, r) = a.divrem_monic(b);
    (reduce(&q, m), reduce(&r, m))
}

/// One quadratic Hensel step: from `f = g h (mod m)` and `s g + t h = 1 (mod m)`
/// to the same relations modulo `m^2`. `g`, `h` monic.
fn hensel_step(
    f: &ZPoly,
    g: &ZPoly,
    h: &ZPoly,
    s: &ZPoly,
    t: &ZPoly,
    m: &BigInt,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = m * m;
    let e = reduce(&f.sub(&g.mul(h)), &m2);
    let (q, r) = divrem_mod(&mul_mod(s, &e, &m2), h, &m2);
    let g_new = reduce(&g.add(&t.mul(&e)).add(&q.mul(g)), &m2);
    let h_new = reduce(&h.add(&r), &m2);
    let b = reduce(&s.mul(&g_new).add(&t.mul(&h_new)).sub(&ZPoly::from_i64(&[1])), &m2);
    let (c, d) = divrem_mod(&mul_mod(s, &b, &m2), &h_new, &m2);
    let s_new = reduce(&s.sub(&d), &m2);
    let t_new = reduce(&t.sub(&t.mul(&b)).sub(&c.mul(&g_new)), &m2);
    (g_new, h_new, s_new, t_new)
}

/// Lifts a factorization of monic `f` modulo `q` into pairwise coprime monic
/// factors, to a modulus `q^(2^k) >= target`.
fn multifactor_lift(f: &ZPoly, factors: &[FpPoly], q: u64, target: &BigInt) -> (Vec<ZPoly>, BigInt) {
    if factors.len() == 1 {
        let mut m = BigInt::from(q);
        while &m < target {
            m = &m * &m;
        }
        return (vec![reduce(f, &m)], m);
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let prod = |fs: &[FpPoly]| fs.iter().fold(FpPoly::one(q), |acc, x| acc.mul(x));
    let gq = prod(left);
    let hq = prod(right);
    let (_, sq, tq) = gq.ext_gcd(&hq);
    let (mut g, mut h, mut s, mut t) =
        (gq.to_zpoly(), hq.to_zpoly(), sq.to_zpoly(), tq.to_zpoly());
    let mut m = BigInt::from(q);
    while &m < target {
        let next = hensel_step(f, &g, &h, &s, &t, &m);
        g = next.0;
        h = next.1;
        s = next.2;
        t = next.3;
        m = &m * &m;
    }
    let (mut lf, m1) = multifactor_lift(&g, left, q, target);
    let (rf, m2) = multifactor_lift(&h, right, q, target);
    debug_assert_eq!(m1, m2);
    debug_assert_eq!(m1, m);
    lf.extend(rf);
    (lf, m)
}

fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.clone()];
    }
    // pick the good prime with fewest modular factors
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for q in primes_from(3) {
        let fq = FpPoly::from_zpoly(f, q);
        if fq.deg() != n {
            continue;
        }
        let fac = factor_fp(&fq);
        if !fac.is_squarefree() {
            continue;
        }
        let polys: Vec<FpPoly> = fac.factors.into_iter().map(|(g, _)| g).collect();
        if polys.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().is_none_or(|(_, b)| polys.len() < b.len()) {
            best = Some((q, polys));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (q, modular) = best.expect("a squarefree polynomial has good primes");
    let bound = factor_coefficient_bound(f) * 2 + 1;
    let (lifted, m) = multifactor_lift(f, &modular, q, &bound);
    recombine(f, lifted, &m)
}

fn recombine(f: &ZPoly, mut lifted: Vec<ZPoly>, m: &BigInt) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in combinations(lifted.len(), size) {
            let cand = subset
                .iter()
                .fold(ZPoly::from_i64(&[1]), |acc, &i| mul_mod(&acc, &lifted[i], m));
            let cand = reduce_sym(&cand, m);
            if let Some(quot) = rest.div_exact(&cand) {
                out.push(cand);
                rest = quot;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    out.push(rest);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub(crate) fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start.max(2)..).filter(|&k| is_small_prime(k))
}

pub(crate) fn is_small_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= k {
        if k % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&ip(&[0, -2])));
        assert!(!is_irreducible(&ip(&[0, 0, 0, -1])));
        assert!(is_irreducible(&ip(&[0, 0, 0, 1])));
        assert!(is_irreducible(&ip(&[0, -1, -1])));
    }

    #[test]
    fn zassenhaus_recovers_products_without_rational_roots() {
        // (x^2 + 1)(x^2 - 2)(x^2 + x + 3)
        let a = ZPoly::from_i64(&[1, 0, 1]);
        let b = ZPoly::from_i64(&[-2, 0, 1]);
        let c = ZPoly::from_i64(&[3, 1, 1]);
        let prod = a.mul(&b).mul(&c);
        let p = IntPolynomial::from_zpoly(&prod).unwrap();
        assert!(!is_irreducible(&p));
        let f = factor_over_z(&p);
        assert_eq!(f.len(), 3);
        let back = f.iter().fold(ZPoly::from_i64(&[1]), |acc, g| acc.mul(&g.to_zpoly()));
        assert_eq!(back, prod);
    }

    #[test]
    fn swinnerton_dyer_style_quartic_needs_lifting() {
        // x^4 - 10x^2 + 1 is irreducible but splits mod every prime
        assert!(is_irreducible(&ip(&[0, -10, 0, 1])));
        // (x^2 - 2x - 1)(x^2 + 2x - 1) = x^4 - 6x^2 + 1
        assert!(!is_irreducible(&ip(&[0, -6, 0, 1])));
        assert_eq!(factor_over_z(&ip(&[0, -6, 0, 1])).len(), 2);
    }

    #[test]
    fn repeated_factors() {
        // (x^2+1)^2 x
        let p = ip(&[0, 2, 0, 1, 0]);
        let f = factor_over_z(&p);
        assert_eq!(f.len(), 3);
        assert!(!is_irreducible(&p));
    }
}
