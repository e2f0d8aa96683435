//! Polynomials over a prime field `F_q` with machine-word coefficients, and
//! their complete factorization (squarefree, distinct-degree, equal-degree).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IntPolynomial, ZPoly};

#[inline]
fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub(crate) fn invmod(a: u64, q: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(q as i128));
    assert!(e.gcd == 1, "{a} not invertible mod {q}");
    e.x.rem_euclid(q as i128) as u64
}

/// Polynomial over `F_q`, low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FpPoly {
    q: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(q: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= q;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { q, c }
    }

    pub fn from_zpoly(p: &ZPoly, q: u64) -> Self {
        let qb = BigInt::from(q);
        Self::new(
            q,
            p.coeffs().iter().map(|x| x.mod_floor(&qb).to_u64().unwrap()).collect(),
        )
    }

    pub fn from_int_poly(p: &IntPolynomial, q: u64) -> Self {
        Self::from_zpoly(&p.to_zpoly(), q)
    }

    pub fn zero(q: u64) -> Self {
        FpPoly { q, c: vec![] }
    }

    pub fn one(q: u64) -> Self {
        Self::new(q, vec![1])
    }

    pub fn x(q: u64) -> Self {
        Self::new(q, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Coefficients lifted to the symmetric range `(-q/2, q/2]`.
    pub fn to_zpoly_symmetric(&self) -> ZPoly {
        let q = self.q as i64;
        ZPoly::new(
            self.c
                .iter()
                .map(|&x| {
                    let x = x as i64;
                    BigInt::from(if x > q / 2 { x - q } else { x })
                })
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = invmod(self.lc(), self.q);
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.q, self.c.iter().map(|&x| mulmod(x, k, self.q)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let q = self.q;
        Self::new(
            q,
            (0..n)
                .map(|i| {
                    (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % q
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let q = self.q;
        Self::new(
            q,
            (0..n)
                .map(|i| {
                    (self.c.get(i).copied().unwrap_or(0) + q - o.c.get(i).copied().unwrap_or(0))
                        % q
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.q);
        }
        let q = self.q;
        let mut out = vec![0u128; self.c.len() + o.c.len() - 1];
        let qq = q as u128;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % qq;
            }
        }
        Self::new(q, out.into_iter().map(|x| x as u64).collect())
    }

    pub fn divrem(&self, b: &Self) -> (Self, Self) {
        assert!(!b.is_zero(), "division by zero polynomial");
        let q = self.q;
        if self.c.len() < b.c.len() {
            return (Self::zero(q), self.clone());
        }
        let db = b.deg();
        let inv = invmod(b.lc(), q);
        let mut r = self.c.clone();
        let mut quo = vec![0u64; self.c.len() - db];
        for k in (0..quo.len()).rev() {
            let c = mulmod(r[k + db], inv, q);
            if c != 0 {
                for (j, &bc) in b.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + q - mulmod(c, bc, q)) % q;
                }
            }
            quo[k] = c;
        }
        r.truncate(db);
        (Self::new(q, quo), Self::new(q, r))
    }

    pub fn rem(&self, b: &Self) -> Self {
        self.divrem(b).1
    }

    pub fn derivative(&self) -> Self {
        let q = self.q;
        Self::new(
            q,
            self.c.iter().enumerate().skip(1).map(|(i, &x)| mulmod(x, i as u64 % q, q)).collect(),
        )
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let q = self.q;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(q), Self::zero(q));
        let (mut t0, mut t1) = (Self::zero(q), Self::one(q));
        while !r1.is_zero() {
            let (quo, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&quo.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&quo.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = invmod(r0.lc(), q);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn mulmod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    /// `self^e mod m` for a big exponent.
    pub fn powmod_big(&self, e: &BigUint, m: &Self) -> Self {
        let mut result = Self::one(self.q).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            result = result.mulmod(&result, m);
            if e.bit(i) {
                result = result.mulmod(&base, m);
            }
        }
        result
    }

    pub fn powmod_u64(&self, e: u64, m: &Self) -> Self {
        self.powmod_big(&BigUint::from(e), m)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &c in self.c.iter().rev() {
            acc = (mulmod(acc, x, self.q) + c) % self.q;
        }
        acc
    }
}

/// Factorization of a polynomial modulo a prime into monic irreducibles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModQFactorization {
    pub q: u64,
    pub factors: Vec<(FpPoly, usize)>,
}

impl ModQFactorization {
    /// Degrees of the factors, repeated by multiplicity.
    pub fn degree_pattern(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(f, e)| std::iter::repeat(f.deg()).take(*e))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    pub fn product(&self) -> FpPoly {
        let mut acc = FpPoly::one(self.q);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

pub fn factor_mod_q(p: &IntPolynomial, q: u64) -> ModQFactorization {
    factor_fp(&FpPoly::from_int_poly(p, q))
}

/// Complete factorization of a nonzero polynomial over `F_q` (monic part).
pub fn factor_fp(f: &FpPoly) -> ModQFactorization {
    let q = f.modulus();
    let mut factors: Vec<(FpPoly, usize)> = Vec::new();
    if f.deg() > 0 {
        for (sqf, mult) in squarefree_decomposition(&f.monic()) {
            for (g, d) in distinct_degree(&sqf) {
                for h in equal_degree(&g, d) {
                    factors.push((h, mult));
                }
            }
        }
    }
    factors.sort();
    ModQFactorization { q, factors }
}

/// Squarefree decomposition `f = prod g_i^i` over `F_q` (monic input).
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let q = f.modulus();
    let mut out = Vec::new();
    let mut stack = vec![(f.clone(), 1usize)];
    while let Some((f, scale)) = stack.pop() {
        if f.deg() == 0 {
            continue;
        }
        let mut i = 1;
        let df = f.derivative();
        let mut c = f.gcd(&df);
        let mut w = f.divrem(&c).0;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.divrem(&y).0;
            if fac.deg() > 0 {
                out.push((fac.monic(), i * scale));
            }
            w = y;
            c = c.divrem(&w).0;
            i += 1;
        }
        if c.deg() > 0 {
            // c is a q-th power: take the q-th root coefficientwise.
            let root: Vec<u64> = c.coeffs().iter().step_by(q as usize).copied().collect();
            stack.push((FpPoly::new(q, root).monic(), scale * q as usize));
        }
    }
    // merge equal factors that arrived via different branches
    out.sort();
    let mut merged: Vec<(FpPoly, usize)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, m)) if *h == g => *m += e,
            _ => merged.push((g, e)),
        }
    }
    merged
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let q = f.modulus();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(q);
    let mut h = x.clone();
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod_u64(q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            out.push((g.clone(), d));
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of irreducibles of degree `d`.
fn equal_degree(f: &FpPoly, d: usize) -> Vec<FpPoly> {
    let q = f.modulus();
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    // deterministic stream so results do not depend on call history
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (q << 8) ^ n as u64);
    let exponent: BigUint = if q == 2 {
        BigUint::zero()
    } else {
        (BigUint::from(q).pow(d as u32) - BigUint::one()) / BigUint::from(2u32)
    };
    loop {
        let a = FpPoly::new(q, (0..n).map(|_| rng.gen_range(0..q)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if q == 2 {
            // trace map a + a^2 + ... + a^(2^(nd-1)) for characteristic 2
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mulmod(&t, f);
                acc = acc.add(&t);
            }
            acc
        } else {
            a.powmod_big(&exponent, f).sub(&FpPoly::one(q))
        };
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < n {
            let h = f.divrem(&g).0;
            let mut out = equal_degree(&g, d);
            out.extend(equal_degree(&h, d));
            return out;
        }
    }
}
