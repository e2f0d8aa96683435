//! Orders in `Q[x]/(p)`: `q`-maximal orders by Round 2, field discriminants
//! and indices, and residue degrees of primes above small `q`.

mod linalg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyarith::{factor_integer, factor_mod_q, poly_discriminant, FpPoly, IntPolynomial};
pub use linalg::{hnf_lower, left_kernel, rank_mod, solve_lower_integral};
use linalg::{mulmod, reduce_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("discriminant factorization did not complete")]
    IncompleteFactorization,
    #[error("prime {0} exceeds the supported word size")]
    PrimeTooLarge(BigInt),
}

/// `Z`-basis `rows[i] / den` over the power basis `1, theta, ..., theta^(n-1)`,
/// lower-triangular in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBasis {
    pub den: BigInt,
    pub rows: Vec<Vec<BigInt>>,
}

impl OrderBasis {
    pub fn equation_order(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        OrderBasis { den: BigInt::one(), rows }
    }

    pub fn degree(&self) -> usize {
        self.rows.len()
    }

    /// `[O : Z[theta]] = den^n / prod diag`.
    pub fn index(&self) -> BigInt {
        let n = self.degree() as u32;
        let diag: BigInt = (0..self.degree()).map(|i| self.rows[i][i].clone()).product();
        num_traits::pow(self.den.clone(), n as usize) / diag
    }

    /// Coordinates of `v / v_den` (power basis) in this basis, when integral.
    pub fn coords(&self, v: &[BigInt], v_den: &BigInt) -> Option<Vec<BigInt>> {
        let scaled: Vec<BigInt> = v.iter().map(|x| x * &self.den).collect();
        let (common, rem): (Vec<BigInt>, Vec<BigInt>) =
            scaled.iter().map(|x| x.div_rem(v_den)).unzip();
        if rem.iter().any(|r| !r.is_zero()) {
            // exact rational solve: multiply through and test divisibility at the end
            let sol = solve_lower_integral(
                &self.rows.iter().map(|r| r.iter().map(|x| x * v_den).collect()).collect::<Vec<_>>(),
                &scaled,
            )?;
            return Some(sol);
        }
        solve_lower_integral(&self.rows, &common)
    }

    pub fn contains_equation_order(&self) -> bool {
        let n = self.degree();
        (0..n).all(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            self.coords(&e, &BigInt::one()).is_some()
        })
    }

    /// Structure constants `omega_i omega_j = sum_k T[i][j][k] omega_k`;
    /// `None` if some product leaves the lattice.
    pub fn mult_table(&self, p: &IntPolynomial) -> Option<Vec<Vec<Vec<BigInt>>>> {
        let n = self.degree();
        let den2 = &self.den * &self.den;
        let mut t = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let prod = mul_mod_poly(&self.rows[i], &self.rows[j], p);
                let c = self.coords(&prod, &den2)?;
                t[i][j] = c.clone();
                t[j][i] = c;
            }
        }
        Some(t)
    }

    pub fn is_closed_under_multiplication(&self, p: &IntPolynomial) -> bool {
        self.mult_table(p).is_some()
    }
}

/// Product of two power-basis vectors modulo the monic `p`.
fn mul_mod_poly(a: &[BigInt], b: &[BigInt], p: &IntPolynomial) -> Vec<BigInt> {
    let n = p.degree();
    let mut v = vec![BigInt::zero(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    // x^n = -sum_{i<n} a_{n-i} x^i
    for k in (n..2 * n - 1).rev() {
        let c = std::mem::take(&mut v[k]);
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            v[k - n + i] -= &c * p.a(n - i);
        }
    }
    v.truncate(n);
    v
}

/// Multiplication in `O/qO` from structure constants reduced mod `q`.
struct ResidueAlgebra {
    q: u64,
    n: usize,
    t: Vec<Vec<Vec<u64>>>,
    one: Vec<u64>,
}

impl ResidueAlgebra {
    fn new(order: &OrderBasis, table: &[Vec<Vec<BigInt>>], q: u64) -> Self {
        let n = order.degree();
        let t = table
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(|x| reduce_mod(x, q)).collect()).collect())
            .collect();
        let mut e = vec![BigInt::zero(); n];
        e[0] = BigInt::one();
        let one = order
            .coords(&e, &BigInt::one())
            .expect("order contains 1")
            .iter()
            .map(|x| reduce_mod(x, q))
            .collect();
        ResidueAlgebra { q, n, t, one }
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let q = self.q;
        let mut out = vec![0u64; self.n];
        for i in 0..self.n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if b[j] == 0 {
                    continue;
                }
                let c = mulmod(a[i], b[j], q);
                for (k, o) in out.iter_mut().enumerate() {
                    *o = (*o + mulmod(c, self.t[i][j][k], q)) % q;
                }
            }
        }
        out
    }

    fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.one.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn basis(&self, i: usize) -> Vec<u64> {
        (0..self.n).map(|j| u64::from(i == j)).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.q - y) % self.q).collect()
    }

    /// Kernel of `x -> x^(q^j)` with `q^j >= n`: the radical.
    fn radical(&self) -> Vec<Vec<u64>> {
        let mut j = 1u32;
        while (self.q as u128).pow(j) < self.n as u128 {
            j += 1;
        }
        let images: Vec<Vec<u64>> = (0..self.n)
            .map(|i| (0..j).fold(self.basis(i), |x, _| self.pow(&x, self.q)))
            .collect();
        left_kernel(&images, self.q)
    }
}

fn small_prime(q: &BigInt) -> Result<u64, OrderError> {
    q.to_u64().filter(|&v| v < (1 << 62)).ok_or_else(|| OrderError::PrimeTooLarge(q.clone()))
}

/// One Round-2 enlargement at `q`; `None` when `order` is already `q`-maximal.
fn round2_step(p: &IntPolynomial, order: &OrderBasis, q: u64) -> Option<OrderBasis> {
    let n = order.degree();
    let table = order.mult_table(p).expect("order is a ring");
    let alg = ResidueAlgebra::new(order, &table, q);
    let radical = alg.radical();
    if radical.is_empty() {
        return None;
    }
    let qb = BigInt::from(q);
    let unit_rows = |extra: &[Vec<u64>]| -> Vec<Vec<BigInt>> {
        let mut gens: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { qb.clone() } else { BigInt::zero() }).collect())
            .collect();
        gens.extend(extra.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()));
        hnf_lower(gens, n).expect("full rank")
    };
    // I = qO + lift(radical), in O-coordinates
    let ideal = unit_rows(&radical);
    // z in O with z I subset q I
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n * n);
        for g in &ideal {
            let mut prod = vec![BigInt::zero(); n];
            for (j, gj) in g.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                for (k, tk) in table[i][j].iter().enumerate() {
                    prod[k] += gj * tk;
                }
            }
            let c = solve_lower_integral(&ideal, &prod).expect("I is an ideal");
            row.extend(c.iter().map(|x| reduce_mod(x, q)));
        }
        rows.push(row);
    }
    let kernel = left_kernel(&rows, q);
    if kernel.is_empty() {
        return None;
    }
    let u = unit_rows(&kernel);
    // new basis U * rows / (q den)
    let mut gens: Vec<Vec<BigInt>> = u
        .iter()
        .map(|urow| {
            (0..n)
                .map(|c| urow.iter().zip(&order.rows).map(|(x, r)| x * &r[c]).sum())
                .collect()
        })
        .collect();
    let mut den = &order.den * &qb;
    let g = gens.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        gens.iter_mut().flatten().for_each(|x| *x /= &g);
        den /= &g;
    }
    let rows = hnf_lower(gens, n).expect("full rank");
    Some(OrderBasis { den, rows })
}

/// Enlarges `order` at `q` until `q`-maximal.
pub fn maximize_at(p: &IntPolynomial, mut order: OrderBasis, q: u64) -> OrderBasis {
    while let Some(next) = round2_step(p, &order, q) {
        order = next;
    }
    order
}

/// A `q`-maximal order containing `Z[theta]` and `v_q([O : Z[theta]])`.
pub fn q_maximal_order(p: &IntPolynomial, q: u64) -> (OrderBasis, u32) {
    let order = maximize_at(p, OrderBasis::equation_order(p.degree()), q);
    let mut idx = order.index();
    let qb = BigInt::from(q);
    let mut v = 0;
    while !idx.is_zero() && (&idx % &qb).is_zero() {
        idx /= &qb;
        v += 1;
    }
    (order, v)
}

/// Dedekind's criterion: `Z[theta]` is `q`-maximal.
pub fn dedekind_maximal(p: &IntPolynomial, q: u64) -> bool {
    let z = p.to_zpoly();
    let fac = factor_mod_q(p, q);
    let g = fac.factors.iter().fold(FpPoly::one(q), |acc, (f, _)| acc.mul(f));
    let pq = FpPoly::from_zpoly(&z, q);
    let (h, r) = pq.divrem(&g);
    debug_assert!(r.is_zero());
    let gz = g.to_zpoly();
    let hz = h.to_zpoly();
    let diff = gz.mul(&hz).sub(&z);
    let qb = BigInt::from(q);
    let f = crate::polyarith::ZPoly::new(diff.coeffs().iter().map(|c| c / &qb).collect());
    let fq = FpPoly::from_zpoly(&f, q);
    fq.gcd(&g).gcd(&h).deg() == 0
}

/// `(d_K, [O_K : Z[theta]])`. Enlarges only at primes `q` with `q^2 | disc(p)`.
pub fn field_discriminant(p: &IntPolynomial) -> Result<(BigInt, BigInt), OrderError> {
    let disc = poly_discriminant(p);
    let fac = factor_integer(&disc).map_err(|_| OrderError::IncompleteFactorization)?;
    if !fac.is_complete() {
        return Err(OrderError::IncompleteFactorization);
    }
    let mut index = BigInt::one();
    for (q, e) in &fac.primes {
        if *e < 2 {
            continue;
        }
        let qs = small_prime(q)?;
        if dedekind_maximal(p, qs) {
            continue;
        }
        let (_, v) = q_maximal_order(p, qs);
        index *= num_traits::pow(q.clone(), v as usize);
    }
    let d = &disc / (&index * &index);
    Ok((d, index))
}

/// Splitting of `q` in the maximal order: `(e, f)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSplit {
    pub q: u64,
    pub factors: Vec<(u32, u32)>,
}

impl PrimeSplit {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(e, f)| e * f).sum()
    }
}

pub fn residue_degrees(p: &IntPolynomial, q: u64) -> PrimeSplit {
    let disc = poly_discriminant(p);
    let q2 = BigInt::from(q * q);
    if !(&disc % &q2).is_zero() || dedekind_maximal(p, q) {
        residue_degrees_fast(p, q)
    } else {
        residue_degrees_slow(p, q)
    }
}

/// Kummer-Dedekind: valid when `q` does not divide the index.
pub fn residue_degrees_fast(p: &IntPolynomial, q: u64) -> PrimeSplit {
    let fac = factor_mod_q(p, q);
    let mut factors: Vec<(u32, u32)> =
        fac.factors.iter().map(|(g, m)| (*m as u32, g.deg() as u32)).collect();
    factors.sort_unstable();
    PrimeSplit { q, factors }
}

/// Splits `O/qO` of a `q`-maximal order into local factors by idempotents
/// of the Frobenius-fixed subalgebra.
pub fn residue_degrees_slow(p: &IntPolynomial, q: u64) -> PrimeSplit {
    let (order, _) = q_maximal_order(p, q);
    let table = order.mult_table(p).expect("order is a ring");
    let alg = ResidueAlgebra::new(&order, &table, q);
    let n = alg.n;
    let radical = alg.radical();
    let fixed_rows: Vec<Vec<u64>> =
        (0..n).map(|i| alg.sub(&alg.pow(&alg.basis(i), q), &alg.basis(i))).collect();
    let fixed = left_kernel(&fixed_rows, q);
    let mut idempotents = vec![alg.one.clone()];
    for b in &fixed {
        let mut next = Vec::new();
        for e in &idempotents {
            for r in 0..q {
                let mut shifted = b.clone();
                for (x, y) in shifted.iter_mut().zip(&alg.one) {
                    *x = (*x + q - mulmod(r, *y, q)) % q;
                }
                // 1 - (b - r)^(q-1) projects onto the components where b = r
                let proj = alg.sub(&alg.one, &alg.pow(&shifted, q - 1));
                let part = alg.mul(e, &proj);
                if part.iter().any(|&x| x != 0) {
                    next.push(part);
                }
            }
        }
        idempotents = next;
    }
    let mut factors = Vec::new();
    for e in &idempotents {
        let span: Vec<Vec<u64>> = (0..n).map(|i| alg.mul(e, &alg.basis(i))).collect();
        let dim = rank_mod(&span, q) as u32;
        let rad: Vec<Vec<u64>> = radical.iter().map(|r| alg.mul(e, r)).collect();
        let dim_rad = if rad.is_empty() { 0 } else { rank_mod(&rad, q) as u32 };
        let f = dim - dim_rad;
        factors.push((dim / f, f));
    }
    factors.sort_unstable();
    PrimeSplit { q, factors }
}

/// True iff some prime `q <= m` has a prime above it of norm `q^f <= m`.
pub fn has_prime_norm_leq(p: &IntPolynomial, m: u64) -> bool {
    [2u64, 3, 5, 7].iter().filter(|&&q| q <= m).any(|&q| {
        residue_degrees(p, q).factors.iter().any(|&(_, f)| q.checked_pow(f).is_some_and(|nq| nq <= m))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn q_maximal_examples() {
        let (o, v) = q_maximal_order(&ip(&[0, 1]), 2);
        assert_eq!(v, 0);
        assert_eq!(o, OrderBasis::equation_order(2));
        let dedekind = ip(&[1, -2, 8]);
        let (o, v) = q_maximal_order(&dedekind, 2);
        assert_eq!(v, 1);
        assert!(o.is_closed_under_multiplication(&dedekind));
        // (theta^2 + theta)/2 lies in the order
        let two = BigInt::from(2);
        let e: Vec<BigInt> = [0, 1, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert!(o.coords(&e, &two).is_some());
        let (o, v) = q_maximal_order(&ip(&[0, -5]), 2);
        assert_eq!(v, 1);
        let e: Vec<BigInt> = [1, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert!(o.coords(&e, &two).is_some());
    }

    #[test]
    fn field_discriminant_examples() {
        let b = |x: i64| BigInt::from(x);
        assert_eq!(field_discriminant(&ip(&[0, -1, -1])), Ok((b(-23), b(1))));
        assert_eq!(field_discriminant(&ip(&[1, -2, 8])), Ok((b(-503), b(2))));
        assert_eq!(field_discriminant(&ip(&[0, -5])), Ok((b(5), b(2))));
    }

    #[test]
    fn residue_degree_examples() {
        assert_eq!(residue_degrees(&ip(&[0, 1]), 2).factors, vec![(2, 1)]);
        assert_eq!(residue_degrees(&ip(&[-1, 1]), 2).factors, vec![(1, 2)]);
        let d = ip(&[1, -2, 8]);
        assert_eq!(residue_degrees(&d, 2).factors, vec![(1, 1), (1, 1), (1, 1)]);
        assert_eq!(residue_degrees_slow(&ip(&[0, 1]), 2).factors, vec![(2, 1)]);
        assert_eq!(residue_degrees_slow(&ip(&[-1, 1]), 2).factors, vec![(1, 2)]);
    }

    #[test]
    fn prime_norm_examples() {
        assert!(has_prime_norm_leq(&ip(&[0, 1]), 5));
        assert!(has_prime_norm_leq(&ip(&[-1, 1]), 3));
        assert!(!has_prime_norm_leq(&ip(&[-1, 1]), 2));
        assert!(has_prime_norm_leq(&ip(&[-1, 4]), 5));
    }
}
