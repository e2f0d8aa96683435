//! Integer Hermite normal form and linear algebra over `F_q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Lower-triangular HNF of a full-rank integer lattice in `Z^n` given by
/// generating rows. Row `i` has support in columns `0..=i`, a positive
/// diagonal, and entries left of the diagonal reduced modulo the diagonal of
/// their column.
pub fn hnf_lower(mut rows: Vec<Vec<BigInt>>, n: usize) -> Option<Vec<Vec<BigInt>>> {
    let mut out: Vec<Vec<BigInt>> = vec![Vec::new(); n];
    for c in (0..n).rev() {
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        // gcd-combine all rows with a nonzero entry in column c
        let mut pivot: Option<Vec<BigInt>> = None;
        let mut rest = Vec::with_capacity(rows.len());
        for r in rows.drain(..) {
            if r[c].is_zero() {
                rest.push(r);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(r),
                Some(p) => {
                    let e = p[c].extended_gcd(&r[c]);
                    let (a, b) = (p[c].clone() / &e.gcd, r[c].clone() / &e.gcd);
                    let new_p: Vec<BigInt> =
                        p.iter().zip(&r).map(|(x, y)| &e.x * x + &e.y * y).collect();
                    let other: Vec<BigInt> = p.iter().zip(&r).map(|(x, y)| &b * x - &a * y).collect();
                    rest.push(other);
                    pivot = Some(new_p);
                }
            }
        }
        let mut p = pivot?;
        if p[c].is_negative() {
            p.iter_mut().for_each(|x| *x = -x.clone());
        }
        out[c] = p;
        rows = rest;
    }
    // reduce below-diagonal entries
    for i in 0..n {
        for j in (0..i).rev() {
            let d = out[j][j].clone();
            let k = out[i][j].div_floor(&d);
            if !k.is_zero() {
                let rj = out[j].clone();
                for (x, y) in out[i].iter_mut().zip(rj) {
                    *x -= &k * y;
                }
            }
        }
    }
    Some(out)
}

/// Solves `c * H = v` for lower-triangular `H`; `None` unless `c` is integral.
pub fn solve_lower_integral(h: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut c = vec![BigInt::zero(); n];
    for j in (0..n).rev() {
        let mut t = v[j].clone();
        for i in j + 1..n {
            t -= &c[i] * &h[i][j];
        }
        let (q, r) = t.div_rem(&h[j][j]);
        if !r.is_zero() {
            return None;
        }
        c[j] = q;
    }
    Some(c)
}

#[inline]
pub fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn invmod(a: u64, q: u64) -> u64 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, q as i128, a as i128);
    while nr != 0 {
        let k = r / nr;
        (t, nt) = (nt, t - k * nt);
        (r, nr) = (nr, r - k * nr);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(q as i128) as u64
}

pub fn reduce_mod(x: &BigInt, q: u64) -> u64 {
    use num_traits::ToPrimitive;
    x.mod_floor(&BigInt::from(q)).to_u64().expect("residue fits")
}

/// Basis of `{x : sum_i x_i rows_i = 0}` over `F_q`.
pub fn left_kernel(rows: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let w = rows[0].len();
    let mut aug: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..m).map(|j| u64::from(i == j)));
            v
        })
        .collect();
    let mut rank = 0;
    for col in 0..w {
        let Some(p) = (rank..m).find(|&r| aug[r][col] != 0) else { continue };
        aug.swap(rank, p);
        let inv = invmod(aug[rank][col], q);
        for x in aug[rank].iter_mut() {
            *x = mulmod(*x, inv, q);
        }
        let pivot_row = aug[rank].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + q - mulmod(f, *y, q)) % q;
                }
            }
        }
        rank += 1;
    }
    aug[rank..].iter().map(|r| r[w..].to_vec()).collect()
}

pub fn rank_mod(rows: &[Vec<u64>], q: u64) -> usize {
    rows.len() - left_kernel(rows, q).len()
}
