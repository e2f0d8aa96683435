//! Isomorphism of the fields defined by two polynomials.
//!
//! Candidate embeddings come from root matching in floating point; every
//! candidate is confirmed by exact composition modulo the second polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::ordermax::field_discriminant;
use crate::polyarith::{complex_roots, sturm_signature, IntPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("root precision insufficient to decide isomorphism")]
    PrecisionExhausted,
}

const ROOT_BITS: u32 = 64;
/// Largest admissible rounding error on a scaled coefficient.
const ROUND_TOLERANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: C64) -> C64 {
        C64::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64::new((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)
    }
    fn conj(self) -> C64 {
        C64::new(self.re, -self.im)
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Real roots followed by one representative (positive imaginary part) of
/// each conjugate pair.
fn split_roots(p: &IntPolynomial) -> Option<(Vec<C64>, Vec<C64>)> {
    let boxes = complex_roots(p, ROOT_BITS).ok()?;
    let mut real = Vec::new();
    let mut upper = Vec::new();
    for b in &boxes {
        let (re, im) = b.center_f64();
        if b.real {
            real.push(C64::new(re, 0.0));
        } else if im > 0.0 {
            upper.push(C64::new(re, im));
        }
    }
    Some((real, upper))
}

/// Rows of the inverse Vandermonde matrix: `coeffs[k][i]` is the coefficient
/// of `x^k` in the Lagrange basis polynomial of node `i`.
fn lagrange_coeffs(nodes: &[C64]) -> Vec<Vec<C64>> {
    let n = nodes.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (i, &bi) in nodes.iter().enumerate() {
        // prod_{j != i} (x - b_j), low degree first
        let mut poly = vec![C64::new(1.0, 0.0)];
        let mut denom = C64::new(1.0, 0.0);
        for (j, &bj) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].sub(c.mul(bj));
            }
            poly = next;
            denom = denom.mul(bi.sub(bj));
        }
        for (k, c) in poly.into_iter().enumerate() {
            out[k][i] = c.div(denom);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `p(h(x)) mod m(x)` is zero, with `h` given by rational coefficients.
fn composes_to_zero(p: &IntPolynomial, h: &[BigRational], m: &IntPolynomial) -> bool {
    let n = m.degree();
    let mfull: Vec<BigRational> = m.full_list().iter().rev().map(|c| BigRational::from(c.clone())).collect();
    let mulmod = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
        let mut prod = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        // reduce by the monic modulus, low degree first
        for d in (n..prod.len()).rev() {
            let c = std::mem::take(&mut prod[d]);
            if c.is_zero() {
                continue;
            }
            for k in 0..n {
                prod[d - n + k] -= &c * &mfull[k];
            }
        }
        prod.truncate(n);
        prod.resize(n, BigRational::zero());
        prod
    };
    let mut acc = vec![BigRational::zero(); n];
    for c in p.full_list() {
        acc = mulmod(&acc, h);
        acc[0] += BigRational::from(c.clone());
    }
    acc.iter().all(Zero::is_zero)
}

/// A polynomial `h` of degree `< n` with `p1(h(x)) = 0 mod p2(x)`, if one exists.
pub fn embedding(p1: &IntPolynomial, p2: &IntPolynomial) -> Result<Option<Vec<BigRational>>, IsoError> {
    let n = p2.degree();
    if p1.degree() != n {
        return Ok(None);
    }
    let (Some((ra, ca)), Some((rb, cb))) = (split_roots(p1), split_roots(p2)) else {
        return Err(IsoError::PrecisionExhausted);
    };
    if ra.len() != rb.len() {
        return Ok(None);
    }
    // O_K is contained in (1/index) Z[beta]
    let scale = match field_discriminant(p2) {
        Ok((_, index)) => index.to_f64().unwrap_or(f64::INFINITY),
        Err(_) => return Err(IsoError::PrecisionExhausted),
    };
    let nodes: Vec<C64> = rb.iter().copied().chain(cb.iter().flat_map(|&z| [z, z.conj()])).collect();
    let lag = lagrange_coeffs(&nodes);
    let lag_norm = lag.iter().flatten().map(|z| z.abs()).fold(0.0, f64::max);
    let root_scale = ra.iter().chain(&ca).chain(&rb).chain(&cb).map(|z| z.abs()).fold(1.0, f64::max);
    let err = scale * n as f64 * lag_norm * root_scale.powi(n as i32) * 1e-12;
    if !(err < ROUND_TOLERANCE / 2.0) {
        return Err(IsoError::PrecisionExhausted);
    }
    let pair_perms = permutations(ca.len());
    let real_perms = permutations(ra.len());
    let orient_count = 1usize << ca.len();
    for rp in &real_perms {
        for pp in &pair_perms {
            for orient in 0..orient_count {
                let mut images: Vec<C64> = rp.iter().map(|&i| ra[i]).collect();
                for (slot, &src) in pp.iter().enumerate() {
                    let z = if orient >> slot & 1 == 1 { ca[src].conj() } else { ca[src] };
                    images.push(z);
                    images.push(z.conj());
                }
                if let Some(h) = rational_candidate(&lag, &images, scale) {
                    if composes_to_zero(p1, &h, p2) {
                        return Ok(Some(h));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn rational_candidate(lag: &[Vec<C64>], images: &[C64], scale: f64) -> Option<Vec<BigRational>> {
    let den = BigInt::from(scale.round() as i64);
    let mut out = Vec::with_capacity(lag.len());
    for row in lag {
        let c = row.iter().zip(images).fold(C64::new(0.0, 0.0), |acc, (&l, &a)| acc.add(l.mul(a)));
        if c.im.abs() * scale > ROUND_TOLERANCE {
            return None;
        }
        let scaled = c.re * scale;
        let r = scaled.round();
        if (scaled - r).abs() > ROUND_TOLERANCE || !r.is_finite() {
            return None;
        }
        out.push(BigRational::new(BigInt::from(r as i64), den.clone()));
    }
    Some(out)
}

/// Whether `p1` and `p2` define isomorphic fields.
pub fn is_isomorphic(p1: &IntPolynomial, p2: &IntPolynomial) -> Result<bool, IsoError> {
    if p1 == p2 {
        return Ok(true);
    }
    if p1.degree() != p2.degree() {
        return Ok(false);
    }
    match (sturm_signature(p1), sturm_signature(p2)) {
        (Ok(s1), Ok(s2)) if s1 == s2 => {}
        _ => return Ok(false),
    }
    if let (Ok((d1, _)), Ok((d2, _))) = (field_discriminant(p1), field_discriminant(p2)) {
        if d1 != d2 {
            return Ok(false);
        }
    }
    if p1.degree() == 1 {
        return Ok(true);
    }
    Ok(embedding(p1, p2)?.is_some())
}
