//! Certified complex roots of squarefree integer polynomials.
//!
//! Seeds come from a double-precision Aberth iteration and are polished by
//! Newton/Weierstrass steps in fixed-point big-integer arithmetic. Each
//! approximation `z_i` is then certified exactly: with
//! `W_i = p(z_i) / prod_{j != i} (z_i - z_j)`, the discs `|z - z_i| <= n |W_i|`
//! contain all roots, and pairwise-disjoint discs contain exactly one each.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{IntPolynomial, PolyError};

/// Default cap on working precision, in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 8192;

/// A disc `|z - center| <= radius` holding exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBox {
    pub re: BigRational,
    pub im: BigRational,
    pub radius: BigRational,
    /// The enclosed root is certified real.
    pub real: bool,
}

impl RootBox {
    pub fn center_f64(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius.to_f64().unwrap_or(f64::INFINITY)
    }
}

pub fn complex_roots(p: &IntPolynomial, precision: u32) -> Result<Vec<RootBox>, PolyError> {
    complex_roots_with_cap(p, precision, DEFAULT_PRECISION_CAP.max(4 * precision))
}

pub fn complex_roots_with_cap(
    p: &IntPolynomial,
    precision: u32,
    cap: u32,
) -> Result<Vec<RootBox>, PolyError> {
    let n = p.degree();
    if n == 1 {
        let r = BigRational::from_integer(-p.a(1));
        let radius = BigRational::new(BigInt::from(1), BigInt::from(1) << (precision + 1));
        return Ok(vec![RootBox { re: r, im: BigRational::zero(), radius, real: true }]);
    }
    if !p.to_zpoly().is_squarefree() {
        return Err(PolyError::NotSquarefree);
    }
    let coeffs: Vec<BigInt> = p.full_list();
    let approx = aberth_seeds(&coeffs);
    let mut bits = (precision + 32).max(64);
    let mut fixed: Vec<(BigInt, BigInt)> =
        approx.iter().map(|&(x, y)| (from_f64(x, bits), from_f64(y, bits))).collect();
    loop {
        fixed = refine(&coeffs, fixed, bits);
        if let Some(boxes) = certify(&coeffs, &fixed, bits, precision) {
            return Ok(boxes);
        }
        if bits >= cap {
            return Err(PolyError::PrecisionExhausted(bits));
        }
        let next = (bits * 2).min(cap);
        fixed = fixed.into_iter().map(|(x, y)| (x << (next - bits), y << (next - bits))).collect();
        bits = next;
    }
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Aberth iteration in double precision; coefficients leading first.
fn aberth_seeds(coeffs: &[BigInt]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let c: Vec<f64> = coeffs.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let radius = 1.0 + c[1..].iter().fold(0.0f64, |m, x| m.max(x.abs())).powf(1.0 / n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (radius * t.cos(), radius * t.sin())
        })
        .collect();
    let eval = |x: C64| -> (C64, C64) {
        let (mut v, mut d) = ((c[0], 0.0), (0.0, 0.0));
        for &ck in &c[1..] {
            d = cmul(d, x);
            d = (d.0 + v.0, d.1 + v.1);
            v = cmul(v, x);
            v = (v.0 + ck, v.1);
        }
        (v, d)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v == (0.0, 0.0) {
                continue;
            }
            let ratio = cdiv(v, d);
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let inv = cdiv((1.0, 0.0), (z[i].0 - z[j].0, z[i].1 - z[j].1));
                    s = (s.0 + inv.0, s.1 + inv.1);
                }
            }
            let denom = (1.0 - cmul(ratio, s).0, -cmul(ratio, s).1);
            let w = cdiv(ratio, denom);
            if w.0.is_finite() && w.1.is_finite() {
                z[i] = (z[i].0 - w.0, z[i].1 - w.1);
                moved = moved.max(w.0.hypot(w.1) / (1.0 + z[i].0.hypot(z[i].1)));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn from_f64(x: f64, bits: u32) -> BigInt {
    if !x.is_finite() {
        return BigInt::zero();
    }
    let (m, e, s) = num_traits::float::FloatCore::integer_decode(x);
    let mut v = BigInt::from(m);
    let shift = e as i64 + bits as i64;
    v = if shift >= 0 { v << shift as usize } else { v >> (-shift) as usize };
    if s < 0 {
        -v
    } else {
        v
    }
}

type Fixed = (BigInt, BigInt);

fn fmul(a: &Fixed, b: &Fixed, bits: u32) -> Fixed {
    ((&a.0 * &b.0 - &a.1 * &b.1) >> bits, (&a.0 * &b.1 + &a.1 * &b.0) >> bits)
}

fn fdiv(a: &Fixed, b: &Fixed, bits: u32) -> Option<Fixed> {
    let d = &b.0 * &b.0 + &b.1 * &b.1;
    if d.is_zero() {
        return None;
    }
    let re = ((&a.0 * &b.0 + &a.1 * &b.1) << bits) / &d;
    let im = ((&a.1 * &b.0 - &a.0 * &b.1) << bits) / &d;
    Some((re, im))
}

/// Weierstrass (Durand-Kerner) corrections at fixed precision until they
/// stop shrinking.
fn refine(coeffs: &[BigInt], mut z: Vec<Fixed>, bits: u32) -> Vec<Fixed> {
    let n = z.len();
    let one: BigInt = BigInt::from(1) << bits;
    let scaled: Vec<Fixed> = coeffs.iter().map(|c| (c << bits, BigInt::zero())).collect();
    let tol = BigInt::from(1) << 4;
    for _ in 0..200 {
        let mut worst = BigInt::zero();
        for i in 0..n {
            let mut v: Fixed = (one.clone(), BigInt::zero());
            for c in &scaled[1..] {
                v = fmul(&v, &z[i], bits);
                v = (v.0 + &c.0, v.1 + &c.1);
            }
            let mut den: Fixed = (one.clone(), BigInt::zero());
            for j in 0..n {
                if j != i {
                    let diff = (&z[i].0 - &z[j].0, &z[i].1 - &z[j].1);
                    den = fmul(&den, &diff, bits);
                }
            }
            let Some(w) = fdiv(&v, &den, bits) else { continue };
            let size = w.0.abs().max(w.1.abs());
            if size > worst {
                worst = size;
            }
            z[i] = (&z[i].0 - &w.0, &z[i].1 - &w.1);
        }
        if worst <= tol {
            break;
        }
    }
    z
}

/// Exact certification. Returns `None` when discs overlap, are too wide, or a
/// root cannot be classified as real or non-real.
fn certify(coeffs: &[BigInt], z: &[Fixed], bits: u32, precision: u32) -> Option<Vec<RootBox>> {
    let n = z.len();
    let nb = n as u32;
    // p(z_i) * 2^(n*bits) as an exact Gaussian integer
    let mut radii_sq: Vec<(BigInt, BigInt)> = Vec::with_capacity(n);
    for i in 0..n {
        let (mut vr, mut vi) = (BigInt::from(1), BigInt::zero());
        for (k, c) in coeffs[1..].iter().enumerate() {
            let nr = &vr * &z[i].0 - &vi * &z[i].1;
            let ni = &vr * &z[i].1 + &vi * &z[i].0;
            let shift = bits * (k as u32 + 1);
            vr = nr + (c << shift);
            vi = ni;
        }
        // prod_{j != i} (Z_i - Z_j), scaled by 2^((n-1) bits)
        let (mut dr, mut di) = (BigInt::from(1), BigInt::zero());
        for j in 0..n {
            if j != i {
                let (er, ei) = (&z[i].0 - &z[j].0, &z[i].1 - &z[j].1);
                let nr = &dr * &er - &di * &ei;
                di = &dr * &ei + &di * &er;
                dr = nr;
            }
        }
        let dmag = &dr * &dr + &di * &di;
        if dmag.is_zero() {
            return None;
        }
        // |W_i|^2 = |v|^2 / (2^(2 bits) |d|^2); radius^2 = n^2 |W_i|^2
        let num = (&vr * &vr + &vi * &vi) * BigInt::from(nb * nb);
        let den = dmag << (2 * bits);
        radii_sq.push((num, den));
    }
    // rational upper bounds for the radii, with denominator 2^(bits + 8)
    let rb = bits + 8;
    let radii: Vec<BigInt> = radii_sq
        .iter()
        .map(|(num, den)| {
            let scaled: BigInt = (num << (2 * rb)) / den + 1;
            scaled.sqrt() + 1
        })
        .collect();
    // radius below 2^-precision
    let limit = BigInt::from(1) << (rb - precision);
    if radii.iter().any(|r| *r >= limit) {
        return None;
    }
    // centers with denominator 2^rb
    let centers: Vec<Fixed> = z.iter().map(|(x, y)| (x << 8, y << 8)).collect();
    let disjoint = |ci: &Fixed, ri: &BigInt, cj: &Fixed, rj: &BigInt| {
        let dx = &ci.0 - &cj.0;
        let dy = &ci.1 - &cj.1;
        let s = ri + rj;
        &dx * &dx + &dy * &dy > &s * &s
    };
    for i in 0..n {
        for j in i + 1..n {
            if !disjoint(&centers[i], &radii[i], &centers[j], &radii[j]) {
                return None;
            }
        }
    }
    let mut real = vec![false; n];
    let mut snapped: Vec<(Fixed, BigInt)> = Vec::with_capacity(n);
    for i in 0..n {
        let conj = (centers[i].0.clone(), -&centers[i].1);
        let meets_other =
            (0..n).any(|j| j != i && !disjoint(&conj, &radii[i], &centers[j], &radii[j]));
        if !meets_other {
            real[i] = true;
            let r = &radii[i] + centers[i].1.abs();
            snapped.push(((centers[i].0.clone(), BigInt::zero()), r));
        } else if centers[i].1.abs() > radii[i] {
            snapped.push((centers[i].clone(), radii[i].clone()));
        } else {
            return None;
        }
    }
    // snapping real centers onto the axis widens discs; recheck
    for i in 0..n {
        if snapped[i].1 >= limit {
            return None;
        }
        for j in i + 1..n {
            if !disjoint(&snapped[i].0, &snapped[i].1, &snapped[j].0, &snapped[j].1) {
                return None;
            }
        }
    }
    let den = BigInt::from(1) << rb;
    let mut boxes: Vec<RootBox> = snapped
        .into_iter()
        .zip(real)
        .map(|((c, r), real)| RootBox {
            re: BigRational::new(c.0, den.clone()),
            im: BigRational::new(c.1, den.clone()),
            radius: BigRational::new(r, den.clone()),
            real,
        })
        .collect();
    boxes.sort_by(|a, b| a.re.cmp(&b.re).then(a.im.cmp(&b.im)));
    Some(boxes)
}
