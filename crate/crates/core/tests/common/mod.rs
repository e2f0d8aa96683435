//! Shared test oracles.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use nftab::hpmbounds::t2_bound;
use nftab::ordermax::field_discriminant;
use nftab::polyarith::{factor_over_z, IntPolynomial};
use nftab::tabcli::is_isomorphic;

/// Complex roots of a monic real polynomial (`coeffs` = `a_1..a_n`) by
/// plain Durand-Kerner in f64.
pub fn roots_f64(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let n = coeffs.len();
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (1.0, 0.0);
        for &c in coeffs {
            acc = (acc.0 * z.0 - acc.1 * z.1 + c, acc.0 * z.1 + acc.1 * z.0);
        }
        acc
    };
    let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (0.9 * bound * th.cos(), 0.9 * bound * th.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = eval(z[i]);
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                    den = (den.0 * d.0 - den.1 * d.1, den.0 * d.1 + den.1 * d.0);
                }
            }
            let m = den.0 * den.0 + den.1 * den.1;
            if m == 0.0 {
                continue;
            }
            let q = ((num.0 * den.0 + num.1 * den.1) / m, (num.1 * den.0 - num.0 * den.1) / m);
            z[i] = (z[i].0 - q.0, z[i].1 - q.1);
            delta = delta.max(q.0.hypot(q.1));
        }
        if delta < 1e-14 {
            break;
        }
    }
    z
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// One field found by an oracle: discriminant and smallest defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleField {
    pub d_k: BigInt,
    pub poly: IntPolynomial,
}

/// Exhaustive enumeration of monic polynomials with `a_1 = -t`,
/// `0 <= t <= n/2`, inside the box `|a_k| <= C(n,k) (U2/n)^(k/2)` implied by
/// `T2 <= U2`. With `select_t2`, only polynomials whose `T2` (from roots)
/// is at most `U2` are kept. No Newton, Pohst or arithmetic pruning.
pub fn box_oracle(n: usize, r1: usize, bound: u64, select_t2: bool) -> Vec<OracleField> {
    let mut found: Vec<OracleField> = Vec::new();
    for t in 0..=(n / 2) as i64 {
        let u2 = t2_bound(n, bound, t as u32).unwrap();
        let lim: Vec<i64> =
            (0..=n).map(|k| (binom(n, k) * (u2 / n as f64).powf(k as f64 / 2.0) + 1e-9).floor() as i64).collect();
        let mut a = vec![-t; n];
        let rec = |a: &mut Vec<i64>, found: &mut Vec<OracleField>| {
            let mut idx = vec![0i64; n];
            // odometer over a_2..a_n
            let dims: Vec<i64> = (2..=n).map(|k| lim[k]).collect();
            let total: i128 = dims.iter().map(|&d| (2 * d + 1) as i128).product();
            for mut code in 0..total {
                for (j, &d) in dims.iter().enumerate() {
                    let w = (2 * d + 1) as i128;
                    idx[j] = (code % w) as i64 - d;
                    code /= w;
                }
                a[1..n].copy_from_slice(&idx[..n - 1]);
                if a[n - 1] == 0 {
                    continue;
                }
                consider(a, r1, bound, u2, select_t2, found);
            }
        };
        rec(&mut a, &mut found);
    }
    dedupe(found)
}

fn consider(a: &[i64], r1: usize, bound: u64, u2: f64, select_t2: bool, found: &mut Vec<OracleField>) {
    let cf: Vec<f64> = a.iter().map(|&x| x as f64).collect();
    let roots = roots_f64(&cf);
    if select_t2 {
        let t2: f64 = roots.iter().map(|z| z.0 * z.0 + z.1 * z.1).sum();
        if t2 > u2 + 1e-6 {
            return;
        }
    }
    let real = roots.iter().filter(|z| z.1.abs() < 1e-7).count();
    if real != r1 {
        return;
    }
    let p = IntPolynomial::from_i64(a);
    if factor_over_z(&p).len() != 1 {
        return;
    }
    let Ok((d, _)) = field_discriminant(&p) else {
        panic!("oracle: unresolved discriminant for {p}");
    };
    if d.magnitude().to_u64().is_some_and(|m| m <= bound) {
        found.push(OracleField { d_k: d, poly: p });
    }
}

fn dedupe(mut found: Vec<OracleField>) -> Vec<OracleField> {
    found.sort_by(|x, y| x.d_k.magnitude().cmp(y.d_k.magnitude()).then_with(|| x.poly.cmp(&y.poly)));
    let mut reps: Vec<OracleField> = Vec::new();
    for f in found {
        let dup = reps.iter().any(|r| r.d_k == f.d_k && is_isomorphic(&r.poly, &f.poly).unwrap());
        if !dup {
            reps.push(f);
        }
    }
    reps
}

/// Degree 2 and 3 fields are primitive; a quartic field is primitive iff its
/// resolvent cubic has no rational root.
pub fn is_primitive(p: &IntPolynomial) -> bool {
    if p.degree() != 4 {
        return p.degree() <= 3 || p.degree() == 5 || p.degree() == 7;
    }
    let c: Vec<BigInt> = p.coeffs().to_vec();
    let (a, b, cc, d) = (&c[0], &c[1], &c[2], &c[3]);
    // y^3 - b y^2 + (ac - 4d) y - (a^2 d - 4bd + c^2)
    let four = BigInt::from(4);
    let r = IntPolynomial::new(vec![-b.clone(), a * cc - &four * d, -(a * a * d - &four * b * d + cc * cc)]).unwrap();
    factor_over_z(&r).iter().all(|f| f.degree() > 1)
}
