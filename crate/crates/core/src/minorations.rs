//! Explicit-formula lower bounds for `|d_K|` and local corrections.
//!
//! For a field of degree `n` and signature `(r1, r2)`, and every `y > 0`,
//!
//! ```text
//! (1/n) log|d_K| >= gamma + log(4 pi) + r1/n - L1(y) - 12 pi / (5 n sqrt(y))
//!                   + (4/n) sum_p sum_m log N(p) / (1 + N(p)^m) f(m sqrt(y) log N(p))
//! ```
//!
//! with `f(x) = (3 (sin x - x cos x) / x^3)^2`,
//! `L1(y) = sum_{j odd} L(y/j^2)/j + (r1/n) sum_{j>=1} (-1)^(j+1) L(y/j^2)` and
//! `L(z) = 2 int_0^inf (1 - f(u sqrt z)) e^(-u) du`.
//!
//! The two series are summed exactly up to `j < J0 = ceil(10 sqrt y)`; beyond
//! that `y/j^2 <= 1/100` and `L` is replaced by its power series, whose
//! `j`-sums are Hurwitz zeta values.

use serde::{Deserialize, Serialize};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Norms of assumed prime ideals for which corrections are tabulated.
pub const CORRECTION_NORMS: [u64; 5] = [2, 3, 4, 5, 7];

const SERIES_TERMS: usize = 48;
const SMALL_Z: f64 = 0.1;

pub fn poitou_f(x: f64) -> f64 {
    let x = x.abs();
    if x < 0.5 {
        // 3 (sin x - x cos x)/x^3 = 3 sum_{k>=1} (-1)^(k+1) 2k x^(2k-2) / (2k+1)!
        let x2 = x * x;
        let mut term = 1.0;
        let mut g = 0.0;
        let mut fact = 6.0; // (2k+1)! at k = 1
        for k in 1..16u32 {
            let kk = k as f64;
            g += term * 3.0 * 2.0 * kk / fact;
            term *= -x2;
            fact *= (2.0 * kk + 2.0) * (2.0 * kk + 3.0);
        }
        g * g
    } else {
        let g = 3.0 * (x.sin() - x * x.cos()) / (x * x * x);
        g * g
    }
}

/// `int_0^2 h(s) s^p ds` scaled by two, where `1 - f` has the cosine-transform
/// density `h(s) = 3/160 (32 - 40 s^2 + 20 s^3 - s^5)` on `[0, 2]`.
fn kernel_moment(p: i32) -> f64 {
    let m = |e: i32| 2f64.powi(e + 1) / (e + 1) as f64;
    2.0 * 3.0 / 160.0 * (32.0 * m(p) - 40.0 * m(p + 2) + 20.0 * m(p + 3) - m(p + 5))
}

/// Power-series coefficients of `L(z) = sum_{k>=1} c_k z^k`.
fn series_coeffs() -> [f64; SERIES_TERMS] {
    let mut c = [0.0; SERIES_TERMS];
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        *ck = 2.0 * sign * kernel_moment(2 * k as i32);
    }
    c
}

pub fn poitou_l(z: f64) -> f64 {
    if z < SMALL_Z {
        let c = series_coeffs();
        return c.iter().rev().fold(0.0, |acc, &ck| acc * z + ck);
    }
    let sz = z.sqrt();
    2.0 + 33.0 / (10.0 * z) - 3.0 / (20.0 * z * z)
        + (3.0 / (80.0 * z * z * z) + 3.0 / (4.0 * z * z)) * (4.0 * z).ln_1p()
        - (12.0 / 5.0 + 3.0 / z) * (2.0 * sz).atan() / sz
}

const BERNOULLI_2M: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `sum_{i>=0} (a+i)^(-s)` for `s > 1`, `a > 0`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    let shift = (2.0 * s + 10.0 - a).max(0.0).ceil() as usize;
    let mut sum = 0.0;
    for i in 0..shift {
        sum += (a + i as f64).powf(-s);
    }
    let b = a + shift as f64;
    sum += b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s);
    // B_{2m}/(2m)! * s (s+1) ... (s+2m-2) * b^(-s-2m+1)
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = b.powf(-s - 1.0);
    for (m, bm) in BERNOULLI_2M.iter().enumerate() {
        let term = bm / fact * rising * pow;
        sum += term;
        let m2 = 2.0 * (m + 1) as f64;
        rising *= (s + m2 - 1.0) * (s + m2);
        fact *= (m2 + 1.0) * (m2 + 2.0);
        pow /= b * b;
    }
    sum
}

/// `(sum_{j odd} L(y/j^2)/j, sum_{j>=1} (-1)^(j+1) L(y/j^2))`.
pub fn poitou_l_sums(y: f64) -> (f64, f64) {
    let j0 = (10.0 * y.sqrt()).ceil().max(1.0) as u64;
    let (mut odd, mut alt) = (0.0, 0.0);
    for j in 1..j0 {
        let jf = j as f64;
        let l = poitou_l(y / (jf * jf));
        if j % 2 == 1 {
            odd += l / jf;
            alt += l;
        } else {
            alt -= l;
        }
    }
    let first_odd = if j0 % 2 == 1 { j0 } else { j0 + 1 } as f64;
    let first_even = if j0 % 2 == 0 { j0 } else { j0 + 1 } as f64;
    let c = series_coeffs();
    let mut yk = 1.0;
    for (k, ck) in c.iter().enumerate().skip(1) {
        yk *= y;
        let s_odd = 2.0 * k as f64 + 1.0;
        let s_alt = 2.0 * k as f64;
        let odd_tail = 2f64.powf(-s_odd) * hurwitz_zeta(s_odd, first_odd / 2.0);
        let alt_tail = 2f64.powf(-s_alt)
            * (hurwitz_zeta(s_alt, first_odd / 2.0) - hurwitz_zeta(s_alt, first_even / 2.0));
        let t_odd = ck * yk * odd_tail;
        let t_alt = ck * yk * alt_tail;
        odd += t_odd;
        alt += t_alt;
        if t_odd.abs() < 1e-18 && t_alt.abs() < 1e-18 {
            break;
        }
    }
    (odd, alt)
}

/// `L1(y)` for signature with `r1` real places out of `n`.
pub fn poitou_l1(y: f64, n: usize, r1: usize) -> f64 {
    let (odd, alt) = poitou_l_sums(y);
    odd + r1 as f64 / n as f64 * alt
}

/// Contribution `sum_m log q/(1+q^m) f(m sqrt(y) log q)` of one prime ideal of
/// norm `q`.
pub fn prime_contribution(q: u64, y: f64) -> f64 {
    let lq = (q as f64).ln();
    let sy = y.sqrt();
    let mut sum = 0.0;
    let mut qm = 1.0;
    for m in 1..400 {
        qm *= q as f64;
        let weight = lq / (1.0 + qm);
        sum += weight * poitou_f(m as f64 * sy * lq);
        // f <= 1, so the weight bounds every later term
        if weight < 1e-15 {
            break;
        }
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub y: f64,
    pub log_bound_per_degree: f64,
    pub dk_bound: u128,
}

pub fn log_bound_per_degree(n: usize, r1: usize, assumed: &[u64], y: f64) -> f64 {
    let nf = n as f64;
    let mut v = EULER_GAMMA + (4.0 * std::f64::consts::PI).ln() + r1 as f64 / nf
        - poitou_l1(y, n, r1)
        - 12.0 * std::f64::consts::PI / (5.0 * nf * y.sqrt());
    let mut norms = assumed.to_vec();
    norms.sort_unstable();
    for q in norms {
        v += 4.0 / nf * prime_contribution(q, y);
    }
    v
}

/// Evaluates the bound at `y`. `r2` only enters through `n = r1 + 2 r2`.
pub fn disc_lower_bound(n: usize, r1: usize, r2: usize, assumed: &[u64], y: f64) -> BoundEvaluation {
    debug_assert_eq!(r1 + 2 * r2, n);
    let v = log_bound_per_degree(n, r1, assumed, y);
    let safe = n as f64 * v - (n as f64 * v).abs() * 1e-12 - 1e-12;
    BoundEvaluation { y, log_bound_per_degree: v, dk_bound: safe.exp().ceil().max(1.0) as u128 }
}

/// Maximizes the bound over `y`: a 200-point logarithmic grid on
/// `[1e-3, 1e3]`, then golden-section search around the best grid point.
pub fn optimize_bound(n: usize, r1: usize, assumed: &[u64]) -> (f64, f64) {
    let eval = |t: f64| log_bound_per_degree(n, r1, assumed, t.exp());
    let (lo, hi) = ((1e-3f64).ln(), (1e3f64).ln());
    let steps = 199;
    let grid: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| eval(t)).collect();
    let best = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(steps)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    // relative width 1e-8 in y is absolute width 1e-8 in log y
    while b - a > 1e-8 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
        }
    }
    let t = 0.5 * (a + b);
    let (t, v) = [(t, eval(t)), (grid[best], vals[best])]
        .into_iter()
        .fold((t, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    (t.exp(), v)
}

/// `C(r1, r2, q)`: floor of the optimized bound assuming an ideal of norm `q`.
pub fn local_correction(n: usize, r1: usize, r2: usize, q: u64) -> u128 {
    debug_assert_eq!(r1 + 2 * r2, n);
    let (_, v) = optimize_bound(n, r1, &[q]);
    let safe = n as f64 * v - (n as f64 * v).abs() * 1e-12;
    safe.exp().floor() as u128
}

/// Largest `m` in `{2,3,4,5,7}` with `B <= C(r1,r2,m)`, or 1.
pub fn max_applicable_norm(n: usize, r1: usize, r2: usize, bound: u128) -> u64 {
    CORRECTION_NORMS
        .iter()
        .rev()
        .copied()
        .find(|&m| bound <= local_correction(n, r1, r2, m))
        .unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionEntry {
    pub r1: usize,
    pub r2: usize,
    pub q: u64,
    #[serde(rename = "C")]
    pub c: u128,
}

/// All corrections for degree `n`, optionally restricted to one signature.
pub fn correction_table(n: usize, signature: Option<(usize, usize)>) -> Vec<CorrectionEntry> {
    let sigs: Vec<(usize, usize)> = match signature {
        Some(s) => vec![s],
        None => (0..=n / 2).rev().map(|r2| (n - 2 * r2, r2)).collect(),
    };
    let mut out = Vec::new();
    for q in CORRECTION_NORMS {
        for &(r1, r2) in &sigs {
            out.push(CorrectionEntry { r1, r2, q, c: local_correction(n, r1, r2, q) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_examples() {
        assert!((poitou_f(1e-9) - 1.0).abs() < 1e-15);
        let pi = std::f64::consts::PI;
        assert!((poitou_f(pi) - 9.0 / pi.powi(4)).abs() < 1e-15);
        // branch agreement at the series cut
        let x: f64 = 0.5;
        let direct = (3.0 * (x.sin() - x * x.cos()) / (x * x * x)).powi(2);
        assert!((poitou_f(x - 1e-12) - direct).abs() < 1e-12);
    }

    #[test]
    fn l_branches_agree() {
        let c = poitou_l(SMALL_Z);
        let z = SMALL_Z * (1.0 - 1e-12);
        assert!((poitou_l(z) - c).abs() < 1e-12);
        assert!((poitou_l(1.0) - 0.438_829_279_953_765_3).abs() < 1e-13);
        assert!((poitou_l(1e-6) / 1e-6 - 0.8).abs() < 1e-5);
    }

    #[test]
    fn hurwitz_matches_riemann() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - z2).abs() < 1e-14);
        // zeta(3, 1/2) = 7 zeta(3)
        assert!((hurwitz_zeta(3.0, 0.5) - 7.0 * 1.202_056_903_159_594_2).abs() < 1e-13);
    }

    #[test]
    fn anchor_entries() {
        let c = local_correction(8, 4, 2, 5) as f64;
        assert!((c / 20_829_049.0 - 1.0).abs() < 2e-3, "{c}");
    }
}
