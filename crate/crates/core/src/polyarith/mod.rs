//! Exact integer and polynomial arithmetic used throughout the engine.
//!
//! The candidate object is [`IntPolynomial`], a monic polynomial
//! `x^n + a_1 x^(n-1) + ... + a_n` whose leading coefficient is implicit.
//! Everything else (discriminants, Sturm counts, factorization modulo
//! primes and over `Q`, squarefree kernels, certified complex roots) is
//! built on the dense [`ZPoly`] and [`FpPoly`] types.

mod factor;
mod fp;
mod integer;
mod roots;
mod zpoly;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use factor::{factor_over_z, is_irreducible};
pub use fp::{factor_mod_q, FpPoly, ModQFactorization};
pub use integer::{
    coredisc, factor_integer, is_probable_prime, squarefree_part, IntegerFactorization,
    TRIAL_DIVISION_BOUND, RHO_ITERATION_CAP,
};
pub use roots::{complex_roots, complex_roots_with_cap, RootBox};
pub use zpoly::ZPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial degree must be at least 1")]
    ZeroDegree,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("squarefree part of zero is undefined")]
    ZeroInput,
    #[error("integer factorization did not complete")]
    IncompleteFactorization,
    #[error("root certification failed at {0} bits")]
    PrecisionExhausted(u32),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Monic polynomial with integer coefficients `a_1..a_n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::ZeroDegree);
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect()).expect("degree >= 1")
    }

    /// Builds from a dense list `[1, a_1, ..., a_n]` (leading coefficient first).
    pub fn from_full_list(list: &[BigInt]) -> Result<Self, PolyError> {
        match list.split_first() {
            Some((lead, rest)) if lead.is_one() => Self::new(rest.to_vec()),
            Some(_) => Err(PolyError::Parse("leading coefficient must be 1".into())),
            None => Err(PolyError::ZeroDegree),
        }
    }

    pub fn from_zpoly(p: &ZPoly) -> Result<Self, PolyError> {
        if !p.is_monic() {
            return Err(PolyError::Parse("polynomial is not monic".into()));
        }
        let mut c: Vec<BigInt> = p.coeffs().iter().rev().skip(1).cloned().collect();
        if c.is_empty() {
            return Err(PolyError::ZeroDegree);
        }
        c.shrink_to_fit();
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_1..a_n`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `a_k` for `1 <= k <= n`.
    pub fn a(&self, k: usize) -> &BigInt {
        &self.coeffs[k - 1]
    }

    /// `[1, a_1, ..., a_n]`.
    pub fn full_list(&self) -> Vec<BigInt> {
        std::iter::once(BigInt::one()).chain(self.coeffs.iter().cloned()).collect()
    }

    pub fn to_zpoly(&self) -> ZPoly {
        let mut c: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        c.push(BigInt::one());
        ZPoly::new(c)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::one();
        for c in &self.coeffs {
            acc = acc * x + c;
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_zpoly().fmt(f)
    }
}

impl FromStr for IntPolynomial {
    type Err = PolyError;

    /// Accepts either a coefficient list `[1, a_1, ..., a_n]` / `1,a_1,...`
    /// or an expression such as `x^3 + x^2 - 2*x + 8`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.contains('x') || t.contains('X') {
            let z = parse_expression(t)?;
            Self::from_zpoly(&z)
        } else {
            let inner = t.trim_start_matches('[').trim_end_matches(']');
            let list = inner
                .split(',')
                .map(|x| x.trim().parse::<BigInt>().map_err(|e| PolyError::Parse(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            Self::from_full_list(&list)
        }
    }
}

fn parse_expression(s: &str) -> Result<ZPoly, PolyError> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let cleaned = cleaned.to_lowercase();
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1, rest.to_string()),
            None => (1, term.trim_start_matches('+').to_string()),
        };
        let bad = || PolyError::Parse(format!("bad term `{body}`"));
        let (coef, power) = if let Some(pos) = body.find('x') {
            let c = body[..pos].trim_end_matches('*');
            let c = if c.is_empty() { BigInt::one() } else { c.parse().map_err(|_| bad())? };
            let rest = &body[pos + 1..];
            let e = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
            };
            (c, e)
        } else {
            (body.parse::<BigInt>().map_err(|_| bad())?, 0)
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += coef * sign;
    }
    Ok(ZPoly::new(coeffs))
}

/// `disc(p) = (-1)^(n(n-1)/2) Res(p, p')` for monic `p`.
pub fn poly_discriminant(p: &IntPolynomial) -> BigInt {
    let z = p.to_zpoly();
    let n = p.degree();
    let r = z.resultant(&z.derivative());
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Number of real roots `r1` and complex conjugate pairs `r2`, from a Sturm chain.
pub fn sturm_signature(p: &IntPolynomial) -> Result<(usize, usize), PolyError> {
    let z = p.to_zpoly();
    let n = p.degree();
    let r1 = sturm_real_root_count(&z)?;
    Ok((r1, (n - r1) / 2))
}

pub(crate) fn sturm_real_root_count(z: &ZPoly) -> Result<usize, PolyError> {
    let mut chain = vec![z.clone(), z.derivative()];
    loop {
        let k = chain.len();
        if chain[k - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[k - 2].prem_positive(&chain[k - 1]);
        if r.is_zero() {
            break;
        }
        let c = r.content();
        chain.push(r.div_scalar(&c).neg());
    }
    if chain.last().map_or(0, |c| c.deg()) > 0 {
        return Err(PolyError::NotSquarefree);
    }
    let changes = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
    let at_pos: Vec<bool> = chain.iter().map(|c| c.lc().is_positive()).collect();
    let at_neg: Vec<bool> =
        chain.iter().map(|c| c.lc().is_positive() == (c.deg() % 2 == 0)).collect();
    Ok(changes(at_neg) - changes(at_pos))
}
