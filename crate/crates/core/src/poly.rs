//! Integer Laurent polynomials, cyclotomic polynomials and exact division.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("symmetric coefficient list must have odd length, got {0}")]
    EvenLength(usize),
    #[error("empty coefficient list")]
    Empty,
    #[error("bad coefficient {0:?}")]
    BadCoefficient(String),
    #[error("coefficient overflow")]
    Overflow,
}

/// `sum c_k t^k` with finitely many nonzero integer coefficients.
///
/// Stored densely from the lowest nonzero exponent; the zero polynomial has
/// no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(1, 0)
    }

    pub fn monomial(c: i64, exp: i64) -> Self {
        LaurentPoly::from_coeffs(exp, vec![c])
    }

    /// Coefficients of `t^low, t^(low+1), ...`.
    pub fn from_coeffs(low: i64, coeffs: Vec<i64>) -> Self {
        let mut p = LaurentPoly { low, coeffs };
        p.normalize();
        p
    }

    /// Symmetric list `c_{-g} ... c_0 ... c_g`, lowest exponent first.
    pub fn from_symmetric(coeffs: &[i64]) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        if coeffs.len() % 2 == 0 {
            return Err(PolyError::EvenLength(coeffs.len()));
        }
        let g = (coeffs.len() / 2) as i64;
        Ok(LaurentPoly::from_coeffs(-g, coeffs.to_vec()))
    }

    /// Inverse of [`LaurentPoly::from_symmetric`], padded to exponents
    /// `-g..=g` with `g = max |exponent|`.
    pub fn to_symmetric(&self) -> Vec<i64> {
        let g = self.low.abs().max(self.high().abs());
        (-g..=g).map(|e| self.coefficient(e)).collect()
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// Highest exponent with a nonzero coefficient (`low - 1` for zero).
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn coefficient(&self, exp: i64) -> i64 {
        let i = exp - self.low;
        if i < 0 {
            return 0;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(0)
    }

    /// `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(i, &c)| (self.low + i as i64, c))
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// `p(t) == p(1/t)`.
    pub fn is_palindromic(&self) -> bool {
        self.is_zero() || (self.low == -self.high() && self.coeffs.iter().eq(self.coeffs.iter().rev()))
    }

    /// Symmetric with `p(1) = ±1`.
    pub fn is_alexander(&self) -> bool {
        self.is_palindromic() && self.eval_at_one().abs() == 1
    }

    /// `t^(-low) p(t)`: the ordinary polynomial with nonzero constant term,
    /// ascending coefficients.
    pub fn numerator(&self) -> Vec<i64> {
        self.coeffs.clone()
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly::from_coeffs(self.low + other.low, out)
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::from_coeffs(other.low, other.coeffs.iter().map(|c| -c).collect());
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        let coeffs = (low..=high).map(|e| self.coefficient(e) - other.coefficient(e)).collect();
        LaurentPoly::from_coeffs(low, coeffs)
    }
}

/// Long division of `dividend` by a monic `divisor`, both ascending
/// coefficient lists with nonnegative exponents. Returns `(quotient,
/// remainder)`; exact over the integers because the divisor is monic.
pub fn div_rem_monic(dividend: &[i64], divisor: &[i64]) -> Result<(Vec<i64>, Vec<i64>), PolyError> {
    let dn = divisor.len();
    assert!(dn > 0 && divisor[dn - 1] == 1, "divisor must be monic");
    let mut rem: Vec<i64> = dividend.to_vec();
    if rem.len() < dn {
        return Ok((Vec::new(), trim(rem)));
    }
    let mut quot = vec![0i64; rem.len() - dn + 1];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn - 1];
        quot[k] = c;
        if c == 0 {
            continue;
        }
        for (i, d) in divisor.iter().enumerate() {
            let prod = c.checked_mul(*d).ok_or(PolyError::Overflow)?;
            rem[k + i] = rem[k + i].checked_sub(prod).ok_or(PolyError::Overflow)?;
        }
    }
    rem.truncate(dn - 1);
    Ok((trim(quot), trim(rem)))
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Whether the monic integer polynomial `divisor` divides the Laurent
/// polynomial `p` (units `t^k` ignored).
pub fn divides(divisor: &[i64], p: &LaurentPoly) -> Result<bool, PolyError> {
    if p.is_zero() {
        return Ok(true);
    }
    let (_, rem) = div_rem_monic(&p.numerator(), divisor)?;
    Ok(rem.is_empty())
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Ascending coefficients of the `d`-th cyclotomic polynomial: `t^d - 1`
/// divided exactly by `Φ_e` for every proper divisor `e` of `d`.
pub fn cyclotomic_coeffs(d: u64) -> Vec<i64> {
    assert!(d >= 1, "cyclotomic index must be positive");
    let mut poly = vec![0i64; d as usize + 1];
    poly[0] = -1;
    poly[d as usize] = 1;
    for e in divisors(d) {
        if e == d {
            continue;
        }
        let (q, r) = div_rem_monic(&poly, &cyclotomic_coeffs(e)).expect("cyclotomic coefficients fit in i64");
        debug_assert!(r.is_empty());
        poly = q;
    }
    poly
}

pub fn cyclotomic(d: u64) -> LaurentPoly {
    LaurentPoly::from_coeffs(0, cyclotomic_coeffs(d))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<(i64, i64)> = self.terms().collect();
        for (k, (e, c)) in terms.into_iter().rev().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{a}t")?,
                (_, 1) => write!(f, "t^{e}")?,
                _ => write!(f, "{a}t^{e}")?,
            }
        }
        Ok(())
    }
}

/// Parses a symmetric coefficient list separated by spaces or commas,
/// optionally bracketed: `"1 -1 1"`, `"[-1, 3, -1]"`.
impl FromStr for LaurentPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let coeffs = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| PolyError::BadCoefficient(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        LaurentPoly::from_symmetric(&coeffs)
    }
}
