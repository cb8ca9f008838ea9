//! Dimension obstructions to SU(2)-abelian surgeries.
//!
//! When `p = a^e` or `2 a^e` for a prime `a` and the Alexander polynomial
//! has no root at the relevant roots of unity, an SU(2)-abelian
//! `S^3_{p/q}(K)` has `dim I# = |p|`. A larger dimension rules it out.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dims::{dim_sharp, BundleClass, DimError, FieldInvariants};
use crate::poly::{cyclotomic_coeffs, divides, LaurentPoly, PolyError};
use crate::slope::{display_order, Slope};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `p = (2 if doubled else 1) * a^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AdmissibleWitness {
    pub prime_a: Option<u64>,
    pub exponent_e: u32,
    pub doubled: bool,
}

impl AdmissibleWitness {
    /// `a^e`, the part whose divisors are tested for nondegeneracy.
    pub fn base(&self) -> u64 {
        self.prime_a.map_or(1, |a| a.pow(self.exponent_e))
    }

    pub fn value(&self) -> u64 {
        self.base() * if self.doubled { 2 } else { 1 }
    }
}

impl fmt::Display for AdmissibleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.doubled {
            write!(f, "2*")?;
        }
        match self.prime_a {
            Some(a) => write!(f, "{a}^{}", self.exponent_e),
            None => write!(f, "1"),
        }
    }
}

/// Whether `e = 0` counts, i.e. `p = 1` and `p = 2` via `a^0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum ExponentRange {
    #[default]
    NonNegative,
    Positive,
}

fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut a = 2;
    while a * a <= n && n % a != 0 {
        a += 1;
    }
    if n % a != 0 {
        return Some((n, 1));
    }
    let mut m = n;
    let mut e = 0;
    while m % a == 0 {
        m /= a;
        e += 1;
    }
    (m == 1).then_some((a, e))
}

/// Prefers the undoubled form when both exist (`p = 2^k`).
pub fn admissible_numerator(p: u64) -> Option<AdmissibleWitness> {
    admissible_numerator_with(p, ExponentRange::NonNegative)
}

pub fn admissible_numerator_with(p: u64, range: ExponentRange) -> Option<AdmissibleWitness> {
    if let Some((a, e)) = prime_power(p) {
        return Some(AdmissibleWitness { prime_a: Some(a), exponent_e: e, doubled: false });
    }
    if p % 2 == 0 {
        if let Some((a, e)) = prime_power(p / 2) {
            return Some(AdmissibleWitness { prime_a: Some(a), exponent_e: e, doubled: true });
        }
    }
    match (p, range) {
        (1, ExponentRange::NonNegative) => Some(AdmissibleWitness { prime_a: None, exponent_e: 0, doubled: false }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Su2Error {
    #[error("{0} is not of the form a^e or 2a^e; see admissible_numerator")]
    NotAdmissible(u64),
    #[error("not an Alexander polynomial (needs symmetry and value +-1 at t = 1): {0}")]
    NotAlexander(LaurentPoly),
    #[error("slope {0} needs a finite positive numerator")]
    BadSlope(Slope),
    #[error("interval ({0}, {1}) must be finite, non-negative and non-empty")]
    BadInterval(Slope, Slope),
    #[error(transparent)]
    Dim(#[from] DimError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Nondegeneracy {
    pub holds: bool,
    pub violating_d: Option<u64>,
}

/// Checks that `Φ_d` does not divide `alex` for every divisor `d > 1` of
/// `a^e`, by exact division.
pub fn nondegenerate(alex: &LaurentPoly, p: u64) -> Result<Nondegeneracy, Su2Error> {
    if !alex.is_alexander() {
        return Err(Su2Error::NotAlexander(alex.clone()));
    }
    let w = admissible_numerator(p).ok_or(Su2Error::NotAdmissible(p))?;
    if let Some(a) = w.prime_a {
        for j in 1..=w.exponent_e {
            let d = a.pow(j);
            if divides(&cyclotomic_coeffs(d), alex)? {
                return Ok(Nondegeneracy { holds: false, violating_d: Some(d) });
            }
        }
    }
    Ok(Nondegeneracy { holds: true, violating_d: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    NotAbelianDim,
    Possible,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::NotAbelianDim => "not_abelian_dim",
            Status::Possible => "possible",
            Status::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `dim I#` on the trivial bundle against `p`.
    Dim { dim: u64, p: u64, witness: AdmissibleWitness },
    /// `p` admits no witness.
    Inadmissible { p: u64 },
    /// `Φ_d` divides the Alexander polynomial.
    Degenerate { p: u64, d: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: String,
    pub certificate: Certificate,
}

pub fn obstruct_slope(inv: &FieldInvariants, alex: &LaurentPoly, slope: Slope) -> Result<Verdict, Su2Error> {
    obstruct_slope_with(inv, alex, slope, ExponentRange::NonNegative)
}

pub fn obstruct_slope_with(
    inv: &FieldInvariants,
    alex: &LaurentPoly,
    slope: Slope,
    range: ExponentRange,
) -> Result<Verdict, Su2Error> {
    if slope.is_infinite() || slope.num() <= 0 {
        return Err(Su2Error::BadSlope(slope));
    }
    let p = slope.num() as u64;
    let Some(witness) = admissible_numerator_with(p, range) else {
        return Ok(Verdict {
            status: Status::NotApplicable,
            reason: format!("p = {p} is not a^e or 2a^e"),
            certificate: Certificate::Inadmissible { p },
        });
    };
    let nd = nondegenerate(alex, p)?;
    if let Some(d) = nd.violating_d {
        return Ok(Verdict {
            status: Status::NotApplicable,
            reason: format!("cyclotomic polynomial {d} divides the Alexander polynomial"),
            certificate: Certificate::Degenerate { p, d },
        });
    }
    let dim = dim_sharp(inv, slope, BundleClass::Trivial)?.value;
    let certificate = Certificate::Dim { dim, p, witness };
    Ok(if dim > p {
        Verdict { status: Status::NotAbelianDim, reason: format!("dim = {dim} > p = {p}"), certificate }
    } else {
        Verdict { status: Status::Possible, reason: format!("dim = {dim} = p, p = {witness}"), certificate }
    })
}

/// Reduced slopes `p/q` in the open interval `(lo, hi)` with `q <= max_den`,
/// sorted by value then denominator.
pub fn slopes_between(lo: Slope, hi: Slope, max_den: i64) -> Vec<Slope> {
    let mut out: Vec<Slope> = (1..=max_den.max(0))
        .into_par_iter()
        .flat_map_iter(|q| {
            let (lp, lq) = (lo.num() as i128, lo.den() as i128);
            let (hp, hq) = (hi.num() as i128, hi.den() as i128);
            // p/q > lp/lq  <=>  p*lq > lp*q
            let first = (lp * q as i128).div_euclid(lq) + 1;
            let last = (hp * q as i128 - 1).div_euclid(hq);
            (first..=last)
                .map(|p| p as i64)
                .filter(move |&p| num_integer::gcd(p, q) == 1)
                .map(move |p| Slope::new(p, q).expect("reduced"))
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(display_order);
    out
}

pub fn classify_interval(
    inv: &FieldInvariants,
    alex: &LaurentPoly,
    lo: Slope,
    hi: Slope,
    max_den: i64,
) -> Result<Vec<(Slope, Verdict)>, Su2Error> {
    if lo.is_infinite() || hi.is_infinite() || lo.num() < 0 || lo >= hi {
        return Err(Su2Error::BadInterval(lo, hi));
    }
    slopes_between(lo, hi, max_den).into_par_iter().map(|s| obstruct_slope(inv, alex, s).map(|v| (s, v))).collect()
}

pub fn survivors(classified: &[(Slope, Verdict)]) -> Vec<Slope> {
    classified.iter().filter(|(_, v)| v.status == Status::Possible).map(|(s, _)| *s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::{FieldLabel, Shape};

    fn trefoil_f2() -> FieldInvariants {
        FieldInvariants::new(FieldLabel::F2, 4, 4, Shape::W).unwrap()
    }

    fn trefoil_alex() -> LaurentPoly {
        "1 -1 1".parse().unwrap()
    }

    #[test]
    fn witnesses() {
        let w = |a, e, d| Some(AdmissibleWitness { prime_a: Some(a), exponent_e: e, doubled: d });
        assert_eq!(admissible_numerator(7), w(7, 1, false));
        assert_eq!(admissible_numerator(6), w(3, 1, true));
        assert_eq!(admissible_numerator(12), None);
        assert_eq!(admissible_numerator(8), w(2, 3, false));
        assert_eq!(admissible_numerator(2), w(2, 1, false));
        assert_eq!(admissible_numerator(1).unwrap().value(), 1);
        assert_eq!(admissible_numerator_with(1, ExponentRange::Positive), None);
        assert_eq!(admissible_numerator(0), None);
        assert_eq!(admissible_numerator(54), w(3, 3, true));
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn nondegeneracy() {
        let nd = nondegenerate(&trefoil_alex(), 6).unwrap();
        assert!(nd.holds);
        assert!(nondegenerate(&LaurentPoly::one(), 9).unwrap().holds);
        assert_eq!(nondegenerate(&trefoil_alex(), 12), Err(Su2Error::NotAdmissible(12)));
        let bad: LaurentPoly = "1 1 1".parse().unwrap();
        assert!(matches!(nondegenerate(&bad, 3), Err(Su2Error::NotAlexander(_))));
    }

    #[test]
    fn slope_verdicts() {
        let v = obstruct_slope(&trefoil_f2(), &trefoil_alex(), "3".parse().unwrap()).unwrap();
        assert_eq!(v.status, Status::NotAbelianDim);
        assert!(matches!(v.certificate, Certificate::Dim { dim: 5, p: 3, .. }));

        let v = obstruct_slope(&trefoil_f2(), &trefoil_alex(), "29/5".parse().unwrap()).unwrap();
        assert_eq!(v.status, Status::Possible);
        assert!(matches!(v.certificate, Certificate::Dim { dim: 29, p: 29, .. }));

        let genus3 = FieldInvariants::new(FieldLabel::F2, 6, 6, Shape::W).unwrap();
        let v = obstruct_slope(&genus3, &LaurentPoly::one(), "5".parse().unwrap()).unwrap();
        assert_eq!(v.status, Status::NotAbelianDim);
        assert!(matches!(v.certificate, Certificate::Dim { dim: 7, .. }));

        let v = obstruct_slope(&trefoil_f2(), &trefoil_alex(), "12/5".parse().unwrap()).unwrap();
        assert_eq!(v.status, Status::NotApplicable);

        assert!(obstruct_slope(&trefoil_f2(), &trefoil_alex(), Slope::INFINITY).is_err());
        assert!(obstruct_slope(&trefoil_f2(), &trefoil_alex(), "-3".parse().unwrap()).is_err());
    }

    #[test]
    fn exceptional_slope_is_obstructed() {
        let v = obstruct_slope(&trefoil_f2(), &trefoil_alex(), "4".parse().unwrap()).unwrap();
        assert_eq!(v.status, Status::NotAbelianDim);
        assert!(matches!(v.certificate, Certificate::Dim { dim: 6, p: 4, .. }));
    }

    #[test]
    fn enumeration() {
        let got = slopes_between("2".parse().unwrap(), "3".parse().unwrap(), 3);
        let want: Vec<Slope> = ["5/2", "7/3", "8/3"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(got.len(), 3);
        for w in want {
            assert!(got.contains(&w));
        }
        assert!(slopes_between("2".parse().unwrap(), "4".parse().unwrap(), 1) == vec![Slope::integer(3)]);
    }

    #[test]
    fn no_survivors_below_four() {
        let c = classify_interval(&trefoil_f2(), &trefoil_alex(), Slope::integer(2), Slope::integer(4), 20).unwrap();
        assert!(!c.is_empty());
        assert!(survivors(&c).is_empty());
    }

    #[test]
    fn unknot_survivors_are_admissible() {
        let inv = FieldInvariants::new(FieldLabel::CHAR0, 0, 0, Shape::W).unwrap();
        let c = classify_interval(&inv, &LaurentPoly::one(), Slope::ZERO, Slope::integer(10), 6).unwrap();
        for (s, v) in &c {
            let admissible = admissible_numerator(s.num() as u64).is_some();
            assert_eq!(v.status == Status::Possible, admissible, "{s}");
        }
    }

    #[test]
    fn bad_interval() {
        let inv = trefoil_f2();
        assert!(classify_interval(&inv, &trefoil_alex(), Slope::integer(4), Slope::integer(2), 3).is_err());
        assert!(classify_interval(&inv, &trefoil_alex(), Slope::integer(-1), Slope::integer(2), 3).is_err());
    }
}
