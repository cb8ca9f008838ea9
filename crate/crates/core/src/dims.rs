//! Dimension formula for framed instanton homology of surgeries on a knot.
//!
//! For a field `K` a knot carries an integer `nu` and a non-negative `r`;
//! away from one exceptional slope,
//!
//! ```text
//! dim I#(S^3_{p/q}(K); K) = q * r + |p - q * nu|
//! ```
//!
//! for both bundle classes. When `nu` is even the two classes at the integer
//! slope `nu` have dimensions `{r, r + 2}`; which one is smaller is the
//! V/W shape of the knot.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::slope::Slope;

/// A coefficient field, identified by its characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldLabel {
    characteristic: u64,
}

impl FieldLabel {
    pub const CHAR0: FieldLabel = FieldLabel { characteristic: 0 };
    pub const F2: FieldLabel = FieldLabel { characteristic: 2 };

    pub fn new(characteristic: u64) -> Result<FieldLabel, DimError> {
        if characteristic == 0 || crate::su2::is_prime(characteristic) {
            Ok(FieldLabel { characteristic })
        } else {
            Err(DimError::BadCharacteristic(characteristic))
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }
}

impl TryFrom<u64> for FieldLabel {
    type Error = DimError;
    fn try_from(c: u64) -> Result<Self, Self::Error> {
        FieldLabel::new(c)
    }
}

impl From<FieldLabel> for u64 {
    fn from(f: FieldLabel) -> u64 {
        f.characteristic
    }
}

impl fmt::Display for FieldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "C"),
            p => write!(f, "F{p}"),
        }
    }
}

/// Accepts `C`, `char0`, `Q`, `F2`, `F<p>` and `Fp:<p>`.
impl FromStr for FieldLabel {
    type Err = DimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        let c = match lower.as_str() {
            "c" | "char0" | "q" | "0" => 0,
            _ => {
                let digits = lower
                    .strip_prefix("fp:")
                    .or_else(|| lower.strip_prefix('f'))
                    .or_else(|| lower.strip_prefix("char"))
                    .unwrap_or(&lower);
                digits.parse::<u64>().map_err(|_| DimError::UnknownField(t.to_string()))?
            }
        };
        FieldLabel::new(c)
    }
}

/// Mod 2 bundle class on `S^3_{p/q}(K)`. The two classes only differ when
/// `p` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BundleClass {
    Trivial,
    Meridian,
}

impl BundleClass {
    pub const ALL: [BundleClass; 2] = [BundleClass::Trivial, BundleClass::Meridian];
}

impl fmt::Display for BundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BundleClass::Trivial => "triv",
            BundleClass::Meridian => "mu",
        })
    }
}

impl FromStr for BundleClass {
    type Err = DimError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "triv" | "trivial" | "0" => Ok(BundleClass::Trivial),
            "mu" | "meridian" | "μ" => Ok(BundleClass::Meridian),
            other => Err(DimError::UnknownBundle(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    V,
    W,
    #[serde(rename = "?")]
    Unknown,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::V => "V",
            Shape::W => "W",
            Shape::Unknown => "?",
        })
    }
}

/// A broken structural constraint on `(nu, r, shape)`.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum InvariantViolation {
    #[error("r >= |nu| fails: r = {r}, nu = {nu}")]
    RBelowAbsNu { nu: i64, r: u64 },
    #[error("r - |nu| must be even (Euler characteristic): r = {r}, nu = {nu}")]
    ParityMismatch { nu: i64, r: u64 },
    #[error("W shape needs even nu, got nu = {nu}")]
    WithOddNu { nu: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimError {
    #[error(transparent)]
    Invalid(#[from] InvariantViolation),
    #[error("shape required at the exceptional slope {0}")]
    ShapeRequired(i64),
    #[error("empty range [{0}, {1}]")]
    EmptyRange(i64, i64),
    #[error("dimension overflows at slope {0}")]
    Overflow(Slope),
    #[error("{0} is neither 0 nor a prime")]
    BadCharacteristic(u64),
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("unknown bundle class {0:?}")]
    UnknownBundle(String),
}

/// `(nu, r, shape)` of a knot over one field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldInvariants {
    pub field: FieldLabel,
    nu: i64,
    r: u64,
    shape: Shape,
}

impl FieldInvariants {
    /// Every constraint `(nu, r, shape)` breaks, in a fixed order.
    pub fn violations(nu: i64, r: u64, shape: Shape) -> Vec<InvariantViolation> {
        let mut out = Vec::new();
        let abs = nu.unsigned_abs();
        if r < abs {
            out.push(InvariantViolation::RBelowAbsNu { nu, r });
        }
        if (r % 2) != (abs % 2) {
            out.push(InvariantViolation::ParityMismatch { nu, r });
        }
        if shape == Shape::W && nu % 2 != 0 {
            out.push(InvariantViolation::WithOddNu { nu });
        }
        out
    }

    /// Validates and normalizes; odd `nu` always reads as V-shaped.
    pub fn new(field: FieldLabel, nu: i64, r: u64, shape: Shape) -> Result<Self, InvariantViolation> {
        if let Some(v) = Self::violations(nu, r, shape).into_iter().next() {
            return Err(v);
        }
        let shape = if nu % 2 != 0 { Shape::V } else { shape };
        Ok(FieldInvariants { field, nu, r, shape })
    }

    pub fn nu(&self) -> i64 {
        self.nu
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Stabilization threshold on the right: `nu + 1` for W, else `nu`.
    pub fn nu_plus(&self) -> i64 {
        self.nu + i64::from(self.shape == Shape::W)
    }

    pub fn nu_minus(&self) -> i64 {
        self.nu - i64::from(self.shape == Shape::W)
    }

    /// `h` in `r = |nu| + 2h`.
    pub fn h(&self) -> u64 {
        (self.r - self.nu.unsigned_abs()) / 2
    }

    /// Whether `slope` is the integer slope `nu` with `nu` even.
    pub fn is_exceptional(&self, slope: Slope) -> bool {
        self.nu % 2 == 0 && slope == Slope::integer(self.nu)
    }

    pub fn with_shape(&self, shape: Shape) -> Result<Self, InvariantViolation> {
        FieldInvariants::new(self.field, self.nu, self.r, shape)
    }

    /// The fully specified invariants compatible with `self`: itself, or
    /// both V and W when the shape is unknown at even `nu`.
    pub fn completions(&self) -> Vec<FieldInvariants> {
        if self.shape == Shape::Unknown {
            [Shape::V, Shape::W].into_iter().map(|s| FieldInvariants { shape: s, ..*self }).collect()
        } else {
            vec![*self]
        }
    }
}

impl fmt::Display for FieldInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: nu={} r={} shape={}", self.field, self.nu, self.r, self.shape)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimResult {
    pub value: u64,
    pub exceptional: bool,
}

pub fn dim_sharp(inv: &FieldInvariants, slope: Slope, bundle: BundleClass) -> Result<DimResult, DimError> {
    if slope.is_infinite() {
        return Ok(DimResult { value: 1, exceptional: false });
    }
    if inv.is_exceptional(slope) {
        let small = inv.r;
        let big = inv.r + 2;
        let value = match (inv.shape, bundle) {
            (Shape::Unknown, _) => return Err(DimError::ShapeRequired(inv.nu)),
            (Shape::V, BundleClass::Trivial) | (Shape::W, BundleClass::Meridian) => small,
            (Shape::V, BundleClass::Meridian) | (Shape::W, BundleClass::Trivial) => big,
        };
        return Ok(DimResult { value, exceptional: true });
    }
    let (p, q) = (slope.num() as i128, slope.den() as i128);
    let value = q * inv.r as i128 + (p - q * inv.nu as i128).abs();
    let value = u64::try_from(value).map_err(|_| DimError::Overflow(slope))?;
    Ok(DimResult { value, exceptional: false })
}

/// Dimensions at the integer slopes `n_lo..=n_hi`.
pub fn dim_sequence(inv: &FieldInvariants, n_lo: i64, n_hi: i64, bundle: BundleClass) -> Result<Vec<u64>, DimError> {
    if n_lo > n_hi {
        return Err(DimError::EmptyRange(n_lo, n_hi));
    }
    (n_lo..=n_hi).map(|n| dim_sharp(inv, Slope::integer(n), bundle).map(|d| d.value)).collect()
}

/// Same invariants for the mirror knot: `nu -> -nu`.
pub fn mirror(inv: &FieldInvariants) -> FieldInvariants {
    FieldInvariants { nu: -inv.nu, ..*inv }
}

/// Slopes `p/q >= threshold` on which the knot is an instanton L-space knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LSpaceSlopes {
    pub exists: bool,
    pub threshold: i64,
    /// The integer slope `threshold` fails for the trivial bundle (W shape,
    /// or shape not known).
    pub exceptional_excluded: bool,
}

pub fn lspace_slopes(inv: &FieldInvariants) -> LSpaceSlopes {
    let exists = inv.nu > 0 && inv.r == inv.nu as u64;
    LSpaceSlopes { exists, threshold: inv.nu, exceptional_excluded: exists && inv.nu % 2 == 0 && inv.shape != Shape::V }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error("trivial and meridian sequences have different domains")]
    DomainMismatch,
    #[error("domain is not a contiguous range of integers")]
    NotContiguous,
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
    #[error("not realizable: {0}")]
    NotRealizable(String),
}

/// Recovers `(nu, r, shape)` from integer-surgery dimension sequences for
/// the two bundle classes.
///
/// The stabilization thresholds `nu_plus`/`nu_minus` are read off the
/// trivial-bundle sequence and each must be certified by two increasing
/// steps inside the domain. Sequences with `nu_plus - nu_minus > 2`
/// (generalized W shape) are rejected.
pub fn infer_invariants(
    trivial: &BTreeMap<i64, u64>,
    meridian: &BTreeMap<i64, u64>,
    field: FieldLabel,
) -> Result<FieldInvariants, InferError> {
    if !trivial.keys().eq(meridian.keys()) {
        return Err(InferError::DomainMismatch);
    }
    let (lo, hi) = match (trivial.keys().next(), trivial.keys().next_back()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(InferError::InsufficientRange("empty sequence".into())),
    };
    if (hi - lo + 1) as usize != trivial.len() {
        return Err(InferError::NotContiguous);
    }
    let t = |n: i64| trivial[&n];
    let m = |n: i64| meridian[&n];

    for n in lo..hi {
        for (name, a, b) in [("trivial", t(n), t(n + 1)), ("meridian", m(n), m(n + 1))] {
            if a.abs_diff(b) != 1 {
                return Err(InferError::NotRealizable(format!(
                    "adjacent integer slopes differ by one: {name} dims at {n} and {} are {a} and {b}",
                    n + 1
                )));
            }
        }
    }
    for n in lo..=hi {
        if n % 2 != 0 && t(n) != m(n) {
            return Err(InferError::NotRealizable(format!(
                "bundle classes agree at odd slopes: slope {n} has {} vs {}",
                t(n),
                m(n)
            )));
        }
    }

    // nu_plus: smallest n with t(k+1) = t(k) + 1 for all k >= n in the domain.
    let mut nu_plus = hi;
    while nu_plus > lo && t(nu_plus) == t(nu_plus - 1) + 1 {
        nu_plus -= 1;
    }
    let mut nu_minus = lo;
    while nu_minus < hi && t(nu_minus) == t(nu_minus + 1) + 1 {
        nu_minus += 1;
    }
    if nu_plus + 2 > hi {
        return Err(InferError::InsufficientRange(format!(
            "need two increasing steps after nu_plus = {nu_plus}, domain ends at {hi}"
        )));
    }
    if nu_minus - 2 < lo {
        return Err(InferError::InsufficientRange(format!(
            "need two decreasing steps before nu_minus = {nu_minus}, domain starts at {lo}"
        )));
    }
    let spread = nu_plus - nu_minus;
    if spread > 2 {
        return Err(InferError::NotRealizable(format!(
            "nu_plus - nu_minus <= 2 fails: generalized W shape with nu_plus = {nu_plus}, nu_minus = {nu_minus}"
        )));
    }
    if spread < 0 || spread % 2 != 0 {
        return Err(InferError::NotRealizable(format!(
            "nu_plus and nu_minus must have equal parity: {nu_plus}, {nu_minus}"
        )));
    }
    if spread == 2 && nu_plus % 2 == 0 {
        return Err(InferError::NotRealizable(format!(
            "nu_plus - nu_minus = 2 forces both odd, got {nu_plus} and {nu_minus}"
        )));
    }

    let nu = (nu_plus + nu_minus) / 2;
    let (tn, mn) = (t(nu), m(nu));
    let r = tn.min(mn);
    let shape = if nu % 2 != 0 || tn + 2 == mn {
        Shape::V
    } else if mn + 2 == tn {
        Shape::W
    } else {
        return Err(InferError::NotRealizable(format!(
            "dimensions at even nu = {nu} must differ by exactly two, got {tn} and {mn}"
        )));
    };
    let inv = FieldInvariants::new(field, nu, r, shape).map_err(|v| InferError::NotRealizable(v.to_string()))?;

    for n in lo..=hi {
        for (bundle, seen) in [(BundleClass::Trivial, t(n)), (BundleClass::Meridian, m(n))] {
            let want = dim_sharp(&inv, Slope::integer(n), bundle).expect("shape is resolved").value;
            if want != seen {
                return Err(InferError::NotRealizable(format!(
                    "dimension formula with nu = {nu}, r = {r}: slope {n} ({bundle}) should be {want}, got {seen}"
                )));
            }
        }
    }
    Ok(inv)
}
