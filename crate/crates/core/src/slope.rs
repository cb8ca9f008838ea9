//! Surgery slopes, slope triads and Farey decomposition.
//!
//! A [`Slope`] is a reduced fraction `p/q` with `q >= 0`; the slope `1/0` is
//! `∞`. Cobordism maps between surgeries need *signed* representatives, so a
//! [`Triad`] keeps explicit integer pairs next to the canonical slopes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlopeError {
    #[error("0/0 is not a slope")]
    ZeroOverZero,
    #[error("integer overflow while normalizing {0}/{1}")]
    Overflow(i64, i64),
    #[error("cannot parse slope from {0:?}")]
    Parse(String),
    #[error("farey split needs a non-integral finite slope, got {0}")]
    NotSplittable(Slope),
}

/// A reduced surgery coefficient `num/den`.
///
/// `den >= 0`, `gcd(|num|, den) = 1`, and `den == 0` only for `∞ = 1/0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    num: i64,
    den: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { num: 1, den: 0 };
    pub const ZERO: Slope = Slope { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Slope, SlopeError> {
        if num == 0 && den == 0 {
            return Err(SlopeError::ZeroOverZero);
        }
        let g = num.gcd(&den);
        let (mut p, mut q) = (num / g, den / g);
        if q < 0 || (q == 0 && p < 0) {
            p = p.checked_neg().ok_or(SlopeError::Overflow(num, den))?;
            q = q.checked_neg().ok_or(SlopeError::Overflow(num, den))?;
        }
        Ok(Slope { num: p, den: q })
    }

    pub fn integer(n: i64) -> Slope {
        Slope { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// Numerator parity; `∞` counts as odd.
    pub fn is_even(&self) -> bool {
        self.num % 2 == 0
    }

    pub fn neg(&self) -> Slope {
        if self.is_infinite() {
            *self
        } else {
            Slope { num: -self.num, den: self.den }
        }
    }

    /// Absolute value of `det((p, q), (p', q'))` on canonical representatives.
    pub fn distance(&self, other: &Slope) -> i128 {
        let d = self.num as i128 * other.den as i128 - other.num as i128 * self.den as i128;
        d.abs()
    }

    pub fn as_pair(&self) -> (i64, i64) {
        (self.num, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌊p/q⌋` for finite slopes.
    pub fn floor(&self) -> Option<i64> {
        (!self.is_infinite()).then(|| self.num.div_euclid(self.den))
    }
}

/// Finite slopes are ordered by value. `∞` is only equal to itself.
impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Some(Ordering::Equal),
            (false, false) => {
                let lhs = self.num as i128 * other.den as i128;
                let rhs = other.num as i128 * self.den as i128;
                Some(lhs.cmp(&rhs))
            }
            _ => None,
        }
    }
}

/// Total order used for deterministic output: value first, then
/// denominator, with `∞` placed last.
pub fn display_order(a: &Slope, b: &Slope) -> Ordering {
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => a.partial_cmp(b).unwrap_or(Ordering::Equal).then(a.den.cmp(&b.den)),
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den {
            0 => write!(f, "inf"),
            1 => write!(f, "{}", self.num),
            _ => write!(f, "{}/{}", self.num, self.den),
        }
    }
}

impl FromStr for Slope {
    type Err = SlopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || SlopeError::Parse(s.to_string());
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "+inf" | "-inf" => return Ok(Slope::INFINITY),
            _ => {}
        }
        match t.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                Slope::new(p, q).map_err(|e| match e {
                    SlopeError::ZeroOverZero => bad(),
                    other => other,
                })
            }
            None => t.parse::<i64>().map(Slope::integer).map_err(|_| bad()),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Signed integer pair standing for a slope inside a triad.
/// Reduced finite slopes with `den <= max_den` and value in `[lo, hi]`,
/// sorted by [`display_order`].
pub fn slopes_in_range(lo: i64, hi: i64, max_den: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    for q in 1..=max_den.max(1) {
        for p in lo * q..=hi * q {
            if p.gcd(&q) == 1 {
                out.push(Slope { num: p, den: q });
            }
        }
    }
    out.sort_by(display_order);
    out
}

pub type Rep = (i64, i64);

fn det(a: Rep, b: Rep) -> i128 {
    a.0 as i128 * b.1 as i128 - b.0 as i128 * a.1 as i128
}

/// Three slopes with representatives satisfying
/// `p_i q_{i+1} - p_{i+1} q_i = 1` for every `i` mod 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Triad {
    pub slopes: [Slope; 3],
    pub reps: [Rep; 3],
}

impl Triad {
    pub fn r0(&self) -> Slope {
        self.slopes[0]
    }
    pub fn r1(&self) -> Slope {
        self.slopes[1]
    }
    pub fn r2(&self) -> Slope {
        self.slopes[2]
    }

    /// The same triad read from `r1`: `(r1, r2, r0)`.
    pub fn rotate(&self) -> Triad {
        Triad {
            slopes: [self.slopes[1], self.slopes[2], self.slopes[0]],
            reps: [self.reps[1], self.reps[2], self.reps[0]],
        }
    }

    /// Re-checks the determinant condition on the stored representatives.
    pub fn determinants(&self) -> [i128; 3] {
        [0, 1, 2].map(|i| det(self.reps[i], self.reps[(i + 1) % 3]))
    }
}

impl fmt::Display for Triad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.slopes[0], self.slopes[1], self.slopes[2])
    }
}

/// Searches the 8 sign assignments on canonical representatives for one that
/// makes all three cyclic determinants `+1`. Signs are tried in lexicographic
/// order with `+` before `-`, so the first witness is deterministic.
pub fn is_triad(r0: Slope, r1: Slope, r2: Slope) -> Option<Triad> {
    let base = [r0.as_pair(), r1.as_pair(), r2.as_pair()];
    for mask in 0u8..8 {
        let reps: [Rep; 3] = [0, 1, 2].map(|i| {
            let (p, q) = base[i];
            if mask & (4 >> i) != 0 {
                (-p, -q)
            } else {
                (p, q)
            }
        });
        if (0..3).all(|i| det(reps[i], reps[(i + 1) % 3]) == 1) {
            return Some(Triad { slopes: [r0, r1, r2], reps });
        }
    }
    None
}

/// Output of [`farey_split`]: two Farey parents `r1`, `r2` of `r0`, the
/// companion slope `r3`, and the two triads `(r0, r1, r2)` and
/// `(r1, r3, r2)` they form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FareySplit {
    pub r0: Slope,
    pub r1: Slope,
    pub r2: Slope,
    pub r3: Slope,
    /// Representatives with the sign conventions of the split:
    /// `reps[i]` belongs to `r_i`, `reps[1] + reps[2] == reps[0]`.
    pub reps: [Rep; 4],
    pub top: Triad,
    pub bottom: Triad,
}

/// Splits a non-integral slope `p0/q0` into its Farey parents.
///
/// `r1` is the right parent, `r2` the left parent, which orients both
/// `(r0, r1, r2)` and `(r1, r3, r2)` as triads. The companion is
/// `r3 = sign(p0)|p1 - p2| / |q1 - q2|`.
pub fn farey_split(r0: Slope) -> Result<FareySplit, SlopeError> {
    if r0.is_infinite() || r0.den <= 1 || r0.num == 0 {
        return Err(SlopeError::NotSplittable(r0));
    }
    let (p, q) = (r0.num as i128, r0.den as i128);
    // Right parent c/d: c q - p d = 1 with 0 < d < q.
    let p_inv = modinv(p.rem_euclid(q), q).expect("reduced slope has invertible numerator");
    let d = (-p_inv).rem_euclid(q);
    let c = (1 + p * d) / q;
    let (p1, q1) = (c, d);
    let (p2, q2) = (p - c, q - d);
    let sign_p = p.signum();
    let p3 = sign_p * (p1 - p2).abs();
    let q3 = (q1 - q2).abs();

    let narrow = |x: i128| i64::try_from(x).map_err(|_| SlopeError::Overflow(r0.num, r0.den));
    let reps = [(r0.num, r0.den), (narrow(p1)?, narrow(q1)?), (narrow(p2)?, narrow(q2)?), (narrow(p3)?, narrow(q3)?)];
    let r1 = Slope::new(reps[1].0, reps[1].1)?;
    let r2 = Slope::new(reps[2].0, reps[2].1)?;
    let r3 = Slope::new(reps[3].0, reps[3].1)?;
    let top = is_triad(r0, r1, r2).expect("Farey parents form a triad with r0");
    let bottom = is_triad(r1, r3, r2).expect("Farey parents form a triad with r3");
    Ok(FareySplit { r0, r1, r2, r3, reps, top, bottom })
}

fn modinv(a: i128, m: i128) -> Option<i128> {
    let e = a.extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Recursive Farey decomposition of a slope down to integers and `∞`.
///
/// Subtrees repeat heavily (the `1/n` family grows like Fibonacci), so every
/// slope is split once and the tree is stored as a map from internal nodes to
/// their split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyTree {
    pub root: Slope,
    splits: BTreeMap<SlopeKey, FareySplit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct SlopeKey(i64, i64);

impl From<Slope> for SlopeKey {
    fn from(s: Slope) -> Self {
        SlopeKey(s.num, s.den)
    }
}

pub fn farey_tree(r: Slope) -> Result<FareyTree, SlopeError> {
    if r.is_infinite() || r.num == 0 {
        return Err(SlopeError::NotSplittable(r));
    }
    let mut splits = BTreeMap::new();
    let mut stack = vec![r];
    while let Some(s) = stack.pop() {
        if s.is_infinite() || s.is_integer() || splits.contains_key(&SlopeKey::from(s)) {
            continue;
        }
        let split = farey_split(s)?;
        stack.extend([split.r1, split.r2, split.r3]);
        splits.insert(SlopeKey::from(s), split);
    }
    Ok(FareyTree { root: r, splits })
}

impl FareyTree {
    pub fn split_of(&self, s: Slope) -> Option<&FareySplit> {
        self.splits.get(&SlopeKey::from(s))
    }

    /// All splits, ordered by slope.
    pub fn splits(&self) -> impl Iterator<Item = &FareySplit> {
        self.splits.values()
    }

    /// Distinct leaves (integers and `∞`) reachable from the root.
    pub fn leaves(&self) -> Vec<Slope> {
        let mut out: Vec<Slope> = Vec::new();
        let mut push = |s: Slope| {
            if self.split_of(s).is_none() && !out.contains(&s) {
                out.push(s);
            }
        };
        if self.split_of(self.root).is_none() {
            push(self.root);
        }
        for sp in self.splits.values() {
            push(sp.r1);
            push(sp.r2);
            push(sp.r3);
        }
        out.sort_by(display_order);
        out
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut memo: BTreeMap<SlopeKey, usize> = BTreeMap::new();
        // Children always have smaller denominators, so visiting internal
        // nodes by increasing denominator fills the memo bottom-up.
        let mut nodes: Vec<&FareySplit> = self.splits.values().collect();
        nodes.sort_by_key(|s| s.r0.den);
        for sp in nodes {
            let d = [sp.r1, sp.r2, sp.r3]
                .iter()
                .map(|c| memo.get(&SlopeKey::from(*c)).copied().unwrap_or(0))
                .max()
                .unwrap_or(0);
            memo.insert(SlopeKey::from(sp.r0), d + 1);
        }
        memo.get(&SlopeKey::from(self.root)).copied().unwrap_or(0)
    }

    /// Indented rendering; a slope already expanded is printed with `(see above)`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut seen = Vec::new();
        self.render_node(self.root, 0, "", &mut seen, &mut out);
        out
    }

    fn render_node(&self, s: Slope, indent: usize, label: &str, seen: &mut Vec<Slope>, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self.split_of(s) {
            None => out.push_str(&format!("{pad}{label}{s}\n")),
            Some(_) if seen.contains(&s) => out.push_str(&format!("{pad}{label}{s} (see above)\n")),
            Some(sp) => {
                seen.push(s);
                out.push_str(&format!("{pad}{label}{s} -> r1={} r2={} r3={}\n", sp.r1, sp.r2, sp.r3));
                for (name, child) in [("r1: ", sp.r1), ("r2: ", sp.r2), ("r3: ", sp.r3)] {
                    self.render_node(child, indent + 1, name, seen, out);
                }
            }
        }
    }
}
