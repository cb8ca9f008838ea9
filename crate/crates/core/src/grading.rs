//! Z/4-graded dimension bookkeeping for the triangles
//! `H(2k-1) -> H(2k) -> H(inf)` and `H(2k) -> H(2k+1) -> H(inf)`, and the
//! same with `H(2k, mu)` in the middle.
//!
//! `H(inf)` is one-dimensional in grading 0.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Dimensions of the grading 0, 1, 2, 3 summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct GradedDim(pub [u64; 4]);

impl GradedDim {
    pub fn new(d0: u64, d1: u64, d2: u64, d3: u64) -> Self {
        GradedDim([d0, d1, d2, d3])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Moves the summand in grading `g` to grading `g + s`.
    pub fn shifted(&self, s: u8) -> GradedDim {
        let mut out = [0; 4];
        for g in 0..4 {
            out[(g + s as usize) % 4] = self.0[g];
        }
        GradedDim(out)
    }
}

impl fmt::Display for GradedDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KClass {
    Positive,
    Zero,
    Negative,
}

impl KClass {
    pub const ALL: [KClass; 3] = [KClass::Positive, KClass::Zero, KClass::Negative];

    pub fn of(k: i64) -> KClass {
        match k.signum() {
            1 => KClass::Positive,
            0 => KClass::Zero,
            _ => KClass::Negative,
        }
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KClass::Positive => "positive",
            KClass::Zero => "zero",
            KClass::Negative => "negative",
        })
    }
}

impl FromStr for KClass {
    type Err = GradingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" | "+" | ">0" => Ok(KClass::Positive),
            "zero" | "0" => Ok(KClass::Zero),
            "negative" | "neg" | "-" | "<0" => Ok(KClass::Negative),
            other => Err(GradingError::UnknownKClass(other.to_string())),
        }
    }
}

/// Which middle vertex the two triangles pass through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Route {
    /// Through `H(2k)`.
    Trivial,
    /// Through `H(2k, mu)`.
    Meridian,
}

/// Absolute lift of the grading on `H(2k, mu)`. The tables use `S1`, the
/// spin structure extending over `W^{2k-1}_{2k}` and `W^{2k}_{2k+1}`; `S0`
/// moves that summand by 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum SpinLift {
    S0,
    #[default]
    S1,
}

/// Grading shifts `(s1, ..., s6)` mod 4 of the six maps of the two
/// triangles, in the order `A -> B`, `B -> inf`, `inf -> A` per triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ShiftTuple(pub [u8; 6]);

impl ShiftTuple {
    pub fn first(&self) -> (u8, u8, u8) {
        (self.0[0], self.0[1], self.0[2])
    }

    pub fn second(&self) -> (u8, u8, u8) {
        (self.0[3], self.0[4], self.0[5])
    }
}

impl fmt::Display for ShiftTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn shift_table(k: KClass, route: Route) -> ShiftTuple {
    ShiftTuple(match (k, route) {
        (KClass::Positive, Route::Trivial) => [0, 0, 3, 0, 2, 1],
        (KClass::Zero, Route::Trivial) => [3, 2, 2, 2, 2, 3],
        (KClass::Negative, Route::Trivial) => [0, 1, 2, 0, 3, 0],
        (KClass::Positive, Route::Meridian) => [0, 2, 1, 0, 0, 3],
        (KClass::Zero, Route::Meridian) => [3, 0, 0, 2, 0, 1],
        (KClass::Negative, Route::Meridian) => [0, 3, 0, 0, 1, 2],
    })
}

/// [`shift_table`] with the grading on `H(2k, mu)` lifted by `lift`.
pub fn shift_table_with_lift(k: KClass, route: Route, lift: SpinLift) -> ShiftTuple {
    let mut t = shift_table(k, route);
    if route == Route::Meridian && lift == SpinLift::S0 {
        for i in [0, 1, 3, 5] {
            t.0[i] = (t.0[i] + 2) % 4;
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("infeasible triangle: no dimension to lose in grading {grading} of {x}")]
    Infeasible { x: GradedDim, grading: u8 },
    #[error("delta must be +1 or -1, got {0}")]
    BadDelta(i8),
    #[error("unknown k class {0:?}")]
    UnknownKClass(String),
}

/// Graded dimensions of `B` in an exact triangle `A -> B -> H(inf) -> A`
/// with `dim B = dim A + delta`.
///
/// For `delta = -1` the map `H(inf) -> A` is injective and `B` is the
/// cokernel, shifted. For `delta = +1` the map `A -> B` is injective and `B`
/// gains the preimage of the generator of `H(inf)`.
pub fn propagate_triangle(x: GradedDim, shifts: (u8, u8, u8), delta: i8) -> Result<GradedDim, GradingError> {
    let (s_ab, s_binf, s_infa) = (shifts.0 % 4, shifts.1 % 4, shifts.2 % 4);
    match delta {
        -1 => {
            let g = s_infa as usize;
            if x.0[g] == 0 {
                return Err(GradingError::Infeasible { x, grading: s_infa });
            }
            let mut y = x;
            y.0[g] -= 1;
            Ok(y.shifted(s_ab))
        }
        1 => {
            let mut y = x.shifted(s_ab);
            y.0[((4 - s_binf) % 4) as usize] += 1;
            Ok(y)
        }
        d => Err(GradingError::BadDelta(d)),
    }
}

/// `dim H(2k) - dim H(2k±1)`: the middle vertex is one smaller (`Down`) or
/// one larger (`Up`) than both neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MiddleSign {
    Down,
    Up,
}

impl MiddleSign {
    pub const ALL: [MiddleSign; 2] = [MiddleSign::Down, MiddleSign::Up];

    fn deltas(self) -> (i8, i8) {
        match self {
            MiddleSign::Down => (-1, 1),
            MiddleSign::Up => (1, -1),
        }
    }
}

/// Graded `H(2k+1)` from graded `H(2k-1)` through the route's middle vertex.
pub fn route_propagate(
    k: KClass,
    route: Route,
    lift: SpinLift,
    x: GradedDim,
    sign: MiddleSign,
) -> Result<GradedDim, GradingError> {
    let t = shift_table_with_lift(k, route, lift);
    let (d1, d2) = sign.deltas();
    let mid = propagate_triangle(x, t.first(), d1)?;
    propagate_triangle(mid, t.second(), d2)
}

/// Whether `dim H(2k) = dim H(2k, mu) = dim H(2k±1) - 1` contradicts the
/// grading shifts: the two routes give different graded `H(2k+1)`.
pub fn vw_contradiction(k: KClass, x: GradedDim) -> Result<bool, GradingError> {
    vw_contradiction_with_lift(k, x, SpinLift::S1)
}

pub fn vw_contradiction_with_lift(k: KClass, x: GradedDim, lift: SpinLift) -> Result<bool, GradingError> {
    let a = route_propagate(k, Route::Trivial, lift, x, MiddleSign::Down)?;
    let b = route_propagate(k, Route::Meridian, lift, x, MiddleSign::Down)?;
    Ok(a != b)
}

/// Sign pairs `(trivial, meridian)` for which both routes are feasible and
/// agree on `H(2k+1)`.
pub fn consistent_sign_assignments(k: KClass, x: GradedDim) -> Vec<(MiddleSign, MiddleSign)> {
    let mut out = Vec::new();
    for st in MiddleSign::ALL {
        for sm in MiddleSign::ALL {
            let a = route_propagate(k, Route::Trivial, SpinLift::S1, x, st);
            let b = route_propagate(k, Route::Meridian, SpinLift::S1, x, sm);
            if let (Ok(a), Ok(b)) = (a, b) {
                if a == b {
                    out.push((st, sm));
                }
            }
        }
    }
    out
}

/// The relations between the two tables for one k class; every entry
/// should be true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CongruenceCheck {
    pub k: KClass,
    pub trivial_sums: bool,
    pub meridian_sums: bool,
    pub j1_eq_i1: bool,
    pub j2_eq_i2_plus_2: bool,
    pub j4_eq_i4: bool,
    pub j5_eq_i5_plus_2: bool,
}

impl CongruenceCheck {
    pub fn all_hold(&self) -> bool {
        self.trivial_sums
            && self.meridian_sums
            && self.j1_eq_i1
            && self.j2_eq_i2_plus_2
            && self.j4_eq_i4
            && self.j5_eq_i5_plus_2
    }
}

pub fn check_congruences(k: KClass) -> CongruenceCheck {
    let i = shift_table(k, Route::Trivial).0;
    let j = shift_table(k, Route::Meridian).0;
    let sums = |t: [u8; 6]| (t[0] + t[1] + t[2]) % 4 == 3 && (t[3] + t[4] + t[5]) % 4 == 3;
    CongruenceCheck {
        k,
        trivial_sums: sums(i),
        meridian_sums: sums(j),
        j1_eq_i1: j[0] == i[0],
        j2_eq_i2_plus_2: j[1] == (i[1] + 2) % 4,
        j4_eq_i4: j[3] == i[3],
        j5_eq_i5_plus_2: j[4] == (i[4] + 2) % 4,
    }
}
