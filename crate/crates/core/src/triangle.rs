//! The four decorated surgery exact triangles of a slope triad, the
//! relations between cobordism maps coming from embedded spheres, and
//! dimension-level feasibility sweeps.
//!
//! All map relations hold only up to sign; signs are not tracked.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dims::{dim_sharp, BundleClass, DimError, FieldInvariants};
use crate::slope::{display_order, is_triad, slopes_in_range, Slope, Triad};

/// Bundle-set decoration of a surgery cobordism: whether the core disk and
/// the cocore disk are included. Written `core cocore`, so `10` is core only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Epsilon {
    pub core: bool,
    pub cocore: bool,
}

impl Epsilon {
    pub const E00: Epsilon = Epsilon { core: false, cocore: false };
    pub const E01: Epsilon = Epsilon { core: false, cocore: true };
    pub const E10: Epsilon = Epsilon { core: true, cocore: false };
    pub const E11: Epsilon = Epsilon { core: true, cocore: true };
    pub const ALL: [Epsilon; 4] = [Self::E00, Self::E01, Self::E10, Self::E11];
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", u8::from(self.core), u8::from(self.cocore))
    }
}

/// One exact triangle `H(r0) -> H(r1) -> H(r2) -> H(r0)` with bundle classes
/// at the vertices and decorations on the edges `r0->r1`, `r1->r2`, `r2->r0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriangleSpec {
    pub triad: Triad,
    /// 1 to 4, in the order the triangles are usually listed.
    pub index: u8,
    pub vertex_bundles: [BundleClass; 3],
    pub edge_epsilons: [Epsilon; 3],
    /// Set when the middle slope is even and meridian decorations on the
    /// odd outer vertices were dropped.
    pub reduced: bool,
}

impl TriangleSpec {
    /// The decoration that gives the same map on the closing edge `r2->r0`
    /// in a reduced triangle (`10 ~ 01`, `00 ~ 11`).
    pub fn closing_edge_equivalent(&self) -> Option<Epsilon> {
        if !self.reduced {
            return None;
        }
        let e = self.edge_epsilons[2];
        Some(Epsilon { core: !e.core, cocore: !e.cocore })
    }
}

const ROWS: [([BundleClass; 3], [Epsilon; 3]); 4] = {
    use BundleClass::{Meridian as M, Trivial as T};
    [
        ([T, M, T], [Epsilon::E01, Epsilon::E10, Epsilon::E00]),
        ([T, T, M], [Epsilon::E00, Epsilon::E01, Epsilon::E10]),
        ([M, T, T], [Epsilon::E10, Epsilon::E00, Epsilon::E01]),
        ([M, M, M], [Epsilon::E11, Epsilon::E11, Epsilon::E11]),
    ]
};

pub fn triangles_for_triad(t: &Triad) -> [TriangleSpec; 4] {
    let reduced = t.r1().is_even();
    let mut k = 0u8;
    ROWS.map(|(mut bundles, edges)| {
        k += 1;
        if reduced {
            bundles[0] = BundleClass::Trivial;
            bundles[2] = BundleClass::Trivial;
        }
        TriangleSpec { triad: *t, index: k, vertex_bundles: bundles, edge_epsilons: edges, reduced }
    })
}

/// Whether some exact sequence `A -> B -> C -> A` of vector spaces has these
/// dimensions: ranks `u, v, w >= 0` with `a = w + u`, `b = u + v`,
/// `c = v + w` exist iff the sum is even and the triangle inequalities hold.
pub fn check_exactness_dims(a: u64, b: u64, c: u64) -> bool {
    let (a, b, c) = (a as u128, b as u128, c as u128);
    (a + b + c) % 2 == 0 && a <= b + c && b <= a + c && c <= a + b
}

/// The distance-two triangle only at the level of dimensions: the middle
/// vertex is a direct sum of two spaces.
pub fn distance_two_feasible(a: u64, c: u64, summands: (u64, u64)) -> bool {
    check_exactness_dims(a, summands.0 + summands.1, c)
}

/// Slopes with `den <= max_den` and value in `[lo, hi]`, plus `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriadWindow {
    pub max_den: i64,
    pub lo: i64,
    pub hi: i64,
}

impl TriadWindow {
    pub const DEFAULT_HALF_WIDTH: i64 = 8;

    /// Window of half-width [`TriadWindow::DEFAULT_HALF_WIDTH`] around `nu`.
    pub fn around(nu: i64, max_den: i64) -> TriadWindow {
        TriadWindow { max_den, lo: nu - Self::DEFAULT_HALF_WIDTH, hi: nu + Self::DEFAULT_HALF_WIDTH }
    }

    pub fn slopes(&self) -> Vec<Slope> {
        let mut out = slopes_in_range(self.lo, self.hi, self.max_den);
        out.push(Slope::INFINITY);
        out
    }
}

/// Every triad whose slopes lie in the window, once per rotation.
pub fn enumerate_triads(window: &TriadWindow) -> Vec<Triad> {
    let slopes = window.slopes();
    let n = slopes.len();
    let adjacent = |a: &Slope, b: &Slope| a.distance(b) == 1;
    let adj: Vec<Vec<usize>> =
        (0..n).into_par_iter().map(|i| (i + 1..n).filter(|&j| adjacent(&slopes[i], &slopes[j])).collect()).collect();
    let edges: HashSet<(usize, usize)> =
        adj.iter().enumerate().flat_map(|(i, js)| js.iter().map(move |&j| (i, j))).collect();
    let mut out = Vec::new();
    for (i, js) in adj.iter().enumerate() {
        for (x, &j) in js.iter().enumerate() {
            for &k in &js[x + 1..] {
                if !edges.contains(&(j, k)) {
                    continue;
                }
                let (a, b, c) = (slopes[i], slopes[j], slopes[k]);
                let t =
                    is_triad(a, b, c).or_else(|| is_triad(a, c, b)).expect("Farey triangle has a triad orientation");
                out.push(t);
                out.push(t.rotate());
                out.push(t.rotate().rotate());
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriangleCheck {
    pub triad: Triad,
    pub index: u8,
    pub bundles: [BundleClass; 3],
    pub dims: [u64; 3],
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub invariants: FieldInvariants,
    pub window: TriadWindow,
    pub triads: usize,
    pub triangles: usize,
    pub failures: Vec<TriangleCheck>,
}

impl TriangleReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "{}\nwindow: den <= {}, slopes in [{}, {}] and inf\ntriads: {}  triangles: {}\n",
            self.invariants, self.window.max_den, self.window.lo, self.window.hi, self.triads, self.triangles
        );
        if !self.failures.is_empty() {
            s.push_str(&format!("{:<28} {:>3} {:<14} {}\n", "triad", "idx", "bundles", "dims"));
            for f in &self.failures {
                let b = f.bundles.map(|b| b.to_string()).join(",");
                s.push_str(&format!("{:<28} {:>3} {:<14} {:?}  infeasible\n", f.triad.to_string(), f.index, b, f.dims));
            }
        }
        s.push_str(&format!("{} failures\n", self.failures.len()));
        s
    }
}

pub fn check_triangle(inv: &FieldInvariants, spec: &TriangleSpec) -> Result<TriangleCheck, DimError> {
    let mut dims = [0u64; 3];
    for i in 0..3 {
        dims[i] = dim_sharp(inv, spec.triad.slopes[i], spec.vertex_bundles[i])?.value;
    }
    Ok(TriangleCheck {
        triad: spec.triad,
        index: spec.index,
        bundles: spec.vertex_bundles,
        dims,
        feasible: check_exactness_dims(dims[0], dims[1], dims[2]),
    })
}

/// Checks all four triangles of every triad in `window` against the
/// dimension formula.
pub fn verify_triangles_in(inv: &FieldInvariants, window: TriadWindow) -> Result<TriangleReport, DimError> {
    let triads = enumerate_triads(&window);
    let checks: Vec<Vec<TriangleCheck>> = triads
        .par_iter()
        .map(|t| triangles_for_triad(t).iter().map(|spec| check_triangle(inv, spec)).collect())
        .collect::<Result<_, _>>()?;
    let mut failures: Vec<TriangleCheck> = checks.iter().flatten().filter(|c| !c.feasible).copied().collect();
    failures.sort_by(|a, b| {
        (0..3)
            .map(|i| display_order(&a.triad.slopes[i], &b.triad.slopes[i]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });
    Ok(TriangleReport { invariants: *inv, window, triads: triads.len(), triangles: 4 * triads.len(), failures })
}

pub fn verify_knot_triangles(inv: &FieldInvariants, max_den: i64) -> Result<TriangleReport, DimError> {
    verify_triangles_in(inv, TriadWindow::around(inv.nu(), max_den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no rule for this configuration")]
pub struct NoRule;

/// `F^{r3}_{r2}(second) ∘ F^{r1}_{r3}(first) = ± F^{r1}_{r2}(result)` for a
/// triad `(r1, r3, r2)`: the blow-down of the composite along `S(r1,r3,r2)`.
pub fn compose_epsilon(first: Epsilon, second: Epsilon) -> Result<Epsilon, NoRule> {
    use Epsilon as E;
    match (first, second) {
        (E::E00, E::E00) => Ok(E::E00),
        (E::E11, E::E10) => Ok(E::E10),
        (E::E01, E::E11) => Ok(E::E01),
        (E::E10, E::E01) => Ok(E::E11),
        _ => Err(NoRule),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u64) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SphereConsequence {
    MapVanishes,
    /// `I(W, ν) = ± I(W', ν')` after blowing down a split-off `CP^2`-bar.
    BlowDownIdentity,
    /// `I(W, ν) = ± I(W, ν ∪ S)`.
    SphereToggleIdentity,
}

/// An embedded sphere `S` with `S·S = k` meeting the bundle set `l` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SphereRule {
    pub self_intersection: i64,
    pub bundle_parity: Parity,
    /// Only the blow-down row needs it: `l = 0` and the cobordism splits off
    /// a `CP^2`-bar summand with trivial bundle.
    pub split_off: bool,
    pub consequence: SphereConsequence,
}

pub const SPHERE_RULES: [SphereRule; 4] = [
    SphereRule {
        self_intersection: 0,
        bundle_parity: Parity::Odd,
        split_off: false,
        consequence: SphereConsequence::MapVanishes,
    },
    SphereRule {
        self_intersection: -1,
        bundle_parity: Parity::Odd,
        split_off: false,
        consequence: SphereConsequence::MapVanishes,
    },
    SphereRule {
        self_intersection: -1,
        bundle_parity: Parity::Even,
        split_off: true,
        consequence: SphereConsequence::BlowDownIdentity,
    },
    SphereRule {
        self_intersection: -2,
        bundle_parity: Parity::Odd,
        split_off: false,
        consequence: SphereConsequence::SphereToggleIdentity,
    },
];

/// With `split_off` and even parity the intersection count is `0`: a sphere
/// in a split-off `CP^2`-bar summand with trivial bundle misses the bundle
/// set. Odd-parity rows do not need the splitting and accept either flag.
pub fn sphere_rule(k: i64, l_parity: Parity, split_off: bool) -> Result<SphereConsequence, NoRule> {
    SPHERE_RULES
        .iter()
        .find(|r| {
            r.self_intersection == k
                && r.bundle_parity == l_parity
                && (r.bundle_parity == Parity::Odd || r.split_off == split_off)
        })
        .map(|r| r.consequence)
        .ok_or(NoRule)
}

/// Positions in the extended triad: `(r0, r1, r2)` and `(r1, r3, r2)` are
/// both triads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Slot {
    R0,
    R1,
    R2,
    R3,
}

/// `S(a,b,c)^2` for the sphere formed by the cocore of `W^a_b` and the core
/// of `W^b_c`, for the compositions where it is known.
pub fn sphere_square(a: Slot, b: Slot, c: Slot) -> Option<i64> {
    use Slot::*;
    match (a, b, c) {
        (R1, R2, R1) | (R2, R1, R2) => Some(0),
        (R0, R1, R2) | (R1, R2, R0) | (R2, R0, R1) => Some(-1),
        (R2, R1, R3) | (R1, R3, R2) | (R3, R2, R1) => Some(-1),
        (R0, R1, R3) | (R3, R2, R0) => Some(-2),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompositeRelation {
    Vanishes,
    /// Equals `± F^a_c(ε)` for the direct cobordism.
    Direct(Epsilon),
}

/// What the sphere relations say about `F^b_c(second) ∘ F^a_b(first)`.
///
/// Two configurations are covered. Along `r1 -> r3 -> r2` the composite is
/// a blow-up of `W^{r1}_{r2}` and [`compose_epsilon`] gives the decoration.
/// Back and forth `a -> b -> a` the sphere has square 0 and meets the bundle
/// set once for the core of the first map and once for the cocore of the
/// second.
pub fn composite_relation(path: [Slot; 3], first: Epsilon, second: Epsilon) -> Result<CompositeRelation, NoRule> {
    let k = sphere_square(path[0], path[1], path[2]).ok_or(NoRule)?;
    if path == [Slot::R1, Slot::R3, Slot::R2] {
        let eps = compose_epsilon(first, second)?;
        return match sphere_rule(k, Parity::Even, true)? {
            SphereConsequence::BlowDownIdentity => Ok(CompositeRelation::Direct(eps)),
            _ => Err(NoRule),
        };
    }
    if path[0] == path[2] {
        let l = u64::from(first.core) + u64::from(second.cocore);
        return match sphere_rule(k, Parity::of(l), false)? {
            SphereConsequence::MapVanishes => Ok(CompositeRelation::Vanishes),
            _ => Err(NoRule),
        };
    }
    Err(NoRule)
}

/// Distinct slopes appearing in a list of triads, sorted.
pub fn triad_slopes(triads: &[Triad]) -> Vec<Slope> {
    let set: BTreeSet<(i64, i64)> = triads.iter().flat_map(|t| t.slopes.map(|s| s.as_pair())).collect();
    let mut v: Vec<Slope> = set.into_iter().map(|(p, q)| Slope::new(p, q).expect("reduced")).collect();
    v.sort_by(display_order);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::{FieldLabel, Shape};

    fn s(x: &str) -> Slope {
        x.parse().unwrap()
    }

    fn triad(a: &str, b: &str, c: &str) -> Triad {
        is_triad(s(a), s(b), s(c)).unwrap()
    }

    #[test]
    fn first_triangle_shape() {
        let t = triad("0", "1", "inf");
        let tri = triangles_for_triad(&t);
        assert_eq!(tri[0].edge_epsilons, [Epsilon::E01, Epsilon::E10, Epsilon::E00]);
        assert_eq!(tri[0].vertex_bundles[1], BundleClass::Meridian);
        assert!(!tri[0].reduced);
        assert_eq!(tri[3].edge_epsilons, [Epsilon::E11; 3]);
        assert_eq!(tri[3].vertex_bundles, [BundleClass::Meridian; 3]);
    }

    #[test]
    fn even_middle_reduction() {
        let t = triad("-1", "0", "inf");
        let tri = triangles_for_triad(&t);
        for spec in &tri {
            assert!(spec.reduced);
            assert_eq!(spec.vertex_bundles[0], BundleClass::Trivial);
            assert_eq!(spec.vertex_bundles[2], BundleClass::Trivial);
        }
        assert_eq!(tri[3].vertex_bundles[1], BundleClass::Meridian);
        assert_eq!(tri[0].closing_edge_equivalent(), Some(Epsilon::E11));
        assert_eq!(tri[1].closing_edge_equivalent(), Some(Epsilon::E01));
    }

    #[test]
    fn exactness() {
        assert!(check_exactness_dims(1, 1, 0));
        assert!(!check_exactness_dims(1, 1, 1));
        assert!(check_exactness_dims(2, 5, 3));
        assert!(!check_exactness_dims(1, 5, 2));
        assert!(check_exactness_dims(0, 0, 0));
        assert!(distance_two_feasible(3, 1, (1, 1)));
    }

    #[test]
    fn composition_table() {
        assert_eq!(compose_epsilon(Epsilon::E11, Epsilon::E10), Ok(Epsilon::E10));
        assert_eq!(compose_epsilon(Epsilon::E00, Epsilon::E00), Ok(Epsilon::E00));
        assert_eq!(compose_epsilon(Epsilon::E10, Epsilon::E01), Ok(Epsilon::E11));
        assert_eq!(compose_epsilon(Epsilon::E01, Epsilon::E11), Ok(Epsilon::E01));
        let covered = Epsilon::ALL
            .iter()
            .flat_map(|a| Epsilon::ALL.iter().map(move |b| (*a, *b)))
            .filter(|(a, b)| compose_epsilon(*a, *b).is_ok())
            .count();
        assert_eq!(covered, 4);
    }

    #[test]
    fn sphere_rules() {
        assert_eq!(sphere_rule(0, Parity::Odd, false), Ok(SphereConsequence::MapVanishes));
        assert_eq!(sphere_rule(-2, Parity::Odd, false), Ok(SphereConsequence::SphereToggleIdentity));
        assert_eq!(sphere_rule(-2, Parity::Even, false), Err(NoRule));
        assert_eq!(sphere_rule(-1, Parity::Odd, false), Ok(SphereConsequence::MapVanishes));
        assert_eq!(sphere_rule(-1, Parity::Even, true), Ok(SphereConsequence::BlowDownIdentity));
        assert_eq!(sphere_rule(-1, Parity::Even, false), Err(NoRule));
        assert_eq!(sphere_rule(0, Parity::Even, true), Err(NoRule));
    }

    #[test]
    fn vanishing_composite() {
        // F^{r1}_{r2}(10) ∘ F^{r2}_{r1}(11) = 0
        let rel = composite_relation([Slot::R2, Slot::R1, Slot::R2], Epsilon::E11, Epsilon::E10);
        assert_eq!(rel, Ok(CompositeRelation::Vanishes));
        let rel = composite_relation([Slot::R1, Slot::R3, Slot::R2], Epsilon::E11, Epsilon::E10);
        assert_eq!(rel, Ok(CompositeRelation::Direct(Epsilon::E10)));
        assert_eq!(composite_relation([Slot::R0, Slot::R1, Slot::R3], Epsilon::E00, Epsilon::E00), Err(NoRule));
    }

    #[test]
    fn triad_enumeration_small() {
        let w = TriadWindow { max_den: 1, lo: 0, hi: 2 };
        let triads = enumerate_triads(&w);
        // (0,1,inf) and (1,2,inf), three rotations each
        assert_eq!(triads.len(), 6);
        assert!(triads.iter().all(|t| t.determinants() == [1, 1, 1]));
    }

    #[test]
    fn figure_eight_sweep() {
        let inv = FieldInvariants::new(FieldLabel::CHAR0, 0, 2, Shape::W).unwrap();
        let report = verify_knot_triangles(&inv, 10).unwrap();
        assert!(report.triads > 0);
        assert!(report.is_clean(), "{}", report.render());
    }

    #[test]
    fn trefoil_f2_near_exceptional() {
        let inv = FieldInvariants::new(FieldLabel::F2, 4, 4, Shape::W).unwrap();
        let t = triad("4", "5", "inf");
        let tri = triangles_for_triad(&t);
        let first = check_triangle(&inv, &tri[0]).unwrap();
        assert_eq!(first.dims, [6, 5, 1]);
        assert!(first.feasible);
        let third = check_triangle(&inv, &tri[2]).unwrap();
        assert_eq!(third.dims, [4, 5, 1]);
        assert!(third.feasible);
    }

    #[test]
    fn unknown_shape_needs_completion() {
        let inv = FieldInvariants::new(FieldLabel::CHAR0, 0, 4, Shape::Unknown).unwrap();
        assert!(matches!(verify_knot_triangles(&inv, 3), Err(DimError::ShapeRequired(0))));
        for c in inv.completions() {
            assert!(verify_knot_triangles(&c, 5).unwrap().is_clean());
        }
    }
}
