//! Dimension-level computations for framed instanton homology `I#` of Dehn
//! surgeries on knots: slope arithmetic, the dimension formula, decorated
//! surgery exact triangles, Z/4-graded bookkeeping, SU(2)-abelian
//! obstructions and a small curated knot database.

pub mod dims;
pub mod grading;
pub mod knot_db;
pub mod poly;
pub mod slope;
pub mod su2;
pub mod triangle;

pub use dims::{dim_sequence, dim_sharp, mirror, BundleClass, DimError, DimResult, FieldInvariants, FieldLabel, Shape};
pub use poly::LaurentPoly;
pub use slope::{farey_split, farey_tree, is_triad, FareySplit, FareyTree, Slope, SlopeError, Triad};
