//! Exact search for arithmetic patterns in coordinate images of rational
//! points on elliptic curves over ℚ.

pub mod algebra;
pub mod certificate;
pub mod curve;
pub mod error;
pub mod hypothesis;
pub mod lmfdb;
pub mod maps;
pub mod membership;
pub mod patterns;
pub mod subgroup;

pub use algebra::{P1Value, Rational, UniPoly};
pub use certificate::Certificate;
pub use curve::{Curve, CurvePoint};
pub use error::{Error, Result};
pub use hypothesis::{BranchSet, HypothesisReport, Verdict};
pub use maps::{
    Coordinate, CoordinateMap, MobiusMap, RationalFunction, RecurrenceMap, TorsionOrder,
};
pub use patterns::{PatternKind, PatternReport};
pub use subgroup::{GammaSpec, ValueSet};
