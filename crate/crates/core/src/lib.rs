//! Arithmetic in truncated generalized power series fields together with the
//! tropical toolkit built on top of it: initial forms, Newton polygons,
//! valuation-prescribed root lifting, and tropicalization of subvarieties
//! under monomial maps.

pub mod curve;
pub mod exp;
pub mod fiber;
pub mod field;
pub mod kpoly;
pub mod lifting;
pub mod maps;
pub mod poly;
pub mod tropical;
pub mod series;

pub use curve::{trop_curve, EdgeEnds, TropCurve, TropEdge};
pub use exp::{Exp, Precision};
pub use fiber::{
    lift_hypersurface_point, sample_fiber, FiberError, FiberPoint, FiberSample,
};
pub use field::{CoeffField, FieldError, FiniteField, FqElem, RationalField};
pub use kpoly::KPoly;
pub use lifting::{
    enumerate_roots, hasse_delta, lift_root, newton_step, Enumeration, LiftBudget, LiftError,
    LiftStatus, LiftedRoot, StepInfo, Unresolved,
};
pub use maps::{
    check_exploded_functoriality, check_functoriality, exploded_point, trop_point, MapError,
    MonomialMap,
};
pub use poly::LaurentPoly;
pub use tropical::{init_form, newton_polygon, trop_member, weight, InitialForm, NewtonSegment, TropError};
pub use series::{Series, SeriesError};
