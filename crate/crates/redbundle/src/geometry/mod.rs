//! Chart-based differential-geometry kernel.
//!
//! Charts carry coordinate names; fields, forms, and maps are lazy pointwise
//! closures over coordinate vectors. Operators (differentials, pullbacks,
//! interior products, vertical lifts, closedness residuals) evaluate on
//! demand, preferring analytic derivative data and falling back to central
//! finite differences.

pub mod chart;
pub mod fd;
pub mod field;
pub mod map;
pub mod ops;

pub use chart::{Chart, CotangentPairs};
pub use fd::FdConfig;
pub use field::{
    const_term, fn_term, two_form_from_terms, Bivector, OneForm, ScalarField, TwoForm,
    VectorField,
};
pub use map::SmoothMap;
pub use ops::{
    closedness_residual, differential, interior_product, interior_product_at,
    lie_derivative_scalar, mixed_partial_defect, one_form_closedness_residual,
    pullback_one_form, pullback_one_form_at, pullback_two_form, pullback_two_form_at,
    vertical_lift, vertical_lift_at, wedge_covectors,
};
