//! Exact p-adic arithmetic in two-step towers, explicit reciprocity formulas
//! for the Hilbert symbol, exponential maps on differential forms, and an
//! independent norm-group oracle.

pub mod analytic;
pub mod embed;
pub mod error;
pub mod field;
pub mod forms;
pub mod laurent;
pub mod oracle;
pub mod padic;
pub mod par;
pub mod poly;
pub mod reciprocity;
pub mod roots;
pub mod sample;

pub use error::{Error, Result};
pub use field::{make_field, ElementRecord, Field, FieldDesc, FieldTower, KElement};
pub use padic::PadicScalar;
pub use poly::{canonical_poly_lift, Poly};
pub use reciprocity::{hilbert_symbol, CyclotomicContext, SymbolValue};
