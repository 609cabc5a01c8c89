//! Construction, classification and exhaustive auditing of n-cycle
//! permutation polynomials over finite fields.
//!
//! Every structural criterion in this crate is paired with a brute-force
//! check on full value tables ([`funcspace::FuncTable`]), so that each
//! claimed characterization can be compared against direct computation.

pub mod field;
pub mod funcspace;
pub mod linearized;
pub mod monomial;
pub mod binomial;
pub mod boolean_struct;
pub mod trace_construct;
pub mod audit;
pub mod numtheory;

pub use field::{Elem, FieldCtx, FieldError, FieldId, FieldSpec, ModulusSpec};
pub use funcspace::{CycleOrder, FuncTable, PolyFn};
pub use linearized::{CriterionMode, LinPoly};
pub use boolean_struct::BoolFn;
pub use binomial::{BinomialSpec, IndexMode};
pub use trace_construct::{BoundMode, TraceConstruction};
pub use audit::{AuditConfig, AuditReport, Claim};
