//! Certified suprema of fewnomials (sparse real-exponent polynomials) over
//! the positive orthant, with the supporting discriminant, transform and
//! root-counting machinery.

pub mod condition;
pub mod discriminant;
pub mod error;
pub mod fewnomial;
pub mod format;
pub mod harness;
pub mod linalg;
pub mod precision;
pub mod supremum;
pub mod transform;
pub mod univariate;

pub use condition::{log_condition_number, ConditionReport};
pub use discriminant::{classify_circuit, discriminant_membership, CircuitData, CircuitKind, Membership};
pub use error::{Error, Result};
pub use fewnomial::{classify, evaluate, ExponentVector, Fewnomial, Term};
pub use format::{decimal, parse_instance, parse_scalar, serialize_instance, InstanceFile};
pub use linalg::{b_vector, BVector, Matrix};
pub use precision::{CertifiedValue, Interval, PrecisionBudget};
pub use supremum::{sup, sup_decide, Case, Decision, DecisionReport, Outcome, SupremumResult, UnboundedWitness};
pub use transform::{apply_monomial_map, canonicalize_simplex, CanonicalSimplexForm, MonomialMap};
pub use univariate::{root_bound, trinomial_roots, RootReport};
