//! Noncommutative common causes on a discrete lattice of double cones.
//!
//! The observable algebra is generated by self-adjoint unitaries `U_i` on the
//! half-integers, neighbours anticommuting. Elements are finite linear
//! combinations of ordered monomials; a dense qubit representation serves as an
//! independent check of the symbolic algebra.

pub mod common_cause;
pub mod dynamics;
pub mod element;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod monomial;
pub mod oracle;
pub mod scenario;
pub mod verify;

pub use common_cause::{
    cc_criterion, commuting_jcc_obstruction, conditional_expectation, joint_candidate_check, joint_cc_check, residual_closed_form, rho_k,
    search_common_causes, CommonCauseCandidate, CriterionReport, JointReport, ObstructionReport, Partition, SearchHit,
};
pub use dynamics::{local_algebra_dimension, primitive_causality_check, Dynamics, DynamicsParams, PrimitiveCausalityReport};
pub use element::{commutator, relative_commutant_basis, span_dimension, AlgebraElement, SiteRange, DEFAULT_TOL, PRUNE_THRESHOLD};
pub use error::{Error, Result};
pub use geometry::{past_region, spacelike_separated, supported_in, DoubleCone, MinimalCone, PastKind, RegionGeom};
pub use monomial::{adjoint_monomial, monomial_trace, mul_monomials, Monomial, Sign, SiteIndex};
pub use oracle::QubitWindow;
pub use scenario::{Scenario, ScenarioSpec, State, UnitVector3};
