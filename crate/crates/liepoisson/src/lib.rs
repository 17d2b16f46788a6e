//! Lie algebras, extended structures and Lie-Poisson dynamics with exact
//! rational structure constants.

pub mod algebra;
pub mod catalog;
pub mod dissipation;
pub mod error;
pub mod extensions;
pub mod io;
pub mod linalg;
pub mod observable;
pub mod poisson;
pub mod scalar;
pub mod simulate;
pub mod tensor;

pub use algebra::{
    bracket_eval, cartan_killing_metric, coadjoint_apply, jacobi_report, jacobi_residual,
    LieAlgebraSpec, SignConvention,
};
pub use catalog::{CatalogEntry, Kind, SystemSpec};
pub use dissipation::{
    coupled_rayleigh_field, dissipative_field, double_bracket_metric,
    generation_compatibility_check, metriplectic_field, symmetric_bracket_eval,
    DissipationVariant, MetriplecticSystem, SymmetricBracketSpec,
};
pub use error::{Error, Result};
pub use extensions::{
    assemble_total_constants, build_cocycle_extension, build_matched_pair,
    couple_cocycle_extensions, decompose_along_subalgebra, verify_extended_structure,
    ActionTensors, CocycleCouplingSpec, ConditionResult, CouplingOutcome, ExtendedStructureSpec,
    VerificationReport,
};
pub use observable::{Monomial, Observable, Polynomial};
pub use poisson::{
    casimir_residual, linear_casimir_basis, lp_vector_field, poisson_bracket_eval,
    poisson_bracket_polynomial,
    PoissonBivector,
};
pub use scalar::Scalar;
pub use simulate::{
    convergence_order_estimate, integrate, monitor_drift, IntegratorConfig, Method,
    OrderEstimate, Trajectory,
};
pub use tensor::Tensor3;
