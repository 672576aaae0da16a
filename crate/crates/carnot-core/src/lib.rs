//! Exact computation of weighted Lie-algebra cohomology, the invariant-level
//! Rumin splitting, regular isotropic subspaces, and the resulting two-sided
//! bounds on the Holder equivalence exponent of Carnot groups; plus a small
//! floating-point lab that verifies dilation, volume and flow-tube scaling on
//! step-2 groups.
//!
//! The pipeline:
//!
//! 1. [`algebra`] parses and validates a stratified Lie algebra given by
//!    structure constants (Jacobi, grading, generation), producing a trusted
//!    [`algebra::CarnotAlgebra`].
//! 2. [`exterior`] builds the exact exterior algebra over the dual, the
//!    weight grading, the differential `d0` and the Hodge star.
//! 3. [`cohomology`] computes the bigraded dimensions `H^{q,w}` with harmonic
//!    representatives and verifies the `(q, w) <-> (n-q, Q-w)` duality.
//! 4. [`rumin`] constructs the splitting `Lambda = E + im d0 + F`, the
//!    partial inverse of `d0`, and the stabilized projector, and checks all
//!    structural identities exactly.
//! 5. [`isotropic`] decides isotropy and regularity of horizontal subspaces
//!    and searches for regular isotropic planes.
//! 6. [`bounds`] aggregates every exponent bound with provenance.
//! 7. [`metric`] is the Monte Carlo / optimization lab for step-2 groups.
//!
//! All algebraic computation is exact (arbitrary-precision rationals); only
//! the [`metric`] lab uses floating point. Data-parallel loops run on rayon
//! under the default `parallel` feature and fall back to sequential execution
//! without it; results are identical either way.

pub mod algebra;
pub mod bounds;
pub mod cohomology;
pub mod error;
pub mod exterior;
pub mod isotropic;
pub mod linalg;
pub mod metric;
pub mod parallel;
pub mod ratio;
pub mod rumin;

pub use algebra::{
    abelian, builtin, engel, free_rank2_step3, hausdorff_dimension, heisenberg, parse_spec,
    quaternionic_heisenberg, serialize_spec, validate, AlgebraSpec, CarnotAlgebra,
};
pub use bounds::{holder_report, weight_invariant_lower, BoundRule, BoundsReport, UpperBound};
pub use cohomology::{
    closed_one_forms, compute_cohomology, compute_cohomology_seq, verify_duality, CohomologyTable,
    DualityReport,
};
pub use error::{Error, Result};
pub use exterior::{
    ce_differential, hodge_star, wedge, DifferentialMaps, Form, FormBasisIndex, FormSpace,
};
pub use isotropic::{
    cross_check_weight_vanishing, dimension_check, is_isotropic, is_regular, model_form,
    random_search, HorizontalSubspace, SearchOutcome, ThetaData,
};
pub use metric::ccdist::{cc_distance_upper, cc_distance_upper_seq, CcUpperBound, HorizontalPath};
pub use metric::tube::{tube_experiment, tube_experiment_seq, TubeExperiment};
pub use metric::volume::{volume_scaling_experiment, volume_scaling_experiment_seq, VolumeScaling};
pub use metric::{box_gauge, dilate, group_inverse, group_multiply, GroupElement};
pub use rumin::{build_rumin, verify_rumin_identities, RuminData, RuminReport};
