//! Finite commutative Moufang loops and the quasigroups affine over them.
//!
//! The crate provides:
//!
//! * Cayley-table loops and quasigroups with structural predicates
//!   (commutativity, Moufang identity, center, associator subloop, ...);
//! * explicit constructions of the nonassociative commutative Moufang
//!   loops of orders 81 and 243 that decompose as direct products;
//! * permutation-group machinery (orbits, Schreier stabilizer generators,
//!   budget-bounded enumeration);
//! * a backtracking search for automorphism groups and central
//!   automorphism groups of loops;
//! * the orbit-based classification of centrally affine, trimedial and
//!   distributive quasigroups over a loop, together with Mendelsohn /
//!   Steiner tagging and triple-system emission.
//!
//! All heavy element-wise checks are data-parallel via `rayon` when the
//! `parallel` feature (default) is enabled; every algorithm has a
//! sequential twin with bit-identical output.

pub mod classify;
pub mod constructions;
pub mod error;
pub mod loop_table;
pub mod orbit;
pub mod par;
pub mod perm;
pub mod permgroup;
pub mod quasigroup;
pub mod search;
pub mod textio;

pub use classify::{
    aggregate_by_order, classify_centrally_affine, classify_distributive, classify_trimedial,
    forms_isomorphic, tag_steiner_mendelsohn, ArithmeticForm, ClassificationReport, FormRecord,
    OrderAggregate, QuasigroupKind, ReportStatus,
};
pub use constructions::{
    abelian_group, construct_kn_243_56, construct_kn_243_57, construct_kn_81_1, construct_kn_81_2,
    resolve_loop, TupleCoordinates,
};
pub use error::Error;
pub use loop_table::{ElementMap, LoopTable, Subloop};
pub use orbit::{ConjugationAction, GroupAction, NaturalAction, OrbitData, OrbitPartition};
pub use perm::Perm;
pub use permgroup::PermGroup;
pub use quasigroup::{
    build_affine, build_distributive_from_psi, check_distributive, check_idempotent, check_medial,
    check_trimedial, emit_triple_system, TripleKind, TripleSystem, TrimedialMode,
};
pub use search::{
    automorphism_group, central_automorphism_group, hat, j_central_coset, orthoautomorphisms,
    AutSearchConfig, CentralData, GeneratorChoice,
};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
