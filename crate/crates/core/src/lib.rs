//! Exact-arithmetic sheaf cohomology on flag varieties via BGG complexes.
//!
//! The pipeline, bottom to top:
//!
//! * [`linalg`] — exact sparse rational linear algebra (ranks, solves).
//! * [`rootsystem`] — finite root systems of types A–G, Chevalley structure
//!   constants, the Weyl group with lengths and dot-action, and the Bruhat
//!   edge graph with a consistent sign assignment.
//! * [`pbw`] — arithmetic in U(𝔫) for the negative nilpotent part 𝔫: PBW
//!   normal form, singular vectors of Verma modules, and right division.
//! * [`modules`] — the weight-graded 𝔭-modules V_{j,k}, M_{j,k}, T_{j,k}
//!   attached to a standard parabolic, with exact action matrices.
//! * [`bgg`] — the BGG cochain complex of a module at a dominant weight.
//! * [`cohomology`] — cohomology multiplicities by exact rank computation,
//!   including the projection-conjugated fast path.
//! * [`hochschild`] — assembly of the bigraded tables HH^s of a block of the
//!   small quantum group from per-(j,k) sheaf cohomology.

pub mod bgg;
pub mod cohomology;
pub mod hochschild;
pub mod linalg;
pub mod modules;
pub mod pbw;
pub mod rootsystem;

// re-exports below grow as modules land


pub use bgg::{build_bgg_complex, dominant_spectrum, BGGComplex};
pub use cohomology::{bgg_cohomology, bgg_cohomology_via_varpi, rank_exact, CohomologyRecord};
pub use hochschild::{
    assemble, assemble_with_cache, check_tau_symmetry, enumerate_cells, half_table_complete,
    tau_mirror, AssembleMode, BigradedTable, BlockSpec, CellContents, NoCache, RecordSource,
    ENGINE_VERSION,
};
pub use linalg::{Rat, SparseMat};
pub use modules::{build_parabolic, build_vjk, ParabolicData, VjkFamily, WeightedModule};
pub use pbw::{PBWElement, PbwCtx};
pub use rootsystem::{BruhatGraph, RootSystem, Series, Weight, WeylElement, WeylGroup};
