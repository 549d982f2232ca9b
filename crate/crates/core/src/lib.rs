//! Geographic plans: Edmonds' criterion, degree-sequence realizability via
//! Eulerian partitions of double graphs, exhaustive bivector search, and
//! explicit map construction from polygon words.

mod dsu;
mod perm;

pub mod enumerate;
pub mod error;
pub mod families;
pub mod mapbuild;
pub mod multigraph;
pub mod partition;
pub mod plan;

pub use error::{Error, Result};
pub use multigraph::{DegreeSequence, DoubleGraph, Multigraph, Subgraph};
pub use plan::{candidate_surfaces, Bimatrix, Plan, PlanReport, SequencePair, SurfaceClass};
