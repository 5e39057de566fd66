//! Exact combinatorics and transforms for conditionally bi-free pairs of faces.
//!
//! Rational arithmetic throughout unless a routine is generic over [`Scalar`].

pub mod bnc;
pub mod cumulants;
pub mod dist;
pub mod error;
pub mod independence;
pub mod limits;
pub mod lr;
pub mod oracle;
pub mod pair;
pub mod scalar;
pub mod series;

pub use bnc::{enumerate_bnc, mobius_bnc, shared_lattice, BlockClass, BncLattice, BncPartition, ChiMap, Face};
pub use cumulants::{cumulants_to_moments, CumulantEngine, CumulantTable};
pub use dist::{Generator, MomentSource, TwoStateDistribution, Word};
pub use error::{Error, Result};
pub use independence::{cbf_join, is_cbf_independent, FamilyAssignment, IndependenceReport, JointSource};
pub use limits::{AtomicMeasure2D, LevyHincinQuintuple, LimitReport};
pub use lr::{enumerate_lr, DiagramSystem, LrDiagram, OmegaMap};
pub use oracle::{MatrixModel, QMatrix};
pub use pair::{pair_cumulants, pair_moments, CumulantData, PairMomentTable};
pub use scalar::{Scalar, Q};
pub use series::{ReciprocalSeries2, Series1, Series2};
