//! Subsets of ω, finite partitions and refining partition schemes.

mod partition;
mod set;

pub use partition::{Chain, CustomLevel, FinitePartition, Labeling, PartitionScheme, RefinementVerdict};
pub use set::{BlockGen, BlockStream, FinSet, Formula, MapFormula, OmegaSet};
