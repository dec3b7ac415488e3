//! Finite hypergraphs, Kneser generators, exact colouring, hypergraph submeasures and the
//! block selections built on them.

mod adl;
mod blocks;
mod chromatic;
mod graph;
mod kneser;

pub use adl::{
    adl_ideal, adl_select, nonisomorphism_evidence, npp_failure_witness, AdlConfig, EvidenceVerdict, IndexReport,
    IndexVerdict, NonIsoReport, NppOutcome, NppStep, NppWitness, StarCheck,
};
pub use blocks::{GeneratedFamily, Ground, HyperBlocks, HypergraphBlock, HypergraphSubmeasure};
pub use chromatic::{chromatic_exact, chromatic_with_coloring, is_proper, MAX_CHROMATIC_VERTICES};
pub use graph::{binomial, BlockGraph, HitRatio, Hypergraph};
pub use kneser::{k_subsets, kneser_generate, kneser_lower_bound};
