//! Selection procedures that build summable weights, rescaled densities, chains and
//! decompositions, each with a replayable transcript.

mod fin_exh;
mod selection;
mod snpp;
mod summable;
mod transcript;

pub use fin_exh::{block_traces, fin_to_exh, fin_to_exh_certificate, FinToExh};
pub use selection::{partition_unbounded_selection, sign_scheme_selection, PartitionSelection, SignSelection};
pub use snpp::{snpp_decomposition, SnppDecomposition};
pub use summable::{summable_extension, SummableExtension};
pub use transcript::{SelectionFailure, SelectionStep, SelectionTranscript};
