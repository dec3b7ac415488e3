//! Katětov reductions, direct sums, splitting families, eventual dominance and the summable-weight
//! map on density witnesses.

mod dominance;
mod handle;
mod katetov;

pub use dominance::{dominance, tukey_demo, DominanceReport, InclusionRow, TukeyReport};
pub use handle::{builtin, builtin_catalog, IdealHandle};
pub use katetov::{
    direct_sum, katetov_verify, splitting_check, DirectSum, DirectSumVerdict, Evidence, KatetovReport, KatetovRow,
    SplitRow, SplitVerdict, SplittingReport,
};
