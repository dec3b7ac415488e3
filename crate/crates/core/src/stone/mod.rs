//! Finitely supported signed measures on `ω ∪ {p}` and the clopen algebra coded by an ideal.

mod contracts;
mod disjointify;
mod extension;
mod measure;

pub use contracts::{
    anti_nikodym_contract, delta_pair_witness, nf_strong_witness, GrowthHit, GrowthVerdict, MeasureStream, NullRow,
    NullVerdict, PFreeVerdict, SequenceContractReport,
};
pub use disjointify::{
    anti_grothendieck_normalize, disjointify_pipeline, disjointify_stage1, disjointify_stage2, CaseRule,
    NormalizedStep, PipelineTranscript, Schedule, Stage1Step, Stage1Transcript, Stage2Case, Stage2Step,
    Stage2Transcript, StageFailure,
};
pub use extension::{
    extend_t, extension_bounds_check, horizon_norms, weight_sum, ExtensionReport, ExtensionValue, HorizonNorms,
};
pub use measure::{measure_eval, norm, restrict_measure, ClopenCode, FinMeasure, Point, Polarity};
