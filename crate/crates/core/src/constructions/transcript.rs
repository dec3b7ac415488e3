use serde::{Deserialize, Serialize};

use crate::omega::FinSet;
use crate::scalar::{serde_scalar, Scalar};

/// One justified choice of a selection procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SelectionStep<S: Scalar> {
    pub level: usize,
    /// selected block, cell or boundary index
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    /// `+1` or `-1` for sign selections
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    pub set: FinSet,
    /// the exact value that justified the choice
    #[serde(with = "serde_scalar")]
    pub value: S,
    #[serde(with = "serde_scalar")]
    pub threshold: S,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionFailure {
    pub level: usize,
    pub searched_up_to: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SelectionTranscript<S: Scalar> {
    pub steps: Vec<SelectionStep<S>>,
    pub failure: Option<SelectionFailure>,
}

impl<S: Scalar> Default for SelectionTranscript<S> {
    fn default() -> Self {
        SelectionTranscript { steps: Vec::new(), failure: None }
    }
}

impl<S: Scalar> SelectionTranscript<S> {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Recomputes every recorded value with `eval` and compares exactly.
    pub fn replay(&self, eval: impl Fn(&SelectionStep<S>) -> S) -> bool {
        self.steps.iter().all(|s| eval(s) == s.value)
    }

    pub(crate) fn fail(mut self, level: usize, searched_up_to: u64, reason: impl Into<String>) -> Self {
        self.failure = Some(SelectionFailure { level, searched_up_to, reason: reason.into() });
        self
    }
}
