//! Measuring learned models against a ground truth.

mod evalset;
mod metrics;
mod sim;

pub use evalset::{build_eval_set, EvalEntry, EvalSet, EvalSetConfig};
pub use metrics::{
    effects_mse, evaluate, semantic_metrics, syntactic_metrics, ActionMetrics, MetricsReport,
    SemanticScores, SyntacticScores,
};
pub use sim::{Simulator, DEFAULT_TOLERANCE};

use thiserror::Error;

use crate::pddl::{EvalFailure, PddlError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("action '{0}' is not in the model")]
    UnknownAction(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("{action} is not applicable")]
    Inapplicable { action: String },
    #[error("{action}: {failure}")]
    Evaluation { action: String, failure: EvalFailure },
    #[error("problem {problem}: no applicable action in the initial state")]
    DeadEnd { problem: usize },
    #[error("problem {problem}: no inapplicable grounding found in {attempts} states")]
    Infeasible { problem: usize, attempts: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Train/test split for fold `i` of `k` over `n` items: fold `i` holds the
/// items whose index is `i` modulo `k`.
pub fn kfold(n: usize, k: usize, i: usize) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if k < 2 || i >= k {
        return Err(EvalError::Config(format!("fold {i}/{k} is out of range")));
    }
    let (test, train) = (0..n).partition(|j| j % k == i);
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_the_items() {
        let mut seen = [0; 11];
        for i in 0..5 {
            let (train, test) = kfold(11, 5, i).unwrap();
            assert_eq!(train.len() + test.len(), 11);
            for t in test {
                seen[t] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        assert!(kfold(10, 5, 5).is_err());
        assert!(kfold(10, 1, 0).is_err());
    }
}
