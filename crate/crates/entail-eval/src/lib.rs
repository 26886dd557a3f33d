//! Entailment-based evaluation of open-domain QA systems.
//!
//! The pipeline converts question/answer pairs into declarative statements,
//! runs bidirectional textual entailment tests between system and gold
//! statements, and places each system answer into a four-level hierarchy:
//!
//! | rank | in sup | in inf | meaning                          |
//! |------|--------|--------|----------------------------------|
//! | 1    | yes    | no     | more informative than the gold   |
//! | 2    | yes    | yes    | equivalent to the gold           |
//! | 3    | no     | yes    | less specific than the gold      |
//! | 4    | no     | no     | unrelated / incorrect            |
//!
//! Binary judgments follow from a policy (union accepts ranks 1-3, strict
//! accepts 1-2). Answers in rank 3 can additionally receive graded partial
//! marks derived from an LLM-generated inference explanation.
//!
//! All model inference goes through [`gateway::Gateway`], which fronts a
//! content-addressed transcript cache so that every run can be replayed
//! deterministically offline.
//!
//! The [`stats`] module provides the statistical apparatus used for
//! meta-evaluation: binary F1/accuracy, Cohen's kappa, one-tailed Fisher's
//! exact test, the Brunner-Munzel test, rank-based AUROC, corpus BLEU and
//! ROUGE.

pub mod entailment;
pub mod error;
pub mod gateway;
pub mod harness;
pub mod model;
pub mod parallel;
pub mod partial;
pub mod statement;
pub mod stats;
pub mod text;

pub use error::{Error, Result};
pub use model::{
    BackendConfig, DirectionalEntailment, EntailmentLabel, EvalItem, EvalRecord, HierarchyRank,
    InferenceExplanation, JudgePolicy, Judgment, PartialScore, ScoreScheme, Statement,
    StatementSource,
};
