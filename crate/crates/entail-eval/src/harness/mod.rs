//! Dataset ingestion, run orchestration, and report assembly.

mod dataset;
mod report;
mod run;

pub use dataset::{DatasetFile, DatasetFormat, FieldMap, Ingested, LineError, ingest};
pub use report::{
    Aggregates, AurocEntry, BmTestBlock, CacheStatsBlock, DatasetSummary, FisherTestBlock,
    ItemFailure, MeanStdBlock, OrderingBlock, OrderingReport, PolicyMetricsBlock,
    ReliabilityBlock, ReliabilityReport, ReportConfig, RunReport, SchemeAggregate, fmt_sig6,
    sig6, to_rounded_json,
};
pub use run::{
    AurocPopulation, DEFAULT_RELIABILITY_SEEDS, RunOptions, evaluate_item, ordering_from_report,
    recompute_aggregates, report_config, run_evaluate, run_ordering_tests, run_reliability,
};
