//! Index scoring, consistency, distributions and hypothesis tests.

pub mod consistency;
pub mod distribution;
pub mod index;
pub mod report;
pub mod stats;
pub mod terms;
pub mod testing;

pub use consistency::{consistency_report, ConsistencyReport, PairCorrelation, SessionConsistency, Verdict};
pub use distribution::{distribution, Bin, BinSpec, Distribution};
pub use index::{compute_index, score_index, IndexError, IndexScore, IndexValue};
pub use report::{build_report, AnalyticsReport, HypothesisOutcome, IndexSummary, ReportOptions};
pub use stats::{pearson, StatsError};
pub use terms::{term_frequency_export, TermCount};
pub use testing::{mean_test, proportion_test, Decision, TestError, TestKind, TestResult, DEFAULT_ALPHA};
