//! Makespan lower bounds, an exact oracle for tiny instances and
//! competitive reports.

mod lower;
mod oracle;
mod report;

pub use lower::{lower_bound, LowerBound};
pub use oracle::{
    brute_force_optimal, brute_force_optimal_with, OracleLimits, OracleResult, SearchOrder,
};
pub use report::{competitive_report, CompetitiveReport, CSV_HEADER};
