//! Event-driven online list scheduling and schedule diagnostics.

mod intervals;
mod policy;
mod schedule;
pub(crate) mod simulate;

pub use intervals::{
    blocking_chain, high_utilization_threshold, interval_profile, IntervalClass, IntervalRecord,
    IntervalSummary,
};
pub use policy::{AllocationPolicy, CustomRule, Locality};
pub(crate) use schedule::tol;
pub use schedule::{validate_schedule, Schedule, ScheduleEntry, ScheduleViolation, TIME_TOLERANCE};
pub use simulate::simulate;
