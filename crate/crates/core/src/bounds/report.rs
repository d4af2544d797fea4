use serde::{Deserialize, Serialize};

use super::lower::{lower_bound, LowerBound};
use super::oracle::{brute_force_optimal, OracleLimits};
use crate::allocator::params_for;
use crate::engine::{interval_profile, simulate, AllocationPolicy, IntervalSummary, Schedule};
use crate::error::Result;
use crate::model::{ModelKind, TaskGraph};

/// Column names of the sweep CSV, in order.
pub const CSV_HEADER: [&str; 11] = [
    "instance_id",
    "model",
    "n",
    "P",
    "policy",
    "makespan",
    "lb",
    "opt",
    "ratio_lb",
    "ratio_opt",
    "model_ratio",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitiveReport {
    pub model: ModelKind,
    pub policy: String,
    pub n: usize,
    pub procs: usize,
    pub makespan: f64,
    pub lower_bound: LowerBound,
    pub oracle_opt: Option<f64>,
    /// Whether the oracle finished its search; absent without an oracle run.
    pub oracle_proved: Option<bool>,
    pub ratio_vs_lb: f64,
    pub ratio_vs_opt: Option<f64>,
    /// `1 / mu` for the graph's most general model family.
    pub model_ratio: f64,
    pub intervals: IntervalSummary,
    #[serde(skip)]
    pub schedule: Schedule,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

pub fn competitive_report(
    graph: &TaskGraph,
    procs: usize,
    policy: &AllocationPolicy,
    with_oracle: bool,
) -> Result<CompetitiveReport> {
    let model = graph.model_kind().unwrap_or(ModelKind::General);
    let params = params_for(model);
    let schedule = simulate(graph, procs, policy)?;
    let lb = lower_bound(graph, procs)?;
    let oracle = if with_oracle {
        Some(brute_force_optimal(graph, procs, &OracleLimits::default())?)
    } else {
        None
    };
    let oracle_opt = oracle.as_ref().map(|o| o.makespan());
    Ok(CompetitiveReport {
        model,
        policy: policy.name(),
        n: graph.len(),
        procs,
        makespan: schedule.makespan,
        lower_bound: lb,
        oracle_opt,
        oracle_proved: oracle.as_ref().map(|o| o.optimal),
        ratio_vs_lb: ratio(schedule.makespan, lb.value),
        ratio_vs_opt: oracle_opt.map(|o| ratio(schedule.makespan, o)),
        model_ratio: params.ratio(),
        intervals: IntervalSummary::of(&interval_profile(&schedule, procs, params.mu)),
        schedule,
    })
}

impl CompetitiveReport {
    /// Row matching [`CSV_HEADER`]; missing oracle values are empty fields.
    pub fn csv_record(&self, instance_id: &str) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            instance_id.to_string(),
            self.model.name().to_string(),
            self.n.to_string(),
            self.procs.to_string(),
            self.policy.clone(),
            self.makespan.to_string(),
            self.lower_bound.value.to_string(),
            opt(self.oracle_opt),
            self.ratio_vs_lb.to_string(),
            opt(self.ratio_vs_opt),
            self.model_ratio.to_string(),
        ]
    }
}
