use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::allocator::{self, AllocationParams};
use crate::error::{Error, Result};
use crate::model::{SpeedupSpec, TaskId};

type RuleFn = dyn Fn(&SpeedupSpec, usize) -> usize + Send + Sync;

/// User-supplied local rule `(spec, P) -> processors`.
#[derive(Clone)]
pub struct CustomRule {
    pub name: String,
    rule: Arc<RuleFn>,
}

impl CustomRule {
    pub fn new(
        name: impl Into<String>,
        rule: impl Fn(&SpeedupSpec, usize) -> usize + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// What an allocation decision may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locality {
    /// Only the task's speedup law and `P`.
    Local,
    /// Also the number of tasks revealed together and the free processors;
    /// identical tasks in a batch differ by at most one processor, assigned
    /// by reveal order.
    BatchSymmetric,
    /// Keyed on task ids; can tell otherwise identical tasks apart.
    TaskSpecific,
}

/// How a newly revealed task gets its processor count.
#[derive(Debug, Clone)]
pub enum AllocationPolicy {
    /// Two-step allocation with each task's own model-family parameters.
    Paper,
    /// Two-step allocation with one fixed parameter row for every task.
    PaperWith(AllocationParams),
    /// `p_max`: the time-minimizing allocation.
    MinTime,
    Sequential,
    /// The same fixed count for every task.
    Fixed(usize),
    /// Split the free processors evenly across the batch revealed together,
    /// handing the remainder to the lowest ids.
    EqualShare,
    Custom(CustomRule),
    /// Explicit per-task allocation.
    PerTask(BTreeMap<TaskId, usize>),
}

impl AllocationPolicy {
    pub fn locality(&self) -> Locality {
        match self {
            AllocationPolicy::EqualShare => Locality::BatchSymmetric,
            AllocationPolicy::PerTask(_) => Locality::TaskSpecific,
            _ => Locality::Local,
        }
    }

    pub fn name(&self) -> String {
        match self {
            AllocationPolicy::Paper => "paper".into(),
            AllocationPolicy::PaperWith(p) => {
                format!("paper({:.6},{:.6},{:.6})", p.alpha, p.beta, p.mu)
            }
            AllocationPolicy::MinTime => "mintime".into(),
            AllocationPolicy::Sequential => "seq".into(),
            AllocationPolicy::Fixed(k) => format!("fixed:{k}"),
            AllocationPolicy::EqualShare => "fixed-fig6b".into(),
            AllocationPolicy::Custom(rule) => format!("custom:{}", rule.name),
            AllocationPolicy::PerTask(_) => "per-task".into(),
        }
    }

    /// Parses `paper`, `mintime`, `seq`, `fixed:K` and `fixed-fig6b`
    /// (alias `equal-share`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "paper" => Ok(AllocationPolicy::Paper),
            "mintime" | "min-time" => Ok(AllocationPolicy::MinTime),
            "seq" | "sequential" => Ok(AllocationPolicy::Sequential),
            "fixed-fig6b" | "equal-share" | "equalshare" => Ok(AllocationPolicy::EqualShare),
            other => {
                let k = other
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::Parse(format!("unknown policy `{other}`")))?;
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad processor count in `{other}`")))?;
                if k == 0 {
                    return Err(Error::Parse("fixed allocation must be at least 1".into()));
                }
                Ok(AllocationPolicy::Fixed(k))
            }
        }
    }

    /// Allocation for a single task under a local policy. Batch-symmetric
    /// policies answer as if the task were revealed alone on an idle platform.
    pub fn allocate_one(&self, id: TaskId, spec: &SpeedupSpec, procs: usize) -> Result<usize> {
        let p = match self {
            AllocationPolicy::Paper => {
                allocator::allocate(spec, procs, &allocator::params_for(spec.kind()))?.procs
            }
            AllocationPolicy::PaperWith(params) => allocator::allocate(spec, procs, params)?.procs,
            AllocationPolicy::MinTime => spec.extremal_stats(procs)?.p_max,
            AllocationPolicy::Sequential => 1,
            AllocationPolicy::Fixed(k) => *k,
            AllocationPolicy::EqualShare => procs,
            AllocationPolicy::Custom(rule) => (rule.rule)(spec, procs),
            AllocationPolicy::PerTask(map) => *map.get(&id).ok_or_else(|| {
                Error::Config(format!("per-task policy has no entry for task {id}"))
            })?,
        };
        if p == 0 || p > procs {
            return Err(Error::PolicyOutOfRange {
                task: id,
                procs: p,
                platform: procs,
            });
        }
        Ok(p)
    }

    /// Allocations for a batch revealed at the same instant, in the given
    /// (ascending id) order.
    pub(crate) fn allocate_batch(
        &self,
        batch: &[(TaskId, &SpeedupSpec)],
        free: usize,
        procs: usize,
    ) -> Result<Vec<usize>> {
        match self {
            AllocationPolicy::EqualShare => {
                let n = batch.len();
                if n == 0 {
                    return Ok(Vec::new());
                }
                if free < n {
                    return Ok(vec![1; n]);
                }
                let (base, extra) = (free / n, free % n);
                Ok((0..n).map(|i| base + usize::from(i < extra)).collect())
            }
            _ => batch
                .iter()
                .map(|&(id, spec)| self.allocate_one(id, spec, procs))
                .collect(),
        }
    }
}

impl fmt::Display for AllocationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
