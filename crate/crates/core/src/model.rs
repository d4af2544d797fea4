//! Tasks, speedup laws and task graphs.
//!
//! Every closed-form law is a specialization of
//! `t(p) = w / min(p, pbar) + d + c (p - 1)`; the tabulated law stores one
//! time per processor count and makes no monotonicity promise.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TaskId = u64;

/// Processor-time units.
pub type Area = f64;

/// The family a speedup law belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Roofline,
    Communication,
    Amdahl,
    General,
    Tabulated,
}

impl ModelKind {
    pub const CLOSED_FORM: [ModelKind; 4] = [
        ModelKind::Roofline,
        ModelKind::Communication,
        ModelKind::Amdahl,
        ModelKind::General,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Roofline => "roofline",
            ModelKind::Communication => "communication",
            ModelKind::Amdahl => "amdahl",
            ModelKind::General => "general",
            ModelKind::Tabulated => "tabulated",
        }
    }

    /// Smallest family containing both `self` and `other`.
    pub fn join(self, other: ModelKind) -> ModelKind {
        use ModelKind::*;
        match (self, other) {
            (a, b) if a == b => a,
            (Tabulated, _) | (_, Tabulated) => Tabulated,
            _ => General,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "roofline" | "roo" => Ok(ModelKind::Roofline),
            "communication" | "comm" | "com" => Ok(ModelKind::Communication),
            "amdahl" | "amd" => Ok(ModelKind::Amdahl),
            "general" | "gen" => Ok(ModelKind::General),
            "tabulated" | "arbitrary" => Ok(ModelKind::Tabulated),
            other => Err(Error::Parse(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Execution-time law of a single task.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedupSpec {
    /// `w / min(p, pbar)`.
    Roofline {
        w: f64,
        pbar: usize,
    },
    /// `w / p + c (p - 1)`.
    Communication {
        w: f64,
        c: f64,
    },
    /// `w / p + d`.
    Amdahl {
        w: f64,
        d: f64,
    },
    General {
        w: f64,
        d: f64,
        c: f64,
        pbar: usize,
    },
    /// `table[p - 1]` is the time on `p` processors.
    Tabulated(Arc<[f64]>),
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be finite and >= 0, got {v}"
        )))
    }
}

impl SpeedupSpec {
    pub fn roofline(w: f64, pbar: usize) -> Result<Self> {
        Self::Roofline { w, pbar }.validated()
    }

    pub fn communication(w: f64, c: f64) -> Result<Self> {
        Self::Communication { w, c }.validated()
    }

    pub fn amdahl(w: f64, d: f64) -> Result<Self> {
        Self::Amdahl { w, d }.validated()
    }

    pub fn general(w: f64, d: f64, c: f64, pbar: usize) -> Result<Self> {
        Self::General { w, d, c, pbar }.validated()
    }

    /// Tables are shared, so cloning a tabulated spec is cheap.
    pub fn tabulated(table: impl Into<Arc<[f64]>>) -> Result<Self> {
        Self::Tabulated(table.into()).validated()
    }

    /// Checks the per-kind invariants and returns `self` unchanged.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpeedupSpec::Roofline { w, pbar } => {
                nonneg("w", w)?;
                if w <= 0.0 {
                    return Err(Error::InvalidSpec("roofline requires w > 0".into()));
                }
                if pbar == 0 {
                    return Err(Error::InvalidSpec("pbar must be >= 1".into()));
                }
            }
            SpeedupSpec::Communication { w, c } => {
                nonneg("w", w)?;
                nonneg("c", c)?;
            }
            SpeedupSpec::Amdahl { w, d } => {
                nonneg("w", w)?;
                nonneg("d", d)?;
            }
            SpeedupSpec::General { w, d, c, pbar } => {
                nonneg("w", w)?;
                nonneg("d", d)?;
                nonneg("c", c)?;
                if pbar == 0 {
                    return Err(Error::InvalidSpec("pbar must be >= 1".into()));
                }
            }
            SpeedupSpec::Tabulated(ref table) => {
                if table.is_empty() {
                    return Err(Error::InvalidSpec(
                        "tabulated law needs at least one entry".into(),
                    ));
                }
                if let Some((i, v)) = table
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v > 0.0))
                {
                    return Err(Error::InvalidSpec(format!(
                        "tabulated time for p={} must be finite and > 0, got {v}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            SpeedupSpec::Roofline { .. } => ModelKind::Roofline,
            SpeedupSpec::Communication { .. } => ModelKind::Communication,
            SpeedupSpec::Amdahl { .. } => ModelKind::Amdahl,
            SpeedupSpec::General { .. } => ModelKind::General,
            SpeedupSpec::Tabulated(_) => ModelKind::Tabulated,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, SpeedupSpec::Tabulated(_))
    }

    /// `(w, d, c, pbar)` with `pbar = None` meaning unbounded.
    pub fn params(&self) -> Option<(f64, f64, f64, Option<usize>)> {
        match *self {
            SpeedupSpec::Roofline { w, pbar } => Some((w, 0.0, 0.0, Some(pbar))),
            SpeedupSpec::Communication { w, c } => Some((w, 0.0, c, None)),
            SpeedupSpec::Amdahl { w, d } => Some((w, d, 0.0, None)),
            SpeedupSpec::General { w, d, c, pbar } => Some((w, d, c, Some(pbar))),
            SpeedupSpec::Tabulated(_) => None,
        }
    }

    /// Closed-form time at any `p >= 1`, ignoring the platform size.
    fn formula(w: f64, d: f64, c: f64, pbar: Option<usize>, p: usize) -> f64 {
        let eff = pbar.map_or(p, |b| p.min(b)) as f64;
        w / eff + d + c * (p as f64 - 1.0)
    }

    fn check_range(&self, p: usize, procs: usize) -> Result<()> {
        if procs == 0 {
            return Err(Error::Domain(
                "platform must have at least one processor".into(),
            ));
        }
        if p == 0 || p > procs {
            return Err(Error::Domain(format!(
                "processor count {p} outside [1, {procs}]"
            )));
        }
        if let SpeedupSpec::Tabulated(table) = self {
            if table.len() != procs {
                return Err(Error::Domain(format!(
                    "tabulated law has {} entries but the platform has {procs} processors",
                    table.len()
                )));
            }
        }
        Ok(())
    }

    pub fn exec_time(&self, p: usize, procs: usize) -> Result<f64> {
        self.check_range(p, procs)?;
        Ok(self.time_unchecked(p))
    }

    pub fn area(&self, p: usize, procs: usize) -> Result<Area> {
        Ok(p as f64 * self.exec_time(p, procs)?)
    }

    /// Time without range checks; callers guarantee `1 <= p <= P`.
    pub(crate) fn time_unchecked(&self, p: usize) -> f64 {
        match self {
            SpeedupSpec::Tabulated(table) => table[p - 1],
            _ => {
                let (w, d, c, pbar) = self.params().expect("closed form");
                Self::formula(w, d, c, pbar, p)
            }
        }
    }

    pub(crate) fn area_unchecked(&self, p: usize) -> Area {
        p as f64 * self.time_unchecked(p)
    }

    pub fn extremal_stats(&self, procs: usize) -> Result<ExtremalStats> {
        self.check_range(1, procs)?;
        let p_max = match self {
            SpeedupSpec::Tabulated(table) => {
                // Smallest minimizer.
                let mut best = 0;
                for (i, &t) in table.iter().enumerate() {
                    if t < table[best] {
                        best = i;
                    }
                }
                best + 1
            }
            _ => {
                let (w, d, c, pbar) = self.params().expect("closed form");
                if w == 0.0 {
                    1
                } else {
                    let tilde = tilde_p(w, d, c, pbar);
                    let mut cap = procs;
                    if let Some(b) = pbar {
                        cap = cap.min(b);
                    }
                    if let Some(t) = tilde {
                        cap = cap.min(t);
                    }
                    cap.max(1)
                }
            }
        };
        let t_min = self.time_unchecked(p_max);
        let a_min = match self {
            SpeedupSpec::Tabulated(_) => (1..=procs)
                .map(|p| self.area_unchecked(p))
                .fold(f64::INFINITY, f64::min),
            _ => self.area_unchecked(1),
        };
        Ok(ExtremalStats {
            p_max,
            t_min,
            a_min,
        })
    }
}

/// Allocation minimizing the unbounded convex time, with the floor winning
/// ties. `None` when there is no communication overhead.
fn tilde_p(w: f64, d: f64, c: f64, pbar: Option<usize>) -> Option<usize> {
    if c == 0.0 {
        return None;
    }
    let s = (w / c).sqrt();
    let lo = s.floor() as usize;
    let hi = s.ceil() as usize;
    if lo == 0 {
        return Some(1);
    }
    let t = |p| SpeedupSpec::formula(w, d, c, pbar, p);
    Some(if t(lo) <= t(hi) { lo } else { hi })
}

/// Time-minimizing allocation and the extreme time and area values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalStats {
    pub p_max: usize,
    pub t_min: f64,
    pub a_min: Area,
}

pub fn exec_time(spec: &SpeedupSpec, p: usize, procs: usize) -> Result<f64> {
    spec.exec_time(p, procs)
}

pub fn area(spec: &SpeedupSpec, p: usize, procs: usize) -> Result<Area> {
    spec.area(p, procs)
}

pub fn extremal_stats(spec: &SpeedupSpec, procs: usize) -> Result<ExtremalStats> {
    spec.extremal_stats(procs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: TaskId,
    pub spec: SpeedupSpec,
}

impl Task {
    pub fn new(id: TaskId, spec: SpeedupSpec) -> Self {
        Self { id, spec }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    DuplicateId(TaskId),
    DanglingEdge {
        pred: TaskId,
        succ: TaskId,
        missing: TaskId,
    },
    /// Tasks that cannot be ordered because they lie on or behind a cycle.
    Cycle(Vec<TaskId>),
    InvalidSpec {
        task: TaskId,
        reason: String,
    },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::DuplicateId(id) => write!(f, "duplicate task id {id}"),
            GraphViolation::DanglingEdge {
                pred,
                succ,
                missing,
            } => {
                write!(f, "edge ({pred}, {succ}) references missing task {missing}")
            }
            GraphViolation::Cycle(ids) => write!(f, "cycle through tasks {ids:?}"),
            GraphViolation::InvalidSpec { task, reason } => write!(f, "task {task}: {reason}"),
        }
    }
}

/// Outcome of [`validate_graph`]: either a deterministic topological order or
/// the list of everything that is wrong.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphValidation {
    Ok(Vec<TaskId>),
    Invalid(Vec<GraphViolation>),
}

impl GraphValidation {
    pub fn is_ok(&self) -> bool {
        matches!(self, GraphValidation::Ok(_))
    }

    pub fn violations(&self) -> &[GraphViolation] {
        match self {
            GraphValidation::Ok(_) => &[],
            GraphValidation::Invalid(v) => v,
        }
    }
}

/// Reports duplicate ids, dangling endpoints, invalid specs and cycles. The
/// order on success breaks ties by ascending id.
pub fn validate_graph(tasks: &[Task], edges: &[(TaskId, TaskId)]) -> GraphValidation {
    let mut violations = Vec::new();
    let mut index = HashMap::with_capacity(tasks.len());
    for (i, t) in tasks.iter().enumerate() {
        if index.insert(t.id, i).is_some() {
            violations.push(GraphViolation::DuplicateId(t.id));
        }
        if let Err(e) = t.spec.validate() {
            violations.push(GraphViolation::InvalidSpec {
                task: t.id,
                reason: e.to_string(),
            });
        }
    }
    let mut indeg = vec![0usize; tasks.len()];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); tasks.len()];
    let unique: BTreeSet<_> = edges.iter().copied().collect();
    for &(pred, succ) in &unique {
        let (a, b) = match (index.get(&pred), index.get(&succ)) {
            (Some(&a), Some(&b)) => (a, b),
            (None, _) => {
                violations.push(GraphViolation::DanglingEdge {
                    pred,
                    succ,
                    missing: pred,
                });
                continue;
            }
            (_, None) => {
                violations.push(GraphViolation::DanglingEdge {
                    pred,
                    succ,
                    missing: succ,
                });
                continue;
            }
        };
        succs[a].push(b);
        indeg[b] += 1;
    }
    let mut heap: BinaryHeap<Reverse<(TaskId, usize)>> = indeg
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| Reverse((tasks[i].id, i)))
        .collect();
    let mut order = Vec::with_capacity(tasks.len());
    while let Some(Reverse((id, i))) = heap.pop() {
        order.push(id);
        for &s in &succs[i] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(Reverse((tasks[s].id, s)));
            }
        }
    }
    if order.len() < tasks.len() {
        let mut stuck: Vec<TaskId> = indeg
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(i, _)| tasks[i].id)
            .collect();
        stuck.sort_unstable();
        violations.push(GraphViolation::Cycle(stuck));
    }
    if violations.is_empty() {
        GraphValidation::Ok(order)
    } else {
        GraphValidation::Invalid(violations)
    }
}

/// Immutable, validated DAG of moldable tasks.
#[derive(Debug, Clone)]
pub struct TaskGraph {
    tasks: Vec<Task>,
    edges: Vec<(TaskId, TaskId)>,
    index: HashMap<TaskId, usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    /// Topological order as task indices.
    topo: Vec<usize>,
}

impl PartialEq for TaskGraph {
    fn eq(&self, other: &Self) -> bool {
        self.tasks == other.tasks && self.edges == other.edges
    }
}

impl TaskGraph {
    pub fn new(tasks: Vec<Task>, edges: Vec<(TaskId, TaskId)>) -> Result<Self> {
        let order = match validate_graph(&tasks, &edges) {
            GraphValidation::Ok(order) => order,
            GraphValidation::Invalid(v) => {
                let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
                return Err(Error::InvalidGraph(msg.join("; ")));
            }
        };
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        let index: HashMap<TaskId, usize> =
            tasks.iter().enumerate().map(|(i, t)| (t.id, i)).collect();
        let mut preds = vec![Vec::new(); tasks.len()];
        let mut succs = vec![Vec::new(); tasks.len()];
        for &(a, b) in &edges {
            let (ia, ib) = (index[&a], index[&b]);
            succs[ia].push(ib);
            preds[ib].push(ia);
        }
        let topo = order.iter().map(|id| index[id]).collect();
        Ok(Self {
            tasks,
            edges,
            index,
            preds,
            succs,
            topo,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    /// Sorted, de-duplicated precedence pairs.
    pub fn edges(&self) -> &[(TaskId, TaskId)] {
        &self.edges
    }

    pub fn index_of(&self, id: TaskId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.index_of(id).map(|i| &self.tasks[i])
    }

    /// Predecessor indices of the task at index `i`.
    pub fn preds_of(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn succs_of(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    /// Task indices in topological order (ascending-id tie-break).
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn validate(&self) -> GraphValidation {
        validate_graph(&self.tasks, &self.edges)
    }

    /// Most general model family among the tasks; `None` for an empty graph.
    pub fn model_kind(&self) -> Option<ModelKind> {
        self.tasks
            .iter()
            .map(|t| t.spec.kind())
            .reduce(ModelKind::join)
    }

    /// Number of tasks on the longest path.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.len()];
        for &i in &self.topo {
            level[i] = 1 + self.preds[i].iter().map(|&p| level[p]).max().unwrap_or(0);
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Same structure with ids remapped through `f` (which must be injective).
    pub fn relabel(&self, f: impl Fn(TaskId) -> TaskId) -> Result<Self> {
        let tasks = self
            .tasks
            .iter()
            .map(|t| Task::new(f(t.id), t.spec.clone()))
            .collect();
        let edges = self.edges.iter().map(|&(a, b)| (f(a), f(b))).collect();
        Self::new(tasks, edges)
    }
}
