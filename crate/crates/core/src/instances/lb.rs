//! Layered instance that traps list schedulers with local allocation rules.
//!
//! Each of the `Z` layers holds a tiny task `D_i`, `X` copies of `B` and a
//! tiny wide task `C_i`; after the last layer comes a chain of `Y` copies of
//! `A`. The layer's `B` tasks fit next to `D_i` but not next to `C_i`, so a
//! list scheduler serializes the layers, while an offline schedule runs all
//! the tiny tasks first and then overlaps the `B` tasks with the `A` chain.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::allocator::params_for;
use crate::engine::{tol, AllocationPolicy, Locality, Schedule, ScheduleEntry};
use crate::error::{Error, Result};
use crate::model::{ModelKind, SpeedupSpec, Task, TaskGraph, TaskId};

/// The four task shapes and how they are allocated.
#[derive(Debug, Clone, Serialize)]
pub struct LbTask {
    pub spec: SpeedupSpec,
    /// Allocation chosen by the policy under test.
    pub procs: usize,
    pub time: f64,
    /// Allocation in the offline comparison schedule.
    pub ref_procs: usize,
    pub ref_time: f64,
}

impl LbTask {
    fn new(
        spec: SpeedupSpec,
        policy: &AllocationPolicy,
        procs: usize,
        ref_procs: usize,
    ) -> Result<Self> {
        let p = policy.allocate_one(0, &spec, procs)?;
        Ok(Self {
            time: spec.exec_time(p, procs)?,
            ref_time: spec.exec_time(ref_procs, procs)?,
            spec,
            procs: p,
            ref_procs,
        })
    }

    pub fn area(&self) -> f64 {
        self.procs as f64 * self.time
    }

    pub fn ref_area(&self) -> f64 {
        self.ref_procs as f64 * self.ref_time
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LbMeta {
    pub model: ModelKind,
    pub procs: usize,
    pub eps: f64,
    pub policy: String,
    /// Threshold work found by the search; absent for roofline.
    pub w_bar: Option<f64>,
    pub x: usize,
    pub k: usize,
    pub y: usize,
    pub z: usize,
    pub a: LbTask,
    pub b: LbTask,
    pub c: LbTask,
    pub d: LbTask,
}

impl LbMeta {
    fn layer_base(&self, i: usize) -> TaskId {
        ((i - 1) * (self.x + 2)) as TaskId
    }

    pub fn d_id(&self, i: usize) -> TaskId {
        self.layer_base(i) + 1
    }

    pub fn b_id(&self, i: usize, j: usize) -> TaskId {
        self.layer_base(i) + 1 + j as TaskId
    }

    pub fn c_id(&self, i: usize) -> TaskId {
        self.layer_base(i) + self.x as TaskId + 2
    }

    pub fn a_id(&self, i: usize) -> TaskId {
        (self.z * (self.x + 2) + i) as TaskId
    }

    /// `Z t_B + Y t_A`.
    pub fn forced_makespan(&self) -> f64 {
        self.z as f64 * self.b.time + self.y as f64 * self.a.time
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub label: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn get(&self, label: &str) -> Option<bool> {
        self.checks
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.holds)
    }

    fn push(&mut self, label: &str, holds: bool, detail: String) {
        self.checks.push(ConstraintCheck {
            label: label.into(),
            holds,
            detail,
        });
    }
}

#[derive(Debug, Clone)]
pub struct LbInstance {
    pub graph: TaskGraph,
    pub meta: LbMeta,
    pub constraints: ConstraintReport,
}

/// Supremum of the set `{x >= 0 : in_set(x)}` up to `resolution`: returns
/// `lo` in the set with `lo + resolution` past the first boundary found.
fn threshold_search(
    in_set: impl Fn(f64) -> Result<bool>,
    resolution: f64,
    what: &str,
) -> Result<f64> {
    if !in_set(0.0)? {
        return Err(Error::Construction(format!(
            "{what}: x = 0 is outside the set, no lower boundary"
        )));
    }
    let mut hi = 1.0;
    while in_set(hi)? {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Construction(format!(
                "{what}: the set has no upper boundary below 1e9"
            )));
        }
    }
    let mut lo = 0.0;
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if in_set(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Builds the layered instance for `kind` against `policy` on `procs`
/// processors with slack `eps`, and evaluates every side constraint.
pub fn gen_lb_graph(
    kind: ModelKind,
    procs: usize,
    eps: f64,
    policy: &AllocationPolicy,
) -> Result<LbInstance> {
    if procs < 16 {
        return Err(Error::Domain(format!(
            "need at least 16 processors, got {procs}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if policy.locality() != Locality::Local {
        return Err(Error::PolicyRefused(format!(
            "policy `{}` does not decide locally",
            policy.name()
        )));
    }
    let pf = procs as f64;
    let tiny = eps / (121.0 * pf * pf);
    let alloc = |spec: &SpeedupSpec| policy.allocate_one(0, spec, procs);

    let (a, b, c, d, w_bar) = match kind {
        ModelKind::Roofline => {
            let a = SpeedupSpec::roofline(1.0, 1)?;
            let d = SpeedupSpec::roofline(tiny, 1)?;
            let c = SpeedupSpec::roofline(tiny, procs)?;
            (
                LbTask::new(a.clone(), policy, procs, 1)?,
                LbTask::new(a, policy, procs, 1)?,
                LbTask::new(c, policy, procs, procs)?,
                LbTask::new(d, policy, procs, 1)?,
                None,
            )
        }
        ModelKind::Communication => {
            let res = 1.0 / pf;
            let w_bar = threshold_search(
                |x| Ok(alloc(&SpeedupSpec::communication(x, 1.0)?)? == 1),
                res,
                "single-processor set of x/p + p - 1",
            )?;
            let a = SpeedupSpec::communication(w_bar, 1.0)?;
            let b = SpeedupSpec::communication(w_bar + res, 1.0)?;
            let ref_a = if w_bar <= 6.0 { 2 } else { 3 };
            (
                LbTask::new(a, policy, procs, ref_a)?,
                LbTask::new(b, policy, procs, 1)?,
                LbTask::new(SpeedupSpec::communication(tiny, 0.0)?, policy, procs, procs)?,
                LbTask::new(SpeedupSpec::communication(tiny, 1.0)?, policy, procs, 1)?,
                Some(w_bar),
            )
        }
        ModelKind::Amdahl => {
            let root = pf.sqrt();
            let res = 1.0 / root;
            let w_bar = threshold_search(
                |x| Ok((alloc(&SpeedupSpec::amdahl(x, res)?)? as f64) < root),
                res,
                "below-sqrt(P) set of x/p + 1/sqrt(P)",
            )?;
            let a = SpeedupSpec::amdahl(w_bar, res)?;
            let b = SpeedupSpec::amdahl(w_bar + res, res)?;
            let ref_a = (pf.powf(0.75).floor() as usize).max(1);
            (
                LbTask::new(a, policy, procs, ref_a)?,
                LbTask::new(b, policy, procs, 1)?,
                LbTask::new(SpeedupSpec::amdahl(tiny, 0.0)?, policy, procs, procs)?,
                LbTask::new(SpeedupSpec::amdahl(0.0, tiny)?, policy, procs, 1)?,
                Some(w_bar),
            )
        }
        other => {
            return Err(Error::Domain(format!(
                "no layered construction for the {other} model"
            )));
        }
    };

    let x = (procs - c.procs + 1).div_ceil(b.procs);
    let k = (5.0 * a.ref_time / (eps * x as f64 * b.ref_time)).ceil() as usize;
    let y = (x as f64 * k as f64 * b.ref_time / a.ref_time).floor() as usize;
    if a.ref_procs >= procs {
        return Err(Error::Construction(
            "reference allocation of A leaves no room for B".into(),
        ));
    }
    let z = k * (procs - a.ref_procs);
    let meta = LbMeta {
        model: kind,
        procs,
        eps,
        policy: policy.name(),
        w_bar,
        x,
        k,
        y,
        z,
        a,
        b,
        c,
        d,
    };

    let mut tasks = Vec::with_capacity(z * (x + 2) + y);
    let mut edges = Vec::with_capacity(z * (x + 2) + y);
    for i in 1..=z {
        tasks.push(Task::new(meta.d_id(i), meta.d.spec.clone()));
        for j in 1..=x {
            tasks.push(Task::new(meta.b_id(i, j), meta.b.spec.clone()));
        }
        tasks.push(Task::new(meta.c_id(i), meta.c.spec.clone()));
    }
    for i in 1..=y {
        tasks.push(Task::new(meta.a_id(i), meta.a.spec.clone()));
    }
    edges.extend(expected_edges(&meta));
    let graph = TaskGraph::new(tasks, edges)?;
    let constraints = constraint_report(&meta);
    Ok(LbInstance {
        graph,
        meta,
        constraints,
    })
}

/// Edge set implied by the layer rules: `C_i -> D_{i+1}`, `C_i -> B_{i+1,j}`,
/// `D_i -> C_i`, `C_Z -> A_1` and `A_i -> A_{i+1}`.
pub fn expected_edges(meta: &LbMeta) -> Vec<(TaskId, TaskId)> {
    let mut edges = Vec::new();
    for i in 1..=meta.z {
        edges.push((meta.d_id(i), meta.c_id(i)));
        if i < meta.z {
            edges.push((meta.c_id(i), meta.d_id(i + 1)));
            for j in 1..=meta.x {
                edges.push((meta.c_id(i), meta.b_id(i + 1, j)));
            }
        }
    }
    if meta.y > 0 && meta.z > 0 {
        edges.push((meta.c_id(meta.z), meta.a_id(1)));
    }
    for i in 1..meta.y {
        edges.push((meta.a_id(i), meta.a_id(i + 1)));
    }
    edges.sort_unstable();
    edges
}

/// Whether the graph's edges are exactly the layer rules.
pub fn edge_rules_hold(inst: &LbInstance) -> bool {
    inst.graph.edges() == expected_edges(&inst.meta).as_slice()
}

/// Evaluates every task-level and graph-level side constraint.
pub fn constraint_report(meta: &LbMeta) -> ConstraintReport {
    let pf = meta.procs as f64;
    let p34 = pf.powf(0.75);
    let tiny = meta.eps / (121.0 * pf * pf);
    let slack = |v: f64| 1e-12 * v.abs().max(1e-300);
    let (a, b, c, d) = (&meta.a, &meta.b, &meta.c, &meta.d);
    let (x, k, y, z) = (meta.x as f64, meta.k as f64, meta.y as f64, meta.z as f64);
    let mu = params_for(meta.model).mu;
    let mut r = ConstraintReport::default();

    r.push(
        "R1",
        (a.ref_procs as f64) <= p34,
        format!("p*_A = {} vs P^(3/4) = {p34:.3}", a.ref_procs),
    );
    r.push(
        "R2",
        (0.1..=100.0).contains(&b.ref_time),
        format!("t*_B = {}", b.ref_time),
    );
    r.push(
        "R3",
        (b.procs as f64) <= p34,
        format!("p_B = {} vs P^(3/4) = {p34:.3}", b.procs),
    );
    r.push(
        "R4",
        d.time <= b.time,
        format!("t_D = {} vs t_B = {}", d.time, b.time),
    );
    r.push(
        "R5",
        d.ref_time <= tiny + slack(tiny),
        format!("t*_D = {} vs {tiny}", d.ref_time),
    );
    r.push("R6", d.procs <= 4, format!("p_D = {}", d.procs));
    r.push(
        "R7",
        a.ref_time <= 24.0 * b.ref_time,
        format!("t*_A = {} vs 24 t*_B = {}", a.ref_time, 24.0 * b.ref_time),
    );
    let t_b1 = b.spec.exec_time(1, meta.procs).unwrap_or(f64::NAN);
    r.push(
        "R8",
        b.ref_procs == 1 && b.ref_time == t_b1 && b.ref_area() == t_b1,
        format!(
            "p*_B = {}, t*_B = {}, t_B(1) = {t_b1}",
            b.ref_procs, b.ref_time
        ),
    );
    r.push(
        "R9",
        a.time <= 5.0 * a.ref_time,
        format!("t_A = {} vs 5 t*_A = {}", a.time, 5.0 * a.ref_time),
    );
    r.push(
        "R10",
        b.area() <= 5.0 * b.ref_area(),
        format!("a_B = {} vs 5 a*_B = {}", b.area(), 5.0 * b.ref_area()),
    );
    r.push(
        "R11",
        c.ref_time <= tiny + slack(tiny),
        format!("t*_C = {} vs {tiny}", c.ref_time),
    );
    r.push(
        "R12",
        c.procs as f64 >= mu * pf,
        format!("p_C = {} vs mu P = {:.3}", c.procs, mu * pf),
    );
    r.push(
        "R13",
        meta.x >= 1 && meta.x <= meta.procs,
        format!("X = {}", meta.x),
    );
    let xkb = x * k * b.ref_time;
    let ya = y * a.ref_time;
    r.push(
        "R14",
        xkb * (1.0 - meta.eps / 5.0) <= ya + slack(ya) && ya <= xkb + slack(xkb),
        format!("{} <= Y t*_A = {ya} <= {xkb}", xkb * (1.0 - meta.eps / 5.0)),
    );
    r.push(
        "R15",
        k * (pf - p34) <= z && z <= 121.0 * pf / meta.eps,
        format!("{} <= Z = {z} <= {}", k * (pf - p34), 121.0 * pf / meta.eps),
    );

    let needed = (120_900.0 / meta.eps).powi(4);
    r.push(
        "F1",
        pf >= needed,
        format!("P = {pf} vs (120900/eps)^4 = {needed:.3e}"),
    );
    let x_def = (meta.procs - c.procs + 1).div_ceil(b.procs);
    r.push(
        "F2",
        meta.x == x_def,
        format!("X = {} vs ceil((P - p_C + 1) / p_B) = {x_def}", meta.x),
    );
    let k_def = (5.0 * a.ref_time / (meta.eps * x * b.ref_time)).ceil();
    r.push("F3", k == k_def, format!("K = {k} vs {k_def}"));
    let y_def = (x * k * b.ref_time / a.ref_time).floor();
    r.push("F4", y == y_def, format!("Y = {y} vs {y_def}"));
    let z_def = meta.k * (meta.procs - a.ref_procs);
    r.push(
        "F5",
        meta.z == z_def,
        format!("Z = {} vs K (P - p*_A) = {z_def}", meta.z),
    );
    r
}

/// Offline comparison schedule: every `D_i` then `C_i` (on the whole
/// platform) in turn, then the `A` chain on `p*_A` processors next to the
/// `B` tasks on one processor each, `P - p*_A` at a time.
pub fn reference_lb_schedule(inst: &LbInstance) -> Result<Schedule> {
    let m = &inst.meta;
    let mut entries = BTreeMap::new();
    let mut t = 0.0;
    for i in 1..=m.z {
        entries.insert(
            m.d_id(i),
            ScheduleEntry {
                start: t,
                end: t + m.d.ref_time,
                procs: m.d.ref_procs,
            },
        );
        t += m.d.ref_time;
        entries.insert(
            m.c_id(i),
            ScheduleEntry {
                start: t,
                end: t + m.c.ref_time,
                procs: m.c.ref_procs,
            },
        );
        t += m.c.ref_time;
    }
    let t0 = t;
    for i in 1..=m.y {
        let s = t0 + (i - 1) as f64 * m.a.ref_time;
        entries.insert(
            m.a_id(i),
            ScheduleEntry {
                start: s,
                end: s + m.a.ref_time,
                procs: m.a.ref_procs,
            },
        );
    }
    let lanes = m.procs - m.a.ref_procs;
    let mut slot = 0usize;
    for i in 1..=m.z {
        for j in 1..=m.x {
            let s = t0 + (slot / lanes) as f64 * m.b.ref_time;
            entries.insert(
                m.b_id(i, j),
                ScheduleEntry {
                    start: s,
                    end: s + m.b.ref_time,
                    procs: 1,
                },
            );
            slot += 1;
        }
    }
    Ok(Schedule::from_entries(entries))
}

/// Which parts of the forced layer-by-layer shape a schedule exhibits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeReport {
    /// Every `B` of layer `i` starts together with `D_i`.
    pub layers_start_with_d: bool,
    /// `C_i` starts exactly when the last `B` of its layer ends, and they all
    /// end together.
    pub c_starts_at_layer_end: bool,
    /// `D_i` starts when `C_{i-1}` ends.
    pub d_follows_c: bool,
    /// `A_1` starts when `C_Z` ends and the chain runs back to back.
    pub a_chain_follows: bool,
    pub makespan: f64,
    /// `Z t_B + Y t_A`.
    pub forced_makespan: f64,
    pub makespan_at_least_forced: bool,
}

impl ShapeReport {
    pub fn holds(&self) -> bool {
        self.layers_start_with_d
            && self.c_starts_at_layer_end
            && self.d_follows_c
            && self.a_chain_follows
            && self.makespan_at_least_forced
    }
}

pub fn forced_shape(inst: &LbInstance, schedule: &Schedule) -> Result<ShapeReport> {
    let m = &inst.meta;
    let get = |id: TaskId| {
        schedule
            .get(id)
            .copied()
            .ok_or_else(|| Error::Config(format!("schedule lacks task {id}")))
    };
    let same = |a: f64, b: f64| (a - b).abs() <= tol(a.max(b));
    let (mut starts, mut layer_end, mut d_follow, mut a_follow) = (true, true, true, true);
    for i in 1..=m.z {
        let d = get(m.d_id(i))?;
        let c = get(m.c_id(i))?;
        let mut first_end: Option<f64> = None;
        for j in 1..=m.x {
            let b = get(m.b_id(i, j))?;
            starts &= same(b.start, d.start);
            let e = *first_end.get_or_insert(b.end);
            layer_end &= same(b.end, e);
        }
        if let Some(e) = first_end {
            layer_end &= same(c.start, e);
        }
        if i > 1 {
            d_follow &= same(d.start, get(m.c_id(i - 1))?.end);
        }
    }
    if m.y > 0 && m.z > 0 {
        a_follow &= same(get(m.a_id(1))?.start, get(m.c_id(m.z))?.end);
    }
    for i in 2..=m.y {
        a_follow &= same(get(m.a_id(i))?.start, get(m.a_id(i - 1))?.end);
    }
    let forced = m.forced_makespan();
    Ok(ShapeReport {
        layers_start_with_d: starts,
        c_starts_at_layer_end: layer_end,
        d_follows_c: d_follow,
        a_chain_follows: a_follow,
        makespan: schedule.makespan,
        forced_makespan: forced,
        makespan_at_least_forced: schedule.makespan >= forced - tol(forced),
    })
}
