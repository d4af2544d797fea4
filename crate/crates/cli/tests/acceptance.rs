//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines always reach the terminal.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use moldsched::allocator::{initial_allocation, params_for, FEASIBILITY_SLACK};
use moldsched::audit::spec_grid;
use moldsched::bounds::{brute_force_optimal, lower_bound, OracleLimits};
use moldsched::engine::{simulate, validate_schedule, AllocationPolicy, Schedule};
use moldsched::instances::{
    chains_adversary_simulate, forced_shape, gen_chains_instance, gen_lb_graph, gen_random_dag,
    reference_chain_schedule, reference_lb_schedule, LbInstance, RandomDagConfig,
};
use moldsched::model::{ModelKind, SpeedupSpec, TaskGraph, TaskId};
use moldsched::par::{self, Execution};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_moldsched");

type Check = Result<String, String>;

/// Every schedule seen during the run, checked against the makespan lower bound.
#[derive(Default)]
struct Safety {
    checked: usize,
    violations: Vec<String>,
}

impl Safety {
    fn check(&mut self, what: &str, graph: &TaskGraph, procs: usize, schedule: &Schedule) {
        self.checked += 1;
        match lower_bound(graph, procs) {
            Ok(lb) if lb.value <= schedule.makespan * (1.0 + 1e-12) => {}
            Ok(lb) => self.violations.push(format!(
                "{what}: bound {} above makespan {}",
                lb.value, schedule.makespan
            )),
            Err(e) => self.violations.push(format!("{what}: {e}")),
        }
    }
}

fn cli(args: &[&str]) -> Result<(i32, String, Duration), String> {
    let t0 = Instant::now();
    let out = Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| format!("cannot run {BIN}: {e}"))?;
    let elapsed = t0.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    Ok((out.status.code().unwrap_or(-1), stdout, elapsed))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Root of `beta + alpha / (1 - mu) = 1 / mu` in `(0, 1/2)` by bisection.
fn solve_mu(alpha: f64, beta: f64) -> f64 {
    let f = |mu: f64| beta + alpha / (1.0 - mu) - 1.0 / mu;
    let (mut lo, mut hi) = (1e-9, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn parameter_algebra() -> Check {
    let (code, out, elapsed) = cli(&["verify", "params", "--json"])?;
    ensure(code == 0, || format!("exit {code}"))?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    let rows: Vec<Value> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let s2 = 2f64.sqrt();
    let expected = [
        ("roofline", (3.0 - 5f64.sqrt()) / 2.0, 2.62),
        ("communication", (23.0 - 313f64.sqrt()) / 18.0, 3.39),
        ("amdahl", (1.0 - (8.0 * s2 - 11.0).sqrt()) / 2.0, 4.55),
        ("general", (33.0 - 738f64.sqrt()) / 27.0, 4.63),
    ];
    ensure(rows.len() == 4, || format!("{} rows", rows.len()))?;
    let mut shown = Vec::new();
    for (row, (name, mu_closed, ratio_pub)) in rows.iter().zip(expected) {
        let get = |k: &str| {
            row[k]
                .as_f64()
                .ok_or_else(|| format!("{name}: missing {k}"))
        };
        ensure(row["model"] == name, || {
            format!("row order: {}", row["model"])
        })?;
        let (alpha, beta, mu, ratio) = (get("alpha")?, get("beta")?, get("mu")?, get("ratio")?);
        let solved = solve_mu(alpha, beta);
        ensure((mu - mu_closed).abs() <= 1e-9, || {
            format!("{name}: mu {mu} vs {mu_closed}")
        })?;
        ensure((solved - mu).abs() <= 1e-9, || {
            format!("{name}: mu {mu} vs root {solved}")
        })?;
        ensure(
            ((ratio * 100.0).round() / 100.0 - ratio_pub).abs() < 1e-12,
            || format!("{name}: 1/mu = {ratio}"),
        )?;
        let residual = (beta + alpha / (1.0 - mu) - 1.0 / mu).abs();
        ensure(residual <= 1e-12, || format!("{name}: residual {residual}"))?;
        let side = mu * (alpha - 1.0) / (1.0 - mu).powi(2);
        ensure(beta + 1e-12 >= side, || {
            format!("{name}: beta {beta} < {side}")
        })?;
        shown.push(format!("{name} {mu:.4}/{ratio:.2}"));
    }
    Ok(format!("{} in {elapsed:.2?}", shown.join(", ")))
}

/// Largest `p <= p_max` whose area stays within `alpha` of the minimum.
fn scan_allocation(spec: &SpeedupSpec, procs: usize, alpha: f64) -> usize {
    let st = spec.extremal_stats(procs).unwrap();
    (1..=st.p_max)
        .filter(|&p| {
            let a = spec.area(p, procs).unwrap();
            if st.a_min == 0.0 {
                a == 0.0
            } else {
                a / st.a_min <= alpha + FEASIBILITY_SLACK
            }
        })
        .max()
        .unwrap_or(1)
}

fn crosses(values: impl Iterator<Item = f64> + Clone, points: &[f64]) -> bool {
    points
        .iter()
        .all(|&b| values.clone().any(|v| v < b) && values.clone().any(|v| v > b))
}

fn allocation_bounds() -> Check {
    const PROCS: usize = 256;
    const SAMPLES: usize = 10_000;
    // The sampled grids straddle the case boundaries of each bound.
    let comm = spec_grid(ModelKind::Communication, PROCS, SAMPLES, 0).map_err(|e| e.to_string())?;
    let comm_ratio = comm
        .iter()
        .filter_map(|s| s.params())
        .filter(|p| p.2 > 0.0)
        .map(|p| p.0 / p.2);
    ensure(crosses(comm_ratio, &[6.0, 25.0, 49.0]), || {
        "communication grid misses a boundary".into()
    })?;
    let gen = spec_grid(ModelKind::General, PROCS, SAMPLES, 0).map_err(|e| e.to_string())?;
    let gen_params = gen.iter().filter_map(|s| s.params()).filter(|p| p.2 > 0.0);
    ensure(
        crosses(gen_params.clone().map(|p| p.0 / p.2), &[4.0, 49.0]),
        || "general w' misses a boundary".into(),
    )?;
    ensure(crosses(gen_params.map(|p| p.1 / p.2), &[4.0, 49.0]), || {
        "general d' misses a boundary".into()
    })?;

    // Independent scan on a subsample.
    for kind in ModelKind::CLOSED_FORM {
        let params = params_for(kind);
        let specs = spec_grid(kind, PROCS, SAMPLES, 0).map_err(|e| e.to_string())?;
        for spec in specs.iter().step_by(5) {
            let lib = initial_allocation(spec, PROCS, &params).map_err(|e| e.to_string())?;
            let scan = scan_allocation(spec, PROCS, params.alpha);
            ensure(lib == scan, || {
                format!("{kind}: allocator {lib} vs scan {scan} for {spec:?}")
            })?;
        }
    }

    let (code, out, elapsed) = cli(&[
        "verify",
        "alloc-bounds",
        "--procs",
        "256",
        "--samples",
        "10000",
        "--seed",
        "0",
    ])?;
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    let audits: Vec<Value> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let mut shown = Vec::new();
    for a in &audits {
        let r = &a["audit"];
        let name = r["model"].as_str().unwrap_or("?").to_string();
        ensure(r["checked"].as_u64() >= Some(SAMPLES as u64), || {
            format!("{name}: only {} specs", r["checked"])
        })?;
        for field in [
            "alpha_violations",
            "beta_violations",
            "cap_violations",
            "search_mismatches",
        ] {
            ensure(r[field] == 0, || format!("{name}: {field} = {}", r[field]))?;
        }
        let (wa, wb) = (
            r["worst_alpha"].as_f64().unwrap_or(f64::NAN),
            r["worst_beta"].as_f64().unwrap_or(f64::NAN),
        );
        let (alpha, beta) = (
            a["alpha"].as_f64().unwrap_or(0.0),
            a["beta"].as_f64().unwrap_or(0.0),
        );
        ensure(wa <= alpha + 1e-9 && wb <= beta + 1e-9, || {
            format!("{name}: worst {wa}/{wb}")
        })?;
        shown.push(format!("{name} {wa:.3}<={alpha:.3} {wb:.3}<={beta:.3}"));
    }
    ensure(audits.len() == 4 && code == 0, || {
        format!("exit {code}, {} audits", audits.len())
    })?;
    Ok(format!(
        "4x{SAMPLES} specs, {} in {elapsed:.2?}",
        shown.join(", ")
    ))
}

fn monotonicity() -> Check {
    let (code, out, elapsed) = cli(&[
        "verify",
        "monotonic",
        "--procs",
        "256",
        "--samples",
        "10000",
        "--seed",
        "0",
    ])?;
    let audits: Vec<Value> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for a in &audits {
        let r = &a["audit"];
        for field in ["time_violations", "area_violations", "speedup_violations"] {
            ensure(r[field] == 0, || {
                format!("{}: {field} = {}", r["model"], r[field])
            })?;
        }
        pairs += r["pairs"].as_u64().unwrap_or(0);
    }
    ensure(code == 0 && audits.len() == 4 && pairs > 0, || {
        format!("exit {code}")
    })?;
    Ok(format!(
        "{pairs} allocation pairs, zero violations in {elapsed:.2?}"
    ))
}

fn tiny_instance(kind: ModelKind, seed: u64) -> (TaskGraph, usize) {
    let n = 2 + (seed as usize % 5);
    let procs = 1 + (seed as usize / 5) % 8;
    let density = [0.0, 0.25, 0.5, 0.75][seed as usize % 4];
    (
        gen_random_dag(&RandomDagConfig::new(seed, n, procs, kind, density)).unwrap(),
        procs,
    )
}

fn oracle_ratio_audit(safety: &mut Safety) -> Check {
    let t0 = Instant::now();
    let mut shown = Vec::new();
    for kind in ModelKind::CLOSED_FORM {
        let bound = params_for(kind).ratio();
        let seeds: Vec<u64> = (0..500).collect();
        let runs = par::map(Execution::default(), &seeds, |&seed| {
            let (g, procs) = tiny_instance(kind, seed);
            let opt = brute_force_optimal(&g, procs, &OracleLimits::default());
            let sim = simulate(&g, procs, &AllocationPolicy::Paper);
            (g, procs, opt, sim)
        });
        let mut worst: f64 = 0.0;
        for (seed, (g, procs, opt, sim)) in runs.into_iter().enumerate() {
            let opt = opt.map_err(|e| format!("{kind} seed {seed}: {e}"))?;
            let sim = sim.map_err(|e| format!("{kind} seed {seed}: {e}"))?;
            ensure(opt.optimal, || {
                format!("{kind} seed {seed}: oracle ran out of budget")
            })?;
            safety.check("oracle", &g, procs, &opt.schedule);
            safety.check("simulate", &g, procs, &sim);
            let ratio = if opt.makespan() > 0.0 {
                sim.makespan / opt.makespan()
            } else {
                1.0
            };
            ensure(ratio <= bound + 1e-9, || {
                format!("{kind} seed {seed}: ratio {ratio} > {bound}")
            })?;
            worst = worst.max(ratio);
        }
        shown.push(format!("{kind} worst {worst:.3}<={bound:.3}"));
    }
    let elapsed = t0.elapsed();
    ensure(elapsed < Duration::from_secs(600), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "4x500 instances, {} in {elapsed:.2?}",
        shown.join(", ")
    ))
}

fn chains_reproduction(safety: &mut Safety) -> Check {
    let t0 = Instant::now();
    let inst = gen_chains_instance(2).map_err(|e| e.to_string())?;
    ensure(
        (inst.k, inst.procs, inst.chains.len()) == (4, 32, 15),
        || "wrong instance shape".into(),
    )?;
    let reference = reference_chain_schedule(&inst).map_err(|e| e.to_string())?;
    ensure((reference.makespan - 1.0).abs() <= 1e-12, || {
        format!("reference makespan {}", reference.makespan)
    })?;
    safety.check("chains reference", &inst.graph, inst.procs, &reference);

    let (s, trace) = chains_adversary_simulate(&inst, &AllocationPolicy::EqualShare)
        .map_err(|e| e.to_string())?;
    safety.check("chains adversary", &inst.graph, inst.procs, &s);
    let t = &trace.t;
    ensure(
        t[1] == 0.5 && (t[2] - 5.0 / 6.0).abs() <= f64::EPSILON,
        || format!("t1={} t2={}", t[1], t[2]),
    )?;
    ensure(
        (t[3] - 1.07).abs() <= 0.01 && (t[4] - 1.23).abs() <= 0.01,
        || format!("t3={} t4={}", t[3], t[4]),
    )?;
    let ratio = t[4] / reference.makespan;
    ensure(ratio >= 1.22, || format!("online/offline {ratio}"))?;

    for policy in [
        "paper",
        "mintime",
        "seq",
        "fixed:1",
        "fixed:2",
        "fixed:4",
        "fixed:8",
        "fixed:16",
        "fixed:32",
        "fixed-fig6b",
    ] {
        let p = AllocationPolicy::parse(policy).map_err(|e| e.to_string())?;
        let (s, trace) = chains_adversary_simulate(&inst, &p).map_err(|e| e.to_string())?;
        ensure(
            validate_schedule(&inst.graph, &s, inst.procs).is_empty(),
            || format!("{policy}: invalid schedule"),
        )?;
        safety.check("chains adversary", &inst.graph, inst.procs, &s);
        for i in 1..=inst.k {
            let gap = trace.t[i] - trace.t[i - 1];
            let need = 1.0 / (2.0 + i as f64) - 1e-9;
            ensure(gap >= need, || {
                format!("{policy}: phase {i} gap {gap} < {need}")
            })?;
        }
    }
    let (code, _, _) = cli(&["verify", "lemma12", "--ell", "2"])?;
    ensure(code == 0, || format!("verify lemma12 exit {code}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("chains.json");
    let path = path.to_str().ok_or("non-UTF-8 temp path")?;
    let (code, _, _) = cli(&["generate", "chains", "--ell", "2", "--out", path])?;
    ensure(code == 0, || format!("generate chains exit {code}"))?;
    let (code, out, _) = cli(&["simulate", path, "--policy", "fixed-fig6b"])?;
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let cli_makespan = report["makespan"].as_f64().unwrap_or(f64::NAN);
    ensure(code == 0 && (cli_makespan - 1.23).abs() <= 0.01, || {
        format!("cli makespan {cli_makespan}, exit {code}")
    })?;

    let elapsed = t0.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "t = [{:.4}, {:.4}, {:.4}, {:.4}], ratio {ratio:.4}, gaps hold for 10 policies in {elapsed:.2?}",
        t[1], t[2], t[3], t[4]
    ))
}

/// Edges of the layered instance rebuilt from the id layout.
fn layered_edges(x: usize, y: usize, z: usize) -> BTreeSet<(TaskId, TaskId)> {
    let base = |i: usize| ((i - 1) * (x + 2)) as TaskId;
    let d = |i: usize| base(i) + 1;
    let b = |i: usize, j: usize| base(i) + 1 + j as TaskId;
    let c = |i: usize| base(i) + (x + 2) as TaskId;
    let a = |i: usize| (z * (x + 2) + i) as TaskId;
    let mut e = BTreeSet::new();
    for i in 1..=z {
        e.insert((d(i), c(i)));
        if i < z {
            e.insert((c(i), d(i + 1)));
            for j in 1..=x {
                e.insert((c(i), b(i + 1, j)));
            }
        }
    }
    if y > 0 {
        e.insert((c(z), a(1)));
    }
    for i in 1..y {
        e.insert((a(i), a(i + 1)));
    }
    e
}

fn layered_arithmetic(inst: &LbInstance) -> Result<(), String> {
    let m = &inst.meta;
    let (x, k, y) = (m.x as f64, m.k as f64, m.y as f64);
    let eps = m.eps;
    let (tb, ta) = (m.b.ref_time, m.a.ref_time);
    let want = [
        ("X", m.x, (m.procs - m.c.procs + 1).div_ceil(m.b.procs)),
        ("K", m.k, (5.0 * ta / (eps * x * tb)).ceil() as usize),
        ("Y", m.y, (x * k * tb / ta).floor() as usize),
        ("Z", m.z, m.k * (m.procs - m.a.ref_procs)),
    ];
    for (name, got, exp) in want {
        ensure(got == exp, || format!("{name} = {got}, expected {exp}"))?;
    }
    let r14 = x * k * tb * (1.0 - eps / 5.0) <= y * ta * (1.0 + 1e-12)
        && y * ta <= x * k * tb * (1.0 + 1e-12);
    let r13 = m.x >= 1 && m.x <= m.procs;
    let f1 = (m.procs as f64) >= (120_900.0 / eps).powi(4);
    let c = &inst.constraints;
    ensure(c.get("F1") == Some(f1) && !f1, || {
        format!("F1 reported {:?}", c.get("F1"))
    })?;
    ensure(c.get("R13") == Some(r13) && r13, || {
        format!("R13 reported {:?}", c.get("R13"))
    })?;
    ensure(c.get("R14") == Some(r14) && r14, || {
        format!("R14 reported {:?}", c.get("R14"))
    })?;
    for f in ["F2", "F3", "F4", "F5"] {
        ensure(c.get(f) == Some(true), || {
            format!("{f} reported {:?}", c.get(f))
        })?;
    }
    let edges: BTreeSet<_> = inst.graph.edges().iter().copied().collect();
    ensure(edges == layered_edges(m.x, m.y, m.z), || {
        "edge set differs from the layer rules".into()
    })
}

fn layered_shape(safety: &mut Safety) -> Check {
    const PROCS: usize = 256;
    let mut shown = Vec::new();
    for kind in [
        ModelKind::Roofline,
        ModelKind::Communication,
        ModelKind::Amdahl,
    ] {
        let inst = gen_lb_graph(kind, PROCS, 0.5, &AllocationPolicy::Paper)
            .map_err(|e| format!("{kind}: {e}"))?;
        layered_arithmetic(&inst).map_err(|e| format!("{kind}: {e}"))?;
        let s =
            simulate(&inst.graph, PROCS, &AllocationPolicy::Paper).map_err(|e| e.to_string())?;
        ensure(validate_schedule(&inst.graph, &s, PROCS).is_empty(), || {
            format!("{kind}: invalid schedule")
        })?;
        let shape = forced_shape(&inst, &s).map_err(|e| e.to_string())?;
        ensure(shape.holds(), || format!("{kind}: {shape:?}"))?;
        let forced = inst.meta.z as f64 * inst.meta.b.time + inst.meta.y as f64 * inst.meta.a.time;
        ensure(s.makespan >= forced * (1.0 - 1e-12), || {
            format!("{kind}: T {} < {forced}", s.makespan)
        })?;
        let reference = reference_lb_schedule(&inst).map_err(|e| e.to_string())?;
        ensure(
            validate_schedule(&inst.graph, &reference, PROCS).is_empty(),
            || format!("{kind}: invalid reference"),
        )?;
        safety.check("layered list schedule", &inst.graph, PROCS, &s);
        safety.check("layered reference", &inst.graph, PROCS, &reference);
        shown.push(format!(
            "{kind} T/T*={:.3}",
            s.makespan / reference.makespan
        ));
    }
    Ok(format!(
        "P=256 eps=0.5: shape forced, F1 failed, R13/R14/edges hold; {}",
        shown.join(", ")
    ))
}

/// Capacity and precedence checked by sweeping start and end events.
fn independent_valid(g: &TaskGraph, s: &Schedule, procs: usize) -> bool {
    let mut events: Vec<(f64, i64)> = Vec::new();
    for t in g.tasks() {
        let Some(e) = s.entries.get(&t.id) else {
            return false;
        };
        let want = t.spec.exec_time(e.procs, procs).unwrap_or(f64::NAN);
        if e.procs == 0
            || e.procs > procs
            || (e.end - e.start - want).abs() > 1e-9 * e.end.abs().max(1.0)
        {
            return false;
        }
        if e.end > e.start {
            events.push((e.start, e.procs as i64));
            events.push((e.end, -(e.procs as i64)));
        }
    }
    for &(a, b) in g.edges() {
        if s.entries[&b].start < s.entries[&a].end - 1e-9 * s.entries[&a].end.abs().max(1.0) {
            return false;
        }
    }
    // Releases first at equal times.
    events.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut used = 0i64;
    events.iter().all(|&(_, d)| {
        used += d;
        used <= procs as i64
    })
}

fn engine_validity(safety: &mut Safety) -> Check {
    let mut cases = Vec::new();
    for seed in 0..250u64 {
        for kind in ModelKind::CLOSED_FORM {
            let n = 1 + (seed as usize * 13) % 60;
            let procs = 1 + (seed as usize * 7) % 64;
            let density = (seed % 5) as f64 / 4.0;
            cases.push((
                gen_random_dag(&RandomDagConfig::new(seed, n, procs, kind, density)).unwrap(),
                procs,
            ));
        }
    }
    let policies = |procs: usize| {
        vec![
            AllocationPolicy::Paper,
            AllocationPolicy::MinTime,
            AllocationPolicy::Sequential,
            AllocationPolicy::Fixed(procs.div_ceil(3)),
            AllocationPolicy::EqualShare,
        ]
    };
    let run = |exec: Execution| {
        par::map(exec, &cases, |(g, procs)| {
            policies(*procs)
                .iter()
                .map(|p| simulate(g, *procs, p))
                .collect::<Vec<_>>()
        })
    };
    let first = run(Execution::Parallel);
    let second = run(Execution::Sequential);
    let mut runs = 0;
    for (((g, procs), a), b) in cases.iter().zip(&first).zip(&second) {
        for (x, y) in a.iter().zip(b) {
            let (x, y) = (
                x.as_ref().map_err(|e| e.to_string())?,
                y.as_ref().map_err(|e| e.to_string())?,
            );
            ensure(validate_schedule(g, x, *procs).is_empty(), || {
                format!("invalid schedule n={} P={procs}", g.len())
            })?;
            ensure(independent_valid(g, x, *procs), || {
                format!("sweep check failed n={} P={procs}", g.len())
            })?;
            let same = x.makespan.to_bits() == y.makespan.to_bits()
                && x.entries.len() == y.entries.len()
                && x.entries.iter().zip(&y.entries).all(|((i, e), (j, f))| {
                    i == j
                        && e.procs == f.procs
                        && e.start.to_bits() == f.start.to_bits()
                        && e.end.to_bits() == f.end.to_bits()
                });
            ensure(same, || format!("rerun differs n={} P={procs}", g.len()))?;
            safety.check("simulate", g, *procs, x);
            runs += 1;
        }
    }
    Ok(format!(
        "{} DAGs x 5 policies = {runs} runs valid, reruns bit-identical",
        cases.len()
    ))
}

fn main() {
    let mut safety = Safety::default();
    let mut results: Vec<(u32, &str, Check)> = vec![
        (1, "parameter algebra", parameter_algebra()),
        (2, "allocation bounds", allocation_bounds()),
        (3, "monotonicity and speedup", monotonicity()),
    ];
    results.push((4, "oracle ratio audit", oracle_ratio_audit(&mut safety)));
    results.push((
        6,
        "chain adversary reproduction",
        chains_reproduction(&mut safety),
    ));
    results.push((7, "layered instance shape", layered_shape(&mut safety)));
    results.push((8, "engine validity", engine_validity(&mut safety)));
    let safety_check = if safety.violations.is_empty() {
        Ok(format!(
            "{} schedules from simulator, oracle, adversary and reference builders",
            safety.checked
        ))
    } else {
        Err(format!(
            "{} of {} violate: {}",
            safety.violations.len(),
            safety.checked,
            safety.violations[0]
        ))
    };
    results.push((5, "lower bound safety", safety_check));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (id, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
