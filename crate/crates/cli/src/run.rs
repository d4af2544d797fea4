use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use moldsched::bounds::{brute_force_optimal, competitive_report, lower_bound, OracleLimits};
use moldsched::engine::validate_schedule;
use moldsched::instances::{
    chains_adversary_simulate, gen_chains_instance, parse_graph, reference_chain_schedule,
    write_json, GraphDocument,
};
use serde_json::json;

use crate::args::{Cli, Command, OracleArgs, SimulateArgs};
use crate::{generate, print_json, sweep, verify, Verdict};

pub(crate) fn dispatch(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Generate(g) => generate::run(g),
        Command::Verify(v) => verify::run(v),
        Command::Oracle(a) => oracle(a),
        Command::Sweep(a) => sweep::run(a),
    }
}

/// The parsed graph plus the chain-instance tag, if the file carries one.
fn load(path: &Path) -> Result<(GraphDocument, Option<u32>)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc = parse_graph(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Ok((doc, generate::chains_tag(&value)))
}

fn simulate(a: SimulateArgs) -> Result<Verdict> {
    let (doc, tag) = load(&a.graph)?;
    let procs = a.procs.unwrap_or(doc.procs);
    if let (Some(ell), false) = (tag, a.static_graph) {
        return simulate_adversary(&doc, ell, procs, &a);
    }

    let limits = OracleLimits::default();
    let with_oracle =
        a.with_oracle && doc.graph.len() <= limits.max_tasks && procs <= limits.max_procs;
    let report = competitive_report(&doc.graph, procs, &a.policy, with_oracle)?;
    let violations = validate_schedule(&doc.graph, &report.schedule, procs);
    for v in &violations {
        eprintln!("invalid schedule: {v:?}");
    }
    if let Some(out) = &a.out {
        write_json(&report.schedule, out)?;
    }
    if let Some(path) = &a.report {
        write_json(&report, path)?;
    }
    print_json(&report)?;
    Ok(Verdict::from_ok(violations.is_empty()))
}

fn simulate_adversary(
    doc: &GraphDocument,
    ell: u32,
    procs: usize,
    a: &SimulateArgs,
) -> Result<Verdict> {
    let inst = gen_chains_instance(ell)?;
    if inst.graph != doc.graph || inst.procs != procs {
        bail!(
            "{} is tagged as a chain instance but does not match one; rerun with --static",
            a.graph.display()
        );
    }
    let (schedule, trace) = chains_adversary_simulate(&inst, &a.policy)?;
    let reference = reference_chain_schedule(&inst)?;
    let lb = lower_bound(&inst.graph, procs)?;
    let gaps = trace.gaps(ell, 1e-9);
    let violations = validate_schedule(&inst.graph, &schedule, procs);
    let ok = violations.is_empty() && gaps.iter().all(|g| g.holds);
    let report = json!({
        "mode": "adversary",
        "policy": a.policy.name(),
        "n": inst.graph.len(),
        "procs": procs,
        "makespan": schedule.makespan,
        "lower_bound": lb,
        "reference_makespan": reference.makespan,
        "ratio_vs_reference": schedule.makespan / reference.makespan,
        "phases": trace.t,
        "gaps": gaps,
        "valid": violations.is_empty(),
    });
    if let Some(out) = &a.out {
        write_json(&schedule, out)?;
    }
    if let Some(path) = &a.report {
        write_json(&report, path)?;
    }
    print_json(&report)?;
    Ok(Verdict::from_ok(ok))
}

fn oracle(a: OracleArgs) -> Result<Verdict> {
    let (doc, _) = load(&a.graph)?;
    let procs = a.procs.unwrap_or(doc.procs);
    let mut limits = OracleLimits::default();
    if let Some(b) = a.budget {
        limits.node_budget = b;
    }
    let r = brute_force_optimal(&doc.graph, procs, &limits)?;
    let lb = lower_bound(&doc.graph, procs)?;
    let violations = validate_schedule(&doc.graph, &r.schedule, procs);
    if let Some(out) = &a.out {
        write_json(&r.schedule, out)?;
    }
    print_json(&json!({
        "n": doc.graph.len(),
        "procs": procs,
        "makespan": r.makespan(),
        "optimal": r.optimal,
        "nodes": r.nodes,
        "lower_bound": lb,
    }))?;
    Ok(Verdict::from_ok(
        violations.is_empty() && lb.value <= r.makespan() * (1.0 + 1e-12),
    ))
}
