//! The five subcommands. Each loads the instance, does its work, writes one
//! report to `--out` (or stdout), and returns the process exit code.

use std::time::Instant;

use adasub::bounds::{bound_trace, bound_trace_budget};
use adasub::greedy::{build_policy, policy_to_json, Engine, PolicyMetrics, StoppingRule};
use adasub::model::Caps;
use adasub::verify::{
    check_adaptive_monotone, check_adaptive_submodular, oracle_cover, oracle_max,
};
use adasub::{Error, Instance};
use serde_json::json;

use crate::output::{fmt_f64, write_report, CsvTable};
use crate::{CommonArgs, Format, RunArgs};

fn stop_label(stop: StoppingRule) -> String {
    match stop {
        StoppingRule::Cardinality(k) => format!("maximize={k}"),
        StoppingRule::Quota(q) => format!("cover={}", fmt_f64(q)),
        StoppingRule::Budget(b) => format!("budget={}", fmt_f64(b)),
        StoppingRule::MinSum(q) => format!("minsum={}", fmt_f64(q)),
    }
}

fn stop_json(stop: StoppingRule) -> serde_json::Value {
    match stop {
        StoppingRule::Cardinality(k) => json!({ "maximize": k }),
        StoppingRule::Quota(q) => json!({ "cover": q }),
        StoppingRule::Budget(b) => json!({ "budget": b }),
        StoppingRule::MinSum(q) => json!({ "minsum": q }),
    }
}

fn config_json(args: &RunArgs, stop: StoppingRule) -> Result<serde_json::Value, Error> {
    let backend = match args.backend()? {
        adasub::objectives::Backend::Enumerate => json!("enumerate"),
        adasub::objectives::Backend::Sample { samples, .. } => json!({ "sample": samples }),
    };
    Ok(json!({
        "engine": args.engine.label(),
        "rule": args.rule.label(),
        "stop": stop_json(stop),
        "backend": backend,
        "seed": args.seed,
    }))
}

fn wall_ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn run(args: &RunArgs, caps: &Caps) -> Result<i32, Error> {
    let inst = Instance::load(&args.common.instance, caps)?;
    let stop = args.stop()?;
    let started = Instant::now();
    let (tree, metrics) = build_policy(
        &inst.items,
        &inst.objective,
        &inst.prior,
        stop,
        args.rule.as_rule(),
        args.engine.as_engine(),
        args.backend()?,
        caps,
    )?;
    let elapsed = wall_ms(started);
    let text = match args.common.format {
        Format::Json => {
            let doc = json!({
                "schema": "adasub-run v1",
                "instance": inst.name,
                "config": config_json(args, stop)?,
                "policy": policy_to_json(&tree, &inst.items)?,
                "metrics": metrics,
                "timing": { "wall_ms": elapsed },
            });
            pretty(&doc)
        }
        Format::Csv => metrics_csv(&inst.name, args, stop, &metrics, elapsed),
    };
    write_report(&args.common, &text)?;
    Ok(0)
}

fn metrics_csv(
    instance: &str,
    args: &RunArgs,
    stop: StoppingRule,
    metrics: &PolicyMetrics,
    elapsed: f64,
) -> String {
    let mut table = CsvTable::new([
        "instance",
        "engine",
        "rule",
        "stop",
        "avg_value",
        "avg_cost",
        "worst_case_cost",
        "min_sum",
        "evaluations",
        "wall_ms",
        "seed",
    ]);
    table.row([
        instance.to_string(),
        args.engine.label().to_string(),
        args.rule.label().to_string(),
        stop_label(stop),
        fmt_f64(metrics.avg_value),
        fmt_f64(metrics.avg_cost),
        fmt_f64(metrics.worst_case_cost),
        fmt_f64(metrics.min_sum),
        metrics.evaluation_count.to_string(),
        fmt_f64(elapsed),
        args.seed.map(|s| s.to_string()).unwrap_or_default(),
    ]);
    table.finish()
}

pub fn check(args: &CommonArgs, caps: &Caps) -> Result<i32, Error> {
    let inst = Instance::load(&args.instance, caps)?;
    let started = Instant::now();
    let monotone = check_adaptive_monotone(&inst.objective, &inst.prior, caps)?;
    let submodular = check_adaptive_submodular(&inst.objective, &inst.prior, caps)?;
    let elapsed = wall_ms(started);
    let passed = monotone.passed && submodular.passed;
    let text = match args.format {
        Format::Json => {
            let doc = json!({
                "schema": "adasub-check v1",
                "instance": inst.name,
                "passed": passed,
                "monotone": monotone,
                "submodular": submodular,
                "timing": { "wall_ms": elapsed },
            });
            pretty(&doc)
        }
        Format::Csv => {
            let mut table = CsvTable::new(["property", "passed", "pairs_checked", "witnesses"]);
            for report in [&monotone, &submodular] {
                table.row([
                    match report.property {
                        adasub::verify::Property::Monotone => "monotone".to_string(),
                        adasub::verify::Property::Submodular => "submodular".to_string(),
                    },
                    report.passed.to_string(),
                    report.pairs_checked.to_string(),
                    report.witnesses.len().to_string(),
                ]);
            }
            table.finish()
        }
    };
    write_report(args, &text)?;
    if passed {
        Ok(0)
    } else {
        for report in [&monotone, &submodular] {
            for witness in &report.witnesses {
                eprintln!(
                    "violation of {:?}: item {} benefit {} at {:?}{}",
                    report.property,
                    witness.item,
                    witness.benefit_at_partial,
                    witness.partial,
                    witness
                        .extended
                        .as_ref()
                        .map(|ext| {
                            format!(
                                " but {} at {:?}",
                                witness.benefit_at_extended.unwrap_or(f64::NAN),
                                ext
                            )
                        })
                        .unwrap_or_default(),
                );
            }
        }
        Ok(3)
    }
}

pub fn oracle(args: &RunArgs, caps: &Caps) -> Result<i32, Error> {
    let inst = Instance::load(&args.common.instance, caps)?;
    let stop = args.stop()?;
    let started = Instant::now();
    let best = match stop {
        StoppingRule::Cardinality(k) => oracle_max(&inst.objective, &inst.prior, k, caps)?,
        StoppingRule::Quota(q) | StoppingRule::MinSum(q) => {
            oracle_cover(&inst.items, &inst.objective, &inst.prior, q, caps)?
        }
        StoppingRule::Budget(_) => {
            return Err(Error::InvalidConfig(
                "oracle supports --maximize, --cover, and --minsum".into(),
            ))
        }
    };
    let (_, greedy) = build_policy(
        &inst.items,
        &inst.objective,
        &inst.prior,
        stop,
        args.rule.as_rule(),
        args.engine.as_engine(),
        args.backend()?,
        caps,
    )?;
    let elapsed = wall_ms(started);
    // Value ratio (greedy/optimum, at most 1) for maximization; cost ratio
    // (greedy/optimum, at least 1) for coverage.
    let ratio = match stop {
        StoppingRule::Cardinality(_) => {
            if best.optimum == 0.0 {
                1.0
            } else {
                greedy.avg_value / best.optimum
            }
        }
        _ => greedy.avg_cost / best.optimum,
    };
    let text = match args.common.format {
        Format::Json => {
            let doc = json!({
                "schema": "adasub-oracle v1",
                "instance": inst.name,
                "stop": stop_json(stop),
                "optimum": best.optimum,
                "states_explored": best.states_explored,
                "policy": policy_to_json(&best.policy, &inst.items)?,
                "greedy": greedy,
                "ratio": ratio,
                "timing": { "wall_ms": elapsed },
            });
            pretty(&doc)
        }
        Format::Csv => {
            let mut table = CsvTable::new([
                "instance",
                "stop",
                "optimum",
                "states_explored",
                "greedy_value",
                "greedy_cost",
                "ratio",
                "wall_ms",
            ]);
            table.row([
                inst.name.clone(),
                stop_label(stop),
                fmt_f64(best.optimum),
                best.states_explored.to_string(),
                fmt_f64(greedy.avg_value),
                fmt_f64(greedy.avg_cost),
                fmt_f64(ratio),
                fmt_f64(elapsed),
            ]);
            table.finish()
        }
    };
    write_report(&args.common, &text)?;
    Ok(0)
}

pub fn bound(args: &RunArgs, caps: &Caps) -> Result<i32, Error> {
    let inst = Instance::load(&args.common.instance, caps)?;
    let stop = args.stop()?;
    let started = Instant::now();
    let (tree, _) = build_policy(
        &inst.items,
        &inst.objective,
        &inst.prior,
        stop,
        args.rule.as_rule(),
        args.engine.as_engine(),
        args.backend()?,
        caps,
    )?;
    let trace = match stop {
        StoppingRule::Cardinality(k) => bound_trace(&tree, &inst.objective, &inst.prior, k, caps)?,
        StoppingRule::Budget(b) => {
            bound_trace_budget(&tree, &inst.items, &inst.objective, &inst.prior, b, caps)?
        }
        _ => {
            return Err(Error::InvalidConfig(
                "bound supports --maximize and --budget".into(),
            ))
        }
    };
    let elapsed = wall_ms(started);
    let text = match args.common.format {
        Format::Json => {
            let doc = json!({
                "schema": "adasub-bound v1",
                "instance": inst.name,
                "stop": stop_json(stop),
                "trace": trace,
                "timing": { "wall_ms": elapsed },
            });
            pretty(&doc)
        }
        Format::Csv => {
            let mut table =
                CsvTable::new(["step", "depth", "current", "slack", "bound", "k_remaining"]);
            for (step, cert) in trace.iter().enumerate() {
                table.row([
                    step.to_string(),
                    cert.observations.len().to_string(),
                    fmt_f64(cert.current),
                    fmt_f64(cert.slack),
                    fmt_f64(cert.bound),
                    cert.k_remaining.map_or(String::new(), |k| k.to_string()),
                ]);
            }
            table.finish()
        }
    };
    write_report(&args.common, &text)?;
    Ok(0)
}

pub fn bench(args: &RunArgs, caps: &Caps) -> Result<i32, Error> {
    let inst = Instance::load(&args.common.instance, caps)?;
    let stop = args.stop()?;
    let backend = args.backend()?;
    let naive_started = Instant::now();
    let (naive_tree, naive_metrics) = build_policy(
        &inst.items,
        &inst.objective,
        &inst.prior,
        stop,
        args.rule.as_rule(),
        Engine::Naive,
        backend,
        caps,
    )?;
    let naive_ms = wall_ms(naive_started);
    let lazy_started = Instant::now();
    let (lazy_tree, lazy_metrics) = build_policy(
        &inst.items,
        &inst.objective,
        &inst.prior,
        stop,
        args.rule.as_rule(),
        Engine::Lazy,
        backend,
        caps,
    )?;
    let lazy_ms = wall_ms(lazy_started);
    let trees_equal = naive_tree == lazy_tree;
    let text = match args.common.format {
        Format::Json => {
            let doc = json!({
                "schema": "adasub-bench v1",
                "instance": inst.name,
                "stop": stop_json(stop),
                "naive": { "evaluations": naive_metrics.evaluation_count, "wall_ms": naive_ms },
                "lazy": { "evaluations": lazy_metrics.evaluation_count, "wall_ms": lazy_ms },
                "trees_equal": trees_equal,
            });
            pretty(&doc)
        }
        Format::Csv => {
            let mut table = CsvTable::new([
                "instance",
                "stop",
                "naive_evaluations",
                "lazy_evaluations",
                "naive_wall_ms",
                "lazy_wall_ms",
                "trees_equal",
            ]);
            table.row([
                inst.name.clone(),
                stop_label(stop),
                naive_metrics.evaluation_count.to_string(),
                lazy_metrics.evaluation_count.to_string(),
                fmt_f64(naive_ms),
                fmt_f64(lazy_ms),
                trees_equal.to_string(),
            ]);
            table.finish()
        }
    };
    write_report(&args.common, &text)?;
    if trees_equal {
        Ok(0)
    } else {
        eprintln!("engines disagree: naive and lazy built different trees");
        Ok(5)
    }
}

fn pretty(doc: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON reports serialize");
    text.push('\n');
    text
}
