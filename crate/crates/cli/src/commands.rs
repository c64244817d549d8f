use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recolor_core::bounds::{self, BoundCheck, BoundReport};
use recolor_core::colouring::{self, Filter};
use recolor_core::constructions as cons;
use recolor_core::glauber::{self, Estimate, EventSpec, Restrict};
use recolor_core::graph::Girth;
use recolor_core::reconfiguration;
use recolor_core::{Error, Graph, Result};
use serde_json::{json, Value};

use crate::family::GraphSource;
use crate::{Ctx, Outcome, Verdict};

fn girth_json(g: &Graph) -> Value {
    match g.girth() {
        Girth::Finite(x) => json!(x),
        Girth::Acyclic => Value::Null,
    }
}

fn verdict(name: &str, satisfied: bool) -> Verdict {
    Verdict { name: name.to_string(), satisfied }
}

/// Count proper, frugal and frozen colourings and compare the frozen
/// fraction against the freeze-probability bound when its hypotheses hold.
pub fn enumerate(src: &GraphSource, k_flag: Option<usize>, ctx: &Ctx) -> Result<Outcome> {
    let (g, mut params) = src.resolve(ctx.seed)?;
    let delta = g.max_degree();
    let k = k_flag.unwrap_or(delta + 1);
    params["k"] = json!(k);

    let mut counts = serde_json::Map::new();
    let mut verdicts = Vec::new();
    let mut partial = Value::Null;
    let mut within_budget = true;
    let jobs = [
        ("all", Filter::All, true),
        ("frugal", Filter::Frugal, true),
        ("frozen", Filter::Frozen, k == delta + 1),
    ];
    for (name, filter, applicable) in jobs {
        if !applicable {
            counts.insert(name.into(), Value::Null);
            partial = json!("frozen counting needs k = Δ+1");
            continue;
        }
        match colouring::count_parallel(&g, k, filter, ctx.budget_nodes) {
            Ok(out) => {
                counts.insert(name.into(), json!(out.count));
            }
            Err(Error::Budget { nodes, partial: seen }) => {
                counts.insert(name.into(), Value::Null);
                partial = json!(format!(
                    "{name} count exhausted the node budget after {nodes} nodes ({seen} found so far)"
                ));
                within_budget = false;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let all = counts.get("all").and_then(Value::as_u64);
    let frozen = counts.get("frozen").and_then(Value::as_u64);
    let (ratio, ratio_exact) = match (frozen, all) {
        (Some(f), Some(a)) if a > 0 => (json!(f as f64 / a as f64), json!(format!("{f}/{a}"))),
        _ => (Value::Null, Value::Null),
    };

    let (bound, bound_exact, pre_ok) = match bounds::theorem1_bound(g.n(), delta) {
        Ok(v) => {
            let exact = bounds::theorem1_bound_exact(g.n(), delta)?
                .map(|(num, den)| json!(format!("{num}/{den}")))
                .unwrap_or(Value::Null);
            (json!(v), exact, true)
        }
        Err(_) => (Value::Null, Value::Null, false),
    };
    if let (Some(f), Some(a)) = (frozen, all) {
        if pre_ok && g.is_connected() && a > 0 {
            verdicts.push(verdict(
                "freeze_probability",
                bounds::theorem1_holds(f, a, g.n(), delta)?,
            ));
        }
    }
    verdicts.push(verdict("within_budget", within_budget));

    Ok(Outcome {
        params,
        result: json!({
            "n": g.n(),
            "delta": delta,
            "k": k,
            "counts": Value::Object(counts),
            "ratio": ratio,
            "ratio_exact": ratio_exact,
            "theorem1_bound": bound,
            "theorem1_bound_exact": bound_exact,
            "partial": partial,
        }),
        verdicts,
        ..Outcome::default()
    })
}

/// Build the recolouring graph and summarize isolated states, component
/// sizes and (when it exists) the diameter of the non-frozen part.
pub fn recolouring_graph(
    src: &GraphSource,
    k_flag: Option<usize>,
    export_edges: Option<&Path>,
    export_states: Option<&Path>,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (g, mut params) = src.resolve(ctx.seed)?;
    let k = k_flag.unwrap_or(g.max_degree() + 1);
    params["k"] = json!(k);

    let rg = match reconfiguration::build_recolouring_graph(&g, k, ctx.budget_nodes) {
        Ok(rg) => rg,
        Err(Error::Budget { nodes, partial }) => {
            return Ok(Outcome {
                params,
                result: json!({
                    "partial": format!(
                        "meta-graph construction exhausted the node budget after {nodes} nodes ({partial} states found)"
                    ),
                }),
                verdicts: vec![verdict("within_budget", false)],
                ..Outcome::default()
            })
        }
        Err(e) => return Err(e),
    };
    let summary = rg.component_summary();
    let diameter = match rg.nonfrozen_diameter() {
        Ok(d) => json!(d),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };

    let mut exports = serde_json::Map::new();
    if let Some(path) = export_edges {
        std::fs::write(path, rg.to_text()?)?;
        exports.insert("edges".into(), json!(path.display().to_string()));
    }
    if let Some(path) = export_states {
        std::fs::write(path, rg.state_table_json())?;
        exports.insert("states".into(), json!(path.display().to_string()));
    }

    Ok(Outcome {
        params,
        result: json!({
            "k": k,
            "states": rg.state_count(),
            "edges": rg.edge_count(),
            "isolated": summary.isolated_count,
            "nontrivial_components": summary.nontrivial_components,
            "nonfrozen_diameter": diameter,
            "exports": Value::Object(exports),
        }),
        verdicts: vec![verdict("within_budget", true)],
        ..Outcome::default()
    })
}

/// Exact distance-to-uniform profile of the single-site dynamics on a small
/// state space. Without an explicit --t-max the horizon doubles until the
/// quarter mixing time is bracketed.
pub fn mixing_exact(
    src: &GraphSource,
    k_flag: Option<usize>,
    restrict: Restrict,
    t_max: Option<usize>,
    ctx: &Ctx,
) -> Result<Outcome> {
    let (g, mut params) = src.resolve(ctx.seed)?;
    let k = k_flag.unwrap_or(g.max_degree() + 1);
    params["k"] = json!(k);
    params["restrict"] = json!(restrict);

    let profile = match t_max {
        Some(t) => glauber::exact_tv_profile(&g, k, t, restrict, ctx.budget_nodes)?,
        None => {
            let mut t = 128;
            loop {
                let p = glauber::exact_tv_profile(&g, k, t, restrict, ctx.budget_nodes)?;
                if p.t_mix_quarter.is_some() || t >= 16_384 {
                    break p;
                }
                t *= 2;
            }
        }
    };

    let mut csv = String::from("t,d\n");
    for (t, d) in profile.d.iter().enumerate() {
        csv.push_str(&format!("{t},{d}\n"));
    }

    Ok(Outcome {
        params,
        result: json!({
            "mode": "exact",
            "states": profile.states,
            "t_mix_quarter": profile.t_mix_quarter,
            "d": profile.d,
        }),
        series: Some(csv),
        ..Outcome::default()
    })
}

/// Seeded lower-bound experiment on J(2k): estimate how much mass the chain
/// started at the planted near-frozen state leaves in the top level set at
/// t = ⌊k·n/4⌋, and compare with the stationary mass of the complement.
pub fn mixing_lowerbound(
    k_level: Option<usize>,
    delta: Option<usize>,
    trials: u64,
    ctx: &Ctx,
) -> Result<Outcome> {
    let k_level = k_level.ok_or_else(|| Error::Input("lower-bound mode needs --k-level".into()))?;
    let delta = delta.ok_or_else(|| Error::Input("lower-bound mode needs --delta".into()))?;
    if k_level < 5 || delta < 3 {
        return Err(Error::Input(format!(
            "refusing the lower-bound experiment with k-level {k_level}, Δ {delta}: it needs \
             k-level ≥ 5 and Δ ≥ 3 so the top level set has stationary mass at most 1/4"
        )));
    }
    let (g, beta) = cons::beta_start(k_level, delta)?;
    let n = g.n();
    let t = (k_level * n / 4) as u64;
    let needed = t.saturating_mul(trials);
    if needed > ctx.budget_steps {
        return Err(Error::Input(format!(
            "experiment needs {needed} chain steps but --budget-steps is {}",
            ctx.budget_steps
        )));
    }

    // Event: the state has left the top level set S_k.
    let outside = move |s: &[u8]| {
        !cons::level_set_contains_slice(s, k_level, delta, k_level)
            .expect("chain states cover J(2k)")
    };
    let est = glauber::event_probability_estimate(&g, &beta, t, &outside, trials, ctx.seed)?;

    // Exact stationary mass of the complement event when the state space is
    // small enough to enumerate cheaply; otherwise fall back to the 1/4
    // level-set mass bound that the k-level ≥ 5 hypothesis guarantees.
    let probe = ctx.budget_nodes.min(500_000);
    let pred = |s: &[u8]| outside(s);
    let (stationary, pi_lower) = match glauber::stationary_event_probability(
        &g,
        delta + 1,
        Restrict::All,
        EventSpec::Predicate(&pred),
        probe,
    ) {
        Ok(p) => {
            let v = *p.value.numer() as f64 / *p.value.denom() as f64;
            (json!({ "kind": "exact", "probability": p }), v)
        }
        Err(Error::Unsupported(_)) | Err(Error::Budget { .. }) => (
            json!({
                "kind": "lower_bound",
                "value": 0.75,
                "reason": "the top level set keeps stationary mass at most 1/4 once k-level ≥ 5",
            }),
            0.75,
        ),
        Err(e) => return Err(e),
    };

    // d(t) ≥ π(outside) − μ_t(outside); above 1/4 this certifies t_mix > t.
    let d_lower = pi_lower - est.estimate;
    let satisfied = d_lower > 0.25;

    Ok(Outcome {
        params: json!({
            "family": "j",
            "l": 2 * k_level,
            "k_level": k_level,
            "delta": delta,
            "trials": trials,
            "event": "chain has left the top level set",
        }),
        result: json!({
            "mode": "lowerbound",
            "n": n,
            "t": t,
            "estimate": est.estimate,
            "ci95": [est.ci95.0, est.ci95.1],
            "successes": est.successes,
            "trials": est.trials,
            "stationary_outside": stationary,
            "certified_d_lower": d_lower,
            "verdict": if satisfied {
                format!("d({t}) > 1/4, so the quarter mixing time exceeds {t} = ⌊k·n/4⌋")
            } else {
                format!("no certificate: d({t}) lower bound {d_lower:.4} ≤ 1/4")
            },
        }),
        verdicts: vec![verdict("mixing_lower_bound", satisfied)],
        ..Outcome::default()
    })
}

/// Emit a graph from a named family, as edge-list text prefixed with a JSON
/// provenance comment.
pub fn construct(src: &GraphSource, ctx: &Ctx) -> Result<Outcome> {
    if src.family.is_none() {
        return Err(Error::Input("construct needs --family".into()));
    }
    let (g, params) = src.resolve(ctx.seed)?;
    let mut header = params.clone();
    header["seed"] = json!(ctx.seed);
    let text = format!(
        "# {}\n{}",
        serde_json::to_string(&header).expect("plain JSON serializes"),
        g.to_text()
    );

    Ok(Outcome {
        params,
        result: json!({
            "n": g.n(),
            "m": g.m(),
            "max_degree": g.max_degree(),
            "regularity": g.regularity(),
            "girth": girth_json(&g),
            "connected": g.is_connected(),
        }),
        artifact: Some(text),
        ..Outcome::default()
    })
}

fn report_verdict(report: &BoundReport, suffix: Option<usize>) -> Verdict {
    let name = match suffix {
        Some(x) => format!("{}_x{}", report.name, x),
        None => report.name.clone(),
    };
    Verdict { name, satisfied: report.satisfied.unwrap_or(false) }
}

/// Evaluate a named bound against its exhaustive oracle.
pub fn verify(
    check: &str,
    src: &GraphSource,
    x: Option<usize>,
    jsonl: Option<&PathBuf>,
    ctx: &Ctx,
) -> Result<Outcome> {
    let mut reports: Vec<BoundReport> = Vec::new();
    let mut verdicts: Vec<Verdict> = Vec::new();
    let mut params = json!({ "check": check });

    match check {
        "freeze-probability" => {
            let (g, p) = src.resolve(ctx.seed)?;
            params["source"] = p;
            let r = bounds::verify_bound(&BoundCheck::FreezeProbability { g: &g }, ctx.budget_nodes)?;
            verdicts.push(report_verdict(&r, None));
            reports.push(r);
        }
        "greedy-upper" => {
            let (g, p) = src.resolve(ctx.seed)?;
            params["source"] = p;
            let r = bounds::verify_bound(&BoundCheck::GreedyUpper { g: &g }, ctx.budget_nodes)?;
            verdicts.push(report_verdict(&r, None));
            reports.push(r);
        }
        "peel-step" => {
            let (g, p) = src.resolve(ctx.seed)?;
            params["source"] = p;
            let delta = g.max_degree();
            let targets: Vec<usize> = match x {
                Some(v) => vec![v],
                None => (0..g.n()).filter(|&v| g.degree(v) == delta).collect(),
            };
            params["x"] = json!(targets);
            for v in targets {
                let r = bounds::verify_bound(&BoundCheck::PeelStep { g: &g, x: v }, ctx.budget_nodes)?;
                verdicts.push(report_verdict(&r, Some(v)));
                reports.push(r);
            }
        }
        "frozen-count-envelope" => {
            let l = src.l.ok_or_else(|| Error::Input("frozen-count-envelope needs --l".into()))?;
            let delta = src
                .delta
                .ok_or_else(|| Error::Input("frozen-count-envelope needs --delta".into()))?;
            params["l"] = json!(l);
            params["delta"] = json!(delta);
            let r = bounds::verify_bound(
                &BoundCheck::FrozenCountEnvelope { l, delta },
                ctx.budget_nodes,
            )?;
            verdicts.push(report_verdict(&r, None));
            reports.push(r);
        }
        "lift-pair-identity" => {
            let n = src.n.ok_or_else(|| Error::Input("lift-pair-identity needs --n".into()))?;
            let delta = src
                .delta
                .ok_or_else(|| Error::Input("lift-pair-identity needs --delta".into()))?;
            params["n"] = json!(n);
            params["delta"] = json!(delta);
            let r = bounds::verify_bound(
                &BoundCheck::LiftPairIdentity { n, delta },
                ctx.budget_nodes,
            )?;
            verdicts.push(report_verdict(&r, None));
            reports.push(r);
        }
        other => {
            return Err(Error::Input(format!(
                "unknown check {other:?}; expected freeze-probability, greedy-upper, peel-step, \
                 frozen-count-envelope or lift-pair-identity"
            )))
        }
    }

    if let Some(path) = jsonl {
        let mut lines = String::new();
        for r in &reports {
            lines.push_str(&serde_json::to_string(r).expect("plain JSON serializes"));
            lines.push('\n');
        }
        std::fs::write(path, lines)?;
    }

    Ok(Outcome {
        params,
        result: json!({ "reports": reports }),
        verdicts,
        ..Outcome::default()
    })
}

/// Sample random Δ-regular graphs at each requested size and report how
/// often a frozen colouring (equivalently, a lift structure) exists,
/// alongside the pair-count/asymptotic-count ratio that explains the decay.
pub fn random_regular_scan(ns: &[usize], delta: usize, trials: u64, ctx: &Ctx) -> Result<Outcome> {
    if ns.is_empty() {
        return Err(Error::Input("need at least one --n value".into()));
    }
    if trials == 0 {
        return Err(Error::Input("need at least one trial".into()));
    }
    let mut rows = Vec::new();
    let mut csv = String::from("n,frequency\n");
    for &n in ns {
        if !ctx.time_left() {
            rows.push(json!({ "n": n, "skipped": "wall-clock budget exhausted" }));
            continue;
        }
        if n <= delta || (n * delta) % 2 != 0 {
            rows.push(json!({
                "n": n,
                "error": format!("no simple {delta}-regular graph on {n} vertices"),
            }));
            continue;
        }
        let mut sub = ChaCha8Rng::seed_from_u64(ctx.seed);
        sub.set_stream(n as u64);
        let mut found = 0u64;
        for _ in 0..trials {
            let g = cons::random_regular(n, delta, sub.random())?;
            if cons::detect_lift_structure(&g, ctx.budget_nodes)?.is_some() {
                found += 1;
            }
        }
        let est = Estimate::from_counts(found, trials)?;
        let (pairs, ratio) = match bounds::lift_pair_count(n, delta) {
            Ok(p) => {
                let log_pairs = p.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
                let log_asym = bounds::regular_count_asymptotic_log(n, delta)?;
                (json!(p.to_string()), json!((log_pairs - log_asym).exp()))
            }
            Err(_) => (Value::Null, Value::Null),
        };
        csv.push_str(&format!("{n},{}\n", est.estimate));
        rows.push(json!({
            "n": n,
            "trials": trials,
            "frozen_found": found,
            "frequency": est.estimate,
            "ci95": [est.ci95.0, est.ci95.1],
            "lift_pairs": pairs,
            "pair_to_asymptotic_ratio": ratio,
        }));
    }

    Ok(Outcome {
        params: json!({ "n": ns, "delta": delta, "trials": trials }),
        result: json!({ "rows": rows }),
        series: Some(csv),
        ..Outcome::default()
    })
}

/// Sample random lifts until one reaches the target girth, then emit the
/// witness graph and its pulled-back frozen colouring.
pub fn girth_hunt(
    delta: usize,
    girth: usize,
    fibers: usize,
    trials: u64,
    emit: &str,
    ctx: &Ctx,
) -> Result<Outcome> {
    if girth < 3 {
        return Err(Error::Input("target girth must be at least 3".into()));
    }
    let params = json!({
        "delta": delta,
        "girth": girth,
        "fibers": fibers,
        "trials": trials,
        "emit": emit,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut used = 0u64;
    let mut stopped_early = false;
    while used < trials {
        if !ctx.time_left() {
            stopped_early = true;
            break;
        }
        let sample_seed: u64 = rng.random();
        let (_, g) = cons::random_lift(delta, fibers, sample_seed)?;
        used += 1;
        let achieved = match g.girth() {
            Girth::Finite(x) => x,
            Girth::Acyclic => usize::MAX,
        };
        if achieved < girth {
            continue;
        }

        let colouring = cons::lift_pullback_colouring(delta, fibers)?;
        let frozen = colouring::is_frozen(&g, &colouring)?;
        let graph_path = format!("{emit}-graph.txt");
        let colouring_path = format!("{emit}-colouring.txt");
        let header = json!({
            "family": "random-lift",
            "delta": delta,
            "fibers": fibers,
            "seed": ctx.seed,
            "sample_seed": sample_seed,
            "girth": achieved,
        });
        std::fs::write(
            &graph_path,
            format!(
                "# {}\n{}",
                serde_json::to_string(&header).expect("plain JSON serializes"),
                g.to_text()
            ),
        )?;
        std::fs::write(&colouring_path, colouring.to_text())?;

        return Ok(Outcome {
            params,
            result: json!({
                "found": true,
                "trials_used": used,
                "girth": achieved,
                "n": g.n(),
                "m": g.m(),
                "files": { "graph": graph_path, "colouring": colouring_path },
            }),
            verdicts: vec![verdict("witness_frozen", frozen)],
            ..Outcome::default()
        });
    }

    // Not finding a witness is a sampling outcome, not a refuted claim: the
    // probabilistic argument promises nothing at any fixed fiber count.
    Ok(Outcome {
        params,
        result: json!({
            "found": false,
            "trials_used": used,
            "stopped_early": stopped_early,
        }),
        ..Outcome::default()
    })
}
