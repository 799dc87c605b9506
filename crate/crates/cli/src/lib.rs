//! Command-line surface for the modular-curve point counter: exact counts,
//! point degrees, the CM point count, achieved-set enumeration, and the
//! verification suites that reproduce the closed-form answer sets by brute
//! force.

pub mod args;
pub mod expected;
pub mod grammar;
pub mod report;
pub mod rng;
pub mod suites;

use std::io::Write;
use std::time::Instant;

use serde_json::{json, Value};

use modcurve_core::count::{
    achieved_set, cm_rational_count, count_points, count_points_fast, point_degree, CountResult,
    Field,
};
use modcurve_core::error::Error;
use modcurve_core::standard::{plus_minus, CMOrder};
use modcurve_core::zmod::{Level, Mat2};
use modcurve_core::ExecCfg;

use args::{Command, Parsed, Suite, UsageError};
use report::{render_value, set_to_json, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Run the CLI against `argv` (without the program name), writing to the
/// given streams. Returns the process exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let parsed = match args::parse(argv) {
        Ok(parsed) => parsed,
        Err(UsageError(msg)) => {
            if msg.is_empty() {
                let _ = out.write_all(args::usage().as_bytes());
                return EXIT_OK;
            }
            let _ = writeln!(err, "error: {msg}");
            let _ = write!(err, "{}", args::usage());
            return EXIT_USAGE;
        }
    };
    match dispatch(&parsed, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                // Internal-consistency failures mean a wrong result would
                // have been produced; report them as failures, not usage.
                Error::Internal { .. } => EXIT_FAIL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(parsed: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let cfg = &parsed.cfg;
    let started = Instant::now();
    match &parsed.command {
        Command::Count { level, h, r, a } => {
            let level = Level::new(*level)?;
            let hg = grammar::parse_group(h, &level, &cfg.budgets)?;
            let rg = grammar::parse_group(r, &level, &cfg.budgets)?;
            let result = match a {
                None => count_points_fast(&hg, &rg, cfg)?,
                Some(spec) => {
                    let ag = grammar::parse_group(spec, &level, &cfg.budgets)?;
                    count_points(&hg, &rg, &ag, cfg)?
                }
            };
            let inputs = json!({
                "level": level.modulus(), "H": h, "R": r,
                "A": a.clone().map(Value::String).unwrap_or(Value::Null),
            });
            emit_count(parsed, "count", inputs, &result, started, out);
            Ok(EXIT_OK)
        }
        Command::Degree { level, h, r, a, g } => {
            let level = Level::new(*level)?;
            let hg = grammar::parse_group(h, &level, &cfg.budgets)?;
            let rg = grammar::parse_group(r, &level, &cfg.budgets)?;
            let ag = match a {
                Some(spec) => grammar::parse_group(spec, &level, &cfg.budgets)?,
                None => plus_minus(&modcurve_core::group::Subgroup::trivial(&level)),
            };
            let gm = Mat2::parse(g, &level)?;
            let degree = point_degree(&hg, &rg, &ag, &gm)?;
            if parsed.json {
                let doc = json!({
                    "command": "degree",
                    "inputs": {
                        "level": level.modulus(), "H": h, "R": r, "g": g,
                        "A": a.clone().map(Value::String).unwrap_or(Value::Null),
                    },
                    "result": degree,
                    "method": "stabilizer-index",
                    "elapsed_ms": started.elapsed().as_millis() as u64,
                });
                let _ = writeln!(out, "{doc}");
            } else {
                let _ = writeln!(out, "{degree}");
            }
            Ok(EXIT_OK)
        }
        Command::Cm {
            dk,
            f,
            level,
            h,
            field,
        } => {
            let level = Level::new(*level)?;
            let order = CMOrder::new(*dk, *f)?;
            let hg = grammar::parse_group(h, &level, &cfg.budgets)?;
            let field_enum = match field {
                args::CmField::Rationals => Field::Rationals,
                args::CmField::CmField => Field::CMField,
            };
            let result = cm_rational_count(&order, &level, &hg, field_enum, order.j_class(), cfg)?;
            let inputs = json!({
                "dK": dk, "f": f, "level": level.modulus(), "H": h,
                "field": match field { args::CmField::Rationals => "q", args::CmField::CmField => "cm" },
                "j_class": order.j_class().name(),
            });
            emit_count(parsed, "cm", inputs, &result, started, out);
            Ok(EXIT_OK)
        }
        Command::Enumerate { level, h } => {
            let level = Level::new(*level)?;
            let hg = grammar::parse_group(h, &level, &cfg.budgets)?;
            let set = achieved_set(&hg, cfg)?;
            if parsed.json {
                let doc = json!({
                    "command": "enumerate",
                    "inputs": {"level": level.modulus(), "H": h},
                    "result": set_to_json(&set),
                    "method": "achieved-set",
                    "elapsed_ms": started.elapsed().as_millis() as u64,
                });
                let _ = writeln!(out, "{doc}");
            } else {
                let _ = writeln!(out, "{}", render_value(&set_to_json(&set)));
            }
            Ok(EXIT_OK)
        }
        Command::Verify(suite) => {
            let reports = run_suite(suite, cfg)?;
            let all_pass = reports.iter().all(|r| r.pass);
            if parsed.json {
                let doc = json!({
                    "command": "verify",
                    "inputs": suite_inputs(suite),
                    "result": reports.iter().map(VerifyReport::to_json).collect::<Vec<_>>(),
                    "method": "verify",
                    "elapsed_ms": started.elapsed().as_millis() as u64,
                });
                let _ = writeln!(out, "{doc}");
            } else {
                for report in &reports {
                    let _ = writeln!(out, "{}", report.render_human());
                }
            }
            if all_pass {
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(err, "verification failed");
                Ok(EXIT_FAIL)
            }
        }
    }
}

fn emit_count(
    parsed: &Parsed,
    command: &str,
    inputs: Value,
    result: &CountResult,
    started: Instant,
    out: &mut dyn Write,
) {
    if parsed.json {
        let doc = json!({
            "command": command,
            "inputs": inputs,
            "result": result.count,
            "method": result.method.as_str(),
            "elapsed_ms": started.elapsed().as_millis() as u64,
        });
        let _ = writeln!(out, "{doc}");
    } else {
        let _ = writeln!(out, "{}", result.count);
    }
}

fn run_suite(suite: &Suite, cfg: &ExecCfg) -> Result<Vec<VerifyReport>, Error> {
    Ok(match suite {
        Suite::Borel { p, k } => vec![suites::verify_borel(*p, *k, cfg)?],
        Suite::Cartan { family, p, k } => vec![suites::verify_cartan(*family, *p, *k, cfg)?],
        Suite::Transitions { p, k } => vec![suites::verify_transitions(*p, *k, cfg)?],
        Suite::ThreePoint {
            p,
            k,
            mode,
            samples,
        } => {
            vec![suites::verify_three_point(*p, *k, *mode, *samples, cfg)?]
        }
        Suite::CharLemma { p_max } => vec![suites::verify_char_lemma(*p_max)?],
        Suite::All { tier } => suites::verify_all(*tier, cfg)?,
    })
}

fn suite_inputs(suite: &Suite) -> Value {
    match suite {
        Suite::Borel { p, k } => json!({"suite": "borel", "p": p, "k": k}),
        Suite::Cartan { family, p, k } => {
            json!({"suite": "cartan", "family": family.token(), "p": p, "k": k})
        }
        Suite::Transitions { p, k } => json!({"suite": "transitions", "p": p, "k": k}),
        Suite::ThreePoint {
            p,
            k,
            mode,
            samples,
        } => json!({
            "suite": "three-point", "p": p, "k": k,
            "mode": match mode {
                suites::ThreePointMode::Exhaustive => "exhaustive",
                suites::ThreePointMode::Sampled => "sampled",
            },
            "samples": samples,
        }),
        Suite::CharLemma { p_max } => json!({"suite": "char-lemma", "p_max": p_max}),
        Suite::All { tier } => json!({
            "suite": "all",
            "tier": match tier { suites::Tier::Fast => "fast", suites::Tier::Full => "full" },
        }),
    }
}
