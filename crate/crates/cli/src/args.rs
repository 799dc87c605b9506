//! Hand-rolled flag parsing. Every subcommand takes `--flag value` pairs
//! plus the boolean `--json`; anything malformed is a usage error.

use std::collections::BTreeMap;

use modcurve_core::{Budgets, ExecCfg};

use crate::expected::CartanFamily;
use crate::suites::{ThreePointMode, Tier};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Count {
        level: u64,
        h: String,
        r: String,
        a: Option<String>,
    },
    Degree {
        level: u64,
        h: String,
        r: String,
        a: Option<String>,
        g: String,
    },
    Cm {
        dk: i64,
        f: u64,
        level: u64,
        h: String,
        field: CmField,
    },
    Enumerate {
        level: u64,
        h: String,
    },
    Verify(Suite),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmField {
    Rationals,
    CmField,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Suite {
    Borel { p: u64, k: u32 },
    Cartan { family: CartanFamily, p: u64, k: u32 },
    Transitions { p: u64, k: u32 },
    ThreePoint { p: u64, k: u32, mode: ThreePointMode, samples: u64 },
    CharLemma { p_max: u64 },
    All { tier: Tier },
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub command: Command,
    pub json: bool,
    pub cfg: ExecCfg,
}

pub fn usage() -> String {
    "\
modcurve - exact point counts on modular curves above a j-invariant

USAGE:
  modcurve count     --level N --H GROUP --R GROUP [--A GROUP]
  modcurve degree    --level N --H GROUP --R GROUP --g MATRIX [--A GROUP]
  modcurve cm        --dK D --f F --level N --H GROUP --field cm|q
  modcurve enumerate --H GROUP (--level N | --p P --k K)
  modcurve verify    --suite borel|cartan|transitions|three-point|char-lemma|all
                     [--p P --k K] [--family s|s+|ns|ns+]
                     [--mode exhaustive|sampled] [--samples N]
                     [--p-max P] [--tier fast|full]

GROUP grammar:
  borel | gl2 | split | split+ | nonsplit | nonsplit+
  | cartan:<dK>,<f> | cartan+:<dK>,<f> | gens:<matrix;matrix;...>
MATRIX text form: a,b;c,d   (row-major; entries may be negative)

Common flags:
  --json                    emit one JSON document on stdout
  --workers W               scan parallelism (default: WORKERS env or CPUs)
  --subgroup-budget B       max subgroup order for lattice enumeration
  --scan-budget B           max #GL2 for whole-group scans
  --coset-budget B          max #GL2 for double-coset partitions

Exit codes: 0 success, 1 verification/internal failure, 2 usage error.
"
    .to_string()
}

/// A usage-class error: malformed flags, unknown names, missing arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

pub fn parse(args: &[String]) -> Result<Parsed, UsageError> {
    let mut it = args.iter();
    let sub = it
        .next()
        .ok_or_else(|| UsageError("missing subcommand".to_string()))?
        .clone();

    let mut flags: BTreeMap<String, String> = BTreeMap::new();
    let mut json = false;
    let rest: Vec<&String> = it.collect();
    let mut i = 0;
    while i < rest.len() {
        let flag = rest[i].as_str();
        if !flag.starts_with("--") {
            return Err(UsageError(format!("expected a flag, got '{flag}'")));
        }
        let name = flag.trim_start_matches("--").to_string();
        if name == "json" {
            json = true;
            i += 1;
            continue;
        }
        let value = rest
            .get(i + 1)
            .ok_or_else(|| UsageError(format!("flag --{name} needs a value")))?;
        if flags.insert(name.clone(), value.to_string()).is_some() {
            return Err(UsageError(format!("flag --{name} given twice")));
        }
        i += 2;
    }

    let cfg = parse_cfg(&mut flags)?;
    let command = match sub.as_str() {
        "count" => Command::Count {
            level: take_parsed(&mut flags, "level")?,
            h: take(&mut flags, "H")?,
            r: take(&mut flags, "R")?,
            a: flags.remove("A"),
        },
        "degree" => Command::Degree {
            level: take_parsed(&mut flags, "level")?,
            h: take(&mut flags, "H")?,
            r: take(&mut flags, "R")?,
            a: flags.remove("A"),
            g: take(&mut flags, "g")?,
        },
        "cm" => Command::Cm {
            dk: take_parsed(&mut flags, "dK")?,
            f: take_parsed(&mut flags, "f")?,
            level: take_parsed(&mut flags, "level")?,
            h: take(&mut flags, "H")?,
            field: match take(&mut flags, "field")?.as_str() {
                "cm" | "cmfield" => CmField::CmField,
                "q" | "rationals" => CmField::Rationals,
                other => {
                    return Err(UsageError(format!(
                        "--field must be cm or q, got '{other}'"
                    )))
                }
            },
        },
        "enumerate" => Command::Enumerate {
            level: level_or_prime_power(&mut flags)?,
            h: take(&mut flags, "H")?,
        },
        "verify" => Command::Verify(parse_suite(&mut flags)?),
        "help" | "--help" | "-h" => return Err(UsageError(String::new())),
        other => return Err(UsageError(format!("unknown subcommand '{other}'"))),
    };

    if let Some(stray) = flags.keys().next() {
        return Err(UsageError(format!("unexpected flag --{stray}")));
    }
    Ok(Parsed { command, json, cfg })
}

fn parse_suite(flags: &mut BTreeMap<String, String>) -> Result<Suite, UsageError> {
    let name = take(flags, "suite")?;
    Ok(match name.as_str() {
        "borel" => Suite::Borel {
            p: take_parsed(flags, "p")?,
            k: take_parsed(flags, "k")?,
        },
        "cartan" => Suite::Cartan {
            family: CartanFamily::parse(&take(flags, "family")?)
                .ok_or_else(|| UsageError("--family must be s, s+, ns or ns+".to_string()))?,
            p: take_parsed(flags, "p")?,
            k: take_parsed(flags, "k")?,
        },
        "transitions" => Suite::Transitions {
            p: take_parsed(flags, "p")?,
            k: take_parsed(flags, "k")?,
        },
        "three-point" => {
            let p: u64 = take_parsed(flags, "p")?;
            let k: u32 = take_parsed(flags, "k")?;
            let mode = match flags.remove("mode").as_deref() {
                Some("exhaustive") => ThreePointMode::Exhaustive,
                Some("sampled") => ThreePointMode::Sampled,
                None => {
                    if p.pow(k) <= 9 {
                        ThreePointMode::Exhaustive
                    } else {
                        ThreePointMode::Sampled
                    }
                }
                Some(other) => {
                    return Err(UsageError(format!(
                        "--mode must be exhaustive or sampled, got '{other}'"
                    )))
                }
            };
            let samples = match flags.remove("samples") {
                Some(s) => s
                    .parse()
                    .map_err(|e| UsageError(format!("--samples '{s}': {e}")))?,
                None => 100_000,
            };
            Suite::ThreePoint { p, k, mode, samples }
        }
        "char-lemma" => Suite::CharLemma {
            p_max: match flags.remove("p-max") {
                Some(s) => s
                    .parse()
                    .map_err(|e| UsageError(format!("--p-max '{s}': {e}")))?,
                None => 47,
            },
        },
        "all" => Suite::All {
            tier: match flags.remove("tier").as_deref() {
                Some("fast") | None => Tier::Fast,
                Some("full") => Tier::Full,
                Some(other) => {
                    return Err(UsageError(format!(
                        "--tier must be fast or full, got '{other}'"
                    )))
                }
            },
        },
        other => return Err(UsageError(format!("unknown suite '{other}'"))),
    })
}

fn parse_cfg(flags: &mut BTreeMap<String, String>) -> Result<ExecCfg, UsageError> {
    let mut cfg = ExecCfg::default();
    if let Ok(env_workers) = std::env::var("WORKERS") {
        cfg.workers = env_workers
            .parse()
            .map_err(|e| UsageError(format!("WORKERS env var '{env_workers}': {e}")))?;
    }
    if let Some(w) = flags.remove("workers") {
        cfg.workers = w
            .parse()
            .map_err(|e| UsageError(format!("--workers '{w}': {e}")))?;
    }
    cfg.workers = cfg.workers.max(1);
    let mut budgets = Budgets::default();
    if let Some(b) = flags.remove("subgroup-budget") {
        budgets.subgroups = b
            .parse()
            .map_err(|e| UsageError(format!("--subgroup-budget '{b}': {e}")))?;
    }
    if let Some(b) = flags.remove("scan-budget") {
        budgets.scan = b
            .parse()
            .map_err(|e| UsageError(format!("--scan-budget '{b}': {e}")))?;
    }
    if let Some(b) = flags.remove("coset-budget") {
        budgets.cosets = b
            .parse()
            .map_err(|e| UsageError(format!("--coset-budget '{b}': {e}")))?;
    }
    cfg.budgets = budgets;
    Ok(cfg)
}

fn level_or_prime_power(flags: &mut BTreeMap<String, String>) -> Result<u64, UsageError> {
    match (flags.contains_key("level"), flags.contains_key("p")) {
        (true, false) => take_parsed(flags, "level"),
        (false, true) => {
            let p: u64 = take_parsed(flags, "p")?;
            let k: u32 = take_parsed(flags, "k")?;
            p.checked_pow(k)
                .ok_or_else(|| UsageError("p^k overflows".to_string()))
        }
        (true, true) => Err(UsageError(
            "give either --level or --p/--k, not both".to_string(),
        )),
        (false, false) => Err(UsageError("missing --level (or --p/--k)".to_string())),
    }
}

fn take(flags: &mut BTreeMap<String, String>, name: &str) -> Result<String, UsageError> {
    flags
        .remove(name)
        .ok_or_else(|| UsageError(format!("missing required flag --{name}")))
}

fn take_parsed<T: std::str::FromStr>(
    flags: &mut BTreeMap<String, String>,
    name: &str,
) -> Result<T, UsageError>
where
    T::Err: std::fmt::Display,
{
    let raw = take(flags, name)?;
    raw.parse()
        .map_err(|e| UsageError(format!("--{name} '{raw}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(args: &[&str]) -> Vec<String> {
        args.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn count_command_parses() {
        let parsed = parse(&strs(&[
            "count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4",
        ]))
        .unwrap();
        assert_eq!(
            parsed.command,
            Command::Count {
                level: 9,
                h: "borel".to_string(),
                r: "gens:1,3;0,4".to_string(),
                a: None,
            }
        );
        assert!(!parsed.json);
    }

    #[test]
    fn cm_command_parses() {
        let parsed = parse(&strs(&[
            "cm", "--dK", "-7", "--f", "1", "--level", "88", "--H", "borel", "--field", "cm",
            "--json",
        ]))
        .unwrap();
        assert!(parsed.json);
        assert_eq!(
            parsed.command,
            Command::Cm {
                dk: -7,
                f: 1,
                level: 88,
                h: "borel".to_string(),
                field: CmField::CmField,
            }
        );
    }

    #[test]
    fn enumerate_accepts_p_k() {
        let parsed = parse(&strs(&["enumerate", "--H", "split", "--p", "3", "--k", "1"])).unwrap();
        assert_eq!(
            parsed.command,
            Command::Enumerate {
                level: 3,
                h: "split".to_string()
            }
        );
        assert!(parse(&strs(&[
            "enumerate", "--H", "split", "--p", "3", "--k", "1", "--level", "3"
        ]))
        .is_err());
    }

    #[test]
    fn verify_suites_parse() {
        assert_eq!(
            parse(&strs(&["verify", "--suite", "cartan", "--family", "ns+", "--p", "5", "--k", "1"]))
                .unwrap()
                .command,
            Command::Verify(Suite::Cartan {
                family: CartanFamily::NonsplitNormalizer,
                p: 5,
                k: 1
            })
        );
        assert_eq!(
            parse(&strs(&["verify", "--suite", "three-point", "--p", "3", "--k", "2"]))
                .unwrap()
                .command,
            Command::Verify(Suite::ThreePoint {
                p: 3,
                k: 2,
                mode: ThreePointMode::Exhaustive,
                samples: 100_000
            })
        );
        assert_eq!(
            parse(&strs(&["verify", "--suite", "all", "--tier", "full"]))
                .unwrap()
                .command,
            Command::Verify(Suite::All { tier: Tier::Full })
        );
    }

    #[test]
    fn usage_errors() {
        assert!(parse(&strs(&[])).is_err());
        assert!(parse(&strs(&["frobnicate"])).is_err());
        assert!(parse(&strs(&["count", "--level"])).is_err());
        assert!(parse(&strs(&["count", "level", "9"])).is_err());
        assert!(parse(&strs(&["count", "--level", "9", "--H", "borel"])).is_err());
        assert!(parse(&strs(&[
            "count", "--level", "9", "--H", "borel", "--R", "borel", "--bogus", "1"
        ]))
        .is_err());
    }

    #[test]
    fn budget_flags_apply() {
        let parsed = parse(&strs(&[
            "verify",
            "--suite",
            "borel",
            "--p",
            "5",
            "--k",
            "2",
            "--subgroup-budget",
            "12000",
            "--workers",
            "3",
        ]))
        .unwrap();
        assert_eq!(parsed.cfg.budgets.subgroups, 12_000);
        assert_eq!(parsed.cfg.workers, 3);
    }
}
