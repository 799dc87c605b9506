//! The named verification suites: each computes something with the engine,
//! evaluates the matching closed form (or a no-counterexample claim), and
//! reports exact equality.

use std::collections::BTreeSet;
use std::time::Instant;

use serde_json::{json, Value};

use modcurve_core::count::{cm_rational_count, transition_pairs, Field};
use modcurve_core::count::achieved_set;
use modcurve_core::error::{Error, Result};
use modcurve_core::proj::{proj_act, proj_points};
use modcurve_core::standard::{
    borel, nonsplit_cartan, nonsplit_normalizer, split_cartan, split_normalizer, CMOrder,
};
use modcurve_core::zmod::{Level, Mat2};
use modcurve_core::ExecCfg;

use crate::expected;
use crate::expected::CartanFamily;
use crate::report::{set_to_json, table_to_json, VerifyReport};
use crate::rng::SplitMix64;

/// Sampling mode for the three-fixed-points suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreePointMode {
    Exhaustive,
    Sampled,
}

/// S(B0(p^k)) by exhaustive subgroup enumeration vs the displayed set.
pub fn verify_borel(p: u64, k: u32, cfg: &ExecCfg) -> Result<VerifyReport> {
    let start = Instant::now();
    let level = prime_power_level(p, k)?;
    let expected = expected::borel_set(p, k);
    let computed = achieved_set(&borel(&level)?, cfg)?;
    Ok(VerifyReport {
        suite: "borel".to_string(),
        params: json!({"p": p, "k": k}),
        pass: expected == computed,
        expected: set_to_json(&expected),
        computed: set_to_json(&computed),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// S of a Cartan family vs the displayed formulas (odd p).
pub fn verify_cartan(family: CartanFamily, p: u64, k: u32, cfg: &ExecCfg) -> Result<VerifyReport> {
    let start = Instant::now();
    let group = match family {
        CartanFamily::Split => split_cartan(p, k)?,
        CartanFamily::SplitNormalizer => split_normalizer(p, k)?,
        CartanFamily::Nonsplit => nonsplit_cartan(p, k)?,
        CartanFamily::NonsplitNormalizer => nonsplit_normalizer(p, k)?,
    };
    let expected = expected::cartan_set(family, p, k);
    let computed = achieved_set(&group, cfg)?;
    Ok(VerifyReport {
        suite: "cartan".to_string(),
        params: json!({"family": family.token(), "p": p, "k": k}),
        pass: expected == computed,
        expected: set_to_json(&expected),
        computed: set_to_json(&computed),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// The p^k -> p^{k+1} transition table vs the bulleted rows (odd p).
pub fn verify_transitions(p: u64, k: u32, cfg: &ExecCfg) -> Result<VerifyReport> {
    let start = Instant::now();
    let expected = expected::transition_rows(p, k);
    let computed = transition_pairs(p, k, cfg)?;
    Ok(VerifyReport {
        suite: "transitions".to_string(),
        params: json!({"p": p, "k": k}),
        pass: expected == computed.rows,
        expected: table_to_json(&expected),
        computed: table_to_json(&computed.rows),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// No matrix may fix three points of P^1(Z/p^k Z) with pairwise distinct
/// mod-p reductions without fixing the whole line (odd p).
pub fn verify_three_point(
    p: u64,
    k: u32,
    mode: ThreePointMode,
    samples: u64,
    _cfg: &ExecCfg,
) -> Result<VerifyReport> {
    let start = Instant::now();
    if p == 2 {
        return Err(Error::OddPrimeRequired { p });
    }
    let level = prime_power_level(p, k)?;
    let n = level.modulus();
    let points = proj_points(&level)?;
    let all = points.len() as u64;

    let mut checked = 0u64;
    let mut counterexamples = 0u64;
    let mut examine = |m: &Mat2| -> Result<()> {
        checked += 1;
        let mut fixed = 0u64;
        let mut reductions = BTreeSet::new();
        for pt in &points {
            if proj_act(m, pt)? == *pt {
                fixed += 1;
                reductions.insert(pt.reduce_mod_p(p));
            }
        }
        if reductions.len() >= 3 && fixed != all {
            counterexamples += 1;
        }
        Ok(())
    };

    match mode {
        ThreePointMode::Exhaustive => {
            for code in 0..n.pow(4) {
                let m = Mat2::from_code(code, n);
                if m.is_invertible() {
                    examine(&m)?;
                }
            }
        }
        ThreePointMode::Sampled => {
            let mut rng = SplitMix64::new(0x7031_u64 ^ (n << 16));
            let mut drawn = 0;
            while drawn < samples {
                let m = Mat2::from_code(rng.below(n.pow(4)), n);
                if m.is_invertible() {
                    drawn += 1;
                    examine(&m)?;
                }
            }
        }
    }

    Ok(VerifyReport {
        suite: "three-point".to_string(),
        params: json!({
            "p": p,
            "k": k,
            "mode": match mode { ThreePointMode::Exhaustive => "exhaustive", ThreePointMode::Sampled => "sampled" },
            "checked": checked,
        }),
        pass: counterexamples == 0,
        expected: json!({"counterexamples": 0}),
        computed: json!({"counterexamples": counterexamples}),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Quadratic-character behaviour of 16e - A^2 and e*A^2 - 4e^2 over F_p:
/// all four sign patterns occur for 13 <= p <= p_max and every nonsquare e;
/// both-or-neither at p = 3; square-count tallies within {0, 1, 2} at
/// p = 5, 7, 11.
pub fn verify_char_lemma(p_max: u64) -> Result<VerifyReport> {
    let start = Instant::now();
    if p_max > 1000 {
        return Err(Error::BudgetExceeded {
            what: "character lemma prime bound",
            needed: p_max,
            budget: 1000,
        });
    }

    let mut all_patterns_nonempty = true;
    let mut worst: Option<(u64, u64)> = None;
    for p in primes_between(13, p_max) {
        let chi = CharTable::new(p);
        for eps in chi.nonsquares() {
            let mut pattern = [0u64; 4];
            for a in 0..p {
                let (cf, cg) = char_pair(&chi, eps, a);
                if cf != 0 && cg != 0 {
                    let idx = match (cf, cg) {
                        (1, 1) => 0,
                        (1, -1) => 1,
                        (-1, 1) => 2,
                        _ => 3,
                    };
                    pattern[idx] += 1;
                }
            }
            if pattern.contains(&0) {
                all_patterns_nonempty = false;
                worst.get_or_insert((p, eps));
            }
        }
    }

    // p = 3: both values are squares or both are nonsquares, for every A.
    let mut p3_both_or_neither = true;
    let chi3 = CharTable::new(3);
    for eps in chi3.nonsquares() {
        for a in 0..3 {
            let (cf, cg) = char_pair(&chi3, eps, a);
            if cf != cg {
                p3_both_or_neither = false;
            }
        }
    }

    // p = 5, 7, 11: record which per-A square counts occur.
    let mut small = serde_json::Map::new();
    let mut small_ok = true;
    for p in [5u64, 7, 11] {
        let chi = CharTable::new(p);
        let mut occurring = BTreeSet::new();
        for eps in chi.nonsquares() {
            for a in 0..p {
                let (cf, cg) = char_pair(&chi, eps, a);
                let squares = (cf == 1) as u64 + (cg == 1) as u64;
                occurring.insert(squares);
            }
        }
        if occurring.iter().any(|&c| c > 2) {
            small_ok = false;
        }
        small.insert(p.to_string(), set_to_json(&occurring));
    }

    let pass = all_patterns_nonempty && p3_both_or_neither && small_ok;
    Ok(VerifyReport {
        suite: "char-lemma".to_string(),
        params: json!({"p_max": p_max}),
        pass,
        expected: json!({
            "sign_patterns_all_nonempty": true,
            "p3_both_or_neither": true,
            "square_counts_within": [0, 1, 2],
        }),
        computed: json!({
            "sign_patterns_all_nonempty": all_patterns_nonempty,
            "first_failing_pair": worst.map(|(p, e)| json!([p, e])),
            "p3_both_or_neither": p3_both_or_neither,
            "square_counts": Value::Object(small),
        }),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Quadratic character mod p via a precomputed square table.
struct CharTable {
    p: u64,
    square: Vec<bool>,
}

impl CharTable {
    fn new(p: u64) -> Self {
        let mut square = vec![false; p as usize];
        for y in 1..p {
            square[(y * y % p) as usize] = true;
        }
        CharTable { p, square }
    }

    fn chi(&self, x: u64) -> i8 {
        let r = x % self.p;
        if r == 0 {
            0
        } else if self.square[r as usize] {
            1
        } else {
            -1
        }
    }

    fn nonsquares(&self) -> Vec<u64> {
        (1..self.p).filter(|&x| self.chi(x) == -1).collect()
    }
}

/// The quadratic characters of f(A) = 16e - A^2 and g(A) = e A^2 - 4 e^2.
fn char_pair(chi: &CharTable, eps: u64, a: u64) -> (i8, i8) {
    let p = chi.p;
    let f = (16 % p * eps % p + p - a * a % p) % p;
    let g = (eps * (a * a % p) % p + p - 4 * eps % p * eps % p) % p;
    (chi.chi(f), chi.chi(g))
}

fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi)
        .filter(|&n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

/// The worked CM example: 8 points on X_0(88) over Q(sqrt(-7)) above each of
/// the two j-invariants with CM by the orders of conductor 1 and 2.
pub fn verify_cm_example(cfg: &ExecCfg) -> Result<VerifyReport> {
    let start = Instant::now();
    let level = Level::new(88)?;
    let h = borel(&level)?;
    let mut computed = Vec::new();
    for f in [1u64, 2] {
        let order = CMOrder::new(-7, f)?;
        let res = cm_rational_count(&order, &level, &h, Field::CMField, order.j_class(), cfg)?;
        computed.push(res.count);
    }
    Ok(VerifyReport {
        suite: "cm-example".to_string(),
        params: json!({"dK": -7, "f": [1, 2], "level": 88, "H": "borel", "field": "cm"}),
        pass: computed == [8, 8],
        expected: json!([8, 8]),
        computed: json!(computed),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Which batch of suites `verify --suite all` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fast,
    Full,
}

/// The full batch: every suite instance the tier covers, in a fixed order.
pub fn verify_all(tier: Tier, cfg: &ExecCfg) -> Result<Vec<VerifyReport>> {
    let mut reports = Vec::new();

    let borel_cases: &[(u64, u32)] = match tier {
        Tier::Fast => &[(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)],
        Tier::Full => &[
            (2, 1),
            (2, 2),
            (3, 1),
            (3, 2),
            (5, 1),
            (5, 2),
            (7, 1),
            (11, 1),
            (3, 3),
        ],
    };
    let cartan_cases: &[(u64, u32)] = match tier {
        Tier::Fast => &[(3, 1), (5, 1), (3, 2), (5, 2)],
        Tier::Full => &[(3, 1), (5, 1), (3, 2), (5, 2), (7, 1), (11, 1)],
    };
    let transition_cases: &[(u64, u32)] = match tier {
        Tier::Fast => &[(3, 1)],
        Tier::Full => &[(3, 1), (3, 2)],
    };
    // B0(25) and B0(27) lattices overflow the default ceiling; the full tier
    // runs with a raised one.
    let cfg = match tier {
        Tier::Fast => *cfg,
        Tier::Full => {
            let mut raised = *cfg;
            raised.budgets.subgroups = raised.budgets.subgroups.max(12_000);
            raised
        }
    };

    for &(p, k) in borel_cases {
        reports.push(verify_borel(p, k, &cfg)?);
    }
    for &(p, k) in cartan_cases {
        for family in [
            CartanFamily::Split,
            CartanFamily::SplitNormalizer,
            CartanFamily::Nonsplit,
            CartanFamily::NonsplitNormalizer,
        ] {
            reports.push(verify_cartan(family, p, k, &cfg)?);
        }
    }
    for &(p, k) in transition_cases {
        reports.push(verify_transitions(p, k, &cfg)?);
    }
    reports.push(verify_three_point(3, 2, ThreePointMode::Exhaustive, 0, &cfg)?);
    reports.push(verify_three_point(5, 2, ThreePointMode::Sampled, 100_000, &cfg)?);
    reports.push(verify_three_point(3, 3, ThreePointMode::Sampled, 100_000, &cfg)?);
    reports.push(verify_char_lemma(match tier {
        Tier::Fast => 47,
        Tier::Full => 97,
    })?);
    reports.push(verify_cm_example(&cfg)?);
    Ok(reports)
}

fn prime_power_level(p: u64, k: u32) -> Result<Level> {
    if k == 0 {
        return Err(Error::InvalidLevel { modulus: 1 });
    }
    let level = Level::new(p.pow(k))?;
    if level.prime_power() != Some((p, k)) {
        return Err(Error::CompositeLevel {
            modulus: level.modulus(),
        });
    }
    Ok(level)
}
