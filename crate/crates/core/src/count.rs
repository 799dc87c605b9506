//! Counting rational points above a j-invariant: the double-coset count,
//! the fast single-coset scan, the projective fixed-point oracle, point
//! degrees, isogeny counts, achieved-value sets, the CM point count, and
//! level-transition tables.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;

use crate::config::ExecCfg;
use crate::error::{Error, Result};
use crate::group::{
    all_subgroups, double_cosets, full_preimage, gl2_order, reduce_level, Subgroup,
};
use crate::proj::fixed_proj_count;
use crate::standard::{
    automorphism_image, borel, cartan_params, cm_cartan, cm_normalizer, plus_minus, CMOrder,
    JClass,
};
use crate::zmod::{gcd, mod_inverse, Level, Mat2};

/// How a count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    /// Double cosets HgA with gR inside HgA, tested element by element.
    DoubleCoset,
    /// Scan of GL2 for g with g R g^{-1} inside +-H, divided by #(+-H).
    FastCoset,
    /// Fixed points of the generators on P^1(Z/p^k Z).
    ProjFixOracle,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::DoubleCoset => "double-coset",
            CountMethod::FastCoset => "fast-coset",
            CountMethod::ProjFixOracle => "proj-fix-oracle",
        }
    }
}

/// An exact count with method provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub count: u64,
    pub method: CountMethod,
    pub level: Level,
}

/// Which field the CM count is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rationals,
    CMField,
}

type RawMat = [u64; 4];

fn raw_mul(x: &RawMat, y: &RawMat, n: u64) -> RawMat {
    [
        (x[0] * y[0] + x[1] * y[2]) % n,
        (x[0] * y[1] + x[1] * y[3]) % n,
        (x[2] * y[0] + x[3] * y[2]) % n,
        (x[2] * y[1] + x[3] * y[3]) % n,
    ]
}

fn raw_code(m: &RawMat, n: u64) -> u64 {
    m[0] + n * (m[1] + n * (m[2] + n * m[3]))
}

/// Count invertible g at level n such that g r g^{-1} lies in `target` for
/// every r in `gens`. The code space [0, n^4) is partitioned across workers
/// along the outermost digit; the reduction is a plain sum, so the result is
/// identical for every worker count.
fn scan_conjugation(n: u64, gens: &[RawMat], target: &[u64], workers: usize) -> u64 {
    let is_unit: Vec<bool> = (0..n).map(|x| gcd(x, n) == 1).collect();
    let inverse: Vec<u64> = (0..n).map(|x| mod_inverse(x, n).unwrap_or(0)).collect();

    let count_d_range = |d_lo: u64, d_hi: u64| -> u64 {
        let mut count = 0u64;
        for d in d_lo..d_hi {
            for c in 0..n {
                for b in 0..n {
                    let bc = b * c % n;
                    for a in 0..n {
                        let det = (a * d % n + n - bc) % n;
                        if !is_unit[det as usize] {
                            continue;
                        }
                        let di = inverse[det as usize];
                        let g = [a, b, c, d];
                        let gi = [
                            di * d % n,
                            di * ((n - b) % n) % n,
                            di * ((n - c) % n) % n,
                            di * a % n,
                        ];
                        let ok = gens.iter().all(|r| {
                            let t = raw_mul(&raw_mul(&g, r, n), &gi, n);
                            target.binary_search(&raw_code(&t, n)).is_ok()
                        });
                        if ok {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    };

    let workers = workers.max(1).min(n as usize);
    if workers == 1 {
        return count_d_range(0, n);
    }
    let chunk = n.div_ceil(workers as u64);
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let lo = (w * chunk).min(n);
                let hi = ((w + 1) * chunk).min(n);
                let count_d_range = &count_d_range;
                s.spawn(move || count_d_range(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    })
}

fn check_same_level(mods: &[u64]) -> Result<()> {
    for w in mods.windows(2) {
        if w[0] != w[1] {
            return Err(Error::LevelMismatch {
                left: w[0],
                right: w[1],
            });
        }
    }
    Ok(())
}

/// Generator check that A is normalized by every element of R; sufficient
/// because conjugation by a fixed element is an automorphism.
fn assert_normalizes(r: &Subgroup, a: &Subgroup) -> Result<()> {
    for rg in r.generators() {
        let ri = rg.inv()?;
        for ae in a.elements() {
            let conj = rg.mul(&ae)?.mul(&ri)?;
            if !a.contains_code(conj.code()) {
                return Err(Error::NotNormalized);
            }
        }
    }
    Ok(())
}

/// The number of rational points above a j-invariant on X_H for Galois image
/// R and automorphism image A: double cosets HgA with gR inside HgA.
///
/// The membership test runs over every element of R, because HgA need not be
/// a group; and the predicate is evaluated at every g of every block, with
/// constancy on each block asserted.
pub fn count_points(
    h: &Subgroup,
    r: &Subgroup,
    a: &Subgroup,
    cfg: &ExecCfg,
) -> Result<CountResult> {
    check_same_level(&[h.modulus(), r.modulus(), a.modulus()])?;
    assert_normalizes(r, a)?;
    let level = h.level().clone();
    let n = level.modulus();
    let blocks = double_cosets(h, a, cfg.budgets.cosets)?;
    let r_elems: Vec<RawMat> = r.elements().map(|m| m.entries()).collect();
    let mut count = 0u64;
    for block in &blocks {
        let codes = block.codes();
        let mut verdict: Option<bool> = None;
        for g in block.elements() {
            let graw = g.entries();
            let ok = r_elems
                .iter()
                .all(|re| codes.binary_search(&raw_code(&raw_mul(&graw, re, n), n)).is_ok());
            match verdict {
                None => verdict = Some(ok),
                Some(v) => {
                    if v != ok {
                        return Err(Error::Internal {
                            what: "count_points",
                            detail: "rationality predicate not constant on a double coset"
                                .to_string(),
                        });
                    }
                }
            }
        }
        if verdict == Some(true) {
            count += 1;
        }
    }
    Ok(CountResult {
        count,
        method: CountMethod::DoubleCoset,
        level,
    })
}

/// The same count as `count_points(h, r, {+-I})`, computed by one scan over
/// GL2: #{g : g R g^{-1} in +-H} / #(+-H). Divisibility is asserted.
pub fn count_points_fast(h: &Subgroup, r: &Subgroup, cfg: &ExecCfg) -> Result<CountResult> {
    check_same_level(&[h.modulus(), r.modulus()])?;
    let level = h.level().clone();
    let order = gl2_order(&level);
    if order > cfg.budgets.scan {
        return Err(Error::BudgetExceeded {
            what: "GL2 scan",
            needed: order,
            budget: cfg.budgets.scan,
        });
    }
    let target = plus_minus(h);
    let gens: Vec<RawMat> = r.generators().iter().map(|m| m.entries()).collect();
    let total = scan_conjugation(level.modulus(), &gens, target.codes(), cfg.workers);
    if total % target.order() != 0 {
        return Err(Error::Internal {
            what: "count_points_fast",
            detail: format!(
                "{total} matrices conjugate R into +-H, not divisible by #(+-H) = {}",
                target.order()
            ),
        });
    }
    Ok(CountResult {
        count: total / target.order(),
        method: CountMethod::FastCoset,
        level,
    })
}

/// Independent oracle at prime-power level: the number of points of
/// P^1(Z/p^k Z) fixed by every generator of R. Equals
/// `count_points_fast(borel(p^k), R)`.
pub fn proj_fix_oracle(r: &Subgroup) -> Result<CountResult> {
    let level = r.level().clone();
    if level.prime_power().is_none() {
        return Err(Error::CompositeLevel {
            modulus: level.modulus(),
        });
    }
    let count = fixed_proj_count(&level, r.generators())?;
    Ok(CountResult {
        count,
        method: CountMethod::ProjFixOracle,
        level,
    })
}

/// The degree over K of the point with basis change g: the index
/// [R : R meet g^{-1}HgA], with the intersection computed against the
/// literal element set g^{-1}HgA and verified to be a group.
pub fn point_degree(h: &Subgroup, r: &Subgroup, a: &Subgroup, g: &Mat2) -> Result<u64> {
    check_same_level(&[h.modulus(), r.modulus(), a.modulus(), g.modulus()])?;
    assert_normalizes(r, a)?;
    let n = h.modulus();
    let gi = g.inv()?;
    let mut t_codes = Vec::with_capacity((h.order() * a.order()) as usize);
    for he in h.elements() {
        let ghg = gi.mul(&he)?.mul(g)?;
        for ae in a.elements() {
            t_codes.push(ghg.mul(&ae)?.code());
        }
    }
    t_codes.sort_unstable();
    t_codes.dedup();
    let stab: Vec<u64> = r
        .codes()
        .iter()
        .copied()
        .filter(|c| t_codes.binary_search(c).is_ok())
        .collect();
    for &x in &stab {
        let xm = Mat2::from_code(x, n);
        for &y in &stab {
            let prod = xm.mul(&Mat2::from_code(y, n))?;
            if stab.binary_search(&prod.code()).is_err() {
                return Err(Error::Internal {
                    what: "point_degree",
                    detail: "stabilizer R meet g^{-1}HgA is not closed".to_string(),
                });
            }
        }
    }
    if r.order() % stab.len() as u64 != 0 {
        return Err(Error::Internal {
            what: "point_degree",
            detail: "stabilizer order does not divide #R".to_string(),
        });
    }
    Ok(r.order() / stab.len() as u64)
}

/// The number of cyclic n-isogenies with Galois image R at level n: the
/// product over prime powers p^e || n of the Borel count of the reduction.
/// For prime-power n this is the direct count.
pub fn isogeny_count(r: &Subgroup, cfg: &ExecCfg) -> Result<u64> {
    let mut product = 1u64;
    for &(p, e) in r.level().factors() {
        let level = Level::new(p.pow(e))?;
        let b = borel(&level)?;
        let reduced = reduce_level(r, &level)?;
        product *= count_points_fast(&b, &reduced, cfg)?.count;
    }
    Ok(product)
}

/// The number of rational (or CM-field-rational) points above the j-invariant
/// of a CM order on X_H.
///
/// R is the Cartan normalizer over the rationals and the Cartan itself over
/// the CM field; A is the automorphism image the order dictates. When A is
/// {+-I} the single-coset scan applies, otherwise the double-coset count.
/// Above j = 0 and j = 1728 the extra automorphisms can identify distinct
/// isogenies into one point of X_H; what is counted here is always points.
pub fn cm_rational_count(
    order: &CMOrder,
    level: &Level,
    h: &Subgroup,
    field: Field,
    j: JClass,
    cfg: &ExecCfg,
) -> Result<CountResult> {
    if level.modulus() < 3 {
        return Err(Error::LevelTooSmall {
            modulus: level.modulus(),
            min: 3,
        });
    }
    check_same_level(&[h.modulus(), level.modulus()])?;
    let expected = order.j_class();
    if j != expected {
        return Err(Error::InconsistentJClass {
            expected: expected.name(),
            got: j.name(),
        });
    }
    let h_pm = plus_minus(h);
    let params = cartan_params(order, level);
    let r = match field {
        Field::CMField => cm_cartan(&params, level)?,
        Field::Rationals => cm_normalizer(&params, level)?,
    };
    match j {
        JClass::Generic => count_points_fast(&h_pm, &r, cfg),
        special => count_points(&h_pm, &r, &automorphism_image(special, level)?, cfg),
    }
}

/// Map `count_points_fast(h, -)` over a subgroup list, splitting the list
/// across workers. Each inner scan runs serially so the thread count stays
/// at the configured level.
fn map_counts(h: &Subgroup, subs: &[Subgroup], cfg: &ExecCfg) -> Result<Vec<u64>> {
    let serial = cfg.serial();
    let run = |r: &Subgroup| count_points_fast(h, r, &serial).map(|c| c.count);
    if cfg.workers <= 1 || subs.len() < 2 * cfg.workers {
        return subs.iter().map(run).collect();
    }
    let chunk = subs.len().div_ceil(cfg.workers);
    let chunked: Vec<Result<Vec<u64>>> = thread::scope(|s| {
        let handles: Vec<_> = subs
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(run).collect::<Result<Vec<u64>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut out = Vec::with_capacity(subs.len());
    for part in chunked {
        out.extend(part?);
    }
    Ok(out)
}

/// S(H): every value of the count as the Galois image ranges over all
/// subgroups. A nonzero value forces a conjugate of R inside H and the count
/// is conjugation-invariant, so enumerating subgroups of H and adjoining 0
/// (witnessed by the full GL2) is exhaustive.
pub fn achieved_set(h: &Subgroup, cfg: &ExecCfg) -> Result<BTreeSet<u64>> {
    let minus = Mat2::neg_identity(h.level());
    if !h.contains_code(minus.code()) {
        return Err(Error::MissingMinusI);
    }
    let subs = all_subgroups(h, cfg.budgets.subgroups)?;
    let counts = map_counts(h, &subs, cfg)?;
    let mut set: BTreeSet<u64> = counts.into_iter().collect();
    set.insert(0);
    Ok(set)
}

/// For each achievable count m at level p^k, the set of counts at level
/// p^{k+1} the same curve can have.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    pub p: u64,
    pub k: u32,
    pub rows: BTreeMap<u64, BTreeSet<u64>>,
}

/// Builds the transition table in two passes: the counts of every subgroup
/// of B0(p^{k+1}) against both levels, then the zero column via the full
/// preimage of one witness per row (the preimage contains every matrix
/// congruent to the identity mod p^k, so it fixes nothing at the top level).
pub fn transition_pairs(p: u64, k: u32, cfg: &ExecCfg) -> Result<TransitionTable> {
    let lo = Level::new(p.pow(k))?;
    if lo.prime_power() != Some((p, k)) || p == 2 {
        return Err(Error::OddPrimeRequired { p });
    }
    let hi = Level::new(p.pow(k + 1))?;
    let b_lo = borel(&lo)?;
    let b_hi = borel(&hi)?;

    let subs = all_subgroups(&b_hi, cfg.budgets.subgroups)?;
    let reduced: Vec<Subgroup> = subs
        .iter()
        .map(|r| reduce_level(r, &lo))
        .collect::<Result<_>>()?;
    let low_counts = map_counts(&b_lo, &reduced, cfg)?;
    let high_counts = map_counts(&b_hi, &subs, cfg)?;

    let mut rows: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let mut witnesses: BTreeMap<u64, Subgroup> = BTreeMap::new();
    for i in 0..subs.len() {
        rows.entry(low_counts[i]).or_default().insert(high_counts[i]);
        witnesses
            .entry(low_counts[i])
            .or_insert_with(|| reduced[i].clone());
    }

    // Subgroups of B0(p^{k+1}) always have a nonzero low count, so the m = 0
    // row needs its own witness.
    let gl2_lo = Subgroup::full_gl2(&lo, cfg.budgets.scan)?;
    let zero_m = count_points_fast(&b_lo, &gl2_lo, cfg)?.count;
    witnesses.entry(zero_m).or_insert(gl2_lo);

    for (m, witness) in &witnesses {
        let pre = full_preimage(witness, &hi, cfg.budgets.scan)?;
        let v = count_points_fast(&b_hi, &pre, cfg)?.count;
        rows.entry(*m).or_default().insert(v);
    }

    Ok(TransitionTable { p, k, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::conjugate_subgroup;
    use crate::standard::{nonsplit_cartan, split_cartan};
    use std::collections::HashMap;

    fn lvl(n: u64) -> Level {
        Level::new(n).unwrap()
    }

    fn cfg() -> ExecCfg {
        ExecCfg::default()
    }

    #[test]
    fn full_group_target_gives_one() {
        let level = lvl(3);
        let gl2 = Subgroup::full_gl2(&level, 1_000).unwrap();
        let r = nonsplit_cartan(3, 1).unwrap();
        let pm = plus_minus(&Subgroup::trivial(&level));
        let slow = count_points(&gl2, &r, &pm, &cfg()).unwrap();
        assert_eq!(slow.count, 1);
        let fast = count_points_fast(&gl2, &r, &cfg()).unwrap();
        assert_eq!(fast.count, 1);
    }

    #[test]
    fn borel_nine_with_witness_generator() {
        let level = lvl(9);
        let b = borel(&level).unwrap();
        let r = Subgroup::closure(&level, &[Mat2::new([1, 3, 0, 4], &level)]).unwrap();
        let pm = plus_minus(&Subgroup::trivial(&level));
        assert_eq!(count_points(&b, &r, &pm, &cfg()).unwrap().count, 6);
        assert_eq!(count_points_fast(&b, &r, &cfg()).unwrap().count, 6);
    }

    #[test]
    fn borel_five_scalar_image() {
        let level = lvl(5);
        let b = borel(&level).unwrap();
        let scalars = Subgroup::closure(&level, &[Mat2::scalar(2, &level)]).unwrap();
        assert_eq!(scalars.order(), 4);
        let pm = plus_minus(&Subgroup::trivial(&level));
        assert_eq!(count_points(&b, &scalars, &pm, &cfg()).unwrap().count, 6);
    }

    #[test]
    fn borel_five_full_image_gives_zero() {
        let level = lvl(5);
        let b = borel(&level).unwrap();
        let gl2 = Subgroup::full_gl2(&level, 1_000).unwrap();
        let pm = plus_minus(&Subgroup::trivial(&level));
        assert_eq!(count_points(&b, &gl2, &pm, &cfg()).unwrap().count, 0);
        assert_eq!(count_points_fast(&b, &gl2, &cfg()).unwrap().count, 0);
    }

    #[test]
    fn fast_agrees_with_double_coset_form() {
        // Deterministic sample of (H, R) pairs across levels.
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state
        };
        let mut pairs = 0;
        while pairs < 25 {
            let n = 2 + next() % 12;
            let level = lvl(n);
            let total = n.pow(4);
            let mut pick = || loop {
                let m = Mat2::from_code(next() % total, n);
                if m.is_invertible() {
                    return m;
                }
            };
            let h = Subgroup::closure(&level, &[pick(), pick()]).unwrap();
            let r = Subgroup::closure(&level, &[pick()]).unwrap();
            let pm = plus_minus(&Subgroup::trivial(&level));
            let slow = count_points(&h, &r, &pm, &cfg()).unwrap();
            let fast = count_points_fast(&h, &r, &cfg()).unwrap();
            assert_eq!(slow.count, fast.count, "N = {n}");
            pairs += 1;
        }
    }

    #[test]
    fn split_cartan_scalar_count() {
        let level = lvl(3);
        let cs = split_cartan(3, 1).unwrap();
        let scalars = Subgroup::closure(&level, &[Mat2::scalar(2, &level)]).unwrap();
        assert_eq!(count_points_fast(&cs, &scalars, &cfg()).unwrap().count, 12);
    }

    #[test]
    fn nonsplit_cartan_trivial_image() {
        let cns = nonsplit_cartan(3, 1).unwrap();
        let trivial = Subgroup::trivial(&lvl(3));
        assert_eq!(count_points_fast(&cns, &trivial, &cfg()).unwrap().count, 6);
    }

    #[test]
    fn oracle_examples() {
        let level = lvl(9);
        let trivial = Subgroup::trivial(&level);
        assert_eq!(proj_fix_oracle(&trivial).unwrap().count, 12);
        let r = Subgroup::closure(&level, &[Mat2::new([1, 3, 0, 4], &level)]).unwrap();
        assert_eq!(proj_fix_oracle(&r).unwrap().count, 6);
        let cns = nonsplit_cartan(5, 1).unwrap();
        assert_eq!(proj_fix_oracle(&cns).unwrap().count, 0);
        assert!(proj_fix_oracle(&Subgroup::trivial(&lvl(12))).is_err());
    }

    #[test]
    fn oracle_matches_fast_count_small_levels() {
        for n in [3u64, 4, 5] {
            let level = lvl(n);
            let b = borel(&level).unwrap();
            for r in all_subgroups(&b, 1_000).unwrap() {
                let via_cosets = count_points_fast(&b, &r, &cfg()).unwrap().count;
                let via_oracle = proj_fix_oracle(&r).unwrap().count;
                assert_eq!(via_cosets, via_oracle, "N = {n}");
            }
        }
    }

    #[test]
    fn degree_of_stabilized_point_is_one() {
        let level = lvl(7);
        let b = borel(&level).unwrap();
        let r = Subgroup::closure(&level, &[Mat2::new([1, 1, 0, 1], &level)]).unwrap();
        let pm = plus_minus(&Subgroup::trivial(&level));
        assert_eq!(point_degree(&b, &r, &pm, &Mat2::identity(&level)).unwrap(), 1);
    }

    #[test]
    fn degrees_partition_double_cosets() {
        let level = lvl(7);
        let b = borel(&level).unwrap();
        let r = nonsplit_cartan(7, 1).unwrap();
        let pm = plus_minus(&Subgroup::trivial(&level));
        assert_eq!(count_points_fast(&b, &r, &cfg()).unwrap().count, 0);
        let blocks = double_cosets(&b, &pm, 1_000_000).unwrap();
        assert_eq!(blocks.len(), 8);

        let mut block_of: HashMap<u64, usize> = HashMap::new();
        for (i, block) in blocks.iter().enumerate() {
            for &c in block.codes() {
                block_of.insert(c, i);
            }
        }
        // The orbit of HgA under HgA -> HgrA has size equal to the degree.
        let mut seen = vec![false; blocks.len()];
        let mut degree_sum = 0;
        for (i, block) in blocks.iter().enumerate() {
            if seen[i] {
                continue;
            }
            let g = block.elements().next().unwrap();
            let mut orbit = BTreeSet::new();
            for re in r.elements() {
                orbit.insert(block_of[&g.mul(&re).unwrap().code()]);
            }
            for &j in &orbit {
                seen[j] = true;
            }
            let degree = point_degree(&b, &r, &pm, &g).unwrap();
            assert!(degree >= 2);
            assert_eq!(orbit.len() as u64, degree);
            degree_sum += orbit.len();
        }
        assert_eq!(degree_sum, blocks.len());
    }

    #[test]
    fn isogeny_count_examples() {
        let level5 = lvl(5);
        let scalars = Subgroup::closure(&level5, &[Mat2::scalar(2, &level5)]).unwrap();
        assert_eq!(isogeny_count(&scalars, &cfg()).unwrap(), 6);

        let gl2_mod_2 = Subgroup::full_gl2(&lvl(2), 100).unwrap();
        assert_eq!(isogeny_count(&gl2_mod_2, &cfg()).unwrap(), 0);
    }

    #[test]
    fn isogeny_count_crt_witness_at_twelve() {
        // Reductions achieving 6 mod 4 (scalars) and 1 mod 3 (full Borel)
        // give 6 * 1 = 6 at level 12, matching the direct count.
        let level12 = lvl(12);
        let lvl4 = lvl(4);
        let lvl3 = lvl(3);
        let scalars4 = plus_minus(&Subgroup::trivial(&lvl4));
        let b3 = borel(&lvl3).unwrap();
        assert_eq!(
            count_points_fast(&borel(&lvl4).unwrap(), &scalars4, &cfg()).unwrap().count,
            6
        );
        assert_eq!(count_points_fast(&b3, &b3, &cfg()).unwrap().count, 1);
        // Join generators across the two levels so the reductions come out
        // to exactly those witnesses.
        let mut gens = vec![crate::zmod::crt_join(&[
            Mat2::neg_identity(&lvl4),
            Mat2::neg_identity(&lvl3),
        ])
        .unwrap()];
        for g3 in b3.generators() {
            gens.push(crate::zmod::crt_join(&[Mat2::identity(&lvl4), *g3]).unwrap());
        }
        let r12 = Subgroup::closure(&level12, &gens).unwrap();
        assert_eq!(reduce_level(&r12, &lvl4).unwrap(), scalars4);
        assert_eq!(reduce_level(&r12, &lvl3).unwrap(), b3);
        assert_eq!(isogeny_count(&r12, &cfg()).unwrap(), 6);
        // Direct count at level 12 agrees with the product of the factors.
        let b12 = borel(&level12).unwrap();
        assert_eq!(count_points_fast(&b12, &r12, &cfg()).unwrap().count, 6);
    }

    #[test]
    fn cm_count_with_full_group_target() {
        let level = lvl(3);
        let gl2 = Subgroup::full_gl2(&level, 1_000).unwrap();
        let order = CMOrder::new(-7, 1).unwrap();
        let res = cm_rational_count(
            &order,
            &level,
            &gl2,
            Field::Rationals,
            JClass::Generic,
            &cfg(),
        )
        .unwrap();
        assert_eq!(res.count, 1);
    }

    #[test]
    fn cm_count_rejects_small_levels() {
        let level = lvl(2);
        let b = borel(&level).unwrap();
        let order = CMOrder::new(-7, 1).unwrap();
        assert_eq!(
            cm_rational_count(&order, &level, &b, Field::Rationals, JClass::Generic, &cfg()),
            Err(Error::LevelTooSmall { modulus: 2, min: 3 })
        );
    }

    #[test]
    fn cm_count_rejects_wrong_j_class() {
        let level = lvl(5);
        let b = borel(&level).unwrap();
        let order = CMOrder::new(-3, 1).unwrap();
        assert!(matches!(
            cm_rational_count(&order, &level, &b, Field::Rationals, JClass::Generic, &cfg()),
            Err(Error::InconsistentJClass { .. })
        ));
    }

    /// Independent route to the same number: the literal sum over all of GL2
    /// of 1/#(HgA) for the g with gR inside HgA, accumulated as an exact
    /// fraction. Lives only in test code.
    fn sum_formula_count(h: &Subgroup, r: &Subgroup, a: &Subgroup) -> u64 {
        let n = h.modulus();
        let r_elems: Vec<Mat2> = r.elements().collect();
        let (mut num, mut den) = (0u128, 1u128);
        for code in 0..n.pow(4) {
            let g = Mat2::from_code(code, n);
            if !g.is_invertible() {
                continue;
            }
            let block = crate::group::set_product(h, &g, a).unwrap();
            let holds = r_elems
                .iter()
                .all(|re| block.contains(&g.mul(re).unwrap()).unwrap());
            if holds {
                // num/den += 1/block.order()
                let b = block.order() as u128;
                num = num * b + den;
                den *= b;
                let common = gcd128(num, den);
                num /= common;
                den /= common;
            }
        }
        assert_eq!(den, 1, "the sum of reciprocals must be an integer");
        num as u64
    }

    fn gcd128(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn cm_count_special_j_agrees_with_literal_sum() {
        // j = 1728 and j = 0 use the double-coset path; cross-check it
        // against the sum-over-g formulation at small levels.
        for (dk, j, n) in [
            (-4i64, JClass::SeventeenTwentyEight, 5u64),
            (-4, JClass::SeventeenTwentyEight, 7),
            (-3, JClass::Zero, 5),
            (-3, JClass::Zero, 7),
        ] {
            let level = lvl(n);
            let b = borel(&level).unwrap();
            let order = CMOrder::new(dk, 1).unwrap();
            let via_cosets =
                cm_rational_count(&order, &level, &b, Field::Rationals, j, &cfg()).unwrap();
            assert_eq!(via_cosets.method, CountMethod::DoubleCoset);
            let params = cartan_params(&order, &level);
            let r = cm_normalizer(&params, &level).unwrap();
            let a = automorphism_image(j, &level).unwrap();
            assert_eq!(
                via_cosets.count,
                sum_formula_count(&b, &r, &a),
                "dk={dk} N={n}"
            );
        }
    }

    #[test]
    fn achieved_set_examples() {
        let b2 = borel(&lvl(2)).unwrap();
        let s = achieved_set(&b2, &cfg()).unwrap();
        assert_eq!(s, BTreeSet::from([0, 1, 3]));

        let cs = split_cartan(3, 1).unwrap();
        assert_eq!(achieved_set(&cs, &cfg()).unwrap(), BTreeSet::from([0, 2, 12]));
    }

    #[test]
    fn achieved_set_requires_minus_identity() {
        let level = lvl(5);
        let u = Subgroup::closure(&level, &[Mat2::new([1, 1, 0, 1], &level)]).unwrap();
        assert_eq!(achieved_set(&u, &cfg()), Err(Error::MissingMinusI));
    }

    #[test]
    fn transition_table_at_three_one() {
        let table = transition_pairs(3, 1, &cfg()).unwrap();
        let expect: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::from([
            (4, BTreeSet::from([0, 3, 6, 12])),
            (2, BTreeSet::from([0, 1, 2])),
            (1, BTreeSet::from([0, 1, 3])),
            (0, BTreeSet::from([0])),
        ]);
        assert_eq!(table.rows, expect);
    }

    #[test]
    fn transitions_reject_even_prime() {
        assert!(transition_pairs(2, 1, &cfg()).is_err());
        assert!(transition_pairs(9, 1, &cfg()).is_err());
    }

    #[test]
    fn plus_minus_invariance_sampled() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 20 {
            let n = 2 + next() % 12;
            let level = lvl(n);
            let total = n.pow(4);
            let mut pick = || loop {
                let m = Mat2::from_code(next() % total, n);
                if m.is_invertible() {
                    return m;
                }
            };
            let h = Subgroup::closure(&level, &[pick()]).unwrap();
            let r = Subgroup::closure(&level, &[pick()]).unwrap();
            let lhs = count_points_fast(&h, &r, &cfg()).unwrap().count;
            let rhs = count_points_fast(&plus_minus(&h), &r, &cfg()).unwrap().count;
            assert_eq!(lhs, rhs, "N = {n}");
            done += 1;
        }
    }

    #[test]
    fn conjugation_invariance_sampled() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in [5u64, 9, 12] {
            let level = lvl(n);
            let total = n.pow(4);
            let mut pick = || loop {
                let m = Mat2::from_code(next() % total, n);
                if m.is_invertible() {
                    return m;
                }
            };
            let h = borel(&level).unwrap();
            let r = Subgroup::closure(&level, &[pick()]).unwrap();
            let base = count_points_fast(&h, &r, &cfg()).unwrap().count;
            for _ in 0..10 {
                let g = pick();
                let conj = conjugate_subgroup(&g, &r).unwrap();
                assert_eq!(count_points_fast(&h, &conj, &cfg()).unwrap().count, base);
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let level = lvl(9);
        let b = borel(&level).unwrap();
        let r = Subgroup::closure(&level, &[Mat2::new([1, 3, 0, 4], &level)]).unwrap();
        let mut counts = Vec::new();
        for workers in [1usize, 2, 3, 7] {
            let cfg = ExecCfg {
                workers,
                ..ExecCfg::default()
            };
            counts.push(count_points_fast(&b, &r, &cfg).unwrap().count);
        }
        assert!(counts.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn budget_is_enforced_on_scans() {
        let level = lvl(9);
        let b = borel(&level).unwrap();
        let cfg = ExecCfg {
            workers: 1,
            budgets: crate::config::Budgets {
                scan: 100,
                ..Default::default()
            },
        };
        assert!(matches!(
            count_points_fast(&b, &Subgroup::trivial(&level), &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
