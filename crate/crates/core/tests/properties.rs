//! Cross-module invariants exercised with a deterministic generator:
//! double-coset partitions under non-scalar automorphism images, the
//! projective-line oracle against the coset scan for single matrices, and
//! CRT round trips at composite levels.

use modcurve_core::count::{count_points_fast, proj_fix_oracle};
use modcurve_core::group::{double_cosets, gl2_order, ElementSet, Subgroup};
use modcurve_core::standard::{automorphism_image, borel, plus_minus, JClass};
use modcurve_core::zmod::{crt_join, crt_split, Level, Mat2};
use modcurve_core::ExecCfg;

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

fn lvl(n: u64) -> Level {
    Level::new(n).unwrap()
}

#[test]
fn double_cosets_partition_under_automorphism_images() {
    // Blocks HgA with A of order 4 and 6 still cover GL2 disjointly.
    for n in [5u64, 7, 11] {
        let level = lvl(n);
        let b = borel(&level).unwrap();
        for j in [JClass::SeventeenTwentyEight, JClass::Zero] {
            let a = automorphism_image(j, &level).unwrap();
            let blocks = double_cosets(&b, &a, 3_000_000).unwrap();
            let total: u64 = blocks.iter().map(ElementSet::order).sum();
            assert_eq!(total, gl2_order(&level), "N={n} j={j:?}");
            let mut all: Vec<u64> = blocks.iter().flat_map(|b| b.codes().to_vec()).collect();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len() as u64, gl2_order(&level));
        }
    }
}

#[test]
fn projective_oracle_matches_scan_for_random_cyclic_groups() {
    let cfg = ExecCfg::default();
    let mut rng = Rng(0x0b5e7e);
    for pk in [4u64, 5, 8, 9, 25, 27] {
        let level = lvl(pk);
        let b = borel(&level).unwrap();
        let mut done = 0;
        while done < 15 {
            let m = Mat2::from_code(rng.next() % pk.pow(4), pk);
            if !m.is_invertible() {
                continue;
            }
            done += 1;
            let r = Subgroup::cyclic(&m).unwrap();
            assert_eq!(
                count_points_fast(&b, &r, &cfg).unwrap().count,
                proj_fix_oracle(&r).unwrap().count,
                "p^k = {pk}"
            );
        }
    }
}

#[test]
fn crt_round_trip_sampled_up_to_sixty() {
    let mut rng = Rng(0xc47);
    for n in 2..=60u64 {
        for _ in 0..200 {
            let m = Mat2::from_code(rng.next() % n.pow(4), n);
            let joined = crt_join(&crt_split(&m).unwrap()).unwrap();
            assert_eq!(joined, m, "N = {n}");
        }
    }
}

#[test]
fn plus_minus_is_idempotent_and_doubles() {
    let mut rng = Rng(0x91c0);
    for _ in 0..40 {
        let n = 3 + rng.next() % 14;
        let level = lvl(n);
        let m = loop {
            let m = Mat2::from_code(rng.next() % n.pow(4), n);
            if m.is_invertible() {
                break m;
            }
        };
        let h = Subgroup::cyclic(&m).unwrap();
        let pm = plus_minus(&h);
        assert_eq!(plus_minus(&pm), pm);
        let has_minus = h.contains(&Mat2::neg_identity(&level)).unwrap();
        if has_minus {
            assert_eq!(pm.order(), h.order());
        } else {
            assert_eq!(pm.order(), 2 * h.order());
        }
    }
}
