//! Closed-form expected values for the verification suites, evaluated by
//! direct substitution into the displayed formulas, congruence branches and
//! all. Deliberately kept apart from the counting engine: every suite
//! compares engine output against these, never the engine against itself.

use std::collections::{BTreeMap, BTreeSet};

/// Achievable isogeny counts for the Borel group at level p^k.
pub fn borel_set(p: u64, k: u32) -> BTreeSet<u64> {
    let mut s = BTreeSet::from([0]);
    if p == 2 {
        if k == 1 {
            return BTreeSet::from([0, 1, 3]);
        }
        for m in 1..=k {
            s.insert(1 << m);
        }
        s.insert((1 << k) + (1 << (k - 1)));
    } else {
        for j in 0..k {
            s.insert(p.pow(j));
            s.insert(2 * p.pow(j));
        }
        s.insert(p.pow(k) + p.pow(k - 1));
    }
    s
}

/// The four Cartan-type families the suites verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartanFamily {
    Split,
    SplitNormalizer,
    Nonsplit,
    NonsplitNormalizer,
}

impl CartanFamily {
    pub fn parse(token: &str) -> Option<CartanFamily> {
        match token {
            "s" => Some(CartanFamily::Split),
            "s+" => Some(CartanFamily::SplitNormalizer),
            "ns" => Some(CartanFamily::Nonsplit),
            "ns+" => Some(CartanFamily::NonsplitNormalizer),
            _ => None,
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            CartanFamily::Split => "s",
            CartanFamily::SplitNormalizer => "s+",
            CartanFamily::Nonsplit => "ns",
            CartanFamily::NonsplitNormalizer => "ns+",
        }
    }
}

/// Achievable point counts for the chosen Cartan family at level p^k
/// (odd p).
pub fn cartan_set(family: CartanFamily, p: u64, k: u32) -> BTreeSet<u64> {
    match family {
        CartanFamily::Split => split_cartan_set(p, k),
        CartanFamily::SplitNormalizer => split_normalizer_set(p, k),
        CartanFamily::Nonsplit => nonsplit_cartan_set(p, k),
        CartanFamily::NonsplitNormalizer => nonsplit_normalizer_set(p, k),
    }
}

fn split_cartan_set(p: u64, k: u32) -> BTreeSet<u64> {
    let mut s = BTreeSet::from([0, p.pow(2 * k) + p.pow(2 * k - 1)]);
    for j in 0..k {
        s.insert(2 * p.pow(2 * j));
    }
    s
}

fn split_normalizer_set(p: u64, k: u32) -> BTreeSet<u64> {
    let mut s = BTreeSet::from([0]);
    // A_k(p)
    for j in 0..k {
        s.insert(p.pow(2 * j));
    }
    s.insert(half(p.pow(2 * k) + p.pow(2 * k - 1)));
    // B_k(p)
    for j in 0..k {
        s.insert(p.pow(j));
    }
    // C_k(p)
    s.insert(half(p.pow(k) + p.pow(k - 1)));
    s.insert(half(p.pow(k) - p.pow(k - 1)) + 1);
    // D_k(p)
    s.insert(if p % 4 == 3 { 2 } else { 3 });
    s
}

fn nonsplit_cartan_set(p: u64, k: u32) -> BTreeSet<u64> {
    let mut s = BTreeSet::from([0, p.pow(2 * k) - p.pow(2 * k - 1)]);
    for j in 0..k {
        s.insert(2 * p.pow(2 * j));
    }
    s
}

fn nonsplit_normalizer_set(p: u64, k: u32) -> BTreeSet<u64> {
    let mut s = BTreeSet::from([0]);
    // A'_k(p)
    s.insert(half(p.pow(2 * k) - p.pow(2 * k - 1)));
    for j in 0..k {
        s.insert(p.pow(2 * j));
    }
    // B'_k(p)
    s.insert(half(p.pow(k) + p.pow(k - 1)) + 1);
    // C'_k(p)
    s.insert(if p % 4 == 1 { 2 } else { 3 });
    // D'_k(p)
    s.insert(1);
    s.insert(half(p.pow(k) + p.pow(k - 1)));
    s.insert(half(p.pow(k) - p.pow(k - 1)));
    // E'_k(p)
    for j in 1..k {
        s.insert(p.pow(j));
    }
    // F'_k(p)
    if p % 8 == 3 || p % 8 == 5 {
        s.insert(p.pow(k / 2) + 1);
        let mut t = 1;
        while 2 * t < k {
            s.insert(2 * p.pow(t) + 1);
            t += 1;
        }
    }
    // G'_k(p)
    s.insert(1);
    s.insert(3);
    if p > 3 {
        s.insert(2);
    }
    // H'_k(p)
    s.insert(1);
    if p % 4 == 1 {
        s.insert(2);
    }
    s
}

fn half(x: u64) -> u64 {
    assert_eq!(x % 2, 0, "formula value must be even before halving");
    x / 2
}

/// The level p^k -> p^{k+1} transition rows: for each achievable count m at
/// level p^k, the set of achievable counts at level p^{k+1} (odd p).
pub fn transition_rows(p: u64, k: u32) -> BTreeMap<u64, BTreeSet<u64>> {
    let mut rows = BTreeMap::new();
    for m in borel_set(p, k) {
        let row = if m == 0 {
            BTreeSet::from([0])
        } else if m == p.pow(k) + p.pow(k - 1) {
            BTreeSet::from([0, p.pow(k), 2 * p.pow(k), p.pow(k + 1) + p.pow(k)])
        } else if let Some(j) = exact_power(p, m) {
            // m = p^j
            if 2 * j < k - 1 {
                BTreeSet::from([0, p.pow(j)])
            } else if 2 * j == k - 1 {
                BTreeSet::from([0, p.pow(j), p.pow(j + 1)])
            } else {
                BTreeSet::from([0, p.pow(j), p.pow(j + 1), 2 * p.pow(j)])
            }
        } else if m % 2 == 0 && exact_power(p, m / 2).is_some() {
            let j = exact_power(p, m / 2).unwrap();
            BTreeSet::from([0, p.pow(j), 2 * p.pow(j)])
        } else {
            unreachable!("level-{} count {m} does not match any formula row", p.pow(k))
        };
        rows.insert(m, row);
    }
    rows
}

fn exact_power(p: u64, mut m: u64) -> Option<u32> {
    if m == 0 {
        return None;
    }
    let mut j = 0;
    while m % p == 0 {
        m /= p;
        j += 1;
    }
    (m == 1).then_some(j)
}
