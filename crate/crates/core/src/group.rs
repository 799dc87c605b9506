//! Finite subgroups of GL2(Z/NZ): closure from generators, cosets and double
//! cosets, conjugation tests, full subgroup-lattice enumeration for small
//! groups, and level-reduction maps.
//!
//! Element sets are stored as sorted vectors of the canonical matrix codes,
//! so subgroup equality is canonical-set equality and membership is a binary
//! search.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::zmod::{Level, Mat2};

/// A subgroup of GL2(Z/NZ) with generators and its full element set.
#[derive(Debug, Clone)]
pub struct Subgroup {
    level: Level,
    generators: Vec<Mat2>,
    codes: Vec<u64>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.level.modulus() == other.level.modulus() && self.codes == other.codes
    }
}

impl Eq for Subgroup {}

/// A set of invertible matrices at one level, not necessarily closed under
/// products (double cosets HgA are the main instance).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet {
    level: Level,
    codes: Vec<u64>,
}

impl ElementSet {
    /// Build a set from matrices at one level; all must be invertible.
    pub fn new<I>(level: &Level, matrices: I) -> Result<ElementSet>
    where
        I: IntoIterator<Item = Mat2>,
    {
        let mut codes = Vec::new();
        for m in matrices {
            if m.modulus() != level.modulus() {
                return Err(Error::LevelMismatch {
                    left: level.modulus(),
                    right: m.modulus(),
                });
            }
            if !m.is_invertible() {
                return Err(Error::NotInvertible {
                    det: m.det().value(),
                    modulus: m.modulus(),
                });
            }
            codes.push(m.code());
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(ElementSet {
            level: level.clone(),
            codes,
        })
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn order(&self) -> u64 {
        self.codes.len() as u64
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn contains(&self, m: &Mat2) -> Result<bool> {
        if m.modulus() != self.level.modulus() {
            return Err(Error::LevelMismatch {
                left: self.level.modulus(),
                right: m.modulus(),
            });
        }
        Ok(self.contains_code(m.code()))
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat2> + '_ {
        let n = self.level.modulus();
        self.codes.iter().map(move |&c| Mat2::from_code(c, n))
    }
}

/// Breadth-first product closure of a generator list, starting from the
/// identity. Returns the sorted code set.
fn bfs_closure(level: &Level, gens: &[Mat2], cap: u64) -> Result<Vec<u64>> {
    let identity = Mat2::identity(level);
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(identity.code());
    let mut queue = vec![identity];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = x.mul(g)?;
            if seen.insert(y.code()) {
                if seen.len() as u64 > cap {
                    return Err(Error::BudgetExceeded {
                        what: "generator closure",
                        needed: seen.len() as u64,
                        budget: cap,
                    });
                }
                queue.push(y);
            }
        }
    }
    let mut codes: Vec<u64> = seen.into_iter().collect();
    codes.sort_unstable();
    Ok(codes)
}

impl Subgroup {
    /// The smallest subgroup containing the generators.
    pub fn closure(level: &Level, generators: &[Mat2]) -> Result<Subgroup> {
        Subgroup::closure_capped(level, generators, u64::MAX)
    }

    /// Closure that fails once more than `cap` elements are discovered.
    pub fn closure_capped(level: &Level, generators: &[Mat2], cap: u64) -> Result<Subgroup> {
        for g in generators {
            if g.modulus() != level.modulus() {
                return Err(Error::LevelMismatch {
                    left: level.modulus(),
                    right: g.modulus(),
                });
            }
            if !g.is_invertible() {
                return Err(Error::NotInvertible {
                    det: g.det().value(),
                    modulus: g.modulus(),
                });
            }
        }
        let codes = bfs_closure(level, generators, cap)?;
        let mut gens = generators.to_vec();
        dedupe_by_code(&mut gens);
        Ok(Subgroup {
            level: level.clone(),
            generators: gens,
            codes,
        })
    }

    /// Build a subgroup from an element set that is claimed to be closed.
    /// Closedness and invertibility are verified, and a short generator list
    /// is derived.
    pub fn from_elements<I>(level: &Level, elements: I) -> Result<Subgroup>
    where
        I: IntoIterator<Item = Mat2>,
    {
        let n = level.modulus();
        let mut codes = Vec::new();
        for m in elements {
            if m.modulus() != n {
                return Err(Error::LevelMismatch {
                    left: n,
                    right: m.modulus(),
                });
            }
            if !m.is_invertible() {
                return Err(Error::NotAGroup {
                    modulus: n,
                    reason: "contains a non-invertible matrix",
                });
            }
            codes.push(m.code());
        }
        codes.sort_unstable();
        codes.dedup();
        let identity = Mat2::identity(level).code();
        if codes.binary_search(&identity).is_err() {
            return Err(Error::NotAGroup {
                modulus: n,
                reason: "missing identity",
            });
        }
        let generators = derive_generators(level, &codes)?;
        Ok(Subgroup {
            level: level.clone(),
            generators,
            codes,
        })
    }

    /// Internal constructor for sets already proven closed (closure results,
    /// homomorphic images, conjugates).
    pub(crate) fn from_parts(level: &Level, generators: Vec<Mat2>, codes: Vec<u64>) -> Subgroup {
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(codes.binary_search(&Mat2::identity(level).code()).is_ok());
        Subgroup {
            level: level.clone(),
            generators,
            codes,
        }
    }

    pub fn trivial(level: &Level) -> Subgroup {
        Subgroup {
            level: level.clone(),
            generators: Vec::new(),
            codes: vec![Mat2::identity(level).code()],
        }
    }

    /// The cyclic subgroup generated by one invertible matrix.
    pub fn cyclic(m: &Mat2) -> Result<Subgroup> {
        if !m.is_invertible() {
            return Err(Error::NotInvertible {
                det: m.det().value(),
                modulus: m.modulus(),
            });
        }
        let level = Level::new(m.modulus())?;
        let identity = Mat2::identity(&level);
        let mut codes = vec![identity.code()];
        let mut power = *m;
        while power != identity {
            codes.push(power.code());
            power = power.mul(m)?;
        }
        codes.sort_unstable();
        Ok(Subgroup {
            level,
            generators: vec![*m],
            codes,
        })
    }

    /// The full group GL2(Z/NZ), materialized element by element.
    pub fn full_gl2(level: &Level, max_order: u64) -> Result<Subgroup> {
        let order = gl2_order(level);
        if order > max_order {
            return Err(Error::BudgetExceeded {
                what: "GL2 materialization",
                needed: order,
                budget: max_order,
            });
        }
        let n = level.modulus();
        let mats = (0..n.pow(4))
            .map(|c| Mat2::from_code(c, n))
            .filter(Mat2::is_invertible);
        Subgroup::from_elements(level, mats)
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn modulus(&self) -> u64 {
        self.level.modulus()
    }

    pub fn order(&self) -> u64 {
        self.codes.len() as u64
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat2> + '_ {
        let n = self.level.modulus();
        self.codes.iter().map(move |&c| Mat2::from_code(c, n))
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn contains(&self, m: &Mat2) -> Result<bool> {
        if m.modulus() != self.modulus() {
            return Err(Error::LevelMismatch {
                left: self.modulus(),
                right: m.modulus(),
            });
        }
        Ok(self.contains_code(m.code()))
    }

    /// Generator-wise containment: self is a subgroup of `other` iff every
    /// generator of self lies in `other`.
    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        if self.modulus() != other.modulus() {
            return Err(Error::LevelMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(self
            .generators
            .iter()
            .all(|g| other.contains_code(g.code())))
    }
}

fn dedupe_by_code(mats: &mut Vec<Mat2>) {
    let mut seen = HashSet::new();
    mats.retain(|m| seen.insert(m.code()));
}

/// Greedy generator derivation over a sorted code set. Every element the
/// partial closures discover must lie inside the set, which proves the set
/// closed; otherwise `NotAGroup` is returned.
fn derive_generators(level: &Level, codes: &[u64]) -> Result<Vec<Mat2>> {
    let n = level.modulus();
    let identity = Mat2::identity(level);
    let mut gens: Vec<Mat2> = Vec::new();
    let mut closed: HashSet<u64> = HashSet::new();
    closed.insert(identity.code());
    for &cand in codes {
        if closed.contains(&cand) {
            continue;
        }
        gens.push(Mat2::from_code(cand, n));
        closed.clear();
        closed.insert(identity.code());
        let mut queue = vec![identity];
        while let Some(x) = queue.pop() {
            for g in &gens {
                let y = x.mul(g)?;
                let code = y.code();
                if closed.insert(code) {
                    if codes.binary_search(&code).is_err() {
                        return Err(Error::NotAGroup {
                            modulus: n,
                            reason: "set is not closed under multiplication",
                        });
                    }
                    queue.push(y);
                }
            }
        }
    }
    Ok(gens)
}

/// #GL2(Z/NZ) = N^4 * prod over p | N of (1 - 1/p)(1 - 1/p^2).
pub fn gl2_order(level: &Level) -> u64 {
    level.factors().iter().fold(1u64, |acc, &(p, e)| {
        acc * p.pow(4 * (e - 1)) * (p * p - 1) * (p * p - p)
    })
}

/// True iff g r g^{-1} lies in `target` for every generator r of `r`.
/// Valid because the target is a group.
pub fn conjugates_into(g: &Mat2, r: &Subgroup, target: &Subgroup) -> Result<bool> {
    check_levels(&[g.modulus(), r.modulus(), target.modulus()])?;
    let gi = g.inv().map_err(|_| Error::NotInvertible {
        det: g.det().value(),
        modulus: g.modulus(),
    })?;
    for gen in r.generators() {
        let conj = g.mul(gen)?.mul(&gi)?;
        if !target.contains_code(conj.code()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff g r g^{-1} lies in `target` for every element r of `r`. The
/// target is an arbitrary element set, so generators do not suffice.
pub fn conjugates_into_set(g: &Mat2, r: &Subgroup, target: &ElementSet) -> Result<bool> {
    check_levels(&[g.modulus(), r.modulus(), target.level().modulus()])?;
    let gi = g.inv().map_err(|_| Error::NotInvertible {
        det: g.det().value(),
        modulus: g.modulus(),
    })?;
    for elem in r.elements() {
        let conj = g.mul(&elem)?.mul(&gi)?;
        if !target.contains_code(conj.code()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_levels(mods: &[u64]) -> Result<()> {
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

/// The literal set {h * g * a : h in H, a in A}.
pub fn set_product(h: &Subgroup, g: &Mat2, a: &Subgroup) -> Result<ElementSet> {
    check_levels(&[h.modulus(), g.modulus(), a.modulus()])?;
    let mut codes = Vec::with_capacity((h.order() * a.order()) as usize);
    for he in h.elements() {
        let hg = he.mul(g)?;
        for ae in a.elements() {
            codes.push(hg.mul(&ae)?.code());
        }
    }
    codes.sort_unstable();
    codes.dedup();
    Ok(ElementSet {
        level: h.level().clone(),
        codes,
    })
}

/// Partition of GL2(Z/NZ) into double cosets HgA, in order of the smallest
/// code not yet covered.
pub fn double_cosets(h: &Subgroup, a: &Subgroup, max_gl2: u64) -> Result<Vec<ElementSet>> {
    check_levels(&[h.modulus(), a.modulus()])?;
    let level = h.level().clone();
    let order = gl2_order(&level);
    if order > max_gl2 {
        return Err(Error::BudgetExceeded {
            what: "double-coset partition",
            needed: order,
            budget: max_gl2,
        });
    }
    let n = level.modulus();
    let total = n.pow(4);
    let mut assigned = vec![false; total as usize];
    let mut blocks = Vec::new();
    for code in 0..total {
        if assigned[code as usize] {
            continue;
        }
        let g = Mat2::from_code(code, n);
        if !g.is_invertible() {
            continue;
        }
        let block = set_product(h, &g, a)?;
        for &c in block.codes() {
            debug_assert!(!assigned[c as usize], "double cosets must be disjoint");
            assigned[c as usize] = true;
        }
        blocks.push(block);
    }
    Ok(blocks)
}

/// Every subgroup of G, exactly once, ordered by (order, element codes).
///
/// Grows subgroups by single-element extensions from the trivial group.
/// Candidates are restricted to elements of prime-power order, which is
/// complete because every subgroup is generated by such elements. Scanning
/// candidates in ascending code order, a join <S, x> is abandoned as soon
/// as it is seen to contain a smaller candidate outside S: the join will be
/// produced by that candidate instead, and the greedy minimal-extension
/// chain of any subgroup is never abandoned. A surviving candidate marks
/// its double coset S x S (its one-sided cosets for large bases) as
/// redundant, since <S, s1*x*s2> = <S, x>. All products stay inside G,
/// which makes membership an index into G's code table.
pub fn all_subgroups(g: &Subgroup, max_order: u64) -> Result<Vec<Subgroup>> {
    if g.order() > max_order {
        return Err(Error::BudgetExceeded {
            what: "subgroup enumeration",
            needed: g.order(),
            budget: max_order,
        });
    }
    let level = g.level().clone();
    let n = level.modulus();
    let gcodes = g.codes();
    let size = gcodes.len();
    let lookup = CodeIndex::new(n, gcodes);

    // Extension candidates: elements of prime-power order, ascending.
    let identity = Mat2::identity(&level);
    let mut candidates: Vec<usize> = Vec::new();
    let mut is_candidate = vec![false; size];
    for (j, m) in g.elements().enumerate() {
        if m == identity {
            continue;
        }
        let mut order = 1u64;
        let mut power = m;
        while power != identity {
            power = power.mul(&m)?;
            order += 1;
        }
        if is_prime_power(order) {
            candidates.push(j);
            is_candidate[j] = true;
        }
    }

    let mut found: Vec<Subgroup> = Vec::new();
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    insert_unique(&mut found, &mut seen, Subgroup::trivial(&level));

    let mut visited = vec![false; size];
    let mut touched: Vec<usize> = Vec::new();
    let mut covered = vec![false; size];
    let mut in_base = vec![false; size];

    let mut next = 0;
    while next < found.len() {
        // Snapshot the base; `found` grows while we extend it.
        let base_codes: Vec<u64> = found[next].codes().to_vec();
        let base_gens: Vec<Mat2> = found[next].generators().to_vec();
        let base_elems: Vec<Mat2> = base_codes.iter().map(|&c| Mat2::from_code(c, n)).collect();
        let mark_full_double_coset = base_codes.len() <= 64;

        covered.iter_mut().for_each(|b| *b = false);
        in_base.iter_mut().for_each(|b| *b = false);
        for &c in &base_codes {
            let i = lookup.index_of(c)?;
            covered[i] = true;
            in_base[i] = true;
        }

        for &j in &candidates {
            if covered[j] {
                continue;
            }
            let x = Mat2::from_code(gcodes[j], n);
            let mut gens = base_gens.clone();
            gens.push(x);
            dedupe_by_code(&mut gens);
            let abort = AbortBelow {
                code: gcodes[j],
                is_candidate: &is_candidate,
                in_base: &in_base,
            };
            let Some(codes) =
                bfs_join(&level, &gens, &lookup, Some(&abort), &mut visited, &mut touched)?
            else {
                continue;
            };
            let join = Subgroup::from_parts(&level, gens, codes);
            insert_unique(&mut found, &mut seen, join);

            if mark_full_double_coset {
                for s1 in &base_elems {
                    let s1x = s1.mul(&x)?;
                    for s2 in &base_elems {
                        covered[lookup.index_of(s1x.mul(s2)?.code())?] = true;
                    }
                }
            } else {
                for s in &base_elems {
                    covered[lookup.index_of(s.mul(&x)?.code())?] = true;
                    covered[lookup.index_of(x.mul(s)?.code())?] = true;
                }
            }
        }
        next += 1;
    }

    found.sort_by(|x, y| (x.order(), x.codes()).cmp(&(y.order(), y.codes())));
    Ok(found)
}

fn is_prime_power(mut n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Membership index over a sorted code table: a direct code -> index map
/// when the code space is small enough, binary search otherwise.
struct CodeIndex<'a> {
    codes: &'a [u64],
    table: Option<Vec<u32>>,
}

impl<'a> CodeIndex<'a> {
    const DIRECT_LIMIT: u64 = 1 << 22;

    fn new(n: u64, codes: &'a [u64]) -> Self {
        let space = n.pow(4);
        let table = if space <= Self::DIRECT_LIMIT {
            let mut t = vec![0u32; space as usize];
            for (i, &c) in codes.iter().enumerate() {
                t[c as usize] = i as u32 + 1;
            }
            Some(t)
        } else {
            None
        };
        CodeIndex { codes, table }
    }

    fn index_of(&self, code: u64) -> Result<usize> {
        let found = match &self.table {
            Some(t) => {
                let v = t[code as usize];
                if v == 0 {
                    None
                } else {
                    Some(v as usize - 1)
                }
            }
            None => self.codes.binary_search(&code).ok(),
        };
        found.ok_or_else(|| Error::Internal {
            what: "all_subgroups",
            detail: "a product escaped the ambient group".to_string(),
        })
    }
}

/// Abort a join once it contains a candidate element with a smaller code
/// than the one being adjoined (and outside the base subgroup).
struct AbortBelow<'a> {
    code: u64,
    is_candidate: &'a [bool],
    in_base: &'a [bool],
}

/// Closure restricted to the ambient group's code table, with a reusable
/// visited buffer. Returns sorted codes, or None when the abort rule fires.
fn bfs_join(
    level: &Level,
    gens: &[Mat2],
    lookup: &CodeIndex<'_>,
    abort: Option<&AbortBelow<'_>>,
    visited: &mut [bool],
    touched: &mut Vec<usize>,
) -> Result<Option<Vec<u64>>> {
    touched.clear();
    let identity = Mat2::identity(level);
    let id_idx = lookup.index_of(identity.code())?;
    visited[id_idx] = true;
    touched.push(id_idx);
    let mut out = vec![identity.code()];
    let mut queue = vec![identity];
    let mut aborted = false;
    'bfs: while let Some(x) = queue.pop() {
        for g in gens {
            let y = x.mul(g)?;
            let code = y.code();
            let idx = lookup.index_of(code)?;
            if !visited[idx] {
                if let Some(rule) = abort {
                    if rule.is_candidate[idx] && code < rule.code && !rule.in_base[idx] {
                        aborted = true;
                        break 'bfs;
                    }
                }
                visited[idx] = true;
                touched.push(idx);
                out.push(code);
                queue.push(y);
            }
        }
    }
    for &t in touched.iter() {
        visited[t] = false;
    }
    if aborted {
        return Ok(None);
    }
    out.sort_unstable();
    Ok(Some(out))
}

fn code_hash(codes: &[u64]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &c in codes {
        h ^= c;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn insert_unique(
    store: &mut Vec<Subgroup>,
    seen: &mut HashMap<u64, Vec<usize>>,
    sub: Subgroup,
) -> bool {
    let h = code_hash(sub.codes());
    let bucket = seen.entry(h).or_default();
    if bucket.iter().any(|&i| store[i].codes() == sub.codes()) {
        return false;
    }
    bucket.push(store.len());
    store.push(sub);
    true
}

/// Entrywise reduction of a subgroup to a level M dividing N.
pub fn reduce_level(h: &Subgroup, target: &Level) -> Result<Subgroup> {
    let m = target.modulus();
    if h.modulus() % m != 0 {
        return Err(Error::LevelNotDividing {
            sub: m,
            level: h.modulus(),
        });
    }
    let mut codes: Vec<u64> = h
        .elements()
        .map(|e| e.reduce(target).map(|r| r.code()))
        .collect::<Result<_>>()?;
    codes.sort_unstable();
    codes.dedup();
    let mut gens: Vec<Mat2> = h
        .generators()
        .iter()
        .map(|g| g.reduce(target))
        .collect::<Result<_>>()?;
    dedupe_by_code(&mut gens);
    Ok(Subgroup::from_parts(target, gens, codes))
}

/// The full preimage of a subgroup under the reduction map from a larger
/// level: every matrix at `target` whose reduction lies in `h`.
pub fn full_preimage(h: &Subgroup, target: &Level, max_order: u64) -> Result<Subgroup> {
    let t = target.modulus();
    let m = h.modulus();
    if t % m != 0 {
        return Err(Error::LevelNotDividing { sub: m, level: t });
    }
    let ratio = t / m;
    let order = h.order() * ratio.pow(4);
    if order > max_order {
        return Err(Error::BudgetExceeded {
            what: "subgroup preimage",
            needed: order,
            budget: max_order,
        });
    }
    let mut lifted = Vec::with_capacity(order as usize);
    for e in h.elements() {
        let [a, b, c, d] = e.entries();
        for ia in 0..ratio {
            for ib in 0..ratio {
                for ic in 0..ratio {
                    for id in 0..ratio {
                        lifted.push(Mat2::new(
                            [
                                (a + m * ia) as i64,
                                (b + m * ib) as i64,
                                (c + m * ic) as i64,
                                (d + m * id) as i64,
                            ],
                            target,
                        ));
                    }
                }
            }
        }
    }
    Subgroup::from_elements(target, lifted)
}

/// The conjugate subgroup g H g^{-1}.
pub fn conjugate_subgroup(g: &Mat2, h: &Subgroup) -> Result<Subgroup> {
    check_levels(&[g.modulus(), h.modulus()])?;
    let gi = g.inv()?;
    let mut codes: Vec<u64> = h
        .elements()
        .map(|e| Ok(g.mul(&e)?.mul(&gi)?.code()))
        .collect::<Result<_>>()?;
    codes.sort_unstable();
    let mut gens: Vec<Mat2> = h
        .generators()
        .iter()
        .map(|e| g.mul(e)?.mul(&gi))
        .collect::<Result<_>>()?;
    dedupe_by_code(&mut gens);
    Ok(Subgroup::from_parts(h.level(), gens, codes))
}
