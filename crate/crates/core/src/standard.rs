//! Constructors for the named subgroup families: the Borel group of upper
//! triangular matrices, split and nonsplit Cartan subgroups with their
//! normalizers, the Cartan groups attached to imaginary quadratic orders,
//! automorphism images for the special j-invariants, and the <H, -I>
//! augmentation.

use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::zmod::{gcd, Level, Mat2, Residue};

/// All invertible upper-triangular matrices mod N; order N * phi(N)^2.
pub fn borel(level: &Level) -> Result<Subgroup> {
    let n = level.modulus();
    if n < 2 {
        return Err(Error::LevelTooSmall { modulus: n, min: 2 });
    }
    let units: Vec<u64> = (0..n).filter(|&u| gcd(u, n) == 1).collect();
    let mut mats = Vec::with_capacity((n * level.euler_phi().pow(2)) as usize);
    for &a in &units {
        for b in 0..n {
            for &c in &units {
                mats.push(Mat2::new([a as i64, b as i64, 0, c as i64], level));
            }
        }
    }
    Subgroup::from_elements(level, mats)
}

fn odd_prime_power_level(p: u64, k: u32) -> Result<Level> {
    if p == 2 || k == 0 {
        return Err(Error::OddPrimeRequired { p });
    }
    let level = Level::new(p.pow(k))?;
    match level.prime_power() {
        Some((q, _)) if q == p => Ok(level),
        _ => Err(Error::OddPrimeRequired { p }),
    }
}

/// The diagonal subgroup of GL2(Z/p^k Z); order phi(p^k)^2. Odd p only.
pub fn split_cartan(p: u64, k: u32) -> Result<Subgroup> {
    let level = odd_prime_power_level(p, k)?;
    let n = level.modulus();
    let units: Vec<u64> = (0..n).filter(|&u| gcd(u, n) == 1).collect();
    let mats = units.iter().flat_map(|&a| {
        let level = level.clone();
        units
            .iter()
            .map(move |&b| Mat2::new([a as i64, 0, 0, b as i64], &level))
            .collect::<Vec<_>>()
    });
    Subgroup::from_elements(&level, mats)
}

/// The normalizer of the split Cartan, generated by the swap matrix over it.
pub fn split_normalizer(p: u64, k: u32) -> Result<Subgroup> {
    let cartan = split_cartan(p, k)?;
    let level = cartan.level().clone();
    let swap = Mat2::new([0, 1, 1, 0], &level);
    extend_by_involution(&cartan, &swap)
}

/// The smallest positive quadratic nonresidue mod p, lifted to Z/p^k Z.
/// A unit is a square mod p^k iff it is a square mod p, so the lift stays a
/// nonsquare unit.
pub fn nonresidue(p: u64, k: u32) -> Result<Residue> {
    let level = odd_prime_power_level(p, k)?;
    let squares: Vec<bool> = {
        let mut table = vec![false; p as usize];
        for x in 1..p {
            table[((x * x) % p) as usize] = true;
        }
        table
    };
    let eps = (2..p)
        .find(|&x| !squares[x as usize])
        .expect("every odd prime has a nonresidue");
    Ok(Residue::new(eps as i64, &level))
}

/// The nonsplit Cartan: matrices [[a, eps*b], [b, a]] with a^2 - eps*b^2 a
/// unit; order p^{2(k-1)}(p^2 - 1). Odd p only.
pub fn nonsplit_cartan(p: u64, k: u32) -> Result<Subgroup> {
    let level = odd_prime_power_level(p, k)?;
    let n = level.modulus();
    let eps = nonresidue(p, k)?.value();
    let mut mats = Vec::new();
    for a in 0..n {
        for b in 0..n {
            // a^2 - eps*b^2 mod n
            let norm = (a * a % n + n - eps * b % n * b % n) % n;
            if gcd(norm, n) == 1 {
                mats.push(Mat2::new(
                    [a as i64, ((eps * b) % n) as i64, b as i64, a as i64],
                    &level,
                ));
            }
        }
    }
    Subgroup::from_elements(&level, mats)
}

/// The normalizer of the nonsplit Cartan, generated by [[1,0],[0,-1]] over it.
pub fn nonsplit_normalizer(p: u64, k: u32) -> Result<Subgroup> {
    let cartan = nonsplit_cartan(p, k)?;
    let level = cartan.level().clone();
    let flip = Mat2::new([1, 0, 0, -1], &level);
    extend_by_involution(&cartan, &flip)
}

/// Extend a group by an involution that normalizes it: the union H u tH.
/// `from_elements` re-verifies closedness, so a non-normalizing t is caught.
fn extend_by_involution(h: &Subgroup, t: &Mat2) -> Result<Subgroup> {
    let mut mats: Vec<Mat2> = h.elements().collect();
    for e in h.elements() {
        mats.push(t.mul(&e)?);
    }
    Subgroup::from_elements(h.level(), mats)
}

/// An imaginary quadratic order: fundamental discriminant and conductor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CMOrder {
    disc: i64,
    conductor: u64,
}

impl CMOrder {
    pub fn new(disc: i64, conductor: u64) -> Result<Self> {
        let reject = |reason| Error::InvalidCmOrder {
            disc,
            conductor,
            reason,
        };
        if disc >= 0 {
            return Err(reject("discriminant must be negative"));
        }
        if conductor == 0 {
            return Err(reject("conductor must be positive"));
        }
        match disc.rem_euclid(4) {
            1 => {
                if !squarefree(disc.unsigned_abs()) {
                    return Err(reject("discriminant = 1 mod 4 must be squarefree"));
                }
            }
            0 => {
                let quarter = disc / 4;
                let r = quarter.rem_euclid(4);
                if !(r == 2 || r == 3) || !squarefree(quarter.unsigned_abs()) {
                    return Err(reject("discriminant/4 must be squarefree and 2 or 3 mod 4"));
                }
            }
            _ => return Err(reject("discriminant must be 0 or 1 mod 4")),
        }
        Ok(CMOrder { disc, conductor })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// The j-invariant class the order corresponds to: conductor 1 over
    /// Q(sqrt(-3)) gives j = 0, conductor 1 over Q(i) gives j = 1728, and
    /// every other order has a generic j-invariant.
    pub fn j_class(&self) -> JClass {
        match (self.disc, self.conductor) {
            (-3, 1) => JClass::Zero,
            (-4, 1) => JClass::SeventeenTwentyEight,
            _ => JClass::Generic,
        }
    }
}

fn squarefree(n: u64) -> bool {
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Parameters (delta, phi) of the Cartan group attached to a CM order,
/// reduced at the working level.
///
/// disc * f^2 = 0 mod 4 gives delta = disc*f^2/4 and phi = 0;
/// disc * f^2 = 1 mod 4 gives delta = (disc-1)*f^2/4 and phi = f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CartanParams {
    delta: Residue,
    phi: Residue,
}

impl CartanParams {
    pub fn delta(&self) -> Residue {
        self.delta
    }

    pub fn phi(&self) -> Residue {
        self.phi
    }

    pub fn modulus(&self) -> u64 {
        self.delta.modulus()
    }
}

pub fn cartan_params(order: &CMOrder, level: &Level) -> CartanParams {
    let f = order.conductor() as i64;
    let df2 = order.disc() * f * f;
    let (delta, phi) = if df2.rem_euclid(4) == 0 {
        (df2 / 4, 0)
    } else {
        ((order.disc() - 1) / 4 * f * f, f)
    };
    CartanParams {
        delta: Residue::new(delta, level),
        phi: Residue::new(phi, level),
    }
}

/// The Cartan group {[[a + b*phi, b], [delta*b, a]] : a^2 + a*b*phi -
/// delta*b^2 a unit}, isomorphic to the unit group of the order mod N.
pub fn cm_cartan(params: &CartanParams, level: &Level) -> Result<Subgroup> {
    let n = level.modulus();
    if n < 3 {
        return Err(Error::LevelTooSmall { modulus: n, min: 3 });
    }
    if params.modulus() != n {
        return Err(Error::LevelMismatch {
            left: params.modulus(),
            right: n,
        });
    }
    let delta = params.delta.value();
    let phi = params.phi.value();
    let mut mats = Vec::new();
    for a in 0..n {
        for b in 0..n {
            // a^2 + a*b*phi - delta*b^2 mod n
            let pos = (a * a + a * b % n * phi) % n;
            let neg = delta * b % n * b % n;
            let norm = (pos + n - neg) % n;
            if gcd(norm, n) == 1 {
                mats.push(Mat2::new(
                    [
                        ((a + b * phi) % n) as i64,
                        b as i64,
                        (delta * b % n) as i64,
                        a as i64,
                    ],
                    level,
                ));
            }
        }
    }
    Subgroup::from_elements(level, mats)
}

/// The normalizer <C, c_phi> with c_phi = [[-1, 0], [phi, 1]].
pub fn cm_normalizer(params: &CartanParams, level: &Level) -> Result<Subgroup> {
    let cartan = cm_cartan(params, level)?;
    let c_phi = Mat2::new([-1, 0, params.phi.value() as i64, 1], level);
    extend_by_involution(&cartan, &c_phi)
}

/// Which automorphism image applies above a j-invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JClass {
    Generic,
    Zero,
    SeventeenTwentyEight,
}

impl JClass {
    pub fn name(&self) -> &'static str {
        match self {
            JClass::Generic => "generic",
            JClass::Zero => "0",
            JClass::SeventeenTwentyEight => "1728",
        }
    }
}

/// The image of the automorphism action on N-torsion in the CM basis:
/// {+-I} generically, a cyclic group of order 4 above j = 1728, and a cyclic
/// group of order 6 above j = 0.
pub fn automorphism_image(j: JClass, level: &Level) -> Result<Subgroup> {
    match j {
        JClass::Generic => Ok(plus_minus(&Subgroup::trivial(level))),
        JClass::SeventeenTwentyEight => {
            require_level_at_least_3(level)?;
            Subgroup::closure(level, &[Mat2::new([0, 1, -1, 0], level)])
        }
        JClass::Zero => {
            require_level_at_least_3(level)?;
            Subgroup::closure(level, &[Mat2::new([1, 1, -1, 0], level)])
        }
    }
}

fn require_level_at_least_3(level: &Level) -> Result<()> {
    if level.modulus() < 3 {
        return Err(Error::LevelTooSmall {
            modulus: level.modulus(),
            min: 3,
        });
    }
    Ok(())
}

/// The group <H, -I>: H itself when -I is already a member, twice the order
/// otherwise.
pub fn plus_minus(h: &Subgroup) -> Subgroup {
    let level = h.level().clone();
    let minus = Mat2::neg_identity(&level);
    if h.contains_code(minus.code()) {
        return h.clone();
    }
    let mut codes: Vec<u64> = h.codes().to_vec();
    for e in h.elements() {
        codes.push(minus.mul(&e).expect("same level").code());
    }
    codes.sort_unstable();
    codes.dedup();
    let mut gens = h.generators().to_vec();
    gens.push(minus);
    Subgroup::from_parts(&level, gens, codes)
}
