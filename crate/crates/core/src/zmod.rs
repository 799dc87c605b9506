//! Exact arithmetic over Z/NZ: levels with their factorizations, residues,
//! 2x2 matrices with a canonical integer encoding, p-adic valuation and
//! entrywise CRT splitting.
//!
//! The matrix text format `a,b;c,d` (row-major, semicolon-separated rows) is
//! defined here and reused verbatim by the CLI.

use std::fmt;

use crate::error::{Error, Result};

/// A modulus N >= 1 together with its prime factorization.
///
/// The factorization is computed once on construction; primes are stored in
/// strictly increasing order and their powers multiply back to N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Level {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLevel { modulus: 0 });
        }
        Ok(Level {
            n,
            factors: factorize(n),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// `Some((p, k))` when N = p^k for a single prime p.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [(p, k)] => Some((*p, *k)),
            _ => None,
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1, |acc, &(p, e)| acc * (p.pow(e) - p.pow(e - 1)))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modular inverse of `a` mod `n`, when it exists.
pub(crate) fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(n as i128) as u64)
}

/// A canonical residue mod N. The modulus travels with the value and is
/// checked on every binary operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    modulus: u64,
    value: u64,
}

impl Residue {
    pub fn new(value: i64, level: &Level) -> Self {
        Residue {
            modulus: level.modulus(),
            value: value.rem_euclid(level.modulus() as i64) as u64,
        }
    }

    pub(crate) fn from_raw(value: u64, modulus: u64) -> Self {
        Residue {
            modulus,
            value: value % modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn check(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::LevelMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue::from_raw(self.value + other.value, self.modulus))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue::from_raw(
            self.value + self.modulus - other.value,
            self.modulus,
        ))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue::from_raw(self.value * other.value, self.modulus))
    }

    pub fn neg(&self) -> Residue {
        Residue::from_raw(self.modulus - self.value % self.modulus, self.modulus)
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.value, self.modulus) == 1
    }

    pub fn inv(&self) -> Result<Residue> {
        mod_inverse(self.value, self.modulus)
            .map(|v| Residue::from_raw(v, self.modulus))
            .ok_or(Error::NotAUnit {
                value: self.value,
                modulus: self.modulus,
            })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Largest j <= k with p^j dividing the residue, at a prime-power level p^k.
/// A zero residue gets valuation k.
pub fn valuation(x: &Residue) -> Result<u32> {
    let level = Level::new(x.modulus())?;
    let (p, k) = level
        .prime_power()
        .ok_or(Error::CompositeLevel { modulus: x.modulus() })?;
    if x.value() == 0 {
        return Ok(k);
    }
    let mut v = 0;
    let mut rest = x.value();
    while rest % p == 0 {
        rest /= p;
        v += 1;
    }
    Ok(v)
}

/// A 2x2 matrix over Z/NZ, row-major `[[a, b], [c, d]]`.
///
/// For set storage the matrix is encoded as the integer
/// `a + N*(b + N*(c + N*d))`, which gives a total order and a hash key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    n: u64,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl Mat2 {
    pub fn new(entries: [i64; 4], level: &Level) -> Self {
        let n = level.modulus() as i64;
        Mat2 {
            n: level.modulus(),
            a: entries[0].rem_euclid(n) as u64,
            b: entries[1].rem_euclid(n) as u64,
            c: entries[2].rem_euclid(n) as u64,
            d: entries[3].rem_euclid(n) as u64,
        }
    }

    pub fn from_residues(a: Residue, b: Residue, c: Residue, d: Residue) -> Result<Mat2> {
        for pair in [(&a, &b), (&a, &c), (&a, &d)] {
            pair.0.check(pair.1)?;
        }
        Ok(Mat2 {
            n: a.modulus(),
            a: a.value(),
            b: b.value(),
            c: c.value(),
            d: d.value(),
        })
    }

    pub fn identity(level: &Level) -> Self {
        Mat2::new([1, 0, 0, 1], level)
    }

    pub fn neg_identity(level: &Level) -> Self {
        Mat2::new([-1, 0, 0, -1], level)
    }

    pub fn scalar(s: i64, level: &Level) -> Self {
        Mat2::new([s, 0, 0, s], level)
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// Entries `[a, b, c, d]` in row-major order.
    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn entry(&self, row: usize, col: usize) -> Residue {
        let v = match (row, col) {
            (0, 0) => self.a,
            (0, 1) => self.b,
            (1, 0) => self.c,
            (1, 1) => self.d,
            _ => panic!("2x2 matrix index out of range"),
        };
        Residue::from_raw(v, self.n)
    }

    fn check(&self, other: &Mat2) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LevelMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &Mat2) -> Result<Mat2> {
        self.check(rhs)?;
        let n = self.n;
        Ok(Mat2 {
            n,
            a: (self.a * rhs.a + self.b * rhs.c) % n,
            b: (self.a * rhs.b + self.b * rhs.d) % n,
            c: (self.c * rhs.a + self.d * rhs.c) % n,
            d: (self.c * rhs.b + self.d * rhs.d) % n,
        })
    }

    pub fn det(&self) -> Residue {
        let n = self.n;
        let pos = (self.a * self.d) % n;
        let neg = (self.b * self.c) % n;
        Residue::from_raw(pos + n - neg, n)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    pub fn inv(&self) -> Result<Mat2> {
        let det = self.det();
        let di = mod_inverse(det.value(), self.n).ok_or(Error::NotAUnit {
            value: det.value(),
            modulus: self.n,
        })?;
        let n = self.n;
        Ok(Mat2 {
            n,
            a: (di * self.d) % n,
            b: (di * ((n - self.b) % n)) % n,
            c: (di * ((n - self.c) % n)) % n,
            d: (di * self.a) % n,
        })
    }

    /// Canonical encoding `a + N*(b + N*(c + N*d))`.
    pub fn code(&self) -> u64 {
        self.a + self.n * (self.b + self.n * (self.c + self.n * self.d))
    }

    pub fn from_code(code: u64, modulus: u64) -> Mat2 {
        let n = modulus;
        let a = code % n;
        let rest = code / n;
        let b = rest % n;
        let rest = rest / n;
        let c = rest % n;
        let d = rest / n % n;
        Mat2 { n, a, b, c, d }
    }

    /// Entrywise reduction to a level dividing this one.
    pub fn reduce(&self, target: &Level) -> Result<Mat2> {
        let m = target.modulus();
        if self.n % m != 0 {
            return Err(Error::LevelNotDividing {
                sub: m,
                level: self.n,
            });
        }
        Ok(Mat2 {
            n: m,
            a: self.a % m,
            b: self.b % m,
            c: self.c % m,
            d: self.d % m,
        })
    }

    /// Parse the `a,b;c,d` text format at the given level. Entries may be
    /// negative; they are reduced mod N.
    pub fn parse(text: &str, level: &Level) -> Result<Mat2> {
        let rows: Vec<&str> = text.split(';').collect();
        if rows.len() != 2 {
            return Err(Error::ParseMatrix {
                reason: format!("expected 2 rows separated by ';', got {}", rows.len()),
            });
        }
        let mut entries = [0i64; 4];
        for (i, row) in rows.iter().enumerate() {
            let cols: Vec<&str> = row.split(',').collect();
            if cols.len() != 2 {
                return Err(Error::ParseMatrix {
                    reason: format!("row {} needs 2 comma-separated entries", i + 1),
                });
            }
            for (j, col) in cols.iter().enumerate() {
                entries[2 * i + j] = col.trim().parse::<i64>().map_err(|e| Error::ParseMatrix {
                    reason: format!("entry '{}': {e}", col.trim()),
                })?;
            }
        }
        Ok(Mat2::new(entries, level))
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Split a matrix at level N into its components at the prime-power levels
/// dividing N, in increasing prime order.
pub fn crt_split(m: &Mat2) -> Result<Vec<Mat2>> {
    let level = Level::new(m.modulus())?;
    level
        .factors()
        .iter()
        .map(|&(p, e)| m.reduce(&Level::new(p.pow(e))?))
        .collect()
}

/// Recombine matrices at pairwise coprime levels into the unique lift at the
/// product level. Inverse of [`crt_split`].
pub fn crt_join(parts: &[Mat2]) -> Result<Mat2> {
    let mut iter = parts.iter();
    let first = iter.next().ok_or(Error::EmptyList { what: "crt_join input" })?;
    let mut acc = *first;
    for part in iter {
        acc = crt_join_pair(&acc, part)?;
    }
    Ok(acc)
}

fn crt_join_pair(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    let (n1, n2) = (x.modulus(), y.modulus());
    if gcd(n1, n2) != 1 {
        return Err(Error::NonCoprimeLevels { left: n1, right: n2 });
    }
    let n = n1 * n2;
    let inv = mod_inverse(n1 % n2, n2).expect("coprime moduli have inverses");
    let xe = x.entries();
    let ye = y.entries();
    let mut entries = [0u64; 4];
    for i in 0..4 {
        let t = ((ye[i] + n2 - xe[i] % n2) % n2 * inv) % n2;
        entries[i] = xe[i] + n1 * t;
    }
    Ok(Mat2 {
        n,
        a: entries[0],
        b: entries[1],
        c: entries[2],
        d: entries[3],
    })
}
