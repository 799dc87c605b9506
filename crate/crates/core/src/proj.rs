//! The projective line P^1(Z/p^k Z) and the GL2 action on it.
//!
//! Points biject with the cyclic order-p^k subgroups of (Z/p^k Z)^2: a point
//! either has a representative (x : 1), or (1 : y) with p | y. Only
//! prime-power levels carry a projective line here.

use crate::error::{Error, Result};
use crate::zmod::{Level, Mat2, Residue};

/// A point of P^1(Z/p^k Z) in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    modulus: u64,
    chart: Chart,
}

/// The two canonical shapes: `Affine(x)` is (x : 1), `Infinity(y)` is
/// (1 : y) with y divisible by p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    Affine(u64),
    Infinity(u64),
}

impl ProjPoint {
    /// Canonicalize homogeneous coordinates (x : y). At least one coordinate
    /// must be a unit.
    pub fn from_coords(x: &Residue, y: &Residue) -> Result<ProjPoint> {
        if x.modulus() != y.modulus() {
            return Err(Error::LevelMismatch {
                left: x.modulus(),
                right: y.modulus(),
            });
        }
        let level = Level::new(x.modulus())?;
        level
            .prime_power()
            .ok_or(Error::CompositeLevel { modulus: x.modulus() })?;
        if y.is_unit() {
            Ok(ProjPoint {
                modulus: x.modulus(),
                chart: Chart::Affine(x.mul(&y.inv()?)?.value()),
            })
        } else if x.is_unit() {
            Ok(ProjPoint {
                modulus: x.modulus(),
                chart: Chart::Infinity(y.mul(&x.inv()?)?.value()),
            })
        } else {
            Err(Error::NotPrimitive {
                x: x.value(),
                y: y.value(),
                modulus: x.modulus(),
            })
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Homogeneous coordinates of the canonical representative.
    pub fn coords(&self) -> (u64, u64) {
        match self.chart {
            Chart::Affine(x) => (x, 1),
            Chart::Infinity(y) => (1, y),
        }
    }

    /// The image under P^1(Z/p^k Z) -> P^1(F_p).
    pub fn reduce_mod_p(&self, p: u64) -> ProjPoint {
        ProjPoint {
            modulus: p,
            chart: match self.chart {
                Chart::Affine(x) => Chart::Affine(x % p),
                Chart::Infinity(_) => Chart::Infinity(0),
            },
        }
    }
}

/// All points of P^1(Z/p^k Z): exactly p^k + p^{k-1} of them, no duplicates.
pub fn proj_points(level: &Level) -> Result<Vec<ProjPoint>> {
    let (p, k) = level
        .prime_power()
        .ok_or(Error::CompositeLevel { modulus: level.modulus() })?;
    let n = level.modulus();
    let mut points = Vec::with_capacity((n + n / p) as usize);
    for x in 0..n {
        points.push(ProjPoint {
            modulus: n,
            chart: Chart::Affine(x),
        });
    }
    for t in 0..p.pow(k - 1) {
        points.push(ProjPoint {
            modulus: n,
            chart: Chart::Infinity(p * t),
        });
    }
    Ok(points)
}

/// The action (x : y) -> (ax + by : cx + dy), re-canonicalized.
pub fn proj_act(m: &Mat2, point: &ProjPoint) -> Result<ProjPoint> {
    if m.modulus() != point.modulus() {
        return Err(Error::LevelMismatch {
            left: m.modulus(),
            right: point.modulus(),
        });
    }
    let det = m.det();
    if !det.is_unit() {
        return Err(Error::NotInvertible {
            det: det.value(),
            modulus: m.modulus(),
        });
    }
    let n = m.modulus();
    let [a, b, c, d] = m.entries();
    let (x, y) = point.coords();
    let level = Level::new(n)?;
    let xx = Residue::new(((a * x + b * y) % n) as i64, &level);
    let yy = Residue::new(((c * x + d * y) % n) as i64, &level);
    ProjPoint::from_coords(&xx, &yy)
}

/// The number of points fixed by every matrix in the set. An empty set fixes
/// everything. All matrices must be invertible at one prime-power level.
pub fn fixed_proj_count(level: &Level, mats: &[Mat2]) -> Result<u64> {
    let points = proj_points(level)?;
    for m in mats {
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
    }
    let mut count = 0;
    'point: for pt in &points {
        for m in mats {
            if proj_act(m, pt)? != *pt {
                continue 'point;
            }
        }
        count += 1;
    }
    Ok(count)
}
