use std::fmt;

/// Errors raised by the arithmetic, group and counting layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Modulus 0 is not a level.
    InvalidLevel { modulus: u64 },
    /// Two values at different levels were combined.
    LevelMismatch { left: u64, right: u64 },
    /// The operation needs a larger level than the one supplied.
    LevelTooSmall { modulus: u64, min: u64 },
    /// `sub` does not divide `level`, so there is no reduction map.
    LevelNotDividing { sub: u64, level: u64 },
    /// The operation is only defined at prime-power levels.
    CompositeLevel { modulus: u64 },
    /// CRT recombination needs pairwise coprime levels.
    NonCoprimeLevels { left: u64, right: u64 },
    /// A residue that must be invertible is not.
    NotAUnit { value: u64, modulus: u64 },
    /// A matrix that must lie in GL2 has non-invertible determinant.
    NotInvertible { det: u64, modulus: u64 },
    /// Projective coordinates with no unit entry do not name a point.
    NotPrimitive { x: u64, y: u64, modulus: u64 },
    /// The Cartan constructors are only defined for odd primes.
    OddPrimeRequired { p: u64 },
    /// An element set that was declared closed is not a group.
    NotAGroup { modulus: u64, reason: &'static str },
    /// The operation requires -I to be a member of the subgroup.
    MissingMinusI,
    /// The automorphism image A must be normalized by every element of R.
    NotNormalized,
    /// An enumeration would exceed the configured ceiling.
    BudgetExceeded {
        what: &'static str,
        needed: u64,
        budget: u64,
    },
    /// The discriminant/conductor pair does not describe an imaginary
    /// quadratic order.
    InvalidCmOrder {
        disc: i64,
        conductor: u64,
        reason: &'static str,
    },
    /// The supplied j-class does not match the one the order dictates.
    InconsistentJClass {
        expected: &'static str,
        got: &'static str,
    },
    /// Matrix text could not be parsed.
    ParseMatrix { reason: String },
    /// An operation was handed an empty list it cannot default.
    EmptyList { what: &'static str },
    /// An internal consistency assertion failed; this indicates a bug,
    /// never a bad input.
    Internal { what: &'static str, detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidLevel { modulus } => write!(f, "invalid level {modulus}"),
            Error::LevelMismatch { left, right } => {
                write!(f, "level mismatch: {left} vs {right}")
            }
            Error::LevelTooSmall { modulus, min } => {
                write!(f, "level {modulus} too small, need at least {min}")
            }
            Error::LevelNotDividing { sub, level } => {
                write!(f, "{sub} does not divide level {level}")
            }
            Error::CompositeLevel { modulus } => {
                write!(f, "level {modulus} is not a prime power")
            }
            Error::NonCoprimeLevels { left, right } => {
                write!(f, "levels {left} and {right} are not coprime")
            }
            Error::NotAUnit { value, modulus } => {
                write!(f, "{value} is not a unit mod {modulus}")
            }
            Error::NotInvertible { det, modulus } => {
                write!(f, "matrix determinant {det} is not a unit mod {modulus}")
            }
            Error::NotPrimitive { x, y, modulus } => {
                write!(f, "({x}, {y}) has no unit coordinate mod {modulus}")
            }
            Error::OddPrimeRequired { p } => {
                write!(f, "odd prime required, got {p}")
            }
            Error::NotAGroup { modulus, reason } => {
                write!(f, "element set mod {modulus} is not a group: {reason}")
            }
            Error::MissingMinusI => write!(f, "subgroup does not contain -I"),
            Error::NotNormalized => {
                write!(f, "automorphism image is not normalized by the Galois image")
            }
            Error::BudgetExceeded {
                what,
                needed,
                budget,
            } => write!(
                f,
                "{what} would need {needed}, exceeding the budget of {budget}"
            ),
            Error::InvalidCmOrder {
                disc,
                conductor,
                reason,
            } => write!(
                f,
                "(disc {disc}, conductor {conductor}) is not a CM order: {reason}"
            ),
            Error::InconsistentJClass { expected, got } => {
                write!(f, "j-class {got} inconsistent with the order (expected {expected})")
            }
            Error::ParseMatrix { reason } => write!(f, "bad matrix text: {reason}"),
            Error::EmptyList { what } => write!(f, "{what} must not be empty"),
            Error::Internal { what, detail } => {
                write!(f, "internal consistency failure in {what}: {detail}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
