use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// A single violated parameter invariant, as reported by
/// [`PhysicalParams::validate`](crate::model::PhysicalParams::validate).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "code", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ParamViolation {
    AlphaOutOfRange { alpha: f64 },
    NegativeFrequency { name: &'static str, value: f64 },
    NegativeMass { mass: f64 },
    NonFinite { name: &'static str },
    RhoGeOne { r: f64, rho: f64 },
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlphaOutOfRange { alpha } => {
                write!(f, "ALPHA_OUT_OF_RANGE: alpha = {alpha} not in (0, 1]")
            }
            Self::NegativeFrequency { name, value } => {
                write!(f, "NEGATIVE_FREQUENCY: {name} = {value} < 0")
            }
            Self::NegativeMass { mass } => write!(f, "NEGATIVE_MASS: M = {mass} < 0"),
            Self::NonFinite { name } => write!(f, "NON_FINITE: {name} is not a finite number"),
            Self::RhoGeOne { r, rho } => write!(f, "RHO_GE_ONE: rho = {rho} >= 1 at r = {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<ParamViolation>),
    #[error("RHO_GE_ONE: rho = {rho} >= 1 at r = {r}")]
    RhoGeOne { r: f64, rho: f64 },
    #[error("POTENTIAL_ZERO_CROSSING: M + qr = 0 at r = {r}")]
    PotentialZeroCrossing { r: f64 },
    #[error("POTENTIAL_NONPOSITIVE: M + qr = {value} at r = {r}")]
    PotentialNonpositive { r: f64, value: f64 },
    #[error("MASS_ZERO_UNSUPPORTED: the R-form radial operators require M > 0")]
    MassZeroUnsupported,
    #[error("Q_ZERO_UNSUPPORTED: the ansatz logarithm ln(M + qr) degenerates at q = 0")]
    QZeroUnsupported,
    #[error("DEGENERATE_BRANCH: q = 0 and varpi = 0 leave the ansatz exponents undetermined")]
    DegenerateBranch,
    #[error("ALPHA11_SINGULAR: the node equation has a vanishing linear coefficient")]
    Alpha11Singular,
    #[error("NO_PHYSICAL_BRANCH: no branch passes the {policy} physicality policy")]
    NoPhysicalBranch { policy: String },
    #[error("COMPLEX_ENERGY: discriminant {discriminant} < 0, no real bound state")]
    ComplexEnergy { discriminant: f64 },
    #[error("VARIANT_MISMATCH: {0}")]
    VariantMismatch(String),
    #[error("INVALID_GRID: {0}")]
    InvalidGrid(String),
}

fn join(v: &[ParamViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
