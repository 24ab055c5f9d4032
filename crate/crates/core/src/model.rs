//! Physical parameters and the value types shared by every solver stage.
//!
//! Natural units throughout (`ħ = c = 1`). The scalar potential is linear,
//! `U(r) = q r`, and the background is a cosmic string with deficit
//! parameter `α` seen from a frame rotating with angular velocity `ω`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, ParamViolation, Result};

/// All physical inputs of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Boson mass `M`.
    pub mass: f64,
    /// Slope of the linear scalar potential `U = q r` (signed).
    pub q: f64,
    /// DKP oscillator frequency `ϖ`.
    pub varpi: f64,
    /// Angular velocity of the rotating frame.
    pub omega: f64,
    /// Deficit parameter of the cosmic string, `α ∈ (0, 1]`.
    pub alpha: f64,
    /// Magnetic quantum number.
    pub m: i32,
    /// Axial wave number.
    pub k: f64,
}

/// Quantities derived from [`PhysicalParams`] at a radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived {
    pub rho: f64,
    /// Light-cone radius `1/(ωα)`, `+∞` in a non-rotating frame.
    pub r0: f64,
    pub m_alpha: f64,
}

impl Default for PhysicalParams {
    /// The parameter set used for the published energy tables.
    fn default() -> Self {
        Self::canonical(0.5)
    }
}

impl PhysicalParams {
    /// `M = q = m = k = 1`, `ω = 0.01`, `ϖ = 0` at the given `α`.
    pub fn canonical(alpha: f64) -> Self {
        Self {
            mass: 1.0,
            q: 1.0,
            varpi: 0.0,
            omega: 0.01,
            alpha,
            m: 1,
            k: 1.0,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_varpi(mut self, varpi: f64) -> Self {
        self.varpi = varpi;
        self
    }

    /// Returns every violated invariant; empty means the parameters are valid.
    pub fn violations(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        for (name, v) in [
            ("M", self.mass),
            ("q", self.q),
            ("varpi", self.varpi),
            ("omega", self.omega),
            ("alpha", self.alpha),
            ("k", self.k),
        ] {
            if !v.is_finite() {
                out.push(ParamViolation::NonFinite { name });
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            out.push(ParamViolation::AlphaOutOfRange { alpha: self.alpha });
        }
        if self.varpi < 0.0 {
            out.push(ParamViolation::NegativeFrequency {
                name: "varpi",
                value: self.varpi,
            });
        }
        if self.omega < 0.0 {
            out.push(ParamViolation::NegativeFrequency {
                name: "omega",
                value: self.omega,
            });
        }
        if self.mass < 0.0 {
            out.push(ParamViolation::NegativeMass { mass: self.mass });
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    /// Validates the parameters together with the radii at which they will be
    /// evaluated; every radius must lie inside the light cone.
    pub fn validate_at(&self, radii: &[f64]) -> Result<()> {
        let mut v = self.violations();
        if v.is_empty() {
            if let Some(&r) = radii.iter().find(|&&r| self.rho(r) >= 1.0) {
                v.push(ParamViolation::RhoGeOne {
                    r,
                    rho: self.rho(r),
                });
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    pub fn omega_alpha(&self) -> f64 {
        self.omega * self.alpha
    }

    pub fn rho(&self, r: f64) -> f64 {
        self.omega_alpha() * r
    }

    pub fn r0(&self) -> f64 {
        let wa = self.omega_alpha();
        if wa > 0.0 {
            1.0 / wa
        } else {
            f64::INFINITY
        }
    }

    pub fn m_alpha(&self) -> f64 {
        f64::from(self.m) / self.alpha
    }

    /// The rotational constant `m_α²(ωα)² = m²ω²`.
    pub fn rotational_constant(&self) -> f64 {
        let mw = f64::from(self.m) * self.omega;
        mw * mw
    }

    /// `M + U(r)`.
    pub fn potential_mass(&self, r: f64) -> f64 {
        self.mass + self.q * r
    }

    pub fn derived(&self, r: f64) -> Result<Derived> {
        self.validate()?;
        let rho = self.rho(r);
        if rho >= 1.0 {
            return Err(Error::RhoGeOne { r, rho });
        }
        Ok(Derived {
            rho,
            r0: self.r0(),
            m_alpha: self.m_alpha(),
        })
    }

    /// `κ² = E² − k² − M² + 2Emω` for a trial energy.
    pub fn kappa2(&self, energy: f64) -> f64 {
        energy * energy - self.k * self.k - self.mass * self.mass
            + 2.0 * energy * f64::from(self.m) * self.omega
    }

    pub(crate) fn check_rho(&self, r: f64) -> Result<f64> {
        let rho = self.rho(r);
        if rho >= 1.0 {
            Err(Error::RhoGeOne { r, rho })
        } else {
            Ok(rho)
        }
    }
}

/// The two real roots of `κ² = E² − k² − M² + 2Emω` in `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyPair {
    pub e_plus: f64,
    pub e_minus: f64,
    pub kappa2: f64,
}

impl EnergyPair {
    /// Relative defects of the two Vieta identities
    /// `E₊ + E₋ = −2mω` and `E₊E₋ = −(κ² + k² + M²)`.
    pub fn vieta_defects(&self, params: &PhysicalParams) -> (f64, f64) {
        let mw = f64::from(params.m) * params.omega;
        let sum_target = -2.0 * mw;
        let c = self.kappa2 + params.k * params.k + params.mass * params.mass;
        let sum_scale = self.e_plus.abs() + self.e_minus.abs();
        let prod_scale = (self.e_plus * self.e_minus).abs() + mw * mw + c.abs();
        let sum =
            (self.e_plus + self.e_minus - sum_target).abs() / sum_scale.max(f64::MIN_POSITIVE);
        let prod = (self.e_plus * self.e_minus + c).abs() / prod_scale.max(f64::MIN_POSITIVE);
        (sum, prod)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// The two roots of `b₄(b₄ − 1) − 3/4 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum B4Choice {
    #[serde(rename = "3/2")]
    ThreeHalves,
    #[serde(rename = "-1/2")]
    MinusHalf,
}

impl B4Choice {
    pub fn value(self) -> f64 {
        match self {
            B4Choice::ThreeHalves => 1.5,
            B4Choice::MinusHalf => -0.5,
        }
    }
}

/// Which root is taken for each of the three independent quadratic
/// constraints on the ansatz exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BranchSelection {
    /// Coupled sign of `(b₁, b₂)`.
    pub sign12: Sign,
    /// Sign in `b₃ = (α ± 2m)/(2α)`.
    pub sign3: Sign,
    pub b4: B4Choice,
}

impl BranchSelection {
    pub const fn new(sign12: Sign, sign3: Sign, b4: B4Choice) -> Self {
        Self { sign12, sign3, b4 }
    }

    /// All eight selections in canonical order.
    pub fn all() -> [BranchSelection; 8] {
        let mut out = [Self::new(Sign::Plus, Sign::Plus, B4Choice::ThreeHalves); 8];
        let mut i = 0;
        for s12 in [Sign::Plus, Sign::Minus] {
            for s3 in [Sign::Plus, Sign::Minus] {
                for b4 in [B4Choice::ThreeHalves, B4Choice::MinusHalf] {
                    out[i] = Self::new(s12, s3, b4);
                    i += 1;
                }
            }
        }
        out
    }

    /// Compact identifier such as `-+3/2` or `+--1/2`.
    pub fn id(&self) -> String {
        let b4 = match self.b4 {
            B4Choice::ThreeHalves => "3/2",
            B4Choice::MinusHalf => "-1/2",
        };
        format!("{}{}{}", self.sign12.symbol(), self.sign3.symbol(), b4)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        let sign = |c: Option<char>| match c {
            Some('+') => Some(Sign::Plus),
            Some('-') => Some(Sign::Minus),
            _ => None,
        };
        let s12 = sign(chars.next())?;
        let s3 = sign(chars.next())?;
        let b4 = match chars.as_str() {
            "3/2" => B4Choice::ThreeHalves,
            "-1/2" => B4Choice::MinusHalf,
            _ => return None,
        };
        Some(Self::new(s12, s3, b4))
    }
}

impl fmt::Display for BranchSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Which master equation governs a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// Full equation with the DKP oscillator term.
    Oscillator,
    /// `ϖ = 0`, arbitrary `ωα`, hard wall at `r₀ = 1/(ωα)`.
    Arbitrary,
    /// `ϖ = 0`, `ωα ≪ 1`, wall pushed to infinity.
    Small,
}

impl Regime {
    /// True when the wavefunction must vanish at a finite wall `r₀`.
    pub fn has_hard_wall(self, params: &PhysicalParams) -> bool {
        self == Regime::Arbitrary && params.omega_alpha() > 0.0
    }

    /// Upper edge of the radial domain.
    pub fn domain_end(self, params: &PhysicalParams) -> f64 {
        if self.has_hard_wall(params) {
            params.r0()
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SampleKind {
    F,
    R,
    Phi1,
    Phi2,
    Phi3,
    Phi4,
    Phi5,
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Normalization {
    Raw,
    /// Scaled so the peak magnitude is 1.
    Max1,
}

/// Real samples of a radial function on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SampleKind,
    pub normalization: Normalization,
}

impl SampledFunction {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<f64>,
        kind: SampleKind,
        normalization: Normalization,
    ) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            kind,
            normalization,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Rescales to unit peak magnitude. A function that is identically zero
    /// is left untouched.
    pub fn normalized_max1(mut self) -> Self {
        let peak = self.max_abs();
        if peak > 0.0 {
            for v in &mut self.values {
                *v /= peak;
            }
        }
        self.normalization = Normalization::Max1;
        self
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if let Some(bad) = grid.iter().find(|r| !r.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite radius {bad}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_params_are_valid() {
        let p = PhysicalParams::canonical(0.5);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn alpha_above_one_is_rejected() {
        let p = PhysicalParams::canonical(1.2);
        let v = p.violations();
        assert_eq!(v, vec![ParamViolation::AlphaOutOfRange { alpha: 1.2 }]);
    }

    #[test]
    fn negative_frequencies_are_all_reported() {
        let mut p = PhysicalParams::canonical(0.0);
        p.omega = -1.0;
        p.varpi = -0.5;
        let v = p.violations();
        assert_eq!(v.len(), 3);
        assert!(v
            .iter()
            .any(|e| matches!(e, ParamViolation::AlphaOutOfRange { .. })));
        assert!(v
            .iter()
            .any(|e| matches!(e, ParamViolation::NegativeFrequency { name: "omega", .. })));
        assert!(v
            .iter()
            .any(|e| matches!(e, ParamViolation::NegativeFrequency { name: "varpi", .. })));
    }

    #[test]
    fn radius_beyond_light_cone_is_rejected() {
        let p = PhysicalParams::canonical(0.5);
        assert_eq!(p.r0(), 200.0);
        let err = p.validate_at(&[1.0, 250.0]).unwrap_err();
        match err {
            Error::InvalidParams(v) => {
                assert!(matches!(v[0], ParamViolation::RhoGeOne { r, .. } if r == 250.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(p.validate_at(&[199.0]).is_ok());
    }

    #[test]
    fn derived_quantities() {
        let d = PhysicalParams::canonical(0.5).derived(1.0).unwrap();
        assert!((d.rho - 0.005).abs() < 1e-15);
        assert_eq!(d.r0, 200.0);
        assert_eq!(d.m_alpha, 2.0);

        let mut p = PhysicalParams::canonical(1.0);
        p.omega = 0.0;
        p.m = 3;
        let d = p.derived(7.0).unwrap();
        assert_eq!(d.rho, 0.0);
        assert!(d.r0.is_infinite());
        assert_eq!(d.m_alpha, 3.0);

        let mut p = PhysicalParams::canonical(1.0);
        p.omega = 0.1;
        p.m = 2;
        let d = p.derived(5.0).unwrap();
        assert!((d.rho - 0.5).abs() < 1e-15);
        assert!((d.r0 - 10.0).abs() < 1e-12);
        assert_eq!(d.m_alpha, 2.0);
        assert!(matches!(p.derived(10.0), Err(Error::RhoGeOne { .. })));
    }

    #[test]
    fn branch_ids_round_trip() {
        let all = BranchSelection::all();
        let mut ids: Vec<_> = all.iter().map(|s| s.id()).collect();
        for (s, id) in all.iter().zip(&ids) {
            assert_eq!(BranchSelection::parse(id), Some(*s));
        }
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 8);
        let mut sorted = all;
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn sampled_function_rejects_unsorted_grid() {
        let r = SampledFunction::new(
            vec![0.1, 0.1],
            vec![1.0, 2.0],
            SampleKind::R,
            Normalization::Raw,
        );
        assert!(matches!(r, Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = uniform_grid(0.1, 5.0, 50);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[49], 5.0);
        assert!(check_grid(&g).is_ok());
    }
}
