//! Matching the exponential-polynomial ansatz
//! `R(r) = f_n(r)·exp(b₁r + b₂r² + b₃ ln r + b₄ ln(M + qr))` against the
//! radial equations.
//!
//! Substituting the ansatz and collecting terms on the radial basis produces
//! more equations than unknowns. A fixed subset (the *determining* set) fixes
//! `b₁…b₄`, the node `α₁¹` and `κ²`; the rest are evaluated at the result and
//! reported as over-determination diagnostics. They are never forced to zero.
//!
//! Two corrections relative to the commonly quoted forms of these systems
//! are applied: the `b₄` quadratic is `b₄(b₄ − 1) − 3/4 = 0`, and the
//! `1/r²` matching of the one-node system uses `m_α = m/α`. The rotational
//! constant always enters as `m_α²(ωα)² = m²ω²`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BranchSelection, EnergyPair, PhysicalParams, Regime};
use crate::spectrum::energy_pair;

/// The four matching systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SystemVariant {
    /// Node-less, oscillator term kept.
    OscN0,
    /// Node-less, `ϖ = 0`, arbitrary `ωα`.
    ArbN0,
    /// Node-less, `ωα ≪ 1`.
    SmallN0,
    /// One node, `ϖ = 0`.
    OneNode,
}

impl SystemVariant {
    pub fn for_state(n: u8, regime: Regime) -> Result<Self> {
        match (n, regime) {
            (0, Regime::Oscillator) => Ok(Self::OscN0),
            (0, Regime::Arbitrary) => Ok(Self::ArbN0),
            (0, Regime::Small) => Ok(Self::SmallN0),
            (1, Regime::Arbitrary | Regime::Small) => Ok(Self::OneNode),
            (1, Regime::Oscillator) => Err(Error::VariantMismatch(
                "one-node states are only solved without the oscillator term".into(),
            )),
            _ => Err(Error::VariantMismatch(format!(
                "node count {n} is not supported"
            ))),
        }
    }
}

/// Unknowns of a matching system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Unknowns {
    pub b: [f64; 4],
    pub alpha11: f64,
    pub kappa2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Determining,
    Diagnostic,
}

type EquationFn = fn(&PhysicalParams, SystemVariant, &Unknowns) -> f64;

/// One named matching equation, written as `residual = 0`.
#[derive(Clone, Copy)]
pub struct Equation {
    /// Basis term whose coefficient the equation matches.
    pub name: &'static str,
    pub role: Role,
    eval: EquationFn,
}

impl Equation {
    pub fn eval(&self, params: &PhysicalParams, variant: SystemVariant, u: &Unknowns) -> f64 {
        (self.eval)(params, variant, u)
    }
}

impl fmt::Debug for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Equation")
            .field("name", &self.name)
            .field("role", &self.role)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedResidual {
    pub name: &'static str,
    pub role: Role,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub variant: SystemVariant,
    pub params: PhysicalParams,
    pub equations: Vec<Equation>,
}

// Node-less systems. `const` carries the variant-dependent constant.

fn n0_const(p: &PhysicalParams, v: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, b2, b3, b4] = u.b;
    let shift = match v {
        SystemVariant::OscN0 => p.rotational_constant() + p.mass * p.varpi,
        SystemVariant::ArbN0 => p.rotational_constant(),
        _ => 0.0,
    };
    shift + u.kappa2 + b1 * b1 + 2.0 * b2 + 4.0 * b2 * b3 + 4.0 * b2 * b4
}

fn n0_inv_r2(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let b3 = u.b[2];
    let ma = p.m_alpha();
    b3 * (b3 - 1.0) + 0.25 - ma * ma
}

fn n0_inv_r(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, _, b3, b4] = u.b;
    4.0 * (p.mass * b1 * b3 + b3 * b4 * p.q) + p.q
}

fn n0_r(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    4.0 * u.b[0] * u.b[1] - 2.0 * p.mass * p.q
}

fn n0_r2(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let b2 = u.b[1];
    4.0 * b2 * b2 - (p.q * p.q + p.mass * p.mass * p.varpi * p.varpi)
}

fn n0_inv_w2(_: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let b4 = u.b[3];
    b4 * (b4 - 1.0) - 0.75
}

fn n0_inv_w(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, b2, b3, b4] = u.b;
    let (m, q) = (p.mass, p.q);
    4.0 * (2.0 * b2 * b4 * m * m - b1 * b4 * m * q + b3 * b4 * q * q) + q * q
        - 2.0 * m * m * m * p.varpi
}

// One-node system, in the printed normalization of each line.

fn n1_r3(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let b2 = u.b[1];
    4.0 * b2 * b2 - p.q * p.q
}

fn n1_inv_r2(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let b3 = u.b[2];
    let ma = p.m_alpha();
    b3 * (1.0 - b3) + (ma * ma - 0.25)
}

fn n1_inv_w2(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let b4 = u.b[3];
    let (m, q, a) = (p.mass, p.q, u.alpha11);
    3.0 * m * q + 4.0 * b4 * m * q - 4.0 * b4 * b4 * m * q + 3.0 * a * q * q + 4.0 * a * b4 * q * q
        - 4.0 * a * b4 * b4 * q * q
}

fn n1_r2(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, b2, _, _] = u.b;
    let (m, q, a) = (p.mass, p.q, u.alpha11);
    4.0 * b1 * b2 - 4.0 * a * b2 * b2 - 2.0 * m * q + a * q * q
}

fn n1_const(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, b2, b3, b4] = u.b;
    let (m, q, a) = (p.mass, p.q, u.alpha11);
    // The duplicated −2b₁b₄q term is kept as printed.
    4.0 * b2 * b4 * m - 2.0 * b4 * q + a * b1 * b1 * q + 2.0 * a * b2 * q - 2.0 * b1 * b4 * q
        + 4.0 * a * b2 * b3 * q
        - 2.0 * b1 * b4 * q
        + 4.0 * a * b2 * b4 * q
        + a * u.kappa2 * q
        + a * p.rotational_constant() * q
}

fn n1_inv_r(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, _, b3, b4] = u.b;
    let (m, q, a) = (p.mass, p.q, u.alpha11);
    // Bare m², not m_α²: this is the form that yields the tabulated nodes.
    let mm = f64::from(p.m) * f64::from(p.m);
    -4.0 * mm * m + m + 4.0 * b3 * m - 8.0 * a * b1 * b3 * m + 4.0 * b3 * b3 * m
        - 2.0 * a * q
        - 8.0 * a * b3 * b4 * q
}

fn n1_r(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, b2, b3, b4] = u.b;
    let (m, q, a) = (p.mass, p.q, u.alpha11);
    b1 * b1 + 6.0 * b2 - 4.0 * a * b1 * b2
        + 4.0 * b2 * b3
        + 4.0 * b2 * b4
        + u.kappa2
        + 2.0 * a * m * q
        + p.rotational_constant()
}

fn n1_inv_w(p: &PhysicalParams, _: SystemVariant, u: &Unknowns) -> f64 {
    let [b1, b2, b3, b4] = u.b;
    let (m, q, a) = (p.mass, p.q, u.alpha11);
    16.0 * b2 * b4 * m.powi(3) - 8.0 * b1 * b4 * m * m * q + 16.0 * a * b2 * b4 * m * m * q
        - m * q * q
        + 4.0 * b4 * m * q * q
        - 8.0 * a * b1 * b4 * m * q * q
        + 8.0 * b3 * b4 * m * q * q
        + 4.0 * b4 * b4 * m * q * q
        + 2.0 * a * q.powi(3)
        + 8.0 * a * b3 * b4 * q.powi(3)
}

const fn eq(name: &'static str, role: Role, eval: EquationFn) -> Equation {
    Equation { name, role, eval }
}

const NODELESS: [Equation; 7] = [
    eq("const", Role::Determining, n0_const),
    eq("inv_r2", Role::Determining, n0_inv_r2),
    eq("inv_r", Role::Diagnostic, n0_inv_r),
    eq("r", Role::Determining, n0_r),
    eq("r2", Role::Determining, n0_r2),
    eq("inv_w2", Role::Determining, n0_inv_w2),
    eq("inv_w", Role::Diagnostic, n0_inv_w),
];

const ONE_NODE: [Equation; 8] = [
    eq("r3", Role::Determining, n1_r3),
    eq("inv_r2", Role::Determining, n1_inv_r2),
    eq("inv_w2", Role::Diagnostic, n1_inv_w2),
    eq("r2", Role::Determining, n1_r2),
    eq("const", Role::Diagnostic, n1_const),
    eq("inv_r", Role::Determining, n1_inv_r),
    eq("r", Role::Determining, n1_r),
    eq("inv_w", Role::Diagnostic, n1_inv_w),
];

/// Assembles the matching system for `variant`.
pub fn build_system(params: &PhysicalParams, variant: SystemVariant) -> Result<ConstraintSystem> {
    params.validate()?;
    if params.q == 0.0 {
        return Err(Error::QZeroUnsupported);
    }
    if params.mass <= 0.0 {
        return Err(Error::MassZeroUnsupported);
    }
    if variant != SystemVariant::OscN0 && params.varpi != 0.0 {
        return Err(Error::VariantMismatch(format!(
            "{variant:?} requires varpi = 0, got {}",
            params.varpi
        )));
    }
    let equations = match variant {
        SystemVariant::OneNode => ONE_NODE.to_vec(),
        _ => NODELESS.to_vec(),
    };
    Ok(ConstraintSystem {
        variant,
        params: *params,
        equations,
    })
}

impl ConstraintSystem {
    pub fn equation(&self, name: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.name == name)
    }

    pub fn eval(&self, name: &str, u: &Unknowns) -> Option<f64> {
        self.equation(name)
            .map(|e| e.eval(&self.params, self.variant, u))
    }

    pub fn residuals(&self, u: &Unknowns) -> Vec<NamedResidual> {
        self.equations
            .iter()
            .map(|e| NamedResidual {
                name: e.name,
                role: e.role,
                value: e.eval(&self.params, self.variant, u),
            })
            .collect()
    }

    pub fn determining(&self) -> impl Iterator<Item = &Equation> {
        self.equations
            .iter()
            .filter(|e| e.role == Role::Determining)
    }

    pub fn diagnostic(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(|e| e.role == Role::Diagnostic)
    }

    /// Root of an equation that is affine in the unknown selected by `set`.
    fn solve_affine(&self, name: &str, base: Unknowns, set: fn(&mut Unknowns, f64)) -> Option<f64> {
        let e = self.equation(name)?;
        let at = |x: f64| {
            let mut u = base;
            set(&mut u, x);
            e.eval(&self.params, self.variant, &u)
        };
        let f0 = at(0.0);
        let slope = at(1.0) - f0;
        let scale = f0.abs().max(at(1.0).abs()).max(1.0);
        if slope.abs() <= 1e-14 * scale {
            None
        } else {
            // `+ 0.0` turns a −0 root into +0.
            Some(-f0 / slope + 0.0)
        }
    }
}

/// `(b₁, b₂, b₃, b₄)` for one branch.
///
/// With the oscillator, `b₂ = ±½ sgn(q)√(q² + M²ϖ²)` and
/// `b₁ = ±M|q|/√(q² + M²ϖ²)`; the `sgn(q)` factor keeps each selection
/// continuous as `ϖ → 0`, where it becomes `b₂ = ±q/2`, `b₁ = ±M`.
pub fn branch_values(selection: BranchSelection, params: &PhysicalParams) -> Result<[f64; 4]> {
    let PhysicalParams {
        mass: m,
        q,
        varpi: vp,
        ..
    } = *params;
    let s = selection.sign12.value();
    let (b1, b2) = if vp == 0.0 {
        if q == 0.0 {
            return Err(Error::DegenerateBranch);
        }
        (s * m, s * q / 2.0)
    } else {
        let root = (q * q + m * m * vp * vp).sqrt();
        if root == 0.0 {
            return Err(Error::DegenerateBranch);
        }
        let sgn = if q < 0.0 { -1.0 } else { 1.0 };
        (s * m * q.abs() / root, s * sgn * root / 2.0)
    };
    let b3 = 0.5 + selection.sign3.value() * params.m_alpha();
    Ok([b1, b2, b3, selection.b4.value()])
}

/// Light-cone radius at which the hard wall coincides with the zero of
/// `M + qr`: returns `q = −M/r₀`.
pub fn hard_wall_q(mass: f64, r0: f64) -> f64 {
    -mass / r0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Policy {
    /// Accept exactly the branches listed with the closed-form solutions.
    Preset,
    /// Derive the verdict from boundary behavior.
    FirstPrinciples,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Preset => "preset",
            Policy::FirstPrinciples => "first-principles",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reason {
    NotInPreset,
    NoPreset,
    DivergesAtOrigin,
    WallConditionUnmet,
    NotVanishingAtWall,
    NotNormalizableAtInfinity,
    PotentialZeroInDomain,
    NodeNotPositive,
    NodeAtWall,
    NodeOutsideDomain,
    ComplexEnergy,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::NotInPreset => "NOT_IN_PRESET",
            Reason::NoPreset => "NO_PRESET",
            Reason::DivergesAtOrigin => "DIVERGES_AT_ORIGIN",
            Reason::WallConditionUnmet => "WALL_CONDITION_UNMET",
            Reason::NotVanishingAtWall => "NOT_VANISHING_AT_WALL",
            Reason::NotNormalizableAtInfinity => "NOT_NORMALIZABLE_AT_INFINITY",
            Reason::PotentialZeroInDomain => "POTENTIAL_ZERO_IN_DOMAIN",
            Reason::NodeNotPositive => "NODE_NOT_POSITIVE",
            Reason::NodeAtWall => "NODE_AT_WALL",
            Reason::NodeOutsideDomain => "NODE_OUTSIDE_DOMAIN",
            Reason::ComplexEnergy => "COMPLEX_ENERGY",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub policy: Policy,
    pub physical: bool,
    pub reasons: Vec<Reason>,
}

/// A solved branch: exponents, node, spectrum and every residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnsatzSolution {
    pub n: u8,
    pub selection: BranchSelection,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub alpha11: Option<f64>,
    pub kappa2: f64,
    pub energies: Option<EnergyPair>,
    pub residuals: Vec<NamedResidual>,
    pub regime: Regime,
    pub system: SystemVariant,
    pub verdict: Verdict,
}

impl AnsatzSolution {
    pub fn b(&self) -> [f64; 4] {
        [self.b1, self.b2, self.b3, self.b4]
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.value)
    }

    pub fn unknowns(&self) -> Unknowns {
        Unknowns {
            b: self.b(),
            alpha11: self.alpha11.unwrap_or(0.0),
            kappa2: self.kappa2,
        }
    }
}

fn assemble(
    params: &PhysicalParams,
    system: &ConstraintSystem,
    regime: Regime,
    n: u8,
    selection: BranchSelection,
    u: Unknowns,
) -> AnsatzSolution {
    let mut sol = AnsatzSolution {
        n,
        selection,
        b1: u.b[0],
        b2: u.b[1],
        b3: u.b[2],
        b4: u.b[3],
        alpha11: (n == 1).then_some(u.alpha11),
        kappa2: u.kappa2,
        energies: energy_pair(u.kappa2, params).ok(),
        residuals: system.residuals(&u),
        regime,
        system: system.variant,
        verdict: Verdict {
            policy: Policy::Preset,
            physical: false,
            reasons: Vec::new(),
        },
    };
    sol.verdict = physicality(&sol, params, Policy::Preset);
    sol
}

/// Node-less solution on one branch. `κ²` comes from the constant matching
/// equation; the `1/r` and `1/(M + qr)` equations are reported, not solved.
pub fn solve_nodeless(
    params: &PhysicalParams,
    regime: Regime,
    selection: BranchSelection,
) -> Result<AnsatzSolution> {
    let variant = SystemVariant::for_state(0, regime)?;
    let system = build_system(params, variant)?;
    let b = branch_values(selection, params)?;
    let base = Unknowns {
        b,
        alpha11: 0.0,
        kappa2: 0.0,
    };
    let kappa2 = system
        .solve_affine("const", base, |u, x| u.kappa2 = x)
        .expect("constant equation has unit slope in kappa2");
    Ok(assemble(
        params,
        &system,
        regime,
        0,
        selection,
        Unknowns { kappa2, ..base },
    ))
}

/// One-node solution on one branch: `α₁¹` from the `1/r` equation, then `κ²`
/// from the `r` equation.
pub fn solve_onenode(
    params: &PhysicalParams,
    regime: Regime,
    selection: BranchSelection,
) -> Result<AnsatzSolution> {
    let variant = SystemVariant::for_state(1, regime)?;
    let system = build_system(params, variant)?;
    let b = branch_values(selection, params)?;
    let base = Unknowns {
        b,
        alpha11: 0.0,
        kappa2: 0.0,
    };
    let alpha11 = system
        .solve_affine("inv_r", base, |u, x| u.alpha11 = x)
        .ok_or(Error::Alpha11Singular)?;
    let with_node = Unknowns { alpha11, ..base };
    let kappa2 = system
        .solve_affine("r", with_node, |u, x| u.kappa2 = x)
        .expect("r equation has unit slope in kappa2");
    Ok(assemble(
        params,
        &system,
        regime,
        1,
        selection,
        Unknowns {
            kappa2,
            ..with_node
        },
    ))
}

pub fn solve(
    params: &PhysicalParams,
    n: u8,
    regime: Regime,
    selection: BranchSelection,
) -> Result<AnsatzSolution> {
    match n {
        0 => solve_nodeless(params, regime, selection),
        1 => solve_onenode(params, regime, selection),
        _ => Err(Error::VariantMismatch(format!(
            "node count {n} is not supported"
        ))),
    }
}

/// Result for one of the eight branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BranchOutcome {
    Solved(Box<AnsatzSolution>),
    Failed {
        branch: BranchSelection,
        error: String,
    },
}

impl BranchOutcome {
    pub fn solution(&self) -> Option<&AnsatzSolution> {
        match self {
            BranchOutcome::Solved(s) => Some(s),
            BranchOutcome::Failed { .. } => None,
        }
    }
}

/// Solves all eight branches in canonical order and grades each under
/// `policy`. Errors that concern the parameters as a whole (invalid
/// parameters, unsupported variant) are returned directly; per-branch
/// failures are kept in the list.
pub fn enumerate(
    params: &PhysicalParams,
    n: u8,
    regime: Regime,
    policy: Policy,
) -> Result<Vec<BranchOutcome>> {
    let variant = SystemVariant::for_state(n, regime)?;
    build_system(params, variant)?;
    Ok(BranchSelection::all()
        .into_iter()
        .map(|sel| match solve(params, n, regime, sel) {
            Ok(mut s) => {
                s.verdict = physicality(&s, params, policy);
                BranchOutcome::Solved(Box::new(s))
            }
            Err(e) => BranchOutcome::Failed {
                branch: sel,
                error: e.to_string(),
            },
        })
        .collect())
}

/// Only the branches accepted under `policy`.
pub fn physical_branches(
    params: &PhysicalParams,
    n: u8,
    regime: Regime,
    policy: Policy,
) -> Result<Vec<AnsatzSolution>> {
    let all = enumerate(params, n, regime, policy)?;
    let phys: Vec<_> = all
        .into_iter()
        .filter_map(|o| match o {
            BranchOutcome::Solved(s) if s.verdict.physical => Some(*s),
            _ => None,
        })
        .collect();
    if phys.is_empty() {
        Err(Error::NoPhysicalBranch {
            policy: policy.to_string(),
        })
    } else {
        Ok(phys)
    }
}

/// Branches listed as physical alongside the closed-form solutions, per
/// regime and node count.
pub fn preset_branches(regime: Regime, n: u8) -> Option<&'static [BranchSelection]> {
    use crate::model::{B4Choice::*, Sign::*};
    const ARB_N0: [BranchSelection; 2] = [
        BranchSelection::new(Minus, Plus, ThreeHalves),
        BranchSelection::new(Plus, Plus, ThreeHalves),
    ];
    const ARB_N1: [BranchSelection; 1] = [BranchSelection::new(Plus, Plus, ThreeHalves)];
    const SMALL_N0: [BranchSelection; 2] = [
        BranchSelection::new(Minus, Plus, ThreeHalves),
        BranchSelection::new(Minus, Plus, MinusHalf),
    ];
    const SMALL_N1: [BranchSelection; 1] = [BranchSelection::new(Minus, Plus, ThreeHalves)];
    match (regime, n) {
        (Regime::Arbitrary, 0) => Some(&ARB_N0),
        (Regime::Arbitrary, 1) => Some(&ARB_N1),
        (Regime::Small, 0) => Some(&SMALL_N0),
        (Regime::Small, 1) => Some(&SMALL_N1),
        _ => None,
    }
}

/// Relative tolerance for boundary coincidences (`M + qr₀ = 0`, `α₁¹ = r₀`).
const WALL_TOL: f64 = 1e-12;

fn node_reasons(sol: &AnsatzSolution, params: &PhysicalParams, out: &mut Vec<Reason>) {
    let Some(a) = sol.alpha11 else { return };
    if a.is_nan() || a <= 0.0 {
        out.push(Reason::NodeNotPositive);
        return;
    }
    let end = sol.regime.domain_end(params);
    if end.is_finite() {
        if (a - end).abs() <= WALL_TOL * end {
            out.push(Reason::NodeAtWall);
        } else if a > end {
            out.push(Reason::NodeOutsideDomain);
        }
    }
}

/// Grades a solution. Node positivity and the node-not-at-wall rule apply
/// under both policies.
pub fn physicality(sol: &AnsatzSolution, params: &PhysicalParams, policy: Policy) -> Verdict {
    let mut reasons = Vec::new();
    match policy {
        Policy::Preset => match preset_branches(sol.regime, sol.n) {
            Some(list) if list.contains(&sol.selection) => {}
            Some(_) => reasons.push(Reason::NotInPreset),
            None => reasons.push(Reason::NoPreset),
        },
        Policy::FirstPrinciples => {
            if sol.b3 < 0.0 {
                reasons.push(Reason::DivergesAtOrigin);
            }
            if sol.regime.has_hard_wall(params) {
                let r0 = params.r0();
                let w0 = params.potential_mass(r0);
                if w0.abs() > WALL_TOL * params.mass.abs().max(params.q.abs() * r0) {
                    reasons.push(Reason::WallConditionUnmet);
                }
                if sol.b4 <= 0.0 {
                    reasons.push(Reason::NotVanishingAtWall);
                }
            } else {
                if sol.b2 >= 0.0 {
                    reasons.push(Reason::NotNormalizableAtInfinity);
                }
                if params.q < 0.0 {
                    reasons.push(Reason::PotentialZeroInDomain);
                }
            }
        }
    }
    node_reasons(sol, params, &mut reasons);
    if sol.energies.is_none() {
        reasons.push(Reason::ComplexEnergy);
    }
    reasons.sort();
    reasons.dedup();
    Verdict {
        policy,
        physical: reasons.is_empty(),
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{B4Choice, Sign};

    const TABLE_BRANCH: BranchSelection =
        BranchSelection::new(Sign::Minus, Sign::Plus, B4Choice::ThreeHalves);

    fn canonical() -> PhysicalParams {
        PhysicalParams::canonical(0.5)
    }

    #[test]
    fn system_sizes_and_partition() {
        let p = canonical();
        for (v, n) in [
            (SystemVariant::ArbN0, 7),
            (SystemVariant::SmallN0, 7),
            (SystemVariant::OneNode, 8),
        ] {
            let s = build_system(&p, v).unwrap();
            assert_eq!(s.equations.len(), n);
            assert_eq!(s.determining().count() + s.diagnostic().count(), n);
            assert_eq!(s.determining().count(), 5);
        }
        let s = build_system(&p.with_varpi(0.2), SystemVariant::OscN0).unwrap();
        assert_eq!(s.equations.len(), 7);
    }

    #[test]
    fn r2_equation_is_quadratic_in_b2() {
        let p = canonical().with_q(0.8);
        let s = build_system(&p, SystemVariant::ArbN0).unwrap();
        let u = Unknowns {
            b: [0.0, 0.3, 0.0, 0.0],
            alpha11: 0.0,
            kappa2: 0.0,
        };
        assert!((s.eval("r2", &u).unwrap() - (4.0 * 0.09 - 0.64)).abs() < 1e-15);
    }

    #[test]
    fn one_node_r2_is_identity_on_matched_branch() {
        let p = canonical();
        let s = build_system(&p, SystemVariant::OneNode).unwrap();
        for a in [-3.0, 0.0, 1.7, 42.0] {
            let u = Unknowns {
                b: [-1.0, -0.5, 2.5, 1.5],
                alpha11: a,
                kappa2: 0.0,
            };
            assert_eq!(s.eval("r2", &u).unwrap(), 0.0);
        }
    }

    #[test]
    fn oscillator_system_reduces_to_arbitrary_at_zero_varpi() {
        let p = canonical();
        let osc = build_system(&p, SystemVariant::OscN0).unwrap();
        let arb = build_system(&p, SystemVariant::ArbN0).unwrap();
        let u = Unknowns {
            b: [0.3, -0.7, 1.2, -0.5],
            alpha11: 0.0,
            kappa2: 2.5,
        };
        assert_eq!(osc.residuals(&u), arb.residuals(&u));
    }

    #[test]
    fn q_zero_is_rejected() {
        let p = canonical().with_q(0.0);
        assert_eq!(
            build_system(&p, SystemVariant::ArbN0).unwrap_err(),
            Error::QZeroUnsupported
        );
    }

    #[test]
    fn table_branch_values() {
        let b = branch_values(TABLE_BRANCH, &canonical()).unwrap();
        assert_eq!(b, [-1.0, -0.5, 2.5, 1.5]);
    }

    #[test]
    fn oscillator_branch_q_zero_limit() {
        let p = canonical().with_q(0.0).with_varpi(0.3);
        let plus = branch_values(
            BranchSelection::new(Sign::Plus, Sign::Plus, B4Choice::ThreeHalves),
            &p,
        )
        .unwrap();
        let minus = branch_values(TABLE_BRANCH, &p).unwrap();
        assert!((plus[1] - 0.15).abs() < 1e-15 && plus[0] == 0.0);
        assert!((minus[1] + 0.15).abs() < 1e-15 && minus[0] == 0.0);
        let degenerate = canonical().with_q(0.0);
        assert_eq!(
            branch_values(TABLE_BRANCH, &degenerate).unwrap_err(),
            Error::DegenerateBranch
        );
    }

    #[test]
    fn b3_branches_coincide_at_m_zero() {
        let mut p = PhysicalParams::canonical(1.0);
        p.m = 0;
        let a = branch_values(
            BranchSelection::new(Sign::Plus, Sign::Plus, B4Choice::ThreeHalves),
            &p,
        )
        .unwrap();
        let b = branch_values(
            BranchSelection::new(Sign::Plus, Sign::Minus, B4Choice::ThreeHalves),
            &p,
        )
        .unwrap();
        assert_eq!(a[2], 0.5);
        assert_eq!(b[2], 0.5);
    }

    #[test]
    fn table_one_nodeless_solution() {
        let s = solve_nodeless(&canonical(), Regime::Small, TABLE_BRANCH).unwrap();
        assert!((s.kappa2 - 8.0).abs() < 1e-12);
        let e = s.energies.unwrap();
        assert!((e.e_plus - 3.15229).abs() < 1e-5);
        assert!((e.e_minus + 3.17229).abs() < 1e-5);
        assert!((s.residual("inv_r").unwrap() - 6.0).abs() < 1e-12);
        assert!((s.residual("inv_w").unwrap() - 16.0).abs() < 1e-12);
        assert!(s.verdict.physical);
    }

    #[test]
    fn table_two_nodeless_solution() {
        let sel = BranchSelection::new(Sign::Minus, Sign::Plus, B4Choice::MinusHalf);
        let s = solve_nodeless(&canonical(), Regime::Small, sel).unwrap();
        assert!((s.kappa2 - 4.0).abs() < 1e-12);
        let e = s.energies.unwrap();
        assert!((e.e_plus - 2.43951).abs() < 1e-5);
        assert!((e.e_minus + 2.45951).abs() < 1e-5);
    }

    #[test]
    fn table_three_one_node_solution() {
        let s = solve_onenode(&canonical(), Regime::Small, TABLE_BRANCH).unwrap();
        assert!((s.alpha11.unwrap() - 8.0 / 3.0).abs() < 1e-12);
        // κ² = 10 − m²ω²
        assert!((s.kappa2 - (10.0 - 1e-4)).abs() < 1e-12);
        let e = s.energies.unwrap();
        assert!((e.e_plus - 3.45410).abs() < 1e-5);
        assert!((e.e_minus + 3.47410).abs() < 1e-5);

        let p = PhysicalParams::canonical(0.1);
        let s = solve_onenode(&p, Regime::Small, TABLE_BRANCH).unwrap();
        assert!((s.alpha11.unwrap() - 120.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn node_equation_linear_coefficients() {
        // 32 − 12α₁¹ at α = 0.5 and 480 − 44α₁¹ at α = 0.1.
        for (alpha, c0, c1) in [(0.5, 32.0, -12.0), (0.1, 480.0, -44.0)] {
            let p = PhysicalParams::canonical(alpha);
            let s = build_system(&p, SystemVariant::OneNode).unwrap();
            let b = branch_values(TABLE_BRANCH, &p).unwrap();
            let at = |a| {
                s.eval(
                    "inv_r",
                    &Unknowns {
                        b,
                        alpha11: a,
                        kappa2: 0.0,
                    },
                )
                .unwrap()
            };
            assert!((at(0.0) - c0).abs() < 1e-9);
            assert!((at(1.0) - at(0.0) - c1).abs() < 1e-9);
        }
    }

    #[test]
    fn determining_residuals_vanish_on_every_branch() {
        let cases = [
            (canonical(), Regime::Small, 0u8),
            (canonical(), Regime::Arbitrary, 0),
            (
                canonical().with_varpi(0.4).with_q(-0.7),
                Regime::Oscillator,
                0,
            ),
            (canonical(), Regime::Small, 1),
            (
                PhysicalParams::canonical(0.8).with_q(-0.3),
                Regime::Arbitrary,
                1,
            ),
        ];
        for (p, regime, n) in cases {
            for sel in BranchSelection::all() {
                let Ok(s) = solve(&p, n, regime, sel) else {
                    continue;
                };
                for r in s.residuals.iter().filter(|r| r.role == Role::Determining) {
                    assert!(
                        r.value.abs() <= 1e-10,
                        "{regime:?} n={n} {sel} {}: {}",
                        r.name,
                        r.value
                    );
                }
            }
        }
    }

    #[test]
    fn hard_wall_slopes() {
        assert_eq!(hard_wall_q(1.0, 2.0), -0.5);
        assert!((hard_wall_q(1.0, 1.5) + 2.0 / 3.0).abs() < 1e-15);
        assert!(hard_wall_q(1.0, 1e300).abs() < 1e-299);
    }

    #[test]
    fn small_regime_preset() {
        let out = enumerate(&canonical(), 0, Regime::Small, Policy::Preset).unwrap();
        assert_eq!(out.len(), 8);
        let accepted: Vec<_> = out
            .iter()
            .filter_map(|o| o.solution())
            .filter(|s| s.verdict.physical)
            .map(|s| s.selection.id())
            .collect();
        assert_eq!(accepted, vec!["-+3/2", "-+-1/2"]);
    }

    #[test]
    fn negative_node_is_rejected_under_both_policies() {
        let mut s = solve_onenode(&canonical(), Regime::Small, TABLE_BRANCH).unwrap();
        s.alpha11 = Some(-2.0);
        for policy in [Policy::Preset, Policy::FirstPrinciples] {
            let v = physicality(&s, &canonical(), policy);
            assert!(!v.physical);
            assert!(v.reasons.contains(&Reason::NodeNotPositive));
        }
    }

    #[test]
    fn growing_gaussian_is_not_normalizable() {
        let sel = BranchSelection::new(Sign::Plus, Sign::Plus, B4Choice::ThreeHalves);
        let s = solve_nodeless(&canonical(), Regime::Small, sel).unwrap();
        assert!(s.b2 > 0.0);
        let v = physicality(&s, &canonical(), Policy::FirstPrinciples);
        assert!(v.reasons.contains(&Reason::NotNormalizableAtInfinity));
    }

    #[test]
    fn first_principles_hard_wall() {
        // r₀ = 2 at ωα = 1/2, and q = −M/r₀ puts the zero of M + qr on the wall.
        let p = PhysicalParams {
            mass: 1.0,
            q: hard_wall_q(1.0, 2.0),
            varpi: 0.0,
            omega: 1.0,
            alpha: 0.5,
            m: 1,
            k: 1.0,
        };
        let decaying = BranchSelection::new(Sign::Plus, Sign::Plus, B4Choice::ThreeHalves);
        let good = solve_nodeless(&p, Regime::Arbitrary, decaying).unwrap();
        assert!(physicality(&good, &p, Policy::FirstPrinciples).physical);
        let sel = BranchSelection::new(Sign::Plus, Sign::Plus, B4Choice::MinusHalf);
        let bad = solve_nodeless(&p, Regime::Arbitrary, sel).unwrap();
        let v = physicality(&bad, &p, Policy::FirstPrinciples);
        assert_eq!(v.reasons, vec![Reason::NotVanishingAtWall]);

        let growing = solve_nodeless(&p, Regime::Arbitrary, TABLE_BRANCH).unwrap();
        assert!(growing.verdict.reasons.contains(&Reason::ComplexEnergy));

        let off = p.with_q(-0.4);
        let s = solve_nodeless(&off, Regime::Arbitrary, decaying).unwrap();
        assert!(physicality(&s, &off, Policy::FirstPrinciples)
            .reasons
            .contains(&Reason::WallConditionUnmet));
    }

    #[test]
    fn node_past_the_wall() {
        let p = PhysicalParams {
            mass: 1.0,
            q: hard_wall_q(1.0, 2.0),
            varpi: 0.0,
            omega: 1.0,
            alpha: 0.5,
            m: 1,
            k: 1.0,
        };
        let mut s = solve_onenode(&p, Regime::Arbitrary, TABLE_BRANCH).unwrap();
        s.alpha11 = Some(3.0);
        assert!(physicality(&s, &p, Policy::FirstPrinciples)
            .reasons
            .contains(&Reason::NodeOutsideDomain));
        s.alpha11 = Some(2.0);
        assert!(physicality(&s, &p, Policy::Preset)
            .reasons
            .contains(&Reason::NodeAtWall));
    }

    #[test]
    fn oscillator_has_no_preset() {
        let p = canonical().with_varpi(0.2);
        let s = solve_nodeless(&p, Regime::Oscillator, TABLE_BRANCH).unwrap();
        assert_eq!(s.verdict.reasons, vec![Reason::NoPreset]);
        assert!(physicality(&s, &p, Policy::FirstPrinciples).physical);
    }

    #[test]
    fn non_oscillator_regimes_reject_varpi() {
        let p = canonical().with_varpi(0.2);
        assert!(matches!(
            solve_nodeless(&p, Regime::Small, TABLE_BRANCH),
            Err(Error::VariantMismatch(_))
        ));
        assert!(matches!(
            solve_onenode(&p, Regime::Oscillator, TABLE_BRANCH),
            Err(Error::VariantMismatch(_))
        ));
    }
}
