//! Reduction of the five-component DKP system to a single radial equation.
//!
//! Three independent routes are implemented so they can check each other:
//!
//! 1. [`eliminate_components`] builds `Φ₂…Φ₅` from `Φ₁` and substitutes them
//!    back into the first component equation, in complex arithmetic.
//! 2. [`RadialOperator`] in [`OperatorVariant::FirstComponent`] form is the
//!    second-order equation for `F(r)` decomposed on a fixed basis of radial
//!    terms.
//! 3. The R-form variants are the same equation after the substitution
//!    `F = (M + qr)^{1/2} r^{−1/2} R`, which removes the first-derivative term.
//!
//! Test functions carry closed-form derivatives ([`Jet`]) so the comparisons
//! are limited by round-off only.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    check_grid, uniform_grid, Normalization, PhysicalParams, SampleKind, SampledFunction,
};

/// Value and first two derivatives of a radial function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(self.value * c, self.d1 * c, self.d2 * c)
    }
}

impl Mul for Jet {
    type Output = Jet;

    /// Leibniz rule.
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Add for Jet {
    type Output = Jet;

    fn add(self, o: Jet) -> Jet {
        Jet::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

/// A radial function with closed-form first and second derivatives.
pub trait RadialFunction {
    fn jet(&self, r: f64) -> Jet;
}

impl<F: Fn(f64) -> Jet> RadialFunction for F {
    fn jet(&self, r: f64) -> Jet {
        self(r)
    }
}

/// `p(r)·exp(−(r − c)²/(2w²))` with a polynomial prefactor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianPoly {
    /// Polynomial coefficients, constant term first.
    pub coeffs: Vec<f64>,
    pub center: f64,
    pub width: f64,
}

impl GaussianPoly {
    pub fn gaussian(center: f64, width: f64) -> Self {
        Self {
            coeffs: vec![1.0],
            center,
            width,
        }
    }

    pub fn random<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Self {
        let span = hi - lo;
        let degree = rng.gen_range(0..=3);
        let coeffs = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self {
            coeffs,
            center: lo + span * rng.gen_range(0.2..0.8),
            width: span * rng.gen_range(0.1..0.4),
        }
    }
}

impl RadialFunction for GaussianPoly {
    fn jet(&self, r: f64) -> Jet {
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * r + 2.0 * dp;
            dp = dp * r + p;
            p = p * r + c;
        }
        let x = (r - self.center) / self.width;
        let g = (-0.5 * x * x).exp();
        let dg = -x / self.width * g;
        let ddg = (x * x - 1.0) / (self.width * self.width) * g;
        Jet::new(p, dp, ddp) * Jet::new(g, dg, ddg)
    }
}

/// Coefficients on the radial basis `{r², r, 1, 1/r, 1/r², 1/W, 1/W²}` with
/// `W = M + qr`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Terms {
    pub r2: f64,
    pub r: f64,
    pub constant: f64,
    pub inv_r: f64,
    pub inv_r2: f64,
    pub inv_w: f64,
    pub inv_w2: f64,
}

impl Terms {
    /// Evaluates the expansion at `r` where `M + qr = w`.
    pub fn eval(&self, r: f64, w: f64) -> f64 {
        let mut acc =
            self.r2 * r * r + self.r * r + self.constant + self.inv_r / r + self.inv_r2 / (r * r);
        if self.inv_w != 0.0 {
            acc += self.inv_w / w;
        }
        if self.inv_w2 != 0.0 {
            acc += self.inv_w2 / (w * w);
        }
        acc
    }

    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("r2", self.r2),
            ("r", self.r),
            ("const", self.constant),
            ("inv_r", self.inv_r),
            ("inv_r2", self.inv_r2),
            ("inv_w", self.inv_w),
            ("inv_w2", self.inv_w2),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.named().iter().all(|(_, c)| *c == 0.0)
    }
}

/// Which form of the radial equation an operator represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OperatorVariant {
    /// Second-order equation for `F(r)`, first-derivative term included.
    FirstComponent,
    /// R-form with the DKP oscillator term.
    Oscillator,
    /// R-form at `ϖ = 0`, arbitrary `ωα`.
    Arbitrary,
    /// R-form at `ϖ = 0` without the rotational constant `m_α²(ωα)²`.
    Small,
}

/// `u'' + P(r)u' + Q(r)u` with `P`, `Q` expanded on [`Terms`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialOperator {
    pub variant: OperatorVariant,
    pub params: PhysicalParams,
    pub kappa2: f64,
    pub energy: Option<f64>,
    pub first_derivative: Terms,
    pub potential: Terms,
}

/// Builds the radial operator at trial energy `energy`.
pub fn radial_operator(
    params: &PhysicalParams,
    energy: f64,
    variant: OperatorVariant,
) -> Result<RadialOperator> {
    let mut op = RadialOperator::with_kappa2(params, params.kappa2(energy), variant)?;
    op.energy = Some(energy);
    Ok(op)
}

impl RadialOperator {
    /// Builds the operator directly from `κ²`, without committing to one of
    /// the two energy roots.
    pub fn with_kappa2(
        params: &PhysicalParams,
        kappa2: f64,
        variant: OperatorVariant,
    ) -> Result<Self> {
        params.validate()?;
        let PhysicalParams {
            mass: m,
            q,
            varpi: vp,
            ..
        } = *params;
        let m_a = params.m_alpha();
        let rot = params.rotational_constant();

        if variant != OperatorVariant::FirstComponent && m == 0.0 {
            return Err(Error::MassZeroUnsupported);
        }
        if matches!(variant, OperatorVariant::Arbitrary | OperatorVariant::Small) && vp != 0.0 {
            return Err(Error::VariantMismatch(format!(
                "{variant:?} form requires varpi = 0, got {vp}"
            )));
        }

        let (first_derivative, potential) = match variant {
            OperatorVariant::FirstComponent => (
                Terms {
                    inv_r: 1.0,
                    inv_w: -q,
                    ..Terms::default()
                },
                Terms {
                    r2: -(q * q + m * m * vp * vp),
                    r: -2.0 * m * q,
                    constant: m * vp + rot + kappa2,
                    inv_r2: -m_a * m_a,
                    inv_w: m * m * vp,
                    ..Terms::default()
                },
            ),
            OperatorVariant::Oscillator | OperatorVariant::Arbitrary | OperatorVariant::Small => {
                let rot = if variant == OperatorVariant::Small {
                    0.0
                } else {
                    rot
                };
                (
                    Terms::default(),
                    Terms {
                        r2: -(q * q + m * m * vp * vp),
                        r: -2.0 * m * q,
                        constant: rot + m * vp + kappa2,
                        inv_r: q / (2.0 * m),
                        inv_r2: 0.25 - m_a * m_a,
                        inv_w: (-q * q + 2.0 * m * m * m * vp) / (2.0 * m),
                        inv_w2: -0.75 * q * q,
                    },
                )
            }
        };
        Ok(Self {
            variant,
            params: *params,
            kappa2,
            energy: None,
            first_derivative,
            potential,
        })
    }

    /// `P(r)`, the first-derivative coefficient.
    pub fn p(&self, r: f64) -> f64 {
        self.first_derivative.eval(r, self.params.potential_mass(r))
    }

    /// `Q(r)`, the bracket multiplying the function itself.
    pub fn q(&self, r: f64) -> f64 {
        self.potential.eval(r, self.params.potential_mass(r))
    }

    pub fn apply_jet(&self, r: f64, u: Jet) -> f64 {
        u.d2 + self.p(r) * u.d1 + self.q(r) * u.value
    }

    pub fn apply<F: RadialFunction + ?Sized>(&self, f: &F, r: f64) -> f64 {
        self.apply_jet(r, f.jet(r))
    }

    pub fn apply_on_grid<F: RadialFunction + ?Sized>(
        &self,
        f: &F,
        grid: &[f64],
    ) -> Result<SampledFunction> {
        let values = grid.iter().map(|&r| self.apply(f, r)).collect();
        SampledFunction::new(
            grid.to_vec(),
            values,
            SampleKind::Residual,
            Normalization::Raw,
        )
    }
}

/// Five spinor components on a shared grid. `Φ₃` is purely imaginary, the
/// others real, once the `e^{imφ}e^{ikz}` factor is stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorSample {
    pub grid: Vec<f64>,
    pub components: [Vec<Complex64>; 5],
    pub m: i32,
    pub k: f64,
    pub energy: f64,
}

impl SpinorSample {
    /// Real or imaginary part of component `index` (0-based), whichever
    /// carries the component.
    pub fn component(&self, index: usize) -> Result<SampledFunction> {
        let kinds = [
            SampleKind::Phi1,
            SampleKind::Phi2,
            SampleKind::Phi3,
            SampleKind::Phi4,
            SampleKind::Phi5,
        ];
        let values = self.components[index]
            .iter()
            .map(|z| if index == 2 { z.im } else { z.re })
            .collect();
        SampledFunction::new(self.grid.clone(), values, kinds[index], Normalization::Raw)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub spinor: SpinorSample,
    /// First component equation multiplied by `M + qr`.
    pub residual: SampledFunction,
    /// Largest imaginary part discarded from the residual.
    pub max_imaginary: f64,
}

fn check_potential_crossing(params: &PhysicalParams, grid: &[f64]) -> Result<()> {
    let mut prev: Option<f64> = None;
    for &r in grid {
        let w = params.potential_mass(r);
        if w == 0.0 {
            return Err(Error::PotentialZeroCrossing { r });
        }
        if let Some(pw) = prev {
            if pw.signum() != w.signum() {
                return Err(Error::PotentialZeroCrossing {
                    r: -params.mass / params.q,
                });
            }
        }
        prev = Some(w);
    }
    Ok(())
}

/// Expresses `Φ₂…Φ₅` through `Φ₁ = e^{imφ}e^{ikz}F(r)` and returns the
/// residual of the remaining component equation, scaled by `M + qr`.
pub fn eliminate_components<F: RadialFunction + ?Sized>(
    phi1: &F,
    params: &PhysicalParams,
    energy: f64,
    grid: &[f64],
) -> Result<Elimination> {
    check_grid(grid)?;
    params.validate_at(grid)?;
    check_potential_crossing(params, grid)?;

    let i = Complex64::i();
    let mv = params.mass * params.varpi;
    let m = f64::from(params.m);
    let k = params.k;
    let n = grid.len();
    let mut comps: [Vec<Complex64>; 5] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut residual = Vec::with_capacity(n);
    let mut max_im: f64 = 0.0;

    for &r in grid {
        let f = phi1.jet(r);
        let w = params.potential_mass(r);
        let dw = params.q;
        let rho = params.rho(r);
        let s = (1.0 - rho * rho).sqrt();
        let dphi = i * m; // ∂_φ
        let dz = i * k; // ∂_z

        let phi1 = Complex64::from(f.value);
        let phi2 = energy * phi1 / (s * w);
        let g = f.d1 + mv * r * f.value;
        let dg = f.d2 + mv * f.value + mv * r * f.d1;
        let phi3 = i * g / w;
        let dphi3 = i * (dg / w - g * dw / (w * w));
        let azimuthal = energy * rho / s + i * (s / (params.alpha * r)) * dphi;
        let phi4 = azimuthal * phi1 / w;
        let phi5 = i * dz * phi1 / w;

        let first = -w * phi1 + (energy / s) * phi2
            - i * (dphi3 - mv * r * phi3 + phi3 / r)
            - (energy * rho / s + i * (s / (params.alpha * r)) * dphi) * phi4
            - i * dz * phi5;
        let res = first * w;
        max_im = max_im.max(res.im.abs());
        residual.push(res.re);
        for (c, v) in comps.iter_mut().zip([phi1, phi2, phi3, phi4, phi5]) {
            c.push(v);
        }
    }

    Ok(Elimination {
        spinor: SpinorSample {
            grid: grid.to_vec(),
            components: comps,
            m: params.m,
            k,
            energy,
        },
        residual: SampledFunction::new(
            grid.to_vec(),
            residual,
            SampleKind::Residual,
            Normalization::Raw,
        )?,
        max_imaginary: max_im,
    })
}

/// The factor `A = (M + qr)^{1/2} r^{−1/2}` with its derivatives.
pub fn transform_factor(params: &PhysicalParams, r: f64) -> Result<Jet> {
    let w = params.potential_mass(r);
    if w.is_nan() || w <= 0.0 {
        return Err(Error::PotentialNonpositive { r, value: w });
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidGrid(format!("radius {r} must be positive")));
    }
    let q = params.q;
    let a = (w / r).sqrt();
    let l = q / (2.0 * w) - 0.5 / r; // A'/A
    let dl = -q * q / (2.0 * w * w) + 0.5 / (r * r);
    Ok(Jet::new(a, a * l, a * (dl + l * l)))
}

/// `F = (M + qr)^{1/2} r^{−1/2} R` for an R-form function with analytic
/// derivatives.
pub struct FFromR<'a, R: RadialFunction + ?Sized> {
    pub inner: &'a R,
    pub params: PhysicalParams,
}

impl<R: RadialFunction + ?Sized> RadialFunction for FFromR<'_, R> {
    fn jet(&self, r: f64) -> Jet {
        let a = transform_factor(&self.params, r).unwrap_or(Jet::new(f64::NAN, f64::NAN, f64::NAN));
        a * self.inner.jet(r)
    }
}

/// Maps sampled `F` to `R = (M + qr)^{−1/2} r^{1/2} F`.
pub fn f_to_r(f: &SampledFunction, params: &PhysicalParams) -> Result<SampledFunction> {
    let values = f
        .grid
        .iter()
        .zip(&f.values)
        .map(|(&r, &v)| transform_factor(params, r).map(|a| v / a.value))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(f.grid.clone(), values, SampleKind::R, f.normalization)
}

/// Inverse of [`f_to_r`].
pub fn r_to_f(rf: &SampledFunction, params: &PhysicalParams) -> Result<SampledFunction> {
    let values = rf
        .grid
        .iter()
        .zip(&rf.values)
        .map(|(&r, &v)| transform_factor(params, r).map(|a| v * a.value))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(rf.grid.clone(), values, SampleKind::F, rf.normalization)
}

/// Fourth-order central differences on a uniform grid. Returns the interior
/// grid (two points trimmed at each end) with first and second derivatives.
pub fn finite_difference_jets(sample: &SampledFunction) -> Result<(Vec<f64>, Vec<Jet>)> {
    let n = sample.len();
    if n < 5 {
        return Err(Error::InvalidGrid(
            "need at least 5 points for 4th-order differences".into(),
        ));
    }
    let h = sample.grid[1] - sample.grid[0];
    let uniform = sample
        .grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !uniform {
        return Err(Error::InvalidGrid(
            "finite differences need a uniform grid".into(),
        ));
    }
    let y = &sample.values;
    let mut grid = Vec::with_capacity(n - 4);
    let mut jets = Vec::with_capacity(n - 4);
    for i in 2..n - 2 {
        let d1 = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
        let d2 = (-y[i + 2] + 16.0 * y[i + 1] - 30.0 * y[i] + 16.0 * y[i - 1] - y[i - 2])
            / (12.0 * h * h);
        grid.push(sample.grid[i]);
        jets.push(Jet::new(y[i], d1, d2));
    }
    Ok((grid, jets))
}

/// Applies an operator to externally supplied samples via
/// [`finite_difference_jets`].
pub fn apply_to_samples(op: &RadialOperator, sample: &SampledFunction) -> Result<SampledFunction> {
    let (grid, jets) = finite_difference_jets(sample)?;
    let values = grid
        .iter()
        .zip(&jets)
        .map(|(&r, &j)| op.apply_jet(r, j))
        .collect();
    SampledFunction::new(grid, values, SampleKind::Residual, Normalization::Raw)
}

/// Tolerance used by [`operator_equivalence_report`].
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub params: PhysicalParams,
    pub energy: f64,
    pub trials: usize,
    pub seed: u64,
    /// Component elimination vs the F-form operator.
    pub elimination_max_rel: f64,
    /// F-form operator after substitution vs the R-form operator.
    pub substitution_max_rel: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `max|a − b| / max(max|a|, max|b|)` over paired samples.
pub fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |s, v| s.max(v.abs()));
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |s, (x, y)| s.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// A grid inside the physical domain: positive radii, inside the light cone
/// and on the positive side of `M + qr`.
pub fn verification_grid(params: &PhysicalParams, points: usize) -> Vec<f64> {
    let mut hi: f64 = 6.0;
    hi = hi.min(0.9 * params.r0());
    if params.q < 0.0 {
        hi = hi.min(0.9 * (-params.mass / params.q));
    }
    let lo = (0.05 * hi).min(0.1);
    uniform_grid(lo, hi, points)
}

/// Runs both derivation checks on `trials` random Gaussian-times-polynomial
/// test functions.
pub fn operator_equivalence_report(
    params: &PhysicalParams,
    energy: f64,
    trials: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    params.validate()?;
    let grid = verification_grid(params, 64);
    let lo = grid[0];
    let hi = grid[grid.len() - 1];
    let f_op = radial_operator(params, energy, OperatorVariant::FirstComponent)?;
    let r_op = if trials > 0 {
        Some(radial_operator(
            params,
            energy,
            OperatorVariant::Oscillator,
        )?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elim_dev: f64 = 0.0;
    let mut subs_dev: f64 = 0.0;

    for _ in 0..trials {
        let test = GaussianPoly::random(&mut rng, lo, hi);

        let elim = eliminate_components(&test, params, energy, &grid)?;
        let direct: Vec<f64> = grid.iter().map(|&r| f_op.apply(&test, r)).collect();
        elim_dev = elim_dev.max(max_relative_deviation(&elim.residual.values, &direct));

        let r_op = r_op.as_ref().expect("built when trials > 0");
        let f = FFromR {
            inner: &test,
            params: *params,
        };
        let mut lhs = Vec::with_capacity(grid.len());
        let mut rhs = Vec::with_capacity(grid.len());
        for &r in &grid {
            let a = transform_factor(params, r)?;
            lhs.push(f_op.apply(&f, r) / a.value);
            rhs.push(r_op.apply(&test, r));
        }
        subs_dev = subs_dev.max(max_relative_deviation(&lhs, &rhs));
    }

    Ok(EquivalenceReport {
        params: *params,
        energy,
        trials,
        seed,
        elimination_max_rel: elim_dev,
        substitution_max_rel: subs_dev,
        tolerance: EQUIVALENCE_TOLERANCE,
        pass: elim_dev < EQUIVALENCE_TOLERANCE && subs_dev < EQUIVALENCE_TOLERANCE,
    })
}
