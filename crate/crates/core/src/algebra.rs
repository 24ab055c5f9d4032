//! The five-dimensional DKP representation, the rotating-frame tetrad, the
//! curved-space beta matrices and the spin connections.
//!
//! Two signatures coexist here and are never mixed:
//!
//! * frame indices of the beta matrices obey the Kemmer algebra with
//!   `η = diag(+1, −1, −1, −1)` ([`ALGEBRA_ETA`]), the only signature under
//!   which `(β⁰)³ = β⁰` holds for this representation;
//! * coordinate indices use the rotating cosmic-string line element, written
//!   with signature `(−, +, +, +)` ([`METRIC_ETA`]).
//!
//! The tetrad is orthonormal with respect to [`METRIC_ETA`]. Contracting it
//! with [`ALGEBRA_ETA`] therefore yields `−g^{μν}`, which is the metric the
//! curved trilinear identity sees.
//!
//! Coordinates are ordered `(t, r, φ, z)` and frame legs `(0, 1, 2, 3)`.

use nalgebra::{Matrix4, SMatrix};
use serde::Serialize;

use crate::error::Result;
use crate::model::PhysicalParams;

pub type Mat5 = SMatrix<f64, 5, 5>;
pub type IMat5 = SMatrix<i64, 5, 5>;

/// Frame metric used by the Kemmer algebra.
pub const ALGEBRA_ETA: [i64; 4] = [1, -1, -1, -1];
/// Frame metric under which the tetrad reproduces the line element.
pub const METRIC_ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

pub const COORDINATE_NAMES: [&str; 4] = ["t", "r", "phi", "z"];

/// The flat beta matrices with exact integer entries.
///
/// `β⁰` carries `θ = [[0,1],[1,0]]` in its upper-left block; `βⁱ` couples the
/// first component to component `2 + i` through the `ρⁱ` rows.
pub fn flat_betas_exact() -> [IMat5; 4] {
    let mut b0 = IMat5::zeros();
    b0[(0, 1)] = 1;
    b0[(1, 0)] = 1;
    let spatial = |i: usize| {
        let mut b = IMat5::zeros();
        b[(0, 1 + i)] = -1;
        b[(1 + i, 0)] = 1;
        b
    };
    [b0, spatial(1), spatial(2), spatial(3)]
}

pub fn flat_betas() -> [Mat5; 4] {
    flat_betas_exact().map(|b| b.map(|x| x as f64))
}

/// One failing `(a, b, c)` triple of the Kemmer algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrilinearFailure {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// Checks `βᵃβᵇβᶜ + βᶜβᵇβᵃ = ηᵃᵇβᶜ + ηᶜᵇβᵃ` for all 64 triples in integer
/// arithmetic under the frame metric `eta`.
pub fn flat_trilinear_failures(eta: [i64; 4]) -> Vec<TrilinearFailure> {
    let b = flat_betas_exact();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let lhs = b[i] * b[j] * b[k] + b[k] * b[j] * b[i];
                let mut rhs = IMat5::zeros();
                if i == j {
                    rhs += b[k] * eta[i];
                }
                if k == j {
                    rhs += b[i] * eta[k];
                }
                if lhs != rhs {
                    out.push(TrilinearFailure { a: i, b: j, c: k });
                }
            }
        }
    }
    out
}

fn commutator(a: &Mat5, b: &Mat5) -> Mat5 {
    a * b - b * a
}

/// The tetrad `e_a^μ`, rows are frame legs and columns coordinates.
///
/// The off-diagonal entry `ωαr/√(1−ρ²)` sits on leg 2 with coordinate `t`.
/// Reading it on leg 0 with coordinate `φ` instead would break both the
/// metric reconstruction and the curved `β^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrad {
    pub e: Matrix4<f64>,
    pub r: f64,
}

pub fn tetrad(params: &PhysicalParams, r: f64) -> Result<Tetrad> {
    let rho = params.check_rho(r)?;
    let s = (1.0 - rho * rho).sqrt();
    let mut e = Matrix4::zeros();
    e[(0, 0)] = 1.0 / s;
    e[(1, 1)] = 1.0;
    e[(2, 0)] = rho / s;
    e[(2, 2)] = s / (params.alpha * r);
    e[(3, 3)] = 1.0;
    Ok(Tetrad { e, r })
}

impl Tetrad {
    /// `Σ_a eta[a] e_a^μ e_a^ν`.
    pub fn contract(&self, eta: [f64; 4]) -> Matrix4<f64> {
        let mut g = Matrix4::zeros();
        for mu in 0..4 {
            for nu in 0..4 {
                g[(mu, nu)] = (0..4)
                    .map(|a| eta[a] * self.e[(a, mu)] * self.e[(a, nu)])
                    .sum();
            }
        }
        g
    }

    /// Largest entry of `|η^{ab} e_a^μ e_b^ν − g^{μν}|` against the closed-form
    /// inverse of the line element.
    pub fn metric_defect(&self, params: &PhysicalParams) -> f64 {
        let g = self.contract(METRIC_ETA);
        (g - inverse_metric(params, self.r)).amax()
    }
}

/// Covariant metric `g_{μν}` of the rotating cosmic string.
pub fn metric(params: &PhysicalParams, r: f64) -> Matrix4<f64> {
    let (w, a) = (params.omega, params.alpha);
    let rho = params.rho(r);
    let mut g = Matrix4::zeros();
    g[(0, 0)] = -(1.0 - rho * rho);
    g[(0, 2)] = w * a * a * r * r;
    g[(2, 0)] = g[(0, 2)];
    g[(1, 1)] = 1.0;
    g[(2, 2)] = a * a * r * r;
    g[(3, 3)] = 1.0;
    g
}

/// `∂_r g_{μν}`; the metric depends on no other coordinate.
pub fn metric_dr(params: &PhysicalParams, r: f64) -> Matrix4<f64> {
    let (w, a) = (params.omega, params.alpha);
    let mut d = Matrix4::zeros();
    d[(0, 0)] = 2.0 * w * w * a * a * r;
    d[(0, 2)] = 2.0 * w * a * a * r;
    d[(2, 0)] = d[(0, 2)];
    d[(2, 2)] = 2.0 * a * a * r;
    d
}

/// Closed-form contravariant metric `g^{μν}`.
pub fn inverse_metric(params: &PhysicalParams, r: f64) -> Matrix4<f64> {
    let rho = params.rho(r);
    let ar = params.alpha * r;
    let mut g = Matrix4::zeros();
    g[(0, 0)] = -1.0;
    g[(0, 2)] = params.omega;
    g[(2, 0)] = params.omega;
    g[(1, 1)] = 1.0;
    g[(2, 2)] = (1.0 - rho * rho) / (ar * ar);
    g[(3, 3)] = 1.0;
    g
}

/// Flat and curved beta matrices at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSet {
    pub flat: [Mat5; 4],
    /// `β^t, β^r, β^φ, β^z`.
    pub curved: [Mat5; 4],
    pub eta: [f64; 4],
}

impl BetaSet {
    pub fn at(params: &PhysicalParams, r: f64) -> Result<Self> {
        Ok(Self {
            flat: flat_betas(),
            curved: curved_betas(params, r)?,
            eta: ALGEBRA_ETA.map(|x| x as f64),
        })
    }
}

/// `β^μ = e_a^μ β^a`, written out per coordinate.
pub fn curved_betas(params: &PhysicalParams, r: f64) -> Result<[Mat5; 4]> {
    let rho = params.check_rho(r)?;
    let s = (1.0 - rho * rho).sqrt();
    let [b0, b1, b2, b3] = flat_betas();
    Ok([(b0 + b2 * rho) / s, b1, b2 * (s / (params.alpha * r)), b3])
}

/// Same matrices assembled generically from the tetrad; used to cross-check
/// the hand-written [`curved_betas`].
pub fn curved_betas_from_tetrad(tetrad: &Tetrad) -> [Mat5; 4] {
    let flat = flat_betas();
    std::array::from_fn(|mu| (0..4).fold(Mat5::zeros(), |acc, a| acc + flat[a] * tetrad.e[(a, mu)]))
}

/// Largest deviation of `β^μβ^νβ^λ + β^λβ^νβ^μ − G^{μν}β^λ − G^{λν}β^μ` over
/// all coordinate triples, relative to the larger side's peak entry (floored
/// at 1), with `G = −g^{μν}` (the inverse metric in the
/// algebra's signature).
pub fn curved_trilinear_defect(params: &PhysicalParams, r: f64) -> Result<f64> {
    let b = curved_betas(params, r)?;
    let g = -inverse_metric(params, r);
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let lhs = b[i] * b[j] * b[k] + b[k] * b[j] * b[i];
                let rhs = b[k] * g[(i, j)] + b[i] * g[(k, j)];
                let scale = lhs.amax().max(rhs.amax()).max(1.0);
                worst = worst.max((lhs - rhs).amax() / scale);
            }
        }
    }
    Ok(worst)
}

/// Spin connection matrices `Γ_t, Γ_r, Γ_φ, Γ_z` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinConnectionSet {
    pub gamma_t: Mat5,
    pub gamma_r: Mat5,
    pub gamma_phi: Mat5,
    pub gamma_z: Mat5,
}

impl SpinConnectionSet {
    pub fn as_array(&self) -> [Mat5; 4] {
        [self.gamma_t, self.gamma_r, self.gamma_phi, self.gamma_z]
    }
}

/// The closed-form spin connections, entry by entry.
pub fn spin_connections(params: &PhysicalParams, r: f64) -> Result<SpinConnectionSet> {
    let rho = params.check_rho(r)?;
    let s2 = 1.0 - rho * rho;
    let s = s2.sqrt();
    let wa = params.omega_alpha();

    // Shared pattern of Γ_t and Γ_φ.
    let mut rot = Mat5::zeros();
    rot[(1, 2)] = -rho;
    rot[(2, 1)] = -rho;
    rot[(2, 3)] = 1.0;
    rot[(3, 2)] = -1.0;

    let mut radial = Mat5::zeros();
    radial[(1, 3)] = -1.0;
    radial[(3, 1)] = -1.0;

    Ok(SpinConnectionSet {
        gamma_t: rot * (wa / s),
        gamma_r: radial * (-wa / s2),
        gamma_phi: rot * (params.alpha / s),
        gamma_z: Mat5::zeros(),
    })
}

/// The same spin connections written through commutators of the flat betas:
/// `Γ_t = ωα/√(1−ρ²)·(ρ[β⁰,β¹] − [β¹,β²])`, `Γ_r = −ωα/(1−ρ²)·[β⁰,β²]`,
/// `Γ_φ = α/√(1−ρ²)·(ρ[β⁰,β¹] − [β¹,β²])`.
pub fn spin_connections_commutator_form(
    params: &PhysicalParams,
    r: f64,
) -> Result<SpinConnectionSet> {
    let rho = params.check_rho(r)?;
    let s2 = 1.0 - rho * rho;
    let s = s2.sqrt();
    let wa = params.omega_alpha();
    let [b0, b1, b2, _] = flat_betas();
    let rot = commutator(&b0, &b1) * rho - commutator(&b1, &b2);
    Ok(SpinConnectionSet {
        gamma_t: rot * (wa / s),
        gamma_r: commutator(&b0, &b2) * (-wa / s2),
        gamma_phi: rot * (params.alpha / s),
        gamma_z: Mat5::zeros(),
    })
}

/// Entrywise comparison of one spin-connection matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionDeviation {
    pub name: &'static str,
    pub max_abs_deviation: f64,
    pub pass: bool,
}

/// Outcome of rebuilding the spin connections from the geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub r: f64,
    pub tolerance: f64,
    pub matrices: Vec<ConnectionDeviation>,
    /// `max |ω_{μab} + ω_{μba}|`; zero for a metric-compatible connection.
    pub antisymmetry_defect: f64,
}

impl GeometryReport {
    pub fn all_pass(&self) -> bool {
        self.matrices.iter().all(|m| m.pass)
    }
}

/// `Γ^λ_{μν}` of the line element, indexed `[λ][μ][ν]`.
pub fn christoffel(params: &PhysicalParams, r: f64) -> [[[f64; 4]; 4]; 4] {
    let ginv = inverse_metric(params, r);
    let dg = metric_dr(params, r);
    // ∂_μ g_{σν}; only the radial derivative survives.
    let d = |mu: usize, s: usize, n: usize| if mu == 1 { dg[(s, n)] } else { 0.0 };
    let mut out = [[[0.0; 4]; 4]; 4];
    for (l, out_l) in out.iter_mut().enumerate() {
        for (mu, out_lm) in out_l.iter_mut().enumerate() {
            for (nu, x) in out_lm.iter_mut().enumerate() {
                *x = 0.5
                    * (0..4)
                        .map(|s| ginv[(l, s)] * (d(mu, s, nu) + d(nu, s, mu) - d(s, mu, nu)))
                        .sum::<f64>();
            }
        }
    }
    out
}

fn tetrad_dr(params: &PhysicalParams, r: f64) -> Matrix4<f64> {
    let wa = params.omega_alpha();
    let rho = wa * r;
    let s2 = 1.0 - rho * rho;
    let s = s2.sqrt();
    let ds = -rho * wa / s;
    let mut d = Matrix4::zeros();
    d[(0, 0)] = rho * wa / (s2 * s);
    d[(2, 0)] = wa / (s2 * s);
    d[(2, 2)] = ds / (params.alpha * r) - s / (params.alpha * r * r);
    d
}

/// Connection one-form `ω_{μab}` obtained from the tetrad postulate, indexed
/// `[μ][a][b]`, with the frame index lowered by `eta`.
pub fn connection_one_form(
    params: &PhysicalParams,
    r: f64,
    eta: [f64; 4],
) -> Result<[[[f64; 4]; 4]; 4]> {
    let tet = tetrad(params, r)?;
    let e = tet.e;
    let co = e
        .try_inverse()
        .expect("tetrad is invertible inside the light cone");
    let de = tetrad_dr(params, r);
    let chr = christoffel(params, r);
    let mut out = [[[0.0; 4]; 4]; 4];
    for (mu, out_mu) in out.iter_mut().enumerate() {
        for (a, out_ma) in out_mu.iter_mut().enumerate() {
            for (b, x) in out_ma.iter_mut().enumerate() {
                let mut up = 0.0;
                for nu in 0..4 {
                    let mut cov = if mu == 1 { de[(b, nu)] } else { 0.0 };
                    for l in 0..4 {
                        cov += chr[nu][mu][l] * e[(b, l)];
                    }
                    up += co[(nu, a)] * cov;
                }
                *x = eta[a] * up;
            }
        }
    }
    Ok(out)
}

/// Rebuilds `Γ_μ = ½ ω_{μab}[β^a, β^b]` from the Christoffel symbols of the
/// line element and compares it with [`spin_connections`].
///
/// The frame index of `ω` is lowered with [`METRIC_ETA`], the metric under
/// which the tetrad is orthonormal. Lowering with [`ALGEBRA_ETA`] instead
/// flips the sign of every `Γ_μ`.
///
/// This is a measurement: the report records the deviation per matrix and
/// does not assume the two constructions agree.
pub fn geometry_cross_check(
    params: &PhysicalParams,
    r: f64,
    tolerance: f64,
) -> Result<GeometryReport> {
    let w = connection_one_form(params, r, METRIC_ETA)?;
    let printed = spin_connections(params, r)?.as_array();
    let flat = flat_betas();

    let mut antisym: f64 = 0.0;
    let mut matrices = Vec::with_capacity(4);
    for mu in 0..4 {
        let mut gamma = Mat5::zeros();
        for a in 0..4 {
            for b in 0..4 {
                antisym = antisym.max((w[mu][a][b] + w[mu][b][a]).abs());
                gamma += commutator(&flat[a], &flat[b]) * (0.5 * w[mu][a][b]);
            }
        }
        let dev = (gamma - printed[mu]).amax();
        matrices.push(ConnectionDeviation {
            name: COORDINATE_NAMES[mu],
            max_abs_deviation: dev,
            pass: dev <= tolerance,
        });
    }
    Ok(GeometryReport {
        r,
        tolerance,
        matrices,
        antisymmetry_defect: antisym,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(omega: f64, alpha: f64) -> PhysicalParams {
        PhysicalParams::canonical(alpha).with_omega(omega)
    }

    #[test]
    fn beta0_has_two_unit_entries() {
        let b0 = flat_betas_exact()[0];
        let nonzero: Vec<_> = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| b0[(i, j)] != 0)
            .collect();
        assert_eq!(nonzero, vec![(0, 1), (1, 0)]);
        assert_eq!(b0[(0, 1)], 1);
        assert_eq!(b0[(1, 0)], 1);
    }

    #[test]
    fn beta0_cubed_is_beta0() {
        let b0 = flat_betas_exact()[0];
        assert_eq!(b0 * b0 * b0, b0);
    }

    #[test]
    fn beta0_beta1_beta0_vanishes() {
        let [b0, b1, _, _] = flat_betas_exact();
        assert_eq!(b0 * b1 * b0, IMat5::zeros());
    }

    #[test]
    fn spatial_betas_match_printed_blocks() {
        let [_, b1, b2, b3] = flat_betas_exact();
        assert_eq!((b1[(0, 2)], b1[(2, 0)]), (-1, 1));
        assert_eq!((b2[(0, 3)], b2[(3, 0)]), (-1, 1));
        assert_eq!((b3[(0, 4)], b3[(4, 0)]), (-1, 1));
        for b in [b1, b2, b3] {
            assert_eq!(b.iter().filter(|&&x| x != 0).count(), 2);
        }
    }

    #[test]
    fn opposite_signature_breaks_the_algebra() {
        assert!(flat_trilinear_failures(ALGEBRA_ETA).is_empty());
        assert!(!flat_trilinear_failures([-1, 1, 1, 1]).is_empty());
    }

    #[test]
    fn static_tetrad_is_diagonal() {
        let t = tetrad(&p(0.0, 0.5), 1.0).unwrap();
        assert_eq!(t.e[(0, 0)], 1.0);
        assert_eq!(t.e[(1, 1)], 1.0);
        assert_eq!(t.e[(2, 2)], 2.0);
        assert_eq!(t.e[(3, 3)], 1.0);
        assert_eq!(t.e[(2, 0)], 0.0);
    }

    #[test]
    fn rotating_tetrad_entries() {
        let t = tetrad(&p(0.01, 0.5), 1.0).unwrap();
        let s = (1.0f64 - 0.005 * 0.005).sqrt();
        assert!((t.e[(0, 0)] - 1.0 / s).abs() < 1e-15);
        assert!((t.e[(0, 0)] - 1.0000125).abs() < 1e-9);
        assert!((t.e[(2, 0)] - 0.0050000625).abs() < 1e-11);
        assert!((t.e[(2, 2)] - 1.999975).abs() < 1e-7);
        for (a, mu) in [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 0),
            (1, 2),
            (2, 1),
            (2, 3),
            (3, 0),
        ] {
            assert_eq!(t.e[(a, mu)], 0.0);
        }
    }

    #[test]
    fn metric_reconstruction_at_reference_point() {
        let params = p(0.01, 0.5);
        let g = tetrad(&params, 1.0).unwrap().contract(METRIC_ETA);
        assert!((g[(0, 0)] + 1.0).abs() < 1e-12);
        assert!((g[(0, 2)] - 0.01).abs() < 1e-12);
        assert!((g[(2, 2)] - 3.9999).abs() < 1e-12);
        // inverse_metric really inverts metric
        let prod = metric(&params, 1.0) * inverse_metric(&params, 1.0);
        assert!((prod - Matrix4::identity()).amax() < 1e-14);
    }

    #[test]
    fn transposed_tetrad_reading_fails_both_checks() {
        let params = p(0.1, 0.8);
        let mut t = tetrad(&params, 2.0).unwrap();
        let off = t.e[(2, 0)];
        t.e[(2, 0)] = 0.0;
        t.e[(0, 2)] = off;
        assert!(t.metric_defect(&params) > 1e-3);
        let generic = curved_betas_from_tetrad(&t);
        let hand = curved_betas(&params, 2.0).unwrap();
        assert!((generic[0] - hand[0]).amax() > 1e-3);
    }

    #[test]
    fn curved_betas_static_limit_and_phi_scaling() {
        let params = p(0.0, 0.5);
        let c = curved_betas(&params, 1.0).unwrap();
        assert_eq!(c[0], flat_betas()[0]);

        let params = p(0.01, 0.5);
        let c = curved_betas(&params, 1.0).unwrap();
        let b2 = flat_betas()[2];
        assert!((c[2] - b2 * 1.999975).amax() < 1e-6);
        let s = (1.0f64 - 0.005 * 0.005).sqrt();
        assert!((c[2] - b2 * (s / 0.5)).amax() < 1e-15);
    }

    #[test]
    fn curved_betas_agree_with_generic_contraction() {
        let params = p(0.07, 0.6);
        for r in [0.3, 5.0, 20.0] {
            let t = tetrad(&params, r).unwrap();
            let a = curved_betas_from_tetrad(&t);
            let b = curved_betas(&params, r).unwrap();
            for i in 0..4 {
                assert!((a[i] - b[i]).amax() < 1e-14);
            }
        }
    }

    #[test]
    fn curved_identity_at_reference_point() {
        assert!(curved_trilinear_defect(&p(0.01, 0.5), 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn connections_vanish_without_rotation() {
        let c = spin_connections(&p(0.0, 0.7), 1.3).unwrap();
        assert_eq!(c.gamma_t, Mat5::zeros());
        assert_eq!(c.gamma_r, Mat5::zeros());
        assert_eq!(c.gamma_z, Mat5::zeros());
        assert_ne!(c.gamma_phi, Mat5::zeros());
    }

    #[test]
    fn gamma_r_sparsity_and_sign() {
        let params = p(0.02, 0.5);
        let r = 3.0;
        let c = spin_connections(&params, r).unwrap();
        let rho = params.rho(r);
        let expected = params.omega_alpha() / (1.0 - rho * rho);
        for i in 0..5 {
            for j in 0..5 {
                let v = c.gamma_r[(i, j)];
                if (i, j) == (1, 3) || (i, j) == (3, 1) {
                    assert!((v - expected).abs() < 1e-16);
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn gamma_phi_is_gamma_t_over_omega() {
        let c = spin_connections(&p(0.01, 0.5), 1.0).unwrap();
        assert!((c.gamma_phi - c.gamma_t / 0.01).amax() < 1e-14);
    }

    #[test]
    fn entry_patterns_match_commutator_form() {
        let params = p(0.03, 0.9);
        for r in [0.5, 2.0, 30.0] {
            let a = spin_connections(&params, r).unwrap().as_array();
            let b = spin_connections_commutator_form(&params, r)
                .unwrap()
                .as_array();
            for i in 0..4 {
                assert!((a[i] - b[i]).amax() < 1e-15);
            }
        }
    }

    #[test]
    fn rho_guard() {
        assert!(tetrad(&p(0.5, 1.0), 2.0).is_err());
        assert!(curved_betas(&p(0.5, 1.0), 2.5).is_err());
        assert!(spin_connections(&p(0.5, 1.0), 3.0).is_err());
    }

    #[test]
    fn christoffel_static_flat_limit() {
        // α = 1, ω = 0: flat cylindrical coordinates, Γ^r_{φφ} = −r, Γ^φ_{rφ} = 1/r.
        let params = p(0.0, 1.0);
        let c = christoffel(&params, 2.0);
        assert!((c[1][2][2] + 2.0).abs() < 1e-15);
        assert!((c[2][1][2] - 0.5).abs() < 1e-15);
        assert!((c[2][2][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn connection_one_form_is_antisymmetric() {
        let w = connection_one_form(&p(0.05, 0.6), 4.0, METRIC_ETA).unwrap();
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert!(
                        (w[mu][a][b] + w[mu][b][a]).abs() < 1e-13,
                        "mu={mu} a={a} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn cross_check_static_limit() {
        let rep = geometry_cross_check(&p(0.0, 0.5), 1.0, 1e-10).unwrap();
        assert_eq!(rep.matrices.len(), 4);
        let names: Vec<_> = rep.matrices.iter().map(|m| m.name).collect();
        assert_eq!(names, ["t", "r", "phi", "z"]);
        assert_eq!(rep.matrices[0].max_abs_deviation, 0.0);
        assert_eq!(rep.matrices[1].max_abs_deviation, 0.0);
        assert!(rep.antisymmetry_defect < 1e-13);
        assert!(rep.all_pass());
    }

    #[test]
    fn closed_form_connections_satisfy_the_tetrad_postulate() {
        for (w, a, r) in [(0.01, 0.5, 1.0), (0.2, 0.7, 3.0), (0.3, 0.25, 12.0)] {
            let rep = geometry_cross_check(&p(w, a), r, 1e-12).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
        }
    }

    #[test]
    fn algebra_signature_lowering_flips_the_sign() {
        let params = p(0.2, 0.7);
        let w = connection_one_form(&params, 3.0, ALGEBRA_ETA.map(|x| x as f64)).unwrap();
        let printed = spin_connections(&params, 3.0).unwrap().as_array();
        let flat = flat_betas();
        for mu in 0..4 {
            let mut g = Mat5::zeros();
            for a in 0..4 {
                for b in 0..4 {
                    g += commutator(&flat[a], &flat[b]) * (0.5 * w[mu][a][b]);
                }
            }
            assert!((g + printed[mu]).amax() < 1e-12);
        }
    }
}
