//! Closed-form spectral analytics of the J = 1 kicked top.
//!
//! For d = 3 the characteristic polynomial is the cubic
//! z³ + f₂z² + f₁z + f₀ with
//!
//! ```text
//! f₂ = (2 + w)μ,   f₁ = −(1 + 2w)μ,   f₀ = −w,      w = Λ⁻¹,
//! μ  = −(1 + 2cos ω)/3  ∈ [−1, 1/3] for real ω.
//! ```
//!
//! The discriminant D = −27(q² + 4p³) is a reciprocal quartic in w, so the
//! family has at most four finite spectral degeneracy points and they come
//! in Λ ↔ Λ⁻¹ pairs. Triple degeneracy requires D = 0 and q = 0 at once,
//! detected by the vanishing of the Sylvester resultant R(D, q) =
//! (16/27)(3−μ)³μ⁹(1+μ)⁹ — zero exactly at μ = 0 (the 3EP at Λ = 0, ∞) and
//! μ = −1 (the Hermitian triple point at Λ = 1).
//!
//! q follows the standard Cardano prescription with the 2f₂³ leading term;
//! the coefficient list q₀…q₃ is algebraically consistent with it and the
//! roots are cross-validated against direct eigencomputation.

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::poly::sylvester_resultant;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// μ(ω) = −(1 + 2cos ω)/3.
pub fn mu_of_omega(omega: f64) -> f64 {
    -(1.0 + 2.0 * omega.cos()) / 3.0
}

/// Cubic data of det(zI − U) at one (ω, Λ).
#[derive(Debug, Clone)]
pub struct CubicData {
    pub mu: f64,
    pub f2: Cx,
    pub f1: Cx,
    pub f0: Cx,
    /// p = (3f₁ − f₂²)/9 (one third of the depressed-cubic P).
    pub p: Cx,
    /// q = (2f₂³ − 9f₂f₁ + 27f₀)/27.
    pub q: Cx,
    /// D = −27(q² + 4p³), the discriminant of the monic cubic.
    pub discriminant: Cx,
}

/// Assemble μ, f₂, f₁, f₀, p, q and D for the J = 1 top.
pub fn cubic_data(omega: f64, lambda: Cx) -> Result<CubicData> {
    if lambda.norm() == 0.0 {
        return Err(Error::SingularParameter);
    }
    let mu = mu_of_omega(omega);
    let w = lambda.inv();
    let f2 = (w + 2.0) * mu;
    let f1 = -(w * 2.0 + 1.0) * mu;
    let f0 = -w;
    let p = (f1 * 3.0 - f2 * f2) / 9.0;
    let q = (f2 * f2 * f2 * 2.0 - f2 * f1 * 9.0 + f0 * 27.0) / 27.0;
    let discriminant = -(q * q + p * p * p * 4.0) * 27.0;
    Ok(CubicData {
        mu,
        f2,
        f1,
        f0,
        p,
        q,
        discriminant,
    })
}

/// Evaluate the cubic at z.
pub fn eval_cubic(data: &CubicData, z: Cx) -> Cx {
    ((z + data.f2) * z + data.f1) * z + data.f0
}

fn cbrt_branches(x: Cx) -> [Cx; 3] {
    let u = x.powf(1.0 / 3.0);
    let rot = Cx::from_polar(1.0, TAU / 3.0);
    [u, u * rot, u * rot * rot]
}

/// The three roots by Cardano's formula.
///
/// When D = 0 (within scale) the degenerate closed form is used: a simple
/// root z_c + 2(−q/2)^{1/3} and a double root z_c − (−q/2)^{1/3}, with the
/// cube-root branch fixed by u² = −p; when additionally q = 0 the root z_c
/// is triple.
pub fn cardano_roots(data: &CubicData) -> [Cx; 3] {
    let zc = -data.f2 / 3.0;
    let scale = 27.0 * (data.q.norm_sqr() + 4.0 * data.p.norm().powi(3)) + f64::MIN_POSITIVE;
    if data.discriminant.norm() <= 1e-12 * scale {
        if data.q.norm().powf(2.0 / 3.0) <= 1e-12 * (1.0 + data.f2.norm_sqr()) {
            return [zc, zc, zc];
        }
        // double-root form: pick the cube root with u² = −p
        let u = cbrt_branches(-data.q / 2.0)
            .into_iter()
            .min_by(|a, b| {
                let da = (a * a + data.p).norm();
                let db = (b * b + data.p).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        return [zc + u * 2.0, zc - u, zc - u];
    }
    // general case: t = u + v with u³,v³ = −q/2 ± sqrt(q²/4 + p³), uv = −p
    let s = (data.q * data.q / 4.0 + data.p * data.p * data.p).sqrt();
    let mut u3 = -data.q / 2.0 + s;
    if u3.norm() < 1e-3 * (data.q.norm() / 2.0 + s.norm()) {
        u3 = -data.q / 2.0 - s;
    }
    let u = u3.powf(1.0 / 3.0);
    let v = if u.norm() > 0.0 {
        -data.p / u
    } else {
        Cx::new(0.0, 0.0)
    };
    let rot = Cx::from_polar(1.0, TAU / 3.0);
    let mut roots = [Cx::new(0.0, 0.0); 3];
    let mut uk = u;
    let mut vk = v;
    for r in roots.iter_mut() {
        *r = zc + uk + vk;
        uk *= rot;
        vk *= rot.conj();
    }
    roots
}

/// Coefficients D₀…D₄ of D = Σ Dₙ w^{4−n} (so D₀ is the leading, w⁴ one):
///
/// ```text
/// D₀ = D₄ = 4(μ+1)μ³
/// D₁ = D₃ = 4(μ+1)(9+5μ)μ²
/// D₂      = −3(μ+1)(9 − 9μ − 21μ² − 11μ³)
/// ```
pub fn discriminant_quartic(mu: f64) -> [f64; 5] {
    let d0 = 4.0 * (mu + 1.0) * mu.powi(3);
    let d1 = 4.0 * (mu + 1.0) * (9.0 + 5.0 * mu) * mu.powi(2);
    let d2 = -3.0 * (mu + 1.0) * (9.0 - 9.0 * mu - 21.0 * mu.powi(2) - 11.0 * mu.powi(3));
    [d0, d1, d2, d1, d0]
}

/// Evaluate Σ Dₙ w^{4−n}.
pub fn eval_discriminant_quartic(coeffs: &[f64; 5], w: Cx) -> Cx {
    coeffs.iter().fold(Cx::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// Coefficients q₀…q₃ of q = Σ qₙ w^{3−n}.
pub fn q_cubic_coefficients(mu: f64) -> [f64; 4] {
    [
        2.0 * mu.powi(3) / 27.0,
        2.0 * mu.powi(2) * (3.0 + 2.0 * mu) / 9.0,
        -(9.0 - 15.0 * mu.powi(2) - 8.0 * mu.powi(3)) / 9.0,
        2.0 * mu.powi(2) * (9.0 + 8.0 * mu) / 27.0,
    ]
}

/// Sylvester determinant of the quartic D and the cubic q in w.
pub fn resultant_dq(mu: f64) -> f64 {
    let d = discriminant_quartic(mu);
    let q = q_cubic_coefficients(mu);
    // ascending coefficient order for the resultant
    let a: Vec<Cx> = d.iter().rev().map(|&x| Cx::new(x, 0.0)).collect();
    let b: Vec<Cx> = q.iter().rev().map(|&x| Cx::new(x, 0.0)).collect();
    sylvester_resultant(&a, &b).re
}

/// Closed form R(D, q) = (16/27)(3−μ)³ μ⁹ (1+μ)⁹.
pub fn resultant_dq_closed_form(mu: f64) -> f64 {
    16.0 / 27.0 * (3.0 - mu).powi(3) * mu.powi(9) * (1.0 + mu).powi(9)
}

/// Degeneracy type: exceptional (defective) or diabolic (full eigenbasis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpKind {
    Exceptional,
    Diabolic,
}

impl std::fmt::Display for EpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpKind::Exceptional => write!(f, "exceptional"),
            EpKind::Diabolic => write!(f, "diabolic"),
        }
    }
}

/// A spectral degeneracy point of U(Λ).
#[derive(Debug, Clone)]
pub struct EPRecord {
    /// Position in the Λ-plane; 0 when `at_infinity` is set.
    pub lambda: Cx,
    /// The Λ = ∞ partner of the origin (nilpotent Jordan limit Im λ → −∞).
    pub at_infinity: bool,
    /// Algebraic multiplicity of the coalescing eigenvalue cluster.
    pub order: usize,
    pub kind: EpKind,
    /// 2M sheet labels of the merged branches, when a base identification
    /// exists (numerical classification fills this; closed forms leave it
    /// empty).
    pub merged_branches: Vec<i32>,
    pub omega: f64,
}

impl EPRecord {
    pub fn position_error(&self, other: &EPRecord) -> f64 {
        if self.at_infinity != other.at_infinity {
            return f64::INFINITY;
        }
        (self.lambda - other.lambda).norm()
    }
}

fn eta_of_mu(mu: f64) -> f64 {
    (mu.abs() / 3.0).sqrt()
}

/// Both solutions of Λ + Λ⁻¹ = y, paired as exact reciprocals: the larger
/// root is computed from the stable branch and the smaller as its inverse.
fn lambda_pair_of_y(y: Cx) -> (Cx, Cx) {
    let s = (y * y - 4.0).sqrt();
    let a = if (y + s).norm() >= (y - s).norm() {
        (y + s) / 2.0
    } else {
        (y - s) / 2.0
    };
    (a, a.inv())
}

/// All finite-Λ degeneracy points of the J = 1 family at the given ω, from
/// the closed-form solutions of D = 0, plus the Λ = 0 and Λ = ∞ records of
/// the solvable case. μ is symmetric about ω = π, so any real ω is accepted.
pub fn ep_locations_j1(omega: f64) -> Vec<EPRecord> {
    let mu = mu_of_omega(omega);
    let rec = |lambda: Cx, order: usize, kind: EpKind| EPRecord {
        lambda,
        at_infinity: false,
        order,
        kind,
        merged_branches: Vec::new(),
        omega,
    };

    if (mu + 1.0).abs() <= 1e-12 {
        // T2, ω = 0: f = (z−1)²(z−Λ⁻¹); the z = 1 double eigenvalue exists at
        // every Λ with a full eigenbasis. The only isolated structure is the
        // Hermitian triple point at Λ = 1.
        return vec![rec(Cx::new(1.0, 0.0), 3, EpKind::Diabolic)];
    }
    if mu.abs() <= 1e-12 {
        // T1, ω = 2π/3: 3EPs at Λ = 0 and its conjugate pair Λ = ∞
        return vec![
            rec(Cx::new(0.0, 0.0), 3, EpKind::Exceptional),
            EPRecord {
                lambda: Cx::new(0.0, 0.0),
                at_infinity: true,
                order: 3,
                kind: EpKind::Exceptional,
                merged_branches: Vec::new(),
                omega,
            },
        ];
    }

    let eta = eta_of_mu(mu);
    let mut out = Vec::new();
    let push_pair = |y: Cx, out: &mut Vec<EPRecord>| {
        // |y| = 2 exactly on the unit circle: a Hermitian (diabolic) point
        if y.im.abs() <= 1e-9 && (y.re.abs() - 2.0).abs() <= 1e-9 {
            let lam = Cx::new(y.re / 2.0, 0.0);
            out.push(rec(lam, 2, EpKind::Diabolic));
            return;
        }
        let (a, b) = lambda_pair_of_y(y);
        out.push(rec(a, 2, EpKind::Exceptional));
        out.push(rec(b, 2, EpKind::Exceptional));
    };

    if mu > 0.0 {
        // D1/D2: real solutions y± of the quadratic in y
        let e3 = 2.0 * eta.powi(3);
        let y_plus = (-(3.0 + 5.0 * eta * eta) * eta + (1.0 + 3.0 * eta * eta)) / e3;
        let y_minus = (-(3.0 + 5.0 * eta * eta) * eta - (1.0 + 3.0 * eta * eta)) / e3;
        push_pair(Cx::new(y_plus, 0.0), &mut out);
        push_pair(Cx::new(y_minus, 0.0), &mut out);
    } else {
        // D3: complex-conjugate solutions y_c, y_c*
        let e3 = 2.0 * eta.powi(3);
        let y_c = Cx::new(
            (3.0 - 5.0 * eta * eta) * eta / e3,
            (1.0 - 3.0 * eta * eta) / e3,
        );
        push_pair(y_c, &mut out);
        push_pair(y_c.conj(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{build_floquet, ComplexParam};
    use crate::spectral::eigendecompose;
    use crate::spin_algebra::{HalfInt, TopConfig};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn mu_examples() {
        assert_abs_diff_eq!(mu_of_omega(2.0 * PI / 3.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu_of_omega(0.0), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu_of_omega(PI), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn cubic_data_at_mu_zero() {
        let d = cubic_data(2.0 * PI / 3.0, c(0.7, 0.3)).unwrap();
        let w = c(0.7, 0.3).inv();
        assert_abs_diff_eq!(d.p.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((d.q + w).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((d.discriminant + w * w * 27.0).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cardano_reproduces_floquet_spectrum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let j1 = HalfInt::from_twice(2).unwrap();
        for _ in 0..10 {
            let omega: f64 = rng.random_range(0.05..TAU - 0.05);
            let lam = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            if lam.norm() < 0.05 {
                continue;
            }
            let config = TopConfig::uniform(j1, omega);
            let dec =
                eigendecompose(&build_floquet(&config, ComplexParam::new(lam).unwrap())).unwrap();
            let data = cubic_data(omega, lam).unwrap();
            let roots = cardano_roots(&data);
            for z in &dec.eigenvalues {
                let best = roots
                    .iter()
                    .map(|r| (r - z).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= 1e-9, "omega={omega} lam={lam} err={best}");
            }
        }
    }

    #[test]
    fn cardano_degenerate_forms() {
        // triple root: D = 0, q = 0 at μ = 0, Λ = ∞ limit is not constructible;
        // use a synthetic triple cubic through the same code path
        let data = CubicData {
            mu: 0.0,
            f2: c(-3.0, 0.0), // (z-1)^3 = z^3 -3z^2 +3z -1
            f1: c(3.0, 0.0),
            f0: c(-1.0, 0.0),
            p: c(0.0, 0.0),
            q: c(0.0, 0.0),
            discriminant: c(0.0, 0.0),
        };
        for r in cardano_roots(&data) {
            assert_abs_diff_eq!((r - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        }
        // cube roots of unity at μ = 0, Λ = 1
        let data = cubic_data(2.0 * PI / 3.0, c(1.0, 0.0)).unwrap();
        let roots = cardano_roots(&data);
        for k in 0..3 {
            let expect = Cx::from_polar(1.0, TAU * k as f64 / 3.0);
            let best = roots
                .iter()
                .map(|r| (r - expect).norm())
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(best, 0.0, epsilon = 1e-10);
        }
        // double root at the ω = π 2EP: f and f' both vanish there
        let lam_ep = -(17.0 + 12.0 * 2f64.sqrt());
        let data = cubic_data(PI, c(lam_ep, 0.0)).unwrap();
        let roots = cardano_roots(&data);
        let mut double_seen = 0;
        for (i, a) in roots.iter().enumerate() {
            let f = eval_cubic(&data, *a);
            assert!(f.norm() <= 1e-9, "|f| = {}", f.norm());
            for b in roots.iter().skip(i + 1) {
                if (a - b).norm() < 1e-8 {
                    double_seen += 1;
                    let fp = (*a * 3.0 + data.f2 * 2.0) * *a + data.f1;
                    assert!(fp.norm() <= 1e-8, "|f'| = {}", fp.norm());
                }
            }
        }
        assert_eq!(double_seen, 1);
    }

    #[test]
    fn quartic_matches_direct_discriminant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let mu: f64 = rng.random_range(-0.99..0.32);
            let omega = (-(3.0 * mu + 1.0) / 2.0).acos();
            assert_abs_diff_eq!(mu_of_omega(omega), mu, epsilon = 1e-12);
            let coeffs = discriminant_quartic(mu);
            let lam = Cx::from_polar(rng.random_range(0.3..2.0), rng.random_range(0.0..TAU));
            let data = cubic_data(omega, lam).unwrap();
            let via_quartic = eval_discriminant_quartic(&coeffs, lam.inv());
            let denom = data.discriminant.norm().max(1e-6);
            assert!(
                (via_quartic - data.discriminant).norm() / denom <= 1e-9,
                "mu={mu}: {} vs {}",
                via_quartic,
                data.discriminant
            );
        }
    }

    #[test]
    fn quartic_degenerate_coefficients() {
        let z = discriminant_quartic(0.0);
        assert_eq!(z[0], 0.0);
        assert_eq!(z[1], 0.0);
        assert_abs_diff_eq!(z[2], -27.0, epsilon = 1e-14);
        assert_eq!(z[3], 0.0);
        assert_eq!(z[4], 0.0);
        for coeff in discriminant_quartic(-1.0) {
            assert_eq!(coeff, 0.0);
        }
        // reciprocal symmetry holds identically by construction
        let s = discriminant_quartic(-0.3);
        assert_eq!(s[0], s[4]);
        assert_eq!(s[1], s[3]);
    }

    #[test]
    fn resultant_matches_closed_form() {
        for k in 0..=100 {
            let mu = -0.99 + k as f64 * (0.33 + 0.99) / 100.0;
            let det = resultant_dq(mu);
            let closed = resultant_dq_closed_form(mu);
            let denom = closed.abs().max(1e-30);
            assert!(
                (det - closed).abs() / denom <= 1e-6,
                "mu={mu}: det={det} closed={closed}"
            );
        }
        assert_abs_diff_eq!(resultant_dq(0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(resultant_dq(-1.0), 0.0, epsilon = 1e-12);
        // frozen value at μ = 1/3: (16/27)(8/3)³(1/3)⁹(4/3)⁹ = 2³¹/3²⁴
        let expect = 2f64.powi(31) / 3f64.powi(24);
        assert_abs_diff_eq!(
            resultant_dq_closed_form(1.0 / 3.0),
            expect,
            epsilon = 1e-12 * expect
        );
        assert!((resultant_dq(1.0 / 3.0) - expect).abs() <= 1e-6 * expect);
    }

    #[test]
    fn resultant_vanishes_only_at_triple_points() {
        // R has ninth-order zeros at μ = 0 and −1, so normalize the
        // determinant by the claimed zero structure μ⁹(1+μ)⁹: the quotient
        // must stay bounded away from zero on the whole interval, which is
        // exactly the statement that no other zeros exist.
        let n = 2001;
        for k in 0..n {
            let mu = -1.0 + k as f64 * (1.0 / 3.0 + 1.0) / (n - 1) as f64;
            let structure = mu.powi(9) * (1.0 + mu).powi(9);
            if structure.abs() < 1e-280 {
                continue; // at (or next to) the known zeros themselves
            }
            let quotient = (resultant_dq(mu) / structure).abs();
            assert!(
                quotient > 1e-12,
                "unexpected extra zero at mu={mu}: {quotient}"
            );
        }
    }

    #[test]
    fn ep_locations_case_d1() {
        let eps = ep_locations_j1(PI);
        assert_eq!(eps.len(), 3);
        let big = -(17.0 + 12.0 * 2f64.sqrt());
        let small = 1.0 / big;
        let find = |target: Cx| {
            eps.iter()
                .filter(|e| !e.at_infinity)
                .map(|e| (e.lambda - target).norm())
                .fold(f64::INFINITY, f64::min)
        };
        assert!(find(c(big, 0.0)) <= 1e-9);
        assert!(find(c(small, 0.0)) <= 1e-12);
        assert_abs_diff_eq!(small, -0.029437251522859158, epsilon = 1e-15);
        let diab: Vec<_> = eps.iter().filter(|e| e.kind == EpKind::Diabolic).collect();
        assert_eq!(diab.len(), 1);
        assert_abs_diff_eq!((diab[0].lambda - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(diab[0].order, 2);
    }

    #[test]
    fn ep_locations_case_t1_t2() {
        let eps = ep_locations_j1(2.0 * PI / 3.0);
        assert_eq!(eps.len(), 2);
        assert!(eps
            .iter()
            .any(|e| !e.at_infinity && e.lambda.norm() == 0.0 && e.order == 3));
        assert!(eps.iter().any(|e| e.at_infinity && e.order == 3));
        let eps = ep_locations_j1(0.0);
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].order, 3);
        assert_eq!(eps[0].kind, EpKind::Diabolic);
    }

    #[test]
    fn ep_locations_case_d3_off_axis() {
        let eps = ep_locations_j1(PI / 6.0);
        assert_eq!(eps.len(), 4);
        let inside: Vec<_> = eps.iter().filter(|e| e.lambda.norm() < 1.0).collect();
        assert_eq!(inside.len(), 2);
        for e in &inside {
            assert!(e.lambda.im.abs() > 1e-3, "EP should be off the real axis");
        }
        assert_abs_diff_eq!(
            (inside[0].lambda - inside[1].lambda.conj()).norm(),
            0.0,
            epsilon = 1e-9
        );
        // quartic vanishes at every returned position
        let coeffs = discriminant_quartic(mu_of_omega(PI / 6.0));
        for e in &eps {
            let val = eval_discriminant_quartic(&coeffs, e.lambda.inv());
            assert!(val.norm() <= 1e-8, "|D| = {}", val.norm());
        }
    }

    #[test]
    fn ep_locations_case_d2_real_axis() {
        // 2π/3 < ω < π: two positive, two negative, all real
        let eps = ep_locations_j1(5.0 * PI / 6.0);
        assert_eq!(eps.len(), 4);
        let mut pos = 0;
        let mut neg = 0;
        for e in &eps {
            assert!(e.lambda.im.abs() <= 1e-10);
            if e.lambda.re > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        assert_eq!((pos, neg), (2, 2));
        // (y₊)² − 4 = (1−η)³(1+3η²)(1−3η)/(4η⁶) > 0 reproduced numerically
        let mu = mu_of_omega(5.0 * PI / 6.0);
        let eta = (mu / 3.0).sqrt();
        let y_plus =
            (-(3.0 + 5.0 * eta * eta) * eta + (1.0 + 3.0 * eta * eta)) / (2.0 * eta.powi(3));
        let lhs = y_plus * y_plus - 4.0;
        let rhs =
            (1.0 - eta).powi(3) * (1.0 + 3.0 * eta * eta) * (1.0 - 3.0 * eta) / (4.0 * eta.powi(6));
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8 * rhs.abs());
        assert!(lhs > 0.0);
    }

    #[test]
    fn reciprocal_pairing_of_degeneracies() {
        for &omega in &[PI / 6.0, PI / 3.0, 5.0 * PI / 6.0, PI] {
            let mu = mu_of_omega(omega);
            let coeffs = discriminant_quartic(mu);
            let scale: f64 = coeffs.iter().map(|x| x.abs()).fold(0.0, f64::max);
            for e in ep_locations_j1(omega) {
                if e.at_infinity || e.lambda.norm() == 0.0 {
                    continue;
                }
                let val = eval_discriminant_quartic(&coeffs, e.lambda);
                // evaluating at w = Λ (i.e. at Λ' = Λ⁻¹) must also vanish
                let local = (0..5)
                    .map(|k| scale * e.lambda.norm().powi(4 - k))
                    .sum::<f64>();
                assert!(val.norm() / local.max(1.0) <= 1e-8, "omega={omega}");
            }
        }
    }

    #[test]
    fn reflection_symmetry_about_pi() {
        let a = ep_locations_j1(PI / 5.0);
        let b = ep_locations_j1(TAU - PI / 5.0);
        assert_eq!(a.len(), b.len());
        for ea in &a {
            let best = b
                .iter()
                .map(|eb| ea.position_error(eb))
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-10);
        }
    }
}
