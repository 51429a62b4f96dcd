//! The one-period Floquet matrix U(Λ) of the kicked top and its
//! characteristic polynomial.
//!
//! With the rank-1 kick written through Λ = e^{iλ},
//!
//! ```text
//! U(Λ) = e^{-iω Ĵz} [ (1 − |v⟩⟨v|) + Λ⁻¹ |v⟩⟨v| ],
//! ```
//!
//! U is unitary exactly on |Λ| = 1 and det(zI − U) is affine in w = Λ⁻¹
//! because the kick is rank 1. At solvable precession ω = 2πr/d with the
//! uniform kick, conjugation by the Fourier site basis turns U into a
//! companion-style hopping matrix with a single w-dependent corner entry.

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::linalg::{char_poly_hessenberg, hessenberg, CMat};
use crate::spin_algebra::TopConfig;

/// The complexified kick-strength parameter Λ = e^{iλ}; |Λ| = 1 iff λ is real.
/// Λ = 0 is excluded: it is a degeneracy of the family itself with no matrix
/// representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexParam {
    lambda: Cx,
}

impl ComplexParam {
    pub fn new(lambda: Cx) -> Result<ComplexParam> {
        if lambda.norm() == 0.0 {
            return Err(Error::SingularParameter);
        }
        Ok(ComplexParam { lambda })
    }

    /// Λ = e^{iλ} for a real kick-strength angle λ.
    pub fn from_angle(angle: f64) -> ComplexParam {
        ComplexParam {
            lambda: Cx::from_polar(1.0, angle),
        }
    }

    pub fn value(&self) -> Cx {
        self.lambda
    }

    /// w = Λ⁻¹, the variable the characteristic polynomial is affine in.
    pub fn w(&self) -> Cx {
        self.lambda.inv()
    }

    /// λ = −i log Λ on the principal branch: Re λ ∈ (−π, π].
    pub fn angle(&self) -> Cx {
        Cx::new(self.lambda.arg(), -self.lambda.norm().ln())
    }

    pub fn on_unit_circle(&self, tol: f64) -> bool {
        (self.lambda.norm() - 1.0).abs() <= tol
    }
}

/// Which basis the matrix entries refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixBasis {
    /// The standard |J,M⟩ basis, M ascending.
    Standard,
    /// The Fourier site basis |m⟩ of `fourier_site_basis`.
    Site,
}

/// A concrete evaluation of the family U(Λ).
#[derive(Debug, Clone)]
pub struct FloquetMatrix {
    pub entries: CMat,
    pub config: TopConfig,
    pub lambda: ComplexParam,
    pub basis: MatrixBasis,
}

/// U(Λ) in the |J,M⟩ basis: diagonal precession times the rank-1-shifted
/// identity. Reduces to e^{−iω Ĵz} at Λ = 1.
pub fn build_floquet(config: &TopConfig, lambda: ComplexParam) -> FloquetMatrix {
    let d = config.dimension();
    let ms = config.j.m_values();
    let w = lambda.w();
    let v = config.kick.coeffs();
    let mut entries = CMat::zeros((d, d));
    for row in 0..d {
        let prec = Cx::from_polar(1.0, -config.omega * ms[row]);
        for col in 0..d {
            let mut x = v[row] * v[col].conj() * (w - 1.0);
            if row == col {
                x += 1.0;
            }
            entries[(row, col)] = prec * x;
        }
    }
    FloquetMatrix {
        entries,
        config: config.clone(),
        lambda,
        basis: MatrixBasis::Standard,
    }
}

/// Integer r with ω = 2πr/d to within `tol`, reduced to 0 ≤ r < d.
pub fn solvable_r(omega: f64, d: usize, tol: f64) -> Option<i64> {
    let x = omega * d as f64 / (2.0 * std::f64::consts::PI);
    let r = x.round();
    if (x - r).abs() <= tol * (1.0 + x.abs()) {
        Some((r as i64).rem_euclid(d as i64))
    } else {
        None
    }
}

/// U(Λ) in the site basis at solvable ω = 2πr/d with the uniform kick: a
/// shift-by-r hopping matrix whose column 0 carries the extra factor Λ⁻¹.
/// Hops that wrap around the chain pick up (−1)^{2J}, so for integer J and
/// r = 1 this is exactly the superdiagonal-ones companion matrix with Λ⁻¹ in
/// the bottom-left corner.
pub fn companion_floquet(config: &TopConfig, lambda: ComplexParam) -> Result<FloquetMatrix> {
    let d = config.dimension();
    let r = solvable_r(config.omega, d, 1e-12).ok_or(Error::NotSolvable {
        omega: config.omega,
        d,
    })?;
    if !config.has_uniform_kick() {
        return Err(Error::Precondition(
            "companion form requires the uniform kick".into(),
        ));
    }
    let wrap_sign = if config.j.twice() % 2 == 0 { 1.0 } else { -1.0 };
    let w = lambda.w();
    let mut entries = CMat::zeros((d, d));
    for col in 0..d {
        let shifted = col as i64 - r;
        let row = shifted.rem_euclid(d as i64) as usize;
        let mut amp = if shifted < 0 {
            Cx::new(wrap_sign, 0.0)
        } else {
            Cx::new(1.0, 0.0)
        };
        if col == 0 {
            amp *= w;
        }
        entries[(row, col)] = amp;
    }
    Ok(FloquetMatrix {
        entries,
        config: config.clone(),
        lambda,
        basis: MatrixBasis::Site,
    })
}

/// Monic characteristic polynomial det(zI − U), ascending coefficients,
/// computed through a Hessenberg determinant recurrence so it stays usable
/// at near-degenerate Λ.
pub fn char_poly(u: &FloquetMatrix) -> Vec<Cx> {
    let h = hessenberg(&u.entries);
    char_poly_hessenberg(&h)
}

/// The rank-1 split det(zI − U) = g(z) + w·h(z), w = Λ⁻¹, with g and h
/// independent of Λ. Recovered from the evaluations at w = ±1, which is
/// exact because the kick makes every coefficient affine in w.
pub fn char_poly_affine_split(config: &TopConfig) -> (Vec<Cx>, Vec<Cx>) {
    let plus = char_poly(&build_floquet(config, ComplexParam::from_angle(0.0)));
    let minus = char_poly(&build_floquet(
        config,
        ComplexParam::from_angle(std::f64::consts::PI),
    ));
    let g: Vec<Cx> = plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a + b) * 0.5)
        .collect();
    let h: Vec<Cx> = plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a - b) * 0.5)
        .collect();
    (g, h)
}

/// Evaluate the split at a given w, returning ascending coefficients.
pub fn char_poly_at_w(g: &[Cx], h: &[Cx], w: Cx) -> Vec<Cx> {
    g.iter().zip(h).map(|(&gk, &hk)| gk + w * hk).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{adjoint, det, norm_max};
    use crate::poly;
    use crate::spin_algebra::{fourier_site_basis, HalfInt, TopConfig};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn cfg(twice_j: i32, omega: f64) -> TopConfig {
        TopConfig::uniform(HalfInt::from_twice(twice_j).unwrap(), omega)
    }

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn lambda_one_is_bare_precession() {
        let config = cfg(3, 0.83);
        let u = build_floquet(&config, ComplexParam::from_angle(0.0));
        for (k, &m) in config.j.m_values().iter().enumerate() {
            for col in 0..4 {
                let expect = if col == k {
                    Cx::from_polar(1.0, -0.83 * m)
                } else {
                    c(0.0, 0.0)
                };
                assert_abs_diff_eq!((u.entries[(k, col)] - expect).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn unit_circle_lambda_gives_unitary_u() {
        for &(twice_j, omega, lam_angle) in &[(1, 1.3, 0.7), (2, 2.9, -2.0), (4, 0.4, 3.0)] {
            let config = cfg(twice_j, omega);
            let u = build_floquet(&config, ComplexParam::from_angle(lam_angle));
            let gram = adjoint(&u.entries).dot(&u.entries);
            let d = config.dimension();
            let mut dev: f64 = 0.0;
            for r in 0..d {
                for cc in 0..d {
                    let expect = if r == cc { c(1.0, 0.0) } else { c(0.0, 0.0) };
                    dev = dev.max((gram[(r, cc)] - expect).norm());
                }
            }
            assert!(dev <= 1e-12, "unitarity residual {dev}");
        }
    }

    #[test]
    fn determinant_reciprocal_to_lambda() {
        for &(twice_j, omega) in &[(2, 1.1), (3, 2.0)] {
            let config = cfg(twice_j, omega);
            for &lam in &[c(0.4, 0.3), c(-1.2, 0.8), c(0.01, -0.02)] {
                let p = ComplexParam::new(lam).unwrap();
                let u = build_floquet(&config, p);
                let dd = det(&u.entries);
                assert_abs_diff_eq!(dd.norm() * lam.norm(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn companion_matches_textbook_form_for_integer_j() {
        let config = cfg(2, 2.0 * PI / 3.0);
        let lam = ComplexParam::new(c(0.3, 0.4)).unwrap();
        let u = companion_floquet(&config, lam).unwrap();
        let w = lam.w();
        let expect = [
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            [w, c(0.0, 0.0), c(0.0, 0.0)],
        ];
        for r in 0..3 {
            for cc in 0..3 {
                assert_abs_diff_eq!(
                    (u.entries[(r, cc)] - expect[r][cc]).norm(),
                    0.0,
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn companion_d2_wrap_carries_spin_sign() {
        // J = 1/2 wraps with (−1)^{2J} = −1: corner entry is −Λ⁻¹, and the
        // characteristic polynomial is z² + Λ⁻¹, consistent with the
        // closed-form eigenvalues z_M = e^{−i(2πM+λ)/2} at half-integer M.
        let config = cfg(1, PI);
        let u = companion_floquet(&config, ComplexParam::from_angle(0.0)).unwrap();
        assert_abs_diff_eq!(
            (u.entries[(0, 1)] - c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            (u.entries[(1, 0)] + c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        let p = char_poly(&u);
        assert_abs_diff_eq!((p[0] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn companion_is_site_basis_conjugation() {
        for &twice_j in &[1, 2, 3, 5] {
            let config = cfg(twice_j, 2.0 * PI / (twice_j + 1) as f64);
            let lam = ComplexParam::new(c(0.7, 0.2)).unwrap();
            let u = build_floquet(&config, lam);
            let b = fourier_site_basis(config.j);
            let site = adjoint(&b).dot(&u.entries).dot(&b);
            let comp = companion_floquet(&config, lam).unwrap();
            let dev = norm_max(&(&site - &comp.entries));
            assert!(dev <= 1e-12, "2J={twice_j}: residual {dev}");
        }
    }

    #[test]
    fn companion_general_r() {
        // ω = 2π·2/5 on d = 5
        let config = cfg(4, 4.0 * PI / 5.0);
        let lam = ComplexParam::new(c(0.5, -0.1)).unwrap();
        let u = build_floquet(&config, lam);
        let b = fourier_site_basis(config.j);
        let site = adjoint(&b).dot(&u.entries).dot(&b);
        let comp = companion_floquet(&config, lam).unwrap();
        assert!(norm_max(&(&site - &comp.entries)) <= 1e-12);
        // non-solvable ω rejected
        assert!(companion_floquet(&cfg(4, 1.0), lam).is_err());
    }

    #[test]
    fn char_poly_solvable_case() {
        let config = cfg(2, 2.0 * PI / 3.0);
        let lam = ComplexParam::new(c(0.6, 0.3)).unwrap();
        let p = char_poly(&build_floquet(&config, lam));
        let w = lam.w();
        assert_abs_diff_eq!((p[0] + w).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p[1].norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p[2].norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((p[3] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn char_poly_j1_matches_cubic_coefficients() {
        let omega: f64 = 1.234;
        let mu = -(1.0 + 2.0 * omega.cos()) / 3.0;
        let config = cfg(2, omega);
        for &lam in &[c(0.8, 0.1), c(-0.4, 1.2)] {
            let p = ComplexParam::new(lam).unwrap();
            let w = p.w();
            let coeffs = char_poly(&build_floquet(&config, p));
            let f2 = (c(2.0, 0.0) + w) * mu;
            let f1 = -(c(1.0, 0.0) + w * 2.0) * mu;
            let f0 = -w;
            assert_abs_diff_eq!((coeffs[2] - f2).norm(), 0.0, epsilon = 1e-11);
            assert_abs_diff_eq!((coeffs[1] - f1).norm(), 0.0, epsilon = 1e-11);
            assert_abs_diff_eq!((coeffs[0] - f0).norm(), 0.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn char_poly_roots_at_lambda_one() {
        let config = cfg(3, 0.9);
        let p = char_poly(&build_floquet(&config, ComplexParam::from_angle(0.0)));
        for &m in &config.j.m_values() {
            let z = Cx::from_polar(1.0, -0.9 * m);
            assert_abs_diff_eq!(poly::eval(&p, z).norm(), 0.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn affine_split_reconstructs() {
        let config = cfg(2, 1.234);
        let mu = -(1.0 + 2.0 * (1.234f64).cos()) / 3.0;
        let (g, h) = char_poly_affine_split(&config);
        // h = (−1, −2μ, μ, 0) ascending for J = 1
        assert_abs_diff_eq!((h[0] + c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!((h[1] + c(2.0 * mu, 0.0)).norm(), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!((h[2] - c(mu, 0.0)).norm(), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(h[3].norm(), 0.0, epsilon = 1e-11);
        // reconstruction against direct char_poly at a few Λ
        for &lam in &[
            c(0.5, 0.5),
            c(-1.0, 0.3),
            c(2.0, -0.7),
            c(0.1, 0.05),
            c(1.0, 0.0),
            c(0.33, -1.2),
            c(-0.61, -0.27),
            c(1.7, 0.9),
            c(-2.2, 0.05),
            c(0.9, 1.6),
        ] {
            let p = ComplexParam::new(lam).unwrap();
            let direct = char_poly(&build_floquet(&config, p));
            let rebuilt = char_poly_at_w(&g, &h, p.w());
            for k in 0..4 {
                assert!((direct[k] - rebuilt[k]).norm() <= 1e-9 * (1.0 + direct[k].norm()));
            }
        }
    }

    #[test]
    fn affine_split_solvable_is_pure_power() {
        // integer J: g = z^3, h = −1
        let config = cfg(2, 2.0 * PI / 3.0);
        let (g, h) = char_poly_affine_split(&config);
        for k in 0..3 {
            assert_abs_diff_eq!(g[k].norm(), 0.0, epsilon = 1e-10);
        }
        assert_abs_diff_eq!((g[3] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((h[0] + c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-10);
        for k in 1..4 {
            assert_abs_diff_eq!(h[k].norm(), 0.0, epsilon = 1e-10);
        }
    }
}
