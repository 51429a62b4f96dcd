//! Complex polynomials: evaluation, simultaneous root iteration
//! (Aberth–Ehrlich), Sylvester resultants and discriminants.
//!
//! Coefficients are stored in ascending order: `c[0] + c[1] z + c[2] z² + …`.
//! Root finding is seedable so callers can start the iteration from a known
//! nearby spectrum (the Λ = 1 unperturbed eigenvalues) and follow analytic
//! branches instead of relying on a generic QR sweep.

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::linalg::{det, CMat};

/// Horner evaluation.
pub fn eval(coeffs: &[Cx], z: Cx) -> Cx {
    coeffs
        .iter()
        .rev()
        .fold(Cx::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Evaluation together with the magnitude scale Σ|c_k||z|^k, the natural
/// yardstick for "is this residual small".
pub fn eval_with_scale(coeffs: &[Cx], z: Cx) -> (Cx, f64) {
    let az = z.norm();
    let mut value = Cx::new(0.0, 0.0);
    let mut scale = 0.0;
    for &c in coeffs.iter().rev() {
        value = value * z + c;
        scale = scale * az + c.norm();
    }
    (value, scale)
}

/// Coefficients of the derivative.
pub fn derivative(coeffs: &[Cx]) -> Vec<Cx> {
    if coeffs.len() <= 1 {
        return vec![Cx::new(0.0, 0.0)];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Degree after dropping trailing coefficients below `tol` in magnitude.
pub fn effective_degree(coeffs: &[Cx], tol: f64) -> usize {
    let mut deg = 0;
    for (k, c) in coeffs.iter().enumerate() {
        if c.norm() > tol {
            deg = k;
        }
    }
    deg
}

/// Monic polynomial with the given roots (ascending coefficients).
pub fn from_roots(roots: &[Cx]) -> Vec<Cx> {
    let mut coeffs = vec![Cx::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Cx::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        coeffs = next;
    }
    coeffs
}

/// Fujiwara bound on root magnitudes: all roots lie within this radius.
pub fn root_radius_bound(coeffs: &[Cx]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let mut r: f64 = 0.0;
    for k in 1..=n {
        let ratio = coeffs[n - k].norm() / lead;
        r = r.max(ratio.powf(1.0 / k as f64));
    }
    2.0 * r.max(f64::MIN_POSITIVE)
}

const ABERTH_MAX_ITER: usize = 500;
const ABERTH_TOL: f64 = 1e-13;

/// All complex roots via the Aberth–Ehrlich simultaneous iteration.
///
/// `seeds`, when provided with exactly `degree` entries, start the iteration
/// (coincident seeds are separated deterministically); otherwise seeds are
/// placed on the Fujiwara circle. Convergence is judged by the scaled
/// residual |p(z)| ≤ tol·Σ|c_k||z|^k, which also handles multiple roots.
///
/// The returned multiset is validated by rebuilding the monic polynomial
/// from it: per-root residuals alone cannot tell when two iterates park at
/// the same simple root and leave another unclaimed (which happens when
/// several seeds fall into one basin). On mismatch the iteration reruns
/// from rotated Fujiwara rings before giving up.
pub fn aberth_roots(coeffs: &[Cx], seeds: Option<&[Cx]>) -> Result<Vec<Cx>> {
    let deg = effective_degree(coeffs, 0.0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let coeffs = &coeffs[..deg + 1];
    let lead = coeffs[deg];
    let monic: Vec<Cx> = coeffs.iter().map(|&c| c / lead).collect();

    let ring = |phase: f64| -> Vec<Cx> {
        let r = root_radius_bound(&monic).max(1e-12);
        (0..deg)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + phase;
                Cx::from_polar(r, th)
            })
            .collect()
    };
    let mut attempts: Vec<Vec<Cx>> = Vec::new();
    if let Some(s) = seeds {
        if s.len() == deg {
            attempts.push(s.to_vec());
        }
    }
    attempts.push(ring(0.3761));
    attempts.push(ring(1.7321));

    let mut worst_seen = f64::INFINITY;
    for mut z in attempts {
        separate_coincident(&mut z);
        aberth_iterate(&monic, &mut z);
        match roots_reconstruction_error(&monic, &z) {
            err if err <= 1e-5 => return Ok(z),
            err => worst_seen = worst_seen.min(err),
        }
    }
    Err(Error::RootsNotConverged {
        residual: worst_seen,
    })
}

fn aberth_iterate(monic: &[Cx], z: &mut [Cx]) {
    let deg = z.len();
    let dmonic = derivative(monic);
    let tol = ABERTH_TOL * (1.0 + deg as f64);
    let mut converged = vec![false; deg];
    for _ in 0..ABERTH_MAX_ITER {
        let mut moved = 0.0f64;
        for i in 0..deg {
            if converged[i] {
                continue;
            }
            let (p, scale) = eval_with_scale(monic, z[i]);
            if p.norm() <= tol * scale.max(f64::MIN_POSITIVE) {
                converged[i] = true;
                continue;
            }
            let dp = eval(&dmonic, z[i]);
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                Cx::new(1e-3 * (1.0 + z[i].norm()), 1e-3)
            };
            let mut sum = Cx::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Cx::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() > 1e-12 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if converged.iter().all(|&c| c) || moved < 1e-16 {
            break;
        }
    }
    // Newton polish (no-op within noise for multiple roots, sharpens simple ones)
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let p = eval(monic, *zi);
            let dp = eval(&dmonic, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if step.norm() > 0.5 * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }
}

/// Coefficient-space distance between the monic polynomial and the one
/// rebuilt from the candidate roots. Each coefficient is scaled by the
/// elementary-symmetric bound built from the root magnitudes (the largest
/// value that coefficient could take before cancellation), so errors in
/// small coefficients — the ones controlling small roots — are not masked
/// by large ones.
fn roots_reconstruction_error(monic: &[Cx], roots: &[Cx]) -> f64 {
    let rebuilt = from_roots(roots);
    let abs_roots: Vec<Cx> = roots.iter().map(|r| Cx::new(r.norm(), 0.0)).collect();
    let bound = from_roots(&abs_roots);
    monic
        .iter()
        .zip(&rebuilt)
        .zip(&bound)
        .map(|((a, b), s)| (a - b).norm() / (s.re.abs() + a.norm()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn separate_coincident(z: &mut [Cx]) {
    let n = z.len();
    for i in 0..n {
        for j in 0..i {
            if (z[i] - z[j]).norm() < 1e-9 * (1.0 + z[i].norm()) {
                let kick = 1e-4 * (1.0 + z[i].norm());
                let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                z[i] += Cx::from_polar(kick, th);
            }
        }
    }
}

/// Sylvester resultant of two polynomials (ascending coefficients, true
/// degrees given by the slice lengths).
pub fn sylvester_resultant(a: &[Cx], b: &[Cx]) -> Cx {
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m == 0 && n == 0 {
        return Cx::new(1.0, 0.0);
    }
    let size = m + n;
    let mut s = CMat::zeros((size, size));
    // n rows of a's descending coefficients, then m rows of b's
    for row in 0..n {
        for k in 0..=m {
            s[(row, row + k)] = a[m - k];
        }
    }
    for row in 0..m {
        for k in 0..=n {
            s[(n + row, row + k)] = b[n - k];
        }
    }
    det(&s)
}

/// Discriminant of `f`: (−1)^{m(m−1)/2}·Res(f, f′)/lc(f).
pub fn discriminant(f: &[Cx]) -> Cx {
    let m = f.len() - 1;
    if m < 2 {
        return Cx::new(1.0, 0.0);
    }
    let fp = derivative(f);
    let res = sylvester_resultant(f, &fp);
    let sign = if (m * (m - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    res / f[m] * sign
}

/// Recover ascending coefficients from samples on the circle |w| = `radius`
/// at the n-th roots of unity (n = `values.len()`), for a polynomial of
/// degree < n. This is an inverse DFT, so the node system is perfectly
/// conditioned.
pub fn interpolate_on_circle(values: &[Cx], radius: f64) -> Vec<Cx> {
    let n = values.len();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Cx::new(0.0, 0.0);
        for (j, &v) in values.iter().enumerate() {
            let th = -2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64;
            acc += v * Cx::from_polar(1.0, th);
        }
        coeffs.push(acc / n as f64 / radius.powi(k as i32));
    }
    coeffs
}

/// The sampling node set matching [`interpolate_on_circle`].
pub fn circle_nodes(n: usize, radius: f64) -> Vec<Cx> {
    (0..n)
        .map(|j| Cx::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn roots_of_cubic_with_known_roots() {
        let roots = vec![c(1.0, 0.0), c(-0.5, 0.8), c(0.3, -2.0)];
        let coeffs = from_roots(&roots);
        let found = aberth_roots(&coeffs, None).unwrap();
        for r in &roots {
            let best = found
                .iter()
                .map(|f| (f - r).norm())
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(best, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn roots_with_extreme_magnitude_spread() {
        // roots at 1e5, -1e5, 1e-5, -1e-5-ish: reciprocal-style quartic
        let roots = vec![c(2e5, 0.0), c(-3e5, 0.0), c(4e-6, 0.0), c(-5e-6, 0.0)];
        let coeffs = from_roots(&roots);
        let found = aberth_roots(&coeffs, None).unwrap();
        for r in &roots {
            let best = found
                .iter()
                .map(|f| (f - r).norm() / (1.0 + r.norm()))
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(best, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn double_root_converges_by_residual() {
        let roots = vec![c(1.0, 1.0), c(1.0, 1.0), c(-2.0, 0.0)];
        let coeffs = from_roots(&roots);
        let found = aberth_roots(&coeffs, None).unwrap();
        let near_double = found
            .iter()
            .filter(|f| (*f - c(1.0, 1.0)).norm() < 1e-6)
            .count();
        assert_eq!(near_double, 2);
    }

    #[test]
    fn discriminant_sign_matches_cubic_convention() {
        // monic cubic with distinct real roots 0, 1, 2: Disc = prod (ri-rj)^2 = 4
        let coeffs = from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let d = discriminant(&coeffs);
        assert_abs_diff_eq!(d.re, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn resultant_vanishes_iff_common_root() {
        let a = from_roots(&[c(1.0, 2.0), c(-1.0, 0.0)]);
        let b = from_roots(&[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)]);
        assert_abs_diff_eq!(sylvester_resultant(&a, &b).norm(), 0.0, epsilon = 1e-10);
        let b2 = from_roots(&[c(1.1, 2.0), c(3.0, 0.0), c(0.0, -1.0)]);
        assert!(sylvester_resultant(&a, &b2).norm() > 1e-3);
    }

    #[test]
    fn circle_interpolation_roundtrip() {
        let coeffs = vec![c(1.0, -2.0), c(0.0, 0.5), c(-3.0, 0.0), c(0.25, 0.25)];
        let nodes = circle_nodes(7, 1.5);
        let values: Vec<Cx> = nodes.iter().map(|&w| eval(&coeffs, w)).collect();
        let back = interpolate_on_circle(&values, 1.5);
        for k in 0..7 {
            let expect = if k < 4 { coeffs[k] } else { c(0.0, 0.0) };
            assert_abs_diff_eq!((back[k] - expect).norm(), 0.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn reconstructed_roots_reproduce_polynomial(
            res in proptest::collection::vec(-3.0f64..3.0, 2..6),
            ims in proptest::collection::vec(-3.0f64..3.0, 2..6),
        ) {
            let n = res.len().min(ims.len());
            let roots: Vec<Cx> = (0..n).map(|i| c(res[i], ims[i])).collect();
            let coeffs = from_roots(&roots);
            let found = aberth_roots(&coeffs, None).unwrap();
            let rebuilt = from_roots(&found);
            for k in 0..coeffs.len() {
                prop_assert!((rebuilt[k] - coeffs[k]).norm() < 1e-6 * (1.0 + coeffs[k].norm()));
            }
        }
    }
}
