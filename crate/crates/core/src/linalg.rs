//! Small dense complex linear algebra: LU solves, rank estimates and the
//! Hessenberg route to characteristic polynomials.
//!
//! Everything here targets the d×d Floquet matrices of this crate (d = 2J+1,
//! typically well below 30), so the kernels are plain O(d³) loops with
//! partial or full pivoting and no blocking.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Cx = Complex64;
pub type CMat = Array2<Cx>;
pub type CVec = Array1<Cx>;

/// Conjugate transpose.
pub fn adjoint(a: &CMat) -> CMat {
    let (n, m) = a.dim();
    CMat::from_shape_fn((m, n), |(i, j)| a[(j, i)].conj())
}

/// Frobenius norm.
pub fn norm_fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute column sum.
pub fn norm_one(a: &CMat) -> f64 {
    let (n, m) = a.dim();
    (0..m)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry magnitude.
pub fn norm_max(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian inner product ⟨a|b⟩ = Σ conj(a_i) b_i.
pub fn inner(a: &CVec, b: &CVec) -> Cx {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Plain (unconjugated) pairing, used for left-row/right-column biorthogonality.
pub fn pair(a: &CVec, b: &CVec) -> Cx {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &CVec) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting.
///
/// Pivots smaller than `regularize` in magnitude are replaced by it, which
/// keeps the solve usable for inverse iteration on (nearly) singular shifts.
pub struct Lu {
    lu: CMat,
    piv: Vec<usize>,
    sign_flips: usize,
    /// Smallest pivot magnitude encountered before regularization.
    pub min_pivot: f64,
}

impl Lu {
    pub fn factor(a: &CMat, regularize: f64) -> Lu {
        let n = a.nrows();
        let mut lu = a.clone();
        let mut piv = Vec::with_capacity(n);
        let mut sign_flips = 0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut imax = k;
            let mut vmax = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > vmax {
                    vmax = v;
                    imax = i;
                }
            }
            if imax != k {
                for j in 0..n {
                    lu.swap((k, j), (imax, j));
                }
                sign_flips += 1;
            }
            piv.push(imax);
            min_pivot = min_pivot.min(lu[(k, k)].norm());
            if lu[(k, k)].norm() == 0.0 && regularize == 0.0 {
                // whole remaining column is zero: nothing to eliminate and
                // the determinant is exactly zero
                continue;
            }
            if lu[(k, k)].norm() < regularize {
                let phase = if lu[(k, k)].norm() == 0.0 {
                    Cx::new(1.0, 0.0)
                } else {
                    lu[(k, k)] / lu[(k, k)].norm()
                };
                lu[(k, k)] = phase * regularize;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let sub = f * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Lu {
            lu,
            piv,
            sign_flips,
            min_pivot,
        }
    }

    pub fn solve_vec(&self, b: &CVec) -> CVec {
        let n = self.lu.nrows();
        let mut x = b.clone();
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            for i in 0..k {
                let sub = self.lu[(k, i)] * x[i];
                x[k] -= sub;
            }
        }
        for k in (0..n).rev() {
            for i in k + 1..n {
                let sub = self.lu[(k, i)] * x[i];
                x[k] -= sub;
            }
            x[k] /= self.lu[(k, k)];
        }
        x
    }

    pub fn det(&self) -> Cx {
        let n = self.lu.nrows();
        let mut d = if self.sign_flips.is_multiple_of(2) {
            Cx::new(1.0, 0.0)
        } else {
            Cx::new(-1.0, 0.0)
        };
        for k in 0..n {
            d *= self.lu[(k, k)];
        }
        d
    }

    pub fn inverse(&self) -> CMat {
        let n = self.lu.nrows();
        let mut inv = CMat::zeros((n, n));
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = Cx::new(1.0, 0.0);
            let col = self.solve_vec(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Determinant via partial-pivot LU (no regularization).
pub fn det(a: &CMat) -> Cx {
    Lu::factor(a, 0.0).det()
}

/// Matrix inverse; fails when a pivot underflows the scale-relative cutoff.
pub fn inverse(a: &CMat) -> Result<CMat> {
    let lu = Lu::factor(a, 0.0);
    if lu.min_pivot <= f64::EPSILON * norm_max(a) * a.nrows() as f64 {
        return Err(Error::Precondition(format!(
            "matrix numerically singular (min pivot {:.3e})",
            lu.min_pivot
        )));
    }
    Ok(lu.inverse())
}

/// Numerical rank via Gaussian elimination with full pivoting: pivots above
/// `tol` count.
pub fn rank(a: &CMat, tol: f64) -> usize {
    let (n, m) = a.dim();
    let mut w = a.clone();
    let k_max = n.min(m);
    let mut r = 0;
    for k in 0..k_max {
        let mut pi = k;
        let mut pj = k;
        let mut vmax = 0.0;
        for i in k..n {
            for j in k..m {
                let v = w[(i, j)].norm();
                if v > vmax {
                    vmax = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if vmax <= tol {
            break;
        }
        r += 1;
        if pi != k {
            for j in 0..m {
                w.swap((k, j), (pi, j));
            }
        }
        if pj != k {
            for i in 0..n {
                w.swap((i, k), (i, pj));
            }
        }
        let pivot = w[(k, k)];
        for i in k + 1..n {
            let f = w[(i, k)] / pivot;
            for j in k..m {
                let sub = f * w[(k, j)];
                w[(i, j)] -= sub;
            }
        }
    }
    r
}

/// Reduce to upper Hessenberg form by stabilized elementary similarity
/// transforms (ELMHES-style Gaussian reduction with pivoting).
pub fn hessenberg(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        // pivot: largest magnitude in column m-1, rows m..n
        let mut imax = m;
        let mut vmax = h[(m, m - 1)].norm();
        for i in m + 1..n {
            let v = h[(i, m - 1)].norm();
            if v > vmax {
                vmax = v;
                imax = i;
            }
        }
        if vmax == 0.0 {
            continue;
        }
        if imax != m {
            for j in 0..n {
                h.swap((m, j), (imax, j));
            }
            for i in 0..n {
                h.swap((i, m), (i, imax));
            }
        }
        let pivot = h[(m, m - 1)];
        for i in m + 1..n {
            let y = h[(i, m - 1)] / pivot;
            if y == Cx::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let sub = y * h[(m, j)];
                h[(i, j)] -= sub;
            }
            for r in 0..n {
                let add = y * h[(r, i)];
                h[(r, m)] += add;
            }
        }
    }
    // clear the eliminated entries below the subdiagonal
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = Cx::new(0.0, 0.0);
        }
    }
    h
}

/// Characteristic polynomial det(zI − H) of an upper Hessenberg matrix via
/// the leading-principal-minor recurrence. Returns ascending coefficients of
/// the monic degree-n polynomial.
pub fn char_poly_hessenberg(h: &CMat) -> Vec<Cx> {
    let n = h.nrows();
    let zero = Cx::new(0.0, 0.0);
    let one = Cx::new(1.0, 0.0);
    // p[k] = coefficients (ascending) of det(zI_k - H_k)
    let mut p: Vec<Vec<Cx>> = Vec::with_capacity(n + 1);
    p.push(vec![one]);
    for k in 1..=n {
        let mut next = vec![zero; k + 1];
        // (z - h[k-1][k-1]) * p[k-1]
        for (i, &c) in p[k - 1].iter().enumerate() {
            next[i + 1] += c;
            next[i] -= h[(k - 1, k - 1)] * c;
        }
        // - sum_r h[r][k-1] * prod_{j=r+1}^{k-1} h[j][j-1] * p[r]
        let mut subprod = one;
        for r in (0..k.saturating_sub(1)).rev() {
            subprod *= h[(r + 1, r)];
            let factor = h[(r, k - 1)] * subprod;
            if factor != zero {
                for (i, &c) in p[r].iter().enumerate() {
                    next[i] -= factor * c;
                }
            }
        }
        p.push(next);
    }
    p.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn test_matrix() -> CMat {
        CMat::from_shape_vec(
            (3, 3),
            vec![
                c(1.0, 0.5),
                c(-0.3, 0.1),
                c(0.2, -0.7),
                c(0.0, 1.2),
                c(0.8, -0.4),
                c(-1.1, 0.0),
                c(0.5, 0.5),
                c(0.9, -0.2),
                c(0.3, 0.6),
            ],
        )
        .unwrap()
    }

    #[test]
    fn lu_solve_and_det() {
        let a = test_matrix();
        let b = CVec::from(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 2.0)]);
        let lu = Lu::factor(&a, 0.0);
        let x = lu.solve_vec(&b);
        let r = a.dot(&x);
        for i in 0..3 {
            assert_abs_diff_eq!((r[i] - b[i]).norm(), 0.0, epsilon = 1e-12);
        }
        // det against explicit cofactor expansion
        let m = &a;
        let det3 = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
        assert_abs_diff_eq!((lu.det() - det3).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = test_matrix();
        let inv = inverse(&a).unwrap();
        let id = a.dot(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(id[(i, j)].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(id[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rank_detects_deficiency() {
        let mut a = test_matrix();
        // make row 2 a multiple of row 0
        for j in 0..3 {
            a[(2, j)] = a[(0, j)] * c(2.0, -1.0);
        }
        assert_eq!(rank(&a, 1e-10), 2);
        assert_eq!(rank(&test_matrix(), 1e-10), 3);
    }

    #[test]
    fn hessenberg_preserves_char_poly() {
        let a = CMat::from_shape_fn((5, 5), |(i, j)| {
            // deterministic pseudo-random entries
            let s = (i * 5 + j) as f64;
            c((s * 12.9898).sin() * 0.7, (s * 78.233).cos() * 0.4)
        });
        let h = hessenberg(&a);
        let p = char_poly_hessenberg(&h);
        assert_eq!(p.len(), 6);
        assert_abs_diff_eq!((p[5] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-13);
        // evaluate char poly at a few z and compare with det(zI - A)
        for &z in &[c(0.3, 0.4), c(-1.0, 0.2), c(2.0, -1.5)] {
            let mut m = a.clone() * c(-1.0, 0.0);
            for i in 0..5 {
                m[(i, i)] += z;
            }
            let direct = det(&m);
            let horner = p.iter().rev().fold(c(0.0, 0.0), |acc, &ck| acc * z + ck);
            assert_abs_diff_eq!(
                (direct - horner).norm(),
                0.0,
                epsilon = 1e-9 * (1.0 + direct.norm())
            );
        }
    }
}
