//! Right/left eigendecomposition of U(Λ), quasienergy extraction, and the
//! closed-form oracle at solvable ω = 2πr/d.
//!
//! Eigenvalues are found as roots of the characteristic polynomial by
//! Aberth–Ehrlich iteration seeded with the Λ = 1 unperturbed spectrum
//! e^{−iωM}; root-based continuation behaves better near defective points
//! than a generic QR sweep and keeps the solver dependency-free. Right
//! eigenvectors come from regularized inverse iteration, left rows from the
//! inverse of the right-vector matrix. Near an exceptional point the
//! left/right pairing degenerates; pairs are flagged, never regularized.

use ndarray::Array1;
use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::floquet::{
    char_poly_affine_split, char_poly_at_w, solvable_r, ComplexParam, FloquetMatrix,
};
use crate::linalg::{norm2, norm_max, norm_one, pair, CMat, CVec, Lu};
use crate::poly;
use crate::spin_algebra::TopConfig;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Unit-circle tolerance below which quasienergies are treated as real.
pub const UNIT_CIRCLE_TOL: f64 = 1e-10;
/// Pair collinearity |⟨l̂|r̂⟩| below this flags the pair as near-defective.
pub const PAIR_DEFECT_TOL: f64 = 1e-3;
/// Right-vector matrix condition estimate above this flags the decomposition.
pub const CONDITION_FLAG: f64 = 1e8;

/// Eigen data of one evaluation U(Λ).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues z_n (order unspecified; see [`quasienergies_ordered`]).
    pub eigenvalues: Vec<Cx>,
    /// Right eigenvectors as columns, unit 2-norm, gauge: largest component
    /// real positive.
    pub right: CMat,
    /// Left eigenvectors as rows, scaled so row_m · col_n = δ_mn (plain dot,
    /// no conjugation).
    pub left: CMat,
    /// Re E_n = −arg z_n mapped into [0, 2π).
    pub quasienergies: Vec<f64>,
    /// Set when |Λ| is off the unit circle, i.e. quasienergies have an
    /// imaginary part ln|z| not stored here.
    pub complex_quasienergy: bool,
    /// 1-norm condition estimate of the right-vector matrix.
    pub condition: f64,
    /// 1 − |⟨l̂_n|r̂_n⟩| per pair (0 for an orthonormal pair, → 1 at an EP).
    pub pair_defect: Vec<f64>,
    /// Per-pair near-defectiveness flags.
    pub condition_flags: Vec<bool>,
    pub lambda: ComplexParam,
}

impl SpectralDecomposition {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn right_vec(&self, n: usize) -> CVec {
        self.right.column(n).to_owned()
    }

    pub fn left_row(&self, n: usize) -> CVec {
        self.left.row(n).to_owned()
    }

    pub fn any_flagged(&self) -> bool {
        self.condition_flags.iter().any(|&f| f)
    }
}

fn wrap_tau(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y >= TAU {
        y -= TAU;
    }
    y
}

/// Deterministic pseudo-random unit vector for inverse-iteration starts.
fn seed_vector(d: usize, salt: u64) -> CVec {
    let mut state = salt
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let mut v = CVec::zeros(d);
    for i in 0..d {
        v[i] = Cx::new(next(), next());
    }
    let n = norm2(&v);
    v.mapv_into(|x| x / n)
}

fn gauge_largest_real_positive(v: &mut CVec) {
    let mut imax = 0;
    let mut vmax = 0.0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > vmax {
            vmax = x.norm();
            imax = i;
        }
    }
    if vmax > 0.0 {
        let phase = v[imax] / v[imax].norm();
        v.mapv_inplace(|x| x / phase);
    }
}

/// Right eigenvector for a given eigenvalue by regularized inverse iteration.
fn right_eigenvector(m: &CMat, z: Cx, salt: u64) -> CVec {
    let d = m.nrows();
    let mut shifted = m.clone();
    for i in 0..d {
        shifted[(i, i)] -= z;
    }
    let reg = 1e-14 * (norm_max(m) + z.norm()).max(f64::MIN_POSITIVE);
    let lu = Lu::factor(&shifted, reg);
    let mut v = seed_vector(d, salt);
    for _ in 0..3 {
        v = lu.solve_vec(&v);
        let n = norm2(&v);
        if !n.is_finite() || n == 0.0 {
            v = seed_vector(d, salt.wrapping_add(1));
            continue;
        }
        v.mapv_inplace(|x| x / n);
    }
    gauge_largest_real_positive(&mut v);
    v
}

/// Full right/left eigendecomposition of a Floquet matrix.
pub fn eigendecompose(u: &FloquetMatrix) -> Result<SpectralDecomposition> {
    let d = u.config.dimension();
    if u.entries
        .iter()
        .any(|x| !x.re.is_finite() || !x.im.is_finite())
    {
        return Err(Error::Precondition(
            "Floquet matrix has non-finite entries".into(),
        ));
    }
    // The w-affine split is assembled from the well-conditioned w = ±1
    // matrices and evaluated exactly at this w, which keeps the coefficients
    // at full relative accuracy even when |Λ| is extreme (near-merge EPs).
    let (g_split, h_split) = char_poly_affine_split(&u.config);
    let p = char_poly_at_w(&g_split, &h_split, u.lambda.w());
    let seeds: Vec<Cx> = u
        .config
        .j
        .m_values()
        .iter()
        .map(|&m| Cx::from_polar(1.0, -u.config.omega * m))
        .collect();
    let eigenvalues = match poly::aberth_roots(&p, Some(&seeds)) {
        Ok(r) => r,
        Err(_) => poly::aberth_roots(&p, None).map_err(|_| Error::SolverDiverged {
            lambda: u.lambda.value(),
        })?,
    };

    let mut right = CMat::zeros((d, d));
    for (n, &z) in eigenvalues.iter().enumerate() {
        let v = right_eigenvector(&u.entries, z, n as u64 + 1);
        for i in 0..d {
            right[(i, n)] = v[i];
        }
    }

    let lu = Lu::factor(&right, 1e-300);
    let mut left = lu.inverse();
    let condition = norm_one(&right) * norm_one(&left);

    // rescale rows so the biorthonormal pairing is exactly 1 on the diagonal
    for n in 0..d {
        let l = left.row(n).to_owned();
        let r = right.column(n).to_owned();
        let s = pair(&l, &r);
        if s.norm() > 1e-300 {
            for jj in 0..d {
                left[(n, jj)] /= s;
            }
        }
    }

    let mut pair_defect = Vec::with_capacity(d);
    let mut condition_flags = Vec::with_capacity(d);
    for n in 0..d {
        let l = left.row(n).to_owned();
        let r = right.column(n).to_owned();
        let s = pair(&l, &r).norm() / (norm2(&l) * norm2(&r)).max(f64::MIN_POSITIVE);
        pair_defect.push(1.0 - s.min(1.0));
        condition_flags.push(s < PAIR_DEFECT_TOL || condition > CONDITION_FLAG);
    }

    let quasienergies: Vec<f64> = eigenvalues.iter().map(|z| wrap_tau(-z.arg())).collect();
    let complex_quasienergy = !u.lambda.on_unit_circle(UNIT_CIRCLE_TOL);

    Ok(SpectralDecomposition {
        eigenvalues,
        right,
        left,
        quasienergies,
        complex_quasienergy,
        condition,
        pair_defect,
        condition_flags,
        lambda: u.lambda,
    })
}

/// Quasienergies sorted ascending in the principal window [0, 2π) together
/// with the ordering permutation: `perm[n]` is the index (into the
/// decomposition) of the rank-n quasienergy. Ties are broken by index; sweep
/// continuity is the tracker's job, not the cold sort's.
pub fn quasienergies_ordered(dec: &SpectralDecomposition) -> (Vec<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..dec.dimension()).collect();
    perm.sort_by(|&a, &b| {
        dec.quasienergies[a]
            .partial_cmp(&dec.quasienergies[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sorted = perm.iter().map(|&i| dec.quasienergies[i]).collect();
    (sorted, perm)
}

/// One closed-form eigenpair of the solvable family, expressed in the
/// Fourier site basis.
#[derive(Debug, Clone)]
pub struct SolvableEigenpair {
    /// 2M of the branch label.
    pub twice_m: i32,
    /// z_M = e^{−i(2πrM+λ)/d}.
    pub z: Cx,
    /// E_M = (λ + 2πrM)/d; complex when λ is complex.
    pub quasienergy: Cx,
    /// Right eigenvector components ⟨m|ξ_M⟩ (z^m/√d at r = 1).
    pub right: CVec,
    /// Left eigenvector row components ⟨ξ^L_M|m⟩ (z^{−m}/√d at r = 1);
    /// biorthonormal against `right` under the plain (unconjugated) pairing.
    pub left: CVec,
}

/// Closed-form eigensystem at solvable ω = 2πr/d with the uniform kick.
///
/// Valid for every Λ ≠ 0 including complex values. The eigenvector follows
/// from walking the single hopping cycle of the companion matrix, which for
/// r = 1 reduces to the geometric components z^m/√d.
pub fn solvable_eigensystem(
    config: &TopConfig,
    lambda: ComplexParam,
    twice_m: i32,
) -> Result<SolvableEigenpair> {
    let d = config.dimension();
    let r = solvable_r(config.omega, d, 1e-12).ok_or(Error::NotSolvable {
        omega: config.omega,
        d,
    })?;
    if !config.has_uniform_kick() {
        return Err(Error::Precondition(
            "solvable oracle requires the uniform kick".into(),
        ));
    }
    if !config.j.twice_m_values().contains(&twice_m) {
        return Err(Error::Precondition(format!(
            "2M = {twice_m} not in the spin-{} multiplet",
            config.j
        )));
    }
    let m = twice_m as f64 / 2.0;
    let lam = lambda.angle();
    let quasienergy = (lam + TAU * r as f64 * m) / d as f64;
    let z = (-Cx::i() * quasienergy).exp();

    let wrap_sign = if config.j.twice() % 2 == 0 { 1.0 } else { -1.0 };
    let w = lambda.w();
    // companion hop amplitudes: A[(j−r) mod d, j] = amp(j)
    let amp = |j: usize| -> Cx {
        let shifted = j as i64 - r;
        let mut a = if shifted < 0 {
            Cx::new(wrap_sign, 0.0)
        } else {
            Cx::new(1.0, 0.0)
        };
        if j == 0 {
            a *= w;
        }
        a
    };
    let root_amp = Cx::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut right = Array1::from(vec![Cx::new(0.0, 0.0); d]);
    let mut left = Array1::from(vec![Cx::new(0.0, 0.0); d]);
    right[0] = root_amp;
    left[0] = root_amp;
    // walk the hopping cycle: x_j = z·x_{(j−r) mod d}/amp(j) and
    // y_{(j−r) mod d} = z·y_j/amp(j)
    let mut j = 0usize;
    for _ in 0..d - 1 {
        let next = (j + r as usize) % d;
        right[next] = z * right[j] / amp(next);
        j = next;
    }
    let mut jl = 0usize;
    for _ in 0..d - 1 {
        let prev = ((jl as i64 - r).rem_euclid(d as i64)) as usize;
        left[prev] = z * left[jl] / amp(jl);
        jl = prev;
    }
    // pin exact biorthonormality
    let s = pair(&left, &right);
    let left = left.mapv(|x| x / s);

    Ok(SolvableEigenpair {
        twice_m,
        z,
        quasienergy,
        right,
        left,
    })
}

/// All d closed-form eigenpairs, ascending in M.
pub fn solvable_all(config: &TopConfig, lambda: ComplexParam) -> Result<Vec<SolvableEigenpair>> {
    config
        .j
        .twice_m_values()
        .into_iter()
        .map(|tm| solvable_eigensystem(config, lambda, tm))
        .collect()
}
