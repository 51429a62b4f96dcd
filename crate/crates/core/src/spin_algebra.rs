//! Angular-momentum operators, kick vectors and the Fourier site basis for a
//! spin-J top (dimension d = 2J + 1).
//!
//! J is stored as the integer 2J so half-integer spins are exact; magnetic
//! quantum numbers run M = −J, …, J in ascending order everywhere.

use ndarray::Array2;
use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// A non-negative half-integer spin J ∈ {1/2, 1, 3/2, …}, stored as 2J.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub fn from_twice(twice: i32) -> Result<HalfInt> {
        if twice < 1 {
            return Err(Error::InvalidConfig(format!(
                "spin must satisfy 2J >= 1, got 2J = {twice}"
            )));
        }
        Ok(HalfInt { twice })
    }

    pub fn twice(&self) -> i32 {
        self.twice
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Hilbert-space dimension d = 2J + 1.
    pub fn dimension(&self) -> usize {
        (self.twice + 1) as usize
    }

    /// Ascending magnetic quantum numbers −J, −J+1, …, J as 2M integers.
    pub fn twice_m_values(&self) -> Vec<i32> {
        (0..self.dimension() as i32)
            .map(|k| -self.twice + 2 * k)
            .collect()
    }

    /// Ascending magnetic quantum numbers as floats.
    pub fn m_values(&self) -> Vec<f64> {
        self.twice_m_values()
            .iter()
            .map(|&t| t as f64 / 2.0)
            .collect()
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Normalized kick direction |v⟩, components ⟨J,M|v⟩ ordered M = −J…J.
#[derive(Debug, Clone, PartialEq)]
pub struct KickVector {
    coeffs: Vec<Cx>,
}

pub const KICK_NORM_TOL: f64 = 1e-12;

impl KickVector {
    /// Accepts a coefficient vector that is already normalized to within 1e-12.
    pub fn new(coeffs: Vec<Cx>) -> Result<KickVector> {
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > KICK_NORM_TOL {
            return Err(Error::InvalidConfig(format!(
                "kick vector norm^2 = {norm_sqr}, expected 1 within {KICK_NORM_TOL}"
            )));
        }
        Ok(KickVector { coeffs })
    }

    /// Normalizes the coefficients, rejecting the zero vector.
    pub fn normalized(coeffs: Vec<Cx>) -> Result<KickVector> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidConfig("kick vector must be nonzero".into()));
        }
        Ok(KickVector {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every ⟨J,M|v⟩ is nonzero — together with non-resonance this
    /// is what the anholonomy theorem needs.
    pub fn all_components_nonzero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() > KICK_NORM_TOL)
    }
}

/// The uniform kick |v⟩ = d^{-1/2} Σ_M |J,M⟩.
pub fn uniform_kick(j: HalfInt) -> KickVector {
    let d = j.dimension();
    let amp = Cx::new(1.0 / (d as f64).sqrt(), 0.0);
    KickVector {
        coeffs: vec![amp; d],
    }
}

/// Static data of the matrix family U(Λ): spin, precession angle and kick
/// direction. Λ itself is supplied per evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TopConfig {
    pub j: HalfInt,
    pub omega: f64,
    pub kick: KickVector,
}

impl TopConfig {
    pub fn new(j: HalfInt, omega: f64, kick: KickVector) -> Result<TopConfig> {
        if kick.len() != j.dimension() {
            return Err(Error::InvalidConfig(format!(
                "kick vector has {} components, expected d = {}",
                kick.len(),
                j.dimension()
            )));
        }
        Ok(TopConfig { j, omega, kick })
    }

    /// Uniform-kick configuration.
    pub fn uniform(j: HalfInt, omega: f64) -> TopConfig {
        TopConfig {
            j,
            omega,
            kick: uniform_kick(j),
        }
    }

    pub fn dimension(&self) -> usize {
        self.j.dimension()
    }

    pub fn has_uniform_kick(&self) -> bool {
        let d = self.dimension();
        let amp = 1.0 / (d as f64).sqrt();
        self.kick
            .coeffs()
            .iter()
            .all(|c| (c.re - amp).abs() <= KICK_NORM_TOL && c.im.abs() <= KICK_NORM_TOL)
    }
}

/// Ĵ_z in the standard |J,M⟩ basis: diag(−J, −J+1, …, J).
pub fn build_jz(j: HalfInt) -> Array2<f64> {
    let ms = j.m_values();
    Array2::from_diag(&ndarray::Array1::from(ms))
}

/// Ĵ_y = (Ĵ₊ − Ĵ₋)/(2i) in the |J,M⟩ basis.
pub fn build_jy(j: HalfInt) -> CMat {
    let d = j.dimension();
    let ms = j.m_values();
    let jv = j.value();
    let mut jy = CMat::zeros((d, d));
    for (k, &m) in ms.iter().enumerate().take(d - 1) {
        // ⟨M+1|J₊|M⟩ = sqrt(J(J+1) − M(M+1))
        let amp = (jv * (jv + 1.0) - m * (m + 1.0)).sqrt();
        jy[(k + 1, k)] = Cx::new(0.0, -0.5) * amp; // J₊/(2i)
        jy[(k, k + 1)] = Cx::new(0.0, 0.5) * amp; // −J₋/(2i)
    }
    jy
}

/// The polynomial-in-Ĵ_y rank-1 projectors available in closed form for
/// J ∈ {1/2, 1, 3/2}. Each is an orthogonal projector onto the highest-weight
/// Ĵ_y eigenvector; they certify that a rank-1 kick is a low-order multipole,
/// and are not used as the simulation kick.
pub fn multipole_projector(j: HalfInt) -> Result<CMat> {
    let jy = build_jy(j);
    let d = j.dimension();
    let id = CMat::eye(d);
    let shifted = |s: f64| -> CMat { &jy + &(id.clone() * Cx::new(s, 0.0)) };
    match j.twice() {
        1 => Ok(shifted(0.5)),
        2 => Ok(shifted(1.0).dot(&jy) * Cx::new(0.5, 0.0)),
        3 => {
            let prod = shifted(1.5).dot(&shifted(0.5)).dot(&shifted(-0.5));
            Ok(prod * Cx::new(1.0 / 6.0, 0.0))
        }
        _ => Err(Error::Unsupported(format!(
            "multipole projector only available for J = 1/2, 1, 3/2 (got J = {j})"
        ))),
    }
}

/// Unitary change of basis to the Fourier "site" states: column m holds
/// ⟨J,M|m⟩ = e^{i2πMm/d}/√d. Column m = 0 is the uniform kick.
pub fn fourier_site_basis(j: HalfInt) -> CMat {
    let d = j.dimension();
    let ms = j.m_values();
    let amp = 1.0 / (d as f64).sqrt();
    CMat::from_shape_fn((d, d), |(row, col)| {
        let phase = 2.0 * std::f64::consts::PI * ms[row] * col as f64 / d as f64;
        Cx::from_polar(amp, phase)
    })
}
