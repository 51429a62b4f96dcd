//! Adiabatic sweeps along the Hermitian cycle C (λ: 0 → 2π on |Λ| = 1),
//! anholonomy permutation extraction and the non-resonance check.
//!
//! With the quasienergies arranged 0 ≤ E_0 < E_1 < … < E_{d−1} < 2π at
//! λ = 0, one cycle sends rank n to rank n+1 (mod d, the top branch wrapping
//! up by 2π) — a single d-cycle irrespective of ω and the kick, as long as ω
//! is non-resonant and every ⟨J,M|v⟩ is nonzero. The itinerary composes this
//! shift with the λ = 0 identification of ranks with |J,M⟩ labels.

use std::collections::BTreeMap;

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::floquet::{build_floquet, ComplexParam};
use crate::linalg::CVec;
use crate::spectral::{eigendecompose, quasienergies_ordered};
use crate::spin_algebra::TopConfig;
use crate::tracking::{track_segment, LambdaFamily, TrackState};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Tolerance of the rational resonance test on ω/2π.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Outcome of the non-resonance check ω ∉ {2πq/p : 0 < |p| < d}.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub omega: f64,
    pub d: usize,
    pub resonant: bool,
    /// (q, p) with the smallest p when resonant.
    pub witness: Option<(i64, i64)>,
}

/// Exact rational test of ω/2π against denominators 0 < p < d.
pub fn check_nonresonance(omega: f64, d: usize) -> ResonanceReport {
    let x = omega / TAU;
    for p in 1..d as i64 {
        let q = (x * p as f64).round() as i64;
        if (x - q as f64 / p as f64).abs() <= RESONANCE_TOL {
            return ResonanceReport {
                omega,
                d,
                resonant: true,
                witness: Some((q, p)),
            };
        }
    }
    ResonanceReport {
        omega,
        d,
        resonant: false,
        witness: None,
    }
}

/// One tracked quasienergy branch over the cycle.
#[derive(Debug, Clone)]
pub struct BranchTrack {
    /// 2M of the |J,M⟩ this branch starts in at λ = 0.
    pub twice_m: i32,
    /// Eigenvalue samples on the λ grid.
    pub z: Vec<Cx>,
    /// Continuously unwrapped quasienergy samples (so the +2π of the wrap
    /// branch is observable rather than aliased).
    pub e_unwrapped: Vec<f64>,
    /// Eigenvector samples, phase-aligned along the sweep.
    pub vectors: Vec<CVec>,
}

/// Result of one adiabatic cycle.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub lambda_grid: Vec<f64>,
    /// Branches indexed by their quasienergy rank at λ = 0.
    pub branches: Vec<BranchTrack>,
    /// σ(n): the λ = 0 rank whose eigenspace branch n occupies at λ = 2π.
    pub permutation: Vec<usize>,
    /// s(M; C) as a map 2M → 2M.
    pub itinerary: BTreeMap<i32, i32>,
    /// Rank → 2M identification at λ = 0.
    pub rank_to_twice_m: Vec<i32>,
    /// Smallest accepted inter-step overlap.
    pub min_overlap: f64,
    /// Deepest adaptive halving needed.
    pub max_halvings: u32,
}

impl SweepResult {
    pub fn dimension(&self) -> usize {
        self.branches.len()
    }

    /// True when σ is the single d-cycle n ↦ n+1 (mod d).
    pub fn is_forward_cycle(&self) -> bool {
        let d = self.permutation.len();
        (0..d).all(|n| self.permutation[n] == (n + 1) % d)
    }
}

/// Identify each λ = 0 eigenvector with its |J,M⟩ label by the dominant
/// component; at Λ = 1 the Floquet matrix is diagonal so this is exact.
fn rank_labels(config: &TopConfig, vectors: &[CVec]) -> Result<Vec<i32>> {
    let tms = config.j.twice_m_values();
    let mut seen = vec![false; tms.len()];
    let mut labels = Vec::with_capacity(vectors.len());
    for v in vectors {
        let idx = (0..v.len())
            .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap())
            .unwrap();
        if seen[idx] {
            return Err(Error::Precondition(
                "ambiguous |J,M> identification at lambda = 0".into(),
            ));
        }
        seen[idx] = true;
        labels.push(tms[idx]);
    }
    Ok(labels)
}

/// Track all branches once around the unit circle.
///
/// Preconditions: ω non-resonant for d, every kick component nonzero, and
/// `steps` ≥ 8d. Branches are matched step to step by maximal eigenvector
/// overlap with adaptive halving until every accepted overlap is ≥ 0.9.
pub fn sweep_cycle(config: &TopConfig, steps: usize) -> Result<SweepResult> {
    let d = config.dimension();
    let report = check_nonresonance(config.omega, d);
    if report.resonant {
        let (q, p) = report.witness.unwrap();
        return Err(Error::Resonant {
            omega: config.omega,
            q,
            p,
            d,
        });
    }
    if !config.kick.all_components_nonzero() {
        return Err(Error::Precondition(
            "anholonomy requires every <J,M|v> to be nonzero".into(),
        ));
    }
    if steps < 8 * d {
        return Err(Error::Precondition(format!(
            "steps = {steps} too coarse; need at least 8d = {}",
            8 * d
        )));
    }

    let family = LambdaFamily(config);
    let dec0 = eigendecompose(&build_floquet(config, ComplexParam::from_angle(0.0)))?;
    let (_, order) = quasienergies_ordered(&dec0);
    let mut state = TrackState::from_decomposition(&dec0, &order, Cx::new(1.0, 0.0));
    let rank_to_twice_m = rank_labels(config, &state.vectors)?;

    let initial_vectors = state.vectors.clone();
    let e0: Vec<f64> = state.e_re.clone();

    let lambda_grid: Vec<f64> = (0..=steps).map(|k| TAU * k as f64 / steps as f64).collect();
    let mut branches: Vec<BranchTrack> = (0..d)
        .map(|n| BranchTrack {
            twice_m: rank_to_twice_m[n],
            z: vec![state.z[n]],
            e_unwrapped: vec![state.e_re[n]],
            vectors: vec![state.vectors[n].clone()],
        })
        .collect();

    for k in 1..=steps {
        let (a, b) = (lambda_grid[k - 1], lambda_grid[k]);
        let path = move |t: f64| Cx::from_polar(1.0, a + (b - a) * t);
        track_segment(&family, &mut state, &path, 0.0, 1.0, 0)?;
        for n in 0..d {
            branches[n].z.push(state.z[n]);
            branches[n].e_unwrapped.push(state.e_re[n]);
            branches[n].vectors.push(state.vectors[n].clone());
        }
    }

    // close the cycle against the λ = 0 eigenvectors
    let mut permutation = vec![usize::MAX; d];
    for n in 0..d {
        let mut best = (0.0f64, usize::MAX);
        for m in 0..d {
            let o = crate::linalg::inner(&state.vectors[n], &initial_vectors[m]).norm();
            if o > best.0 {
                best = (o, m);
            }
        }
        permutation[n] = best.1;
    }
    let mut seen = vec![false; d];
    for &p in &permutation {
        if p == usize::MAX || seen[p] {
            return Err(Error::TrackingAmbiguous {
                at: Cx::new(1.0, 0.0),
                overlap: state.min_overlap,
                halvings: state.max_halvings,
            });
        }
        seen[p] = true;
    }
    // cross-check against unwrapped quasienergies: branch n must land on
    // E_{σ(n)}(0) modulo a whole number of 2π turns
    for n in 0..d {
        let shift = (state.e_re[n] - e0[permutation[n]]) / TAU;
        if (shift - shift.round()).abs() > 1e-3 {
            return Err(Error::TrackingAmbiguous {
                at: Cx::new(1.0, 0.0),
                overlap: state.min_overlap,
                halvings: state.max_halvings,
            });
        }
    }

    let itinerary = (0..d)
        .map(|n| (rank_to_twice_m[n], rank_to_twice_m[permutation[n]]))
        .collect();

    Ok(SweepResult {
        lambda_grid,
        branches,
        permutation,
        itinerary,
        rank_to_twice_m,
        min_overlap: state.min_overlap,
        max_halvings: state.max_halvings,
    })
}

/// The adiabatic itinerary M ↦ s(M; C) at the default resolution.
pub fn itinerary(config: &TopConfig) -> Result<BTreeMap<i32, i32>> {
    let steps = (8 * config.dimension()).max(128);
    Ok(sweep_cycle(config, steps)?.itinerary)
}
