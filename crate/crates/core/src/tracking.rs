//! Internal continuity tracker: follows all d spectral branches along a
//! parametrized path in the Λ-plane by maximal eigenvector overlap, with
//! adaptive step halving when an overlap drops below threshold.

use num_complex::Complex64 as Cx;

use crate::error::{Error, Result};
use crate::floquet::{build_floquet, ComplexParam, FloquetMatrix};
use crate::linalg::{inner, CVec};
use crate::spectral::{eigendecompose, SpectralDecomposition};
use crate::spin_algebra::TopConfig;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Minimal accepted |⟨previous|current⟩| for a tracked step.
pub const TRACK_OVERLAP: f64 = 0.9;
/// Halving cap before a segment is declared ambiguous.
pub const MAX_HALVINGS: u32 = 12;

/// A matrix family over one complex parameter (Λ itself, or w = Λ⁻¹ for
/// loops around the point at infinity).
pub(crate) trait Family {
    fn matrix(&self, p: Cx) -> Result<FloquetMatrix>;
}

/// The plain family p ↦ U(p).
pub(crate) struct LambdaFamily<'a>(pub &'a TopConfig);

impl Family for LambdaFamily<'_> {
    fn matrix(&self, p: Cx) -> Result<FloquetMatrix> {
        Ok(build_floquet(self.0, ComplexParam::new(p)?))
    }
}

/// The reciprocal chart p ↦ U(1/p), which turns Λ = ∞ into an ordinary
/// interior point at p = 0.
pub(crate) struct WFamily<'a>(pub &'a TopConfig);

impl Family for WFamily<'_> {
    fn matrix(&self, p: Cx) -> Result<FloquetMatrix> {
        if p.norm() == 0.0 {
            return Err(Error::SingularParameter);
        }
        Ok(build_floquet(self.0, ComplexParam::new(p.inv())?))
    }
}

/// Branch data carried along a path.
#[derive(Debug, Clone)]
pub(crate) struct TrackState {
    pub param: Cx,
    pub z: Vec<Cx>,
    /// Unwrapped Re E per branch (continuous along the path).
    pub e_re: Vec<f64>,
    pub vectors: Vec<CVec>,
    /// Smallest accepted overlap seen so far.
    pub min_overlap: f64,
    /// Deepest halving level needed so far.
    pub max_halvings: u32,
}

impl TrackState {
    /// Start from a decomposition with branches in the given index order.
    pub fn from_decomposition(
        dec: &SpectralDecomposition,
        order: &[usize],
        param: Cx,
    ) -> TrackState {
        let z: Vec<Cx> = order.iter().map(|&i| dec.eigenvalues[i]).collect();
        let e_re: Vec<f64> = order.iter().map(|&i| dec.quasienergies[i]).collect();
        let vectors: Vec<CVec> = order.iter().map(|&i| dec.right_vec(i)).collect();
        TrackState {
            param,
            z,
            e_re,
            vectors,
            min_overlap: 1.0,
            max_halvings: 0,
        }
    }
}

/// Greedy maximal-overlap assignment; `None` when it is not a bijection with
/// every accepted overlap ≥ `threshold`.
pub(crate) fn match_by_overlap(
    prev: &[CVec],
    dec: &SpectralDecomposition,
    threshold: f64,
) -> Option<(Vec<usize>, f64)> {
    let d = prev.len();
    let mut scores: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for (i, p) in prev.iter().enumerate() {
        for j in 0..d {
            let o = inner(p, &dec.right_vec(j)).norm();
            scores.push((o, i, j));
        }
    }
    scores.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut assign = vec![usize::MAX; d];
    let mut used = vec![false; d];
    let mut worst = 1.0f64;
    for (o, i, j) in scores {
        if assign[i] == usize::MAX && !used[j] {
            assign[i] = j;
            used[j] = true;
            worst = worst.min(o);
        }
    }
    if assign.contains(&usize::MAX) || worst < threshold {
        return None;
    }
    Some((assign, worst))
}

fn apply_step(state: &mut TrackState, dec: &SpectralDecomposition, assign: &[usize], p: Cx) {
    let d = assign.len();
    let mut z = Vec::with_capacity(d);
    let mut e_re = Vec::with_capacity(d);
    let mut vectors = Vec::with_capacity(d);
    for (i, &j) in assign.iter().enumerate() {
        let zj = dec.eigenvalues[j];
        // unwrap Re E against the previous value
        let raw = -zj.arg();
        let k = ((state.e_re[i] - raw) / TAU).round();
        e_re.push(raw + TAU * k);
        // gauge: make ⟨prev|cur⟩ real positive
        let mut v = dec.right_vec(j);
        let ov = inner(&state.vectors[i], &v);
        if ov.norm() > 0.0 {
            let phase = ov / ov.norm();
            v.mapv_inplace(|x| x * phase.conj());
        }
        z.push(zj);
        vectors.push(v);
    }
    state.param = p;
    state.z = z;
    state.e_re = e_re;
    state.vectors = vectors;
}

/// Advance the state along `path` (a map t ↦ parameter) from its current
/// t = `t0` to `t1`, splitting the segment adaptively.
pub(crate) fn track_segment<F: Family>(
    family: &F,
    state: &mut TrackState,
    path: &dyn Fn(f64) -> Cx,
    t0: f64,
    t1: f64,
    depth: u32,
) -> Result<()> {
    let p1 = path(t1);
    let dec = eigendecompose(&family.matrix(p1)?)?;
    if let Some((assign, worst)) = match_by_overlap(&state.vectors, &dec, TRACK_OVERLAP) {
        apply_step(state, &dec, &assign, p1);
        state.min_overlap = state.min_overlap.min(worst);
        state.max_halvings = state.max_halvings.max(depth);
        return Ok(());
    }
    if depth >= MAX_HALVINGS {
        let best = match_by_overlap(&state.vectors, &dec, 0.0)
            .map(|(_, w)| w)
            .unwrap_or(0.0);
        return Err(Error::TrackingAmbiguous {
            at: p1,
            overlap: best,
            halvings: depth,
        });
    }
    let tm = 0.5 * (t0 + t1);
    track_segment(family, state, path, t0, tm, depth + 1)?;
    track_segment(family, state, path, tm, t1, depth + 1)
}

/// Track along a straight segment between two parameter values.
pub(crate) fn track_straight<F: Family>(family: &F, state: &mut TrackState, to: Cx) -> Result<()> {
    let from = state.param;
    let path = move |t: f64| from + (to - from) * t;
    track_segment(family, state, &path, 0.0, 1.0, 0)
}
