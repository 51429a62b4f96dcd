//! Riemann sheets of the quasienergies over the Λ-plane, branch-cut
//! bookkeeping, and monodromy of user cycles.
//!
//! Sheets are built the way the solvable case suggests: branch labels are
//! fixed on the unit circle by the λ = 0 quasienergy ordering (sheet M pins
//! E_M(1) = ωM), and each labeled branch is continued radially inward and
//! outward. The construction is single-valued away from its seams: the main
//! cut along the negative real axis (where the circle anholonomy makes the
//! labels jump by one), and, once a dEP has split, the radial shadow of each
//! finite EP (inward to 0 for EPs inside the circle, outward to ∞ for their
//! reciprocal partners), across which exactly the sheets merged at that EP
//! are exchanged. Crossing the main cut counterclockwise sends sheet M to
//! M+1 (mod d), consistent with E_M = (λ + 2πrM)/d under the principal
//! branch of λ = −i log Λ.
//!
//! Monodromy of an arbitrary closed path is computed by eigenvector
//! tracking, so it is a statement about the family itself; seam crossings
//! are reported as bookkeeping metadata alongside.

use std::collections::BTreeMap;

use num_complex::Complex64 as Cx;

use crate::cubic_analytics::EPRecord;
use crate::ep_finder::find_eps;
use crate::error::{Error, Result};
use crate::floquet::{build_floquet, ComplexParam};
use crate::holonomy::check_nonresonance;
use crate::linalg::inner;
use crate::spectral::{eigendecompose, quasienergies_ordered};
use crate::spin_algebra::TopConfig;
use crate::tracking::{track_segment, LambdaFamily, TrackState};

const TAU: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// Rectangle in the Λ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Region> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidConfig("empty Λ-plane region".into()));
        }
        Ok(Region {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn square(half: f64) -> Region {
        Region {
            re_min: -half,
            re_max: half,
            im_min: -half,
            im_max: half,
        }
    }

    /// Largest |Λ| over the rectangle (a corner).
    pub fn max_radius(&self) -> f64 {
        let xs = [self.re_min.abs(), self.re_max.abs()];
        let ys = [self.im_min.abs(), self.im_max.abs()];
        let x = xs.into_iter().fold(0.0f64, f64::max);
        let y = ys.into_iter().fold(0.0f64, f64::max);
        (x * x + y * y).sqrt()
    }
}

/// The radial shadow seam cast by one finite EP of the construction.
#[derive(Debug, Clone)]
pub struct ShadowSeam {
    /// The EP anchoring the shadow.
    pub ep: Cx,
    /// Inward shadow (segment from 0 to the EP) for EPs inside the unit
    /// circle; outward (ray from the EP to ∞) otherwise.
    pub inward: bool,
    /// 2M labels of the sheets exchanged across it; empty when the merged
    /// labels are unknown (then all sheets are assumed affected).
    pub affected: Vec<i32>,
}

/// Seam metadata of a sheet family.
#[derive(Debug, Clone)]
pub struct SeamInfo {
    /// The main cut runs from Λ = 0 to −∞ along the negative real axis; its
    /// unit-circle puncture is the point Λ = −1. Crossing counterclockwise
    /// relabels M → M+1 (mod d).
    pub shadows: Vec<ShadowSeam>,
}

impl std::fmt::Display for SeamInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "main cut: negative real axis from 0 to -inf (circle point at Lambda=-1), ccw crossing M -> M+1"
        )?;
        for s in &self.shadows {
            let dir = if s.inward { "0 .. EP" } else { "EP .. inf" };
            write!(f, "; shadow {} at {:.6}{:+.6}i", dir, s.ep.re, s.ep.im)?;
            if !s.affected.is_empty() {
                write!(f, " sheets {:?}", s.affected)?;
            }
        }
        Ok(())
    }
}

/// Re E_M sampled over a rectangular grid on one labeled sheet.
#[derive(Debug, Clone)]
pub struct SheetGrid {
    /// 2M of the sheet label.
    pub twice_m: i32,
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, index ix + nx*iy; meaningful only where `resolved`.
    pub values: Vec<f64>,
    pub resolved: Vec<bool>,
    pub seam: SeamInfo,
    /// The EP atlas used during construction.
    pub eps: Vec<EPRecord>,
}

impl SheetGrid {
    pub fn node(&self, ix: usize, iy: usize) -> Cx {
        let dx = (self.region.re_max - self.region.re_min) / (self.nx - 1) as f64;
        let dy = (self.region.im_max - self.region.im_min) / (self.ny - 1) as f64;
        Cx::new(
            self.region.re_min + ix as f64 * dx,
            self.region.im_min + iy as f64 * dy,
        )
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix + self.nx * iy]
    }

    pub fn is_resolved(&self, ix: usize, iy: usize) -> bool {
        self.resolved[ix + self.nx * iy]
    }

    pub fn unresolved_fraction(&self) -> f64 {
        let n = self.resolved.len();
        self.resolved.iter().filter(|&&r| !r).count() as f64 / n as f64
    }

    /// Neighbor pairs whose jump exceeds `threshold` without the segment
    /// between them crossing a declared seam (main cut or a shadow affecting
    /// this sheet) or grazing an EP. An empty list is the single-valuedness
    /// certificate of the construction.
    pub fn jump_violations(&self, threshold: f64) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        let check = |ax: usize, ay: usize, bx: usize, by: usize, out: &mut Vec<_>| {
            if !self.is_resolved(ax, ay) || !self.is_resolved(bx, by) {
                return;
            }
            let jump = (self.value(ax, ay) - self.value(bx, by)).abs();
            if jump <= threshold {
                return;
            }
            let a = self.node(ax, ay);
            let b = self.node(bx, by);
            if segment_crosses_negative_axis(a, b).is_some() {
                return;
            }
            for s in &self.seam.shadows {
                if !s.affected.is_empty() && !s.affected.contains(&self.twice_m) {
                    continue;
                }
                if segment_crosses_shadow(a, b, s) {
                    return;
                }
            }
            // grazing an EP: steep but legitimate
            let cell = ((a - b).norm()).max(1e-12);
            for ep in self.eps.iter().filter(|e| !e.at_infinity) {
                if segment_point_distance(a, b, ep.lambda) < cell {
                    return;
                }
            }
            out.push((ax, ay, bx, by));
        };
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if ix + 1 < self.nx {
                    check(ix, iy, ix + 1, iy, &mut out);
                }
                if iy + 1 < self.ny {
                    check(ix, iy, ix, iy + 1, &mut out);
                }
            }
        }
        out
    }

    /// The seam jump between adjacent sheets is 2π/d; half of that is a
    /// sound default detection threshold.
    pub fn default_jump_threshold(d: usize) -> f64 {
        0.5 * TAU / d as f64
    }
}

fn segment_point_distance(a: Cx, b: Cx, p: Cx) -> f64 {
    let seg = b - a;
    let len2 = seg.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a).conj() * seg).re / len2).clamp(0.0, 1.0);
    (a + seg * t - p).norm()
}

/// Crossing point of a segment with {Re < 0, Im = 0}, if any, with the sign
/// convention Im = 0 counts as the upper side.
fn segment_crosses_negative_axis(a: Cx, b: Cx) -> Option<(Cx, i8)> {
    let sa = if a.im >= 0.0 { 1i8 } else { -1 };
    let sb = if b.im >= 0.0 { 1i8 } else { -1 };
    if sa == sb {
        return None;
    }
    let t = a.im / (a.im - b.im);
    let x = a.re + (b.re - a.re) * t;
    if x < 0.0 {
        // Im decreasing = counterclockwise through arg π = labels shift +1
        Some((Cx::new(x, 0.0), sa))
    } else {
        None
    }
}

fn segment_crosses_shadow(a: Cx, b: Cx, s: &ShadowSeam) -> bool {
    // the shadow is the radial segment/ray through the EP; cross detection in
    // polar terms: the segment a→b crosses the half-line of angle arg(ep)
    // within the shadow's radial extent
    let theta = s.ep.arg();
    let rot = Cx::from_polar(1.0, -theta);
    let ra = a * rot;
    let rb = b * rot;
    let sa = if ra.im >= 0.0 { 1i8 } else { -1 };
    let sb = if rb.im >= 0.0 { 1i8 } else { -1 };
    if sa == sb {
        return false;
    }
    let t = ra.im / (ra.im - rb.im);
    let x = ra.re + (rb.re - ra.re) * t;
    let rep = s.ep.norm();
    if s.inward {
        x > 0.0 && x <= rep + 1e-12
    } else {
        x >= rep - 1e-12
    }
}

/// Construction options for [`build_sheets`].
#[derive(Debug, Clone, Copy)]
pub struct SheetOptions {
    /// Number of radial rays (also the unit-circle sampling density).
    pub n_rays: usize,
    /// Cells with |Λ| below this are marked unresolved, keeping rays away
    /// from the Λ = 0 singularity.
    pub guard_radius: f64,
}

impl Default for SheetOptions {
    fn default() -> Self {
        SheetOptions {
            n_rays: 360,
            guard_radius: 0.12,
        }
    }
}

/// EP exclusion radius: 10⁻³ of the local inter-EP distance.
fn ep_exclusion(eps: &[EPRecord], at: Cx) -> f64 {
    let local = eps
        .iter()
        .filter(|e| !e.at_infinity && (e.lambda - at).norm() > 1e-12)
        .map(|e| (e.lambda - at).norm())
        .fold(1.0f64, f64::min);
    1e-3 * local
}

/// Build one Re E_M grid per sheet by radial continuation from the unit
/// circle. Branch labels and E-offsets are pinned at Λ = 1 by the rank ↔ M
/// identification (sheet M starts at E = ωM exactly).
pub fn build_sheets(
    config: &TopConfig,
    region: Region,
    resolution: (usize, usize),
    options: SheetOptions,
) -> Result<Vec<SheetGrid>> {
    let d = config.dimension();
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidConfig(
            "grid resolution must be at least 2x2".into(),
        ));
    }
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
    let atlas = find_eps(config)?;
    let eps = atlas.records.clone();

    let family = LambdaFamily(config);
    let dec0 = eigendecompose(&build_floquet(config, ComplexParam::from_angle(0.0)))?;
    let (_, order0) = quasienergies_ordered(&dec0);
    let mut state0 = TrackState::from_decomposition(&dec0, &order0, Cx::new(1.0, 0.0));
    // rank ↔ M labels and exact E-offsets at Λ = 1
    let tms = config.j.twice_m_values();
    let mut rank_to_twice_m = Vec::with_capacity(d);
    for v in &state0.vectors {
        let idx = (0..d)
            .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap())
            .unwrap();
        rank_to_twice_m.push(tms[idx]);
    }
    for n in 0..d {
        let target = config.omega * rank_to_twice_m[n] as f64 / 2.0;
        let shift = TAU * ((target - state0.e_re[n]) / TAU).round();
        state0.e_re[n] += shift;
    }

    // circle sampling angles (none exactly at ±π or 0)
    let n_rays = options.n_rays.max(8);
    let dtheta = TAU / n_rays as f64;
    let angles: Vec<f64> = (0..n_rays)
        .map(|j| -PI + (j as f64 + 0.5) * dtheta)
        .collect();

    // track the circle from λ = 0 upward and downward, snapshotting at rays
    let mut circle_states: Vec<Option<TrackState>> = vec![None; n_rays];
    let mut up = state0.clone();
    let mut prev = 0.0f64;
    for (j, &th) in angles.iter().enumerate() {
        if th <= 0.0 {
            continue;
        }
        let (a, b) = (prev, th);
        let path = move |t: f64| Cx::from_polar(1.0, a + (b - a) * t);
        track_segment(&family, &mut up, &path, 0.0, 1.0, 0)?;
        prev = th;
        circle_states[j] = Some(up.clone());
    }
    let mut down = state0.clone();
    let mut prev = 0.0f64;
    for (j, &th) in angles.iter().enumerate().rev() {
        if th >= 0.0 {
            continue;
        }
        let (a, b) = (prev, th);
        let path = move |t: f64| Cx::from_polar(1.0, a + (b - a) * t);
        track_segment(&family, &mut down, &path, 0.0, 1.0, 0)?;
        prev = th;
        circle_states[j] = Some(down.clone());
    }

    // radial schedules
    let r_outer = (region.max_radius() * 1.02).max(1.05);
    let r_inner = options.guard_radius.max(1e-6) * 0.9;
    let cell = ((region.re_max - region.re_min) / (nx - 1) as f64)
        .min((region.im_max - region.im_min) / (ny - 1) as f64);
    let step = (0.5 * cell / r_outer).clamp(5e-4, 0.05);

    // seam metadata
    let shadows: Vec<ShadowSeam> = eps
        .iter()
        .filter(|e| !e.at_infinity && e.lambda.norm() > 0.0)
        .map(|e| ShadowSeam {
            ep: e.lambda,
            inward: e.lambda.norm() < 1.0,
            affected: e.merged_branches.clone(),
        })
        .collect();

    let dx = (region.re_max - region.re_min) / (nx - 1) as f64;
    let dy = (region.im_max - region.im_min) / (ny - 1) as f64;
    let mut grids: Vec<SheetGrid> = (0..d)
        .map(|n| SheetGrid {
            twice_m: rank_to_twice_m[n],
            region,
            nx,
            ny,
            values: vec![f64::NAN; nx * ny],
            resolved: vec![false; nx * ny],
            seam: SeamInfo {
                shadows: shadows.clone(),
            },
            eps: eps.clone(),
        })
        .collect();

    // bucket grid nodes by their nearest ray
    struct NodeTarget {
        lin: usize,
        rho: f64,
        point: Cx,
    }
    let mut buckets: Vec<Vec<NodeTarget>> = (0..n_rays).map(|_| Vec::new()).collect();
    for iy in 0..ny {
        for ix in 0..nx {
            let node = Cx::new(
                region.re_min + ix as f64 * dx,
                region.im_min + iy as f64 * dy,
            );
            let rho = node.norm();
            if rho < options.guard_radius {
                continue;
            }
            let mut theta = node.arg();
            if node.im == 0.0 && node.re < 0.0 {
                theta = PI;
            }
            let jf = ((theta + PI) / dtheta - 0.5).round();
            let j = (jf.max(0.0) as usize).min(n_rays - 1);
            buckets[j].push(NodeTarget {
                lin: ix + nx * iy,
                rho,
                point: node,
            });
        }
    }

    // march each ray in both directions; when the march passes a node's
    // radius, hop from the marching state to the exact node point
    let ep_blocked = |a: Cx, b: Cx| -> bool {
        eps.iter()
            .filter(|e| !e.at_infinity)
            .any(|e| segment_point_distance(a, b, e.lambda) < ep_exclusion(&eps, e.lambda))
    };
    let fill_node = |st: &TrackState, target: &NodeTarget, grids: &mut Vec<SheetGrid>| {
        if ep_blocked(st.param, target.point) {
            return;
        }
        let mut hop = st.clone();
        if crate::tracking::track_straight(&family, &mut hop, target.point).is_ok() {
            for (n, grid) in grids.iter_mut().enumerate() {
                grid.values[target.lin] = hop.e_re[n];
                grid.resolved[target.lin] = true;
            }
        }
    };

    for (j, st) in circle_states.iter().enumerate() {
        let start = st.as_ref().expect("every ray angle was visited");
        let theta = angles[j];
        let mut targets = std::mem::take(&mut buckets[j]);
        targets.sort_by(|a, b| a.rho.partial_cmp(&b.rho).unwrap());
        let split = targets.partition_point(|t| t.rho < 1.0);
        let (inner_targets, outer_targets) = targets.split_at(split);

        for outward in [false, true] {
            let queue: Vec<&NodeTarget> = if outward {
                outer_targets.iter().collect()
            } else {
                inner_targets.iter().rev().collect()
            };
            let mut qi = 0;
            let mut stt = start.clone();
            let mut r = 1.0f64;
            // nodes essentially on the circle
            while qi < queue.len() && (queue[qi].rho - 1.0).abs() <= r * step {
                fill_node(&stt, queue[qi], &mut grids);
                qi += 1;
            }
            loop {
                if qi >= queue.len() {
                    break;
                }
                let next = if outward {
                    r * (1.0 + step)
                } else {
                    r / (1.0 + step)
                };
                if outward && next > r_outer {
                    break;
                }
                if !outward && next < r_inner {
                    break;
                }
                let p_cur = Cx::from_polar(r, theta);
                let p_next = Cx::from_polar(next, theta);
                if ep_blocked(p_cur, p_next) {
                    break;
                }
                let (a, b) = (r, next);
                if track_segment(
                    &family,
                    &mut stt,
                    &move |t: f64| Cx::from_polar(a + (b - a) * t, theta),
                    0.0,
                    1.0,
                    0,
                )
                .is_err()
                {
                    break;
                }
                r = next;
                while qi < queue.len() {
                    let t = queue[qi];
                    let passed = if outward { t.rho <= r } else { t.rho >= r };
                    if !passed {
                        break;
                    }
                    fill_node(&stt, t, &mut grids);
                    qi += 1;
                }
            }
        }
    }

    Ok(grids)
}

/// A closed path in the Λ-plane, polyline through waypoints.
#[derive(Debug, Clone)]
pub struct CyclePath {
    /// First and last waypoint coincide.
    pub waypoints: Vec<Cx>,
    /// Set by the template constructors.
    pub template: Option<String>,
}

impl CyclePath {
    /// A closed polyline; the base point is the first waypoint. The path is
    /// closed automatically when last ≠ first.
    pub fn new(mut waypoints: Vec<Cx>) -> Result<CyclePath> {
        if waypoints.len() < 3 {
            return Err(Error::InvalidConfig(
                "a cycle needs at least 3 waypoints".into(),
            ));
        }
        let first = waypoints[0];
        let last = *waypoints.last().unwrap();
        if (first - last).norm() > 1e-12 {
            waypoints.push(first);
        }
        Ok(CyclePath {
            waypoints,
            template: None,
        })
    }

    pub fn base(&self) -> Cx {
        self.waypoints[0]
    }

    fn arc(center: Cx, radius: f64, from: f64, to: f64, n: usize) -> Vec<Cx> {
        (0..=n)
            .map(|k| center + Cx::from_polar(radius, from + (to - from) * k as f64 / n as f64))
            .collect()
    }

    /// The Hermitian cycle C: the unit circle from Λ = 1, counterclockwise.
    pub fn unit_circle() -> CyclePath {
        let mut p = CyclePath {
            waypoints: Self::arc(Cx::new(0.0, 0.0), 1.0, 0.0, TAU, 128),
            template: Some("C".into()),
        };
        p.waypoints[0] = Cx::new(1.0, 0.0);
        let n = p.waypoints.len();
        p.waypoints[n - 1] = Cx::new(1.0, 0.0);
        p
    }

    /// A keyhole from Λ = 1: out to (radius, 0), once counterclockwise
    /// around `center`, and back.
    fn keyhole(center: Cx, radius: f64, name: &str) -> CyclePath {
        let start = center + Cx::new(radius, 0.0);
        let mut waypoints = vec![Cx::new(1.0, 0.0), start];
        waypoints.extend(Self::arc(center, radius, 0.0, TAU, 96).into_iter().skip(1));
        waypoints.push(Cx::new(1.0, 0.0));
        CyclePath {
            waypoints,
            template: Some(name.into()),
        }
    }
}

/// One crossing of the main cut (negative real axis).
#[derive(Debug, Clone, Copy)]
pub struct SeamCrossing {
    pub location: Cx,
    /// +1: counterclockwise through arg π (sheet labels M → M+1);
    /// −1: the reverse.
    pub direction: i8,
}

/// Monodromy of a closed path.
#[derive(Debug, Clone)]
pub struct MonodromyResult {
    /// Base-rank permutation: branch of rank n returns as rank `perm[n]`.
    pub rank_permutation: Vec<usize>,
    /// Sheet map 2M → 2M' (present when the base is Λ = 1 at non-resonant ω).
    pub sheet_permutation: Option<BTreeMap<i32, i32>>,
    pub seam_crossings: Vec<SeamCrossing>,
    /// Rank permutations observed at intermediate returns to the base point.
    pub intermediate: Vec<Vec<usize>>,
    pub min_overlap: f64,
    pub max_halvings: u32,
}

impl MonodromyResult {
    pub fn is_identity(&self) -> bool {
        self.rank_permutation
            .iter()
            .enumerate()
            .all(|(i, &p)| i == p)
    }

    /// Cycle decomposition of the rank permutation (fixed points omitted).
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let perm = &self.rank_permutation;
        let mut seen = vec![false; perm.len()];
        let mut cycles = Vec::new();
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut at = perm[s];
            while at != s {
                seen[at] = true;
                cyc.push(at);
                at = perm[at];
            }
            if cyc.len() > 1 {
                cycles.push(cyc);
            }
        }
        cycles
    }
}

/// Track all branches around `path` and report the permutation, the main-cut
/// crossings and intermediate base-returns. `steps` (≥ 64) is the minimum
/// number of straight tracking segments distributed over the polyline.
pub fn cycle_monodromy(
    config: &TopConfig,
    path: &CyclePath,
    steps: usize,
) -> Result<MonodromyResult> {
    if steps < 64 {
        return Err(Error::Precondition(
            "cycle monodromy needs steps >= 64".into(),
        ));
    }
    let d = config.dimension();
    let atlas = find_eps(config)?;
    let eps: Vec<EPRecord> = atlas.records;

    // discretize the polyline proportionally to length
    let mut points: Vec<Cx> = vec![path.waypoints[0]];
    let total: f64 = path
        .waypoints
        .windows(2)
        .map(|wpair| (wpair[1] - wpair[0]).norm())
        .sum();
    if total <= 0.0 {
        return Err(Error::InvalidConfig("degenerate cycle".into()));
    }
    for wpair in path.waypoints.windows(2) {
        let len = (wpair[1] - wpair[0]).norm();
        let n = ((steps as f64 * len / total).ceil() as usize).max(1);
        for k in 1..=n {
            points.push(wpair[0] + (wpair[1] - wpair[0]) * (k as f64 / n as f64));
        }
    }

    // EP exclusion validation
    for seg in points.windows(2) {
        for e in eps.iter().filter(|e| !e.at_infinity) {
            let excl = ep_exclusion(&eps, e.lambda);
            if segment_point_distance(seg[0], seg[1], e.lambda) < excl {
                return Err(Error::LoopBlocked {
                    center: e.lambda,
                    radius: excl,
                    blocker: seg[0],
                });
            }
        }
    }

    let base = path.base();
    let family = LambdaFamily(config);
    let dec0 = eigendecompose(&build_floquet(config, ComplexParam::new(base)?))?;
    let (_, order0) = quasienergies_ordered(&dec0);
    let state0 = TrackState::from_decomposition(&dec0, &order0, base);
    let initial_vectors = state0.vectors.clone();

    let base_labels: Option<Vec<i32>> = if (base - Cx::new(1.0, 0.0)).norm() <= 1e-9
        && !check_nonresonance(config.omega, d).resonant
    {
        let tms = config.j.twice_m_values();
        let mut labels = Vec::with_capacity(d);
        for v in &initial_vectors {
            let idx = (0..d)
                .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap())
                .unwrap();
            labels.push(tms[idx]);
        }
        Some(labels)
    } else {
        None
    };

    let match_to_initial = |state: &TrackState| -> Result<Vec<usize>> {
        let mut perm = vec![usize::MAX; d];
        let mut seen = vec![false; d];
        for (n, v) in state.vectors.iter().enumerate() {
            let mut best = (0.0f64, usize::MAX);
            for (m, s) in initial_vectors.iter().enumerate() {
                let o = inner(v, s).norm();
                if o > best.0 {
                    best = (o, m);
                }
            }
            if best.1 == usize::MAX || seen[best.1] || best.0 < 0.7 {
                return Err(Error::TrackingAmbiguous {
                    at: state.param,
                    overlap: best.0,
                    halvings: state.max_halvings,
                });
            }
            perm[n] = best.1;
            seen[best.1] = true;
        }
        Ok(perm)
    };

    let mut state = state0;
    let mut crossings = Vec::new();
    let mut intermediate = Vec::new();
    for k in 1..points.len() {
        let (a, b) = (points[k - 1], points[k]);
        if let Some((loc, dir)) = segment_crosses_negative_axis(a, b) {
            crossings.push(SeamCrossing {
                location: loc,
                direction: dir,
            });
        }
        let path_seg = move |t: f64| a + (b - a) * t;
        track_segment(&family, &mut state, &path_seg, 0.0, 1.0, 0)?;
        if k + 1 < points.len() && (points[k] - base).norm() <= 1e-9 {
            intermediate.push(match_to_initial(&state)?);
        }
    }
    let rank_permutation = match_to_initial(&state)?;

    let sheet_permutation = base_labels.map(|labels| {
        (0..d)
            .map(|n| (labels[n], labels[rank_permutation[n]]))
            .collect::<BTreeMap<i32, i32>>()
    });

    Ok(MonodromyResult {
        rank_permutation,
        sheet_permutation,
        seam_crossings: crossings,
        intermediate,
        min_overlap: state.min_overlap,
        max_halvings: state.max_halvings,
    })
}

/// Named cycle templates from the figure conventions: the Hermitian circle
/// C; C′ enclosing the (high-order) EP structure once through a keyhole;
/// C₁ chaining small loops around each inside EP in encounter order; C₂
/// looping one EP twice with two main-cut crossings in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleTemplate {
    C,
    CPrime,
    C1,
    C2,
}

impl std::str::FromStr for CycleTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<CycleTemplate> {
        match s {
            "C" | "c" => Ok(CycleTemplate::C),
            "C'" | "c'" | "Cprime" | "cprime" | "Cp" | "cp" => Ok(CycleTemplate::CPrime),
            "C1" | "c1" => Ok(CycleTemplate::C1),
            "C2" | "c2" => Ok(CycleTemplate::C2),
            other => Err(Error::InvalidConfig(format!(
                "unknown cycle template '{other}'"
            ))),
        }
    }
}

fn inside_eps(eps: &[EPRecord]) -> Vec<Cx> {
    eps.iter()
        .filter(|e| !e.at_infinity && e.lambda.norm() > 0.0 && e.lambda.norm() < 1.0)
        .map(|e| e.lambda)
        .collect()
}

fn small_loop_radius(ep: Cx, all: &[Cx]) -> f64 {
    let nearest = all
        .iter()
        .map(|&o| (o - ep).norm())
        .filter(|&x| x > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let mut r = if nearest.is_finite() {
        0.4 * nearest
    } else {
        0.2
    };
    r = r
        .min(0.45 * ep.norm())
        .min(0.4 * (Cx::new(1.0, 0.0) - ep).norm());
    r.max(1e-4)
}

/// Build the waypoints of a named template for this configuration.
pub fn template_path(config: &TopConfig, template: CycleTemplate) -> Result<CyclePath> {
    match template {
        CycleTemplate::C => Ok(CyclePath::unit_circle()),
        CycleTemplate::CPrime => {
            let atlas = find_eps(config)?;
            let has_origin = atlas
                .records
                .iter()
                .any(|e| !e.at_infinity && e.lambda.norm() == 0.0);
            let inside = inside_eps(&atlas.records);
            if has_origin && inside.is_empty() {
                // the solvable dEP at the origin
                Ok(CyclePath::keyhole(Cx::new(0.0, 0.0), 0.5, "C'"))
            } else if !inside.is_empty() {
                // single enclosure of all finite inside EPs
                let rmax = inside.iter().map(|e| e.norm()).fold(0.0f64, f64::max);
                Ok(CyclePath::keyhole(
                    Cx::new(0.0, 0.0),
                    0.5 * (rmax + 1.0),
                    "C'",
                ))
            } else {
                Err(Error::Precondition(
                    "no finite EP inside the unit circle to enclose".into(),
                ))
            }
        }
        CycleTemplate::C1 => {
            let atlas = find_eps(config)?;
            let mut inside = inside_eps(&atlas.records);
            if inside.is_empty() {
                return Err(Error::Precondition("no inside EPs for a C1 chain".into()));
            }
            // encounter order along the counterclockwise circle from arg 0
            inside.sort_by(|a, b| {
                a.arg()
                    .rem_euclid(TAU)
                    .partial_cmp(&b.arg().rem_euclid(TAU))
                    .unwrap()
            });
            let all = inside.clone();
            let base = Cx::new(1.0, 0.0);
            let mut waypoints = vec![base];
            for &ep in &inside {
                let r = small_loop_radius(ep, &all);
                let dir = (base - ep) / (base - ep).norm();
                let start = ep + dir * r;
                let from = (start - ep).arg();
                waypoints.push(start);
                waypoints.extend(
                    CyclePath::arc(ep, r, from, from + TAU, 48)
                        .into_iter()
                        .skip(1),
                );
                waypoints.push(base);
            }
            Ok(CyclePath {
                waypoints,
                template: Some("C1".into()),
            })
        }
        CycleTemplate::C2 => {
            let atlas = find_eps(config)?;
            let inside = inside_eps(&atlas.records);
            if inside.len() != 2 {
                return Err(Error::Precondition(format!(
                    "C2 needs exactly two inside EPs, found {}",
                    inside.len()
                )));
            }
            // loop the lower-half-plane EP twice, with a counterclockwise
            // full ring transit (one cut crossing each way) in between: the
            // transit conjugates the second enclosure by the full cycle,
            // turning t² into the d-cycle
            let ep = if inside[0].im <= inside[1].im {
                inside[0]
            } else {
                inside[1]
            };
            let all = inside.clone();
            let r = small_loop_radius(ep, &all);
            let rmax = inside.iter().map(|e| e.norm()).fold(0.0f64, f64::max);
            let ring = 0.5 * (rmax + 1.0);
            let base = Cx::new(1.0, 0.0);
            let theta = ep.arg();
            let loop_start = ep + Cx::from_polar(r, theta);
            let ring_anchor = Cx::from_polar(ring, theta);
            let mut waypoints = vec![base, loop_start];
            // first small loop, counterclockwise
            let from = (loop_start - ep).arg();
            waypoints.extend(
                CyclePath::arc(ep, r, from, from + TAU, 48)
                    .into_iter()
                    .skip(1),
            );
            // counterclockwise ring transit: theta → theta + 2π
            waypoints.push(ring_anchor);
            waypoints.extend(
                CyclePath::arc(Cx::new(0.0, 0.0), ring, theta, theta + TAU, 96)
                    .into_iter()
                    .skip(1),
            );
            waypoints.push(loop_start);
            // second small loop, counterclockwise
            waypoints.extend(
                CyclePath::arc(ep, r, from, from + TAU, 48)
                    .into_iter()
                    .skip(1),
            );
            // clockwise ring transit back
            waypoints.push(ring_anchor);
            waypoints.extend(
                CyclePath::arc(Cx::new(0.0, 0.0), ring, theta + TAU, theta, 96)
                    .into_iter()
                    .skip(1),
            );
            waypoints.push(loop_start);
            waypoints.push(base);
            Ok(CyclePath {
                waypoints,
                template: Some("C2".into()),
            })
        }
    }
}

/// One emulation case of [`emulation_suite`].
#[derive(Debug, Clone)]
pub struct EmulationCase {
    pub name: String,
    pub result: MonodromyResult,
    pub matches_circle: bool,
}

/// Comparison of the Hermitian cycle C against constructed non-Hermitian
/// cycles.
#[derive(Debug, Clone)]
pub struct EmulationReport {
    pub circle: MonodromyResult,
    pub cases: Vec<EmulationCase>,
    pub all_match: bool,
    /// Order-sensitivity note comparing the chained and cut-crossing routes.
    pub order_note: String,
}

/// Construct C′/C₁/C₂-style cycles (as available for this configuration) and
/// compare each total permutation against the unit circle's.
pub fn emulation_suite(config: &TopConfig) -> Result<EmulationReport> {
    let circle = cycle_monodromy(config, &CyclePath::unit_circle(), 256)?;
    let mut cases = Vec::new();
    for template in [CycleTemplate::CPrime, CycleTemplate::C1, CycleTemplate::C2] {
        let name = match template {
            CycleTemplate::CPrime => "C'",
            CycleTemplate::C1 => "C1",
            CycleTemplate::C2 => "C2",
            CycleTemplate::C => unreachable!(),
        };
        match template_path(config, template) {
            Ok(path) => {
                let result = cycle_monodromy(config, &path, 256)?;
                let matches_circle = result.rank_permutation == circle.rank_permutation;
                cases.push(EmulationCase {
                    name: name.into(),
                    result,
                    matches_circle,
                });
            }
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let all_match = cases.iter().all(|c| c.matches_circle);
    let order_note = {
        let c1 = cases.iter().find(|c| c.name == "C1");
        let c2 = cases.iter().find(|c| c.name == "C2");
        match (c1, c2) {
            (Some(a), Some(b)) => format!(
                "C1 encloses the EPs in encounter order with no cut crossing ({} intermediate returns); C2 encloses one EP twice and crosses the main cut {} times; the enclosure contributions are not interchangeable but both totals reproduce C",
                a.result.intermediate.len(),
                b.result.seam_crossings.len()
            ),
            _ => String::new(),
        }
    };
    Ok(EmulationReport {
        circle,
        cases,
        all_match,
        order_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::HalfInt;
    use approx::assert_abs_diff_eq;

    fn cfg(twice_j: i32, omega: f64) -> TopConfig {
        TopConfig::uniform(HalfInt::from_twice(twice_j).unwrap(), omega)
    }

    #[test]
    fn solvable_sheets_match_closed_form() {
        // E_M = (λ + 2πM)/3 with λ = −i log Λ on the cut plane
        let config = cfg(2, 2.0 * PI / 3.0);
        let region = Region::square(1.4);
        let grids = build_sheets(&config, region, (41, 41), SheetOptions::default()).unwrap();
        assert_eq!(grids.len(), 3);
        for grid in &grids {
            let m = grid.twice_m as f64 / 2.0;
            let mut checked = 0;
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    if !grid.is_resolved(ix, iy) {
                        continue;
                    }
                    let node = grid.node(ix, iy);
                    let mut theta = node.arg();
                    if node.im == 0.0 && node.re < 0.0 {
                        theta = PI;
                    }
                    let expect = (theta + TAU * m) / 3.0;
                    assert!(
                        (grid.value(ix, iy) - expect).abs() <= 1e-6,
                        "M={m} node={node}: {} vs {expect}",
                        grid.value(ix, iy)
                    );
                    checked += 1;
                }
            }
            assert!(checked > 1000, "grid mostly unresolved: {checked}");
        }
    }

    #[test]
    fn solvable_sheets_jump_only_across_cut() {
        let config = cfg(2, 2.0 * PI / 3.0);
        let grids = build_sheets(
            &config,
            Region::square(1.3),
            (35, 35),
            SheetOptions::default(),
        )
        .unwrap();
        for grid in &grids {
            let viol = grid.jump_violations(SheetGrid::default_jump_threshold(3));
            assert!(viol.is_empty(), "sheet {}: {:?}", grid.twice_m, viol);
        }
    }

    #[test]
    fn split_ep_sheets_have_ep_shadow_seams() {
        let config = cfg(2, PI / 6.0);
        let grids = build_sheets(
            &config,
            Region::square(1.5),
            (41, 41),
            SheetOptions::default(),
        )
        .unwrap();
        // two finite inside EPs and their partners are recorded
        assert_eq!(grids[0].seam.shadows.len(), 4);
        for grid in &grids {
            let viol = grid.jump_violations(SheetGrid::default_jump_threshold(3));
            assert!(
                viol.is_empty(),
                "sheet {}: {} violations",
                grid.twice_m,
                viol.len()
            );
        }
    }

    #[test]
    fn unit_circle_monodromy_matches_sweep() {
        for &(twice_j, omega) in &[(2i32, 2.0 * PI / 3.0), (2, PI / 6.0), (3, PI / 2.0)] {
            let config = cfg(twice_j, omega);
            let mono = cycle_monodromy(&config, &CyclePath::unit_circle(), 128).unwrap();
            let d = (twice_j + 1) as usize;
            for n in 0..d {
                assert_eq!(mono.rank_permutation[n], (n + 1) % d, "2J={twice_j}");
            }
            assert_eq!(mono.seam_crossings.len(), 1);
            assert_eq!(mono.seam_crossings[0].direction, 1);
            let sweep = crate::holonomy::sweep_cycle(&config, 8 * d.max(16)).unwrap();
            assert_eq!(mono.rank_permutation, sweep.permutation);
        }
    }

    #[test]
    fn sheet_permutation_is_forward_cycle() {
        let config = cfg(2, PI / 6.0);
        let mono = cycle_monodromy(&config, &CyclePath::unit_circle(), 128).unwrap();
        let sheets = mono.sheet_permutation.unwrap();
        // E_{-1} → E_0 → E_1 → E_{-1} (2M: −2→0, 0→2, 2→−2)
        assert_eq!(sheets.get(&-2), Some(&0));
        assert_eq!(sheets.get(&0), Some(&2));
        assert_eq!(sheets.get(&2), Some(&-2));
    }

    #[test]
    fn contractible_loop_is_identity() {
        let config = cfg(2, PI / 6.0);
        let path = CyclePath::new(vec![
            Cx::new(1.0, 0.0),
            Cx::new(1.2, 0.3),
            Cx::new(1.4, -0.1),
            Cx::new(1.1, -0.3),
        ])
        .unwrap();
        let mono = cycle_monodromy(&config, &path, 64).unwrap();
        assert!(mono.is_identity());
        assert!(mono.seam_crossings.is_empty());
    }

    #[test]
    fn small_loops_give_transpositions() {
        let config = cfg(2, PI / 6.0);
        let atlas = find_eps(&config).unwrap();
        let inside = inside_eps(&atlas.records);
        assert_eq!(inside.len(), 2);
        for &ep in &inside {
            let r = small_loop_radius(ep, &inside);
            let start = ep + Cx::from_polar(r, (Cx::new(1.0, 0.0) - ep).arg());
            let mut waypoints = vec![Cx::new(1.0, 0.0), start];
            let from = (start - ep).arg();
            waypoints.extend(
                CyclePath::arc(ep, r, from, from + TAU, 48)
                    .into_iter()
                    .skip(1),
            );
            waypoints.push(Cx::new(1.0, 0.0));
            let path = CyclePath {
                waypoints,
                template: None,
            };
            let mono = cycle_monodromy(&config, &path, 128).unwrap();
            let cycles = mono.cycles();
            assert_eq!(cycles.len(), 1);
            assert_eq!(cycles[0].len(), 2);
        }
    }

    #[test]
    fn homotopic_deformations_preserve_monodromy() {
        // three deformations of C that cross no EP and no extra seam
        let config = cfg(2, PI / 6.0);
        let reference = cycle_monodromy(&config, &CyclePath::unit_circle(), 192).unwrap();
        for &(eps_r, k_mod) in &[(0.12, 2.0), (-0.1, 3.0), (0.15, 5.0)] {
            let waypoints: Vec<Cx> = (0..=160)
                .map(|k| {
                    let th = TAU * k as f64 / 160.0;
                    let r = 1.0 + eps_r * (k_mod * th).sin();
                    if k == 0 || k == 160 {
                        Cx::new(1.0, 0.0)
                    } else {
                        Cx::from_polar(r, th)
                    }
                })
                .collect();
            let path = CyclePath {
                waypoints,
                template: None,
            };
            let mono = cycle_monodromy(&config, &path, 192).unwrap();
            assert_eq!(mono.rank_permutation, reference.rank_permutation);
        }
    }

    #[test]
    fn refinement_stability() {
        let config = cfg(2, PI / 6.0);
        let path = template_path(&config, CycleTemplate::C1).unwrap();
        let a = cycle_monodromy(&config, &path, 128).unwrap();
        let b = cycle_monodromy(&config, &path, 256).unwrap();
        assert_eq!(a.rank_permutation, b.rank_permutation);
    }

    #[test]
    fn composition_law() {
        // loop around Λ₁ then loop around Λ₂, concatenated, equals the
        // composition of the individual permutations
        let config = cfg(2, PI / 6.0);
        let atlas = find_eps(&config).unwrap();
        let inside = inside_eps(&atlas.records);
        let base = Cx::new(1.0, 0.0);
        let sub = |ep: Cx| -> CyclePath {
            let r = small_loop_radius(ep, &inside);
            let start = ep + Cx::from_polar(r, (base - ep).arg());
            let from = (start - ep).arg();
            let mut waypoints = vec![base, start];
            waypoints.extend(
                CyclePath::arc(ep, r, from, from + TAU, 48)
                    .into_iter()
                    .skip(1),
            );
            waypoints.push(base);
            CyclePath {
                waypoints,
                template: None,
            }
        };
        let p1 = sub(inside[0]);
        let p2 = sub(inside[1]);
        let m1 = cycle_monodromy(&config, &p1, 96).unwrap();
        let m2 = cycle_monodromy(&config, &p2, 96).unwrap();
        let mut concat = p1.waypoints.clone();
        concat.extend(p2.waypoints.iter().skip(1));
        let both = cycle_monodromy(
            &config,
            &CyclePath {
                waypoints: concat,
                template: None,
            },
            192,
        )
        .unwrap();
        // branch n goes through m1 then m2
        let composed: Vec<usize> = (0..3)
            .map(|n| m2.rank_permutation[m1.rank_permutation[n]])
            .collect();
        assert_eq!(both.rank_permutation, composed);
    }

    #[test]
    fn emulation_suite_solvable() {
        let report = emulation_suite(&cfg(2, 2.0 * PI / 3.0)).unwrap();
        assert!(report.all_match);
        assert!(report.cases.iter().any(|c| c.name == "C'"));
        // C (circle) itself shifts every rank by one
        assert_eq!(report.circle.rank_permutation, vec![1, 2, 0]);
    }

    #[test]
    fn emulation_suite_split_eps() {
        let report = emulation_suite(&cfg(2, PI / 6.0)).unwrap();
        assert!(
            report.all_match,
            "cases: {:?}",
            report
                .cases
                .iter()
                .map(|c| (&c.name, c.matches_circle, &c.result.rank_permutation))
                .collect::<Vec<_>>()
        );
        let names: Vec<&str> = report.cases.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"C'"));
        assert!(names.contains(&"C1"));
        assert!(names.contains(&"C2"));
        // C2 crosses the main cut exactly twice, in opposite directions
        let c2 = report.cases.iter().find(|c| c.name == "C2").unwrap();
        assert_eq!(c2.result.seam_crossings.len(), 2);
        let sum: i32 = c2
            .result
            .seam_crossings
            .iter()
            .map(|c| c.direction as i32)
            .sum();
        assert_eq!(sum, 0);
    }

    #[test]
    fn seam_crossing_geometry() {
        let a = Cx::new(-0.5, 0.1);
        let b = Cx::new(-0.5, -0.1);
        let (loc, dir) = segment_crosses_negative_axis(a, b).unwrap();
        assert_abs_diff_eq!(loc.re, -0.5, epsilon = 1e-12);
        assert_eq!(dir, 1);
        assert!(segment_crosses_negative_axis(Cx::new(0.5, 0.1), Cx::new(0.5, -0.1)).is_none());
    }
}
