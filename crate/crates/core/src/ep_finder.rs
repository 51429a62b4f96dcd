//! Numerical exceptional-point atlas for general J: locate every finite
//! degeneracy of U(Λ), classify order and type, and track EPs across ω.
//!
//! The search works in w = Λ⁻¹. The discriminant of the characteristic
//! polynomial, Disc_z[g(z) + w·h(z)], is a polynomial in w of degree at most
//! 2d−2 (degree 4 at d = 3, where it reproduces the closed-form quartic).
//! It is sampled at 2d−1 circle nodes via Sylvester resultants and recovered
//! by inverse DFT. A root of multiplicity m at w = w₀ marks a degeneracy of
//! order m+1 at Λ = 1/w₀; a root at w = 0 is the EP at Λ = ∞, and a degree
//! deficit marks its conjugate partner at Λ = 0.
//!
//! Classification is numerical: the coalescing eigenvalue cluster gives the
//! order, the rank of U − zI gives the geometric multiplicity (diabolic vs
//! exceptional), a tracked loop gives the monodromy permutation, and the
//! cluster-diameter scaling over shrinking radii gives the Puiseux exponent.

use num_complex::Complex64 as Cx;

use crate::cubic_analytics::{EPRecord, EpKind};
use crate::error::{Error, Result};
use crate::floquet::{build_floquet, char_poly_affine_split, char_poly_at_w, ComplexParam};
use crate::holonomy::check_nonresonance;
use crate::linalg::{norm_fro, rank};
use crate::poly;
use crate::spectral::{eigendecompose, quasienergies_ordered};
use crate::spin_algebra::TopConfig;
use crate::tracking::{track_segment, Family, LambdaFamily, TrackState, WFamily};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Relative eigenvalue gap below which two eigenvalues count as coalesced.
pub const CLUSTER_GAP: f64 = 1e-5;
/// Coefficients below this (relative to the largest) are treated as zero
/// when reading off the w = 0 multiplicity and the degree deficit.
const COEFF_TRIM: f64 = 1e-12;

/// Disc_z of the w-affine characteristic polynomial, as a polynomial in w.
#[derive(Debug, Clone)]
pub struct DiscriminantPoly {
    /// Ascending coefficients c₀ + c₁w + …, length 2d−1.
    pub coeffs: Vec<Cx>,
    /// Sampling radius that validated.
    pub radius: f64,
    pub omega: f64,
    pub twice_j: i32,
}

impl DiscriminantPoly {
    pub fn eval(&self, w: Cx) -> Cx {
        poly::eval(&self.coeffs, w)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Multiplicity of the root at w = 0 (→ the Λ = ∞ record).
    pub fn zero_root_multiplicity(&self) -> usize {
        let tol = COEFF_TRIM * self.max_coeff();
        self.coeffs.iter().take_while(|c| c.norm() <= tol).count()
    }

    /// Degree deficit below 2d−2 (→ the Λ = 0 record).
    pub fn degree_deficit(&self) -> usize {
        let tol = COEFF_TRIM * self.max_coeff();
        let deg = poly::effective_degree(&self.coeffs, tol);
        self.coeffs.len() - 1 - deg
    }
}

fn disc_of_char_at(g: &[Cx], h: &[Cx], w: Cx) -> Cx {
    poly::discriminant(&char_poly_at_w(g, h, w))
}

/// Sample Disc_z at 2d−1 nodes on a circle and interpolate; validated at
/// held-out nodes with node-radius retries.
pub fn discriminant_poly(config: &TopConfig) -> Result<DiscriminantPoly> {
    let d = config.dimension();
    let (g, h) = char_poly_affine_split(config);
    let n = 2 * d - 1;
    let mut last_residual = f64::INFINITY;
    for &radius in &[1.0, 2.0, 0.5, 4.0, 0.25] {
        let nodes = poly::circle_nodes(n, radius);
        let values: Vec<Cx> = nodes.iter().map(|&w| disc_of_char_at(&g, &h, w)).collect();
        let coeffs = poly::interpolate_on_circle(&values, radius);
        if values.iter().map(|v| v.norm()).fold(0.0, f64::max) <= 1e-10 {
            // identically vanishing discriminant (degenerate family): no
            // point validating relative residuals against zero
            return Ok(DiscriminantPoly {
                coeffs,
                radius,
                omega: config.omega,
                twice_j: config.j.twice(),
            });
        }
        let mut ok = true;
        let mut worst = 0.0f64;
        for &phase in &[0.37, 1.19, 2.71] {
            let w = Cx::from_polar(radius, phase);
            let direct = disc_of_char_at(&g, &h, w);
            let fitted = poly::eval(&coeffs, w);
            let scale = values
                .iter()
                .map(|v| v.norm())
                .fold(direct.norm(), f64::max);
            let rel = (fitted - direct).norm() / scale.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            if rel > 1e-8 {
                ok = false;
            }
        }
        if ok {
            return Ok(DiscriminantPoly {
                coeffs,
                radius,
                omega: config.omega,
                twice_j: config.j.twice(),
            });
        }
        last_residual = last_residual.min(worst);
    }
    Err(Error::IllConditioned {
        residual: last_residual,
    })
}

/// Monodromy data of one loop around a degeneracy candidate.
#[derive(Debug, Clone)]
pub struct MonodromyReport {
    /// Loop center in the chart used (Λ, or w for the point at infinity).
    pub center: Cx,
    /// Chart marker: set when the loop lives in the w-plane around w = 0.
    pub in_w_chart: bool,
    pub radius: f64,
    /// Loop-start branch i continues into loop-start branch `permutation[i]`
    /// after one positive revolution.
    pub permutation: Vec<usize>,
    /// Cycle decomposition of `permutation` (fixed points omitted).
    pub cycles: Vec<Vec<usize>>,
    /// Loop-start indices of the branches that coalesce at the center.
    pub merged: Vec<usize>,
    /// |slope| of log cluster diameter vs log radius over r, r/2, r/4.
    pub puiseux_exponent: f64,
}

fn permutation_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut at = perm[start];
        while at != start {
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

/// Eigenvalue clusters by relative gap; returns index groups.
fn eigenvalue_clusters(eigenvalues: &[Cx]) -> Vec<Vec<usize>> {
    let n = eigenvalues.len();
    let scale = eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in 0..i {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= CLUSTER_GAP * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

struct Classification {
    order: usize,
    kind: EpKind,
    monodromy: MonodromyReport,
}

/// Loop radius: half the distance to the nearest other candidate, capped so
/// the loop cannot swallow the origin of its chart.
fn loop_radius(center: Cx, others: &[Cx]) -> f64 {
    let nearest = others
        .iter()
        .map(|&o| (o - center).norm())
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut r = if nearest.is_finite() {
        0.5 * nearest
    } else {
        0.3 * (1.0 + center.norm())
    };
    if center.norm() > 0.0 {
        r = r.min(0.45 * center.norm());
    } else {
        r = r.min(0.5);
    }
    r
}

fn classify_impl<F: Family>(
    family: &F,
    in_w_chart: bool,
    center: Cx,
    others: &[Cx],
) -> Result<Classification> {
    let r = loop_radius(center, others);
    for &o in others {
        if ((o - center).norm() - r).abs() < 0.05 * r {
            return Err(Error::LoopBlocked {
                center,
                radius: r,
                blocker: o,
            });
        }
    }

    // order and kind at the center; chart origins are not constructible, all
    // d branches coalesce there (nilpotent limit, always defective)
    let (order, kind, zbar) = if center.norm() > 0.0 {
        let u = family.matrix(center)?;
        let dec = eigendecompose(&u)?;
        let cluster = eigenvalue_clusters(&dec.eigenvalues)
            .into_iter()
            .max_by_key(|c| c.len())
            .ok_or_else(|| Error::Precondition("empty spectrum".into()))?;
        if cluster.len() < 2 {
            return Err(Error::Precondition(format!(
                "no eigenvalue coalescence at candidate {center}"
            )));
        }
        let zbar = cluster.iter().map(|&i| dec.eigenvalues[i]).sum::<Cx>() / cluster.len() as f64;
        let mut shifted = u.entries.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] -= zbar;
        }
        let geo = shifted.nrows() - rank(&shifted, 1e-6 * norm_fro(&u.entries));
        let kind = if geo >= cluster.len() {
            EpKind::Diabolic
        } else {
            EpKind::Exceptional
        };
        (cluster.len(), kind, Some(zbar))
    } else {
        let d = family.matrix(Cx::new(0.3, 0.0))?.entries.nrows();
        (d, EpKind::Exceptional, None)
    };

    // monodromy loop: 64 segments, adaptive halving inside each
    let start = center + Cx::new(r, 0.0);
    let dec0 = eigendecompose(&family.matrix(start)?)?;
    let (_, rank_order) = quasienergies_ordered(&dec0);
    let mut state = TrackState::from_decomposition(&dec0, &rank_order, start);
    let start_vectors = state.vectors.clone();
    let start_z = state.z.clone();
    let segments = 64;
    for k in 0..segments {
        let (a, b) = (
            TAU * k as f64 / segments as f64,
            TAU * (k + 1) as f64 / segments as f64,
        );
        let path = move |t: f64| center + Cx::from_polar(r, a + (b - a) * t);
        track_segment(family, &mut state, &path, 0.0, 1.0, 0)?;
    }
    let mut permutation = vec![usize::MAX; start_vectors.len()];
    let mut seen = vec![false; start_vectors.len()];
    for (i, v) in state.vectors.iter().enumerate() {
        let mut best = (0.0f64, usize::MAX);
        for (m, s) in start_vectors.iter().enumerate() {
            let o = crate::linalg::inner(v, s).norm();
            if o > best.0 {
                best = (o, m);
            }
        }
        permutation[i] = best.1;
        if best.1 == usize::MAX || seen[best.1] || best.0 < 0.7 {
            return Err(Error::TrackingAmbiguous {
                at: start,
                overlap: best.0,
                halvings: state.max_halvings,
            });
        }
        seen[best.1] = true;
    }

    // merged branches: the `order` loop-start eigenvalues nearest the cluster
    // (largest-magnitude ones for the z = ∞ cluster of the Λ = 0 record)
    let mut idx: Vec<usize> = (0..start_z.len()).collect();
    match zbar {
        Some(zb) => idx.sort_by(|&a, &b| {
            (start_z[a] - zb)
                .norm()
                .partial_cmp(&(start_z[b] - zb).norm())
                .unwrap()
        }),
        None => {
            if in_w_chart {
                // all eigenvalues accumulate at z = 0
                idx.sort_by(|&a, &b| start_z[a].norm().partial_cmp(&start_z[b].norm()).unwrap());
            } else {
                idx.sort_by(|&a, &b| start_z[b].norm().partial_cmp(&start_z[a].norm()).unwrap());
            }
        }
    }
    let mut merged = idx[..order].to_vec();
    merged.sort_unstable();

    // Puiseux exponent from cluster-diameter scaling at radii r, r/2, r/4,
    // geometric-mean averaged over four angles
    let radii = [r, r / 2.0, r / 4.0];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &rho in &radii {
        let mut log_sum = 0.0;
        let mut count = 0;
        for k in 0..4 {
            let p = center + Cx::from_polar(rho, TAU * k as f64 / 4.0);
            let dec = match family.matrix(p).and_then(|m| eigendecompose(&m)) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let mut sel: Vec<Cx> = dec.eigenvalues.clone();
            match zbar {
                Some(zb) => {
                    sel.sort_by(|a, b| (a - zb).norm().partial_cmp(&(b - zb).norm()).unwrap())
                }
                None => {
                    if in_w_chart {
                        sel.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
                    } else {
                        sel.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
                    }
                }
            }
            let sel = &sel[..order];
            let mut diam = 0.0f64;
            for (i, a) in sel.iter().enumerate() {
                for b in sel.iter().skip(i + 1) {
                    diam = diam.max((a - b).norm());
                }
            }
            if diam > 0.0 {
                log_sum += diam.ln();
                count += 1;
            }
        }
        if count > 0 {
            xs.push(rho.ln());
            ys.push(log_sum / count as f64);
        }
    }
    let puiseux = if xs.len() >= 2 {
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let ym = ys.iter().sum::<f64>() / ys.len() as f64;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        (num / den).abs()
    } else {
        f64::NAN
    };

    let monodromy = MonodromyReport {
        center,
        in_w_chart,
        radius: r,
        cycles: permutation_cycles(&permutation),
        merged,
        permutation,
        puiseux_exponent: puiseux,
    };

    Ok(Classification {
        order,
        kind,
        monodromy,
    })
}

/// Carry |J,M⟩ labels from the base Λ = 1 to the loop-start branches of a
/// candidate, so merged branches can be named as sheets. Requires a
/// non-resonant ω (distinct base spectrum) and a clear straight access path.
fn base_labels_for(config: &TopConfig, center: Cx, radius: f64, others: &[Cx]) -> Option<Vec<i32>> {
    if check_nonresonance(config.omega, config.dimension()).resonant {
        return None;
    }
    let base = Cx::new(1.0, 0.0);
    if (center - base).norm() < 2.0 * radius {
        return None;
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    'angles: for &angle in &[0.0, half_pi, std::f64::consts::PI, -half_pi] {
        let start = center + Cx::from_polar(radius, angle);
        // clearance of the straight access path against every candidate
        for &o in others.iter().chain(std::iter::once(&center)) {
            let seg = start - base;
            let len2 = seg.norm_sqr();
            let t = if len2 > 0.0 {
                (((o - base).conj() * seg).re / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let dist = (base + seg * t - o).norm();
            let limit = if (o - center).norm() < 1e-14 {
                0.9 * radius
            } else {
                0.4 * (o - center).norm().min(radius * 2.0)
            };
            if dist < limit && (o - start).norm() > 1e-12 {
                continue 'angles;
            }
        }
        let family = LambdaFamily(config);
        let dec0 = eigendecompose(&build_floquet(config, ComplexParam::from_angle(0.0))).ok()?;
        let (_, order0) = quasienergies_ordered(&dec0);
        let mut state = TrackState::from_decomposition(&dec0, &order0, base);
        let tms = config.j.twice_m_values();
        let mut labels = Vec::new();
        for v in &state.vectors {
            let i = (0..v.len()).max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap())?;
            labels.push(tms[i]);
        }
        if crate::tracking::track_straight(&family, &mut state, start).is_err() {
            continue 'angles;
        }
        // align the transported branches with the loop-start rank order used
        // by the classification
        let dec_start = eigendecompose(&family.matrix(start).ok()?).ok()?;
        let (_, rank_order) = quasienergies_ordered(&dec_start);
        let ranked: Vec<crate::linalg::CVec> =
            rank_order.iter().map(|&i| dec_start.right_vec(i)).collect();
        let mut rank_label: Vec<Option<i32>> = vec![None; ranked.len()];
        for (bi, v) in state.vectors.iter().enumerate() {
            let mut best = (0.0f64, usize::MAX);
            for (ri, rv) in ranked.iter().enumerate() {
                let o = crate::linalg::inner(v, rv).norm();
                if o > best.0 {
                    best = (o, ri);
                }
            }
            if best.0 < 0.7 || best.1 == usize::MAX || rank_label[best.1].is_some() {
                continue 'angles;
            }
            rank_label[best.1] = Some(labels[bi]);
        }
        if rank_label.iter().all(|l| l.is_some()) {
            return Some(rank_label.into_iter().flatten().collect());
        }
    }
    None
}

fn classify_lambda_candidate(config: &TopConfig, lambda0: Cx, others: &[Cx]) -> Result<EPRecord> {
    let family = LambdaFamily(config);
    let cls = classify_impl(&family, false, lambda0, others)?;
    let merged_branches = base_labels_for(config, lambda0, cls.monodromy.radius, others)
        .map(|labels| {
            let mut m: Vec<i32> = cls.monodromy.merged.iter().map(|&i| labels[i]).collect();
            m.sort_unstable();
            m
        })
        .unwrap_or_default();
    Ok(EPRecord {
        lambda: lambda0,
        at_infinity: false,
        order: cls.order,
        kind: cls.kind,
        merged_branches,
        omega: config.omega,
    })
}

/// Classify one degeneracy candidate in the Λ-plane (Λ₀ = 0 loops the
/// origin; the Λ = ∞ partner is handled by [`find_eps`] in the w chart).
pub fn classify_ep(config: &TopConfig, lambda0: Cx) -> Result<EPRecord> {
    let disc = discriminant_poly(config)?;
    let candidates = candidate_positions(config, &disc)?;
    let others: Vec<Cx> = candidates
        .iter()
        .copied()
        .filter(|&c| (c - lambda0).norm() > 1e-6 * (1.0 + lambda0.norm()))
        .collect();
    classify_lambda_candidate(config, lambda0, &others)
}

/// Monodromy report for a loop around a candidate (Λ chart).
pub fn monodromy_around(config: &TopConfig, lambda0: Cx) -> Result<MonodromyReport> {
    let disc = discriminant_poly(config)?;
    let candidates = candidate_positions(config, &disc)?;
    let others: Vec<Cx> = candidates
        .iter()
        .copied()
        .filter(|&c| (c - lambda0).norm() > 1e-6 * (1.0 + lambda0.norm()))
        .collect();
    let family = LambdaFamily(config);
    Ok(classify_impl(&family, false, lambda0, &others)?.monodromy)
}

/// Finite candidate positions (Λ-plane, including Λ = 0 when the degree
/// deficit indicates it) from the discriminant roots in w.
///
/// Simple roots get a final Newton polish against the directly evaluated
/// discriminant: the interpolated coefficients carry relative noise ~1e−14
/// of the largest coefficient, which is not enough relative accuracy for
/// the extreme-magnitude roots that appear near EP merge points.
fn candidate_positions(config: &TopConfig, disc: &DiscriminantPoly) -> Result<Vec<Cx>> {
    let maxc = disc.max_coeff();
    if maxc <= 1e-10 {
        return Err(Error::DegenerateFamily { omega: disc.omega });
    }
    let tol = COEFF_TRIM * maxc;
    let m0 = disc.zero_root_multiplicity();
    let deficit = disc.degree_deficit();
    let deg = poly::effective_degree(&disc.coeffs, tol);
    let (g, h) = char_poly_affine_split(config);
    let mut positions = Vec::new();
    if deficit > 0 {
        positions.push(Cx::new(0.0, 0.0));
    }
    if deg > m0 {
        let reduced: Vec<Cx> = disc.coeffs[m0..=deg].to_vec();
        let roots = poly::aberth_roots(&reduced, None)?;
        for cl in cluster_roots(&roots) {
            let m = cl.len();
            let mean = cl.iter().sum::<Cx>() / m as f64;
            let refined = if m == 1 {
                polish_root_on_disc(&g, &h, refine_root(&reduced, mean, 1))
            } else {
                refine_root(&reduced, mean, m)
            };
            positions.push(refined.inv());
        }
    }
    Ok(positions)
}

/// Newton on w ↦ Disc_z[g + w·h] evaluated through Sylvester determinants,
/// with a central-difference slope.
fn polish_root_on_disc(g: &[Cx], h: &[Cx], w0: Cx) -> Cx {
    let f = |w: Cx| disc_of_char_at(g, h, w);
    let mut w = w0;
    if w.norm() == 0.0 {
        return w;
    }
    // everything stays relative to the root's own magnitude so the polish
    // can never walk a tiny root off its scale
    for _ in 0..10 {
        let fv = f(w);
        let hs = 1e-6 * w.norm();
        let fp = (f(w + Cx::new(hs, 0.0)) - f(w - Cx::new(hs, 0.0))) / (2.0 * hs);
        if fp.norm() == 0.0 || !fp.is_finite() || !fv.is_finite() {
            break;
        }
        let step = fv / fp;
        if step.norm() > 0.1 * w.norm() {
            break;
        }
        w -= step;
        if step.norm() <= 1e-15 * w.norm() {
            break;
        }
    }
    w
}

fn cluster_roots(roots: &[Cx]) -> Vec<Vec<Cx>> {
    let n = roots.len();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let mut cl = vec![roots[i]];
        used[i] = true;
        for j in i + 1..n {
            if used[j] {
                continue;
            }
            // relative tolerance: distinct conjugate pairs shrink toward 0
            // together near merge points and must not be mistaken for a
            // double root
            let tol = 1e-5 * roots[i].norm().max(roots[j].norm()).max(1e-280);
            if (roots[i] - roots[j]).norm() <= tol {
                cl.push(roots[j]);
                used[j] = true;
            }
        }
        out.push(cl);
    }
    out
}

/// Newton-refine a root of multiplicity m by applying Newton to the
/// (m−1)-th derivative, where the root is simple.
fn refine_root(coeffs: &[Cx], start: Cx, multiplicity: usize) -> Cx {
    let mut target: Vec<Cx> = coeffs.to_vec();
    for _ in 1..multiplicity {
        target = poly::derivative(&target);
    }
    let dtarget = poly::derivative(&target);
    let mut z = start;
    for _ in 0..60 {
        let (p, scale) = poly::eval_with_scale(&target, z);
        if p.norm() <= 1e-16 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        let dp = poly::eval(&dtarget, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if step.norm() > 0.5 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// The full EP atlas of one configuration.
#[derive(Debug, Clone)]
pub struct EpAtlas {
    pub records: Vec<EPRecord>,
    /// Per-candidate classification failures (partial results keep going).
    pub diagnostics: Vec<String>,
}

impl EpAtlas {
    pub fn finite(&self) -> impl Iterator<Item = &EPRecord> {
        self.records.iter().filter(|r| !r.at_infinity)
    }

    pub fn inside_unit_circle(&self) -> impl Iterator<Item = &EPRecord> {
        self.finite().filter(|r| r.lambda.norm() < 1.0)
    }
}

/// Locate and classify every degeneracy of U(Λ).
pub fn find_eps(config: &TopConfig) -> Result<EpAtlas> {
    let disc = discriminant_poly(config)?;
    let m0 = disc.zero_root_multiplicity();
    let deficit = disc.degree_deficit();
    let positions = candidate_positions(config, &disc)?;

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();

    for &pos in &positions {
        let others: Vec<Cx> = positions
            .iter()
            .copied()
            .filter(|&c| (c - pos).norm() > 1e-6 * (1.0 + pos.norm()))
            .collect();
        match classify_lambda_candidate(config, pos, &others) {
            Ok(mut rec) => {
                if pos.norm() == 0.0 {
                    if rec.order != deficit + 1 {
                        diagnostics.push(format!(
                            "origin record: cluster order {} vs deficit-derived {}",
                            rec.order,
                            deficit + 1
                        ));
                    }
                    rec.order = rec.order.max(deficit + 1);
                }
                records.push(rec);
            }
            Err(e) => diagnostics.push(format!("candidate at {pos}: {e}")),
        }
    }

    if m0 > 0 {
        // Λ = ∞: loop in the w chart around w = 0
        let family = WFamily(config);
        let w_others: Vec<Cx> = positions
            .iter()
            .filter(|c| c.norm() > 0.0)
            .map(|c| c.inv())
            .collect();
        match classify_impl(&family, true, Cx::new(0.0, 0.0), &w_others) {
            Ok(cls) => records.push(EPRecord {
                lambda: Cx::new(0.0, 0.0),
                at_infinity: true,
                order: cls.order.max(m0 + 1),
                kind: cls.kind,
                merged_branches: Vec::new(),
                omega: config.omega,
            }),
            Err(e) => diagnostics.push(format!("infinity record: {e}")),
        }
    }

    records.sort_by(|a, b| {
        a.at_infinity
            .cmp(&b.at_infinity)
            .then(
                a.lambda
                    .re
                    .partial_cmp(&b.lambda.re)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then(
                a.lambda
                    .im
                    .partial_cmp(&b.lambda.im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    Ok(EpAtlas {
        records,
        diagnostics,
    })
}

/// One EP trajectory across an ω scan.
#[derive(Debug, Clone)]
pub struct EpTrack {
    pub id: usize,
    /// (index into the ω grid, index into that ω's records).
    pub points: Vec<(usize, usize)>,
}

/// Two linked EPs coming closer than the merge threshold.
#[derive(Debug, Clone)]
pub struct MergeEvent {
    pub omega: f64,
    pub lambda: Cx,
    pub track_a: usize,
    pub track_b: usize,
}

/// EP atlas per ω with nearest-neighbor continuity links.
#[derive(Debug, Clone)]
pub struct EpTrajectory {
    pub omegas: Vec<f64>,
    pub per_omega: Vec<Vec<EPRecord>>,
    /// Per ω, per record: the track id.
    pub track_ids: Vec<Vec<usize>>,
    pub tracks: Vec<EpTrack>,
    pub merges: Vec<MergeEvent>,
    pub diagnostics: Vec<String>,
}

fn link_cap(a: Cx, b: Cx) -> f64 {
    0.35 * (1.0 + a.norm().min(b.norm()))
}

/// Merge detection threshold on linked positions.
pub const MERGE_DISTANCE: f64 = 1e-4;

/// Run [`find_eps`] across an ω grid and link records between consecutive ω
/// by nearest position (finite records by Λ distance; at-infinity records
/// link to each other). Gaps are reported in the diagnostics, not fatal.
pub fn ep_trajectory(config: &TopConfig, omega_grid: &[f64]) -> EpTrajectory {
    let mut per_omega = Vec::with_capacity(omega_grid.len());
    let mut diagnostics = Vec::new();
    for &omega in omega_grid {
        let cfg = TopConfig {
            j: config.j,
            omega,
            kick: config.kick.clone(),
        };
        match find_eps(&cfg) {
            Ok(atlas) => {
                for d in atlas.diagnostics {
                    diagnostics.push(format!("omega={omega}: {d}"));
                }
                per_omega.push(atlas.records);
            }
            Err(e) => {
                diagnostics.push(format!("omega={omega}: {e}"));
                per_omega.push(Vec::new());
            }
        }
    }

    let mut tracks: Vec<EpTrack> = Vec::new();
    let mut track_ids: Vec<Vec<usize>> = Vec::new();
    let mut merges = Vec::new();
    let mut open: Vec<(usize, usize)> = Vec::new();

    for (k, recs) in per_omega.iter().enumerate() {
        let mut ids = vec![usize::MAX; recs.len()];
        if k == 0 || open.is_empty() {
            for (i, _) in recs.iter().enumerate() {
                let id = tracks.len();
                tracks.push(EpTrack {
                    id,
                    points: vec![(k, i)],
                });
                ids[i] = id;
            }
        } else {
            let prev = &per_omega[k - 1];
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (pi, &(_, prec_idx)) in open.iter().enumerate() {
                let pr = &prev[prec_idx];
                for (ci, cr) in recs.iter().enumerate() {
                    if pr.at_infinity != cr.at_infinity {
                        continue;
                    }
                    let dist = if pr.at_infinity {
                        0.0
                    } else {
                        (pr.lambda - cr.lambda).norm()
                    };
                    if pr.at_infinity || dist <= link_cap(pr.lambda, cr.lambda) {
                        pairs.push((dist, pi, ci));
                    }
                }
            }
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut prev_used = vec![false; open.len()];
            let mut cur_used = vec![false; recs.len()];
            for (_, pi, ci) in pairs {
                if prev_used[pi] || cur_used[ci] {
                    continue;
                }
                prev_used[pi] = true;
                cur_used[ci] = true;
                let id = open[pi].0;
                tracks[id].points.push((k, ci));
                ids[ci] = id;
            }
            for (ci, _) in recs.iter().enumerate() {
                if ids[ci] == usize::MAX {
                    let id = tracks.len();
                    tracks.push(EpTrack {
                        id,
                        points: vec![(k, ci)],
                    });
                    ids[ci] = id;
                }
            }
        }
        for i in 0..recs.len() {
            for j in 0..i {
                if recs[i].at_infinity || recs[j].at_infinity {
                    continue;
                }
                if (recs[i].lambda - recs[j].lambda).norm() < MERGE_DISTANCE && ids[i] != ids[j] {
                    merges.push(MergeEvent {
                        omega: omega_grid[k],
                        lambda: (recs[i].lambda + recs[j].lambda) / 2.0,
                        track_a: ids[j].min(ids[i]),
                        track_b: ids[j].max(ids[i]),
                    });
                }
            }
        }
        open = ids
            .iter()
            .enumerate()
            .filter(|(_, &id)| id != usize::MAX)
            .map(|(ci, &id)| (id, ci))
            .collect();
        track_ids.push(ids);
    }

    EpTrajectory {
        omegas: omega_grid.to_vec(),
        per_omega,
        track_ids,
        tracks,
        merges,
        diagnostics,
    }
}
