//! Serialization of results: flat tab-separated tables for sweeps and grids,
//! JSON-shaped structured text for atlases and monodromy reports. Every file
//! carries a versioned format line and the full resolved configuration, and
//! identical configurations produce byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as Cx;
use serde::Serialize;

use kicked_top::cubic_analytics::EPRecord;
use kicked_top::ep_finder::{EpAtlas, EpTrajectory};
use kicked_top::holonomy::SweepResult;
use kicked_top::riemann::{CyclePath, MonodromyResult, SheetGrid};

/// Shortest-roundtrip float formatting (deterministic, full precision).
fn f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

fn cycles_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut s = String::new();
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
            let inner: Vec<String> = cyc.iter().map(|n| n.to_string()).collect();
            let _ = write!(s, "({})", inner.join(" "));
        }
    }
    if s.is_empty() {
        s.push_str("()");
    }
    s
}

/// Sweep table: one row per (λ grid point, branch).
pub fn sweep_table(config_echo: &str, sweep: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str("# kicked-top sweep v1\n");
    let _ = writeln!(out, "# config: {config_echo}");
    out.push_str("# columns: lambda\tbranch_id\tquasienergy_unwrapped\tre_z\tim_z\n");
    for (k, &lam) in sweep.lambda_grid.iter().enumerate() {
        for (n, branch) in sweep.branches.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                f(lam),
                n,
                f(branch.e_unwrapped[k]),
                f(branch.z[k].re),
                f(branch.z[k].im)
            );
        }
    }
    let perm: Vec<String> = sweep
        .permutation
        .iter()
        .enumerate()
        .map(|(n, &p)| format!("{n}->{p}"))
        .collect();
    let _ = writeln!(out, "# permutation_ranks: {}", perm.join(","));
    let _ = writeln!(
        out,
        "# permutation_cycles: {}",
        cycles_notation(&sweep.permutation)
    );
    let itinerary: Vec<String> = sweep
        .itinerary
        .iter()
        .map(|(from, to)| format!("{from}->{to}"))
        .collect();
    let _ = writeln!(out, "# itinerary_2m: {}", itinerary.join(","));
    let ranks: Vec<String> = sweep
        .rank_to_twice_m
        .iter()
        .map(|m| m.to_string())
        .collect();
    let _ = writeln!(out, "# rank_to_2m: {}", ranks.join(","));
    let _ = writeln!(out, "# min_overlap: {}", f(sweep.min_overlap));
    out
}

#[derive(Serialize)]
struct EpRecordOut {
    omega: f64,
    re_lambda: f64,
    im_lambda: f64,
    order: usize,
    kind: String,
    at_infinity: bool,
    merged_branches_2m: Vec<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    track_id: Option<usize>,
}

fn record_out(r: &EPRecord, track_id: Option<usize>) -> EpRecordOut {
    EpRecordOut {
        omega: r.omega,
        re_lambda: r.lambda.re,
        im_lambda: r.lambda.im,
        order: r.order,
        kind: r.kind.to_string(),
        at_infinity: r.at_infinity,
        merged_branches_2m: r.merged_branches.clone(),
        track_id,
    }
}

#[derive(Serialize)]
struct EpAtlasOut {
    format: &'static str,
    version: u32,
    config: String,
    records: Vec<EpRecordOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    merges: Vec<MergeOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct MergeOut {
    omega: f64,
    re_lambda: f64,
    im_lambda: f64,
    track_a: usize,
    track_b: usize,
}

/// Single-ω EP atlas.
pub fn ep_atlas_json(config_echo: &str, atlas: &EpAtlas) -> String {
    let out = EpAtlasOut {
        format: "kicked-top-ep-atlas",
        version: 1,
        config: config_echo.to_string(),
        records: atlas.records.iter().map(|r| record_out(r, None)).collect(),
        merges: Vec::new(),
        diagnostics: atlas.diagnostics.clone(),
    };
    serde_json::to_string_pretty(&out).expect("serialization") + "\n"
}

/// ω-scan EP atlas with trajectory link ids.
pub fn ep_trajectory_json(config_echo: &str, traj: &EpTrajectory) -> String {
    let mut records = Vec::new();
    for (k, recs) in traj.per_omega.iter().enumerate() {
        for (i, r) in recs.iter().enumerate() {
            records.push(record_out(r, Some(traj.track_ids[k][i])));
        }
    }
    let out = EpAtlasOut {
        format: "kicked-top-ep-atlas",
        version: 1,
        config: config_echo.to_string(),
        records,
        merges: traj
            .merges
            .iter()
            .map(|m| MergeOut {
                omega: m.omega,
                re_lambda: m.lambda.re,
                im_lambda: m.lambda.im,
                track_a: m.track_a,
                track_b: m.track_b,
            })
            .collect(),
        diagnostics: traj.diagnostics.clone(),
    };
    serde_json::to_string_pretty(&out).expect("serialization") + "\n"
}

/// One sheet-grid table.
pub fn contour_table(config_echo: &str, grid: &SheetGrid) -> String {
    let mut out = String::new();
    out.push_str("# kicked-top contour v1\n");
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(
        out,
        "# sheet_2m: {} (M = {})",
        grid.twice_m,
        grid.twice_m as f64 / 2.0
    );
    let _ = writeln!(out, "# seam: {}", grid.seam);
    out.push_str("# eps: re_lambda im_lambda order kind at_infinity\n");
    for ep in &grid.eps {
        let _ = writeln!(
            out,
            "# ep: {} {} {} {} {}",
            f(ep.lambda.re),
            f(ep.lambda.im),
            ep.order,
            ep.kind,
            u8::from(ep.at_infinity)
        );
    }
    out.push_str("# columns: re_lambda\tim_lambda\tre_E\tresolved\n");
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let node = grid.node(ix, iy);
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                f(node.re),
                f(node.im),
                f(grid.value(ix, iy)),
                u8::from(grid.is_resolved(ix, iy))
            );
        }
    }
    let _ = writeln!(
        out,
        "# unresolved_fraction: {}",
        f(grid.unresolved_fraction())
    );
    out
}

#[derive(Serialize)]
struct CycleOut {
    format: &'static str,
    version: u32,
    config: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    template: Option<String>,
    waypoints: Vec<[f64; 2]>,
    rank_permutation: Vec<usize>,
    permutation_cycles: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sheet_permutation_2m: Option<BTreeMap<String, i32>>,
    seam_crossings: Vec<CrossingOut>,
    intermediate_rank_permutations: Vec<Vec<usize>>,
    min_overlap: f64,
    max_halvings: u32,
}

#[derive(Serialize)]
struct CrossingOut {
    re: f64,
    im: f64,
    direction: i8,
}

/// Monodromy report for one cycle.
pub fn cycle_json(config_echo: &str, path: &CyclePath, result: &MonodromyResult) -> String {
    let out = CycleOut {
        format: "kicked-top-cycle",
        version: 1,
        config: config_echo.to_string(),
        template: path.template.clone(),
        waypoints: path.waypoints.iter().map(|w| [w.re, w.im]).collect(),
        rank_permutation: result.rank_permutation.clone(),
        permutation_cycles: cycles_notation(&result.rank_permutation),
        sheet_permutation_2m: result
            .sheet_permutation
            .as_ref()
            .map(|m| m.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
        seam_crossings: result
            .seam_crossings
            .iter()
            .map(|c| CrossingOut {
                re: c.location.re,
                im: c.location.im,
                direction: c.direction,
            })
            .collect(),
        intermediate_rank_permutations: result.intermediate.clone(),
        min_overlap: result.min_overlap,
        max_halvings: result.max_halvings,
    };
    serde_json::to_string_pretty(&out).expect("serialization") + "\n"
}

/// Resultant-check table.
pub fn resultant_table(config_echo: &str, rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::new();
    out.push_str("# kicked-top resultant-check v1\n");
    let _ = writeln!(out, "# config: {config_echo}");
    out.push_str("# columns: mu\tsylvester\tclosed_form\trel_err\n");
    let mut max_rel = 0.0f64;
    for &(mu, det, closed) in rows {
        let rel = if closed.abs() > 1e-25 {
            (det - closed).abs() / closed.abs()
        } else {
            0.0
        };
        max_rel = max_rel.max(rel);
        let _ = writeln!(out, "{}\t{}\t{}\t{}", f(mu), f(det), f(closed), f(rel));
    }
    let _ = writeln!(out, "# max_rel_err: {}", f(max_rel));
    out
}

/// Insert a sheet suffix before the extension: contour.tsv → contour.m-2.tsv.
pub fn sheet_file_name(base: &std::path::Path, twice_m: i32) -> std::path::PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("sheet");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("tsv");
    base.with_file_name(format!("{stem}.m{twice_m}.{ext}"))
}

pub fn complex_pretty(z: Cx) -> String {
    format!(
        "{}{}{}i",
        f(z.re),
        if z.im < 0.0 { "" } else { "+" },
        f(z.im)
    )
}
