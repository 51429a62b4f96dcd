//! Command implementations: orchestrate the library and write result files.

use std::fs;
use std::str::FromStr;

use kicked_top::cubic_analytics::{resultant_dq, resultant_dq_closed_form};
use kicked_top::ep_finder::{ep_trajectory, find_eps};
use kicked_top::holonomy::sweep_cycle;
use kicked_top::riemann::{
    build_sheets, cycle_monodromy, template_path, CyclePath, CycleTemplate, SheetOptions,
};

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

/// Warn (stderr) above this unresolved-cell fraction.
const UNRESOLVED_WARN: f64 = 0.2;

fn reject_scan(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.omega_scan.is_some() {
        return Err(CliError::Validation(format!(
            "--omega-scan only applies to the ep command, not {command}"
        )));
    }
    Ok(())
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    reject_scan(cfg, "sweep")?;
    let top = cfg.top_config(None)?;
    let sweep = sweep_cycle(&top, cfg.steps)?;
    fs::write(&cfg.out, output::sweep_table(&cfg.echo("sweep"), &sweep))?;
    Ok(())
}

pub fn cmd_ep(cfg: &RunConfig) -> Result<(), CliError> {
    let echo = cfg.echo("ep");
    let text = match &cfg.omega_scan {
        None => {
            let top = cfg.top_config(None)?;
            let atlas = find_eps(&top)?;
            if !atlas.diagnostics.is_empty() {
                for d in &atlas.diagnostics {
                    eprintln!("warning: {d}");
                }
            }
            output::ep_atlas_json(&echo, &atlas)
        }
        Some(scan) => {
            let top = cfg.top_config(Some(scan.start.radians))?;
            let traj = ep_trajectory(&top, &scan.grid());
            for d in &traj.diagnostics {
                eprintln!("warning: {d}");
            }
            output::ep_trajectory_json(&echo, &traj)
        }
    };
    fs::write(&cfg.out, text)?;
    Ok(())
}

pub fn cmd_contour(cfg: &RunConfig) -> Result<(), CliError> {
    reject_scan(cfg, "contour")?;
    let top = cfg.top_config(None)?;
    let options = SheetOptions {
        n_rays: cfg.rays,
        guard_radius: cfg.guard,
    };
    let grids = build_sheets(&top, cfg.region, cfg.resolution, options)?;
    let echo = cfg.echo("contour");
    for grid in &grids {
        let path = output::sheet_file_name(&cfg.out, grid.twice_m);
        fs::write(&path, output::contour_table(&echo, grid))?;
        if grid.unresolved_fraction() > UNRESOLVED_WARN {
            eprintln!(
                "warning: sheet 2M={} has {:.1}% unresolved cells",
                grid.twice_m,
                100.0 * grid.unresolved_fraction()
            );
        }
    }
    Ok(())
}

pub fn cmd_cycle(cfg: &RunConfig) -> Result<(), CliError> {
    reject_scan(cfg, "cycle")?;
    let top = cfg.top_config(None)?;
    let path = match (&cfg.template, &cfg.waypoints) {
        (Some(t), None) => {
            let template = CycleTemplate::from_str(t)?;
            template_path(&top, template)?
        }
        (None, Some(w)) => CyclePath::new(w.clone())?,
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "provide either --template or --waypoints, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Validation(
                "cycle needs --template C|C'|C1|C2 or --waypoints".into(),
            ))
        }
    };
    let steps = cfg.steps.max(64);
    let result = cycle_monodromy(&top, &path, steps)?;
    fs::write(
        &cfg.out,
        output::cycle_json(&cfg.echo("cycle"), &path, &result),
    )?;
    Ok(())
}

pub fn cmd_resultant_check(cfg: &RunConfig) -> Result<(), CliError> {
    let (lo, hi, count) = cfg.mu_grid;
    let rows: Vec<(f64, f64, f64)> = (0..count)
        .map(|k| {
            let mu = lo + (hi - lo) * k as f64 / (count - 1) as f64;
            (mu, resultant_dq(mu), resultant_dq_closed_form(mu))
        })
        .collect();
    fs::write(
        &cfg.out,
        output::resultant_table(&cfg.echo("resultant-check"), &rows),
    )?;
    Ok(())
}
