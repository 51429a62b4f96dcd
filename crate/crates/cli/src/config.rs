//! Resolved run configuration: CLI flags merged over an optional key=value
//! config file, parse-then-validate.

use std::collections::BTreeMap;
use std::path::PathBuf;

use kicked_top::riemann::Region;
use kicked_top::spin_algebra::{HalfInt, KickVector, TopConfig};

use crate::parse::{
    parse_kick, parse_mu_grid, parse_omega, parse_omega_scan, parse_region, parse_resolution,
    parse_waypoints, KickSpec, OmegaScan, OmegaSpec,
};
use crate::CliError;

/// Raw option bag: everything optional, merged by [`RunConfig::resolve`].
#[derive(Debug, Clone, Default)]
pub struct RawOptions {
    pub two_j: Option<i32>,
    pub omega: Option<String>,
    pub kick: Option<String>,
    pub steps: Option<usize>,
    pub region: Option<String>,
    pub res: Option<String>,
    pub out: Option<PathBuf>,
    pub omega_scan: Option<String>,
    pub seed: Option<u64>,
    pub template: Option<String>,
    pub waypoints: Option<String>,
    pub guard: Option<f64>,
    pub rays: Option<usize>,
    pub mu_grid: Option<String>,
}

impl RawOptions {
    /// Fill unset fields from a key=value map (CLI flags take precedence).
    pub fn merge_file(&mut self, file: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (key, value) in file {
            match key.as_str() {
                "two-j" | "two_j" => {
                    if self.two_j.is_none() {
                        self.two_j = Some(value.parse().map_err(|_| {
                            CliError::Parse(format!("config: bad two-j '{value}'"))
                        })?);
                    }
                }
                "omega" => {
                    if self.omega.is_none() {
                        self.omega = Some(value.clone());
                    }
                }
                "kick" => {
                    if self.kick.is_none() {
                        self.kick = Some(value.clone());
                    }
                }
                "steps" => {
                    if self.steps.is_none() {
                        self.steps = Some(value.parse().map_err(|_| {
                            CliError::Parse(format!("config: bad steps '{value}'"))
                        })?);
                    }
                }
                "region" => {
                    if self.region.is_none() {
                        self.region = Some(value.clone());
                    }
                }
                "res" => {
                    if self.res.is_none() {
                        self.res = Some(value.clone());
                    }
                }
                "out" => {
                    if self.out.is_none() {
                        self.out = Some(PathBuf::from(value));
                    }
                }
                "omega-scan" | "omega_scan" => {
                    if self.omega_scan.is_none() {
                        self.omega_scan = Some(value.clone());
                    }
                }
                "seed" => {
                    if self.seed.is_none() {
                        self.seed =
                            Some(value.parse().map_err(|_| {
                                CliError::Parse(format!("config: bad seed '{value}'"))
                            })?);
                    }
                }
                "template" => {
                    if self.template.is_none() {
                        self.template = Some(value.clone());
                    }
                }
                "waypoints" => {
                    if self.waypoints.is_none() {
                        self.waypoints = Some(value.clone());
                    }
                }
                "guard" => {
                    if self.guard.is_none() {
                        self.guard = Some(value.parse().map_err(|_| {
                            CliError::Parse(format!("config: bad guard '{value}'"))
                        })?);
                    }
                }
                "rays" => {
                    if self.rays.is_none() {
                        self.rays =
                            Some(value.parse().map_err(|_| {
                                CliError::Parse(format!("config: bad rays '{value}'"))
                            })?);
                    }
                }
                "mu-grid" | "mu_grid" => {
                    if self.mu_grid.is_none() {
                        self.mu_grid = Some(value.clone());
                    }
                }
                other => {
                    return Err(CliError::Parse(format!("config: unknown key '{other}'")));
                }
            }
        }
        Ok(())
    }
}

/// The fully resolved configuration a command runs with.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub two_j: i32,
    pub omega: OmegaSpec,
    pub kick: KickSpec,
    pub steps: usize,
    pub region: Region,
    pub resolution: (usize, usize),
    pub out: PathBuf,
    pub omega_scan: Option<OmegaScan>,
    pub seed: u64,
    pub template: Option<String>,
    pub waypoints: Option<Vec<num_complex::Complex64>>,
    pub guard: f64,
    pub rays: usize,
    pub mu_grid: (f64, f64, usize),
}

impl RunConfig {
    pub fn resolve(raw: &RawOptions, needs_spin: bool) -> Result<RunConfig, CliError> {
        let two_j = match raw.two_j {
            Some(t) => t,
            None if needs_spin => return Err(CliError::Validation("--two-j is required".into())),
            None => 2,
        };
        let omega = match &raw.omega {
            Some(s) => parse_omega(s)?,
            None if needs_spin && raw.omega_scan.is_none() => {
                return Err(CliError::Validation(
                    "--omega (or --omega-scan) is required".into(),
                ))
            }
            None => OmegaSpec {
                radians: 0.0,
                token: "0".into(),
            },
        };
        let kick = match &raw.kick {
            Some(s) => parse_kick(s)?,
            None => KickSpec::Uniform,
        };
        let region = match &raw.region {
            Some(s) => parse_region(s)?,
            None => Region::square(1.5),
        };
        let resolution = match &raw.res {
            Some(s) => parse_resolution(s)?,
            None => (60, 60),
        };
        let out = raw
            .out
            .clone()
            .ok_or_else(|| CliError::Validation("--out is required".into()))?;
        let omega_scan = match &raw.omega_scan {
            Some(s) => Some(parse_omega_scan(s)?),
            None => None,
        };
        let waypoints = match &raw.waypoints {
            Some(s) => Some(parse_waypoints(s)?),
            None => None,
        };
        let mu_grid = match &raw.mu_grid {
            Some(s) => parse_mu_grid(s)?,
            None => (-0.99, 0.33, 101),
        };
        let guard = raw.guard.unwrap_or(0.12);
        if !(1e-6..=1.0).contains(&guard) {
            return Err(CliError::Validation(format!(
                "guard radius {guard} out of (1e-6, 1]"
            )));
        }
        Ok(RunConfig {
            two_j,
            omega,
            kick,
            steps: raw.steps.unwrap_or(256),
            region,
            resolution,
            out,
            omega_scan,
            seed: raw.seed.unwrap_or(0),
            template: raw.template.clone(),
            waypoints,
            guard,
            rays: raw.rays.unwrap_or(360),
            mu_grid,
        })
    }

    /// The core TopConfig at this run's ω (or an override for scans).
    pub fn top_config(&self, omega: Option<f64>) -> Result<TopConfig, CliError> {
        let j = HalfInt::from_twice(self.two_j).map_err(CliError::Core)?;
        let omega = omega.unwrap_or(self.omega.radians);
        match &self.kick {
            KickSpec::Uniform => Ok(TopConfig::uniform(j, omega)),
            KickSpec::Coefficients(coeffs) => {
                let kick = KickVector::normalized(coeffs.clone()).map_err(CliError::Core)?;
                TopConfig::new(j, omega, kick).map_err(CliError::Core)
            }
        }
    }

    /// Key=value echo of every resolved option, embedded in every output
    /// file so results are self-describing.
    pub fn echo(&self, command: &str) -> String {
        let kick = match &self.kick {
            KickSpec::Uniform => "uniform".to_string(),
            KickSpec::Coefficients(c) => c
                .iter()
                .map(|z| format!("{}{}{}i", z.re, if z.im < 0.0 { "" } else { "+" }, z.im))
                .collect::<Vec<_>>()
                .join(","),
        };
        let mut s = format!(
            "command={command} two_j={} omega={} omega_rad={} kick={kick} steps={} seed={}",
            self.two_j, self.omega.token, self.omega.radians, self.steps, self.seed
        );
        s.push_str(&format!(
            " region={},{},{},{} res={},{} guard={} rays={}",
            self.region.re_min,
            self.region.re_max,
            self.region.im_min,
            self.region.im_max,
            self.resolution.0,
            self.resolution.1,
            self.guard,
            self.rays
        ));
        if let Some(scan) = &self.omega_scan {
            s.push_str(&format!(
                " omega_scan={}:{}:{}",
                scan.start.token, scan.end.token, scan.count
            ));
        }
        if let Some(t) = &self.template {
            s.push_str(&format!(" template={t}"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_over_file_precedence() {
        let mut raw = RawOptions {
            omega: Some("pi/6".into()),
            ..Default::default()
        };
        let mut file = BTreeMap::new();
        file.insert("omega".to_string(), "pi/3".to_string());
        file.insert("two-j".to_string(), "3".to_string());
        file.insert("out".to_string(), "x.tsv".to_string());
        raw.merge_file(&file).unwrap();
        let cfg = RunConfig::resolve(&raw, true).unwrap();
        assert_eq!(cfg.omega.token, "pi/6");
        assert_eq!(cfg.two_j, 3);
        assert_eq!(cfg.out, PathBuf::from("x.tsv"));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let mut raw = RawOptions::default();
        let mut file = BTreeMap::new();
        file.insert("bogus".to_string(), "1".to_string());
        assert!(raw.merge_file(&file).is_err());
    }

    #[test]
    fn missing_required_flags() {
        let raw = RawOptions::default();
        assert!(RunConfig::resolve(&raw, true).is_err());
    }
}
