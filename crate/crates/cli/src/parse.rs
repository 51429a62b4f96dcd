//! Text parsers for the CLI surface: symbolic ω tokens, complex numbers,
//! kick coefficient lists, regions, resolutions, waypoint lists, ω scans and
//! key=value config files.
//!
//! ω accepts either plain radians ("1.047") or exact multiples of π
//! ("pi/6", "2pi/3", "0.5pi", "-3pi/4"), so solvable and resonant values are
//! classified without decimal-rounding surprises.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as Cx;

use crate::CliError;

/// A parsed ω: the radian value plus the original token for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSpec {
    pub radians: f64,
    pub token: String,
}

fn bad(what: &str, input: &str) -> CliError {
    CliError::Parse(format!("cannot parse {what} from '{input}'"))
}

/// Parse an ω token: decimal radians or a π multiple `[-][N][*]pi[/D]`.
pub fn parse_omega(input: &str) -> Result<OmegaSpec, CliError> {
    let token = input.trim().to_string();
    let s = token.replace(' ', "").to_lowercase();
    if s.is_empty() {
        return Err(bad("omega", input));
    }
    if let Some(pos) = s.find("pi") {
        let (pre, post) = (&s[..pos], &s[pos + 2..]);
        let pre = pre.strip_suffix('*').unwrap_or(pre);
        let factor: f64 = match pre {
            "" => 1.0,
            "-" => -1.0,
            "+" => 1.0,
            other => other.parse().map_err(|_| bad("omega", input))?,
        };
        let denom: f64 = if post.is_empty() {
            1.0
        } else if let Some(dd) = post.strip_prefix('/') {
            let val: f64 = dd.parse().map_err(|_| bad("omega", input))?;
            if val == 0.0 {
                return Err(bad("omega (division by zero)", input));
            }
            val
        } else {
            return Err(bad("omega", input));
        };
        let radians = factor * PI / denom;
        if !radians.is_finite() {
            return Err(bad("omega", input));
        }
        return Ok(OmegaSpec { radians, token });
    }
    let radians: f64 = s.parse().map_err(|_| bad("omega", input))?;
    if !radians.is_finite() {
        return Err(bad("omega", input));
    }
    Ok(OmegaSpec { radians, token })
}

/// Parse one complex literal: "1.5", "-2e-3", "1+2i", "0.5-0.25i", "i", "2i".
pub fn parse_complex(input: &str) -> Result<Cx, CliError> {
    let s: String = input.trim().replace(' ', "");
    if s.is_empty() {
        return Err(bad("complex number", input));
    }
    if !s.ends_with('i') {
        let re: f64 = s.parse().map_err(|_| bad("complex number", input))?;
        if !re.is_finite() {
            return Err(bad("complex number", input));
        }
        return Ok(Cx::new(re, 0.0));
    }
    let body = &s[..s.len() - 1];
    // split at the sign that separates the real part from the imaginary one,
    // skipping leading signs and exponent signs
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im: f64 = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad("complex number", input))?,
    };
    let re: f64 = if re_str.is_empty() {
        0.0
    } else {
        re_str.parse().map_err(|_| bad("complex number", input))?
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad("complex number", input));
    }
    Ok(Cx::new(re, im))
}

/// The kick direction: uniform or an explicit coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub enum KickSpec {
    Uniform,
    Coefficients(Vec<Cx>),
}

/// Parse "uniform" or a comma-separated complex coefficient list.
pub fn parse_kick(input: &str) -> Result<KickSpec, CliError> {
    let s = input.trim();
    if s.eq_ignore_ascii_case("uniform") {
        return Ok(KickSpec::Uniform);
    }
    let coeffs: Result<Vec<Cx>, CliError> = s.split(',').map(parse_complex).collect();
    let coeffs = coeffs?;
    if coeffs.is_empty() {
        return Err(bad("kick", input));
    }
    Ok(KickSpec::Coefficients(coeffs))
}

/// Parse "re_min,re_max,im_min,im_max".
pub fn parse_region(input: &str) -> Result<kicked_top::riemann::Region, CliError> {
    let parts: Vec<&str> = input.trim().split(',').collect();
    if parts.len() != 4 {
        return Err(bad("region (re_min,re_max,im_min,im_max)", input));
    }
    let mut vals = [0.0f64; 4];
    for (k, p) in parts.iter().enumerate() {
        vals[k] = p.trim().parse().map_err(|_| bad("region", input))?;
        if !vals[k].is_finite() {
            return Err(bad("region", input));
        }
    }
    kicked_top::riemann::Region::new(vals[0], vals[1], vals[2], vals[3])
        .map_err(|e| CliError::Parse(e.to_string()))
}

/// Parse "N" or "NX,NY" into a grid resolution.
pub fn parse_resolution(input: &str) -> Result<(usize, usize), CliError> {
    let s = input.trim();
    let parse_one = |p: &str| -> Result<usize, CliError> {
        let n: usize = p.trim().parse().map_err(|_| bad("resolution", input))?;
        if !(2..=4096).contains(&n) {
            return Err(CliError::Parse(format!(
                "resolution {n} out of range 2..=4096"
            )));
        }
        Ok(n)
    };
    match s.split_once(',') {
        Some((a, b)) => Ok((parse_one(a)?, parse_one(b)?)),
        None => {
            let n = parse_one(s)?;
            Ok((n, n))
        }
    }
}

/// Parse a waypoint list "re,im;re,im;…" (at least three points).
pub fn parse_waypoints(input: &str) -> Result<Vec<Cx>, CliError> {
    let mut out = Vec::new();
    for part in input.trim().split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (re, im) = part
            .split_once(',')
            .ok_or_else(|| bad("waypoint (re,im)", part))?;
        let re: f64 = re.trim().parse().map_err(|_| bad("waypoint", part))?;
        let im: f64 = im.trim().parse().map_err(|_| bad("waypoint", part))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(bad("waypoint", part));
        }
        out.push(Cx::new(re, im));
    }
    if out.len() < 3 {
        return Err(CliError::Parse(format!(
            "waypoint list needs at least 3 points, got {}",
            out.len()
        )));
    }
    Ok(out)
}

/// An ω scan "start:end:count" (ω tokens allowed for start/end).
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaScan {
    pub start: OmegaSpec,
    pub end: OmegaSpec,
    pub count: usize,
}

impl OmegaScan {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.count.max(2);
        (0..n)
            .map(|k| {
                self.start.radians
                    + (self.end.radians - self.start.radians) * k as f64 / (n - 1) as f64
            })
            .collect()
    }
}

pub fn parse_omega_scan(input: &str) -> Result<OmegaScan, CliError> {
    let parts: Vec<&str> = input.trim().split(':').collect();
    if parts.len() != 3 {
        return Err(bad("omega scan (start:end:count)", input));
    }
    let start = parse_omega(parts[0])?;
    let end = parse_omega(parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| bad("omega scan count", input))?;
    if !(2..=100_000).contains(&count) {
        return Err(CliError::Parse(format!(
            "scan count {count} out of range 2..=100000"
        )));
    }
    Ok(OmegaScan { start, end, count })
}

/// Parse "min,max,count" for the resultant μ grid.
pub fn parse_mu_grid(input: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = input.trim().split(',').collect();
    if parts.len() != 3 {
        return Err(bad("mu grid (min,max,count)", input));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad("mu grid", input))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad("mu grid", input))?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad("mu grid", input))?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi || !(2..=1_000_000).contains(&count) {
        return Err(bad("mu grid", input));
    }
    Ok((lo, hi, count))
}

/// key=value configuration file: one pair per line, '#' comments.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Parse(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Parse(format!(
                "config line {}: empty key",
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_tokens() {
        assert!((parse_omega("2pi/3").unwrap().radians - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_omega("pi/6").unwrap().radians - PI / 6.0).abs() < 1e-15);
        assert!((parse_omega("pi").unwrap().radians - PI).abs() < 1e-15);
        assert!((parse_omega("-3pi/4").unwrap().radians + 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((parse_omega("0.5pi").unwrap().radians - 0.5 * PI).abs() < 1e-15);
        assert!((parse_omega("2*pi/5").unwrap().radians - 2.0 * PI / 5.0).abs() < 1e-15);
        assert!((parse_omega("1.25").unwrap().radians - 1.25).abs() < 1e-15);
        for bad in ["", "pie", "pi/0", "2pi/", "x", "1..2", "nan", "inf"] {
            assert!(parse_omega(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), Cx::new(1.5, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Cx::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), Cx::new(0.5, -0.25));
        assert_eq!(parse_complex("i").unwrap(), Cx::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Cx::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), Cx::new(0.0, 2.0));
        assert_eq!(parse_complex("-2e-3").unwrap(), Cx::new(-2e-3, 0.0));
        assert_eq!(parse_complex("1e-2+3E+1i").unwrap(), Cx::new(0.01, 30.0));
        for bad in ["", "i2", "1+2", "++i", "1+2j", "abc"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn kick_specs() {
        assert_eq!(parse_kick("uniform").unwrap(), KickSpec::Uniform);
        match parse_kick("0.5,0.5,0.5+0.1i").unwrap() {
            KickSpec::Coefficients(v) => assert_eq!(v.len(), 3),
            _ => panic!(),
        }
        assert!(parse_kick("0.5,,0.5").is_err());
    }

    #[test]
    fn regions_resolutions_waypoints() {
        let r = parse_region("-1.5,1.5,-1,1").unwrap();
        assert_eq!(r.re_min, -1.5);
        assert!(parse_region("1,0,0,1").is_err());
        assert_eq!(parse_resolution("60").unwrap(), (60, 60));
        assert_eq!(parse_resolution("30,40").unwrap(), (30, 40));
        assert!(parse_resolution("1").is_err());
        let w = parse_waypoints("1,0; 1.2,0.3 ;1,0").unwrap();
        assert_eq!(w.len(), 3);
        assert!(parse_waypoints("1,0;2,0").is_err());
    }

    #[test]
    fn scans_and_config_files() {
        let s = parse_omega_scan("0.05:pi:60").unwrap();
        assert_eq!(s.count, 60);
        assert_eq!(s.grid().len(), 60);
        assert!(parse_omega_scan("0.05:pi").is_err());
        let c = parse_config_file("two-j = 2\n# comment\nomega=pi/6\n\nout=x.tsv # trailing\n")
            .unwrap();
        assert_eq!(c.get("two-j").map(String::as_str), Some("2"));
        assert_eq!(c.get("omega").map(String::as_str), Some("pi/6"));
        assert_eq!(c.get("out").map(String::as_str), Some("x.tsv"));
        assert!(parse_config_file("justkey\n").is_err());
    }
}
