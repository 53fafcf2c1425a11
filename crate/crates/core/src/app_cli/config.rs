//! Flat `key = value` configuration with `[section]` headers.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{AxiError, Result};
use crate::fem_axisym::Formulation;
use crate::material_mcc::MatParams;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackPoint {
    pub label: String,
    pub r: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub r_int: f64,
    pub r_ext: f64,
    pub height: f64,
    pub n_r: usize,
    pub n_z: usize,
    pub steps: usize,
    pub formulation: Formulation,
    pub e: f64,
    pub nu: f64,
    pub h_mod: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub m: f64,
    /// Magnitude of the initial consolidation pressure.
    pub pc0: f64,
    pub ubar: f64,
    pub fix_inner_z: bool,
    pub tol: f64,
    pub k_max: usize,
    pub max_bisect: usize,
    pub predictor: bool,
    pub out_dir: PathBuf,
    pub vtk: bool,
    pub track: Vec<TrackPoint>,
}

impl Default for RunConfig {
    /// Thick-cylinder benchmark.
    fn default() -> Self {
        let mut c = RunConfig {
            r_int: 10.0,
            r_ext: 15.0,
            height: 10.0,
            n_r: 5,
            n_z: 10,
            steps: 30,
            formulation: Formulation::UL,
            e: 1.375e9,
            nu: 0.375,
            h_mod: 765e6,
            kappa: 0.0,
            alpha: 1.0,
            m: 1.0,
            pc0: 2.4e8,
            ubar: 1.0,
            fix_inner_z: true,
            tol: 1e-8,
            k_max: 25,
            max_bisect: 4,
            predictor: true,
            out_dir: PathBuf::from("out"),
            vtk: true,
            track: Vec::new(),
        };
        c.track = c.default_track();
        c
    }
}

impl RunConfig {
    /// Corners of the meridian section: A inner-top, B inner-bottom, C outer-top, D outer-bottom.
    pub fn default_track(&self) -> Vec<TrackPoint> {
        let p = |l: &str, r, z| TrackPoint { label: l.to_string(), r, z };
        vec![
            p("A", self.r_int, self.height),
            p("B", self.r_int, 0.0),
            p("C", self.r_ext, self.height),
            p("D", self.r_ext, 0.0),
        ]
    }

    pub fn params(&self) -> Result<MatParams> {
        MatParams::new(self.e, self.nu, self.h_mod, self.kappa, self.alpha, self.m, self.pc0)
    }
}

fn cfg_err(line: usize, msg: impl Into<String>) -> AxiError {
    AxiError::Config { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| cfg_err(line, format!("cannot parse '{v}' for '{key}'")))
}

fn flag(v: &str, line: usize, key: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(cfg_err(line, format!("'{key}' expects a boolean, got '{v}'"))),
    }
}

/// Parses a configuration text; unspecified keys keep the benchmark defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    let mut section = String::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut track: Vec<TrackPoint> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| cfg_err(ln, "unterminated section header"))?;
            section = name.trim().to_ascii_lowercase();
            const SECTIONS: [&str; 7] = ["geometry", "mesh", "load", "solver", "material", "output", "track"];
            if !SECTIONS.contains(&section.as_str()) {
                return Err(cfg_err(ln, format!("unknown section [{section}]")));
            }
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| cfg_err(ln, "expected 'key = value'"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(cfg_err(ln, "empty key or value"));
        }
        let full = format!("{section}.{k}");
        if let Some(prev) = seen.insert(full.clone(), ln) {
            return Err(cfg_err(ln, format!("'{full}' already set on line {prev}")));
        }
        match (section.as_str(), k) {
            ("geometry", "r_int") => c.r_int = num(v, ln, k)?,
            ("geometry", "r_ext") => c.r_ext = num(v, ln, k)?,
            ("geometry", "height") => c.height = num(v, ln, k)?,
            ("mesh", "n_r") => c.n_r = num(v, ln, k)?,
            ("mesh", "n_z") => c.n_z = num(v, ln, k)?,
            ("load", "steps") => c.steps = num(v, ln, k)?,
            ("load", "ubar") => c.ubar = num(v, ln, k)?,
            ("load", "fix_inner_z") => c.fix_inner_z = flag(v, ln, k)?,
            ("solver", "formulation") => c.formulation = v.parse().map_err(|e: AxiError| cfg_err(ln, e.to_string()))?,
            ("solver", "tol") => c.tol = num(v, ln, k)?,
            ("solver", "k_max") => c.k_max = num(v, ln, k)?,
            ("solver", "max_bisect") => c.max_bisect = num(v, ln, k)?,
            ("solver", "predictor") => c.predictor = flag(v, ln, k)?,
            ("material", "e") => c.e = num(v, ln, k)?,
            ("material", "nu") => c.nu = num(v, ln, k)?,
            ("material", "h") => c.h_mod = num(v, ln, k)?,
            ("material", "kappa") => c.kappa = num(v, ln, k)?,
            ("material", "alpha") => c.alpha = num(v, ln, k)?,
            ("material", "m") => c.m = num(v, ln, k)?,
            ("material", "pc0") => c.pc0 = num(v, ln, k)?,
            ("material", "pc0_sign") => {
                if v != "compressive" {
                    return Err(cfg_err(
                        ln,
                        format!("pc0_sign '{v}' unsupported: only 'compressive' keeps the stress-free state admissible"),
                    ));
                }
            }
            ("output", "dir") => c.out_dir = PathBuf::from(v),
            ("output", "vtk") => c.vtk = flag(v, ln, k)?,
            ("track", label) => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(cfg_err(ln, format!("track point '{label}' expects 'R, Z'")));
                }
                track.push(TrackPoint { label: label.to_string(), r: num(parts[0], ln, k)?, z: num(parts[1], ln, k)? });
            }
            ("", _) => return Err(cfg_err(ln, format!("key '{k}' outside any section"))),
            _ => return Err(cfg_err(ln, format!("unknown key '{k}' in [{section}]"))),
        }
    }
    let at = |key: &str| seen.get(key).copied().unwrap_or(0);
    let pos = |v: f64, key: &str| -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(cfg_err(at(key), format!("'{key}' must be positive")))
        }
    };
    if !(c.r_int >= 0.0) {
        return Err(cfg_err(at("geometry.r_int"), "'geometry.r_int' must be non-negative"));
    }
    pos(c.r_ext - c.r_int, "geometry.r_ext")?;
    pos(c.height, "geometry.height")?;
    if c.n_r == 0 || c.n_z == 0 {
        return Err(cfg_err(at(if c.n_r == 0 { "mesh.n_r" } else { "mesh.n_z" }), "element counts must be at least 1"));
    }
    if c.steps == 0 {
        return Err(cfg_err(at("load.steps"), "'load.steps' must be at least 1"));
    }
    if !(c.tol > 0.0 && c.tol <= 1e-2) {
        return Err(cfg_err(at("solver.tol"), "'solver.tol' must lie in (0, 1e-2]"));
    }
    if c.k_max == 0 {
        return Err(cfg_err(at("solver.k_max"), "'solver.k_max' must be at least 1"));
    }
    if !c.ubar.is_finite() {
        return Err(cfg_err(at("load.ubar"), "'load.ubar' must be finite"));
    }
    c.params()?;
    c.track = if track.is_empty() { c.default_track() } else { track };
    Ok(c)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| AxiError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
