//! Run configuration: plain-text `key = value` lines, `#` comments and
//! optional `[section]` headers. Section names are cosmetic; every key is
//! unique across the file.
//!
//! ```text
//! [curve]
//! kind = torus_knot
//! R = 2
//! rho = 1
//! n = 3
//! [field]
//! normal = torus_normal
//! q = -pi/2, -pi/3, -pi/6, 0
//! ```

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use std::fmt::{self, Write as _};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    /// `length = None` means one full turn.
    Helix {
        a: f64,
        b: f64,
        length: Option<f64>,
    },
    TorusKnot {
        major: f64,
        minor: f64,
        winding: u32,
    },
    /// CSV of `t,x,y,z` rows.
    Samples {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalSpec {
    Principal,
    TorusNormal,
    RotationMinimizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Build,
    Solve,
    Energy,
    Sweep,
    Validate,
}

/// Ruling angle of the rotated ribbons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSpec {
    Constant(f64),
    /// Same ruling angle as the ribbon on the base field.
    Base,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WidthSpec {
    Absolute(f64),
    /// Fraction of the largest regular half-width.
    OfMax(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub normal: NormalSpec,
    /// Constant rotation applied to the base field.
    pub offset: f64,
    pub q_values: Vec<f64>,
    pub mode: Mode,
    pub phi: PhiSpec,
    pub width: WidthSpec,
    pub grid: usize,
    pub mesh_nt: usize,
    pub mesh_nu: usize,
    pub quad_nu: usize,
    pub tol: f64,
    pub r_values: Vec<f64>,
    pub sweep_points: usize,
    pub out: PathBuf,
    /// Ruling perturbation used by `validate` to prove the checks can fail.
    pub inject_fault: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            curve: CurveSpec::Helix {
                a: 1.0,
                b: 1.0,
                length: None,
            },
            normal: NormalSpec::Principal,
            offset: 0.0,
            q_values: vec![0.0],
            mode: Mode::Build,
            phi: PhiSpec::Base,
            width: WidthSpec::OfMax(0.5),
            grid: 2001,
            mesh_nt: 400,
            mesh_nu: 11,
            quad_nu: 41,
            tol: 1e-8,
            r_values: vec![1.0, 2.0, 3.0, 4.0],
            sweep_points: 512,
            out: PathBuf::from("out"),
            inject_fault: 0.0,
        }
    }
}

/// Parses `1.5`, `pi`, `-pi/2`, `2*pi/3`, `0.25*pi`.
pub fn parse_number(text: &str) -> Result<f64, ConfigError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let value = if let Some(pos) = s.find("pi") {
        let (head, tail) = (&s[..pos], &s[pos + 2..]);
        let coef = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h
                .strip_suffix('*')
                .and_then(|c| c.parse::<f64>().ok())
                .ok_or_else(|| ConfigError(format!("bad number '{text}'")))?,
        };
        let div = match tail {
            "" => 1.0,
            t => t
                .strip_prefix('/')
                .and_then(|d| d.parse::<f64>().ok())
                .ok_or_else(|| ConfigError(format!("bad number '{text}'")))?,
        };
        coef * PI / div
    } else {
        s.parse::<f64>()
            .map_err(|_| ConfigError(format!("bad number '{text}'")))?
    };
    if !value.is_finite() {
        return err(format!("number '{text}' is not finite"));
    }
    Ok(value)
}

pub fn parse_list(text: &str) -> Result<Vec<f64>, ConfigError> {
    let items: Vec<f64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_number)
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return err("empty list");
    }
    Ok(items)
}

fn parse_count(key: &str, text: &str, min: usize) -> Result<usize, ConfigError> {
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("{key}: expected an integer, got '{text}'")))?;
    if n < min {
        return err(format!("{key} must be at least {min}, got {n}"));
    }
    Ok(n)
}

pub fn parse_width(text: &str) -> Result<WidthSpec, ConfigError> {
    let t = text.trim();
    if let Some(frac) = t.strip_suffix("w_max") {
        let frac = frac.trim().trim_end_matches('*');
        let f = if frac.is_empty() { 1.0 } else { parse_number(frac)? };
        if !(f > 0.0 && f < 1.0) {
            return err(format!("w fraction must lie in (0, 1), got {f}"));
        }
        return Ok(WidthSpec::OfMax(f));
    }
    let w = parse_number(t)?;
    if !(w > 0.0) {
        return err(format!("w must be positive, got {w}"));
    }
    Ok(WidthSpec::Absolute(w))
}

fn parse_phi(text: &str) -> Result<PhiSpec, ConfigError> {
    let t = text.trim();
    if t == "base" {
        return Ok(PhiSpec::Base);
    }
    let v = t
        .strip_prefix("constant:")
        .ok_or_else(|| ConfigError(format!("phi must be 'base' or 'constant:<angle>', got '{t}'")))?;
    let phi = parse_number(v)?;
    if !(phi > 0.0 && phi < PI) {
        return err(format!("phi must lie in (0, pi), got {phi}"));
    }
    Ok(PhiSpec::Constant(phi))
}

fn tokenize(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return err(format!("line {}: duplicate key '{key}'", lineno + 1));
        }
    }
    Ok(map)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = tokenize(text)?;
        let mut take = |k: &str| map.remove(k);
        let mut cfg = RunConfig::default();

        let kind = take("kind").unwrap_or_else(|| "helix".into());
        cfg.curve = match kind.as_str() {
            "helix" => {
                let a = take("a").map(|v| parse_number(&v)).transpose()?.unwrap_or(1.0);
                let b = take("b").map(|v| parse_number(&v)).transpose()?.unwrap_or(1.0);
                let length = take("length").map(|v| parse_number(&v)).transpose()?;
                if !(a > 0.0) || b < 0.0 || length.is_some_and(|l| l <= 0.0) {
                    return err("helix needs a > 0, b >= 0 and length > 0");
                }
                CurveSpec::Helix { a, b, length }
            }
            "torus_knot" => {
                let major = take("R").map(|v| parse_number(&v)).transpose()?.unwrap_or(2.0);
                let minor = take("rho").map(|v| parse_number(&v)).transpose()?.unwrap_or(1.0);
                let winding = take("n").map(|v| parse_count("n", &v, 1)).transpose()?.unwrap_or(3);
                if !(minor > 0.0 && major > minor) {
                    return err("torus knot needs R > rho > 0");
                }
                CurveSpec::TorusKnot {
                    major,
                    minor,
                    winding: winding as u32,
                }
            }
            "samples" => CurveSpec::Samples {
                path: PathBuf::from(take("path").ok_or_else(|| ConfigError("samples curve needs 'path'".into()))?),
            },
            other => return err(format!("unknown curve kind '{other}'")),
        };

        cfg.normal = match take("normal").as_deref() {
            None if matches!(cfg.curve, CurveSpec::TorusKnot { .. }) => NormalSpec::TorusNormal,
            None | Some("principal") => NormalSpec::Principal,
            Some("torus_normal") => NormalSpec::TorusNormal,
            Some("rotation_minimizing") => NormalSpec::RotationMinimizing,
            Some(other) => return err(format!("unknown normal '{other}'")),
        };
        if cfg.normal == NormalSpec::TorusNormal && !matches!(cfg.curve, CurveSpec::TorusKnot { .. }) {
            return err("torus_normal needs kind = torus_knot");
        }
        if let Some(v) = take("offset") {
            cfg.offset = parse_number(&v)?;
        }
        cfg.q_values = match take("q") {
            Some(v) => parse_list(&v)?,
            None if matches!(cfg.curve, CurveSpec::TorusKnot { .. }) => {
                vec![-FRAC_PI_2, -FRAC_PI_3, -FRAC_PI_6, 0.0]
            }
            None => vec![0.0],
        };
        if let Some(v) = take("mode") {
            cfg.mode = parse_mode(&v)?;
        }
        if let Some(v) = take("phi") {
            cfg.phi = parse_phi(&v)?;
        }
        if let Some(v) = take("w") {
            cfg.width = parse_width(&v)?;
        }
        if let Some(v) = take("grid") {
            cfg.grid = parse_count("grid", &v, 5)?;
        }
        if let Some(v) = take("mesh_nt") {
            cfg.mesh_nt = parse_count("mesh_nt", &v, 2)?;
        }
        if let Some(v) = take("mesh_nu") {
            cfg.mesh_nu = parse_count("mesh_nu", &v, 2)?;
        }
        if let Some(v) = take("quad_nu") {
            cfg.quad_nu = parse_count("quad_nu", &v, 3)?;
        }
        if let Some(v) = take("tol") {
            cfg.tol = parse_number(&v)?;
            if !(cfg.tol > 0.0) {
                return err("tol must be positive");
            }
        }
        if let Some(v) = take("r") {
            cfg.r_values = parse_r_list(&v)?;
        }
        if let Some(v) = take("sweep_points") {
            cfg.sweep_points = parse_count("sweep_points", &v, 2)?;
        }
        if let Some(v) = take("out") {
            cfg.out = PathBuf::from(v);
        }
        if let Some(v) = take("inject_fault") {
            cfg.inject_fault = parse_number(&v)?;
        }
        if let Some(k) = map.keys().next() {
            return err(format!("unknown key '{k}'"));
        }
        Ok(cfg)
    }

    /// Canonical text form; `parse(normalized())` gives back `self`.
    pub fn normalized(&self) -> String {
        let mut s = String::from("[curve]\n");
        match &self.curve {
            CurveSpec::Helix { a, b, length } => {
                let _ = writeln!(s, "kind = helix\na = {a:?}\nb = {b:?}");
                if let Some(l) = length {
                    let _ = writeln!(s, "length = {l:?}");
                }
            }
            CurveSpec::TorusKnot { major, minor, winding } => {
                let _ = writeln!(s, "kind = torus_knot\nR = {major:?}\nrho = {minor:?}\nn = {winding}");
            }
            CurveSpec::Samples { path } => {
                let _ = writeln!(s, "kind = samples\npath = {}", path.display());
            }
        }
        let normal = match self.normal {
            NormalSpec::Principal => "principal",
            NormalSpec::TorusNormal => "torus_normal",
            NormalSpec::RotationMinimizing => "rotation_minimizing",
        };
        let _ = writeln!(s, "[field]\nnormal = {normal}\noffset = {:?}", self.offset);
        let _ = writeln!(s, "q = {}", join(&self.q_values));
        let phi = match self.phi {
            PhiSpec::Base => "base".to_string(),
            PhiSpec::Constant(v) => format!("constant:{v:?}"),
        };
        let width = match self.width {
            WidthSpec::Absolute(w) => format!("{w:?}"),
            WidthSpec::OfMax(f) => format!("{f:?}*w_max"),
        };
        let _ = writeln!(
            s,
            "[run]\nmode = {}\nphi = {phi}\nw = {width}\ngrid = {}\nmesh_nt = {}\nmesh_nu = {}\nquad_nu = {}\ntol = {:?}\nr = {}\nsweep_points = {}\ninject_fault = {:?}",
            mode_name(self.mode),
            self.grid,
            self.mesh_nt,
            self.mesh_nu,
            self.quad_nu,
            self.tol,
            join(&self.r_values),
            self.sweep_points,
            self.inject_fault
        );
        let _ = writeln!(s, "[output]\nout = {}", self.out.display());
        s
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

pub fn parse_r_list(text: &str) -> Result<Vec<f64>, ConfigError> {
    let r = parse_list(text)?;
    if r.iter().any(|&x| !(x > 0.0)) {
        return err("r values must be positive");
    }
    Ok(r)
}

pub fn parse_mode(text: &str) -> Result<Mode, ConfigError> {
    Ok(match text.trim() {
        "build" => Mode::Build,
        "solve" => Mode::Solve,
        "energy" => Mode::Energy,
        "sweep" => Mode::Sweep,
        "validate" => Mode::Validate,
        other => return err(format!("unknown mode '{other}'")),
    })
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Build => "build",
        Mode::Solve => "solve",
        Mode::Energy => "energy",
        Mode::Sweep => "sweep",
        Mode::Validate => "validate",
    }
}
