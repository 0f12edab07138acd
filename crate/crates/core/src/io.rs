//! Run configuration and result files (CSV maps, PGM images, peak JSON).

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::localization::{GridSpec, LocalizationMap, PeakReport, SweepParam};
use crate::model::PhysParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Pgm => "pgm",
        }
    }

    pub fn parse(s: &str) -> Result<Format> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pgm" => Ok(Format::Pgm),
            other => Err(Error::Validation(format!(
                "unknown output format `{other}` (expected csv, json or pgm)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysParams,
    pub grid: GridSpec,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: PhysParams::default(),
            grid: GridSpec::default(),
            output_dir: PathBuf::from("out"),
            formats: [Format::Csv].into_iter().collect(),
            sweep: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        if self.formats.is_empty() {
            return Err(Error::Validation("formats must not be empty".into()));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::Validation("sweep.values must not be empty".into()));
            }
            if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("sweep value {v} is not finite")));
            }
        }
        Ok(())
    }

    /// Creates the output directory and probes that it is writable.
    pub fn ensure_output_dir(&self) -> Result<()> {
        let dir = &self.output_dir;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let probe = dir.join(".atomloc-write-probe");
        fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
        fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: Option<f64>,
    x_max: Option<f64>,
    y_min: Option<f64>,
    y_max: Option<f64>,
    nx: Option<usize>,
    ny: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    values: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    gamma: Option<f64>,
    delta_p: Option<f64>,
    delta_c: Option<f64>,
    omega_p0: Option<f64>,
    omega_c0: Option<f64>,
    theta: Option<f64>,
    delta_phase: Option<f64>,
    eta_phase: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    alpha_scale: Option<f64>,
    grid: Option<RawGrid>,
    formats: Option<Vec<String>>,
    sweep: Option<RawSweep>,
    output_dir: Option<PathBuf>,
}

/// Parses a JSON configuration; absent keys take their defaults.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;

    let mut cfg = RunConfig::default();
    let p = &mut cfg.params;
    let pairs = [
        (&mut p.gamma, raw.gamma),
        (&mut p.delta_p, raw.delta_p),
        (&mut p.delta_c, raw.delta_c),
        (&mut p.omega_p0, raw.omega_p0),
        (&mut p.omega_c0, raw.omega_c0),
        (&mut p.theta, raw.theta),
        (&mut p.delta_phase, raw.delta_phase),
        (&mut p.eta_phase, raw.eta_phase),
        (&mut p.kappa1, raw.kappa1),
        (&mut p.kappa2, raw.kappa2),
        (&mut p.alpha_scale, raw.alpha_scale),
    ];
    for (slot, value) in pairs {
        if let Some(v) = value {
            *slot = v;
        }
    }

    if let Some(g) = raw.grid {
        let grid = &mut cfg.grid;
        grid.x_min = g.x_min.unwrap_or(grid.x_min);
        grid.x_max = g.x_max.unwrap_or(grid.x_max);
        grid.y_min = g.y_min.unwrap_or(grid.y_min);
        grid.y_max = g.y_max.unwrap_or(grid.y_max);
        grid.nx = g.nx.unwrap_or(grid.nx);
        grid.ny = g.ny.unwrap_or(grid.ny);
    }
    if let Some(formats) = raw.formats {
        cfg.formats = formats.iter().map(|f| Format::parse(f)).collect::<Result<_>>()?;
    }
    if let Some(s) = raw.sweep {
        cfg.sweep = Some(SweepSpec {
            param: s.param.parse()?,
            values: s.values,
        });
    }
    if let Some(dir) = raw.output_dir {
        cfg.output_dir = dir;
    }

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Formats `v` with 9 significant digits, keeping trailing zeros
/// (the C `%#.9g` conversion).
pub fn format_sig9(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v == 0.0 {
        return format!("{:.*}", (DIGITS - 1) as usize, 0.0);
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..DIGITS).contains(&exp) {
        format!("{:.*}", (DIGITS - 1 - exp) as usize, v)
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `x,y,chi_im` rows in row-major order.
pub fn write_csv(map: &LocalizationMap, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let mut body = String::with_capacity(map.values.len() * 48);
    body.push_str("x,y,chi_im\n");
    for ((x, y), v) in map.grid.points().zip(&map.values) {
        body.push_str(&format_sig9(x));
        body.push(',');
        body.push_str(&format_sig9(y));
        body.push(',');
        body.push_str(&format_sig9(*v));
        body.push('\n');
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a map CSV back as `(x, y, chi_im)` triples.
pub fn read_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let parse_err = |line: usize, message: String| Error::Parse {
        origin: format!("{}:{line}", path.display()),
        message,
    };
    match lines.next() {
        Some("x,y,chi_im") => {}
        other => return Err(parse_err(1, format!("unexpected header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(parse_err(k + 2, format!("expected 3 fields, got {}", fields.len())));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| parse_err(k + 2, format!("`{s}`: {e}")))
            };
            Ok((num(fields[0])?, num(fields[1])?, num(fields[2])?))
        })
        .collect()
}

/// 16-bit grey levels, linear over `[min, max]`; top image row is `y_max`.
pub fn pgm_pixels(map: &LocalizationMap) -> Vec<u16> {
    let (lo, hi) = (map.min(), map.max());
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    let mut out = Vec::with_capacity(nx * ny);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = map.at(i, j);
            let level = if hi > lo {
                ((v - lo) / (hi - lo) * 65535.0).round().clamp(0.0, 65535.0) as u16
            } else {
                32768
            };
            out.push(level);
        }
    }
    out
}

/// Binary PGM (P5), maxval 65535, big-endian samples.
pub fn write_pgm(map: &LocalizationMap, path: &Path) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n65535\n", map.grid.nx, map.grid.ny).into_bytes();
    for px in pgm_pixels(map) {
        bytes.extend_from_slice(&px.to_be_bytes());
    }
    let mut w = create(path)?;
    w.write_all(&bytes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Grid, parameter snapshot and values as one JSON document.
pub fn write_map_json(map: &LocalizationMap, path: &Path) -> Result<()> {
    let text = serde_json::to_string(map).expect("map serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn peaks_json(reports: &[(f64, &PeakReport)]) -> serde_json::Value {
    let items: Vec<_> = reports
        .iter()
        .map(|(value, report)| {
            let peaks: Vec<_> = report
                .entries
                .iter()
                .map(|p| {
                    json!({
                        "quadrant": p.quadrant.as_str(),
                        "x": p.x,
                        "y": p.y,
                        "chi_im": p.value,
                        "magnitude": p.magnitude,
                    })
                })
                .collect();
            json!({ "param_value": value, "peaks": peaks })
        })
        .collect();
    serde_json::Value::Array(items)
}

/// Peak reports as a JSON array; numbers keep full round-trip precision.
pub fn write_peaks_json(reports: &[(f64, &PeakReport)], path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&peaks_json(reports)).expect("peaks serialize");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes `map` as `<stem>.<ext>` for every requested format and returns the
/// paths written.
pub fn write_map(map: &LocalizationMap, dir: &Path, stem: &str, formats: &BTreeSet<Format>) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in formats {
        let path = dir.join(format!("{stem}.{}", f.extension()));
        match f {
            Format::Csv => write_csv(map, &path)?,
            Format::Json => write_map_json(map, &path)?,
            Format::Pgm => write_pgm(map, &path)?,
        }
        written.push(path);
    }
    Ok(written)
}
